//! Strict experiment configuration: TOML with unknown keys rejected.
//!
//! All physical numbers are in units of the hopping `J` and the lattice
//! constant `a`; times in `1/J`. Every run is seedless and deterministic.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use weylqed::lattice::{LatticeParams, SiteIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Bands,
    Dos,
    Dynamics,
    Boundstate,
    Spinbands,
    Berry,
    Nodes,
}

impl ExperimentKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "bands" => Some(Self::Bands),
            "dos" => Some(Self::Dos),
            "dynamics" => Some(Self::Dynamics),
            "boundstate" => Some(Self::Boundstate),
            "spinbands" => Some(Self::Spinbands),
            "berry" => Some(Self::Berry),
            "nodes" => Some(Self::Nodes),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(default = "one")]
    pub hopping: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "one")]
    pub lattice_constant: f64,
    pub size: usize,
}

fn one() -> f64 {
    1.0
}

impl LatticeSection {
    pub fn params(&self) -> Result<LatticeParams> {
        LatticeParams::new(self.hopping, self.offset, self.lattice_constant, self.size)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn with_offset(&self, offset: f64) -> Result<LatticeParams> {
        LatticeParams::new(self.hopping, offset, self.lattice_constant, self.size)
            .map_err(|e| anyhow::anyhow!("{e}"))
    }
}

/// Emitter detuning: a number, or "critical" to resolve the critical
/// detuning for the configured offset at run time.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Detuning {
    Value(f64),
    Keyword(String),
}

impl Default for Detuning {
    fn default() -> Self {
        Detuning::Value(0.0)
    }
}

impl Detuning {
    pub fn validate(&self) -> Result<()> {
        match self {
            Detuning::Value(_) => Ok(()),
            Detuning::Keyword(k) if k == "critical" => Ok(()),
            Detuning::Keyword(k) => bail!("unknown detuning keyword {k:?} (use a number or \"critical\")"),
        }
    }

    #[cfg(test)]
    pub fn is_critical(&self) -> bool {
        matches!(self, Detuning::Keyword(k) if k == "critical")
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterSection {
    pub site: [usize; 3],
    #[serde(default)]
    pub detuning: Detuning,
    pub coupling: f64,
}

impl EmitterSection {
    pub fn site_index(&self) -> SiteIndex {
        SiteIndex::new(self.site[0], self.site[1], self.site[2])
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    /// Momentum grid points per axis for zone sums and fields.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Gaussian broadening for densities of states.
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_dt_out")]
    pub dt_out: f64,
    /// Power-law fit window [fit_min, fit_max] in units of a.
    #[serde(default = "default_fit_min")]
    pub fit_min: f64,
    #[serde(default = "default_fit_max")]
    pub fit_max: f64,
    /// Truncation ranges s for spin-model sweeps.
    #[serde(default = "default_ranges")]
    pub ranges: Vec<f64>,
    /// Plaquette mesh per axis for Berry curvature planes.
    #[serde(default = "default_berry_mesh")]
    pub berry_mesh: usize,
    /// Degeneracy tolerance for node searches.
    #[serde(default = "default_node_tol")]
    pub node_tol: f64,
    /// Points per axis for band-structure cuts and planes.
    #[serde(default = "default_mesh")]
    pub mesh: usize,
    /// Offset sweep (sublattice offsets M); experiment-dependent.
    #[serde(default)]
    pub offsets: Vec<f64>,
    /// Emit the Markovian reference trace alongside dynamics.
    #[serde(default)]
    pub markov: bool,
}

fn default_grid() -> usize {
    64
}
fn default_eta() -> f64 {
    0.02
}
fn default_t_max() -> f64 {
    40.0
}
fn default_dt_out() -> f64 {
    0.1
}
fn default_fit_min() -> f64 {
    2.0
}
fn default_fit_max() -> f64 {
    8.0
}
fn default_ranges() -> Vec<f64> {
    vec![1.0, 3.0, 5.0, 7.0, 9.0]
}
fn default_berry_mesh() -> usize {
    41
}
fn default_node_tol() -> f64 {
    1e-8
}
fn default_mesh() -> usize {
    200
}

impl Default for NumericsSection {
    fn default() -> Self {
        toml::from_str("").expect("defaults")
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub lattice: LatticeSection,
    #[serde(default)]
    pub emitters: Vec<EmitterSection>,
    #[serde(default)]
    pub numerics: NumericsSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).context("invalid experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.lattice.params()?;
        for e in &self.emitters {
            e.detuning.validate()?;
            if !(e.coupling >= 0.0) {
                bail!("emitter coupling must be non-negative");
            }
        }
        if matches!(
            self.experiment,
            ExperimentKind::Dynamics | ExperimentKind::Boundstate
        ) && self.emitters.is_empty()
        {
            bail!("{:?} experiments need at least one [[emitters]] entry", self.experiment);
        }
        if self.numerics.grid < 4 {
            bail!("numerics.grid must be at least 4");
        }
        if !(self.numerics.eta > 0.0) {
            bail!("numerics.eta must be positive");
        }
        Ok(())
    }
}
