//! Experiment execution: dispatch a validated config, write plot-ready
//! artifacts, and return the summary for the manifest.

use crate::config::{Detuning, ExperimentConfig, ExperimentKind};
use crate::output::ArtifactSet;
use anyhow::{bail, Result};
use serde_json::json;
use std::f64::consts::PI;
use weylqed::bound_states::{
    bound_state_wavefunction, critical_detuning, find_bound_state_energy, fit_power_law, residue,
    FitDirection,
};
use weylqed::dynamics::{evolve, markov_prediction, markov_rate, EmitterSpec, ExcitationState};
use weylqed::greens::target_sublattice;
use weylqed::kgrid::KGrid;
use weylqed::lattice::{
    bands, dos, find_weyl_nodes, LatticeParams, Momentum, SiteIndex, Sublattice,
};
use weylqed::spin_model::{
    berry_curvature_plane, effective_couplings, find_band_crossings, find_spin_weyl_nodes,
    spin_band_cut,
};

const UNITS: &str = "units: energies in J, lengths in a, times in 1/J";

pub fn execute(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    match cfg.experiment {
        ExperimentKind::Bands => run_bands(cfg, artifacts),
        ExperimentKind::Dos => run_dos(cfg, artifacts),
        ExperimentKind::Dynamics => run_dynamics(cfg, artifacts),
        ExperimentKind::Boundstate => run_boundstate(cfg, artifacts),
        ExperimentKind::Spinbands => run_spinbands(cfg, artifacts),
        ExperimentKind::Berry => run_berry(cfg, artifacts),
        ExperimentKind::Nodes => run_nodes(cfg, artifacts),
    }
}

fn numerical<T>(r: weylqed::Result<T>) -> Result<T> {
    r.map_err(|e| anyhow::Error::new(NumericalFailureError(e.to_string())))
}

#[derive(Debug)]
pub struct NumericalFailureError(pub String);

impl std::fmt::Display for NumericalFailureError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "numerical failure: {}", self.0)
    }
}

impl std::error::Error for NumericalFailureError {}

/// Resolve an emitter's detuning, mapping "critical" to the critical
/// detuning of the simulated lattice.
fn resolve_detuning(
    params: &LatticeParams,
    det: &Detuning,
    g: f64,
    grid: &KGrid,
) -> Result<f64> {
    match det {
        Detuning::Value(v) => Ok(*v),
        Detuning::Keyword(_) => {
            let dc = numerical(critical_detuning(params, g, grid))?;
            Ok(dc.delta_c)
        }
    }
}

fn run_bands(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    let params = cfg.lattice.params()?;
    let n = cfg.numerics.mesh.max(2);
    let mut rows = Vec::with_capacity(n * n);
    let mut min_gap = f64::INFINITY;
    let mut max_e: f64 = 0.0;
    for i in 0..n {
        let kx = -PI + 2.0 * PI * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let kz = -PI + 2.0 * PI * j as f64 / (n - 1) as f64;
            let s = bands(&params, Momentum::new(kx, 0.0, kz));
            min_gap = min_gap.min(s.omega_plus - s.omega_minus);
            max_e = max_e.max(s.omega_plus);
            rows.push(vec![kx, kz, s.omega_minus, s.omega_plus]);
        }
    }
    artifacts.write_csv(
        "bands.csv",
        &format!("dispersion on the k_y = 0 plane; {UNITS}; momenta in 1/a"),
        &["k_x", "k_z", "omega_minus", "omega_plus"],
        rows.into_iter(),
    )?;
    Ok(json!({
        "min_gap_on_plane": min_gap,
        "max_band_energy": max_e,
    }))
}

fn run_dos(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    let params = cfg.lattice.params()?;
    let hist = numerical(dos(&params, cfg.numerics.grid, cfg.numerics.eta))?;
    let rows = (0..hist.n_bins()).map(|i| vec![hist.bin_center(i), hist.density[i]]);
    artifacts.write_csv(
        "dos.csv",
        &format!(
            "per-site density of states, Gaussian broadening eta = {} J; {UNITS}",
            cfg.numerics.eta
        ),
        &["omega", "density"],
        rows,
    )?;
    let fit = hist.fit_exponent(0.1 * params.hopping, 0.5 * params.hopping);
    Ok(json!({
        "integral": hist.integral(),
        "ragged": hist.ragged,
        "exponent_fit": {
            "window": [0.1, 0.5],
            "exponent": fit.slope,
            "r_squared": fit.r_squared,
        },
    }))
}

fn build_emitters(
    cfg: &ExperimentConfig,
    params: &LatticeParams,
    grid: &KGrid,
) -> Result<Vec<EmitterSpec>> {
    let mut out = Vec::new();
    for e in &cfg.emitters {
        let delta = resolve_detuning(params, &e.detuning, e.coupling, grid)?;
        out.push(EmitterSpec::new(e.site_index(), delta, e.coupling));
    }
    Ok(out)
}

fn run_dynamics(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    let offsets: Vec<f64> = if cfg.numerics.offsets.is_empty() {
        vec![cfg.lattice.offset]
    } else {
        cfg.numerics.offsets.clone()
    };
    let sweep = !cfg.numerics.offsets.is_empty();
    let mut summaries = Vec::new();
    for (idx, &m) in offsets.iter().enumerate() {
        let params = cfg.lattice.with_offset(m)?;
        let grid = KGrid::Commensurate(params.size);
        let emitters = build_emitters(cfg, &params, &grid)?;
        let n_e = emitters.len();
        let initial = ExcitationState::emitter_excited(n_e, params.site_count(), 0);
        let trace = numerical(evolve(
            &params,
            &emitters,
            &initial,
            cfg.numerics.t_max,
            cfg.numerics.dt_out,
        ))?;
        let mut columns: Vec<String> = vec!["t".into()];
        for e in 0..n_e {
            columns.push(if n_e == 1 {
                "pop_e".into()
            } else {
                format!("pop_e{}", e + 1)
            });
        }
        columns.push("pop_photon".into());
        let col_refs: Vec<&str> = columns.iter().map(|s| s.as_str()).collect();
        let rows = (0..trace.times.len()).map(|i| {
            let mut row = vec![trace.times[i]];
            for e in 0..n_e {
                row.push(trace.populations[e][i]);
            }
            row.push(trace.photon_total[i]);
            row
        });
        let name = if sweep {
            format!("dynamics_m{idx}.csv")
        } else {
            "dynamics.csv".to_string()
        };
        artifacts.write_csv(
            &name,
            &format!(
                "excited-state populations, offset M = {m} J, L = {}; {UNITS}",
                params.size
            ),
            &col_refs,
            rows,
        )?;
        // plateau over the last quarter of the run
        let t_lo = 0.75 * cfg.numerics.t_max;
        let (plateau, plateau_std) = trace.plateau(0, t_lo, cfg.numerics.t_max);
        let mut summary = json!({
            "offset": m,
            "detunings": emitters.iter().map(|e| e.detuning).collect::<Vec<_>>(),
            "plateau": plateau,
            "plateau_std": plateau_std,
            "plateau_window": [t_lo, cfg.numerics.t_max],
            "final_population": trace.populations[0].last(),
        });
        if n_e == 2 {
            let (t, h) = trace.first_maximum(1, 9);
            summary["first_max_pop2"] = json!(h);
            summary["first_max_time"] = json!(t);
        }
        if cfg.numerics.markov && n_e == 1 {
            let hist = numerical(dos(&params, cfg.numerics.grid, cfg.numerics.eta))?;
            let gamma = markov_rate(&emitters[0], &hist);
            let mk = markov_prediction(
                &params,
                &emitters[0],
                &hist,
                cfg.numerics.t_max,
                cfg.numerics.dt_out,
            );
            let name = if sweep {
                format!("markov_m{idx}.csv")
            } else {
                "markov.csv".to_string()
            };
            artifacts.write_csv(
                &name,
                &format!("Markovian reference exp(-Gamma t), Gamma = {gamma:.6e} J; {UNITS}"),
                &["t", "pop_e"],
                (0..mk.times.len()).map(|i| vec![mk.times[i], mk.populations[0][i]]),
            )?;
            summary["markov_rate"] = json!(gamma);
        }
        summaries.push(summary);
    }
    Ok(if sweep {
        json!({ "runs": summaries })
    } else {
        summaries.into_iter().next().unwrap()
    })
}

fn run_boundstate(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    let grid = KGrid::Shifted(cfg.numerics.grid);
    let e0 = cfg
        .emitters
        .first()
        .ok_or_else(|| anyhow::anyhow!("boundstate needs an emitter"))?;
    let g = e0.coupling;

    // offset sweep: residues only (the long-time population inset)
    if !cfg.numerics.offsets.is_empty() {
        let mut rows = Vec::new();
        let mut sweep = Vec::new();
        for &m in &cfg.numerics.offsets {
            let params = cfg.lattice.with_offset(m)?;
            let dc = numerical(critical_detuning(&params, g, &grid))?;
            let e_bs = numerical(find_bound_state_energy(
                &params,
                dc.delta_c,
                g,
                Sublattice::A,
                &grid,
            ))?;
            let z = numerical(residue(&params, g, e_bs, Sublattice::A, &grid))?;
            rows.push(vec![m, dc.delta_c, z, z * z]);
            sweep.push(json!({ "offset": m, "delta_c": dc.delta_c, "z": z, "z_squared": z * z }));
        }
        artifacts.write_csv(
            "residue_sweep.csv",
            &format!("bound-state residue vs sublattice offset at critical detuning; {UNITS}"),
            &["offset", "delta_c", "z", "z_squared"],
            rows.into_iter(),
        )?;
        return Ok(json!({ "sweep": sweep }));
    }

    let params = cfg.lattice.params()?;
    let delta = resolve_detuning(&params, &e0.detuning, g, &grid)?;
    let e_bs = numerical(find_bound_state_energy(&params, delta, g, Sublattice::A, &grid))?;
    let bs = numerical(bound_state_wavefunction(
        &params,
        delta,
        g,
        Sublattice::A,
        e_bs,
        &grid,
    ))?;

    // field over the display window, one row per site; the emitter sits at
    // the window origin
    let l = params.size as i64;
    let emitter_site = e0.site_index();
    let rows = (0..l * l * l).map(|flat| {
        let site = SiteIndex::from_flat(flat as usize, l as usize);
        let disp = [
            site.x as i64 - emitter_site.x as i64,
            site.y as i64 - emitter_site.y as i64,
            site.z as i64 - emitter_site.z as i64,
        ];
        let sub = match target_sublattice(Sublattice::A, disp) {
            Sublattice::A => 0.0,
            Sublattice::B => 1.0,
        };
        vec![
            site.x as f64,
            site.y as f64,
            site.z as f64,
            sub,
            bs.photon_amplitude(disp).norm(),
        ]
    });
    artifacts.write_csv(
        "boundstate_field.csv",
        &format!(
            "bound-state photon amplitudes over the L = {} window; sublattice 0 = A, 1 = B; {UNITS}",
            params.size
        ),
        &["x", "y", "z", "sublattice", "abs_C"],
        rows,
    )?;

    let window = (cfg.numerics.fit_min, cfg.numerics.fit_max);
    let mut fits = Vec::new();
    for (dir, sub, key) in [
        (FitDirection::Xy, Sublattice::A, "xy_a"),
        (FitDirection::Xy, Sublattice::B, "xy_b"),
        (FitDirection::Z, Sublattice::A, "z_a"),
    ] {
        if let Ok(f) = fit_power_law(&bs, dir, sub, window) {
            fits.push(json!({
                "key": key,
                "exponent": f.exponent,
                "prefactor": f.prefactor,
                "r_squared": f.r_squared,
                "n_points": f.n_points,
                "flagged": f.flagged,
            }));
        }
    }
    // direction-level exponents: same-sublattice-as-z when available
    let gamma_z = fit_power_law(&bs, FitDirection::Z, Sublattice::A, window)
        .map(|f| f.exponent)
        .ok();
    let gamma_xy = fit_power_law(&bs, FitDirection::Xy, Sublattice::A, window)
        .or_else(|_| fit_power_law(&bs, FitDirection::Xy, Sublattice::B, window))
        .map(|f| f.exponent)
        .ok();
    let z = numerical(residue(&params, g, e_bs, Sublattice::A, &grid))?;
    artifacts.write_json(
        "powerlaw.json",
        &json!({
            "gamma_xy": gamma_xy,
            "gamma_z": gamma_z,
            "fit_window": [window.0, window.1],
            "fits": fits,
        }),
    )?;
    Ok(json!({
        "bound_state_energy": e_bs,
        "detuning": delta,
        "emitter_amplitude": bs.emitter_amplitude,
        "emitter_weight": bs.emitter_amplitude * bs.emitter_amplitude,
        "residue": z,
        "z_squared": z * z,
        "gamma_xy": gamma_xy,
        "gamma_z": gamma_z,
    }))
}

fn spin_coupling(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.emitters.first() {
        Some(e) => Ok(e.coupling),
        None => bail!("spin experiments read the emitter-lattice coupling from the first [[emitters]] entry"),
    }
}

fn run_spinbands(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    let params = cfg.lattice.params()?;
    let grid = KGrid::Shifted(cfg.numerics.grid);
    let g = spin_coupling(cfg)?;
    let s_max = cfg
        .numerics
        .ranges
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let map_max = numerical(effective_couplings(&params, g, s_max, &grid))?;
    let mut rows = Vec::new();
    let mut crossings = serde_json::Map::new();
    for &s in &cfg.numerics.ranges {
        let map = map_max.truncated(s);
        let cut = spin_band_cut(&map, PI / 2.0, 0.0, cfg.numerics.mesh.max(2));
        for i in 0..cut.k_z.len() {
            rows.push(vec![s, cut.k_z[i], cut.omega_minus[i], cut.omega_plus[i]]);
        }
        let kz_stars = find_band_crossings(&map, PI / 2.0, 0.0, 1e-6);
        crossings.insert(format!("s{}", s), json!(kz_stars));
    }
    artifacts.write_csv(
        "spinbands.csv",
        &format!(
            "spin-model dispersion along k_z at k_x = pi/2, k_y = 0 for ranges s; g = {g} J; {UNITS}"
        ),
        &["s", "k_z", "omega_minus", "omega_plus"],
        rows.into_iter(),
    )?;
    Ok(json!({
        "born_markov_warning": map_max.born_markov_warning,
        "dissipative_flag": map_max.dissipative_flag,
        "crossings_by_range": crossings,
    }))
}

fn run_berry(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    let params = cfg.lattice.params()?;
    let grid = KGrid::Shifted(cfg.numerics.grid);
    let g = spin_coupling(cfg)?;
    let s = cfg
        .numerics
        .ranges
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    let map = numerical(effective_couplings(&params, g, s, &grid))?;
    let field = berry_curvature_plane(&map, cfg.numerics.berry_mesh);
    let n = field.grid_n;
    let rows = (0..n * n).map(|idx| {
        let (i, j) = (idx / n, idx % n);
        vec![field.k_edge(i), field.k_edge(j), field.curvature[idx]]
    });
    artifacts.write_csv(
        "berry.csv",
        &format!(
            "lower-band link-variable flux per plaquette on the k_y = 0 plane, range s = {s} a; {UNITS}"
        ),
        &["k_x", "k_z", "flux"],
        rows,
    )?;
    use weylqed::spin_model::spin_bloch;
    let nodes: Vec<serde_json::Value> = field
        .nodes
        .iter()
        .map(|node| {
            let lower = |k: Momentum| spin_bloch(&map, k).lower_eigenvector();
            let flux = weylqed::berry::box_flux(&lower, node.momentum, 0.1, 8);
            json!({
                "k": [node.momentum.kx, node.momentum.ky, node.momentum.kz],
                "chirality": node.chirality,
                "box_flux_over_2pi": flux / (2.0 * PI),
            })
        })
        .collect();
    Ok(json!({
        "total_flux_resolved": field.total_flux_resolved,
        "flagged_plaquettes": field.flagged.len(),
        "nodes": nodes,
    }))
}

fn run_nodes(cfg: &ExperimentConfig, artifacts: &mut ArtifactSet) -> Result<serde_json::Value> {
    let params = cfg.lattice.params()?;
    let search = find_weyl_nodes(&params, cfg.numerics.node_tol);
    artifacts.write_csv(
        "nodes.csv",
        &format!("band-touching momenta with Berry chirality; {UNITS}; momenta in 1/a"),
        &["k_x", "k_y", "k_z", "frequency", "chirality"],
        search.nodes.iter().map(|n| {
            vec![
                n.momentum.kx,
                n.momentum.ky,
                n.momentum.kz,
                n.frequency,
                n.chirality as f64,
            ]
        }),
    )?;
    Ok(json!({
        "gapped": search.gapped,
        "n_nodes": search.nodes.len(),
        "chirality_sum": search.chirality_sum(),
    }))
}

/// Detect spin-model nodes for the berry experiment summary (exposed for
/// completeness; the berry run embeds them already).
#[allow(dead_code)]
fn spin_nodes_summary(cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let params = cfg.lattice.params()?;
    let grid = KGrid::Shifted(cfg.numerics.grid);
    let g = spin_coupling(cfg)?;
    let s = cfg.numerics.ranges.iter().cloned().fold(0.0f64, f64::max);
    let map = numerical(effective_couplings(&params, g, s, &grid))?;
    let search = find_spin_weyl_nodes(&map, 1e-6);
    Ok(json!({
        "n_weyl": search.weyl.len(),
        "chirality_sum": search.chirality_sum(),
        "n_non_weyl": search.non_weyl.len(),
    }))
}
