//! Exact time evolution of two-level emitters coupled to the finite Weyl
//! lattice, restricted to the single-excitation sector.
//!
//! The sector basis is `n_emitters` excited-emitter states followed by the
//! `L^3` one-photon site states; the Hamiltonian is real symmetric and
//! sparse (seven or fewer entries per row), so long plateau runs use the
//! Chebyshev propagator and small oracle runs use a dense
//! matrix-exponential via eigendecomposition.
//!
//! A caution that matters for plateau physics at the Weyl frequency: when
//! `L` is divisible by 4 (and for offsets whose node momenta are
//! grid-commensurate, such as `M = 0` or `M = 2J`), the finite bath hosts
//! exact zero-energy modes degenerate with a resonant emitter. The emitter
//! then Rabi-beats with that discrete multiplet at a rate `~ 2g (2/L)^{3/2}`
//! instead of settling at the bound-state plateau. Sizes with `L = 2 mod 4`
//! (for example `L = 22`) avoid every such commensurate node.

use crate::chebyshev::ChebyshevPropagator;
use crate::lattice::{real_space_hamiltonian, DosHistogram, LatticeParams, SiteIndex, Sublattice};
use crate::sparse::{CsrBuilder, CsrMatrix};
use crate::{Error, Result};
use num_complex::Complex64 as C64;

/// One emitter: lattice site it couples to, detuning from the Weyl
/// frequency, and coupling strength.
#[derive(Debug, Clone, Copy)]
pub struct EmitterSpec {
    pub site: SiteIndex,
    pub detuning: f64,
    pub coupling: f64,
}

impl EmitterSpec {
    pub fn new(site: SiteIndex, detuning: f64, coupling: f64) -> Self {
        Self {
            site,
            detuning,
            coupling,
        }
    }

    pub fn sublattice(&self) -> Sublattice {
        self.site.sublattice()
    }
}

/// Single-excitation state: one complex amplitude per emitter plus one per
/// lattice site.
#[derive(Debug, Clone)]
pub struct ExcitationState {
    pub emitter_amplitudes: Vec<C64>,
    pub photon_field: Vec<C64>,
}

impl ExcitationState {
    /// Emitter `which` excited, photon vacuum.
    pub fn emitter_excited(n_emitters: usize, n_sites: usize, which: usize) -> Self {
        let mut emitter_amplitudes = vec![C64::new(0.0, 0.0); n_emitters];
        emitter_amplitudes[which] = C64::new(1.0, 0.0);
        Self {
            emitter_amplitudes,
            photon_field: vec![C64::new(0.0, 0.0); n_sites],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.emitter_amplitudes
            .iter()
            .chain(self.photon_field.iter())
            .map(|c| c.norm_sqr())
            .sum()
    }

    fn to_vec(&self) -> Vec<C64> {
        let mut v = Vec::with_capacity(self.emitter_amplitudes.len() + self.photon_field.len());
        v.extend_from_slice(&self.emitter_amplitudes);
        v.extend_from_slice(&self.photon_field);
        v
    }

    fn from_vec(v: &[C64], n_emitters: usize) -> Self {
        Self {
            emitter_amplitudes: v[..n_emitters].to_vec(),
            photon_field: v[n_emitters..].to_vec(),
        }
    }
}

/// Excited-state populations per emitter over time, plus the total photon
/// weight. Unitarity holds sample-by-sample to 1e-9.
#[derive(Debug, Clone)]
pub struct PopulationTrace {
    pub times: Vec<f64>,
    /// `populations[e][i]` = |C_e(t_i)|^2 for emitter `e`.
    pub populations: Vec<Vec<f64>>,
    pub photon_total: Vec<f64>,
}

impl PopulationTrace {
    /// Mean and standard deviation of emitter `e`'s population over
    /// `t in [t_lo, t_hi]`.
    pub fn plateau(&self, emitter: usize, t_lo: f64, t_hi: f64) -> (f64, f64) {
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(&self.populations[emitter])
            .filter(|(t, _)| **t >= t_lo && **t <= t_hi)
            .map(|(_, p)| *p)
            .collect();
        let n = vals.len().max(1) as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    /// First local maximum of emitter `e`'s population (after smoothing
    /// over `smooth_window` samples to step over fast small ripples).
    pub fn first_maximum(&self, emitter: usize, smooth_window: usize) -> (f64, f64) {
        let p = &self.populations[emitter];
        let w = smooth_window.max(1);
        let smooth: Vec<f64> = (0..p.len())
            .map(|i| {
                let lo = i.saturating_sub(w / 2);
                let hi = (i + w / 2 + 1).min(p.len());
                p[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
            })
            .collect();
        let mut best = (self.times[0], p[0]);
        let mut peak = smooth[0];
        for i in 1..smooth.len() {
            if smooth[i] > peak {
                peak = smooth[i];
                best = (self.times[i], p[i]);
            } else if peak > 0.05 && smooth[i] < 0.9 * peak {
                break; // clearly past the first maximum
            }
        }
        best
    }
}

/// Sparse single-excitation Hamiltonian for the given emitters.
pub fn single_excitation_hamiltonian(
    params: &LatticeParams,
    emitters: &[EmitterSpec],
) -> Result<CsrMatrix> {
    params.validate()?;
    let l = params.size;
    let n_sites = params.site_count();
    let n_e = emitters.len();
    let mut seen = std::collections::HashSet::new();
    for e in emitters {
        if e.site.x >= l || e.site.y >= l || e.site.z >= l {
            return Err(Error::InvalidParams(format!(
                "emitter site {:?} outside the L = {l} lattice",
                e.site
            )));
        }
        if !seen.insert(e.site.flat(l)) {
            return Err(Error::InvalidParams(format!(
                "two emitters on the same site {:?}",
                e.site
            )));
        }
    }
    let bath = real_space_hamiltonian(params)?;
    let mut b = CsrBuilder::new(n_e + n_sites);
    for (i, e) in emitters.iter().enumerate() {
        if e.detuning != 0.0 {
            b.push(i, i, e.detuning);
        }
        let site = n_e + e.site.flat(l);
        b.push(i, site, e.coupling);
        b.push(site, i, e.coupling);
    }
    for &(i, j, t) in bath.bonds() {
        b.push(n_e + i, n_e + j, t);
        b.push(n_e + j, n_e + i, t);
    }
    for (i, &onsite) in bath.onsite().iter().enumerate() {
        if onsite != 0.0 {
            b.push(n_e + i, n_e + i, onsite);
        }
    }
    Ok(b.build())
}

fn sample_trace(state: &[C64], n_e: usize) -> (Vec<f64>, f64) {
    let pops: Vec<f64> = state[..n_e].iter().map(|c| c.norm_sqr()).collect();
    let photon: f64 = state[n_e..].iter().map(|c| c.norm_sqr()).sum();
    (pops, photon)
}

/// Unitary evolution under the full single-excitation Hamiltonian, sampled
/// every `dt_out`. Norm drift beyond 1e-6 aborts with diagnostics.
pub fn evolve(
    params: &LatticeParams,
    emitters: &[EmitterSpec],
    initial: &ExcitationState,
    t_max: f64,
    dt_out: f64,
) -> Result<PopulationTrace> {
    if t_max * params.hopping.max(1.0) > 1e4 {
        return Err(Error::InvalidParams(format!(
            "t_max = {t_max} exceeds the supported horizon 1e4 / J"
        )));
    }
    if !(dt_out > 0.0) {
        return Err(Error::InvalidParams("dt_out must be positive".into()));
    }
    let n_e = emitters.len();
    let norm0 = initial.norm_sqr();
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(Error::BadInitialState(norm0));
    }
    if initial.emitter_amplitudes.len() != n_e
        || initial.photon_field.len() != params.site_count()
    {
        return Err(Error::InvalidParams(
            "initial state dimensions do not match emitters / lattice".into(),
        ));
    }
    let h = single_excitation_hamiltonian(params, emitters)?;
    let bound = h.gershgorin_bound();
    let mut prop = ChebyshevPropagator::new(h, (-bound, bound), dt_out);

    let mut state = initial.to_vec();
    let n_steps = (t_max / dt_out).round() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut populations = vec![Vec::with_capacity(n_steps + 1); n_e];
    let mut photon_total = Vec::with_capacity(n_steps + 1);

    let mut record = |t: f64, state: &[C64]| {
        let (pops, photon) = sample_trace(state, n_e);
        times.push(t);
        for (e, p) in pops.into_iter().enumerate() {
            populations[e].push(p);
        }
        photon_total.push(photon);
    };
    record(0.0, &state);
    for step in 1..=n_steps {
        prop.step(&mut state);
        let norm: f64 = state.iter().map(|c| c.norm_sqr()).sum();
        let drift = (norm - 1.0).abs();
        if drift > 1e-6 {
            return Err(Error::NormDrift {
                drift,
                limit: 1e-6,
                time: step as f64 * dt_out,
                step,
                diag: format!(
                    "Chebyshev order {} per step of {dt_out}; spectral bound {bound}",
                    prop.n_terms()
                ),
            });
        }
        record(step as f64 * dt_out, &state);
    }
    Ok(PopulationTrace {
        times,
        populations,
        photon_total,
    })
}

/// Dense matrix-exponential propagation via eigendecomposition; the oracle
/// partner of [`evolve`] for small lattices, and exact to rounding.
pub fn evolve_matrix_exponential(
    params: &LatticeParams,
    emitters: &[EmitterSpec],
    initial: &ExcitationState,
    t_max: f64,
    dt_out: f64,
) -> Result<PopulationTrace> {
    let n_e = emitters.len();
    let norm0 = initial.norm_sqr();
    if (norm0 - 1.0).abs() > 1e-9 {
        return Err(Error::BadInitialState(norm0));
    }
    let h = single_excitation_hamiltonian(params, emitters)?;
    let dim = h.dim();
    let eig = h.to_dense().symmetric_eigen();
    let v0 = initial.to_vec();
    // expand initial state in the eigenbasis
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for k in 0..dim {
        let mut a = C64::new(0.0, 0.0);
        for i in 0..dim {
            a += v0[i] * eig.eigenvectors[(i, k)];
        }
        amps[k] = a;
    }
    let n_steps = (t_max / dt_out).round() as usize;
    let mut times = Vec::with_capacity(n_steps + 1);
    let mut populations = vec![Vec::with_capacity(n_steps + 1); n_e];
    let mut photon_total = Vec::with_capacity(n_steps + 1);
    let mut state = vec![C64::new(0.0, 0.0); dim];
    for s in 0..=n_steps {
        let t = s as f64 * dt_out;
        for x in state.iter_mut() {
            *x = C64::new(0.0, 0.0);
        }
        for k in 0..dim {
            let ph = amps[k] * C64::new(0.0, -eig.eigenvalues[k] * t).exp();
            for i in 0..dim {
                state[i] += C64::new(eig.eigenvectors[(i, k)], 0.0) * ph;
            }
        }
        let (pops, photon) = sample_trace(&state, n_e);
        times.push(t);
        for (e, p) in pops.into_iter().enumerate() {
            populations[e].push(p);
        }
        photon_total.push(photon);
    }
    Ok(PopulationTrace {
        times,
        populations,
        photon_total,
    })
}

/// Reconstruct the full state at `t_max` with [`evolve`]'s propagator and
/// return it (used by round-trip tests).
pub fn evolve_state(
    params: &LatticeParams,
    emitters: &[EmitterSpec],
    initial: &ExcitationState,
    t_max: f64,
    dt: f64,
) -> Result<ExcitationState> {
    let h = single_excitation_hamiltonian(params, emitters)?;
    let bound = h.gershgorin_bound();
    let mut prop = ChebyshevPropagator::new(h, (-bound, bound), dt);
    let mut state = initial.to_vec();
    let n_steps = (t_max.abs() / dt.abs()).round() as usize;
    for _ in 0..n_steps {
        prop.step(&mut state);
    }
    Ok(ExcitationState::from_vec(&state, emitters.len()))
}

/// Two-emitter excitation exchange: emitter 1 initially excited, trace of
/// both populations, plus emitter 2's first-maximum height and time.
#[derive(Debug, Clone)]
pub struct ExchangeResult {
    pub trace: PopulationTrace,
    pub first_max_height: f64,
    pub first_max_time: f64,
}

/// Convenience wrapper over [`evolve`] for the exchange experiment; both
/// emitters should sit on sublattice A at the critical detuning for their
/// offset.
pub fn two_emitter_exchange(
    params: &LatticeParams,
    emitter1: EmitterSpec,
    emitter2: EmitterSpec,
    t_max: f64,
) -> Result<ExchangeResult> {
    if emitter1.sublattice() != Sublattice::A || emitter2.sublattice() != Sublattice::A {
        return Err(Error::InvalidParams(
            "exchange emitters must both sit on sublattice A".into(),
        ));
    }
    let initial = ExcitationState::emitter_excited(2, params.site_count(), 0);
    let dt_out = 0.1 / params.hopping.max(1e-300);
    let trace = evolve(params, &[emitter1, emitter2], &initial, t_max, dt_out)?;
    let (t, h) = trace.first_maximum(1, 9);
    Ok(ExchangeResult {
        trace,
        first_max_height: h,
        first_max_time: t,
    })
}

/// Markovian reference decay `exp(-Gamma t)` with
/// `Gamma = 2 pi g^2 D(Delta)` read from the density-of-states histogram
/// (zero outside its support).
pub fn markov_prediction(
    params: &LatticeParams,
    emitter: &EmitterSpec,
    dos: &DosHistogram,
    t_max: f64,
    dt_out: f64,
) -> PopulationTrace {
    let _ = params;
    let gamma = markov_rate(emitter, dos);
    let n_steps = (t_max / dt_out).round() as usize;
    let times: Vec<f64> = (0..=n_steps).map(|s| s as f64 * dt_out).collect();
    let pops: Vec<f64> = times.iter().map(|t| (-gamma * t).exp()).collect();
    let photon: Vec<f64> = pops.iter().map(|p| 1.0 - p).collect();
    PopulationTrace {
        times,
        populations: vec![pops],
        photon_total: photon,
    }
}

/// `Gamma = 2 pi g^2 D(Delta)`.
pub fn markov_rate(emitter: &EmitterSpec, dos: &DosHistogram) -> f64 {
    2.0 * std::f64::consts::PI * emitter.coupling * emitter.coupling * dos.value_at(emitter.detuning)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::dos;

    fn small_params() -> LatticeParams {
        LatticeParams::with_offset(0.0, 4).unwrap()
    }

    fn one_emitter(params: &LatticeParams, delta: f64, g: f64) -> EmitterSpec {
        let _ = params;
        EmitterSpec::new(SiteIndex::new(0, 0, 0), delta, g)
    }

    #[test]
    fn decoupled_emitter_never_decays() {
        let p = small_params();
        let e = one_emitter(&p, 0.3, 0.0);
        let initial = ExcitationState::emitter_excited(1, p.site_count(), 0);
        let trace = evolve(&p, &[e], &initial, 5.0, 0.5).unwrap();
        for &pop in &trace.populations[0] {
            assert!((pop - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitarity_along_the_trace() {
        let p = small_params();
        let e = one_emitter(&p, 0.0, 0.5);
        let initial = ExcitationState::emitter_excited(1, p.site_count(), 0);
        let trace = evolve(&p, &[e], &initial, 10.0, 0.25).unwrap();
        for i in 0..trace.times.len() {
            let total = trace.populations[0][i] + trace.photon_total[i];
            assert!((total - 1.0).abs() < 1e-9, "t = {}: {total}", trace.times[i]);
        }
    }

    #[test]
    fn rejects_bad_initial_state_and_bad_sites() {
        let p = small_params();
        let e = one_emitter(&p, 0.0, 0.5);
        let mut bad = ExcitationState::emitter_excited(1, p.site_count(), 0);
        bad.emitter_amplitudes[0] = C64::new(0.5, 0.0);
        assert!(matches!(
            evolve(&p, &[e], &bad, 1.0, 0.5),
            Err(Error::BadInitialState(_))
        ));
        let outside = EmitterSpec::new(SiteIndex::new(9, 0, 0), 0.0, 0.5);
        let ok = ExcitationState::emitter_excited(1, p.site_count(), 0);
        assert!(evolve(&p, &[outside], &ok, 1.0, 0.5).is_err());
        let dup = [
            EmitterSpec::new(SiteIndex::new(0, 0, 0), 0.0, 0.5),
            EmitterSpec::new(SiteIndex::new(0, 0, 0), 0.0, 0.5),
        ];
        let ok2 = ExcitationState::emitter_excited(2, p.site_count(), 0);
        assert!(evolve(&p, &dup, &ok2, 1.0, 0.5).is_err());
    }

    #[test]
    fn chebyshev_matches_matrix_exponential() {
        let p = small_params();
        let e = one_emitter(&p, 0.1, 0.5);
        let initial = ExcitationState::emitter_excited(1, p.site_count(), 0);
        let fast = evolve(&p, &[e], &initial, 5.0, 0.5).unwrap();
        let exact = evolve_matrix_exponential(&p, &[e], &initial, 5.0, 0.5).unwrap();
        for i in 0..fast.times.len() {
            assert!(
                (fast.populations[0][i] - exact.populations[0][i]).abs() < 1e-10,
                "t = {}",
                fast.times[i]
            );
        }
    }

    #[test]
    fn time_reversal_recovers_initial_state() {
        let p = small_params();
        let e = one_emitter(&p, 0.0, 0.4);
        let initial = ExcitationState::emitter_excited(1, p.site_count(), 0);
        let fwd = evolve_state(&p, &[e], &initial, 6.0, 0.25).unwrap();
        let back = evolve_state(&p, &[e], &fwd, 6.0, -0.25).unwrap();
        let mut err: f64 = 0.0;
        for (a, b) in back
            .emitter_amplitudes
            .iter()
            .chain(back.photon_field.iter())
            .zip(initial.emitter_amplitudes.iter().chain(initial.photon_field.iter()))
        {
            err += (a - b).norm_sqr();
        }
        assert!(err.sqrt() < 1e-7, "round-trip error {}", err.sqrt());
    }

    #[test]
    fn markov_rate_scales_quadratically_and_vanishes_outside_spectrum() {
        let p = small_params();
        let hist = dos(&p, 24, 0.1).unwrap();
        let e1 = one_emitter(&p, 1.5, 0.05);
        let e2 = one_emitter(&p, 1.5, 0.10);
        let g1 = markov_rate(&e1, &hist);
        let g2 = markov_rate(&e2, &hist);
        assert!(g1 > 0.0);
        assert!((g2 - 4.0 * g1).abs() < 1e-12 * g2);
        let outside = one_emitter(&p, 50.0, 0.05);
        assert_eq!(markov_rate(&outside, &hist), 0.0);
        let trace = markov_prediction(&p, &outside, &hist, 10.0, 1.0);
        for &pop in &trace.populations[0] {
            assert_eq!(pop, 1.0);
        }
    }

    #[test]
    fn exchange_requires_sublattice_a() {
        let p = small_params();
        let e1 = EmitterSpec::new(SiteIndex::new(0, 0, 0), 0.0, 0.5);
        let e_b = EmitterSpec::new(SiteIndex::new(1, 0, 0), 0.0, 0.5);
        assert!(two_emitter_exchange(&p, e1, e_b, 5.0).is_err());
    }

    #[test]
    fn exchange_swap_symmetry() {
        // relabeling the initially excited emitter on equivalent sites
        // exchanges the traces
        let p = small_params();
        let e1 = EmitterSpec::new(SiteIndex::new(0, 0, 0), 0.0, 0.5);
        let e2 = EmitterSpec::new(SiteIndex::new(0, 0, 1), 0.0, 0.5);
        let initial_1 = ExcitationState::emitter_excited(2, p.site_count(), 0);
        let initial_2 = ExcitationState::emitter_excited(2, p.site_count(), 1);
        let t1 = evolve(&p, &[e1, e2], &initial_1, 8.0, 0.4).unwrap();
        let t2 = evolve(&p, &[e1, e2], &initial_2, 8.0, 0.4).unwrap();
        for i in 0..t1.times.len() {
            assert!((t1.populations[0][i] - t2.populations[1][i]).abs() < 1e-9);
            assert!((t1.populations[1][i] - t2.populations[0][i]).abs() < 1e-9);
        }
    }
}
