//! Exact-propagation oracles and the plateau physics of fractional decay.
//!
//! The matrix-exponential oracle below is built in-test from the dense
//! single-excitation Hamiltonian, independent of the Chebyshev propagation
//! path it certifies.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use weylqed::bound_states::{critical_detuning, residue};
use weylqed::dynamics::{
    evolve, evolve_state, markov_rate, single_excitation_hamiltonian, two_emitter_exchange,
    EmitterSpec, ExcitationState,
};
use weylqed::kgrid::KGrid;
use weylqed::lattice::{dos, LatticeParams, SiteIndex, Sublattice};

fn origin_emitter(delta: f64, g: f64) -> EmitterSpec {
    EmitterSpec::new(SiteIndex::new(0, 0, 0), delta, g)
}

/// Dense eigendecomposition propagation of the full single-excitation
/// state, written directly against the Hamiltonian matrix.
fn dense_state_at(
    params: &LatticeParams,
    emitters: &[EmitterSpec],
    initial: &ExcitationState,
    t: f64,
) -> Vec<C64> {
    let h = single_excitation_hamiltonian(params, emitters).unwrap();
    let dim = h.dim();
    let hd: DMatrix<f64> = h.to_dense();
    let eig = hd.symmetric_eigen();
    let mut v0: Vec<C64> = Vec::with_capacity(dim);
    v0.extend_from_slice(&initial.emitter_amplitudes);
    v0.extend_from_slice(&initial.photon_field);
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for k in 0..dim {
        let mut amp = C64::new(0.0, 0.0);
        for i in 0..dim {
            amp += v0[i] * eig.eigenvectors[(i, k)];
        }
        let ph = amp * C64::new(0.0, -eig.eigenvalues[k] * t).exp();
        for i in 0..dim {
            out[i] += C64::new(eig.eigenvectors[(i, k)], 0.0) * ph;
        }
    }
    out
}

#[test]
fn chebyshev_matches_matrix_exponential_every_amplitude() {
    // L = 6, t J = 5: every amplitude to 1e-8
    let params = LatticeParams::with_offset(0.3, 6).unwrap();
    let emitters = [origin_emitter(0.1, 0.5)];
    let initial = ExcitationState::emitter_excited(1, params.site_count(), 0);
    let fast = evolve_state(&params, &emitters, &initial, 5.0, 0.25).unwrap();
    let exact = dense_state_at(&params, &emitters, &initial, 5.0);
    let mut got: Vec<C64> = Vec::new();
    got.extend_from_slice(&fast.emitter_amplitudes);
    got.extend_from_slice(&fast.photon_field);
    assert_eq!(got.len(), exact.len());
    for (i, (a, b)) in got.iter().zip(&exact).enumerate() {
        assert!(
            (a - b).norm() < 1e-8,
            "amplitude {i}: {a} vs {b} (diff {})",
            (a - b).norm()
        );
    }
}

#[test]
fn plateau_reaches_bound_state_weight_on_node_free_lattice() {
    // L = 22 avoids commensurate node momenta; the population settles at
    // the squared bound-state residue
    let params = LatticeParams::with_offset(0.0, 22).unwrap();
    let g = 0.5;
    let emitters = [origin_emitter(0.0, g)];
    let initial = ExcitationState::emitter_excited(1, params.site_count(), 0);
    let trace = evolve(&params, &emitters, &initial, 40.0, 0.1).unwrap();
    let (plateau, _) = trace.plateau(0, 30.0, 40.0);
    let reference = (1.0 / (1.0 + 0.25 * g * g)).powi(2);
    assert!(
        (plateau - reference).abs() < 0.03,
        "plateau {plateau} vs {reference}"
    );
    let z = residue(&params, g, 0.0, Sublattice::A, &KGrid::Shifted(64)).unwrap();
    assert!(
        (plateau - z * z).abs() < 0.03,
        "plateau {plateau} vs Z^2 = {}",
        z * z
    );
}

#[test]
fn plateau_size_stability_before_wraparound() {
    // Finite-size causality on node-free lattices: the plateau moves by
    // less than 0.01 between L = 22 and L = 26. (The L = 0 mod 4 pair
    // named by the corresponding design note hosts commensurate zero
    // modes whose emitter beat shifts the windowed average by ~0.08, so
    // the check is meaningful only on node-free sizes; see the decisions
    // ledger.)
    let g = 0.5;
    let mut plateaus = Vec::new();
    for l in [22usize, 26] {
        let params = LatticeParams::with_offset(0.0, l).unwrap();
        let emitters = [origin_emitter(0.0, g)];
        let initial = ExcitationState::emitter_excited(1, params.site_count(), 0);
        let trace = evolve(&params, &emitters, &initial, 40.0, 0.2).unwrap();
        plateaus.push(trace.plateau(0, 30.0, 40.0).0);
    }
    assert!(
        (plateaus[0] - plateaus[1]).abs() < 0.01,
        "plateaus {plateaus:?}"
    );
}

#[test]
fn weak_coupling_population_stays_near_unity() {
    // g = 0.05 J at the Weyl frequency: the exact population at t J = 40
    // sits at the bound-state weight Z^2 = 0.99875, within 1e-3 of one
    let params = LatticeParams::with_offset(0.0, 22).unwrap();
    let g = 0.05;
    let emitters = [origin_emitter(0.0, g)];
    let initial = ExcitationState::emitter_excited(1, params.site_count(), 0);
    let trace = evolve(&params, &emitters, &initial, 40.0, 0.5).unwrap();
    let last = *trace.populations[0].last().unwrap();
    let z2 = (1.0 / (1.0 + 0.25 * g * g)).powi(2);
    assert!(last >= 0.998, "pop(40) = {last}");
    assert!((last - z2).abs() < 1.5e-3, "pop(40) = {last} vs Z^2 = {z2}");
}

#[test]
fn markov_decay_matches_exact_in_the_weak_coupling_smooth_dos_regime() {
    // Delta = 1.5 J sits in a smooth region of the spectrum. At g = 0.15 J
    // the decay reaches half population within the simulable horizon and
    // the exact curve tracks exp(-Gamma t) within 10% down to pop = 0.5.
    // (At g = 0.05 J the stated half-life is ~530/J, far beyond the
    // discrete-spectrum equilibration of any desk-scale lattice; see the
    // decisions ledger.)
    let params = LatticeParams::with_offset(0.0, 20).unwrap();
    let hist = dos(&params, 96, 0.02).unwrap();
    let em = origin_emitter(1.5, 0.15);
    let gamma = markov_rate(&em, &hist);
    assert!(gamma > 0.0);
    let initial = ExcitationState::emitter_excited(1, params.site_count(), 0);
    let trace = evolve(&params, &[em], &initial, 120.0, 1.0).unwrap();
    let mut reached_half = false;
    for (i, &t) in trace.times.iter().enumerate() {
        let pop = trace.populations[0][i];
        if pop < 0.5 {
            reached_half = true;
            break;
        }
        let markov = (-gamma * t).exp();
        let rel = ((pop - markov) / markov).abs();
        assert!(rel < 0.10, "t = {t}: exact {pop} vs markov {markov} (rel {rel})");
    }
    assert!(reached_half, "decay never reached half population");
}

#[test]
fn two_emitter_exchange_maximum_matches_single_emitter_plateau() {
    // adjacent A-sites along z at the critical detuning, M = 0; the
    // longer M sweeps live in the acceptance suite
    let params = LatticeParams::with_offset(0.0, 22).unwrap();
    let g = 0.5;
    let e1 = EmitterSpec::new(SiteIndex::new(0, 0, 0), 0.0, g);
    let e2 = EmitterSpec::new(SiteIndex::new(0, 0, 1), 0.0, g);
    let ex = two_emitter_exchange(&params, e1, e2, 70.0).unwrap();
    let plateau = (1.0 / (1.0 + 0.25 * g * g)).powi(2);
    assert!(
        (ex.first_max_height - plateau).abs() < 0.05,
        "first max {} vs plateau {plateau}",
        ex.first_max_height
    );
    // oscillation half-period against the effective coupling; the
    // relation sharpens as g -> 0 (at g = 0.5 the correction measures
    // right at 10%), so check it in the perturbative regime
    let g_soft = 0.3;
    let e1 = EmitterSpec::new(SiteIndex::new(0, 0, 0), 0.0, g_soft);
    let e2 = EmitterSpec::new(SiteIndex::new(0, 0, 1), 0.0, g_soft);
    let ex = two_emitter_exchange(&params, e1, e2, 140.0).unwrap();
    let map = weylqed::spin_model::effective_couplings(
        &params,
        g_soft,
        1.0,
        &KGrid::Commensurate(22),
    )
    .unwrap();
    let j12 = map
        .coupling_from(Sublattice::A, [0, 0, 1])
        .expect("nearest z coupling");
    let predicted = std::f64::consts::PI / (2.0 * j12.abs());
    let rel = (ex.first_max_time - predicted).abs() / predicted;
    assert!(
        rel < 0.10,
        "first max at {} vs pi/(2|J12|) = {predicted} (rel {rel})",
        ex.first_max_time
    );
}

#[test]
fn critical_detuning_exchange_is_resonant_for_offset_lattice() {
    // at M = J the bare sites are detuned by the offset; at Delta_c the
    // exchange is complete (first max near the plateau) while at a
    // detuned Delta it is visibly partial
    let params = LatticeParams::with_offset(1.0, 22).unwrap();
    let grid = KGrid::Commensurate(22);
    let dc = critical_detuning(&params, 0.5, &grid).unwrap();
    let e1 = EmitterSpec::new(SiteIndex::new(0, 0, 0), dc.delta_c, 0.5);
    let e2 = EmitterSpec::new(SiteIndex::new(0, 0, 1), dc.delta_c, 0.5);
    let ex = two_emitter_exchange(&params, e1, e2, 80.0).unwrap();
    assert!(
        (ex.first_max_height - 0.886).abs() < 0.05,
        "resonant first max {}",
        ex.first_max_height
    );
}
