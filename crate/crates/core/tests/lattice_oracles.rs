//! Real-space vs momentum-space equivalence and spectral invariants.

use weylqed::kgrid::KGrid;
use weylqed::lattice::{
    bloch_hamiltonian, dos, real_space_hamiltonian, spectral_gap, LatticeParams, Momentum,
};

/// Sorted eigenvalues of the real-space bath Hamiltonian.
fn real_space_spectrum(params: &LatticeParams) -> Vec<f64> {
    let h = real_space_hamiltonian(params).unwrap().to_sparse();
    let eig = h.to_dense().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Bloch eigenvalues over the commensurate grid, one representative per
/// reduced-zone class: (n_x, n_y) and (n_x + L/2, n_y + L/2) label the
/// same class, so keeping n_y < L/2 enumerates each exactly once.
fn bloch_spectrum(params: &LatticeParams) -> Vec<f64> {
    let l = params.size;
    let grid = KGrid::Commensurate(l);
    let a = params.lattice_constant;
    let mut vals = Vec::with_capacity(l * l * l);
    for ix in 0..l {
        for iy in 0..l / 2 {
            for iz in 0..l {
                let k = grid.momentum(ix, iy, iz, a);
                let e = bloch_hamiltonian(params, k).d_norm();
                vals.push(e);
                vals.push(-e);
            }
        }
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

#[test]
fn bloch_construction_reproduces_real_space_spectra() {
    for l in [2usize, 4, 6] {
        for m in [0.0, 1.0, 2.0, 3.0] {
            let params = LatticeParams::with_offset(m, l).unwrap();
            let dense = real_space_spectrum(&params);
            let bloch = bloch_spectrum(&params);
            assert_eq!(dense.len(), bloch.len());
            for (i, (a, b)) in dense.iter().zip(&bloch).enumerate() {
                assert!(
                    (a - b).abs() < 1e-10,
                    "L={l} M={m}: eigenvalue {i}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn bloch_hermiticity_bound() {
    let params = LatticeParams::with_offset(1.7, 4).unwrap();
    for i in 0..50 {
        let k = Momentum::new(0.11 * i as f64, -0.07 * i as f64, 0.05 * i as f64);
        assert!(bloch_hamiltonian(&params, k).hermiticity_error() <= 1e-14);
    }
}

#[test]
fn gap_threshold_and_monotonicity() {
    for m in [0.0, 1.0, 1.9] {
        let params = LatticeParams::with_offset(m, 4).unwrap();
        assert!(spectral_gap(&params, 32) < 1e-8, "M = {m}");
    }
    let mut last = 0.0;
    for m in [2.1, 2.3, 2.5, 2.9] {
        let params = LatticeParams::with_offset(m, 4).unwrap();
        let g = spectral_gap(&params, 32);
        assert!(g > last, "gap({m}) = {g} not increasing past {last}");
        last = g;
    }
}

#[test]
fn dos_normalization_production_grid() {
    let params = LatticeParams::with_offset(0.0, 4).unwrap();
    let d = dos(&params, 48, 0.02).unwrap();
    assert!(
        (d.integral() - 1.0).abs() < 1e-3,
        "integral = {}",
        d.integral()
    );
}

/// The near-node density follows the expected quadratic law once the grid
/// resolves the level structure around the nodes; 192 points per axis is
/// the smallest grid where the fitted exponent stabilizes. (At the 64-point
/// default the histogram in [0.1 J, 0.5 J] is dominated by discrete shells
/// around each node and no binning recovers the exponent; see the
/// acceptance suite notes.)
#[test]
fn dos_exponent_quadratic_on_converged_grid() {
    let params = LatticeParams::with_offset(0.0, 4).unwrap();
    let d = dos(&params, 192, 0.02).unwrap();
    let fit = d.fit_exponent(0.1, 0.5);
    assert!((fit.slope - 2.0).abs() < 0.15, "exponent = {}", fit.slope);
}
