//! Bound-state-mediated effective spin model for emitters filling every
//! lattice site, its single-particle bands, and their Weyl topology.
//!
//! Integrating out the photons at the Weyl frequency leaves hopping
//! `J^{aa'}(r) = g^2 Re G_{aa'}(E = 0; r)` between emitters, truncated at a
//! hard Euclidean range `s`; the couplings inherit the bound-state field's
//! power-law tail, and the two-sublattice Bloch matrix built from them
//! inherits the bath's Weyl nodes, shifted by the truncation and converging
//! quickly as `s` grows.
//!
//! The couplings are a coherent Hamiltonian only for `g << J`; maps built
//! with `g > 0.5 J` carry a Born-Markov warning flag.

use crate::berry;
use crate::greens::{self, green_field};
use crate::kgrid::KGrid;
use crate::lattice::{LatticeParams, Momentum, Sublattice, WeylNode};
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Effective couplings `J^{aa'}(r)` for displacements `|r| <= s`.
#[derive(Debug, Clone)]
pub struct CouplingMap {
    /// Entries from an A-sublattice emitter, keyed by displacement.
    from_a: BTreeMap<[i64; 3], f64>,
    /// Entries from a B-sublattice emitter.
    from_b: BTreeMap<[i64; 3], f64>,
    /// Flattened nonzero A-source entries (displacement, J, odd parity)
    /// for fast Fourier sums.
    flat_a: Vec<([f64; 3], f64, bool)>,
    /// Hard Euclidean truncation radius, units of `a`.
    pub range: f64,
    pub offset: f64,
    pub coupling: f64,
    /// Worst `|Im J| / |Re J|` left after extrapolation; above 1e-3 the
    /// couplings would carry a dissipative channel.
    pub max_im_ratio: f64,
    pub dissipative_flag: bool,
    /// Set when `g > 0.5 J`, outside the Born-Markov comfort zone.
    pub born_markov_warning: bool,
}

impl CouplingMap {
    pub fn coupling_from(&self, source: Sublattice, displacement: [i64; 3]) -> Option<f64> {
        match source {
            Sublattice::A => self.from_a.get(&displacement).copied(),
            Sublattice::B => self.from_b.get(&displacement).copied(),
        }
    }

    pub fn entries_from(&self, source: Sublattice) -> &BTreeMap<[i64; 3], f64> {
        match source {
            Sublattice::A => &self.from_a,
            Sublattice::B => &self.from_b,
        }
    }

    pub fn n_entries(&self) -> usize {
        self.from_a.len() + self.from_b.len()
    }

    /// The same couplings truncated at a smaller range (no recomputation;
    /// useful for range-convergence sweeps).
    pub fn truncated(&self, range: f64) -> CouplingMap {
        assert!(range <= self.range, "can only shrink the range");
        let keep = |r: &[i64; 3]| {
            ((r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) as f64).sqrt() <= range
        };
        let from_a: BTreeMap<[i64; 3], f64> = self
            .from_a
            .iter()
            .filter(|(r, _)| keep(r))
            .map(|(r, &j)| (*r, j))
            .collect();
        let from_b: BTreeMap<[i64; 3], f64> = self
            .from_b
            .iter()
            .filter(|(r, _)| keep(r))
            .map(|(r, &j)| (*r, j))
            .collect();
        let flat_a = flatten(&from_a);
        CouplingMap {
            from_a,
            from_b,
            flat_a,
            range,
            offset: self.offset,
            coupling: self.coupling,
            max_im_ratio: self.max_im_ratio,
            dissipative_flag: self.dissipative_flag,
            born_markov_warning: self.born_markov_warning,
        }
    }
}

/// Build the coupling map from the eta -> 0 extrapolated resolvent field
/// at the Weyl frequency. Requires the gapless regime and emitters tuned
/// to the critical detuning, where the exchange is resonant at `E = 0`.
pub fn effective_couplings(
    params: &LatticeParams,
    g: f64,
    range: f64,
    grid: &KGrid,
) -> Result<CouplingMap> {
    // |M| = 2J (the node-merging point) still has a gapless bath with an
    // integrable resolvent at E = 0, so it is allowed; beyond it the
    // resonant exchange construction loses its footing.
    if params.offset.abs() > 2.0 * params.hopping {
        return Err(Error::InvalidParams(format!(
            "effective couplings need |M| <= 2J (gapless bath), got M = {}",
            params.offset
        )));
    }
    if !(range >= 0.0) {
        return Err(Error::InvalidParams("range must be non-negative".into()));
    }
    let etas = greens::extrapolation_etas(params, grid);
    let fields: Vec<_> = etas
        .iter()
        .map(|&eta| {
            green_field(
                params,
                greens::ComplexEnergy::new(0.0, eta),
                Sublattice::A,
                grid,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    // quadratic Lagrange extrapolation to eta = 0
    let [a, b, c] = etas;
    let w = [
        (b * c) / ((a - b) * (a - c)),
        (a * c) / ((b - a) * (b - c)),
        (a * b) / ((c - a) * (c - b)),
    ];

    let smax = range.floor() as i64;
    let g2 = g * g;
    let mut from_a = BTreeMap::new();
    let mut max_im: f64 = 0.0;
    let mut max_re: f64 = 0.0;
    for rx in -smax..=smax {
        for ry in -smax..=smax {
            for rz in -smax..=smax {
                let rr = ((rx * rx + ry * ry + rz * rz) as f64).sqrt();
                if rr > range {
                    continue;
                }
                let r = [rx, ry, rz];
                let v: C64 = fields[0].at(r) * w[0] + fields[1].at(r) * w[1] + fields[2].at(r) * w[2];
                let re = g2 * v.re;
                // Im G at the band center is odd in eta, so a surviving
                // absorption channel shows up as the misfit of the odd
                // model a eta + c eta^3 through the three samples.
                let im = [
                    fields[0].at(r).im,
                    fields[1].at(r).im,
                    fields[2].at(r).im,
                ];
                let det = a * c * c * c - c * a * a * a;
                let (oa, oc) = (
                    (im[0] * c * c * c - im[2] * a * a * a) / det,
                    (im[2] * a - im[0] * c) / det,
                );
                let misfit = (im[1] - (oa * b + oc * b * b * b)).abs() * g2;
                max_im = max_im.max(misfit);
                max_re = max_re.max(re.abs());
                from_a.insert(r, re);
            }
        }
    }
    // residual absorption relative to the dominant coherent coupling;
    // entries that are structural zeros would otherwise ratio noise
    // against noise
    let max_im_ratio = if max_re > 0.0 { max_im / max_re } else { 0.0 };
    // enforce the exact same-sublattice evenness J^{AA}(r) = J^{AA}(-r)
    let keys: Vec<[i64; 3]> = from_a.keys().copied().collect();
    for r in &keys {
        if (r[0] + r[1]).rem_euclid(2) == 0 {
            let neg = [-r[0], -r[1], -r[2]];
            let avg = 0.5 * (from_a[r] + from_a[&neg]);
            from_a.insert(*r, avg);
            from_a.insert(neg, avg);
        }
    }
    // B-source entries from exact identities at E = 0:
    //   odd parity:  J^{AB}(r) = J^{BA}(-r)   (transpose of a symmetric G)
    //   even parity: G_{BB}(0; r) = -G_{AA}(0; r)
    let mut from_b = BTreeMap::new();
    for (r, &v) in &from_a {
        if (r[0] + r[1]).rem_euclid(2) == 0 {
            from_b.insert(*r, -v);
        } else {
            from_b.insert([-r[0], -r[1], -r[2]], v);
        }
    }
    let flat_a = flatten(&from_a);
    Ok(CouplingMap {
        from_a,
        from_b,
        flat_a,
        range,
        offset: params.offset,
        coupling: g,
        max_im_ratio,
        dissipative_flag: max_im_ratio > 1e-3,
        born_markov_warning: g > 0.5 * params.hopping,
    })
}

fn flatten(map: &BTreeMap<[i64; 3], f64>) -> Vec<([f64; 3], f64, bool)> {
    map.iter()
        .filter(|(_, &j)| j != 0.0)
        .map(|(r, &j)| {
            (
                [r[0] as f64, r[1] as f64, r[2] as f64],
                j,
                (r[0] + r[1]).rem_euclid(2) == 1,
            )
        })
        .collect()
}

/// 2x2 Bloch matrix of the spin model over the emitter sublattices.
#[derive(Debug, Clone, Copy)]
pub struct SpinBlochMatrix {
    pub elems: [[C64; 2]; 2],
}

impl SpinBlochMatrix {
    pub fn d(&self) -> [f64; 3] {
        [
            self.elems[0][1].re,
            -self.elems[0][1].im,
            0.5 * (self.elems[0][0].re - self.elems[1][1].re),
        ]
    }

    /// Band energies `(omega_minus, omega_plus)`.
    pub fn bands(&self) -> (f64, f64) {
        let d = self.d();
        let e = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let mean = 0.5 * (self.elems[0][0].re + self.elems[1][1].re);
        (mean - e, mean + e)
    }

    pub fn band_gap(&self) -> f64 {
        let (lo, hi) = self.bands();
        hi - lo
    }

    /// Lower-band eigenvector (any smooth-enough gauge; link products are
    /// gauge invariant).
    pub fn lower_eigenvector(&self) -> [C64; 2] {
        let [dx, dy, dz] = self.d();
        let e = (dx * dx + dy * dy + dz * dz).sqrt();
        if e < 1e-300 {
            return [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        }
        let off = C64::new(dx, dy);
        if dz >= 0.0 {
            let n = (2.0 * e * (e + dz)).sqrt();
            [-off.conj() / n, C64::new(e + dz, 0.0) / n]
        } else {
            let n = (2.0 * e * (e - dz)).sqrt();
            [C64::new(-(e - dz), 0.0) / n, off / n]
        }
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.elems[r][c] - self.elems[c][r].conj()).norm());
            }
        }
        worst
    }
}

/// Fourier sum of the coupling map at momentum `k` (units `1/a`, `a = 1`
/// spacing between emitters inherited from the lattice).
pub fn spin_bloch(couplings: &CouplingMap, k: Momentum) -> SpinBlochMatrix {
    let mut h_aa = C64::new(0.0, 0.0);
    let mut h_ab = C64::new(0.0, 0.0);
    for &(r, j, odd) in &couplings.flat_a {
        let phase = k.kx * r[0] + k.ky * r[1] + k.kz * r[2];
        let e = C64::new(phase.cos(), phase.sin()) * j;
        if odd {
            h_ab += e;
        } else {
            h_aa += e;
        }
    }
    // B-source blocks via the stored identities: the same-sublattice block
    // flips sign at resonance and the cross block is the Hermitian partner
    SpinBlochMatrix {
        elems: [[h_aa, h_ab], [h_ab.conj(), -h_aa]],
    }
}

/// Plot-ready dispersion along `k_z` at fixed `(k_x, k_y)`.
#[derive(Debug, Clone)]
pub struct BandCut {
    pub k_z: Vec<f64>,
    pub omega_minus: Vec<f64>,
    pub omega_plus: Vec<f64>,
}

pub fn spin_band_cut(couplings: &CouplingMap, kx: f64, ky: f64, n_points: usize) -> BandCut {
    let n = n_points.max(2);
    let mut k_z = Vec::with_capacity(n);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let kz = -PI + 2.0 * PI * i as f64 / (n - 1) as f64;
        let (a, b) = spin_bloch(couplings, Momentum::new(kx, ky, kz)).bands();
        k_z.push(kz);
        lo.push(a);
        hi.push(b);
    }
    BandCut {
        k_z,
        omega_minus: lo,
        omega_plus: hi,
    }
}

/// Band crossings along the `k_z` line at fixed `(k_x, k_y)`: positions
/// where the two bands touch within `tol`.
pub fn find_band_crossings(couplings: &CouplingMap, kx: f64, ky: f64, tol: f64) -> Vec<f64> {
    let gap_at = |kz: f64| spin_bloch(couplings, Momentum::new(kx, ky, kz)).band_gap();
    let n = 2000;
    let mut out = Vec::new();
    let mut prev_kz = -PI;
    let mut prev = gap_at(prev_kz);
    let mut prev2 = f64::INFINITY;
    for i in 1..=n {
        let kz = -PI + 2.0 * PI * i as f64 / n as f64;
        let g = gap_at(kz);
        // local minimum at prev?
        if prev <= prev2 && prev <= g {
            // golden-section refine around prev_kz
            let (mut a, mut b) = (prev_kz - 2.0 * PI / n as f64, prev_kz + 2.0 * PI / n as f64);
            let phi = 0.5 * (3.0 - 5.0f64.sqrt());
            let mut x1 = a + phi * (b - a);
            let mut x2 = b - phi * (b - a);
            let mut f1 = gap_at(x1);
            let mut f2 = gap_at(x2);
            for _ in 0..80 {
                if f1 < f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = a + phi * (b - a);
                    f1 = gap_at(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = b - phi * (b - a);
                    f2 = gap_at(x2);
                }
            }
            let kz_star = 0.5 * (a + b);
            if gap_at(kz_star) < tol {
                out.push(kz_star);
            }
        }
        prev2 = prev;
        prev = g;
        prev_kz = kz;
    }
    out
}

/// Berry curvature of the lower spin band on the `k_y = 0` plane:
/// link-variable plaquette fluxes on an `n x n` mesh over
/// `(k_x, k_z) in [-pi, pi)^2`.
#[derive(Debug, Clone)]
pub struct BerryField {
    pub grid_n: usize,
    /// Plaquette flux at `(i, j)` covering
    /// `k_x in [k_i, k_{i+1}), k_z in [k_j, k_{j+1})`, refined by
    /// subdivision where needed. Flagged plaquettes hold their unresolved
    /// value.
    pub curvature: Vec<f64>,
    /// Plaquettes still carrying near-pi flux after 3 subdivisions: they
    /// contain an exact degeneracy.
    pub flagged: Vec<(usize, usize)>,
    /// Sum over resolved (unflagged) plaquettes.
    pub total_flux_resolved: f64,
    /// Detected in-plane band-touching points with their enclosing-box
    /// Berry flux (3D, units of 2 pi when divided out).
    pub nodes: Vec<WeylNode>,
}

impl BerryField {
    pub fn k_edge(&self, i: usize) -> f64 {
        -PI + 2.0 * PI * i as f64 / self.grid_n as f64
    }
}

/// Recursive plaquette refinement: returns (flux, resolved?).
fn refined_plaquette_flux(
    couplings: &CouplingMap,
    kx0: f64,
    kz0: f64,
    w: f64,
    depth: usize,
) -> (f64, bool) {
    let vec_at = |kx: f64, kz: f64| spin_bloch(couplings, Momentum::new(kx, 0.0, kz)).lower_eigenvector();
    let corners = [
        vec_at(kx0, kz0),
        vec_at(kx0 + w, kz0),
        vec_at(kx0 + w, kz0 + w),
        vec_at(kx0, kz0 + w),
    ];
    let flux = berry::plaquette_flux(&corners);
    if flux.abs() < 0.5 * PI {
        return (flux, true);
    }
    if depth == 0 {
        return (flux, false);
    }
    let h = 0.5 * w;
    let mut total = 0.0;
    let mut ok = true;
    for (dx, dz) in [(0.0, 0.0), (h, 0.0), (h, h), (0.0, h)] {
        let (f, resolved) = refined_plaquette_flux(couplings, kx0 + dx, kz0 + dz, h, depth - 1);
        total += f;
        ok &= resolved;
    }
    (total, ok)
}

pub fn berry_curvature_plane(couplings: &CouplingMap, grid_n: usize) -> BerryField {
    let n = grid_n.max(4);
    let w = 2.0 * PI / n as f64;
    let mut curvature = vec![0.0; n * n];
    let mut flagged = Vec::new();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let kx0 = -PI + i as f64 * w;
            let kz0 = -PI + j as f64 * w;
            let (flux, resolved) = refined_plaquette_flux(couplings, kx0, kz0, w, 3);
            curvature[i * n + j] = flux;
            if resolved {
                total += flux;
            } else {
                flagged.push((i, j));
            }
        }
    }
    let nodes = find_spin_weyl_nodes(couplings, 1e-6)
        .weyl
        .into_iter()
        .filter(|nd| nd.momentum.ky.abs() < 1e-4)
        .collect();
    BerryField {
        grid_n: n,
        curvature,
        flagged,
        total_flux_resolved: total,
        nodes,
    }
}

/// Outcome of the 3D spin-node search: genuine linear (Weyl) touchings and
/// any non-linear touchings reported separately.
#[derive(Debug, Clone)]
pub struct SpinNodeSearch {
    pub weyl: Vec<WeylNode>,
    /// Band-touching momenta whose dispersion fails the linearity test,
    /// with the offending second-to-first-order ratio.
    pub non_weyl: Vec<(Momentum, f64)>,
}

impl SpinNodeSearch {
    pub fn chirality_sum(&self) -> i32 {
        self.weyl.iter().map(|n| n.chirality).sum()
    }
}

/// Locate band-touching points of the spin Bloch Hamiltonian, verify
/// linear dispersion along all three axes by finite differences, and
/// assign chiralities from the enclosing-box Berry flux.
pub fn find_spin_weyl_nodes(couplings: &CouplingMap, tol: f64) -> SpinNodeSearch {
    let gap_at = |k: &[f64; 3]| {
        spin_bloch(couplings, Momentum::new(k[0], k[1], k[2])).band_gap()
    };
    // The truncated long-range couplings wrinkle the bands with many
    // shallow local minima, while the node basins are narrow and steep.
    // Seed the descent from (a) dense scans along the high-symmetry cut
    // lines (k_x = +-pi/2, k_y = 0), where the touchings live, and (b)
    // every local minimum of a coarse 3D scan, to catch anything off the
    // cuts.
    let mut seeds: Vec<[f64; 3]> = Vec::new();
    let n_line = 1200;
    for kx in [PI / 2.0, -PI / 2.0] {
        let mut prev2 = f64::INFINITY;
        let mut prev = gap_at(&[kx, 0.0, -PI]);
        let mut prev_kz = -PI;
        for i in 1..=n_line {
            let kz = -PI + 2.0 * PI * i as f64 / n_line as f64;
            let g = gap_at(&[kx, 0.0, kz]);
            if prev <= prev2 && prev <= g {
                seeds.push([kx, 0.0, prev_kz]);
            }
            prev2 = prev;
            prev_kz = kz;
            prev = g;
        }
    }
    let n = 24;
    let mut gaps = vec![0.0; n * n * n];
    let kx_of = |i: usize| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64;
    let ky_of = |i: usize| -PI / 2.0 + PI * (i as f64 + 0.5) / n as f64;
    let kz_of = |i: usize| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64;
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                gaps[(ix * n + iy) * n + iz] = gap_at(&[kx_of(ix), ky_of(iy), kz_of(iz)]);
            }
        }
    }
    let at = |ix: usize, iy: usize, iz: usize| gaps[(ix % n * n + iy % n) * n + iz % n];
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let g = at(ix, iy, iz);
                let is_min = g <= at(ix + 1, iy, iz)
                    && g <= at(ix + n - 1, iy, iz)
                    && g <= at(ix, iy + 1, iz)
                    && g <= at(ix, iy + n - 1, iz)
                    && g <= at(ix, iy, iz + 1)
                    && g <= at(ix, iy, iz + n - 1);
                if is_min {
                    seeds.push([kx_of(ix), ky_of(iy), kz_of(iz)]);
                }
            }
        }
    }
    let step = 2.0 * PI / n_line as f64;
    let mut found: Vec<Momentum> = Vec::new();
    for seed in seeds {
        let coarse = gap_at(&seed);
        // two-stage: cheap local polish, full refinement only when the
        // basin actually descends toward a touching
        let (p1, v1) = crate::numerics::nelder_mead(&gap_at, seed, 3.0 * step, 1e-10, 800);
        if v1 > 0.5 * coarse.max(1e-4) && v1 > 100.0 * tol {
            continue;
        }
        let (p, v) = crate::numerics::nelder_mead(&gap_at, p1, step, 1e-13, 6000);
        if v >= tol {
            continue;
        }
        let cand = Momentum::new(p[0], p[1], p[2]).reduce_to_bz(1.0);
        if !found.iter().any(|m| m.reduced_distance(&cand, 1.0) < 1e-4) {
            found.push(cand);
        }
    }

    let mut min_sep = f64::INFINITY;
    for i in 0..found.len() {
        for j in (i + 1)..found.len() {
            min_sep = min_sep.min(found[i].reduced_distance(&found[j], 1.0));
        }
    }
    let half = (0.15f64).min(0.3 * min_sep).max(1e-3);

    let offset = 2.0 * PI / 100.0;
    let lower = |k: Momentum| spin_bloch(couplings, k).lower_eigenvector();
    let mut weyl = Vec::new();
    let mut non_weyl = Vec::new();
    for m in found {
        // linearity test: fit gap(h) = c1 h + c2 h^2 along each axis
        let mut worst_ratio: f64 = 0.0;
        for axis in 0..3 {
            let probe = |h: f64| {
                let mut k = [m.kx, m.ky, m.kz];
                k[axis] += h;
                gap_at(&k)
            };
            let f1 = 0.5 * (probe(offset) + probe(-offset));
            let f2 = 0.5 * (probe(2.0 * offset) + probe(-2.0 * offset));
            let c1 = (4.0 * f1 - f2) / (2.0 * offset);
            let c2 = (f2 - 2.0 * f1) / (2.0 * offset * offset);
            let ratio = if c1.abs() > 1e-300 {
                (c2 * offset / c1).abs()
            } else {
                f64::INFINITY
            };
            worst_ratio = worst_ratio.max(ratio);
        }
        if worst_ratio >= 0.1 {
            non_weyl.push((m, worst_ratio));
            continue;
        }
        let flux = berry::box_flux(&lower, m, half, 8);
        let chirality = berry::chirality_from_lower_band_flux(flux);
        let s = spin_bloch(couplings, m).bands();
        weyl.push(WeylNode {
            momentum: m,
            frequency: 0.5 * (s.0 + s.1),
            chirality,
        });
    }
    SpinNodeSearch { weyl, non_weyl }
}
