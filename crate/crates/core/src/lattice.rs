//! The photonic Weyl bath: staggered-hopping cubic lattice in real and
//! momentum space.
//!
//! Real-space Hamiltonian on an `L^3` periodic lattice (energies in units of
//! the hopping `J`, lengths in units of the lattice constant `a`):
//!
//! - x-bonds carry `+J`,
//! - y-bonds carry `-(-1)^(x+y) J`,
//! - z-bonds carry `+(-1)^(x+y) J`,
//! - on-site energies are `+(-1)^(x+y) M` (`+M` on sublattice A, `-M` on B).
//!
//! The staggering factor `(-1)^(x+y)` doubles the unit cell in the x-y
//! plane. Fourier transforming with site-centered phases (phases referenced
//! to the actual site positions, not cell origins) gives a 2x2 Bloch matrix
//! in the (A, B) basis of the form `d(k) . sigma` with
//! `d_z = 2 J cos(k_z a) + M`; the in-plane components follow from the
//! doubled-cell transform and are certified against the real-space spectrum
//! rather than any assumed closed form. Bands come in pairs `+-|d(k)|`; for
//! `|M| < 2J` they touch at isolated Weyl points, which gap out only at
//! `|M| >= 2J`.

use crate::berry;
use crate::kgrid::KGrid;
use crate::numerics;
use crate::sparse::{CsrBuilder, CsrMatrix};
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

/// Which of the two staggered sublattices a site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sublattice {
    A,
    B,
}

/// Bath parameters. `hopping` is the unit of energy throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    /// Nearest-neighbour hopping `J` (> 0; the energy unit).
    pub hopping: f64,
    /// Sublattice frequency offset `M` (`+M` on A, `-M` on B).
    pub offset: f64,
    /// Lattice constant `a` (> 0; the length unit).
    pub lattice_constant: f64,
    /// Sites per axis `L` (even; boundary conditions are periodic).
    pub size: usize,
}

impl LatticeParams {
    pub fn new(hopping: f64, offset: f64, lattice_constant: f64, size: usize) -> Result<Self> {
        let p = Self {
            hopping,
            offset,
            lattice_constant,
            size,
        };
        p.validate()?;
        Ok(p)
    }

    /// `J = 1`, `a = 1`, given offset and size.
    pub fn with_offset(offset: f64, size: usize) -> Result<Self> {
        Self::new(1.0, offset, 1.0, size)
    }

    pub fn validate(&self) -> Result<()> {
        // J = 0 is allowed as the hopping-free limit; negative J is not.
        if !(self.hopping >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "hopping J = {} must be non-negative",
                self.hopping
            )));
        }
        if !(self.lattice_constant > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lattice constant a = {} must be positive",
                self.lattice_constant
            )));
        }
        if self.size < 2 {
            return Err(Error::InvalidParams(format!(
                "size L = {} must be at least 2",
                self.size
            )));
        }
        if self.size % 2 != 0 {
            return Err(Error::OddLatticeSize(self.size));
        }
        Ok(())
    }

    pub fn site_count(&self) -> usize {
        self.size * self.size * self.size
    }

    /// `|M| < 2J`: bands touch at Weyl points. `|M| > 2J`: gapped spectrum.
    pub fn gapless_regime(&self) -> bool {
        self.offset.abs() < 2.0 * self.hopping
    }

    /// Largest possible band energy, used to bound histograms and
    /// propagator rescaling.
    pub fn band_energy_bound(&self) -> f64 {
        let j = self.hopping;
        (4.0 * j * j + 4.0 * j * j + (2.0 * j + self.offset.abs()).powi(2)).sqrt()
    }
}

/// Integer lattice coordinates in `[0, L)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SiteIndex {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl SiteIndex {
    pub fn new(x: usize, y: usize, z: usize) -> Self {
        Self { x, y, z }
    }

    /// Sublattice is a pure function of (x, y): A if x + y is even.
    pub fn sublattice(&self) -> Sublattice {
        if (self.x + self.y) % 2 == 0 {
            Sublattice::A
        } else {
            Sublattice::B
        }
    }

    pub fn flat(&self, l: usize) -> usize {
        self.x + l * (self.y + l * self.z)
    }

    pub fn from_flat(idx: usize, l: usize) -> Self {
        Self {
            x: idx % l,
            y: (idx / l) % l,
            z: idx / (l * l),
        }
    }

    fn staggering(&self) -> f64 {
        if (self.x + self.y) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Momentum in units of `1/a` of the original cubic lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    pub kx: f64,
    pub ky: f64,
    pub kz: f64,
}

impl Momentum {
    pub fn new(kx: f64, ky: f64, kz: f64) -> Self {
        Self { kx, ky, kz }
    }

    /// Map into the declared fundamental domain of the reduced Brillouin
    /// zone: `k_x a in [-pi, pi)`, `k_y a in [-pi/2, pi/2)`,
    /// `k_z a in [-pi, pi)`. Momenta `k` and `k + (pi/a)(1, +-1, 0)` label
    /// the same Bloch state of the two-site cell.
    pub fn reduce_to_bz(&self, a: f64) -> Momentum {
        let wrap = |v: f64| {
            let p = 2.0 * PI / a;
            let mut w = (v + PI / a) % p;
            if w < 0.0 {
                w += p;
            }
            w - PI / a
        };
        let mut kx = wrap(self.kx);
        let mut ky = wrap(self.ky);
        let kz = wrap(self.kz);
        let half = PI / (2.0 * a);
        if ky >= half {
            ky -= PI / a;
            kx = wrap(kx + PI / a);
        } else if ky < -half {
            ky += PI / a;
            kx = wrap(kx + PI / a);
        }
        Momentum { kx, ky, kz }
    }

    /// Distance on the reduced-zone torus (minimized over reciprocal
    /// images, including the cell-doubling shifts).
    pub fn reduced_distance(&self, other: &Momentum, a: f64) -> f64 {
        let g = PI / a;
        let mut best = f64::INFINITY;
        for i in -1i32..=1 {
            for j in -1i32..=1 {
                for l in -1i32..=1 {
                    // i*G1 + j*G2 + l*G3 with G1 = (g, g, 0), G2 = (g, -g, 0),
                    // G3 = (0, 0, 2g)
                    let dx = self.kx - other.kx + (i + j) as f64 * g;
                    let dy = self.ky - other.ky + (i - j) as f64 * g;
                    let dz = self.kz - other.kz + 2.0 * l as f64 * g;
                    best = best.min((dx * dx + dy * dy + dz * dz).sqrt());
                }
            }
        }
        best
    }
}

/// Real-space Hamiltonian prior to Hermitian completion: directed bonds
/// `(from, to, amplitude)` plus on-site energies. `to_sparse` adds the
/// conjugate partners.
#[derive(Debug, Clone)]
pub struct RealSpaceHamiltonian {
    params: LatticeParams,
    bonds: Vec<(usize, usize, f64)>,
    onsite: Vec<f64>,
}

impl RealSpaceHamiltonian {
    pub fn dim(&self) -> usize {
        self.params.site_count()
    }

    /// Directed bond count before Hermitian conjugation: exactly `3 L^3`.
    pub fn n_directed_bonds(&self) -> usize {
        self.bonds.len()
    }

    /// Directed bonds `(from, to, amplitude)` prior to Hermitian
    /// completion.
    pub fn bonds(&self) -> &[(usize, usize, f64)] {
        &self.bonds
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn to_sparse(&self) -> CsrMatrix {
        let n = self.dim();
        let mut b = CsrBuilder::new(n);
        for &(i, j, t) in &self.bonds {
            b.push(i, j, t);
            b.push(j, i, t);
        }
        for (i, &e) in self.onsite.iter().enumerate() {
            if e != 0.0 {
                b.push(i, i, e);
            }
        }
        b.build()
    }
}

/// Build the staggered-hopping bath on the `L^3` periodic lattice.
pub fn real_space_hamiltonian(params: &LatticeParams) -> Result<RealSpaceHamiltonian> {
    params.validate()?;
    let l = params.size;
    let j = params.hopping;
    let n = params.site_count();
    let mut bonds = Vec::with_capacity(3 * n);
    let mut onsite = vec![0.0; n];
    for z in 0..l {
        for y in 0..l {
            for x in 0..l {
                let site = SiteIndex::new(x, y, z);
                let i = site.flat(l);
                let stag = site.staggering();
                onsite[i] = stag * params.offset;
                let xn = SiteIndex::new((x + 1) % l, y, z).flat(l);
                let yn = SiteIndex::new(x, (y + 1) % l, z).flat(l);
                let zn = SiteIndex::new(x, y, (z + 1) % l).flat(l);
                bonds.push((i, xn, j));
                bonds.push((i, yn, -stag * j));
                bonds.push((i, zn, stag * j));
            }
        }
    }
    Ok(RealSpaceHamiltonian {
        params: *params,
        bonds,
        onsite,
    })
}

/// 2x2 momentum-space Hamiltonian in the (A, B) sublattice basis.
#[derive(Debug, Clone, Copy)]
pub struct BlochMatrix {
    pub elems: [[C64; 2]; 2],
}

impl BlochMatrix {
    /// Pauli decomposition `(d_x, d_y, d_z)`; the matrix is traceless by
    /// construction.
    pub fn d(&self) -> [f64; 3] {
        [
            self.elems[0][1].re,
            -self.elems[0][1].im,
            self.elems[0][0].re,
        ]
    }

    pub fn d_norm(&self) -> f64 {
        let d = self.d();
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub fn trace(&self) -> C64 {
        self.elems[0][0] + self.elems[1][1]
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

/// Pauli vector of the Bloch Hamiltonian at the given momentum without
/// zone reduction. In the site-centered gauge the entries are smooth
/// functions of `k`; under a reduced-reciprocal-lattice shift the
/// in-plane components flip sign together with the inter-sublattice
/// phase factors, so resolvent integrands must pair this raw form with
/// phases at the same momentum.
pub(crate) fn bloch_d_raw(params: &LatticeParams, k: Momentum) -> [f64; 3] {
    let a = params.lattice_constant;
    let j = params.hopping;
    [
        2.0 * j * (k.kx * a).cos(),
        2.0 * j * (k.ky * a).sin(),
        2.0 * j * (k.kz * a).cos() + params.offset,
    ]
}

/// Bloch Hamiltonian at momentum `k` (reduced by periodicity if outside the
/// declared zone).
pub fn bloch_hamiltonian(params: &LatticeParams, k: Momentum) -> BlochMatrix {
    let k = k.reduce_to_bz(params.lattice_constant);
    // Site-centered gauge: A -> B hops along +-x contribute 2J cos(k_x a);
    // the sign-staggered y-bonds contribute -2iJ sin(k_y a).
    let [dx, dy, dz] = bloch_d_raw(params, k);
    let off = C64::new(dx, -dy);
    BlochMatrix {
        elems: [
            [C64::new(dz, 0.0), off],
            [off.conj(), C64::new(-dz, 0.0)],
        ],
    }
}

/// Bands and gauge-fixed eigenvectors at one momentum.
#[derive(Debug, Clone)]
pub struct DispersionSample {
    pub momentum: Momentum,
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub evec_minus: [C64; 2],
    pub evec_plus: [C64; 2],
    /// Set at (numerically) exact degeneracies, where the eigenvector gauge
    /// is arbitrary; curvature sums must skip such samples.
    pub gauge_ambiguous: bool,
}

/// Diagonalize the Bloch Hamiltonian. Eigenvectors are gauge-fixed by
/// making the largest-magnitude component real and positive.
pub fn bands(params: &LatticeParams, k: Momentum) -> DispersionSample {
    let h = bloch_hamiltonian(params, k);
    let [dx, dy, dz] = h.d();
    let e = h.d_norm();
    let deg_tol = 1e-12 * params.hopping.max(params.offset.abs()).max(1.0);
    if e < deg_tol {
        return DispersionSample {
            momentum: k.reduce_to_bz(params.lattice_constant),
            omega_minus: -e,
            omega_plus: e,
            evec_minus: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            evec_plus: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            gauge_ambiguous: true,
        };
    }
    let off = C64::new(dx, dy); // d_x + i d_y
    let (mut plus, mut minus) = if dz >= 0.0 {
        let norm = (2.0 * e * (e + dz)).sqrt();
        (
            [C64::new(e + dz, 0.0) / norm, off / norm],
            [-off.conj() / norm, C64::new(e + dz, 0.0) / norm],
        )
    } else {
        let norm = (2.0 * e * (e - dz)).sqrt();
        (
            [off.conj() / norm, C64::new(e - dz, 0.0) / norm],
            [C64::new(-(e - dz), 0.0) / norm, off / norm],
        )
    };
    gauge_fix(&mut plus);
    gauge_fix(&mut minus);
    DispersionSample {
        momentum: k.reduce_to_bz(params.lattice_constant),
        omega_minus: -e,
        omega_plus: e,
        evec_minus: minus,
        evec_plus: plus,
        gauge_ambiguous: false,
    }
}

fn gauge_fix(v: &mut [C64; 2]) {
    let idx = if v[0].norm_sqr() >= v[1].norm_sqr() { 0 } else { 1 };
    let c = v[idx];
    if c.norm() > 0.0 {
        let phase = c.conj() / c.norm();
        v[0] *= phase;
        v[1] *= phase;
    }
}

/// Gaussian-broadened per-site density of states.
#[derive(Debug, Clone)]
pub struct DosHistogram {
    /// `n_bins + 1` edges, symmetric about zero.
    pub bin_edges: Vec<f64>,
    /// Per-site density in each bin, units 1/energy.
    pub density: Vec<f64>,
    /// Broadening below the grid level-spacing scale: histogram may be
    /// ragged.
    pub ragged: bool,
    pub eta: f64,
}

impl DosHistogram {
    pub fn n_bins(&self) -> usize {
        self.density.len()
    }

    pub fn bin_center(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    /// `\int D(w) dw`; one mode per site gives 1 up to quadrature error.
    pub fn integral(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.bin_width()
    }

    /// Linear interpolation of the density at `omega`; zero outside range.
    pub fn value_at(&self, omega: f64) -> f64 {
        let w = self.bin_width();
        let lo = self.bin_edges[0] + 0.5 * w;
        let x = (omega - lo) / w;
        if x < 0.0 || x > (self.n_bins() - 1) as f64 {
            return 0.0;
        }
        let i = (x.floor() as usize).min(self.n_bins() - 2);
        let t = x - i as f64;
        self.density[i] * (1.0 - t) + self.density[i + 1] * t
    }

    /// Least-squares exponent of `log D` vs `log |omega|` over
    /// `|omega| in [lo, hi]` (positive-frequency bins; the density is
    /// symmetric).
    pub fn fit_exponent(&self, lo: f64, hi: f64) -> numerics::LineFit {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..self.n_bins() {
            let c = self.bin_center(i);
            if c >= lo && c <= hi && self.density[i] > 0.0 {
                xs.push(c.ln());
                ys.push(self.density[i].ln());
            }
        }
        numerics::line_fit(&xs, &ys)
    }
}

/// Gaussian-broadened histogram of both bands over a half-step shifted
/// uniform momentum grid, normalized to one mode per site.
///
/// Bin width defaults to `eta / 2`; both `+|d|` and `-|d|` enter, so the
/// histogram is symmetric bin-for-bin by construction.
pub fn dos(params: &LatticeParams, grid_per_axis: usize, eta: f64) -> Result<DosHistogram> {
    params.validate()?;
    if grid_per_axis < 16 {
        return Err(Error::GridTooCoarse(format!(
            "dos needs grid_per_axis >= 16, got {grid_per_axis}"
        )));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParams(format!(
            "broadening eta = {eta} must be positive"
        )));
    }
    let grid = KGrid::Shifted(grid_per_axis);
    let w_max = params.band_energy_bound() + 6.0 * eta;
    let bin_w = eta / 2.0;
    let half_bins = (w_max / bin_w).ceil() as usize;
    let n_bins = 2 * half_bins;
    let lo_edge = -(half_bins as f64) * bin_w;

    let n = grid.points_per_axis();
    let a = params.lattice_constant;
    use rayon::prelude::*;
    let partials: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|ix| {
            let mut h = vec![0.0f64; n_bins];
            for iy in 0..n {
                for iz in 0..n {
                    let k = grid.momentum(ix, iy, iz, a);
                    let e = bloch_hamiltonian(params, k).d_norm();
                    for band in [e, -e] {
                        let b0 = (((band - 6.0 * eta) - lo_edge) / bin_w).floor().max(0.0) as usize;
                        let b1 = ((((band + 6.0 * eta) - lo_edge) / bin_w).ceil() as usize)
                            .min(n_bins);
                        for b in b0..b1 {
                            let x = lo_edge + (b as f64 + 0.5) * bin_w - band;
                            h[b] += (-x * x / (2.0 * eta * eta)).exp();
                        }
                    }
                }
            }
            h
        })
        .collect();
    let mut density = vec![0.0f64; n_bins];
    for p in partials {
        for (d, v) in density.iter_mut().zip(p) {
            *d += v;
        }
    }
    let norm = 1.0 / (2.0 * grid.len() as f64 * (2.0 * PI).sqrt() * eta);
    for d in density.iter_mut() {
        *d *= norm;
    }
    let bin_edges: Vec<f64> = (0..=n_bins).map(|i| lo_edge + i as f64 * bin_w).collect();
    // grid step in energy: a Gaussian narrower than this cannot smooth the
    // discrete level structure near the nodes
    let level_scale = 4.0 * PI * params.hopping / grid_per_axis as f64;
    Ok(DosHistogram {
        bin_edges,
        density,
        ragged: eta < level_scale,
        eta,
    })
}

/// Minimum of `omega_plus - omega_minus` over the zone: brute-force grid
/// scan refined by Nelder-Mead descent from the best grid minima.
pub fn spectral_gap(params: &LatticeParams, grid_per_axis: usize) -> f64 {
    let grid = KGrid::Shifted(grid_per_axis.max(8));
    let a = params.lattice_constant;
    let gap_at = |k: &[f64; 3]| {
        2.0 * bloch_hamiltonian(params, Momentum::new(k[0], k[1], k[2])).d_norm()
    };
    let n = grid.points_per_axis();
    let mut starts: Vec<([f64; 3], f64)> = Vec::new();
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let k = grid.momentum(ix, iy, iz, a);
                let g = 2.0 * bloch_hamiltonian(params, k).d_norm();
                starts.push(([k.kx, k.ky, k.kz], g));
            }
        }
    }
    starts.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    let step = 2.0 * PI / (a * n as f64);
    let mut best = starts[0].1;
    for (p, _) in starts.iter().take(4) {
        let (_, v) = numerics::nelder_mead(&gap_at, *p, 0.6 * step, 1e-12, 4000);
        best = best.min(v);
    }
    best
}

/// An isolated band-touching momentum with its Berry chirality.
#[derive(Debug, Clone)]
pub struct WeylNode {
    /// Node momentum in the reduced-zone fundamental domain, units `1/a`.
    pub momentum: Momentum,
    /// Band energy at the node (the Weyl frequency).
    pub frequency: f64,
    /// Berry flux through a small enclosing surface, in units of `2 pi`.
    pub chirality: i32,
}

/// Outcome of a node search; `gapped` marks the `|M| >= 2J` regime where
/// the list is empty by construction.
#[derive(Debug, Clone)]
pub struct WeylNodeSearch {
    pub nodes: Vec<WeylNode>,
    pub gapped: bool,
}

impl WeylNodeSearch {
    pub fn chirality_sum(&self) -> i32 {
        self.nodes.iter().map(|n| n.chirality).sum()
    }
}

/// Locate all band-touching momenta with `omega_plus - omega_minus < tol`
/// and assign chiralities from the quantized Berry flux through a small
/// enclosing momentum-space box.
pub fn find_weyl_nodes(params: &LatticeParams, tol: f64) -> WeylNodeSearch {
    if !params.gapless_regime() {
        return WeylNodeSearch {
            nodes: Vec::new(),
            gapped: true,
        };
    }
    let a = params.lattice_constant;
    let gap_at =
        |k: &[f64; 3]| 2.0 * bloch_hamiltonian(params, Momentum::new(k[0], k[1], k[2])).d_norm();

    // Coarse scan, then descend from every local minimum of the scan. Near
    // the merging point |M| -> 2J node pairs approach each other, so the
    // scan must resolve their separation.
    let nearly_merged = 2.0 * params.hopping - params.offset.abs() < 0.3 * params.hopping;
    let scan = KGrid::Shifted(if nearly_merged { 64 } else { 32 });
    let n = scan.points_per_axis();
    let gaps: Vec<f64> = scan.map_collect(a, |_, k| 2.0 * bloch_hamiltonian(params, k).d_norm());
    let at = |ix: usize, iy: usize, iz: usize| gaps[(ix % n * n + iy % n) * n + iz % n];
    let mut seeds: Vec<[f64; 3]> = Vec::new();
    for ix in 0..n {
        for iy in 0..n {
            for iz in 0..n {
                let g = at(ix, iy, iz);
                if g > 1.2 * params.hopping {
                    continue;
                }
                let is_min = g <= at(ix + 1, iy, iz)
                    && g <= at(ix + n - 1, iy, iz)
                    && g <= at(ix, iy + 1, iz)
                    && g <= at(ix, iy + n - 1, iz)
                    && g <= at(ix, iy, iz + 1)
                    && g <= at(ix, iy, iz + n - 1);
                if is_min {
                    let k = scan.momentum(ix, iy, iz, a);
                    seeds.push([k.kx, k.ky, k.kz]);
                }
            }
        }
    }

    let step = 2.0 * PI / (a * n as f64);
    let mut found: Vec<Momentum> = Vec::new();
    for seed in seeds {
        let (p, v) = numerics::nelder_mead(&gap_at, seed, 0.7 * step, 1e-13, 6000);
        if v >= tol {
            continue;
        }
        let cand = Momentum::new(p[0], p[1], p[2]).reduce_to_bz(a);
        let dup = found
            .iter()
            .any(|m| m.reduced_distance(&cand, a) < 1e-4 / a);
        if !dup {
            found.push(cand);
        }
    }

    // adaptive enclosing-box size: stay clear of neighbouring nodes
    let mut min_sep = f64::INFINITY;
    for i in 0..found.len() {
        for j in (i + 1)..found.len() {
            min_sep = min_sep.min(found[i].reduced_distance(&found[j], a));
        }
    }
    let half = (0.25 / a).min(0.3 * min_sep).max(1e-3 / a);

    let lower = |k: Momentum| bands(params, k).evec_minus;
    let nodes = found
        .into_iter()
        .map(|m| {
            let flux = berry::box_flux(&lower, m, half, 8);
            let chirality = berry::chirality_from_lower_band_flux(flux);
            let s = bands(params, m);
            WeylNode {
                momentum: m,
                frequency: 0.5 * (s.omega_plus + s.omega_minus),
                chirality,
            }
        })
        .collect();
    WeylNodeSearch {
        nodes,
        gapped: false,
    }
}
