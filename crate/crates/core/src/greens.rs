//! Bare lattice resolvent `G(z) = (z - H_B)^{-1}` and the emitter
//! self-energy.
//!
//! With the Bloch matrix `d(k) . sigma`, the resolvent block at momentum
//! `k` is `(z + d . sigma) / (z^2 - |d|^2)`. Zone sums run over the full
//! cubic grid (see [`crate::kgrid`]); two-point elements pick up the
//! site-centered phase `e^{i k . r}`, so a full displacement field is one
//! inverse FFT per sublattice block.
//!
//! Evaluation at real energies inside the continuum uses either a small
//! imaginary part `eta` or, on shifted grids that avoid band-touching
//! momenta, the direct `eta = 0` principal-value-like grid sum. Quantities
//! that need the clean `eta -> 0` limit (critical detuning, effective
//! couplings) extrapolate quadratically from three finite-eta samples tied
//! to the grid scale.

use crate::kgrid::KGrid;
use crate::lattice::{bloch_d_raw, LatticeParams, Sublattice};
use crate::{Error, Result};
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Complex energy `z = E + i eta` with `eta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy {
    pub re: f64,
    pub eta: f64,
}

impl ComplexEnergy {
    pub fn new(re: f64, eta: f64) -> Self {
        assert!(eta >= 0.0, "regularization eta must be non-negative");
        Self { re, eta }
    }

    /// Real energy, `eta = 0`. Valid on grids without band-touching
    /// momenta at `|d| = |E|` (the shifted grids used here) or outside the
    /// spectrum.
    pub fn real(re: f64) -> Self {
        Self { re, eta: 0.0 }
    }

    pub fn z(&self) -> C64 {
        C64::new(self.re, self.eta)
    }
}

/// A single resolvent sample: the evaluation point bundled with its value.
#[derive(Debug, Clone, Copy)]
pub struct GreensSample {
    pub z: ComplexEnergy,
    pub displacement: [i64; 3],
    pub sublattice_pair: (Sublattice, Sublattice),
    pub value: C64,
}

impl GreensSample {
    pub fn compute(
        params: &LatticeParams,
        z: ComplexEnergy,
        displacement: [i64; 3],
        sublattice_pair: (Sublattice, Sublattice),
        grid: &KGrid,
    ) -> crate::Result<Self> {
        let value = green_pair(params, z, displacement, sublattice_pair, grid)?;
        Ok(Self {
            z,
            displacement,
            sublattice_pair,
            value,
        })
    }
}

#[inline]
fn numerator(pair: (Sublattice, Sublattice), z: C64, d: [f64; 3]) -> C64 {
    use Sublattice::*;
    match pair {
        (A, A) => z + d[2],
        (B, B) => z - d[2],
        // (target, source) blocks of z + d . sigma in the (A, B) basis
        (A, B) => C64::new(d[0], -d[1]),
        (B, A) => C64::new(d[0], d[1]),
    }
}

/// Parity-consistent target sublattice for a displacement from `source`.
pub fn target_sublattice(source: Sublattice, displacement: [i64; 3]) -> Sublattice {
    let flip = (displacement[0] + displacement[1]).rem_euclid(2) == 1;
    match (source, flip) {
        (s, false) => s,
        (Sublattice::A, true) => Sublattice::B,
        (Sublattice::B, true) => Sublattice::A,
    }
}

/// Local resolvent element `G_{aa}(z; r = 0)` on the given momentum grid.
pub fn green_local(
    params: &LatticeParams,
    z: ComplexEnergy,
    sublattice: Sublattice,
    grid: &KGrid,
) -> Result<C64> {
    green_pair(params, z, [0, 0, 0], (sublattice, sublattice), grid)
}

/// Two-point resolvent element for a displacement `r` (units of `a`) and
/// sublattice pair `(target, source)`.
///
/// The pair must be parity-consistent with the displacement; grid momenta
/// with `|d| = |E|` reject the `eta = 0` evaluation as a pole on the
/// contour.
pub fn green_pair(
    params: &LatticeParams,
    z: ComplexEnergy,
    displacement: [i64; 3],
    sublattice_pair: (Sublattice, Sublattice),
    grid: &KGrid,
) -> Result<C64> {
    params.validate()?;
    let (target, source) = sublattice_pair;
    if target_sublattice(source, displacement) != target {
        return Err(Error::InvalidParams(format!(
            "sublattice pair {sublattice_pair:?} inconsistent with displacement {displacement:?}"
        )));
    }
    let a = params.lattice_constant;
    let zz = z.z();
    let z2 = zz * zz;
    let (sum, min_denom) = grid.mean(a, |k| {
        let d = bloch_d_raw(params, k);
        let denom = z2 - (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        let phase = a
            * (k.kx * displacement[0] as f64
                + k.ky * displacement[1] as f64
                + k.kz * displacement[2] as f64);
        let val = C64::new(0.0, phase).exp() * numerator(sublattice_pair, zz, d) / denom;
        MeanWithMin {
            sum: val,
            min: denom.norm_sqr(),
        }
    });
    if z.eta == 0.0 && min_denom < pole_tolerance(params) {
        return Err(Error::PoleOnContour { re: z.re, eta: z.eta });
    }
    Ok(sum)
}

fn pole_tolerance(params: &LatticeParams) -> f64 {
    let j = params.hopping.max(params.offset.abs()).max(1e-30);
    1e-20 * j * j * j * j
}

/// Pair (weighted sum, running minimum) so one grid pass yields both.
#[derive(Clone, Copy)]
struct MeanWithMin {
    sum: C64,
    min: f64,
}

impl std::iter::Sum for MeanWithMin {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        let mut acc = MeanWithMin {
            sum: C64::new(0.0, 0.0),
            min: f64::INFINITY,
        };
        for v in iter {
            acc.sum += v.sum;
            acc.min = acc.min.min(v.min);
        }
        acc
    }
}

impl std::ops::Mul<f64> for MeanWithMin {
    type Output = (C64, f64);
    fn mul(self, rhs: f64) -> (C64, f64) {
        (self.sum * rhs, self.min)
    }
}

/// Resolvent field over every displacement of the momentum-grid torus,
/// from a source on the given sublattice.
#[derive(Debug, Clone)]
pub struct GreensField {
    n: usize,
    source: Sublattice,
    /// Half-step grids are antiperiodic in the displacement: wrapping one
    /// torus period along any axis flips the sign.
    antiperiodic: bool,
    /// value at displacement `(x, y, z) mod n`, flat index `(x n + y) n + z`
    values: Vec<C64>,
}

impl GreensField {
    pub fn torus_size(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> Sublattice {
        self.source
    }

    /// Element at integer displacement. Commensurate-grid fields are
    /// torus-periodic; shifted-grid fields flip sign per axis wrap.
    pub fn at(&self, displacement: [i64; 3]) -> C64 {
        let n = self.n as i64;
        let mut sign = 1.0;
        let mut idx = [0usize; 3];
        for (i, &r) in displacement.iter().enumerate() {
            idx[i] = r.rem_euclid(n) as usize;
            if self.antiperiodic && r.div_euclid(n) % 2 != 0 {
                sign = -sign;
            }
        }
        self.values[(idx[0] * self.n + idx[1]) * self.n + idx[2]] * sign
    }

    /// Sum of `|G|^2` over the whole torus.
    pub fn norm_sqr_total(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Assemble a field from raw displacement values (test support).
    pub fn from_raw(n: usize, source: Sublattice, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), n * n * n);
        Self {
            n,
            source,
            antiperiodic: false,
            values,
        }
    }
}

/// Compute the full-displacement resolvent field from one source
/// sublattice at complex energy `z`: one inverse FFT per sublattice block.
pub fn green_field(
    params: &LatticeParams,
    z: ComplexEnergy,
    source: Sublattice,
    grid: &KGrid,
) -> Result<GreensField> {
    params.validate()?;
    let n = grid.points_per_axis();
    let a = params.lattice_constant;
    let zz = z.z();
    let z2 = zz * zz;
    let same_pair = (source, source);
    let cross_pair = match source {
        Sublattice::A => (Sublattice::B, Sublattice::A),
        Sublattice::B => (Sublattice::A, Sublattice::B),
    };

    let mut same = vec![C64::new(0.0, 0.0); n * n * n];
    let mut cross = vec![C64::new(0.0, 0.0); n * n * n];
    let mut min_denom = f64::INFINITY;
    let blocks = grid.map_collect(a, |_, k| {
        let d = bloch_d_raw(params, k);
        let denom = z2 - (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        (
            numerator(same_pair, zz, d) / denom,
            numerator(cross_pair, zz, d) / denom,
            denom.norm_sqr(),
        )
    });
    for (i, (s, c, dn)) in blocks.into_iter().enumerate() {
        same[i] = s;
        cross[i] = c;
        min_denom = min_denom.min(dn);
    }
    if z.eta == 0.0 && min_denom < pole_tolerance(params) {
        return Err(Error::PoleOnContour { re: z.re, eta: z.eta });
    }

    inverse_fft_3d(&mut same, n);
    inverse_fft_3d(&mut cross, n);

    // shifted grids contribute a per-axis half-step phase e^{i pi r_j / n}
    let shifted = matches!(grid, KGrid::Shifted(_));
    let mut values = vec![C64::new(0.0, 0.0); n * n * n];
    for x in 0..n {
        for y in 0..n {
            for zc in 0..n {
                let idx = (x * n + y) * n + zc;
                let base = if (x + y) % 2 == 1 { cross[idx] } else { same[idx] };
                values[idx] = if shifted {
                    let ph = PI * (x + y + zc) as f64 / n as f64;
                    base * C64::new(0.0, ph).exp()
                } else {
                    base
                };
            }
        }
    }
    Ok(GreensField {
        n,
        source,
        antiperiodic: shifted,
        values,
    })
}

/// Unnormalized-inverse 3D FFT divided by `N^3`, i.e. the plain
/// `1/N^3 sum_k e^{+i 2 pi n k / N}` average along each axis.
fn inverse_fft_3d(data: &mut [C64], n: usize) {
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    let mut buf = vec![C64::new(0.0, 0.0); n];
    for x in 0..n {
        for y in 0..n {
            let off = (x * n + y) * n;
            fft.process(&mut data[off..off + n]);
        }
    }
    for x in 0..n {
        for z in 0..n {
            for y in 0..n {
                buf[y] = data[(x * n + y) * n + z];
            }
            fft.process(&mut buf);
            for y in 0..n {
                data[(x * n + y) * n + z] = buf[y];
            }
        }
    }
    for y in 0..n {
        for z in 0..n {
            for x in 0..n {
                buf[x] = data[(x * n + y) * n + z];
            }
            fft.process(&mut buf);
            for x in 0..n {
                data[(x * n + y) * n + z] = buf[x];
            }
        }
    }
    let scale = 1.0 / (n * n * n) as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Emitter self-energy `Sigma(z) = g^2 G_{aa}(z; 0)`.
pub fn self_energy(
    params: &LatticeParams,
    g: f64,
    z: ComplexEnergy,
    sublattice: Sublattice,
    grid: &KGrid,
) -> Result<C64> {
    Ok(green_local(params, z, sublattice, grid)? * (g * g))
}

/// `d Sigma / dE` at a real energy where `Sigma` is real and smooth:
/// five-point central differences with step `1e-3 J`, Richardson-refined.
///
/// Rejects points with non-negligible `Im Sigma` (resonant with the
/// continuum), probed at `eta = 1e-3 J`.
pub fn self_energy_slope(
    params: &LatticeParams,
    g: f64,
    energy: f64,
    sublattice: Sublattice,
    grid: &KGrid,
) -> Result<f64> {
    if g == 0.0 {
        return Ok(0.0);
    }
    let j = params.hopping.max(1e-300);
    let probe = green_local(params, ComplexEnergy::new(energy, 1e-3 * j), sublattice, grid)?;
    if probe.im.abs() > 1e-3 / j {
        return Err(Error::ResonantSlopePoint {
            energy,
            im_sigma: g * g * probe.im,
        });
    }
    let eval = |e: f64| -> Result<f64> {
        Ok(green_local(params, ComplexEnergy::real(e), sublattice, grid)?.re)
    };
    let five_point = |h: f64| -> Result<f64> {
        Ok(
            (eval(energy - 2.0 * h)? - 8.0 * eval(energy - h)? + 8.0 * eval(energy + h)?
                - eval(energy + 2.0 * h)?)
                / (12.0 * h),
        )
    };
    let h = 1e-3 * j;
    let d1 = five_point(h)?;
    let d2 = five_point(h / 2.0)?;
    // one Richardson step on the O(h^4) stencil
    Ok(g * g * ((16.0 * d2 - d1) / 15.0))
}

/// Default eta triple for `eta -> 0` extrapolation on this grid: tied to
/// the grid energy scale so each Lorentzian spans several grid cells.
pub fn extrapolation_etas(params: &LatticeParams, grid: &KGrid) -> [f64; 3] {
    // the grid resolves energies down to (band velocity) x (grid step),
    // which is set by the hopping alone
    let scale = 4.0 * PI * params.hopping.max(1e-300) / grid.points_per_axis() as f64;
    [scale, 1.5 * scale, 2.0 * scale]
}
