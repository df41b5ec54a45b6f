//! Gauge-invariant Berry flux from link variables (Fukui-Hatsugai).
//!
//! The flux through a plaquette with corner eigenvectors `u1..u4` is the
//! argument of the product of normalized overlaps around the loop. Summed
//! over any closed surface the plaquette fluxes give exactly `2 pi` times an
//! integer as long as no individual plaquette flux reaches the `+-pi` branch
//! cut, so chirality assignment needs no gauge fixing at all.

use crate::lattice::Momentum;
use num_complex::Complex64 as C64;

#[inline]
fn overlap(a: &[C64; 2], b: &[C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Berry flux through one plaquette from its four corner eigenvectors
/// (counter-clockwise order). Result lies in `(-pi, pi]`.
pub fn plaquette_flux(corners: &[[C64; 2]; 4]) -> f64 {
    let u = overlap(&corners[0], &corners[1])
        * overlap(&corners[1], &corners[2])
        * overlap(&corners[2], &corners[3])
        * overlap(&corners[3], &corners[0]);
    u.arg()
}

/// Total outward Berry flux of the band supplied by `eigenvector` through
/// the surface of an axis-aligned momentum-space cube centered at `center`
/// with half-width `half`, using a `mesh x mesh` plaquette grid per face.
pub fn box_flux(
    eigenvector: &impl Fn(Momentum) -> [C64; 2],
    center: Momentum,
    half: f64,
    mesh: usize,
) -> f64 {
    let mut total = 0.0;
    // (normal axis, side): (u, v) span the face so that u x v points along
    // +axis; multiplying by `side` orients every face outward.
    for (axis, side) in [(0, -1.0f64), (0, 1.0), (1, -1.0), (1, 1.0), (2, -1.0), (2, 1.0)] {
        let (u_axis, v_axis) = match axis {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        let corner_vec = |iu: usize, iv: usize| -> [C64; 2] {
            let mut k = [center.kx, center.ky, center.kz];
            k[axis] += side * half;
            k[u_axis] += -half + 2.0 * half * iu as f64 / mesh as f64;
            k[v_axis] += -half + 2.0 * half * iv as f64 / mesh as f64;
            eigenvector(Momentum::new(k[0], k[1], k[2]))
        };
        for iu in 0..mesh {
            for iv in 0..mesh {
                let c = [
                    corner_vec(iu, iv),
                    corner_vec(iu + 1, iv),
                    corner_vec(iu + 1, iv + 1),
                    corner_vec(iu, iv + 1),
                ];
                total += side * plaquette_flux(&c);
            }
        }
    }
    total
}

/// Chirality from the lower-band flux through an enclosing surface: the
/// lower band of `d . sigma` carries monopole charge `-chi`, so
/// `chi = -flux / 2 pi`.
pub fn chirality_from_lower_band_flux(flux: f64) -> i32 {
    (-flux / (2.0 * std::f64::consts::PI)).round() as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lower-band eigenvector of d . sigma for a synthetic monopole
    /// d(k) = k - k0 (chirality +1 by construction).
    fn monopole_lower(center: [f64; 3]) -> impl Fn(Momentum) -> [C64; 2] {
        move |k: Momentum| {
            let d = [k.kx - center[0], k.ky - center[1], k.kz - center[2]];
            let e = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let off = C64::new(d[0], d[1]);
            if d[2] >= 0.0 {
                let n = (2.0 * e * (e + d[2])).sqrt();
                [-off.conj() / n, C64::new(e + d[2], 0.0) / n]
            } else {
                let n = (2.0 * e * (e - d[2])).sqrt();
                [C64::new(-(e - d[2]), 0.0) / n, off / n]
            }
        }
    }

    #[test]
    fn unit_monopole_gives_minus_two_pi_and_chirality_one() {
        let f = monopole_lower([0.2, -0.1, 0.05]);
        let flux = box_flux(&f, Momentum::new(0.2, -0.1, 0.05), 0.3, 10);
        assert!(
            (flux + 2.0 * std::f64::consts::PI).abs() < 1e-10,
            "flux {flux}"
        );
        assert_eq!(chirality_from_lower_band_flux(flux), 1);
    }

    #[test]
    fn empty_box_carries_zero_flux() {
        let f = monopole_lower([1.0, 1.0, 1.0]);
        let flux = box_flux(&f, Momentum::new(0.0, 0.0, 0.0), 0.2, 8);
        assert!(flux.abs() < 1e-10, "flux {flux}");
    }

    #[test]
    fn antimonopole_flips_sign() {
        // d(k) = (-qx, qy, qz): det of the Jacobian is negative
        let f = move |k: Momentum| {
            let d = [-k.kx, k.ky, k.kz];
            let e = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            let off = C64::new(d[0], d[1]);
            if d[2] >= 0.0 {
                let n = (2.0 * e * (e + d[2])).sqrt();
                [-off.conj() / n, C64::new(e + d[2], 0.0) / n]
            } else {
                let n = (2.0 * e * (e - d[2])).sqrt();
                [C64::new(-(e - d[2]), 0.0) / n, off / n]
            }
        };
        let flux = box_flux(&f, Momentum::new(0.0, 0.0, 0.0), 0.25, 8);
        assert_eq!(chirality_from_lower_band_flux(flux), -1);
    }
}
