//! Chebyshev expansion of the unitary propagator for sparse Hamiltonians.
//!
//! `e^{-i H t} = e^{-i b t} sum_k (2 - delta_k0) (-i)^k J_k(w t) T_k(H~)`
//! with `H~ = (H - b)/w` rescaled into [-1, 1] by the spectral bounds.
//! Bessel coefficients decay super-exponentially past `k ~ |w t|`, so a
//! norm-checked truncation gives propagation at machine-level accuracy.

use crate::sparse::CsrMatrix;
use num_complex::Complex64 as C64;

/// First-kind Bessel functions `J_0(x) .. J_{k_max}(x)` by Miller's
/// downward recurrence.
pub fn bessel_j_sequence(x: f64, k_max: usize) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; k_max + 1];
        out[0] = 1.0;
        return out;
    }
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    // start the recurrence well above both k_max and the turning point x
    let start = k_max + 16 + (x as usize) + ((40.0 * (1.0 + x)).sqrt() as usize);
    let mut jp1 = 0.0f64;
    let mut j = 1e-300f64;
    let mut out = vec![0.0; k_max + 1];
    let mut norm = 0.0f64;
    for k in (0..=start).rev() {
        let jm1 = (2.0 * (k as f64 + 1.0) / x) * j - jp1;
        jp1 = j;
        j = jm1;
        // renormalize to avoid overflow
        if j.abs() > 1e250 {
            jp1 /= 1e250;
            j /= 1e250;
            for v in out.iter_mut() {
                *v /= 1e250;
            }
            norm /= 1e250;
        }
        if k <= k_max {
            out[k] = j;
        }
        if k == 0 {
            norm += j;
        } else if k % 2 == 0 {
            norm += 2.0 * j;
        }
    }
    // J_0 + 2 J_2 + 2 J_4 + ... = 1
    for (k, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if sign < 0.0 && k % 2 == 1 {
            *v = -*v;
        }
    }
    out
}

/// Fixed-step Chebyshev propagator for `e^{-i H dt}` on a sparse
/// real-symmetric `H`.
pub struct ChebyshevPropagator {
    h: CsrMatrix,
    center: f64,
    halfwidth: f64,
    /// truncated coefficient table `(2 - delta_k0)(-i)^k J_k(w dt) e^{-i b dt}`
    coeffs: Vec<C64>,
    // recurrence work vectors
    t_prev: Vec<C64>,
    t_curr: Vec<C64>,
    t_next: Vec<C64>,
}

impl ChebyshevPropagator {
    /// `bounds = (e_min, e_max)` must enclose the full spectrum; Gershgorin
    /// bounds are sufficient. `dt` may be negative (reverse evolution).
    pub fn new(h: CsrMatrix, bounds: (f64, f64), dt: f64) -> Self {
        let center = 0.5 * (bounds.0 + bounds.1);
        let halfwidth = 0.5 * (bounds.1 - bounds.0) * 1.01 + 1e-12;
        let x = halfwidth * dt;
        // truncation: Bessel tail below 1e-16
        let mut k_max = (x.abs() + 20.0 * (1.0 + x.abs()).powf(1.0 / 3.0) + 20.0) as usize;
        let bessel = bessel_j_sequence(x, k_max);
        while k_max > 1 && bessel[k_max].abs() < 1e-16 && bessel[k_max - 1].abs() < 1e-16 {
            k_max -= 1;
        }
        let phase = C64::new(0.0, -center * dt).exp();
        let mi = C64::new(0.0, -1.0);
        let coeffs: Vec<C64> = (0..=k_max)
            .map(|k| {
                let pre = if k == 0 { 1.0 } else { 2.0 };
                phase * mi.powu(k as u32) * (pre * bessel[k])
            })
            .collect();
        let dim = h.dim();
        Self {
            h,
            center,
            halfwidth,
            coeffs,
            t_prev: vec![C64::new(0.0, 0.0); dim],
            t_curr: vec![C64::new(0.0, 0.0); dim],
            t_next: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// y = H~ x
    #[allow(dead_code)]
    fn apply_scaled(&self, x: &[C64], y: &mut [C64]) {
        self.h.matvec_complex(x, y);
        let inv_w = 1.0 / self.halfwidth;
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = (*yi - xi * self.center) * inv_w;
        }
    }

    /// Advance `state` by one step in place.
    pub fn step(&mut self, state: &mut [C64]) {
        let dim = state.len();
        // T_0 = psi, T_1 = H~ psi
        self.t_prev.copy_from_slice(state);
        let (t_prev, t_curr, t_next) =
            (&mut self.t_prev, &mut self.t_curr, &mut self.t_next);
        self.h.matvec_complex(t_prev, t_curr);
        let inv_w = 1.0 / self.halfwidth;
        for i in 0..dim {
            t_curr[i] = (t_curr[i] - t_prev[i] * self.center) * inv_w;
        }
        let mut acc: Vec<C64> = (0..dim)
            .map(|i| t_prev[i] * self.coeffs[0] + t_curr[i] * self.coeffs[1])
            .collect();
        for k in 2..self.coeffs.len() {
            // T_{k} = 2 H~ T_{k-1} - T_{k-2}
            self.h.matvec_complex(t_curr, t_next);
            for i in 0..dim {
                t_next[i] = (t_next[i] - t_curr[i] * self.center) * (2.0 * inv_w) - t_prev[i];
            }
            let c = self.coeffs[k];
            for i in 0..dim {
                acc[i] += t_next[i] * c;
            }
            std::mem::swap(t_prev, t_curr);
            std::mem::swap(t_curr, t_next);
        }
        state.copy_from_slice(&acc);
    }
}
