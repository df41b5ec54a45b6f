//! Small numerical utilities: least-squares line fits, Nelder-Mead descent,
//! quadratic eta -> 0 extrapolation, and a CG-based smallest-eigenvalue
//! solver for sparse symmetric matrices (shift-invert style).

use crate::sparse::CsrMatrix;

/// Least-squares straight line through `(x, y)` points.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

pub fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ybar = sy / n;
    let ss_tot: f64 = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let p = slope * a + intercept;
            (b - p) * (b - p)
        })
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    LineFit {
        slope,
        intercept,
        r_squared,
        n_points: x.len(),
    }
}

/// Nelder-Mead simplex minimization in `N` dimensions.
///
/// Runs until the simplex diameter and the value spread both fall below
/// `tol`, or `max_iter` evaluations. Good enough for the conical gap
/// functions minimized here; callers polish further when they need more.
pub fn nelder_mead<const N: usize>(
    f: impl Fn(&[f64; N]) -> f64,
    start: [f64; N],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> ([f64; N], f64) {
    let mut simplex: Vec<[f64; N]> = Vec::with_capacity(N + 1);
    simplex.push(start);
    for i in 0..N {
        let mut p = start;
        p[i] += step;
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| f(p)).collect();

    for _ in 0..max_iter {
        // order best..worst
        let mut order: Vec<usize> = (0..=N).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap());
        let best = order[0];
        let worst = order[N];
        let second_worst = order[N - 1];

        let spread = vals[worst] - vals[best];
        let mut diam: f64 = 0.0;
        for p in &simplex {
            for i in 0..N {
                diam = diam.max((p[i] - simplex[best][i]).abs());
            }
        }
        if spread < tol && diam < tol {
            break;
        }

        // centroid of all but worst
        let mut cen = [0.0; N];
        for (j, p) in simplex.iter().enumerate() {
            if j == worst {
                continue;
            }
            for i in 0..N {
                cen[i] += p[i] / N as f64;
            }
        }

        let lerp = |t: f64| -> [f64; N] {
            let mut p = [0.0; N];
            for i in 0..N {
                p[i] = cen[i] + t * (simplex[worst][i] - cen[i]);
            }
            p
        };

        let refl = lerp(-1.0);
        let f_refl = f(&refl);
        if f_refl < vals[best] {
            let exp = lerp(-2.0);
            let f_exp = f(&exp);
            if f_exp < f_refl {
                simplex[worst] = exp;
                vals[worst] = f_exp;
            } else {
                simplex[worst] = refl;
                vals[worst] = f_refl;
            }
        } else if f_refl < vals[second_worst] {
            simplex[worst] = refl;
            vals[worst] = f_refl;
        } else {
            let con = lerp(0.5);
            let f_con = f(&con);
            if f_con < vals[worst] {
                simplex[worst] = con;
                vals[worst] = f_con;
            } else {
                // shrink toward best
                let b = simplex[best];
                for j in 0..=N {
                    if j == best {
                        continue;
                    }
                    for i in 0..N {
                        simplex[j][i] = b[i] + 0.5 * (simplex[j][i] - b[i]);
                    }
                    vals[j] = f(&simplex[j]);
                }
            }
        }
    }

    let mut best = 0;
    for j in 1..=N {
        if vals[j] < vals[best] {
            best = j;
        }
    }
    (simplex[best], vals[best])
}

/// Result of a three-point quadratic extrapolation to `eta = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Extrapolated {
    pub value: f64,
    /// Difference between the extrapolated value and the smallest-eta sample;
    /// a conservative error estimate.
    pub error: f64,
}

/// Evaluate `f` at three eta values and extrapolate quadratically to zero.
pub fn eta_extrapolate(mut f: impl FnMut(f64) -> f64, etas: [f64; 3]) -> Extrapolated {
    let y = [f(etas[0]), f(etas[1]), f(etas[2])];
    eta_extrapolate_samples(etas, y)
}

/// Quadratic (Lagrange) extrapolation to `eta = 0` from three samples.
pub fn eta_extrapolate_samples(etas: [f64; 3], y: [f64; 3]) -> Extrapolated {
    let [a, b, c] = etas;
    let value = y[0] * (b * c) / ((a - b) * (a - c))
        + y[1] * (a * c) / ((b - a) * (b - c))
        + y[2] * (a * b) / ((c - a) * (c - b));
    let smallest = etas
        .iter()
        .enumerate()
        .min_by(|x, z| x.1.partial_cmp(z.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    Extrapolated {
        value,
        error: (value - y[smallest]).abs(),
    }
}

/// Eigenpair of a sparse real-symmetric matrix nearest the shift `sigma`,
/// by inverse iteration with conjugate-gradient solves on `(H - sigma)^2`.
///
/// `sigma` should sit close to (but not exactly on) the target eigenvalue:
/// the CG condition number scales as `(bandwidth / |lambda - sigma|)^2`.
pub fn eigenpair_near(
    h: &CsrMatrix,
    sigma: f64,
    tol: f64,
    max_outer: usize,
) -> (f64, Vec<f64>) {
    let n = h.dim();
    // deterministic pseudo-random start
    let mut v: Vec<f64> = (0..n)
        .map(|i| ((i as f64 + 1.0) * 0.618033988749895).fract() - 0.5)
        .collect();
    normalize(&mut v);

    let apply_shifted_sq = |x: &[f64], tmp: &mut [f64], out: &mut [f64]| {
        h.matvec(x, tmp);
        for i in 0..n {
            tmp[i] -= sigma * x[i];
        }
        h.matvec(tmp, out);
        for i in 0..n {
            out[i] -= sigma * tmp[i];
        }
    };

    let mut lambda = 0.0;
    let mut tmp = vec![0.0; n];
    let mut hv = vec![0.0; n];
    for _ in 0..max_outer {
        let sol = cg_solve(&apply_shifted_sq, &v, 1e-12, 10 * n);
        v = sol;
        normalize(&mut v);
        h.matvec(&v, &mut hv);
        let new_lambda: f64 = v.iter().zip(&hv).map(|(a, b)| a * b).sum();
        if (new_lambda - lambda).abs() < tol {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    let _ = &mut tmp;
    (lambda, v)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// Conjugate gradients for a positive-definite operator given as a closure.
fn cg_solve(
    apply: &impl Fn(&[f64], &mut [f64], &mut [f64]),
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Vec<f64> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut rs: f64 = r.iter().map(|v| v * v).sum();
    let b_norm = rs.sqrt().max(1e-300);
    for _ in 0..max_iter {
        if rs.sqrt() / b_norm < tol {
            break;
        }
        apply(&p, &mut scratch, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, c)| a * c).sum();
        let alpha = rs / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rs_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    x
}
