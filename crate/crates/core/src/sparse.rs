//! Minimal CSR sparse matrix for real-symmetric lattice Hamiltonians.

use num_complex::Complex64 as C64;

/// Triplet accumulator; duplicate entries sum on build.
pub struct CsrBuilder {
    dim: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl CsrBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            triplets: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        debug_assert!(row < self.dim && col < self.dim);
        self.triplets.push((row, col, val));
    }

    pub fn n_triplets(&self) -> usize {
        self.triplets.len()
    }

    pub fn build(mut self) -> CsrMatrix {
        self.triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(self.triplets.len());
        for (r, c, v) in self.triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx = Vec::with_capacity(merged.len());
        let mut vals = Vec::with_capacity(merged.len());
        let mut current_row = 0usize;
        for (r, c, v) in merged {
            while current_row < r {
                current_row += 1;
                row_ptr[current_row] = col_idx.len();
            }
            col_idx.push(c);
            vals.push(v);
        }
        while current_row < self.dim {
            current_row += 1;
            row_ptr[current_row] = col_idx.len();
        }
        CsrMatrix {
            dim: self.dim,
            row_ptr,
            col_idx,
            vals,
        }
    }
}

/// Compressed sparse row matrix, real entries.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// y = A x, real vectors.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = 0.0;
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[i] * x[self.col_idx[i]];
            }
            y[r] = acc;
        }
    }

    /// y = A x, complex vectors (A real).
    pub fn matvec_complex(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = C64::new(0.0, 0.0);
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.col_idx[i]] * self.vals[i];
            }
            y[r] = acc;
        }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::<f64>::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.col_idx[i])] += self.vals[i];
            }
        }
        m
    }

    /// max_ij |A - A^T|; zero for symmetric construction.
    pub fn asymmetry(&self) -> f64 {
        let d = self.to_dense();
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((d[(r, c)] - d[(c, r)]).abs());
            }
        }
        worst
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut bound: f64 = 0.0;
        for r in 0..self.dim {
            let mut radius = 0.0;
            let mut diag = 0.0;
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.col_idx[i] == r {
                    diag += self.vals[i];
                } else {
                    radius += self.vals[i].abs();
                }
            }
            bound = bound.max(diag.abs() + radius);
        }
        bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_merges_duplicates() {
        let mut b = CsrBuilder::new(3);
        b.push(0, 1, 1.0);
        b.push(0, 1, 2.0);
        b.push(1, 0, 3.0);
        b.push(2, 2, -1.0);
        let m = b.build();
        let d = m.to_dense();
        assert_eq!(d[(0, 1)], 3.0);
        assert_eq!(d[(1, 0)], 3.0);
        assert_eq!(d[(2, 2)], -1.0);
        assert_eq!(d[(0, 0)], 0.0);
    }

    #[test]
    fn matvec_matches_dense() {
        let mut b = CsrBuilder::new(4);
        b.push(0, 1, 2.0);
        b.push(1, 0, 2.0);
        b.push(2, 3, -1.5);
        b.push(3, 2, -1.5);
        b.push(1, 1, 0.7);
        let m = b.build();
        let x = vec![1.0, -2.0, 0.5, 3.0];
        let mut y = vec![0.0; 4];
        m.matvec(&x, &mut y);
        let d = m.to_dense();
        for r in 0..4 {
            let want: f64 = (0..4).map(|c| d[(r, c)] * x[c]).sum();
            assert!((y[r] - want).abs() < 1e-14);
        }
    }

    #[test]
    fn gershgorin_encloses_spectrum() {
        let mut b = CsrBuilder::new(5);
        for i in 0..5 {
            b.push(i, i, i as f64 - 2.0);
            if i + 1 < 5 {
                b.push(i, i + 1, 1.0);
                b.push(i + 1, i, 1.0);
            }
        }
        let m = b.build();
        let bound = m.gershgorin_bound();
        let eig = m.to_dense().symmetric_eigen();
        for &e in eig.eigenvalues.iter() {
            assert!(e.abs() <= bound + 1e-12);
        }
    }
}
