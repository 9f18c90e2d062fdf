use rayon::prelude::*;

/// Rows below this size are multiplied serially.
const PAR_THRESHOLD: usize = 4096;

/// Compressed sparse row matrix.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Square `n x n` matrix from `(row, col, value)` triplets; duplicates are
    /// summed in input order, so the result does not depend on thread count.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len() / 4);
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len() / 4);
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n && c < n);
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    #[inline]
    fn row_dot(&self, r: usize, x: &[f64]) -> f64 {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.col_idx[s..e]
            .iter()
            .zip(&self.vals[s..e])
            .map(|(&c, &v)| v * x[c])
            .sum()
    }

    /// `y = A x`.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        if self.n >= PAR_THRESHOLD {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(r, yr)| *yr = self.row_dot(r, x));
        } else {
            for (r, yr) in y.iter_mut().enumerate() {
                *yr = self.row_dot(r, x);
            }
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec_into(x, &mut y);
        y
    }

    /// `xᵀ A x`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
                (s..e)
                    .find(|&k| self.col_idx[k] == r)
                    .map(|k| self.vals[k])
                    .unwrap_or(0.0)
            })
            .collect()
    }

    /// Row sums (used for lumping).
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|r| self.vals[self.row_ptr[r]..self.row_ptr[r + 1]].iter().sum())
            .collect()
    }

    /// Dense copy in row-major order, for small test problems.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for (r, row) in d.iter_mut().enumerate() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row[self.col_idx[k]] += self.vals[k];
            }
        }
        d
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let (s, e) = (self.row_ptr[c], self.row_ptr[c + 1]);
                let t = (s..e)
                    .find(|&q| self.col_idx[q] == r)
                    .map(|q| self.vals[q])
                    .unwrap_or(0.0);
                worst = worst.max((self.vals[k] - t).abs());
            }
        }
        worst
    }

    /// `self + s * other`, both with arbitrary patterns.
    pub fn add_scaled(&self, s: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for (m, f) in [(self, 1.0), (other, s)] {
            for r in 0..m.n {
                for k in m.row_ptr[r]..m.row_ptr[r + 1] {
                    t.push((r, m.col_idx[k], f * m.vals[k]));
                }
            }
        }
        CsrMatrix::from_triplets(self.n, t)
    }
}

/// Serial dot product; the fixed summation order keeps results independent of
/// the thread pool.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(3, vec![(0, 0, 1.0), (2, 1, 2.0), (0, 0, 3.0), (1, 2, -1.0)]);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.matvec(&[1.0, 1.0, 1.0]), vec![4.0, -1.0, 2.0]);
        assert_eq!(a.diagonal(), vec![4.0, 0.0, 0.0]);
        assert_eq!(a.asymmetry(), 3.0);
        let b = a.add_scaled(-1.0, &a);
        assert_eq!(b.matvec(&[1.0, 2.0, 3.0]), vec![0.0; 3]);
    }
}
