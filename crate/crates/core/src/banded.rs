//! Symmetric positive-definite banded systems solved by banded Cholesky.

use thiserror::Error;

/// Pivots at or below this fraction of their diagonal entry count as zero.
pub const PIVOT_TOL: f64 = 1e-13;

#[derive(Debug, Error, PartialEq)]
pub enum BandedError {
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
}

/// Lower band of a symmetric matrix.
///
/// `band[i][d]` holds entry `(i, i - d)` for `d = 0..=bandwidth`; entries that
/// would fall left of column 0 are unused.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBanded {
    band: Vec<Vec<f64>>,
    bandwidth: usize,
}

impl SymmetricBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        Self {
            band: vec![vec![0.0; bandwidth + 1]; n],
            bandwidth,
        }
    }

    pub fn size(&self) -> usize {
        self.band.len()
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bandwidth {
            0.0
        } else {
            self.band[hi][d]
        }
    }

    /// Adds `value` to entry `(i, j)` and its mirror.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.bandwidth, "({i}, {j}) outside band");
        self.band[hi][d] += value;
    }

    /// `A x` for a vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        let w = self.bandwidth;
        (0..n)
            .map(|i| {
                let lo = i.saturating_sub(w);
                let hi = (i + w).min(n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Banded Cholesky factorization `A = L Lᵀ`.
    pub fn cholesky(&self) -> Result<BandedCholesky, BandedError> {
        let n = self.size();
        let w = self.bandwidth;
        // l[i][d] = L(i, i - d)
        let mut l = vec![vec![0.0; w + 1]; n];
        for i in 0..n {
            let first = i.saturating_sub(w);
            for j in first..=i {
                let mut sum = self.get(i, j);
                let kmin = first.max(j.saturating_sub(w));
                for k in kmin..j {
                    sum -= l[i][i - k] * l[j][j - k];
                }
                if j == i {
                    if !(sum > PIVOT_TOL * self.get(i, i).abs()) {
                        return Err(BandedError::NotPositiveDefinite { row: i, pivot: sum });
                    }
                    l[i][0] = sum.sqrt();
                } else {
                    l[i][i - j] = sum / l[j][0];
                }
            }
        }
        Ok(BandedCholesky { l, bandwidth: w })
    }
}

#[derive(Debug, Clone)]
pub struct BandedCholesky {
    l: Vec<Vec<f64>>,
    bandwidth: usize,
}

impl BandedCholesky {
    /// Solves `A x = b` by forward then backward substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.len();
        let w = self.bandwidth;
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            for k in i.saturating_sub(w)..i {
                y[i] -= self.l[i][i - k] * y[k];
            }
            y[i] /= self.l[i][0];
        }
        for i in (0..n).rev() {
            for k in i + 1..=(i + w).min(n - 1) {
                y[i] -= self.l[k][k - i] * y[k];
            }
            y[i] /= self.l[i][0];
        }
        y
    }
}
