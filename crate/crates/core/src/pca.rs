//! Principal components of standardized data via cyclic Jacobi rotations.

use thiserror::Error;

use crate::dataset::StandardizedMatrix;
use crate::vector::{dot, norm_sq, Point, DIM};

/// Maximum number of full Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius norm (relative to the matrix norm) considered zero.
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum PcaError {
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap}")]
    NotSymmetric { i: usize, j: usize, gap: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal norm {off})")]
    ConvergenceFailure { sweeps: usize, off: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricMatrix4 {
    entries: [[f64; DIM]; DIM],
}

impl SymmetricMatrix4 {
    pub fn new(entries: [[f64; DIM]; DIM]) -> Result<Self, PcaError> {
        for i in 0..DIM {
            for j in i + 1..DIM {
                let gap = (entries[i][j] - entries[j][i]).abs();
                let scale = entries[i][j].abs().max(entries[j][i].abs()).max(1.0);
                if gap > 1e-12 * scale {
                    return Err(PcaError::NotSymmetric { i, j, gap });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn identity() -> Self {
        Self {
            entries: std::array::from_fn(|i| std::array::from_fn(|j| f64::from(i == j))),
        }
    }

    pub fn entries(&self) -> &[[f64; DIM]; DIM] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i][j]
    }

    pub fn mul_vec(&self, v: &Point) -> Point {
        std::array::from_fn(|i| dot(&self.entries[i], v))
    }

    pub fn trace(&self) -> f64 {
        (0..DIM).map(|i| self.entries[i][i]).sum()
    }
}

/// Orthonormal eigenvectors sorted by descending eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalBasis {
    components: [Point; DIM],
    eigenvalues: [f64; DIM],
    total_variance: f64,
}

impl PrincipalBasis {
    /// Rebuilds a basis from stored parts (e.g. a model file).
    pub fn from_parts(components: [Point; DIM], eigenvalues: [f64; DIM]) -> Self {
        Self {
            components,
            eigenvalues,
            total_variance: eigenvalues.iter().sum(),
        }
    }

    pub fn components(&self) -> &[Point; DIM] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Point {
        &self.components[k]
    }

    pub fn eigenvalues(&self) -> &[f64; DIM] {
        &self.eigenvalues
    }

    pub fn total_variance(&self) -> f64 {
        self.total_variance
    }

    /// Coordinates of `point` in this basis.
    pub fn project(&self, point: &Point) -> Point {
        std::array::from_fn(|k| dot(point, &self.components[k]))
    }
}

/// Population covariance `XᵀX / N` of zero-mean rows.
pub fn covariance(matrix: &StandardizedMatrix) -> SymmetricMatrix4 {
    let n = matrix.len() as f64;
    let mut c = [[0.0; DIM]; DIM];
    for row in matrix.rows() {
        for i in 0..DIM {
            for j in i..DIM {
                c[i][j] += row[i] * row[j];
            }
        }
    }
    for i in 0..DIM {
        for j in i..DIM {
            c[i][j] /= n;
            c[j][i] = c[i][j];
        }
    }
    SymmetricMatrix4 { entries: c }
}

fn off_diagonal_norm(a: &[[f64; DIM]; DIM]) -> f64 {
    let mut sum = 0.0;
    for i in 0..DIM {
        for j in i + 1..DIM {
            sum += 2.0 * a[i][j] * a[i][j];
        }
    }
    sum.sqrt()
}

pub fn eigendecompose(cov: &SymmetricMatrix4) -> Result<PrincipalBasis, PcaError> {
    let mut a = cov.entries;
    // columns of v are the eigenvectors
    let mut v: [[f64; DIM]; DIM] = SymmetricMatrix4::identity().entries;
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= OFF_DIAGONAL_TOL * scale {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(PcaError::ConvergenceFailure { sweeps, off });
        }
        sweeps += 1;
        for p in 0..DIM {
            for q in p + 1..DIM {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..DIM {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..DIM {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..DIM).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let eigenvalues = std::array::from_fn(|k| a[order[k]][order[k]]);
    let components = std::array::from_fn(|k| {
        let mut vec: Point = std::array::from_fn(|r| v[r][order[k]]);
        let lead = (0..DIM)
            .reduce(|best, r| if vec[r].abs() > vec[best].abs() { r } else { best })
            .unwrap_or(0);
        if vec[lead] < 0.0 {
            vec.iter_mut().for_each(|x| *x = -*x);
        }
        vec
    });
    Ok(PrincipalBasis {
        components,
        eigenvalues,
        total_variance: cov.trace(),
    })
}

/// Share of total variance captured by the first `k` components.
///
/// Panics unless `1 <= k <= 4`.
pub fn explained_variance_ratio(basis: &PrincipalBasis, k: usize) -> f64 {
    assert!((1..=DIM).contains(&k), "component count {k} outside 1..={DIM}");
    basis.eigenvalues[..k].iter().sum::<f64>() / basis.total_variance
}

/// `1 − MSE / total_variance` for projection onto the PC1 line through the
/// origin. Equals `explained_variance_ratio(basis, 1)` on the data the basis
/// was computed from.
pub fn pc1_explained_variance(matrix: &StandardizedMatrix, basis: &PrincipalBasis) -> f64 {
    let axis = basis.component(0);
    let residual: f64 = matrix
        .rows()
        .iter()
        .map(|row| norm_sq(row) - dot(row, axis).powi(2))
        .sum();
    1.0 - residual / matrix.len() as f64 / matrix.total_variance()
}

/// First principal component score of every row: the linear index.
pub fn pc1_scores(matrix: &StandardizedMatrix, basis: &PrincipalBasis) -> Vec<f64> {
    component_scores(matrix, basis, 0)
}

/// Scores on component `k` (zero-based).
pub fn component_scores(matrix: &StandardizedMatrix, basis: &PrincipalBasis, k: usize) -> Vec<f64> {
    let axis = basis.component(k);
    matrix.rows().iter().map(|row| dot(row, axis)).collect()
}
