//! One-dimensional elastic principal curve.
//!
//! The curve is an ordered chain of nodes `y_0 .. y_{n-1}`. For a fixed
//! assignment `K` of data rows to nodes it minimizes
//!
//! ```text
//! U = (1/N) Σ_i ‖x_i − y_K(i)‖²           approximation
//!   + λ Σ_j ‖y_{j+1} − y_j‖²               stretching (edges)
//!   + μ Σ_j ‖y_{j−1} − 2 y_j + y_{j+1}‖²   bending (ribs)
//! ```
//!
//! Fitting alternates nearest-node assignment with the exact minimization of
//! `U` over node positions. Each coordinate of the minimizer solves the same
//! pentadiagonal SPD system, so one banded Cholesky factorization serves all
//! four. An annealing schedule runs the alternation once per `(λ, μ)` pair.

use thiserror::Error;

use crate::banded::SymmetricBanded;
use crate::dataset::StandardizedMatrix;
use crate::pca::{component_scores, PrincipalBasis};
use crate::polyline::{Polyline, PolylineError};
use crate::vector::{add_scaled, dist_sq, dot, norm_sq, scale, sub, Point, DIM};

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("invalid chain config: {0}")]
    InvalidConfig(String),
    #[error("node system is singular: {0}")]
    SingularSystem(String),
    #[error(transparent)]
    Polyline(#[from] PolylineError),
}

/// Hyperparameters of an elastic chain fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub n_nodes: usize,
    /// Stretching coefficient per annealing epoch.
    pub lambda_schedule: Vec<f64>,
    /// Bending coefficient per annealing epoch.
    pub mu_schedule: Vec<f64>,
    pub max_iters_per_epoch: usize,
    /// Relative change of total energy that ends an epoch.
    pub tol: f64,
    /// Unused; fitting is deterministic.
    pub seed: u64,
    /// Fraction of the PC1 score range added beyond each end of the
    /// initial chain.
    pub init_margin: f64,
}

impl Default for ChainConfig {
    /// Mirrors `config/default.conf`.
    fn default() -> Self {
        Self {
            n_nodes: 12,
            lambda_schedule: vec![1e-6],
            mu_schedule: vec![0.0446],
            max_iters_per_epoch: 100,
            tol: 1e-7,
            seed: 0,
            init_margin: 0.3,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), ChainError> {
        let bad = |msg: String| Err(ChainError::InvalidConfig(msg));
        if self.n_nodes < 3 {
            return bad(format!("n_nodes must be at least 3, got {}", self.n_nodes));
        }
        if self.lambda_schedule.is_empty() {
            return bad("schedules must not be empty".into());
        }
        if self.lambda_schedule.len() != self.mu_schedule.len() {
            return bad(format!(
                "lambda schedule has {} epochs but mu schedule has {}",
                self.lambda_schedule.len(),
                self.mu_schedule.len()
            ));
        }
        for (name, schedule) in [("lambda", &self.lambda_schedule), ("mu", &self.mu_schedule)] {
            if let Some(v) = schedule.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return bad(format!("{name} schedule entries must be positive, got {v}"));
            }
            if schedule.windows(2).any(|w| w[1] > w[0]) {
                return bad(format!("{name} schedule must be non-increasing"));
            }
        }
        if self.max_iters_per_epoch == 0 {
            return bad("max_iters_per_epoch must be positive".into());
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.init_margin.is_finite() && self.init_margin >= 0.0) {
            return bad(format!("init_margin must be non-negative, got {}", self.init_margin));
        }
        Ok(())
    }

    pub fn epochs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lambda_schedule
            .iter()
            .copied()
            .zip(self.mu_schedule.iter().copied())
    }
}

/// Ordered nodes of a principal curve in z-space.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticChain {
    nodes: Vec<Point>,
    config: ChainConfig,
}

impl ElasticChain {
    pub fn new(nodes: Vec<Point>, config: ChainConfig) -> Self {
        Self { nodes, config }
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn config(&self) -> &ChainConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Same nodes in reverse order.
    pub fn reversed(&self) -> Self {
        let mut nodes = self.nodes.clone();
        nodes.reverse();
        Self::new(nodes, self.config.clone())
    }

    pub fn polyline(&self) -> Result<Polyline<'_>, PolylineError> {
        Polyline::new(&self.nodes)
    }
}

/// Nearest-node assignment of every data row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<usize>,
    counts: Vec<usize>,
}

impl Partition {
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub approximation: f64,
    pub stretching: f64,
    pub bending: f64,
    pub total: f64,
}

/// One alternation step's energy, as written to the model file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub epoch: usize,
    pub iteration: usize,
    pub lambda: f64,
    pub mu: f64,
    pub energy: EnergyBreakdown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub chain: ElasticChain,
    pub energy_log: Vec<EnergyRecord>,
}

fn row_mean(matrix: &StandardizedMatrix) -> Point {
    let n = matrix.len() as f64;
    let mut mean = [0.0; DIM];
    for row in matrix.rows() {
        for k in 0..DIM {
            mean[k] += row[k];
        }
    }
    scale(&mean, 1.0 / n)
}

/// Equally spaced nodes along PC1 spanning the data's PC1 score range.
pub fn init_chain(matrix: &StandardizedMatrix, basis: &PrincipalBasis, n_nodes: usize) -> ElasticChain {
    init_chain_with_margin(matrix, basis, n_nodes, 0.0)
}

/// Like [`init_chain`], with the span widened by `margin` times the score
/// range on each side.
pub fn init_chain_with_margin(
    matrix: &StandardizedMatrix,
    basis: &PrincipalBasis,
    n_nodes: usize,
    margin: f64,
) -> ElasticChain {
    assert!(n_nodes >= 2, "a chain needs at least two nodes");
    let axis = basis.component(0);
    let scores = component_scores(matrix, basis, 0);
    let lo = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    let (start, end) = (lo - margin * width, hi + margin * width);
    let mean = row_mean(matrix);
    let base = add_scaled(&mean, axis, -dot(&mean, axis));
    let step = (end - start) / (n_nodes - 1) as f64;
    let nodes = (0..n_nodes)
        .map(|j| {
            let t = if j == n_nodes - 1 { end } else { start + j as f64 * step };
            add_scaled(&base, axis, t)
        })
        .collect();
    let config = ChainConfig {
        n_nodes,
        init_margin: margin,
        ..ChainConfig::default()
    };
    ElasticChain::new(nodes, config)
}

/// Maps each row to its nearest node; ties go to the lower node index.
pub fn assign(matrix: &StandardizedMatrix, nodes: &[Point]) -> Partition {
    assert!(!nodes.is_empty(), "cannot assign to an empty chain");
    let mut counts = vec![0; nodes.len()];
    let assignment = matrix
        .rows()
        .iter()
        .map(|row| {
            let mut best = (0, f64::INFINITY);
            for (j, node) in nodes.iter().enumerate() {
                let d = dist_sq(row, node);
                if d < best.1 {
                    best = (j, d);
                }
            }
            counts[best.0] += 1;
            best.0
        })
        .collect();
    Partition { assignment, counts }
}

/// Builds the shared system matrix `diag(counts)/N + λ·E + μ·B`.
pub fn system_matrix(counts: &[usize], n_rows: usize, lambda: f64, mu: f64) -> SymmetricBanded {
    let n = counts.len();
    let mut a = SymmetricBanded::zeros(n, 2);
    let inv_n = 1.0 / n_rows as f64;
    for (j, &c) in counts.iter().enumerate() {
        a.add(j, j, c as f64 * inv_n);
    }
    for j in 0..n.saturating_sub(1) {
        a.add(j, j, lambda);
        a.add(j + 1, j + 1, lambda);
        a.add(j, j + 1, -lambda);
    }
    const RIB: [f64; 3] = [1.0, -2.0, 1.0];
    for j in 1..n.saturating_sub(1) {
        for a_off in 0..3 {
            for b_off in a_off..3 {
                a.add(j - 1 + a_off, j - 1 + b_off, mu * RIB[a_off] * RIB[b_off]);
            }
        }
    }
    a
}

/// Exact minimizer of the elastic energy for a fixed partition.
pub fn solve_nodes(
    matrix: &StandardizedMatrix,
    partition: &Partition,
    lambda: f64,
    mu: f64,
    n_nodes: usize,
) -> Result<Vec<Point>, ChainError> {
    if partition.counts.len() != n_nodes {
        return Err(ChainError::InvalidConfig(format!(
            "partition has {} nodes, expected {n_nodes}",
            partition.counts.len()
        )));
    }
    if !(lambda >= 0.0 && mu >= 0.0 && lambda.is_finite() && mu.is_finite()) {
        return Err(ChainError::InvalidConfig(format!(
            "coefficients must be non-negative, got lambda={lambda} mu={mu}"
        )));
    }
    let n_rows = matrix.len();
    let inv_n = 1.0 / n_rows as f64;
    let mut rhs = vec![[0.0; DIM]; n_nodes];
    for (row, &j) in matrix.rows().iter().zip(&partition.assignment) {
        for k in 0..DIM {
            rhs[j][k] += row[k] * inv_n;
        }
    }
    let system = system_matrix(&partition.counts, n_rows, lambda, mu);
    let factor = system
        .cholesky()
        .map_err(|e| ChainError::SingularSystem(e.to_string()))?;

    let mut nodes = vec![[0.0; DIM]; n_nodes];
    for k in 0..DIM {
        let b: Vec<f64> = rhs.iter().map(|r| r[k]).collect();
        let x = factor.solve(&b);
        let ax = system.mul_vec(&x);
        let residual = ax.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        let scale = b
            .iter()
            .chain(&ax)
            .map(|v| v.abs())
            .fold(f64::MIN_POSITIVE, f64::max);
        if residual > 1e-8 * scale {
            return Err(ChainError::SingularSystem(format!(
                "relative residual {:.3e} in coordinate {k}",
                residual / scale
            )));
        }
        for (node, v) in nodes.iter_mut().zip(x) {
            node[k] = v;
        }
    }
    Ok(nodes)
}

/// Elastic energy terms of `nodes` under `partition`.
pub fn energy(
    matrix: &StandardizedMatrix,
    nodes: &[Point],
    partition: &Partition,
    lambda: f64,
    mu: f64,
) -> EnergyBreakdown {
    let approximation = matrix
        .rows()
        .iter()
        .zip(&partition.assignment)
        .map(|(row, &j)| dist_sq(row, &nodes[j]))
        .sum::<f64>()
        / matrix.len() as f64;
    let stretching = nodes.windows(2).map(|w| dist_sq(&w[0], &w[1])).sum::<f64>();
    let bending = nodes
        .windows(3)
        .map(|w| {
            let second: Point = std::array::from_fn(|k| w[0][k] - 2.0 * w[1][k] + w[2][k]);
            norm_sq(&second)
        })
        .sum::<f64>();
    EnergyBreakdown {
        approximation,
        stretching,
        bending,
        total: approximation + lambda * stretching + mu * bending,
    }
}

/// Fits a chain starting from PC1, returning only the chain.
pub fn fit(
    matrix: &StandardizedMatrix,
    basis: &PrincipalBasis,
    config: &ChainConfig,
) -> Result<ElasticChain, ChainError> {
    fit_logged(matrix, basis, config).map(|report| report.chain)
}

/// Fits a chain starting from PC1 and keeps the per-iteration energies.
pub fn fit_logged(
    matrix: &StandardizedMatrix,
    basis: &PrincipalBasis,
    config: &ChainConfig,
) -> Result<FitReport, ChainError> {
    config.validate()?;
    let init = init_chain_with_margin(matrix, basis, config.n_nodes, config.init_margin);
    fit_from(matrix, init.nodes().to_vec(), config)
}

/// Runs the annealed alternation from the given initial nodes.
pub fn fit_from(
    matrix: &StandardizedMatrix,
    initial: Vec<Point>,
    config: &ChainConfig,
) -> Result<FitReport, ChainError> {
    config.validate()?;
    if initial.len() != config.n_nodes {
        return Err(ChainError::InvalidConfig(format!(
            "initial chain has {} nodes, config says {}",
            initial.len(),
            config.n_nodes
        )));
    }
    let mut nodes = initial;
    let mut energy_log = Vec::new();
    for (epoch, (lambda, mu)) in config.epochs().enumerate() {
        let mut previous: Option<f64> = None;
        for iteration in 0..config.max_iters_per_epoch {
            let partition = assign(matrix, &nodes);
            nodes = solve_nodes(matrix, &partition, lambda, mu, config.n_nodes)?;
            let e = energy(matrix, &nodes, &partition, lambda, mu);
            energy_log.push(EnergyRecord {
                epoch,
                iteration,
                lambda,
                mu,
                energy: e,
            });
            if let Some(prev) = previous {
                let change = (prev - e.total).abs() / prev.abs().max(f64::MIN_POSITIVE);
                if change < config.tol {
                    break;
                }
            }
            previous = Some(e.total);
        }
    }
    Ok(FitReport {
        chain: ElasticChain::new(nodes, config.clone()),
        energy_log,
    })
}

/// Mean squared distance from each row to its closest point on the curve.
pub fn projection_mse(matrix: &StandardizedMatrix, chain: &ElasticChain) -> Result<f64, ChainError> {
    let line = chain.polyline()?;
    let sum: f64 = matrix
        .rows()
        .iter()
        .map(|row| line.project(row).distance.powi(2))
        .sum();
    Ok(sum / matrix.len() as f64)
}

/// `1 − MSE_proj / total_variance` with segment-nearest projection.
pub fn curve_explained_variance(matrix: &StandardizedMatrix, chain: &ElasticChain) -> Result<f64, ChainError> {
    Ok(1.0 - projection_mse(matrix, chain)? / matrix.total_variance())
}

/// Largest distance between corresponding nodes of two chains.
pub fn max_node_gap(a: &[Point], b: &[Point]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| norm_sq(&sub(x, y)).sqrt())
        .fold(0.0, f64::max)
}
