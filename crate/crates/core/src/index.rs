//! Nonlinear index: projection onto the fitted curve, orientation, ranking,
//! and comparison with the linear (PC1) index.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

use crate::chain::ElasticChain;
use crate::dataset::{StandardizedMatrix, GDP_COLUMN};
use crate::pca::{pc1_scores, PrincipalBasis};
use crate::polyline::{Polyline, PolylineError, PolylineProjection};
use crate::vector::Point;

#[derive(Debug, Error, PartialEq)]
pub enum IndexError {
    #[error("unknown country {0:?}")]
    UnknownCountry(String),
    #[error(transparent)]
    Polyline(#[from] PolylineError),
}

/// Header of the ranking TSV.
pub const TSV_HEADER: &str = "rank\tcountry\tnql_index\tlinear_rank\tlinear_index";

pub fn project_point(point: &Point, chain: &ElasticChain) -> Result<PolylineProjection, IndexError> {
    Ok(Polyline::new(chain.nodes())?.project(point))
}

/// Pearson correlation; 0 when either side is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// Average ranks (1-based) with ties sharing their mean rank.
fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let mean = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    pearson(&fractional_ranks(a), &fractional_ranks(b))
}

fn gdp_scores(matrix: &StandardizedMatrix) -> Vec<f64> {
    matrix.rows().iter().map(|row| row[GDP_COLUMN]).collect()
}

/// Arclength of every row's projection onto `chain`.
pub fn arclengths(matrix: &StandardizedMatrix, chain: &ElasticChain) -> Result<Vec<f64>, IndexError> {
    let line = chain.polyline()?;
    Ok(matrix.rows().iter().map(|row| line.project(row).arclength).collect())
}

/// Reverses the chain when arclength runs against GDP.
pub fn orient(chain: &ElasticChain, matrix: &StandardizedMatrix) -> Result<ElasticChain, IndexError> {
    let s = arclengths(matrix, chain)?;
    if pearson(&s, &gdp_scores(matrix)) < 0.0 {
        Ok(chain.reversed())
    } else {
        Ok(chain.clone())
    }
}

/// Sign (+1 or -1) that makes PC1 scores increase with GDP.
pub fn linear_orientation(matrix: &StandardizedMatrix, basis: &PrincipalBasis) -> f64 {
    if pearson(&pc1_scores(matrix, basis), &gdp_scores(matrix)) < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `2 s / L − 1`, clamped against rounding at the ends.
pub fn nql_index(projection: &PolylineProjection, total_length: f64) -> f64 {
    (2.0 * projection.arclength / total_length - 1.0).clamp(-1.0, 1.0)
}

fn by_value_then_name(names: &[String], values: &[f64], i: usize, j: usize) -> Ordering {
    values[j]
        .total_cmp(&values[i])
        .then_with(|| names[i].cmp(&names[j]))
}

/// 1-based ranks: descending value, ties by ascending name.
pub fn rank(names: &[String], values: &[f64]) -> Vec<usize> {
    assert_eq!(names.len(), values.len());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| by_value_then_name(names, values, i, j));
    let mut ranks = vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    ranks
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexRow {
    pub name: String,
    pub nql_index: f64,
    pub nql_rank: usize,
    pub linear_index: f64,
    pub linear_rank: usize,
}

/// Per-country indices and ranks, ordered by nonlinear rank.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexTable {
    rows: Vec<IndexRow>,
}

impl IndexTable {
    pub fn from_indices(names: &[String], nql: &[f64], linear: &[f64]) -> Self {
        assert!(names.len() == nql.len() && nql.len() == linear.len());
        let nql_ranks = rank(names, nql);
        let linear_ranks = rank(names, linear);
        let mut rows: Vec<IndexRow> = (0..names.len())
            .map(|i| IndexRow {
                name: names[i].clone(),
                nql_index: nql[i],
                nql_rank: nql_ranks[i],
                linear_index: linear[i],
                linear_rank: linear_ranks[i],
            })
            .collect();
        rows.sort_by_key(|r| r.nql_rank);
        Self { rows }
    }

    pub fn rows(&self) -> &[IndexRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&IndexRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Tab-separated ranking with indices to three decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(TSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.nql_rank,
                r.name,
                fmt3(r.nql_index),
                r.linear_rank,
                fmt3(r.linear_index)
            )
            .expect("write to String");
        }
        out
    }
}

/// Three decimals without a negative zero.
pub fn fmt3(value: f64) -> String {
    let s = format!("{value:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Nonlinear index of each row for an already oriented chain.
pub fn nql_indices(matrix: &StandardizedMatrix, chain: &ElasticChain) -> Result<Vec<f64>, IndexError> {
    let line = chain.polyline()?;
    let length = line.length();
    Ok(matrix
        .rows()
        .iter()
        .map(|row| nql_index(&line.project(row), length))
        .collect())
}

/// Full index table; `chain` must already be oriented.
pub fn build_index_table(
    matrix: &StandardizedMatrix,
    basis: &PrincipalBasis,
    chain: &ElasticChain,
) -> Result<IndexTable, IndexError> {
    let sign = linear_orientation(matrix, basis);
    build_index_table_with_sign(matrix, basis, chain, sign)
}

/// Same as [`build_index_table`] with a fixed linear orientation.
pub fn build_index_table_with_sign(
    matrix: &StandardizedMatrix,
    basis: &PrincipalBasis,
    chain: &ElasticChain,
    linear_sign: f64,
) -> Result<IndexTable, IndexError> {
    let nql = nql_indices(matrix, chain)?;
    let linear: Vec<f64> = pc1_scores(matrix, basis)
        .into_iter()
        .map(|s| linear_sign * s)
        .collect();
    Ok(IndexTable::from_indices(matrix.names(), &nql, &linear))
}

/// Which of two countries ranks higher under each index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairVerdict {
    pub first: String,
    pub second: String,
    pub linear_ranks: (usize, usize),
    pub nql_ranks: (usize, usize),
}

impl PairVerdict {
    pub fn first_above_linear(&self) -> bool {
        self.linear_ranks.0 < self.linear_ranks.1
    }

    pub fn first_above_nql(&self) -> bool {
        self.nql_ranks.0 < self.nql_ranks.1
    }

    /// True when the two indices order the pair differently.
    pub fn reversed(&self) -> bool {
        self.first_above_linear() != self.first_above_nql()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankShift {
    pub name: String,
    pub linear_rank: usize,
    pub nql_rank: usize,
    /// `linear_rank − nql_rank`; positive means the country moves up.
    pub shift: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    table: IndexTable,
    shifts: Vec<RankShift>,
}

impl Comparison {
    /// Shifts in nonlinear-rank order.
    pub fn shifts(&self) -> &[RankShift] {
        &self.shifts
    }

    /// Up to `k` countries with the largest |shift|, ties by name.
    pub fn largest_movers(&self, k: usize) -> Vec<&RankShift> {
        let mut movers: Vec<&RankShift> = self.shifts.iter().collect();
        movers.sort_by(|a, b| {
            b.shift
                .abs()
                .cmp(&a.shift.abs())
                .then_with(|| a.name.cmp(&b.name))
        });
        movers.truncate(k);
        movers
    }

    pub fn pair(&self, first: &str, second: &str) -> Result<PairVerdict, IndexError> {
        let lookup = |name: &str| {
            self.table
                .get(name)
                .ok_or_else(|| IndexError::UnknownCountry(name.to_string()))
        };
        let a = lookup(first)?;
        let b = lookup(second)?;
        Ok(PairVerdict {
            first: a.name.clone(),
            second: b.name.clone(),
            linear_ranks: (a.linear_rank, b.linear_rank),
            nql_ranks: (a.nql_rank, b.nql_rank),
        })
    }
}

pub fn compare_linear_nonlinear(table: &IndexTable) -> Comparison {
    let shifts = table
        .rows()
        .iter()
        .map(|r| RankShift {
            name: r.name.clone(),
            linear_rank: r.linear_rank,
            nql_rank: r.nql_rank,
            shift: r.linear_rank as i64 - r.nql_rank as i64,
        })
        .collect();
    Comparison {
        table: table.clone(),
        shifts,
    }
}
