//! Fixtures shared by the benchmarks.

use nql_core::dataset::{parse_table, standardize};
use nql_core::pca::{covariance, eigendecompose};
use nql_core::{PrincipalBasis, StandardizedMatrix};

const SHIPPED: &str = include_str!("../../../data/gapminder_2005.csv");

/// The shipped table, z-scored, with its principal basis.
pub fn shipped() -> (StandardizedMatrix, PrincipalBasis) {
    let z = standardize(&parse_table(SHIPPED).expect("shipped data parses")).expect("shipped data has variance");
    let basis = eigendecompose(&covariance(&z)).expect("covariance is symmetric");
    (z, basis)
}
