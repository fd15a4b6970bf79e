//! Nonlinear quality-of-life index.
//!
//! The pipeline standardizes a table of country indicators to z-values, finds
//! the principal-component basis of the result, fits a one-dimensional elastic
//! principal curve (an ordered chain of nodes) through the cloud, and projects
//! every country onto that curve. The arclength of the projection, rescaled to
//! `[-1, +1]`, is the nonlinear index; the first principal component score is
//! the linear index it is compared against.
//!
//! ```no_run
//! use nql_core::{chain, dataset, index, pca};
//!
//! let source = std::fs::read_to_string("data/gapminder_2005.csv").unwrap();
//! let table = dataset::parse_table(&source).unwrap();
//! let matrix = dataset::standardize(&table).unwrap();
//! let basis = pca::eigendecompose(&pca::covariance(&matrix)).unwrap();
//! let fitted = chain::fit(&matrix, &basis, &chain::ChainConfig::default()).unwrap();
//! let oriented = index::orient(&fitted, &matrix).unwrap();
//! let table = index::build_index_table(&matrix, &basis, &oriented).unwrap();
//! for row in table.rows().iter().take(5) {
//!     println!("{} {} {:.3}", row.nql_rank, row.name, row.nql_index);
//! }
//! ```

pub mod banded;
pub mod chain;
pub mod config;
pub mod dataset;
pub mod index;
pub mod model;
pub mod pca;
pub mod polyline;
pub mod vector;

pub use chain::{ChainConfig, ElasticChain, EnergyBreakdown, FitReport, Partition};
pub use dataset::{CountryRecord, CountryTable, StandardizedMatrix};
pub use index::{IndexRow, IndexTable};
pub use model::FittedModel;
pub use pca::{PrincipalBasis, SymmetricMatrix4};
pub use polyline::PolylineProjection;
pub use vector::{Point, DIM};
