use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use nql_core::chain::{self, ChainConfig};
use nql_core::dataset::{parse_table, standardize};
use nql_core::index::{self, build_index_table_with_sign, compare_linear_nonlinear, PairVerdict, RankShift};
use nql_core::pca::{covariance, eigendecompose, explained_variance_ratio, pc1_explained_variance};
use nql_core::{CountryTable, FittedModel, IndexTable};

use crate::error::CliError;
use crate::run_config::{Axes, RunConfig};
use crate::svg;

pub const MODEL_FILE: &str = "model.txt";
pub const MOVERS: usize = 10;
pub const PAIR: (&str, &str) = ("Russia", "Egypt");

pub fn load_table(path: &Path) -> Result<CountryTable, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_table(&text).map_err(|source| CliError::Dataset {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<FittedModel, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    FittedModel::parse(&text).map_err(|source| CliError::Model {
        path: path.to_path_buf(),
        source,
    })
}

/// Standardizes `table`, fits and orients the chain, and packages the result.
pub fn fit_model(table: &CountryTable, config: &ChainConfig) -> Result<FittedModel, CliError> {
    let z = standardize(table).map_err(CliError::Standardize)?;
    let basis = eigendecompose(&covariance(&z))?;
    let report = chain::fit_logged(&z, &basis, config)?;
    let oriented = index::orient(&report.chain, &z)?;
    let linear_sign = index::linear_orientation(&z, &basis);
    Ok(FittedModel {
        columns: table.columns().clone(),
        means: *z.column_means(),
        stds: *z.column_stds(),
        basis,
        linear_sign,
        chain: oriented,
        energy_log: report.energy_log,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub model_path: PathBuf,
    pub pc1_ratio: f64,
    pub curve_ratio: f64,
    pub iterations: usize,
}

impl fmt::Display for FitOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model written to {}", self.model_path.display())?;
        writeln!(f, "iterations:               {}", self.iterations)?;
        writeln!(f, "PC1 explained variance:   {:.4}", self.pc1_ratio)?;
        writeln!(f, "curve explained variance: {:.4}", self.curve_ratio)
    }
}

pub fn cmd_fit(config: &RunConfig) -> Result<FitOutcome, CliError> {
    let table = load_table(&config.data_path)?;
    let model = fit_model(&table, &config.chain)?;
    let z = model.z_matrix(&table);
    let curve_ratio = chain::curve_explained_variance(&z, &model.chain)?;

    fs::create_dir_all(&config.output_dir).map_err(|source| CliError::UnwritablePath {
        path: config.output_dir.clone(),
        source,
    })?;
    let model_path = config.output_dir.join(MODEL_FILE);
    fs::write(&model_path, model.to_text()).map_err(|source| CliError::UnwritablePath {
        path: model_path.clone(),
        source,
    })?;
    Ok(FitOutcome {
        model_path,
        pc1_ratio: explained_variance_ratio(&model.basis, 1),
        curve_ratio,
        iterations: model.energy_log.len(),
    })
}

fn check_schema(model: &FittedModel, table: &CountryTable) -> Result<(), CliError> {
    if table.columns() != &model.columns {
        return Err(CliError::SchemaMismatch {
            expected: model.columns.to_vec(),
            found: table.columns().to_vec(),
        });
    }
    Ok(())
}

/// Linear and nonlinear indices of `table` under a fitted model.
pub fn rank_table(model: &FittedModel, table: &CountryTable) -> Result<IndexTable, CliError> {
    check_schema(model, table)?;
    let z = model.z_matrix(table);
    Ok(build_index_table_with_sign(&z, &model.basis, &model.chain, model.linear_sign)?)
}

pub fn cmd_rank(model_path: &Path, data_path: &Path) -> Result<String, CliError> {
    let model = load_model(model_path)?;
    let table = load_table(data_path)?;
    Ok(rank_table(&model, &table)?.to_tsv())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub pc1_ratio: f64,
    pub curve_ratio: f64,
    pub movers: Vec<RankShift>,
    /// Present when both countries of [`PAIR`] are in the data.
    pub pair: Option<PairVerdict>,
}

pub fn build_report(model: &FittedModel, table: &CountryTable) -> Result<Report, CliError> {
    let ranked = rank_table(model, table)?;
    let z = model.z_matrix(table);
    let comparison = compare_linear_nonlinear(&ranked);
    Ok(Report {
        pc1_ratio: pc1_explained_variance(&z, &model.basis),
        curve_ratio: chain::curve_explained_variance(&z, &model.chain)?,
        movers: comparison.largest_movers(MOVERS).into_iter().cloned().collect(),
        pair: comparison.pair(PAIR.0, PAIR.1).ok(),
    })
}

fn above(first: bool, v: &PairVerdict) -> String {
    let (hi, lo) = if first { (&v.first, &v.second) } else { (&v.second, &v.first) };
    format!("{hi} above {lo}")
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PC1 explained variance:   {:.4}", self.pc1_ratio)?;
        writeln!(f, "curve explained variance: {:.4}", self.curve_ratio)?;
        writeln!(f)?;
        writeln!(f, "largest rank shifts (linear -> nonlinear)")?;
        let width = self.movers.iter().map(|m| m.name.chars().count()).max().unwrap_or(7).max(7);
        writeln!(f, "{:<width$}  {:>6}  {:>9}  {:>5}", "country", "linear", "nonlinear", "shift")?;
        for m in &self.movers {
            writeln!(
                f,
                "{:<width$}  {:>6}  {:>9}  {:>+5}",
                m.name, m.linear_rank, m.nql_rank, m.shift
            )?;
        }
        writeln!(f)?;
        match &self.pair {
            Some(v) => {
                writeln!(f, "{} / {}", v.first, v.second)?;
                writeln!(
                    f,
                    "  linear:    {} {}, {} {}: {}",
                    v.first,
                    v.linear_ranks.0,
                    v.second,
                    v.linear_ranks.1,
                    above(v.first_above_linear(), v)
                )?;
                writeln!(
                    f,
                    "  nonlinear: {} {}, {} {}: {}",
                    v.first,
                    v.nql_ranks.0,
                    v.second,
                    v.nql_ranks.1,
                    above(v.first_above_nql(), v)
                )?;
                writeln!(f, "  order reversed: {}", if v.reversed() { "yes" } else { "no" })
            }
            None => writeln!(f, "{} / {}: not both present in the data", PAIR.0, PAIR.1),
        }
    }
}

pub fn cmd_report(model_path: &Path, data_path: &Path) -> Result<String, CliError> {
    let model = load_model(model_path)?;
    let table = load_table(data_path)?;
    Ok(build_report(&model, &table)?.to_string())
}

/// Renders the plot fully before touching `out`, so no file is left behind
/// on error.
pub fn cmd_plot(model_path: &Path, data_path: &Path, axes: Axes, out: &Path) -> Result<(), CliError> {
    let axes = Axes::new(axes.0, axes.1).map_err(CliError::Usage)?;
    let model = load_model(model_path)?;
    let table = load_table(data_path)?;
    check_schema(&model, &table)?;
    let z = model.z_matrix(&table);
    if z.is_empty() {
        return Err(CliError::Usage(format!("{}: nothing to plot", data_path.display())));
    }
    let markup = svg::render(&model, &z, axes);
    fs::write(out, markup).map_err(|source| CliError::UnwritablePath {
        path: out.to_path_buf(),
        source,
    })
}
