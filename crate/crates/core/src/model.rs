//! Versioned plain-text model file written by `nql fit`.
//!
//! Sections appear in a fixed order, each introduced by its name (and a row
//! count where the length varies). Floats are written with Rust's shortest
//! round-trip formatting, so a reloaded model is bit-identical.
//!
//! ```text
//! NQL-MODEL 1
//! COLUMNS
//! gdp_ppp	life_expectancy	tb_incidence	infant_mortality
//! MEANS
//! ...4 floats
//! STDS
//! ...4 floats
//! EIGENVALUES
//! ...4 floats
//! BASIS
//! ...4 rows of 4 floats, one component per row
//! LINEAR_SIGN
//! 1
//! CONFIG 7
//! chain.n_nodes = 12
//! ...
//! NODES 12
//! ...one node per row
//! ENERGY_LOG 31
//! epoch iteration lambda mu approximation stretching bending total
//! ...
//! END
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::chain::{ChainConfig, ElasticChain, EnergyBreakdown, EnergyRecord};
use crate::config::KeyValues;
use crate::dataset::{CountryTable, StandardizedMatrix};
use crate::pca::PrincipalBasis;
use crate::vector::{Point, DIM};

pub const MAGIC: &str = "NQL-MODEL";
pub const VERSION: u32 = 1;

const ENERGY_HEADER: &str = "epoch iteration lambda mu approximation stretching bending total";

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("model line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("unsupported model version {0}")]
    Version(u32),
}

/// Everything needed to rank new data against a fitted curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub columns: [String; DIM],
    pub means: Point,
    pub stds: Point,
    pub basis: PrincipalBasis,
    /// Sign applied to PC1 scores so the linear index increases with GDP.
    pub linear_sign: f64,
    /// Oriented chain.
    pub chain: ElasticChain,
    pub energy_log: Vec<EnergyRecord>,
}

fn row(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

impl FittedModel {
    /// Rows of `table` in this model's z-space.
    pub fn z_matrix(&self, table: &CountryTable) -> StandardizedMatrix {
        StandardizedMatrix::with_moments(table.names(), &table.rows(), self.means, self.stds)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("{MAGIC} {VERSION}"));
        line("COLUMNS".into());
        line(self.columns.join("\t"));
        line("MEANS".into());
        line(row(&self.means));
        line("STDS".into());
        line(row(&self.stds));
        line("EIGENVALUES".into());
        line(row(self.basis.eigenvalues()));
        line("BASIS".into());
        for c in self.basis.components() {
            line(row(c));
        }
        line("LINEAR_SIGN".into());
        line(self.linear_sign.to_string());
        let kv = self.chain.config().to_key_values().render();
        line(format!("CONFIG {}", kv.lines().count()));
        for l in kv.lines() {
            line(l.to_string());
        }
        line(format!("NODES {}", self.chain.len()));
        for n in self.chain.nodes() {
            line(row(n));
        }
        line(format!("ENERGY_LOG {}", self.energy_log.len()));
        line(ENERGY_HEADER.into());
        for r in &self.energy_log {
            let e = &r.energy;
            line(format!(
                "{} {} {} {} {} {} {} {}",
                r.epoch, r.iteration, r.lambda, r.mu, e.approximation, e.stretching, e.bending, e.total
            ));
        }
        line("END".into());
        out
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut reader = Reader {
            lines: text.lines().enumerate(),
            last: 0,
        };
        let magic = reader.next_line()?;
        let version = match magic.split_once(' ') {
            Some((MAGIC, v)) => v.trim().parse::<u32>().map_err(|_| reader.error("bad version"))?,
            _ => return Err(reader.error(format!("expected {MAGIC:?} header"))),
        };
        if version != VERSION {
            return Err(ModelError::Version(version));
        }

        reader.expect("COLUMNS")?;
        let cols: Vec<String> = reader.next_line()?.split('\t').map(str::to_string).collect();
        let columns: [String; DIM] = cols
            .try_into()
            .map_err(|_| reader.error(format!("expected {DIM} tab-separated columns")))?;
        reader.expect("MEANS")?;
        let means = reader.point()?;
        reader.expect("STDS")?;
        let stds = reader.point()?;
        reader.expect("EIGENVALUES")?;
        let eigenvalues = reader.point()?;
        reader.expect("BASIS")?;
        let mut components = [[0.0; DIM]; DIM];
        for c in components.iter_mut() {
            *c = reader.point()?;
        }
        reader.expect("LINEAR_SIGN")?;
        let linear_sign = reader.floats(1)?[0];

        let n_config = reader.counted("CONFIG")?;
        let mut kv_text = String::new();
        for _ in 0..n_config {
            writeln!(kv_text, "{}", reader.next_line()?).expect("write to String");
        }
        let config = ChainConfig::from_key_values(
            &KeyValues::parse(&kv_text).map_err(|e| reader.error(e.to_string()))?,
        )
        .map_err(|e| reader.error(e.to_string()))?;

        let n_nodes = reader.counted("NODES")?;
        let nodes = (0..n_nodes).map(|_| reader.point()).collect::<Result<Vec<_>, _>>()?;

        let n_log = reader.counted("ENERGY_LOG")?;
        reader.expect(ENERGY_HEADER)?;
        let mut energy_log = Vec::with_capacity(n_log);
        for _ in 0..n_log {
            let line = reader.next_line()?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 8 {
                return Err(reader.error("energy row needs 8 fields"));
            }
            let int = |s: &str| s.parse::<usize>().map_err(|_| reader.error(format!("bad integer {s:?}")));
            let float = |s: &str| s.parse::<f64>().map_err(|_| reader.error(format!("bad number {s:?}")));
            energy_log.push(EnergyRecord {
                epoch: int(fields[0])?,
                iteration: int(fields[1])?,
                lambda: float(fields[2])?,
                mu: float(fields[3])?,
                energy: EnergyBreakdown {
                    approximation: float(fields[4])?,
                    stretching: float(fields[5])?,
                    bending: float(fields[6])?,
                    total: float(fields[7])?,
                },
            });
        }
        reader.expect("END")?;

        Ok(Self {
            columns,
            means,
            stds,
            basis: PrincipalBasis::from_parts(components, eigenvalues),
            linear_sign,
            chain: ElasticChain::new(nodes, config),
            energy_log,
        })
    }
}

struct Reader<'a, I: Iterator<Item = (usize, &'a str)>> {
    lines: I,
    last: usize,
}

impl<'a, I: Iterator<Item = (usize, &'a str)>> Reader<'a, I> {
    fn error(&self, reason: impl Into<String>) -> ModelError {
        ModelError::Format {
            line: self.last,
            reason: reason.into(),
        }
    }

    fn next_line(&mut self) -> Result<&'a str, ModelError> {
        match self.lines.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok(l)
            }
            None => Err(ModelError::Format {
                line: self.last + 1,
                reason: "unexpected end of file".into(),
            }),
        }
    }

    fn expect(&mut self, tag: &str) -> Result<(), ModelError> {
        let line = self.next_line()?;
        if line.trim() == tag {
            Ok(())
        } else {
            Err(self.error(format!("expected {tag:?}, found {line:?}")))
        }
    }

    fn counted(&mut self, tag: &str) -> Result<usize, ModelError> {
        let line = self.next_line()?;
        match line.split_once(' ') {
            Some((t, n)) if t == tag => n
                .trim()
                .parse()
                .map_err(|_| self.error(format!("bad count {n:?}"))),
            _ => Err(self.error(format!("expected `{tag} <count>`, found {line:?}"))),
        }
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f64>, ModelError> {
        let line = self.next_line()?;
        let values = line
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| self.error(format!("bad number {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != n {
            return Err(self.error(format!("expected {n} numbers, found {}", values.len())));
        }
        Ok(values)
    }

    fn point(&mut self) -> Result<Point, ModelError> {
        let v = self.floats(DIM)?;
        Ok(std::array::from_fn(|k| v[k]))
    }
}
