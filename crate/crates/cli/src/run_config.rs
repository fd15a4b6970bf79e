use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nql_core::config::{ConfigError, KeyValues, CHAIN_KEYS};
use nql_core::{ChainConfig, DIM};

use crate::error::CliError;

/// Pair of distinct one-based principal component indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axes(pub usize, pub usize);

impl Default for Axes {
    fn default() -> Self {
        Axes(1, 2)
    }
}

impl Axes {
    pub fn new(a: usize, b: usize) -> Result<Self, String> {
        if !(1..=DIM).contains(&a) || !(1..=DIM).contains(&b) {
            return Err(format!("axes must lie in 1..={DIM}, got {a},{b}"));
        }
        if a == b {
            return Err(format!("axes must differ, got {a},{b}"));
        }
        Ok(Axes(a, b))
    }
}

impl FromStr for Axes {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s
            .split_once(',')
            .ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad axis {:?}", t.trim()))
        };
        Axes::new(num(a)?, num(b)?)
    }
}

impl fmt::Display for Axes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

/// Everything `nql fit` needs, read from a `key = value` file.
///
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_path: PathBuf,
    pub chain: ChainConfig,
    pub output_dir: PathBuf,
    pub plot_axes: Axes,
}

const RUN_KEYS: [&str; 3] = ["data_path", "output_dir", "plot.axes"];

impl RunConfig {
    pub fn parse(source: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let kv = KeyValues::parse(source)?;
        let allowed: Vec<&str> = RUN_KEYS.iter().chain(CHAIN_KEYS.iter()).copied().collect();
        kv.check_keys(&allowed)?;
        let data_path = base_dir.join(kv.require("data_path")?);
        let output_dir = base_dir.join(kv.get("output_dir").unwrap_or("out"));
        let plot_axes = match kv.get("plot.axes") {
            Some(v) => v.parse().map_err(|reason| ConfigError::InvalidValue {
                key: "plot.axes".into(),
                reason,
            })?,
            None => Axes::default(),
        };
        Ok(Self {
            data_path,
            chain: ChainConfig::from_key_values(&kv)?,
            output_dir,
            plot_axes,
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base).map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_parsing() {
        assert_eq!("1,2".parse::<Axes>(), Ok(Axes(1, 2)));
        assert_eq!(" 3 , 1 ".parse::<Axes>(), Ok(Axes(3, 1)));
        assert!("1,1".parse::<Axes>().is_err());
        assert!("0,2".parse::<Axes>().is_err());
        assert!("1,5".parse::<Axes>().is_err());
        assert!("12".parse::<Axes>().is_err());
    }

    #[test]
    fn resolves_paths_and_defaults() {
        let cfg = RunConfig::parse("data_path = d.csv\nchain.n_nodes = 7\n", Path::new("/etc/nql")).unwrap();
        assert_eq!(cfg.data_path, PathBuf::from("/etc/nql/d.csv"));
        assert_eq!(cfg.output_dir, PathBuf::from("/etc/nql/out"));
        assert_eq!(cfg.plot_axes, Axes(1, 2));
        assert_eq!(cfg.chain.n_nodes, 7);

        let abs = RunConfig::parse("data_path = /tmp/x.csv\noutput_dir = /tmp/o", Path::new("rel")).unwrap();
        assert_eq!(abs.data_path, PathBuf::from("/tmp/x.csv"));
        assert_eq!(abs.output_dir, PathBuf::from("/tmp/o"));
    }

    #[test]
    fn rejects_bad_configs() {
        let base = Path::new(".");
        assert_eq!(
            RunConfig::parse("output_dir = o", base),
            Err(ConfigError::MissingKey("data_path".into()))
        );
        assert_eq!(
            RunConfig::parse("data_path = d\ncolour = red", base),
            Err(ConfigError::UnknownKey("colour".into()))
        );
        assert!(matches!(
            RunConfig::parse("data_path = d\nplot.axes = 2,2", base),
            Err(ConfigError::InvalidValue { .. })
        ));
    }

    #[test]
    fn shipped_config_loads() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config");
        let cfg = RunConfig::load(&dir.join("default.conf")).unwrap();
        assert_eq!(cfg.chain, ChainConfig::default());
        assert!(cfg.data_path.ends_with("data/gapminder_2005.csv"));
        assert!(cfg.data_path.exists());
    }
}
