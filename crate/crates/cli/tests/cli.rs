use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nql_cli::{fit_model, rank_table};
use nql_core::dataset::{parse_table, serialize_table};
use nql_core::{ChainConfig, CountryRecord, CountryTable};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};
use tempfile::TempDir;

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn shipped_data() -> PathBuf {
    repo_file("data/gapminder_2005.csv")
}

fn nql(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nql"))
        .args(args)
        .output()
        .expect("run nql")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a config pointing at `data` and fits it; returns the model path.
fn fit_into(dir: &Path, data: &Path, extra: &str) -> PathBuf {
    let conf = dir.join("run.conf");
    fs::write(&conf, format!("data_path = {}\noutput_dir = out\n{extra}", s(data))).unwrap();
    let out = nql(&["fit", "--config", s(&conf)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("out/model.txt")
}

fn shipped_model(dir: &Path) -> PathBuf {
    let conf = dir.join("run.conf");
    let text = fs::read_to_string(repo_file("config/default.conf"))
        .unwrap()
        .replace("../data/gapminder_2005.csv", s(&shipped_data()))
        .replace("../out", "out");
    fs::write(&conf, text).unwrap();
    let out = nql(&["fit", "--config", s(&conf)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join("out/model.txt")
}

#[test]
fn fit_reports_curve_gain_on_shipped_data() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, format!("data_path = {}\noutput_dir = out\n", s(&shipped_data()))).unwrap();
    let out = nql(&["fit", "--config", s(&conf)]);
    assert!(out.status.success());
    let text = stdout(&out);
    let curve: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("curve explained variance:"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!(curve >= 0.84, "{curve}");
    assert!(dir.path().join("out/model.txt").exists());
}

#[test]
fn missing_data_file_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "data_path = no_such.csv\n").unwrap();
    let out = nql(&["fit", "--config", s(&conf)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no_such.csv"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);
}

#[test]
fn bad_config_and_usage_exit_2() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "data_path = x.csv\nchain.n_nodes = 1\n").unwrap();
    assert_eq!(nql(&["fit", "--config", s(&conf)]).status.code(), Some(2));
    assert_eq!(nql(&["fit"]).status.code(), Some(2));
    assert_eq!(nql(&["launch"]).status.code(), Some(2));
}

#[test]
fn constant_column_is_a_computation_error() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("flat.csv");
    fs::write(
        &data,
        "country,gdp_ppp,life_expectancy,tb_incidence,infant_mortality\nA,1,70,5,5\nB,2,70,6,4\nC,3,70,7,3\n",
    )
    .unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, format!("data_path = {}\n", s(&data))).unwrap();
    let out = nql(&["fit", "--config", s(&conf)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("out/model.txt").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let ma = shipped_model(a.path());
    let mb = shipped_model(b.path());
    assert_eq!(fs::read(&ma).unwrap(), fs::read(&mb).unwrap());
    let data = shipped_data();
    let ra = nql(&["rank", "--model", s(&ma), "--data", s(&data)]);
    let rb = nql(&["rank", "--model", s(&mb), "--data", s(&data)]);
    assert!(ra.status.success());
    assert_eq!(ra.stdout, rb.stdout);
}

#[test]
fn reloaded_model_ranks_like_the_in_memory_one() {
    let dir = TempDir::new().unwrap();
    let model = shipped_model(dir.path());
    let table = parse_table(&fs::read_to_string(shipped_data()).unwrap()).unwrap();
    let fresh = fit_model(&table, &ChainConfig::default()).unwrap();
    let expected = rank_table(&fresh, &table).unwrap().to_tsv();
    let out = nql(&["rank", "--model", s(&model), "--data", s(&shipped_data())]);
    assert_eq!(stdout(&out), expected);
}

#[test]
fn ranking_extremes_and_format() {
    let dir = TempDir::new().unwrap();
    let model = shipped_model(dir.path());
    let out = nql(&["rank", "--model", s(&model), "--data", s(&shipped_data())]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rank\tcountry\tnql_index\tlinear_rank\tlinear_index");
    assert_eq!(lines.len(), 172);
    assert!(lines[1].starts_with("1\tLuxembourg\t"));
    assert!(lines[171].starts_with("171\tSwaziland\t"));
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 5);
        for f in [fields[2], fields[4]] {
            assert_eq!(f.split('.').nth(1).map(str::len), Some(3), "{f}");
        }
    }
}

#[test]
fn two_country_dataset_ranks_one_and_two() {
    let dir = TempDir::new().unwrap();
    let model = shipped_model(dir.path());
    let full = fs::read_to_string(shipped_data()).unwrap();
    let mut lines = full.lines();
    let header = lines.next().unwrap();
    let pick: Vec<&str> = lines
        .filter(|l| l.starts_with("Norway,") || l.starts_with("Chad,"))
        .collect();
    let data = dir.path().join("two.csv");
    fs::write(&data, format!("{header}\n{}\n", pick.join("\n"))).unwrap();
    let out = nql(&["rank", "--model", s(&model), "--data", s(&data)]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("1\tNorway\t"));
    assert!(rows[1].starts_with("2\tChad\t"));
}

#[test]
fn schema_mismatch_is_rejected() {
    let dir = TempDir::new().unwrap();
    let model = shipped_model(dir.path());
    let data = dir.path().join("other.csv");
    fs::write(&data, "country,gdp,life,tb,infant\nA,1,70,5,5\nB,2,60,6,4\n").unwrap();
    for cmd in ["rank", "report"] {
        let out = nql(&[cmd, "--model", s(&model), "--data", s(&data)]);
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&out.stderr).contains("schema mismatch"));
    }
}

#[test]
fn corrupt_model_exits_2() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("model.txt");
    fs::write(&model, "NQL-MODEL 1\nCOLUMNS\n").unwrap();
    let out = nql(&["rank", "--model", s(&model), "--data", s(&shipped_data())]);
    assert_eq!(out.status.code(), Some(2));
}

fn ratio(report: &str, label: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(label))
        .unwrap()
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn report_on_shipped_data() {
    let dir = TempDir::new().unwrap();
    let model = shipped_model(dir.path());
    let out = nql(&["report", "--model", s(&model), "--data", s(&shipped_data())]);
    assert!(out.status.success());
    let text = stdout(&out);
    let pc1 = ratio(&text, "PC1 explained variance:");
    let curve = ratio(&text, "curve explained variance:");
    assert!((0.74..=0.78).contains(&pc1), "{pc1}");
    assert!(curve >= 0.84, "{curve}");
    assert_eq!(
        text.lines()
            .skip_while(|l| !l.starts_with("largest rank shifts"))
            .skip(2)
            .take_while(|l| !l.is_empty())
            .count(),
        10
    );
    let nonlinear = text.lines().find(|l| l.trim_start().starts_with("nonlinear:")).unwrap();
    assert!(nonlinear.ends_with("Russia above Egypt"), "{nonlinear}");
}

#[test]
fn report_on_linear_data_shows_no_gain() {
    let mut rng = StdRng::seed_from_u64(4);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let records: Vec<CountryRecord> = (0..150)
        .map(|i| {
            let t: f64 = rng.random_range(0.0..1.0);
            let clean = [1000.0 + 40000.0 * t, 50.0 + 30.0 * t, 300.0 - 250.0 * t, 120.0 - 100.0 * t];
            let values = std::array::from_fn(|k| clean[k] * (1.0 + noise.sample(&mut rng)));
            CountryRecord::new(format!("c{i:03}"), values)
        })
        .collect();
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("linear.csv");
    fs::write(&data, serialize_table(&CountryTable::new(records).unwrap())).unwrap();
    let model = fit_into(dir.path(), &data, "");
    let out = nql(&["report", "--model", s(&model), "--data", s(&data)]);
    let text = stdout(&out);
    let pc1 = ratio(&text, "PC1 explained variance:");
    let curve = ratio(&text, "curve explained variance:");
    assert!((pc1 - curve).abs() <= 0.01, "{pc1} vs {curve}");
    assert!(text.contains("Russia / Egypt: not both present"));
}

#[test]
fn plot_contains_every_country_and_the_chain() {
    let dir = TempDir::new().unwrap();
    let model = shipped_model(dir.path());
    let svg = dir.path().join("plot.svg");
    let data = shipped_data();
    let args = ["plot", "--model", s(&model), "--data", s(&data), "--axes", "1,2", "--out", s(&svg)];
    assert!(nql(&args).status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.contains(r#"viewBox="0 0 800 600""#));
    assert_eq!(text.matches("<circle").count(), 171);
    assert_eq!(text.matches("<polyline").count(), 1);
    let poly = text.lines().find(|l| l.starts_with("<polyline")).unwrap();
    assert!(poly.contains(r#"stroke="red""#));
    let points = poly.split('"').nth(1).unwrap().split_whitespace().count();
    assert_eq!(points, ChainConfig::default().n_nodes);
    assert!(text.contains("PC1 (76.8%)"));
    assert!(text.contains("PC2 ("));

    let again = dir.path().join("again.svg");
    let args2 = ["plot", "--model", s(&model), "--data", s(&data), "--out", s(&again)];
    assert!(nql(&args2).status.success());
    assert_eq!(fs::read(&svg).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn plot_rejects_bad_axes_and_empty_data_without_writing() {
    let dir = TempDir::new().unwrap();
    let model = shipped_model(dir.path());
    let svg = dir.path().join("bad.svg");
    for axes in ["1,1", "0,2", "2,5"] {
        let out = nql(&["plot", "--model", s(&model), "--data", s(&shipped_data()), "--axes", axes, "--out", s(&svg)]);
        assert_eq!(out.status.code(), Some(2), "{axes}");
        assert!(!svg.exists());
    }
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "country,gdp_ppp,life_expectancy,tb_incidence,infant_mortality\n").unwrap();
    let out = nql(&["plot", "--model", s(&model), "--data", s(&empty), "--out", s(&svg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!svg.exists());

    let nowhere = dir.path().join("missing_dir/plot.svg");
    let out = nql(&["plot", "--model", s(&model), "--data", s(&shipped_data()), "--out", s(&nowhere)]);
    assert_eq!(out.status.code(), Some(2));
}
