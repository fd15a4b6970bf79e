//! Country indicator table: CSV parsing and z-value standardization.

use std::collections::HashSet;

use thiserror::Error;

use crate::vector::{Point, DIM};

/// Header of the indicator CSV, country name first.
pub const HEADER: [&str; DIM + 1] = [
    "country",
    "gdp_ppp",
    "life_expectancy",
    "tb_incidence",
    "infant_mortality",
];

/// Column index of GDP per capita in every indicator point.
pub const GDP_COLUMN: usize = 0;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("malformed row {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("duplicate country {0:?}")]
    DuplicateCountry(String),
    #[error("table needs at least 2 data rows, found {0}")]
    EmptyTable(usize),
    #[error("column {0:?} has zero variance")]
    ZeroVariance(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// One country with its four raw indicator values.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryRecord {
    pub name: String,
    /// GDP per capita at purchasing power parity, currency units per person.
    pub gdp_ppp: f64,
    /// Life expectancy at birth, years.
    pub life_expectancy: f64,
    /// New tuberculosis cases per 100 000 people.
    pub tb_incidence: f64,
    /// Infant deaths per 1000 born.
    pub infant_mortality: f64,
}

impl CountryRecord {
    pub fn new(name: impl Into<String>, values: Point) -> Self {
        Self {
            name: name.into(),
            gdp_ppp: values[0],
            life_expectancy: values[1],
            tb_incidence: values[2],
            infant_mortality: values[3],
        }
    }

    /// Indicator values in header order.
    pub fn values(&self) -> Point {
        [
            self.gdp_ppp,
            self.life_expectancy,
            self.tb_incidence,
            self.infant_mortality,
        ]
    }

    fn check(&self) -> Result<(), String> {
        if self.name.trim().is_empty() {
            return Err("empty country name".into());
        }
        let values = self.values();
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(format!("{} is not finite", HEADER[k + 1]));
        }
        if self.gdp_ppp < 0.0 || self.tb_incidence < 0.0 || self.infant_mortality < 0.0 {
            return Err("indicator values must be non-negative".into());
        }
        if self.life_expectancy <= 0.0 {
            return Err("life expectancy must be positive".into());
        }
        Ok(())
    }
}

/// Ordered list of countries with unique names and at least two rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryTable {
    columns: [String; DIM],
    records: Vec<CountryRecord>,
}

impl CountryTable {
    /// Builds a table with the standard indicator column names.
    pub fn new(records: Vec<CountryRecord>) -> Result<Self, DatasetError> {
        let columns = std::array::from_fn(|k| HEADER[k + 1].to_string());
        Self::with_columns(columns, records)
    }

    pub fn with_columns(
        columns: [String; DIM],
        records: Vec<CountryRecord>,
    ) -> Result<Self, DatasetError> {
        if records.len() < 2 {
            return Err(DatasetError::EmptyTable(records.len()));
        }
        let mut seen = HashSet::with_capacity(records.len());
        for (i, record) in records.iter().enumerate() {
            record.check().map_err(|reason| DatasetError::MalformedRow {
                line: i + 2,
                reason,
            })?;
            if !seen.insert(record.name.as_str()) {
                return Err(DatasetError::DuplicateCountry(record.name.clone()));
            }
        }
        Ok(Self { columns, records })
    }

    pub fn records(&self) -> &[CountryRecord] {
        &self.records
    }

    /// Indicator column names as they appeared in the header.
    pub fn columns(&self) -> &[String; DIM] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.records.iter().map(|r| r.name.clone()).collect()
    }

    pub fn rows(&self) -> Vec<Point> {
        self.records.iter().map(CountryRecord::values).collect()
    }
}

fn csv_error(err: csv::Error) -> DatasetError {
    match err.kind() {
        csv::ErrorKind::UnequalLengths {
            pos, expected_len, len,
        } => DatasetError::MalformedRow {
            line: pos.as_ref().map_or(0, |p| p.line() as usize),
            reason: format!("expected {expected_len} fields, found {len}"),
        },
        _ => DatasetError::Csv(err.to_string()),
    }
}

/// Reads only the header row and returns its indicator column names.
pub fn read_header(source: &str) -> Result<[String; DIM], DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source.as_bytes());
    let header = reader.headers().map_err(csv_error)?;
    if header.len() != DIM + 1 {
        return Err(DatasetError::MalformedHeader(format!(
            "expected {} columns, found {}",
            DIM + 1,
            header.len()
        )));
    }
    if header[0].trim() != HEADER[0] {
        return Err(DatasetError::MalformedHeader(format!(
            "first column must be {:?}, found {:?}",
            HEADER[0], &header[0]
        )));
    }
    Ok(std::array::from_fn(|k| header[k + 1].trim().to_string()))
}

/// Parses the indicator CSV. Row order is preserved.
pub fn parse_table(source: &str) -> Result<CountryTable, DatasetError> {
    let columns = read_header(source)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(source.as_bytes());
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map_or(i + 2, |p| p.line() as usize);
        if row.len() != DIM + 1 {
            return Err(DatasetError::MalformedRow {
                line,
                reason: format!("expected {} fields, found {}", DIM + 1, row.len()),
            });
        }
        let mut values = [0.0; DIM];
        for (k, value) in values.iter_mut().enumerate() {
            let field = row[k + 1].trim();
            *value = field.parse().map_err(|_| DatasetError::MalformedRow {
                line,
                reason: format!("cannot parse {field:?} as a number"),
            })?;
        }
        records.push(CountryRecord::new(row[0].trim(), values));
    }
    CountryTable::with_columns(columns, records)
}

/// Writes a table back in the same CSV format `parse_table` reads.
pub fn serialize_table(table: &CountryTable) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once(HEADER[0])
        .chain(table.columns.iter().map(String::as_str))
        .collect();
    writer.write_record(&header).expect("in-memory write");
    for record in &table.records {
        let mut fields = vec![record.name.clone()];
        fields.extend(record.values().iter().map(|v| v.to_string()));
        writer.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

/// Rows expressed as z-values together with the column moments used.
///
/// When built by [`standardize`] every column has mean 0 and population
/// variance 1. [`StandardizedMatrix::with_moments`] instead maps rows into the
/// z-space of another table, so those invariants hold only for the table the
/// moments came from.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedMatrix {
    values: Vec<Point>,
    column_means: Point,
    column_stds: Point,
    names: Vec<String>,
}

impl StandardizedMatrix {
    /// Standardizes raw rows with their own population moments.
    pub fn from_raw(names: Vec<String>, raw: &[Point]) -> Result<Self, DatasetError> {
        assert_eq!(names.len(), raw.len(), "one name per row");
        if raw.len() < 2 {
            return Err(DatasetError::EmptyTable(raw.len()));
        }
        let n = raw.len() as f64;
        let mut means = [0.0; DIM];
        for row in raw {
            for k in 0..DIM {
                means[k] += row[k];
            }
        }
        means.iter_mut().for_each(|m| *m /= n);
        let mut stds = [0.0; DIM];
        for row in raw {
            for k in 0..DIM {
                stds[k] += (row[k] - means[k]).powi(2);
            }
        }
        for (k, s) in stds.iter_mut().enumerate() {
            *s = (*s / n).sqrt();
            if !(*s > 0.0) || !s.is_finite() {
                return Err(DatasetError::ZeroVariance(HEADER[k + 1].to_string()));
            }
        }
        Ok(Self::with_moments(names, raw, means, stds))
    }

    /// Maps raw rows into the z-space defined by the given moments.
    pub fn with_moments(names: Vec<String>, raw: &[Point], means: Point, stds: Point) -> Self {
        assert_eq!(names.len(), raw.len(), "one name per row");
        let values = raw
            .iter()
            .map(|row| std::array::from_fn(|k| (row[k] - means[k]) / stds[k]))
            .collect();
        Self {
            values,
            column_means: means,
            column_stds: stds,
            names,
        }
    }

    /// Wraps rows that are already z-values (unit moments recorded).
    pub fn from_z_rows(names: Vec<String>, rows: Vec<Point>) -> Self {
        assert_eq!(names.len(), rows.len(), "one name per row");
        Self {
            values: rows,
            column_means: [0.0; DIM],
            column_stds: [1.0; DIM],
            names,
        }
    }

    pub fn rows(&self) -> &[Point] {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn column_means(&self) -> &Point {
        &self.column_means
    }

    pub fn column_stds(&self) -> &Point {
        &self.column_stds
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Mean squared norm of the rows; 4 for a freshly standardized table.
    pub fn total_variance(&self) -> f64 {
        self.values.iter().map(crate::vector::norm_sq).sum::<f64>() / self.values.len() as f64
    }
}

pub fn standardize(table: &CountryTable) -> Result<StandardizedMatrix, DatasetError> {
    let raw = table.rows();
    StandardizedMatrix::from_raw(table.names(), &raw).map_err(|err| match err {
        DatasetError::ZeroVariance(col) => {
            let k = HEADER[1..].iter().position(|h| *h == col).unwrap_or(0);
            DatasetError::ZeroVariance(table.columns[k].clone())
        }
        other => other,
    })
}

/// Maps a z-space point back to raw indicator units.
pub fn destandardize(matrix: &StandardizedMatrix, point: &Point) -> Point {
    std::array::from_fn(|k| point[k] * matrix.column_stds[k] + matrix.column_means[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEAD: &str = "country,gdp_ppp,life_expectancy,tb_incidence,infant_mortality\n";

    fn moments(matrix: &StandardizedMatrix) -> (Point, Point) {
        let n = matrix.len() as f64;
        let mut mean = [0.0; DIM];
        let mut var = [0.0; DIM];
        for row in matrix.rows() {
            for k in 0..DIM {
                mean[k] += row[k] / n;
            }
        }
        for row in matrix.rows() {
            for k in 0..DIM {
                var[k] += (row[k] - mean[k]).powi(2) / n;
            }
        }
        (mean, var)
    }

    #[test]
    fn parses_table_rows() {
        let src = format!("{HEAD}Luxembourg,70014,79.56,6,4\nPuerto Rico,19725,78.401,2,0\n");
        let table = parse_table(&src).unwrap();
        assert_eq!(table.len(), 2);
        let lux = &table.records()[0];
        assert_eq!(lux.name, "Luxembourg");
        assert_eq!(lux.values(), [70014.0, 79.56, 6.0, 4.0]);
        assert_eq!(table.records()[1].infant_mortality, 0.0);
    }

    #[test]
    fn quoted_names_keep_commas() {
        let src = format!("{HEAD}\"Korea, Rep.\",21342,78.585,38,5\nMalta,20410,79.245,3,5\n");
        let table = parse_table(&src).unwrap();
        assert_eq!(table.records()[0].name, "Korea, Rep.");
    }

    #[test]
    fn rejects_bad_rows() {
        let src = format!("{HEAD}X,abc,1,2,3\nY,1,1,2,3\n");
        assert!(matches!(
            parse_table(&src),
            Err(DatasetError::MalformedRow { line: 2, .. })
        ));
        let src = format!("{HEAD}X,1,1,2\nY,1,1,2,3\n");
        assert!(matches!(
            parse_table(&src),
            Err(DatasetError::MalformedRow { .. })
        ));
        let src = format!("{HEAD}X,1,1,2,3\nX,2,1,2,3\n");
        assert_eq!(
            parse_table(&src),
            Err(DatasetError::DuplicateCountry("X".into()))
        );
        assert_eq!(parse_table(HEAD), Err(DatasetError::EmptyTable(0)));
        let src = format!("{HEAD}X,1,1,2,3\n");
        assert_eq!(parse_table(&src), Err(DatasetError::EmptyTable(1)));
        let src = format!("{HEAD}X,inf,1,2,3\nY,1,1,2,3\n");
        assert!(matches!(
            parse_table(&src),
            Err(DatasetError::MalformedRow { .. })
        ));
    }

    #[test]
    fn rejects_bad_header() {
        let src = "name,a,b,c,d\nX,1,1,1,1\nY,2,2,2,2\n";
        assert!(matches!(
            parse_table(src),
            Err(DatasetError::MalformedHeader(_))
        ));
        let src = "country,a,b\nX,1,1\nY,2,2\n";
        assert!(matches!(
            parse_table(src),
            Err(DatasetError::MalformedHeader(_))
        ));
    }

    #[test]
    fn two_point_column() {
        let raw = [[0.0, 1.0, 5.0, 3.0], [2.0, 3.0, 7.0, 1.0]];
        let m = StandardizedMatrix::from_raw(vec!["a".into(), "b".into()], &raw).unwrap();
        assert_eq!(m.column_means()[0], 1.0);
        assert_eq!(m.column_stds()[0], 1.0);
        assert_eq!(m.rows()[0][0], -1.0);
        assert_eq!(m.rows()[1][0], 1.0);
    }

    #[test]
    fn standardized_column_is_unchanged() {
        let col = [-1.5, -0.5, 0.5, 1.5];
        let scale = (col.iter().map(|x| x * x).sum::<f64>() / 4.0).sqrt();
        let raw: Vec<Point> = col
            .iter()
            .enumerate()
            .map(|(i, x)| [x / scale, i as f64, (i * i) as f64, 1.0 + (i % 2) as f64])
            .collect();
        let names = (0..4).map(|i| i.to_string()).collect();
        let m = StandardizedMatrix::from_raw(names, &raw).unwrap();
        for (row, orig) in m.rows().iter().zip(&raw) {
            assert!((row[0] - orig[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_variance_names_column() {
        let src = format!("{HEAD}A,1,70,5,9\nB,2,70,6,8\n");
        let table = parse_table(&src).unwrap();
        assert_eq!(
            standardize(&table),
            Err(DatasetError::ZeroVariance("life_expectancy".into()))
        );
    }

    #[test]
    fn zero_point_maps_to_means() {
        let raw = [[1.0, 2.0, 3.0, 4.0], [3.0, 6.0, 9.0, 0.0]];
        let m = StandardizedMatrix::from_raw(vec!["a".into(), "b".into()], &raw).unwrap();
        assert_eq!(destandardize(&m, &[0.0; DIM]), *m.column_means());
    }

    fn raw_rows() -> impl Strategy<Value = Vec<Point>> {
        prop::collection::vec(prop::array::uniform4(-1e3..1e3f64), 3..40).prop_filter(
            "no constant column",
            |rows| {
                (0..DIM).all(|k| {
                    let lo = rows.iter().map(|r| r[k]).fold(f64::INFINITY, f64::min);
                    let hi = rows.iter().map(|r| r[k]).fold(f64::NEG_INFINITY, f64::max);
                    hi - lo > 1e-3
                })
            },
        )
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}")).collect()
    }

    proptest! {
        #[test]
        fn standardized_moments(rows in raw_rows()) {
            let m = StandardizedMatrix::from_raw(names(rows.len()), &rows).unwrap();
            let (mean, var) = moments(&m);
            for k in 0..DIM {
                prop_assert!(mean[k].abs() < 1e-9);
                prop_assert!((var[k] - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn affine_equivariance(rows in raw_rows(), a in 0.01..100.0f64, b in -1e3..1e3f64, col in 0..DIM) {
            let base = StandardizedMatrix::from_raw(names(rows.len()), &rows).unwrap();
            let moved: Vec<Point> = rows.iter().map(|r| {
                let mut r = *r;
                r[col] = a * r[col] + b;
                r
            }).collect();
            let other = StandardizedMatrix::from_raw(names(rows.len()), &moved).unwrap();
            for (x, y) in base.rows().iter().zip(other.rows()) {
                for k in 0..DIM {
                    prop_assert!((x[k] - y[k]).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn destandardize_round_trip(rows in raw_rows(), z in prop::array::uniform4(-3.0..3.0f64)) {
            let m = StandardizedMatrix::from_raw(names(rows.len()), &rows).unwrap();
            let raw = destandardize(&m, &z);
            let back: Point = std::array::from_fn(|k| (raw[k] - m.column_means()[k]) / m.column_stds()[k]);
            for k in 0..DIM {
                prop_assert!((back[k] - z[k]).abs() < 1e-9);
            }
        }

        #[test]
        fn serialize_parse_identity(
            rows in prop::collection::vec(
                ("[A-Za-z][A-Za-z ,.'-]{0,12}[a-z]", prop::array::uniform4(0.0..1e5f64)),
                2..12,
            )
        ) {
            let mut seen = HashSet::new();
            let records: Vec<CountryRecord> = rows
                .into_iter()
                .filter(|(name, _)| seen.insert(name.clone()))
                .map(|(name, mut v)| { v[1] += 1.0; CountryRecord::new(name, v) })
                .collect();
            prop_assume!(records.len() >= 2);
            let table = CountryTable::new(records).unwrap();
            let text = serialize_table(&table);
            prop_assert_eq!(parse_table(&text).unwrap(), table);
        }
    }
}
