//! Measurement records and their CSV file format.
//!
//! ```text
//! # kind = wigner_cut
//! # modes = 1
//! # theta0 = 0.02
//! setting,value,sigma
//! -0.04,0.31,0.02
//! ```
//!
//! Histogram pairs use the columns `setting,value_p,sigma_p,value_q,sigma_q`
//! with bins `0..n` as settings. Numbers are written in shortest
//! round-trip form, so write → read is lossless.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SERIES_HEADER: &str = "setting,value,sigma";
pub const HISTOGRAM_HEADER: &str = "setting,value_p,sigma_p,value_q,sigma_q";

/// Tolerance (in grid units) for settings to sit on the `n θ₀` grid.
pub const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    WignerCut,
    ParityFringe,
    FockHistogramPair,
    VarianceRecord,
}

impl RecordKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::WignerCut => "wigner_cut",
            RecordKind::ParityFringe => "parity_fringe",
            RecordKind::FockHistogramPair => "fock_histogram_pair",
            RecordKind::VarianceRecord => "variance_record",
        }
    }

    fn required_meta(self) -> &'static [&'static str] {
        match self {
            RecordKind::WignerCut => &["modes"],
            RecordKind::ParityFringe => &["particles"],
            RecordKind::FockHistogramPair => &["delta_theta"],
            RecordKind::VarianceRecord => &["system"],
        }
    }

    fn header(self) -> &'static str {
        match self {
            RecordKind::FockHistogramPair => HISTOGRAM_HEADER,
            _ => SERIES_HEADER,
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wigner_cut" => Ok(RecordKind::WignerCut),
            "parity_fringe" => Ok(RecordKind::ParityFringe),
            "fock_histogram_pair" => Ok(RecordKind::FockHistogramPair),
            "variance_record" => Ok(RecordKind::VarianceRecord),
            other => Err(Error::Validation(format!("unknown record kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub setting: f64,
    pub value: f64,
    pub sigma: f64,
}

impl Sample {
    pub fn new(setting: f64, value: f64, sigma: f64) -> Self {
        Self {
            setting,
            value,
            sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub kind: RecordKind,
    /// Series samples, or the `p` histogram for histogram pairs.
    pub samples: Vec<Sample>,
    /// The `q` histogram (same bins) for histogram pairs.
    pub second: Option<Vec<Sample>>,
    pub meta: BTreeMap<String, String>,
}

impl MeasurementRecord {
    /// A validated series record (`wigner_cut`, `parity_fringe`, `variance_record`).
    pub fn series(
        kind: RecordKind,
        samples: Vec<Sample>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        let rec = Self {
            kind,
            samples,
            second: None,
            meta,
        };
        rec.validate()?;
        Ok(rec)
    }

    /// A validated histogram pair.
    pub fn histogram_pair(
        p: Vec<Sample>,
        q: Vec<Sample>,
        meta: BTreeMap<String, String>,
    ) -> Result<Self> {
        let rec = Self {
            kind: RecordKind::FockHistogramPair,
            samples: p,
            second: Some(q),
            meta,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn meta_str(&self, key: &str) -> Option<&str> {
        self.meta.get(key).map(String::as_str)
    }

    /// Numeric meta value; errors if present but malformed.
    pub fn meta_f64(&self, key: &str) -> Result<Option<f64>> {
        match self.meta.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Some)
                .ok_or_else(|| Error::Validation(format!("meta '{key}' = '{v}' is not a finite number"))),
        }
    }

    pub fn meta_usize(&self, key: &str) -> Result<Option<usize>> {
        match self.meta.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<usize>()
                .map(Some)
                .map_err(|_| Error::Validation(format!("meta '{key}' = '{v}' is not a count"))),
        }
    }

    pub fn settings(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.setting).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    pub fn sigmas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.sigma).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for key in self.kind.required_meta() {
            if !self.meta.contains_key(*key) {
                return Err(Error::Validation(format!(
                    "{} record requires meta '{key}'",
                    self.kind
                )));
            }
        }
        for (k, v) in &self.meta {
            if k.is_empty() || k.contains('=') || k.contains('\n') || k.trim() != k {
                return Err(Error::Validation(format!("invalid meta key '{k}'")));
            }
            if v.contains('\n') || v.trim() != v {
                return Err(Error::Validation(format!("invalid meta value for '{k}'")));
            }
        }
        if let Some(kind) = self.meta.get("kind") {
            if kind != self.kind.as_str() {
                return Err(Error::Validation(format!(
                    "meta kind '{kind}' disagrees with record kind {}",
                    self.kind
                )));
            }
        }
        check_samples(&self.samples)?;
        match (self.kind, &self.second) {
            (RecordKind::FockHistogramPair, Some(q)) => {
                check_samples(q)?;
                if q.len() != self.samples.len() {
                    return Err(Error::Validation("histogram columns differ in length".into()));
                }
                for (i, (a, b)) in self.samples.iter().zip(q).enumerate() {
                    if a.setting != i as f64 || b.setting != i as f64 {
                        return Err(Error::Validation(format!(
                            "histogram bins must be 0..n (row {i})"
                        )));
                    }
                }
                let dt = self.meta_f64("delta_theta")?.unwrap_or(0.0);
                if dt == 0.0 {
                    return Err(Error::Validation("delta_theta must be nonzero".into()));
                }
            }
            (RecordKind::FockHistogramPair, None) => {
                return Err(Error::Validation("histogram pair without q column".into()))
            }
            (_, Some(_)) => {
                return Err(Error::Validation(format!(
                    "{} record cannot carry a second column group",
                    self.kind
                )))
            }
            (_, None) => {}
        }
        if let Some(t0) = self.meta_f64("theta0")? {
            if !(t0 > 0.0) {
                return Err(Error::Validation("theta0 must be positive".into()));
            }
            for s in &self.samples {
                let n = s.setting / t0;
                if (n - n.round()).abs() > GRID_TOL * n.abs().max(1.0) {
                    return Err(Error::Validation(format!(
                        "setting {} is not a multiple of theta0 = {t0}",
                        s.setting
                    )));
                }
            }
        }
        for key in ["modes", "particles", "seed"] {
            if key == "seed" {
                if let Some(v) = self.meta.get(key) {
                    v.parse::<u64>()
                        .map_err(|_| Error::Validation(format!("seed '{v}' is not an integer")))?;
                }
            } else {
                self.meta_usize(key)?;
            }
        }
        Ok(())
    }

    /// CSV text (meta block, header, rows).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# kind = {}\n", self.kind));
        for (k, v) in &self.meta {
            if k != "kind" {
                out.push_str(&format!("# {k} = {v}\n"));
            }
        }
        out.push_str(self.kind.header());
        out.push('\n');
        match &self.second {
            Some(q) => {
                for (a, b) in self.samples.iter().zip(q) {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        a.setting, a.value, a.sigma, b.value, b.sigma
                    ));
                }
            }
            None => {
                for s in &self.samples {
                    out.push_str(&format!("{},{},{}\n", s.setting, s.value, s.sigma));
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        parse_csv(text)
    }
}

fn check_samples(samples: &[Sample]) -> Result<()> {
    for (i, s) in samples.iter().enumerate() {
        if !s.setting.is_finite() || !s.value.is_finite() || !s.sigma.is_finite() {
            return Err(Error::Validation(format!("non-finite entry in row {i}")));
        }
        if s.sigma < 0.0 {
            return Err(Error::Validation(format!("negative sigma in row {i}")));
        }
        if i > 0 && !(s.setting > samples[i - 1].setting) {
            return Err(Error::Validation(format!(
                "settings not strictly increasing at row {i} ({} after {})",
                s.setting,
                samples[i - 1].setting
            )));
        }
    }
    Ok(())
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn parse_csv(text: &str) -> Result<MeasurementRecord> {
    let mut meta = BTreeMap::new();
    let mut header: Option<(usize, Vec<&str>)> = None;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if header.is_some() {
                return Err(parse_error(line_no, 1, "meta line after the column header"));
            }
            let (k, v) = rest
                .split_once('=')
                .ok_or_else(|| parse_error(line_no, 1, "meta line must read '# key = value'"))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(parse_error(line_no, 1, "empty meta key"));
            }
            if meta.insert(k.to_string(), v.to_string()).is_some() {
                return Err(parse_error(line_no, 1, format!("duplicate meta key '{k}'")));
            }
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match &header {
            None => header = Some((line_no, cells)),
            Some((_, cols)) => {
                if cells.len() != cols.len() {
                    return Err(parse_error(
                        line_no,
                        cells.len().min(cols.len()) + 1,
                        format!("expected {} cells, found {}", cols.len(), cells.len()),
                    ));
                }
                let mut values = Vec::with_capacity(cells.len());
                for (c, cell) in cells.iter().enumerate() {
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| parse_error(line_no, c + 1, format!("'{cell}' is not a number")))?;
                    if !v.is_finite() {
                        return Err(parse_error(line_no, c + 1, format!("'{cell}' is not finite")));
                    }
                    values.push(v);
                }
                rows.push((line_no, values));
            }
        }
    }
    let kind: RecordKind = meta
        .get("kind")
        .ok_or_else(|| parse_error(1, 1, "missing '# kind = ...' meta line"))?
        .parse()
        .map_err(|e: Error| parse_error(1, 1, e.to_string()))?;
    meta.remove("kind");
    let (hline, cols) = match header {
        Some(h) => h,
        None if kind == RecordKind::VarianceRecord => (0, SERIES_HEADER.split(',').collect()),
        None => return Err(parse_error(text.lines().count().max(1), 1, "missing column header")),
    };
    let expected: Vec<&str> = kind.header().split(',').collect();
    if cols != expected {
        let col = cols
            .iter()
            .zip(&expected)
            .position(|(a, b)| a != b)
            .unwrap_or(cols.len().min(expected.len()))
            + 1;
        return Err(parse_error(
            hline,
            col,
            format!("column header must be '{}'", kind.header()),
        ));
    }
    let mut samples = Vec::with_capacity(rows.len());
    let mut second = Vec::new();
    for (line_no, r) in &rows {
        let sigma_cols: &[usize] = if r.len() == 5 { &[2, 4] } else { &[2] };
        for &c in sigma_cols {
            if r[c] < 0.0 {
                return Err(parse_error(*line_no, c + 1, "sigma must be ≥ 0"));
            }
        }
        samples.push(Sample::new(r[0], r[1], r[2]));
        if r.len() == 5 {
            second.push(Sample::new(r[0], r[3], r[4]));
        }
    }
    for w in rows.windows(2).zip(samples.windows(2)) {
        if !(w.1[1].setting > w.1[0].setting) {
            return Err(parse_error(w.0[1].0, 1, "settings must be strictly increasing"));
        }
    }
    let rec = MeasurementRecord {
        kind,
        samples,
        second: (kind == RecordKind::FockHistogramPair).then_some(second),
        meta,
    };
    rec.validate()?;
    Ok(rec)
}

pub fn read_record(path: impl AsRef<Path>) -> Result<MeasurementRecord> {
    let text = fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_csv(&text)
}

pub fn write_record(record: &MeasurementRecord, path: impl AsRef<Path>) -> Result<()> {
    record.validate()?;
    fs::write(path.as_ref(), record.to_csv())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    fn cut() -> MeasurementRecord {
        let samples = (-3..=3)
            .map(|n| Sample::new(n as f64 * 0.02, 0.1 * n as f64 + 1.0 / 3.0, 0.013))
            .collect();
        MeasurementRecord::series(
            RecordKind::WignerCut,
            samples,
            meta(&[("modes", "1"), ("theta0", "0.02"), ("source", "test")]),
        )
        .unwrap()
    }

    #[test]
    fn round_trip_text() {
        let rec = cut();
        let back = MeasurementRecord::from_csv(&rec.to_csv()).unwrap();
        assert_eq!(rec, back);
    }

    #[test]
    fn round_trip_histogram() {
        let p = vec![Sample::new(0.0, 0.5, 0.01), Sample::new(1.0, 0.5, 0.01)];
        let q = vec![Sample::new(0.0, 0.25, 0.0), Sample::new(1.0, 0.75, 0.0)];
        let rec = MeasurementRecord::histogram_pair(p, q, meta(&[("delta_theta", "0.001")])).unwrap();
        let text = rec.to_csv();
        assert!(text.contains(HISTOGRAM_HEADER));
        assert_eq!(MeasurementRecord::from_csv(&text).unwrap(), rec);
    }

    #[test]
    fn nan_cell_names_line_and_column() {
        let text = "# kind = wigner_cut\n# modes = 1\nsetting,value,sigma\n0,0.5,0.1\n0.1,NaN,0.1\n";
        match MeasurementRecord::from_csv(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (5, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_files() {
        let missing_meta = "# kind = parity_fringe\nsetting,value,sigma\n0,1,0\n";
        assert!(matches!(MeasurementRecord::from_csv(missing_meta), Err(Error::Validation(_))));
        let bad_header = "# kind = wigner_cut\n# modes = 1\nsetting,value\n0,1\n";
        assert!(matches!(
            MeasurementRecord::from_csv(bad_header),
            Err(Error::Parse { line: 3, column: 3, .. })
        ));
        let non_monotone = "# kind = wigner_cut\n# modes = 1\nsetting,value,sigma\n0,1,0\n0,1,0\n";
        assert!(matches!(
            MeasurementRecord::from_csv(non_monotone),
            Err(Error::Parse { line: 5, .. })
        ));
        let neg_sigma = "# kind = wigner_cut\n# modes = 1\nsetting,value,sigma\n0,1,-1\n";
        assert!(matches!(
            MeasurementRecord::from_csv(neg_sigma),
            Err(Error::Parse { line: 4, column: 3, .. })
        ));
    }

    #[test]
    fn theta0_mismatch_is_a_validation_error() {
        let text = "# kind = wigner_cut\n# modes = 1\n# theta0 = 0.02\nsetting,value,sigma\n0,1,0\n0.03,0.9,0\n";
        assert!(matches!(MeasurementRecord::from_csv(text), Err(Error::Validation(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let rec = cut();
        write_record(&rec, &path).unwrap();
        assert_eq!(read_record(&path).unwrap(), rec);
    }
}
