//! Labeled dataset loading and the deterministic train/test split.

use crate::errors::{CliError, CliResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataFormat {
    /// `label,v1,...,vn` per line, comma separated.
    CsvLabeled,
    /// Tab separated, label first (the layout UCR archives use).
    UcrTsv,
}

impl DataFormat {
    pub fn parse(s: &str) -> Option<DataFormat> {
        match s {
            "csv-labeled" => Some(DataFormat::CsvLabeled),
            "ucr-tsv" => Some(DataFormat::UcrTsv),
            _ => None,
        }
    }

    fn separator(self) -> char {
        match self {
            DataFormat::CsvLabeled => ',',
            DataFormat::UcrTsv => '\t',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub labels: Vec<i64>,
    pub series: Vec<Vec<f64>>,
    pub width: usize,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Sorted distinct class ids.
    pub fn classes(&self) -> Vec<i64> {
        let mut c = self.labels.clone();
        c.sort_unstable();
        c.dedup();
        c
    }
}

/// Parse a labeled dataset file. Every row must have the same arity; parse
/// failures name the offending 1-based line.
pub fn load_dataset(path: &Path, format: DataFormat, has_header: bool) -> CliResult<LabeledDataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    parse_dataset(&text, format, has_header)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn parse_dataset(
    text: &str,
    format: DataFormat,
    has_header: bool,
) -> Result<LabeledDataset, String> {
    let sep = format.separator();
    let mut labels = Vec::new();
    let mut series: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if has_header && idx == 0 {
            continue;
        }
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(sep);
        let label_field = fields.next().unwrap_or_default().trim();
        let label: i64 = label_field
            .parse()
            .map_err(|_| format!("line {line_no}: label '{label_field}' is not an integer"))?;
        let mut values = Vec::new();
        for field in fields {
            let field = field.trim();
            let v: f64 = field
                .parse()
                .map_err(|_| format!("line {line_no}: value '{field}' is not a number"))?;
            values.push(v);
        }
        if values.is_empty() {
            return Err(format!("line {line_no}: no values after the label"));
        }
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(format!(
                    "line {line_no}: {} values but previous rows had {w} (ragged file)",
                    values.len()
                ));
            }
            _ => {}
        }
        labels.push(label);
        series.push(values);
    }
    let width = width.ok_or_else(|| "no data rows".to_string())?;
    let ds = LabeledDataset {
        labels,
        series,
        width,
    };
    debug_assert!(!ds.is_empty());
    Ok(ds)
}

/// Serialize a dataset in csv-labeled form (used by datagen).
pub fn to_csv(ds: &LabeledDataset) -> String {
    let mut out = String::new();
    for (label, row) in ds.labels.iter().zip(&ds.series) {
        out.push_str(&label.to_string());
        for v in row {
            out.push(',');
            out.push_str(&format_value(*v));
        }
        out.push('\n');
    }
    out
}

fn format_value(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Deterministic 80/20 stratified interleave split: within each class (in
/// sorted class order), samples at positions congruent to a seeded offset
/// mod 5 go to the test split. Returns (train, test) indices in dataset
/// order.
pub fn stratified_split(labels: &[i64], seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut test_mark = vec![false; labels.len()];
    for indices in by_class.values() {
        let offset: usize = rng.gen_range(0..5);
        for (pos, &i) in indices.iter().enumerate() {
            if pos % 5 == offset {
                test_mark[i] = true;
            }
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, &is_test) in test_mark.iter().enumerate() {
        if is_test {
            test.push(i);
        } else {
            train.push(i);
        }
    }
    (train, test)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_csv_labeled() {
        let ds = parse_dataset("1,0,255\n0,255,0\n", DataFormat::CsvLabeled, false).unwrap();
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.width, 2);
        assert_eq!(ds.labels, vec![1, 0]);
        assert_eq!(ds.series[0], vec![0.0, 255.0]);
    }

    #[test]
    fn parses_ucr_tsv() {
        let ds = parse_dataset("2\t0.5\t0.7\n", DataFormat::UcrTsv, false).unwrap();
        assert_eq!(ds.labels, vec![2]);
        assert_eq!(ds.series[0], vec![0.5, 0.7]);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let err = parse_dataset("1,2,3\n1,2\n", DataFormat::CsvLabeled, false).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("ragged"), "{err}");
    }

    #[test]
    fn bad_number_names_the_line() {
        let err = parse_dataset("1,2\n1,abc\n", DataFormat::CsvLabeled, false).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
        assert!(err.contains("abc"), "{err}");
    }

    #[test]
    fn header_can_be_skipped() {
        let ds =
            parse_dataset("label,a,b\n3,1,2\n", DataFormat::CsvLabeled, true).unwrap();
        assert_eq!(ds.labels, vec![3]);
    }

    #[test]
    fn split_is_deterministic_and_stratified() {
        let labels: Vec<i64> = (0..40).map(|i| i % 4).collect();
        let (train_a, test_a) = stratified_split(&labels, 7);
        let (train_b, test_b) = stratified_split(&labels, 7);
        assert_eq!(train_a, train_b);
        assert_eq!(test_a, test_b);
        assert_eq!(train_a.len(), 32);
        assert_eq!(test_a.len(), 8);
        // Every class appears twice in the test split (10 per class / 5).
        for c in 0..4i64 {
            let count = test_a.iter().filter(|&&i| labels[i] == c).count();
            assert_eq!(count, 2);
        }
        // No overlap.
        for i in &test_a {
            assert!(!train_a.contains(i));
        }
    }

    #[test]
    fn csv_round_trip() {
        let ds = parse_dataset("1,0,255.5\n0,3,4\n", DataFormat::CsvLabeled, false).unwrap();
        let text = to_csv(&ds);
        assert_eq!(text, "1,0,255.5\n0,3,4\n");
        let back = parse_dataset(&text, DataFormat::CsvLabeled, false).unwrap();
        assert_eq!(back, ds);
    }
}
