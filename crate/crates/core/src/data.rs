//! Labeled dataset loading and the discretizing preprocessors.
//!
//! The intended pipeline is load → filter → binarize or quantize. Sparse
//! filtering always counts non-zero raw values, so it must run before any
//! discretization.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("dataset has no samples")]
    Empty,
    #[error("unknown dataset format {0:?} (expected csv_labeled_last, csv_labeled_first or svmlight_like)")]
    UnknownFormat(String),
    #[error("no feature has at least {min_nonnull} non-null values")]
    AllFeaturesDropped { min_nonnull: usize },
    #[error("quantization needs at least 2 levels, got {0}")]
    InvalidLevels(usize),
    #[error("inconsistent dataset: {0}")]
    Inconsistent(String),
}

/// On-disk layouts understood by [`load_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DataFormat {
    /// Delimited (comma or whitespace) values, class label in the last column.
    CsvLabeledLast,
    /// Delimited values, class label in the first column.
    CsvLabeledFirst,
    /// `label idx:value idx:value …` with 1-based indices; absent entries are 0.
    SvmlightLike,
}

impl FromStr for DataFormat {
    type Err = DataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv_labeled_last" | "csv" => Ok(Self::CsvLabeledLast),
            "csv_labeled_first" => Ok(Self::CsvLabeledFirst),
            "svmlight_like" | "svmlight" => Ok(Self::SvmlightLike),
            other => Err(DataError::UnknownFormat(other.to_string())),
        }
    }
}

impl fmt::Display for DataFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::CsvLabeledLast => "csv_labeled_last",
            Self::CsvLabeledFirst => "csv_labeled_first",
            Self::SvmlightLike => "svmlight_like",
        })
    }
}

/// Where a dataset came from and what was done to it.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub source: String,
    pub steps: Vec<String>,
    /// Original column index of every current feature.
    pub kept_features: Vec<usize>,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "source={}", self.source)?;
        if !self.steps.is_empty() {
            write!(f, "; steps={}", self.steps.join(","))?;
        }
        Ok(())
    }
}

/// Labeled samples stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_count: usize,
    values: Vec<f64>,
    labels: Vec<u32>,
    class_names: Vec<String>,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from rows and raw labels; labels are mapped to dense
    /// indices in first-appearance order.
    pub fn from_rows<L: AsRef<str>>(rows: &[Vec<f64>], labels: &[L]) -> Result<Self, DataError> {
        if rows.is_empty() {
            return Err(DataError::Empty);
        }
        if rows.len() != labels.len() {
            return Err(DataError::Inconsistent(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let feature_count = rows[0].len();
        let mut values = Vec::with_capacity(rows.len() * feature_count);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != feature_count {
                return Err(DataError::Parse {
                    line: i + 1,
                    message: format!("expected {feature_count} features, found {}", row.len()),
                });
            }
            values.extend_from_slice(row);
        }
        let mut class_names: Vec<String> = Vec::new();
        let labels = labels
            .iter()
            .map(|l| dense_label(&mut class_names, l.as_ref()))
            .collect();
        Ok(Self {
            feature_count,
            values,
            labels,
            class_names,
            provenance: Provenance {
                source: "memory".to_string(),
                steps: Vec::new(),
                kept_features: (0..feature_count).collect(),
            },
        })
    }

    pub fn sample_count(&self) -> usize {
        self.labels.len()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn row(&self, sample: usize) -> &[f64] {
        let start = sample * self.feature_count;
        &self.values[start..start + self.feature_count]
    }

    pub fn value(&self, sample: usize, feature: usize) -> f64 {
        self.values[sample * self.feature_count + feature]
    }

    pub fn column(&self, feature: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.sample_count()).map(move |s| self.value(s, feature))
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.provenance.source = source.into();
        self
    }

    fn map_columns(&self, step: String, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let t = self.sample_count();
        let mut values = vec![0.0; self.values.len()];
        for j in 0..self.feature_count {
            let column: Vec<f64> = self.column(j).collect();
            let mapped = f(&column);
            debug_assert_eq!(mapped.len(), t);
            for (s, v) in mapped.into_iter().enumerate() {
                values[s * self.feature_count + j] = v;
            }
        }
        let mut provenance = self.provenance.clone();
        provenance.steps.push(step);
        Self {
            feature_count: self.feature_count,
            values,
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
            provenance,
        }
    }

    /// Writes the dataset as comma-separated values, label last, preceded by a
    /// `#` provenance line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}", self.provenance)?;
        for s in 0..self.sample_count() {
            for v in self.row(s) {
                write!(w, "{v},")?;
            }
            writeln!(w, "{}", self.class_names[self.labels[s] as usize])?;
        }
        Ok(())
    }
}

fn dense_label(names: &mut Vec<String>, label: &str) -> u32 {
    match names.iter().position(|n| n == label) {
        Some(i) => i as u32,
        None => {
            names.push(label.to_string());
            (names.len() - 1) as u32
        }
    }
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut dataset = parse_dataset(&text, format)?;
    dataset.provenance.source = path.display().to_string();
    Ok(dataset)
}

/// Parses dataset text. Blank lines and lines starting with `#` are skipped.
pub fn parse_dataset(text: &str, format: DataFormat) -> Result<Dataset, DataError> {
    let lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<String> = Vec::new();
    match format {
        DataFormat::CsvLabeledLast | DataFormat::CsvLabeledFirst => {
            let mut width: Option<usize> = None;
            for (line, text) in lines {
                let cells: Vec<&str> = if text.contains(',') {
                    text.split(',').map(str::trim).collect()
                } else {
                    text.split_whitespace().collect()
                };
                if cells.len() < 2 {
                    return Err(DataError::Parse {
                        line,
                        message: "need at least one feature and a label".to_string(),
                    });
                }
                match width {
                    None => width = Some(cells.len()),
                    Some(w) if w != cells.len() => {
                        return Err(DataError::Parse {
                            line,
                            message: format!("expected {w} cells, found {}", cells.len()),
                        })
                    }
                    _ => {}
                }
                let (label, features) = if format == DataFormat::CsvLabeledLast {
                    let (l, f) = cells.split_last().expect("non-empty");
                    (*l, f)
                } else {
                    let (l, f) = cells.split_first().expect("non-empty");
                    (*l, f)
                };
                let row = features
                    .iter()
                    .enumerate()
                    .map(|(col, cell)| parse_number(cell, line, col + 1))
                    .collect::<Result<Vec<f64>, _>>()?;
                rows.push(row);
                labels.push(label.to_string());
            }
        }
        DataFormat::SvmlightLike => {
            let mut sparse: Vec<Vec<(usize, f64)>> = Vec::new();
            let mut max_index = 0usize;
            for (line, text) in lines {
                let mut tokens = text.split_whitespace();
                let label = tokens.next().expect("non-empty line");
                let mut entries = Vec::new();
                for token in tokens {
                    let (idx, val) = token.split_once(':').ok_or_else(|| DataError::Parse {
                        line,
                        message: format!("expected index:value, found {token:?}"),
                    })?;
                    let idx: usize = idx.parse().ok().filter(|&i| i >= 1).ok_or_else(|| {
                        DataError::Parse {
                            line,
                            message: format!("invalid 1-based feature index {idx:?}"),
                        }
                    })?;
                    let val = parse_number(val, line, idx)?;
                    max_index = max_index.max(idx);
                    entries.push((idx - 1, val));
                }
                sparse.push(entries);
                labels.push(label.to_string());
            }
            if max_index == 0 && !sparse.is_empty() {
                return Err(DataError::Parse {
                    line: 1,
                    message: "no feature values found".to_string(),
                });
            }
            rows = sparse
                .into_iter()
                .map(|entries| {
                    let mut row = vec![0.0; max_index];
                    for (i, v) in entries {
                        row[i] = v;
                    }
                    row
                })
                .collect();
        }
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    let mut dataset = Dataset::from_rows(&rows, &labels)?;
    dataset.provenance.source = "text".to_string();
    Ok(dataset)
}

fn parse_number(cell: &str, line: usize, column: usize) -> Result<f64, DataError> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| DataError::Parse {
            line,
            message: format!("non-numeric cell {cell:?} in column {column}"),
        })
}

/// Per feature: center, scale by the population standard deviation, then map
/// non-positive values to 0 and positive ones to 1. Constant features become 0.
pub fn zscore_binarize(d: &Dataset) -> Dataset {
    d.map_columns("binarize".to_string(), |column| {
        let t = column.len() as f64;
        let mean = column.iter().sum::<f64>() / t;
        let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / t;
        let sd = var.sqrt();
        column
            .iter()
            .map(|&v| {
                if sd > 0.0 && (v - mean) / sd > 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    })
}

/// Keeps the features with at least `min_nonnull` non-zero values.
pub fn filter_sparse_features(d: &Dataset, min_nonnull: usize) -> Result<Dataset, DataError> {
    let kept: Vec<usize> = (0..d.feature_count)
        .filter(|&j| d.column(j).filter(|&v| v != 0.0).count() >= min_nonnull)
        .collect();
    if kept.is_empty() {
        return Err(DataError::AllFeaturesDropped { min_nonnull });
    }
    let mut values = Vec::with_capacity(d.sample_count() * kept.len());
    for s in 0..d.sample_count() {
        let row = d.row(s);
        values.extend(kept.iter().map(|&j| row[j]));
    }
    let mut provenance = d.provenance.clone();
    provenance.kept_features = kept.iter().map(|&j| provenance.kept_features[j]).collect();
    provenance.steps.push(format!("filter={min_nonnull}"));
    Ok(Dataset {
        feature_count: kept.len(),
        values,
        labels: d.labels.clone(),
        class_names: d.class_names.clone(),
        provenance,
    })
}

/// Equal-frequency binning of every feature into `k` levels.
///
/// Distinct values are ranked; each distinct value gets the level of the
/// midpoint of its rank run, so equal values always share a level. A feature
/// with at most `k` distinct values keeps one level per value.
pub fn quantize_levels(d: &Dataset, k: usize) -> Result<Dataset, DataError> {
    if k < 2 {
        return Err(DataError::InvalidLevels(k));
    }
    Ok(d.map_columns(format!("quantize={k}(equal-frequency)"), |column| {
        let t = column.len();
        let mut sorted: Vec<f64> = column.to_vec();
        sorted.sort_by(f64::total_cmp);
        // (value, first rank, count)
        let mut runs: Vec<(f64, usize, usize)> = Vec::new();
        for (rank, &v) in sorted.iter().enumerate() {
            match runs.last_mut() {
                Some(last) if last.0 == v => last.2 += 1,
                _ => runs.push((v, rank, 1)),
            }
        }
        let levels: Vec<f64> = if runs.len() <= k {
            (0..runs.len()).map(|i| i as f64).collect()
        } else {
            runs.iter()
                .map(|&(_, start, count)| {
                    let mid = 2 * start + count - 1; // twice the midpoint rank
                    ((mid * k) / (2 * t)).min(k - 1) as f64
                })
                .collect()
        };
        column
            .iter()
            .map(|v| {
                let i = runs
                    .binary_search_by(|r| r.0.total_cmp(v))
                    .expect("value present in runs");
                levels[i]
            })
            .collect()
    }))
}
