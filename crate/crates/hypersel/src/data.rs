//! Dataset ingestion and the 25/25/50 split protocol.

use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Dense labeled dataset. Labels are remapped to a contiguous 1..=C range
/// at load time, ordered by the original label values.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<usize>,
    pub n_features: usize,
}

impl Dataset {
    pub fn n_samples(&self) -> usize {
        self.x.len()
    }

    pub fn n_classes(&self) -> usize {
        self.y.iter().copied().max().unwrap_or(0)
    }

    /// Samples per class, indexed by `class - 1`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &l in &self.y {
            counts[l - 1] += 1;
        }
        counts
    }

    /// Copies the rows at `rows` in order.
    pub fn subset(&self, rows: &[usize]) -> (Vec<Vec<f64>>, Vec<usize>) {
        let x = rows.iter().map(|&i| self.x[i].clone()).collect();
        let y = rows.iter().map(|&i| self.y[i]).collect();
        (x, y)
    }
}

fn remap_labels(raw: &[f64]) -> Result<Vec<usize>> {
    let mut distinct: Vec<f64> = raw.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    Ok(raw
        .iter()
        .map(|l| 1 + distinct.iter().position(|d| d == l).unwrap())
        .collect())
}

/// Parses the sparse text format: one sample per line as
/// `label index:value ...` with 1-based indices; absent indices are 0.
/// The largest index seen defines the feature count unless `n_features`
/// forces a wider matrix.
pub fn parse_libsvm(reader: impl BufRead, name: &str, n_features: Option<usize>) -> Result<Dataset> {
    let mut raw_labels = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let Some(label_tok) = tokens.next() else { continue };
        let label: f64 = label_tok.parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad label '{label_tok}'"),
        })?;
        if label.is_nan() {
            return Err(Error::Parse { line: lineno, msg: "NaN label".into() });
        }
        let mut row = Vec::new();
        for pair in tokens {
            let (idx_s, val_s) = pair.split_once(':').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected index:value, got '{pair}'"),
            })?;
            let idx: usize = idx_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad feature index '{idx_s}'"),
            })?;
            if idx == 0 {
                return Err(Error::Parse { line: lineno, msg: "feature indices are 1-based".into() });
            }
            let val: f64 = val_s.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad feature value '{val_s}'"),
            })?;
            max_index = max_index.max(idx);
            row.push((idx, val));
        }
        raw_labels.push(label);
        sparse_rows.push(row);
    }
    if sparse_rows.is_empty() {
        return Err(Error::EmptyDataset(name.into()));
    }
    let width = n_features.unwrap_or(max_index).max(max_index);
    let x = sparse_rows
        .into_iter()
        .map(|row| {
            let mut dense = vec![0.0; width];
            for (idx, val) in row {
                dense[idx - 1] = val;
            }
            dense
        })
        .collect();
    Ok(Dataset {
        name: name.into(),
        x,
        y: remap_labels(&raw_labels)?,
        n_features: width,
    })
}

/// Writes the sparse format back out, eliding zeros; labels are the
/// remapped 1..=C values.
pub fn write_libsvm(ds: &Dataset, mut out: impl Write) -> Result<()> {
    for (row, label) in ds.x.iter().zip(&ds.y) {
        write!(out, "{label}")?;
        for (j, &v) in row.iter().enumerate() {
            if v != 0.0 {
                write!(out, " {}:{}", j + 1, v)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Parses a comma-separated table with a header row; the first column is
/// the label, every remaining column a numeric feature.
pub fn parse_csv(reader: impl BufRead, name: &str) -> Result<Dataset> {
    let mut lines = reader.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(Error::EmptyDataset(name.into()));
    };
    let n_features = header?.split(',').count().saturating_sub(1);
    if n_features == 0 {
        return Err(Error::Parse { line: 1, msg: "header needs a label and at least one feature".into() });
    }
    let mut raw_labels = Vec::new();
    let mut x = Vec::new();
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n_features + 1 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {} fields, got {}", n_features + 1, fields.len()),
            });
        }
        let label: f64 = fields[0].trim().parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad label '{}'", fields[0]),
        })?;
        let row = fields[1..]
            .iter()
            .map(|f| {
                f.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad feature value '{f}'"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        raw_labels.push(label);
        x.push(row);
    }
    if x.is_empty() {
        return Err(Error::EmptyDataset(name.into()));
    }
    Ok(Dataset {
        name: name.into(),
        x,
        y: remap_labels(&raw_labels)?,
        n_features,
    })
}

/// Split fractions; the defaults realize the 25/25/50 protocol.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train: 0.25, validation: 0.25, test: 0.50, stratified: true }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        let sum = self.train + self.validation + self.test;
        if (sum - 1.0).abs() > 1e-9 || self.train <= 0.0 || self.validation <= 0.0 || self.test <= 0.0 {
            return Err(Error::Config(format!(
                "split fractions must be positive and sum to 1, got {}/{}/{}",
                self.train, self.validation, self.test
            )));
        }
        Ok(())
    }
}

/// Disjoint, exhaustive row partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Apportions `n` seats over the three fractions by largest remainder.
/// Remainder ties go to the partition currently furthest below its global
/// quota, then to the earlier partition; this keeps whole-dataset totals
/// exact when equal classes tie repeatedly (100 samples in two balanced
/// classes split exactly 25/25/50).
fn apportion(
    n: usize,
    fractions: [f64; 3],
    allocated: [usize; 3],
    processed_after: usize,
) -> [usize; 3] {
    let quotas: Vec<f64> = fractions.iter().map(|f| f * n as f64).collect();
    let mut counts = [0usize; 3];
    let mut floor_sum = 0usize;
    for (i, q) in quotas.iter().enumerate() {
        counts[i] = q.floor() as usize;
        floor_sum += counts[i];
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let rem_a = quotas[a] - quotas[a].floor();
        let rem_b = quotas[b] - quotas[b].floor();
        let deficit = |i: usize| fractions[i] * processed_after as f64 - (allocated[i] + counts[i]) as f64;
        rem_b
            .partial_cmp(&rem_a)
            .unwrap()
            .then(deficit(b).partial_cmp(&deficit(a)).unwrap())
            .then(a.cmp(&b))
    });
    for &i in order.iter().take(n - floor_sum) {
        counts[i] += 1;
    }
    counts
}

/// Seeded, stratified, shuffled partition at the spec'd fractions.
/// Per class the rows are shuffled and apportioned by largest remainder;
/// partitions are disjoint and exhaustive.
pub fn split(ds: &Dataset, spec: &SplitSpec, rng: &mut Stream) -> Result<Split> {
    spec.validate()?;
    let fractions = [spec.train, spec.validation, spec.test];
    let mut parts: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let groups: Vec<Vec<usize>> = if spec.stratified {
        let counts = ds.class_counts();
        for (c, &count) in counts.iter().enumerate() {
            if count < 4 {
                return Err(Error::ClassTooSmall { class: c + 1, count });
            }
        }
        (1..=ds.n_classes())
            .map(|c| (0..ds.n_samples()).filter(|&i| ds.y[i] == c).collect())
            .collect()
    } else {
        vec![(0..ds.n_samples()).collect()]
    };
    let mut allocated = [0usize; 3];
    let mut processed = 0usize;
    for mut idx in groups {
        idx.shuffle(rng);
        processed += idx.len();
        let counts = apportion(idx.len(), fractions, allocated, processed);
        let mut cursor = 0usize;
        for (part, &take) in parts.iter_mut().zip(&counts) {
            part.extend_from_slice(&idx[cursor..cursor + take]);
            cursor += take;
        }
        for (a, c) in allocated.iter_mut().zip(&counts) {
            *a += c;
        }
    }
    let [train, validation, test] = parts;
    Ok(Split { train, validation, test })
}

/// Per-feature min-max scaler fitted on the training partition only.
/// Constant features map to 0 so they carry no distance.
#[derive(Clone, Debug)]
pub struct Normalizer {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Normalizer {
    pub fn fit(ds: &Dataset, train_rows: &[usize]) -> Result<Self> {
        if train_rows.is_empty() {
            return Err(Error::EmptyDataset("training partition".into()));
        }
        let mut lo = vec![f64::INFINITY; ds.n_features];
        let mut hi = vec![f64::NEG_INFINITY; ds.n_features];
        for &i in train_rows {
            for (j, &v) in ds.x[i].iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn transform_sample(&self, sample: &[f64]) -> Vec<f64> {
        sample
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if self.hi[j] > self.lo[j] {
                    (v - self.lo[j]) / (self.hi[j] - self.lo[j])
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn transform_rows(&self, ds: &Dataset, rows: &[usize]) -> Vec<Vec<f64>> {
        rows.iter().map(|&i| self.transform_sample(&ds.x[i])).collect()
    }
}
