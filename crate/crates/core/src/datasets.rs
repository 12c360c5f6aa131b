//! Synthetic benchmark generators, univariate baseline scores and CSV I/O.
//!
//! Random streams are ChaCha8 seeded with `seed` and switched to a
//! per-purpose stream id, so each generator stage draws from an independent
//! substream that depends only on `(seed, purpose)`.

use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::DataMatrix;

/// Substream ids.
mod stream {
    pub const XOR_BITS: u64 = 1;
    pub const CENTERS: u64 = 2;
    pub const ASSIGNMENT: u64 = 3;
    pub const CLUSTER_NOISE: u64 = 4;
    pub const NOISE_FEATURES: u64 = 5;
    pub const PERMUTATION: u64 = 6;
    pub const SUBSAMPLE: u64 = 7;
    pub const MIXING: u64 = 8;
}

const MAX_RETRIES: u64 = 64;

/// RNG for `(seed, purpose)`; `attempt` separates regenerations.
pub fn substream(seed: u64, purpose: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose | (attempt << 32));
    rng
}

/// Shape of each hypercube cluster before it is shifted onto its vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterCovariance {
    /// `noise_scale · z` with `z ~ N(0, I)`.
    Isotropic,
    /// `noise_scale · z A_c` with a per-cluster `A_c` of i.i.d. U(-1, 1)
    /// entries, the construction used by scikit-learn's `make_classification`.
    RandomLinear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_samples: usize,
    pub n_features: usize,
    pub n_informative: usize,
    /// Standard deviation of each hypercube cluster around its vertex.
    pub noise_scale: f64,
    pub clusters_per_class: usize,
    pub cluster_covariance: ClusterCovariance,
}

impl GeneratorConfig {
    /// 50 samples, 100 binary features, label `f1 XOR f5`.
    pub fn xor(seed: u64) -> Self {
        Self {
            seed,
            n_samples: 50,
            n_features: 100,
            n_informative: 2,
            noise_scale: 0.0,
            clusters_per_class: 2,
            cluster_covariance: ClusterCovariance::Isotropic,
        }
    }

    /// 2000 samples, 10 informative hypercube coordinates padded to 200 features.
    pub fn hypercube(seed: u64) -> Self {
        Self {
            seed,
            n_samples: 2000,
            n_features: 200,
            n_informative: 10,
            noise_scale: 1.0,
            clusters_per_class: 2,
            cluster_covariance: ClusterCovariance::RandomLinear,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 || self.n_features == 0 || self.n_informative == 0 || self.clusters_per_class == 0 {
            return Err(Error::invalid("generator counts must be positive"));
        }
        if self.n_informative > self.n_features {
            return Err(Error::invalid(format!(
                "{} informative features exceed {} features",
                self.n_informative, self.n_features
            )));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::invalid("noise scale must be finite and nonnegative"));
        }
        Ok(())
    }
}

/// Indices (0-based) of the two XOR inputs.
pub const XOR_INFORMATIVE: [usize; 2] = [0, 4];

/// Bernoulli(½) binary features with label `x[0] XOR x[4]`.
pub fn gen_xor(config: &GeneratorConfig) -> Result<DataMatrix> {
    config.validate()?;
    if config.n_features < 5 {
        return Err(Error::invalid("XOR data needs at least 5 features"));
    }
    let (n, d) = (config.n_samples, config.n_features);
    for attempt in 0..MAX_RETRIES {
        let mut rng = substream(config.seed, stream::XOR_BITS, attempt);
        // row-major draw order
        let mut bits = DMatrix::zeros(n, d);
        for r in 0..n {
            for c in 0..d {
                bits[(r, c)] = if rng.random::<bool>() { 1.0 } else { 0.0 };
            }
        }
        let labels: Vec<u8> = (0..n).map(|r| (bits[(r, 0)] != bits[(r, 4)]) as u8).collect();
        let ones = labels.iter().filter(|&&l| l == 1).count();
        if ones >= 2 && n - ones >= 2 {
            return DataMatrix::new(bits, labels, None);
        }
    }
    Err(Error::degenerate(format!(
        "no XOR draw with both classes populated after {MAX_RETRIES} attempts"
    )))
}

#[derive(Debug, Clone)]
pub struct HypercubeData {
    pub data: DataMatrix,
    /// Positions of the hypercube coordinates after feature shuffling, ascending.
    pub informative: Vec<usize>,
}

/// Gaussian clusters on distinct vertices of `{±1}^n_informative`, half the
/// clusters per class, padded with standard normal noise features and
/// shuffled column-wise. Rows cycle through the clusters.
pub fn gen_hypercube(config: &GeneratorConfig) -> Result<HypercubeData> {
    config.validate()?;
    let k = config.n_informative;
    let n_clusters = 2 * config.clusters_per_class;
    if k < 63 && (1u64 << k) < n_clusters as u64 {
        return Err(Error::invalid(format!(
            "{n_clusters} clusters do not fit on the vertices of a {k}-cube"
        )));
    }
    let (n, d) = (config.n_samples, config.n_features);
    if n < 2 * n_clusters {
        return Err(Error::invalid("too few samples for the requested clusters"));
    }

    let mut rng = substream(config.seed, stream::CENTERS, 0);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(n_clusters);
    while centers.len() < n_clusters {
        let v: Vec<f64> = (0..k).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        if !centers.contains(&v) {
            centers.push(v);
        }
    }

    let mut order: Vec<usize> = (0..n_clusters).collect();
    order.shuffle(&mut substream(config.seed, stream::ASSIGNMENT, 0));
    let mut cluster_label = vec![0u8; n_clusters];
    for &c in &order[config.clusters_per_class..] {
        cluster_label[c] = 1;
    }

    let mixing: Vec<DMatrix<f64>> = match config.cluster_covariance {
        ClusterCovariance::Isotropic => Vec::new(),
        ClusterCovariance::RandomLinear => {
            let mut rng = substream(config.seed, stream::MIXING, 0);
            (0..n_clusters)
                .map(|_| DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0)))
                .collect()
        }
    };

    let mut noise = substream(config.seed, stream::CLUSTER_NOISE, 0);
    let mut z = vec![0.0; k];
    let mut pad = substream(config.seed, stream::NOISE_FEATURES, 0);
    let mut raw = DMatrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for r in 0..n {
        let c = r % n_clusters;
        labels.push(cluster_label[c]);
        for zj in z.iter_mut() {
            *zj = noise.sample(StandardNormal);
        }
        for j in 0..k {
            let offset = match mixing.get(c) {
                Some(a) => (0..k).map(|i| z[i] * a[(i, j)]).sum::<f64>(),
                None => z[j],
            };
            raw[(r, j)] = centers[c][j] + config.noise_scale * offset;
        }
        for j in k..d {
            raw[(r, j)] = pad.sample(StandardNormal);
        }
    }

    let mut perm: Vec<usize> = (0..d).collect();
    perm.shuffle(&mut substream(config.seed, stream::PERMUTATION, 0));
    let data = DataMatrix::new(raw, labels, None)?.permute_features(&perm)?;
    let mut informative: Vec<usize> = perm
        .iter()
        .enumerate()
        .filter(|(_, &src)| src < k)
        .map(|(dst, _)| dst)
        .collect();
    informative.sort_unstable();
    Ok(HypercubeData { data, informative })
}

/// Random subset of `size` rows holding at least two samples per class.
pub fn stratified_subsample(data: &DataMatrix, size: usize, seed: u64) -> Result<DataMatrix> {
    if size > data.n_samples() || size < 4 {
        return Err(Error::invalid(format!(
            "subsample of {size} rows from {} samples",
            data.n_samples()
        )));
    }
    for attempt in 0..MAX_RETRIES {
        let mut rows: Vec<usize> = (0..data.n_samples()).collect();
        rows.shuffle(&mut substream(seed, stream::SUBSAMPLE, attempt));
        rows.truncate(size);
        rows.sort_unstable();
        let ones = rows.iter().filter(|&&r| data.labels()[r] == 1).count();
        if ones >= 2 && size - ones >= 2 {
            return data.select_rows(&rows);
        }
    }
    Err(Error::degenerate("could not draw a subsample containing both classes"))
}

/// Fisher ratios above every finite score are replaced by this multiple of
/// the largest finite score.
pub const FISHER_SENTINEL_FACTOR: f64 = 1e9;

/// Per-feature `(N₁(μ₁−μ)² + N₂(μ₂−μ)²) / (N₁σ₁² + N₂σ₂²)` with population
/// variances. A zero denominator scores 0 when the numerator is also zero,
/// otherwise `1e9 ×` the largest finite score (or `1e9` if none is positive).
pub fn fisher_score(data: &DataMatrix) -> Vec<f64> {
    let x = data.samples();
    let labels = data.labels();
    let counts = data.class_counts();
    let mut raw: Vec<Option<f64>> = Vec::with_capacity(data.n_features());
    for col in x.column_iter() {
        let mu = col.mean();
        let mut num = 0.0;
        let mut den = 0.0;
        for class in 0..2u8 {
            let nc = counts[class as usize] as f64;
            if nc == 0.0 {
                continue;
            }
            let vals: Vec<f64> = col
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == class)
                .map(|(&v, _)| v)
                .collect();
            let m = vals.iter().sum::<f64>() / nc;
            let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / nc;
            num += nc * (m - mu) * (m - mu);
            den += nc * var;
        }
        raw.push(if den > 0.0 {
            Some(num / den)
        } else if num > 0.0 {
            None
        } else {
            Some(0.0)
        });
    }
    let max_finite = raw.iter().flatten().copied().fold(0.0, f64::max);
    let sentinel = FISHER_SENTINEL_FACTOR * if max_finite > 0.0 { max_finite } else { 1.0 };
    raw.into_iter().map(|s| s.unwrap_or(sentinel)).collect()
}

/// `|corr(feature, label)|`; constant features score 0.
pub fn pearson_score(data: &DataMatrix) -> Vec<f64> {
    let y: Vec<f64> = data.labels().iter().map(|&l| l as f64).collect();
    let n = y.len() as f64;
    let my = y.iter().sum::<f64>() / n;
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    data.samples()
        .column_iter()
        .map(|col| {
            let mx = col.mean();
            let mut sxy = 0.0;
            let mut sxx = 0.0;
            for (xv, yv) in col.iter().zip(&y) {
                sxy += (xv - mx) * (yv - my);
                sxx += (xv - mx) * (xv - mx);
            }
            if sxx > 0.0 && syy > 0.0 {
                (sxy / (sxx * syy).sqrt()).abs().min(1.0)
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Non-negative integers select by index, anything else by header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Reads a numeric table with a binary label column.
///
/// The first record is a header if any of its cells is not a number. Errors
/// carry 1-based row (file record) and column positions.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn, delimiter: u8) -> Result<DataMatrix> {
    let file = std::fs::File::open(path.as_ref())?;
    read_csv(file, label, delimiter)
}

pub fn read_csv(reader: impl std::io::Read, label: &LabelColumn, delimiter: u8) -> Result<DataMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse {
            row: i + 1,
            column: 0,
            message: e.to_string(),
        })?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        records.push((i + 1, rec));
    }
    let Some((_, first)) = records.first() else {
        return Err(Error::Parse {
            row: 1,
            column: 0,
            message: "empty file".into(),
        });
    };
    let has_header = first.iter().any(|c| c.parse::<f64>().is_err());
    let width = first.len();
    let header: Option<Vec<String>> = has_header.then(|| first.iter().map(str::to_string).collect());
    let label_idx = match label {
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(i) => {
            return Err(Error::invalid(format!(
                "label column {i} out of range for {width} columns"
            )))
        }
        LabelColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::invalid(format!("label column {name:?} not found in header")))?,
    };
    let body = &records[usize::from(has_header)..];
    if body.is_empty() {
        return Err(Error::Parse {
            row: records[0].0 + 1,
            column: 0,
            message: "no data rows".into(),
        });
    }
    let d = width - 1;
    let mut values = Vec::with_capacity(body.len() * d);
    let mut labels = Vec::with_capacity(body.len());
    for (row, rec) in body {
        if rec.len() != width {
            return Err(Error::Parse {
                row: *row,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} fields, found {}", rec.len()),
            });
        }
        for (c, cell) in rec.iter().enumerate() {
            let parse_err = |message: String| Error::Parse {
                row: *row,
                column: c + 1,
                message,
            };
            if cell.is_empty() {
                return Err(parse_err("missing value".into()));
            }
            let v: f64 = cell.parse().map_err(|_| parse_err(format!("not a number: {cell:?}")))?;
            if !v.is_finite() {
                return Err(parse_err(format!("non-finite value {cell:?}")));
            }
            if c == label_idx {
                if v == 0.0 {
                    labels.push(0);
                } else if v == 1.0 {
                    labels.push(1);
                } else {
                    return Err(parse_err(format!("label {cell:?} is not 0 or 1")));
                }
            } else {
                values.push(v);
            }
        }
    }
    let names = header.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|&(i, _)| i != label_idx)
            .map(|(_, n)| n)
            .collect()
    });
    let samples = DMatrix::from_row_slice(labels.len(), d, &values);
    DataMatrix::new(samples, labels, names)
}

/// Writes features (header from feature names, or `x0..`) followed by a
/// `label` column. Values use shortest round-trip formatting.
pub fn save_csv(data: &DataMatrix, path: impl AsRef<Path>, delimiter: u8) -> Result<()> {
    let file = std::fs::File::create(path.as_ref())?;
    write_csv(data, file, delimiter)
}

pub fn write_csv(data: &DataMatrix, writer: impl std::io::Write, delimiter: u8) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    let mut header: Vec<String> = match data.feature_names() {
        Some(n) => n.to_vec(),
        None => (0..data.n_features()).map(|j| format!("x{j}")).collect(),
    };
    header.push("label".into());
    w.write_record(&header).map_err(csv_err)?;
    for (r, row) in data.samples().row_iter().enumerate() {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(data.labels()[r].to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
