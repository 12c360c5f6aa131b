//! Per-class RBF kernels over feature columns.
//!
//! A class with `N` samples and `d` features yields a `d × d` kernel whose
//! entry `(i, j)` compares feature column `i` with feature column `j` across
//! that class's samples only.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Two-class labeled samples, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    samples: DMatrix<f64>,
    labels: Vec<u8>,
    feature_names: Option<Vec<String>>,
}

impl DataMatrix {
    /// Validates shape, finiteness and binary labels. Class balance is
    /// checked later, by [`split_by_class`].
    pub fn new(samples: DMatrix<f64>, labels: Vec<u8>, feature_names: Option<Vec<String>>) -> Result<Self> {
        if samples.nrows() != labels.len() {
            return Err(Error::invalid(format!(
                "{} samples but {} labels",
                samples.nrows(),
                labels.len()
            )));
        }
        if samples.ncols() < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 features, got {}",
                samples.ncols()
            )));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            let n = samples.nrows();
            return Err(Error::invalid(format!(
                "non-finite value at sample {}, feature {}",
                pos % n,
                pos / n
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(Error::invalid(format!("label {bad} is not 0 or 1")));
        }
        if let Some(names) = &feature_names {
            if names.len() != samples.ncols() {
                return Err(Error::invalid("feature name count does not match feature count"));
            }
        }
        Ok(Self {
            samples,
            labels,
            feature_names,
        })
    }

    pub fn samples(&self) -> &DMatrix<f64> {
        &self.samples
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn n_samples(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.samples.ncols()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - ones, ones]
    }

    /// Same samples with every label flipped.
    pub fn with_swapped_labels(&self) -> Self {
        Self {
            samples: self.samples.clone(),
            labels: self.labels.iter().map(|l| 1 - l).collect(),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Subset of rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.n_samples()) {
            return Err(Error::invalid(format!("row {r} out of range")));
        }
        let samples = self.samples.select_rows(rows);
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Self::new(samples, labels, self.feature_names.clone())
    }

    /// Reorders feature columns: output column `j` is input column `perm[j]`.
    pub fn permute_features(&self, perm: &[usize]) -> Result<Self> {
        let d = self.n_features();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&p| p >= d || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid("not a permutation of the feature indices"));
        }
        let samples = self.samples.select_columns(perm);
        let names = self
            .feature_names
            .as_ref()
            .map(|n| perm.iter().map(|&p| n[p].clone()).collect());
        Self::new(samples, self.labels.clone(), names)
    }
}

/// Splits rows by label into (class 0, class 1), preserving row and feature order.
pub fn split_by_class(data: &DataMatrix) -> Result<(DataMatrix, DataMatrix)> {
    let (zeros, ones): (Vec<usize>, Vec<usize>) = (0..data.n_samples()).partition(|&r| data.labels[r] == 0);
    if zeros.is_empty() || ones.is_empty() {
        return Err(Error::invalid("data contains a single class"));
    }
    if zeros.len() < 2 || ones.len() < 2 {
        return Err(Error::invalid(format!(
            "each class needs at least 2 samples, got {} and {}",
            zeros.len(),
            ones.len()
        )));
    }
    Ok((data.select_rows(&zeros)?, data.select_rows(&ones)?))
}

/// Percentile with linear interpolation between order statistics
/// (rank `p/100 · (n − 1)`). `values` need not be sorted.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("percentile of an empty set"));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::invalid(format!("percentile {p} outside [0, 100]")));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let rank = p / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    Ok(v[lo] + (v[hi] - v[lo]) * frac)
}

/// Squared Euclidean distances between all feature columns, with a fixed
/// summation order (ascending sample index) per entry.
fn column_sq_distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let d = x.ncols();
    let mut out = DMatrix::zeros(d, d);
    for i in 0..d {
        let ci = x.column(i);
        for j in (i + 1)..d {
            let cj = x.column(j);
            let mut acc = 0.0;
            for (a, b) in ci.iter().zip(cj.iter()) {
                let diff = a - b;
                acc += diff * diff;
            }
            out[(i, j)] = acc;
            out[(j, i)] = acc;
        }
    }
    out
}

/// Kernel scale: `factor ×` the `percentile`-th percentile of the pairwise
/// Euclidean distances between feature columns of `x`.
pub fn select_scale(x: &DMatrix<f64>, percentile_rank: f64, factor: f64) -> Result<f64> {
    if !(percentile_rank > 0.0 && percentile_rank <= 100.0) {
        return Err(Error::invalid(format!("percentile {percentile_rank} outside (0, 100]")));
    }
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::invalid(format!("scale factor {factor} must be positive")));
    }
    let d = x.ncols();
    if d < 2 {
        return Err(Error::invalid("scale selection needs at least two features"));
    }
    let sq = column_sq_distances(x);
    let mut dists = Vec::with_capacity(d * (d - 1) / 2);
    for i in 0..d {
        for j in (i + 1)..d {
            dists.push(sq[(i, j)].sqrt());
        }
    }
    if dists.iter().all(|&v| v == 0.0) {
        return Err(Error::degenerate("all pairwise feature distances are zero"));
    }
    let scale = factor * percentile(&dists, percentile_rank)?;
    if !(scale > 0.0) {
        return Err(Error::degenerate(format!(
            "percentile {percentile_rank} of feature distances is zero"
        )));
    }
    Ok(scale)
}

/// A feature-affinity kernel with the scale it was built at.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    pub matrix: SymMatrix,
    pub scale: f64,
    pub normalized_iters: usize,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `K[i, j] = exp(−‖x_i − x_j‖² / 2σ²)` over feature columns `x_i` of one class.
pub fn build_rbf_kernel(x: &DMatrix<f64>, scale: f64) -> Result<KernelMatrix> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!("kernel scale {scale} must be positive")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("class data has non-finite entries"));
    }
    let denom = 2.0 * scale * scale;
    let mut k = column_sq_distances(x);
    let d = k.nrows();
    for i in 0..d {
        for j in 0..d {
            k[(i, j)] = if i == j { 1.0 } else { (-k[(i, j)] / denom).exp() };
        }
    }
    Ok(KernelMatrix {
        matrix: SymMatrix::symmetrize(k),
        scale,
        normalized_iters: 0,
    })
}

/// Applies `K ← D^{-1/2} K D^{-1/2}` with `D = diag(row sums)`, `iters` times.
pub fn normalize_symmetric(kernel: &KernelMatrix, iters: usize) -> Result<KernelMatrix> {
    let mut k = kernel.matrix.as_matrix().clone();
    let d = k.nrows();
    for _ in 0..iters {
        let sums: Vec<f64> = (0..d).map(|i| k.row(i).sum()).collect();
        if let Some(i) = sums.iter().position(|&s| !(s > 0.0)) {
            return Err(Error::degenerate(format!(
                "kernel row {i} has non-positive sum {}",
                sums[i]
            )));
        }
        let inv: Vec<f64> = sums.iter().map(|s| 1.0 / s.sqrt()).collect();
        for i in 0..d {
            for j in 0..d {
                k[(i, j)] *= inv[i] * inv[j];
            }
        }
    }
    Ok(KernelMatrix {
        matrix: SymMatrix::symmetrize(k),
        scale: kernel.scale,
        normalized_iters: kernel.normalized_iters + iters,
    })
}
