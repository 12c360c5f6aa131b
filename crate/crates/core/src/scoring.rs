//! Spectral feature score of the difference operator and the end-to-end
//! pipeline from labeled data to ranked features.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage, StageExt};
use crate::kernels::{build_rbf_kernel, normalize_symmetric, select_scale, split_by_class, DataMatrix, KernelMatrix};
use crate::linalg::{sym_eig, EigenSystem, SymMatrix};
use crate::spd::{difference_operator, SpdMatrix};
use crate::spsd::{spsd_difference_with_tol, SpsdDiagnostics, DEFAULT_RANK_TOL};

/// Which manifold the difference operator was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryPath {
    Spd,
    Spsd,
}

/// How to pick the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryMode {
    /// SPD first, SPSD when a kernel is not (numerically) positive definite.
    Auto,
    /// SPD only; rank-deficient kernels are an error.
    SpdOnly,
    ForceSpsd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePolicy {
    /// Percentile of pairwise feature distances, in (0, 100].
    pub percentile: f64,
    pub factor: f64,
}

impl Default for ScalePolicy {
    fn default() -> Self {
        Self {
            percentile: 50.0,
            factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestConfig {
    pub scale: ScalePolicy,
    pub normalize_iters: usize,
    pub geometry: GeometryMode,
    pub rank_tol: f64,
    /// Sum only the `n` eigenpairs of largest `|λ|`. `None` sums all of them.
    pub eig_cutoff: Option<usize>,
    /// Number of leading eigenvectors of `D` kept in the result.
    pub leading_vectors: usize,
}

impl Default for ManifestConfig {
    fn default() -> Self {
        Self {
            scale: ScalePolicy::default(),
            normalize_iters: 0,
            geometry: GeometryMode::Auto,
            rank_tol: DEFAULT_RANK_TOL,
            eig_cutoff: None,
            leading_vectors: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeatureScore {
    /// `r(j) = Σᵢ |λᵢ| φᵢ(j)²`.
    pub scores: Vec<f64>,
    /// Eigenvalues of `D`, descending signed order.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors of `D` ordered by descending `|λ|`, one `Vec` per vector.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading_vectors: Option<Vec<Vec<f64>>>,
}

impl FeatureScore {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

pub fn manifest_score(d: &SymMatrix) -> Result<FeatureScore> {
    manifest_score_with(d, None, 0)
}

/// Score with an optional eigenpair cutoff and `keep` leading vectors retained.
pub fn manifest_score_with(d: &SymMatrix, cutoff: Option<usize>, keep: usize) -> Result<FeatureScore> {
    let eig = sym_eig(d)?;
    Ok(score_from_eigen(&eig, cutoff, keep))
}

/// Score from an eigendecomposition of `D`, see [`manifest_score_with`].
pub fn score_from_eigen(eig: &EigenSystem, cutoff: Option<usize>, keep: usize) -> FeatureScore {
    let n = eig.dim();
    let order = eig.order_by_magnitude();
    let used = cutoff.unwrap_or(n).min(n);
    let mut scores = vec![0.0; n];
    for &i in &order[..used] {
        let w = eig.values[i].abs();
        for (j, s) in scores.iter_mut().enumerate() {
            let phi = eig.vectors[(j, i)];
            *s += w * phi * phi;
        }
    }
    let leading_vectors = (keep > 0).then(|| {
        order
            .iter()
            .take(keep)
            .map(|&i| eig.vectors.column(i).iter().copied().collect())
            .collect()
    });
    FeatureScore {
        scores,
        eigenvalues: eig.values.iter().copied().collect(),
        leading_vectors,
    }
}

/// The two class kernels after scale selection and optional normalization.
pub fn class_kernels(data: &DataMatrix, config: &ManifestConfig) -> Result<(KernelMatrix, KernelMatrix)> {
    let (first, second) = split_by_class(data).at(Stage::Split)?;
    let build = |class: &DataMatrix| -> Result<KernelMatrix> {
        let x = class.samples();
        let scale = select_scale(x, config.scale.percentile, config.scale.factor).at(Stage::Scale)?;
        let k = build_rbf_kernel(x, scale).at(Stage::Kernel)?;
        normalize_symmetric(&k, config.normalize_iters).at(Stage::Normalize)
    };
    Ok((build(&first)?, build(&second)?))
}

/// Mean and difference operators of two kernels.
#[derive(Debug, Clone)]
pub struct Operators {
    pub mean: SymMatrix,
    pub difference: SymMatrix,
    pub path: GeometryPath,
    pub spsd: Option<SpsdDiagnostics>,
}

fn spd_operators(k1: &SymMatrix, k2: &SymMatrix) -> Result<Operators> {
    let d = difference_operator(&SpdMatrix::new(k1.clone())?, &SpdMatrix::new(k2.clone())?)?;
    let (difference, mean) = d.into_parts();
    Ok(Operators {
        mean: mean.as_sym().clone(),
        difference,
        path: GeometryPath::Spd,
        spsd: None,
    })
}

fn spsd_operators(k1: &SymMatrix, k2: &SymMatrix, rank_tol: f64) -> Result<Operators> {
    let out = spsd_difference_with_tol(k1, k2, rank_tol)?;
    Ok(Operators {
        mean: out.mean,
        difference: out.difference,
        path: GeometryPath::Spsd,
        spsd: Some(out.diagnostics),
    })
}

pub fn compose_operators(k1: &SymMatrix, k2: &SymMatrix, config: &ManifestConfig) -> Result<Operators> {
    match config.geometry {
        GeometryMode::SpdOnly => spd_operators(k1, k2),
        GeometryMode::ForceSpsd => spsd_operators(k1, k2, config.rank_tol),
        GeometryMode::Auto => match spd_operators(k1, k2) {
            Err(Error::NotPositiveDefinite { .. }) => spsd_operators(k1, k2, config.rank_tol),
            other => other,
        },
    }
    .at(Stage::Geometry)
}

#[derive(Debug, Clone)]
pub struct ManifestRun {
    pub score: FeatureScore,
    pub kernel_scales: [f64; 2],
    pub path: GeometryPath,
    pub spsd: Option<SpsdDiagnostics>,
    pub mean: SymMatrix,
    pub difference: SymMatrix,
}

/// Kernels per class, Riemannian mean and difference, spectral score.
pub fn run_manifest(data: &DataMatrix, config: &ManifestConfig) -> Result<ManifestRun> {
    let (k1, k2) = class_kernels(data, config)?;
    let ops = compose_operators(&k1.matrix, &k2.matrix, config)?;
    let score = manifest_score_with(&ops.difference, config.eig_cutoff, config.leading_vectors).at(Stage::Score)?;
    Ok(ManifestRun {
        score,
        kernel_scales: [k1.scale, k2.scale],
        path: ops.path,
        spsd: ops.spsd,
        mean: ops.mean,
        difference: ops.difference,
    })
}

/// Leading `m` eigenpairs of the mean operator `M`.
pub fn mean_operator_eigvecs(data: &DataMatrix, config: &ManifestConfig, m: usize) -> Result<EigenSystem> {
    if m == 0 || m > data.n_features() {
        return Err(Error::invalid(format!(
            "requested {m} eigenvectors of a {}-dimensional operator",
            data.n_features()
        )));
    }
    let (k1, k2) = class_kernels(data, config)?;
    let ops = compose_operators(&k1.matrix, &k2.matrix, config)?;
    Ok(sym_eig(&ops.mean)?.leading(m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelectionResult {
    pub ranked_indices: Vec<usize>,
    pub selected: Vec<usize>,
    pub k: usize,
}

/// Feature indices by descending score; ties by ascending index.
pub fn rank_features(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx
}

pub fn select_top_k(scores: &[f64], k: usize) -> Result<SelectionResult> {
    if k == 0 || k > scores.len() {
        return Err(Error::invalid(format!("top-k of {k} outside 1..={}", scores.len())));
    }
    let ranked_indices = rank_features(scores);
    let selected = ranked_indices[..k].to_vec();
    Ok(SelectionResult {
        ranked_indices,
        selected,
        k,
    })
}

/// Min-max normalization to `[0, 1]`; constant vectors map to zeros.
pub fn min_max_normalize(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 0.0) {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - lo) / span).collect()
}

/// Sum of the min-max normalized score vectors.
pub fn combine_scores(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "score lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.iter().chain(b).any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::invalid("scores must be finite and nonnegative"));
    }
    Ok(min_max_normalize(a)
        .into_iter()
        .zip(min_max_normalize(b))
        .map(|(x, y)| x + y)
        .collect())
}
