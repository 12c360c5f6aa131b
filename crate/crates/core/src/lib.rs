//! Supervised filter feature selection on the manifold of feature kernels.
//!
//! Each class gets an RBF kernel over its feature columns. The two kernels
//! are combined on the SPD manifold (or the fixed-rank SPSD manifold when a
//! kernel is singular) into a midpoint `M` and a difference operator
//! `D = Log_M(K1)`. Features are scored by the diagonal of `|D|`, i.e.
//! `r(j) = Σᵢ |λᵢ| φᵢ(j)²`.
//!
//! ```
//! use manifest_core::{datasets, run_manifest, select_top_k, ManifestConfig, ScalePolicy};
//!
//! let data = datasets::gen_xor(&datasets::GeneratorConfig::xor(7)).unwrap();
//! let config = ManifestConfig {
//!     scale: ScalePolicy { percentile: 50.0, factor: 0.1 },
//!     ..ManifestConfig::default()
//! };
//! let run = run_manifest(&data, &config).unwrap();
//! let top = select_top_k(&run.score.scores, 2).unwrap();
//! assert_eq!(top.selected.len(), 2);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod datasets;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod scoring;
pub mod spd;
pub mod spsd;
pub mod theory;

pub use benchmark::{BenchmarkReport, HypercubeBenchConfig, Method, MethodSummary, XorBenchConfig};
pub use datasets::{ClusterCovariance, GeneratorConfig, HypercubeData, LabelColumn};
pub use error::{Error, Result, Stage};
pub use kernels::{build_rbf_kernel, normalize_symmetric, select_scale, split_by_class, DataMatrix, KernelMatrix};
pub use linalg::{sym_eig, sym_fn, thin_svd, EigenSystem, OrthonormalFrame, SymMatrix};
pub use scoring::{
    combine_scores, manifest_score, manifest_score_with, mean_operator_eigvecs, run_manifest, score_from_eigen,
    select_top_k, FeatureScore, GeometryMode, GeometryPath, ManifestConfig, ManifestRun, ScalePolicy, SelectionResult,
};
pub use spd::{SpdMatrix, TangentMatrix};
pub use spsd::{GrassmannPoint, StructurePair};
pub use theory::BoundReport;

/// Crate version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
