//! Affine-invariant geometry on symmetric positive definite matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{check_positive_definite, spd_fn, sym_eig, sym_fn, EigenSystem, SymMatrix};

/// Smallest admissible `λ_min / λ_max`. Below this the SPSD path applies.
pub const MIN_EIG_RATIO: f64 = 1e-10;

/// A symmetric positive definite matrix with its cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    matrix: SymMatrix,
    eig: EigenSystem,
    min_eig_ratio: f64,
}

impl SpdMatrix {
    pub fn new(matrix: SymMatrix) -> Result<Self> {
        let eig = sym_eig(&matrix)?;
        check_positive_definite(&eig)?;
        let min_eig_ratio = eig.min_value() / eig.max_value();
        if min_eig_ratio < MIN_EIG_RATIO {
            return Err(Error::NotPositiveDefinite {
                eigenvalue: eig.min_value(),
                threshold: MIN_EIG_RATIO * eig.max_value(),
            });
        }
        Ok(Self {
            matrix,
            eig,
            min_eig_ratio,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.matrix.as_matrix()
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn min_eig_ratio(&self) -> f64 {
        self.min_eig_ratio
    }

    pub fn sqrt(&self) -> SymMatrix {
        self.eig.compose(f64::sqrt)
    }

    pub fn inv_sqrt(&self) -> SymMatrix {
        self.eig.compose(|l| 1.0 / l.sqrt())
    }

    pub fn pow(&self, t: f64) -> SymMatrix {
        self.eig.compose(|l| l.powf(t))
    }
}

/// A symmetric matrix in the tangent space at `base`.
#[derive(Debug, Clone)]
pub struct TangentMatrix {
    matrix: SymMatrix,
    base: SpdMatrix,
}

impl TangentMatrix {
    pub fn new(matrix: SymMatrix, base: SpdMatrix) -> Result<Self> {
        if matrix.dim() != base.dim() {
            return Err(Error::invalid("tangent vector and base point differ in dimension"));
        }
        Ok(Self { matrix, base })
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        self.matrix.as_matrix()
    }

    pub fn base_point(&self) -> &SpdMatrix {
        &self.base
    }

    pub fn into_parts(self) -> (SymMatrix, SpdMatrix) {
        (self.matrix, self.base)
    }
}

fn same_dim(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `γ(t) = K1^{1/2} (K1^{-1/2} K2 K1^{-1/2})^t K1^{1/2}`.
pub fn geodesic(k1: &SpdMatrix, k2: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    same_dim(k1, k2)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!("geodesic parameter {t} outside [0, 1]")));
    }
    let half = k1.sqrt();
    let inv_half = k1.inv_sqrt();
    let inner = k2.as_sym().congruence(inv_half.as_matrix());
    let powered = spd_fn(&inner, |l| l.powf(t))?;
    SpdMatrix::new(powered.congruence(half.as_matrix()))
}

/// Geodesic midpoint of `k1` and `k2`.
pub fn midpoint_mean(k1: &SpdMatrix, k2: &SpdMatrix) -> Result<SpdMatrix> {
    geodesic(k1, k2, 0.5)
}

/// `Log_M(K) = M^{1/2} log(M^{-1/2} K M^{-1/2}) M^{1/2}`.
pub fn log_map(base: &SpdMatrix, k: &SpdMatrix) -> Result<TangentMatrix> {
    same_dim(base, k)?;
    let inner = k.as_sym().congruence(base.inv_sqrt().as_matrix());
    let logged = spd_fn(&inner, f64::ln)?;
    TangentMatrix::new(logged.congruence(base.sqrt().as_matrix()), base.clone())
}

/// `Exp_M(S) = M^{1/2} exp(M^{-1/2} S M^{-1/2}) M^{1/2}`.
pub fn exp_map(base: &SpdMatrix, s: &TangentMatrix) -> Result<SpdMatrix> {
    if s.matrix.dim() != base.dim() {
        return Err(Error::invalid("tangent vector and base point differ in dimension"));
    }
    let inner = s.matrix.congruence(base.inv_sqrt().as_matrix());
    let exped = sym_fn(&inner, f64::exp)?;
    SpdMatrix::new(exped.congruence(base.sqrt().as_matrix()))
}

/// The difference operator `D = Log_M(K1)` with `M` the midpoint of `K1`, `K2`.
/// The returned tangent matrix carries `M` as its base point. Identical
/// inputs give an exact zero rather than rounding noise.
pub fn difference_operator(k1: &SpdMatrix, k2: &SpdMatrix) -> Result<TangentMatrix> {
    same_dim(k1, k2)?;
    if k1.as_matrix() == k2.as_matrix() {
        return TangentMatrix::new(SymMatrix::zeros(k1.dim()), k1.clone());
    }
    let mean = midpoint_mean(k1, k2)?;
    log_map(&mean, k1)
}
