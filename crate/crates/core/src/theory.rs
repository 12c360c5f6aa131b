//! Spectral predictions for the difference operator and the eigenvalue
//! bounds relating `|λ(D)|` to entrywise kernel differences.
//!
//! For a unit vector `φ` shared (exactly or approximately) by both kernels,
//! `λ(D) = ½ √(λ₁ λ₂) (log λ₁ − log λ₂)` where `λ_ℓ` are the Rayleigh
//! quotients, and
//!
//! ```text
//! |λ(D)| ≤ 2 Σᵢⱼ |K1[i,j] − K2[i,j]| |φ(i)| |φ(j)|  (+ 2 a ε² when approximate)
//! ```
//!
//! with `a` the largest row sum of `K2`.

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, SymMatrix};

/// Residual tolerance for accepting `φ` as an eigenvector.
pub const SHARED_RESIDUAL_TOL: f64 = 1e-6;

const UNIT_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub lambda_d_abs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        let slack = rhs - lhs;
        Self {
            lambda_d_abs: lhs,
            rhs,
            slack,
            satisfied: slack >= -1e-9 * rhs.max(1.0),
        }
    }
}

/// `½ √(l1 l2) (log l1 − log l2)`.
pub fn predicted_shared_eigenvalue(l1: f64, l2: f64) -> Result<f64> {
    if !(l1 > 0.0 && l2 > 0.0) || !l1.is_finite() || !l2.is_finite() {
        return Err(Error::invalid(format!(
            "eigenvalues must be positive, got {l1} and {l2}"
        )));
    }
    Ok(0.5 * (l1 * l2).sqrt() * (l1.ln() - l2.ln()))
}

fn rayleigh(k: &SymMatrix, phi: &DVector<f64>) -> f64 {
    phi.dot(&(k.as_matrix() * phi))
}

/// `‖Kφ − (φᵀKφ)φ‖`.
pub fn eigen_residual(k: &SymMatrix, phi: &DVector<f64>) -> f64 {
    let kphi = k.as_matrix() * phi;
    (kphi - phi * rayleigh(k, phi)).norm()
}

fn check_inputs(k1: &SymMatrix, k2: &SymMatrix, phi: &DVector<f64>) -> Result<()> {
    if k1.dim() != k2.dim() || phi.len() != k1.dim() {
        return Err(Error::invalid("kernel and vector dimensions differ"));
    }
    if (phi.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::invalid(format!("vector norm {} is not 1", phi.norm())));
    }
    Ok(())
}

/// `2 Σᵢⱼ |K1[i,j] − K2[i,j]| |φ(i)| |φ(j)|`.
pub fn entrywise_bound(k1: &SymMatrix, k2: &SymMatrix, phi: &DVector<f64>) -> f64 {
    let d = k1.dim();
    let mut acc = 0.0;
    for i in 0..d {
        let pi = phi[i].abs();
        for j in 0..d {
            acc += (k1[(i, j)] - k2[(i, j)]).abs() * pi * phi[j].abs();
        }
    }
    2.0 * acc
}

/// Largest row sum of `k`.
pub fn max_row_sum(k: &SymMatrix) -> f64 {
    let m = k.as_matrix();
    (0..m.nrows()).map(|i| m.row(i).sum()).fold(f64::NEG_INFINITY, f64::max)
}

fn predicted_abs(l1: f64, l2: f64) -> Result<f64> {
    Ok(predicted_shared_eigenvalue(l1, l2)?.abs())
}

/// Bound check for an exactly shared eigenvector `phi` of `k1` and `k2`.
pub fn prop1_bound(k1: &SymMatrix, k2: &SymMatrix, phi: &DVector<f64>) -> Result<BoundReport> {
    check_inputs(k1, k2, phi)?;
    for k in [k1, k2] {
        let residual = eigen_residual(k, phi);
        if residual > SHARED_RESIDUAL_TOL {
            return Err(Error::NotSharedEigenvector {
                residual,
                tolerance: SHARED_RESIDUAL_TOL,
            });
        }
    }
    let lhs = predicted_abs(rayleigh(k1, phi), rayleigh(k2, phi))?;
    Ok(BoundReport::new(lhs, entrywise_bound(k1, k2, phi)))
}

/// Bound check for an eigenvector `phi1` of `k1` and a nearby eigenvector
/// `phi2` of `k2` with `‖phi2 − phi1‖ ≤ eps`.
pub fn prop2_bound(
    k1: &SymMatrix,
    k2: &SymMatrix,
    phi1: &DVector<f64>,
    phi2: &DVector<f64>,
    eps: f64,
) -> Result<BoundReport> {
    check_inputs(k1, k2, phi1)?;
    check_inputs(k1, k2, phi2)?;
    let gap = (phi2 - phi1).norm();
    if gap > eps {
        return Err(Error::invalid(format!(
            "eigenvector perturbation {gap:e} exceeds eps {eps:e}"
        )));
    }
    for (k, phi) in [(k1, phi1), (k2, phi2)] {
        let residual = eigen_residual(k, phi);
        if residual > SHARED_RESIDUAL_TOL {
            return Err(Error::NotSharedEigenvector {
                residual,
                tolerance: SHARED_RESIDUAL_TOL,
            });
        }
    }
    let lhs = predicted_abs(rayleigh(k1, phi1), rayleigh(k2, phi2))?;
    let rhs = entrywise_bound(k1, k2, phi1) + 2.0 * max_row_sum(k2) * eps * eps;
    Ok(BoundReport::new(lhs, rhs))
}

/// Bound diagnostics for one eigenvector of `K1` and its best match in `K2`.
#[derive(Debug, Clone, Serialize)]
pub struct EigenPairBound {
    pub index: usize,
    pub lambda_first: f64,
    pub lambda_second: f64,
    pub predicted_lambda_d: f64,
    /// `‖φ₂ − φ₁‖` after sign alignment.
    pub eps: f64,
    pub shared: bool,
    pub report: BoundReport,
}

/// For each of the top `m` eigenvectors of `k1`, pairs it with the most
/// parallel eigenvector of `k2` and evaluates the approximate bound.
/// Pairs with non-positive eigenvalues are skipped.
pub fn kernel_bound_reports(k1: &SymMatrix, k2: &SymMatrix, m: usize) -> Result<Vec<EigenPairBound>> {
    if k1.dim() != k2.dim() {
        return Err(Error::invalid("kernel dimensions differ"));
    }
    let e1 = sym_eig(k1)?;
    let e2 = sym_eig(k2)?;
    let mut out = Vec::new();
    for i in 0..m.min(e1.dim()) {
        let phi1 = e1.vectors.column(i).into_owned();
        let (j, overlap) = (0..e2.dim())
            .map(|j| (j, e2.vectors.column(j).dot(&phi1)))
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()).then(b.0.cmp(&a.0)))
            .expect("non-empty spectrum");
        let mut phi2 = e2.vectors.column(j).into_owned();
        if overlap < 0.0 {
            phi2.neg_mut();
        }
        let (l1, l2) = (e1.values[i], e2.values[j]);
        if !(l1 > 0.0 && l2 > 0.0) {
            continue;
        }
        let eps = (&phi2 - &phi1).norm();
        let report = prop2_bound(k1, k2, &phi1, &phi2, eps)?;
        out.push(EigenPairBound {
            index: i,
            lambda_first: l1,
            lambda_second: l2,
            predicted_lambda_d: predicted_shared_eigenvalue(l1, l2)?,
            eps,
            shared: eps <= SHARED_RESIDUAL_TOL,
            report,
        });
    }
    Ok(out)
}
