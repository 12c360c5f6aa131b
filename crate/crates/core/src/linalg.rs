//! Dense symmetric linear algebra: eigendecomposition, spectral matrix
//! functions and thin SVD.
//!
//! Every matrix function used by the geometry modules goes through
//! [`sym_fn`] or [`spd_fn`], so there is exactly one place where spectra
//! are computed, sorted and sign-normalized.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative eigenvalue floor below which a matrix is not treated as positive
/// definite by [`spd_fn`].
pub const SPD_FLOOR: f64 = 1e-12;

/// Entries below this magnitude are skipped when choosing the sign of a
/// singular/eigen vector.
const SIGN_EPS: f64 = 1e-12;

/// A dense symmetric matrix. Construction symmetrizes the input as `(A + Aᵀ)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid(format!(
                "symmetric matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::invalid("symmetric matrix must be non-empty"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes without validation. Callers guarantee a square, finite input.
    pub(crate) fn symmetrize(mut m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn identity(dim: usize) -> Self {
        SymMatrix(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        SymMatrix(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::invalid("entry count does not match dimension"));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `Q · self · Qᵀ` for any conformable `Q`.
    pub fn congruence(&self, q: &DMatrix<f64>) -> SymMatrix {
        SymMatrix::symmetrize(q * &self.0 * q.transpose())
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix(&self.0 * c)
    }

    pub fn eig(&self) -> Result<EigenSystem> {
        sym_eig(self)
    }
}

impl std::ops::Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Eigenvalues sorted by descending signed value, paired with orthonormal
/// eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    pub fn min_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `V · diag(f(λ)) · Vᵀ`.
    pub fn compose(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        SymMatrix::symmetrize(scaled * self.vectors.transpose())
    }

    /// Indices of eigenpairs ordered by descending `|λ|`, ties by index.
    pub fn order_by_magnitude(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by(|&a, &b| self.values[b].abs().total_cmp(&self.values[a].abs()).then(a.cmp(&b)));
        idx
    }

    /// First `m` eigenpairs in the stored (descending signed) order.
    pub fn leading(&self, m: usize) -> EigenSystem {
        let m = m.min(self.dim());
        EigenSystem {
            values: self.values.rows(0, m).into_owned(),
            vectors: self.vectors.columns(0, m).into_owned(),
        }
    }
}

/// Flips `v` so its first entry with magnitude above [`SIGN_EPS`] is positive.
/// Returns whether a flip happened.
fn normalize_sign(mut v: nalgebra::DVectorViewMut<'_, f64>) -> bool {
    let pivot = v.iter().copied().find(|x| x.abs() > SIGN_EPS).unwrap_or(0.0);
    if pivot < 0.0 {
        v.neg_mut();
        true
    } else {
        false
    }
}

pub fn sym_eig(a: &SymMatrix) -> Result<EigenSystem> {
    if a.0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let n = a.dim();
    let eig = SymmetricEigen::new(a.0.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
        normalize_sign(vectors.column_mut(dst));
    }
    Ok(EigenSystem { values, vectors })
}

/// Applies a scalar function to the spectrum of `a`.
///
/// Fails with `InvalidInput` if `f` yields a non-finite value.
pub fn sym_fn(a: &SymMatrix, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let eig = sym_eig(a)?;
    apply_checked(&eig, f)
}

fn apply_checked(eig: &EigenSystem, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    if let Some(&bad) = eig.values.iter().find(|&&l| !f(l).is_finite()) {
        return Err(Error::invalid(format!(
            "matrix function is not finite at eigenvalue {bad:e}"
        )));
    }
    Ok(eig.compose(f))
}

/// Checks that every eigenvalue exceeds `SPD_FLOOR × λ_max`.
pub fn check_positive_definite(eig: &EigenSystem) -> Result<()> {
    let max = eig.max_value();
    let min = eig.min_value();
    let threshold = if max > 0.0 { SPD_FLOOR * max } else { 0.0 };
    if max <= 0.0 || min <= threshold {
        return Err(Error::NotPositiveDefinite {
            eigenvalue: min,
            threshold,
        });
    }
    Ok(())
}

/// [`sym_fn`] restricted to positive definite inputs, for functions such as
/// `log` and `x^-1/2` that are only defined on the positive axis.
pub fn spd_fn(a: &SymMatrix, f: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    let eig = sym_eig(a)?;
    check_positive_definite(&eig)?;
    apply_checked(&eig, f)
}

pub fn sym_exp(a: &SymMatrix) -> Result<SymMatrix> {
    sym_fn(a, f64::exp)
}

pub fn spd_log(a: &SymMatrix) -> Result<SymMatrix> {
    spd_fn(a, f64::ln)
}

pub fn spd_sqrt(a: &SymMatrix) -> Result<SymMatrix> {
    spd_fn(a, f64::sqrt)
}

pub fn spd_pow(a: &SymMatrix, t: f64) -> Result<SymMatrix> {
    spd_fn(a, |l| l.powf(t))
}

/// A `d × k` matrix with orthonormal columns (a point on the Stiefel manifold).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame(DMatrix<f64>);

impl OrthonormalFrame {
    /// Wraps `m` after checking `mᵀm = I` to within `tol` (Frobenius).
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.ncols() > m.nrows() {
            return Err(Error::invalid(format!(
                "frame has more columns ({}) than rows ({})",
                m.ncols(),
                m.nrows()
            )));
        }
        let k = m.ncols();
        let err = (m.transpose() * &m - DMatrix::<f64>::identity(k, k)).norm();
        if !(err <= tol) {
            return Err(Error::invalid(format!(
                "frame columns are not orthonormal (error {err:e})"
            )));
        }
        Ok(OrthonormalFrame(m))
    }

    pub(crate) fn new_unchecked(m: DMatrix<f64>) -> Self {
        OrthonormalFrame(m)
    }

    /// The first `k` columns of the `d × d` identity.
    pub fn canonical(d: usize, k: usize) -> Self {
        OrthonormalFrame(DMatrix::identity(d, k))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Orthogonal projector `G Gᵀ` onto the column span.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.0 * self.0.transpose()
    }

    /// `‖GᵀG − I‖_F`.
    pub fn orthonormality_error(&self) -> f64 {
        let k = self.cols();
        (self.0.transpose() * &self.0 - DMatrix::<f64>::identity(k, k)).norm()
    }
}

/// Thin SVD `A = U · diag(s) · Vᵀ` with `s` descending.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: OrthonormalFrame,
    pub singular_values: DVector<f64>,
    pub v_t: DMatrix<f64>,
}

impl ThinSvd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.as_matrix().clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * &self.v_t
    }
}

/// Thin SVD of a `d × k` matrix with `k ≤ d`, by one-sided Jacobi rotations.
///
/// nalgebra's bidiagonal SVD loses accuracy on clustered singular values,
/// which is the normal case for `G2ᵀG1` when two subspaces intersect.
///
/// Sign convention: each right singular vector has its first significant
/// entry positive and the left vector follows; for zero singular values the
/// left vector is an orthonormal completion with its own sign normalized.
pub fn thin_svd(a: &DMatrix<f64>) -> Result<ThinSvd> {
    let (m, n) = a.shape();
    if n > m {
        return Err(Error::invalid(format!("thin_svd expects rows >= cols, got {m}x{n}")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged {
            break;
        }
        converged = true;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        return Err(Error::invalid("one-sided Jacobi SVD did not converge"));
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let scale = norms.iter().copied().fold(0.0_f64, f64::max).max(1.0);
    let s = DVector::from_iterator(n, order.iter().map(|&j| norms[j]));
    let mut u = DMatrix::<f64>::zeros(m, n);
    let mut vs = DMatrix::<f64>::zeros(n, n);
    let mut null_cols = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        vs.set_column(dst, &v.column(src));
        if s[dst] > SIGN_EPS * scale {
            u.set_column(dst, &(w.column(src) / s[dst]));
        } else {
            null_cols.push(dst);
        }
    }
    complete_basis(&mut u, &null_cols);
    for j in 0..n {
        if normalize_sign(vs.column_mut(j)) {
            u.column_mut(j).neg_mut();
        }
        if null_cols.contains(&j) {
            normalize_sign(u.column_mut(j));
        }
    }
    Ok(ThinSvd {
        u: OrthonormalFrame::new_unchecked(u),
        singular_values: s,
        v_t: vs.transpose(),
    })
}

const JACOBI_MAX_SWEEPS: usize = 60;

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (x, y) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * x - s * y;
        m[(i, q)] = s * x + c * y;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to every
/// other column, trying canonical basis vectors in order.
fn complete_basis(u: &mut DMatrix<f64>, cols: &[usize]) {
    let m = u.nrows();
    let mut filled: Vec<usize> = (0..u.ncols()).filter(|j| !cols.contains(j)).collect();
    let mut candidate = 0;
    for &j in cols {
        while candidate < m {
            let mut e = DVector::<f64>::zeros(m);
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &k in &filled {
                    let proj = u.column(k).dot(&e);
                    e.axpy(-proj, &u.column(k), 1.0);
                }
            }
            let norm = e.norm();
            if norm > 1e-6 {
                u.set_column(j, &(e / norm));
                filled.push(j);
                break;
            }
        }
    }
}

/// `‖A − B‖_F / ‖B‖_F`, falling back to the absolute error when `B = 0`.
pub fn relative_error(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let diff = (a - b).norm();
    let nb = b.norm();
    if nb > 0.0 {
        diff / nb
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)).qr().q()
    }

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        SymMatrix::new(&m + m.transpose()).unwrap()
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        SymMatrix::new(&b * b.transpose() + DMatrix::identity(n, n) * 0.5).unwrap()
    }

    #[test]
    fn construction_symmetrizes() {
        let a = SymMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 4.0, 3.0])).unwrap();
        assert_eq!(a[(0, 1)], 3.0);
        assert_eq!(a[(1, 0)], 3.0);
    }

    #[test]
    fn rejects_non_finite_and_non_square() {
        assert!(matches!(
            SymMatrix::new(DMatrix::from_element(2, 2, f64::NAN)),
            Err(Error::InvalidInput(_))
        ));
        assert!(SymMatrix::new(DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn eig_identity() {
        let e = sym_eig(&SymMatrix::identity(3)).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 1.0, 1.0]);
        let err = (e.vectors.transpose() * &e.vectors - DMatrix::<f64>::identity(3, 3)).norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn eig_diagonal_is_sorted_with_unit_vectors() {
        let e = sym_eig(&SymMatrix::from_diagonal(&[1.0, 3.0]).unwrap()).unwrap();
        assert_eq!(e.values.as_slice(), &[3.0, 1.0]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-14);
        // sign convention: first significant entry positive
        assert!(e.vectors[(1, 0)] > 0.0 && e.vectors[(0, 1)] > 0.0);
    }

    #[test]
    fn eig_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_sym(&mut rng, 5);
            let e = sym_eig(&a).unwrap();
            let rec = e.compose(|l| l);
            assert!(relative_error(rec.as_matrix(), a.as_matrix()) < 1e-10);
            for w in e.values.as_slice().windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn eig_rejects_nan_via_unchecked_path() {
        let a = SymMatrix(DMatrix::from_element(2, 2, f64::INFINITY));
        assert!(matches!(sym_eig(&a), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn sqrt_of_diagonal() {
        let a = SymMatrix::from_diagonal(&[4.0, 9.0]).unwrap();
        let r = spd_sqrt(&a).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0]));
        assert!((r.as_matrix() - expect).norm() < 1e-14);
    }

    #[test]
    fn log_of_identity_is_zero() {
        let r = spd_log(&SymMatrix::identity(4)).unwrap();
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn log_exp_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_spd(&mut rng, 6);
            let back = sym_exp(&spd_log(&a).unwrap()).unwrap();
            assert!(relative_error(back.as_matrix(), a.as_matrix()) < 1e-8);
        }
    }

    #[test]
    fn log_of_singular_matrix_reports_eigenvalue() {
        let a = SymMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        match spd_log(&a) {
            Err(Error::NotPositiveDefinite { eigenvalue, .. }) => assert_eq!(eigenvalue, 0.0),
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
        let b = SymMatrix::from_diagonal(&[1.0, 1e-13]).unwrap();
        assert!(matches!(
            spd_fn(&b, |l| 1.0 / l.sqrt()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn identity_function_is_exact_enough() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_sym(&mut rng, 8);
        let r = sym_fn(&a, |l| l).unwrap();
        assert!((r.as_matrix() - a.as_matrix()).norm() < 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn sym_fn_rejects_non_finite_output() {
        let a = SymMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(sym_fn(&a, f64::ln), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn svd_of_identity_frame() {
        let svd = thin_svd(&DMatrix::identity(5, 3)).unwrap();
        for s in svd.singular_values.iter() {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_rank_one() {
        let u = DVector::from_vec(vec![1.0, 2.0, 2.0]);
        let v = DVector::from_vec(vec![3.0, 4.0]);
        let svd = thin_svd(&(&u * v.transpose())).unwrap();
        assert!((svd.singular_values[0] - 15.0).abs() < 1e-12);
        assert!(svd.singular_values[1].abs() < 1e-12);
    }

    #[test]
    fn svd_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = DMatrix::from_fn(6, 3, |_, _| rng.random_range(-1.0..1.0));
            let svd = thin_svd(&a).unwrap();
            assert!(relative_error(&svd.reconstruct(), &a) < 1e-10);
            assert!(svd.u.orthonormality_error() < 1e-10);
            let s = svd.singular_values.as_slice();
            assert!(s.windows(2).all(|w| w[0] >= w[1]) && s.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn svd_clustered_singular_values() {
        // G2ᵀG1 for subspaces sharing two directions: singular values {1, 1, c}
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let q1 = random_orthogonal(&mut rng, 3);
            let q2 = random_orthogonal(&mut rng, 3);
            let c: f64 = rng.random_range(0.0..1.0);
            let a = &q1 * DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0 - 1e-16, c])) * q2.transpose();
            let svd = thin_svd(&a).unwrap();
            assert!(relative_error(&svd.reconstruct(), &a) < 1e-13);
            assert!((svd.singular_values[2] - c).abs() < 1e-13);
            assert!(svd.u.orthonormality_error() < 1e-13);
        }
    }

    #[test]
    fn svd_completes_null_directions() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let svd = thin_svd(&a).unwrap();
        assert_eq!(svd.singular_values.as_slice(), &[1.0, 0.0]);
        assert!(svd.u.orthonormality_error() < 1e-15);
        assert!(relative_error(&svd.reconstruct(), &a) < 1e-15);
    }

    #[test]
    fn svd_rejects_wide_matrices() {
        assert!(thin_svd(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn frame_validation() {
        assert!(OrthonormalFrame::new(DMatrix::identity(4, 2), 1e-10).is_ok());
        assert!(OrthonormalFrame::new(DMatrix::from_element(4, 2, 1.0), 1e-10).is_err());
    }
}
