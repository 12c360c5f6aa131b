//! Test-side oracles that do not go through the library's linear algebra.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cyclic Jacobi eigensolver. Returns unsorted `(values, vectors)`.
pub fn jacobi_eig(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let scale: f64 = m.iter().map(|x| x * x).sum();
        if off <= 1e-30 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| m[(i, i)]).collect(), v)
}

/// `V f(Λ) Vᵀ` via Jacobi.
pub fn oracle_fn(a: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let (w, v) = jacobi_eig(a);
    let fw = DMatrix::from_diagonal(&DVector::from_iterator(w.len(), w.into_iter().map(f)));
    &v * fw * v.transpose()
}

pub fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal(r: &mut impl Rng, n: usize, k: usize) -> DMatrix<f64> {
    loop {
        let mut q = DMatrix::<f64>::from_fn(n, k, |_, _| r.sample(StandardNormal));
        let mut ok = true;
        for j in 0..k {
            for _ in 0..2 {
                for i in 0..j {
                    let proj = q.column(i).dot(&q.column(j));
                    let qi = q.column(i).clone_owned();
                    q.column_mut(j).axpy(-proj, &qi, 1.0);
                }
            }
            let norm = q.column(j).norm();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            q.column_mut(j).scale_mut(1.0 / norm);
        }
        if ok {
            return q;
        }
    }
}

/// Log-uniform spectrum in `[lo, hi]` with both ends attained.
pub fn spread_spectrum(r: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut s: Vec<f64> = (0..n)
        .map(|_| (lo.ln() + r.random::<f64>() * (hi.ln() - lo.ln())).exp())
        .collect();
    if n >= 2 {
        s[0] = hi;
        s[1] = lo;
    }
    s
}

pub fn compose(v: &DMatrix<f64>, spectrum: &[f64]) -> DMatrix<f64> {
    let l = DMatrix::from_diagonal(&DVector::from_column_slice(spectrum));
    let m = v * l * v.transpose();
    (&m + m.transpose()) * 0.5
}

/// SPD matrix with condition number at most `cond`.
pub fn random_spd(r: &mut impl Rng, n: usize, cond: f64) -> DMatrix<f64> {
    let v = random_orthogonal(r, n, n);
    let hi = cond.sqrt();
    let s = spread_spectrum(r, n, 1.0 / hi, hi);
    compose(&v, &s)
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Textbook affine-invariant midpoint and difference, all functions by Jacobi.
pub fn oracle_mean(k1: &DMatrix<f64>, k2: &DMatrix<f64>) -> DMatrix<f64> {
    let h = oracle_fn(k1, f64::sqrt);
    let hi = oracle_fn(k1, |x| 1.0 / x.sqrt());
    let inner = &hi * k2 * &hi;
    let inner = (&inner + inner.transpose()) * 0.5;
    let m = &h * oracle_fn(&inner, f64::sqrt) * &h;
    (&m + m.transpose()) * 0.5
}

pub fn oracle_log_map(base: &DMatrix<f64>, k: &DMatrix<f64>) -> DMatrix<f64> {
    let h = oracle_fn(base, f64::sqrt);
    let hi = oracle_fn(base, |x| 1.0 / x.sqrt());
    let inner = &hi * k * &hi;
    let inner = (&inner + inner.transpose()) * 0.5;
    let s = &h * oracle_fn(&inner, f64::ln) * &h;
    (&s + s.transpose()) * 0.5
}

pub fn oracle_difference(k1: &DMatrix<f64>, k2: &DMatrix<f64>) -> DMatrix<f64> {
    oracle_log_map(&oracle_mean(k1, k2), k1)
}

/// `diag(|D|)` via Jacobi.
pub fn oracle_score(d: &DMatrix<f64>) -> Vec<f64> {
    let (w, v) = jacobi_eig(d);
    (0..d.nrows())
        .map(|j| (0..w.len()).map(|i| w[i].abs() * v[(j, i)] * v[(j, i)]).sum())
        .collect()
}

/// RBF kernel over the columns of `x`, written out as plain loops.
pub fn oracle_rbf(x: &DMatrix<f64>, scale: f64) -> DMatrix<f64> {
    let d = x.ncols();
    DMatrix::from_fn(d, d, |i, j| {
        let mut s = 0.0;
        for r in 0..x.nrows() {
            let t = x[(r, i)] - x[(r, j)];
            s += t * t;
        }
        (-s / (2.0 * scale * scale)).exp()
    })
}

/// Continuous two-class data with a few class-dependent features.
pub fn random_labeled(r: &mut impl Rng, n_per_class: usize, d: usize) -> (DMatrix<f64>, Vec<u8>) {
    let n = 2 * n_per_class;
    let shift: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let mut x = DMatrix::zeros(n, d);
    let mut labels = Vec::with_capacity(n);
    for row in 0..n {
        let label = (row % 2) as u8;
        labels.push(label);
        for c in 0..d {
            let z: f64 = r.sample(StandardNormal);
            x[(row, c)] = z + if label == 1 { shift[c] } else { 0.0 };
        }
    }
    (x, labels)
}
