//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so the
//! lines are always printed; exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use manifest_core::benchmark::{
    run_hypercube_benchmark, run_xor_benchmark, HypercubeBenchConfig, Method, XorBenchConfig,
};
use manifest_core::spd::{difference_operator, exp_map, geodesic, log_map, midpoint_mean};
use manifest_core::spsd::{spsd_difference, spsd_difference_with_tol};
use manifest_core::theory::{prop1_bound, prop2_bound};
use manifest_core::{run_manifest, DataMatrix, ManifestConfig, SpdMatrix, SymMatrix};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

use common::*;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn spd(m: &DMatrix<f64>) -> SpdMatrix {
    SpdMatrix::new(SymMatrix::new(m.clone()).unwrap()).unwrap()
}

fn xor_benchmark() -> Outcome {
    let start = Instant::now();
    let report = run_xor_benchmark(&XorBenchConfig::standard(0)).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mean = |m| report.summary(m).unwrap().mean;
    let (man, fis, pea) = (mean(Method::Manifest), mean(Method::Fisher), mean(Method::Pearson));
    outcome(
        man >= 1.9 && fis <= 0.5 && pea <= 0.5 && elapsed < 60.0,
        format!("manifest {man:.2}/2, fisher {fis:.2}/2, pearson {pea:.2}/2, {elapsed:.1}s"),
    )
}

fn hypercube_benchmark() -> Outcome {
    let start = Instant::now();
    let plain = run_hypercube_benchmark(&HypercubeBenchConfig::standard(0)).unwrap();
    let mut normalized_cfg = HypercubeBenchConfig::standard(0);
    normalized_cfg.manifest.normalize_iters = 3;
    normalized_cfg.methods = vec![Method::Manifest];
    let normalized = run_hypercube_benchmark(&normalized_cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let s = plain.summary(Method::Manifest).unwrap();
    let n = normalized.summary(Method::Manifest).unwrap();
    outcome(
        s.mean >= 8.0 && s.q25 >= 7.0 && n.mean >= s.mean - 0.3 && elapsed < 600.0,
        format!(
            "iters0 mean {:.2}/10 q25 {}, iters3 mean {:.2}/10, fisher {:.2}, {elapsed:.1}s",
            s.mean,
            s.q25,
            n.mean,
            plain.summary(Method::Fisher).unwrap().mean
        ),
    )
}

fn geometry_identities() -> Outcome {
    let mut r = rng(300);
    let mut worst = [0.0f64; 5];
    let trials = 200;
    for _ in 0..trials {
        let d = r.random_range(2..=20);
        let a = random_spd(&mut r, d, 1e4);
        let b = random_spd(&mut r, d, 1e4);
        let (ka, kb) = (spd(&a), spd(&b));

        let g0 = geodesic(&ka, &kb, 0.0).unwrap();
        let g1 = geodesic(&ka, &kb, 1.0).unwrap();
        worst[0] = worst[0].max(rel_err(g0.as_matrix(), &a).max(rel_err(g1.as_matrix(), &b)));

        let mab = midpoint_mean(&ka, &kb).unwrap();
        let mba = midpoint_mean(&kb, &ka).unwrap();
        worst[1] = worst[1].max(rel_err(mab.as_matrix(), mba.as_matrix()));

        let s = log_map(&mab, &ka).unwrap();
        let back = exp_map(&mab, &s).unwrap();
        worst[2] = worst[2].max(rel_err(back.as_matrix(), &a));

        let s2 = log_map(&mab, &kb).unwrap();
        worst[3] = worst[3].max(rel_err(&-s2.as_matrix(), s.as_matrix()));

        // the midpoint solves M A⁻¹ M = B
        let riccati = mab.as_matrix() * a.clone().try_inverse().unwrap() * mab.as_matrix();
        worst[4] = worst[4].max(rel_err(&riccati, &b));
    }
    outcome(
        worst[0] < 1e-9 && worst[1] < 1e-8 && worst[2] < 1e-8 && worst[3] < 1e-8,
        format!(
            "{trials} pairs: endpoints {:.1e}, symmetry {:.1e}, round-trip {:.1e}, antisymmetry {:.1e} (riccati {:.1e})",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn spectral_law() -> Outcome {
    let mut r = rng(400);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let d = r.random_range(2..=20);
        let v = random_orthogonal(&mut r, d, d);
        let l1 = spread_spectrum(&mut r, d, 0.05, 20.0);
        let l2 = spread_spectrum(&mut r, d, 0.05, 20.0);
        let dm = difference_operator(&spd(&compose(&v, &l1)), &spd(&compose(&v, &l2))).unwrap();
        let got = sorted_desc(jacobi_eig(dm.as_matrix()).0);
        let want = sorted_desc(
            l1.iter()
                .zip(&l2)
                .map(|(a, b)| 0.5 * (a * b).sqrt() * (a.ln() - b.ln()))
                .collect(),
        );
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    outcome(
        worst < 1e-8,
        format!("100 commuting pairs: max eigenvalue error {worst:.1e}"),
    )
}

fn spsd_consistency() -> Outcome {
    let mut r = rng(500);
    let mut worst_full = 0.0f64;
    for _ in 0..50 {
        let d = r.random_range(2..=12);
        let a = random_spd(&mut r, d, 1e3);
        let b = random_spd(&mut r, d, 1e3);
        let spd_d = difference_operator(&spd(&a), &spd(&b)).unwrap();
        let spsd_d = spsd_difference(&SymMatrix::new(a).unwrap(), &SymMatrix::new(b).unwrap()).unwrap();
        worst_full = worst_full.max(rel_err(spsd_d.as_matrix(), spd_d.as_matrix()));
    }
    let mut worst_shared = 0.0f64;
    for _ in 0..50 {
        let d = r.random_range(3..=14);
        let k = r.random_range(1..d);
        let g = random_orthogonal(&mut r, d, k);
        let p1 = random_spd(&mut r, k, 1e3);
        let p2 = random_spd(&mut r, k, 1e3);
        let k1 = &g * &p1 * g.transpose();
        let k2 = &g * &p2 * g.transpose();
        let got = spsd_difference_with_tol(&SymMatrix::new(k1).unwrap(), &SymMatrix::new(k2).unwrap(), 1e-10).unwrap();
        let want = &g * oracle_difference(&p1, &p2) * g.transpose();
        worst_shared = worst_shared.max(rel_err(got.difference.as_matrix(), &want));
    }
    outcome(
        worst_full < 1e-6 && worst_shared < 1e-6,
        format!("50 full-rank pairs {worst_full:.1e}, 50 shared column-space pairs {worst_shared:.1e}"),
    )
}

fn score_properties() -> Outcome {
    let mut r = rng(600);
    let cfg = ManifestConfig::default();
    let (mut neg, mut nuclear, mut swap, mut perm, mut ident, mut oracle) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let trials = 100;
    for _ in 0..trials {
        let d = r.random_range(2..=10);
        let per_class = r.random_range(8..=20);
        let (x, labels) = random_labeled(&mut r, per_class, d);
        let data = DataMatrix::new(x.clone(), labels.clone(), None).unwrap();
        let run = run_manifest(&data, &cfg).unwrap();
        let s = &run.score.scores;

        neg = neg.min(s.iter().copied().fold(f64::INFINITY, f64::min));

        let nuc: f64 = jacobi_eig(run.difference.as_matrix()).0.iter().map(|l| l.abs()).sum();
        nuclear = nuclear.max((s.iter().sum::<f64>() - nuc).abs() / nuc.max(1.0));

        let swapped = run_manifest(&data.with_swapped_labels(), &cfg).unwrap().score.scores;
        swap = swap.max(s.iter().zip(&swapped).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));

        let mut order: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            order.swap(i, r.random_range(0..=i));
        }
        let permuted = run_manifest(&data.permute_features(&order).unwrap(), &cfg)
            .unwrap()
            .score
            .scores;
        let scale = s.iter().copied().fold(1.0, f64::max);
        perm = perm.max(
            (0..d)
                .map(|j| (permuted[j] - s[order[j]]).abs() / scale)
                .fold(0.0, f64::max),
        );

        // class 1 duplicates class 0 row for row
        let half: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0).collect();
        let rows: Vec<usize> = half.iter().chain(half.iter()).copied().collect();
        let twin_labels: Vec<u8> = (0..rows.len()).map(|i| (i >= half.len()) as u8).collect();
        let twin = DataMatrix::new(
            DMatrix::from_fn(rows.len(), d, |i, j| x[(rows[i], j)]),
            twin_labels,
            None,
        )
        .unwrap();
        let zero = run_manifest(&twin, &cfg).unwrap().score.scores;
        ident = ident.max(zero.iter().copied().fold(0.0, f64::max));

        let (xa, xb) = (DMatrix::from_fn(half.len(), d, |i, j| x[(half[i], j)]), {
            let other: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
            DMatrix::from_fn(other.len(), d, |i, j| x[(other[i], j)])
        });
        let ka = oracle_rbf(&xa, run.kernel_scales[0]);
        let kb = oracle_rbf(&xb, run.kernel_scales[1]);
        let want = oracle_score(&oracle_difference(&ka, &kb));
        let norm = want.iter().copied().fold(1.0, f64::max);
        oracle = oracle.max(
            s.iter()
                .zip(&want)
                .map(|(a, b)| (a - b).abs() / norm)
                .fold(0.0, f64::max),
        );
    }
    outcome(
        neg >= 0.0 && nuclear < 1e-8 && swap < 1e-8 && perm < 1e-10 && ident < 1e-10,
        format!(
            "{trials} trials: min score {neg:.1e}, nuclear {nuclear:.1e}, swap {swap:.1e}, permutation {perm:.1e}, identical classes {ident:.1e} (vs oracle {oracle:.1e})"
        ),
    )
}

fn bounds() -> Outcome {
    let mut r = rng(700);
    let (mut violations1, mut checked1, mut violations2, mut checked2) = (0, 0, 0, 0);
    let mut min_slack = f64::INFINITY;
    for _ in 0..100 {
        let d = r.random_range(3..=15);
        let (x, _) = random_labeled(&mut r, 20, d);
        let k1 = oracle_rbf(&x, 4.0);
        let (l1, v) = jacobi_eig(&k1);
        let l2: Vec<f64> = l1.iter().map(|l| l * r.random_range(0.25..4.0)).collect();
        let k2 = compose(&v, &l2);
        let k1 = compose(&v, &l1);
        let (s1, s2) = (SymMatrix::new(k1.clone()).unwrap(), SymMatrix::new(k2.clone()).unwrap());
        let dm = difference_operator(&spd(&k1), &spd(&k2)).unwrap();
        for i in 0..d {
            let phi = v.column(i).clone_owned();
            let report = prop1_bound(&s1, &s2, &phi).unwrap();
            // λ of the computed D along φ against the same right-hand side
            let actual = phi.dot(&(dm.as_matrix() * &phi)).abs();
            checked1 += 1;
            if !report.satisfied || actual > report.rhs * (1.0 + 1e-9) {
                violations1 += 1;
            }
            min_slack = min_slack.min(report.slack);
        }
    }
    let eps = 1e-3;
    for _ in 0..50 {
        let d = r.random_range(3..=15);
        let (x, _) = random_labeled(&mut r, 20, d);
        let (l1, v) = jacobi_eig(&oracle_rbf(&x, 4.0));
        // small rotation: W = V exp(S) with ‖S‖₂ < eps
        let raw = DMatrix::<f64>::from_fn(d, d, |_, _| r.random_range(-1.0..1.0));
        let skew = &raw - raw.transpose();
        let sigma = skew.clone().singular_values().max();
        let skew = skew * (0.9 * eps / sigma);
        let rot = skew.exp();
        let w = &v * rot;
        let l2: Vec<f64> = l1.iter().map(|l| l * r.random_range(0.5..2.0)).collect();
        let (k1, k2) = (compose(&v, &l1), compose(&w, &l2));
        let (s1, s2) = (SymMatrix::new(k1).unwrap(), SymMatrix::new(k2).unwrap());
        for i in 0..d {
            let (p1, p2): (DVector<f64>, DVector<f64>) = (v.column(i).clone_owned(), w.column(i).clone_owned());
            let report = prop2_bound(&s1, &s2, &p1, &p2, eps).unwrap();
            checked2 += 1;
            if !report.satisfied {
                violations2 += 1;
            }
        }
    }
    outcome(
        violations1 == 0 && violations2 == 0,
        format!(
            "prop1 {violations1} violations in {checked1} eigenvectors over 100 trials (min slack {min_slack:.1e}); prop2 {violations2} violations in {checked2} over 50 trials at eps 1e-3"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 xor-100 selection", xor_benchmark),
        ("2 hypercube selection", hypercube_benchmark),
        ("3 spd geometry identities", geometry_identities),
        ("4 spectral law on commuting pairs", spectral_law),
        ("5 spsd consistency", spsd_consistency),
        ("6 score properties", score_properties),
        ("7 eigenvalue bounds", bounds),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "SKIP criterion 8 external-dataset accuracy tables: needs downloaded datasets and a classifier tuning loop"
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
