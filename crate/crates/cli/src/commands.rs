use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use manifest_core::benchmark::{run_hypercube_benchmark, run_xor_benchmark, TrialResult};
use manifest_core::datasets::{gen_hypercube, gen_xor, load_csv, save_csv};
use manifest_core::scoring::class_kernels;
use manifest_core::spsd::SpsdDiagnostics;
use manifest_core::theory::{kernel_bound_reports, EigenPairBound};
use manifest_core::{
    run_manifest, select_top_k, sym_eig, DataMatrix, Error, GeneratorConfig, GeometryPath, HypercubeBenchConfig,
    ManifestConfig, MethodSummary, ScalePolicy, XorBenchConfig,
};
use serde::Serialize;

use crate::args::{
    BenchCommon, BenchHypercubeArgs, BenchXorArgs, Dataset, DumpArgs, Format, GenerateArgs, InputArgs, KernelArgs,
    ScoreArgs,
};
use crate::report::{write_columns, write_feature_csv, write_json, Clock, FeatureRow};

fn delimiter(c: char) -> Result<u8> {
    u8::try_from(c)
        .ok()
        .filter(u8::is_ascii)
        .ok_or_else(|| Error::InvalidInput(format!("delimiter {c:?} is not a single ASCII character")).into())
}

fn load(input: &InputArgs) -> Result<DataMatrix> {
    let delim = delimiter(input.delimiter)?;
    load_csv(&input.input, &input.label, delim).with_context(|| format!("reading {}", input.input.display()))
}

fn manifest_config(k: &KernelArgs) -> ManifestConfig {
    ManifestConfig {
        scale: ScalePolicy {
            percentile: k.scale_percentile,
            factor: k.scale_factor,
        },
        normalize_iters: k.normalize_iters,
        geometry: k.geometry(),
        ..ManifestConfig::default()
    }
}

fn feature_names(data: &DataMatrix) -> Vec<String> {
    match data.feature_names() {
        Some(names) => names.to_vec(),
        None => (0..data.n_features()).map(|j| format!("x{j}")).collect(),
    }
}

#[derive(Serialize)]
struct ScoreReport<'a> {
    input: &'a Path,
    config: &'a ManifestConfig,
    n_samples: usize,
    n_features: usize,
    class_counts: [usize; 2],
    feature_names: Vec<String>,
    path: GeometryPath,
    kernel_scales: [f64; 2],
    scores: &'a [f64],
    eigenvalues: &'a [f64],
    ranking: &'a [usize],
    top_k: usize,
    selected: &'a [usize],
    #[serde(skip_serializing_if = "Option::is_none")]
    spsd: Option<&'a SpsdDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Vec<EigenPairBound>>,
}

pub fn score(args: &ScoreArgs) -> Result<()> {
    let clock = Clock::start();
    let data = load(&args.input)?;
    let config = manifest_config(&args.kernel);
    let run = run_manifest(&data, &config)?;
    let selection = select_top_k(&run.score.scores, args.top_k)?;
    let names = feature_names(&data);
    let out = args.output_file.as_deref();

    match args.output {
        Format::Csv => {
            let mut rank = vec![0; data.n_features()];
            for (pos, &j) in selection.ranked_indices.iter().enumerate() {
                rank[j] = pos + 1;
            }
            let rows: Vec<FeatureRow> = (0..data.n_features())
                .map(|j| FeatureRow {
                    name: &names[j],
                    score: run.score.scores[j],
                    rank: rank[j],
                    selected: rank[j] <= args.top_k,
                })
                .collect();
            write_feature_csv(&rows, out)
        }
        Format::Json => {
            let bounds = match args.bounds {
                Some(m) => {
                    let (k1, k2) = class_kernels(&data, &config)?;
                    Some(kernel_bound_reports(&k1.matrix, &k2.matrix, m)?)
                }
                None => None,
            };
            let report = ScoreReport {
                input: &args.input.input,
                config: &config,
                n_samples: data.n_samples(),
                n_features: data.n_features(),
                class_counts: data.class_counts(),
                feature_names: names,
                path: run.path,
                kernel_scales: run.kernel_scales,
                scores: &run.score.scores,
                eigenvalues: &run.score.eigenvalues,
                ranking: &selection.ranked_indices,
                top_k: selection.k,
                selected: &selection.selected,
                spsd: run.spsd.as_ref(),
                bounds,
            };
            write_json("score", &report, &clock, out)
        }
    }
}

#[derive(Serialize)]
struct BenchReport<'a, C> {
    config: &'a C,
    summaries: &'a [MethodSummary],
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<&'a [TrialResult]>,
}

fn write_bench<C: Serialize>(
    command: &str,
    config: &C,
    report: &manifest_core::BenchmarkReport,
    common: &BenchCommon,
    clock: &Clock,
) -> Result<()> {
    let body = BenchReport {
        config,
        summaries: &report.summaries,
        trials: (!common.summary_only).then_some(report.trials.as_slice()),
    };
    write_json(command, &body, clock, common.output_file.as_deref())
}

pub fn bench_xor(args: &BenchXorArgs) -> Result<()> {
    let clock = Clock::start();
    let mut config = XorBenchConfig::standard(args.common.seed);
    config.trials = args.common.trials;
    config.methods = args.common.methods.clone();
    config.manifest.scale.factor = args.scale_factor;
    let report = run_xor_benchmark(&config)?;
    write_bench("bench-xor", &config, &report, &args.common, &clock)
}

pub fn bench_hypercube(args: &BenchHypercubeArgs) -> Result<()> {
    let clock = Clock::start();
    let mut config = HypercubeBenchConfig::standard(args.common.seed);
    config.trials = args.common.trials;
    config.methods = args.common.methods.clone();
    config.train_subsample = args.train_subsample;
    config.top_k = args.top_k;
    config.manifest.normalize_iters = args.normalize_iters;
    config.manifest.scale = ScalePolicy {
        percentile: args.scale_percentile,
        factor: args.scale_factor,
    };
    config.generator.cluster_covariance = args.cluster_covariance.into();
    let report = run_hypercube_benchmark(&config)?;
    write_bench("bench-hypercube", &config, &report, &args.common, &clock)
}

#[derive(Serialize)]
struct DumpReport<'a> {
    input: &'a Path,
    config: &'a ManifestConfig,
    path: GeometryPath,
    top_m: usize,
    files: Vec<PathBuf>,
}

fn phi_header(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("phi_{i}")).collect()
}

pub fn dump_operators(args: &DumpArgs) -> Result<()> {
    let clock = Clock::start();
    let data = load(&args.input)?;
    let d = data.n_features();
    let m = args.top_m;
    if m == 0 || m > d {
        return Err(Error::InvalidInput(format!("top-m of {m} outside 1..={d}")).into());
    }
    let config = manifest_config(&args.kernel);
    let run = run_manifest(&data, &config)?;

    // M is positive semidefinite: leading means largest. D is ordered by |λ|,
    // the weight each eigenvector carries in the score.
    let mean = sym_eig(&run.mean)?.leading(m);
    let diff = sym_eig(&run.difference)?;
    let order = diff.order_by_magnitude();
    let column = |e: &manifest_core::EigenSystem, i: usize| e.vectors.column(i).iter().copied().collect::<Vec<f64>>();

    let dir = &args.output;
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let files = [
        "mean_eigenvectors.csv",
        "mean_eigenvalues.csv",
        "difference_eigenvectors.csv",
        "difference_eigenvalues.csv",
        "scores.csv",
    ]
    .map(|f| dir.join(f));

    let mean_vecs: Vec<Vec<f64>> = (0..m).map(|i| column(&mean, i)).collect();
    write_columns(&files[0], &phi_header(m), &mean_vecs)?;
    write_columns(
        &files[1],
        &["eigenvalue".into()],
        &[mean.values.iter().copied().collect()],
    )?;
    let diff_vecs: Vec<Vec<f64>> = order[..m].iter().map(|&i| column(&diff, i)).collect();
    write_columns(&files[2], &phi_header(m), &diff_vecs)?;
    write_columns(
        &files[3],
        &["eigenvalue".into()],
        &[order[..m].iter().map(|&i| diff.values[i]).collect()],
    )?;
    write_columns(&files[4], &["score".into()], std::slice::from_ref(&run.score.scores))?;

    let report = DumpReport {
        input: &args.input.input,
        config: &config,
        path: run.path,
        top_m: m,
        files: files.to_vec(),
    };
    write_json("dump-operators", &report, &clock, None)
}

#[derive(Serialize)]
struct GenerateReport<'a> {
    dataset: &'static str,
    generator: &'a GeneratorConfig,
    output: &'a Path,
    informative: Vec<usize>,
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let clock = Clock::start();
    let delim = delimiter(args.delimiter)?;
    let (name, mut config) = match args.dataset {
        Dataset::Xor => ("xor", GeneratorConfig::xor(args.seed)),
        Dataset::Hypercube => ("hypercube", GeneratorConfig::hypercube(args.seed)),
    };
    if let Some(n) = args.samples {
        config.n_samples = n;
    }
    let (data, informative) = match args.dataset {
        Dataset::Xor => (gen_xor(&config)?, manifest_core::datasets::XOR_INFORMATIVE.to_vec()),
        Dataset::Hypercube => {
            let hc = gen_hypercube(&config)?;
            (hc.data, hc.informative)
        }
    };
    save_csv(&data, &args.output, delim).with_context(|| format!("writing {}", args.output.display()))?;
    if let Some(path) = &args.informative_file {
        let json = serde_json::to_string(&informative)?;
        fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    let report = GenerateReport {
        dataset: name,
        generator: &config,
        output: &args.output,
        informative,
    };
    write_json("generate", &report, &clock, None)
}
