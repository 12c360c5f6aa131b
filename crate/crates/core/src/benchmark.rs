//! Monte Carlo selection benchmarks on the synthetic generators.
//!
//! Trial `i` uses seed `seed + i`. Trials run on the rayon pool; results are
//! collected in trial order, so output does not depend on the pool size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::{
    fisher_score, gen_hypercube, gen_xor, pearson_score, stratified_subsample, GeneratorConfig, XOR_INFORMATIVE,
};
use crate::error::{Error, Result};
use crate::kernels::{percentile, DataMatrix};
use crate::scoring::{run_manifest, select_top_k, GeometryPath, ManifestConfig, ScalePolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Manifest,
    Fisher,
    Pearson,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Manifest => "manifest",
            Method::Fisher => "fisher",
            Method::Pearson => "pearson",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "manifest" => Ok(Method::Manifest),
            "fisher" => Ok(Method::Fisher),
            "pearson" => Ok(Method::Pearson),
            other => Err(Error::invalid(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XorBenchConfig {
    pub trials: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub generator: GeneratorConfig,
    pub manifest: ManifestConfig,
}

impl XorBenchConfig {
    /// 50 trials, N = 50, d = 100, scale 0.1 × median.
    pub fn standard(seed: u64) -> Self {
        Self {
            trials: 50,
            seed,
            methods: vec![Method::Manifest, Method::Fisher, Method::Pearson],
            generator: GeneratorConfig::xor(seed),
            manifest: ManifestConfig {
                scale: ScalePolicy {
                    percentile: 50.0,
                    factor: 0.1,
                },
                ..ManifestConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypercubeBenchConfig {
    pub trials: usize,
    pub seed: u64,
    pub train_subsample: usize,
    pub top_k: usize,
    pub methods: Vec<Method>,
    pub generator: GeneratorConfig,
    pub manifest: ManifestConfig,
}

impl HypercubeBenchConfig {
    /// 50 trials, 50-sample selection subsample, top 10, unnormalized kernels
    /// at twice the median distance.
    pub fn standard(seed: u64) -> Self {
        Self {
            trials: 50,
            seed,
            train_subsample: 50,
            top_k: 10,
            methods: vec![Method::Manifest, Method::Fisher, Method::Pearson],
            generator: GeneratorConfig::hypercube(seed),
            manifest: ManifestConfig {
                scale: ScalePolicy {
                    percentile: 50.0,
                    factor: 2.0,
                },
                ..ManifestConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodTrial {
    pub selected: Vec<usize>,
    pub correct: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<GeometryPath>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub informative: Vec<usize>,
    pub methods: Vec<(Method, MethodTrial)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSummary {
    pub method: Method,
    pub out_of: usize,
    pub mean: f64,
    /// Population standard deviation over trials.
    pub std: f64,
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
    pub min: usize,
    pub max: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub summaries: Vec<MethodSummary>,
    pub trials: Vec<TrialResult>,
}

impl BenchmarkReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }
}

fn evaluate(
    data: &DataMatrix,
    truth: &[usize],
    k: usize,
    method: Method,
    config: &ManifestConfig,
) -> Result<MethodTrial> {
    let (scores, path) = match method {
        Method::Manifest => {
            let run = run_manifest(data, config)?;
            (run.score.scores, Some(run.path))
        }
        Method::Fisher => (fisher_score(data), None),
        Method::Pearson => (pearson_score(data), None),
    };
    let selected = select_top_k(&scores, k)?.selected;
    let correct = selected.iter().filter(|j| truth.contains(j)).count();
    Ok(MethodTrial {
        selected,
        correct,
        path,
    })
}

fn summarize(trials: &[TrialResult], methods: &[Method], out_of: usize) -> Result<Vec<MethodSummary>> {
    methods
        .iter()
        .enumerate()
        .map(|(m, &method)| {
            let counts: Vec<usize> = trials.iter().map(|t| t.methods[m].1.correct).collect();
            let vals: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let std = (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt();
            Ok(MethodSummary {
                method,
                out_of,
                mean,
                std,
                median: percentile(&vals, 50.0)?,
                q25: percentile(&vals, 25.0)?,
                q75: percentile(&vals, 75.0)?,
                min: counts.iter().copied().min().unwrap_or(0),
                max: counts.iter().copied().max().unwrap_or(0),
            })
        })
        .collect()
}

fn check_common(trials: usize, methods: &[Method]) -> Result<()> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    if methods.is_empty() {
        return Err(Error::invalid("at least one method is required"));
    }
    Ok(())
}

/// Correct top-2 selections of the two XOR inputs per method.
pub fn run_xor_benchmark(config: &XorBenchConfig) -> Result<BenchmarkReport> {
    check_common(config.trials, &config.methods)?;
    let trials: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let data = gen_xor(&GeneratorConfig {
                seed,
                ..config.generator.clone()
            })?;
            let methods = config
                .methods
                .iter()
                .map(|&m| Ok((m, evaluate(&data, &XOR_INFORMATIVE, 2, m, &config.manifest)?)))
                .collect::<Result<_>>()?;
            Ok(TrialResult {
                trial: i,
                seed,
                informative: XOR_INFORMATIVE.to_vec(),
                methods,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkReport {
        summaries: summarize(&trials, &config.methods, 2)?,
        trials,
    })
}

/// Correct top-k selections of the hypercube coordinates per method, scored
/// on a random subsample of each generated dataset.
pub fn run_hypercube_benchmark(config: &HypercubeBenchConfig) -> Result<BenchmarkReport> {
    check_common(config.trials, &config.methods)?;
    if config.top_k == 0 || config.top_k > config.generator.n_features {
        return Err(Error::invalid(format!("top-k {} out of range", config.top_k)));
    }
    let trials: Vec<TrialResult> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = config.seed.wrapping_add(i as u64);
            let hc = gen_hypercube(&GeneratorConfig {
                seed,
                ..config.generator.clone()
            })?;
            let train = stratified_subsample(&hc.data, config.train_subsample, seed)?;
            let methods = config
                .methods
                .iter()
                .map(|&m| Ok((m, evaluate(&train, &hc.informative, config.top_k, m, &config.manifest)?)))
                .collect::<Result<_>>()?;
            Ok(TrialResult {
                trial: i,
                seed,
                informative: hc.informative,
                methods,
            })
        })
        .collect::<Result<_>>()?;
    Ok(BenchmarkReport {
        summaries: summarize(&trials, &config.methods, config.top_k)?,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_parsing() {
        assert_eq!("Manifest".parse::<Method>().unwrap(), Method::Manifest);
        assert!("relieff".parse::<Method>().is_err());
    }

    #[test]
    fn single_trial_is_deterministic() {
        let cfg = XorBenchConfig {
            trials: 1,
            ..XorBenchConfig::standard(17)
        };
        let a = run_xor_benchmark(&cfg).unwrap();
        let b = run_xor_benchmark(&cfg).unwrap();
        assert_eq!(a.trials[0].methods[0].1.selected, b.trials[0].methods[0].1.selected);
        assert_eq!(a.summaries.len(), 3);
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = XorBenchConfig {
            trials: 0,
            ..XorBenchConfig::standard(1)
        };
        assert!(run_xor_benchmark(&cfg).is_err());
    }
}
