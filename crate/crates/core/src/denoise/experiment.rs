use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{add_noise_with, snr_gain_db, synthetic_signal, wiener_oracle, wiener_two_stage, NoiseModel, SyntheticSpec};
use crate::adapt::{dp_adapt, greedy_adapt, ResetRule, DEFAULT_MAX_ORDER};
use crate::dft::FourierEngine;
use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::reconstruct::{canonical_dual, dual_reconstruct};
use crate::signal::{Signal, WindowKind};
use crate::superposition::{make_selection, superposition_analyze, Mode, OrderedPartition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub width: usize,
    pub hop: usize,
    /// Defaults to `width`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulations: Option<usize>,
}

impl WindowSpec {
    pub fn half_overlap(kind: WindowKind, width: usize) -> Self {
        Self { kind, width, hop: width / 2, modulations: None }
    }

    pub fn system(&self, len: usize) -> Result<GaborSystem<f64>> {
        GaborSystem::new(self.kind.build(len, self.width)?, self.hop, self.modulations.unwrap_or(self.width))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Dp,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub name: String,
    pub algorithm: Algorithm,
    pub window: WindowSpec,
    #[serde(default = "default_max_order")]
    pub r_max: usize,
}

fn default_max_order() -> usize {
    DEFAULT_MAX_ORDER
}

impl MethodSpec {
    pub fn fixed(window: WindowSpec) -> Self {
        Self { name: format!("fixed-{}{}", window.kind, window.width), algorithm: Algorithm::Fixed, window, r_max: 0 }
    }

    /// Partition chosen for the observed signal `y`.
    pub fn partition(&self, y: &Signal<f64>, g: &GaborSystem<f64>) -> Result<OrderedPartition> {
        match self.algorithm {
            Algorithm::Fixed => Ok(OrderedPartition::singletons(g.translates())),
            Algorithm::Greedy => Ok(greedy_adapt(y, g, self.r_max, ResetRule::Prose)?.partition),
            Algorithm::Dp => Ok(dp_adapt(y, g, self.r_max)?.partition),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuppressionRule {
    Oracle,
    TwoStage,
}

impl SuppressionRule {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "oracle" => Some(Self::Oracle),
            "two-stage" => Some(Self::TwoStage),
            _ => None,
        }
    }
}

impl std::fmt::Display for SuppressionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Oracle => "oracle",
            Self::TwoStage => "two-stage",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub len: usize,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub rules: Vec<SuppressionRule>,
    pub methods: Vec<MethodSpec>,
    /// Defaults to [`SyntheticSpec::default_for`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal: Option<SyntheticSpec>,
}

impl Default for ExperimentConfig {
    /// 10 dB, 50 trials, greedy on Hamming 100/50, DP on Hamming 65/32 and a
    /// fixed Hamming sweep from 50 to 800 samples.
    fn default() -> Self {
        let mut methods = vec![
            MethodSpec {
                name: "greedy".into(),
                algorithm: Algorithm::Greedy,
                window: WindowSpec { modulations: Some(512), ..WindowSpec::half_overlap(WindowKind::Hamming, 100) },
                r_max: DEFAULT_MAX_ORDER,
            },
            MethodSpec {
                name: "dp".into(),
                algorithm: Algorithm::Dp,
                window: WindowSpec { kind: WindowKind::Hamming, width: 65, hop: 32, modulations: None },
                r_max: DEFAULT_MAX_ORDER,
            },
        ];
        methods.extend([50, 100, 200, 400, 800].map(|w| MethodSpec::fixed(WindowSpec::half_overlap(WindowKind::Hamming, w))));
        Self {
            len: 3200,
            snr_db: vec![10.0],
            trials: 50,
            base_seed: 1,
            rules: vec![SuppressionRule::Oracle, SuppressionRule::TwoStage],
            methods,
            signal: None,
        }
    }
}

impl ExperimentConfig {
    pub fn signal_spec(&self) -> SyntheticSpec {
        self.signal.clone().unwrap_or_else(|| SyntheticSpec::default_for(self.len))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.snr_db.is_empty() || self.rules.is_empty() || self.methods.is_empty() {
            return Err(Error::Config("trials, snr_db, rules and methods must be non-empty".into()));
        }
        for m in &self.methods {
            m.window.system(self.len)?;
        }
        self.signal_spec().validate(self.len)
    }
}

/// Gains of one method under one rule at one SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub snr_db: f64,
    pub rule: SuppressionRule,
    pub method: String,
    pub trials: usize,
    pub mean_db: f64,
    pub std_db: f64,
    pub gains_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub generator: String,
    pub config: ExperimentConfig,
    pub results: Vec<MethodReport>,
}

impl ExperimentReport {
    pub fn get(&self, snr_db: f64, rule: SuppressionRule, method: &str) -> Option<&MethodReport> {
        self.results.iter().find(|r| r.snr_db == snr_db && r.rule == rule && r.method == method)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("snr_db,rule,method,trials,mean_db,std_db\n");
        for r in &self.results {
            out.push_str(&format!("{},{},{},{},{:.6},{:.6}\n", r.snr_db, r.rule, r.method, r.trials, r.mean_db, r.std_db));
        }
        out
    }
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = neumaier_sum(values.iter().map(|v| (v - mean) * (v - mean))) / (n - 1.0);
    (mean, var.sqrt())
}

/// Analyze `y` on `p`, suppress and reconstruct with the canonical dual.
/// The oracle rule needs the clean signal.
pub fn suppress(
    y: &Signal<f64>,
    clean: Option<&Signal<f64>>,
    g: &GaborSystem<f64>,
    p: &OrderedPartition,
    rule: SuppressionRule,
    noise_psd: f64,
) -> Result<Signal<f64>> {
    let engine = FourierEngine::new();
    let sel = make_selection(p, g, Mode::Local)?;
    let yc = superposition_analyze(y, &sel, &engine)?;
    let est = match (rule, clean) {
        (SuppressionRule::Oracle, Some(x)) => wiener_oracle(&yc, &superposition_analyze(x, &sel, &engine)?, noise_psd)?,
        (SuppressionRule::Oracle, None) => {
            return Err(Error::Config("the oracle rule needs the clean signal".into()));
        }
        (SuppressionRule::TwoStage, _) => wiener_two_stage(&yc, noise_psd),
    };
    dual_reconstruct(&est, &canonical_dual(&sel)?, &engine)
}

/// [`suppress`] with the clean signal known, scored by [`snr_gain_db`].
pub fn denoise_once(
    x: &Signal<f64>,
    y: &Signal<f64>,
    g: &GaborSystem<f64>,
    p: &OrderedPartition,
    rule: SuppressionRule,
    noise_psd: f64,
) -> Result<(Signal<f64>, f64)> {
    let xhat = suppress(y, Some(x), g, p, rule, noise_psd)?;
    let gain = snr_gain_db(x, y, &xhat);
    Ok((xhat, gain))
}

/// Every trial draws noise with seed `base_seed + trial`; trials run in parallel.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let x: Signal<f64> = synthetic_signal(config.len, &config.signal_spec())?;
    let systems = config.methods.iter().map(|m| m.window.system(config.len)).collect::<Result<Vec<_>>>()?;
    let mut results = Vec::new();
    for &snr in &config.snr_db {
        let per_trial: Vec<Vec<f64>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let model = NoiseModel::for_snr(&x, snr, config.base_seed.wrapping_add(trial as u64))?;
                let y = add_noise_with(&x, &model);
                let mut gains = Vec::with_capacity(config.methods.len() * config.rules.len());
                for (m, g) in config.methods.iter().zip(&systems) {
                    let p = m.partition(&y, g)?;
                    for &rule in &config.rules {
                        gains.push(denoise_once(&x, &y, g, &p, rule, model.variance())?.1);
                    }
                }
                Ok(gains)
            })
            .collect::<Result<_>>()?;
        for (mi, m) in config.methods.iter().enumerate() {
            for (ri, &rule) in config.rules.iter().enumerate() {
                let gains: Vec<f64> = per_trial.iter().map(|t| t[mi * config.rules.len() + ri]).collect();
                let (mean_db, std_db) = mean_std(&gains);
                results.push(MethodReport {
                    snr_db: snr,
                    rule,
                    method: m.name.clone(),
                    trials: config.trials,
                    mean_db,
                    std_db,
                    gains_db: gains,
                });
            }
        }
    }
    Ok(ExperimentReport { generator: super::NOISE_GENERATOR.into(), config: config.clone(), results })
}
