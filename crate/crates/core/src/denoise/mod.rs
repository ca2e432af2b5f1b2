//! Coefficient-domain Wiener suppression and the synthetic-signal experiment.

mod experiment;
mod synthetic;

pub use experiment::*;
pub use synthetic::*;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Signal;
use crate::superposition::{CoefficientSet, Piece, SelectionFunction};

/// Gains are clamped to `±GAIN_CEILING_DB`; a noiseless trial reports the ceiling.
pub const GAIN_CEILING_DB: f64 = 300.0;

/// Name of the Gaussian stream, written into experiment reports.
pub const NOISE_GENERATOR: &str = "ChaCha8Rng(seed) + rand_distr::StandardNormal (ziggurat)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// Real samples, used when the clean signal is real.
    WhiteGaussian,
    /// Circular complex samples with half the variance in each part.
    CircularGaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
    pub kind: NoiseKind,
}

impl NoiseModel {
    /// `σ² = ‖x‖² / (L·10^{snr/10})`.
    pub fn for_snr<T: Real>(x: &Signal<T>, snr_db: f64, seed: u64) -> Result<Self> {
        let energy = x.energy().as_f64();
        if energy == 0.0 {
            return Err(Error::ZeroSignal);
        }
        let variance = energy / (x.len() as f64 * 10f64.powf(snr_db / 10.0));
        let real = x.samples().iter().all(|c| c.im == T::zero());
        let kind = if real { NoiseKind::WhiteGaussian } else { NoiseKind::CircularGaussian };
        Ok(Self { sigma: variance.sqrt(), seed, kind })
    }

    pub fn sample<T: Real>(&self, len: usize) -> Signal<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let samples = match self.kind {
            NoiseKind::WhiteGaussian => (0..len)
                .map(|_| {
                    let v: f64 = StandardNormal.sample(&mut rng);
                    Complex::new(T::of(self.sigma * v), T::zero())
                })
                .collect(),
            NoiseKind::CircularGaussian => {
                let s = self.sigma * std::f64::consts::FRAC_1_SQRT_2;
                (0..len)
                    .map(|_| {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        Complex::new(T::of(s * re), T::of(s * im))
                    })
                    .collect()
            }
        };
        Signal::new(samples)
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

/// `y = x + n` at the requested SNR. An infinite SNR returns `x` unchanged.
pub fn add_noise<T: Real>(x: &Signal<T>, snr_db: f64, seed: u64) -> Result<Signal<T>> {
    let model = NoiseModel::for_snr(x, snr_db, seed)?;
    Ok(add_noise_with(x, &model))
}

pub fn add_noise_with<T: Real>(x: &Signal<T>, model: &NoiseModel) -> Signal<T> {
    if model.sigma == 0.0 {
        return x.clone();
    }
    let n = model.sample::<T>(x.len());
    Signal::new(x.samples().iter().zip(n.samples()).map(|(&a, &b)| a + b).collect())
}

/// `10·log₁₀(‖x‖²/‖y−x‖²)`.
pub fn empirical_snr_db<T: Real>(x: &Signal<T>, y: &Signal<T>) -> f64 {
    10.0 * (x.energy().as_f64() / y.distance_sqr(x).as_f64()).log10()
}

/// Expected `|⟨n, φ⟩|²` for white noise of variance `noise_psd` on `piece`.
pub fn noise_power<T: Real>(sel: &SelectionFunction<T>, piece: Piece, noise_psd: f64) -> f64 {
    noise_psd * sel.profile(piece.order).energy.as_f64()
}

fn apply_gain<T: Real>(y: &CoefficientSet<T>, noise_psd: f64, gain: impl Fn(usize, usize, f64) -> f64) -> CoefficientSet<T> {
    let mut out = y.clone();
    let nus: Vec<f64> = y.iter().map(|(p, _)| noise_power(y.selection(), p, noise_psd)).collect();
    for (k, coefs) in out.entries_mut().iter_mut().enumerate() {
        for (m, c) in coefs.iter_mut().enumerate() {
            *c = *c * T::of(gain(k, m, nus[k]));
        }
    }
    out
}

/// `X̂ = |X|²/(|X|² + ν) · Y`, with `H = 1` when `ν = 0`.
pub fn wiener_oracle<T: Real>(
    y: &CoefficientSet<T>,
    clean: &CoefficientSet<T>,
    noise_psd: f64,
) -> Result<CoefficientSet<T>> {
    if !y.selection().same_plan(clean.selection()) {
        return Err(Error::SelectionMismatch);
    }
    let x = clean.entries();
    Ok(apply_gain(y, noise_psd, |k, m, nu| {
        let p = x[k][m].norm_sqr().as_f64();
        if nu == 0.0 { 1.0 } else { p / (p + nu) }
    }))
}

/// Spectral subtraction `max(|Y|² − ν, 0)` followed by the Wiener gain.
pub fn wiener_two_stage<T: Real>(y: &CoefficientSet<T>, noise_psd: f64) -> CoefficientSet<T> {
    let yy = y.entries();
    apply_gain(y, noise_psd, |k, m, nu| {
        if nu == 0.0 {
            return 1.0;
        }
        let p = (yy[k][m].norm_sqr().as_f64() - nu).max(0.0);
        p / (p + nu)
    })
}

/// `20·log₁₀(‖y−x‖/‖x̂−x‖)`, clamped to [`GAIN_CEILING_DB`].
pub fn snr_gain_db<T: Real>(x: &Signal<T>, y: &Signal<T>, estimate: &Signal<T>) -> f64 {
    let before = y.distance_sqr(x).as_f64();
    if before == 0.0 {
        return GAIN_CEILING_DB;
    }
    let after = estimate.distance_sqr(x).as_f64();
    (10.0 * (before / after).log10()).clamp(-GAIN_CEILING_DB, GAIN_CEILING_DB)
}
