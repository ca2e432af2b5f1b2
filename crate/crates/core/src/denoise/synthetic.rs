use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Signal;

/// `amplitude·cos(2π·frequency·t + phase)`, frequency in cycles per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tone {
    pub amplitude: f64,
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

/// A tone gated to `start..start + length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalTone {
    #[serde(flatten)]
    pub tone: Tone,
    pub start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Impulse {
    pub position: usize,
    pub amplitude: f64,
}

/// `amplitude·exp(1 − 1/(1 − u²))` for `|u| < 1`, `u = (t − center)/half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: usize,
    pub half_width: usize,
    pub amplitude: f64,
}

/// One global tone, one local tone, impulses and a smooth bump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub global: Tone,
    pub local: LocalTone,
    pub impulses: Vec<Impulse>,
    pub bump: Bump,
}

impl SyntheticSpec {
    /// Layout used by the default experiment, scaled to `len` samples.
    ///
    /// The local tone spans the first 40% after a short lead-in, the impulses
    /// sit in the quiet stretch after it and the bump comes last.
    pub fn default_for(len: usize) -> Self {
        let at = |f: f64| (f * len as f64).round() as usize;
        Self {
            global: Tone { amplitude: 0.25, frequency: 0.0213, phase: 0.0 },
            local: LocalTone { tone: Tone { amplitude: 1.0, frequency: 0.0873, phase: 0.3 }, start: at(0.08), length: at(0.4) },
            impulses: vec![Impulse { position: at(0.61), amplitude: 6.0 }, Impulse { position: at(0.73), amplitude: 6.0 }],
            bump: Bump { center: at(0.87), half_width: at(0.05).max(1), amplitude: 1.5 },
        }
    }

    /// Only the global tone.
    pub fn pure_tone(amplitude: f64, frequency: f64) -> Self {
        let mut spec = Self::silent();
        spec.global = Tone { amplitude, frequency, phase: 0.0 };
        spec
    }

    /// Every amplitude zero.
    pub fn silent() -> Self {
        let quiet = Tone { amplitude: 0.0, frequency: 0.0, phase: 0.0 };
        Self {
            global: quiet,
            local: LocalTone { tone: quiet, start: 0, length: 0 },
            impulses: Vec::new(),
            bump: Bump { center: 0, half_width: 0, amplitude: 0.0 },
        }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.local.start + self.local.length > len {
            return Err(Error::ComponentOverflow(format!(
                "local tone {}..{} exceeds {len} samples",
                self.local.start,
                self.local.start + self.local.length
            )));
        }
        if let Some(i) = self.impulses.iter().find(|i| i.position >= len) {
            return Err(Error::ComponentOverflow(format!("impulse at {} exceeds {len} samples", i.position)));
        }
        let b = &self.bump;
        if b.amplitude != 0.0 && (b.center < b.half_width || b.center + b.half_width > len) {
            return Err(Error::ComponentOverflow(format!(
                "bump {}±{} exceeds {len} samples",
                b.center, b.half_width
            )));
        }
        Ok(())
    }
}

/// Real synthetic test signal of `len` samples.
pub fn synthetic_signal<T: Real>(len: usize, spec: &SyntheticSpec) -> Result<Signal<T>> {
    spec.validate(len)?;
    let tone = |t: &Tone, j: usize| t.amplitude * (std::f64::consts::TAU * t.frequency * j as f64 + t.phase).cos();
    let mut s: Vec<f64> = (0..len).map(|j| tone(&spec.global, j)).collect();
    for j in 0..spec.local.length {
        s[spec.local.start + j] += tone(&spec.local.tone, j);
    }
    for i in &spec.impulses {
        s[i.position] += i.amplitude;
    }
    let b = &spec.bump;
    if b.amplitude != 0.0 && b.half_width > 0 {
        for (t, v) in s.iter_mut().enumerate().take(b.center + b.half_width).skip(b.center - b.half_width) {
            let u = (t as f64 - b.center as f64) / b.half_width as f64;
            if u.abs() < 1.0 {
                *v += b.amplitude * (1.0 - 1.0 / (1.0 - u * u)).exp();
            }
        }
    }
    Ok(Signal::new(s.into_iter().map(|v| Complex::new(T::of(v), T::zero())).collect()))
}
