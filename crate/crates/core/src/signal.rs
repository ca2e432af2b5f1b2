//! Signals and windows on the cyclic group of integers modulo `L`.
//!
//! All indexing is modular: translating by `s` moves sample `t` to `t + s mod L`
//! and nothing is ever zero-padded.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex-valued `L`-periodic sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal<T> {
    samples: Vec<Complex<T>>,
}

impl<T: Real> Signal<T> {
    pub fn new(samples: Vec<Complex<T>>) -> Self {
        assert!(!samples.is_empty(), "signals have positive length");
        Self { samples }
    }

    pub fn from_real(samples: &[T]) -> Self {
        Self::new(samples.iter().map(|&s| Complex::new(s, T::zero())).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![Complex::new(T::zero(), T::zero()); len])
    }

    /// Unit impulse at `t0`.
    pub fn impulse(len: usize, t0: usize) -> Self {
        let mut x = Self::zeros(len);
        x.samples[t0 % len] = Complex::new(T::one(), T::zero());
        x
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn real_parts(&self) -> Vec<T> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn energy(&self) -> T {
        self.samples.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn norm(&self) -> T {
        self.energy().sqrt()
    }

    /// `out[t] = self[t - shift mod L]`.
    pub fn translate(&self, shift: isize) -> Self {
        Self::new(cyclic_shift(&self.samples, shift))
    }

    /// `out[t] = self[t] * exp(2πi·m·t / modulations)`, i.e. modulation by `m·b`
    /// with frequency step `b = L / modulations`.
    pub fn modulate(&self, m: i64, modulations: usize) -> Self {
        let step = T::TAU() / T::of_usize(modulations);
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(t, &s)| {
                // reduce m·t first so the phase argument stays small
                let k = (m.rem_euclid(modulations as i64) as u128 * t as u128) % modulations as u128;
                s * Complex::from_polar(T::one(), step * T::of(k as f64))
            })
            .collect();
        Self::new(samples)
    }

    /// Squared distance `‖self − other‖²`.
    pub fn distance_sqr(&self, other: &Self) -> T {
        assert_eq!(self.len(), other.len());
        self.samples
            .iter()
            .zip(&other.samples)
            .fold(T::zero(), |acc, (a, b)| acc + (*a - *b).norm_sqr())
    }

    /// `‖self − other‖ / ‖other‖`, or the absolute distance when `other` is zero.
    pub fn relative_error(&self, reference: &Self) -> T {
        let d = self.distance_sqr(reference).sqrt();
        let r = reference.norm();
        if r > T::zero() {
            d / r
        } else {
            d
        }
    }
}

pub(crate) fn cyclic_shift<S: Copy>(samples: &[S], shift: isize) -> Vec<S> {
    let len = samples.len();
    let s = shift.rem_euclid(len as isize) as usize;
    (0..len).map(|t| samples[(t + len - s) % len]).collect()
}

/// Support set and cyclic length of a window.
///
/// `start` is where the tightest enclosing cyclic arc begins, so the window
/// lives on `start, start + 1, …, start + length − 1 (mod L)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportInfo {
    pub support: Vec<usize>,
    pub start: usize,
    pub length: usize,
}

impl SupportInfo {
    pub fn is_contiguous(&self) -> bool {
        self.length == self.support.len()
    }
}

/// Real, nonnegative window on ℤ_L with its support information cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Window<T> {
    samples: Vec<T>,
    dc_gain: T,
    support: SupportInfo,
}

impl<T: Real> Window<T> {
    pub fn new(samples: Vec<T>) -> Result<Self> {
        if let Some(index) = samples.iter().position(|&s| s < T::zero() || s.is_nan()) {
            return Err(Error::NegativeWindow { index });
        }
        let support = window_length(&samples)?;
        let dc_gain = samples.iter().fold(T::zero(), |acc, &s| acc + s);
        Ok(Self { samples, dc_gain, support })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    /// `ŵ[0]`, the sum of all samples.
    pub fn dc_gain(&self) -> T {
        self.dc_gain
    }

    pub fn support(&self) -> &SupportInfo {
        &self.support
    }

    /// `len(w)` in the cyclic sense.
    pub fn length(&self) -> usize {
        self.support.length
    }

    pub fn energy(&self) -> T {
        self.samples.iter().fold(T::zero(), |acc, &s| acc + s * s)
    }

    pub fn translate(&self, shift: isize) -> Self {
        let len = self.len();
        let s = shift.rem_euclid(len as isize) as usize;
        let mut support: Vec<usize> = self.support.support.iter().map(|&t| (t + s) % len).collect();
        support.sort_unstable();
        Self {
            samples: cyclic_shift(&self.samples, shift),
            dc_gain: self.dc_gain,
            support: SupportInfo {
                support,
                start: (self.support.start + s) % len,
                length: self.support.length,
            },
        }
    }

    pub fn to_signal(&self) -> Signal<T> {
        Signal::from_real(&self.samples)
    }

    /// Samples along the support arc, `profile[j] = w[start + j]`.
    pub fn profile(&self) -> Vec<T> {
        let len = self.len();
        (0..self.support.length)
            .map(|j| self.samples[(self.support.start + j) % len])
            .collect()
    }
}

/// Support set and length of `samples` (nonzero entries), minimizing over cyclic
/// rotations when the support wraps or has gaps.
pub fn window_length<T: Real>(samples: &[T]) -> Result<SupportInfo> {
    let len = samples.len();
    let support: Vec<usize> = (0..len).filter(|&t| samples[t] != T::zero()).collect();
    if support.is_empty() {
        return Err(Error::AllZeroWindow);
    }
    // The tightest arc is the complement of the widest gap between cyclically
    // consecutive support points. Ties keep the earliest start.
    let k = support.len();
    let mut best_gap = 0usize;
    let mut start = support[0];
    for i in 0..k {
        let here = support[i];
        let next = if i + 1 < k { support[i + 1] } else { support[0] + len };
        let gap = next - here;
        if gap > best_gap {
            best_gap = gap;
            start = next % len;
        }
    }
    let length = len - best_gap + 1;
    Ok(SupportInfo { support, start, length })
}

/// Window shapes offered by the constructors and the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Hamming,
    Hann,
    Triangular,
    Rect,
}

impl WindowKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hamming" => Some(Self::Hamming),
            "hann" | "hanning" => Some(Self::Hann),
            "triangular" | "triangle" => Some(Self::Triangular),
            "rect" | "rectangular" => Some(Self::Rect),
            _ => None,
        }
    }

    /// Periodic window of `width` samples placed at the origin of ℤ_L.
    ///
    /// The periodic forms satisfy the constant overlap-add constraint at hop
    /// `width / 2` (Hamming, Hann, triangular) and `width` (rect).
    pub fn build<T: Real>(self, period: usize, width: usize) -> Result<Window<T>> {
        if width == 0 || width > period {
            return Err(Error::Config(format!(
                "window width {width} must lie in 1..={period}"
            )));
        }
        let mut samples = vec![T::zero(); period];
        let w = width as f64;
        for (j, s) in samples.iter_mut().take(width).enumerate() {
            let phase = std::f64::consts::TAU * j as f64 / w;
            let v = match self {
                Self::Hamming => 0.54 - 0.46 * phase.cos(),
                Self::Hann => 0.5 - 0.5 * phase.cos(),
                Self::Triangular => 1.0 - (j as f64 - w / 2.0).abs() / (w / 2.0),
                Self::Rect => 1.0,
            };
            *s = T::of(v.max(0.0));
        }
        Window::new(samples)
    }
}

impl std::fmt::Display for WindowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Hamming => "hamming",
            Self::Hann => "hann",
            Self::Triangular => "triangular",
            Self::Rect => "rect",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect2() -> Window<f64> {
        let mut s = vec![0.0; 8];
        s[0] = 1.0;
        s[1] = 1.0;
        Window::new(s).unwrap()
    }

    #[test]
    fn translate_examples() {
        let w = rect2();
        assert_eq!(w.translate(2).samples(), &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(w.translate(0).samples(), w.samples());
        assert_eq!(w.translate(7).samples(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(w.translate(-1).samples(), w.translate(7).samples());
    }

    #[test]
    fn modulate_examples() {
        let x = Signal::<f64>::from_real(&[1.0; 8]);
        assert_eq!(x.modulate(0, 8), x);
        let d = Signal::<f64>::impulse(8, 0);
        assert_eq!(d.modulate(3, 8), d);
        let roots = x.modulate(1, 8);
        for (t, c) in roots.samples().iter().enumerate() {
            let phase = std::f64::consts::TAU * t as f64 / 8.0;
            assert!((c.re - phase.cos()).abs() < 1e-15);
            assert!((c.im - phase.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn window_length_examples() {
        let w = rect2();
        assert_eq!(w.support().support, vec![0, 1]);
        assert_eq!(w.length(), 2);
        assert_eq!(w.support().start, 0);

        let wrap = Window::new(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(wrap.length(), 2);
        assert_eq!(wrap.support().start, 7);

        let full = Window::new(vec![1.0f64; 8]).unwrap();
        assert_eq!(full.length(), 8);

        let gappy = Window::new(vec![1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(gappy.length(), 4);
        assert!(!gappy.support().is_contiguous());
    }

    #[test]
    fn all_zero_and_negative_windows_are_rejected() {
        assert!(matches!(Window::<f64>::new(vec![0.0; 4]), Err(Error::AllZeroWindow)));
        assert!(matches!(
            Window::<f64>::new(vec![1.0, -0.5, 0.0]),
            Err(Error::NegativeWindow { index: 1 })
        ));
    }

    #[test]
    fn dc_gain_matches_sum() {
        let w = WindowKind::Hamming.build::<f64>(64, 16).unwrap();
        let sum: f64 = w.samples().iter().sum();
        assert_eq!(w.dc_gain(), sum);
    }

    #[test]
    fn periodic_windows_overlap_add_to_a_constant() {
        for kind in [WindowKind::Hamming, WindowKind::Hann, WindowKind::Triangular] {
            let w = kind.build::<f64>(64, 16).unwrap();
            let mut acc = vec![0.0; 64];
            for n in 0..8 {
                for (t, v) in w.translate(8 * n).samples().iter().enumerate() {
                    acc[t] += v;
                }
            }
            let c = w.dc_gain() / 8.0;
            assert!(acc.iter().all(|v| (v - c).abs() < 1e-12), "{kind}");
        }
    }
}
