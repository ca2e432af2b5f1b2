//! Overlap-add synthesis for Gabor and superposition frames.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dft::{dft, FourierEngine};
use crate::error::{Error, Result};
use crate::gabor::{GaborSystem, StftMatrix};
use crate::scalar::Real;
use crate::signal::{Signal, Window};
use crate::superposition::{CoefficientSet, SelectionFunction};

/// Relative tolerance on the overlap-add sum, in units of `ŵ[0]/a`.
pub const OLA_TOLERANCE: f64 = 1e-10;

/// Relative tolerance for spectral nulls, in units of `‖ŵ‖∞`.
pub const NULL_TOLERANCE: f64 = 1e-10;

/// Time- and frequency-domain evidence for `Σ_n w[t − na] = ŵ[0]/a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlaCertificate {
    pub holds: bool,
    /// `ŵ[0]/a`
    pub constant: f64,
    pub max_deviation: f64,
    /// `ŵ[kN] = 0` for `k = 1, …, a − 1`.
    pub spectral_nulls_ok: bool,
}

pub fn ola_check<T: Real>(w: &Window<T>, a: usize) -> Result<OlaCertificate> {
    let len = w.len();
    if a == 0 || !len.is_multiple_of(a) {
        return Err(Error::InvalidLattice(format!("time step {a} does not divide L = {len}")));
    }
    let n_windows = len / a;
    let constant = w.dc_gain().as_f64() / a as f64;
    let start = w.support().start;
    let profile = w.profile();
    let mut sums = vec![0.0f64; len];
    for n in 0..n_windows {
        for (j, &v) in profile.iter().enumerate() {
            sums[(start + j + n * a) % len] += v.as_f64();
        }
    }
    let max_deviation = sums.iter().fold(0.0f64, |m, &s| m.max((s - constant).abs()));
    let spectrum = dft(&w.to_signal());
    let peak = spectrum.samples().iter().fold(T::zero(), |m, c| m.max(c.norm())).as_f64();
    let spectral_nulls_ok =
        (1..a).all(|k| spectrum.samples()[k * n_windows].norm().as_f64() <= NULL_TOLERANCE * peak);
    Ok(OlaCertificate {
        holds: max_deviation <= OLA_TOLERANCE * constant,
        constant,
        max_deviation,
        spectral_nulls_ok,
    })
}

fn require_ola<T: Real>(w: &Window<T>, a: usize) -> Result<OlaCertificate> {
    let cert = ola_check(w, a)?;
    if !cert.holds {
        return Err(Error::OlaViolated { deviation: cert.max_deviation });
    }
    Ok(cert)
}

/// Adds `scale · buf[j mod M]` at `anchor + j` for `j < span`.
fn overlap_add<T: Real>(out: &mut [Complex<T>], buf: &[Complex<T>], anchor: usize, span: usize, scale: T) {
    let len = out.len();
    let m = buf.len();
    for j in 0..span {
        let t = (anchor + j) % len;
        out[t] = out[t] + buf[j % m] * scale;
    }
}

/// `x[t] = (a/ŵ[0]) Σ_n IDFT_M(X[·, n])[t]`.
pub fn ola_reconstruct<T: Real>(x: &StftMatrix<T>, g: &GaborSystem<T>, engine: &FourierEngine<T>) -> Result<Signal<T>> {
    require_ola(g.window(), g.hop())?;
    let len_w = g.window().length();
    if g.modulations() < len_w {
        return Err(Error::RefinementTooCoarse { requested: g.modulations(), length: len_w });
    }
    if x.columns.len() != g.translates() || x.modulations != g.modulations() {
        return Err(Error::LengthMismatch { expected: g.translates(), got: x.columns.len() });
    }
    let segments: Vec<Vec<Complex<T>>> = x
        .columns
        .par_iter()
        .map(|col| {
            let mut buf = col.clone();
            engine.inverse(&mut buf);
            buf
        })
        .collect();
    let scale = T::of_usize(g.hop()) / g.window().dc_gain();
    let mut out = vec![Complex::new(T::zero(), T::zero()); g.signal_len()];
    for (n, seg) in segments.iter().enumerate() {
        overlap_add(&mut out, seg, g.anchor(n), len_w, scale);
        engine.tally(len_w);
    }
    Ok(Signal::new(out))
}

/// Largest deviation of `Σ_{pieces} 𝒯_{na} w_r[t]` from `ŵ[0]/a`.
pub fn generalized_ola_deviation<T: Real>(sel: &SelectionFunction<T>, w: &Window<T>) -> f64 {
    let len = sel.signal_len();
    let mut sums = vec![0.0f64; len];
    for (_, _, prof, anchor) in sel.iter() {
        for (j, &v) in prof.samples.iter().enumerate() {
            sums[(anchor + j) % len] += v.as_f64();
        }
    }
    let constant = w.dc_gain().as_f64() / sel.hop() as f64;
    sums.iter().fold(0.0f64, |m, &s| m.max((s - constant).abs()))
}

/// Per-piece inverse transforms at `M[n, r]`, overlap-added and scaled by `a/ŵ[0]`.
pub fn gola_reconstruct<T: Real>(
    c: &CoefficientSet<T>,
    g: &GaborSystem<T>,
    engine: &FourierEngine<T>,
) -> Result<Signal<T>> {
    let cert = require_ola(g.window(), g.hop())?;
    let sel = c.selection();
    let deviation = generalized_ola_deviation(sel, g.window());
    if deviation > OLA_TOLERANCE * cert.constant {
        return Err(Error::OlaViolated { deviation });
    }
    if let Some((_, m, prof, _)) = sel.iter().find(|(_, m, prof, _)| *m < prof.length) {
        return Err(Error::RefinementTooCoarse { requested: m, length: prof.length });
    }
    let segments: Vec<Vec<Complex<T>>> = c
        .entries()
        .par_iter()
        .map(|coefs| {
            let mut buf = coefs.clone();
            engine.inverse(&mut buf);
            buf
        })
        .collect();
    let scale = T::of_usize(g.hop()) / g.window().dc_gain();
    let mut out = vec![Complex::new(T::zero(), T::zero()); sel.signal_len()];
    for ((_, _, prof, anchor), seg) in sel.iter().zip(&segments) {
        overlap_add(&mut out, seg, anchor, prof.length, scale);
        engine.tally(prof.length);
    }
    Ok(Signal::new(out))
}

pub(crate) fn overlap_add_weighted<T: Real>(
    out: &mut [Complex<T>],
    buf: &[Complex<T>],
    anchor: usize,
    weights: &[T],
) {
    let len = out.len();
    let m = buf.len();
    for (j, &d) in weights.iter().enumerate() {
        let t = (anchor + j) % len;
        out[t] = out[t] + buf[j % m] * d;
    }
}
