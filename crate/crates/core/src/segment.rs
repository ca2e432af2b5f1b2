//! Short-time segments of anchored windows.
//!
//! Every frame element in this crate has the form
//! `φ[t] = v[t − anchor] · e^{2πi·m·(t − anchor)/M}` where `v` is a window
//! profile living on `0..profile.len()` and `anchor` is the first sample of the
//! window's support arc. Referencing the phase to the anchor rather than to
//! `t = 0` only multiplies each coefficient by a unimodular constant when `M`
//! divides `L`, and it keeps a window's elements mutually orthogonal whenever
//! `M ≥ len(v)` even when `M` does not divide `L` or the window wraps around.

use num_complex::Complex;

use crate::dft::FourierEngine;
use crate::scalar::Real;

/// Inner products `c[m] = ⟨x, φ_m⟩` for `m ∈ 0..modulations`.
///
/// Samples are weighted, folded modulo `modulations` and transformed once, so
/// the cost is `len(profile)` products plus one length-`modulations` DFT.
pub(crate) fn analyze<T: Real>(
    x: &[Complex<T>],
    profile: &[T],
    anchor: usize,
    modulations: usize,
    engine: &FourierEngine<T>,
) -> Vec<Complex<T>> {
    let len = x.len();
    let mut buf = vec![Complex::new(T::zero(), T::zero()); modulations];
    for (j, &w) in profile.iter().enumerate() {
        let s = x[(anchor + j) % len];
        buf[j % modulations] = buf[j % modulations] + s * w;
    }
    engine.tally(profile.len());
    engine.forward(&mut buf);
    buf
}

/// Definitional form of one element, used by tests and oracles.
pub(crate) fn element<T: Real>(len: usize, profile: &[T], anchor: usize, m: usize, modulations: usize) -> Vec<Complex<T>> {
    let mut out = vec![Complex::new(T::zero(), T::zero()); len];
    for (j, &w) in profile.iter().enumerate() {
        let k = (m as u128 * j as u128 % modulations as u128) as f64;
        let phase = std::f64::consts::TAU * k / modulations as f64;
        let t = (anchor + j) % len;
        out[t] = out[t] + Complex::new(T::of(phase.cos()), T::of(phase.sin())) * w;
    }
    out
}
