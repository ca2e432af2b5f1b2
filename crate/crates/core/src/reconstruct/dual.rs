//! Canonical duals of superposition frames with diagonal frame operators.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ola::overlap_add_weighted;
use crate::dft::FourierEngine;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::Signal;
use crate::superposition::{superposition_frame_operator, CoefficientSet, Piece, SelectionFunction};
use crate::FrameOperator;

/// How a dual family was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualOrigin {
    CanonicalInverse,
    LappedClosedForm,
    DyadicClosedForm,
}

/// Unmodulated dual window of one piece, stored along the support arc
/// starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualWindow<T> {
    pub n: usize,
    pub r: usize,
    pub start: usize,
    pub modulations: usize,
    pub samples: Vec<T>,
}

impl<T: Real> DualWindow<T> {
    pub fn piece(&self) -> Piece {
        Piece::new(self.n, self.r)
    }

    /// Dual window as a full-length real vector.
    pub fn to_vec(&self, len: usize) -> Vec<T> {
        let mut out = vec![T::zero(); len];
        for (j, &v) in self.samples.iter().enumerate() {
            let t = (self.start + j) % len;
            out[t] = out[t] + v;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualFrame<T> {
    pub origin: DualOrigin,
    pub signal_len: usize,
    pub duals: Vec<DualWindow<T>>,
}

impl<T: Real> DualFrame<T> {
    /// Same pieces, anchors and modulation counts as `sel`, in the same order.
    pub fn matches(&self, sel: &SelectionFunction<T>) -> bool {
        self.signal_len == sel.signal_len()
            && self.duals.len() == sel.n_pieces()
            && self.duals.iter().zip(sel.iter()).all(|(d, (p, m, prof, anchor))| {
                d.piece() == p && d.modulations == m && d.start == anchor && d.samples.len() == prof.length
            })
    }
}

/// `φ̃_{0,n,r} = 𝒯_{na} w_r / diag(S_I)` on each window's support.
pub fn canonical_dual<T: Real>(sel: &SelectionFunction<T>) -> Result<DualFrame<T>> {
    canonical_dual_with(sel, &FourierEngine::new())
}

/// [`canonical_dual`] with its products tallied on `engine`.
pub fn canonical_dual_with<T: Real>(sel: &SelectionFunction<T>, engine: &FourierEngine<T>) -> Result<DualFrame<T>> {
    let diag = match superposition_frame_operator(sel) {
        FrameOperator::Diagonal(d) => d,
        FrameOperator::Dense { .. } => {
            let (_, m, prof, _) = sel.iter().find(|(_, m, prof, _)| *m < prof.length).expect("dense implies a short piece");
            return Err(Error::RefinementTooCoarse { requested: m, length: prof.length });
        }
    };
    let len = sel.signal_len();
    if let Some(t) = diag.iter().position(|&d| d.is_nan() || d <= T::zero()) {
        return Err(Error::NotAFrame { lambda_min: diag[t].as_f64(), threshold: 0.0 });
    }
    let mut duals = Vec::with_capacity(sel.n_pieces());
    let mut products = 0;
    for (p, m, prof, anchor) in sel.iter() {
        let samples = prof.samples.iter().enumerate().map(|(j, &v)| v / diag[(anchor + j) % len]).collect();
        products += 2 * prof.length;
        duals.push(DualWindow { n: p.start, r: p.order, start: anchor, modulations: m, samples });
    }
    engine.tally(products);
    Ok(DualFrame { origin: DualOrigin::CanonicalInverse, signal_len: len, duals })
}

/// `x = Σ ⟨x, φ⟩ φ̃`: `M·IDFT` per piece, times the dual window, overlap-added
/// in ascending piece order.
pub fn dual_reconstruct<T: Real>(
    c: &CoefficientSet<T>,
    d: &DualFrame<T>,
    engine: &FourierEngine<T>,
) -> Result<Signal<T>> {
    if !d.matches(c.selection()) {
        return Err(Error::SelectionMismatch);
    }
    let segments: Vec<Vec<Complex<T>>> = c
        .entries()
        .par_iter()
        .map(|coefs| {
            let mut buf = coefs.clone();
            engine.inverse_unscaled(&mut buf);
            buf
        })
        .collect();
    let mut out = vec![Complex::new(T::zero(), T::zero()); d.signal_len];
    for (dual, seg) in d.duals.iter().zip(&segments) {
        overlap_add_weighted(&mut out, seg, dual.start, &dual.samples);
        engine.tally(dual.samples.len());
    }
    Ok(Signal::new(out))
}
