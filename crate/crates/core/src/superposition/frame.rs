//! Adaptive analysis, frame operators, the diagonal-dominance test and bounds.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::Piece;
use super::selection::SelectionFunction;
use crate::dft::FourierEngine;
use crate::error::{Error, Result};
use crate::gabor::{accumulate_walnut, covering_sums, frame_bounds, frame_operator, FrameBounds, FrameOperator, GaborSystem};
use crate::scalar::Real;
use crate::segment;
use crate::signal::Signal;

/// `X[m, n, r]` stored per piece at the local index `m ∈ ℤ_{M[n,r]}`.
#[derive(Debug, Clone)]
pub struct CoefficientSet<T> {
    selection: SelectionFunction<T>,
    entries: Vec<Vec<Complex<T>>>,
}

impl<T: Real> CoefficientSet<T> {
    /// Wraps raw per-piece vectors; lengths must match `M[n, r]`.
    pub fn from_parts(selection: SelectionFunction<T>, entries: Vec<Vec<Complex<T>>>) -> Result<Self> {
        if entries.len() != selection.n_pieces() {
            return Err(Error::LengthMismatch { expected: selection.n_pieces(), got: entries.len() });
        }
        for (e, &m) in entries.iter().zip(selection.mod_counts()) {
            if e.len() != m {
                return Err(Error::LengthMismatch { expected: m, got: e.len() });
            }
        }
        Ok(Self { selection, entries })
    }

    pub fn selection(&self) -> &SelectionFunction<T> {
        &self.selection
    }

    pub fn entries(&self) -> &[Vec<Complex<T>>] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Vec<Complex<T>>] {
        &mut self.entries
    }

    pub fn get(&self, piece: Piece) -> Option<&[Complex<T>]> {
        let idx = self.selection.partition().pieces().binary_search(&piece).ok()?;
        Some(&self.entries[idx])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Piece, &[Complex<T>])> + '_ {
        self.selection.partition().pieces().iter().copied().zip(self.entries.iter().map(Vec::as_slice))
    }

    /// `Σ |X|²` over all stored coefficients.
    pub fn energy(&self) -> T {
        self.entries.iter().flatten().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    pub fn n_coefficients(&self) -> usize {
        self.entries.iter().map(Vec::len).sum()
    }
}

/// `X[m, n, r] = ⟨x, φ_{m,n,r}⟩` for every selected element.
pub fn superposition_analyze<T: Real>(
    x: &Signal<T>,
    sel: &SelectionFunction<T>,
    engine: &FourierEngine<T>,
) -> Result<CoefficientSet<T>> {
    if x.len() != sel.signal_len() {
        return Err(Error::LengthMismatch { expected: sel.signal_len(), got: x.len() });
    }
    let jobs: Vec<_> = sel.iter().map(|(_, m, prof, anchor)| (m, prof, anchor)).collect();
    let entries = jobs
        .par_iter()
        .map(|&(m, prof, anchor)| segment::analyze(x.samples(), &prof.samples, anchor, m, engine))
        .collect();
    Ok(CoefficientSet { selection: sel.clone(), entries })
}

/// `φ_{m,n,r}` written out sample by sample.
pub fn superposition_element<T: Real>(sel: &SelectionFunction<T>, piece: Piece, m: usize) -> Option<Signal<T>> {
    let (_, count, prof, anchor) = sel.iter().find(|(p, ..)| *p == piece)?;
    Some(Signal::new(segment::element(sel.signal_len(), &prof.samples, anchor, m, count)))
}

/// Outcome of the diagonal-dominance test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyReport<T> {
    pub passed: bool,
    /// `Σ β(0, t) − Σ_{k≠0} β(kM_g, t)` per sample.
    pub margin: Vec<T>,
    /// `Σ β(0, t)` per sample.
    pub diagonal_terms: Vec<T>,
    /// `Σ_{k≠0} β(kM_g, t)` per sample.
    pub cross_terms: Vec<T>,
}

/// Strict diagonal dominance of the Walnut operator at a constant `M_g`.
///
/// `β` is evaluated in window-local coordinates `u = t − anchor`, with partner
/// offsets `u − kM_g` restricted to `0..L` as in the index range of the test.
pub fn sufficiency_test<T: Real>(sel: &SelectionFunction<T>) -> Result<SufficiencyReport<T>> {
    let m_g = sel.uniform_modulations().ok_or(Error::NonconstantModulation)?;
    let len = sel.signal_len();
    let mut diag = vec![T::zero(); len];
    let mut cross = vec![T::zero(); len];
    for (_, _, prof, anchor) in sel.iter() {
        let v = &prof.samples;
        for (u, &vu) in v.iter().enumerate() {
            if vu == T::zero() {
                continue;
            }
            let t = (anchor + u) % len;
            diag[t] = diag[t] + vu * vu;
            let mut partner = u % m_g;
            let mut acc = T::zero();
            while partner < v.len() {
                if partner != u {
                    acc = acc + v[partner];
                }
                partner += m_g;
            }
            cross[t] = cross[t] + vu * acc;
        }
    }
    let margin: Vec<T> = diag.iter().zip(&cross).map(|(&d, &c)| d - c).collect();
    let passed = margin.iter().all(|&m| m > T::zero());
    Ok(SufficiencyReport { passed, margin, diagonal_terms: diag, cross_terms: cross })
}

/// Walnut form of `S_I`: diagonal whenever every piece has `M[n, r] ≥ len(w_r)`.
pub fn superposition_frame_operator<T: Real>(sel: &SelectionFunction<T>) -> FrameOperator<T> {
    if sel.iter().any(|(_, m, prof, _)| m < prof.length) {
        return superposition_frame_operator_dense(sel);
    }
    let len = sel.signal_len();
    let mut diag = vec![T::zero(); len];
    for (_, m, prof, anchor) in sel.iter() {
        let scale = T::of_usize(m);
        for (j, &v) in prof.samples.iter().enumerate() {
            let t = (anchor + j) % len;
            diag[t] = diag[t] + scale * v * v;
        }
    }
    FrameOperator::Diagonal(diag)
}

/// Walnut form of `S_I`, always materialized densely.
pub fn superposition_frame_operator_dense<T: Real>(sel: &SelectionFunction<T>) -> FrameOperator<T> {
    let dim = sel.signal_len();
    let mut entries = vec![T::zero(); dim * dim];
    for (_, m, prof, anchor) in sel.iter() {
        accumulate_walnut(&mut entries, dim, &prof.samples, anchor, m);
    }
    FrameOperator::Dense { dim, entries }
}

/// Bounds of a superposition frame next to the extremal values over all selections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpositionBounds {
    pub bounds: FrameBounds,
    /// Smallest optimal lower bound over all admissible selections.
    pub a_opt: f64,
    /// Largest optimal upper bound over all admissible selections.
    pub b_opt: f64,
    /// Optimal lower bound of the base Gabor frame.
    pub base_lower: f64,
}

impl SuperpositionBounds {
    /// The base lower bound still bounds the superposition frame.
    pub fn preserves_base(&self, rel_tol: f64) -> bool {
        self.bounds.lower >= self.base_lower * (1.0 - rel_tol)
    }
}

/// Extremal lower and upper bounds over all selections built on `g`.
pub fn extremal_bounds<T: Real>(g: &GaborSystem<T>) -> (f64, f64) {
    let w = g.window();
    let cover = covering_sums(w, g.hop());
    let min_cover = cover.iter().fold(f64::INFINITY, |m, v| m.min(v.as_f64()));
    let mut total = vec![0.0f64; g.signal_len()];
    let (start, profile) = (w.support().start, w.profile());
    for n in 0..g.translates() {
        let shift = start + n * g.hop();
        for (j, &v) in profile.iter().enumerate() {
            total[(j + shift) % g.signal_len()] += v.as_f64();
        }
    }
    let max_sum_sq = total.iter().fold(0.0f64, |m, &v| m.max(v * v));
    let a_opt = g.modulations().max(w.length()) as f64 * min_cover;
    let b_opt = g.modulations().max(g.signal_len()) as f64 * max_sum_sq;
    (a_opt, b_opt)
}

pub fn superposition_bounds<T: Real>(sel: &SelectionFunction<T>, g: &GaborSystem<T>) -> Result<SuperpositionBounds> {
    let bounds = frame_bounds(&superposition_frame_operator(sel))?;
    let base = frame_bounds(&frame_operator(g))?;
    let (a_opt, b_opt) = extremal_bounds(g);
    Ok(SuperpositionBounds { bounds, a_opt, b_opt, base_lower: base.lower })
}
