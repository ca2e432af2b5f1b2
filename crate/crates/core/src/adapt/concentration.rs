//! Spectral concentration `Σ|c|⁴ / (Σ|c|²)²` and the greedy merge search.

use serde::{Deserialize, Serialize};

use crate::dft::FourierEngine;
use crate::error::{Error, Result};
use crate::gabor::{check_len, GaborSystem};
use crate::scalar::Real;
use crate::segment;
use crate::signal::Signal;
use crate::superposition::{MergedProfile, OrderedPartition, Piece};

/// Relative margin below which two concentration scores count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Score in `[1/M_r, 1]`; larger means more concentrated.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ConcentrationScore {
    pub value: f64,
}

/// `Σ|c|⁴ / (Σ|c|²)²` over a coefficient vector.
pub fn concentration_of<T: Real>(coefs: &[num_complex::Complex<T>]) -> Result<ConcentrationScore> {
    let (mut e2, mut e4) = (0.0f64, 0.0f64);
    for c in coefs {
        let p = c.norm_sqr().as_f64();
        e2 += p;
        e4 += p * p;
    }
    if e2 == 0.0 {
        return Err(Error::ZeroEnergySegment);
    }
    Ok(ConcentrationScore { value: e4 / (e2 * e2) })
}

/// Merged windows `w_0, …, w_{r_max}` with their local modulation counts.
pub(crate) struct ProfileLadder<T> {
    pub profiles: Vec<MergedProfile<T>>,
    pub modulations: Vec<usize>,
}

impl<T: Real> ProfileLadder<T> {
    pub fn new(g: &GaborSystem<T>, r_max: usize) -> Result<Self> {
        let top = r_max.min(g.translates() - 1);
        let profiles: Vec<_> = (0..=top).map(|r| MergedProfile::new(g.window(), g.hop(), r)).collect::<Result<_>>()?;
        let modulations = profiles.iter().map(|p| p.length.max(g.modulations())).collect();
        Ok(Self { profiles, modulations })
    }

    pub fn coefficients(&self, x: &Signal<T>, g: &GaborSystem<T>, n: usize, r: usize, engine: &FourierEngine<T>) -> Vec<num_complex::Complex<T>> {
        let prof = &self.profiles[r];
        segment::analyze(x.samples(), &prof.samples, prof.anchor(n, g.hop(), g.signal_len()), self.modulations[r], engine)
    }
}

/// Concentration of `⟨x, 𝓜_{m b_r} 𝒯_{na} w_r⟩` over `m ∈ ℤ_{M_r}`, `M_r = max(len(w_r), M)`.
pub fn concentration<T: Real>(x: &Signal<T>, g: &GaborSystem<T>, n: usize, r: usize) -> Result<ConcentrationScore> {
    check_len(x, g)?;
    let prof = MergedProfile::new(g.window(), g.hop(), r)?;
    let m = prof.length.max(g.modulations());
    let coefs = segment::analyze(x.samples(), &prof.samples, prof.anchor(n, g.hop(), g.signal_len()), m, &FourierEngine::new());
    concentration_of(&coefs)
}

/// State update after a rejected merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetRule {
    /// Start a fresh piece at the rejected translate: `(p, n_p) ← (0, n)`.
    #[default]
    Prose,
    /// `(p, n_p) ← (p, n + p + 1)`; steps whose state names no current piece
    /// are skipped.
    AsPrinted,
}

/// One proposal of the greedy search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreedyStep {
    pub n: usize,
    pub anchor: usize,
    pub order: usize,
    /// `None` when the step proposed nothing.
    pub merged: Option<f64>,
    pub left: Option<f64>,
    pub right: Option<f64>,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyResult {
    pub partition: OrderedPartition,
    pub steps: Vec<GreedyStep>,
}

/// Grows each window forward while merging raises concentration above both parts.
///
/// Zero-energy segments score 0. Merges beyond `r_max` are rejected, and so
/// are merges within [`TIE_TOLERANCE`] of the better part.
pub fn greedy_adapt<T: Real>(x: &Signal<T>, g: &GaborSystem<T>, r_max: usize, rule: ResetRule) -> Result<GreedyResult> {
    check_len(x, g)?;
    let n_windows = g.translates();
    let ladder = ProfileLadder::new(g, r_max)?;
    let engine = FourierEngine::new();
    let score = |n: usize, r: usize| -> f64 {
        concentration_of(&ladder.coefficients(x, g, n, r, &engine)).map(|c| c.value).unwrap_or(0.0)
    };
    // piece_at[n] = Some(order) when a piece starts at n
    let mut piece_at: Vec<Option<usize>> = vec![Some(0); n_windows];
    let (mut p, mut n_p) = (0usize, 0usize);
    let mut steps = Vec::with_capacity(n_windows);
    for n in 1..n_windows {
        let consistent = n_p < n_windows && piece_at[n_p] == Some(p) && n_p + p + 1 == n && piece_at[n] == Some(0);
        if !consistent {
            steps.push(GreedyStep { n, anchor: n_p, order: p, merged: None, left: None, right: None, accepted: false });
            continue;
        }
        let left = score(n_p, p);
        let right = score(n, 0);
        let within_cap = p < r_max.min(n_windows - 1);
        let merged = if within_cap { Some(score(n_p, p + 1)) } else { None };
        let accepted = merged.is_some_and(|c| c > left.max(right) * (1.0 + TIE_TOLERANCE));
        steps.push(GreedyStep { n, anchor: n_p, order: p, merged, left: Some(left), right: Some(right), accepted });
        if accepted {
            piece_at[n_p] = Some(p + 1);
            piece_at[n] = None;
            p += 1;
        } else {
            match rule {
                ResetRule::Prose => {
                    p = 0;
                    n_p = n;
                }
                ResetRule::AsPrinted => n_p = n + p + 1,
            }
        }
    }
    let pieces = piece_at.iter().enumerate().filter_map(|(n, o)| o.map(|r| Piece::new(n, r))).collect();
    Ok(GreedyResult { partition: OrderedPartition::new(n_windows, pieces)?, steps })
}
