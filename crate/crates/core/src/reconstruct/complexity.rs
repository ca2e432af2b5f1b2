//! Closed-form multiply counts for analysis and the synthesis paths.

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{canonical_dual_with, dual_reconstruct, gola_reconstruct, lapped_duals};
use crate::dft::{FourierEngine, OpCounter};
use crate::error::Result;
use crate::gabor::GaborSystem;
use crate::scalar::Real;
use crate::signal::{Signal, WindowKind};
use crate::superposition::{make_selection, superposition_analyze, Mode, OrderedPartition, SelectionFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexityPath {
    /// Windowing plus one FFT per piece: `N M (1 + log₂ M)`.
    Analysis,
    /// Inverse FFTs only: `N M log₂ M`.
    OverlapAdd,
    /// Inverse FFTs, dual multiply, dual construction: `N M (3 + log₂ M)`.
    CanonicalDual,
    /// Inverse FFTs and a pre-computed dual multiply: `N M (1 + log₂ M)`.
    PrecomputedDual,
}

/// Formula value for `n` windows of `m` modulations each.
pub fn table_formula(path: ComplexityPath, n: usize, m: usize) -> f64 {
    let nm = (n * m) as f64;
    let log = (m as f64).log2();
    match path {
        ComplexityPath::Analysis | ComplexityPath::PrecomputedDual => nm * (1.0 + log),
        ComplexityPath::OverlapAdd => nm * log,
        ComplexityPath::CanonicalDual => nm * (3.0 + log),
    }
}

/// Formula value for a selection, with `N_g` pieces and `M_g` the largest
/// modulation count (exact for global selections, an upper bound otherwise).
/// Rounded to the nearest integer.
pub fn count_multiplies<T: Real>(path: ComplexityPath, sel: &SelectionFunction<T>) -> u64 {
    let m_g = sel.mod_counts().iter().copied().max().unwrap_or(1);
    table_formula(path, sel.n_pieces(), m_g).round() as u64
}

impl ComplexityPath {
    pub const ALL: [ComplexityPath; 4] = [Self::Analysis, Self::OverlapAdd, Self::CanonicalDual, Self::PrecomputedDual];

    pub fn name(self) -> &'static str {
        match self {
            Self::Analysis => "analysis",
            Self::OverlapAdd => "overlap-add",
            Self::CanonicalDual => "canonical-dual",
            Self::PrecomputedDual => "precomputed-dual",
        }
    }
}

/// One benchmark row: counted multiplies against the formula, plus the best
/// wall time over the repeats (uninstrumented engine).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub path: ComplexityPath,
    pub signal_len: usize,
    pub pieces: usize,
    pub modulations: usize,
    pub multiplies: u64,
    pub formula: f64,
    pub seconds: f64,
}

impl Measurement {
    pub fn ratio(&self) -> f64 {
        self.multiplies as f64 / self.formula
    }
}

/// Hann 256 at hop 128. Adapted: pieces of 1, 2 and 3 translates in turn at
/// global `M_g = 512`. Otherwise the plain STFT with `M = 256`. Needs `len`
/// to be a multiple of 128.
pub fn bench_selection<T: Real>(len: usize, adapted: bool) -> Result<(GaborSystem<T>, SelectionFunction<T>)> {
    let w = WindowKind::Hann.build(len, 256)?;
    if !adapted {
        let g = GaborSystem::new(w, 128, 256)?;
        let sel = make_selection(&OrderedPartition::singletons(g.translates()), &g, Mode::Global)?;
        return Ok((g, sel));
    }
    let g = GaborSystem::new(w, 128, 512)?;
    let n = g.translates();
    let mut cuts = Vec::new();
    let (mut k, mut width) = (0, 1);
    while k < n {
        cuts.push(k);
        k += width;
        width = width % 3 + 1;
    }
    let sel = make_selection(&OrderedPartition::from_cuts(n, &cuts)?, &g, Mode::Global)?;
    Ok((g, sel))
}

/// Runs `path` once on a counting engine and `repeats` times on a plain one.
pub fn measure_path<T: Real>(
    path: ComplexityPath,
    x: &Signal<T>,
    g: &GaborSystem<T>,
    sel: &SelectionFunction<T>,
    repeats: usize,
) -> Result<Measurement> {
    let plain = FourierEngine::new();
    let coefs = superposition_analyze(x, sel, &plain)?;
    let precomputed = match path {
        ComplexityPath::PrecomputedDual => {
            Some(lapped_duals(g.window(), g.hop(), sel.uniform_modulations().unwrap_or(g.modulations()))?.select(sel)?)
        }
        _ => None,
    };
    let run = |engine: &FourierEngine<T>| -> Result<()> {
        match path {
            ComplexityPath::Analysis => {
                superposition_analyze(x, sel, engine)?;
            }
            ComplexityPath::OverlapAdd => {
                gola_reconstruct(&coefs, g, engine)?;
            }
            ComplexityPath::CanonicalDual => {
                let d = canonical_dual_with(sel, engine)?;
                dual_reconstruct(&coefs, &d, engine)?;
            }
            ComplexityPath::PrecomputedDual => {
                dual_reconstruct(&coefs, precomputed.as_ref().expect("duals built above"), engine)?;
            }
        }
        Ok(())
    };
    let counter = Arc::new(OpCounter::new());
    run(&FourierEngine::counting(counter.clone()))?;
    run(&plain)?;
    let mut seconds = f64::INFINITY;
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        run(&plain)?;
        seconds = seconds.min(t.elapsed().as_secs_f64());
    }
    let modulations = sel.mod_counts().iter().copied().max().unwrap_or(1);
    Ok(Measurement {
        path,
        signal_len: x.len(),
        pieces: sel.n_pieces(),
        modulations,
        multiplies: counter.get(),
        formula: table_formula(path, sel.n_pieces(), modulations),
        seconds,
    })
}

/// Least-squares slope of `log seconds` against `log L`.
pub fn scaling_exponent(rows: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(l, s)| ((l as f64).ln(), s.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_values() {
        assert_eq!(table_formula(ComplexityPath::Analysis, 4, 8), 128.0);
        assert_eq!(table_formula(ComplexityPath::OverlapAdd, 3, 8), 72.0);
        assert_eq!(table_formula(ComplexityPath::CanonicalDual, 3, 8), 144.0);
        assert_eq!(table_formula(ComplexityPath::PrecomputedDual, 1, 1), 1.0);
        assert_eq!(table_formula(ComplexityPath::OverlapAdd, 1, 1), 0.0);
    }
}
