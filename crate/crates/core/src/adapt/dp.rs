//! Additive segment costs and the dynamic-programming partition search.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::concentration::ProfileLadder;
use crate::dft::FourierEngine;
use crate::error::{Error, Result};
use crate::gabor::{check_len, GaborSystem};
use crate::scalar::Real;
use crate::signal::Signal;
use crate::superposition::{OrderedPartition, Piece};

/// `−Σ v log v` with `v = |c|² / Σ|c|²`; zero for a zero vector.
pub fn entropy_cost<T: Real>(coefs: &[Complex<T>]) -> f64 {
    let total: f64 = coefs.iter().map(|c| c.norm_sqr().as_f64()).sum();
    if total == 0.0 {
        return 0.0;
    }
    entropy_cost_normalized(coefs, total)
}

/// `−Σ v log v` with `v = |c|² / energy` for an externally fixed `energy`.
pub fn entropy_cost_normalized<T: Real>(coefs: &[Complex<T>], energy: f64) -> f64 {
    coefs
        .iter()
        .map(|c| c.norm_sqr().as_f64() / energy)
        .filter(|&v| v > 0.0)
        .map(|v| -v * v.ln())
        .sum()
}

/// Cost of covering translates `n, …, n + r` with one piece.
pub trait SegmentCost: Sync {
    fn cost(&self, n: usize, r: usize) -> f64;
}

impl<F: Fn(usize, usize) -> f64 + Sync> SegmentCost for F {
    fn cost(&self, n: usize, r: usize) -> f64 {
        self(n, r)
    }
}

/// `D_n`: samples where `𝒯_{na} w` strictly dominates every other translate;
/// ties go to the smaller `n`, uncovered samples to no set.
pub fn dominance_sets<T: Real>(g: &GaborSystem<T>) -> Vec<Vec<usize>> {
    let len = g.signal_len();
    let w = g.window().samples();
    let mut best: Vec<(T, Option<usize>)> = vec![(T::zero(), None); len];
    for n in 0..g.translates() {
        let shift = n * g.hop();
        for &t0 in &g.window().support().support {
            let t = (t0 + shift) % len;
            if w[t0] > best[t].0 {
                best[t] = (w[t0], Some(n));
            }
        }
    }
    let mut sets = vec![Vec::new(); g.translates()];
    for (t, (_, owner)) in best.into_iter().enumerate() {
        if let Some(n) = owner {
            sets[n].push(t);
        }
    }
    sets
}

/// Entropy of each piece's block of `x`, restricted to the dominance sets of
/// its translates and normalized by the whole-signal energy.
pub struct EntropyCost<'a, T: Real> {
    x: &'a Signal<T>,
    g: &'a GaborSystem<T>,
    ladder: ProfileLadder<T>,
    owner: Vec<Option<usize>>,
    energy: f64,
    engine: FourierEngine<T>,
}

impl<'a, T: Real> EntropyCost<'a, T> {
    pub fn new(x: &'a Signal<T>, g: &'a GaborSystem<T>, r_max: usize) -> Result<Self> {
        check_len(x, g)?;
        let energy = x.energy().as_f64();
        if energy == 0.0 {
            return Err(Error::ZeroSignal);
        }
        let mut owner = vec![None; g.signal_len()];
        for (n, set) in dominance_sets(g).into_iter().enumerate() {
            for t in set {
                owner[t] = Some(n);
            }
        }
        Ok(Self { x, g, ladder: ProfileLadder::new(g, r_max)?, owner, energy, engine: FourierEngine::new() })
    }

    /// Unitary spectrum of the restricted block of piece `(n, r)`.
    pub fn block_spectrum(&self, n: usize, r: usize) -> Vec<Complex<T>> {
        let prof = &self.ladder.profiles[r];
        let m = self.ladder.modulations[r];
        let len = self.g.signal_len();
        let n_windows = self.g.translates();
        let anchor = prof.anchor(n, self.g.hop(), len);
        let inside = |k: usize| (k + n_windows - n) % n_windows <= r;
        let mut buf = vec![Complex::new(T::zero(), T::zero()); m];
        for j in 0..prof.length {
            let t = (anchor + j) % len;
            if self.owner[t].is_some_and(inside) {
                buf[j % m] = buf[j % m] + self.x.samples()[t];
            }
        }
        self.engine.forward(&mut buf);
        let scale = T::one() / T::of_usize(m).sqrt();
        buf.iter_mut().for_each(|c| *c = *c * scale);
        buf
    }
}

impl<T: Real> SegmentCost for EntropyCost<'_, T> {
    fn cost(&self, n: usize, r: usize) -> f64 {
        entropy_cost_normalized(&self.block_spectrum(n, r), self.energy)
    }
}

/// Prefix-optimal costs and choices of the partition search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpTable {
    /// `J*_k`: best cost of covering translates `0..k`, `k = 0..=N`.
    pub j_star: Vec<f64>,
    /// Width of the last piece in the optimal cover of `0..k`.
    pub back: Vec<usize>,
    /// `segment_costs[n][r]`, `r ≤ r_max`, `n + r < N`.
    pub segment_costs: Vec<Vec<f64>>,
    pub partition: OrderedPartition,
}

impl DpTable {
    pub fn total_cost(&self) -> f64 {
        *self.j_star.last().unwrap_or(&0.0)
    }
}

/// Minimizes `Σ J(n, r)` over partitions of `0..N` into pieces of at most
/// `r_max + 1` translates. Ties keep the shorter last piece.
pub fn dp_partition(n_windows: usize, r_max: usize, cost: &dyn SegmentCost) -> Result<DpTable> {
    if n_windows == 0 {
        return Err(Error::InvalidPartition(crate::superposition::PartitionViolation::Empty));
    }
    let top = r_max.min(n_windows - 1);
    let segment_costs: Vec<Vec<f64>> = (0..n_windows)
        .into_par_iter()
        .map(|n| (0..=top.min(n_windows - 1 - n)).map(|r| cost.cost(n, r)).collect())
        .collect();
    let mut j_star = vec![0.0; n_windows + 1];
    let mut back = vec![0usize; n_windows + 1];
    for k in 1..=n_windows {
        let mut best = f64::INFINITY;
        let mut arg = 1;
        for width in 1..=k.min(top + 1) {
            let v = j_star[k - width] + segment_costs[k - width][width - 1];
            if v < best {
                best = v;
                arg = width;
            }
        }
        j_star[k] = best;
        back[k] = arg;
    }
    let mut pieces = Vec::new();
    let mut k = n_windows;
    while k > 0 {
        let width = back[k];
        pieces.push(Piece::new(k - width, width - 1));
        k -= width;
    }
    let partition = OrderedPartition::new(n_windows, pieces)?;
    Ok(DpTable { j_star, back, segment_costs, partition })
}

/// Partition search with the entropy cost on dominance-restricted blocks.
pub fn dp_adapt<T: Real>(x: &Signal<T>, g: &GaborSystem<T>, r_max: usize) -> Result<DpTable> {
    let cost = EntropyCost::new(x, g, r_max)?;
    dp_partition(g.translates(), r_max, &cost)
}
