//! Gabor systems `𝒢(w, a, b)` on ℂ^L: analysis, frame operators and bounds.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dft::FourierEngine;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::segment;
use crate::signal::{Signal, Window};

/// Largest dimension for which bounds use a dense symmetric eigensolver.
pub const DENSE_EIGEN_LIMIT: usize = 4096;

/// Relative threshold on `λ_min / B` below which a system is not a frame.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Relative threshold for the covering sums.
pub const COVERING_TOLERANCE: f64 = 1e-12;

const LANCZOS_STEPS: usize = 400;

/// Window plus time step `a` and modulation count `M = L/b`.
///
/// The frequency step `b = L/M` may be fractional; `M` is the quantity every
/// formula uses, so it is the one stored.
#[derive(Debug, Clone)]
pub struct GaborSystem<T> {
    window: Window<T>,
    hop: usize,
    modulations: usize,
}

impl<T: Real> GaborSystem<T> {
    pub fn new(window: Window<T>, hop: usize, modulations: usize) -> Result<Self> {
        let len = window.len();
        if hop == 0 || !len.is_multiple_of(hop) {
            return Err(Error::InvalidLattice(format!("time step {hop} does not divide L = {len}")));
        }
        if modulations == 0 {
            return Err(Error::InvalidLattice("modulation count must be positive".into()));
        }
        Ok(Self { window, hop, modulations })
    }

    pub fn window(&self) -> &Window<T> {
        &self.window
    }

    /// `L`
    pub fn signal_len(&self) -> usize {
        self.window.len()
    }

    /// `a`
    pub fn hop(&self) -> usize {
        self.hop
    }

    /// `N = L / a`
    pub fn translates(&self) -> usize {
        self.window.len() / self.hop
    }

    /// `M = L / b`
    pub fn modulations(&self) -> usize {
        self.modulations
    }

    /// `b = L / M`
    pub fn frequency_step(&self) -> f64 {
        self.signal_len() as f64 / self.modulations as f64
    }

    /// First sample of the support arc of `𝒯_{na} w`.
    pub fn anchor(&self, n: usize) -> usize {
        (n * self.hop + self.window.support().start) % self.signal_len()
    }

    /// `φ_{m,n}` written out sample by sample.
    pub fn element(&self, m: usize, n: usize) -> Signal<T> {
        Signal::new(segment::element(self.signal_len(), &self.window.profile(), self.anchor(n), m, self.modulations))
    }

    /// Same window and time step, `M'` modulations.
    pub fn with_modulations(&self, modulations: usize) -> Result<Self> {
        Self::new(self.window.clone(), self.hop, modulations)
    }
}

/// Gabor coefficients `X[m, n]` stored column by column (one column per `n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StftMatrix<T> {
    pub modulations: usize,
    pub columns: Vec<Vec<Complex<T>>>,
}

impl<T: Real> StftMatrix<T> {
    pub fn get(&self, m: usize, n: usize) -> Complex<T> {
        self.columns[n][m]
    }
}

/// `X[m, n] = ⟨x, φ_{m,n}⟩` for all `m ∈ ℤ_M`, `n ∈ ℤ_N`.
pub fn stft_analyze<T: Real>(x: &Signal<T>, g: &GaborSystem<T>, engine: &FourierEngine<T>) -> Result<StftMatrix<T>> {
    check_len(x, g)?;
    let profile = g.window.profile();
    let columns = (0..g.translates())
        .map(|n| segment::analyze(x.samples(), &profile, g.anchor(n), g.modulations, engine))
        .collect();
    Ok(StftMatrix { modulations: g.modulations, columns })
}

pub(crate) fn check_len<T: Real>(x: &Signal<T>, g: &GaborSystem<T>) -> Result<()> {
    if x.len() != g.signal_len() {
        return Err(Error::LengthMismatch { expected: g.signal_len(), got: x.len() });
    }
    Ok(())
}

/// Frame operator in diagonal or dense (row-major, real symmetric) form.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameOperator<T> {
    Diagonal(Vec<T>),
    Dense { dim: usize, entries: Vec<T> },
}

impl<T: Real> FrameOperator<T> {
    pub fn dim(&self) -> usize {
        match self {
            Self::Diagonal(d) => d.len(),
            Self::Dense { dim, .. } => *dim,
        }
    }

    pub fn entry(&self, t: usize, u: usize) -> T {
        match self {
            Self::Diagonal(d) => {
                if t == u {
                    d[t]
                } else {
                    T::zero()
                }
            }
            Self::Dense { dim, entries } => entries[t * dim + u],
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|t| self.entry(t, t)).collect()
    }

    /// Largest off-diagonal magnitude.
    pub fn max_off_diagonal(&self) -> T {
        match self {
            Self::Diagonal(_) => T::zero(),
            Self::Dense { dim, entries } => {
                let mut best = T::zero();
                for t in 0..*dim {
                    for u in 0..*dim {
                        if t != u {
                            best = best.max(entries[t * dim + u].abs());
                        }
                    }
                }
                best
            }
        }
    }

    pub fn to_dense(&self) -> Self {
        match self {
            Self::Dense { .. } => self.clone(),
            Self::Diagonal(d) => {
                let dim = d.len();
                let mut entries = vec![T::zero(); dim * dim];
                for (t, &v) in d.iter().enumerate() {
                    entries[t * dim + t] = v;
                }
                Self::Dense { dim, entries }
            }
        }
    }

    /// `S x`
    pub fn apply(&self, x: &Signal<T>) -> Signal<T> {
        let dim = self.dim();
        let xs = x.samples();
        let out = match self {
            Self::Diagonal(d) => xs.iter().zip(d).map(|(&v, &s)| v * s).collect(),
            Self::Dense { entries, .. } => (0..dim)
                .map(|t| {
                    (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, u| acc + xs[u] * entries[t * dim + u])
                })
                .collect(),
        };
        Signal::new(out)
    }
}

/// Adds the Walnut band of one anchored window to a dense accumulator:
/// `S[t, t'] += M·v[j]·v[j']` whenever `j ≡ j' (mod M)`.
pub(crate) fn accumulate_walnut<T: Real>(entries: &mut [T], dim: usize, profile: &[T], anchor: usize, modulations: usize) {
    let scale = T::of_usize(modulations);
    for (j, &a) in profile.iter().enumerate() {
        if a == T::zero() {
            continue;
        }
        let t = (anchor + j) % dim;
        let mut k = j % modulations;
        while k < profile.len() {
            let b = profile[k];
            if b != T::zero() {
                let u = (anchor + k) % dim;
                entries[t * dim + u] = entries[t * dim + u] + scale * a * b;
            }
            k += modulations;
        }
    }
}

/// Walnut form of `S` for `g`: diagonal when `M ≥ len(w)`, dense otherwise.
pub fn frame_operator<T: Real>(g: &GaborSystem<T>) -> FrameOperator<T> {
    if g.modulations >= g.window.length() {
        let scale = T::of_usize(g.modulations);
        FrameOperator::Diagonal(covering_sums(&g.window, g.hop).into_iter().map(|s| s * scale).collect())
    } else {
        frame_operator_dense(g)
    }
}

/// Walnut form of `S` for `g`, always materialized densely.
pub fn frame_operator_dense<T: Real>(g: &GaborSystem<T>) -> FrameOperator<T> {
    let dim = g.signal_len();
    let mut entries = vec![T::zero(); dim * dim];
    let profile = g.window.profile();
    for n in 0..g.translates() {
        accumulate_walnut(&mut entries, dim, &profile, g.anchor(n), g.modulations);
    }
    FrameOperator::Dense { dim, entries }
}

/// Frame bounds `A ≤ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_tight(&self, rel_tol: f64) -> bool {
        (self.upper - self.lower).abs() <= rel_tol * self.upper
    }
}

/// Optimal bounds: the extreme eigenvalues of `S`.
pub fn frame_bounds<T: Real>(s: &FrameOperator<T>) -> Result<FrameBounds> {
    let (lower, upper) = match s {
        FrameOperator::Diagonal(d) => d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let v = v.as_f64();
            (lo.min(v), hi.max(v))
        }),
        FrameOperator::Dense { dim, entries } => {
            let m = DMatrix::from_fn(*dim, *dim, |i, j| entries[i * dim + j].as_f64());
            if *dim <= DENSE_EIGEN_LIMIT {
                let eig = SymmetricEigen::new(m);
                eig.eigenvalues.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
            } else {
                extreme_eigenvalues_iterative(&m)
            }
        }
    };
    let threshold = RANK_TOLERANCE * upper;
    if lower.is_nan() || lower <= threshold {
        return Err(Error::NotAFrame { lambda_min: lower, threshold });
    }
    Ok(FrameBounds { lower, upper })
}

/// Lanczos with full reorthogonalization; extreme Ritz values of the
/// tridiagonal projection converge first.
fn extreme_eigenvalues_iterative(m: &DMatrix<f64>) -> (f64, f64) {
    let dim = m.nrows();
    let steps = dim.min(LANCZOS_STEPS);
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(steps);
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut v = nalgebra::DVector::from_fn(dim, |i, _| 1.0 + ((i * 7919) % 13) as f64 * 1e-2);
    v.normalize_mut();
    for _ in 0..steps {
        let mut w = m * &v;
        let a = w.dot(&v);
        alpha.push(a);
        basis.push(v.clone());
        for _ in 0..2 {
            for q in &basis {
                let c = w.dot(q);
                w.axpy(-c, q, 1.0);
            }
        }
        let b = w.norm();
        if b <= 1e-12 * a.abs().max(1.0) {
            break;
        }
        beta.push(b);
        v = w / b;
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    eig.eigenvalues.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// `Σ_n |w[t − na]|²` for every `t`.
pub fn covering_sums<T: Real>(w: &Window<T>, a: usize) -> Vec<T> {
    let len = w.len();
    let mut sums = vec![T::zero(); len];
    let profile = w.profile();
    let start = w.support().start;
    for n in 0..len / a {
        let anchor = n * a + start;
        for (j, &v) in profile.iter().enumerate() {
            let t = (anchor + j) % len;
            sums[t] = sums[t] + v * v;
        }
    }
    sums
}

/// Every sample is covered by some translate, up to [`COVERING_TOLERANCE`].
pub fn covering_condition<T: Real>(w: &Window<T>, a: usize) -> bool {
    let sums = covering_sums(w, a);
    let peak = sums.iter().fold(T::zero(), |m, &v| m.max(v));
    let eps = T::of(COVERING_TOLERANCE) * peak;
    peak > T::zero() && sums.iter().all(|&v| v > eps)
}

/// `𝒢(w, a, L/M')` with `M' ≥ len(w)`: diagonal operator `(M'/M)·S[t,t]`.
pub fn refine_lattice<T: Real>(g: &GaborSystem<T>, modulations: usize) -> Result<GaborSystem<T>> {
    if modulations < g.window.length() {
        return Err(Error::RefinementTooCoarse { requested: modulations, length: g.window.length() });
    }
    g.with_modulations(modulations)
}
