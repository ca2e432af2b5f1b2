//! Partition-independent duals: lapped (overlap-add plus neighbor overlap) and
//! dyadic (neighbor overlap, `N = 2^k`).

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::dual::{DualFrame, DualOrigin, DualWindow};
use super::ola::ola_check;
use crate::error::{Error, Result};
use crate::gabor::covering_sums;
use crate::scalar::Real;
use crate::signal::Window;
use crate::superposition::{check_dyadic, MergedProfile, SelectionFunction};

/// First pair of translates further than one step apart that share support.
pub fn neighbor_overlap_violation<T: Real>(w: &Window<T>, a: usize) -> Option<(usize, usize)> {
    let len = w.len();
    let n_windows = len / a;
    let supp = &w.support().support;
    for k in 2..n_windows.saturating_sub(1) {
        let shift = k * a;
        if supp.iter().any(|&t| w.samples()[(t + len - shift) % len] != T::zero()) {
            return Some((0, k));
        }
    }
    None
}

/// Translates more than one step apart (cyclically) have disjoint supports.
pub fn neighbor_overlap_check<T: Real>(w: &Window<T>, a: usize) -> bool {
    neighbor_overlap_violation(w, a).is_none()
}

fn require_neighbor_overlap<T: Real>(w: &Window<T>, a: usize) -> Result<()> {
    match neighbor_overlap_violation(w, a) {
        Some((first, second)) => Err(Error::NeighborOverlapViolated { first, second }),
        None => Ok(()),
    }
}

/// Membership of a sample of `supp(w_r)` in the left, center or right set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LappedRegion {
    Left,
    Center,
    Right,
}

/// `supp(w_r)` split by overlap with the previous translate `𝒯_{−a} w` (left)
/// and the next one `𝒯_{(r+1)a} w` (right). Returned along the support arc.
pub fn lapped_sets<T: Real>(w: &Window<T>, a: usize, r: usize) -> Result<Vec<LappedRegion>> {
    let prof = MergedProfile::new(w, a, r)?;
    Ok(regions(w, a, &prof))
}

fn regions<T: Real>(w: &Window<T>, a: usize, prof: &MergedProfile<T>) -> Vec<LappedRegion> {
    let len = w.len();
    let n_windows = len / a;
    let r = prof.order;
    prof.samples
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let t = (prof.start + j) % len;
            if v == T::zero() || r + 1 == n_windows {
                LappedRegion::Center
            } else if w.samples()[(t + a) % len] != T::zero() {
                LappedRegion::Left
            } else if w.samples()[(t + len - ((r + 1) * a) % len) % len] != T::zero() {
                LappedRegion::Right
            } else {
                LappedRegion::Center
            }
        })
        .collect()
}

type CachedDual<T> = Arc<(MergedProfile<T>, Vec<T>)>;

/// Dual profiles per merge order, built on first use and reused for every
/// global selection at the same `M_g`.
pub struct LappedDuals<T: Real> {
    window: Window<T>,
    hop: usize,
    m_g: usize,
    cover: Vec<T>,
    center: T,
    cache: Vec<OnceLock<CachedDual<T>>>,
}

pub fn lapped_duals<T: Real>(w: &Window<T>, a: usize, m_g: usize) -> Result<LappedDuals<T>> {
    require_neighbor_overlap(w, a)?;
    let cert = ola_check(w, a)?;
    if !cert.holds {
        return Err(Error::OlaViolated { deviation: cert.max_deviation });
    }
    let n_windows = w.len() / a;
    let scale = T::of_usize(m_g);
    Ok(LappedDuals {
        window: w.clone(),
        hop: a,
        m_g,
        cover: covering_sums(w, a),
        center: T::of_usize(a) / (scale * w.dc_gain()),
        cache: (0..n_windows).map(|_| OnceLock::new()).collect(),
    })
}

impl<T: Real> LappedDuals<T> {
    pub fn modulations(&self) -> usize {
        self.m_g
    }

    /// Dual of `w_r` at the origin, along its support arc.
    pub fn profile(&self, r: usize) -> Result<&[T]> {
        Ok(&self.entry(r)?.1)
    }

    fn entry(&self, r: usize) -> Result<&CachedDual<T>> {
        let slot = self
            .cache
            .get(r)
            .ok_or_else(|| Error::Config(format!("merge order {r} must be below N = {}", self.cache.len())))?;
        if let Some(e) = slot.get() {
            return Ok(e);
        }
        let prof = MergedProfile::new(&self.window, self.hop, r)?;
        let len = self.window.len();
        let scale = T::of_usize(self.m_g);
        let dual = regions(&self.window, self.hop, &prof)
            .into_iter()
            .zip(&prof.samples)
            .enumerate()
            .map(|(j, (region, &v))| match region {
                LappedRegion::Center => {
                    if v == T::zero() {
                        T::zero()
                    } else {
                        self.center
                    }
                }
                LappedRegion::Left | LappedRegion::Right => v / (scale * self.cover[(prof.start + j) % len]),
            })
            .collect();
        Ok(slot.get_or_init(|| Arc::new((prof, dual))))
    }

    /// Duals for a global selection at this `M_g`.
    pub fn select(&self, sel: &SelectionFunction<T>) -> Result<DualFrame<T>> {
        select_from(sel, self.window.len(), self.hop, self.m_g, DualOrigin::LappedClosedForm, |r| {
            let e = self.entry(r)?;
            Ok(e.1.clone())
        })
    }
}

fn select_from<T: Real>(
    sel: &SelectionFunction<T>,
    len: usize,
    hop: usize,
    m_g: usize,
    origin: DualOrigin,
    mut dual_of: impl FnMut(usize) -> Result<Vec<T>>,
) -> Result<DualFrame<T>> {
    if sel.signal_len() != len || sel.hop() != hop || sel.uniform_modulations() != Some(m_g) {
        return Err(Error::SelectionMismatch);
    }
    let mut duals = Vec::with_capacity(sel.n_pieces());
    for (p, m, prof, anchor) in sel.iter() {
        if prof.length > m {
            return Err(Error::SelectionMismatch);
        }
        duals.push(DualWindow { n: p.start, r: p.order, start: anchor, modulations: m, samples: dual_of(p.order)? });
    }
    Ok(DualFrame { origin, signal_len: len, duals })
}

/// Canonical duals of each level `𝒢(w_r, a(r+1), L/M_g)`, `r = 2^h − 1`.
///
/// A level is kept only when `M_g ≥ len(w_r)`, which makes its frame
/// operator diagonal and `a(r+1)`-periodic, so one profile serves every
/// aligned translate.
#[derive(Debug, Clone)]
pub struct DyadicDuals<T> {
    signal_len: usize,
    hop: usize,
    m_g: usize,
    levels: Vec<Option<Vec<T>>>,
}

pub fn dyadic_duals<T: Real>(w: &Window<T>, a: usize, m_g: usize) -> Result<DyadicDuals<T>> {
    let len = w.len();
    if a == 0 || !len.is_multiple_of(a) {
        return Err(Error::InvalidLattice(format!("time step {a} does not divide L = {len}")));
    }
    let n_windows = len / a;
    if !n_windows.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { what: "N", value: n_windows });
    }
    require_neighbor_overlap(w, a)?;
    let scale = T::of_usize(m_g);
    let mut levels = Vec::new();
    let mut width = 1;
    while width <= n_windows {
        let prof = MergedProfile::new(w, a, width - 1)?;
        let level = if prof.length <= m_g {
            let merged = crate::superposition::superposition_window(w, a, width - 1, 0)?.window;
            let cover = covering_sums(&merged, a * width);
            Some(
                prof.samples
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let d = scale * cover[(prof.start + j) % len];
                        if v == T::zero() {
                            T::zero()
                        } else {
                            v / d
                        }
                    })
                    .collect(),
            )
        } else {
            None
        };
        levels.push(level);
        width *= 2;
    }
    Ok(DyadicDuals { signal_len: len, hop: a, m_g, levels })
}

impl<T: Real> DyadicDuals<T> {
    pub fn modulations(&self) -> usize {
        self.m_g
    }

    /// Dual profile of level `h` (merge order `2^h − 1`), if that level is diagonal.
    pub fn level(&self, h: usize) -> Option<&[T]> {
        self.levels.get(h)?.as_deref()
    }

    pub fn select(&self, sel: &SelectionFunction<T>) -> Result<DualFrame<T>> {
        check_dyadic(sel.partition())?;
        select_from(sel, self.signal_len, self.hop, self.m_g, DualOrigin::DyadicClosedForm, |r| {
            let h = (r + 1).trailing_zeros() as usize;
            self.level(h).map(<[T]>::to_vec).ok_or(Error::SelectionMismatch)
        })
    }
}
