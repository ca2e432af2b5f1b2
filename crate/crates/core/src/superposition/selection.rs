//! Superposition windows and the modulation plans attached to partitions.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::partition::{OrderedPartition, Piece};
use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::scalar::Real;
use crate::signal::Window;

/// `𝒯_{na} w_r` with `w_r = Σ_{k=0}^{r} 𝒯_{ka} w`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperpositionWindow<T> {
    pub order: usize,
    pub shift: usize,
    pub window: Window<T>,
}

/// Builds `𝒯_{na} w_r` sample by sample.
pub fn superposition_window<T: Real>(w: &Window<T>, a: usize, r: usize, n: usize) -> Result<SuperpositionWindow<T>> {
    let len = w.len();
    if a == 0 || !len.is_multiple_of(a) {
        return Err(Error::InvalidLattice(format!("time step {a} does not divide L = {len}")));
    }
    let n_windows = len / a;
    if r >= n_windows {
        return Err(Error::Config(format!("merge order {r} must be below N = {n_windows}")));
    }
    let mut acc = vec![T::zero(); len];
    for k in 0..=r {
        let shift = ((n + k) * a) % len;
        for (t, &v) in w.samples().iter().enumerate() {
            let dst = (t + shift) % len;
            acc[dst] = acc[dst] + v;
        }
    }
    Ok(SuperpositionWindow { order: r, shift: n, window: Window::new(acc)? })
}

/// `w_r` at the origin, flattened to its support arc.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedProfile<T> {
    pub order: usize,
    /// First sample of the support arc of `w_r`.
    pub start: usize,
    /// `len(w_r)`.
    pub length: usize,
    pub samples: Vec<T>,
    pub energy: T,
}

impl<T: Real> MergedProfile<T> {
    pub fn new(w: &Window<T>, a: usize, r: usize) -> Result<Self> {
        let merged = superposition_window(w, a, r, 0)?.window;
        let samples = merged.profile();
        Ok(Self {
            order: r,
            start: merged.support().start,
            length: merged.length(),
            energy: samples.iter().fold(T::zero(), |acc, &v| acc + v * v),
            samples,
        })
    }

    /// First sample of `𝒯_{na} w_r`'s support arc.
    pub fn anchor(&self, n: usize, a: usize, len: usize) -> usize {
        (n * a + self.start) % len
    }
}

/// Modulation plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `M_r = max(len(w_r), M)` per piece.
    Local,
    /// One `M_g` for every piece.
    Global,
    /// Global over pieces of width `2^h` aligned to multiples of their width.
    Dyadic,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "local" => Some(Self::Local),
            "global" => Some(Self::Global),
            "dyadic" => Some(Self::Dyadic),
            _ => None,
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Local => "local",
            Self::Global => "global",
            Self::Dyadic => "dyadic",
        })
    }
}

/// Partition plus modulation counts `M[n, r]`, one per piece.
#[derive(Debug, Clone)]
pub struct SelectionFunction<T> {
    partition: OrderedPartition,
    mode: Mode,
    hop: usize,
    signal_len: usize,
    mod_counts: Vec<usize>,
    profiles: BTreeMap<usize, Arc<MergedProfile<T>>>,
}

impl<T: Real> SelectionFunction<T> {
    pub fn partition(&self) -> &OrderedPartition {
        &self.partition
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn signal_len(&self) -> usize {
        self.signal_len
    }

    /// `M[n, r]` aligned with `partition().pieces()`.
    pub fn mod_counts(&self) -> &[usize] {
        &self.mod_counts
    }

    pub fn mod_count(&self, piece: Piece) -> Option<usize> {
        let idx = self.partition.pieces().binary_search(&piece).ok()?;
        Some(self.mod_counts[idx])
    }

    /// The common modulation count, if every piece uses the same one.
    pub fn uniform_modulations(&self) -> Option<usize> {
        let first = *self.mod_counts.first()?;
        self.mod_counts.iter().all(|&m| m == first).then_some(first)
    }

    /// Number of selected windows `N_g`.
    pub fn n_pieces(&self) -> usize {
        self.partition.len()
    }

    pub fn profile(&self, order: usize) -> &MergedProfile<T> {
        &self.profiles[&order]
    }

    /// `(piece, M[n, r], profile, anchor)` for every piece.
    pub fn iter(&self) -> impl Iterator<Item = (Piece, usize, &MergedProfile<T>, usize)> + '_ {
        self.partition.pieces().iter().zip(&self.mod_counts).map(move |(&p, &m)| {
            let prof = self.profile(p.order);
            (p, m, prof, prof.anchor(p.start, self.hop, self.signal_len))
        })
    }

    /// Same pieces and counts, ignoring cached profiles.
    pub fn same_plan(&self, other: &Self) -> bool {
        self.partition == other.partition
            && self.mod_counts == other.mod_counts
            && self.hop == other.hop
            && self.signal_len == other.signal_len
    }

    /// Selection with one modulation count `m_g` for every piece, whatever its
    /// window length. Used for sufficiency tests at arbitrary resolutions.
    pub fn uniform(p: &OrderedPartition, g: &GaborSystem<T>, m_g: usize) -> Result<Self> {
        if m_g == 0 {
            return Err(Error::InvalidLattice("modulation count must be positive".into()));
        }
        let profiles = build_profiles(p, g)?;
        Ok(Self {
            partition: p.clone(),
            mode: Mode::Global,
            hop: g.hop(),
            signal_len: g.signal_len(),
            mod_counts: vec![m_g; p.len()],
            profiles,
        })
    }
}

fn build_profiles<T: Real>(p: &OrderedPartition, g: &GaborSystem<T>) -> Result<BTreeMap<usize, Arc<MergedProfile<T>>>> {
    p.validate().map_err(Error::InvalidPartition)?;
    if p.n_windows() != g.translates() {
        return Err(Error::Config(format!(
            "partition covers {} translates but the system has N = {}",
            p.n_windows(),
            g.translates()
        )));
    }
    let mut profiles = BTreeMap::new();
    for piece in p.pieces() {
        if let std::collections::btree_map::Entry::Vacant(e) = profiles.entry(piece.order) {
            e.insert(Arc::new(MergedProfile::new(g.window(), g.hop(), piece.order)?));
        }
    }
    Ok(profiles)
}

/// Checks the dyadic shape: `N = 2^k`, every width `2^h`, starts aligned to width.
pub fn check_dyadic(p: &OrderedPartition) -> Result<()> {
    let n = p.n_windows();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { what: "N", value: n });
    }
    for piece in p.pieces() {
        if !piece.width().is_power_of_two() {
            return Err(Error::DyadicShape(format!("piece ({}, {}) has width {}", piece.start, piece.order, piece.width())));
        }
        if piece.start % piece.width() != 0 {
            return Err(Error::DyadicShape(format!(
                "piece ({}, {}) does not start on a multiple of its width",
                piece.start, piece.order
            )));
        }
    }
    Ok(())
}

/// Fills `M[n, r]` from the partition, the system and the plan.
pub fn make_selection<T: Real>(p: &OrderedPartition, g: &GaborSystem<T>, mode: Mode) -> Result<SelectionFunction<T>> {
    if mode == Mode::Dyadic {
        check_dyadic(p)?;
    }
    let profiles = build_profiles(p, g)?;
    let local = |order: usize| profiles[&order].length.max(g.modulations());
    let mod_counts = match mode {
        Mode::Local => p.pieces().iter().map(|piece| local(piece.order)).collect(),
        Mode::Global | Mode::Dyadic => {
            let m_g = profiles.keys().map(|&r| local(r)).max().unwrap_or(g.modulations());
            vec![m_g; p.len()]
        }
    };
    Ok(SelectionFunction {
        partition: p.clone(),
        mode,
        hop: g.hop(),
        signal_len: g.signal_len(),
        mod_counts,
        profiles,
    })
}
