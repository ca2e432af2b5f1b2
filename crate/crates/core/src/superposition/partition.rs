//! Ordered partitions of the translate indices `ℤ_N` into cyclic runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One run of merged translates: `start, start + 1, …, start + order (mod N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Piece {
    #[serde(rename = "n")]
    pub start: usize,
    #[serde(rename = "r")]
    pub order: usize,
}

impl Piece {
    pub fn new(start: usize, order: usize) -> Self {
        Self { start, order }
    }

    /// Number of base translates merged, `r + 1`.
    pub fn width(&self) -> usize {
        self.order + 1
    }

    pub fn indices(&self, n_windows: usize) -> impl Iterator<Item = usize> + '_ {
        (0..=self.order).map(move |k| (self.start + k) % n_windows)
    }
}

/// Which defining property a malformed partition breaks.
///
/// Properties are numbered 1 (distinct starts), 2 (no overlap) and 3 (full
/// cover); property 0 stands for the partition not being well formed at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionViolation {
    Empty,
    OrderOutOfRange { start: usize, order: usize },
    DuplicateStart { start: usize },
    Overlap { index: usize },
    Gap { index: usize },
}

impl PartitionViolation {
    pub fn property(&self) -> u8 {
        match self {
            Self::Empty | Self::OrderOutOfRange { .. } => 0,
            Self::DuplicateStart { .. } => 1,
            Self::Overlap { .. } => 2,
            Self::Gap { .. } => 3,
        }
    }
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "no pieces"),
            Self::OrderOutOfRange { start, order } => write!(f, "piece ({start}, {order}) has order outside ℤ_N"),
            Self::DuplicateStart { start } => write!(f, "property 1: two pieces start at {start}"),
            Self::Overlap { index } => write!(f, "property 2: translate {index} lies in two pieces"),
            Self::Gap { index } => write!(f, "property 3: translate {index} lies in no piece"),
        }
    }
}

/// Tiling of `ℤ_N` by pieces, kept sorted by start index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedPartition {
    #[serde(rename = "N")]
    n_windows: usize,
    pieces: Vec<Piece>,
}

impl OrderedPartition {
    /// Validated constructor.
    pub fn new(n_windows: usize, pieces: Vec<Piece>) -> Result<Self> {
        let p = Self::new_unchecked(n_windows, pieces);
        p.validate().map_err(Error::InvalidPartition)?;
        Ok(p)
    }

    /// Sorts but does not validate; pair with [`OrderedPartition::validate`].
    pub fn new_unchecked(n_windows: usize, mut pieces: Vec<Piece>) -> Self {
        pieces.sort();
        Self { n_windows, pieces }
    }

    /// `N` singleton pieces: no merging.
    pub fn singletons(n_windows: usize) -> Self {
        Self { n_windows, pieces: (0..n_windows).map(|n| Piece::new(n, 0)).collect() }
    }

    /// One piece holding every translate.
    pub fn single(n_windows: usize) -> Self {
        Self { n_windows, pieces: vec![Piece::new(0, n_windows - 1)] }
    }

    /// Equal pieces of `width` translates starting at 0.
    pub fn uniform(n_windows: usize, width: usize) -> Result<Self> {
        if width == 0 || !n_windows.is_multiple_of(width) {
            return Err(Error::Config(format!("piece width {width} does not divide N = {n_windows}")));
        }
        Ok(Self {
            n_windows,
            pieces: (0..n_windows / width).map(|k| Piece::new(k * width, width - 1)).collect(),
        })
    }

    /// Pieces starting at each cut; cuts are sorted and deduplicated and the
    /// last piece wraps around to the first cut.
    pub fn from_cuts(n_windows: usize, cuts: &[usize]) -> Result<Self> {
        let mut cuts: Vec<usize> = cuts.to_vec();
        cuts.sort_unstable();
        cuts.dedup();
        if cuts.is_empty() {
            return Err(Error::InvalidPartition(PartitionViolation::Empty));
        }
        if let Some(&bad) = cuts.iter().find(|&&c| c >= n_windows) {
            return Err(Error::InvalidPartition(PartitionViolation::OrderOutOfRange { start: bad, order: 0 }));
        }
        let k = cuts.len();
        let pieces = (0..k)
            .map(|i| {
                let next = if i + 1 < k { cuts[i + 1] } else { cuts[0] + n_windows };
                Piece::new(cuts[i], next - cuts[i] - 1)
            })
            .collect();
        Self::new(n_windows, pieces)
    }

    pub fn n_windows(&self) -> usize {
        self.n_windows
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// `Σ (r + 1)` over pieces; equals `N` for a valid partition.
    pub fn total_width(&self) -> usize {
        self.pieces.iter().map(Piece::width).sum()
    }

    pub fn max_order(&self) -> usize {
        self.pieces.iter().map(|p| p.order).max().unwrap_or(0)
    }

    pub fn contains(&self, piece: Piece) -> bool {
        self.pieces.binary_search(&piece).is_ok()
    }

    /// First violated property, checked in order 1, 2, 3.
    pub fn validate(&self) -> Result<(), PartitionViolation> {
        let n = self.n_windows;
        if self.pieces.is_empty() || n == 0 {
            return Err(PartitionViolation::Empty);
        }
        if let Some(p) = self.pieces.iter().find(|p| p.start >= n || p.order >= n) {
            return Err(PartitionViolation::OrderOutOfRange { start: p.start, order: p.order });
        }
        if let Some(w) = self.pieces.windows(2).find(|w| w[0].start == w[1].start) {
            return Err(PartitionViolation::DuplicateStart { start: w[0].start });
        }
        let mut owner = vec![false; n];
        for p in &self.pieces {
            for idx in p.indices(n) {
                if owner[idx] {
                    return Err(PartitionViolation::Overlap { index: idx });
                }
                owner[idx] = true;
            }
        }
        if let Some(index) = owner.iter().position(|&o| !o) {
            return Err(PartitionViolation::Gap { index });
        }
        debug_assert_eq!(self.total_width(), n);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pairs: &[(usize, usize)]) -> Vec<Piece> {
        pairs.iter().map(|&(n, r)| Piece::new(n, r)).collect()
    }

    #[test]
    fn mixed_partition_is_valid() {
        let part = OrderedPartition::new(8, p(&[(0, 1), (2, 0), (3, 2), (6, 0), (7, 0)])).unwrap();
        assert_eq!(part.total_width(), 8);
        assert_eq!(part.max_order(), 2);
    }

    #[test]
    fn singletons_and_single() {
        assert!(OrderedPartition::singletons(8).validate().is_ok());
        assert!(OrderedPartition::single(8).validate().is_ok());
        assert_eq!(OrderedPartition::uniform(8, 4).unwrap().len(), 2);
        assert!(OrderedPartition::uniform(8, 3).is_err());
    }

    #[test]
    fn violations_report_property() {
        let bad = OrderedPartition::new_unchecked(8, p(&[(0, 1), (1, 0), (2, 5)]));
        assert_eq!(bad.validate().unwrap_err().property(), 2);
        let dup = OrderedPartition::new_unchecked(4, p(&[(0, 1), (0, 0), (2, 1)]));
        assert_eq!(dup.validate().unwrap_err().property(), 1);
        let gap = OrderedPartition::new_unchecked(4, p(&[(0, 1), (3, 0)]));
        assert_eq!(gap.validate().unwrap_err(), PartitionViolation::Gap { index: 2 });
        assert_eq!(OrderedPartition::new_unchecked(4, vec![]).validate().unwrap_err().property(), 0);
        let big = OrderedPartition::new_unchecked(4, p(&[(0, 4)]));
        assert_eq!(big.validate().unwrap_err().property(), 0);
    }

    #[test]
    fn wrapping_piece() {
        let part = OrderedPartition::new(6, p(&[(5, 1), (1, 3)])).unwrap();
        assert_eq!(part.pieces()[0], Piece::new(1, 3));
        let cuts = OrderedPartition::from_cuts(6, &[1, 5]).unwrap();
        assert_eq!(cuts, part);
    }

    #[test]
    fn serde_shape() {
        let part = OrderedPartition::new(4, p(&[(0, 1), (2, 1)])).unwrap();
        let json = serde_json::to_string(&part).unwrap();
        assert_eq!(json, r#"{"N":4,"pieces":[{"n":0,"r":1},{"n":2,"r":1}]}"#);
        let back: OrderedPartition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, part);
    }
}
