//! Signal-adaptive choice of ordered partitions.

mod concentration;
mod dp;

pub use concentration::{concentration, concentration_of, greedy_adapt, ConcentrationScore, GreedyResult, GreedyStep, ResetRule,
    TIE_TOLERANCE,
};
pub use dp::{dominance_sets, dp_adapt, dp_partition, entropy_cost, entropy_cost_normalized, DpTable, EntropyCost, SegmentCost};

/// Default cap on merges per piece (eight translates).
pub const DEFAULT_MAX_ORDER: usize = 7;
