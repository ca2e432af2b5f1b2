//! Superposition windows, ordered partitions, selections and their frames.

mod frame;
mod partition;
mod selection;

pub use frame::{
    extremal_bounds, superposition_analyze, superposition_bounds, superposition_element, superposition_frame_operator,
    superposition_frame_operator_dense, sufficiency_test, CoefficientSet, SufficiencyReport, SuperpositionBounds,
};
pub use partition::{OrderedPartition, PartitionViolation, Piece};
pub use selection::{check_dyadic, make_selection, superposition_window, MergedProfile, Mode, SelectionFunction, SuperpositionWindow};
