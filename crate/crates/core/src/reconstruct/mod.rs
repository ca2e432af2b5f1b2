//! Fast synthesis: overlap-add, canonical duals, lapped and dyadic duals.

mod complexity;
mod dual;
mod lapped;
mod ola;

pub use complexity::{
    bench_selection, count_multiplies, measure_path, scaling_exponent, table_formula, ComplexityPath, Measurement,
};
pub use dual::{canonical_dual, canonical_dual_with, dual_reconstruct, DualFrame, DualOrigin, DualWindow};
pub use lapped::{
    dyadic_duals, lapped_duals, lapped_sets, neighbor_overlap_check, neighbor_overlap_violation, DyadicDuals,
    LappedDuals, LappedRegion,
};
pub use ola::{generalized_ola_deviation, gola_reconstruct, ola_check, ola_reconstruct, OlaCertificate, NULL_TOLERANCE, OLA_TOLERANCE};
