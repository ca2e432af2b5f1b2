//! Superposition frames: adaptive short-time Fourier analysis on ℤ_L with
//! diagonal frame operators and fast reconstruction.

pub mod adapt;
pub mod denoise;
pub mod dft;
pub mod error;
pub mod gabor;
pub mod io;
pub mod scalar;
mod segment;
pub mod signal;
pub mod reconstruct;
pub mod superposition;

pub use error::{Error, ErrorKind, Result};
pub use gabor::{FrameBounds, FrameOperator, GaborSystem, StftMatrix};
pub use scalar::Real;
pub use signal::{Signal, Window, WindowKind};
pub use superposition::{CoefficientSet, Mode, OrderedPartition, Piece, SelectionFunction};

pub type Signal64 = Signal<f64>;
pub type Signal32 = Signal<f32>;
pub type Window64 = Window<f64>;
pub type Window32 = Window<f32>;
pub type GaborSystem64 = GaborSystem<f64>;
pub type GaborSystem32 = GaborSystem<f32>;
pub type Selection64 = SelectionFunction<f64>;
pub type Selection32 = SelectionFunction<f32>;
pub type Coefficients64 = CoefficientSet<f64>;
pub type Coefficients32 = CoefficientSet<f32>;

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
