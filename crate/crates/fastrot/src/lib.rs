//! Fixed-point singular value decomposition built from Givens fast rotations.
//!
//! Everything on the decomposition path is integer arithmetic: angles are
//! restricted to `tan x = ±2^-l`, so a rotation costs shifts and adds, and the
//! scale factor `1/(1+2^-2l)` is applied by a staged accumulate-shift circuit.
//! The crate also carries the floating-point reference implementations used to
//! validate the fixed-point engine, the convergence-measurement experiments,
//! and a gate-count/critical-path cost model of the corresponding hardware.

pub mod angles;
pub mod complexity;
pub mod fixedpoint;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod oracle;
pub mod rotate;
pub mod sweep;
pub mod tolerances;

pub use angles::{AngleInputs, BoundaryMode, DirectKind, FastRotation, RotationPair};
pub use fixedpoint::{FixedFormat, FixedWord, OverflowCounter, Sign};
pub use matrix::FixedMatrix;
pub use rotate::{RationalCoeffs, ScaleConfig, Side};
pub use sweep::{AlgorithmVariant, Arithmetic, DecomposeConfig, SvdResult, SweepSchedule};
