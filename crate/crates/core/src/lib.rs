//! Discrete Ingham-type inequalities for nonharmonic exponential sums under a weakened gap
//! condition: sampled frame constants, the Poisson summatory identity behind them, the
//! Haraux augmentation by one extra exponent, and observability of coupled strings and beams.

pub mod bounds;
pub mod error;
pub mod exponents;
pub mod kernels;
pub mod linalg;
pub mod numeric;
pub mod observability;
pub mod quadforms;
pub mod random;
pub mod sums;

pub use error::{Error, Result};
pub use exponents::{band_mask, classify, validate_weak_gap, BandMask, ExponentSequence, GapClassification};
pub use kernels::{certify_constants, KernelShape, Support, Variant, WindowKernel};
pub use quadforms::{q_form, q_matrix, q_prime, QMatrix};
pub use sums::{AugmentedExpSum, ExpSum, SamplingGrid, Signal};

/// Library version, stamped into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
