//! Fixed-point iteration for looped neural networks.
//!
//! A looped network applies one layer `x -> g(Wx + b)` to its own output `L`
//! times. When the layer is a contraction on a closed region, the Banach
//! fixed-point theorem guarantees a unique fixed point there, geometric
//! convergence toward it, and computable error bounds along the way. This
//! crate implements that machinery end to end:
//!
//! - [`model`] represents networks and differentiable activations and
//!   evaluates forward passes and per-row Jacobian L1 norms.
//! - [`certify`] produces empirical contraction and closure certificates
//!   over box regions (scalar, vector, and matrix flavors).
//! - [`iterate`] runs noiseless iteration and checks the three Banach error
//!   bounds (a priori, a posteriori, one-step) on every trace.
//! - [`robust`] runs iteration perturbed by bounded, seeded noise and checks
//!   the corresponding robust error bounds.
//! - [`caselib`] builds two explicit activation families (quartic polynomial
//!   and exponential) whose looped networks carry 2^d attracting fixed
//!   points, and enumerates those points.
//! - [`oracle`] is an independent brute-force ground truth: 1-D fixed-point
//!   scans, low-dimensional grid search, and a quadratic impossibility
//!   property.
//!
//! All arithmetic is `f64`. Every operation is deterministic; randomized
//! pieces (noise, sampling) are driven by explicit seeds.

pub mod caselib;
pub mod certify;
pub mod iterate;
pub mod model;
pub mod oracle;
pub mod robust;

mod error;

pub use error::{Error, Result};

/// Formats a float for CSV output with 17 significant digits, enough to
/// round-trip any `f64` exactly. Uses `.` as the decimal separator.
pub fn csv_float(v: f64) -> String {
    format!("{v:.16e}")
}
