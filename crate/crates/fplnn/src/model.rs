//! Looped networks and differentiable activations.
//!
//! A looped network is a single layer `f(x) = g(Wx + b)` with an entrywise
//! activation `g`, applied to its own output: `x^(t) = f(x^(t-1))`. The
//! types here are immutable after construction and safe to share across
//! threads; no operation mutates shared state.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::{Error, Result};

/// Any iterate whose infinity norm exceeds this guard is treated as
/// divergent, before non-finite values can propagate silently.
pub const MAGNITUDE_GUARD: f64 = 1e12;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A differentiable scalar function: a value rule paired with its exact
/// analytic derivative.
///
/// The derivative is supplied at construction and used for all certificate
/// computations; finite differences are reserved for verifying it (see
/// [`Activation::finite_difference_check`]).
#[derive(Clone)]
pub struct Activation {
    value: ScalarFn,
    derivative: ScalarFn,
    description: String,
}

impl Activation {
    /// Wraps a value rule and its exact derivative under a text label.
    pub fn new<F, D>(value: F, derivative: D, description: &str) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Activation {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            description: description.to_string(),
        }
    }

    /// Evaluates the function at `x`.
    pub fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    /// Evaluates the exact derivative at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    /// Text label describing the function.
    pub fn description(&self) -> &str {
        &self.description
    }

    /// Relative deviation between the analytic derivative and a central
    /// finite difference of the value at `x`, using the given step.
    ///
    /// The deviation is normalized by `max(1, |analytic|)` so that it stays
    /// meaningful near critical points where the derivative vanishes.
    pub fn finite_difference_check(&self, x: f64, step: f64) -> f64 {
        let fd = (self.value(x + step) - self.value(x - step)) / (2.0 * step);
        let exact = self.derivative(x);
        (exact - fd).abs() / exact.abs().max(1.0)
    }
}

impl fmt::Debug for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Activation")
            .field("description", &self.description)
            .finish()
    }
}

/// A looped neural network: weight matrix `W`, bias `b`, and an entrywise
/// activation, all over dimension `d`.
///
/// One forward pass computes `g(Wx + b)`; iterating it realizes the looped
/// composition.
#[derive(Clone, Debug)]
pub struct LoopedNetwork {
    /// Weight matrix, stored as `d` rows of length `d`.
    pub w: Vec<Vec<f64>>,
    /// Bias vector of length `d`.
    pub b: Vec<f64>,
    /// Entrywise activation applied to each affine output.
    pub activation: Activation,
    /// Dimension of the state vector.
    pub d: usize,
}

impl LoopedNetwork {
    /// Builds a network, validating that `w` is square of side `b.len()`.
    pub fn new(w: Vec<Vec<f64>>, b: Vec<f64>, activation: Activation) -> Result<Self> {
        let d = b.len();
        if d == 0 {
            return Err(Error::invalid("network dimension must be positive"));
        }
        if w.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: w.len() });
        }
        for row in &w {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: row.len() });
            }
        }
        Ok(LoopedNetwork { w, b, activation, d })
    }

    /// One forward pass: `g(Wx + b)` entrywise.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: x.len() });
        }
        Ok(self.apply(x))
    }

    /// Forward pass without the dimension check. Panics if `x.len() != d`;
    /// intended for iteration loops that validate the start vector once.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.d, "input length must equal the network dimension");
        self.w
            .iter()
            .zip(&self.b)
            .map(|(row, &bj)| {
                let z = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + bj;
                self.activation.value(z)
            })
            .collect()
    }

    /// The L-fold composition of [`forward`](Self::forward) applied to `x0`;
    /// `loops = 0` returns `x0` unchanged.
    ///
    /// Fails with [`Error::Diverged`] carrying the first offending iteration
    /// index if an iterate has a non-finite entry or leaves the magnitude
    /// guard.
    pub fn run_loops(&self, x0: &[f64], loops: usize) -> Result<Vec<f64>> {
        if x0.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: x0.len() });
        }
        let mut x = x0.to_vec();
        for step in 1..=loops {
            x = self.apply(&x);
            if !vector_is_tame(&x) {
                return Err(Error::Diverged { step });
            }
        }
        Ok(x)
    }

    /// The L1 norm of row `j` of the Jacobian of the forward map at `x`:
    /// `|g'(<w_j, x> + b_j)| * ||w_j||_1`. Rows are indexed 1-based to match
    /// the usual `w_j` notation.
    pub fn jacobian_row_l1(&self, x: &[f64], j: usize) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, actual: x.len() });
        }
        if j == 0 || j > self.d {
            return Err(Error::invalid(format!(
                "row index {j} outside 1..={d}",
                d = self.d
            )));
        }
        let row = &self.w[j - 1];
        let z = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + self.b[j - 1];
        let l1: f64 = row.iter().map(|w| w.abs()).sum();
        Ok(self.activation.derivative(z).abs() * l1)
    }

    /// JSON description of the network (weights, bias, activation label).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "d": self.d,
            "w": self.w,
            "b": self.b,
            "activation": self.activation.description(),
        })
    }
}

/// True when every entry is finite and within the magnitude guard.
pub(crate) fn vector_is_tame(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite() && v.abs() <= MAGNITUDE_GUARD)
}

/// Infinity norm of the difference of two equal-length vectors.
pub fn inf_norm_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// An ordered record of one iteration run: the iterates `x^(0..T)`, the
/// per-step residuals `||x^(t) - x^(t-1)||_inf`, the noise applied at each
/// step (if any), and whether the run met its convergence test.
#[derive(Clone, Debug, Serialize)]
pub struct IterationTrace {
    /// Iterates `x^(0)..x^(T)`, including the start vector.
    pub iterates: Vec<Vec<f64>>,
    /// `residuals[t-1] = ||x^(t) - x^(t-1)||_inf`; one entry per step.
    pub residuals: Vec<f64>,
    /// Noise vector added at each step, when the run was perturbed.
    pub noise_applied: Option<Vec<Vec<f64>>>,
    /// Whether the successive-difference test was met before the step cap.
    pub converged: bool,
    /// Number of steps taken; equals `iterates.len() - 1`.
    pub steps: usize,
}

impl IterationTrace {
    /// Builds a trace from raw parts, computing residuals and validating
    /// the length bookkeeping.
    pub fn new(
        iterates: Vec<Vec<f64>>,
        noise_applied: Option<Vec<Vec<f64>>>,
        converged: bool,
    ) -> Result<Self> {
        if iterates.is_empty() {
            return Err(Error::invalid("a trace needs at least the start vector"));
        }
        let steps = iterates.len() - 1;
        if let Some(noise) = &noise_applied {
            if noise.len() != steps {
                return Err(Error::invalid("need one noise vector per step"));
            }
        }
        let residuals = iterates
            .windows(2)
            .map(|w| inf_norm_diff(&w[1], &w[0]))
            .collect();
        Ok(IterationTrace { iterates, residuals, noise_applied, converged, steps })
    }

    /// Dimension of the iterated vectors.
    pub fn dim(&self) -> usize {
        self.iterates[0].len()
    }

    /// The last iterate `x^(T)`.
    pub fn last(&self) -> &[f64] {
        self.iterates.last().expect("trace holds at least x^(0)")
    }

    /// CSV rendering: header plus one row per iterate. Row `t` carries the
    /// iterate components and the residual of step `t` (empty at `t = 0`);
    /// perturbed traces gain one noise column per coordinate.
    pub fn to_csv(&self) -> String {
        let d = self.dim();
        let mut out = String::from("t");
        for j in 1..=d {
            out.push_str(&format!(",x{j}"));
        }
        out.push_str(",residual");
        if self.noise_applied.is_some() {
            for j in 1..=d {
                out.push_str(&format!(",h{j}"));
            }
        }
        out.push('\n');
        for (t, x) in self.iterates.iter().enumerate() {
            out.push_str(&t.to_string());
            for v in x {
                out.push(',');
                out.push_str(&crate::csv_float(*v));
            }
            out.push(',');
            if t > 0 {
                out.push_str(&crate::csv_float(self.residuals[t - 1]));
            }
            if let Some(noise) = &self.noise_applied {
                for j in 0..d {
                    out.push(',');
                    if t > 0 {
                        out.push_str(&crate::csv_float(noise[t - 1][j]));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}
