//! Noiseless fixed-point iteration and the Banach error-bound ledger.
//!
//! For a contraction with constant `K < 1` on a closed invariant region,
//! three bounds tie every iterate to the fixed point `p`:
//!
//! - a priori:      `||x^(t) - p|| <= K^t / (1-K) * ||x^(1) - x^(0)||`
//! - a posteriori:  `||x^(t) - p|| <= K / (1-K) * ||x^(t) - x^(t-1)||`
//! - one-step:      `||x^(t) - p|| <= K * ||x^(t-1) - p||`
//!
//! (all norms are infinity norms). The ledger evaluates all three at every
//! step of a recorded trace and flags violations; a violation means the
//! claimed `K` was not actually valid for the trace's region, which makes
//! the ledger a detector for false certificates.

use serde::Serialize;

use crate::model::{inf_norm_diff, vector_is_tame, IterationTrace};
use crate::{Error, Result};

/// Additive slack applied to every bound comparison. The bounds are exact
/// in real arithmetic only; this absorbs floating-point rounding.
pub const BOUND_SLACK: f64 = 1e-12;

/// Default successive-difference tolerance for convergence.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default step cap for noiseless iteration.
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Iterates `x^(t) = map(x^(t-1))` until the infinity-norm residual drops
/// to `tol` or `max_iter` steps have run, recording the full trace.
///
/// The map is evaluated as given; divergence (a non-finite entry or an
/// iterate beyond the magnitude guard) aborts with the failing step index.
pub fn iterate_to_fixed_point<F>(
    map: F,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    if max_iter == 0 {
        return Err(Error::invalid("max_iter must be at least 1"));
    }
    let mut iterates = vec![x0.to_vec()];
    let mut converged = false;
    for step in 1..=max_iter {
        let next = map(iterates.last().expect("nonempty"));
        if !vector_is_tame(&next) {
            return Err(Error::Diverged { step });
        }
        let residual = inf_norm_diff(&next, &iterates[step - 1]);
        iterates.push(next);
        if residual <= tol {
            converged = true;
            break;
        }
    }
    IterationTrace::new(iterates, None, converged)
}

/// Scalar convenience wrapper around [`iterate_to_fixed_point`].
pub fn iterate_scalar_to_fixed_point<F>(
    f: F,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IterationTrace>
where
    F: Fn(f64) -> f64,
{
    iterate_to_fixed_point(|x: &[f64]| vec![f(x[0])], &[x0], tol, max_iter)
}

/// Which of the three bound families a ledger entry violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    /// `K^t / (1-K) * ||x^(1) - x^(0)||`.
    APriori,
    /// `K / (1-K) * ||x^(t) - x^(t-1)||`.
    APosteriori,
    /// `K * ||x^(t-1) - p||`.
    OneStep,
}

/// One bound check that failed: at step `t` the error exceeded the bound by
/// more than the slack.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerViolation {
    /// Step index of the violation.
    pub t: usize,
    /// Bound family that failed.
    pub bound: BoundKind,
    /// Observed error `||x^(t) - p||_inf`.
    pub err: f64,
    /// Value of the violated bound.
    pub limit: f64,
}

/// Bound values for one step of a trace.
#[derive(Clone, Debug, Serialize)]
pub struct LedgerRecord {
    /// Step index, starting at 1.
    pub t: usize,
    /// `||x^(t) - p||_inf`.
    pub err: f64,
    /// A priori bound at this step.
    pub apriori: f64,
    /// A posteriori bound at this step.
    pub aposteriori: f64,
    /// One-step bound at this step.
    pub onestep: f64,
}

/// Per-step evaluation of all three Banach bounds against a reference
/// fixed point.
///
/// The reference `p` must come from outside the trace being judged (an
/// oracle scan, or an independent tight-tolerance iteration); `p_source`
/// records where it came from.
#[derive(Clone, Debug, Serialize)]
pub struct BoundLedger {
    /// Contraction constant the bounds were evaluated with.
    pub k: f64,
    /// Reference fixed point.
    pub p: Vec<f64>,
    /// Provenance of `p` (for example "oracle-scan" or "tight-iteration").
    pub p_source: String,
    /// One record per step `t = 1..=T`.
    pub records: Vec<LedgerRecord>,
    /// Every bound check that failed beyond the slack.
    pub violations: Vec<LedgerViolation>,
}

impl BoundLedger {
    /// True when no bound was violated at any step.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// CSV rendering alongside the trace: one row per step with iterate
    /// components, residual, error, and the three bounds. Row 0 carries the
    /// start vector with the bound fields left empty.
    pub fn to_csv(&self, trace: &IterationTrace) -> String {
        let d = trace.dim();
        let mut out = String::from("t");
        for j in 1..=d {
            out.push_str(&format!(",x{j}"));
        }
        out.push_str(",residual,err,apriori,aposteriori,onestep\n");
        for (t, x) in trace.iterates.iter().enumerate() {
            out.push_str(&t.to_string());
            for v in x {
                out.push(',');
                out.push_str(&crate::csv_float(*v));
            }
            if t == 0 {
                out.push_str(",,,,,\n");
                continue;
            }
            let rec = &self.records[t - 1];
            for v in [trace.residuals[t - 1], rec.err, rec.apriori, rec.aposteriori, rec.onestep] {
                out.push(',');
                out.push_str(&crate::csv_float(v));
            }
            out.push('\n');
        }
        out
    }

    /// JSON rendering of the full ledger.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }
}

/// Evaluates the three Banach bounds at every step of `trace` against the
/// reference fixed point `p`, flagging any violation beyond [`BOUND_SLACK`].
///
/// Rejects `K` outside `[0, 1)`: the bounds are vacuous or undefined there.
pub fn banach_ledger(trace: &IterationTrace, k: f64, p: &[f64]) -> Result<BoundLedger> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::ContractionOutOfRange { k });
    }
    if p.len() != trace.dim() {
        return Err(Error::DimensionMismatch { expected: trace.dim(), actual: p.len() });
    }
    let c = k / (1.0 - k);
    let first_residual = trace.residuals.first().copied().unwrap_or(0.0);
    let mut records = Vec::with_capacity(trace.steps);
    let mut violations = Vec::new();
    let mut prev_err = inf_norm_diff(&trace.iterates[0], p);
    for t in 1..=trace.steps {
        let err = inf_norm_diff(&trace.iterates[t], p);
        let record = LedgerRecord {
            t,
            err,
            apriori: k.powi(t as i32) / (1.0 - k) * first_residual,
            aposteriori: c * trace.residuals[t - 1],
            onestep: k * prev_err,
        };
        for (bound, limit) in [
            (BoundKind::APriori, record.apriori),
            (BoundKind::APosteriori, record.aposteriori),
            (BoundKind::OneStep, record.onestep),
        ] {
            if err > limit + BOUND_SLACK {
                violations.push(LedgerViolation { t, bound, err, limit });
            }
        }
        records.push(record);
        prev_err = err;
    }
    Ok(BoundLedger {
        k,
        p: p.to_vec(),
        p_source: "provided".to_string(),
        records,
        violations,
    })
}

/// Median ratio of successive residuals over the trace tail: an empirical
/// estimate of the local contraction rate, comparable against a
/// certificate's `K_hat`.
///
/// Needs a converged trace of at least 5 steps. Ratios with a zero
/// denominator are skipped; if the trace bottoms out exactly (all usable
/// ratios consumed by zeros), the rate is 0.
pub fn geometric_rate_estimate(trace: &IterationTrace) -> Result<f64> {
    const MIN_STEPS: usize = 5;
    if !trace.converged || trace.steps < MIN_STEPS {
        return Err(Error::InsufficientData { needed: MIN_STEPS });
    }
    let mut ratios: Vec<f64> = trace
        .residuals
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    if ratios.is_empty() {
        return if trace.residuals.last() == Some(&0.0) {
            Ok(0.0)
        } else {
            Err(Error::InsufficientData { needed: MIN_STEPS })
        };
    }
    let mut tail = ratios.split_off(ratios.len().saturating_sub(10));
    tail.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    Ok(tail[tail.len() / 2])
}
