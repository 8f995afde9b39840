//! Perturbed fixed-point iteration under bounded noise.
//!
//! The robust convergence statement: if `f` contracts with constant
//! `K in [0, 0.95]` on a closed invariant region holding the fixed point
//! `p`, and each step is perturbed by an arbitrary disturbance of magnitude
//! at most `1/m`, then the perturbed iterates satisfy, per coordinate and
//! per step,
//!
//! - one-step:    `|x^(t) - p| <= K |x^(t-1) - p| + 1/m`
//! - cumulative:  `|x^(t) - p| <= K^t |x^(0) - p| + 20/m`
//!
//! where `20 = 1/(1 - 0.95)` caps the geometric sum of accumulated noise.
//! Iterates land in a ball of radius about `20/m` around `p` instead of
//! converging exactly; the hypothesis `K <= 0.95` is enforced at the API
//! boundary because the constant 20 depends on it.
//!
//! The disturbance is realized as per-coordinate uniform noise on
//! `[-1/m, 1/m]`, drawn from a stream keyed by `(seed, step)` so that a
//! trace is reproducible regardless of evaluation order, plus an extension
//! point for deterministic user-supplied disturbances
//! ([`perturbed_iterate_with`]). Boundedness is the only property the
//! bounds use.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::iterate::BOUND_SLACK;
use crate::model::{vector_is_tame, IterationTrace};
use crate::{Error, Result};

/// Largest contraction constant the robust bounds accept.
pub const ROBUST_K_MAX: f64 = 0.95;

/// Cap on the accumulated-noise constant: `1 / (1 - ROBUST_K_MAX)`.
pub const NOISE_SUM_CAP: f64 = 20.0;

/// Default step count for perturbed runs. Residuals never vanish under
/// persistent noise, so the run length is fixed instead of tested.
pub const DEFAULT_STEPS: usize = 200;

/// Seeded, bounded noise: per-coordinate uniform on `[-1/m, 1/m]`.
///
/// `m` is the inverse noise level. The vector for step `t` depends only on
/// `(seed, t)`, never on how many draws happened before.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NoiseModel {
    /// Inverse noise level; amplitudes never exceed `1/m`.
    pub m: f64,
    /// Stream seed.
    pub seed: u64,
}

impl NoiseModel {
    /// Builds a noise model; `m` must be positive (infinite `m` gives
    /// exactly zero noise).
    pub fn new(m: f64, seed: u64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::invalid("inverse noise level m must be positive"));
        }
        Ok(NoiseModel { m, seed })
    }

    /// Noise amplitude `1/m`.
    pub fn amplitude(&self) -> f64 {
        1.0 / self.m
    }

    /// The noise vector for step `t` in dimension `d`.
    pub fn noise_at(&self, t: usize, d: usize) -> Vec<f64> {
        let amp = self.amplitude();
        if amp == 0.0 {
            return vec![0.0; d];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(t as u64);
        (0..d).map(|_| rng.gen_range(-amp..amp)).collect()
    }
}

/// Runs exactly `steps` perturbed steps `x^(t) = map(x^(t-1)) + h_t` with
/// `h_t` drawn from the noise model, recording every applied noise vector.
///
/// With zero noise amplitude the addition is skipped entirely, so the trace
/// is bitwise identical to the noiseless one.
pub fn perturbed_iterate<F>(
    map: F,
    x0: &[f64],
    noise: &NoiseModel,
    steps: usize,
) -> Result<IterationTrace>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let m = noise.m;
    perturbed_iterate_with(map, x0, |t, d| noise.noise_at(t, d), m, steps)
}

/// Extension point of [`perturbed_iterate`]: any deterministic disturbance
/// rule `(step, dim) -> h` may stand in for the uniform noise, as long as
/// `||h||_inf <= 1/m`. The bound is enforced per step.
pub fn perturbed_iterate_with<F, H>(
    map: F,
    x0: &[f64],
    disturbance: H,
    m: f64,
    steps: usize,
) -> Result<IterationTrace>
where
    F: Fn(&[f64]) -> Vec<f64>,
    H: Fn(usize, usize) -> Vec<f64>,
{
    if steps == 0 {
        return Err(Error::invalid("need at least 1 step"));
    }
    if !(m > 0.0) {
        return Err(Error::invalid("inverse noise level m must be positive"));
    }
    let d = x0.len();
    let amp = 1.0 / m;
    let mut iterates = vec![x0.to_vec()];
    let mut noise_record = Vec::with_capacity(steps);
    for step in 1..=steps {
        let h = disturbance(step, d);
        if h.len() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: h.len() });
        }
        if h.iter().any(|v| !(v.abs() <= amp)) {
            return Err(Error::invalid(format!(
                "disturbance at step {step} exceeds the bound 1/m = {amp}"
            )));
        }
        let mut next = map(&iterates[step - 1]);
        if amp > 0.0 {
            for (v, hv) in next.iter_mut().zip(&h) {
                *v += hv;
            }
        }
        if !vector_is_tame(&next) {
            return Err(Error::Diverged { step });
        }
        iterates.push(next);
        noise_record.push(h);
    }
    IterationTrace::new(iterates, Some(noise_record), false)
}

/// The cumulative robust bound `K^t * e0 + 20/m`.
///
/// `K` must satisfy the hypothesis `K in [0, 0.95]` under which the
/// constant 20 caps the accumulated noise; larger `K` is rejected.
pub fn robust_bound(k: f64, m: f64, t: usize, e0: f64) -> Result<f64> {
    if !(0.0..=ROBUST_K_MAX).contains(&k) {
        return Err(Error::RobustKOutOfRange { k });
    }
    if !(m > 0.0) {
        return Err(Error::invalid("inverse noise level m must be positive"));
    }
    if !(e0 >= 0.0) {
        return Err(Error::invalid("initial error must be nonnegative"));
    }
    Ok(k.powi(t as i32) * e0 + NOISE_SUM_CAP / m)
}

/// Which robust bound a step violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RobustBoundKind {
    /// `K |x^(t-1) - p| + 1/m`.
    OneStep,
    /// `K^t |x^(0) - p| + 20/m`.
    Cumulative,
}

/// A robust bound check that failed at some step.
#[derive(Clone, Debug, Serialize)]
pub struct RobustViolation {
    /// Step index of the violation.
    pub t: usize,
    /// Bound family that failed.
    pub bound: RobustBoundKind,
    /// Observed error `||x^(t) - p||_inf`.
    pub err: f64,
    /// Value of the violated bound.
    pub limit: f64,
}

/// Outcome of checking both robust bounds over a perturbed trace.
#[derive(Clone, Debug, Serialize)]
pub struct RobustReport {
    /// Contraction constant used.
    pub k: f64,
    /// Inverse noise level used.
    pub m: f64,
    /// Reference fixed point of the unperturbed map.
    pub p: Vec<f64>,
    /// Final error `||x^(T) - p||_inf`.
    pub final_err: f64,
    /// Every failed check, with step indices.
    pub violations: Vec<RobustViolation>,
}

impl RobustReport {
    /// True when both bounds held at every step.
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// JSON rendering with the violation list.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Checks the one-step bound `K err_(t-1) + 1/m` and the cumulative bound
/// `K^t e0 + 20/m` at every step of a perturbed trace, reporting each
/// violation with its step index. Comparisons carry the same additive
/// slack as the noiseless ledger.
pub fn verify_robust(
    trace: &IterationTrace,
    p: &[f64],
    k: f64,
    m: f64,
) -> Result<RobustReport> {
    if !(0.0..=ROBUST_K_MAX).contains(&k) {
        return Err(Error::RobustKOutOfRange { k });
    }
    if !(m > 0.0) {
        return Err(Error::invalid("inverse noise level m must be positive"));
    }
    if p.len() != trace.dim() {
        return Err(Error::DimensionMismatch { expected: trace.dim(), actual: p.len() });
    }
    let e0 = crate::model::inf_norm_diff(&trace.iterates[0], p);
    let mut prev_err = e0;
    let mut violations = Vec::new();
    let mut final_err = e0;
    for t in 1..=trace.steps {
        let err = crate::model::inf_norm_diff(&trace.iterates[t], p);
        let one_step = k * prev_err + 1.0 / m;
        let cumulative = k.powi(t as i32) * e0 + NOISE_SUM_CAP / m;
        if err > one_step + BOUND_SLACK {
            violations.push(RobustViolation { t, bound: RobustBoundKind::OneStep, err, limit: one_step });
        }
        if err > cumulative + BOUND_SLACK {
            violations.push(RobustViolation { t, bound: RobustBoundKind::Cumulative, err, limit: cumulative });
        }
        prev_err = err;
        final_err = err;
    }
    Ok(RobustReport { k, m, p: p.to_vec(), final_err, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::inf_norm_diff;

    fn halving() -> impl Fn(&[f64]) -> Vec<f64> {
        |x: &[f64]| x.iter().map(|v| 0.5 * v).collect()
    }

    #[test]
    fn noise_respects_the_amplitude_bound() {
        let noise = NoiseModel::new(5.0, 99).unwrap();
        for t in 1..=500 {
            for v in noise.noise_at(t, 3) {
                assert!(v.abs() <= 0.2, "step {t}: {v}");
            }
        }
    }

    #[test]
    fn noise_depends_only_on_seed_and_step() {
        let noise = NoiseModel::new(10.0, 7).unwrap();
        let a = noise.noise_at(42, 4);
        let b = noise.noise_at(42, 4);
        assert_eq!(a, b);
        assert_ne!(noise.noise_at(41, 4), a);
        let other_seed = NoiseModel::new(10.0, 8).unwrap();
        assert_ne!(other_seed.noise_at(42, 4), a);
    }

    #[test]
    fn infinite_m_reproduces_the_noiseless_trace_bitwise() {
        let noise = NoiseModel::new(f64::INFINITY, 3).unwrap();
        let perturbed = perturbed_iterate(halving(), &[0.8, -0.6], &noise, 40).unwrap();
        let mut x = vec![0.8, -0.6];
        for t in 1..=40 {
            x = halving()(&x);
            assert_eq!(perturbed.iterates[t], x, "step {t}");
        }
    }

    #[test]
    fn identical_inputs_give_bitwise_identical_traces() {
        let noise = NoiseModel::new(15.0, 1234).unwrap();
        let a = perturbed_iterate(halving(), &[0.5], &noise, 100).unwrap();
        let b = perturbed_iterate(halving(), &[0.5], &noise, 100).unwrap();
        assert_eq!(a.iterates, b.iterates);
        assert_eq!(a.noise_applied, b.noise_applied);
    }

    #[test]
    fn perturbed_trace_records_every_noise_vector() {
        let noise = NoiseModel::new(5.0, 0).unwrap();
        let trace = perturbed_iterate(halving(), &[1.0], &noise, 25).unwrap();
        let record = trace.noise_applied.as_ref().unwrap();
        assert_eq!(record.len(), 25);
        for (i, h) in record.iter().enumerate() {
            assert_eq!(*h, noise.noise_at(i + 1, 1), "step {}", i + 1);
        }
    }

    #[test]
    fn robust_bound_arithmetic() {
        // K = 0 kills the initial error in one step, leaving only 20/m.
        assert_eq!(robust_bound(0.0, 4.0, 1, 5.0).unwrap(), 5.0);
        let b = robust_bound(0.9, 100.0, 10, 0.3).unwrap();
        assert!((b - (0.9_f64.powi(10) * 0.3 + 0.2)).abs() < 1e-15);
        assert!((b - 0.304_603_5).abs() < 1e-6);
        // t = 0 leaves the initial error intact.
        assert_eq!(robust_bound(0.95, 20.0, 0, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn robust_bound_rejects_k_above_hypothesis() {
        let err = robust_bound(0.96, 10.0, 1, 1.0).unwrap_err();
        assert!(err.to_string().contains("[0, 0.95]"));
    }

    #[test]
    fn verify_robust_is_clean_for_a_true_contraction() {
        let noise = NoiseModel::new(10.0, 21).unwrap();
        let trace = perturbed_iterate(halving(), &[1.0, 0.5], &noise, 150).unwrap();
        let report = verify_robust(&trace, &[0.0, 0.0], 0.5, 10.0).unwrap();
        assert!(report.is_clean(), "violations: {:?}", report.violations);
        assert!(report.final_err <= 20.0 / 10.0);
    }

    #[test]
    fn verify_robust_flags_a_non_contraction() {
        let noise = NoiseModel::new(10.0, 5).unwrap();
        let trace = perturbed_iterate(|x: &[f64]| vec![2.0 * x[0]], &[1.0], &noise, 10).unwrap();
        let report = verify_robust(&trace, &[0.0], 0.5, 10.0).unwrap();
        assert!(!report.is_clean());
        assert_eq!(report.violations[0].t, 1);
    }

    #[test]
    fn zero_noise_check_reduces_to_the_noiseless_bound() {
        let noise = NoiseModel::new(f64::INFINITY, 0).unwrap();
        let trace = perturbed_iterate(halving(), &[1.0], &noise, 60).unwrap();
        let report = verify_robust(&trace, &[0.0], 0.5, 1e9).unwrap();
        assert!(report.is_clean());
        assert!(report.final_err < 1e-12);
    }

    #[test]
    fn custom_disturbance_is_bounded_and_recorded() {
        let trace = perturbed_iterate_with(
            halving(),
            &[0.4],
            |t, d| vec![if t % 2 == 0 { 0.1 } else { -0.1 }; d],
            10.0,
            12,
        )
        .unwrap();
        assert_eq!(trace.noise_applied.as_ref().unwrap()[0], vec![-0.1]);
        let over = perturbed_iterate_with(halving(), &[0.4], |_, d| vec![0.2; d], 10.0, 3);
        assert!(over.is_err());
    }

    #[test]
    fn geometric_sum_stays_under_the_cap() {
        // The proof's final inequality: sum_{i=1}^{t-1} K^i / m is at most
        // 1 / ((1-K) m), itself at most 20/m for K <= 0.95. Checked on a
        // grid of K values with m = 1.
        for i in 0..=95 {
            let k = i as f64 / 100.0;
            let mut sum = 0.0;
            for t in 1..400 {
                sum += k.powi(t);
                assert!(sum <= 1.0 / (1.0 - k) + 1e-12);
            }
            assert!(1.0 / (1.0 - k) <= NOISE_SUM_CAP + 1e-12);
        }
    }

    #[test]
    fn final_error_median_shrinks_as_m_grows() {
        let map = |x: &[f64]| x.iter().map(|v| 0.8 * v).collect::<Vec<f64>>();
        let mut medians = Vec::new();
        for &m in &[5.0, 15.0, 100.0] {
            let mut finals: Vec<f64> = (0..50)
                .map(|seed| {
                    let noise = NoiseModel::new(m, seed).unwrap();
                    let trace = perturbed_iterate(map, &[1.0], &noise, 200).unwrap();
                    inf_norm_diff(trace.last(), &[0.0])
                })
                .collect();
            finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(finals[25]);
        }
        assert!(medians[0] >= medians[1] && medians[1] >= medians[2], "{medians:?}");
    }
}
