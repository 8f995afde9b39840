//! Empirical contraction and closure certificates over box regions.
//!
//! A certificate samples the relevant contraction quantity on a regular
//! grid over a closed axis-aligned box and reports the observed supremum
//! `K_hat` together with a closure verdict (does the map send every sampled
//! point back into the box?). With `K_hat < 1` and closure holding, the
//! Banach fixed-point theorem applies on the box: a unique fixed point,
//! geometric convergence, and the error bounds checked by [`crate::iterate`].
//!
//! Certificates are sampling-based evidence, not formal proofs: the grid
//! resolution is recorded so the evidence can be judged or reproduced. The
//! maps certified here are smooth and low-degree, where dense grids are
//! decisive at desk scale; interval-arithmetic enclosures are a non-goal.

use std::sync::Arc;

use serde::Serialize;

use crate::model::{Activation, LoopedNetwork};
use crate::{Error, Result};

/// Largest number of grid evaluations a certificate request may cost.
pub const GRID_GUARD: f64 = 1e8;

/// A closed axis-aligned box: per-coordinate interval `[lower_i, upper_i]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionBox {
    /// Per-axis lower bounds.
    pub lower: Vec<f64>,
    /// Per-axis upper bounds.
    pub upper: Vec<f64>,
}

impl RegionBox {
    /// Builds a box, validating `lower[i] <= upper[i]` on every axis.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::invalid("bounds must be nonempty and equal length"));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo <= hi) {
                return Err(Error::invalid(format!("lower {lo} above upper {hi}")));
            }
        }
        Ok(RegionBox { lower, upper })
    }

    /// Convenience constructor for a 1-D interval.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        RegionBox::new(vec![lo], vec![hi])
    }

    /// Number of axes.
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Whether `x` lies inside the closed box.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Infinity-norm diameter: the largest per-axis width.
    pub fn diameter_inf(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }

    /// The `i`-th of `n` equally spaced points on the given axis, endpoints
    /// included. The last index returns the upper bound exactly.
    pub fn grid_point(&self, axis: usize, i: usize, n: usize) -> f64 {
        let (lo, hi) = (self.lower[axis], self.upper[axis]);
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
        }
    }
}

/// Outcome of sampling a contraction quantity over a region.
///
/// `k_hat < 1` together with `closure_ok` is the precondition for any
/// guaranteed-convergence claim downstream; [`certified_error_coefficients`]
/// turns such a certificate into the two error constants.
#[derive(Clone, Debug, Serialize)]
pub struct ContractionCertificate {
    /// The certified region.
    pub region: RegionBox,
    /// Empirical supremum of the contraction quantity over the grid.
    pub k_hat: f64,
    /// Whether every sampled image stayed inside the region.
    pub closure_ok: bool,
    /// Grid resolution used per axis, endpoints included.
    pub grid_points_per_axis: usize,
    /// A grid point attaining `k_hat` (first in grid order on ties).
    pub worst_point: Vec<f64>,
}

impl ContractionCertificate {
    /// True when the certificate licenses the Banach argument on its region.
    pub fn satisfies_banach(&self) -> bool {
        self.k_hat < 1.0 && self.closure_ok
    }

    /// JSON rendering with the stable field set.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// Certifies a scalar map on an interval by sampling `|f'(x)|` at `n`
/// equally spaced points (endpoints included). Closure holds when every
/// sampled `f(x)` lies inside the interval.
pub fn certify_contraction_scalar(
    map: &Activation,
    interval: &RegionBox,
    n: usize,
) -> Result<ContractionCertificate> {
    if interval.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, actual: interval.dim() });
    }
    if n < 2 {
        return Err(Error::invalid("need at least 2 grid points"));
    }
    let (lo, hi) = (interval.lower[0], interval.upper[0]);
    let mut k_hat = f64::NEG_INFINITY;
    let mut worst = lo;
    let mut closure_ok = true;
    for i in 0..n {
        let x = interval.grid_point(0, i, n);
        let slope = map.derivative(x).abs();
        if slope > k_hat {
            k_hat = slope;
            worst = x;
        }
        let y = map.value(x);
        if !(y >= lo && y <= hi) {
            closure_ok = false;
        }
    }
    Ok(ContractionCertificate {
        region: interval.clone(),
        k_hat,
        closure_ok,
        grid_points_per_axis: n,
        worst_point: vec![worst],
    })
}

/// Certifies a network on a box by sampling the row-wise Jacobian L1 bound
/// `max_j |g'(<w_j, x> + b_j)| * ||w_j||_1` over an `n`-per-axis grid.
/// Closure is checked by one forward pass per grid point.
pub fn certify_contraction_vector(
    net: &LoopedNetwork,
    region: &RegionBox,
    n: usize,
) -> Result<ContractionCertificate> {
    if region.dim() != net.d {
        return Err(Error::DimensionMismatch { expected: net.d, actual: region.dim() });
    }
    if n < 2 {
        return Err(Error::invalid("need at least 2 grid points per axis"));
    }
    guard_grid(n, net.d, GRID_GUARD)?;
    let mut k_hat = f64::NEG_INFINITY;
    let mut worst = region.lower.clone();
    let mut closure_ok = true;
    let mut x = vec![0.0; net.d];
    for flat in GridIndices::new(net.d, n) {
        for (axis, &i) in flat.iter().enumerate() {
            x[axis] = region.grid_point(axis, i, n);
        }
        for j in 1..=net.d {
            let row_l1 = net.jacobian_row_l1(&x, j)?;
            if row_l1 > k_hat {
                k_hat = row_l1;
                worst.copy_from_slice(&x);
            }
        }
        if closure_ok && !region.contains(&net.apply(&x)) {
            closure_ok = false;
        }
    }
    Ok(ContractionCertificate {
        region: region.clone(),
        k_hat,
        closure_ok,
        grid_points_per_axis: n,
        worst_point: worst,
    })
}

type FlatMapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type PartialFn = Arc<dyn Fn(&[f64], usize, usize) -> f64 + Send + Sync>;

/// How a matrix map exposes its entrywise partial derivatives.
#[derive(Clone)]
pub enum Partials {
    /// Exact partials: `(x, out, inp) -> d f(x)_out / d x_inp` over the
    /// flattened entries.
    Analytic(PartialFn),
    /// Central finite differences with the given step. Certificates built
    /// from these are approximate and flagged as such by
    /// [`MatrixMap::partials_are_approximate`].
    FiniteDifference {
        /// Step used for the central difference.
        step: f64,
    },
}

/// A map from n-by-d matrices to n-by-d matrices, presented over flattened
/// row-major entries so certification can reuse the box-grid machinery.
#[derive(Clone)]
pub struct MatrixMap {
    /// Matrix row count `n`.
    pub rows: usize,
    /// Matrix column count `d`.
    pub cols: usize,
    map: FlatMapFn,
    partials: Partials,
}

impl MatrixMap {
    /// Wraps a flattened matrix map with its partials.
    pub fn new<F>(rows: usize, cols: usize, map: F, partials: Partials) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix shape must be positive"));
        }
        Ok(MatrixMap { rows, cols, map: Arc::new(map), partials })
    }

    /// Number of flattened entries `n * d`.
    pub fn entries(&self) -> usize {
        self.rows * self.cols
    }

    /// Evaluates the map on flattened entries.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.map)(x)
    }

    /// True when partials come from finite differences rather than an
    /// analytic rule.
    pub fn partials_are_approximate(&self) -> bool {
        matches!(self.partials, Partials::FiniteDifference { .. })
    }

    fn partial(&self, x: &[f64], out: usize, inp: usize) -> f64 {
        match &self.partials {
            Partials::Analytic(p) => p(x, out, inp),
            Partials::FiniteDifference { step } => {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[inp] += step;
                xm[inp] -= step;
                (self.eval(&xp)[out] - self.eval(&xm)[out]) / (2.0 * step)
            }
        }
    }
}

/// Certifies a matrix map on a box over its `n * d` flattened entries. The
/// sufficient condition for contraction in max-entry norm bounds every
/// entrywise partial by `K / (n d)`, so the certificate reports
/// `K_hat = n d * max |partial|` over the grid; this is conservative by
/// design. Closure is checked entrywise.
pub fn certify_contraction_matrix(
    map: &MatrixMap,
    region: &RegionBox,
    grid: usize,
) -> Result<ContractionCertificate> {
    let entries = map.entries();
    if region.dim() != entries {
        return Err(Error::DimensionMismatch { expected: entries, actual: region.dim() });
    }
    if grid < 2 {
        return Err(Error::invalid("need at least 2 grid points per axis"));
    }
    guard_grid(grid, entries, GRID_GUARD)?;
    let scale = entries as f64;
    let mut max_partial = f64::NEG_INFINITY;
    let mut worst = region.lower.clone();
    let mut closure_ok = true;
    let mut x = vec![0.0; entries];
    for flat in GridIndices::new(entries, grid) {
        for (axis, &i) in flat.iter().enumerate() {
            x[axis] = region.grid_point(axis, i, grid);
        }
        for out in 0..entries {
            for inp in 0..entries {
                let p = map.partial(&x, out, inp).abs();
                if p > max_partial {
                    max_partial = p;
                    worst.copy_from_slice(&x);
                }
            }
        }
        if closure_ok && !region.contains(&map.eval(&x)) {
            closure_ok = false;
        }
    }
    Ok(ContractionCertificate {
        region: region.clone(),
        k_hat: scale * max_partial,
        closure_ok,
        grid_points_per_axis: grid,
        worst_point: worst,
    })
}

/// Error coefficients of a valid certificate: the region's infinity-norm
/// diameter `epsilon` and the constant `c = 1 / (1 - K_hat)` that converts
/// residuals into fixed-point distances.
pub fn certified_error_coefficients(cert: &ContractionCertificate) -> Result<(f64, f64)> {
    if !(cert.k_hat < 1.0) {
        return Err(Error::ContractionOutOfRange { k: cert.k_hat });
    }
    Ok((cert.region.diameter_inf(), 1.0 / (1.0 - cert.k_hat)))
}

fn guard_grid(n: usize, dim: usize, limit: f64) -> Result<()> {
    let points = (n as f64).powi(dim as i32);
    if points > limit {
        return Err(Error::GridTooLarge { points, limit });
    }
    Ok(())
}

/// Row-major odometer over `dim` axes of `n` indices each: the first axis
/// varies slowest, so the flat visiting order equals lexicographic order of
/// the index tuples. That makes "first maximum wins" reproduce the
/// lexicographically smallest worst point regardless of internals.
struct GridIndices {
    current: Vec<usize>,
    n: usize,
    done: bool,
}

impl GridIndices {
    fn new(dim: usize, n: usize) -> Self {
        GridIndices { current: vec![0; dim], n, done: false }
    }
}

impl Iterator for GridIndices {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let item = self.current.clone();
        for axis in (0..self.current.len()).rev() {
            self.current[axis] += 1;
            if self.current[axis] < self.n {
                return Some(item);
            }
            self.current[axis] = 0;
        }
        self.done = true;
        Some(item)
    }
}
