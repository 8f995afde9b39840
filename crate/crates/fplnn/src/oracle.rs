//! Brute-force ground truth for fixed-point structure.
//!
//! Nothing here trusts the contraction machinery. Fixed points are located
//! by dense residual scans, bracketing bisection, and local refinement, so
//! the results can stand as an independent check on what the certified
//! iteration claims. The scans are not certified themselves; they are
//! deliberate overkill on small regions where exhaustive sampling is cheap.
//!
//! The module also carries two classroom touchstones: the quadratic
//! obstruction (a real quadratic can never have two attracting fixed
//! points) and a trio of textbook interval examples that exercise the
//! boundary between "the contraction hypotheses hold" and "a fixed point
//! happens to exist anyway".

use serde::Serialize;

use crate::certify::{certify_contraction_scalar, RegionBox};
use crate::model::{inf_norm_diff, vector_is_tame, Activation};
use crate::{Error, Result};

/// Evaluation guard for the multi-dimensional residual grid.
pub const GRID_ORACLE_GUARD: f64 = 1e7;

/// Finite-difference step for Jacobian estimates at located fixed points.
const JACOBIAN_STEP: f64 = 1e-6;

/// A fixed point located by brute force.
#[derive(Clone, Debug, Serialize)]
pub struct FixedPointRecord {
    /// Location of the fixed point.
    pub location: Vec<f64>,
    /// `||f(p) - p||_inf` at the recorded location.
    pub residual: f64,
    /// Absolute derivative `|f'(p)|` when the map is one-dimensional.
    pub derivative_at: Option<f64>,
    /// Attraction judged by a derivative bound below 1 (for several
    /// dimensions, the infinity norm of a finite-difference Jacobian; a
    /// sufficient condition, not a spectral one).
    pub attracting: bool,
}

/// Scans a 1-D map for all fixed points in an interval.
///
/// The residual `r(x) = f(x) - x` is sampled at `n >= 3` grid points.
/// Exact grid zeros are taken as roots; every sign change is bracketed by
/// bisection down to an interval of width `tol` (200 iterations at most)
/// and then polished with a few Newton steps, so the recorded residual
/// reaches machine precision rather than `|r'| * tol`. Roots are
/// deduplicated, sorted ascending, and kept only while the final residual
/// stays at most `tol`.
///
/// Transversal roots are found reliably at modest `n`; a root the grid
/// steps over without a sign change (a tangency) is missed, which is the
/// price of an assumption-free scan.
pub fn scan_fixed_points_1d(
    map: &Activation,
    interval: &RegionBox,
    n: usize,
    tol: f64,
) -> Result<Vec<FixedPointRecord>> {
    if interval.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, actual: interval.dim() });
    }
    if n < 3 {
        return Err(Error::invalid("need at least 3 scan points"));
    }
    if n as f64 > GRID_ORACLE_GUARD {
        return Err(Error::GridTooLarge { points: n as f64, limit: GRID_ORACLE_GUARD });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("scan tolerance must be positive"));
    }
    let r = |x: f64| map.value(x) - x;
    let xs: Vec<f64> = (0..n).map(|i| interval.grid_point(0, i, n)).collect();
    let rs: Vec<f64> = xs.iter().map(|&x| r(x)).collect();

    let mut roots = Vec::new();
    for i in 0..n {
        if rs[i] == 0.0 {
            roots.push(xs[i]);
        }
        if i + 1 < n && rs[i] * rs[i + 1] < 0.0 {
            roots.push(bisect_then_polish(&r, map, xs[i], xs[i + 1], rs[i], tol));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-10);

    Ok(roots
        .into_iter()
        .filter_map(|p| {
            let residual = r(p).abs();
            (residual <= tol).then(|| {
                let slope = map.derivative(p).abs();
                FixedPointRecord {
                    location: vec![p],
                    residual,
                    derivative_at: Some(slope),
                    attracting: slope < 1.0,
                }
            })
        })
        .collect())
}

/// Bisection on a bracketing interval down to width `tol`, followed by
/// three Newton polish steps on `r(x) = f(x) - x`, guarded against a
/// vanishing slope.
fn bisect_then_polish<R: Fn(f64) -> f64>(
    r: &R,
    map: &Activation,
    mut lo: f64,
    mut hi: f64,
    mut rlo: f64,
    tol: f64,
) -> f64 {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let rmid = r(mid);
        if rmid == 0.0 {
            return mid;
        }
        if (rmid > 0.0) == (rlo > 0.0) {
            lo = mid;
            rlo = rmid;
        } else {
            hi = mid;
        }
    }
    let mut p = 0.5 * (lo + hi);
    for _ in 0..3 {
        let slope = map.derivative(p) - 1.0;
        if slope.abs() < 1e-8 {
            break;
        }
        p -= r(p) / slope;
    }
    p
}

/// Scans a d-dimensional map (d <= 3) for fixed points on a grid.
///
/// The residual `rho(x) = ||f(x) - x||_inf` is evaluated at `n` points per
/// axis. Grid points that are local minima against their axis neighbors
/// with `rho <= tol` become candidates; candidates within two grid cells
/// of each other (Chebyshev distance on indices) merge into one cluster
/// represented by the smallest residual. Each representative is refined by
/// plain iteration of the map, falling back to the grid point if iteration
/// blows up, and refined locations closer than 1e-4 are deduplicated in
/// favor of the smaller residual.
pub fn grid_fixed_points<F>(
    map: F,
    region: &RegionBox,
    n: usize,
    tol: f64,
) -> Result<Vec<FixedPointRecord>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let d = region.dim();
    if d > 3 {
        return Err(Error::invalid("the grid oracle handles at most 3 dimensions"));
    }
    if n < 3 {
        return Err(Error::invalid("need at least 3 grid points per axis"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("grid tolerance must be positive"));
    }
    let total_f = (n as f64).powi(d as i32);
    if total_f > GRID_ORACLE_GUARD {
        return Err(Error::GridTooLarge { points: total_f, limit: GRID_ORACLE_GUARD });
    }
    let total = n.pow(d as u32);
    let strides: Vec<usize> = (0..d).map(|a| n.pow((d - 1 - a) as u32)).collect();
    let decode = |linear: usize| -> Vec<usize> {
        strides.iter().map(|&s| (linear / s) % n).collect()
    };
    let point_at = |idx: &[usize]| -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| region.grid_point(a, i, n))
            .collect()
    };

    let rho: Vec<f64> = (0..total)
        .map(|linear| {
            let x = point_at(&decode(linear));
            inf_norm_diff(&map(&x), &x)
        })
        .collect();

    // Local minima against axis neighbors, within tolerance.
    let mut candidates: Vec<(usize, Vec<usize>)> = Vec::new();
    'points: for linear in 0..total {
        if rho[linear] > tol {
            continue;
        }
        let idx = decode(linear);
        for a in 0..d {
            for step in [-1isize, 1] {
                let ni = idx[a] as isize + step;
                if ni < 0 || ni as usize >= n {
                    continue;
                }
                let neighbor = linear.wrapping_add_signed(step * strides[a] as isize);
                if rho[neighbor] < rho[linear] {
                    continue 'points;
                }
            }
        }
        candidates.push((linear, idx));
    }

    // Merge candidates within two grid cells of each other.
    let clusters = cluster_by_index_distance(&candidates, 2);
    let mut records: Vec<FixedPointRecord> = Vec::new();
    for cluster in clusters {
        let &(_, ref idx) = cluster
            .iter()
            .map(|&ci| &candidates[ci])
            .min_by(|a, b| {
                rho[a.0]
                    .partial_cmp(&rho[b.0])
                    .expect("residuals are finite")
                    .then(a.0.cmp(&b.0))
            })
            .expect("clusters are nonempty");
        let start = point_at(idx);
        let location = refine_by_iteration(&map, &start).unwrap_or(start);
        let residual = inf_norm_diff(&map(&location), &location);
        let jac_norm = fd_jacobian_inf_norm(&map, &location);
        records.push(FixedPointRecord {
            derivative_at: (d == 1).then(|| fd_scalar_derivative(&map, location[0]).abs()),
            attracting: jac_norm < 1.0,
            location,
            residual,
        });
    }

    // Refinement can funnel two clusters into the same point.
    dedupe_by_location(&mut records, 1e-4);
    Ok(records)
}

/// Groups candidate grid points whose index vectors are within `radius`
/// cells of each other (transitively) into clusters of candidate indices.
fn cluster_by_index_distance(
    candidates: &[(usize, Vec<usize>)],
    radius: usize,
) -> Vec<Vec<usize>> {
    let near = |a: &[usize], b: &[usize]| {
        a.iter().zip(b).all(|(&x, &y)| x.abs_diff(y) <= radius)
    };
    let mut cluster_of = vec![usize::MAX; candidates.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..candidates.len() {
        if cluster_of[i] != usize::MAX {
            continue;
        }
        let id = clusters.len();
        let mut frontier = vec![i];
        cluster_of[i] = id;
        let mut members = Vec::new();
        while let Some(ci) = frontier.pop() {
            members.push(ci);
            for j in 0..candidates.len() {
                if cluster_of[j] == usize::MAX && near(&candidates[ci].1, &candidates[j].1) {
                    cluster_of[j] = id;
                    frontier.push(j);
                }
            }
        }
        members.sort_unstable();
        clusters.push(members);
    }
    clusters
}

/// Plain iteration until successive iterates agree to 1e-10, up to 1000
/// steps. `None` when the iteration leaves the tame range.
fn refine_by_iteration<F>(map: &F, start: &[f64]) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut x = start.to_vec();
    for _ in 0..1000 {
        let next = map(&x);
        if !vector_is_tame(&next) {
            return None;
        }
        let step = inf_norm_diff(&next, &x);
        x = next;
        if step <= 1e-10 {
            break;
        }
    }
    Some(x)
}

/// Drops records whose locations coincide within `radius` (infinity norm),
/// keeping the smaller residual and earlier position on ties.
fn dedupe_by_location(records: &mut Vec<FixedPointRecord>, radius: f64) {
    let mut kept: Vec<FixedPointRecord> = Vec::new();
    for rec in records.drain(..) {
        match kept
            .iter_mut()
            .find(|k| inf_norm_diff(&k.location, &rec.location) <= radius)
        {
            Some(existing) => {
                if rec.residual < existing.residual {
                    *existing = rec;
                }
            }
            None => kept.push(rec),
        }
    }
    *records = kept;
}

/// Central finite-difference scalar derivative of a 1-vector map.
fn fd_scalar_derivative<F>(map: &F, x: f64) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    (map(&[x + JACOBIAN_STEP])[0] - map(&[x - JACOBIAN_STEP])[0]) / (2.0 * JACOBIAN_STEP)
}

/// Infinity norm (maximum absolute row sum) of a central finite-difference
/// Jacobian of `map` at `x`.
fn fd_jacobian_inf_norm<F>(map: &F, x: &[f64]) -> f64
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let d = x.len();
    let mut rows = vec![vec![0.0; d]; d];
    for j in 0..d {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[j] += JACOBIAN_STEP;
        minus[j] -= JACOBIAN_STEP;
        let fp = map(&plus);
        let fm = map(&minus);
        for i in 0..d {
            rows[i][j] = (fp[i] - fm[i]) / (2.0 * JACOBIAN_STEP);
        }
    }
    rows.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// The two fixed points of a real quadratic `f(x) = ax^2 + bx + c` with
/// the derivative of `f` at each.
///
/// Fixed points solve `ax^2 + (b-1)x + c = 0`. Since the derivatives at
/// the two roots always average to exactly 1 (they are `1 + sqrt(D)` and
/// `1 - sqrt(D)` for `D = (b-1)^2 - 4ac`), one fixed point is always
/// repelling: no real quadratic has two attracting fixed points.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QuadraticFixedPoints {
    /// Fixed point with the larger derivative, `1 + sqrt(D) > 1`.
    pub x_plus: f64,
    /// Fixed point with the smaller derivative, `1 - sqrt(D) < 1`.
    pub x_minus: f64,
    /// `f'(x_plus)`.
    pub derivative_plus: f64,
    /// `f'(x_minus)`.
    pub derivative_minus: f64,
    /// The discriminant `(b-1)^2 - 4ac`.
    pub discriminant: f64,
    /// Whether `x_minus` is attracting, i.e. `|f'(x_minus)| < 1`. The
    /// obstruction only asserts `f'(x_minus) < 1`; a large discriminant
    /// pushes the derivative below -1 and repels from both sides.
    pub x_minus_attracting: bool,
}

/// Computes both fixed points of `ax^2 + bx + c` and the derivatives
/// there, using the numerically stable quadratic formula. Errors when
/// `a = 0` or when the discriminant is not strictly positive (no two
/// distinct real fixed points).
pub fn quadratic_fixed_point_property(a: f64, b: f64, c: f64) -> Result<QuadraticFixedPoints> {
    if a == 0.0 {
        return Err(Error::invalid("a quadratic needs a nonzero leading coefficient"));
    }
    let bm1 = b - 1.0;
    let disc = bm1 * bm1 - 4.0 * a * c;
    if disc <= 0.0 {
        return Err(Error::NonPositiveDiscriminant { disc });
    }
    // Avoid cancellation: compute the large-magnitude root first, the
    // other from the product of roots c/a = r1 * r2.
    let q = -0.5 * (bm1 + bm1.signum() * disc.sqrt());
    let (r1, r2) = if q == 0.0 {
        (0.0, -bm1 / a)
    } else {
        (q / a, c / q)
    };
    let d1 = 2.0 * a * r1 + b;
    let d2 = 2.0 * a * r2 + b;
    let (x_plus, x_minus, derivative_plus, derivative_minus) =
        if d1 >= d2 { (r1, r2, d1, d2) } else { (r2, r1, d2, d1) };
    Ok(QuadraticFixedPoints {
        x_plus,
        x_minus,
        derivative_plus,
        derivative_minus,
        discriminant: disc,
        x_minus_attracting: derivative_minus.abs() < 1.0,
    })
}

/// One textbook interval example, certified and scanned.
#[derive(Clone, Debug, Serialize)]
pub struct TextbookCase {
    /// Short formula label.
    pub name: &'static str,
    /// Interval endpoints.
    pub interval: (f64, f64),
    /// Sampled derivative supremum over the interval.
    pub k_hat: f64,
    /// Whether the sampled image stayed inside the interval.
    pub closure_ok: bool,
    /// Whether both contraction hypotheses hold.
    pub banach_applies: bool,
    /// Fixed points the scan located in the interval.
    pub fixed_points: Vec<FixedPointRecord>,
}

/// The three textbook cases together with a consistency verdict.
#[derive(Clone, Debug, Serialize)]
pub struct TextbookReport {
    /// The individual cases.
    pub cases: Vec<TextbookCase>,
    /// True when every case with both hypotheses satisfied has exactly one
    /// fixed point in its interval.
    pub consistent: bool,
}

impl TextbookReport {
    /// JSON rendering of the report.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs the three classroom interval examples:
///
/// 1. `(x^2 - 1)/3` on `[-1, 1]`: both hypotheses hold, and the unique
///    fixed point `(3 - sqrt(13))/2` is found.
/// 2. `(x^2 - 1)/3` on `[3, 4]`: both hypotheses fail, yet a (repelling)
///    fixed point `(3 + sqrt(13))/2` exists anyway.
/// 3. `3^(-x)` on `[0, 1]`: closure holds but the derivative bound fails,
///    and still a unique attracting fixed point exists.
///
/// Cases 2 and 3 show the hypotheses are sufficient, not necessary.
pub fn textbook_examples_check() -> TextbookReport {
    let parabola = Activation::new(
        |x| (x * x - 1.0) / 3.0,
        |x| 2.0 * x / 3.0,
        "(x^2 - 1) / 3",
    );
    let ln3 = 3.0_f64.ln();
    let power = Activation::new(
        move |x| (-x * ln3).exp(),
        move |x| -ln3 * (-x * ln3).exp(),
        "3^(-x)",
    );
    let setups = [
        ("(x^2 - 1) / 3", &parabola, -1.0, 1.0),
        ("(x^2 - 1) / 3", &parabola, 3.0, 4.0),
        ("3^(-x)", &power, 0.0, 1.0),
    ];
    let cases: Vec<TextbookCase> = setups
        .iter()
        .map(|&(name, map, lo, hi)| {
            let interval = RegionBox::interval(lo, hi).expect("ordered interval");
            let cert = certify_contraction_scalar(map, &interval, 10_001)
                .expect("textbook certificate");
            let fixed_points = scan_fixed_points_1d(map, &interval, 10_001, 1e-8)
                .expect("textbook scan");
            TextbookCase {
                name,
                interval: (lo, hi),
                k_hat: cert.k_hat,
                closure_ok: cert.closure_ok,
                banach_applies: cert.satisfies_banach(),
                fixed_points,
            }
        })
        .collect();
    let consistent = cases
        .iter()
        .all(|case| !case.banach_applies || case.fixed_points.len() == 1);
    TextbookReport { cases, consistent }
}
