//! Explicit case-study constructions with 2^d attracting fixed points.
//!
//! Two activation families are built around a shift constant `C` chosen so
//! that the shifted activation collapses to a simple reduced map:
//!
//! - polynomial: `g(x + C) = -(2/5) x^4 + (3/2) x^2` with
//!   `C = sqrt((15 + sqrt(65)) / 8)`, the positive root of
//!   `4C^4 - 15C^2 + 10 = 0`;
//! - exponential: `g(x + C) = exp(x^3 - 2x^2) - 1` with `C` the real root
//!   of `C^3 + 2C^2 + ln 2 = 0` (near -2.15).
//!
//! Each reduced map has two attracting fixed points `p1 = 0` and `p2`
//! (about 1.4028 for the polynomial family, about -0.9104 for the
//! exponential one), each sitting in a certified contraction interval. A
//! looped network with near-identity weights (diagonal 1, off-diagonal
//! 1/m^2) and bias `C` then follows the reduced map per coordinate up to a
//! small coupling residue, which hands it 2^d attracting fixed points: one
//! per choice of `p1` or `p2` in each coordinate.
//!
//! Both constants are solved numerically from their defining equations at
//! construction time rather than hard-coded as decimal literals; three
//! decimal digits of `C` would already break the shift identities at the
//! 1e-9 tolerance they are held to.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::certify::RegionBox;
use crate::model::{inf_norm_diff, vector_is_tame, Activation, LoopedNetwork};
use crate::{Error, Result};

/// Guard on 2^d candidate enumeration.
pub const ENUMERATION_DIM_GUARD: usize = 20;

/// The two case-study activation families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Quartic polynomial activation; reduced map `-(2/5)x^4 + (3/2)x^2`.
    Polynomial,
    /// Exponential activation; reduced map `exp(x^3 - 2x^2) - 1`.
    Exponential,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" | "polynomial" => Ok(Family::Polynomial),
            "exp" | "exponential" => Ok(Family::Exponential),
            other => Err(Error::invalid(format!("unknown family '{other}' (poly or exp)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Polynomial => write!(f, "poly"),
            Family::Exponential => write!(f, "exp"),
        }
    }
}

/// Bisection to an interval width of 1e-14, assuming a sign change.
fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(
        flo * f(hi) < 0.0,
        "bisection bracket [{lo}, {hi}] must change sign"
    );
    for _ in 0..200 {
        if hi - lo <= 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if (fmid > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shift constant of the polynomial family: the positive root of
/// `4C^4 - 15C^2 + 10 = 0` lying in [1.5, 2], equal to
/// `sqrt((15 + sqrt(65)) / 8)`.
pub fn polynomial_shift_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| bisect_root(|c| 4.0 * c.powi(4) - 15.0 * c * c + 10.0, 1.5, 2.0))
}

/// Shift constant of the exponential family: the real root of
/// `C^3 + 2C^2 + ln 2 = 0` lying in [-2.5, -2].
pub fn exponential_shift_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        bisect_root(|c| c.powi(3) + 2.0 * c * c + std::f64::consts::LN_2, -2.5, -2.0)
    })
}

/// The quartic polynomial activation
/// `g(z) = -(2/5)z^4 + (8/5)Cz^3 + (3/2 - (12/5)C^2)z^2 + ((8/5)C^3 - 3C)z + 1`
/// with its exact derivative. `c` must be the polynomial shift constant.
pub fn poly_activation(c: f64) -> Activation {
    let a4 = -0.4;
    let a3 = 1.6 * c;
    let a2 = 1.5 - 2.4 * c * c;
    let a1 = 1.6 * c.powi(3) - 3.0 * c;
    let a0 = 1.0;
    Activation::new(
        move |z| (((a4 * z + a3) * z + a2) * z + a1) * z + a0,
        move |z| ((4.0 * a4 * z + 3.0 * a3) * z + 2.0 * a2) * z + a1,
        "quartic polynomial activation",
    )
}

/// The exponential activation
/// `g(z) = exp(z^3 + (-2 - 3C)z^2 + (3C^2 + 4C)z + ln 2) - 1`
/// with its exact derivative. `c` must be the exponential shift constant.
pub fn exp_activation(c: f64) -> Activation {
    let a = -2.0 - 3.0 * c;
    let b = 3.0 * c * c + 4.0 * c;
    let ln2 = std::f64::consts::LN_2;
    Activation::new(
        move |z| (((z + a) * z + b) * z + ln2).exp() - 1.0,
        move |z| ((3.0 * z + 2.0 * a) * z + b) * (((z + a) * z + b) * z + ln2).exp(),
        "exponential activation",
    )
}

/// A 1-D interval on which the reduced map contracts, together with its
/// documented contraction bound. `k` is `None` where no bound is quoted
/// and the empirical certificate supremum stands in instead.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CertifiedInterval {
    /// Left endpoint.
    pub lo: f64,
    /// Right endpoint.
    pub hi: f64,
    /// Documented contraction bound, when one is quoted.
    pub k: Option<f64>,
}

impl CertifiedInterval {
    /// The interval as a 1-D region box.
    pub fn region(&self) -> RegionBox {
        RegionBox::interval(self.lo, self.hi).expect("certified intervals are ordered")
    }

    /// Whether `x` lies inside the closed interval.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// The scalar reduced map of a family: what one coordinate of the coupled
/// network computes, up to the coupling residue.
#[derive(Clone, Debug)]
pub struct ReducedMap {
    /// Which family the map reduces.
    pub family: Family,
    /// The map with its exact derivative.
    pub f: Activation,
    /// The two certified contraction intervals, each holding one fixed
    /// point.
    pub regions: [CertifiedInterval; 2],
}

impl ReducedMap {
    /// Map value at `x`.
    pub fn value(&self, x: f64) -> f64 {
        self.f.value(x)
    }

    /// Exact derivative at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        self.f.derivative(x)
    }

    /// The map lifted to a 1-vector map, for the iteration drivers.
    pub fn as_vector_map(&self) -> impl Fn(&[f64]) -> Vec<f64> + '_ {
        move |x: &[f64]| vec![self.f.value(x[0])]
    }
}

/// The reduced 1-D map of a family with its certified region metadata.
pub fn reduced_map(family: Family) -> ReducedMap {
    match family {
        Family::Polynomial => ReducedMap {
            family,
            f: Activation::new(
                |x| (1.5 - 0.4 * x * x) * x * x,
                |x| (3.0 - 1.6 * x * x) * x,
                "polynomial reduced map",
            ),
            regions: [
                CertifiedInterval { lo: -0.3, hi: 0.3, k: Some(0.9) },
                CertifiedInterval { lo: 1.3028, hi: 1.5028, k: None },
            ],
        },
        Family::Exponential => ReducedMap {
            family,
            f: Activation::new(
                |x| ((x - 2.0) * x * x).exp() - 1.0,
                |x| (3.0 * x - 4.0) * x * ((x - 2.0) * x * x).exp(),
                "exponential reduced map",
            ),
            regions: [
                CertifiedInterval { lo: -0.1, hi: 0.1, k: Some(0.5) },
                CertifiedInterval { lo: -1.010, hi: -0.810, k: Some(0.85) },
            ],
        },
    }
}

/// A full case-study description: family, solved constant, dimensions, and
/// the per-coordinate fixed points with their certified intervals.
#[derive(Clone, Debug, Serialize)]
pub struct CaseStudySpec {
    /// Activation family.
    pub family: Family,
    /// Solved shift constant.
    pub c: f64,
    /// Network dimension.
    pub d: usize,
    /// Coupling parameter; off-diagonal weights are `1/m^2`. Must exceed
    /// `d`.
    pub m: f64,
    /// The two per-coordinate fixed points `(p1, p2)` of the reduced map.
    pub fixed_points: [f64; 2],
    /// Certified interval around each fixed point.
    pub regions: [CertifiedInterval; 2],
}

impl CaseStudySpec {
    /// Builds the case description for a family at dimension `d` and
    /// coupling `m > d`, solving the constant and polishing the
    /// per-coordinate fixed points to machine precision.
    pub fn new(family: Family, d: usize, m: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(m > d as f64) {
            return Err(Error::invalid(format!("need m > d, got m = {m}, d = {d}")));
        }
        let c = shift_constant(family);
        let reduced = reduced_map(family);
        let p2_seed = match family {
            Family::Polynomial => 1.4,
            Family::Exponential => -0.91,
        };
        let p1 = 0.0;
        let p2 = newton_fixed_point(&reduced.f, p2_seed);
        Ok(CaseStudySpec {
            family,
            c,
            d,
            m,
            fixed_points: [p1, p2],
            regions: reduced.regions,
        })
    }
}

/// The shift constant of a family.
pub fn shift_constant(family: Family) -> f64 {
    match family {
        Family::Polynomial => polynomial_shift_constant(),
        Family::Exponential => exponential_shift_constant(),
    }
}

/// The family's activation built from its solved constant.
pub fn family_activation(family: Family) -> Activation {
    match family {
        Family::Polynomial => poly_activation(polynomial_shift_constant()),
        Family::Exponential => exp_activation(exponential_shift_constant()),
    }
}

/// Newton refinement of a fixed point of `f` from a nearby seed, iterating
/// on `r(x) = f(x) - x`.
fn newton_fixed_point(f: &Activation, seed: f64) -> f64 {
    let mut x = seed;
    for _ in 0..60 {
        let r = f.value(x) - x;
        let slope = f.derivative(x) - 1.0;
        if slope == 0.0 {
            break;
        }
        let next = x - r / slope;
        if (next - x).abs() <= f64::EPSILON * x.abs().max(1.0) {
            return next;
        }
        x = next;
    }
    x
}

/// Builds the coupled d-dimensional network of a family:
/// `W = (1/m^2) 1 1^T + (1 - 1/m^2) I` (diagonal 1, off-diagonal `1/m^2`),
/// bias `C` in every coordinate, and the family activation.
///
/// Requires `m > d`; at `d = 1` the network reduces exactly to the shifted
/// activation.
pub fn build_coupled_network(family: Family, d: usize, m: f64) -> Result<LoopedNetwork> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if !(m > d as f64) {
        return Err(Error::invalid(format!("need m > d, got m = {m}, d = {d}")));
    }
    let c = shift_constant(family);
    let coupling = 1.0 / (m * m);
    let w = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { coupling }).collect())
        .collect();
    LoopedNetwork::new(w, vec![c; d], family_activation(family))
}

/// Builds the 3-dimensional dummy-variable network of a family: row 1 is
/// `[1, 1, C-1]`, rows 2 and 3 are zero, and the bias vanishes. On inputs
/// of the form `(x, 1, 1)` coordinate 1 sees `<w_1, x> = x + C` and so
/// follows the reduced map, while the zero rows pin coordinates 2 and 3 to
/// `g(0) = 1`.
pub fn build_dummy_network(family: Family) -> LoopedNetwork {
    let c = shift_constant(family);
    let w = vec![vec![1.0, 1.0, c - 1.0], vec![0.0; 3], vec![0.0; 3]];
    LoopedNetwork::new(w, vec![0.0; 3], family_activation(family))
        .expect("dummy construction is well-formed")
}

/// Builds the d-dimensional dummy-variable network of the exponential
/// family: row 1 is `u = [1, 1/(d-1), ..., 1/(d-1), 1/(d-1) + C - 1]`,
/// remaining rows are zero. Then `<u, (x, 1, ..., 1)> = x + C`, so
/// coordinate 1 follows the reduced map while the dummies stay pinned at
/// `g(0) = 1`. Requires `d >= 2`; at `d = 2` the row is exactly `[1, C]`.
pub fn build_ddim_exp_network(d: usize) -> Result<LoopedNetwork> {
    if d < 2 {
        return Err(Error::invalid("the dummy-variable construction needs d >= 2"));
    }
    let c = exponential_shift_constant();
    let share = 1.0 / (d as f64 - 1.0);
    let mut u = vec![share; d];
    u[0] = 1.0;
    u[d - 1] = share - 1.0 + c;
    let mut w = vec![vec![0.0; d]; d];
    w[0] = u;
    LoopedNetwork::new(w, vec![0.0; d], exp_activation(c))
}

/// Enumerates the 2^d fixed-point candidates of the coupled network: every
/// per-coordinate combination of `(p1, p2)`, each refined by a short damped
/// iteration of the full network until `||f(p) - p||_inf <= 1/m + 1e-8`.
///
/// Candidates come back in binary-counter order with coordinate 1 varying
/// fastest. Refinement failure names the offending candidate index.
pub fn enumerate_fixed_points(spec: &CaseStudySpec) -> Result<Vec<Vec<f64>>> {
    if spec.d > ENUMERATION_DIM_GUARD {
        return Err(Error::invalid(format!(
            "2^{d} candidates exceed the enumeration guard (d <= {ENUMERATION_DIM_GUARD})",
            d = spec.d
        )));
    }
    let net = build_coupled_network(spec.family, spec.d, spec.m)?;
    let limit = 1.0 / spec.m + 1e-8;
    let mut out = Vec::with_capacity(1usize << spec.d);
    for index in 0..(1usize << spec.d) {
        let mut x: Vec<f64> = (0..spec.d)
            .map(|j| spec.fixed_points[(index >> j) & 1])
            .collect();
        let mut residual = f64::INFINITY;
        for _ in 0..2000 {
            let fx = net.apply(&x);
            if !vector_is_tame(&fx) {
                return Err(Error::RefinementFailed { index, residual: f64::INFINITY, limit });
            }
            residual = inf_norm_diff(&fx, &x);
            if residual <= 1e-11 {
                break;
            }
            for (xi, fxi) in x.iter_mut().zip(&fx) {
                *xi += 0.5 * (fxi - *xi);
            }
        }
        if residual > limit {
            return Err(Error::RefinementFailed { index, residual, limit });
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_constant_solves_its_equation() {
        let c = polynomial_shift_constant();
        assert!((4.0 * c.powi(4) - 15.0 * c * c + 10.0).abs() <= 1e-12);
        let closed_form = ((15.0 + 65.0_f64.sqrt()) / 8.0).sqrt();
        assert!((c - closed_form).abs() <= 1e-13, "{c} vs {closed_form}");
    }

    #[test]
    fn exponential_constant_solves_its_equation() {
        let c = exponential_shift_constant();
        assert!((c.powi(3) + 2.0 * c * c + std::f64::consts::LN_2).abs() <= 1e-12);
        // -2.15 is only an approximation of the root.
        assert!((c + 2.15).abs() < 1e-3, "{c}");
    }

    #[test]
    fn poly_activation_fixes_the_stated_values() {
        let g = poly_activation(polynomial_shift_constant());
        assert_eq!(g.value(0.0), 1.0);
        assert!(g.finite_difference_check(polynomial_shift_constant(), 1e-5) <= 1e-6);
    }

    #[test]
    fn poly_shift_identity_at_spot_checks() {
        let c = polynomial_shift_constant();
        let g = poly_activation(c);
        let f = reduced_map(Family::Polynomial);
        for &x in &[-1.0, 0.5, 1.4] {
            assert!(
                (g.value(x + c) - f.value(x)).abs() <= 1e-10,
                "shift identity at {x}"
            );
        }
    }

    #[test]
    fn exp_activation_fixes_the_stated_values() {
        let c = exponential_shift_constant();
        let g = exp_activation(c);
        // The exponent vanishes at z = C by the constant's definition.
        assert!(g.value(c).abs() <= 1e-12);
        assert!((g.value(0.0) - 1.0).abs() <= 1e-14);
        assert!(g.finite_difference_check(c, 1e-5) <= 1e-6);
    }

    #[test]
    fn exp_shift_identity_at_spot_checks() {
        let c = exponential_shift_constant();
        let g = exp_activation(c);
        let f = reduced_map(Family::Exponential);
        for &x in &[-0.9, 0.0, 0.1] {
            assert!(
                (g.value(x + c) - f.value(x)).abs() <= 1e-9,
                "shift identity at {x}"
            );
        }
    }

    #[test]
    fn reduced_fixed_points_match_the_documented_values() {
        let poly = CaseStudySpec::new(Family::Polynomial, 1, 2.0).unwrap();
        assert_eq!(poly.fixed_points[0], 0.0);
        assert!((poly.fixed_points[1] - 1.4028).abs() <= 1e-3);
        let exp = CaseStudySpec::new(Family::Exponential, 1, 2.0).unwrap();
        assert_eq!(exp.fixed_points[0], 0.0);
        assert!((exp.fixed_points[1] + 0.9104).abs() <= 1e-3);
    }

    #[test]
    fn fixed_points_are_machine_precision_roots() {
        for family in [Family::Polynomial, Family::Exponential] {
            let spec = CaseStudySpec::new(family, 1, 2.0).unwrap();
            let f = reduced_map(family);
            for p in spec.fixed_points {
                assert!(
                    (f.value(p) - p).abs() <= 1e-14 * p.abs().max(1.0),
                    "{family} residual at {p}"
                );
            }
        }
    }

    #[test]
    fn coupled_network_rejects_small_m() {
        assert!(build_coupled_network(Family::Polynomial, 3, 3.0).is_err());
        assert!(build_coupled_network(Family::Polynomial, 3, 3.5).is_ok());
    }

    #[test]
    fn coupled_network_weights_are_as_stated() {
        let net = build_coupled_network(Family::Exponential, 2, 10.0).unwrap();
        assert_eq!(net.w[0][0], 1.0);
        assert_eq!(net.w[0][1], 0.01);
        assert_eq!(net.w[1][0], 0.01);
        assert_eq!(net.b[0], exponential_shift_constant());
    }

    #[test]
    fn one_dimensional_coupled_network_is_the_shifted_activation() {
        let net = build_coupled_network(Family::Polynomial, 1, 5.0).unwrap();
        let f = reduced_map(Family::Polynomial);
        for &x in &[-0.25, 0.0, 0.4, 1.45] {
            let y = net.forward(&[x]).unwrap()[0];
            assert!((y - f.value(x)).abs() <= 1e-9, "at {x}: {y}");
        }
    }

    #[test]
    fn coupled_origin_is_fixed_up_to_rounding() {
        let net = build_coupled_network(Family::Polynomial, 3, 1000.0).unwrap();
        let y = net.forward(&[0.0, 0.0, 0.0]).unwrap();
        for v in y {
            assert!(v.abs() <= 1.0 / 1000.0, "residue {v}");
        }
    }

    #[test]
    fn dummy_network_runs_the_reduced_map_in_coordinate_one() {
        let net = build_dummy_network(Family::Polynomial);
        let f = reduced_map(Family::Polynomial);
        let y = net.forward(&[0.2, 1.0, 1.0]).unwrap();
        assert!((y[0] - f.value(0.2)).abs() <= 1e-9);
        assert_eq!(y[1], 1.0);
        assert_eq!(y[2], 1.0);
    }

    #[test]
    fn dummy_network_converges_to_the_second_fixed_point() {
        let net = build_dummy_network(Family::Polynomial);
        let end = net.run_loops(&[1.35, 1.0, 1.0], 100).unwrap();
        assert!((end[0] - 1.4028).abs() <= 1e-3, "{}", end[0]);
        assert_eq!(&end[1..], &[1.0, 1.0]);
    }

    #[test]
    fn exp_dummy_inner_product_shifts_by_c() {
        let c = exponential_shift_constant();
        let net = build_dummy_network(Family::Exponential);
        let row = &net.w[0];
        for &x in &[-0.9, 0.0, 0.3] {
            let z = row[0] * x + row[1] + row[2];
            assert!((z - (x + c)).abs() <= 1e-14, "at {x}");
        }
    }

    #[test]
    fn ddim_network_needs_two_dimensions() {
        assert!(build_ddim_exp_network(1).is_err());
        assert!(build_ddim_exp_network(2).is_ok());
    }

    #[test]
    fn ddim_row_reduces_to_the_dummy_row_at_d_two() {
        let net = build_ddim_exp_network(2).unwrap();
        assert_eq!(net.w[0], vec![1.0, exponential_shift_constant()]);
    }

    #[test]
    fn ddim_inner_product_shifts_by_c_for_any_d() {
        let c = exponential_shift_constant();
        for d in [2, 3, 5, 8] {
            let net = build_ddim_exp_network(d).unwrap();
            for &x in &[-0.9, 0.0, 0.25] {
                let mut input = vec![1.0; d];
                input[0] = x;
                let z: f64 = net.w[0].iter().zip(&input).map(|(w, v)| w * v).sum();
                assert!((z - (x + c)).abs() <= 1e-13, "d = {d}, x = {x}");
            }
        }
    }

    #[test]
    fn ddim_network_fixes_zero_in_coordinate_one() {
        let net = build_ddim_exp_network(5).unwrap();
        let y = net.forward(&[0.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(y[0].abs() <= 1e-12, "{}", y[0]);
        for v in &y[1..] {
            assert!((v - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn enumeration_at_d_one_returns_the_reduced_fixed_points() {
        let spec = CaseStudySpec::new(Family::Polynomial, 1, 100.0).unwrap();
        let points = enumerate_fixed_points(&spec).unwrap();
        assert_eq!(points.len(), 2);
        assert!((points[0][0] - spec.fixed_points[0]).abs() <= 1e-9);
        assert!((points[1][0] - spec.fixed_points[1]).abs() <= 1e-9);
    }

    #[test]
    fn enumeration_order_is_a_binary_counter_in_coordinate_one() {
        let spec = CaseStudySpec::new(Family::Polynomial, 2, 1000.0).unwrap();
        let points = enumerate_fixed_points(&spec).unwrap();
        assert_eq!(points.len(), 4);
        let [p1, p2] = spec.fixed_points;
        let expect = [[p1, p1], [p2, p1], [p1, p2], [p2, p2]];
        for (got, want) in points.iter().zip(&expect) {
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() <= 2e-3, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn enumeration_guards_the_dimension() {
        let mut spec = CaseStudySpec::new(Family::Polynomial, 2, 1000.0).unwrap();
        spec.d = 21;
        spec.m = 1e6;
        assert!(enumerate_fixed_points(&spec).is_err());
    }

    #[test]
    fn enumerated_candidates_are_valid_fixed_points() {
        let spec = CaseStudySpec::new(Family::Exponential, 2, 50.0).unwrap();
        let net = build_coupled_network(spec.family, spec.d, spec.m).unwrap();
        for p in enumerate_fixed_points(&spec).unwrap() {
            let residual = inf_norm_diff(&net.apply(&p), &p);
            assert!(residual <= 1.0 / spec.m + 1e-8, "residual {residual}");
        }
    }

    #[test]
    fn family_parses_from_cli_names() {
        assert_eq!("poly".parse::<Family>().unwrap(), Family::Polynomial);
        assert_eq!("exponential".parse::<Family>().unwrap(), Family::Exponential);
        assert!("cubic".parse::<Family>().is_err());
    }
}
