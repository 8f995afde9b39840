//! Cross-module invariants: certificates against brute-force suprema,
//! iteration behavior against oracle fixed points, and the randomized
//! quadratic obstruction.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fplnn::caselib::{
    build_coupled_network, enumerate_fixed_points, reduced_map, CaseStudySpec, Family,
};
use fplnn::certify::{certify_contraction_scalar, RegionBox};
use fplnn::iterate::{banach_ledger, iterate_scalar_to_fixed_point, iterate_to_fixed_point};
use fplnn::model::{inf_norm_diff, Activation, LoopedNetwork};
use fplnn::oracle::{quadratic_fixed_point_property, scan_fixed_points_1d};

/// Adaptive supremum of `|f'|`: re-grid around the running argmax a few
/// times, shrinking to two cells of the previous resolution each round.
fn adaptive_derivative_sup(map: &Activation, lo: f64, hi: f64) -> f64 {
    let n = 1001;
    let (mut lo, mut hi) = (lo, hi);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..5 {
        let spacing = (hi - lo) / (n as f64 - 1.0);
        let mut argmax = lo;
        for i in 0..n {
            let x = lo + spacing * i as f64;
            let slope = map.derivative(x).abs();
            if slope > best {
                best = slope;
                argmax = x;
            }
        }
        lo = (argmax - 2.0 * spacing).max(lo);
        hi = (argmax + 2.0 * spacing).min(hi);
    }
    best
}

/// The four certified case-study regions as (family, interval, label).
fn case_regions() -> Vec<(Family, RegionBox)> {
    [Family::Polynomial, Family::Exponential]
        .into_iter()
        .flat_map(|family| {
            reduced_map(family)
                .regions
                .iter()
                .map(move |r| (family, r.region()))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn nested_grids_never_lose_contraction_mass() {
    // The interior derivative peak of the polynomial reduced map sits
    // between grid points, so coarse grids underestimate the supremum and
    // refinements of a nested grid can only raise it.
    let f = reduced_map(Family::Polynomial);
    let interval = RegionBox::interval(0.5, 1.0).unwrap();
    let coarse = certify_contraction_scalar(&f.f, &interval, 101).unwrap();
    let medium = certify_contraction_scalar(&f.f, &interval, 1001).unwrap();
    let fine = certify_contraction_scalar(&f.f, &interval, 10001).unwrap();
    assert!(coarse.k_hat <= medium.k_hat);
    assert!(medium.k_hat <= fine.k_hat);
    // The peak value is sqrt(2.5) * 5^(3/4) / ... evaluated directly: the
    // derivative 3x - 1.6x^3 is stationary at x = sqrt(0.625).
    let peak = 0.625_f64.sqrt();
    let true_sup = f.derivative(peak).abs();
    assert!(fine.k_hat <= true_sup);
    assert!(true_sup - fine.k_hat <= 1e-6);
}

#[test]
fn certified_suprema_agree_with_adaptive_refinement() {
    for (family, region) in case_regions() {
        let f = reduced_map(family);
        let cert = certify_contraction_scalar(&f.f, &region, 100_000).unwrap();
        let adaptive = adaptive_derivative_sup(&f.f, region.lower[0], region.upper[0]);
        assert!(
            (cert.k_hat - adaptive).abs() <= 1e-4,
            "{family}: certificate {} vs adaptive {adaptive}",
            cert.k_hat
        );
    }
}

#[test]
fn certified_regions_trap_their_iterates() {
    for (family, region) in case_regions() {
        let f = reduced_map(family);
        let cert = certify_contraction_scalar(&f.f, &region, 10_001).unwrap();
        assert!(cert.satisfies_banach(), "{family} region {:?}", region.lower);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let x0 = rng.gen_range(region.lower[0]..=region.upper[0]);
            let trace =
                iterate_scalar_to_fixed_point(|x| f.value(x), x0, 1e-12, 10_000).unwrap();
            assert!(trace.converged);
            for x in &trace.iterates {
                assert!(region.contains(x), "{family}: iterate {x:?} escaped");
            }
        }
    }
}

#[test]
fn random_starts_in_a_certified_region_share_one_limit() {
    for (family, region) in case_regions() {
        let f = reduced_map(family);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let limits: Vec<f64> = (0..25)
            .map(|_| {
                let x0 = rng.gen_range(region.lower[0]..=region.upper[0]);
                let trace =
                    iterate_scalar_to_fixed_point(|x| f.value(x), x0, 1e-12, 10_000).unwrap();
                assert!(trace.converged);
                trace.last()[0]
            })
            .collect();
        for pair in limits.windows(2) {
            assert!(
                (pair[0] - pair[1]).abs() <= 1e-8,
                "{family}: limits {pair:?} disagree"
            );
        }
    }
}

#[test]
fn residuals_decay_at_the_certified_rate() {
    for (family, region) in case_regions() {
        let f = reduced_map(family);
        let cert = certify_contraction_scalar(&f.f, &region, 100_000).unwrap();
        let x0 = 0.25 * region.lower[0] + 0.75 * region.upper[0];
        let trace = iterate_scalar_to_fixed_point(|x| f.value(x), x0, 1e-12, 10_000).unwrap();
        for pair in trace.residuals.windows(2) {
            assert!(
                pair[1] <= cert.k_hat * pair[0] + 1e-12,
                "{family}: residual step {pair:?} beats K = {}",
                cert.k_hat
            );
        }
    }
}

#[test]
fn ledgers_stay_clean_on_certified_regions() {
    for (family, region) in case_regions() {
        let f = reduced_map(family);
        let cert = certify_contraction_scalar(&f.f, &region, 100_000).unwrap();
        let scan = scan_fixed_points_1d(&f.f, &region, 10_001, 1e-12).unwrap();
        let attracting: Vec<_> = scan.iter().filter(|r| r.attracting).collect();
        assert_eq!(attracting.len(), 1, "{family} region holds one fixed point");
        let p = attracting[0].location.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..5 {
            let x0 = rng.gen_range(region.lower[0]..=region.upper[0]);
            let trace =
                iterate_scalar_to_fixed_point(|x| f.value(x), x0, 1e-12, 10_000).unwrap();
            let ledger = banach_ledger(&trace, cert.k_hat, &p).unwrap();
            assert!(ledger.is_clean(), "{family}: {:?}", ledger.violations);
        }
    }
}

#[test]
fn attracting_scan_points_are_iteration_limits() {
    let windows = [
        (Family::Polynomial, RegionBox::interval(-2.0, 2.0).unwrap()),
        (Family::Exponential, RegionBox::interval(-1.5, 0.5).unwrap()),
    ];
    for (family, window) in windows {
        let f = reduced_map(family);
        let scan = scan_fixed_points_1d(&f.f, &window, 20_001, 1e-12).unwrap();
        for record in scan.iter().filter(|r| r.attracting) {
            let p = record.location[0];
            for start in [p - 0.01, p + 0.01] {
                if !window.contains(&[start]) {
                    continue;
                }
                let trace =
                    iterate_scalar_to_fixed_point(|x| f.value(x), start, 1e-12, 10_000)
                        .unwrap();
                assert!(trace.converged, "{family}: start {start} did not settle");
                assert!(
                    (trace.last()[0] - p).abs() <= 1e-8,
                    "{family}: start {start} landed at {} not {p}",
                    trace.last()[0]
                );
            }
        }
    }
}

#[test]
fn scan_reports_every_sign_change_on_the_wide_window() {
    let f = reduced_map(Family::Polynomial);
    let window = RegionBox::interval(-3.0, 3.0).unwrap();
    let scan = scan_fixed_points_1d(&f.f, &window, 100_000, 1e-12).unwrap();
    assert_eq!(scan.len(), 4);
    let r = |x: f64| f.value(x) - x;
    let mut edges = vec![-3.0];
    edges.extend(scan.iter().map(|rec| rec.location[0]));
    edges.push(3.0);
    // Between consecutive roots the residual keeps one sign; equivalently
    // the scan missed nothing.
    for gap in edges.windows(2) {
        let (lo, hi) = (gap[0] + 1e-6, gap[1] - 1e-6);
        let sign = r(0.5 * (lo + hi)).signum();
        for i in 0..=10_000 {
            let x = lo + (hi - lo) * i as f64 / 10_000.0;
            assert!(
                r(x).signum() == sign,
                "unreported sign change near {x} in gap {gap:?}"
            );
        }
    }
}

#[test]
fn enumerated_candidates_sit_in_separated_basins() {
    let cases = [
        (Family::Polynomial, 2, 1000.0),
        (Family::Exponential, 2, 100.0),
    ];
    for (family, d, m) in cases {
        let spec = CaseStudySpec::new(family, d, m).unwrap();
        let net = build_coupled_network(family, d, m).unwrap();
        for candidate in enumerate_fixed_points(&spec).unwrap() {
            for offset in [0.05, -0.05] {
                let start: Vec<f64> = candidate.iter().map(|c| c + offset).collect();
                let trace =
                    iterate_to_fixed_point(|x| net.apply(x), &start, 1e-12, 500).unwrap();
                assert!(trace.converged);
                assert!(
                    inf_norm_diff(trace.last(), &candidate) <= 1e-6,
                    "{family}: perturbed {candidate:?} drifted to {:?}",
                    trace.last()
                );
            }
        }
    }
}

#[test]
fn three_dimensional_enumeration_matches_the_product_structure() {
    let spec = CaseStudySpec::new(Family::Polynomial, 3, 1e4).unwrap();
    let candidates = enumerate_fixed_points(&spec).unwrap();
    assert_eq!(candidates.len(), 8);
    let net = build_coupled_network(spec.family, spec.d, spec.m).unwrap();
    for (index, candidate) in candidates.iter().enumerate() {
        let residual = inf_norm_diff(&net.apply(candidate), candidate);
        assert!(residual <= 1.0 / spec.m + 1e-8);
        for (j, coordinate) in candidate.iter().enumerate() {
            let expected = spec.fixed_points[(index >> j) & 1];
            assert!(
                (coordinate - expected).abs() <= 2e-3,
                "candidate {index} coordinate {j}: {coordinate} vs {expected}"
            );
        }
    }
}

#[test]
fn thousand_seeded_quadratics_obey_the_obstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut tested = 0;
    while tested < 1000 {
        let a: f64 = rng.gen_range(-3.0..3.0);
        let b: f64 = rng.gen_range(-3.0..3.0);
        let c: f64 = rng.gen_range(-3.0..3.0);
        if a.abs() < 1e-3 {
            continue;
        }
        let bm1 = b - 1.0;
        if bm1 * bm1 - 4.0 * a * c <= 1e-8 {
            continue;
        }
        let q = quadratic_fixed_point_property(a, b, c).unwrap();
        assert!(q.derivative_plus > 1.0, "triple ({a}, {b}, {c})");
        assert!(q.derivative_minus < 1.0, "triple ({a}, {b}, {c})");
        let root = q.discriminant.sqrt();
        assert!((q.derivative_plus - (1.0 + root)).abs() <= 1e-9);
        assert!((q.derivative_minus - (1.0 - root)).abs() <= 1e-9);
        tested += 1;
    }
}

proptest! {
    #[test]
    fn loop_counts_compose(
        seed in 0u64..1000,
        a in 0usize..6,
        b in 0usize..6,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = rng.gen_range(1..=3);
        let w: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect())
            .collect();
        let bias: Vec<f64> = (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let net = LoopedNetwork::new(
            w,
            bias,
            Activation::new(f64::tanh, |x| 1.0 - x.tanh().powi(2), "tanh"),
        )
        .unwrap();
        let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let direct = net.run_loops(&x0, a + b).unwrap();
        let staged = net.run_loops(&net.run_loops(&x0, a).unwrap(), b).unwrap();
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn quadratic_derivatives_always_average_to_one(
        a in prop_oneof![(-3.0..-0.01f64), (0.01..3.0f64)],
        b in -3.0..3.0f64,
        c in -3.0..3.0f64,
    ) {
        let disc = (b - 1.0) * (b - 1.0) - 4.0 * a * c;
        prop_assume!(disc > 1e-6);
        let q = quadratic_fixed_point_property(a, b, c).unwrap();
        prop_assert!((q.derivative_plus + q.derivative_minus - 2.0).abs() <= 1e-9);
        prop_assert!(q.derivative_plus > 1.0);
    }
}
