//! The three summary figures, each emitted as a CSV data file, a JSON
//! summary, and an SVG rendering with deterministic bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use fplnn::caselib::{build_coupled_network, reduced_map, CaseStudySpec, Family};
use fplnn::certify::RegionBox;
use fplnn::csv_float;
use fplnn::model::{inf_norm_diff, Activation, LoopedNetwork};
use fplnn::oracle::{scan_fixed_points_1d, FixedPointRecord};
use fplnn::robust::{perturbed_iterate, NoiseModel, NOISE_SUM_CAP};
use serde_json::json;

use crate::svg::{render, Marker, Panel, Series, PALETTE};

/// Coupling parameter of the fixed network behind the perturbed runs.
pub const TRAJECTORY_COUPLING: f64 = 1000.0;

/// Inverse noise levels compared in the perturbed-iteration figure.
pub const NOISE_LEVELS: [f64; 3] = [5.0, 15.0, 100.0];

/// Steps per perturbed run.
pub const TRAJECTORY_STEPS: usize = 200;

/// Scan resolution used when a figure needs fixed-point locations.
const SCAN_POINTS: usize = 20_001;

/// Scan tolerance used when a figure needs fixed-point locations.
const SCAN_TOL: f64 = 1e-12;

/// Plot window for a family, wide enough to show every fixed point of its
/// reduced map.
pub fn family_window(family: Family) -> (f64, f64) {
    match family {
        Family::Polynomial => (-2.0, 2.0),
        Family::Exponential => (-1.5, 0.5),
    }
}

fn write_text(path: &Path, contents: &str) -> Result<PathBuf> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(path.to_path_buf())
}

fn record_json(records: &[FixedPointRecord]) -> serde_json::Value {
    serde_json::to_value(records).expect("records serialize")
}

/// A cobweb path on the diagonal: vertical to the curve, horizontal back
/// to the diagonal, repeated until the residual drops below `tol`.
fn cobweb_path(map: &Activation, x0: f64, tol: f64, max_steps: usize) -> Vec<(f64, f64)> {
    let mut points = vec![(x0, x0)];
    let mut x = x0;
    for _ in 0..max_steps {
        let y = map.value(x);
        points.push((x, y));
        points.push((y, y));
        if (y - x).abs() <= tol || !y.is_finite() {
            break;
        }
        x = y;
    }
    points
}

fn fixed_point_markers(records: &[FixedPointRecord]) -> Vec<Marker> {
    records
        .iter()
        .map(|r| {
            let x = r.location[0];
            let kind = if r.attracting { "attracting" } else { "repelling" };
            Marker {
                x,
                y: x,
                label: format!("{kind} {x:.4}"),
                color: if r.attracting { PALETTE[2] } else { PALETTE[3] },
            }
        })
        .collect()
}

/// Both reduced maps against the identity, with every scanned fixed point
/// marked and two cobweb iterations per family.
pub fn fig1(out: &Path) -> Result<Vec<PathBuf>> {
    let mut csv = String::from("family,series,step,x,y\n");
    let mut panels = Vec::new();
    let mut families_json = Vec::new();

    for family in [Family::Polynomial, Family::Exponential] {
        let map = reduced_map(family);
        let (lo, hi) = family_window(family);
        let window = RegionBox::interval(lo, hi)?;
        let records = scan_fixed_points_1d(&map.f, &window, SCAN_POINTS, SCAN_TOL)?;
        let starts = match family {
            Family::Polynomial => [0.25, 1.35],
            Family::Exponential => [0.09, -0.95],
        };

        let n = 601;
        let curve: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = window.grid_point(0, i, n);
                (x, map.value(x))
            })
            .collect();
        let identity = vec![(lo, lo), (hi, hi)];
        let cobwebs: Vec<Vec<(f64, f64)>> =
            starts.iter().map(|&x0| cobweb_path(&map.f, x0, 1e-9, 80)).collect();

        for (series, points) in [("curve", &curve), ("identity", &identity)]
            .into_iter()
            .chain([("cobweb1", &cobwebs[0]), ("cobweb2", &cobwebs[1])])
        {
            for (step, &(x, y)) in points.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{family},{series},{step},{},{}",
                    csv_float(x),
                    csv_float(y)
                );
            }
        }

        let cobweb_json: Vec<serde_json::Value> = starts
            .iter()
            .zip(&cobwebs)
            .map(|(&x0, path)| {
                let last = path.last().expect("cobweb has points").1;
                json!({
                    "start": x0,
                    "final": last,
                    "map_applications": (path.len() - 1) / 2,
                })
            })
            .collect();
        families_json.push(json!({
            "family": family,
            "window": [lo, hi],
            "fixed_points": record_json(&records),
            "cobwebs": cobweb_json,
        }));

        panels.push(Panel {
            title: format!("reduced map, {family} family"),
            x_label: "x".into(),
            y_label: "f(x)".into(),
            series: vec![
                Series { label: "f".into(), color: PALETTE[0], points: curve },
                Series { label: "identity".into(), color: "#888888", points: identity },
                Series {
                    label: format!("iteration from {}", starts[0]),
                    color: PALETTE[1],
                    points: cobwebs[0].clone(),
                },
                Series {
                    label: format!("iteration from {}", starts[1]),
                    color: PALETTE[4],
                    points: cobwebs[1].clone(),
                },
            ],
            markers: fixed_point_markers(&records),
        });
    }

    let summary = json!({ "families": families_json });
    Ok(vec![
        write_text(&out.join("fig1.csv"), &csv)?,
        write_text(&out.join("fig1.json"), &serde_json::to_string_pretty(&summary)?)?,
        write_text(&out.join("fig1.svg"), &render(&panels))?,
    ])
}

/// The coordinate slice `x -> f_j(x, anchor)` of a network, with the exact
/// chain-rule derivative through row `j`.
fn slice_activation(network: &LoopedNetwork, j: usize, anchor: &[f64]) -> Activation {
    let act = network.activation.clone();
    let act_d = network.activation.clone();
    let row = network.w[j].clone();
    let bj = network.b[j];
    let w_jj = row[j];
    let point = anchor.to_vec();
    let pre = move |x: f64| {
        let terms = row.iter().enumerate().map(|(k, w)| w * if k == j { x } else { point[k] });
        terms.sum::<f64>() + bj
    };
    let pre_d = pre.clone();
    Activation::new(
        move |x| act.value(pre(x)),
        move |x| act_d.derivative(pre_d(x)) * w_jj,
        "coordinate slice",
    )
}

/// Per-coordinate slices of the two-dimensional coupled polynomial network
/// against the identity, anchored at the second reduced fixed point.
pub fn fig2(m: f64, out: &Path) -> Result<Vec<PathBuf>> {
    let spec = CaseStudySpec::new(Family::Polynomial, 2, m)?;
    let network = build_coupled_network(Family::Polynomial, 2, m)?;
    let p2 = spec.fixed_points[1];
    let anchor = vec![p2; 2];
    let (lo, hi) = (-0.5, 1.6);
    let window = RegionBox::interval(lo, hi)?;

    let mut csv = String::from("dim,series,step,x,y\n");
    let mut panels = Vec::new();
    let mut dims_json = Vec::new();

    for j in 0..2 {
        let slice = slice_activation(&network, j, &anchor);
        let records = scan_fixed_points_1d(&slice, &window, SCAN_POINTS, SCAN_TOL)?;
        let n = 601;
        let curve: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = window.grid_point(0, i, n);
                (x, slice.value(x))
            })
            .collect();
        let identity = vec![(lo, lo), (hi, hi)];

        for (series, points) in [("slice", &curve), ("identity", &identity)] {
            for (step, &(x, y)) in points.iter().enumerate() {
                let _ = writeln!(
                    csv,
                    "{},{series},{step},{},{}",
                    j + 1,
                    csv_float(x),
                    csv_float(y)
                );
            }
        }

        dims_json.push(json!({
            "dim": j + 1,
            "fixed_values": record_json(&records),
        }));
        panels.push(Panel {
            title: format!("coordinate {} slice, coupling m = {m}", j + 1),
            x_label: format!("x{}", j + 1),
            y_label: format!("f{}(x)", j + 1),
            series: vec![
                Series { label: "slice".into(), color: PALETTE[0], points: curve },
                Series { label: "identity".into(), color: "#888888", points: identity },
            ],
            markers: fixed_point_markers(&records),
        });
    }

    let summary = json!({
        "family": Family::Polynomial,
        "m": m,
        "anchor": anchor,
        "dims": dims_json,
    });
    Ok(vec![
        write_text(&out.join("fig2.csv"), &csv)?,
        write_text(&out.join("fig2.json"), &serde_json::to_string_pretty(&summary)?)?,
        write_text(&out.join("fig2.svg"), &render(&panels))?,
    ])
}

/// Perturbed runs of the two-dimensional coupled polynomial network from
/// one shared start, one run per inverse noise level, against the
/// noiseless fixed point at the origin.
pub fn fig3(seed: u64, noiseless: bool, out: &Path) -> Result<Vec<PathBuf>> {
    let network = build_coupled_network(Family::Polynomial, 2, TRAJECTORY_COUPLING)?;
    let x0 = [0.25, 0.25];
    let p = [0.0, 0.0];

    let mut csv = String::from("m,t,x1,x2,err\n");
    let mut runs_json = Vec::new();
    let mut state_series = Vec::new();
    let mut err_series = Vec::new();

    for (i, &m) in NOISE_LEVELS.iter().enumerate() {
        let effective_m = if noiseless { f64::INFINITY } else { m };
        let noise = NoiseModel::new(effective_m, seed)?;
        let trace = perturbed_iterate(|x| network.apply(x), &x0, &noise, TRAJECTORY_STEPS)?;

        let mut states = Vec::with_capacity(trace.steps + 1);
        let mut errs = Vec::with_capacity(trace.steps + 1);
        for (t, x) in trace.iterates.iter().enumerate() {
            let err = inf_norm_diff(x, &p);
            let _ = writeln!(
                csv,
                "{m},{t},{},{},{}",
                csv_float(x[0]),
                csv_float(x[1]),
                csv_float(err)
            );
            states.push((x[0], x[1]));
            errs.push((t as f64, err));
        }

        let final_err = errs.last().expect("run has steps").1;
        let noise_floor = NOISE_SUM_CAP / effective_m;
        runs_json.push(json!({
            "m": m,
            "amplitude": noise.amplitude(),
            "final_err": final_err,
            "noise_floor": noise_floor,
            "within_floor": final_err <= noise_floor + fplnn::iterate::BOUND_SLACK,
        }));
        state_series.push(Series {
            label: format!("m = {m}"),
            color: PALETTE[i],
            points: states,
        });
        err_series.push(Series {
            label: format!("m = {m}"),
            color: PALETTE[i],
            points: errs,
        });
    }

    let panels = vec![
        Panel {
            title: format!("perturbed trajectories, seed {seed}"),
            x_label: "x1".into(),
            y_label: "x2".into(),
            series: state_series,
            markers: vec![Marker {
                x: 0.0,
                y: 0.0,
                label: "noiseless fixed point".into(),
                color: PALETTE[3],
            }],
        },
        Panel {
            title: "distance to the fixed point".into(),
            x_label: "t".into(),
            y_label: "error".into(),
            series: err_series,
            markers: vec![],
        },
    ];

    let summary = json!({
        "seed": seed,
        "noiseless": noiseless,
        "coupling_m": TRAJECTORY_COUPLING,
        "steps": TRAJECTORY_STEPS,
        "x0": x0,
        "fixed_point": p,
        "runs": runs_json,
    });
    Ok(vec![
        write_text(&out.join("fig3.csv"), &csv)?,
        write_text(&out.join("fig3.json"), &serde_json::to_string_pretty(&summary)?)?,
        write_text(&out.join("fig3.svg"), &render(&panels))?,
    ])
}
