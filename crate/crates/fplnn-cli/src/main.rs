//! Command-line front end for the contraction toolkit: certification,
//! audited iteration, perturbed runs, network construction, fixed-point
//! oracles, and the three summary figures.
//!
//! Primary results go to stdout; generated files land under `--out` (or
//! the `FPLNN_OUT` environment variable) and are announced on stderr.
//! Exit codes: 0 on success, 1 when a run errors or a verified bound
//! fails, 2 on usage errors.

mod figures;
mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fplnn::caselib::{
    build_coupled_network, build_ddim_exp_network, build_dummy_network, enumerate_fixed_points,
    reduced_map, CaseStudySpec, Family,
};
use fplnn::certify::{certify_contraction_scalar, RegionBox};
use fplnn::csv_float;
use fplnn::iterate::{
    banach_ledger, geometric_rate_estimate, iterate_scalar_to_fixed_point, DEFAULT_MAX_ITER,
    DEFAULT_TOL,
};
use fplnn::model::inf_norm_diff;
use fplnn::oracle::{grid_fixed_points, scan_fixed_points_1d, textbook_examples_check};
use fplnn::robust::{perturbed_iterate, verify_robust, NoiseModel, DEFAULT_STEPS};
use serde_json::json;

/// Scan resolution for fixed-point lookups behind `iterate` and `robust`.
const SCAN_POINTS: usize = 20_001;

/// Scan tolerance for fixed-point lookups behind `iterate` and `robust`.
const SCAN_TOL: f64 = 1e-12;

/// Grid resolution for certificates computed on demand.
const CERT_GRID: usize = 100_000;

#[derive(Parser)]
#[command(
    name = "fplnn",
    version,
    about = "Certified contraction regions and fixed-point tooling for looped networks",
    arg_required_else_help = true
)]
struct Cli {
    /// Directory for generated CSV, JSON, and SVG files.
    #[arg(long, global = true, env = "FPLNN_OUT", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a derivative bound for a reduced map on an interval.
    Certify {
        /// Activation family, poly or exp.
        #[arg(long, default_value = "poly")]
        family: Family,
        /// Interval endpoints; defaults to the family's first certified
        /// region.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        region: Option<Vec<f64>>,
        /// Grid points for the derivative supremum.
        #[arg(long, default_value_t = CERT_GRID)]
        grid: usize,
    },
    /// Iterate a reduced map and audit the three error bounds.
    Iterate {
        /// Activation family, poly or exp.
        #[arg(long, default_value = "poly")]
        family: Family,
        /// Starting point.
        #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
        x0: f64,
        /// Stop once the step residual falls below this tolerance.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Iteration cap.
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Run seeded perturbed iteration and check the robust bounds.
    Robust {
        /// Activation family, poly or exp.
        #[arg(long, default_value = "poly")]
        family: Family,
        /// Inverse noise level; disturbances stay within 1/m.
        #[arg(long, default_value_t = 5.0)]
        m: f64,
        /// Noise stream seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of perturbed steps.
        #[arg(long, default_value_t = DEFAULT_STEPS)]
        steps: usize,
        /// Starting point.
        #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
        x0: f64,
    },
    /// Build a network whose loop has a prescribed fixed-point structure.
    Construct {
        /// Activation family, poly or exp.
        #[arg(long, default_value = "poly")]
        family: Family,
        /// Construction recipe.
        #[arg(long, value_enum, default_value_t = Kind::Coupled)]
        kind: Kind,
        /// Network dimension.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Coupling parameter for the coupled recipe; must exceed dim.
        #[arg(long, default_value_t = 1000.0)]
        m: f64,
    },
    /// Enumerate the 2^d fixed-point candidates of a coupled network.
    Enumerate {
        /// Activation family, poly or exp.
        #[arg(long, default_value = "poly")]
        family: Family,
        /// Network dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Coupling parameter; must exceed dim.
        #[arg(long, default_value_t = 1000.0)]
        m: f64,
    },
    /// Locate fixed points by interval scan (1-D) or grid search (2-D,
    /// 3-D), or audit the classical textbook cases.
    Oracle {
        /// Activation family, poly or exp.
        #[arg(long, default_value = "poly")]
        family: Family,
        /// 1 scans the reduced map; 2 or 3 grid-searches the coupled
        /// network.
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Axis interval, applied to every coordinate; defaults to the
        /// family window at dim 1 and to [-0.5, 1.6] otherwise.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        region: Option<Vec<f64>>,
        /// Grid points per axis; defaults to 20001, 300, 71 by dimension.
        #[arg(long)]
        grid: Option<usize>,
        /// Residual tolerance; defaults to 1e-12 for scans, 0.05 for grid
        /// searches.
        #[arg(long)]
        tol: Option<f64>,
        /// Coupling parameter of the searched network (dim 2 and 3).
        #[arg(long, default_value_t = 1000.0)]
        m: f64,
        /// Audit the three textbook cases instead of searching.
        #[arg(long)]
        textbook: bool,
    },
    /// Reduced maps against the identity with fixed points and cobweb
    /// iteration paths.
    Fig1,
    /// Coordinate slices of the two-dimensional coupled network against
    /// the identity.
    Fig2 {
        /// Coupling parameter; must exceed 2.
        #[arg(long, default_value_t = 1000.0)]
        m: f64,
    },
    /// Perturbed trajectories of the coupled network at three noise
    /// levels.
    Fig3 {
        /// Noise stream seed.
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Drop the noise entirely so the three runs coincide.
        #[arg(long)]
        noiseless: bool,
    },
}

/// Construction recipes exposed by `construct`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// Diagonal-dominant coupling with off-diagonal weights 1/m^2.
    Coupled,
    /// Three-dimensional network with two dummy coordinates.
    Dummy,
    /// Exponential-family network with one distinguished row.
    Ddim,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// Dispatches one subcommand; `Ok(false)` means the run finished but a
/// verified bound failed.
fn run(cli: Cli) -> Result<bool> {
    let out = cli.out.as_path();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match cli.command {
        Command::Certify { family, region, grid } => certify_cmd(family, region, grid, out),
        Command::Iterate { family, x0, tol, max_iter } => {
            iterate_cmd(family, x0, tol, max_iter, out)
        }
        Command::Robust { family, m, seed, steps, x0 } => {
            robust_cmd(family, m, seed, steps, x0, out)
        }
        Command::Construct { family, kind, dim, m } => construct_cmd(family, kind, dim, m, out),
        Command::Enumerate { family, dim, m } => enumerate_cmd(family, dim, m, out),
        Command::Oracle { family, dim, region, grid, tol, m, textbook } => {
            oracle_cmd(family, dim, region, grid, tol, m, textbook, out)
        }
        Command::Fig1 => announce(figures::fig1(out)?),
        Command::Fig2 { m } => announce(figures::fig2(m, out)?),
        Command::Fig3 { seed, noiseless } => announce(figures::fig3(seed, noiseless, out)?),
    }
}

fn announce(paths: Vec<PathBuf>) -> Result<bool> {
    for path in paths {
        eprintln!("wrote {}", path.display());
    }
    Ok(true)
}

fn save(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn interval_from(region: Option<Vec<f64>>, fallback: (f64, f64)) -> Result<RegionBox> {
    let (lo, hi) = match region {
        Some(pair) => (pair[0], pair[1]),
        None => fallback,
    };
    Ok(RegionBox::interval(lo, hi)?)
}

fn certify_cmd(family: Family, region: Option<Vec<f64>>, grid: usize, out: &Path) -> Result<bool> {
    let map = reduced_map(family);
    let first = map.regions[0];
    let interval = interval_from(region, (first.lo, first.hi))?;
    let cert = certify_contraction_scalar(&map.f, &interval, grid)?;
    let rendered = cert.to_json();
    println!("{rendered}");
    save(&out.join("certify.json"), &rendered)?;
    Ok(cert.satisfies_banach())
}

fn iterate_cmd(family: Family, x0: f64, tol: f64, max_iter: usize, out: &Path) -> Result<bool> {
    let map = reduced_map(family);
    let trace = iterate_scalar_to_fixed_point(|x| map.value(x), x0, tol, max_iter)?;
    let limit = trace.last()[0];
    let rate = geometric_rate_estimate(&trace).ok();
    let enclosing = map.regions.iter().find(|r| r.contains(limit)).copied();

    let (csv, summary, clean) = match enclosing {
        Some(region) => {
            let interval = region.region();
            let cert = certify_contraction_scalar(&map.f, &interval, CERT_GRID)?;
            let records = scan_fixed_points_1d(&map.f, &interval, SCAN_POINTS, SCAN_TOL)?;
            let p = records
                .iter()
                .map(|r| r.location[0])
                .min_by(|a, b| {
                    (a - limit).abs().partial_cmp(&(b - limit).abs()).expect("finite distances")
                })
                .context("no scanned fixed point inside the certified region")?;
            let mut ledger = banach_ledger(&trace, cert.k_hat, &[p])?;
            ledger.p_source = "oracle-scan".to_string();
            let clean = ledger.is_clean();
            let summary = json!({
                "family": family,
                "x0": x0,
                "tol": tol,
                "max_iter": max_iter,
                "converged": trace.converged,
                "steps": trace.steps,
                "limit": limit,
                "rate": rate,
                "certificate": serde_json::to_value(&cert)?,
                "fixed_point": p,
                "ledger": serde_json::to_value(&ledger)?,
                "clean": clean,
            });
            (ledger.to_csv(&trace), summary, clean)
        }
        None => {
            let summary = json!({
                "family": family,
                "x0": x0,
                "tol": tol,
                "max_iter": max_iter,
                "converged": trace.converged,
                "steps": trace.steps,
                "limit": limit,
                "rate": rate,
                "certificate": null,
                "fixed_point": null,
                "ledger": null,
                "clean": true,
            });
            (trace.to_csv(), summary, true)
        }
    };

    println!(
        "limit {limit:.12} after {} steps (converged: {}, ledger clean: {clean})",
        trace.steps, trace.converged
    );
    save(&out.join("iterate.csv"), &csv)?;
    save(&out.join("iterate.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(clean)
}

fn robust_cmd(
    family: Family,
    m: f64,
    seed: u64,
    steps: usize,
    x0: f64,
    out: &Path,
) -> Result<bool> {
    let map = reduced_map(family);
    let noise = NoiseModel::new(m, seed)?;
    let trace = perturbed_iterate(map.as_vector_map(), &[x0], &noise, steps)?;
    let final_x = trace.last()[0];

    let window = interval_from(None, figures::family_window(family))?;
    let records = scan_fixed_points_1d(&map.f, &window, SCAN_POINTS, SCAN_TOL)?;
    let p = records
        .iter()
        .filter(|r| r.attracting)
        .map(|r| r.location[0])
        .min_by(|a, b| {
            (a - final_x).abs().partial_cmp(&(b - final_x).abs()).expect("finite distances")
        })
        .context("no attracting fixed point found for the reference")?;
    let region = map
        .regions
        .iter()
        .find(|r| r.contains(p))
        .context("the perturbed run settled outside every certified region")?;
    let k = match region.k {
        Some(k) => k,
        None => certify_contraction_scalar(&map.f, &region.region(), CERT_GRID)?.k_hat,
    };

    let report = verify_robust(&trace, &[p], k, m)?;
    let clean = report.is_clean();
    println!(
        "final error {:.6e} after {steps} steps at amplitude {:.3e} (bounds clean: {clean})",
        report.final_err,
        noise.amplitude()
    );
    let summary = json!({
        "family": family,
        "m": m,
        "seed": seed,
        "steps": steps,
        "x0": x0,
        "k": k,
        "fixed_point": p,
        "report": serde_json::to_value(&report)?,
        "clean": clean,
    });
    save(&out.join("robust.csv"), &trace.to_csv())?;
    save(&out.join("robust.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(clean)
}

fn construct_cmd(family: Family, kind: Kind, dim: usize, m: f64, out: &Path) -> Result<bool> {
    let (network, spec) = match kind {
        Kind::Coupled => {
            let spec = CaseStudySpec::new(family, dim, m)?;
            let network = build_coupled_network(family, dim, m)?;
            (network, Some(spec))
        }
        Kind::Dummy => {
            if dim != 3 {
                bail!("the dummy recipe is three-dimensional; drop --dim or pass 3");
            }
            (build_dummy_network(family), None)
        }
        Kind::Ddim => {
            if family != Family::Exponential {
                bail!("the ddim recipe applies to the exp family only");
            }
            (build_ddim_exp_network(dim)?, None)
        }
    };
    let summary = json!({
        "kind": format!("{kind:?}").to_lowercase(),
        "family": family,
        "dim": network.d,
        "m": if kind == Kind::Coupled { Some(m) } else { None },
        "spec": spec.map(|s| serde_json::to_value(s)).transpose()?,
        "network": network.to_json(),
    });
    let rendered = serde_json::to_string_pretty(&summary)?;
    println!("{rendered}");
    save(&out.join("construct.json"), &rendered)?;
    Ok(true)
}

fn enumerate_cmd(family: Family, dim: usize, m: f64, out: &Path) -> Result<bool> {
    let spec = CaseStudySpec::new(family, dim, m)?;
    let network = build_coupled_network(family, dim, m)?;
    let candidates = enumerate_fixed_points(&spec)?;

    let mut csv = String::from("index");
    for j in 1..=dim {
        let _ = write!(csv, ",x{j}");
    }
    csv.push_str(",residual\n");
    let mut rows_json = Vec::new();
    for (i, point) in candidates.iter().enumerate() {
        let residual = inf_norm_diff(&network.apply(point), point);
        let _ = write!(csv, "{i}");
        for v in point {
            let _ = write!(csv, ",{}", csv_float(*v));
        }
        let _ = writeln!(csv, ",{}", csv_float(residual));
        println!(
            "{i}: [{}] residual {residual:.3e}",
            point.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
        );
        rows_json.push(json!({ "location": point, "residual": residual }));
    }

    let summary = json!({
        "spec": serde_json::to_value(&spec)?,
        "count": candidates.len(),
        "candidates": rows_json,
    });
    save(&out.join("enumerate.csv"), &csv)?;
    save(&out.join("enumerate.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(true)
}

#[allow(clippy::too_many_arguments)]
fn oracle_cmd(
    family: Family,
    dim: usize,
    region: Option<Vec<f64>>,
    grid: Option<usize>,
    tol: Option<f64>,
    m: f64,
    textbook: bool,
    out: &Path,
) -> Result<bool> {
    if textbook {
        let report = textbook_examples_check();
        let verdict = if report.consistent { "consistent" } else { "inconsistent" };
        println!("textbook cases: {verdict}");
        save(&out.join("oracle.json"), &report.to_json())?;
        return Ok(report.consistent);
    }

    let (mode, records, search) = match dim {
        1 => {
            let map = reduced_map(family);
            let window = interval_from(region, figures::family_window(family))?;
            let n = grid.unwrap_or(SCAN_POINTS);
            let tol = tol.unwrap_or(SCAN_TOL);
            let records = scan_fixed_points_1d(&map.f, &window, n, tol)?;
            ("scan", records, json!({ "region": [window.lower[0], window.upper[0]], "grid": n, "tol": tol }))
        }
        2 | 3 => {
            let network = build_coupled_network(family, dim, m)?;
            let (lo, hi) = match region {
                Some(pair) => (pair[0], pair[1]),
                None => (-0.5, 1.6),
            };
            let region_box = RegionBox::new(vec![lo; dim], vec![hi; dim])?;
            let n = grid.unwrap_or(if dim == 2 { 300 } else { 71 });
            let tol = tol.unwrap_or(0.05);
            let records = grid_fixed_points(|x| network.apply(x), &region_box, n, tol)?;
            ("grid", records, json!({ "region": [lo, hi], "grid": n, "tol": tol, "m": m }))
        }
        other => bail!("the oracle handles dimensions 1 through 3, got {other}"),
    };

    for r in &records {
        let kind = if r.attracting { "attracting" } else { "repelling" };
        println!(
            "[{}] residual {:.3e} {kind}",
            r.location.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", "),
            r.residual
        );
    }
    let summary = json!({
        "mode": mode,
        "family": family,
        "dim": dim,
        "search": search,
        "count": records.len(),
        "records": serde_json::to_value(&records)?,
    });
    save(&out.join("oracle.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(true)
}
