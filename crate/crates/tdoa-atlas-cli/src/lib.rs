//! Command-line front end over `tdoa-atlas-core`.
//!
//! Subcommands emit single-line JSON verdicts (`classify-tau`, `locate`,
//! `mle-locate`, `forward`) or CSV files (`image-report`, `x-atlas`,
//! `bifurcation`) suitable for plotting and downstream analysis.
//!
//! Output conventions, chosen for bit-exact golden-file testing:
//! - every floating-point value is printed with 17 significant digits
//!   (`{:.16e}`), which round-trips `f64` exactly; `-0.0` is normalized to
//!   `0.0`, undefined values print as `nan` in CSV and `null` in JSON;
//! - CSV uses `.` as the decimal mark, `,` as the separator, Unix newlines,
//!   and a mandatory header row;
//! - grids are written row-major: the y (or τ₂) coordinate varies in the
//!   outer loop, ascending, and x (or τ₁) in the inner loop, ascending;
//! - region, rank, and branch names are the stable snake_case strings
//!   defined by the core enums.
//!
//! Grid sweeps fan out over rows via rayon; the environment variable
//! `TDOA_ATLAS_THREADS` caps the worker count. Row order in the output is
//! fixed regardless of the execution schedule, so every command is
//! deterministic given identical arguments (including `--seed`).
//!
//! Exit status is 0 on success and 2 on any bad input: unreadable or
//! malformed config, invalid flag values, or output I/O failure.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use tdoa_atlas_core::{
    at_sensor_band, bifurcation_samples, build_config, classify_tau, classify_x, coeff_a, coeff_b,
    coeff_c, default_tau_tol, det_jacobian, discriminant, implicitize_quintic, locate, locate_star,
    project_to_h, rank_at, synthesize_noisy, tau2_star, FiberPoint, FiberResult, GeometryClass,
    Point2, SensorConfig, TauPair, TauTriple, ON_PLANE_TOL_DEFAULT,
};
use tdoa_atlas_core::bifurcation::GUARD_DEFAULT;
use tdoa_atlas_core::sensor_config::DEFAULT_REL_TOL;

/// Guard used for the `--implicitize` fit, tighter than the CSV default:
/// samples too close to the parametrization's blow-up parameters carry huge
/// plane coordinates that would dominate the least-squares system.
pub const FIT_GUARD: f64 = 1e-3;

/// A user-facing failure; `main` prints it and exits with status 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

fn err(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

/// 17-significant-digit decimal form of `v`: exact `f64` round-trip.
pub fn fmt_f(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let v = if v == 0.0 { 0.0 } else { v }; // fold -0.0 into 0.0
    format!("{v:.16e}")
}

/// JSON value for a float: a plain number, or `null` when not finite
/// (JSON has no nan/inf literals).
fn json_f(v: f64) -> String {
    if v.is_finite() {
        fmt_f(v)
    } else {
        "null".to_string()
    }
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

/// On-disk sensor configuration:
/// `{"m0":[x,y],"m1":[x,y],"m2":[x,y],"rel_tol":1e-9}` with `rel_tol`
/// optional. Unknown fields are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    m0: [f64; 2],
    m1: [f64; 2],
    m2: [f64; 2],
    #[serde(default)]
    rel_tol: Option<f64>,
}

pub fn load_config(path: &Path) -> Result<SensorConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| err(format!("cannot read config {}: {e}", path.display())))?;
    let parsed: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| err(format!("malformed config {}: {e}", path.display())))?;
    for (name, m) in [("m0", parsed.m0), ("m1", parsed.m1), ("m2", parsed.m2)] {
        if !m[0].is_finite() || !m[1].is_finite() {
            return Err(err(format!("config field {name} must be finite")));
        }
    }
    let rel_tol = parsed.rel_tol.unwrap_or(DEFAULT_REL_TOL);
    if !rel_tol.is_finite() {
        return Err(err("config field rel_tol must be finite"));
    }
    build_config(
        Point2::new(parsed.m0[0], parsed.m0[1]),
        Point2::new(parsed.m1[0], parsed.m1[1]),
        Point2::new(parsed.m2[0], parsed.m2[1]),
        rel_tol,
    )
    .map_err(|e| err(format!("invalid sensor configuration: {e}")))
}

// ---------------------------------------------------------------------------
// Command line
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "tdoa-atlas",
    version,
    about = "Planar three-receiver TDOA maps: classification, closed-form localization, \
             and locus exports"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Classify a TDOA pair: region, fiber count, quadratic coefficients.
    ClassifyTau {
        /// JSON sensor configuration file.
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Measurement pair "tau1,tau2".
        #[arg(long, value_name = "A,B", allow_hyphen_values = true, value_parser = parse_pair)]
        tau: Pair,
    },
    /// CSV grid over the measurement plane: region and fiber count per node.
    ImageReport {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Nodes per axis (≥ 2); endpoints are included.
        #[arg(long, value_name = "N")]
        grid: usize,
        /// τ₁ range start.
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        xmin: f64,
        /// τ₁ range end.
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        xmax: f64,
        /// τ₂ range start.
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        ymin: f64,
        /// τ₂ range end.
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        ymax: f64,
        /// Output file (standard output when omitted).
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// CSV grid over the source plane: Jacobian determinant, rank, region.
    XAtlas {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Nodes per axis (≥ 2); endpoints are included.
        #[arg(long, value_name = "N")]
        grid: usize,
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        xmin: f64,
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        xmax: f64,
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        ymin: f64,
        #[arg(long, value_name = "V", allow_negative_numbers = true)]
        ymax: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Invert a TDOA pair: JSON list of compatible source positions.
    Locate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Measurement pair "tau1,tau2".
        #[arg(long, value_name = "A,B", allow_hyphen_values = true, value_parser = parse_pair)]
        tau: Pair,
    },
    /// Project a noisy TDOA triple onto the feasible plane, then invert.
    MleLocate {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Measurement triple "tau10,tau20,tau21".
        #[arg(long, value_name = "A,B,C", allow_hyphen_values = true, value_parser = parse_triple)]
        taustar: Triple,
    },
    /// Forward map: the TDOA triple of a source, optionally with noise.
    Forward {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Source position "x,y".
        #[arg(long, value_name = "A,B", allow_hyphen_values = true, value_parser = parse_pair)]
        x: Pair,
        /// Gaussian noise standard deviation per component (default: none).
        #[arg(long, value_name = "SIGMA")]
        noise: Option<f64>,
        /// RNG seed for --noise (default 0).
        #[arg(long, value_name = "N", default_value_t = 0)]
        seed: u64,
    },
    /// CSV samples of the bifurcation curve; optional implicit quintic fit.
    Bifurcation {
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
        /// Ellipse sample count before in-image filtering (≥ 8).
        #[arg(long, value_name = "N", default_value_t = 512)]
        samples: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Also fit the implicit degree-5 polynomial and print it as JSON.
        #[arg(long)]
        implicitize: bool,
    },
}

type Pair = (f64, f64);
type Triple = (f64, f64, f64);

fn parse_components(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {:?}", s));
    }
    let mut out = Vec::with_capacity(n);
    for p in parts {
        let v: f64 = p
            .trim()
            .parse()
            .map_err(|_| format!("invalid number {:?}", p.trim()))?;
        if !v.is_finite() {
            return Err(format!("component {:?} must be finite", p.trim()));
        }
        out.push(v);
    }
    Ok(out)
}

fn parse_pair(s: &str) -> Result<Pair, String> {
    let v = parse_components(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_triple(s: &str) -> Result<Triple, String> {
    let v = parse_components(s, 3)?;
    Ok((v[0], v[1], v[2]))
}

// ---------------------------------------------------------------------------
// Grids and output plumbing
// ---------------------------------------------------------------------------

struct Grid {
    n: usize,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
}

impl Grid {
    fn new(n: usize, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Grid, CliError> {
        if n < 2 {
            return Err(err("--grid must be at least 2"));
        }
        for v in [xmin, xmax, ymin, ymax] {
            if !v.is_finite() {
                return Err(err("grid ranges must be finite"));
            }
        }
        if xmax <= xmin || ymax <= ymin {
            return Err(err("grid ranges must be nonempty (max > min)"));
        }
        Ok(Grid { n, xmin, xmax, ymin, ymax })
    }

    fn xcoord(&self, i: usize) -> f64 {
        self.xmin + (self.xmax - self.xmin) * i as f64 / (self.n - 1) as f64
    }

    fn ycoord(&self, j: usize) -> f64 {
        self.ymin + (self.ymax - self.ymin) * j as f64 / (self.n - 1) as f64
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("TDOA_ATLAS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                err(format!("TDOA_ATLAS_THREADS must be a positive integer, got {v:?}"))
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| err(format!("cannot build thread pool: {e}")))?;
    }
    Ok(())
}

fn write_out(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, content)
            .map_err(|e| err(format!("cannot write {}: {e}", p.display()))),
        None => {
            io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| err(format!("cannot write to standard output: {e}")))
        }
    }
}

/// Compute grid rows in parallel, emit them in fixed row-major order.
fn sweep_rows(n: usize, row: impl Fn(usize) -> String + Sync + Send) -> String {
    let rows: Vec<String> = (0..n).into_par_iter().map(row).collect();
    rows.concat()
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn json_point_list(pts: &[FiberPoint]) -> String {
    let mut s = String::from("[");
    for (k, p) in pts.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        s.push_str(&format!("[{},{}]", fmt_f(p.x.x()), fmt_f(p.x.y())));
    }
    s.push(']');
    s
}

/// `"points":[...]` or `"half_line":{...}` — the two fiber shapes.
fn json_fiber_field(fiber: &FiberResult) -> String {
    match fiber {
        FiberResult::Points(pts) => format!("\"points\":{}", json_point_list(pts)),
        FiberResult::HalfLine { base, direction } => format!(
            "\"half_line\":{{\"base\":[{},{}],\"direction\":[{},{}]}}",
            fmt_f(base.x()),
            fmt_f(base.y()),
            fmt_f(direction.x()),
            fmt_f(direction.y())
        ),
    }
}

fn cmd_classify_tau(cfg: &SensorConfig, tau: TauPair) -> Result<(), CliError> {
    let label = classify_tau(cfg, tau, default_tau_tol(cfg));
    let coeffs = match cfg.geometry_class {
        GeometryClass::General => format!(
            "\"a\":{},\"b\":{},\"c\":{},\"delta\":{}",
            json_f(coeff_a(cfg, tau)),
            json_f(coeff_b(cfg, tau)),
            json_f(coeff_c(cfg, tau)),
            json_f(discriminant(cfg, tau))
        ),
        // The general-position quadratic coefficients are undefined for a
        // collinear array (the inversion degenerates to a different normal
        // form); region and fiber count remain meaningful.
        GeometryClass::Collinear { .. } => {
            "\"a\":null,\"b\":null,\"c\":null,\"delta\":null".to_string()
        }
    };
    println!(
        "{{\"region\":\"{}\",\"fiber_count\":\"{}\",{}}}",
        label.as_str(),
        label.fiber_count().as_str(),
        coeffs
    );
    Ok(())
}

fn cmd_image_report(cfg: &SensorConfig, grid: &Grid, out: &Option<PathBuf>) -> Result<(), CliError> {
    let tol = default_tau_tol(cfg);
    let body = sweep_rows(grid.n, |j| {
        let t2 = grid.ycoord(j);
        let mut row = String::new();
        for i in 0..grid.n {
            let t1 = grid.xcoord(i);
            let label = classify_tau(cfg, TauPair::new(t1, t2), tol);
            row.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f(t1),
                fmt_f(t2),
                label.as_str(),
                label.fiber_count().as_str()
            ));
        }
        row
    });
    write_out(out, &format!("tau1,tau2,region,fibers\n{body}"))
}

fn cmd_x_atlas(cfg: &SensorConfig, grid: &Grid, out: &Option<PathBuf>) -> Result<(), CliError> {
    let band = at_sensor_band(cfg);
    let body = sweep_rows(grid.n, |j| {
        let y = grid.ycoord(j);
        let mut row = String::new();
        for i in 0..grid.n {
            let x = grid.xcoord(i);
            let p = Point2::new(x, y);
            let det = match det_jacobian(cfg, p) {
                Ok(d) => fmt_f(d),
                Err(_) => "nan".to_string(),
            };
            row.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_f(x),
                fmt_f(y),
                det,
                rank_at(cfg, p, band).as_str(),
                classify_x(cfg, p).as_str()
            ));
        }
        row
    });
    write_out(out, &format!("x,y,detJ,rank,region\n{body}"))
}

fn cmd_locate(cfg: &SensorConfig, tau: TauPair) -> Result<(), CliError> {
    match locate(cfg, tau) {
        FiberResult::Points(pts) => println!("{}", json_point_list(&pts)),
        half_line => println!("{{{}}}", json_fiber_field(&half_line)),
    }
    Ok(())
}

fn cmd_mle_locate(cfg: &SensorConfig, t: TauTriple) -> Result<(), CliError> {
    let projected = project_to_h(t);
    let fiber = locate_star(cfg, projected, ON_PLANE_TOL_DEFAULT)
        .map_err(|e| err(format!("projection failed to reach the feasible plane: {e}")))?;
    println!(
        "{{\"projected\":[{},{},{}],{}}}",
        fmt_f(projected.tau10),
        fmt_f(projected.tau20),
        fmt_f(projected.tau21),
        json_fiber_field(&fiber)
    );
    Ok(())
}

fn cmd_forward(
    cfg: &SensorConfig,
    x: Point2,
    noise: Option<f64>,
    seed: u64,
) -> Result<(), CliError> {
    let t = match noise {
        None => tau2_star(cfg, x),
        Some(sigma) => {
            if !(sigma >= 0.0) || !sigma.is_finite() {
                return Err(err("--noise must be a finite value ≥ 0"));
            }
            synthesize_noisy(cfg, x, sigma, seed).tau_star
        }
    };
    println!("[{},{},{}]", fmt_f(t.tau10), fmt_f(t.tau20), fmt_f(t.tau21));
    Ok(())
}

fn cmd_bifurcation(
    cfg: &SensorConfig,
    samples: usize,
    out: &Option<PathBuf>,
    implicitize: bool,
) -> Result<(), CliError> {
    if !matches!(cfg.geometry_class, GeometryClass::General) {
        return Err(err(
            "bifurcation requires a general-position (non-collinear) array",
        ));
    }
    if samples < 8 {
        return Err(err("--samples must be at least 8"));
    }
    let run = bifurcation_samples(cfg, samples, GUARD_DEFAULT);
    let mut body = String::from("mu,tau1,tau2,x,y,branch\n");
    for s in &run.samples {
        body.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f(s.mu),
            fmt_f(s.tau_on_e.tau1),
            fmt_f(s.tau_on_e.tau2),
            fmt_f(s.x.x()),
            fmt_f(s.x.y()),
            s.branch.as_str()
        ));
    }
    write_out(out, &body)?;
    if implicitize {
        let fit_run = bifurcation_samples(cfg, samples, FIT_GUARD);
        if fit_run.samples.len() < 63 {
            return Err(err(format!(
                "implicitization needs at least 63 retained samples, got {}; increase --samples",
                fit_run.samples.len()
            )));
        }
        let fit = implicitize_quintic(cfg, &fit_run.samples)
            .map_err(|e| err(format!("implicitization failed: {e}")))?;
        let coeffs: Vec<String> = fit.coeffs.iter().map(|&c| fmt_f(c)).collect();
        println!(
            "{{\"coeffs\":[{}],\"max_heldout\":{},\"rms_heldout\":{}}}",
            coeffs.join(","),
            fmt_f(fit.max_heldout),
            fmt_f(fit.rms_heldout)
        );
    }
    Ok(())
}

/// Entry point shared by `main` and tests.
pub fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.cmd {
        Cmd::ClassifyTau { config, tau } => {
            let cfg = load_config(&config)?;
            cmd_classify_tau(&cfg, TauPair::new(tau.0, tau.1))
        }
        Cmd::ImageReport { config, grid, xmin, xmax, ymin, ymax, out } => {
            let cfg = load_config(&config)?;
            let grid = Grid::new(grid, xmin, xmax, ymin, ymax)?;
            cmd_image_report(&cfg, &grid, &out)
        }
        Cmd::XAtlas { config, grid, xmin, xmax, ymin, ymax, out } => {
            let cfg = load_config(&config)?;
            let grid = Grid::new(grid, xmin, xmax, ymin, ymax)?;
            cmd_x_atlas(&cfg, &grid, &out)
        }
        Cmd::Locate { config, tau } => {
            let cfg = load_config(&config)?;
            cmd_locate(&cfg, TauPair::new(tau.0, tau.1))
        }
        Cmd::MleLocate { config, taustar } => {
            let cfg = load_config(&config)?;
            cmd_mle_locate(&cfg, TauTriple::new(taustar.0, taustar.1, taustar.2))
        }
        Cmd::Forward { config, x, noise, seed } => {
            let cfg = load_config(&config)?;
            cmd_forward(&cfg, Point2::new(x.0, x.1), noise, seed)
        }
        Cmd::Bifurcation { config, samples, out, implicitize } => {
            let cfg = load_config(&config)?;
            cmd_bifurcation(&cfg, samples, &out, implicitize)
        }
    }
}
