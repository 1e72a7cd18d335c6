//! Command-line front end: builds representations from presets or config
//! files, writes error-map CSVs against the independent reference oracles,
//! reports local-expansion length estimates, and round-trips Fourier
//! extensions and representations as JSON.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qb2x::expansion::{
    build_dlp, build_slp, estimate_qbx_terms, Density, PotentialKind, Qb2xOptions,
    Qb2xRepresentation,
};
use qb2x::fourier_ext::{fit_fourier_extension, RealPolynomial, DEFAULT_SVD_CUTOFF};
use qb2x::geometry::{BoundaryCurve, LeafBox};
use qb2x::oracle::{oracle_adaptive, oracle_dlp_straight};

/// Oracle tolerance used for the reference column of error maps.
const ORACLE_TOL: f64 = 1e-13;
/// Grid points closer to the curve than this are dropped from error maps.
const CURVE_CLEARANCE: f64 = 1e-3;
/// Floor applied to absolute errors before taking log10, so the CSV stays
/// finite when both sides are exactly zero.
const LOG_FLOOR: f64 = 1e-300;

#[derive(Parser)]
#[command(
    name = "qb2x",
    version,
    about = "Local Taylor + plane-wave evaluation of 2D Laplace layer potentials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a representation and write a CSV error map against the oracle.
    ErrorMap {
        /// Compiled-in experiment name (see --preset list).
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Path to a JSON experiment config.
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV output path (overrides the config's `out` field).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid resolution N for the N x N evaluation grid.
        #[arg(long)]
        grid: Option<usize>,
        /// Local expansion length override.
        #[arg(long = "K")]
        k: Option<usize>,
        /// Fourier extension max frequency override.
        #[arg(long = "P")]
        p: Option<usize>,
        /// Target accuracy (drives automatic K selection).
        #[arg(long)]
        eps: Option<f64>,
        /// Also write the built representation as JSON for later `eval` calls.
        #[arg(long)]
        rep_out: Option<PathBuf>,
    },
    /// Estimate the Taylor length N needed to re-expand e^{ipw} to eps.
    Kn {
        /// Wave number p (must be >= 0).
        #[arg(allow_hyphen_values = true)]
        p: i64,
        /// Target accuracy.
        #[arg(long, default_value_t = 1e-16)]
        eps: f64,
        /// Emit a p,N CSV for p = 0..=P instead of a single value.
        #[arg(long)]
        sweep: bool,
    },
    /// Fit a Fourier extension of a density and write it as JSON.
    Extend {
        /// Density: "cos", "expcos", "zero", or inline JSON
        /// like {"poly":{"basis":"chebyshev","coefficients":[1,0.5,0.25]}}.
        #[arg(long)]
        density: String,
        /// Maximum frequency P.
        #[arg(long = "P")]
        p: usize,
        /// Output path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a previously saved representation at one point.
    Eval {
        /// Path to a representation JSON written by error-map --rep-out.
        #[arg(long)]
        rep: PathBuf,
        /// Target x coordinate.
        #[arg(short = 'x', long, allow_hyphen_values = true)]
        x: f64,
        /// Target y coordinate.
        #[arg(short = 'y', long, allow_hyphen_values = true)]
        y: f64,
    },
}

/// One experiment: which potential, over which curve and box, with which
/// density and expansion parameters, evaluated on which grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: PotentialKind,
    pub density: Density,
    /// Monomial coefficients of the height function s(x).
    pub curve: Vec<f64>,
    pub box_center: [f64; 2],
    pub box_hx: f64,
    pub box_hy: f64,
    #[serde(rename = "P")]
    pub max_freq: usize,
    /// Local expansion length; omit for automatic selection from eps.
    #[serde(rename = "K", default)]
    pub local_terms: Option<usize>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Default CSV output path; the --out flag overrides it.
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn default_eps() -> f64 {
    1e-12
}

fn default_grid() -> usize {
    51
}

/// Summary statistics printed to stdout after an error map.
#[derive(Serialize)]
struct Summary {
    max_log10_err: f64,
    median_log10_err: f64,
    #[serde(rename = "K")]
    local_terms: usize,
    #[serde(rename = "P")]
    max_freq: usize,
    r_max_upper: f64,
    r_max_lower: f64,
    points: usize,
}

enum CliError {
    /// Building or evaluating a representation failed (exit 2).
    Build(String),
    /// Reading or writing a file failed (exit 3).
    Io(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Build(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Io(msg) => {
                eprintln!("i/o error: {msg}");
                ExitCode::from(3)
            }
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Io(format!("{context}: {e}"))
}

const PRESET_NAMES: &[&str] = &[
    "zero", "fig5a", "fig5b", "fig5c", "fig5d", "fig6k9", "fig6k18", "fig6k27", "fig6k36",
    "fig7l", "fig7r", "fig8a", "fig8b", "fig8c", "fig8d", "fig9k9", "fig9k18", "fig9k27",
    "fig9k36", "fig10l", "fig10r",
];

/// The reference density (2x^2 + 2x + 3)/4 in the Chebyshev basis.
fn reference_density() -> Density {
    Density::Poly(RealPolynomial::chebyshev(vec![1.0, 0.5, 0.25]))
}

/// The cubic reference density (4x^3 + 4x^2 + x + 6)/8 in the Chebyshev basis.
fn cubic_density() -> Density {
    Density::Poly(RealPolynomial::chebyshev(vec![1.0, 0.5, 0.25, 0.125]))
}

fn straight_curve() -> Vec<f64> {
    vec![0.0]
}

/// s(x) = -x^2/10.
fn quadratic_curve() -> Vec<f64> {
    vec![0.0, 0.0, -0.1]
}

/// s(x) = -x^2/10 - x^4/10.
fn quartic_curve() -> Vec<f64> {
    vec![0.0, 0.0, -0.1, 0.0, -0.1]
}

fn base_config(kind: PotentialKind, density: Density, curve: Vec<f64>, p: usize, k: usize) -> ExperimentConfig {
    ExperimentConfig {
        kind,
        density,
        curve,
        box_center: [0.0, -1.0 / 3.0],
        box_hx: 1.0 / 3.0,
        box_hy: 1.0 / 3.0,
        max_freq: p,
        local_terms: Some(k),
        eps: default_eps(),
        grid: default_grid(),
        out: None,
    }
}

/// Compiled-in experiment presets, one per reference figure.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    use PotentialKind::{Dlp, Slp};
    let cfg = match name {
        "zero" => base_config(
            Dlp,
            Density::Poly(RealPolynomial::zero()),
            straight_curve(),
            8,
            9,
        ),
        "fig5a" => base_config(Dlp, Density::Cos, straight_curve(), 1, 40),
        "fig5b" => base_config(Dlp, Density::ExpCos, straight_curve(), 20, 40),
        "fig5c" => base_config(Dlp, reference_density(), straight_curve(), 30, 40),
        "fig5d" => base_config(Dlp, cubic_density(), straight_curve(), 30, 40),
        "fig6k9" => base_config(Dlp, reference_density(), straight_curve(), 30, 9),
        "fig6k18" => base_config(Dlp, reference_density(), straight_curve(), 30, 18),
        "fig6k27" => base_config(Dlp, reference_density(), straight_curve(), 30, 27),
        "fig6k36" => base_config(Dlp, reference_density(), straight_curve(), 30, 36),
        "fig7l" => base_config(Dlp, reference_density(), quadratic_curve(), 30, 40),
        "fig7r" => base_config(Dlp, reference_density(), quartic_curve(), 30, 50),
        "fig8a" => base_config(Slp, Density::Cos, straight_curve(), 1, 40),
        "fig8b" => base_config(Slp, Density::ExpCos, straight_curve(), 20, 40),
        "fig8c" => base_config(Slp, reference_density(), straight_curve(), 30, 40),
        "fig8d" => base_config(Slp, cubic_density(), straight_curve(), 30, 40),
        "fig9k9" => base_config(Slp, reference_density(), straight_curve(), 30, 9),
        "fig9k18" => base_config(Slp, reference_density(), straight_curve(), 30, 18),
        "fig9k27" => base_config(Slp, reference_density(), straight_curve(), 30, 27),
        "fig9k36" => base_config(Slp, reference_density(), straight_curve(), 30, 36),
        "fig10l" => base_config(Slp, reference_density(), quadratic_curve(), 30, 18),
        "fig10r" => base_config(Slp, reference_density(), quadratic_curve(), 30, 36),
        _ => return None,
    };
    Some(cfg)
}

/// Parse a density flag value: a named density or inline JSON.
fn parse_density(value: &str) -> CliResult<Density> {
    match value {
        "cos" => Ok(Density::Cos),
        "expcos" => Ok(Density::ExpCos),
        "zero" => Ok(Density::Poly(RealPolynomial::zero())),
        other => serde_json::from_str(other).map_err(|e| {
            CliError::Build(format!(
                "unrecognized density {other:?} (expected cos, expcos, zero, or JSON): {e}"
            ))
        }),
    }
}

/// Build the representation an experiment config describes.
pub fn build_representation(cfg: &ExperimentConfig) -> qb2x::Result<Qb2xRepresentation> {
    let curve = BoundaryCurve::new(RealPolynomial::monomial(cfg.curve.clone()))?;
    let leaf = LeafBox::new(
        Complex64::new(cfg.box_center[0], cfg.box_center[1]),
        cfg.box_hx,
        cfg.box_hy,
    );
    let opts = Qb2xOptions { k_override: cfg.local_terms, ..Qb2xOptions::default() };
    match cfg.kind {
        PotentialKind::Dlp => build_dlp(&cfg.density, &curve, &leaf, cfg.max_freq, cfg.eps, &opts),
        PotentialKind::Slp => build_slp(&cfg.density, &curve, &leaf, cfg.max_freq, cfg.eps, &opts),
    }
}

/// Reference value at one target: closed-form straight-segment formula when
/// it applies, adaptive quadrature otherwise.
fn reference_value(cfg: &ExperimentConfig, rep: &Qb2xRepresentation, w: Complex64) -> qb2x::Result<f64> {
    if let (PotentialKind::Dlp, Density::Poly(p), true) =
        (cfg.kind, &cfg.density, rep.curve.is_straight())
    {
        return Ok(oracle_dlp_straight(p, w)?.value);
    }
    Ok(oracle_adaptive(cfg.kind, &cfg.density, &rep.curve, w, ORACLE_TOL)?.value)
}

/// Grid targets over the box, clipped to stay clear of the curve.
fn grid_points(cfg: &ExperimentConfig, curve: &BoundaryCurve) -> Vec<Complex64> {
    let n = cfg.grid.max(2);
    let coord = |c: f64, h: f64, j: usize| c - h + 2.0 * h * j as f64 / (n - 1) as f64;
    let mut points = Vec::new();
    for jy in 0..n {
        let y = coord(cfg.box_center[1], cfg.box_hy, jy);
        for jx in 0..n {
            let x = coord(cfg.box_center[0], cfg.box_hx, jx);
            if curve.height(x) - y >= CURVE_CLEARANCE {
                points.push(Complex64::new(x, y));
            }
        }
    }
    points
}

/// 17-significant-digit scientific formatting; fixed so identical configs
/// produce byte-identical CSVs.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_error_map(cfg: &ExperimentConfig, out: Option<PathBuf>, rep_out: Option<PathBuf>) -> CliResult<()> {
    let rep = build_representation(cfg).map_err(|e| CliError::Build(e.to_string()))?;
    if let Some(path) = rep_out {
        let json = serde_json::to_string_pretty(&rep)
            .map_err(io_err("serializing representation"))?;
        std::fs::write(&path, json).map_err(io_err(&format!("writing {}", path.display())))?;
    }

    let points = grid_points(cfg, &rep.curve);
    let rows: Vec<(Complex64, f64, f64)> = points
        .par_iter()
        .map(|&w| -> qb2x::Result<(Complex64, f64, f64)> {
            let got = rep.eval(w)?;
            let want = reference_value(cfg, &rep, w)?;
            Ok((w, got, want))
        })
        .collect::<qb2x::Result<_>>()
        .map_err(|e| CliError::Build(e.to_string()))?;

    let out_path = out
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| CliError::Build("no output path: pass --out or set \"out\" in the config".into()))?;
    let mut csv = String::with_capacity(rows.len() * 128);
    csv.push_str("x,y,qb2x,reference,abs_err,log10_err\n");
    let mut log_errs = Vec::with_capacity(rows.len());
    for &(w, got, want) in &rows {
        let abs_err = (got - want).abs();
        let log10_err = abs_err.max(LOG_FLOOR).log10();
        log_errs.push(log10_err);
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt17(w.re),
            fmt17(w.im),
            fmt17(got),
            fmt17(want),
            fmt17(abs_err),
            fmt17(log10_err),
        ));
    }
    std::fs::write(&out_path, csv).map_err(io_err(&format!("writing {}", out_path.display())))?;

    log_errs.sort_by(f64::total_cmp);
    let median = if log_errs.is_empty() {
        f64::NAN
    } else if log_errs.len() % 2 == 1 {
        log_errs[log_errs.len() / 2]
    } else {
        0.5 * (log_errs[log_errs.len() / 2 - 1] + log_errs[log_errs.len() / 2])
    };
    let summary = Summary {
        max_log10_err: log_errs.last().copied().unwrap_or(f64::NAN),
        median_log10_err: median,
        local_terms: rep.local_terms,
        max_freq: rep.max_freq,
        r_max_upper: rep.r_max_upper,
        r_max_lower: rep.r_max_lower,
        points: rows.len(),
    };
    let json = serde_json::to_string(&summary).map_err(io_err("serializing summary"))?;
    println!("{json}");
    Ok(())
}

fn cmd_kn(p: i64, eps: f64, sweep: bool) -> CliResult<()> {
    if p < 0 {
        return Err(CliError::Build(format!("p must be non-negative, got {p}")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Build(format!("eps must be in (0, 1), got {eps}")));
    }
    if sweep {
        let mut out = String::from("p,N\n");
        for q in 0..=p as usize {
            out.push_str(&format!("{q},{}\n", estimate_qbx_terms(q, eps)));
        }
        print!("{out}");
    } else {
        println!("N = {}", estimate_qbx_terms(p as usize, eps));
    }
    Ok(())
}

fn cmd_extend(density: &str, p: usize, out: Option<PathBuf>) -> CliResult<()> {
    let density = parse_density(density)?;
    let ext = fit_fourier_extension(|x| density.eval(x), p, DEFAULT_SVD_CUTOFF)
        .map_err(|e| CliError::Build(e.to_string()))?;
    let json = serde_json::to_string_pretty(&ext).map_err(io_err("serializing extension"))?;
    match out {
        Some(path) => std::fs::write(&path, json)
            .map_err(io_err(&format!("writing {}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_eval(rep_path: &PathBuf, x: f64, y: f64) -> CliResult<()> {
    let data = std::fs::read_to_string(rep_path)
        .map_err(io_err(&format!("reading {}", rep_path.display())))?;
    let rep: Qb2xRepresentation =
        serde_json::from_str(&data).map_err(io_err(&format!("parsing {}", rep_path.display())))?;
    let value = rep
        .eval(Complex64::new(x, y))
        .map_err(|e| CliError::Build(e.to_string()))?;
    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "{{\"x\":{},\"y\":{},\"value\":{}}}",
        serde_json::to_string(&x).unwrap(),
        serde_json::to_string(&y).unwrap(),
        serde_json::to_string(&value).unwrap(),
    )
    .map_err(io_err("writing stdout"))?;
    Ok(())
}

fn load_config(
    preset_name: Option<String>,
    config_path: Option<PathBuf>,
) -> CliResult<ExperimentConfig> {
    match (preset_name, config_path) {
        (Some(name), None) => preset(&name).ok_or_else(|| {
            CliError::Build(format!(
                "unknown preset {name:?}; available: {}",
                PRESET_NAMES.join(", ")
            ))
        }),
        (None, Some(path)) => {
            let data = std::fs::read_to_string(&path)
                .map_err(io_err(&format!("reading {}", path.display())))?;
            serde_json::from_str(&data)
                .map_err(|e| CliError::Build(format!("invalid config {}: {e}", path.display())))
        }
        _ => Err(CliError::Build(
            "exactly one of --preset or --config is required".into(),
        )),
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ErrorMap { preset, config, out, grid, k, p, eps, rep_out } => {
            match load_config(preset, config) {
                Ok(mut cfg) => {
                    if let Some(n) = grid {
                        cfg.grid = n;
                    }
                    if let Some(k) = k {
                        cfg.local_terms = Some(k);
                    }
                    if let Some(p) = p {
                        cfg.max_freq = p;
                    }
                    if let Some(eps) = eps {
                        cfg.eps = eps;
                    }
                    cmd_error_map(&cfg, out, rep_out)
                }
                Err(e) => Err(e),
            }
        }
        Command::Kn { p, eps, sweep } => cmd_kn(p, eps, sweep),
        Command::Extend { density, p, out } => cmd_extend(&density, p, out),
        Command::Eval { rep, x, y } => cmd_eval(&rep, x, y),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.report(),
    }
}
