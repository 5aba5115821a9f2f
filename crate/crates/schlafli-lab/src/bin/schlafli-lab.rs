//! Command-line front end: verification suites, single checks on JSON
//! inputs, and closed-form tube/expansion values. Exit code 0 means every
//! residual stayed within its declared tolerance; failing check ids go to
//! standard error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::Vector4;

use schlafli_lab::error::{Error, Result};
use schlafli_lab::harness::{emit, format_float, run_suite, Config, Format, SuiteReport};
use schlafli_lab::laminations::{first_variation_integral, MetricDeformation};
use schlafli_lab::minkowski::HPlane;
use schlafli_lab::polyhedra::FamilySpec;
use schlafli_lab::tol;
use schlafli_lab::tubes::{
    convexity_margin, core_dual_volume_expansion, default_margin_probes, tube_volume,
    DiffeoFamily, TubeBase, TubeSpec,
};
use schlafli_lab::variation::{
    continuity_probe, dual_schlafli_check, monotonicity_check, schlafli_check,
    smooth_dual_variation_check, SmoothFamilySpec, VariationReport,
};

#[derive(Parser)]
#[command(
    name = "schlafli-lab",
    version,
    about = "Variation formulas for hyperbolic volumes and dual volumes, verified numerically"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one check against a JSON input file
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        /// Input JSON file (family, smooth family, polyhedron pair, ...)
        #[arg(long = "in")]
        input: PathBuf,
        /// Family parameter for derivative checks
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t: f64,
        /// Central-difference step
        #[arg(long)]
        h: Option<f64>,
        /// Perturbation radius for the continuity probe
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Closed-form tube volume over a flat patch, wedge, vertex cone or
    /// solid-torus core
    Tube {
        #[arg(long, value_enum)]
        kind: TubeKind,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        length: Option<f64>,
        #[arg(long)]
        area: Option<f64>,
        #[arg(long)]
        omega: Option<f64>,
    },
    /// Evaluate the dual-volume expansion (with --vstar/--lmu/--eps), or run
    /// the core-expansion suite when no values are given
    CoreExpansion {
        #[arg(long, allow_negative_numbers = true)]
        vstar: Option<f64>,
        #[arg(long)]
        lmu: Option<f64>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        chi: i64,
        #[arg(long)]
        eps: Option<f64>,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Convexity margin of a builtin deformation family at (eps, t)
    Margin {
        #[arg(long)]
        family: String,
        #[arg(long)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// First-variation integral of a builtin metric deformation
    FirstVariation {
        #[arg(long)]
        deformation: String,
    },
    /// Schläfli suite: dVol/dt vs ½ Σ ℓ δθ on the builtin families
    Schlafli(SuiteArgs),
    /// Dual Schläfli suite: dVol*/dt vs −½ Σ θ δℓ, plus the smooth formula
    DualSchlafli(SuiteArgs),
    /// Tube volumes against quadrature oracles
    Tubes(SuiteArgs),
    /// Length derivative suite on representation paths
    Lengths(SuiteArgs),
    /// Convexity-margin suite
    Margins(SuiteArgs),
    /// Every suite
    All(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Schlafli,
    DualSchlafli,
    Smooth,
    Monotonic,
    Continuity,
}

#[derive(Clone, Copy, ValueEnum)]
enum TubeKind {
    Flat,
    Wedge,
    Vertex,
    Torus,
}

#[derive(Args)]
struct SuiteArgs {
    /// Extra JSON input appended to the builtin fixtures
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// JSON config file overriding the defaults
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::bad_input_at(path.display().to_string(), e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::bad_input_at(format!("{}:{}:{}", path.display(), e.line(), e.column()), e.to_string())
    })
}

fn load_config(args: &SuiteArgs) -> Result<Config> {
    let mut config = match &args.config {
        Some(path) => read_json(path)?,
        None => Config::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn dispatch() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Check { kind, input, t, h, delta, seed } => {
            run_check(kind, &input, t, h.unwrap_or(tol::DEFAULT_FD_STEP), delta, seed)
        }
        Cmd::Tube { kind, eps, theta, length, area, omega } => {
            let need = |name: &str, v: Option<f64>| {
                v.ok_or_else(|| Error::bad_input(format!("missing --{name}")))
            };
            let spec = match kind {
                TubeKind::Flat => {
                    TubeSpec::new(TubeBase::FlatPatch { area: need("area", area)? }, eps)?
                }
                TubeKind::Wedge => TubeSpec::new(
                    TubeBase::Wedge { length: need("length", length)?, angle: need("theta", theta)? },
                    eps,
                )?,
                TubeKind::Vertex => {
                    TubeSpec::new(TubeBase::VertexCone { solid_angle: need("omega", omega)? }, eps)?
                }
                TubeKind::Torus => TubeSpec::solid_torus(need("length", length)?, eps)?,
            };
            println!("{}", format_float(tube_volume(&spec)));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CoreExpansion { vstar, lmu, chi, eps, suite } => match (vstar, lmu, eps) {
            (Some(v), Some(l), Some(e)) => {
                println!("{}", format_float(core_dual_volume_expansion(v, l, chi, e)));
                Ok(ExitCode::SUCCESS)
            }
            (None, None, None) => run_named_suite("core-expansion", &suite),
            _ => Err(Error::bad_input("give all of --vstar --lmu --eps, or none for the suite")),
        },
        Cmd::Margin { family, eps, t } => {
            let fam = DiffeoFamily::builtin(&family)?;
            let plane = HPlane::new(Vector4::new(0.0, 0.0, 0.0, 1.0))?;
            let m = convexity_margin(&fam, &plane, eps, t, &default_margin_probes())?;
            println!(
                "{{\"family\": \"{family}\", \"eps\": {}, \"t\": {}, \"margin\": {}}}",
                format_float(eps),
                format_float(t),
                format_float(m)
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::FirstVariation { deformation } => {
            let d = MetricDeformation::builtin(&deformation)?;
            println!("{}", format_float(first_variation_integral(&d)?));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Schlafli(args) => run_named_suite("schlafli", &args),
        Cmd::DualSchlafli(args) => run_named_suite("dual-schlafli", &args),
        Cmd::Tubes(args) => run_named_suite("tubes", &args),
        Cmd::Lengths(args) => run_named_suite("lengths", &args),
        Cmd::Margins(args) => run_named_suite("margins", &args),
        Cmd::All(args) => run_named_suite("all", &args),
    }
}

fn run_named_suite(name: &str, args: &SuiteArgs) -> Result<ExitCode> {
    let config = load_config(args)?;
    let mut report = run_suite(name, &config)?;
    if let Some(path) = &args.input {
        report.rows.extend(user_input_rows(name, path, &config)?);
        report.rows.sort_by(|a, b| a.id.cmp(&b.id));
    }
    let format: Format = args.format.parse()?;
    print!("{}", emit(&report, format));
    eprintln!("suite {name}: {} rows in {:.2}s", report.rows.len(), report.wall_time_s);
    finish(&report)
}

// Extra rows for user-supplied inputs appended to a suite run.
fn user_input_rows(
    suite: &str,
    path: &Path,
    config: &Config,
) -> Result<Vec<schlafli_lab::harness::CheckRow>> {
    use schlafli_lab::harness::CheckRow;
    match suite {
        "schlafli" | "dual-schlafli" => {
            let spec: FamilySpec = read_json(path)?;
            let family = spec.build()?;
            let (lo, hi) = family.domain();
            let mut rows = Vec::new();
            for k in 0..5 {
                let t = lo + (hi - lo) * (0.15 + 0.7 * k as f64 / 4.0);
                let rep = if suite == "schlafli" {
                    schlafli_check(&family, t, config.fd_step, config.quad_tol)?
                } else {
                    dual_schlafli_check(&family, t, config.fd_step, config.quad_tol)?
                };
                rows.push(CheckRow {
                    id: format!("{suite}/user-input/t={t:+.3}"),
                    anchor: "user-supplied family".into(),
                    lhs: rep.lhs,
                    rhs: rep.rhs,
                    residual: rep.residual,
                    tolerance: tol::VARIATION_RESIDUAL,
                    pass: rep.residual <= tol::VARIATION_RESIDUAL,
                });
            }
            Ok(rows)
        }
        _ => Err(Error::bad_input(format!("suite {suite} takes no --in file"))),
    }
}

fn finish(report: &SuiteReport) -> Result<ExitCode> {
    if report.pass() {
        Ok(ExitCode::SUCCESS)
    } else {
        for id in report.failing_ids() {
            eprintln!("FAIL {id}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn print_variation(report: &VariationReport, tolerance: f64) -> Result<ExitCode> {
    let passed = report.residual <= tolerance;
    println!(
        "{{\"t\": {}, \"lhs\": {}, \"rhs\": {}, \"residual\": {}, \"stencil\": {{\"h\": {}, \"order\": {}}}, \"tolerance\": {}, \"pass\": {}}}",
        format_float(report.t),
        format_float(report.lhs),
        format_float(report.rhs),
        format_float(report.residual),
        format_float(report.stencil.h),
        report.stencil.order,
        format_float(tolerance),
        passed
    );
    if passed {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("FAIL residual {} above {}", report.residual, tolerance);
        Ok(ExitCode::FAILURE)
    }
}

fn run_check(
    kind: CheckKind,
    input: &Path,
    t: f64,
    h: f64,
    delta: f64,
    seed: u64,
) -> Result<ExitCode> {
    match kind {
        CheckKind::Schlafli | CheckKind::DualSchlafli => {
            let spec: FamilySpec = read_json(input)?;
            let family = spec.build()?;
            let rep = match kind {
                CheckKind::Schlafli => schlafli_check(&family, t, h, tol::DEFAULT_QUAD_TOL)?,
                _ => dual_schlafli_check(&family, t, h, tol::DEFAULT_QUAD_TOL)?,
            };
            print_variation(&rep, tol::VARIATION_RESIDUAL)
        }
        CheckKind::Smooth => {
            let spec: SmoothFamilySpec = read_json(input)?;
            let family = spec.build()?;
            let rep = smooth_dual_variation_check(&family, t)?;
            print_variation(&rep, 1e-7)
        }
        CheckKind::Monotonic => {
            #[derive(serde::Deserialize)]
            struct Pair {
                inner: schlafli_lab::polyhedra::PolyhedronSpec,
                outer: schlafli_lab::polyhedra::PolyhedronSpec,
            }
            let pair: Pair = read_json(input)?;
            let quad_tol = pair.inner.tol.min(pair.outer.tol);
            let rep = monotonicity_check(&pair.inner.build()?, &pair.outer.build()?, quad_tol)?;
            let margin_text =
                rep.margin.map(format_float).unwrap_or_else(|| "null".into());
            println!("{{\"contained\": {}, \"margin\": {margin_text}}}", rep.contained);
            let ok = rep.contained && rep.margin.unwrap_or(-1.0) >= -tol::MONOTONICITY_SLACK;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        CheckKind::Continuity => {
            let spec: schlafli_lab::polyhedra::PolyhedronSpec = read_json(input)?;
            let poly = spec.build()?;
            let modulus = continuity_probe(&poly, delta, seed, spec.tol)?;
            println!(
                "{{\"delta\": {}, \"modulus\": {}, \"seed\": {seed}}}",
                format_float(delta),
                format_float(modulus)
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
