mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use output::{Failure, RunConfig};

/// Fan subsolutions, Riemann fans and convex-integration building blocks for 2D isentropic Euler.
///
/// Every command writes `report.json` (and `field.csv` / `pressure.csv` where relevant) into
/// `--out-dir`. Exit codes: 0 ok, 1 constraint failure, 2 numerical failure, 3 bad input.
#[derive(Parser, Debug)]
#[command(name = "eulerfan", version)]
struct Cli {
    /// Seed for test placement and multistart noise.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tolerance override; each command documents what it controls.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, env = "EULERFAN_OUT_DIR", default_value = "eulerfan-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact check of the explicit fan subsolution for p = ρ², plus the quadrature oracle.
    /// `--tol`: float tolerance of the cross-check on the rounded candidate (default 1e-10).
    VerifyExact(VerifyExactArgs),
    /// Solve a Riemann problem; writes the ξ-sampled field and a wave summary.
    /// `--tol`: solver tolerance (default 1e-12).
    Riemann(RiemannArgs),
    /// Second-method parameters, designed pressure and the assembled candidate.
    /// `--tol`: verdict tolerance on the identities (default 1e-9).
    DesignPressure(DesignArgs),
    /// Multistart feasibility search for an admissible fan subsolution.
    /// `--tol`: tolerance on the identities (default 1e-10).
    Search(SearchArgs),
    /// Backward compression wave focusing into Riemann data at t = 0.
    /// `--tol`: allowed drift of the invariants across the fan (default 1e-10).
    Compression(CompressionArgs),
    /// Hull membership of a state point and its longest admissible segment.
    /// `--tol`: boundary band for membership and bisection tolerance (default 1e-10).
    Segment(SegmentArgs),
    /// Sampled localized plane wave along a segment.
    /// `--tol`: extra allowance on the ε-neighbourhood check (default 0).
    Wave(WaveArgs),
    /// Repeated perturbation steps on the unit cylinder.
    /// `--tol`: bisection tolerance of the per-cylinder segment search (default 1e-10).
    CiStep(CiStepArgs),
    /// Weak-form residuals of a field against seeded test functions.
    /// `--tol`: algebraic verdict tolerance for fan fields (default 1e-9).
    Weakcheck(WeakcheckArgs),
}

#[derive(Args, Debug)]
pub struct VerifyExactArgs {
    /// Value of C₁ (rational or decimal); default is the midpoint of the admissible interval.
    #[arg(long)]
    pub c1: Option<String>,
    /// Also write the report to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Number of oracle test functions.
    #[arg(long, default_value_t = 32)]
    pub tests: usize,
}

#[derive(Args, Debug)]
pub struct RiemannArgs {
    /// Left state `rho,m1,m2` (density and momenta).
    #[arg(long, default_value = "4,-1,0", allow_hyphen_values = true)]
    pub left: String,
    /// Right state `rho,m1,m2`.
    #[arg(long, default_value = "1,-0.25,2.8284271247461903", allow_hyphen_values = true)]
    pub right: String,
    /// `quadratic`, `polytropic:KAPPA:GAMMA` or `table:PATH.csv` (sidecar `PATH.json`).
    #[arg(long, default_value = "quadratic")]
    pub pressure: String,
    /// Number of x₂ samples.
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Sampling time.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
}

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// Force β̄ instead of doubling the scalar threshold.
    #[arg(long)]
    pub beta_bar: Option<f64>,
    /// Force α.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Force η.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Allowed loss against the extremal functionals.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Bump width as a fraction of the density gaps.
    #[arg(long)]
    pub width_fraction: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Pressure law, as for `riemann`.
    #[arg(long, default_value = "quadratic")]
    pub pressure: String,
    /// Shortcut for `--pressure polytropic:1:GAMMA`.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Fix the outer states to the compression data ρ₋ = 1, ρ₊ = 4.
    #[arg(long)]
    pub fixed: bool,
    #[arg(long, default_value_t = 12)]
    pub starts: usize,
    #[arg(long, default_value_t = 400)]
    pub max_iters: usize,
    /// Slack demanded of every inequality.
    #[arg(long, default_value_t = 0.0)]
    pub min_slack: f64,
    /// Hold a field at a value, `NAME=VALUE`; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub pin: Vec<String>,
}

#[derive(Args, Debug)]
pub struct CompressionArgs {
    #[arg(long, default_value_t = 1.0)]
    pub rho_minus: f64,
    #[arg(long, default_value_t = 4.0)]
    pub rho_plus: f64,
    #[arg(long, default_value = "quadratic")]
    pub pressure: String,
    /// x₂ samples per time slice.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    /// Negative sampling times, comma separated.
    #[arg(long, default_value = "-1,-0.5,-0.25", allow_hyphen_values = true)]
    pub times: String,
}

#[derive(Args, Debug)]
pub struct SegmentArgs {
    /// Velocity `v1,v2`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub v: String,
    /// Trace-free part `u11,u12`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub u: String,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 720)]
    pub angles: usize,
}

#[derive(Args, Debug)]
pub struct WaveArgs {
    /// Endpoint `a1,a2` with |a|² = C.
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    pub a: String,
    /// Endpoint `b1,b2` with |b|² = C.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 0.02)]
    pub epsilon: f64,
    /// Frequency N; default is the smallest admissible for ε.
    #[arg(long)]
    pub frequency: Option<f64>,
    /// Samples per axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
}

#[derive(Args, Debug)]
pub struct CiStepArgs {
    #[arg(long, default_value_t = 5)]
    pub iters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = 32)]
    pub grid: usize,
    /// Wave frequency per unit cylinder.
    #[arg(long, default_value_t = 8.0)]
    pub frequency: f64,
    /// Finest packing level (cylinder radius 1/k).
    #[arg(long, default_value_t = 4)]
    pub k_max: i64,
}

#[derive(Args, Debug)]
pub struct WeakcheckArgs {
    /// Field JSON: a tagged field, or a fan candidate (float or exact); default is the explicit solution.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    pub tests: usize,
    #[arg(long, default_value = "quadratic")]
    pub pressure: String,
    /// Gauss–Legendre nodes per panel.
    #[arg(long, default_value_t = 20)]
    pub order: usize,
    /// Panels per test radius (even).
    #[arg(long, default_value_t = 12)]
    pub panels: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("bad input: cannot use {n} threads");
            return ExitCode::from(3);
        }
    }
    let name = match &cli.command {
        Command::VerifyExact(_) => "verify-exact",
        Command::Riemann(_) => "riemann",
        Command::DesignPressure(_) => "design-pressure",
        Command::Search(_) => "search",
        Command::Compression(_) => "compression",
        Command::Segment(_) => "segment",
        Command::Wave(_) => "wave",
        Command::CiStep(_) => "ci-step",
        Command::Weakcheck(_) => "weakcheck",
    };
    let cfg = RunConfig { command: name.into(), seed: cli.seed, tol: cli.tol, threads: cli.threads, out_dir: cli.out_dir };
    if let Some(t) = cfg.tol.filter(|t| !(*t >= 0.0 && t.is_finite())) {
        eprintln!("bad input: --tol must be a nonnegative number, got {t}");
        return ExitCode::from(3);
    }
    let start = Instant::now();
    let res = match &cli.command {
        Command::VerifyExact(a) => commands::verify_exact(&cfg, a),
        Command::Riemann(a) => commands::riemann(&cfg, a),
        Command::DesignPressure(a) => commands::design_pressure(&cfg, a),
        Command::Search(a) => commands::search(&cfg, a),
        Command::Compression(a) => commands::compression(&cfg, a),
        Command::Segment(a) => commands::segment(&cfg, a),
        Command::Wave(a) => commands::wave(&cfg, a),
        Command::CiStep(a) => commands::ci_step(&cfg, a),
        Command::Weakcheck(a) => commands::weakcheck(&cfg, a),
    };
    let done = match res {
        Ok(d) => d,
        Err(f) => {
            eprintln!("{f}");
            return ExitCode::from(f.code() as u8);
        }
    };
    if let Err(f) = output::write_outputs(&cfg, &done, start.elapsed().as_secs_f64()) {
        eprintln!("{f}");
        return ExitCode::from(f.code() as u8);
    }
    match &done.failure {
        Some(m) => {
            eprintln!("{}", Failure::Constraint(m.clone()));
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
