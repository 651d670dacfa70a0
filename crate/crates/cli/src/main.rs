//! `nevlab`: curves, order estimates, named bound checks, first-order
//! solutions and exclusion disks from the command line.
//!
//! Exit status: 0 when everything passed, 2 when a bound check did not pass,
//! 1 on bad input or a numerical error.

// `!(x >= y)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod io;
mod sweeps;

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nevlab::cartan::{cartan_disks, pointwise_quotient_check};
use nevlab::diffeq::{
    ahh_degree_check, analyze_equation, mohonko_check, parse_equation, residual_check, whittaker_solve, AhhEquation,
};
use nevlab::funcalg::to_spec;
use nevlab::growth::{
    estimate_order, infinite_order_counterexample, verify_fund_est, verify_quotient_proximity,
    verify_shift_characteristic, verify_shift_counting,
};
use nevlab::nevanlinna::{characteristic_curve, log_grid};
use nevlab::{Complex64, Report};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

/// Residual tolerance for built first-order solutions.
const WHITTAKER_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] nevlab::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Parser)]
#[command(name = "nevlab", version, about = "Nevanlinna functionals and difference-analogue bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the artifact here (temp file + rename) instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone, Copy)]
struct Radii {
    #[arg(long, default_value_t = 10.0)]
    rmin: f64,
    #[arg(long, default_value_t = 100.0)]
    rmax: f64,
    #[arg(long = "points-per-decade", default_value_t = 24)]
    points_per_decade: usize,
}

impl Radii {
    fn grid(self) -> Result<Vec<f64>, CliError> {
        if !(self.rmin >= 0.5) {
            return Err(CliError::Input(format!("--rmin must be at least 0.5, got {}", self.rmin)));
        }
        if !(self.rmax > self.rmin && self.rmax.is_finite()) {
            return Err(CliError::Input(format!("--rmax must exceed --rmin, got {}", self.rmax)));
        }
        if self.points_per_decade < 4 {
            return Err(CliError::Input("--points-per-decade must be at least 4".into()));
        }
        Ok(log_grid(self.rmin, self.rmax, self.points_per_decade))
    }
}

#[derive(Subcommand)]
enum Command {
    /// CSV of m, N and T on a logarithmic radius grid.
    Characteristic {
        /// Function spec: a JSON file, inline JSON or a rational expression in z.
        #[arg(long)]
        function: String,
        #[command(flatten)]
        radii: Radii,
    },
    /// Order estimate with its method and fit window.
    Order {
        #[arg(long)]
        function: String,
        #[command(flatten)]
        radii: Radii,
    },
    /// Runs a named check and emits its JSON report.
    Verify(VerifyArgs),
    /// Builds the solution of F(z+1) = Ψ(z) F(z) for rational Ψ.
    Whittaker {
        /// Ψ as a spec or rational expression.
        #[arg(long)]
        psi: String,
        #[arg(long = "check-samples", default_value_t = 100)]
        check_samples: usize,
        /// Residual samples are drawn from the disk of this radius.
        #[arg(long = "sample-radius", default_value_t = 20.0)]
        sample_radius: f64,
    },
    /// Growth lower bound for a linear difference equation.
    AnalyzeEq {
        /// `{coeffs: [...], form: "shift" | "delta", lagged?: bool}` as a file or inline.
        #[arg(long)]
        equation: String,
    },
    /// Cartan exclusion disks for a point set, or for the zeros and poles of a
    /// function in a disk.
    Cartan {
        /// JSON array of `[re, im]` points.
        #[arg(long, conflicts_with = "function")]
        points: Option<String>,
        #[arg(long, requires = "radius")]
        function: Option<String>,
        #[arg(long)]
        radius: Option<f64>,
        /// Budget B; the radii sum to 2B.
        #[arg(long)]
        budget: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    CharShift,
    CountingShift,
    QuotientProximity,
    FundEst,
    Pointwise,
    Counterexample,
    Mohonko,
    AhhDegree,
    CartanLemma,
    LemmaCalpha,
    LemmaCircleAverage,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    theorem: Theorem,
    #[arg(long)]
    function: Option<String>,
    /// Shift as `re` or `re,im`.
    #[arg(long, default_value = "1", value_parser = io::parse_complex)]
    eta: Complex64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[command(flatten)]
    radii: Radii,
    /// Exponent for fund-est (default 0.5) and the lemma sweeps (default: a grid).
    #[arg(long)]
    alpha: Option<f64>,
    /// Radius dilation for the pointwise check.
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// `R/r, R'/r` for fund-est.
    #[arg(long, default_value = "2,3", value_parser = io::parse_pair)]
    scale: (f64, f64),
    /// Sweep size or radius count, depending on the check.
    #[arg(long)]
    samples: Option<usize>,
    /// Equation JSON for ahh-degree.
    #[arg(long)]
    equation: Option<String>,
}

/// What a command produced and whether it counts as passing.
struct Artifact {
    text: String,
    passed: bool,
}

impl Artifact {
    fn info(text: String) -> Self {
        Self { text, passed: true }
    }

    fn report(r: &Report) -> Self {
        Self { text: r.to_json(), passed: r.passed() }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn need<'a>(opt: &'a Option<String>, flag: &str) -> Result<&'a str, CliError> {
    opt.as_deref().ok_or_else(|| CliError::Input(format!("this check needs --{flag}")))
}

fn verify(a: &VerifyArgs, seed: u64) -> Result<Artifact, CliError> {
    let function = || io::load_function(need(&a.function, "function")?);
    let report = match a.theorem {
        Theorem::CharShift => verify_shift_characteristic(&function()?, a.eta, &a.radii.grid()?, a.epsilon)?,
        Theorem::CountingShift => verify_shift_counting(&function()?, a.eta, &a.radii.grid()?, a.epsilon)?,
        Theorem::QuotientProximity => verify_quotient_proximity(&function()?, a.eta, &a.radii.grid()?, a.epsilon)?,
        Theorem::FundEst => verify_fund_est(&function()?, a.eta, &a.radii.grid()?, a.alpha.unwrap_or(0.5), a.scale)?,
        Theorem::Pointwise => {
            pointwise_quotient_check(&function()?, a.eta, a.gamma, &a.radii.grid()?, a.epsilon)?.report
        }
        Theorem::Counterexample => infinite_order_counterexample(a.radii.rmax, a.samples.unwrap_or(50))?,
        Theorem::Mohonko => mohonko_check(&function()?, &a.radii.grid()?)?,
        Theorem::AhhDegree => {
            let eq = AhhEquation::from_json(&io::load_json(need(&a.equation, "equation")?)?)?;
            ahh_degree_check(&eq, &function()?, &a.radii.grid()?, a.epsilon)?
        }
        Theorem::CartanLemma => sweeps::cartan_lemma(a.samples.unwrap_or(100), seed)?,
        Theorem::LemmaCalpha => {
            let alphas = a.alpha.map_or(sweeps::ALPHA_GRID.to_vec(), |x| vec![x]);
            sweeps::calpha(&alphas, a.samples.unwrap_or(10_000), seed)?
        }
        Theorem::LemmaCircleAverage => sweeps::circle_average(a.alpha, a.samples.unwrap_or(1000), seed)?,
    };
    Ok(Artifact::report(&report))
}

fn whittaker(psi: &str, check_samples: usize, sample_radius: f64, seed: u64) -> Result<Artifact, CliError> {
    if !(sample_radius > 0.0 && sample_radius.is_finite()) {
        return Err(CliError::Input("--sample-radius must be positive".into()));
    }
    let psi = io::load_function(psi)?;
    let sol = whittaker_solve(&psi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(check_samples);
    let mut attempts = 0;
    while pts.len() < check_samples {
        attempts += 1;
        if attempts > 100 * check_samples.max(1) {
            return Err(CliError::Input("could not draw samples away from the zeros and poles".into()));
        }
        let z = Complex64::from_polar(sample_radius * rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU));
        if residual_check(&sol, &psi, &[z]).is_ok() {
            pts.push(z);
        }
    }
    let residual = if pts.is_empty() { 0.0 } else { residual_check(&sol, &psi, &pts)? };
    let passed = residual <= WHITTAKER_TOL;
    let out = json!({
        "psi": to_spec(&psi),
        "solution": sol.to_json(),
        "function": to_spec(&sol.to_expr()?),
        "residual": residual,
        "tolerance": WHITTAKER_TOL,
        "samples": pts.len(),
        "verdict": if passed { "pass" } else { "fail" },
    });
    Ok(Artifact { text: pretty(&out), passed })
}

fn cartan(
    points: &Option<String>,
    function: &Option<String>,
    radius: Option<f64>,
    budget: f64,
) -> Result<Artifact, CliError> {
    let pts: Vec<Complex64> = match (points, function) {
        (Some(p), _) => {
            let v = io::load_json(p)?;
            let arr = v.as_array().ok_or_else(|| CliError::Input("--points must be a JSON array".into()))?;
            arr.iter()
                .enumerate()
                .map(|(i, p)| io::parse_complex(&p.to_string()).map_err(|e| CliError::Input(format!("$[{i}]: {e}"))))
                .collect::<Result<_, _>>()?
        }
        (None, Some(f)) => {
            let r = radius.ok_or_else(|| CliError::Input("--function needs --radius".into()))?;
            let div = io::load_function(f)?.divisor_in_disk(r)?;
            div.entries()
                .iter()
                .filter(|(c, _)| c.norm() < r)
                .flat_map(|&(c, m)| std::iter::repeat_n(c, m.unsigned_abs() as usize))
                .collect()
        }
        (None, None) => return Err(CliError::Input("give --points or --function with --radius".into())),
    };
    Ok(Artifact::info(cartan_disks(&pts, budget)?.to_json()))
}

fn run(cli: &Cli) -> Result<Artifact, CliError> {
    match &cli.command {
        Command::Characteristic { function, radii } => {
            Ok(Artifact::info(characteristic_curve(&io::load_function(function)?, &radii.grid()?)?.to_csv()))
        }
        Command::Order { function, radii } => {
            let f = io::load_function(function)?;
            let est = estimate_order(&characteristic_curve(&f, &radii.grid()?)?)?;
            Ok(Artifact::info(pretty(&json!({ "function": to_spec(&f), "estimate": est, "declared": f.order() }))))
        }
        Command::Verify(a) => verify(a, cli.seed),
        Command::Whittaker { psi, check_samples, sample_radius } => {
            whittaker(psi, *check_samples, *sample_radius, cli.seed)
        }
        Command::AnalyzeEq { equation } => {
            let eq = parse_equation::<f64>(&io::load_json(equation)?)?;
            let verdict = analyze_equation(&eq)?;
            Ok(Artifact::info(pretty(&json!({ "equation": eq.to_json(), "verdict": verdict.to_json() }))))
        }
        Command::Cartan { points, function, radius, budget } => cartan(points, function, *radius, *budget),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("NEVLAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("NEVLAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads()
        .and_then(|()| run(&cli))
        .and_then(|a| io::emit(&a.text, cli.output.as_ref()).map(|()| a.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
