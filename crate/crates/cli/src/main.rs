//! `nofic`: command-line front end for the rate-region library.

mod params;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nofic_core::channel::{db_to_linear, ChannelCoefficients};
use nofic_core::gap::{exact_gap, sweep_symmetric, GridSpec, SweepCell};
use nofic_core::simulate::{estimate_parameters, simulate_block, InputMode, SimulationConfig};
use nofic_core::{achievable_region, classify_events, converse_region, ChannelParameters, Region, User};
use serde_json::json;

use params::{fmt6, load_coefficients, load_params, parse_range, round6};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files, out-of-range values.
    Invalid(String),
    /// A channel the bounds cannot be evaluated on.
    Degenerate(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Degenerate(m) => f.write_str(m),
        }
    }
}

impl From<nofic_core::Error> for CliError {
    fn from(e: nofic_core::Error) -> Self {
        match e {
            nofic_core::Error::DegenerateChannel(_) => CliError::Degenerate(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Degenerate(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "nofic", version, about = "Inner and outer rate regions of the interference channel with noisy feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Vertices and sampled frontier of the inner and/or outer region.
    Region {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::Both)]
        which: Which,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact gap, analytic bound and witness point.
    Gap {
        #[arg(long)]
        params: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact gap over a symmetric (alpha, beta) grid.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        snr_db: f64,
        /// start:stop:step
        #[arg(long)]
        alpha: String,
        /// start:stop:step
        #[arg(long)]
        beta: String,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Event scenario and the bound variants it selects.
    Classify {
        #[arg(long)]
        params: PathBuf,
    },
    /// Monte-Carlo block of the channel, compared against the closed forms.
    Simulate {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Mode::Correlated)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    Achievable,
    Converse,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Independent,
    Correlated,
}

#[derive(Args)]
struct GridArgs {
    /// Points on the correlation axis of the inner bound.
    #[arg(long)]
    rho_steps: Option<usize>,
    /// Points on each power-split axis.
    #[arg(long)]
    mu_steps: Option<usize>,
    /// Points on the correlation axis of the outer bound.
    #[arg(long)]
    converse_rho_steps: Option<usize>,
    #[arg(long)]
    frontier_samples: Option<usize>,
}

impl GridArgs {
    fn spec(&self) -> Result<GridSpec, CliError> {
        let d = GridSpec::default();
        let g = GridSpec {
            rho_points: self.rho_steps.unwrap_or(d.rho_points),
            mu_points: self.mu_steps.unwrap_or(d.mu_points),
            converse_rho_points: self.converse_rho_steps.unwrap_or(d.converse_rho_points),
            frontier_samples: self.frontier_samples.unwrap_or(d.frontier_samples),
        };
        g.validate()?;
        Ok(g)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Invalid(format!("out: {}: {e}", p.display()))),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())
                .and_then(|_| s.flush())
                .map_err(|e| CliError::Invalid(format!("stdout: {e}")))
        }
    }
}

fn params_json(p: &ChannelParameters) -> serde_json::Value {
    let v = p.to_array();
    json!({
        "snr_fwd_1": v[0], "snr_fwd_2": v[1], "inr_12": v[2],
        "inr_21": v[3], "snr_bwd_1": v[4], "snr_bwd_2": v[5],
        "units": "linear",
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn region_rows(csv: &mut String, which: &str, r: &Region) {
    for v in r.vertices() {
        let _ = writeln!(csv, "{which},vertex,{},{}", fmt6(v.r1), fmt6(v.r2));
    }
    for v in r.frontier().points().filter(|v| v.r2.is_finite()) {
        let _ = writeln!(csv, "{which},frontier,{},{}", fmt6(v.r1), fmt6(v.r2));
    }
}

fn region(params: &Path, which: Which, grid: &GridArgs, out: Option<&Path>) -> Result<(), CliError> {
    let p = load_params(params)?;
    let g = grid.spec()?;
    let mut csv = String::from("which,kind,r1,r2\n");
    if which != Which::Converse {
        region_rows(&mut csv, "achievable", &achievable_region(&p, &g)?);
    }
    if which != Which::Achievable {
        region_rows(&mut csv, "converse", &converse_region(&p, &g)?);
    }
    emit(out, &csv)
}

fn gap(params: &Path, grid: &GridArgs, out: Option<&Path>) -> Result<(), CliError> {
    let p = load_params(params)?;
    let r = exact_gap(&p, &grid.spec()?)?;
    let v = json!({
        "params": params_json(&p),
        "exact_gap": round6(r.exact_gap),
        "analytic_bound": round6(r.analytic_bound),
        "witness_r1": round6(r.witness.r1),
        "witness_r2": round6(r.witness.r2),
        "delta_components": r.delta_components.to_array().map(round6),
        "event_pair": r.event_pair.to_string(),
    });
    emit(out, &pretty(&v))
}

fn sweep(snr_db: f64, alpha: &str, beta: &str, grid: &GridArgs, out: Option<&Path>) -> Result<(), CliError> {
    if !snr_db.is_finite() || snr_db <= 0.0 {
        return Err(CliError::Invalid(format!("snr-db: must be a positive finite number, got {snr_db}")));
    }
    let alphas = parse_range("alpha", alpha)?;
    let betas = parse_range("beta", beta)?;
    let s = sweep_symmetric(db_to_linear(snr_db), &alphas, &betas, &grid.spec()?)?;
    let mut csv = String::from("alpha,beta,exact_gap,status\n");
    for (a, b, cell) in s.iter() {
        let (value, status) = match cell {
            SweepCell::Ok(g) => (fmt6(*g), "ok".to_string()),
            SweepCell::Missing(why) => (String::new(), format!("missing:{}", why.replace([',', '\n'], ";"))),
        };
        let _ = writeln!(csv, "{},{},{value},{status}", fmt6(a), fmt6(b));
    }
    emit(out, &csv)
}

fn classify(params: &Path) -> Result<(), CliError> {
    let p = load_params(params)?;
    let ev = classify_events(&p);
    let text = format!(
        "{ev}\nkappa6_variant={}\nkappa7_1_variant={}\nkappa7_2_variant={}\n",
        ev.kappa6_variant(),
        ev.kappa7_variant(User::One),
        ev.kappa7_variant(User::Two),
    );
    emit(None, &text)
}

/// Sample variance and its standard error, `sqrt((m4 - s^2) / n)`.
fn variance_with_error(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let (m2, m4) = v.iter().fold((0.0, 0.0), |(a, b), x| {
        let d = (x - mean) * (x - mean);
        (a + d, b + d * d)
    });
    let s2 = m2 / (n - 1.0);
    (s2, ((m4 / n - s2 * s2).max(0.0) / n).sqrt())
}

/// Feedback observation power: the forward output power scaled by the
/// feedback gain, plus unit noise.
fn feedback_power(c: &ChannelCoefficients, u: User, correlated: bool) -> f64 {
    let d = c.h_fwd(u);
    let x = c.h_cross(u);
    let cross = if correlated { 2.0 * d * x } else { 0.0 };
    c.h_bwd(u).powi(2) * (d * d + x * x + cross + 1.0) + 1.0
}

fn simulate(coeffs: &Path, samples: usize, seed: u64, mode: Mode, out: Option<&Path>) -> Result<(), CliError> {
    let c = load_coefficients(coeffs)?;
    let input_mode = match mode {
        Mode::Independent => InputMode::Independent,
        Mode::Correlated => InputMode::FullyCorrelated,
    };
    let cfg = SimulationConfig::new(samples, seed, input_mode);
    let block = simulate_block(&c, &cfg)?;
    let correlated = mode == Mode::Correlated;
    let mut users = Vec::new();
    for u in User::BOTH {
        let fb = &block.y_bwd[u][block.delay..];
        let (var, se) = variance_with_error(fb);
        let power = block.x[u].iter().map(|x| x * x).sum::<f64>() / block.x[u].len() as f64;
        users.push(json!({
            "user": u.index() + 1,
            "input_power": power,
            "feedback_variance": { "empirical": var, "formula": feedback_power(&c, u, correlated), "std_error": se },
        }));
    }
    let mut v = json!({
        "samples": samples,
        "seed": seed,
        "mode": match mode { Mode::Independent => "independent", Mode::Correlated => "correlated" },
        "users": users,
    });
    if correlated {
        let est = estimate_parameters(std::slice::from_ref(&block), &c)?;
        let names = ["snr_fwd_1", "snr_fwd_2", "inr_12", "inr_21", "snr_bwd_1", "snr_bwd_2"];
        let (e, s, f) = (est.estimate.to_array(), est.std_error.to_array(), c.to_params().to_array());
        let mut table = serde_json::Map::new();
        for k in 0..6 {
            table.insert(names[k].into(), json!({ "empirical": e[k], "formula": f[k], "std_error": s[k] }));
        }
        v["parameters"] = serde_json::Value::Object(table);
    }
    emit(out, &pretty(&v))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Region { params, which, grid, out } => region(&params, which, &grid, out.as_deref()),
        Command::Gap { params, grid, out } => gap(&params, &grid, out.as_deref()),
        Command::Sweep { snr_db, alpha, beta, grid, out } => sweep(snr_db, &alpha, &beta, &grid, out.as_deref()),
        Command::Classify { params } => classify(&params),
        Command::Simulate { coeffs, samples, seed, mode, out } => simulate(&coeffs, samples, seed, mode, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("nofic: {}", line.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nofic: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
