//! `mtum`: truncated-moment estimation, efficiency tables and simulation
//! campaigns for grouped exponential / Pareto data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mtum_core::efficiency::are_table_with;
use mtum_core::model::pareto_to_exp;
use mtum_core::{
    group_raw, mle_estimate, population_truncated_moment, resolve_window, run_study, solve, Error,
    ExponentialModel, GroupBoundaries, GroupedSample, SimulationConfig, TailTerm,
};

#[derive(Parser, Debug)]
#[command(
    name = "mtum",
    version,
    about = "Method of truncated moments for grouped exponential and Pareto data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate theta (and alpha = 1/theta for Pareto data) from one sample.
    Estimate(EstimateArgs),
    /// Asymptotic relative efficiency of MTuM against the grouped MLE.
    Are(AreArgs),
    /// Run a seeded simulation campaign described by a JSON config.
    Simulate(SimulateArgs),
}

#[derive(clap::Args, Debug)]
struct EstimateArgs {
    /// Grouped CSV with header `lower,upper,count`.
    #[arg(long, conflicts_with = "raw", required_unless_present = "raw")]
    data: Option<PathBuf>,
    /// Raw observations, whitespace or comma separated; grouped with `--cuts`.
    #[arg(long, requires = "cuts")]
    raw: Option<PathBuf>,
    /// Group boundaries for `--raw`, e.g. `0:1:100,200`.
    #[arg(long)]
    cuts: Option<String>,
    /// Left end of the truncation window.
    #[arg(long = "t")]
    t: Option<f64>,
    /// Right end of the truncation window.
    #[arg(long = "T")]
    big_t: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Mtum)]
    method: Method,
    /// Pareto scale x0. Raw values are mapped to ln(y / x0) before grouping;
    /// grouped data must already be on the log scale.
    #[arg(long)]
    pareto_x0: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Mtum,
    Mle,
}

#[derive(clap::Args, Debug)]
struct AreArgs {
    #[arg(long)]
    theta: f64,
    /// Group boundaries, e.g. `0:5:30,inf`.
    #[arg(long)]
    cuts: String,
    /// Left window ends, comma separated.
    #[arg(long = "t", value_delimiter = ',', required = true)]
    t: Vec<f64>,
    /// Right window ends, comma separated.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    big_t: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Whether the open last group enters the Fisher information.
    #[arg(long, value_enum, default_value_t = InfoTail::Include)]
    info_tail: InfoTail,
    /// Print `g_tT(theta)` on a log grid around `--theta` as CSV instead.
    #[arg(long)]
    dump_gtt: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum InfoTail {
    Include,
    Exclude,
}

impl From<InfoTail> for TailTerm {
    fn from(v: InfoTail) -> Self {
        match v {
            InfoTail::Include => TailTerm::Include,
            InfoTail::Exclude => TailTerm::Exclude,
        }
    }
}

#[derive(clap::Args, Debug)]
struct SimulateArgs {
    /// JSON file with the `SimulationConfig` fields.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Writes `<out>.csv` and `<out>.txt`; without it the text table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

/// Failure with its exit code and the error name printed on stderr.
struct Failure {
    code: u8,
    name: String,
    message: String,
}

impl Failure {
    fn input(name: &str, message: impl Into<String>) -> Self {
        Self {
            code: 2,
            name: name.into(),
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { 2 } else { 3 };
        Self {
            code,
            name: e.name().into(),
            message: e.to_string(),
        }
    }
}

/// Errors while reading input are exit code 2 whatever their kind.
fn input_error(e: Error) -> Failure {
    Failure {
        code: 2,
        ..Failure::from(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))
}

fn parse_cuts(spec: &str) -> CliResult<GroupBoundaries> {
    spec.parse().map_err(input_error)
}

fn load_sample(args: &EstimateArgs) -> CliResult<GroupedSample> {
    if let Some(path) = &args.data {
        let file = fs::File::open(path)
            .map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))?;
        return GroupedSample::from_csv(file).map_err(input_error);
    }
    let path = args.raw.as_ref().expect("clap requires --data or --raw");
    let boundaries = parse_cuts(
        args.cuts
            .as_deref()
            .expect("clap requires --cuts with --raw"),
    )?;
    let text = read(path)?;
    let mut values = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Failure::input("Parse", format!("not a number: {s:?}")))
        })
        .collect::<CliResult<Vec<f64>>>()?;
    if let Some(x0) = args.pareto_x0 {
        values = values
            .iter()
            .map(|&y| pareto_to_exp(y, x0))
            .collect::<Result<_, _>>()
            .map_err(input_error)?;
    }
    group_raw(&values, &boundaries).map_err(input_error)
}

fn cmd_estimate(args: &EstimateArgs) -> CliResult<String> {
    if let Some(x0) = args.pareto_x0 {
        if !(x0.is_finite() && x0 > 0.0) {
            return Err(Failure::input(
                "InvalidParameter",
                format!("--pareto-x0 must be positive, got {x0}"),
            ));
        }
    }
    let sample = load_sample(args)?;
    let mut out = String::new();
    let (theta_hat, se) = match args.method {
        Method::Mtum => {
            let (Some(t), Some(big_t)) = (args.t, args.big_t) else {
                return Err(Failure::input(
                    "InvalidWindow",
                    "--method mtum needs --t and --T",
                ));
            };
            let window = resolve_window(sample.boundaries(), t, big_t)?;
            let est = solve(&sample, &window, None)?;
            let _ = writeln!(out, "method: mtum");
            let _ = writeln!(out, "window: ({t}, {big_t})");
            let _ = writeln!(out, "n: {}", sample.n());
            let _ = writeln!(out, "theta_hat: {}", est.theta_hat);
            let _ = writeln!(out, "se: {}", est.standard_error());
            let _ = writeln!(out, "mu_hat: {}", est.mu_hat);
            let _ = writeln!(
                out,
                "existence_window: ({}, {})",
                window.lower_limit(),
                window.upper_limit()
            );
            let _ = writeln!(out, "solver: {:?}", est.solver);
            let _ = writeln!(out, "iterations: {}", est.iterations);
            let _ = writeln!(out, "residual: {:e}", est.residual);
            if est.non_monotone {
                let _ = writeln!(
                    out,
                    "warning: g_tT was not increasing on the search bracket"
                );
            }
            (est.theta_hat, est.standard_error())
        }
        Method::Mle => {
            let est = mle_estimate(&sample)?;
            let _ = writeln!(out, "method: mle");
            let _ = writeln!(out, "n: {}", sample.n());
            let _ = writeln!(out, "theta_hat: {}", est.theta_hat);
            let _ = writeln!(out, "se: {}", est.standard_error());
            let _ = writeln!(out, "iterations: {}", est.iterations);
            let _ = writeln!(out, "score: {:e}", est.score);
            (est.theta_hat, est.standard_error())
        }
    };
    if args.pareto_x0.is_some() {
        let _ = writeln!(out, "alpha_hat: {}", 1.0 / theta_hat);
        let _ = writeln!(out, "alpha_se: {}", se / (theta_hat * theta_hat));
    }
    Ok(out)
}

fn cmd_are(args: &AreArgs) -> CliResult<String> {
    let model = ExponentialModel::new(args.theta).map_err(input_error)?;
    let boundaries = parse_cuts(&args.cuts)?;
    if args.dump_gtt {
        return dump_gtt(&model, &boundaries, args);
    }
    let table = are_table_with(
        &model,
        &boundaries,
        &args.t,
        &args.big_t,
        args.info_tail.into(),
    );
    if args.t.len() == 1 && args.big_t.len() == 1 && args.format == Format::Text {
        let cell = &table.cells[0][0];
        return Ok(cell
            .are
            .map_or_else(|| "-".to_string(), |a| format!("{a:.3}"))
            + "\n");
    }
    Ok(match args.format {
        Format::Text => table.render_text(),
        Format::Csv => table.render_csv(),
        Format::Json => table.render_json()? + "\n",
    })
}

/// `theta,t,T,g` rows over 201 log-spaced values in `[theta/100, 100 theta]`.
fn dump_gtt(
    model: &ExponentialModel,
    boundaries: &GroupBoundaries,
    args: &AreArgs,
) -> CliResult<String> {
    let mut out = String::from("theta,t,T,g\n");
    for &t in &args.t {
        for &big_t in &args.big_t {
            let Ok(window) = resolve_window(boundaries, t, big_t) else {
                continue;
            };
            for k in 0..=200 {
                let theta = model.theta() * 10f64.powf(-2.0 + 4.0 * k as f64 / 200.0);
                let g = population_truncated_moment(&ExponentialModel::new(theta)?, &window);
                let _ = writeln!(out, "{theta},{t},{big_t},{g}");
            }
        }
    }
    Ok(out)
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<String> {
    let mut config = SimulationConfig::from_json(&read(&args.config)?).map_err(input_error)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(Failure::input(
                "InvalidParameter",
                "--threads must be positive",
            ));
        }
        builder = builder.num_threads(threads);
    }
    let pool = builder.build().map_err(|e| Failure {
        code: 3,
        name: "ThreadPool".into(),
        message: e.to_string(),
    })?;
    let report = pool.install(|| run_study(&config)).map_err(input_error)?;
    let text = report.to_text();
    let Some(prefix) = &args.out else {
        return Ok(text);
    };
    let write = |ext: &str, body: &str| {
        let mut path = prefix.clone().into_os_string();
        path.push(ext);
        let path = PathBuf::from(path);
        fs::write(&path, body).map(|_| path).map_err(|e| Failure {
            code: 3,
            name: "Io".into(),
            message: e.to_string(),
        })
    };
    let csv = write(".csv", &report.to_csv())?;
    let txt = write(".txt", &text)?;
    let failures: u64 = report.rows.iter().map(|r| r.failures).sum();
    Ok(format!(
        "wrote {} and {}\nfailed replications: {failures}\n",
        csv.display(),
        txt.display()
    ))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Are(args) => cmd_are(args),
        Command::Simulate(args) => cmd_simulate(args),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}: {}", f.name, f.message);
            ExitCode::from(f.code)
        }
    }
}
