//! Command-line front end: simulate benchmark data, fit any of the four
//! model variants from CSV, emit posterior curve data, and compare fitted
//! models against a known truth.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use bart::{
    run_mcmc, BartError, Dataset64, Direction, ModelConfig64, ModelVariant, MonotoneSpec,
    PosteriorDraws64,
};

#[derive(Parser)]
#[command(name = "bart", version, about = "Bayesian tree-ensemble regression samplers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the benchmark dataset: x ~ U(-3,3), y ~ Bernoulli(Phi(f(x)))
    /// with a piecewise-linear monotone f.
    Simulate(SimulateArgs),
    /// Fit a model to a CSV file and write draws, traces, and a report.
    Fit(FitArgs),
    /// Evaluate posterior mean curves and pointwise bands on a grid.
    Curves(CurvesArgs),
    /// Compare two fitted models against a truth file on a grid.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of observations.
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory; writes data.csv and truth.csv.
    #[arg(long)]
    out: PathBuf,
    /// Truth grid as min,max,count.
    #[arg(long, default_value = "-3,3,100", allow_hyphen_values = true)]
    grid: GridSpec,
}

#[derive(Args)]
struct FitArgs {
    /// Optional JSON config file; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training data CSV (header row required).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Name of the outcome column.
    #[arg(long)]
    outcome: Option<String>,
    /// Model variant: bart, pbart, mbart, or pmbart.
    #[arg(long)]
    variant: Option<String>,
    /// Monotone columns as name[:+|-],... (monotone variants only).
    #[arg(long)]
    monotone: Option<String>,
    /// Ensemble size m.
    #[arg(long)]
    trees: Option<usize>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    burnin: Option<usize>,
    #[arg(long)]
    keep: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    numcut: Option<usize>,
    /// Output directory (draws/, traces.csv, report.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of independent chains with derived seeds.
    #[arg(long)]
    chains: Option<usize>,
}

#[derive(Args)]
struct CurvesArgs {
    /// Fit output directory (the one containing draws/).
    #[arg(long)]
    draws: PathBuf,
    #[arg(long, default_value = "-3,3,100", allow_hyphen_values = true)]
    grid: GridSpec,
    /// Credible level for the pointwise band.
    #[arg(long, default_value_t = 0.9)]
    level: f64,
    /// Output CSV path; defaults to <draws>/curves.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// First fit directory (label A).
    #[arg(long)]
    a: PathBuf,
    /// Second fit directory (label B).
    #[arg(long)]
    b: PathBuf,
    /// Truth CSV written by `simulate` (columns x,f,p).
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value = "-3,3,100", allow_hyphen_values = true)]
    grid: GridSpec,
    #[arg(long, default_value_t = 0.9)]
    level: f64,
    /// Optional JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug)]
struct GridSpec {
    min: f64,
    max: f64,
    count: usize,
}

impl GridSpec {
    fn points(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.min + step * i as f64).collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err("grid must be min,max,count".into());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| "invalid grid min")?;
        let max: f64 = parts[1].trim().parse().map_err(|_| "invalid grid max")?;
        let count: usize = parts[2].trim().parse().map_err(|_| "invalid grid count")?;
        if !(min < max) {
            return Err("grid min must be below max".into());
        }
        if count < 2 {
            return Err("grid needs at least 2 points".into());
        }
        Ok(GridSpec { min, max, count })
    }
}

enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn validation(e: impl std::fmt::Display) -> Self {
        CliError::Validation(e.to_string())
    }

    fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }

    fn from_runtime(e: BartError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<BartError> for CliError {
    fn from(e: BartError) -> Self {
        match e {
            BartError::Io { .. } | BartError::DrawStore(_) | BartError::NonConvergence(_) => {
                CliError::Runtime(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    if args.n < 1 {
        return Err(CliError::Validation("n must be at least 1".into()));
    }
    let sim = bart::sim::generate::<f64>(args.n, args.seed);
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", args.out.display())))?;

    let mut data_csv = String::from("x,y\n");
    for (x, y) in sim.x.iter().zip(sim.y.iter()) {
        writeln!(data_csv, "{x},{y}").expect("string write");
    }
    let data_path = args.out.join("data.csv");
    std::fs::write(&data_path, data_csv)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", data_path.display())))?;

    let mut truth_csv = String::from("x,f,p\n");
    for x in args.grid.points() {
        let f = bart::sim::signal(x);
        let p = bart::sim::true_probability(x);
        writeln!(truth_csv, "{x},{f},{p}").expect("string write");
    }
    let truth_path = args.out.join("truth.csv");
    std::fs::write(&truth_path, truth_csv)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", truth_path.display())))?;

    println!(
        "wrote {} observations to {} and the truth grid to {}",
        args.n,
        data_path.display(),
        truth_path.display()
    );
    Ok(())
}

/// JSON config file mirror of the fit flags; any present key supplies a
/// default that explicit flags override.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    data: Option<PathBuf>,
    outcome: Option<String>,
    variant: Option<String>,
    monotone: Option<String>,
    trees: Option<usize>,
    k: Option<f64>,
    alpha: Option<f64>,
    beta: Option<f64>,
    nu: Option<f64>,
    q: Option<f64>,
    burnin: Option<usize>,
    keep: Option<usize>,
    thin: Option<usize>,
    seed: Option<u64>,
    numcut: Option<usize>,
    out: Option<PathBuf>,
    chains: Option<usize>,
}

fn parse_monotone_spec(text: &str, data: &Dataset64) -> Result<MonotoneSpec, CliError> {
    let mut coords = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, dir) = match part.rsplit_once(':') {
            Some((name, "+")) => (name, Direction::Nondecreasing),
            Some((name, "-")) => (name, Direction::Nonincreasing),
            Some((_, other)) => {
                return Err(CliError::Validation(format!(
                    "monotone direction must be + or -, got '{other}'"
                )))
            }
            None => (part, Direction::Nondecreasing),
        };
        let coord = data.column_index(name).ok_or_else(|| {
            CliError::Validation(format!("monotone column '{name}' not found in data"))
        })?;
        coords.push((coord, dir));
    }
    if coords.is_empty() {
        return Err(CliError::Validation("empty monotone specification".into()));
    }
    Ok(MonotoneSpec { coords })
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let data_path = args
        .data
        .or(file.data)
        .ok_or_else(|| CliError::Validation("--data is required".into()))?;
    let outcome = args
        .outcome
        .or(file.outcome)
        .ok_or_else(|| CliError::Validation("--outcome is required".into()))?;
    let out_dir = args
        .out
        .or(file.out)
        .ok_or_else(|| CliError::Validation("--out is required".into()))?;
    let variant_name = args.variant.or(file.variant).unwrap_or_else(|| "bart".into());
    let chains = args.chains.or(file.chains).unwrap_or(1);
    if chains == 0 {
        return Err(CliError::Validation("--chains must be at least 1".into()));
    }

    let data = Dataset64::load_csv(&data_path, &outcome)?;

    let monotone_text = args.monotone.or(file.monotone);
    let variant = match variant_name.as_str() {
        "bart" | "pbart" => {
            if monotone_text.is_some() {
                return Err(CliError::Validation(format!(
                    "--monotone is only valid for mbart and pmbart, not {variant_name}"
                )));
            }
            if variant_name == "bart" {
                ModelVariant::Continuous
            } else {
                ModelVariant::Probit
            }
        }
        "mbart" | "pmbart" => {
            let text = monotone_text.ok_or_else(|| {
                CliError::Validation(format!("{variant_name} requires --monotone"))
            })?;
            let spec = parse_monotone_spec(&text, &data)?;
            if variant_name == "mbart" {
                ModelVariant::MonotoneContinuous(spec)
            } else {
                ModelVariant::ProbitMonotone(spec)
            }
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown variant '{other}' (expected bart, pbart, mbart, or pmbart)"
            )))
        }
    };

    let mut cfg = ModelConfig64::for_variant(variant);
    if let Some(v) = args.trees.or(file.trees) {
        cfg.num_trees = v;
    }
    if let Some(v) = args.k.or(file.k) {
        cfg.k = v;
    }
    if let Some(v) = args.alpha.or(file.alpha) {
        cfg.alpha = v;
    }
    if let Some(v) = args.beta.or(file.beta) {
        cfg.beta = v;
    }
    if let Some(v) = args.nu.or(file.nu) {
        cfg.nu = v;
    }
    if let Some(v) = args.q.or(file.q) {
        cfg.q = v;
    }
    if let Some(v) = args.burnin.or(file.burnin) {
        cfg.burn_in = v;
    }
    if let Some(v) = args.keep.or(file.keep) {
        cfg.keep = v;
    }
    if let Some(v) = args.thin.or(file.thin) {
        cfg.thin = v;
    }
    if let Some(v) = args.seed.or(file.seed) {
        cfg.seed = v;
    }
    if let Some(v) = args.numcut.or(file.numcut) {
        cfg.num_cut = v;
    }
    cfg.validate()?;

    if chains == 1 {
        fit_one_chain(&data, &cfg, &out_dir)?;
        println!("fit complete: {}", out_dir.display());
        return Ok(());
    }

    // Independent chains, derived seeds, one subdirectory each.
    let results: Vec<Result<(), CliError>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chain_idx in 0..chains {
            let data = &data;
            let base = cfg.clone();
            let dir = out_dir.join(format!("chain_{chain_idx:02}"));
            handles.push(scope.spawn(move || {
                let mut cfg = base;
                cfg.seed = derive_seed(cfg.seed, chain_idx as u64);
                fit_one_chain(data, &cfg, &dir)
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("chain thread panicked"))
            .collect()
    });
    for r in results {
        r?;
    }
    println!("fit complete: {chains} chains under {}", out_dir.display());
    Ok(())
}

fn derive_seed(base: u64, chain: u64) -> u64 {
    base.wrapping_add(chain.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn fit_one_chain(data: &Dataset64, cfg: &ModelConfig64, out_dir: &Path) -> Result<(), CliError> {
    let result = run_mcmc(data, cfg)?;
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", out_dir.display())))?;
    result
        .draws
        .save(out_dir.join("draws"))
        .map_err(CliError::from_runtime)?;
    bart::posterior::write_trace_csv(out_dir.join("traces.csv"), &result.trace)
        .map_err(CliError::from_runtime)?;

    let report = result.draws.fit_report(data);
    let metric = match report.metric {
        bart::FitMetric::LogLoss(v) => serde_json::json!({ "log_loss": v }),
        bart::FitMetric::Rmse(v) => serde_json::json!({ "rmse": v }),
    };
    let report_json = serde_json::json!({
        "variant": cfg.variant.name(),
        "n": data.n(),
        "covariates": data.column_names(),
        "outcome": data.outcome_name(),
        "draws": report.draws,
        "metric": metric,
        "mean_tree_depth": report.mean_tree_depth,
        "accept": {
            "birth_rate": report.birth_rate,
            "death_rate": report.death_rate,
            "birth_proposed": result.draws.accept.birth_proposed,
            "birth_accepted": result.draws.accept.birth_accepted,
            "death_proposed": result.draws.accept.death_proposed,
            "death_accepted": result.draws.accept.death_accepted,
            "skipped": result.draws.accept.skipped,
        },
        "config": {
            "trees": cfg.num_trees,
            "k": cfg.k,
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "nu": cfg.nu,
            "q": cfg.q,
            "numcut": cfg.num_cut,
            "burnin": cfg.burn_in,
            "keep": cfg.keep,
            "thin": cfg.thin,
            "seed": cfg.seed,
        },
    });
    let report_path = out_dir.join("report.json");
    let text = serde_json::to_string_pretty(&report_json).expect("report serializes");
    std::fs::write(&report_path, text + "\n")
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", report_path.display())))?;

    let summary = match report.metric {
        bart::FitMetric::LogLoss(v) => format!("log-loss {v:.4}"),
        bart::FitMetric::Rmse(v) => format!("RMSE {v:.4}"),
    };
    println!(
        "{}: {} draws, {summary}, mean depth {:.2}, accept birth {:.2}/death {:.2}",
        cfg.variant.name(),
        report.draws,
        report.mean_tree_depth,
        report.birth_rate,
        report.death_rate
    );
    Ok(())
}

fn load_fit_dir(dir: &Path) -> Result<PosteriorDraws64, CliError> {
    let draws_dir = dir.join("draws");
    if !draws_dir.is_dir() {
        return Err(CliError::Validation(format!(
            "no draw store at {}",
            draws_dir.display()
        )));
    }
    PosteriorDraws64::load(draws_dir).map_err(CliError::from)
}

fn cmd_curves(args: CurvesArgs) -> Result<(), CliError> {
    let draws = load_fit_dir(&args.draws)?;
    if draws.num_covariates() != 1 {
        return Err(CliError::Validation(
            "curve emission needs a single-covariate model".into(),
        ));
    }
    let grid: Vec<Vec<f64>> = args.grid.points().into_iter().map(|x| vec![x]).collect();
    let summary = draws.curve_summary(&grid, args.level)?;
    let out = args.out.unwrap_or_else(|| args.draws.join("curves.csv"));
    let mut buf = Vec::new();
    summary.write_csv(&mut buf).map_err(CliError::from_runtime)?;
    std::fs::write(&out, buf)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", out.display())))?;
    println!("wrote {} grid points to {}", grid.len(), out.display());
    Ok(())
}

struct ModelMetrics {
    rmse: f64,
    mean_band_width: f64,
    coverage: f64,
}

fn evaluate_against_truth(
    draws: &PosteriorDraws64,
    grid: &[f64],
    truth_p: &[f64],
    level: f64,
) -> Result<ModelMetrics, CliError> {
    if !draws.variant.is_probit() {
        return Err(CliError::Validation(
            "compare expects probit-variant fits (probability scale)".into(),
        ));
    }
    if draws.num_covariates() != 1 {
        return Err(CliError::Validation(
            "compare needs single-covariate models".into(),
        ));
    }
    let points: Vec<Vec<f64>> = grid.iter().map(|&x| vec![x]).collect();
    let summary = draws.curve_summary(&points, level)?;
    let mut sq_err = 0.0;
    let mut width = 0.0;
    let mut covered = 0usize;
    for i in 0..grid.len() {
        let err = summary.mean[i] - truth_p[i];
        sq_err += err * err;
        width += summary.upper[i] - summary.lower[i];
        if truth_p[i] >= summary.lower[i] && truth_p[i] <= summary.upper[i] {
            covered += 1;
        }
    }
    let m = grid.len() as f64;
    Ok(ModelMetrics {
        rmse: (sq_err / m).sqrt(),
        mean_band_width: width / m,
        coverage: covered as f64 / m,
    })
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let draws_a = load_fit_dir(&args.a)?;
    let draws_b = load_fit_dir(&args.b)?;

    let truth_text = std::fs::read_to_string(&args.truth)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", args.truth.display())))?;
    let mut truth: Vec<(f64, f64)> = Vec::new();
    for (idx, line) in truth_text.lines().enumerate() {
        if idx == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::Validation(format!(
                "{}:{}: truth rows must be x,f,p",
                args.truth.display(),
                idx + 1
            )));
        }
        let x: f64 = fields[0].trim().parse().map_err(|_| {
            CliError::Validation(format!("{}:{}: bad x", args.truth.display(), idx + 1))
        })?;
        let p: f64 = fields[2].trim().parse().map_err(|_| {
            CliError::Validation(format!("{}:{}: bad p", args.truth.display(), idx + 1))
        })?;
        truth.push((x, p));
    }

    let grid = args.grid.points();
    let mut truth_p = Vec::with_capacity(grid.len());
    for &x in &grid {
        let hit = truth
            .iter()
            .find(|(tx, _)| (tx - x).abs() < 1e-9)
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "grid/truth mismatch: no truth row for x = {x} in {}",
                    args.truth.display()
                ))
            })?;
        truth_p.push(hit.1);
    }

    let metrics_a = evaluate_against_truth(&draws_a, &grid, &truth_p, args.level)?;
    let metrics_b = evaluate_against_truth(&draws_b, &grid, &truth_p, args.level)?;

    let name_a = draws_a.variant.name();
    let name_b = draws_b.variant.name();
    println!(
        "model A ({name_a}): RMSE {:.5}, mean {}% band width {:.5}, coverage {:.3}",
        metrics_a.rmse,
        (args.level * 100.0).round() as u32,
        metrics_a.mean_band_width,
        metrics_a.coverage
    );
    println!(
        "model B ({name_b}): RMSE {:.5}, mean {}% band width {:.5}, coverage {:.3}",
        metrics_b.rmse,
        (args.level * 100.0).round() as u32,
        metrics_b.mean_band_width,
        metrics_b.coverage
    );
    println!(
        "band width ratio A/B: {:.4}; RMSE ratio A/B: {:.4}",
        metrics_a.mean_band_width / metrics_b.mean_band_width,
        metrics_a.rmse / metrics_b.rmse
    );

    if let Some(out) = args.out {
        let json = serde_json::json!({
            "level": args.level,
            "grid": { "min": args.grid.min, "max": args.grid.max, "count": args.grid.count },
            "a": { "variant": name_a, "rmse": metrics_a.rmse,
                   "mean_band_width": metrics_a.mean_band_width, "coverage": metrics_a.coverage },
            "b": { "variant": name_b, "rmse": metrics_b.rmse,
                   "mean_band_width": metrics_b.mean_band_width, "coverage": metrics_b.coverage },
        });
        let text = serde_json::to_string_pretty(&json).expect("report serializes");
        std::fs::write(&out, text + "\n")
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(())
}
