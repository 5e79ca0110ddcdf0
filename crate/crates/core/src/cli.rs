//! Command-line front end. Every subcommand validates its flags, calls one
//! library routine and renders the result as JSON or CSV.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::broadcast::{entropy_mc, root_deviation_probe, DeviationPoint, EntropyEstimate, TreeSpec};
use crate::channel::PottsChannel;
use crate::error::Error;
use crate::tables::{compute_table2, reproduce_table1, TABLE_Q};
use crate::thresholds::{
    binary_tree_ferro_threshold, cbar_detailed, chat_detailed, ferro_threshold, ising_ferro_threshold, kesten_stigum,
    threshold_report, OptimizerSettings, ThresholdReport,
};
use crate::tree::{galton_watson_tree, regular_tree, spherically_symmetric_tree, OffspringDistribution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "potts-tree", version, about = "Potts model extremality and reconstruction thresholds on trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Ferromagnetic, extremality and Kesten–Stigum thresholds
    Thresholds,
    /// The extremality constant c̄ and its one-dimensional restriction ĉ
    Cbar,
    /// Ferromagnetic ordering threshold on the d-ary tree
    Ferro,
    /// Kesten–Stigum threshold
    Ks,
    /// Reference tables for q = 5 (`--table 1` or `--table 2`)
    Tables,
    /// Monte-Carlo boundary entropy and root-deviation probe
    Simulate,
    /// Print a tree in the line-oriented text format
    TreeDump,
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Parser)]
pub struct RunConfig {
    #[arg(long, global = true)]
    pub q: Option<usize>,
    /// Number of children (regular tree)
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Offspring law "c1:p1,c2:p2,..." (Galton–Watson)
    #[arg(long, global = true)]
    pub offspring: Option<String>,
    /// Offspring count per generation "d0,d1,..." (spherically symmetric)
    #[arg(long, global = true, value_delimiter = ',')]
    pub generations: Option<Vec<usize>>,
    /// Reuse one Galton–Watson tree for every trial
    #[arg(long, global = true)]
    pub quenched: bool,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Deviation threshold for the root-deviation probe
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Depths probed when --eps is given (default 1..=depth)
    #[arg(long, global = true, value_delimiter = ',')]
    pub probe_depths: Option<Vec<usize>>,
    /// Write the deviation CSV here instead of stdout
    #[arg(long, global = true)]
    pub deviation_csv: Option<std::path::PathBuf>,
    #[arg(long, global = true)]
    pub table: Option<u8>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Significant digits in numeric output (1..=12)
    #[arg(long, global = true, default_value_t = 6)]
    pub precision: usize,
    /// Coarse grid size of the optimizers
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Random restarts of the simplex search
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    /// `--help` or `--version`: print and exit 0.
    Help(String),
    Usage(String),
    Numeric(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Help(_) => EXIT_OK,
            Self::Usage(_) => EXIT_USAGE,
            Self::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Help(m) => write!(f, "{m}"),
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Numeric(e) => write!(f, "numeric failure: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Numeric(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning what would be printed to stdout.
pub fn execute<I, T>(args: I) -> CliResult<String>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => CliError::Help(e.to_string()),
        _ => usage(e.render().to_string()),
    })?;
    dispatch(&cli)
}

pub fn dispatch(cli: &Cli) -> CliResult<String> {
    let cfg = &cli.config;
    if !(1..=12).contains(&cfg.precision) {
        return Err(usage(format!("--precision must be in 1..=12, got {}", cfg.precision)));
    }
    match cli.command {
        Command::Thresholds => cmd_thresholds(cfg),
        Command::Cbar => cmd_cbar(cfg),
        Command::Ferro => cmd_ferro(cfg),
        Command::Ks => cmd_ks(cfg),
        Command::Tables => cmd_tables(cfg),
        Command::Simulate => cmd_simulate(cfg),
        Command::TreeDump => cmd_tree_dump(cfg),
    }
}

/// Rounds to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn round_value(v: Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => json!(round_sig(n.as_f64().unwrap(), digits)),
        Value::Array(a) => Value::Array(a.into_iter().map(|x| round_value(x, digits)).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_value(x, digits))).collect()),
        other => other,
    }
}

fn render_json(v: Value, digits: usize) -> String {
    serde_json::to_string(&round_value(v, digits)).expect("json values serialize") + "\n"
}

fn csv_cell(v: &Value, digits: usize) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => round_sig(n.as_f64().unwrap(), digits).to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// CSV with a fixed header from rows of flat JSON objects.
fn render_csv(header: &[&str], rows: &[Map<String, Value>], digits: usize) -> String {
    let mut out = header.join(",") + "\n";
    for row in rows {
        let cells: Vec<String> = header.iter().map(|h| csv_cell(row.get(*h).unwrap_or(&Value::Null), digits)).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

fn render(cfg: &RunConfig, default: Format, header: &[&str], rows: Vec<Map<String, Value>>) -> String {
    match cfg.format.unwrap_or(default) {
        Format::Csv => render_csv(header, &rows, cfg.precision),
        Format::Json if rows.len() == 1 => render_json(Value::Object(rows.into_iter().next().unwrap()), cfg.precision),
        Format::Json => render_json(Value::Array(rows.into_iter().map(Value::Object).collect()), cfg.precision),
    }
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("object literal"),
    }
}

fn need_q(cfg: &RunConfig) -> CliResult<usize> {
    let q = cfg.q.ok_or_else(|| usage("--q is required"))?;
    if q < 2 {
        return Err(usage(format!("--q must be >= 2, got {q}")));
    }
    Ok(q)
}

fn need_beta(cfg: &RunConfig) -> CliResult<f64> {
    let beta = cfg.beta.ok_or_else(|| usage("--beta is required"))?;
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(usage(format!("--beta must be finite and >= 0, got {beta}")));
    }
    Ok(beta)
}

fn settings(cfg: &RunConfig) -> CliResult<OptimizerSettings> {
    let mut s = OptimizerSettings { rng_seed: cfg.seed, ..Default::default() };
    if let Some(g) = cfg.grid {
        s.grid_points = g;
    }
    if let Some(r) = cfg.restarts {
        s.random_restarts = r;
    }
    s.validate().map_err(|e| usage(e.to_string()))?;
    Ok(s)
}

fn offspring(cfg: &RunConfig) -> CliResult<OffspringDistribution> {
    match (cfg.d, &cfg.offspring) {
        (Some(_), Some(_)) => Err(usage("give either --d or --offspring, not both")),
        (Some(d), None) => Ok(OffspringDistribution::deterministic(d)),
        (None, Some(s)) => OffspringDistribution::parse(s).map_err(|e| usage(e.to_string())),
        (None, None) => Err(usage("--d or --offspring is required")),
    }
}

fn report_json(r: &ThresholdReport) -> Map<String, Value> {
    object(serde_json::to_value(r).expect("report serializes"))
}

const THRESHOLD_COLUMNS: [&str; 8] =
    ["q", "offspring_mean", "beta_ferro", "beta_c", "lambda_c", "beta_ks", "cbar_at_beta_c", "epsilon_excess"];

pub fn cmd_thresholds(cfg: &RunConfig) -> CliResult<String> {
    let q = need_q(cfg)?;
    let dist = offspring(cfg)?;
    if !(dist.mean() > 1.0) {
        return Err(usage(format!("offspring mean must exceed 1, got {}", dist.mean())));
    }
    let s = settings(cfg)?;
    let report = threshold_report(q, &dist, &s)?;
    Ok(render(cfg, Format::Json, &THRESHOLD_COLUMNS, vec![report_json(&report)]))
}

pub fn cmd_cbar(cfg: &RunConfig) -> CliResult<String> {
    let q = need_q(cfg)?;
    let beta = need_beta(cfg)?;
    if q > crate::thresholds::CBAR_MAX_Q {
        return Err(usage(format!("--q must be <= {} for the simplex search", crate::thresholds::CBAR_MAX_Q)));
    }
    let s = settings(cfg)?;
    let ch = PottsChannel::new(q, beta)?;
    let full = cbar_detailed(&ch, &s)?;
    let slice = chat_detailed(&ch, &s);
    let l2 = ch.lambda2();
    let row = object(json!({
        "q": q,
        "beta": beta,
        "lambda2": l2,
        "cbar": full.value,
        "chat": slice.value,
        "cbar_minus_chat": full.value - slice.value,
        "excess": if l2 > 0.0 { json!(full.value / l2 - 1.0) } else { Value::Null },
        "cbar_argmax": full.argmax.entries(),
        "chat_argmax_x": slice.x,
    }));
    Ok(render(cfg, Format::Json, &["q", "beta", "lambda2", "cbar", "chat", "cbar_minus_chat", "excess"], vec![row]))
}

pub fn cmd_ferro(cfg: &RunConfig) -> CliResult<String> {
    let q = need_q(cfg)?;
    let d = cfg.d.ok_or_else(|| usage("--d is required"))?;
    if d < 2 {
        return Err(usage(format!("--d must be >= 2, got {d}")));
    }
    let beta = ferro_threshold(d, q)?;
    let closed = match (q, d) {
        (2, _) => Some(ising_ferro_threshold(d)),
        (_, 2) => Some(binary_tree_ferro_threshold(q)),
        _ => None,
    };
    let row = object(json!({ "q": q, "d": d, "beta_ferro": beta, "closed_form": closed }));
    Ok(render(cfg, Format::Json, &["q", "d", "beta_ferro", "closed_form"], vec![row]))
}

pub fn cmd_ks(cfg: &RunConfig) -> CliResult<String> {
    let q = need_q(cfg)?;
    let mean = offspring(cfg)?.mean();
    if !(mean > 1.0) {
        return Err(usage(format!("offspring mean must exceed 1, got {mean}")));
    }
    let ks = kesten_stigum(mean, q)?;
    let row = object(json!({ "q": q, "offspring_mean": mean, "beta_ks": ks.beta, "lambda_ks": ks.lambda }));
    Ok(render(cfg, Format::Json, &["q", "offspring_mean", "beta_ks", "lambda_ks"], vec![row]))
}

pub const TABLE1_COLUMNS: [&str; 4] = ["d", "epsilon_r", "beta_r", "lambda_r"];
pub const TABLE2_COLUMNS: [&str; 3] = ["d", "beta_c", "lambda_c"];

pub fn cmd_tables(cfg: &RunConfig) -> CliResult<String> {
    match cfg.table {
        Some(1) => {
            if cfg.q.is_some_and(|q| q != TABLE_Q) {
                return Err(usage("table 1 is only available for q = 5"));
            }
            let rows = reproduce_table1()?
                .iter()
                .map(|r| object(serde_json::to_value(r).expect("row serializes")))
                .collect();
            Ok(render(cfg, Format::Csv, &TABLE1_COLUMNS, rows))
        }
        Some(2) => {
            let q = cfg.q.unwrap_or(TABLE_Q);
            if q < 2 {
                return Err(usage(format!("--q must be >= 2, got {q}")));
            }
            let s = settings(cfg)?;
            let rows = compute_table2(q, &s)?
                .iter()
                .map(|r| object(serde_json::to_value(r).expect("row serializes")))
                .collect();
            Ok(render(cfg, Format::Csv, &TABLE2_COLUMNS, rows))
        }
        Some(t) => Err(usage(format!("--table must be 1 or 2, got {t}"))),
        None => Err(usage("--table is required")),
    }
}

fn tree_spec(cfg: &RunConfig) -> CliResult<TreeSpec> {
    let given = [cfg.d.is_some(), cfg.offspring.is_some(), cfg.generations.is_some()];
    if given.iter().filter(|&&g| g).count() > 1 {
        return Err(usage("give only one of --d, --offspring, --generations"));
    }
    if let Some(d) = cfg.d {
        if d == 0 {
            return Err(usage("--d must be >= 1"));
        }
        return Ok(TreeSpec::Regular(d));
    }
    if let Some(g) = &cfg.generations {
        if g.contains(&0) {
            return Err(usage("--generations entries must be >= 1"));
        }
        return Ok(TreeSpec::SphericallySymmetric(g.clone()));
    }
    if cfg.offspring.is_some() {
        return Ok(TreeSpec::GaltonWatson { offspring: offspring(cfg)?, quenched: cfg.quenched });
    }
    Err(usage("one of --d, --offspring, --generations is required"))
}

fn depth_for(cfg: &RunConfig, spec: &TreeSpec) -> CliResult<usize> {
    match (cfg.depth, spec) {
        (Some(n), TreeSpec::SphericallySymmetric(g)) if n > g.len() => {
            Err(usage(format!("--depth {n} exceeds the {} generations given", g.len())))
        }
        (Some(n), _) => Ok(n),
        (None, TreeSpec::SphericallySymmetric(g)) => Ok(g.len()),
        (None, _) => Err(usage("--depth is required")),
    }
}

pub const DEVIATION_COLUMNS: [&str; 5] = ["depth", "fraction", "std_error", "max_over_symbols", "eps"];

/// Entropy estimate, plus the deviation rows when `--eps` is given.
pub fn run_simulation(cfg: &RunConfig) -> CliResult<(EntropyEstimate, Option<Vec<DeviationPoint>>)> {
    let q = need_q(cfg)?;
    let beta = need_beta(cfg)?;
    let spec = tree_spec(cfg)?;
    let depth = depth_for(cfg, &spec)?;
    let trials = cfg.trials.ok_or_else(|| usage("--trials is required"))?;
    if trials == 0 {
        return Err(usage("--trials must be >= 1"));
    }
    let ch = PottsChannel::new(q, beta).map_err(|e| usage(e.to_string()))?;
    let probe = match cfg.eps {
        Some(eps) => {
            let limit = 1.0 - 1.0 / q as f64;
            if !(eps > 0.0 && eps < limit) {
                return Err(usage(format!("--eps must lie in (0, {limit}), got {eps}")));
            }
            let depths = cfg.probe_depths.clone().unwrap_or_else(|| (1..=depth).collect());
            if let TreeSpec::SphericallySymmetric(g) = &spec {
                if depths.iter().any(|&n| n > g.len()) {
                    return Err(usage("--probe-depths exceed the generations given"));
                }
            }
            Some((eps, depths))
        }
        None => None,
    };
    let estimate = entropy_mc(&spec, &ch, depth, trials, cfg.seed)?;
    let deviations = match probe {
        Some((eps, depths)) => Some(root_deviation_probe(&spec, &ch, &depths, trials, cfg.seed, eps)?),
        None => None,
    };
    Ok((estimate, deviations))
}

pub fn cmd_simulate(cfg: &RunConfig) -> CliResult<String> {
    let (estimate, deviations) = run_simulation(cfg)?;
    let header = ["q", "beta", "d_spec", "depth", "trials", "seed", "mean", "std_error"];
    let row = object(serde_json::to_value(&estimate).expect("estimate serializes"));
    let mut out = render(cfg, Format::Json, &header, vec![row]);
    if let Some(points) = deviations {
        let eps = cfg.eps.expect("probe runs only with --eps");
        let rows = points
            .iter()
            .map(|p| {
                let mut m = object(serde_json::to_value(p).expect("point serializes"));
                m.insert("eps".into(), json!(eps));
                m
            })
            .collect::<Vec<_>>();
        let csv = render_csv(&DEVIATION_COLUMNS, &rows, cfg.precision);
        match &cfg.deviation_csv {
            Some(path) => std::fs::write(path, csv).map_err(|e| usage(format!("{}: {e}", path.display())))?,
            None => out.push_str(&csv),
        }
    }
    Ok(out)
}

pub fn cmd_tree_dump(cfg: &RunConfig) -> CliResult<String> {
    let spec = tree_spec(cfg)?;
    let depth = depth_for(cfg, &spec)?;
    let tree = match &spec {
        TreeSpec::Regular(d) => regular_tree(*d, depth)?,
        TreeSpec::SphericallySymmetric(g) => spherically_symmetric_tree(&g[..depth])?,
        TreeSpec::GaltonWatson { offspring, .. } => galton_watson_tree(offspring, depth, cfg.seed)?,
        TreeSpec::Fixed(t) => Arc::clone(t).as_ref().clone(),
    };
    Ok(tree.to_text())
}
