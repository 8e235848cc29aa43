//! The `sop-basins` command line.
//!
//! Exit codes: 0 on success, 1 on invalid input (flags, files, output path),
//! 2 when an internal invariant fails. Every artifact carries the effective
//! flag set, seed included: a leading `# key=value …` line in CSV, a `meta`
//! object in JSON. `--out` and `--threads` are left out of that echo because
//! they never change the content.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::brd::{brd_run, compute_basins};
use crate::error::{Error, Result};
use crate::game::{expected_num_equilibria, find_equilibria, sample_uniform_potential, ActionProfile, Potential};
use crate::incremental::{epsilon_stopped_construct, incremental_construct, simulate_aux_processes, Completion};
use crate::montecarlo::{
    default_threads, estimate_basin_profile, estimate_rank_distribution, run_experiment, ExperimentConfig,
    GeneratorKind, Target,
};
use crate::oracle::{enumerate_exact, verify_basins_all_starts, StatisticKind};
use crate::rng::trial_seed;
use crate::theory;
use crate::util::fmt_real;

#[derive(Debug, Parser)]
#[command(name = "sop-basins", version, about = "Basins of attraction in random strict ordinal potential games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a potential.
    Gen(GenArgs),
    /// List the pure Nash equilibria of a potential.
    Equilibria(GameArgs),
    /// Run best-response dynamics from one start.
    Brd(BrdArgs),
    /// Basins of attraction of every equilibrium.
    Basins(GameArgs),
    /// Incremental construction: full, ε-stopped (--epsilon) or truncated (--t-max).
    Incremental(IncrementalArgs),
    /// Monte Carlo estimators.
    Experiment(ExperimentArgs),
    /// Limit curves φ and Φ on a grid of ε.
    Theory(TheoryArgs),
    /// Exhaustive and brute-force checks.
    Verify(VerifyArgs),
    /// Simulated basin profile and rank CDF next to their limits.
    PlotData(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GenKind {
    Uniform,
    Incremental,
}

#[derive(Debug, Clone, Args, Serialize)]
struct GenArgs {
    #[arg(long)]
    k: usize,
    /// Random seed; generated and reported when absent.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "uniform")]
    generator: GenKind,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// A game read from `--input` or sampled from `--k`/`--seed`.
#[derive(Debug, Clone, Args, Serialize)]
struct GameArgs {
    /// Potential file, CSV or JSON (chosen by extension).
    #[arg(long, conflicts_with = "k")]
    input: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct BrdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    game: GameArgs,
    /// Starting profile as `row,col` (1-based).
    #[arg(long, default_value = "1,1")]
    start: String,
}

#[derive(Debug, Clone, Args, Serialize)]
struct IncrementalArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Stop at the first step with floor(epsilon*k) greens, then fill uniformly.
    #[arg(long, conflicts_with = "t_max")]
    epsilon: Option<f64>,
    /// Run only this many steps.
    #[arg(long)]
    t_max: Option<u64>,
    /// Emit the per-step trace (CSV) instead of the final potential.
    #[arg(long)]
    trace: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct ExperimentArgs {
    /// basins | ranks | worst-eq | incremental
    #[arg(long, default_value = "basins")]
    target: String,
    #[arg(long, default_value_t = 1000)]
    k: usize,
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    /// Comma-separated ε values. Defaults: 0.05,0.1,0.2,0.3,0.4 (basins, ranks), 0.3 (incremental).
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    /// uniform | incremental | exhaustive
    #[arg(long, default_value = "uniform")]
    generator: String,
    /// Worker threads; defaults to $SOP_BASINS_THREADS, else all cores.
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fluid-limit horizon T (incremental target).
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    /// Draw full start profiles instead of columns (ranks target).
    #[arg(long)]
    full_starts: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct TheoryArgs {
    /// Grid step on [0, 1/2]; 0.5/grid must be an integer.
    #[arg(long, default_value_t = 0.005)]
    grid: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct VerifyArgs {
    /// exact-small-k | basins | theory | all
    #[arg(long, default_value = "all")]
    suite: String,
    /// Games per k for the basins suite.
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct PlotArgs {
    #[arg(long, default_value_t = 250)]
    k: usize,
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("internal error: {msg}");
            2
        }
    }
}

enum Failure {
    Input(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Invariant(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CliResult = std::result::Result<(), Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn resolve_seed(seed: &mut Option<u64>) -> u64 {
    *seed.get_or_insert_with(|| {
        let nanos = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        let s = trial_seed(nanos, std::process::id() as u64);
        eprintln!("seed: {s}");
        s
    })
}

fn meta(command: &str, args: &impl Serialize) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if let Ok(Value::Object(fields)) = serde_json::to_value(args) {
        m.extend(fields);
    }
    Value::Object(m)
}

fn meta_line(meta: &Value) -> String {
    let mut line = String::from("#");
    if let Value::Object(m) = meta {
        for (key, v) in m {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Null => "none".into(),
                Value::Array(xs) => xs.iter().map(value_text).collect::<Vec<_>>().join(";"),
                other => value_text(other),
            };
            let _ = write!(line, " {key}={v}");
        }
    }
    line.push('\n');
    line
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().filter(|_| n.is_f64()).map(fmt_real).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn with_meta(meta: Value, body: Value) -> Value {
    let mut out = Map::new();
    out.insert("meta".into(), meta);
    if let Value::Object(fields) = body {
        out.extend(fields);
    } else {
        out.insert("result".into(), body);
    }
    Value::Object(out)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| input(format!("--out {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_csv(out: Option<&Path>, meta: &Value, body: &str) -> CliResult {
    emit(out, &format!("{}{body}", meta_line(meta)))
}

fn emit_json(out: Option<&Path>, meta: Value, body: Value) -> CliResult {
    let text = serde_json::to_string_pretty(&with_meta(meta, body)).map_err(Error::from)?;
    emit(out, &(text + "\n"))
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Gen(a) => gen(a),
        Command::Equilibria(a) => equilibria(a),
        Command::Brd(a) => brd(a),
        Command::Basins(a) => basins(a),
        Command::Incremental(a) => incremental(a),
        Command::Experiment(a) => experiment(a),
        Command::Theory(a) => theory_grid(a),
        Command::Verify(a) => verify(a),
        Command::PlotData(a) => plot_data(a),
    }
}

fn gen(mut a: GenArgs) -> CliResult {
    let seed = resolve_seed(&mut a.seed);
    let p = match a.generator {
        GenKind::Uniform => sample_uniform_potential(a.k, seed).map_err(|e| input(format!("--k: {e}")))?,
        GenKind::Incremental => incremental_construct(a.k, seed, false)
            .map_err(|e| input(format!("--k: {e}")))?
            .potential
            .ok_or_else(|| Failure::Invariant("construction produced no potential".into()))?,
    };
    write_potential(&p, a.format, &meta("gen", &a), a.out.as_deref())
}

fn write_potential(p: &Potential, format: Format, meta: &Value, out: Option<&Path>) -> CliResult {
    match format {
        Format::Csv => emit_csv(out, meta, &p.to_csv()),
        Format::Json => emit_json(out, meta.clone(), serde_json::to_value(p).map_err(Error::from)?),
    }
}

fn load_game(a: &mut GameArgs) -> std::result::Result<Potential, Failure> {
    if let Some(path) = &a.input {
        let text = std::fs::read_to_string(path).map_err(|e| input(format!("--input {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|x| x == "json") || text.trim_start().starts_with('{');
        let parsed = if is_json { Potential::from_json(&text) } else { Potential::from_csv(&text) };
        return parsed.map_err(|e| input(format!("--input {}: {e}", path.display())));
    }
    let Some(k) = a.k else {
        return Err(input("either --input or --k is required"));
    };
    let seed = resolve_seed(&mut a.seed);
    sample_uniform_potential(k, seed).map_err(|e| input(format!("--k: {e}")))
}

fn equilibria(mut a: GameArgs) -> CliResult {
    let p = load_game(&mut a)?;
    let eqs = find_equilibria(&p);
    let meta = meta("equilibria", &a);
    match a.format {
        Format::Csv => {
            let mut body = String::from("rank,row,col,value\n");
            for e in eqs.entries() {
                let _ = writeln!(body, "{},{},{},{}", e.rank, e.profile.row, e.profile.col, e.potential_value);
            }
            emit_csv(a.out.as_deref(), &meta, &body)
        }
        Format::Json => emit_json(a.out.as_deref(), meta, json!({ "w": eqs.count(), "equilibria": eqs.entries() })),
    }
}

fn parse_start(s: &str) -> std::result::Result<ActionProfile, Failure> {
    let bad = || input(format!("--start: expected row,col, got '{s}'"));
    let (r, c) = s.split_once(',').ok_or_else(bad)?;
    let row = r.trim().parse().map_err(|_| bad())?;
    let col = c.trim().parse().map_err(|_| bad())?;
    Ok(ActionProfile::new(row, col))
}

fn brd(mut a: BrdArgs) -> CliResult {
    let start = parse_start(&a.start)?;
    let p = load_game(&mut a.game)?;
    if !p.contains(start) {
        return Err(input(format!("--start: {start} outside [1,{}]x[1,{}]", p.k(), p.k())));
    }
    let trace = brd_run(&p, start)?;
    let meta = meta("brd", &a);
    match a.game.format {
        Format::Csv => {
            let mut body = String::from("t,row,col,value\n");
            for (t, x) in trace.path.iter().enumerate() {
                let _ = writeln!(body, "{t},{},{},{}", x.row, x.col, p.value(*x));
            }
            emit_csv(a.game.out.as_deref(), &meta, &body)
        }
        Format::Json => emit_json(a.game.out.as_deref(), meta, serde_json::to_value(&trace).map_err(Error::from)?),
    }
}

fn basins(mut a: GameArgs) -> CliResult {
    let p = load_game(&mut a)?;
    let eqs = find_equilibria(&p);
    let map = compute_basins(&p)?;
    let meta = meta("basins", &a);
    match a.format {
        Format::Csv => {
            let mut body = String::from("column,absorbed_rank,absorbed_value\n");
            for (i, &rank) in map.column_to_rank.iter().enumerate() {
                let value = eqs.by_rank(rank).map(|e| e.potential_value).unwrap_or(0);
                let _ = writeln!(body, "{},{rank},{value}", i + 1);
            }
            emit_csv(a.out.as_deref(), &meta, &body)
        }
        Format::Json => {
            let sizes: Map<String, Value> =
                map.basin_sizes.iter().enumerate().map(|(i, s)| ((i + 1).to_string(), json!(s))).collect();
            emit_json(a.out.as_deref(), meta, json!({ "w": eqs.count(), "basin_sizes": sizes }))
        }
    }
}

fn incremental(mut a: IncrementalArgs) -> CliResult {
    let seed = resolve_seed(&mut a.seed);
    let trace = if let Some(eps) = a.epsilon {
        epsilon_stopped_construct(a.k, eps, seed, Completion::Uniform, a.trace)
            .map_err(|e| input(format!("--epsilon/--k: {e}")))?
    } else if let Some(t_max) = a.t_max {
        simulate_aux_processes(a.k, seed, t_max).map_err(|e| input(format!("--t-max/--k: {e}")))?
    } else {
        incremental_construct(a.k, seed, a.trace).map_err(|e| input(format!("--k: {e}")))?
    };
    let meta = meta("incremental", &a);
    match a.format {
        Format::Csv if a.trace || a.t_max.is_some() => emit_csv(a.out.as_deref(), &meta, &trace.trace_csv()),
        Format::Csv => match &trace.potential {
            Some(p) => emit_csv(a.out.as_deref(), &meta, &p.to_csv()),
            None => Err(input("--format csv without --trace needs a completed potential")),
        },
        Format::Json => {
            let greens: Vec<Value> =
                trace.greens.iter().map(|(cell, v)| json!({ "row": cell.row, "col": cell.col, "value": v })).collect();
            let mut body = json!({
                "k": trace.k,
                "tau": trace.tau,
                "final": trace.last,
                "greens": greens,
            });
            if let Some(p) = &trace.potential {
                body["potential"] = serde_json::to_value(p).map_err(Error::from)?;
            }
            if a.trace {
                body["trace"] = serde_json::to_value(&trace.snapshots).map_err(Error::from)?;
            }
            emit_json(a.out.as_deref(), meta, body)
        }
    }
}

fn experiment(mut a: ExperimentArgs) -> CliResult {
    let target: Target = a.target.parse().map_err(|e: Error| input(format!("--target: {e}")))?;
    let generator: GeneratorKind = a.generator.parse().map_err(|e: Error| input(format!("--generator: {e}")))?;
    let seed = resolve_seed(&mut a.seed);
    let epsilons = a.epsilon.get_or_insert_with(|| match target {
        Target::Incremental => vec![0.3],
        _ => vec![0.05, 0.1, 0.2, 0.3, 0.4],
    });
    let mut cfg = ExperimentConfig::new(a.k, a.trials, seed)
        .with_epsilons(epsilons)
        .with_generator(generator)
        .with_threads(a.threads.unwrap_or_else(default_threads));
    cfg.horizon = a.horizon;
    cfg.full_profile_starts = a.full_starts;
    cfg.validate(target).map_err(|e| input(format!("flags: {e}")))?;
    let report = run_experiment(target, &cfg)?;
    let meta = meta("experiment", &a);
    match a.format {
        Format::Csv => emit_csv(a.out.as_deref(), &meta, &report.to_csv()),
        Format::Json => emit_json(a.out.as_deref(), meta, serde_json::to_value(&report).map_err(Error::from)?),
    }
}

fn theory_grid(a: TheoryArgs) -> CliResult {
    let steps = 0.5 / a.grid;
    if a.grid.is_nan() || a.grid <= 0.0 || (steps - steps.round()).abs() > 1e-9 || steps.round() < 1.0 {
        return Err(input(format!("--grid: 0.5 must be an integer multiple of the step, got {}", a.grid)));
    }
    let n = steps.round() as u64;
    let mut body = String::from("epsilon,phi,Phi\n");
    for i in 0..=n {
        let eps = if i == n { 0.5 } else { i as f64 * 0.5 / n as f64 };
        let phi = theory::basin_limit(eps)?;
        let cdf = theory::rank_cdf_limit(eps)?;
        let _ = writeln!(body, "{},{},{}", fmt_real(eps), fmt_real(phi), fmt_real(cdf));
    }
    emit_csv(a.out.as_deref(), &meta("theory", &a), &body)
}

fn verify(mut a: VerifyArgs) -> CliResult {
    let suites: &[&str] = match a.suite.as_str() {
        "all" => &["exact-small-k", "basins", "theory"],
        "exact-small-k" => &["exact-small-k"],
        "basins" => &["basins"],
        "theory" => &["theory"],
        other => return Err(input(format!("--suite: unknown suite '{other}' (exact-small-k|basins|theory|all)"))),
    };
    let needs_seed = suites.contains(&"basins");
    let seed = if needs_seed { Some(resolve_seed(&mut a.seed)) } else { None };
    let mut log = meta_line(&meta("verify", &a));
    let mut ok = true;
    for suite in suites {
        let (passed, text) = match *suite {
            "exact-small-k" => verify_exact()?,
            "basins" => verify_basins(a.trials, seed.unwrap_or(0))?,
            _ => verify_theory()?,
        };
        ok &= passed;
        log.push_str(&text);
    }
    emit(a.out.as_deref(), &log)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant("verification failed".into()))
    }
}

fn verify_exact() -> std::result::Result<(bool, String), Failure> {
    let mut means = Vec::new();
    let mut ok = true;
    for k in 1..=3 {
        let dist = enumerate_exact(k, StatisticKind::W)?;
        ok &= dist.mean_w == expected_num_equilibria(k)?;
        means.push(dist.mean_w.to_string());
    }
    let status = if ok { "ok" } else { "FAILED" };
    Ok((ok, format!("E[W]: {}\nexact-small-k: {status} (k^2/(2k-1) for k = 1, 2, 3)\n", means.join(", "))))
}

fn verify_basins(trials: u64, seed: u64) -> std::result::Result<(bool, String), Failure> {
    let mut text = String::new();
    let mut ok = true;
    for k in 2..=8u64 {
        let mut failures = 0u64;
        for i in 0..trials {
            let p = sample_uniform_potential(k as usize, trial_seed(seed, k * 1_000_003 + i))?;
            if !verify_basins_all_starts(&p)? {
                failures += 1;
            }
        }
        ok &= failures == 0;
        let _ = writeln!(text, "basins k={k}: {} of {trials} games agree with all-starts BRD", trials - failures);
    }
    Ok((ok, text))
}

fn verify_theory() -> std::result::Result<(bool, String), Failure> {
    let mut checks: Vec<(&str, f64, f64)> = Vec::new();
    let phi = |e: f64| theory::basin_limit(e).expect("in range");
    checks.push(("integral of phi = 1", (theory::integrate(phi, 0.0, 0.5, 1e-11) - 1.0).abs(), 1e-6));
    checks.push((
        "integral of eps*phi = e - 5/2",
        (theory::integrate(|e| e * phi(e), 0.0, 0.5, 1e-11) - theory::mean_rank_limit()).abs(),
        1e-8,
    ));
    let h = 1e-5;
    let fd = (1..50)
        .map(|i| {
            let e = i as f64 * 0.01;
            let d = (theory::rank_cdf_limit(e + h)? - theory::rank_cdf_limit(e - h)?) / (2.0 * h);
            Ok((d - phi(e)).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(("Phi' = phi", fd, 1e-6));
    let g_err = [0.05, 0.1, 0.2, 0.3, 0.4, 0.49]
        .iter()
        .map(|&e| Ok((theory::ode_solution(theory::tau_limit(e)?)?.g - e).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(("g(tau_limit(eps)) = eps", g_err, 1e-12));
    checks.push(("L_10000(1) vs e - 1", (theory::sum_product(10_000, 1.0)? - (std::f64::consts::E - 1.0)).abs(), 0.01));
    checks.push((
        "conditional basin sum at k=10000, r=c=2000 vs phi(0.18)",
        (theory::conditional_basin_sum(10_000, 2000, 2000)? - phi(0.18)).abs(),
        0.02,
    ));
    let mut text = String::new();
    let mut ok = true;
    for (name, err, tol) in checks {
        let pass = err <= tol;
        ok &= pass;
        let _ = writeln!(
            text,
            "theory {}: {name} (error {}, tolerance {})",
            if pass { "ok" } else { "FAILED" },
            fmt_real(err),
            fmt_real(tol)
        );
    }
    Ok((ok, text))
}

fn plot_data(mut a: PlotArgs) -> CliResult {
    let seed = resolve_seed(&mut a.seed);
    let epsilons = a.epsilon.get_or_insert_with(|| (1..=9).map(|i| i as f64 * 0.05).collect()).clone();
    let threads = a.threads.unwrap_or_else(default_threads);
    let cfg = ExperimentConfig::new(a.k, a.trials, seed).with_epsilons(&epsilons).with_threads(threads);
    cfg.validate(Target::Basins).map_err(|e| input(format!("flags: {e}")))?;
    let basins = estimate_basin_profile(&cfg)?;
    let ranks = estimate_rank_distribution(&cfg)?;
    let rows = basins.basins.unwrap_or_default();
    let cdf = ranks.ranks.map(|r| r.cdf).unwrap_or_default();
    let mut body = String::from("epsilon,mean_basin_over_k,std_err,phi,empirical_rank_cdf,Phi\n");
    for (b, c) in rows.iter().zip(&cdf) {
        let _ = writeln!(
            body,
            "{},{},{},{},{},{}",
            fmt_real(b.epsilon),
            fmt_real(b.mean_basin_over_k),
            fmt_real(b.std_err),
            fmt_real(b.phi_theory),
            fmt_real(c.empirical),
            fmt_real(c.theory)
        );
    }
    emit_csv(a.out.as_deref(), &meta("plot-data", &a), &body)
}
