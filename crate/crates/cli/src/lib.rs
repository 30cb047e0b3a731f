//! The `gensys` command-line front end.
//!
//! Exit codes: 0 realizable, 1 unrealizable, 2 unknown, 3 input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gensys_core::bench::{cinderella, cinderella_disjunctive, random_bounded_game, run_table, TableCase};
use gensys_core::dsl::{emit_spec, parse_spec, print_formula};
use gensys_core::engine::{
    check_strategy_closure, extract_strategy, solve, Config, Player, Strategy, StrategyEntry, SynthesisResult,
    TraceRetention, Verdict,
};
use gensys_core::game::{GameSpec, Objective};
use gensys_core::oracle::{simulate_play, PlayEnd};
use gensys_core::{Assignment, Formula, Rational};

pub const EXIT_INPUT: i32 = 3;

/// Environment variable holding the default iteration budget.
pub const MAX_ITERS_ENV: &str = "GENSYS_MAX_ITERS";

#[derive(Parser, Debug)]
#[command(name = "gensys", version, about = "Synthesize winning regions and strategies of infinite-state games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a game and print its verdict, region and strategy.
    Synth(SynthArgs),
    /// Check a region/strategy pair for closure.
    Check(CheckArgs),
    /// Play the synthesized strategy against a randomized environment.
    Simulate(SimulateArgs),
    /// Benchmark generators and the verdict table.
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Args, Debug)]
struct SynthArgs {
    spec: PathBuf,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Print every iterate.
    #[arg(long)]
    trace: bool,
    /// Also write the result as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Show inert strategy entries.
    #[arg(long)]
    verbose: bool,
    /// Starting player of a reachability game.
    #[arg(long, value_enum, default_value_t = StartArg::Controller)]
    start: StartArg,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StartArg {
    Controller,
    Environment,
}

#[derive(Args, Debug)]
struct CheckArgs {
    spec: PathBuf,
    /// An s-expression, or a JSON result with a `region` field.
    #[arg(long)]
    region: PathBuf,
    /// A JSON array of `{condition, move}`, or a JSON result with a `strategy` field.
    #[arg(long)]
    strategy: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    spec: PathBuf,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Initial state, e.g. `b1=0,b2=1/2`.
    #[arg(long)]
    init: String,
    #[arg(long)]
    max_iters: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum BenchCommand {
    /// Emit a Cinderella spec.
    Cinderella {
        #[arg(long, default_value_t = 5)]
        buckets: usize,
        #[arg(long)]
        capacity: String,
        /// Safe set "some bucket holds at most C" instead of "every bucket".
        #[arg(long)]
        disjunctive: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a seeded random bounded game.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        bound: i64,
        #[arg(long, default_value = "safety")]
        objective: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve Cinderella across capacities and print the verdict table.
    Table {
        #[arg(long, default_value_t = 5)]
        buckets: usize,
        #[arg(long, value_delimiter = ',', default_value = "3,2.5,2,1.8,1.6,1.5,1.4")]
        capacities: Vec<String>,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        /// Per-case timeout in seconds.
        #[arg(long)]
        timeout: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Write each case's spec into this directory.
        #[arg(long)]
        spec_dir: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// An error that ends the run with exit code 3.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CliResult = Result<i32, InputError>;

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{}", text);
                EXIT_INPUT
            } else {
                let _ = write!(out, "{}", text);
                0
            };
        }
    };
    let r = match cli.command {
        Command::Synth(a) => synth(&a, out),
        Command::Check(a) => check(&a, out),
        Command::Simulate(a) => simulate(&a, out),
        Command::Bench(b) => bench(b, out),
    };
    match r {
        Ok(code) => code,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {}", msg.trim_end());
            EXIT_INPUT
        }
    }
}

fn load_spec(path: &Path) -> Result<GameSpec, InputError> {
    let src = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    parse_spec(&src).map_err(|diags| {
        let lines: Vec<String> = diags.iter().map(|d| format!("{}:{}", path.display(), d)).collect();
        InputError(lines.join("\n"))
    })
}

fn default_budget() -> Result<usize, InputError> {
    match std::env::var(MAX_ITERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| InputError(format!("{} must be a non-negative integer, got `{}`", MAX_ITERS_ENV, v))),
        Err(_) => Ok(Config::default().max_iters),
    }
}

fn config(max_iters: Option<usize>, trace: bool, start: StartArg) -> Result<Config, InputError> {
    Ok(Config {
        max_iters: match max_iters {
            Some(n) => n,
            None => default_budget()?,
        },
        retention: if trace { TraceRetention::All } else { TraceRetention::LastTwo },
        start: match start {
            StartArg::Controller => Player::Controller,
            StartArg::Environment => Player::Environment,
        },
        ..Config::default()
    })
}

fn strategy_for(spec: &GameSpec, r: &SynthesisResult) -> Result<Option<Strategy>, InputError> {
    if r.verdict == Verdict::Realizable && spec.objective == Objective::Safety && spec.mode == gensys_core::game::Mode::EA {
        Ok(Some(extract_strategy(spec, &r.region)?))
    } else {
        Ok(None)
    }
}

/// The JSON result document.
fn result_json(r: &SynthesisResult, strategy: Option<&Strategy>, verbose: bool) -> Value {
    let entries: Vec<Value> = strategy
        .map(|s| {
            s.entries
                .iter()
                .filter(|e| verbose || !e.inert)
                .map(|e| json!({ "condition": e.condition.to_sexpr(), "move": e.move_name }))
                .collect()
        })
        .unwrap_or_default();
    json!({
        "verdict": r.verdict.to_string(),
        "iterations": r.iterations,
        "region": r.region.to_sexpr(),
        "strategy": entries,
        "elapsed_ms": r.elapsed.as_millis() as u64,
    })
}

fn synth(a: &SynthArgs, out: &mut dyn Write) -> CliResult {
    let spec = load_spec(&a.spec)?;
    let cfg = config(a.max_iters, a.trace, a.start)?;
    let r = solve(&spec, &cfg)?;
    let strategy = strategy_for(&spec, &r)?;

    writeln!(out, "verdict: {}", r.verdict)?;
    writeln!(out, "iterations: {}", r.iterations)?;
    writeln!(out, "region: {}", r.region.to_sexpr())?;
    if let Some(reach) = &r.reach {
        writeln!(out, "controller region: {}", reach.controller.to_sexpr())?;
        writeln!(out, "environment region: {}", reach.environment.to_sexpr())?;
    }
    if a.trace {
        if let Some(reach) = &r.reach {
            for (i, x) in reach.controller_trace.iter().enumerate() {
                writeln!(out, "XC{}: {}", i, x.to_sexpr())?;
            }
            for (i, x) in reach.environment_trace.iter().enumerate() {
                writeln!(out, "XE{}: {}", i, x.to_sexpr())?;
            }
        } else {
            for (i, x) in r.trace.iter().enumerate() {
                writeln!(out, "X{}: {}", r.trace_offset + i, x.to_sexpr())?;
            }
        }
    }
    if let Some(s) = &strategy {
        writeln!(out, "strategy:")?;
        for e in s.entries.iter().filter(|e| a.verbose || !e.inert) {
            let tag = if e.inert { " (inert)" } else { "" };
            writeln!(out, "  {} -> {}{}", print_formula(&e.condition), e.move_name, tag)?;
        }
    }
    if let Some(path) = &a.json {
        let doc = result_json(&r, strategy.as_ref(), a.verbose);
        fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")
            .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    }
    Ok(r.verdict.exit_code())
}

fn read_json_or_text(path: &Path) -> Result<(String, Option<Value>), InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    let v = serde_json::from_str::<Value>(&text).ok();
    Ok((text, v))
}

fn parse_formula(src: &str, spec: &GameSpec, what: &str) -> Result<Formula, InputError> {
    let f = Formula::parse_sexpr(src, spec.sort()).map_err(|e| InputError(format!("{}: {}", what, e)))?;
    if let Some(v) = f.free_vars().into_iter().find(|v| !spec.state_vars.contains(v)) {
        return Err(InputError(format!("{}: unknown variable `{}`", what, v)));
    }
    Ok(f)
}

fn load_region(path: &Path, spec: &GameSpec) -> Result<Formula, InputError> {
    let (text, json) = read_json_or_text(path)?;
    let src = match json.as_ref().and_then(|v| v.get("region")) {
        Some(Value::String(s)) => s.clone(),
        Some(_) => return Err(InputError(format!("{}: `region` must be a string", path.display()))),
        None => text,
    };
    parse_formula(&src, spec, &path.display().to_string())
}

fn load_strategy(path: &Path, spec: &GameSpec) -> Result<Strategy, InputError> {
    let (_, json) = read_json_or_text(path)?;
    let bad = || InputError(format!("{}: expected a JSON array of {{condition, move}}", path.display()));
    let doc = json.ok_or_else(bad)?;
    let items = match doc.get("strategy").unwrap_or(&doc) {
        Value::Array(xs) => xs.clone(),
        _ => return Err(bad()),
    };
    let mut entries = Vec::new();
    for item in items {
        let (Some(Value::String(c)), Some(Value::String(m))) = (item.get("condition"), item.get("move")) else {
            return Err(bad());
        };
        let condition = parse_formula(c, spec, &path.display().to_string())?;
        let inert = !gensys_core::qe::is_sat(&condition)?;
        entries.push(StrategyEntry { condition, move_name: m.clone(), inert });
    }
    Ok(Strategy { entries })
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> CliResult {
    let spec = load_spec(&a.spec)?;
    let region = load_region(&a.region, &spec)?;
    let strategy = load_strategy(&a.strategy, &spec)?;
    let report = check_strategy_closure(&spec, &region, &strategy)?;
    if report.passed() {
        writeln!(out, "closure: ok")?;
        Ok(0)
    } else {
        for f in &report.failures {
            writeln!(out, "{}", f)?;
        }
        Ok(1)
    }
}

fn parse_assignment(src: &str, spec: &GameSpec) -> Result<Assignment, InputError> {
    let mut a = Assignment::new();
    for part in src.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, val) = part
            .split_once('=')
            .ok_or_else(|| InputError(format!("bad assignment `{}`, expected name=value", part)))?;
        let v = spec
            .state_vars
            .iter()
            .find(|v| v.name() == name.trim())
            .ok_or_else(|| InputError(format!("unknown variable `{}`", name.trim())))?;
        let x = Rational::parse_literal(val).ok_or_else(|| InputError(format!("bad value `{}`", val.trim())))?;
        a.insert(v.clone(), x);
    }
    Ok(a)
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> CliResult {
    let spec = load_spec(&a.spec)?;
    let init = parse_assignment(&a.init, &spec)?;
    let r = solve(&spec, &config(a.max_iters, false, StartArg::Controller)?)?;
    let Some(strategy) = strategy_for(&spec, &r)? else {
        return Err(InputError(format!("no strategy to simulate: the game is {}", r.verdict)));
    };
    let play = simulate_play(&spec, &strategy, &init, a.steps, a.seed)?;
    for s in &play.steps {
        writeln!(out, "{}", s)?;
    }
    match play.end {
        PlayEnd::Completed => writeln!(out, "completed {} steps", a.steps)?,
        PlayEnd::EnvStuck => writeln!(out, "environment has no move")?,
        PlayEnd::Violation(k) => {
            writeln!(out, "violation after step {}", k)?;
            return Ok(1);
        }
    }
    Ok(0)
}

fn emit(text: &str, output: &Option<PathBuf>, out: &mut dyn Write) -> CliResult {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| InputError(format!("{}: {}", p.display(), e)))?,
        None => write!(out, "{}", text)?,
    }
    Ok(0)
}

fn capacity(lit: &str) -> Result<Rational, InputError> {
    let c = Rational::parse_literal(lit).ok_or_else(|| InputError(format!("bad capacity `{}`", lit)))?;
    if !c.is_positive() {
        return Err(InputError("capacity must be positive".into()));
    }
    Ok(c)
}

fn bench(b: BenchCommand, out: &mut dyn Write) -> CliResult {
    match b {
        BenchCommand::Cinderella { buckets, capacity: lit, disjunctive, output } => {
            if buckets < 3 {
                return Err(InputError("at least three buckets are needed".into()));
            }
            let c = capacity(&lit)?;
            let spec = if disjunctive { cinderella_disjunctive(buckets, &c) } else { cinderella(buckets, &c) };
            emit(&emit_spec(&spec), &output, out)
        }
        BenchCommand::Random { seed, vars, bound, objective, output } => {
            if !(1..=3).contains(&vars) || !(1..=8).contains(&bound) {
                return Err(InputError("need 1 <= vars <= 3 and 1 <= bound <= 8".into()));
            }
            let objective = match objective.as_str() {
                "safety" => Objective::Safety,
                "reach" => Objective::Reachability,
                o => return Err(InputError(format!("unknown objective `{}`", o))),
            };
            emit(&emit_spec(&random_bounded_game(seed, vars, bound, objective)), &output, out)
        }
        BenchCommand::Table { buckets, capacities, max_iters, timeout, format, spec_dir } => {
            if buckets < 3 {
                return Err(InputError("at least three buckets are needed".into()));
            }
            let mut cases = Vec::new();
            for lit in &capacities {
                capacity(lit)?;
                let mut case = TableCase::cinderella(buckets, lit, max_iters)?;
                case.timeout = timeout.map(std::time::Duration::from_secs);
                cases.push(case);
            }
            if let Some(dir) = &spec_dir {
                fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {}", dir.display(), e)))?;
                for c in &cases {
                    let p = dir.join(format!("cinderella{}_c{}.gs", buckets, c.label));
                    fs::write(&p, emit_spec(&c.spec)).map_err(|e| InputError(format!("{}: {}", p.display(), e)))?;
                }
            }
            let report = run_table(&cases);
            match format {
                Format::Csv => write!(out, "{}", report.to_csv())?,
                Format::Json => writeln!(out, "{}", report.to_json())?,
            }
            Ok(0)
        }
    }
}
