//! Command-line front end. Every command writes JSON reports; failures print
//! a JSON error body on stdout and map to a nonzero exit code.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::engine::{self, EngineConfig, EngineError};
use crate::gen::{self, Family, GeneratorSpec};
use crate::graph::{self, Coloring, Graph};
use crate::lists::{ListAssignment, ListMode};
use crate::local::{self, SimConfig, SimError, SymmetryBreaker};
use crate::structure::{self, SubgraphSpec, WalletOptions};

pub const EXIT_OK: i32 = 0;
/// `verify` found a bad coloring.
pub const EXIT_INVALID: i32 = 1;
/// Bad input, configuration or I/O.
pub const EXIT_INPUT: i32 = 2;
/// The lists admit no coloring.
pub const EXIT_NO_COLORING: i32 = 3;
/// An internal check failed.
pub const EXIT_INTERNAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "listcolor", version, about = "List coloring of planar and bounded-genus graphs")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Graph edge-list file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// List assignment JSON file.
    #[arg(long, global = true)]
    pub lists: Option<PathBuf>,
    /// JSON run configuration with optional `engine` and `sim` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Where `simulate` writes its round trace.
    #[arg(long, global = true)]
    pub trace_out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub max_rounds: Option<usize>,
    /// `linial_cole_vishkin` or `greedy_token`.
    #[arg(long, global = true)]
    pub symmetry_breaker: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a graph and a list assignment.
    Gen {
        #[arg(long)]
        family: String,
        #[arg(long)]
        size: usize,
        /// `random`, `overlap` or `distinct`.
        #[arg(long, default_value = "random")]
        list_mode: String,
    },
    /// Color with the sequential engine.
    Color,
    /// Color by simulated message passing.
    Simulate {
        /// Run each level's symmetry breaking after the recursion below it.
        #[arg(long)]
        control: bool,
        /// Record every message in the trace.
        #[arg(long)]
        record_messages: bool,
    },
    /// Wallet, pocket classes and density of a graph.
    Analyze {
        #[arg(long, default_value_t = 6)]
        c: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
    },
    /// Check a coloring against the graph and lists.
    Verify {
        #[arg(long)]
        coloring: PathBuf,
    },
    /// Engine scaling and the round-count fit.
    Bench {
        #[arg(long, default_value = "tri_grid")]
        family: String,
        /// Vertex counts for the engine timing.
        #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 2000, 4000, 8000])]
        sizes: Vec<usize>,
        /// Vertex counts of the square grids for the round fit.
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1000, 10000])]
        round_sizes: Vec<usize>,
    },
}

/// The `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub engine: EngineConfig,
    pub sim: SimConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    /// SHA-256 over the input files in argument order.
    pub input_hash: Option<String>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
}

/// A failed command: exit code plus a JSON body.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub detail: Value,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, kind: "input", message: message.into(), detail: Value::Null }
    }

    pub fn body(&self) -> Value {
        json!({ "error": self.kind, "message": self.message, "detail": self.detail })
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let (code, kind) = match &e {
            EngineError::GirthViolation { .. } | EngineError::InvalidLists(_) | EngineError::InvalidConfig(_) => {
                (EXIT_INPUT, "input")
            }
            EngineError::ExtensionFailed(_) => (EXIT_INTERNAL, "extension_failed"),
            EngineError::FallbackExhausted { .. } => (EXIT_INTERNAL, "fallback_exhausted"),
            EngineError::InvariantViolation(_) => (EXIT_INTERNAL, "invariant_violation"),
        };
        let detail = match &e {
            EngineError::ExtensionFailed(f) => serde_json::to_value(f).unwrap_or(Value::Null),
            _ => Value::Null,
        };
        CliError { code, kind, message: e.to_string(), detail }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        let (code, kind) = match &e {
            SimError::GirthViolation { .. }
            | SimError::InvalidLists(_)
            | SimError::InvalidConfig(_)
            | SimError::TamperedTrace(_) => (EXIT_INPUT, "input"),
            SimError::DegreeBoundViolated { .. } => (EXIT_INPUT, "degree_bound_violated"),
            SimError::MaxRoundsExceeded { .. } => (EXIT_INTERNAL, "max_rounds_exceeded"),
            SimError::NoColoring { .. } => (EXIT_NO_COLORING, "no_coloring"),
            SimError::ExtensionFailed(_) => (EXIT_INTERNAL, "extension_failed"),
            SimError::InformationBoundViolation { .. } => (EXIT_INTERNAL, "information_bound_violation"),
            SimError::InvariantViolation(_) => (EXIT_INTERNAL, "invariant_violation"),
        };
        let detail = match &e {
            SimError::ExtensionFailed(f) => serde_json::to_value(f).unwrap_or(Value::Null),
            _ => Value::Null,
        };
        CliError { code, kind, message: e.to_string(), detail }
    }
}

/// What a successful command reports.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let started = unix_now();
    let config = load_config(&cli.global)?;
    let mut ctx = Context { global: &cli.global, outputs: Vec::new(), hasher: None };
    let (name, report, code) = match &cli.command {
        Command::Gen { family, size, list_mode } => ("gen", cmd_gen(&mut ctx, family, *size, list_mode)?, EXIT_OK),
        Command::Color => ("color", cmd_color(&mut ctx, &config.engine)?, EXIT_OK),
        Command::Simulate { control, record_messages } => {
            let mut sim = config.sim.clone();
            sim.pipelined &= !control;
            sim.record_messages |= record_messages;
            ("simulate", cmd_simulate(&mut ctx, &sim)?, EXIT_OK)
        }
        Command::Analyze { c, k } => ("analyze", cmd_analyze(&mut ctx, *c, *k)?, EXIT_OK),
        Command::Verify { coloring } => {
            let (report, valid) = cmd_verify(&mut ctx, coloring)?;
            ("verify", report, if valid { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Bench { family, sizes, round_sizes } => {
            ("bench", cmd_bench(&mut ctx, &config, family, sizes, round_sizes)?, EXIT_OK)
        }
    };
    let manifest_path = ctx.global.out_dir.join(format!("{name}.manifest.json"));
    let manifest = RunManifest {
        command: name.to_string(),
        config: serde_json::to_value(&config).expect("configs serialize"),
        input_hash: ctx.hasher.map(|h| format!("{:x}", h.finalize())),
        outputs: ctx.outputs.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_unix: started,
        finished_unix: unix_now(),
    };
    write(&manifest_path, &pretty(&manifest))?;
    Ok(Outcome { code, report })
}

/// Parses `args`, runs the command, prints the report or error body, and
/// returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (report, code) = match run(&cli) {
        Ok(out) => (out.report, out.code),
        Err(e) => (e.body(), e.code),
    };
    // A closed stdout (say, piped into `head`) must not turn into a panic.
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    code
}

struct Context<'a> {
    global: &'a Global,
    outputs: Vec<PathBuf>,
    hasher: Option<Sha256>,
}

impl Context<'_> {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
        self.hasher.get_or_insert_with(Sha256::new).update(text.as_bytes());
        Ok(text)
    }

    fn emit(&mut self, path: PathBuf, contents: &str) -> Result<(), CliError> {
        write(&path, contents)?;
        self.outputs.push(path);
        Ok(())
    }

    fn out(&self, name: &str) -> PathBuf {
        self.global.out_dir.join(name)
    }

    fn graph(&mut self) -> Result<Graph, CliError> {
        let path = self.global.input.clone().ok_or_else(|| CliError::input("--input is required"))?;
        let text = self.read(&path)?;
        graph::parse_edge_list(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
    }

    /// Lists from `--lists`, or seeded random lists for the girth class the
    /// graph supports.
    fn lists(&mut self, graph: &Graph) -> Result<ListAssignment, CliError> {
        match self.global.lists.clone() {
            Some(path) => {
                let text = self.read(&path)?;
                ListAssignment::from_json(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
            }
            None => {
                let g = match graph.girth() {
                    Some(3) => 3,
                    Some(4) => 4,
                    _ => 5,
                };
                Ok(ListAssignment::generate(graph.n(), g, ListMode::Random, self.global.seed))
            }
        }
    }
}

fn cmd_gen(ctx: &mut Context<'_>, family: &str, size: usize, list_mode: &str) -> Result<Value, CliError> {
    let family: Family = family.parse().map_err(|e: gen::UnknownFamily| CliError {
        code: EXIT_INPUT,
        kind: "unknown_family",
        message: e.to_string(),
        detail: Value::Null,
    })?;
    if size == 0 {
        return Err(CliError::input("size must be at least 1"));
    }
    let list_mode: ListMode = serde_json::from_value(Value::String(list_mode.to_string()))
        .map_err(|_| CliError::input(format!("unknown list mode {list_mode:?}")))?;
    let inst = gen::generate(&GeneratorSpec { family, size, seed: ctx.global.seed, list_mode });
    ctx.emit(ctx.out("graph.edges"), &graph::write_edge_list(&inst.graph))?;
    ctx.emit(ctx.out("lists.json"), &inst.lists.to_json())?;
    Ok(json!({
        "family": family.name(),
        "n": inst.graph.n(),
        "m": inst.graph.m(),
        "girth": inst.graph.girth(),
        "list_size": inst.lists.list_size(),
        "outputs": ctx.outputs,
    }))
}

fn cmd_color(ctx: &mut Context<'_>, cfg: &EngineConfig) -> Result<Value, CliError> {
    let graph = ctx.graph()?;
    let lists = ctx.lists(&graph)?;
    let run = engine::color_graph(&graph, &lists, cfg)?;
    let Some(coloring) = run.coloring else {
        return Err(CliError {
            code: EXIT_NO_COLORING,
            kind: "no_coloring",
            message: "the lists admit no coloring".into(),
            detail: Value::Null,
        });
    };
    self_verify(&graph, &lists, &coloring)?;
    ctx.emit(ctx.out("coloring.json"), &pretty(&coloring))?;
    ctx.emit(ctx.out("levels.jsonl"), &engine::stats_to_json_lines(&run.stats))?;
    Ok(json!({
        "n": graph.n(),
        "valid": true,
        "depth": run.stats.len(),
        "colors_used": coloring.distinct_colors(),
        "outputs": ctx.outputs,
    }))
}

fn cmd_simulate(ctx: &mut Context<'_>, cfg: &SimConfig) -> Result<Value, CliError> {
    let mut cfg = cfg.clone();
    if let Some(m) = ctx.global.max_rounds {
        cfg.max_rounds = m;
    }
    if let Some(b) = &ctx.global.symmetry_breaker {
        cfg.symmetry_breaker = parse_breaker(b)?;
    }
    let graph = ctx.graph()?;
    let lists = ctx.lists(&graph)?;
    let (coloring, trace, levels) = local::simulate_detailed(&graph, &lists, &cfg)?;
    self_verify(&graph, &lists, &coloring)?;
    let trace_path = ctx.global.trace_out.clone().unwrap_or_else(|| ctx.out("trace.jsonl"));
    ctx.emit(trace_path, &trace.to_json_lines())?;
    ctx.emit(ctx.out("coloring.json"), &pretty(&coloring))?;
    Ok(json!({
        "n": graph.n(),
        "valid": true,
        "rounds_total": trace.rounds_total,
        "recursion_depth": trace.recursion_depth,
        "pipelined": trace.pipelined,
        "levels": levels,
        "outputs": ctx.outputs,
    }))
}

fn cmd_analyze(ctx: &mut Context<'_>, c: usize, k: usize) -> Result<Value, CliError> {
    let graph = ctx.graph()?;
    let g = match graph.girth() {
        Some(3) => 3,
        Some(4) => 4,
        _ => 5,
    };
    let options = WalletOptions { c, k, r: Some(8 - g), ..WalletOptions::default() };
    let wallet = structure::find_wallet_with(&graph, &options);
    let audit = wallet.audit(&graph).err().map(|e| e.to_string());
    let union = wallet.pockets.iter().fold(graph::VertexSet::new(), |acc, p| acc.union(&p.vertices));
    let density = structure::density(&graph, &SubgraphSpec::induced(&graph, union), g, options.epsilon)
        .map_err(|e| CliError::input(e.to_string()))?;
    let purses = wallet.pockets.iter().filter(|p| p.is_purse).count();
    let deep = wallet.pockets.iter().filter(|p| p.is_k_deep).count();
    let deletable = wallet.pockets.iter().filter(|p| p.is_deletable()).count();
    let report = json!({
        "n": graph.n(),
        "c": c,
        "k": k,
        "pockets": wallet.pockets.len(),
        "target_met": wallet.target_met,
        "coverage_ratio": wallet.coverage_ratio,
        "purses": purses,
        "k_deep": deep,
        "deletable": deletable,
        "audit_error": audit,
        "density_of_union": density,
        "wallet": wallet,
    });
    ctx.emit(ctx.out("structure.json"), &pretty(&report))?;
    ctx.emit(ctx.out("structure.dot"), &wallet.to_dot(&graph))?;
    let mut summary = report;
    summary.as_object_mut().expect("object").remove("wallet");
    summary["outputs"] = json!(ctx.outputs);
    Ok(summary)
}

fn cmd_verify(ctx: &mut Context<'_>, coloring_path: &Path) -> Result<(Value, bool), CliError> {
    let graph = ctx.graph()?;
    let lists = match ctx.global.lists.clone() {
        Some(_) => Some(ctx.lists(&graph)?),
        None => None,
    };
    let text = ctx.read(coloring_path)?;
    let coloring: Coloring =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", coloring_path.display())))?;
    if coloring.len() != graph.n() {
        return Err(CliError::input(format!(
            "coloring has {} entries, graph has {} vertices",
            coloring.len(),
            graph.n()
        )));
    }
    let report = graph.validate_coloring(lists.as_ref(), &coloring);
    let valid = report.is_valid();
    let first_bad_edge = report.monochromatic_edges.first().copied();
    Ok((json!({ "valid": valid, "first_bad_edge": first_bad_edge, "report": report }), valid))
}

fn cmd_bench(
    ctx: &mut Context<'_>,
    config: &RunConfig,
    family: &str,
    sizes: &[usize],
    round_sizes: &[usize],
) -> Result<Value, CliError> {
    let family: Family = family.parse().map_err(|e: gen::UnknownFamily| CliError::input(e.to_string()))?;
    let mut engine_cfg = config.engine.clone();
    engine_cfg.record_stats = true;
    let scaling = engine::bench_scaling(family, sizes, &engine_cfg)?;
    let rounds = round_campaign(round_sizes, &config.sim, ctx.global.seed)?;
    let report = json!({ "engine_scaling": scaling, "round_fit": rounds });
    ctx.emit(ctx.out("bench.json"), &pretty(&report))?;
    Ok(json!({
        "exponent": scaling.exponent,
        "round_fit": rounds,
        "outputs": ctx.outputs,
    }))
}

/// Rounds on square grids and the fit `rounds = a + b·log2 n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundFit {
    /// `(n, rounds_total, recursion_depth)` per size.
    pub points: Vec<(usize, usize, usize)>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub r_squared: Option<f64>,
}

pub fn round_campaign(sizes: &[usize], cfg: &SimConfig, seed: u64) -> Result<RoundFit, SimError> {
    let mut points = Vec::new();
    for &target in sizes {
        let graph = gen::generate_graph(Family::SquareGrid, Family::SquareGrid.size_for_vertices(target), seed);
        let lists = ListAssignment::generate(graph.n(), 4, ListMode::Random, seed);
        let (_, trace) = local::simulate(&graph, &lists, cfg)?;
        points.push((graph.n(), trace.rounds_total, trace.recursion_depth));
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|&(n, r, _)| ((n as f64).log2(), r as f64)).collect();
    let fit = engine::linear_fit(&xy);
    Ok(RoundFit { points, a: fit.map(|f| f.0), b: fit.map(|f| f.1), r_squared: fit.map(|f| f.2) })
}

fn self_verify(graph: &Graph, lists: &ListAssignment, coloring: &Coloring) -> Result<(), CliError> {
    let report = graph.validate_coloring(Some(lists), coloring);
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError {
            code: EXIT_INTERNAL,
            kind: "invalid_output",
            message: "the produced coloring failed verification".into(),
            detail: serde_json::to_value(report).unwrap_or(Value::Null),
        })
    }
}

fn parse_breaker(s: &str) -> Result<SymmetryBreaker, CliError> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| CliError::input(format!("unknown symmetry breaker {s:?}")))
}

fn load_config(global: &Global) -> Result<RunConfig, CliError> {
    let Some(path) = &global.config else { return Ok(RunConfig::default()) };
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::input(format!("creating {}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| CliError::input(format!("writing {}: {e}", path.display())))
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("listcolor-cli-{name}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        dir
    }

    fn call(args: &[&str]) -> i32 {
        main_with(std::iter::once("listcolor").chain(args.iter().copied()))
    }

    #[test]
    fn gen_color_verify_round_trip() {
        let dir = tmp("roundtrip");
        let d = dir.to_str().unwrap();
        assert_eq!(call(&["--out-dir", d, "--seed", "3", "gen", "--family", "tri_grid", "--size", "5"]), 0);
        let g = format!("{d}/graph.edges");
        let l = format!("{d}/lists.json");
        assert_eq!(call(&["--out-dir", d, "--input", &g, "--lists", &l, "color"]), 0);
        let c = format!("{d}/coloring.json");
        assert_eq!(call(&["--out-dir", d, "--input", &g, "--lists", &l, "verify", "--coloring", &c]), 0);
        let manifest: RunManifest =
            serde_json::from_str(&fs::read_to_string(format!("{d}/verify.manifest.json")).unwrap()).unwrap();
        assert!(manifest.input_hash.is_some());

        // Copy a neighbor's color onto vertex 0.
        let mut col: Coloring = serde_json::from_str(&fs::read_to_string(&c).unwrap()).unwrap();
        let graph = graph::parse_edge_list(&fs::read_to_string(&g).unwrap()).unwrap();
        let u = graph.neighbors(0)[0];
        col.set(0, col.get(u).unwrap());
        fs::write(&c, serde_json::to_string(&col).unwrap()).unwrap();
        let cli =
            Cli::try_parse_from(["listcolor", "--out-dir", d, "--input", &g, "verify", "--coloring", &c]).unwrap();
        let out = run(&cli).unwrap();
        assert_eq!(out.code, EXIT_INVALID);
        assert_eq!(out.report["first_bad_edge"], json!([0, u]));
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn gen_is_byte_deterministic() {
        let a = tmp("det-a");
        let b = tmp("det-b");
        for d in [&a, &b] {
            let d = d.to_str().unwrap();
            assert_eq!(
                call(&["--out-dir", d, "--seed", "7", "gen", "--family", "random_triangulation", "--size", "40"]),
                0
            );
        }
        for f in ["graph.edges", "lists.json"] {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
        }
        fs::remove_dir_all(a).unwrap();
        fs::remove_dir_all(b).unwrap();
    }

    #[test]
    fn simulate_writes_a_replayable_trace() {
        let dir = tmp("sim");
        let d = dir.to_str().unwrap();
        assert_eq!(call(&["--out-dir", d, "gen", "--family", "square_grid", "--size", "6"]), 0);
        let g = format!("{d}/graph.edges");
        let l = format!("{d}/lists.json");
        let t = format!("{d}/t.jsonl");
        let args = ["--out-dir", d, "--input", &g, "--lists", &l, "--trace-out", &t, "simulate", "--record-messages"];
        assert_eq!(call(&args), 0);
        let trace = local::RoundTrace::from_json_lines(&fs::read_to_string(&t).unwrap()).unwrap();
        let graph = graph::parse_edge_list(&fs::read_to_string(&g).unwrap()).unwrap();
        local::replay(&trace, &graph).unwrap();
        assert_eq!(
            call(&["--out-dir", d, "--input", &g, "--lists", &l, "--max-rounds", "3", "simulate"]),
            EXIT_INTERNAL
        );
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn analyze_disjoint_triangles_meets_the_target() {
        let dir = tmp("analyze");
        let d = dir.to_str().unwrap();
        assert_eq!(call(&["--out-dir", d, "gen", "--family", "disjoint_union", "--size", "4"]), 0);
        let g = format!("{d}/graph.edges");
        let cli = Cli::try_parse_from(["listcolor", "--out-dir", d, "--input", &g, "analyze", "--c", "3"]).unwrap();
        let out = run(&cli).unwrap();
        assert_eq!(out.report["target_met"], json!(true));
        assert!(dir.join("structure.dot").exists());
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn errors_are_json_with_codes() {
        let dir = tmp("errors");
        let d = dir.to_str().unwrap();
        let cli =
            Cli::try_parse_from(["listcolor", "--out-dir", d, "gen", "--family", "moebius", "--size", "3"]).unwrap();
        let e = run(&cli).unwrap_err();
        assert_eq!((e.code, e.kind), (EXIT_INPUT, "unknown_family"));
        assert_eq!(e.body()["error"], json!("unknown_family"));

        fs::create_dir_all(&dir).unwrap();
        let g = dir.join("k6.edges");
        fs::write(&g, graph::write_edge_list(&gen::complete(6))).unwrap();
        let l = dir.join("k6.json");
        fs::write(&l, ListAssignment::uniform(6, &[0, 1, 2, 3, 4], 3).to_json()).unwrap();
        let (g, l) = (g.to_str().unwrap(), l.to_str().unwrap());
        assert_eq!(call(&["--out-dir", d, "--input", g, "--lists", l, "color"]), EXIT_NO_COLORING);
        assert_eq!(call(&["--out-dir", d, "--input", g, "--lists", l, "simulate"]), EXIT_NO_COLORING);
        assert_eq!(call(&["--out-dir", d, "color"]), EXIT_INPUT);
        fs::remove_dir_all(dir).unwrap();
    }
}
