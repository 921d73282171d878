use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tssgeo::embed::{compute_embedding, EmbedOptions, RectilinearEmbedding};
use tssgeo::gen;
use tssgeo::geometry::{grid_disks, GridCoords, IntervalModel};
use tssgeo::harness::{
    replay, verify_artifact, verify_equivalence, verify_gadgets, verify_mod6, CaseOutcome, EquivalenceConfig,
    Reproduction, Target, VerificationReport,
};
use tssgeo::polysolve::{solve_unanimous, Certificate};
use tssgeo::reduce::{self, IsInstance, ReductionArtifact};
use tssgeo::svg::{disks_svg, embedding_svg};
use tssgeo::tss::min_target_set_bruteforce_until;
use tssgeo::{check_regular, simulate, Graph, TssInstance};

#[derive(Parser)]
#[command(name = "tssgeo", version, about = "Target set selection on geometric graphs")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Oracle time budget per case, in seconds.
    #[arg(long, global = true, env = "TSSGEO_ORACLE_SECS", default_value_t = 10)]
    oracle_secs: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum target set of an instance.
    Solve(SolveArgs),
    /// Activation trace from a seed set.
    Simulate(SimulateArgs),
    /// Run one of the instance transformations.
    Reduce(ReduceArgs),
    /// Run a verification campaign.
    Verify(VerifyArgs),
    /// Rectilinear grid embedding of a planar graph of maximum degree 4.
    Embed(EmbedArgs),
    /// Generate a random instance.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    /// Exhaustive search (any thresholds).
    Brute,
    /// Vertex cover on a unanimous instance, using --intervals or --coords
    /// when given.
    Unanimous,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = SolveMode::Brute)]
    mode: SolveMode,
    /// Interval model certifying an interval graph.
    #[arg(long)]
    intervals: Option<PathBuf>,
    /// Grid coordinates certifying a grid graph.
    #[arg(long)]
    coords: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Comma-separated seed vertices.
    #[arg(long, value_delimiter = ',')]
    seed_set: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReductionId {
    Sat2tss,
    Sat2majority,
    Planar2grid,
    Majority,
    Is2udg,
    Grid2exact2,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(value_enum)]
    reduction: ReductionId,
    /// DIMACS for the SAT reductions, graph or IS instance JSON for is2udg,
    /// TSS instance JSON otherwise.
    #[arg(long = "in")]
    input: PathBuf,
    /// Embedding for planar2grid and is2udg (computed when absent).
    #[arg(long)]
    emb: Option<PathBuf>,
    /// Grid coordinates for grid2exact2.
    #[arg(long)]
    coords: Option<PathBuf>,
    /// Independent set size when --in holds a bare graph.
    #[arg(long)]
    k: Option<u64>,
    /// Seed for a computed embedding.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Drawing of the output disks or grid points.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Campaign {
    Gadgets,
    Mod6,
    Equivalence,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    campaign: Campaign,
    /// Equivalence target: a reduction id or one of unanimous-vc,
    /// interval-vc, grid-vc, preprocess, subdivide.
    #[arg(long)]
    reduction: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Size bound for generated instances.
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long)]
    edge_prob: Option<f64>,
    /// Upper end of the mod6 range.
    #[arg(long, default_value_t = 1000)]
    g_max: usize,
    /// Re-check a stored reduction artifact instead of generating cases.
    #[arg(long)]
    artifact: Option<PathBuf>,
    /// Re-run a single reproduction file.
    #[arg(long)]
    replay: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    /// Erdős–Rényi graph.
    Er,
    /// TSS instance on an Erdős–Rényi graph.
    Tss,
    /// Majority TSS instance on a random grid subgraph (coordinates to
    /// --coords-out).
    Grid,
    /// Interval model.
    Intervals,
    /// Restricted 3-SAT formula in DIMACS.
    Sat,
    /// Connected planar graph with maximum degree 4.
    Planar,
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Vertices, intervals or variables.
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0.3)]
    p: f64,
    /// Thresholds of tss instances range over 0..=deg + slack.
    #[arg(long, default_value_t = 0)]
    slack: u32,
    #[arg(long, default_value_t = 4)]
    width: i64,
    #[arg(long, default_value_t = 4)]
    height: i64,
    /// Grid instances get thresholds equal to the degree instead of the
    /// majority threshold.
    #[arg(long)]
    unanimous: bool,
    #[arg(long)]
    coords_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status 2: bad input files; 1: the answer is NO or a check failed.
enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

type Outcome = Result<bool, Failure>;

trait Usage<T> {
    fn usage(self) -> Result<T, Failure>;
}

impl<T> Usage<T> for anyhow::Result<T> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(Failure::Usage)
    }
}

fn domain<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Domain(anyhow!("{e}"))
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    serde_json::from_str(&read_text(path)?).with_context(|| format!("cannot parse {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes JSON to `out`, or prints it when no path is given.
fn emit(out: Option<&Path>, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Domain(e.into()))?;
    match out {
        Some(p) => write_text(p, &(text + "\n")).usage(),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let budget = Duration::from_secs(cli.oracle_secs);
    let result = match cli.command {
        Command::Solve(a) => solve(a, budget),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Reduce(a) => reduce_cmd(a),
        Command::Verify(a) => verify(a, budget),
        Command::Embed(a) => embed(a),
        Command::Gen(a) => gen_cmd(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn solve(a: SolveArgs, budget: Duration) -> Outcome {
    let inst: TssInstance = read_json(&a.input).usage()?;
    let (k, witness) = match a.mode {
        SolveMode::Brute => {
            let deadline = std::time::Instant::now() + budget;
            min_target_set_bruteforce_until(&inst, inst.n(), Some(deadline))
                .map_err(domain)?
                .expect("V is a target set")
        }
        SolveMode::Unanimous => {
            let cert = match (&a.intervals, &a.coords) {
                (Some(_), Some(_)) => return Err(Failure::Usage(anyhow!("give at most one of --intervals, --coords"))),
                (Some(p), None) => Certificate::Interval(read_json::<IntervalModel>(p).usage()?),
                (None, Some(p)) => Certificate::Grid(read_json::<GridCoords>(p).usage()?),
                (None, None) => Certificate::None,
            };
            solve_unanimous(&inst, &cert).map_err(domain)?
        }
    };
    let yes = k as u64 <= inst.budget();
    let out = json!({ "k_min": k, "witness": witness });
    if a.out.is_some() {
        println!(
            "k_min = {k}, budget k = {}: {}",
            inst.budget(),
            if yes { "yes" } else { "no" }
        );
    }
    emit(a.out.as_deref(), &out)?;
    Ok(yes)
}

fn simulate_cmd(a: SimulateArgs) -> Outcome {
    let inst: TssInstance = read_json(&a.input).usage()?;
    let trace = simulate(&inst, &a.seed_set).map_err(|e| Failure::Usage(e.into()))?;
    let complete = trace.final_set().len() == inst.n();
    if a.out.is_some() {
        println!(
            "{} rounds, {} of {} vertices active: {}",
            trace.round_count(),
            trace.final_set().len(),
            inst.n(),
            if complete { "target set" } else { "not a target set" }
        );
    }
    emit(a.out.as_deref(), &trace)?;
    Ok(complete)
}

fn embedding_for(g: &Graph, path: Option<&Path>, seed: u64) -> Result<RectilinearEmbedding, Failure> {
    match path {
        Some(p) => read_json(p).usage(),
        None => compute_embedding(g, &EmbedOptions { seed, ..EmbedOptions::default() }).map_err(domain),
    }
}

fn reduce_cmd(a: ReduceArgs) -> Outcome {
    let art: ReductionArtifact = match a.reduction {
        ReductionId::Sat2tss | ReductionId::Sat2majority => {
            let f = reduce::parse_dimacs(&read_text(&a.input).usage()?).map_err(|e| Failure::Usage(e.into()))?;
            println!("note: planarity of the variable-clause incidence graph is not checked");
            if matches!(a.reduction, ReductionId::Sat2tss) {
                reduce::sat_to_planar_tss(&f)
            } else {
                reduce::sat_to_planar_majority_tss(&f)
            }
            .map_err(domain)?
        }
        ReductionId::Majority => {
            let inst: TssInstance = read_json(&a.input).usage()?;
            reduce::majority_transform(&inst).map_err(domain)?
        }
        ReductionId::Planar2grid => {
            let inst: TssInstance = read_json(&a.input).usage()?;
            let emb = embedding_for(inst.graph(), a.emb.as_deref(), a.seed)?;
            reduce::planar_tss_to_grid_tss(&inst, &emb).map_err(domain)?
        }
        ReductionId::Is2udg => {
            let value: Value = read_json(&a.input).usage()?;
            let is: IsInstance = if value.get("graph").is_some() {
                serde_json::from_value(value).map_err(|e| Failure::Usage(e.into()))?
            } else {
                let graph: Graph = serde_json::from_value(value).map_err(|e| Failure::Usage(e.into()))?;
                IsInstance { graph, k: a.k.unwrap_or(0) }
            };
            let r = is.graph.degree(0);
            if is.graph.n() == 0 || !check_regular(&is.graph, r) {
                return Err(domain("input graph is not regular"));
            }
            let emb = embedding_for(&is.graph, a.emb.as_deref(), a.seed)?;
            reduce::is_planar_to_is_udg(&is.graph, r, is.k, &emb).map_err(domain)?
        }
        ReductionId::Grid2exact2 => {
            let inst: TssInstance = read_json(&a.input).usage()?;
            let Some(path) = &a.coords else {
                return Err(Failure::Usage(anyhow!("grid2exact2 needs --coords")));
            };
            let coords: GridCoords = read_json(path).usage()?;
            reduce::majority_grid_to_exact2_udg(&inst, &coords).map_err(domain)?
        }
    };
    if let Some(path) = &a.svg {
        let drawing = match (&art.disks, &art.coords) {
            (Some(d), _) => disks_svg(d),
            (None, Some(c)) => disks_svg(&grid_disks(c)),
            (None, None) => return Err(Failure::Usage(anyhow!("{} output has no geometry to draw", art.reduction.id()))),
        };
        write_text(path, &drawing).usage()?;
    }
    println!(
        "{}: {} output vertices, k' = {} ({})",
        art.reduction.id(),
        art.output_graph().n(),
        art.output_budget(),
        art.budget.formula
    );
    emit(a.out.as_deref(), &art)?;
    Ok(true)
}

fn report_out(report: &VerificationReport, out: Option<&Path>) -> Outcome {
    println!("{}", report.summary());
    if let Some(path) = out {
        emit(Some(path), report)?;
        for repro in report.reproductions() {
            let name = format!(
                "{}.case{}.repro.json",
                path.file_stem().and_then(|s| s.to_str()).unwrap_or("report"),
                repro.case
            );
            let p = path.with_file_name(name);
            emit(Some(&p), &repro)?;
            println!("reproduction written to {}", p.display());
        }
    }
    Ok(report.is_pass())
}

fn verify(a: VerifyArgs, budget: Duration) -> Outcome {
    if let Some(path) = &a.replay {
        let repro: Reproduction = read_json(path).usage()?;
        let outcome = replay(&repro, budget);
        let (ok, text) = match &outcome {
            CaseOutcome::Pass => (true, "pass".to_string()),
            CaseOutcome::Skip(r) => (true, format!("skipped: {r}")),
            CaseOutcome::Fail { expected, actual } => (false, format!("fail: expected {expected}, got {actual}")),
        };
        println!("{} case {}: {text}", repro.campaign, repro.case);
        return Ok(ok);
    }
    let report = match a.campaign {
        Campaign::Gadgets => verify_gadgets(),
        Campaign::Mod6 => {
            if a.g_max < 2 {
                return Err(Failure::Usage(anyhow!("--g-max must be at least 2")));
            }
            verify_mod6(a.g_max)
        }
        Campaign::Equivalence => {
            if let Some(path) = &a.artifact {
                let art: ReductionArtifact = read_json(path).usage()?;
                verify_artifact(&art, budget)
            } else {
                let Some(id) = &a.reduction else {
                    return Err(Failure::Usage(anyhow!("equivalence needs --reduction or --artifact")));
                };
                let target = Target::from_id(id).ok_or_else(|| {
                    let ids: Vec<&str> = Target::ALL.iter().map(|t| t.id()).collect();
                    Failure::Usage(anyhow!("unknown target {id}; expected one of {}", ids.join(", ")))
                })?;
                let mut cfg = EquivalenceConfig::new(target, a.seed, a.trials);
                cfg.oracle_budget = budget;
                if let Some(n) = a.max_n {
                    cfg.spec.max_n = n;
                }
                if let Some(p) = a.edge_prob {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Failure::Usage(anyhow!("--edge-prob must lie in [0, 1]")));
                    }
                    cfg.spec.edge_prob = p;
                }
                verify_equivalence(&cfg)
            }
        }
    };
    report_out(&report, a.out.as_deref())
}

fn embed(a: EmbedArgs) -> Outcome {
    let g: Graph = read_json(&a.input).usage()?;
    let emb = compute_embedding(&g, &EmbedOptions { seed: a.seed, ..EmbedOptions::default() }).map_err(domain)?;
    if let Some(path) = &a.svg {
        write_text(path, &embedding_svg(&emb)).usage()?;
    }
    let n = g.n().max(1);
    println!(
        "embedded {} vertices, {} edges; area {} ({:.1} n^2)",
        g.n(),
        g.edge_count(),
        emb.area(),
        emb.area() as f64 / (n * n) as f64
    );
    emit(a.out.as_deref(), &emb)?;
    Ok(true)
}

fn gen_cmd(a: GenArgs) -> Outcome {
    let mut rng = gen::seeded_rng(a.seed);
    if !(0.0..=1.0).contains(&a.p) {
        return Err(Failure::Usage(anyhow!("--p must lie in [0, 1]")));
    }
    match a.kind {
        GenKind::Er => emit(a.out.as_deref(), &gen::erdos_renyi(a.n, a.p, &mut rng))?,
        GenKind::Tss => emit(a.out.as_deref(), &gen::random_tss(a.n, a.p, a.slack, &mut rng))?,
        GenKind::Planar => {
            if a.n == 0 {
                return Err(Failure::Usage(anyhow!("--n must be positive")));
            }
            emit(a.out.as_deref(), &gen::random_planar_bounded(a.n, &mut rng))?
        }
        GenKind::Intervals => emit(a.out.as_deref(), &gen::random_intervals(a.n, 10, &mut rng))?,
        GenKind::Grid => {
            if a.width <= 0 || a.height <= 0 || a.n as i64 > a.width * a.height {
                return Err(Failure::Usage(anyhow!("--n exceeds the {}x{} grid", a.width, a.height)));
            }
            // isolated vertices would get threshold 0; redraw a bounded number of times
            let mut draw = gen::random_grid_subgraph(a.width, a.height, a.n, &mut rng);
            for _ in 0..1000 {
                if a.n < 2 || draw.0.degrees().iter().all(|&d| d > 0) {
                    break;
                }
                draw = gen::random_grid_subgraph(a.width, a.height, a.n, &mut rng);
            }
            let (g, coords) = draw;
            let n = g.n() as u64;
            let inst = if a.unanimous {
                TssInstance::unanimous(g, n)
            } else {
                TssInstance::majority(g, n)
            };
            emit(a.out.as_deref(), &inst)?;
            match &a.coords_out {
                Some(p) => emit(Some(p), &coords)?,
                None => eprintln!("warning: coordinates not written (no --coords-out)"),
            }
        }
        GenKind::Sat => {
            if a.n == 0 {
                return Err(Failure::Usage(anyhow!("--n must be positive")));
            }
            let dimacs = gen::random_restricted_3sat(a.n, &mut rng).to_dimacs();
            match &a.out {
                Some(p) => write_text(p, &dimacs).usage()?,
                None => print!("{dimacs}"),
            }
        }
    }
    Ok(true)
}
