//! Verification campaigns: gadget properties, the filler-length congruence
//! and oracle-checked equivalence sweeps over seeded random instances.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embed::{compute_embedding, EmbedOptions, RectilinearEmbedding};
use crate::gen;
use crate::geometry::{intersection_graph_disks, intersection_graph_intervals, validate_grid_graph, DiskRepresentation};
use crate::geometry::{GridCoords, GridPoint, IntervalModel};
use crate::graph::{check_regular, Edge, Graph};
use crate::polysolve::{
    max_independent_set_bb, max_independent_set_bruteforce, min_vertex_cover_bruteforce, min_vertex_cover_grid,
    min_vertex_cover_interval,
};
use crate::rational::Rational;
use crate::reduce::{self, CnfFormula, GadgetVertex, ReductionArtifact, ReductionKind};
use crate::tss::{
    is_majority, is_target_set, min_target_set_bruteforce_until, preprocess_cap_thresholds, simulate, Activator,
    TssInstance,
};

pub const DEFAULT_ORACLE_BUDGET: Duration = Duration::from_secs(10);

/// Cherries allowed in a random majority-transform case.
pub const MAJORITY_MAX_ALPHA: u64 = 6;
/// Largest output budget `k_min + α` of a random majority-transform case.
pub const MAJORITY_MAX_OUTPUT_K: u64 = 9;
/// Largest output budget for which the exact-2 construction is also
/// checked against the oracle.
pub const EXACT2_ORACLE_MAX_K: u64 = 10;

/// Statement checked per case by an equivalence campaign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Sat2tss,
    Sat2majority,
    Planar2grid,
    Majority,
    Is2udg,
    Grid2exact2,
    UnanimousVc,
    IntervalVc,
    GridVc,
    Preprocess,
    Subdivide,
}

impl Target {
    pub const ALL: [Target; 11] = [
        Target::Sat2tss,
        Target::Sat2majority,
        Target::Planar2grid,
        Target::Majority,
        Target::Is2udg,
        Target::Grid2exact2,
        Target::UnanimousVc,
        Target::IntervalVc,
        Target::GridVc,
        Target::Preprocess,
        Target::Subdivide,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Target::Sat2tss => "sat2tss",
            Target::Sat2majority => "sat2majority",
            Target::Planar2grid => "planar2grid",
            Target::Majority => "majority",
            Target::Is2udg => "is2udg",
            Target::Grid2exact2 => "grid2exact2",
            Target::UnanimousVc => "unanimous-vc",
            Target::IntervalVc => "interval-vc",
            Target::GridVc => "grid-vc",
            Target::Preprocess => "preprocess",
            Target::Subdivide => "subdivide",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id() == id)
    }

    /// Default generator parameters.
    pub fn default_spec(self) -> GeneratorSpec {
        let (max_n, edge_prob) = match self {
            Target::Sat2tss => (3, 0.0),
            Target::Sat2majority => (2, 0.0),
            Target::Planar2grid => (6, 0.0),
            Target::Majority => (8, 0.3),
            Target::Is2udg => (8, 0.0),
            Target::Grid2exact2 => (12, 0.0),
            Target::UnanimousVc => (10, 0.3),
            Target::IntervalVc => (12, 0.0),
            Target::GridVc => (14, 0.0),
            Target::Preprocess => (8, 0.35),
            Target::Subdivide => (8, 0.35),
        };
        GeneratorSpec { max_n, edge_prob }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Size bound (vertices, or variables for formulas) and edge probability
/// for the random generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub max_n: usize,
    pub edge_prob: f64,
}

/// Everything needed to re-run one case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CaseInput {
    Formula { formula: CnfFormula },
    Tss { instance: TssInstance },
    Planar { instance: TssInstance, embedding: RectilinearEmbedding },
    Grid { instance: TssInstance, coords: GridCoords },
    Regular { graph: Graph, r: usize, embedding: RectilinearEmbedding },
    Graph { graph: Graph },
    Intervals { model: IntervalModel },
    Subdivide { instance: TssInstance, edge: Edge },
    Gadget { check: String },
    FillerLengths { g: usize },
    Artifact { artifact: Box<ReductionArtifact> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseOutcome {
    Pass,
    Skip(String),
    Fail { expected: String, actual: String },
}

fn fail(expected: impl Into<String>, actual: impl Into<String>) -> CaseOutcome {
    CaseOutcome::Fail {
        expected: expected.into(),
        actual: actual.into(),
    }
}

/// A failing case together with a standalone reproduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseFailure {
    pub case: usize,
    pub seed: u64,
    pub input: CaseInput,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSkip {
    pub case: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub campaign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    pub seed: u64,
    pub cases_run: usize,
    pub passed: usize,
    pub skipped: Vec<CaseSkip>,
    pub failures: Vec<CaseFailure>,
    pub wall_time_ms: u64,
}

impl VerificationReport {
    pub fn is_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn reproductions(&self) -> Vec<Reproduction> {
        self.failures
            .iter()
            .map(|f| Reproduction {
                campaign: self.campaign.clone(),
                target: self.target,
                case: f.case,
                seed: f.seed,
                input: f.input.clone(),
            })
            .collect()
    }

    /// One line per failure and skip after a summary line.
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}{}: {} cases, {} passed, {} skipped, {} failed ({} ms)",
            self.campaign,
            self.target.map(|t| format!(" {t}")).unwrap_or_default(),
            self.cases_run,
            self.passed,
            self.skipped.len(),
            self.failures.len(),
            self.wall_time_ms
        );
        for f in &self.failures {
            s.push_str(&format!(
                "\n  case {} (seed {}): expected {}, got {}",
                f.case, f.seed, f.expected, f.actual
            ));
        }
        for k in &self.skipped {
            s.push_str(&format!("\n  case {} (seed {}) skipped: {}", k.case, k.seed, k.reason));
        }
        s
    }
}

/// A single case that can be re-run on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub campaign: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    pub case: usize,
    pub seed: u64,
    pub input: CaseInput,
}

/// Re-runs the case described by `repro`.
pub fn replay(repro: &Reproduction, oracle_budget: Duration) -> CaseOutcome {
    match (&repro.input, repro.target) {
        (CaseInput::Gadget { check }, _) => run_gadget_check(check),
        (CaseInput::FillerLengths { g }, _) => check_filler_lengths(*g),
        (CaseInput::Artifact { artifact }, _) => check_artifact(artifact, oracle_budget),
        (input, Some(target)) => check_case(target, input, oracle_budget),
        (_, None) => fail("an equivalence target", "none recorded"),
    }
}

fn case_seed(seed: u64, case: usize) -> u64 {
    seed ^ (case as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Runs `cases` in parallel and merges the outcomes in case order.
fn run_campaign(
    campaign: &str,
    target: Option<Target>,
    seed: u64,
    cases: usize,
    run: impl Fn(usize, u64) -> (CaseInput, CaseOutcome) + Sync,
) -> VerificationReport {
    let start = Instant::now();
    let outcomes: Vec<(usize, u64, CaseInput, CaseOutcome)> = (0..cases)
        .into_par_iter()
        .map(|case| {
            let s = case_seed(seed, case);
            let (input, outcome) = run(case, s);
            (case, s, input, outcome)
        })
        .collect();
    let mut report = VerificationReport {
        campaign: campaign.to_string(),
        target,
        seed,
        cases_run: cases,
        passed: 0,
        skipped: Vec::new(),
        failures: Vec::new(),
        wall_time_ms: 0,
    };
    for (case, seed, input, outcome) in outcomes {
        match outcome {
            CaseOutcome::Pass => report.passed += 1,
            CaseOutcome::Skip(reason) => report.skipped.push(CaseSkip { case, seed, reason }),
            CaseOutcome::Fail { expected, actual } => report.failures.push(CaseFailure {
                case,
                seed,
                input,
                expected,
                actual,
            }),
        }
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    report
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub target: Target,
    pub seed: u64,
    pub trials: usize,
    pub spec: GeneratorSpec,
    #[serde(with = "millis")]
    pub oracle_budget: Duration,
}

impl EquivalenceConfig {
    pub fn new(target: Target, seed: u64, trials: usize) -> Self {
        EquivalenceConfig {
            target,
            seed,
            trials,
            spec: target.default_spec(),
            oracle_budget: DEFAULT_ORACLE_BUDGET,
        }
    }
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

/// Generates `trials` seeded instances for the target and checks each
/// against the brute-force oracles.
pub fn verify_equivalence(cfg: &EquivalenceConfig) -> VerificationReport {
    run_campaign("equivalence", Some(cfg.target), cfg.seed, cfg.trials, |case, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match generate(cfg.target, &cfg.spec, case, &mut rng) {
            Ok(input) => {
                let outcome = check_case(cfg.target, &input, cfg.oracle_budget);
                (input, outcome)
            }
            Err(reason) => (CaseInput::Gadget { check: String::new() }, CaseOutcome::Skip(reason)),
        }
    })
}

/// Draws one source instance for `target`.
pub fn generate<R: Rng + ?Sized>(
    target: Target,
    spec: &GeneratorSpec,
    case: usize,
    rng: &mut R,
) -> Result<CaseInput, String> {
    let n_in = |rng: &mut R, lo: usize| rng.gen_range(lo..=spec.max_n.max(lo));
    Ok(match target {
        Target::Sat2tss | Target::Sat2majority => {
            let n = n_in(rng, 1);
            CaseInput::Formula {
                formula: gen::random_restricted_3sat(n, rng),
            }
        }
        Target::UnanimousVc => {
            let n = n_in(rng, 1);
            CaseInput::Graph {
                graph: gen::erdos_renyi(n, spec.edge_prob, rng),
            }
        }
        Target::IntervalVc => {
            let n = n_in(rng, 1);
            CaseInput::Intervals {
                model: gen::random_intervals(n, 10, rng),
            }
        }
        Target::GridVc => {
            let n = n_in(rng, 1).min(25);
            let (graph, coords) = gen::random_grid_subgraph(5, 5, n, rng);
            CaseInput::Grid {
                instance: TssInstance::unanimous(graph, n as u64),
                coords,
            }
        }
        Target::Preprocess => {
            let n = n_in(rng, 1);
            CaseInput::Tss {
                instance: gen::random_tss(n, spec.edge_prob, 2, rng),
            }
        }
        Target::Subdivide => loop {
            let n = n_in(rng, 2);
            let instance = gen::random_tss(n, spec.edge_prob, 0, rng);
            if let Some(&edge) = instance.graph().edges().choose(rng) {
                break CaseInput::Subdivide { instance, edge };
            }
        },
        Target::Majority => loop {
            let n = n_in(rng, 1);
            let g = gen::erdos_renyi(n, spec.edge_prob, rng);
            let t = gen::near_majority_thresholds(&g, 0.5, rng);
            let instance = TssInstance::new(g, t, n as u64).expect("one threshold per vertex");
            let alpha: u64 = (0..n)
                .map(|v| {
                    let deg = instance.graph().degree(v) as u64;
                    deg.saturating_sub(2 * u64::from(instance.threshold(v)))
                })
                .sum();
            if alpha > MAJORITY_MAX_ALPHA {
                continue;
            }
            let (k, _) = min_target_set_bruteforce_until(&instance, n, None)
                .expect("no deadline")
                .expect("V is a target set");
            if k as u64 + alpha <= MAJORITY_MAX_OUTPUT_K {
                break CaseInput::Tss {
                    instance: instance.with_budget(k as u64),
                };
            }
        },
        Target::Planar2grid => {
            let handcrafted = gen::handcrafted_planar_graphs();
            let g = if rng.gen_bool(0.25) {
                handcrafted.choose(rng).expect("non-empty").clone()
            } else {
                let n = n_in(rng, 2);
                gen::random_planar_bounded(n, rng)
            };
            let t = if rng.gen_bool(0.5) {
                (0..g.n()).map(|v| (g.degree(v) as u32).div_ceil(2)).collect()
            } else {
                gen::random_thresholds(&g, 0, rng)
            };
            let instance = TssInstance::new(g, t, 0).expect("one threshold per vertex");
            let opts = EmbedOptions {
                seed: rng.gen(),
                ..EmbedOptions::default()
            };
            let embedding = compute_embedding(instance.graph(), &opts).map_err(|e| format!("no embedding: {e}"))?;
            CaseInput::Planar { instance, embedding }
        }
        Target::Is2udg => {
            let graphs = gen::regular_planar_graphs();
            let (graph, r) = graphs[case % graphs.len()].clone();
            let opts = EmbedOptions {
                seed: rng.gen(),
                ..EmbedOptions::default()
            };
            let embedding = compute_embedding(&graph, &opts).map_err(|e| format!("no embedding: {e}"))?;
            CaseInput::Regular { graph, r, embedding }
        }
        Target::Grid2exact2 => loop {
            let n = n_in(rng, 2).min(16);
            let (graph, coords) = gen::random_grid_subgraph(4, 4, n, rng);
            if (0..n).all(|v| graph.degree(v) > 0) {
                break CaseInput::Grid {
                    instance: TssInstance::majority(graph, n as u64),
                    coords,
                };
            }
        },
    })
}

struct Oracle {
    deadline: Instant,
}

impl Oracle {
    fn new(budget: Duration) -> Self {
        Oracle {
            deadline: Instant::now() + budget,
        }
    }

    /// Minimum target set of size at most `k_max`; `Err` on timeout.
    fn min_ts(&self, inst: &TssInstance, k_max: usize) -> Result<Option<(usize, Vec<usize>)>, CaseOutcome> {
        min_target_set_bruteforce_until(inst, k_max, Some(self.deadline))
            .map_err(|_| CaseOutcome::Skip("oracle timeout".into()))
    }

    fn k_min(&self, inst: &TssInstance) -> Result<(usize, Vec<usize>), CaseOutcome> {
        Ok(self.min_ts(inst, inst.n())?.expect("V is a target set"))
    }
}

fn ts(inst: &TssInstance, seed: &[usize]) -> bool {
    is_target_set(inst, seed).unwrap_or(false)
}

macro_rules! ensure {
    ($cond:expr, $expected:expr, $actual:expr) => {
        if !$cond {
            return fail($expected, $actual);
        }
    };
}

macro_rules! attempt {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(outcome) => return outcome,
        }
    };
}

macro_rules! reduce_ok {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return fail("construction succeeds", err.to_string()),
        }
    };
}

/// Checks one case of an equivalence campaign.
pub fn check_case(target: Target, input: &CaseInput, oracle_budget: Duration) -> CaseOutcome {
    let oracle = Oracle::new(oracle_budget);
    match (target, input) {
        (Target::Sat2tss | Target::Sat2majority, CaseInput::Formula { formula }) => {
            check_sat(target, formula, &oracle)
        }
        (Target::UnanimousVc, CaseInput::Graph { graph }) => check_unanimous_vc(graph, &oracle),
        (Target::IntervalVc, CaseInput::Intervals { model }) => check_interval_vc(model),
        (Target::GridVc, CaseInput::Grid { instance, coords }) => check_grid_vc(instance.graph(), coords),
        (Target::Preprocess, CaseInput::Tss { instance }) => check_preprocess(instance, &oracle),
        (Target::Subdivide, CaseInput::Subdivide { instance, edge }) => check_subdivide(instance, *edge, &oracle),
        (Target::Majority, CaseInput::Tss { instance }) => check_majority(instance, &oracle),
        (Target::Planar2grid, CaseInput::Planar { instance, embedding }) => {
            check_planar2grid(instance, embedding, &oracle)
        }
        (Target::Is2udg, CaseInput::Regular { graph, r, embedding }) => check_is2udg(graph, *r, embedding),
        (Target::Grid2exact2, CaseInput::Grid { instance, coords }) => check_grid2exact2(instance, coords, &oracle),
        (t, _) => fail(format!("an input for {t}"), "a different input kind"),
    }
}

fn check_sat(target: Target, f: &CnfFormula, oracle: &Oracle) -> CaseOutcome {
    let art = if target == Target::Sat2tss {
        reduce_ok!(reduce::sat_to_planar_tss(f))
    } else {
        reduce_ok!(reduce::sat_to_planar_majority_tss(f))
    };
    let out = art.output_tss().expect("TSS output");
    let (n, m) = (f.num_vars, f.num_clauses());
    let g = out.graph();
    ensure!(g.max_degree() <= 4, "max degree <= 4", g.max_degree().to_string());
    ensure!(art.budget_consistent(), "consistent budget", format!("{:?}", art.budget));
    ensure!(art.provenance_injective(), "injective provenance", "a repeated or missing role");
    if target == Target::Sat2tss {
        ensure!(out.n() == m + 11 * n, format!("{} vertices", m + 11 * n), out.n().to_string());
        let tmax = out.thresholds().iter().max().copied().unwrap_or(0);
        ensure!(tmax <= 2, "max threshold <= 2", tmax.to_string());
        ensure!(out.budget() == n as u64, format!("k = {n}"), out.budget().to_string());
    } else {
        ensure!(is_majority(out), "majority thresholds", "a non-majority vertex");
        let beta = f.clauses.iter().filter(|c| c.len() == 3).count() as u64;
        ensure!(art.counters.beta == Some(beta), format!("beta = {beta}"), format!("{:?}", art.counters.beta));
        ensure!(
            out.budget() == 2 * n as u64 + beta,
            format!("k = {}", 2 * n as u64 + beta),
            out.budget().to_string()
        );
    }
    // every satisfying assignment maps to a target set and back to itself
    let mut satisfiable = false;
    for mask in 0u32..1 << n {
        let a = reduce::Assignment {
            values: (0..n).map(|i| mask & (1 << i) != 0).collect(),
        };
        if !reduce::satisfies(f, &a) {
            continue;
        }
        satisfiable = true;
        let s = reduce_ok!(reduce::assignment_to_target_set(&art, &a));
        ensure!(ts(out, &s), "lifted assignment is a target set", format!("{s:?}"));
        let back = reduce_ok!(reduce::target_set_to_assignment(&art, &s));
        ensure!(back == a, format!("{:?}", a.values), format!("{:?}", back.values));
    }
    let k = out.budget() as usize;
    let found = attempt!(oracle.min_ts(out, k));
    ensure!(
        found.is_some() == satisfiable,
        format!("target set within k exists = {satisfiable}"),
        format!("{found:?}")
    );
    if let Some((_, w)) = found {
        let a = reduce_ok!(reduce::target_set_to_assignment(&art, &w));
        ensure!(reduce::satisfies(f, &a), "decoded assignment satisfies", format!("{:?}", a.values));
    }
    CaseOutcome::Pass
}

fn check_unanimous_vc(g: &Graph, oracle: &Oracle) -> CaseOutcome {
    let inst = TssInstance::unanimous(g.clone(), g.n() as u64);
    let (k, w) = attempt!(oracle.k_min(&inst));
    let cover = min_vertex_cover_bruteforce(g);
    ensure!(k == cover.len(), format!("min vertex cover {}", cover.len()), format!("k_min {k}"));
    ensure!(ts(&inst, &cover), "cover is a target set", format!("{cover:?}"));
    ensure!(g.is_vertex_cover(&w), "target set is a cover", format!("{w:?}"));
    CaseOutcome::Pass
}

fn check_interval_vc(model: &IntervalModel) -> CaseOutcome {
    let g = intersection_graph_intervals(model);
    let cover = min_vertex_cover_interval(model);
    let brute = min_vertex_cover_bruteforce(&g);
    let mis = max_independent_set_bruteforce(&g);
    ensure!(g.is_vertex_cover(&cover), "greedy output is a cover", format!("{cover:?}"));
    ensure!(cover.len() == brute.len(), format!("cover size {}", brute.len()), cover.len().to_string());
    ensure!(cover.len() + mis.len() == g.n(), format!("{} = |VC| + |IS|", g.n()), (cover.len() + mis.len()).to_string());
    CaseOutcome::Pass
}

fn check_grid_vc(g: &Graph, coords: &GridCoords) -> CaseOutcome {
    let cover = match min_vertex_cover_grid(g, coords) {
        Ok(c) => c,
        Err(e) => return fail("grid certificate accepted", e.to_string()),
    };
    let brute = min_vertex_cover_bruteforce(g);
    let mis = max_independent_set_bruteforce(g);
    ensure!(g.is_vertex_cover(&cover), "matching-based output is a cover", format!("{cover:?}"));
    ensure!(cover.len() == brute.len(), format!("cover size {}", brute.len()), cover.len().to_string());
    ensure!(cover.len() + mis.len() == g.n(), format!("{} = |VC| + |IS|", g.n()), (cover.len() + mis.len()).to_string());
    CaseOutcome::Pass
}

fn check_preprocess(inst: &TssInstance, oracle: &Oracle) -> CaseOutcome {
    let pre = preprocess_cap_thresholds(inst);
    let (k, _) = attempt!(oracle.k_min(inst));
    let (k_pre, w_pre) = attempt!(oracle.k_min(&pre.instance));
    let total = k_pre as u64 + pre.budget_spent;
    ensure!(k as u64 == total, format!("k_min {k}"), format!("{k_pre} + {} removed", pre.budget_spent));
    let mut lifted: Vec<usize> = w_pre.iter().map(|&v| pre.kept[v]).collect();
    lifted.extend(&pre.removed);
    ensure!(ts(inst, &lifted), "lifted set is a target set", format!("{lifted:?}"));
    CaseOutcome::Pass
}

fn check_subdivide(inst: &TssInstance, (u, v): Edge, oracle: &Oracle) -> CaseOutcome {
    let sub = reduce_ok!(reduce::subdivide_edge_once(inst, u, v));
    let (k, w) = attempt!(oracle.k_min(inst));
    let (k2, w2) = attempt!(oracle.k_min(&sub.instance));
    ensure!(k == k2, format!("k_min {k}"), format!("k_min {k2} after subdividing"));
    let lifted = sub.lift(&w);
    ensure!(ts(&sub.instance, &lifted), "lifted set is a target set", format!("{lifted:?}"));
    let projected = sub.project(&w2);
    ensure!(
        projected.len() == k2 && ts(inst, &projected),
        "projected set is a target set of the same size",
        format!("{projected:?}")
    );
    CaseOutcome::Pass
}

fn check_majority(inst: &TssInstance, oracle: &Oracle) -> CaseOutcome {
    let art = reduce_ok!(reduce::majority_transform(inst));
    let out = art.output_tss().expect("TSS output");
    let alpha = art.counters.alpha.unwrap_or(0) as usize;
    ensure!(is_majority(out), "majority thresholds", "a non-majority vertex");
    ensure!(art.budget_consistent(), "consistent budget", format!("{:?}", art.budget));
    ensure!(art.provenance_injective(), "injective provenance", "a repeated or missing role");
    let (k, w) = attempt!(oracle.k_min(inst));
    let (k2, w2) = attempt!(oracle.k_min(out));
    ensure!(k2 == k + alpha, format!("k_min' = {k} + {alpha}"), format!("k_min' = {k2}"));
    let src = inst.clone().with_budget(k as u64);
    let art = reduce_ok!(reduce::majority_transform(&src));
    let lifted = reduce_ok!(reduce::majority_lift_witness(&art, &w));
    ensure!(lifted.len() == k + alpha, format!("{} lifted seeds", k + alpha), lifted.len().to_string());
    let projected = reduce_ok!(reduce::majority_project_witness(&art, &w2));
    ensure!(projected.len() <= k, format!("at most {k} projected seeds"), projected.len().to_string());
    CaseOutcome::Pass
}

fn check_planar2grid(inst: &TssInstance, emb: &RectilinearEmbedding, oracle: &Oracle) -> CaseOutcome {
    let (k, w) = attempt!(oracle.k_min(inst));
    let src = inst.clone().with_budget(k as u64);
    let art = reduce_ok!(reduce::planar_tss_to_grid_tss(&src, emb));
    let out = art.output_tss().expect("TSS output");
    let coords = art.coords.as_ref().expect("grid output carries coordinates");
    if let Err(v) = validate_grid_graph(out.graph(), coords) {
        return fail("a grid graph", v.to_string());
    }
    ensure!(art.budget_consistent(), "consistent budget", format!("{:?}", art.budget));
    ensure!(art.provenance_injective(), "injective provenance", "a repeated or missing role");
    if is_majority(inst) {
        ensure!(is_majority(out), "majority output for majority input", "a non-majority vertex");
    }
    let (k2, w2) = attempt!(oracle.k_min(out));
    ensure!(k2 == k, format!("k_min {k}"), format!("k_min {k2} on the grid"));
    let lifted = reduce_ok!(reduce::grid_lift_witness(&art, &w));
    ensure!(ts(out, &lifted), "lifted set is a target set", format!("{lifted:?}"));
    let projected = reduce_ok!(reduce::grid_project_witness(&art, &w2));
    ensure!(projected.len() <= k, format!("at most {k} projected seeds"), projected.len().to_string());
    CaseOutcome::Pass
}

fn check_is2udg(g: &Graph, r: usize, emb: &RectilinearEmbedding) -> CaseOutcome {
    let mis = max_independent_set_bruteforce(g);
    let art = reduce_ok!(reduce::is_planar_to_is_udg(g, r, mis.len() as u64, emb));
    let out = art.output_graph();
    let disks = art.disks.as_ref().expect("disk output");
    ensure!(intersection_graph_disks(disks) == *out, "disk intersection graph equals G'", "a differing edge set");
    ensure!(check_regular(out, r), format!("{r}-regular output"), "an irregular vertex");
    for p in &art.plans {
        ensure!(
            p.is_consistent() && p.y % 6 == 0,
            "subdivision count divisible by 6",
            format!("{p:?}")
        );
    }
    ensure!(art.budget_consistent(), "consistent budget", format!("{:?}", art.budget));
    ensure!(art.provenance_injective(), "injective provenance", "a repeated or missing role");
    let extra: usize = art.plans.iter().map(|p| 3 * p.q as usize).sum();
    let best = max_independent_set_bb(out);
    ensure!(out.is_independent(&best), "independent branch-and-bound output", format!("{best:?}"));
    ensure!(
        best.len() == mis.len() + extra,
        format!("alpha(G') = {} + {extra}", mis.len()),
        best.len().to_string()
    );
    let lifted = reduce_ok!(reduce::is_lift_witness(&art, &mis));
    ensure!(
        out.is_independent(&lifted) && lifted.len() == mis.len() + extra,
        "lifted set independent of full size",
        format!("{} vertices", lifted.len())
    );
    let projected = reduce_ok!(reduce::is_project_witness(&art, &best));
    ensure!(projected.len() >= mis.len(), format!("at least {} projected", mis.len()), projected.len().to_string());
    CaseOutcome::Pass
}

fn check_grid2exact2(inst: &TssInstance, coords: &GridCoords, oracle: &Oracle) -> CaseOutcome {
    let (k, w) = attempt!(oracle.k_min(inst));
    let src = inst.clone().with_budget(k as u64);
    let art = reduce_ok!(reduce::majority_grid_to_exact2_udg(&src, coords));
    let out = art.output_tss().expect("TSS output");
    let disks = art.disks.as_ref().expect("disk output");
    let z = art.counters.z.unwrap_or(0);
    let n = inst.n();
    ensure!(intersection_graph_disks(disks) == *out.graph(), "disk intersection graph equals G'", "a differing edge set");
    for leaf in n..out.n() {
        let hits: Vec<usize> = (0..disks.len()).filter(|&j| j != leaf && disks.intersects(leaf, j)).collect();
        let parent = out.graph().neighbors(leaf);
        ensure!(hits == parent && hits.len() == 1 && hits[0] < n, "leaf disk meets only its parent", format!("leaf {leaf} meets {hits:?}"));
    }
    ensure!(out.thresholds().iter().all(|&t| t == 2), "all thresholds 2", format!("{:?}", out.thresholds()));
    ensure!(out.graph().max_degree() <= 4, "max degree <= 4", out.graph().max_degree().to_string());
    ensure!(out.budget() == k as u64 + z, format!("k' = {k} + {z}"), out.budget().to_string());
    let pre = preprocess_cap_thresholds(out);
    ensure!(pre.instance == src && pre.budget_spent == z, "capping restores the source", "a different instance");
    let lifted = reduce_ok!(reduce::exact2_lift_witness(&art, &w));
    ensure!(ts(out, &lifted), "lifted set is a target set", format!("{lifted:?}"));
    if k as u64 + z <= EXACT2_ORACLE_MAX_K {
        let (k2, w2) = attempt!(oracle.k_min(out));
        ensure!(k2 as u64 == k as u64 + z, format!("k_min' = {k} + {z}"), k2.to_string());
        let projected = reduce_ok!(reduce::exact2_project_witness(&art, &w2));
        ensure!(projected.len() <= k, format!("at most {k} projected seeds"), projected.len().to_string());
    }
    CaseOutcome::Pass
}

/// Re-checks a stored artifact: budget record, provenance, output class
/// and the optimum relation between source and output by the oracles.
pub fn verify_artifact(art: &ReductionArtifact, oracle_budget: Duration) -> VerificationReport {
    run_campaign("artifact", None, 0, 1, |_, _| {
        let outcome = check_artifact(art, oracle_budget);
        (
            CaseInput::Artifact {
                artifact: Box::new(art.clone()),
            },
            outcome,
        )
    })
}

fn check_artifact(art: &ReductionArtifact, oracle_budget: Duration) -> CaseOutcome {
    let oracle = Oracle::new(oracle_budget);
    ensure!(art.budget_consistent(), "consistent budget", format!("{:?}", art.budget));
    ensure!(art.provenance_injective(), "injective provenance", "a repeated or missing role");
    if let Some(disks) = &art.disks {
        ensure!(
            intersection_graph_disks(disks) == *art.output_graph(),
            "disk intersection graph equals the output graph",
            "a differing edge set"
        );
    }
    if let Some(coords) = &art.coords {
        if let Err(v) = validate_grid_graph(art.output_graph(), coords) {
            return fail("a grid graph", v.to_string());
        }
    }
    match (art.reduction, &art.source, &art.output) {
        (ReductionKind::Sat2Tss | ReductionKind::Sat2Majority, reduce::Instance::Cnf(f), reduce::Instance::Tss(out)) => {
            if art.reduction == ReductionKind::Sat2Tss {
                let tmax = out.thresholds().iter().max().copied().unwrap_or(0);
                ensure!(tmax <= 2, "max threshold <= 2", tmax.to_string());
            } else {
                ensure!(is_majority(out), "majority thresholds", "a non-majority vertex");
            }
            ensure!(out.graph().max_degree() <= 4, "max degree <= 4", out.graph().max_degree().to_string());
            if f.num_vars > 24 {
                return CaseOutcome::Skip("formula too large to enumerate".into());
            }
            let sat = reduce::brute_force_sat(f).is_some();
            let found = attempt!(oracle.min_ts(out, out.budget() as usize));
            ensure!(
                found.is_some() == sat,
                format!("target set within k exists = {sat}"),
                format!("{found:?}")
            );
        }
        (ReductionKind::Is2Udg, reduce::Instance::IndependentSet(src), reduce::Instance::IndependentSet(out)) => {
            for p in &art.plans {
                ensure!(p.is_consistent(), "subdivision count divisible by 6", format!("{p:?}"));
            }
            let extra: usize = art.plans.iter().map(|p| 3 * p.q as usize).sum();
            let a = if src.graph.n() <= 30 {
                max_independent_set_bruteforce(&src.graph).len()
            } else {
                max_independent_set_bb(&src.graph).len()
            };
            let b = max_independent_set_bb(&out.graph).len();
            ensure!(b == a + extra, format!("alpha(G') = {a} + {extra}"), b.to_string());
        }
        (kind, reduce::Instance::Tss(src), reduce::Instance::Tss(out)) => {
            if kind != ReductionKind::Planar2Grid {
                ensure!(
                    kind != ReductionKind::Grid2Exact2 || out.thresholds().iter().all(|&t| t == 2),
                    "all thresholds 2",
                    format!("{:?}", out.thresholds())
                );
                ensure!(is_majority(out) || kind == ReductionKind::Grid2Exact2, "majority thresholds", "a non-majority vertex");
            }
            let shift = match kind {
                ReductionKind::Majority => art.counters.alpha.unwrap_or(0),
                ReductionKind::Grid2Exact2 => art.counters.z.unwrap_or(0),
                _ => 0,
            } as usize;
            let (k, _) = attempt!(oracle.k_min(src));
            let (k2, _) = attempt!(oracle.k_min(out));
            ensure!(k2 == k + shift, format!("k_min' = {k} + {shift}"), k2.to_string());
        }
        _ => return fail("source and output kinds matching the reduction", format!("{:?}", art.reduction)),
    }
    CaseOutcome::Pass
}

/// Names of the deterministic gadget checks, in campaign order.
pub fn gadget_checks() -> Vec<String> {
    let mut out: Vec<String> = ["property-i", "property-ii", "property-iii", "property-iv", "property-v"]
        .into_iter()
        .map(String::from)
        .collect();
    out.extend((6..=9).map(|l| format!("chain-{l}")));
    out.extend((0..pigeonhole_instances().len()).map(|i| format!("cherry-{i}")));
    out
}

/// The variable gadget of a one-variable formula with its literal edges
/// replaced by stub vertices: two on `t` and one on `f`.
fn isolated_gadget() -> (TssInstance, impl Fn(GadgetVertex) -> usize) {
    let f = CnfFormula::new(1, vec![vec![1], vec![1], vec![-1]]).expect("valid");
    let art = reduce::sat_to_planar_tss(&f).expect("restricted formula");
    let inst = art.output_tss().expect("TSS output").clone();
    let id = |name: GadgetVertex| reduce::GADGET_ORDER.iter().position(|&x| x == name).expect("listed");
    (inst, id)
}

fn pigeonhole_instances() -> Vec<TssInstance> {
    let star = Graph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).expect("star");
    vec![
        TssInstance::new(star, vec![1, 1, 1, 1, 1], 0).expect("valid"),
        TssInstance::new(Graph::path(3), vec![0, 0, 0], 0).expect("valid"),
        TssInstance::new(Graph::complete(4), vec![1; 4], 0).expect("valid"),
    ]
}

/// All target sets of exactly `k` vertices.
fn target_sets_of_size(inst: &TssInstance, k: usize) -> Vec<Vec<usize>> {
    fn rec(act: &mut Activator, n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            if act.activates_all(cur.iter().copied()) {
                out.push(cur.clone());
            }
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(act, n, k, v + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    let mut act = Activator::new(inst);
    rec(&mut act, inst.n(), k, 0, &mut Vec::new(), &mut out);
    out
}

/// Runs one named gadget check.
pub fn run_gadget_check(check: &str) -> CaseOutcome {
    use GadgetVertex::*;
    let (inst, id) = isolated_gadget();
    let stubs = [11usize, 12, 13];
    let rounds_of = |seed: &[usize]| simulate(&inst, seed).expect("valid seed");
    match check {
        "property-i" => {
            let trace = rounds_of(&[id(UpperT)]);
            let targets = [A, B, C, D, LowerT].map(&id);
            let s4 = trace.rounds.get(4).or(trace.rounds.last()).expect("S_0 exists");
            let late = targets.iter().find(|v| !s4.contains(v));
            ensure!(late.is_none(), "a, b, c, d, t active after 4 rounds", format!("{late:?} inactive"));
            let r = targets.iter().filter_map(|&v| trace.activation_round(v)).max();
            ensure!(r == Some(4), "last of them activates in round 4", format!("{r:?}"));
        }
        "property-ii" => {
            let trace = rounds_of(&[id(UpperF)]);
            let targets = [P3, P2, P1, LowerF].map(&id);
            let r: Vec<Option<usize>> = targets.iter().map(|&v| trace.activation_round(v)).collect();
            ensure!(r == [Some(1), Some(2), Some(3), Some(4)], "path active after 4 rounds", format!("{r:?}"));
        }
        "property-iii" => {
            let trace = rounds_of(&stubs);
            let fin = trace.final_set();
            ensure!(
                !fin.contains(&id(UpperT)) && !fin.contains(&id(UpperF)),
                "T and F inactive at the fixed point",
                format!("{fin:?}")
            );
        }
        "property-iv" => {
            let trace = rounds_of(&[id(UpperF), id(LowerT)]);
            let missing: Vec<usize> = (0..11).filter(|v| !trace.final_set().contains(v)).collect();
            ensure!(missing.is_empty(), "whole gadget active", format!("{missing:?} inactive"));
        }
        "property-v" => {
            let trace = rounds_of(&[id(UpperT), id(LowerF)]);
            let missing: Vec<usize> = (0..11).filter(|v| !trace.final_set().contains(v)).collect();
            ensure!(missing.is_empty(), "whole gadget active", format!("{missing:?} inactive"));
        }
        c if c.starts_with("chain-") => {
            let Ok(ell) = c["chain-".len()..].parse::<usize>() else {
                return fail("a chain length", c);
            };
            return check_chain(ell);
        }
        c if c.starts_with("cherry-") => {
            let Some(src) = c["cherry-".len()..].parse::<usize>().ok().and_then(|i| pigeonhole_instances().get(i).cloned())
            else {
                return fail("a known pigeonhole instance", c);
            };
            let art = reduce_ok!(reduce::majority_transform(&src));
            let out = art.output_tss().expect("TSS output");
            let (k, _) = crate::tss::min_target_set_bruteforce(out, out.n()).expect("V is a target set");
            let cherries: Vec<Vec<usize>> = {
                let mut by: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
                for (v, role) in art.provenance.iter().enumerate() {
                    if let reduce::Role::Cherry { index, .. } = role {
                        by.entry(*index).or_default().push(v);
                    }
                }
                by.into_values().collect()
            };
            ensure!(!cherries.is_empty(), "at least one cherry", "none");
            let optima = target_sets_of_size(out, k);
            for s in &optima {
                if let Some(c) = cherries.iter().find(|c| !c.iter().any(|v| s.contains(v))) {
                    return fail("a seed in every cherry", format!("{s:?} misses {c:?}"));
                }
            }
        }
        other => return fail("a known gadget check", other),
    }
    CaseOutcome::Pass
}

/// First disk 1/7 from `p`, last 1/7 from `q`, and the disks at `p`, the
/// chain and `q` intersect exactly along a path.
fn check_chain(ell: usize) -> CaseOutcome {
    let (p, q) = (GridPoint::new(0, 0), GridPoint::new(1, 0));
    let centers = reduce_ok!(reduce::chain_centers(p, q, ell));
    let d = Rational::new(reduce::CHAIN_DIAMETER.0, reduce::CHAIN_DIAMETER.1);
    let first = centers[0].squared_distance(&p.to_geo());
    let last = centers[ell - 1].squared_distance(&q.to_geo());
    ensure!(first == d.square(), "first center at distance 1/7", first.to_string());
    ensure!(last == d.square(), "last center at distance 1/7 from the far end", last.to_string());
    let mut all = vec![p.to_geo()];
    all.extend(centers);
    all.push(q.to_geo());
    let rep = DiskRepresentation::new(d, all).expect("positive diameter");
    let g = intersection_graph_disks(&rep);
    ensure!(g == Graph::path(ell + 2), "a path of disks", format!("{:?}", g.edges()));
    CaseOutcome::Pass
}

pub fn verify_gadgets() -> VerificationReport {
    let checks = gadget_checks();
    run_campaign("gadgets", None, 0, checks.len(), |case, _| {
        let check = checks[case].clone();
        let outcome = run_gadget_check(&check);
        (CaseInput::Gadget { check }, outcome)
    })
}

fn check_filler_lengths(g: usize) -> CaseOutcome {
    let w = match reduce::choose_w(g) {
        Ok(w) => w,
        Err(e) => return fail("filler lengths", e.to_string()),
    };
    ensure!(w.len() == g - 1, format!("{} lengths", g - 1), w.len().to_string());
    ensure!(w.iter().all(|x| (6..=9).contains(x)), "lengths in 6..=9", format!("{w:?}"));
    let total = g as u64 - 2 + w.iter().map(|&x| u64::from(x)).sum::<u64>();
    ensure!(total.is_multiple_of(6), "g - 2 + sum w divisible by 6", total.to_string());
    CaseOutcome::Pass
}

/// Checks [`reduce::choose_w`] for every `g` in `2..=g_max`.
pub fn verify_mod6(g_max: usize) -> VerificationReport {
    assert!(g_max >= 2, "g_max must be at least 2");
    run_campaign("mod6", None, 0, g_max - 1, |case, _| {
        let g = case + 2;
        (CaseInput::FillerLengths { g }, check_filler_lengths(g))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadgets_pass() {
        let r = verify_gadgets();
        assert!(r.is_pass(), "{}", r.summary());
        assert!(r.skipped.is_empty());
    }

    #[test]
    fn mod6_pass() {
        let r = verify_mod6(100);
        assert!(r.is_pass());
        assert_eq!(r.cases_run, 99);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = EquivalenceConfig::new(Target::UnanimousVc, 5, 10);
        let mut a = verify_equivalence(&cfg);
        let mut b = verify_equivalence(&cfg);
        a.wall_time_ms = 0;
        b.wall_time_ms = 0;
        assert_eq!(a, b);
        assert!(a.is_pass(), "{}", a.summary());
    }

    #[test]
    fn failures_replay() {
        // a corrupted gadget name fails and replays to the same outcome
        let repro = Reproduction {
            campaign: "gadgets".into(),
            target: None,
            case: 0,
            seed: 0,
            input: CaseInput::Gadget { check: "chain-5".into() },
        };
        let first = replay(&repro, DEFAULT_ORACLE_BUDGET);
        assert!(matches!(first, CaseOutcome::Fail { .. }));
        let json = serde_json::to_string(&repro).unwrap();
        let back: Reproduction = serde_json::from_str(&json).unwrap();
        assert_eq!(replay(&back, DEFAULT_ORACLE_BUDGET), first);
    }

    #[test]
    fn every_target_runs() {
        for t in Target::ALL {
            let cfg = EquivalenceConfig::new(t, 11, 2);
            let r = verify_equivalence(&cfg);
            assert!(r.is_pass(), "{}", r.summary());
        }
    }
}
