//! Acceptance suite. Runs every criterion, prints one line per criterion
//! and exits nonzero if any of them fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tssgeo::embed::{compute_embedding, validate_embedding, EmbedOptions};
use tssgeo::gen;
use tssgeo::harness::{
    check_case, run_gadget_check, verify_equivalence, verify_gadgets, verify_mod6, CaseInput, CaseOutcome,
    EquivalenceConfig, GeneratorSpec, Target, VerificationReport, DEFAULT_ORACLE_BUDGET,
};
use tssgeo::reduce::{chain_centers, choose_w, CHAIN_DIAMETER};
use tssgeo::{intersection_graph_disks, DiskRepresentation, Graph, GridPoint, Rational};

const SEED: u64 = 20240611;
/// Constant of the logged `C·n²` embedding area bound.
const AREA_C: f64 = 40.0;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "disk chain", limit: secs(1), run: disk_chain },
        Criterion { id: 2, name: "filler lengths mod 6", limit: secs(1), run: filler_lengths },
        Criterion { id: 3, name: "unanimous TSS = vertex cover", limit: secs(60), run: unanimous_vc },
        Criterion { id: 4, name: "variable gadget", limit: secs(1), run: gadget },
        Criterion { id: 5, name: "SAT reduction", limit: secs(600), run: sat_reduction },
        Criterion { id: 6, name: "planar to grid", limit: secs(600), run: planar_to_grid },
        Criterion { id: 7, name: "majority transform", limit: secs(600), run: majority },
        Criterion { id: 8, name: "IS to unit disk graph", limit: secs(300), run: is_to_udg },
        Criterion { id: 9, name: "exact-2 unit disk graph", limit: secs(60), run: exact2 },
        Criterion { id: 10, name: "polynomial vertex cover", limit: secs(300), run: polynomial_vc },
        Criterion { id: 11, name: "capping and subdivision", limit: secs(600), run: capping_and_subdivision },
        Criterion { id: 12, name: "embedding pipeline", limit: secs(300), run: embedding },
    ]
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in criteria() {
        if !filter.is_empty() && !filter.iter().any(|f| c.id.to_string() == *f || c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.limit => Err(format!("{detail}; took {elapsed:.2?}, limit {:?}", c.limit)),
            other => other,
        };
        match &result {
            Ok(detail) => println!("criterion {:>2} {:<30} PASS  {elapsed:>9.2?}  {detail}", c.id, c.name),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {:<30} FAIL  {elapsed:>9.2?}  {detail}", c.id, c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

/// Zero failures and zero skips.
fn clean(r: &VerificationReport) -> Outcome {
    if r.is_pass() && r.skipped.is_empty() {
        Ok(format!("{} cases", r.cases_run))
    } else {
        Err(r.summary())
    }
}

fn expect_pass(label: &str, outcome: CaseOutcome) -> Result<(), String> {
    match outcome {
        CaseOutcome::Pass => Ok(()),
        CaseOutcome::Skip(reason) => Err(format!("{label}: skipped ({reason})")),
        CaseOutcome::Fail { expected, actual } => Err(format!("{label}: expected {expected}, got {actual}")),
    }
}

fn disk_chain() -> Outcome {
    let d = Rational::new(CHAIN_DIAMETER.0, CHAIN_DIAMETER.1);
    let (p, q) = (GridPoint::new(0, 0), GridPoint::new(1, 0));
    for ell in 6..=9usize {
        let c = chain_centers(p, q, ell).map_err(|e| e.to_string())?;
        if c[0].x != Rational::new(1, 7) || c[0].y != Rational::from(0) {
            return Err(format!("l = {ell}: first center {:?}", c[0]));
        }
        if c[ell - 1].x != Rational::new(6, 7) {
            return Err(format!("l = {ell}: last center {:?}", c[ell - 1]));
        }
        let mut all = vec![p.to_geo()];
        all.extend(c);
        all.push(q.to_geo());
        let rep = DiskRepresentation::new(d.clone(), all).map_err(|e| e.to_string())?;
        if intersection_graph_disks(&rep) != Graph::path(ell + 2) {
            return Err(format!("l = {ell}: intersection pattern is not a path"));
        }
    }
    Ok("l = 6..9 exact".into())
}

fn filler_lengths() -> Outcome {
    let r = verify_mod6(1000);
    clean(&r)?;
    // frozen values from the case table
    let frozen: [(usize, &[u32]); 4] = [(2, &[6]), (3, &[9, 8]), (4, &[8, 8, 6]), (7, &[7, 6, 6, 6, 6, 6])];
    for (g, w) in frozen {
        if choose_w(g).map_err(|e| e.to_string())? != w {
            return Err(format!("g = {g}"));
        }
    }
    Ok(format!("g = 2..1000, {} cases", r.cases_run))
}

fn equivalence(target: Target, trials: usize, spec: Option<GeneratorSpec>) -> VerificationReport {
    let mut cfg = EquivalenceConfig::new(target, SEED, trials);
    if let Some(spec) = spec {
        cfg.spec = spec;
    }
    verify_equivalence(&cfg)
}

fn unanimous_vc() -> Outcome {
    clean(&equivalence(
        Target::UnanimousVc,
        200,
        Some(GeneratorSpec {
            max_n: 10,
            edge_prob: 0.3,
        }),
    ))
}

fn gadget() -> Outcome {
    for p in ["property-i", "property-ii", "property-iii", "property-iv", "property-v"] {
        expect_pass(p, run_gadget_check(p))?;
    }
    clean(&verify_gadgets())
}

fn sat_reduction() -> Outcome {
    let formulas = gen::handcrafted_restricted_formulas();
    let (mut sat, mut unsat) = (0, 0);
    for (i, (f, satisfiable)) in formulas.iter().enumerate() {
        if f.num_vars > 3 || f.num_clauses() > 5 {
            return Err(format!("formula {i} exceeds n <= 3, m <= 5"));
        }
        if tssgeo::reduce::brute_force_sat(f).is_some() != *satisfiable {
            return Err(format!("formula {i}: recorded status is wrong"));
        }
        if *satisfiable {
            sat += 1;
        } else {
            unsat += 1;
        }
        let input = CaseInput::Formula { formula: f.clone() };
        expect_pass(&format!("formula {i}"), check_case(Target::Sat2tss, &input, DEFAULT_ORACLE_BUDGET))?;
    }
    if sat == 0 || unsat == 0 || formulas.len() < 5 {
        return Err("need at least 5 formulas of both kinds".into());
    }
    Ok(format!("{sat} satisfiable, {unsat} unsatisfiable"))
}

fn planar_to_grid() -> Outcome {
    let mut cases = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for (i, g) in gen::handcrafted_planar_graphs().into_iter().enumerate() {
        let emb = compute_embedding(&g, &EmbedOptions::default()).map_err(|e| format!("graph {i}: {e}"))?;
        let majority = tssgeo::TssInstance::majority(g.clone(), 0);
        let random = tssgeo::TssInstance::new(g.clone(), gen::random_thresholds(&g, 0, &mut rng), 0)
            .map_err(|e| e.to_string())?;
        for (label, instance) in [("majority", majority), ("random", random)] {
            let input = CaseInput::Planar {
                instance,
                embedding: emb.clone(),
            };
            expect_pass(
                &format!("graph {i} ({label})"),
                check_case(Target::Planar2grid, &input, DEFAULT_ORACLE_BUDGET),
            )?;
            cases += 1;
        }
    }
    let r = equivalence(Target::Planar2grid, 40, None);
    clean(&r)?;
    Ok(format!("{cases} handcrafted, {} random cases", r.cases_run))
}

fn majority() -> Outcome {
    let mut cfg = EquivalenceConfig::new(Target::Majority, SEED, 200);
    cfg.oracle_budget = secs(300);
    clean(&verify_equivalence(&cfg))
}

fn is_to_udg() -> Outcome {
    for (g, r, name) in [(Graph::complete(4), 3, "K4"), (Graph::octahedron(), 4, "octahedron")] {
        let embedding = compute_embedding(&g, &EmbedOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        let input = CaseInput::Regular { graph: g, r, embedding };
        expect_pass(name, check_case(Target::Is2udg, &input, DEFAULT_ORACLE_BUDGET))?;
    }
    Ok("K4, octahedron".into())
}

fn exact2() -> Outcome {
    clean(&equivalence(
        Target::Grid2exact2,
        100,
        Some(GeneratorSpec {
            max_n: 12,
            edge_prob: 0.0,
        }),
    ))
}

fn polynomial_vc() -> Outcome {
    let a = equivalence(Target::IntervalVc, 200, None);
    clean(&a)?;
    let b = equivalence(Target::GridVc, 200, None);
    clean(&b)?;
    Ok(format!("{} interval, {} grid cases", a.cases_run, b.cases_run))
}

fn capping_and_subdivision() -> Outcome {
    let a = equivalence(Target::Preprocess, 200, None);
    clean(&a)?;
    let b = equivalence(Target::Subdivide, 200, None);
    clean(&b)?;
    Ok(format!("{} capping, {} subdivision cases", a.cases_run, b.cases_run))
}

fn embedding() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let n = 2 + i % 29;
        let g = gen::random_planar_bounded(n, &mut rng);
        let opts = EmbedOptions {
            seed: SEED + i as u64,
            ..EmbedOptions::default()
        };
        let emb = compute_embedding(&g, &opts).map_err(|e| format!("graph {i} (n = {n}): {e}"))?;
        let report = validate_embedding(&g, &emb);
        if !report.is_valid() {
            return Err(format!("graph {i}: {:?}", report.violations));
        }
        worst = worst.max(emb.area() as f64 / (n * n) as f64);
    }
    let note = if worst <= AREA_C { "within" } else { "above" };
    Ok(format!("50 graphs valid; max area/n^2 = {worst:.1} ({note} C = {AREA_C})"))
}
