//! CNF formulas, DIMACS input and the SAT reductions onto planar TSS with
//! thresholds at most 2 and onto planar majority TSS.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::majority::{attach, project_attachments, Attachments};
use super::{
    check_target_set, BudgetRecord, Counters, GadgetVertex, Instance, ReduceError, ReductionArtifact, ReductionKind,
    Role,
};
use crate::graph::Graph;
use crate::tss::TssInstance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause {0} is empty")]
    EmptyClause(usize),
    #[error("clause {clause} has literal {literal} outside 1..={num_vars}")]
    LiteralOutOfRange { clause: usize, literal: i64, num_vars: usize },
    #[error("clause {clause} repeats literal {literal}")]
    DuplicateLiteral { clause: usize, literal: i64 },
}

/// A CNF formula over variables `1..=num_vars`; literal `-i` negates `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CnfJson")]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct CnfJson {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
}

impl TryFrom<CnfJson> for CnfFormula {
    type Error = CnfError;
    fn try_from(raw: CnfJson) -> Result<Self, CnfError> {
        CnfFormula::new(raw.num_vars, raw.clauses)
    }
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self, CnfError> {
        for (j, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(CnfError::EmptyClause(j));
            }
            let mut seen = BTreeSet::new();
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > num_vars {
                    return Err(CnfError::LiteralOutOfRange {
                        clause: j,
                        literal: l,
                        num_vars,
                    });
                }
                if !seen.insert(l) {
                    return Err(CnfError::DuplicateLiteral { clause: j, literal: l });
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&l.to_string());
                s.push(' ');
            }
            s.push_str("0\n");
        }
        s
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

/// Parses DIMACS CNF. Comment lines start with `c`; a clause ends at each
/// `0`, so several clauses may share a line and one clause may span lines.
/// A trailing clause without its terminating `0` is accepted.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let err = |line: usize, message: String| DimacsError { line, message };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(err(line_no, "duplicate header".into()));
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(err(line_no, format!("malformed header {line:?}")));
            }
            let v = parts[2]
                .parse()
                .map_err(|_| err(line_no, format!("bad variable count {:?}", parts[2])))?;
            let c = parts[3]
                .parse()
                .map_err(|_| err(line_no, format!("bad clause count {:?}", parts[3])))?;
            header = Some((v, c, line_no));
            continue;
        }
        let Some((num_vars, _, _)) = header else {
            return Err(err(line_no, "clause before header".into()));
        };
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| err(line_no, format!("bad literal {tok:?}")))?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(err(line_no, "empty clause".into()));
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(err(line_no, format!("literal {lit} exceeds {num_vars} variables")));
                }
                if current.contains(&lit) {
                    return Err(err(line_no, format!("literal {lit} repeated in clause")));
                }
                current.push(lit);
            }
        }
    }
    let Some((num_vars, declared, header_line)) = header else {
        return Err(err(last_line.max(1), "missing header".into()));
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(err(
            header_line,
            format!("header declares {declared} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::new(num_vars, clauses).map_err(|e| err(header_line, e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RestrictedViolation {
    ClauseTooLarge { clause: usize, size: usize },
    Occurrences { var: usize, positive: usize, negative: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedReport {
    pub violations: Vec<RestrictedViolation>,
}

impl RestrictedReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks clause sizes (at most 3) and that every variable occurs exactly
/// twice positively and once negatively. Planarity of the incidence graph
/// is not checked.
pub fn validate_restricted_3sat(f: &CnfFormula) -> RestrictedReport {
    let mut violations = Vec::new();
    for (j, c) in f.clauses.iter().enumerate() {
        if c.len() > 3 {
            violations.push(RestrictedViolation::ClauseTooLarge {
                clause: j,
                size: c.len(),
            });
        }
    }
    let mut pos = vec![0usize; f.num_vars + 1];
    let mut neg = vec![0usize; f.num_vars + 1];
    for &l in f.clauses.iter().flatten() {
        if l > 0 {
            pos[l as usize] += 1;
        } else {
            neg[(-l) as usize] += 1;
        }
    }
    for var in 1..=f.num_vars {
        if pos[var] != 2 || neg[var] != 1 {
            violations.push(RestrictedViolation::Occurrences {
                var,
                positive: pos[var],
                negative: neg[var],
            });
        }
    }
    RestrictedReport { violations }
}

/// A truth assignment; `values[i]` is the value of variable `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub values: Vec<bool>,
}

impl Assignment {
    pub fn value(&self, var: usize) -> bool {
        self.values[var - 1]
    }

    pub fn literal(&self, lit: i64) -> bool {
        let v = self.value(lit.unsigned_abs() as usize);
        if lit > 0 {
            v
        } else {
            !v
        }
    }
}

pub fn satisfies(f: &CnfFormula, a: &Assignment) -> bool {
    a.values.len() == f.num_vars && f.clauses.iter().all(|c| c.iter().any(|&l| a.literal(l)))
}

/// First satisfying assignment in binary counting order (variable 1 is
/// the least significant bit). Limited to 24 variables.
pub fn brute_force_sat(f: &CnfFormula) -> Option<Assignment> {
    assert!(f.num_vars <= 24, "enumeration limited to 24 variables");
    (0u32..1 << f.num_vars)
        .map(|mask| Assignment {
            values: (0..f.num_vars).map(|i| mask & (1 << i) != 0).collect(),
        })
        .find(|a| satisfies(f, a))
}

/// Vertex order inside each variable gadget.
pub const GADGET_ORDER: [GadgetVertex; 11] = [
    GadgetVertex::UpperT,
    GadgetVertex::UpperF,
    GadgetVertex::LowerT,
    GadgetVertex::LowerF,
    GadgetVertex::A,
    GadgetVertex::B,
    GadgetVertex::C,
    GadgetVertex::D,
    GadgetVertex::P1,
    GadgetVertex::P2,
    GadgetVertex::P3,
];

const GADGET_EDGES: [(GadgetVertex, GadgetVertex); 12] = {
    use GadgetVertex::*;
    [
        (A, LowerT),
        (A, B),
        (A, C),
        (C, D),
        (B, D),
        (D, UpperT),
        (UpperT, UpperF),
        (UpperF, P3),
        (P3, P2),
        (P2, P1),
        (P1, LowerF),
        (LowerT, UpperT),
    ]
};

fn gadget_threshold(name: GadgetVertex) -> u32 {
    use GadgetVertex::*;
    match name {
        UpperT | UpperF | LowerT | A => 2,
        _ => 1,
    }
}

/// Output id of gadget vertex `name` for variable `var` (0-based).
pub(crate) fn gadget_id(var: usize, name: GadgetVertex) -> usize {
    11 * var + GADGET_ORDER.iter().position(|&x| x == name).expect("listed")
}

fn base_construction(f: &CnfFormula) -> Result<(TssInstance, Vec<Role>), ReduceError> {
    let report = validate_restricted_3sat(f);
    if !report.is_valid() {
        return Err(ReduceError::InvalidFormula(report));
    }
    let n = f.num_vars;
    let m = f.num_clauses();
    let mut edges = Vec::new();
    let mut thresholds = Vec::with_capacity(11 * n + m);
    let mut roles = Vec::with_capacity(11 * n + m);
    for var in 0..n {
        for name in GADGET_ORDER {
            thresholds.push(gadget_threshold(name));
            roles.push(Role::Gadget { var, name });
        }
        edges.extend(GADGET_EDGES.iter().map(|&(x, y)| (gadget_id(var, x), gadget_id(var, y))));
    }
    for (j, c) in f.clauses.iter().enumerate() {
        let y = 11 * n + j;
        thresholds.push(1);
        roles.push(Role::Clause { clause: j });
        for &l in c {
            let var = l.unsigned_abs() as usize - 1;
            let side = if l > 0 { GadgetVertex::LowerT } else { GadgetVertex::LowerF };
            edges.push((gadget_id(var, side), y));
        }
    }
    let graph = Graph::new(11 * n + m, edges).map_err(|e| ReduceError::Internal(e.to_string()))?;
    let inst = TssInstance::new(graph, thresholds, n as u64)?;
    Ok((inst, roles))
}

/// One eleven-vertex gadget per variable, one threshold-1 vertex per
/// clause, literal edges from `t_i` (positive) or `f_i` (negative); `k = n`.
pub fn sat_to_planar_tss(f: &CnfFormula) -> Result<ReductionArtifact, ReduceError> {
    let (inst, roles) = base_construction(f)?;
    let n = f.num_vars as u64;
    Ok(ReductionArtifact {
        reduction: ReductionKind::Sat2Tss,
        source: Instance::Cnf(f.clone()),
        output: Instance::Tss(inst),
        provenance: roles,
        counters: Counters::default(),
        plans: Vec::new(),
        budget: BudgetRecord {
            formula: "k = n".into(),
            source_k: n,
            output_k: n,
        },
        disks: None,
        coords: None,
    })
}

/// The SAT construction brought to majority thresholds: a cherry at every
/// `d_i`, a pendant leaf at every `F_i` and a cherry at every clause vertex
/// of a 3-literal clause; `k = 2n + β`.
pub fn sat_to_planar_majority_tss(f: &CnfFormula) -> Result<ReductionArtifact, ReduceError> {
    let (base, base_roles) = base_construction(f)?;
    let n = f.num_vars;
    let mut plan = Attachments::none(base.n());
    for var in 0..n {
        plan.cherries[gadget_id(var, GadgetVertex::D)] = 1;
        plan.leaves[gadget_id(var, GadgetVertex::UpperF)] = 1;
    }
    let mut beta = 0u64;
    for (j, c) in f.clauses.iter().enumerate() {
        if c.len() == 3 {
            plan.cherries[11 * n + j] = 1;
            beta += 1;
        }
    }
    let k = 2 * n as u64 + beta;
    let (inst, extra, alpha) = attach(&base, &plan, k)?;
    if !crate::tss::is_majority(&inst) {
        return Err(ReduceError::Internal("gadget thresholds are not at majority".into()));
    }
    let mut provenance = base_roles;
    provenance.extend(extra);
    Ok(ReductionArtifact {
        reduction: ReductionKind::Sat2Majority,
        source: Instance::Cnf(f.clone()),
        output: Instance::Tss(inst),
        provenance,
        counters: Counters {
            alpha: Some(alpha),
            beta: Some(beta),
            z: None,
        },
        plans: Vec::new(),
        budget: BudgetRecord {
            formula: "k = n + alpha = 2n + beta".into(),
            source_k: n as u64,
            output_k: k,
        },
        disks: None,
        coords: None,
    })
}

fn formula_of(art: &ReductionArtifact) -> Result<&CnfFormula, ReduceError> {
    match (art.reduction, &art.source) {
        (ReductionKind::Sat2Tss | ReductionKind::Sat2Majority, Instance::Cnf(f)) => Ok(f),
        _ => Err(ReduceError::WrongArtifact {
            expected: ReductionKind::Sat2Tss,
            got: art.reduction,
        }),
    }
}

/// `{T_i : a(x_i) = 1} ∪ {F_i : a(x_i) = 0}`, plus the middle vertex of
/// every cherry for the majority variant.
pub fn assignment_to_target_set(art: &ReductionArtifact, a: &Assignment) -> Result<Vec<usize>, ReduceError> {
    let f = formula_of(art)?;
    if a.values.len() != f.num_vars {
        return Err(ReduceError::Internal(format!(
            "assignment has {} values for {} variables",
            a.values.len(),
            f.num_vars
        )));
    }
    let mut s: Vec<usize> = (0..f.num_vars)
        .map(|i| {
            let name = if a.values[i] { GadgetVertex::UpperT } else { GadgetVertex::UpperF };
            gadget_id(i, name)
        })
        .collect();
    if art.reduction == ReductionKind::Sat2Majority {
        s.extend(super::majority::cherry_middles(&art.provenance));
    }
    s.sort_unstable();
    Ok(s)
}

/// Reads an assignment off a target set of size at most `k`: each gadget
/// holds exactly one seed, moved to `F_i` when it lies on the `f_i`–`F_i`
/// path and to `T_i` otherwise; `x_i` is true iff `T_i` ends up seeded.
pub fn target_set_to_assignment(art: &ReductionArtifact, seed: &[usize]) -> Result<Assignment, ReduceError> {
    let f = formula_of(art)?;
    let inst = art.output_tss().ok_or(ReduceError::Internal("output is not TSS".into()))?;
    check_target_set(inst, seed)?;
    let base_seed = if art.reduction == ReductionKind::Sat2Majority {
        project_attachments(&art.provenance, seed)
    } else {
        crate::graph::canonical_set(seed)
    };
    let n = f.num_vars;
    let mut values = vec![None; n];
    for &s in &base_seed {
        match art.provenance[s] {
            Role::Gadget { var, name } => {
                use GadgetVertex::*;
                let truth = !matches!(name, UpperF | LowerF | P1 | P2 | P3);
                if values[var].replace(truth).is_some() {
                    return Err(ReduceError::Internal(format!("gadget {var} holds two seeds")));
                }
            }
            _ => return Err(ReduceError::Internal(format!("seed {s} lies outside every gadget"))),
        }
    }
    let values: Vec<bool> = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| ReduceError::Internal(format!("gadget {i} holds no seed"))))
        .collect::<Result<_, _>>()?;
    let a = Assignment { values };
    if !satisfies(f, &a) {
        return Err(ReduceError::Internal("recovered assignment does not satisfy the formula".into()));
    }
    Ok(a)
}
