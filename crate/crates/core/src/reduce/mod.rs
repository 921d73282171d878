//! Instance transformations with provenance, budget bookkeeping and witness
//! translation in both directions.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embed::EmbeddingReport;
use crate::geometry::{DiskRepresentation, GridCoords, GridViolation};
use crate::graph::{Edge, Graph};
use crate::tss::{TssError, TssInstance};

mod majority;
mod sat;
mod subdivide;
mod udg;

pub use majority::{majority_lift_witness, majority_project_witness, majority_transform};
pub use sat::{
    assignment_to_target_set, brute_force_sat, parse_dimacs, sat_to_planar_majority_tss, sat_to_planar_tss,
    satisfies, target_set_to_assignment, validate_restricted_3sat, Assignment, CnfError, CnfFormula, DimacsError,
    RestrictedReport, RestrictedViolation, GADGET_ORDER,
};
pub use subdivide::{grid_lift_witness, grid_project_witness, planar_tss_to_grid_tss, subdivide_edge_once, Subdivided};
pub use udg::{
    chain_centers, choose_w, clique_blowup_is, exact2_lift_witness, exact2_project_witness, is_lift_witness,
    is_planar_to_is_udg, is_project_witness, majority_grid_to_exact2_udg, regular_exact_c_tss, SubdivisionPlan,
    CHAIN_DIAMETER, LEAF_OFFSET,
};

/// Names of the eleven vertices of a variable gadget. `P1` is adjacent to
/// `f`, `P3` to `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GadgetVertex {
    #[serde(rename = "T")]
    UpperT,
    #[serde(rename = "F")]
    UpperF,
    #[serde(rename = "t")]
    LowerT,
    #[serde(rename = "f")]
    LowerF,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "p1")]
    P1,
    #[serde(rename = "p2")]
    P2,
    #[serde(rename = "p3")]
    P3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CherryPos {
    Left,
    Middle,
    Right,
}

/// Where an output vertex comes from. Source vertex and edge ids refer to
/// the source instance of the artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    Original { v: usize },
    /// `index`-th vertex (1-based) placed along the subdivided edge.
    Subdivision { edge: Edge, index: usize },
    /// Extra copy `copy` (1-based) of chain vertex `index` of `edge`.
    CliqueCopy { edge: Edge, index: usize, copy: usize },
    /// Copy `copy` (0-based) of source vertex `v` in a clique blow-up.
    BlowupCopy { v: usize, copy: usize },
    Gadget { var: usize, name: GadgetVertex },
    Clause { clause: usize },
    /// Vertex of the `index`-th cherry, attached to output vertex `parent`.
    Cherry { parent: usize, index: usize, pos: CherryPos },
    /// `index`-th pendant vertex attached to output vertex `parent`.
    Leaf { parent: usize, index: usize },
    /// Interior point `index` (1-based position in the edge's path) of an
    /// embedded edge.
    EmbedPoint { edge: Edge, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionKind {
    Sat2Tss,
    Sat2Majority,
    Planar2Grid,
    Majority,
    Is2Udg,
    Grid2Exact2,
}

impl ReductionKind {
    pub const ALL: [ReductionKind; 6] = [
        ReductionKind::Sat2Tss,
        ReductionKind::Sat2Majority,
        ReductionKind::Planar2Grid,
        ReductionKind::Majority,
        ReductionKind::Is2Udg,
        ReductionKind::Grid2Exact2,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReductionKind::Sat2Tss => "sat2tss",
            ReductionKind::Sat2Majority => "sat2majority",
            ReductionKind::Planar2Grid => "planar2grid",
            ReductionKind::Majority => "majority",
            ReductionKind::Is2Udg => "is2udg",
            ReductionKind::Grid2Exact2 => "grid2exact2",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }
}

/// An Independent Set instance: is there an independent set of size `k`?
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsInstance {
    pub graph: Graph,
    pub k: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "instance", rename_all = "snake_case")]
pub enum Instance {
    Cnf(CnfFormula),
    Tss(TssInstance),
    IndependentSet(IsInstance),
}

impl Instance {
    pub fn as_tss(&self) -> Option<&TssInstance> {
        match self {
            Instance::Tss(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_is(&self) -> Option<&IsInstance> {
        match self {
            Instance::IndependentSet(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_cnf(&self) -> Option<&CnfFormula> {
        match self {
            Instance::Cnf(f) => Some(f),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    /// Cherries attached.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u64>,
    /// Clauses with exactly three literals.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<u64>,
    /// Threshold-1 vertices given a pendant leaf.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<u64>,
}

/// The budget of the output instance together with the rule that produced
/// it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetRecord {
    pub formula: String,
    pub source_k: u64,
    pub output_k: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionArtifact {
    pub reduction: ReductionKind,
    pub source: Instance,
    pub output: Instance,
    pub provenance: Vec<Role>,
    pub counters: Counters,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plans: Vec<SubdivisionPlan>,
    pub budget: BudgetRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disks: Option<DiskRepresentation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<GridCoords>,
}

impl ReductionArtifact {
    pub fn output_tss(&self) -> Option<&TssInstance> {
        self.output.as_tss()
    }

    pub fn output_graph(&self) -> &Graph {
        match &self.output {
            Instance::Tss(t) => t.graph(),
            Instance::IndependentSet(i) => &i.graph,
            Instance::Cnf(_) => unreachable!("no reduction emits a formula"),
        }
    }

    pub fn output_budget(&self) -> u64 {
        match &self.output {
            Instance::Tss(t) => t.budget(),
            Instance::IndependentSet(i) => i.k,
            Instance::Cnf(_) => unreachable!("no reduction emits a formula"),
        }
    }

    /// Recomputes the output budget from the source and the counters and
    /// compares it with both the record and the emitted instance.
    pub fn budget_consistent(&self) -> bool {
        let expected = match (self.reduction, &self.source) {
            (ReductionKind::Sat2Tss, Instance::Cnf(f)) => Some(f.num_vars as u64),
            (ReductionKind::Sat2Majority, Instance::Cnf(f)) => {
                self.counters.beta.map(|b| 2 * f.num_vars as u64 + b)
            }
            (ReductionKind::Planar2Grid, Instance::Tss(t)) => Some(t.budget()),
            (ReductionKind::Majority, Instance::Tss(t)) => self.counters.alpha.map(|a| t.budget() + a),
            (ReductionKind::Grid2Exact2, Instance::Tss(t)) => self.counters.z.map(|z| t.budget() + z),
            (ReductionKind::Is2Udg, Instance::IndependentSet(i)) => {
                Some(i.k + self.plans.iter().map(|p| 3 * p.q).sum::<u64>())
            }
            _ => None,
        };
        expected == Some(self.budget.output_k) && self.budget.output_k == self.output_budget()
    }

    /// True iff every output vertex has a role and no role repeats.
    pub fn provenance_injective(&self) -> bool {
        let n = self.output_graph().n();
        let mut seen = std::collections::HashSet::new();
        self.provenance.len() == n && self.provenance.iter().all(|r| seen.insert(*r))
    }

    pub(crate) fn expect_kind(&self, kind: ReductionKind) -> Result<(), ReduceError> {
        if self.reduction == kind {
            Ok(())
        } else {
            Err(ReduceError::WrongArtifact {
                expected: kind,
                got: self.reduction,
            })
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReduceError {
    #[error("formula is not a restricted 3-SAT instance: {0:?}")]
    InvalidFormula(RestrictedReport),
    #[error("embedding rejected: {0:?}")]
    InvalidEmbedding(EmbeddingReport),
    #[error("grid certificate rejected: {0}")]
    InvalidGrid(#[from] GridViolation),
    #[error("graph is not {0}-regular")]
    NotRegular(usize),
    #[error("regularity {0} is not supported (expected 3 or 4)")]
    UnsupportedRegularity(usize),
    #[error("instance is not at majority thresholds")]
    NotMajority,
    #[error("edge {{{0}, {1}}} is not in the graph")]
    UnknownEdge(usize, usize),
    #[error("path length {0} is below 2")]
    PathTooShort(usize),
    #[error("chain length {0} is outside 6..=9")]
    ChainLength(usize),
    #[error("points are not grid neighbours")]
    NotAdjacent,
    #[error("vertex {0} has threshold 0 and cannot be raised to exactly 2")]
    ThresholdZero(usize),
    #[error("no pendant placement keeps leaf disks apart around vertex {0}")]
    NoLeafPlacement(usize),
    #[error("thresholds above 2 are not supported here (vertex {0})")]
    ThresholdTooLarge(usize),
    #[error("set is not independent")]
    NotIndependent,
    #[error("set is not a target set of the instance")]
    NotATargetSet,
    #[error("set has {size} vertices, budget is {budget}")]
    OverBudget { size: usize, budget: u64 },
    #[error("artifact was produced by {got:?}, expected {expected:?}")]
    WrongArtifact { expected: ReductionKind, got: ReductionKind },
    #[error("construction invariant failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Tss(#[from] TssError),
}

/// Rejects `seed` unless it is a target set of `inst` within its budget.
pub(crate) fn check_target_set(inst: &TssInstance, seed: &[usize]) -> Result<(), ReduceError> {
    if seed.len() as u64 > inst.budget() {
        return Err(ReduceError::OverBudget {
            size: seed.len(),
            budget: inst.budget(),
        });
    }
    if !crate::tss::is_target_set(inst, seed)? {
        return Err(ReduceError::NotATargetSet);
    }
    Ok(())
}
