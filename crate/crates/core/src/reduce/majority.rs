//! Bringing arbitrary thresholds to majority with pendant leaves (threshold
//! too high) and cherries (threshold too low).

use super::{
    check_target_set, BudgetRecord, CherryPos, Counters, Instance, ReduceError, ReductionArtifact, ReductionKind, Role,
};
use crate::graph::{canonical_set, Graph};
use crate::tss::TssInstance;

/// Per-vertex numbers of pendant leaves and cherries to attach.
pub(crate) struct Attachments {
    pub leaves: Vec<u32>,
    pub cherries: Vec<u32>,
}

impl Attachments {
    pub fn none(n: usize) -> Self {
        Attachments {
            leaves: vec![0; n],
            cherries: vec![0; n],
        }
    }
}

/// Appends the planned gadgets after the vertices of `base` (whose ids are
/// kept). A cherry is a path `g^l – g^m – g^r` with thresholds 1, 2, 1 whose
/// middle vertex is joined to the parent; each cherry raises the parent's
/// threshold by one. Leaves have threshold 1. Returns the instance, the
/// roles of the appended vertices and the number of cherries.
pub(crate) fn attach(base: &TssInstance, plan: &Attachments, k: u64) -> Result<(TssInstance, Vec<Role>, u64), ReduceError> {
    let n = base.n();
    let mut edges: Vec<(usize, usize)> = base.graph().edges().to_vec();
    let mut thresholds = base.thresholds().to_vec();
    let mut roles = Vec::new();
    let mut next = n;
    let mut cherry = 0usize;
    for v in 0..n {
        for _ in 0..plan.cherries[v] {
            let (l, m, r) = (next, next + 1, next + 2);
            next += 3;
            edges.extend([(v, m), (m, l), (m, r)]);
            thresholds.extend([1, 2, 1]);
            for (pos, _) in [(CherryPos::Left, l), (CherryPos::Middle, m), (CherryPos::Right, r)] {
                roles.push(Role::Cherry {
                    parent: v,
                    index: cherry,
                    pos,
                });
            }
            thresholds[v] += 1;
            cherry += 1;
        }
        for index in 0..plan.leaves[v] as usize {
            edges.push((v, next));
            thresholds.push(1);
            roles.push(Role::Leaf { parent: v, index });
            next += 1;
        }
    }
    let graph = Graph::new(next, edges).map_err(|e| ReduceError::Internal(e.to_string()))?;
    Ok((TssInstance::new(graph, thresholds, k)?, roles, cherry as u64))
}

/// Middle vertices of all cherries, in id order.
pub(crate) fn cherry_middles(provenance: &[Role]) -> Vec<usize> {
    provenance
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r, Role::Cherry { pos: CherryPos::Middle, .. }))
        .map(|(i, _)| i)
        .collect()
}

/// Maps a target set of the attached instance to one of the base instance:
/// leaf seeds move to their parent and cherry seeds are dropped.
///
/// Every cherry holds a seed (its middle vertex cannot activate otherwise),
/// and seeding the middle vertex instead activates the whole cherry one
/// round later at the latest, so the projected set is a target set of the
/// base instance that is smaller by at least the number of cherries.
pub(crate) fn project_attachments(provenance: &[Role], seed: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(seed.len());
    for &s in seed {
        match provenance[s] {
            Role::Cherry { .. } => {}
            Role::Leaf { parent, .. } => out.push(parent),
            _ => out.push(s),
        }
    }
    canonical_set(&out)
}

/// Attaches `2t(v) − deg(v)` leaves where `t(v) > ⌈deg(v)/2⌉` and
/// `deg(v) − 2t(v)` cherries where `t(v) < ⌈deg(v)/2⌉`; `k′ = k + α`.
pub fn majority_transform(inst: &TssInstance) -> Result<ReductionArtifact, ReduceError> {
    let n = inst.n();
    let mut plan = Attachments::none(n);
    for v in 0..n {
        let deg = inst.graph().degree(v) as u32;
        let t = inst.threshold(v);
        let target = deg.div_ceil(2);
        if t > target {
            plan.leaves[v] = 2 * t - deg;
        } else if t < target {
            plan.cherries[v] = deg - 2 * t;
        }
    }
    let alpha: u64 = plan.cherries.iter().map(|&c| u64::from(c)).sum();
    let k = inst.budget() + alpha;
    let (out, extra, alpha) = attach(inst, &plan, k)?;
    if !crate::tss::is_majority(&out) {
        return Err(ReduceError::Internal("output is not at majority".into()));
    }
    let mut provenance: Vec<Role> = (0..n).map(|v| Role::Original { v }).collect();
    provenance.extend(extra);
    Ok(ReductionArtifact {
        reduction: ReductionKind::Majority,
        source: Instance::Tss(inst.clone()),
        output: Instance::Tss(out),
        provenance,
        counters: Counters {
            alpha: Some(alpha),
            beta: None,
            z: None,
        },
        plans: Vec::new(),
        budget: BudgetRecord {
            formula: "k' = k + alpha".into(),
            source_k: inst.budget(),
            output_k: k,
        },
        disks: None,
        coords: None,
    })
}

fn tss_pair(art: &ReductionArtifact) -> Result<(&TssInstance, &TssInstance), ReduceError> {
    match (&art.source, &art.output) {
        (Instance::Tss(s), Instance::Tss(o)) => Ok((s, o)),
        _ => Err(ReduceError::Internal("artifact does not map TSS to TSS".into())),
    }
}

/// `S ∪ {g^m_i}` for a target set `S` of the source.
pub fn majority_lift_witness(art: &ReductionArtifact, seed: &[usize]) -> Result<Vec<usize>, ReduceError> {
    art.expect_kind(ReductionKind::Majority)?;
    let (src, _) = tss_pair(art)?;
    check_target_set(src, seed)?;
    let mut out = canonical_set(seed);
    out.extend(cherry_middles(&art.provenance));
    out.sort_unstable();
    Ok(out)
}

/// Projects a target set of the transformed instance (within `k′`) to a
/// target set of the source within `k`.
pub fn majority_project_witness(art: &ReductionArtifact, seed: &[usize]) -> Result<Vec<usize>, ReduceError> {
    art.expect_kind(ReductionKind::Majority)?;
    let (src, out) = tss_pair(art)?;
    check_target_set(out, seed)?;
    let projected = project_attachments(&art.provenance, seed);
    check_target_set(src, &projected).map_err(|e| ReduceError::Internal(format!("projection failed: {e}")))?;
    Ok(projected)
}
