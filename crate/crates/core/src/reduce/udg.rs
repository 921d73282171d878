//! Unit disk constructions: disk chains along embedded edges for
//! Independent Set, clique blow-ups, and pendant leaf disks that raise every
//! threshold of a majority grid instance to exactly 2.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{
    check_target_set, BudgetRecord, Counters, Instance, IsInstance, ReduceError, ReductionArtifact, ReductionKind, Role,
};
use crate::embed::{validate_embedding, RectilinearEmbedding};
use crate::geometry::{
    intersection_graph_disks, validate_grid_graph, DiskRepresentation, GeoPoint, GridCoords, GridPoint,
    AXIS_DIRECTIONS,
};
use crate::graph::{canonical_set, check_regular, Edge, Graph};
use crate::rational::Rational;
use crate::tss::{is_majority, TssInstance};

/// Diameter of the disks in the Independent Set construction, as `(p, q)`.
pub const CHAIN_DIAMETER: (i64, i64) = (1, 7);
/// Offset of a pendant leaf disk from its parent, as `(p, q)`.
pub const LEAF_OFFSET: (i64, i64) = (1, 5);

/// Filler counts `w_1, …, w_{g−1}` for a path with `g` points, chosen by
/// `g mod 6` so that `g − 2 + Σ w_i` is a multiple of 6.
pub fn choose_w(g: usize) -> Result<Vec<u32>, ReduceError> {
    if g < 2 {
        return Err(ReduceError::PathTooShort(g));
    }
    let head: &[u32] = match g % 6 {
        0 => &[8],
        1 => &[7],
        2 => &[],
        3 => &[9, 8],
        4 => &[8, 8],
        _ => &[9],
    };
    let mut w = head.to_vec();
    w.resize(g - 1, 6);
    Ok(w)
}

/// Centers of `ell` disks of diameter 1/7 on the unit segment from `p` to
/// `q`, at parameters `a_j = (5j + ell − 6) / (7(ell − 1))`. The first lies
/// 1/7 from `p`, the last 1/7 from `q`, and consecutive disks touch while
/// disks two apart do not.
pub fn chain_centers(p: GridPoint, q: GridPoint, ell: usize) -> Result<Vec<GeoPoint>, ReduceError> {
    if p.l1(q) != 1 {
        return Err(ReduceError::NotAdjacent);
    }
    if !(6..=9).contains(&ell) {
        return Err(ReduceError::ChainLength(ell));
    }
    let l = ell as i64;
    let (px, py) = (Rational::from(p.x), Rational::from(p.y));
    let (dx, dy) = (Rational::from(q.x - p.x), Rational::from(q.y - p.y));
    Ok((1..=l)
        .map(|j| {
            let a = Rational::new(5 * j + l - 6, 7 * (l - 1));
            GeoPoint::new(&px + &(&a * &dx), &py + &(&a * &dy))
        })
        .collect())
}

/// Per-edge record of the chain construction: `y = g − 2 + Σ w_i = 6q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionPlan {
    pub edge: Edge,
    pub g: usize,
    pub w: Vec<u32>,
    pub q: u64,
    pub y: u64,
}

impl SubdivisionPlan {
    pub fn new(edge: Edge, g: usize) -> Result<Self, ReduceError> {
        let w = choose_w(g)?;
        let y = (g - 2) as u64 + w.iter().map(|&x| u64::from(x)).sum::<u64>();
        Ok(SubdivisionPlan { edge, g, w, q: y / 6, y })
    }

    pub fn is_consistent(&self) -> bool {
        self.w.len() + 1 == self.g
            && self.w.iter().all(|w| (6..=9).contains(w))
            && self.y == (self.g - 2) as u64 + self.w.iter().map(|&x| u64::from(x)).sum::<u64>()
            && self.y.is_multiple_of(6)
            && self.q * 6 == self.y
    }
}

/// Independent Set on an `r`-regular planar graph (`r ∈ {3, 4}`) to
/// Independent Set on an `r`-regular unit disk graph. Each edge becomes a
/// path through `6q_e` new vertices `x_1 … x_{6q_e}` whose disks follow the
/// embedded path; every `x_{3i−1}` is widened to a clique of `r − 1`
/// coincident disks. `k′ = k + Σ 3q_e`.
pub fn is_planar_to_is_udg(
    g: &Graph,
    r: usize,
    k: u64,
    emb: &RectilinearEmbedding,
) -> Result<ReductionArtifact, ReduceError> {
    if r != 3 && r != 4 {
        return Err(ReduceError::UnsupportedRegularity(r));
    }
    if !check_regular(g, r) {
        return Err(ReduceError::NotRegular(r));
    }
    let report = validate_embedding(g, emb);
    if !report.is_valid() {
        return Err(ReduceError::InvalidEmbedding(report));
    }
    let n = g.n();
    let mut centers: Vec<GeoPoint> = emb.vpoint.iter().map(|p| p.to_geo()).collect();
    let mut provenance: Vec<Role> = (0..n).map(|v| Role::Original { v }).collect();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut plans = Vec::with_capacity(g.edge_count());
    for &(u, v) in g.edges() {
        let pts = emb.path(u, v).expect("validated");
        let plan = SubdivisionPlan::new((u, v), pts.len())?;
        let mut chain = Vec::with_capacity(plan.y as usize);
        for i in 0..pts.len() - 1 {
            chain.extend(chain_centers(pts[i], pts[i + 1], plan.w[i] as usize)?);
            if i + 2 < pts.len() {
                chain.push(pts[i + 1].to_geo());
            }
        }
        if chain.len() as u64 != plan.y {
            return Err(ReduceError::Internal(format!("edge {{{u}, {v}}}: chain has {} disks", chain.len())));
        }
        let first = centers.len();
        let xs: Vec<usize> = (first..first + chain.len()).collect();
        for (j, c) in chain.into_iter().enumerate() {
            centers.push(c);
            provenance.push(Role::Subdivision {
                edge: (u, v),
                index: j + 1,
            });
        }
        let mut prev = u;
        for &x in &xs {
            edges.push((prev, x));
            prev = x;
        }
        edges.push((prev, v));
        for i in 1..=2 * plan.q as usize {
            let j = 3 * i - 1;
            let base = xs[j - 1];
            let mut members = vec![base];
            for copy in 1..=r - 2 {
                let id = centers.len();
                centers.push(centers[base].clone());
                provenance.push(Role::CliqueCopy {
                    edge: (u, v),
                    index: j,
                    copy,
                });
                edges.push((id, xs[j - 2]));
                edges.push((id, xs[j]));
                for &m in &members {
                    edges.push((m, id));
                }
                members.push(id);
            }
        }
        plans.push(plan);
    }
    let graph = Graph::new(centers.len(), edges).map_err(|e| ReduceError::Internal(e.to_string()))?;
    let disks = DiskRepresentation::new(Rational::new(CHAIN_DIAMETER.0, CHAIN_DIAMETER.1), centers)
        .map_err(|e| ReduceError::Internal(e.to_string()))?;
    if intersection_graph_disks(&disks) != graph {
        return Err(ReduceError::Internal("disk intersection graph differs from the construction".into()));
    }
    if !check_regular(&graph, r) {
        return Err(ReduceError::Internal(format!("output is not {r}-regular")));
    }
    let added: u64 = plans.iter().map(|p| 3 * p.q).sum();
    Ok(ReductionArtifact {
        reduction: ReductionKind::Is2Udg,
        source: Instance::IndependentSet(IsInstance { graph: g.clone(), k }),
        output: Instance::IndependentSet(IsInstance { graph, k: k + added }),
        provenance,
        counters: Counters::default(),
        plans,
        budget: BudgetRecord {
            formula: "k' = k + sum_e 3 q_e".into(),
            source_k: k,
            output_k: k + added,
        },
        disks: Some(disks),
        coords: None,
    })
}

/// Chain vertices `x_1 … x_{6q}` and all of `X_e` (chain plus clique
/// copies) for every source edge.
fn edge_sets(art: &ReductionArtifact) -> BTreeMap<Edge, (Vec<usize>, Vec<usize>)> {
    let mut out: BTreeMap<Edge, (Vec<(usize, usize)>, Vec<usize>)> = BTreeMap::new();
    for (id, role) in art.provenance.iter().enumerate() {
        match *role {
            Role::Subdivision { edge, index } => {
                let entry = out.entry(edge).or_default();
                entry.0.push((index, id));
                entry.1.push(id);
            }
            Role::CliqueCopy { edge, .. } => out.entry(edge).or_default().1.push(id),
            _ => {}
        }
    }
    out.into_iter()
        .map(|(e, (mut xs, all))| {
            xs.sort_unstable();
            (e, (xs.into_iter().map(|(_, id)| id).collect(), all))
        })
        .collect()
}

fn is_pair(art: &ReductionArtifact) -> Result<(&IsInstance, &IsInstance), ReduceError> {
    art.expect_kind(ReductionKind::Is2Udg)?;
    match (&art.source, &art.output) {
        (Instance::IndependentSet(s), Instance::IndependentSet(o)) => Ok((s, o)),
        _ => Err(ReduceError::Internal("artifact does not map IS to IS".into())),
    }
}

/// Lifts an independent set `I` of the source to one of size
/// `|I| + Σ 3q_e`: per edge `{u, v}` in ascending order, the odd chain
/// vertices when `u ∉ I`, otherwise the even ones.
pub fn is_lift_witness(art: &ReductionArtifact, set: &[usize]) -> Result<Vec<usize>, ReduceError> {
    let (src, _) = is_pair(art)?;
    let set = canonical_set(set);
    if !src.graph.is_independent(&set) {
        return Err(ReduceError::NotIndependent);
    }
    let chosen: HashSet<usize> = set.iter().copied().collect();
    let mut out = set.clone();
    for ((u, _), (xs, _)) in edge_sets(art) {
        let offset = if chosen.contains(&u) { 1 } else { 0 };
        out.extend(xs.iter().skip(offset).step_by(2).copied());
    }
    out.sort_unstable();
    Ok(out)
}

/// Projects an independent set of the output to one of the source of size
/// at least `|I′| − Σ 3q_e`: per edge `{u, v}` in ascending order, drop
/// `X_e`, and drop `u` as well when both endpoints are still present.
pub fn is_project_witness(art: &ReductionArtifact, set: &[usize]) -> Result<Vec<usize>, ReduceError> {
    let (src, out) = is_pair(art)?;
    let set = canonical_set(set);
    if !out.graph.is_independent(&set) {
        return Err(ReduceError::NotIndependent);
    }
    let mut cur: BTreeSet<usize> = set.into_iter().collect();
    for ((u, v), (_, all)) in edge_sets(art) {
        let both = cur.contains(&u) && cur.contains(&v);
        for x in all {
            cur.remove(&x);
        }
        if both {
            cur.remove(&u);
        }
    }
    let result: Vec<usize> = cur.into_iter().collect();
    if !src.graph.is_independent(&result) {
        return Err(ReduceError::Internal("projected set is not independent".into()));
    }
    Ok(result)
}

/// Replaces each vertex by a clique `K_q` joined completely to the cliques
/// of its neighbours; copy `c` of `v` gets id `v·q + c`. With disks, copies
/// share their original's center.
pub fn clique_blowup_is(g: &Graph, q: usize, disks: Option<&DiskRepresentation>) -> (Graph, Option<DiskRepresentation>) {
    assert!(q >= 1, "clique size must be positive");
    let id = |v: usize, c: usize| v * q + c;
    let mut edges = Vec::new();
    for v in 0..g.n() {
        for a in 0..q {
            for b in a + 1..q {
                edges.push((id(v, a), id(v, b)));
            }
        }
    }
    for &(u, v) in g.edges() {
        for a in 0..q {
            for b in 0..q {
                edges.push((id(u, a), id(v, b)));
            }
        }
    }
    let graph = Graph::new(g.n() * q, edges).expect("blow-up is simple");
    let disks = disks.map(|d| {
        let centers = d
            .centers
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.clone(), q))
            .collect();
        DiskRepresentation::new(d.diameter.clone(), centers).expect("diameter already validated")
    });
    (graph, disks)
}

/// Threshold `c` on every vertex of a `c`-regular graph: unanimous and
/// exact at once, hence Vertex Cover.
pub fn regular_exact_c_tss(g: &Graph, c: u32, k: u64) -> Result<TssInstance, ReduceError> {
    if !check_regular(g, c as usize) {
        return Err(ReduceError::NotRegular(c as usize));
    }
    Ok(TssInstance::new(g.clone(), vec![c; g.n()], k)?)
}

/// Majority TSS on a grid graph to TSS with every threshold exactly 2 on a
/// unit disk graph of maximum degree 4. Each threshold-1 vertex gets a
/// pendant disk of threshold 2 offset by 1/5 along a free axis direction
/// and its own threshold raised to 2; `k′ = k + z`.
///
/// Directions are tried in the fixed order `(0,1), (1,0), (−1,0), (0,−1)`.
/// Two grid neighbours offsetting their leaves the same way across their
/// shared edge would put the leaves exactly 1 apart, and closed disks at
/// that distance intersect, so such clashes are avoided by backtracking
/// over the remaining free directions.
pub fn majority_grid_to_exact2_udg(inst: &TssInstance, coords: &GridCoords) -> Result<ReductionArtifact, ReduceError> {
    let g = inst.graph();
    validate_grid_graph(g, coords)?;
    if !is_majority(inst) {
        return Err(ReduceError::NotMajority);
    }
    let n = g.n();
    for v in 0..n {
        match inst.threshold(v) {
            0 => return Err(ReduceError::ThresholdZero(v)),
            1 | 2 => {}
            _ => return Err(ReduceError::ThresholdTooLarge(v)),
        }
    }
    let occupied: HashSet<GridPoint> = coords.coords.iter().copied().collect();
    let offset = Rational::new(LEAF_OFFSET.0, LEAF_OFFSET.1);
    let leaf_center = |v: usize, (dx, dy): (i64, i64)| {
        let s = coords.coords[v];
        GeoPoint::new(
            Rational::from(s.x) + &offset * &Rational::from(dx),
            Rational::from(s.y) + &offset * &Rational::from(dy),
        )
    };
    let is_one = |v: usize| inst.threshold(v) == 1;
    let options: Vec<Vec<(i64, i64)>> = (0..n)
        .map(|v| {
            AXIS_DIRECTIONS
                .into_iter()
                .filter(|&(dx, dy)| !occupied.contains(&coords.coords[v].offset(dx, dy)))
                .collect()
        })
        .collect();

    let mut chosen: Vec<Option<GeoPoint>> = vec![None; n];
    let mut visited = vec![false; n];
    for root in (0..n).filter(|&v| is_one(v)) {
        if visited[root] {
            continue;
        }
        // breadth-first order over the threshold-1 component of `root`
        let mut order = vec![root];
        visited[root] = true;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for &w in g.neighbors(v) {
                if is_one(w) && !visited[w] {
                    visited[w] = true;
                    order.push(w);
                }
            }
        }
        let mut pick = vec![0usize; order.len()];
        let mut pos = 0usize;
        while pos < order.len() {
            let v = order[pos];
            chosen[v] = None;
            let mut placed = false;
            while pick[pos] < options[v].len() {
                let c = leaf_center(v, options[v][pick[pos]]);
                let clash = g.neighbors(v).iter().any(|&w| {
                    chosen[w]
                        .as_ref()
                        .is_some_and(|cw| cw.squared_distance(&c) <= Rational::one())
                });
                if !clash {
                    chosen[v] = Some(c);
                    placed = true;
                    break;
                }
                pick[pos] += 1;
            }
            if placed {
                pos += 1;
                if pos < order.len() {
                    pick[pos] = 0;
                }
                continue;
            }
            if pos == 0 {
                return Err(ReduceError::NoLeafPlacement(v));
            }
            pos -= 1;
            pick[pos] += 1;
        }
    }

    let mut centers: Vec<GeoPoint> = coords.coords.iter().map(|p| p.to_geo()).collect();
    let mut provenance: Vec<Role> = (0..n).map(|v| Role::Original { v }).collect();
    let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
    let mut thresholds = vec![2u32; n];
    for v in 0..n {
        if let Some(c) = chosen[v].take() {
            let leaf = centers.len();
            centers.push(c);
            provenance.push(Role::Leaf { parent: v, index: 0 });
            edges.push((v, leaf));
            thresholds.push(2);
        }
    }
    let z = (centers.len() - n) as u64;
    let graph = Graph::new(centers.len(), edges).map_err(|e| ReduceError::Internal(e.to_string()))?;
    let disks =
        DiskRepresentation::new(Rational::one(), centers).map_err(|e| ReduceError::Internal(e.to_string()))?;
    if intersection_graph_disks(&disks) != graph {
        return Err(ReduceError::Internal("disk intersection graph differs from the construction".into()));
    }
    let k = inst.budget() + z;
    Ok(ReductionArtifact {
        reduction: ReductionKind::Grid2Exact2,
        source: Instance::Tss(inst.clone()),
        output: Instance::Tss(TssInstance::new(graph, thresholds, k)?),
        provenance,
        counters: Counters {
            alpha: None,
            beta: None,
            z: Some(z),
        },
        plans: Vec::new(),
        budget: BudgetRecord {
            formula: "k' = k + z".into(),
            source_k: inst.budget(),
            output_k: k,
        },
        disks: Some(disks),
        coords: None,
    })
}

fn exact2_pair(art: &ReductionArtifact) -> Result<(&TssInstance, &TssInstance), ReduceError> {
    art.expect_kind(ReductionKind::Grid2Exact2)?;
    match (&art.source, &art.output) {
        (Instance::Tss(s), Instance::Tss(o)) => Ok((s, o)),
        _ => Err(ReduceError::Internal("artifact does not map TSS to TSS".into())),
    }
}

/// Seeds every pendant leaf in addition to `S`.
pub fn exact2_lift_witness(art: &ReductionArtifact, seed: &[usize]) -> Result<Vec<usize>, ReduceError> {
    let (src, _) = exact2_pair(art)?;
    check_target_set(src, seed)?;
    let mut out = canonical_set(seed);
    out.extend((src.n()..art.provenance.len()).filter(|&v| matches!(art.provenance[v], Role::Leaf { .. })));
    Ok(out)
}

/// Drops the leaves, which every target set must contain.
pub fn exact2_project_witness(art: &ReductionArtifact, seed: &[usize]) -> Result<Vec<usize>, ReduceError> {
    let (src, out) = exact2_pair(art)?;
    check_target_set(out, seed)?;
    let projected: Vec<usize> = canonical_set(seed).into_iter().filter(|&v| v < src.n()).collect();
    check_target_set(src, &projected).map_err(|e| ReduceError::Internal(format!("projection failed: {e}")))?;
    Ok(projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysolve::{max_independent_set_bb, max_independent_set_bruteforce};
    use crate::tss::{classify_thresholds, min_target_set_bruteforce, preprocess_cap_thresholds, ThresholdClass};

    #[test]
    fn choose_w_examples() {
        assert_eq!(choose_w(2).unwrap(), vec![6]);
        assert_eq!(choose_w(7).unwrap(), vec![7, 6, 6, 6, 6, 6]);
        assert_eq!(choose_w(3).unwrap(), vec![9, 8]);
        assert!(choose_w(1).is_err());
    }

    #[test]
    fn chain_examples() {
        let o = GridPoint::new(0, 0);
        let x = GridPoint::new(1, 0);
        let xs: Vec<Rational> = chain_centers(o, x, 6).unwrap().into_iter().map(|p| p.x).collect();
        assert_eq!(xs, (1..=6).map(|j| Rational::new(j, 7)).collect::<Vec<_>>());
        let nine = chain_centers(o, x, 9).unwrap();
        assert_eq!(nine[0].x, Rational::new(1, 7));
        assert_eq!(nine[8].x, Rational::new(6, 7));
        let seven = chain_centers(o, x, 7).unwrap();
        assert_eq!(&seven[1].x - &seven[0].x, Rational::new(5, 42));
        assert!(chain_centers(o, GridPoint::new(2, 0), 6).is_err());
        assert!(chain_centers(o, x, 5).is_err());
    }

    #[test]
    fn blowup_examples() {
        let k2 = Graph::path(2);
        assert_eq!(clique_blowup_is(&k2, 1, None).0, k2);
        let (g, _) = clique_blowup_is(&k2, 2, None);
        assert_eq!(g, Graph::complete(4));
        assert!(check_regular(&g, 3));
        let c5 = Graph::cycle(5);
        let (g5, _) = clique_blowup_is(&c5, 2, None);
        assert_eq!(max_independent_set_bruteforce(&g5).len(), max_independent_set_bruteforce(&c5).len());
    }

    #[test]
    fn regular_exact_examples() {
        let k4 = regular_exact_c_tss(&Graph::complete(4), 3, 2).unwrap();
        let classes = classify_thresholds(&k4);
        assert!(classes.contains(&ThresholdClass::Unanimous));
        assert!(classes.contains(&ThresholdClass::Exact(3)));
        let c4 = regular_exact_c_tss(&Graph::cycle(4), 2, 2).unwrap();
        assert_eq!(min_target_set_bruteforce(&c4, 4).unwrap().0, 2);
        assert!(regular_exact_c_tss(&Graph::path(3), 2, 1).is_err());
    }

    #[test]
    fn k4_udg() {
        let g = Graph::complete(4);
        let emb = crate::embed::compute_embedding(&g, &Default::default()).unwrap();
        let art = is_planar_to_is_udg(&g, 3, 1, &emb).unwrap();
        assert!(art.budget_consistent());
        assert!(art.provenance_injective());
        assert!(art.plans.iter().all(SubdivisionPlan::is_consistent));
        let out = art.output_graph();
        let extra: u64 = art.plans.iter().map(|p| 3 * p.q).sum();
        assert_eq!(max_independent_set_bb(out).len() as u64, 1 + extra);
        let lifted = is_lift_witness(&art, &[2]).unwrap();
        assert_eq!(lifted.len() as u64, 1 + extra);
        assert!(out.is_independent(&lifted));
        assert_eq!(is_lift_witness(&art, &[]).unwrap().len() as u64, extra);
        assert!(!is_project_witness(&art, &lifted).unwrap().is_empty());
    }

    #[test]
    fn leaf_direction_and_round_trip() {
        // (0,0) with its only neighbour at (0,1): leaf goes to (1/5, 0)
        let g = Graph::path(2);
        let coords = GridCoords::new(vec![GridPoint::new(0, 0), GridPoint::new(0, 1)]);
        let inst = TssInstance::majority(g, 1);
        let art = majority_grid_to_exact2_udg(&inst, &coords).unwrap();
        let disks = art.disks.as_ref().unwrap();
        assert_eq!(disks.centers[2], GeoPoint::new(Rational::new(1, 5), Rational::zero()));
        let out = art.output_tss().unwrap();
        assert!(out.thresholds().iter().all(|&t| t == 2));
        assert_eq!(out.budget(), 3);
        assert_eq!(preprocess_cap_thresholds(out).instance, inst);
    }

    #[test]
    fn straight_path_leaves_stay_apart() {
        let g = Graph::path(4);
        let coords = GridCoords::new((0..4).map(|x| GridPoint::new(x, 0)).collect());
        let inst = TssInstance::majority(g, 2);
        let art = majority_grid_to_exact2_udg(&inst, &coords).unwrap();
        let out = art.output_tss().unwrap();
        assert_eq!(out.n(), 8);
        for leaf in 4..8 {
            assert_eq!(out.graph().degree(leaf), 1);
        }
        assert_eq!(preprocess_cap_thresholds(out).instance, inst);
    }
}
