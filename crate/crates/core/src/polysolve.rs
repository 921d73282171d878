//! Exact solvers for the tractable unanimous cases (through the vertex
//! cover equivalence) and the IS / VC oracles used by the verification
//! harness.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{intersection_graph_intervals, validate_grid_graph, GridCoords, GridViolation, IntervalModel};
use crate::graph::Graph;
use crate::rational::Rational;
use crate::tss::{is_unanimous, min_target_set_bruteforce, TssInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("thresholds are not unanimous")]
    NotUnanimous,
    #[error("grid certificate rejected: {0}")]
    InvalidGrid(#[from] GridViolation),
    #[error("interval model does not realize the instance graph")]
    IntervalMismatch,
}

/// A Vertex Cover instance `(G, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcInstance {
    pub graph: Graph,
    pub k: u64,
}

/// Unanimous TSS is Vertex Cover on the same graph with the same budget.
pub fn unanimous_tss_to_vc(inst: &TssInstance) -> Result<VcInstance, SolveError> {
    if !is_unanimous(inst) {
        return Err(SolveError::NotUnanimous);
    }
    Ok(VcInstance {
        graph: inst.graph().clone(),
        k: inst.budget(),
    })
}

pub fn vc_to_unanimous_tss(vc: &VcInstance) -> TssInstance {
    TssInstance::unanimous(vc.graph.clone(), vc.k)
}

/// Minimum vertex cover of the intersection graph of `model`: the
/// complement of the maximum independent set picked by sweeping intervals
/// by right endpoint (ties by index).
pub fn min_vertex_cover_interval(model: &IntervalModel) -> Vec<usize> {
    let iv = model.intervals();
    let mut order: Vec<usize> = (0..iv.len()).collect();
    order.sort_by(|&a, &b| iv[a].1.cmp(&iv[b].1).then(a.cmp(&b)));
    let mut in_mis = vec![false; iv.len()];
    let mut last_hi: Option<&Rational> = None;
    for i in order {
        let free = match last_hi {
            None => true,
            Some(hi) => iv[i].0 > *hi,
        };
        if free {
            in_mis[i] = true;
            last_hi = Some(&iv[i].1);
        }
    }
    (0..iv.len()).filter(|&v| !in_mis[v]).collect()
}

/// Maximum bipartite matching by augmenting paths. `left` lists the left
/// side; returns `mate` with `usize::MAX` for unmatched vertices.
fn max_matching(g: &Graph, is_left: &[bool]) -> Vec<usize> {
    let n = g.n();
    let mut mate = vec![usize::MAX; n];
    for s in (0..n).filter(|&v| is_left[v]) {
        // BFS over alternating paths from s
        let mut parent = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        let mut end = None;
        'bfs: while let Some(l) = queue.pop_front() {
            for &r in g.neighbors(l) {
                if seen[r] {
                    continue;
                }
                seen[r] = true;
                parent[r] = l;
                if mate[r] == usize::MAX {
                    end = Some(r);
                    break 'bfs;
                }
                let l2 = mate[r];
                if !seen[l2] {
                    seen[l2] = true;
                    queue.push_back(l2);
                }
            }
        }
        let mut r = match end {
            Some(r) => r,
            None => continue,
        };
        loop {
            let l = parent[r];
            let next = mate[l];
            mate[r] = l;
            mate[l] = r;
            if l == s {
                break;
            }
            r = next;
        }
    }
    mate
}

/// Minimum vertex cover of a bipartite graph from a maximum matching
/// (König): with `Z` the vertices reachable from unmatched left vertices by
/// alternating paths, the cover is `(L \ Z) ∪ (R ∩ Z)`.
pub fn konig_cover(g: &Graph, is_left: &[bool]) -> Vec<usize> {
    let n = g.n();
    let mate = max_matching(g, is_left);
    let mut reached = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| is_left[v] && mate[v] == usize::MAX).collect();
    for &v in &queue {
        reached[v] = true;
    }
    while let Some(l) = queue.pop_front() {
        for &r in g.neighbors(l) {
            if reached[r] || mate[l] == r {
                continue;
            }
            reached[r] = true;
            let l2 = mate[r];
            if l2 != usize::MAX && !reached[l2] {
                reached[l2] = true;
                queue.push_back(l2);
            }
        }
    }
    (0..n)
        .filter(|&v| if is_left[v] { !reached[v] } else { reached[v] })
        .collect()
}

/// Minimum vertex cover of a grid graph, bipartitioned by the parity of
/// `x + y`.
pub fn min_vertex_cover_grid(g: &Graph, coords: &GridCoords) -> Result<Vec<usize>, SolveError> {
    validate_grid_graph(g, coords)?;
    let is_left: Vec<bool> = coords.coords.iter().map(|p| (p.x + p.y).rem_euclid(2) == 0).collect();
    Ok(konig_cover(g, &is_left))
}

/// Optional geometric certificate accompanying a unanimous instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Interval(IntervalModel),
    Grid(GridCoords),
    None,
}

/// Minimum target set of a unanimous instance: `(k_min, witness)`.
pub fn solve_unanimous(inst: &TssInstance, cert: &Certificate) -> Result<(usize, Vec<usize>), SolveError> {
    let vc = unanimous_tss_to_vc(inst)?;
    let cover = match cert {
        Certificate::Interval(model) => {
            if intersection_graph_intervals(model) != vc.graph {
                return Err(SolveError::IntervalMismatch);
            }
            min_vertex_cover_interval(model)
        }
        Certificate::Grid(coords) => min_vertex_cover_grid(&vc.graph, coords)?,
        Certificate::None => {
            let (k, w) = min_target_set_bruteforce(inst, inst.n()).expect("V is always a target set");
            return Ok((k, w));
        }
    };
    Ok((cover.len(), cover))
}

/// Exhaustive minimum vertex cover (`n <= 30`).
pub fn min_vertex_cover_bruteforce(g: &Graph) -> Vec<usize> {
    let is = max_independent_set_bruteforce(g);
    let mut mark = vec![false; g.n()];
    for v in is {
        mark[v] = true;
    }
    (0..g.n()).filter(|&v| !mark[v]).collect()
}

/// Exhaustive maximum independent set over all `2^n` subsets (`n <= 30`).
/// Returns the lexicographically smallest bitmask among the optima.
pub fn max_independent_set_bruteforce(g: &Graph) -> Vec<usize> {
    let n = g.n();
    assert!(n <= 30, "enumeration limited to 30 vertices");
    let nbr: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut best = 0u32;
    let mut best_size = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones();
        if size <= best_size {
            continue;
        }
        if (0..n).all(|v| mask & (1 << v) == 0 || mask & nbr[v] == 0) {
            best = mask;
            best_size = size;
        }
    }
    (0..n).filter(|&v| best & (1 << v) != 0).collect()
}

/// Exact maximum independent set by branch and bound: degree-0/1 and
/// domination reductions, component splitting, a greedy clique-cover upper
/// bound and branching on a maximum-degree vertex.
pub fn max_independent_set_bb(g: &Graph) -> Vec<usize> {
    let solver = MisSolver { g };
    let mut out = solver.solve(vec![true; g.n()]);
    out.sort_unstable();
    debug_assert!(g.is_independent(&out));
    out
}

struct MisSolver<'a> {
    g: &'a Graph,
}

impl MisSolver<'_> {
    fn solve(&self, alive: Vec<bool>) -> Vec<usize> {
        let mut alive = alive;
        let mut chosen = Vec::new();
        self.reduce(&mut alive, &mut chosen);
        for comp in self.components(&alive) {
            let mut sub = vec![false; self.g.n()];
            for &v in &comp {
                sub[v] = true;
            }
            chosen.extend(self.solve_connected(sub));
        }
        chosen
    }

    fn solve_connected(&self, alive: Vec<bool>) -> Vec<usize> {
        let mut best = self.greedy(&alive);
        self.branch(alive, Vec::new(), &mut best);
        best
    }

    fn branch(&self, mut alive: Vec<bool>, mut chosen: Vec<usize>, best: &mut Vec<usize>) {
        self.reduce(&mut alive, &mut chosen);
        if !alive.iter().any(|&a| a) {
            if chosen.len() > best.len() {
                *best = chosen;
            }
            return;
        }
        if chosen.len() + self.clique_cover_bound(&alive) <= best.len() {
            return;
        }
        if self.components(&alive).len() > 1 {
            chosen.extend(self.solve(alive));
            if chosen.len() > best.len() {
                *best = chosen;
            }
            return;
        }
        let v = (0..self.g.n())
            .filter(|&v| alive[v])
            .max_by_key(|&v| (self.live_degree(&alive, v), std::cmp::Reverse(v)))
            .expect("non-empty");
        let mut with = alive.clone();
        with[v] = false;
        for &w in self.g.neighbors(v) {
            with[w] = false;
        }
        let mut chosen_with = chosen.clone();
        chosen_with.push(v);
        self.branch(with, chosen_with, best);
        alive[v] = false;
        self.branch(alive, chosen, best);
    }

    fn live_degree(&self, alive: &[bool], v: usize) -> usize {
        self.g.neighbors(v).iter().filter(|&&w| alive[w]).count()
    }

    /// Applies degree-0/1 inclusion and domination removal to a fixed point.
    fn reduce(&self, alive: &mut [bool], chosen: &mut Vec<usize>) {
        let g = self.g;
        loop {
            let mut changed = false;
            for v in 0..g.n() {
                if !alive[v] {
                    continue;
                }
                let mut live = g.neighbors(v).iter().copied().filter(|&w| alive[w]);
                match (live.next(), live.next()) {
                    (None, _) => {
                        alive[v] = false;
                        chosen.push(v);
                        changed = true;
                    }
                    (Some(w), None) => {
                        alive[v] = false;
                        alive[w] = false;
                        chosen.push(v);
                        changed = true;
                    }
                    _ => {}
                }
            }
            if changed {
                continue;
            }
            // u is dominated-out when N[v] ⊆ N[u] for some live neighbour v
            'outer: for u in 0..g.n() {
                if !alive[u] {
                    continue;
                }
                for &v in g.neighbors(u) {
                    if !alive[v] || self.live_degree(alive, v) > self.live_degree(alive, u) {
                        continue;
                    }
                    let covered = g
                        .neighbors(v)
                        .iter()
                        .all(|&w| !alive[w] || w == u || g.has_edge(u, w));
                    if covered {
                        alive[u] = false;
                        changed = true;
                        break 'outer;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn components(&self, alive: &[bool]) -> Vec<Vec<usize>> {
        let g = self.g;
        let mut seen = vec![false; g.n()];
        let mut out = Vec::new();
        for s in 0..g.n() {
            if !alive[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in g.neighbors(v) {
                    if alive[w] && !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Number of cliques in a greedy clique cover; bounds α from above.
    fn clique_cover_bound(&self, alive: &[bool]) -> usize {
        let g = self.g;
        let mut order: Vec<usize> = (0..g.n()).filter(|&v| alive[v]).collect();
        order.sort_by_key(|&v| self.live_degree(alive, v));
        let mut covered = vec![false; g.n()];
        let mut cliques = 0;
        for v in order {
            if covered[v] {
                continue;
            }
            cliques += 1;
            covered[v] = true;
            let mut clique = vec![v];
            for &w in g.neighbors(v) {
                if alive[w] && !covered[w] && clique.iter().all(|&c| g.has_edge(c, w)) {
                    covered[w] = true;
                    clique.push(w);
                }
            }
        }
        cliques
    }

    /// Minimum-degree greedy independent set.
    fn greedy(&self, alive: &[bool]) -> Vec<usize> {
        let mut alive = alive.to_vec();
        let mut out = Vec::new();
        while let Some(v) = (0..self.g.n())
            .filter(|&v| alive[v])
            .min_by_key(|&v| (self.live_degree(&alive, v), v))
        {
            out.push(v);
            alive[v] = false;
            for &w in self.g.neighbors(v) {
                alive[w] = false;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GridPoint;
    use crate::tss::is_target_set;

    #[test]
    fn tss_vc_maps_touch_only_thresholds() {
        let c4 = TssInstance::unanimous(Graph::cycle(4), 2);
        let vc = unanimous_tss_to_vc(&c4).unwrap();
        assert_eq!(vc.graph, Graph::cycle(4));
        assert_eq!(vc.k, 2);
        assert_eq!(vc_to_unanimous_tss(&vc), c4);

        let k3 = vc_to_unanimous_tss(&VcInstance { graph: Graph::complete(3), k: 2 });
        assert_eq!(k3.thresholds(), &[2, 2, 2]);

        let empty = vc_to_unanimous_tss(&VcInstance { graph: Graph::empty(3), k: 0 });
        assert_eq!(empty.thresholds(), &[0, 0, 0]);
        assert!(is_target_set(&empty, &[]).unwrap());
    }

    #[test]
    fn p3_middle_is_cover_and_target_set() {
        let p3 = TssInstance::new(Graph::path(3), vec![1, 2, 1], 1).unwrap();
        let vc = unanimous_tss_to_vc(&p3).unwrap();
        assert!(vc.graph.is_vertex_cover(&[1]));
        assert!(is_target_set(&p3, &[1]).unwrap());
    }

    #[test]
    fn non_unanimous_is_rejected() {
        let i = TssInstance::new(Graph::path(3), vec![1, 1, 1], 1).unwrap();
        assert_eq!(unanimous_tss_to_vc(&i), Err(SolveError::NotUnanimous));
    }

    #[test]
    fn interval_cover_examples() {
        let m = IntervalModel::from_integers(&[(0, 1), (2, 3), (4, 5)]).unwrap();
        assert!(min_vertex_cover_interval(&m).is_empty());
        let tri = IntervalModel::from_integers(&[(0, 2), (1, 3), (2, 4)]).unwrap();
        assert_eq!(min_vertex_cover_interval(&tri), vec![1, 2]);
        let m = IntervalModel::new(vec![
            (Rational::from(0), Rational::from(1)),
            (Rational::new(1, 2), Rational::from(2)),
            (Rational::from(3), Rational::from(4)),
        ])
        .unwrap();
        assert_eq!(min_vertex_cover_interval(&m), vec![1]);
    }

    fn coords(pts: &[(i64, i64)]) -> GridCoords {
        GridCoords::new(pts.iter().map(|&(x, y)| GridPoint::new(x, y)).collect())
    }

    #[test]
    fn grid_cover_examples() {
        let edge = min_vertex_cover_grid(&Graph::path(2), &coords(&[(0, 0), (1, 0)])).unwrap();
        assert_eq!(edge.len(), 1);
        let c4 = Graph::cycle(4);
        let sq = coords(&[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let cover = min_vertex_cover_grid(&c4, &sq).unwrap();
        assert_eq!(cover.len(), 2);
        assert!(c4.is_vertex_cover(&cover));
        // 2x3 grid: vertex (x, y) has id 3y + x
        let g = Graph::new(6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]).unwrap();
        let pts = coords(&[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]);
        let cover = min_vertex_cover_grid(&g, &pts).unwrap();
        assert_eq!(cover.len(), 3);
        assert!(g.is_vertex_cover(&cover));
        assert!(min_vertex_cover_grid(&Graph::path(2), &coords(&[(0, 0), (0, 2)])).is_err());
    }

    #[test]
    fn solve_unanimous_examples() {
        let c4 = TssInstance::unanimous(Graph::cycle(4), 2);
        let (k, w) = solve_unanimous(&c4, &Certificate::Grid(coords(&[(0, 0), (1, 0), (1, 1), (0, 1)]))).unwrap();
        assert_eq!(k, 2);
        assert!(is_target_set(&c4, &w).unwrap());

        let empty = TssInstance::unanimous(Graph::empty(3), 0);
        assert_eq!(solve_unanimous(&empty, &Certificate::None).unwrap(), (0, vec![]));

        let tri = IntervalModel::from_integers(&[(0, 2), (1, 3), (2, 4)]).unwrap();
        let inst = TssInstance::unanimous(intersection_graph_intervals(&tri), 2);
        let (k, w) = solve_unanimous(&inst, &Certificate::Interval(tri.clone())).unwrap();
        assert_eq!(k, 2);
        let tr = crate::tss::simulate(&inst, &w).unwrap();
        assert_eq!(tr.round_count(), 1);
        assert_eq!(tr.final_set(), &[0, 1, 2]);

        let wrong = TssInstance::unanimous(Graph::path(3), 2);
        assert_eq!(
            solve_unanimous(&wrong, &Certificate::Interval(tri)),
            Err(SolveError::IntervalMismatch)
        );
    }

    #[test]
    fn mis_examples() {
        assert_eq!(max_independent_set_bb(&Graph::complete(4)).len(), 1);
        assert_eq!(max_independent_set_bb(&Graph::cycle(5)).len(), 2);
        assert_eq!(max_independent_set_bb(&Graph::path(8)).len(), 4);
        assert_eq!(max_independent_set_bruteforce(&Graph::cycle(5)).len(), 2);
        assert_eq!(min_vertex_cover_bruteforce(&Graph::cycle(5)).len(), 3);
        assert_eq!(max_independent_set_bb(&Graph::empty(0)), Vec::<usize>::new());
    }
}
