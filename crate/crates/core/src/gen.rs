//! Seeded instance generators.

use std::collections::{BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{GridCoords, GridPoint, IntervalModel};
use crate::graph::Graph;
use crate::rational::Rational;
use crate::reduce::CnfFormula;
use crate::tss::TssInstance;

/// The generator used throughout for seeded runs.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `G(n, p)`.
pub fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("pairs are distinct")
}

/// Thresholds drawn uniformly from `0..=deg(v) + slack`. With `slack = 0`
/// the instance needs no capping.
pub fn random_thresholds<R: Rng + ?Sized>(g: &Graph, slack: u32, rng: &mut R) -> Vec<u32> {
    (0..g.n()).map(|v| rng.gen_range(0..=g.degree(v) as u32 + slack)).collect()
}

/// Each threshold is the majority value with probability `p_majority` and
/// uniform in `0..=deg(v)` otherwise.
pub fn near_majority_thresholds<R: Rng + ?Sized>(g: &Graph, p_majority: f64, rng: &mut R) -> Vec<u32> {
    (0..g.n())
        .map(|v| {
            let deg = g.degree(v) as u32;
            if rng.gen_bool(p_majority) {
                deg.div_ceil(2)
            } else {
                rng.gen_range(0..=deg)
            }
        })
        .collect()
}

/// `G(n, p)` with uniformly random thresholds in `0..=deg(v) + slack`;
/// the budget is `n`.
pub fn random_tss<R: Rng + ?Sized>(n: usize, p: f64, slack: u32, rng: &mut R) -> TssInstance {
    let g = erdos_renyi(n, p, rng);
    let t = random_thresholds(&g, slack, rng);
    TssInstance::new(g, t, n as u64).expect("one threshold per vertex")
}

/// Induced subgraph of the `width × height` grid on `n` distinct random
/// points (vertex ids in row-major point order).
pub fn random_grid_subgraph<R: Rng + ?Sized>(width: i64, height: i64, n: usize, rng: &mut R) -> (Graph, GridCoords) {
    let mut all: Vec<GridPoint> = (0..height)
        .flat_map(|y| (0..width).map(move |x| GridPoint::new(x, y)))
        .collect();
    assert!(n <= all.len(), "grid has only {} points", all.len());
    all.shuffle(rng);
    let mut pts = all[..n].to_vec();
    pts.sort_by_key(|p| (p.y, p.x));
    let coords = GridCoords::new(pts);
    (induced_grid_graph(&coords), coords)
}

/// The grid graph on the given points: edges exactly between points at
/// L1 distance 1.
pub fn induced_grid_graph(coords: &GridCoords) -> Graph {
    let index: HashMap<GridPoint, usize> = coords.coords.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut edges = Vec::new();
    for (i, p) in coords.coords.iter().enumerate() {
        for q in [p.offset(1, 0), p.offset(0, 1)] {
            if let Some(&j) = index.get(&q) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(coords.coords.len(), edges).expect("distinct points give a simple graph")
}

/// `n` intervals with endpoints `a/d` for `a ∈ 0..=span·d` and `d ∈ 1..=4`.
pub fn random_intervals<R: Rng + ?Sized>(n: usize, span: i64, rng: &mut R) -> IntervalModel {
    let point = |rng: &mut R| {
        let d = rng.gen_range(1..=4);
        Rational::new(rng.gen_range(0..=span * d), d)
    };
    let intervals = (0..n)
        .map(|_| {
            let (a, b) = (point(rng), point(rng));
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    IntervalModel::new(intervals).expect("endpoints are ordered")
}

/// Formula in which every variable occurs twice positively and once
/// negatively, with clauses of one to three literals over distinct
/// variables. Planarity of the incidence graph is not enforced.
pub fn random_restricted_3sat<R: Rng + ?Sized>(num_vars: usize, rng: &mut R) -> CnfFormula {
    assert!(num_vars >= 1);
    let mut literals: Vec<i64> = (1..=num_vars as i64).flat_map(|v| [v, v, -v]).collect();
    'retry: loop {
        literals.shuffle(rng);
        let mut clauses: Vec<Vec<i64>> = Vec::new();
        let mut rest = &literals[..];
        while !rest.is_empty() {
            let size = rng.gen_range(1..=3.min(rest.len()));
            let (c, tail) = rest.split_at(size);
            let vars: BTreeSet<u64> = c.iter().map(|l| l.unsigned_abs()).collect();
            if vars.len() != c.len() {
                continue 'retry;
            }
            clauses.push(c.to_vec());
            rest = tail;
        }
        return CnfFormula::new(num_vars, clauses).expect("literals are in range");
    }
}

/// Small restricted formulas with known status, as `(formula, satisfiable)`.
pub fn handcrafted_restricted_formulas() -> Vec<(CnfFormula, bool)> {
    let f = |n, c: &[&[i64]]| CnfFormula::new(n, c.iter().map(|c| c.to_vec()).collect()).expect("valid literals");
    vec![
        (f(2, &[&[1, 2], &[1, -2], &[-1, 2]]), true),
        (f(3, &[&[1, 2, 3], &[1, -2], &[-1, 3], &[2, -3]]), true),
        (f(3, &[&[1, 2, 3], &[1, 2, 3], &[-1, -2, -3]]), true),
        (f(1, &[&[1], &[1], &[-1]]), false),
        (f(2, &[&[1], &[1, 2], &[-1, -2], &[2]]), false),
        (f(2, &[&[1], &[2], &[-1, -2], &[1, 2]]), false),
        (f(3, &[&[1, 2], &[1, 3], &[-1], &[2, 3], &[-2, -3]]), false),
    ]
}

/// Connected planar graph with maximum degree at most 4: `n` points grown
/// from the origin on the triangular lattice, lattice edges among them,
/// then random edges removed (keeping a spanning tree) until every degree
/// is at most 4.
pub fn random_planar_bounded<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Graph {
    const DIRS: [(i64, i64); 6] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
    let mut pts: Vec<(i64, i64)> = vec![(0, 0)];
    let mut index: HashMap<(i64, i64), usize> = HashMap::from([((0, 0), 0)]);
    while pts.len() < n {
        let &(x, y) = pts.choose(rng).expect("non-empty");
        let (dx, dy) = *DIRS.choose(rng).expect("non-empty");
        let q = (x + dx, y + dy);
        if let std::collections::hash_map::Entry::Vacant(e) = index.entry(q) {
            e.insert(pts.len());
            pts.push(q);
        }
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        for (dx, dy) in [(1, 0), (0, 1), (1, -1)] {
            if let Some(&j) = index.get(&(x + dx, y + dy)) {
                edges.push((i.min(j), i.max(j)));
            }
        }
    }
    // random spanning tree via BFS over shuffled adjacency
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in &edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut tree = BTreeSet::new();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        adj[u].shuffle(rng);
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                tree.insert((u.min(v), u.max(v)));
                queue.push_back(v);
            }
        }
    }
    edges.shuffle(rng);
    let mut deg = vec![0usize; n];
    for &(u, v) in &edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut kept = Vec::new();
    for e in edges {
        if (deg[e.0] > 4 || deg[e.1] > 4) && !tree.contains(&e) {
            deg[e.0] -= 1;
            deg[e.1] -= 1;
        } else {
            kept.push(e);
        }
    }
    // a spanning-tree vertex can still exceed 4; drop tree edges there too
    let mut g = Graph::new(n, kept.iter().copied()).expect("lattice edges are simple");
    while g.max_degree() > 4 {
        let v = (0..n).find(|&v| g.degree(v) > 4).expect("exists");
        let w = g.neighbors(v)[0];
        kept.retain(|&e| e != (v.min(w), v.max(w)));
        g = Graph::new(n, kept.iter().copied()).expect("subset of simple edges");
    }
    g
}

/// The 3-regular cube graph.
pub fn cube() -> Graph {
    Graph::new(
        8,
        [
            (0, 1),
            (1, 2),
            (2, 3),
            (0, 3),
            (4, 5),
            (5, 6),
            (6, 7),
            (4, 7),
            (0, 4),
            (1, 5),
            (2, 6),
            (3, 7),
        ],
    )
    .expect("cube edges")
}

/// The 3-regular triangular prism.
pub fn prism() -> Graph {
    Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]).expect("prism edges")
}

/// Planar `r`-regular graphs used by the disk construction checks.
pub fn regular_planar_graphs() -> Vec<(Graph, usize)> {
    vec![(Graph::complete(4), 3), (Graph::octahedron(), 4), (prism(), 3), (cube(), 3)]
}

/// Small planar graphs: paths, cycles, a star, `K_4`, a triangle with a
/// pendant, and the 2×3 grid.
pub fn handcrafted_planar_graphs() -> Vec<Graph> {
    vec![
        Graph::path(2),
        Graph::path(4),
        Graph::cycle(4),
        Graph::cycle(5),
        Graph::new(5, [(0, 1), (0, 2), (0, 3), (0, 4)]).expect("star"),
        Graph::complete(4),
        Graph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3)]).expect("paw"),
        Graph::new(6, [(0, 1), (1, 2), (3, 4), (4, 5), (0, 3), (1, 4), (2, 5)]).expect("ladder"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::validate_grid_graph;
    use crate::reduce::{brute_force_sat, validate_restricted_3sat};

    #[test]
    fn generators_are_seeded() {
        let a = erdos_renyi(10, 0.3, &mut ChaCha8Rng::seed_from_u64(7));
        let b = erdos_renyi(10, 0.3, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
    }

    #[test]
    fn restricted_formulas_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=5 {
            for _ in 0..20 {
                assert!(validate_restricted_3sat(&random_restricted_3sat(n, &mut rng)).is_valid());
            }
        }
        for (f, sat) in handcrafted_restricted_formulas() {
            assert!(validate_restricted_3sat(&f).is_valid());
            assert_eq!(brute_force_sat(&f).is_some(), sat);
        }
    }

    #[test]
    fn grid_and_planar_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (g, c) = random_grid_subgraph(4, 4, 10, &mut rng);
            validate_grid_graph(&g, &c).unwrap();
            let p = random_planar_bounded(20, &mut rng);
            assert!(p.max_degree() <= 4);
            assert_eq!(p.components().len(), 1);
        }
        for (g, r) in regular_planar_graphs() {
            assert!(crate::graph::check_regular(&g, r));
        }
    }
}
