//! Rectilinear embeddings of planar graphs with maximum degree 4: every
//! vertex sits on an integer point and every edge is a unit-step grid path,
//! with paths of distinct edges meeting only at shared endpoints.
//!
//! [`compute_embedding`] is a heuristic (force-directed placement on a
//! coarse lattice, then negotiated-congestion routing). Its output is always
//! run through [`validate_embedding`] before it is returned.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GridPoint, AXIS_DIRECTIONS};
use crate::graph::{normalize_edge, Edge, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePath {
    pub edge: [usize; 2],
    pub points: Vec<GridPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectilinearEmbedding {
    pub vpoint: Vec<GridPoint>,
    pub epath: Vec<EdgePath>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmbeddingViolation {
    VertexCount { expected: usize, got: usize },
    DuplicateVertexPoint { u: usize, v: usize, point: GridPoint },
    UnknownEdge { edge: Edge },
    DuplicatePath { edge: Edge },
    MissingPath { edge: Edge },
    TooShort { edge: Edge },
    NonUnitStep { edge: Edge, from: GridPoint, to: GridPoint },
    RepeatedPoint { edge: Edge, point: GridPoint },
    EndpointMismatch { edge: Edge },
    SharedPoint { first: Edge, second: Edge, point: GridPoint },
    SharedSegment { first: Edge, second: Edge, from: GridPoint, to: GridPoint },
    ThroughVertex { edge: Edge, vertex: usize, point: GridPoint },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub violations: Vec<EmbeddingViolation>,
}

impl EmbeddingReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl RectilinearEmbedding {
    /// The stored path of `e`, oriented to start at `e.0`.
    pub fn path(&self, u: usize, v: usize) -> Option<Vec<GridPoint>> {
        self.epath.iter().find_map(|p| match p.edge {
            [a, b] if a == u && b == v => Some(p.points.clone()),
            [a, b] if a == v && b == u => Some(p.points.iter().rev().copied().collect()),
            _ => None,
        })
    }

    /// Number of grid points in the bounding box of all vertex and path
    /// points.
    pub fn area(&self) -> u64 {
        let pts = self.vpoint.iter().chain(self.epath.iter().flat_map(|p| p.points.iter()));
        let mut bounds: Option<(i64, i64, i64, i64)> = None;
        for p in pts {
            bounds = Some(match bounds {
                None => (p.x, p.x, p.y, p.y),
                Some((a, b, c, d)) => (a.min(p.x), b.max(p.x), c.min(p.y), d.max(p.y)),
            });
        }
        match bounds {
            None => 0,
            Some((x0, x1, y0, y1)) => (x1.abs_diff(x0) + 1) * (y1.abs_diff(y0) + 1),
        }
    }
}

/// Checks vertex injectivity, unit-step simple paths, endpoint agreement and
/// pairwise interior disjointness. Reports every violation found.
pub fn validate_embedding(g: &Graph, emb: &RectilinearEmbedding) -> EmbeddingReport {
    let mut out = Vec::new();
    if emb.vpoint.len() != g.n() {
        out.push(EmbeddingViolation::VertexCount {
            expected: g.n(),
            got: emb.vpoint.len(),
        });
        return EmbeddingReport { violations: out };
    }
    let mut vertex_at: HashMap<GridPoint, usize> = HashMap::new();
    for (v, &p) in emb.vpoint.iter().enumerate() {
        if let Some(&u) = vertex_at.get(&p) {
            out.push(EmbeddingViolation::DuplicateVertexPoint { u, v, point: p });
        } else {
            vertex_at.insert(p, v);
        }
    }

    let mut seen = vec![false; g.edge_count()];
    let mut point_owner: HashMap<GridPoint, Edge> = HashMap::new();
    let mut segment_owner: HashMap<(GridPoint, GridPoint), Edge> = HashMap::new();
    for path in &emb.epath {
        let [a, b] = path.edge;
        let edge = normalize_edge(a, b);
        let idx = match g.edge_index(a, b) {
            Some(i) if a < g.n() && b < g.n() => i,
            _ => {
                out.push(EmbeddingViolation::UnknownEdge { edge });
                continue;
            }
        };
        if seen[idx] {
            out.push(EmbeddingViolation::DuplicatePath { edge });
            continue;
        }
        seen[idx] = true;
        let pts = &path.points;
        if pts.len() < 2 {
            out.push(EmbeddingViolation::TooShort { edge });
            continue;
        }
        if pts[0] != emb.vpoint[a] || pts[pts.len() - 1] != emb.vpoint[b] {
            out.push(EmbeddingViolation::EndpointMismatch { edge });
        }
        for w in pts.windows(2) {
            if w[0].l1(w[1]) != 1 {
                out.push(EmbeddingViolation::NonUnitStep {
                    edge,
                    from: w[0],
                    to: w[1],
                });
            }
        }
        let mut own: HashSet<GridPoint> = HashSet::new();
        for &p in pts {
            if !own.insert(p) {
                out.push(EmbeddingViolation::RepeatedPoint { edge, point: p });
            }
        }
        for &p in &pts[1..pts.len() - 1] {
            if let Some(&vertex) = vertex_at.get(&p) {
                out.push(EmbeddingViolation::ThroughVertex { edge, vertex, point: p });
            }
        }
        // endpoints may be shared, but only between edges at the same vertex
        for (i, &p) in pts.iter().enumerate() {
            let is_end = i == 0 || i == pts.len() - 1;
            if is_end && vertex_at.contains_key(&p) {
                continue;
            }
            match point_owner.get(&p) {
                Some(&first) if first != edge => out.push(EmbeddingViolation::SharedPoint {
                    first,
                    second: edge,
                    point: p,
                }),
                _ => {
                    point_owner.insert(p, edge);
                }
            }
        }
        for w in pts.windows(2) {
            let key = if w[0] <= w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            match segment_owner.get(&key) {
                Some(&first) if first != edge => out.push(EmbeddingViolation::SharedSegment {
                    first,
                    second: edge,
                    from: key.0,
                    to: key.1,
                }),
                _ => {
                    segment_owner.insert(key, edge);
                }
            }
        }
    }
    for (i, &e) in g.edges().iter().enumerate() {
        if !seen[i] {
            out.push(EmbeddingViolation::MissingPath { edge: e });
        }
    }
    EmbeddingReport { violations: out }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbedError {
    #[error("vertex {vertex} has degree {degree}; at most 4 directions leave a grid point")]
    DegreeTooHigh { vertex: usize, degree: usize },
    #[error("edge {{{0}, {1}}} has no path in the embedding")]
    UnknownEdge(usize, usize),
    #[error("no embedding found after {attempts} attempts (fewest conflicting points: {best_overuse})")]
    NotFound { attempts: usize, best_overuse: usize },
}

/// Interior points `p_2, ..., p_{g-1}` of the path of `(u, v)`, in order from
/// `u`.
pub fn polyline_interior_points(emb: &RectilinearEmbedding, u: usize, v: usize) -> Result<Vec<GridPoint>, EmbedError> {
    let pts = emb.path(u, v).ok_or(EmbedError::UnknownEdge(u, v))?;
    Ok(pts[1..pts.len() - 1].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbedOptions {
    pub seed: u64,
    pub attempts: usize,
    /// Rip-up-and-reroute rounds per attempt.
    pub rounds: usize,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            seed: 0,
            attempts: 48,
            rounds: 80,
        }
    }
}

/// Computes a rectilinear embedding. Planarity is not tested; a nonplanar
/// input surfaces as [`EmbedError::NotFound`]. Attempts run in parallel and
/// the lowest-index success wins, so the result depends only on the seed.
pub fn compute_embedding(g: &Graph, opts: &EmbedOptions) -> Result<RectilinearEmbedding, EmbedError> {
    if let Some(v) = (0..g.n()).find(|&v| g.degree(v) > 4) {
        return Err(EmbedError::DegreeTooHigh {
            vertex: v,
            degree: g.degree(v),
        });
    }
    let best_overuse = AtomicUsize::new(usize::MAX);
    let found = (0..opts.attempts).into_par_iter().find_map_first(|a| match attempt(g, opts, a) {
        Ok(emb) => Some(emb),
        Err(over) => {
            best_overuse.fetch_min(over, AtomicOrdering::Relaxed);
            None
        }
    });
    found.ok_or_else(|| EmbedError::NotFound {
        attempts: opts.attempts,
        best_overuse: best_overuse.into_inner(),
    })
}

fn attempt(g: &Graph, opts: &EmbedOptions, index: usize) -> Result<RectilinearEmbedding, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let spacing = 3 + (index % 3) as i64;
    let layout = spring_layout(g, &mut rng);
    let cells = snap_to_lattice(&layout);
    let vpoint: Vec<GridPoint> = cells.iter().map(|c| c.scaled(spacing)).collect();
    let routed = Router::new(g, &vpoint, spacing + 1).route(opts.rounds)?;
    let emb = RectilinearEmbedding {
        vpoint,
        epath: g
            .edges()
            .iter()
            .zip(routed)
            .map(|(&(u, v), points)| EdgePath { edge: [u, v], points })
            .collect(),
    };
    if validate_embedding(g, &emb).is_valid() {
        Ok(emb)
    } else {
        Err(usize::MAX)
    }
}

/// Fruchterman-Reingold layout from a random start.
fn spring_layout(g: &Graph, rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let n = g.n();
    let side = (n as f64).sqrt().max(1.0);
    let mut pos: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>() * side, rng.gen::<f64>() * side)).collect();
    let iterations = 300;
    let mut temp = side / 4.0;
    for _ in 0..iterations {
        let mut disp = vec![(0.0f64, 0.0f64); n];
        for i in 0..n {
            for j in i + 1..n {
                let dx = pos[i].0 - pos[j].0;
                let dy = pos[i].1 - pos[j].1;
                let d2 = (dx * dx + dy * dy).max(1e-6);
                let f = 1.0 / d2;
                disp[i].0 += dx * f;
                disp[i].1 += dy * f;
                disp[j].0 -= dx * f;
                disp[j].1 -= dy * f;
            }
        }
        for &(u, v) in g.edges() {
            let dx = pos[u].0 - pos[v].0;
            let dy = pos[u].1 - pos[v].1;
            let d = (dx * dx + dy * dy).sqrt();
            disp[u].0 -= dx * d;
            disp[u].1 -= dy * d;
            disp[v].0 += dx * d;
            disp[v].1 += dy * d;
        }
        for i in 0..n {
            let (dx, dy) = disp[i];
            let len = (dx * dx + dy * dy).sqrt().max(1e-9);
            let step = len.min(temp);
            pos[i].0 += dx / len * step;
            pos[i].1 += dy / len * step;
        }
        temp = (temp * 0.985).max(0.01);
    }
    pos
}

/// Maps a continuous layout onto distinct lattice cells, nearest free cell
/// first, scaled so that edges span roughly one cell.
fn snap_to_lattice(pos: &[(f64, f64)]) -> Vec<GridPoint> {
    let mut taken: HashMap<GridPoint, usize> = HashMap::new();
    let mut out = Vec::with_capacity(pos.len());
    for (v, &(x, y)) in pos.iter().enumerate() {
        let base = GridPoint::new(x.round() as i64, y.round() as i64);
        let mut r = 0i64;
        let cell = 'search: loop {
            let mut ring: Vec<GridPoint> = Vec::new();
            for dx in -r..=r {
                for dy in -r..=r {
                    if dx.abs().max(dy.abs()) == r {
                        ring.push(base.offset(dx, dy));
                    }
                }
            }
            ring.sort_by(|a, b| {
                let da = (a.x as f64 - x).powi(2) + (a.y as f64 - y).powi(2);
                let db = (b.x as f64 - x).powi(2) + (b.y as f64 - y).powi(2);
                da.total_cmp(&db).then(a.cmp(b))
            });
            for c in ring {
                if !taken.contains_key(&c) {
                    break 'search c;
                }
            }
            r += 1;
        };
        taken.insert(cell, v);
        out.push(cell);
    }
    out
}

#[derive(PartialEq)]
struct HeapItem {
    cost: f64,
    node: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then(other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Negotiated-congestion router: every edge is routed by Dijkstra with
/// costs that grow with present sharing and accumulated history, until no
/// grid point carries more than one path.
struct Router<'a> {
    g: &'a Graph,
    x0: i64,
    y0: i64,
    w: i64,
    h: i64,
    vertex_at: Vec<Option<usize>>,
    port_of: Vec<Option<usize>>,
    vnode: Vec<usize>,
}

impl<'a> Router<'a> {
    fn new(g: &'a Graph, vpoint: &[GridPoint], margin: i64) -> Self {
        let x0 = vpoint.iter().map(|p| p.x).min().unwrap_or(0) - margin;
        let x1 = vpoint.iter().map(|p| p.x).max().unwrap_or(0) + margin;
        let y0 = vpoint.iter().map(|p| p.y).min().unwrap_or(0) - margin;
        let y1 = vpoint.iter().map(|p| p.y).max().unwrap_or(0) + margin;
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut r = Router {
            g,
            x0,
            y0,
            w,
            h,
            vertex_at: vec![None; (w * h) as usize],
            port_of: vec![None; (w * h) as usize],
            vnode: Vec::new(),
        };
        r.vnode = vpoint.iter().map(|&p| r.node(p).expect("inside box")).collect();
        for (v, &p) in vpoint.iter().enumerate() {
            r.vertex_at[r.vnode[v]] = Some(v);
            for (dx, dy) in AXIS_DIRECTIONS {
                if let Some(n) = r.node(p.offset(dx, dy)) {
                    r.port_of[n] = Some(v);
                }
            }
        }
        r
    }

    fn node(&self, p: GridPoint) -> Option<usize> {
        let (x, y) = (p.x - self.x0, p.y - self.y0);
        (x >= 0 && y >= 0 && x < self.w && y < self.h).then(|| (x * self.h + y) as usize)
    }

    fn point(&self, n: usize) -> GridPoint {
        let n = n as i64;
        GridPoint::new(n / self.h + self.x0, n % self.h + self.y0)
    }

    /// Returns the routed point sequences, or the remaining overuse count.
    fn route(&self, rounds: usize) -> Result<Vec<Vec<GridPoint>>, usize> {
        let edges = self.g.edges();
        let size = self.vertex_at.len();
        let mut occ = vec![0u32; size];
        let mut history = vec![0.0f64; size];
        let mut paths: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
        let mut pres = 0.5;
        let mut overuse = usize::MAX;
        for _ in 0..rounds {
            for (i, &(u, v)) in edges.iter().enumerate() {
                for &n in &paths[i] {
                    occ[n] -= 1;
                }
                let p = self.shortest(u, v, &occ, &history, pres).ok_or(usize::MAX)?;
                for &n in &p {
                    occ[n] += 1;
                }
                paths[i] = p;
            }
            overuse = occ.iter().filter(|&&o| o > 1).count();
            if overuse == 0 {
                return Ok(edges
                    .iter()
                    .zip(&paths)
                    .map(|(&(u, v), inner)| {
                        let mut pts = vec![self.point(self.vnode[u])];
                        pts.extend(inner.iter().map(|&n| self.point(n)));
                        pts.push(self.point(self.vnode[v]));
                        pts
                    })
                    .collect());
            }
            for (n, &o) in occ.iter().enumerate() {
                if o > 1 {
                    history[n] += f64::from(o - 1);
                }
            }
            pres *= 1.6;
        }
        Err(overuse)
    }

    /// Interior nodes of a cheapest path from `u` to `v`.
    fn shortest(&self, u: usize, v: usize, occ: &[u32], history: &[f64], pres: f64) -> Option<Vec<usize>> {
        let size = self.vertex_at.len();
        let (src, dst) = (self.vnode[u], self.vnode[v]);
        let mut dist = vec![f64::INFINITY; size];
        let mut prev = vec![usize::MAX; size];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(HeapItem { cost: 0.0, node: src });
        while let Some(HeapItem { cost, node }) = heap.pop() {
            if node == dst {
                break;
            }
            if cost > dist[node] {
                continue;
            }
            let p = self.point(node);
            for (dx, dy) in AXIS_DIRECTIONS {
                let Some(next) = self.node(p.offset(dx, dy)) else { continue };
                let step = if next == dst {
                    1.0
                } else if self.vertex_at[next].is_some() {
                    continue;
                } else {
                    let foreign_port = matches!(self.port_of[next], Some(w) if w != u && w != v);
                    let base = 1.0 + history[next] + if foreign_port { 2.0 } else { 0.0 };
                    base * (1.0 + pres * f64::from(occ[next]))
                };
                let c = cost + step;
                if c < dist[next] {
                    dist[next] = c;
                    prev[next] = node;
                    heap.push(HeapItem { cost: c, node: next });
                }
            }
        }
        if prev[dst] == usize::MAX {
            return None;
        }
        let mut inner = Vec::new();
        let mut cur = prev[dst];
        while cur != src {
            inner.push(cur);
            cur = prev[cur];
        }
        inner.reverse();
        Some(inner)
    }
}
