//! Target Set Selection instances, the activation process, threshold
//! taxonomy, preprocessing, seed normalization and the brute-force oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{canonical_set, Graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TssError {
    #[error("threshold map has {got} entries but the graph has {expected} vertices")]
    ThresholdCount { expected: usize, got: usize },
    #[error("vertex {0} is not a vertex of the instance")]
    VertexOutOfRange(usize),
    #[error("seed set is not a target set")]
    NotATargetSet,
}

/// `(G, t, k)`: a graph, a threshold per vertex and a budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson", into = "InstanceJson")]
pub struct TssInstance {
    graph: Graph,
    thresholds: Vec<u32>,
    budget: u64,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    graph: Graph,
    thresholds: Vec<u32>,
    k: u64,
}

impl TryFrom<InstanceJson> for TssInstance {
    type Error = TssError;
    fn try_from(raw: InstanceJson) -> Result<Self, Self::Error> {
        TssInstance::new(raw.graph, raw.thresholds, raw.k)
    }
}

impl From<TssInstance> for InstanceJson {
    fn from(inst: TssInstance) -> Self {
        InstanceJson {
            graph: inst.graph,
            thresholds: inst.thresholds,
            k: inst.budget,
        }
    }
}

impl TssInstance {
    pub fn new(graph: Graph, thresholds: Vec<u32>, budget: u64) -> Result<Self, TssError> {
        if thresholds.len() != graph.n() {
            return Err(TssError::ThresholdCount {
                expected: graph.n(),
                got: thresholds.len(),
            });
        }
        Ok(TssInstance {
            graph,
            thresholds,
            budget,
        })
    }

    /// Thresholds equal to the degree of every vertex.
    pub fn unanimous(graph: Graph, budget: u64) -> Self {
        let t = graph.degrees().into_iter().map(|d| d as u32).collect();
        TssInstance::new(graph, t, budget).expect("one threshold per vertex")
    }

    /// Thresholds `ceil(deg / 2)` on every vertex.
    pub fn majority(graph: Graph, budget: u64) -> Self {
        let t = graph.degrees().into_iter().map(|d| d.div_ceil(2) as u32).collect();
        TssInstance::new(graph, t, budget).expect("one threshold per vertex")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn thresholds(&self) -> &[u32] {
        &self.thresholds
    }

    pub fn threshold(&self, v: usize) -> u32 {
        self.thresholds[v]
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn check_seed(&self, seed: &[usize]) -> Result<(), TssError> {
        match seed.iter().find(|&&v| v >= self.n()) {
            Some(&v) => Err(TssError::VertexOutOfRange(v)),
            None => Ok(()),
        }
    }
}

/// The monotone sequence `S_0 ⊆ S_1 ⊆ … ⊆ S_r` ending at the first fixed
/// point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivationTrace {
    pub rounds: Vec<Vec<usize>>,
}

impl ActivationTrace {
    pub fn final_set(&self) -> &[usize] {
        self.rounds.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of rounds after the seed, i.e. `r`.
    pub fn round_count(&self) -> usize {
        self.rounds.len().saturating_sub(1)
    }

    /// First round index at which `v` is active.
    pub fn activation_round(&self, v: usize) -> Option<usize> {
        self.rounds.iter().position(|s| s.binary_search(&v).is_ok())
    }
}

/// Runs the activation process from `seed` until it stabilizes.
pub fn simulate(inst: &TssInstance, seed: &[usize]) -> Result<ActivationTrace, TssError> {
    inst.check_seed(seed)?;
    let g = inst.graph();
    let n = g.n();
    let mut active = vec![false; n];
    let mut count = vec![0u32; n];
    let current = canonical_set(seed);
    for &v in &current {
        active[v] = true;
    }
    for &v in &current {
        for &w in g.neighbors(v) {
            count[w] += 1;
        }
    }
    let mut rounds = vec![current];
    loop {
        let newly: Vec<usize> = (0..n).filter(|&v| !active[v] && inst.thresholds[v] <= count[v]).collect();
        if newly.is_empty() {
            break;
        }
        for &v in &newly {
            active[v] = true;
        }
        for &v in &newly {
            for &w in g.neighbors(v) {
                count[w] += 1;
            }
        }
        rounds.push((0..n).filter(|&v| active[v]).collect());
    }
    Ok(ActivationTrace { rounds })
}

/// True iff the process started from `seed` eventually activates every
/// vertex. The budget is not consulted.
pub fn is_target_set(inst: &TssInstance, seed: &[usize]) -> Result<bool, TssError> {
    inst.check_seed(seed)?;
    let mut act = Activator::new(inst);
    Ok(act.activates_all(seed.iter().copied()))
}

/// Queue-based closure of the activation process with reusable buffers.
/// The final active set equals the fixed point reached by [`simulate`].
#[derive(Clone)]
pub struct Activator<'a> {
    inst: &'a TssInstance,
    count: Vec<u32>,
    active: Vec<bool>,
    queue: Vec<usize>,
}

impl<'a> Activator<'a> {
    pub fn new(inst: &'a TssInstance) -> Self {
        let n = inst.n();
        Activator {
            inst,
            count: vec![0; n],
            active: vec![false; n],
            queue: Vec::with_capacity(n),
        }
    }

    /// Size of the final active set.
    pub fn closure_size(&mut self, seed: impl IntoIterator<Item = usize>) -> usize {
        let g = self.inst.graph();
        let t = &self.inst.thresholds;
        self.count.iter_mut().for_each(|c| *c = 0);
        self.active.iter_mut().for_each(|a| *a = false);
        self.queue.clear();
        for v in seed {
            if !self.active[v] {
                self.active[v] = true;
                self.queue.push(v);
            }
        }
        for v in 0..g.n() {
            if !self.active[v] && t[v] == 0 {
                self.active[v] = true;
                self.queue.push(v);
            }
        }
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            for &w in g.neighbors(v) {
                if !self.active[w] {
                    self.count[w] += 1;
                    if self.count[w] >= t[w] {
                        self.active[w] = true;
                        self.queue.push(w);
                    }
                }
            }
        }
        self.queue.len()
    }

    pub fn activates_all(&mut self, seed: impl IntoIterator<Item = usize>) -> bool {
        self.closure_size(seed) == self.inst.n()
    }

    /// Active flags left by the last closure computation.
    pub fn active(&self) -> &[bool] {
        &self.active
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdClass {
    Unanimous,
    Majority,
    ConstantBounded(u32),
    Exact(u32),
    General,
}

impl fmt::Display for ThresholdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdClass::Unanimous => write!(f, "unanimous"),
            ThresholdClass::Majority => write!(f, "majority"),
            ThresholdClass::ConstantBounded(c) => write!(f, "constant_bounded({c})"),
            ThresholdClass::Exact(c) => write!(f, "exact({c})"),
            ThresholdClass::General => write!(f, "general"),
        }
    }
}

/// Every threshold class the instance satisfies. `ConstantBounded` carries
/// the smallest valid bound.
pub fn classify_thresholds(inst: &TssInstance) -> BTreeSet<ThresholdClass> {
    let g = inst.graph();
    let t = inst.thresholds();
    let mut out = BTreeSet::new();
    out.insert(ThresholdClass::General);
    if (0..g.n()).all(|v| t[v] as usize == g.degree(v)) {
        out.insert(ThresholdClass::Unanimous);
    }
    if (0..g.n()).all(|v| t[v] as usize == g.degree(v).div_ceil(2)) {
        out.insert(ThresholdClass::Majority);
    }
    let max = t.iter().copied().max().unwrap_or(0);
    out.insert(ThresholdClass::ConstantBounded(max));
    if let Some(&first) = t.first() {
        if t.iter().all(|&x| x == first) {
            out.insert(ThresholdClass::Exact(first));
        }
    }
    out
}

pub fn is_majority(inst: &TssInstance) -> bool {
    classify_thresholds(inst).contains(&ThresholdClass::Majority)
}

pub fn is_unanimous(inst: &TssInstance) -> bool {
    classify_thresholds(inst).contains(&ThresholdClass::Unanimous)
}

/// Result of removing every vertex whose threshold exceeds its degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preprocessed {
    pub instance: TssInstance,
    /// Removed vertices (original ids) in removal order.
    pub removed: Vec<usize>,
    pub budget_spent: u64,
    /// `kept[i]` is the original id of vertex `i` of the reduced instance.
    pub kept: Vec<usize>,
    /// More vertices were forced than the budget allows: a definite NO.
    pub budget_exhausted: bool,
}

/// Repeatedly deletes a vertex with `t(v) > deg(v)` (lowest id first),
/// decrementing each remaining neighbour's threshold (floored at 0) and the
/// budget by one per deletion.
pub fn preprocess_cap_thresholds(inst: &TssInstance) -> Preprocessed {
    let g = inst.graph();
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = g.degrees();
    let mut t = inst.thresholds().to_vec();
    let mut removed = Vec::new();
    loop {
        let Some(v) = (0..n).find(|&v| alive[v] && t[v] as usize > deg[v]) else {
            break;
        };
        alive[v] = false;
        removed.push(v);
        for &w in g.neighbors(v) {
            if alive[w] {
                t[w] = t[w].saturating_sub(1);
                deg[w] -= 1;
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in kept.iter().enumerate() {
        index[v] = i;
    }
    let edges = g
        .edges()
        .iter()
        .filter(|&&(u, v)| alive[u] && alive[v])
        .map(|&(u, v)| (index[u], index[v]));
    let graph = Graph::new(kept.len(), edges).expect("induced subgraph is simple");
    let thresholds = kept.iter().map(|&v| t[v]).collect();
    let spent = removed.len() as u64;
    let instance = TssInstance::new(graph, thresholds, inst.budget().saturating_sub(spent))
        .expect("one threshold per kept vertex");
    Preprocessed {
        instance,
        removed,
        budget_spent: spent,
        kept,
        budget_exhausted: spent > inst.budget(),
    }
}

/// Moves seeds off vertices with `t(v) <= 1` and `deg(v) >= 1`.
///
/// Each such seed is replaced by its lowest-id neighbour that is neither
/// seeded nor previously vacated; a vacated vertex is never re-entered, so
/// the loop ends after at most `n` moves. A seed whose neighbours are all
/// seeded or vacated stays put. Cardinality is preserved and every step
/// keeps the set a target set.
pub fn normalize_seed(inst: &TssInstance, seed: &[usize]) -> Result<Vec<usize>, TssError> {
    if !is_target_set(inst, seed)? {
        return Err(TssError::NotATargetSet);
    }
    let g = inst.graph();
    let n = g.n();
    let mut seeded = vec![false; n];
    for &v in seed {
        seeded[v] = true;
    }
    let mut vacated = vec![false; n];
    loop {
        let mv = (0..n)
            .filter(|&v| seeded[v] && inst.threshold(v) <= 1 && g.degree(v) >= 1)
            .find_map(|v| {
                g.neighbors(v)
                    .iter()
                    .copied()
                    .find(|&u| !seeded[u] && !vacated[u])
                    .map(|u| (v, u))
            });
        let Some((v, u)) = mv else { break };
        seeded[v] = false;
        vacated[v] = true;
        seeded[u] = true;
    }
    Ok((0..n).filter(|&v| seeded[v]).collect())
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("oracle budget exhausted")]
pub struct OracleTimeout;

/// Smallest target set by exhaustive search over sizes `0, 1, …, k_max`,
/// each in lexicographic subset order. The witness is the lexicographically
/// first target set of minimum size.
///
/// Candidates already active under the earlier (smaller) seeds are skipped:
/// such a seed could be dropped, so no minimum target set contains one.
pub fn min_target_set_bruteforce(inst: &TssInstance, k_max: usize) -> Option<(usize, Vec<usize>)> {
    min_target_set_bruteforce_until(inst, k_max, None).expect("no deadline set")
}

/// As [`min_target_set_bruteforce`], giving up once `deadline` passes.
pub fn min_target_set_bruteforce_until(
    inst: &TssInstance,
    k_max: usize,
    deadline: Option<Instant>,
) -> Result<Option<(usize, Vec<usize>)>, OracleTimeout> {
    let n = inst.n();
    let k_max = k_max.min(n);
    let root = Closure::new(inst);
    if root.size == n {
        return Ok(Some((0, Vec::new())));
    }
    let timed_out = AtomicBool::new(false);
    for k in 1..=k_max {
        let found = (0..=n - k).into_par_iter().find_map_first(|first| {
            if timed_out.load(Ordering::Relaxed) || root.active[first] {
                return None;
            }
            let mut state = root.clone();
            state.add(inst, first);
            let mut search = Search {
                inst,
                deadline,
                timed_out: &timed_out,
                nodes: 0,
                path: vec![first],
            };
            search.extend(&state, first + 1, k - 1).then_some(search.path)
        });
        if timed_out.load(Ordering::Relaxed) {
            return Err(OracleTimeout);
        }
        if let Some(w) = found {
            return Ok(Some((k, w)));
        }
    }
    Ok(None)
}

/// Activation closure maintained under seed insertion.
#[derive(Clone)]
struct Closure {
    count: Vec<u32>,
    active: Vec<bool>,
    size: usize,
}

impl Closure {
    fn new(inst: &TssInstance) -> Self {
        let n = inst.n();
        let mut c = Closure {
            count: vec![0; n],
            active: vec![false; n],
            size: 0,
        };
        for v in 0..n {
            if inst.thresholds[v] == 0 {
                c.add(inst, v);
            }
        }
        c
    }

    fn add(&mut self, inst: &TssInstance, v: usize) {
        if self.active[v] {
            return;
        }
        let g = inst.graph();
        self.active[v] = true;
        self.size += 1;
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !self.active[w] {
                    self.count[w] += 1;
                    if self.count[w] >= inst.thresholds[w] {
                        self.active[w] = true;
                        self.size += 1;
                        stack.push(w);
                    }
                }
            }
        }
    }
}

struct Search<'a> {
    inst: &'a TssInstance,
    deadline: Option<Instant>,
    timed_out: &'a AtomicBool,
    nodes: u64,
    path: Vec<usize>,
}

impl Search<'_> {
    /// Tries to complete `path` with `remaining` more seeds from `start..n`.
    fn extend(&mut self, state: &Closure, start: usize, remaining: usize) -> bool {
        let n = self.inst.n();
        if remaining == 0 {
            return state.size == n;
        }
        for c in start..=n.saturating_sub(remaining) {
            if state.active[c] {
                continue;
            }
            self.nodes += 1;
            if self.nodes.is_multiple_of(4096) {
                if self.timed_out.load(Ordering::Relaxed) {
                    return false;
                }
                if self.deadline.is_some_and(|d| Instant::now() >= d) {
                    self.timed_out.store(true, Ordering::Relaxed);
                    return false;
                }
            }
            let mut next = state.clone();
            next.add(self.inst, c);
            self.path.push(c);
            if self.extend(&next, c + 1, remaining - 1) {
                return true;
            }
            self.path.pop();
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(g: Graph, t: Vec<u32>, k: u64) -> TssInstance {
        TssInstance::new(g, t, k).unwrap()
    }

    #[test]
    fn c4_unanimous_opposite_seed_one_round() {
        let i = TssInstance::unanimous(Graph::cycle(4), 2);
        let tr = simulate(&i, &[0, 2]).unwrap();
        assert_eq!(tr.rounds, vec![vec![0, 2], vec![0, 1, 2, 3]]);
    }

    #[test]
    fn full_seed_is_already_fixed() {
        let i = TssInstance::unanimous(Graph::cycle(5), 5);
        let tr = simulate(&i, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(tr.rounds.len(), 1);
        assert!(is_target_set(&i, &[0, 1, 2, 3, 4]).unwrap());
    }

    #[test]
    fn path_middle_infected_in_round_one() {
        let i = inst(Graph::path(3), vec![1, 2, 1], 2);
        let tr = simulate(&i, &[0, 2]).unwrap();
        assert_eq!(tr.rounds, vec![vec![0, 2], vec![0, 1, 2]]);
    }

    #[test]
    fn adjacent_seed_on_c4_fails() {
        let i = TssInstance::unanimous(Graph::cycle(4), 2);
        assert!(!is_target_set(&i, &[0, 1]).unwrap());
    }

    #[test]
    fn zero_threshold_self_activates() {
        let i = inst(Graph::empty(1), vec![0], 0);
        assert!(is_target_set(&i, &[]).unwrap());
        let tr = simulate(&i, &[]).unwrap();
        assert_eq!(tr.rounds, vec![vec![], vec![0]]);
    }

    #[test]
    fn out_of_range_seed_is_an_error() {
        let i = inst(Graph::empty(1), vec![0], 0);
        assert_eq!(simulate(&i, &[3]), Err(TssError::VertexOutOfRange(3)));
    }

    #[test]
    fn classification_examples() {
        use ThresholdClass::*;
        let k4 = TssInstance::unanimous(Graph::complete(4), 1);
        assert_eq!(
            classify_thresholds(&k4),
            [Unanimous, ConstantBounded(3), Exact(3), General].into_iter().collect()
        );
        let empty = inst(Graph::empty(3), vec![0, 0, 0], 0);
        let c = classify_thresholds(&empty);
        assert!(c.contains(&Unanimous) && c.contains(&Majority));
        let c4 = inst(Graph::cycle(4), vec![2, 2, 2, 1], 0);
        assert_eq!(classify_thresholds(&c4), [ConstantBounded(2), General].into_iter().collect());
    }

    #[test]
    fn preprocess_examples() {
        let i = inst(Graph::path(2), vec![5, 1], 2);
        let p = preprocess_cap_thresholds(&i);
        assert_eq!(p.removed, vec![0]);
        assert_eq!(p.instance.thresholds(), &[0]);
        assert_eq!(p.instance.budget(), 1);
        assert_eq!(p.kept, vec![1]);
        assert!(!p.budget_exhausted);

        let same = TssInstance::unanimous(Graph::cycle(4), 2);
        let p = preprocess_cap_thresholds(&same);
        assert!(p.removed.is_empty());
        assert_eq!(p.instance, same);

        let iso = inst(Graph::empty(1), vec![1], 0);
        let p = preprocess_cap_thresholds(&iso);
        assert!(p.budget_exhausted);
        assert_eq!(p.budget_spent, 1);
    }

    #[test]
    fn preprocess_floors_at_zero() {
        // vertex 1 (t = 1) neighbours two forced vertices
        let i = inst(Graph::path(3), vec![2, 1, 2], 3);
        let p = preprocess_cap_thresholds(&i);
        assert_eq!(p.removed, vec![0, 2]);
        assert_eq!(p.instance.thresholds(), &[0]);
    }

    #[test]
    fn normalize_examples() {
        let i = inst(Graph::path(2), vec![1, 1], 1);
        assert_eq!(normalize_seed(&i, &[0]).unwrap(), vec![1]);
        let j = TssInstance::unanimous(Graph::cycle(4), 2);
        assert_eq!(normalize_seed(&j, &[0, 2]).unwrap(), vec![0, 2]);
        let star = inst(Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap(), vec![2, 1, 1, 1], 1);
        assert_eq!(normalize_seed(&star, &[1]), Err(TssError::NotATargetSet));
    }

    #[test]
    fn bruteforce_examples() {
        let c4 = TssInstance::unanimous(Graph::cycle(4), 2);
        assert_eq!(min_target_set_bruteforce(&c4, 4), Some((2, vec![0, 2])));
        let single = inst(Graph::empty(1), vec![0], 0);
        assert_eq!(min_target_set_bruteforce(&single, 1), Some((0, vec![])));
        let k3 = inst(Graph::complete(3), vec![1, 1, 1], 1);
        assert_eq!(min_target_set_bruteforce(&k3, 3), Some((1, vec![0])));
        assert_eq!(min_target_set_bruteforce(&c4, 1), None);
    }

    #[test]
    fn instance_json_shape() {
        let i = inst(Graph::path(2), vec![1, 1], 1);
        let s = serde_json::to_string(&i).unwrap();
        assert_eq!(s, r#"{"graph":{"n":2,"edges":[[0,1]]},"thresholds":[1,1],"k":1}"#);
        assert!(serde_json::from_str::<TssInstance>(r#"{"graph":{"n":2,"edges":[]},"thresholds":[1],"k":0}"#).is_err());
    }
}
