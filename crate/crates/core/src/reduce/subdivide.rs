//! Edge subdivision with threshold-1 vertices, and the planar-to-grid
//! transformation built from it.

use std::collections::BTreeSet;

use super::{check_target_set, BudgetRecord, Counters, Instance, ReduceError, ReductionArtifact, ReductionKind, Role};
use crate::embed::{validate_embedding, RectilinearEmbedding};
use crate::geometry::{validate_grid_graph, GridCoords, GridPoint};
use crate::graph::{canonical_set, normalize_edge, Edge, Graph};
use crate::tss::TssInstance;

/// Moves seeds on subdivision vertices to an unseeded endpoint of their
/// source edge (the lower one first). Seeds whose endpoints are both taken
/// are replaced by the lowest unseeded source vertex so the size is kept.
///
/// Both moves are sound: a seeded endpoint activates its whole chain of
/// threshold-1 vertices, so the new closure contains the old seed set.
fn project_chain_seeds(n_source: usize, chain_edge: impl Fn(usize) -> Option<Edge>, seed: &[usize]) -> Vec<usize> {
    let seed = canonical_set(seed);
    let mut out: BTreeSet<usize> = seed.iter().copied().filter(|&s| s < n_source).collect();
    let mut pad = 0usize;
    for &s in seed.iter().filter(|&&s| s >= n_source) {
        let (u, v) = chain_edge(s).expect("non-source vertex lies on a chain");
        if out.insert(u) || out.insert(v) {
            continue;
        }
        pad += 1;
    }
    for v in 0..n_source {
        if pad == 0 {
            break;
        }
        if out.insert(v) {
            pad -= 1;
        }
    }
    out.into_iter().collect()
}

/// Result of subdividing one edge once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivided {
    pub instance: TssInstance,
    /// The new vertex (always the last id).
    pub vertex: usize,
    pub edge: Edge,
}

impl Subdivided {
    /// A target set of the source stays a target set.
    pub fn lift(&self, seed: &[usize]) -> Vec<usize> {
        canonical_set(seed)
    }

    /// Same-size target set of the source.
    pub fn project(&self, seed: &[usize]) -> Vec<usize> {
        let (x, e) = (self.vertex, self.edge);
        project_chain_seeds(x, |s| (s == x).then_some(e), seed)
    }
}

/// Replaces edge `{u, v}` by a path `u – x – v` with `t(x) = 1`.
pub fn subdivide_edge_once(inst: &TssInstance, u: usize, v: usize) -> Result<Subdivided, ReduceError> {
    let g = inst.graph();
    if !g.has_edge(u, v) {
        return Err(ReduceError::UnknownEdge(u, v));
    }
    let e = normalize_edge(u, v);
    let x = g.n();
    let edges = g
        .edges()
        .iter()
        .copied()
        .filter(|&f| f != e)
        .chain([(e.0, x), (x, e.1)]);
    let graph = Graph::new(x + 1, edges).map_err(|err| ReduceError::Internal(err.to_string()))?;
    let mut t = inst.thresholds().to_vec();
    t.push(1);
    Ok(Subdivided {
        instance: TssInstance::new(graph, t, inst.budget())?,
        vertex: x,
        edge: e,
    })
}

/// Subdivides every edge at the interior points of its embedded path, then
/// every resulting edge once more. Coordinates are doubled so the second
/// round lands on integer points; all new vertices have threshold 1 and
/// the budget is unchanged.
pub fn planar_tss_to_grid_tss(inst: &TssInstance, emb: &RectilinearEmbedding) -> Result<ReductionArtifact, ReduceError> {
    let g = inst.graph();
    let report = validate_embedding(g, emb);
    if !report.is_valid() {
        return Err(ReduceError::InvalidEmbedding(report));
    }
    let n = g.n();
    let mut coords: Vec<GridPoint> = emb.vpoint.iter().map(|p| p.scaled(2)).collect();
    let mut provenance: Vec<Role> = (0..n).map(|v| Role::Original { v }).collect();
    let mut thresholds = inst.thresholds().to_vec();

    // first round: one vertex per interior path point
    let mut chains: Vec<(Edge, Vec<usize>, Vec<GridPoint>)> = Vec::with_capacity(g.edge_count());
    for &(u, v) in g.edges() {
        let pts = emb.path(u, v).expect("validated");
        let mut ids = vec![u];
        for (i, p) in pts.iter().enumerate().take(pts.len() - 1).skip(1) {
            ids.push(coords.len());
            coords.push(p.scaled(2));
            provenance.push(Role::EmbedPoint {
                edge: (u, v),
                index: i + 1,
            });
            thresholds.push(1);
        }
        ids.push(v);
        chains.push(((u, v), ids, pts));
    }
    // second round: one vertex per unit segment, at its doubled midpoint
    let mut edges = Vec::new();
    for (e, ids, pts) in &chains {
        for j in 0..ids.len() - 1 {
            let mid = coords.len();
            coords.push(GridPoint::new(pts[j].x + pts[j + 1].x, pts[j].y + pts[j + 1].y));
            provenance.push(Role::Subdivision { edge: *e, index: j + 1 });
            thresholds.push(1);
            edges.push((ids[j], mid));
            edges.push((mid, ids[j + 1]));
        }
    }
    let graph = Graph::new(coords.len(), edges).map_err(|err| ReduceError::Internal(err.to_string()))?;
    let coords = GridCoords::new(coords);
    validate_grid_graph(&graph, &coords).map_err(|v| ReduceError::Internal(format!("grid output rejected: {v}")))?;
    let out = TssInstance::new(graph, thresholds, inst.budget())?;
    Ok(ReductionArtifact {
        reduction: ReductionKind::Planar2Grid,
        source: Instance::Tss(inst.clone()),
        output: Instance::Tss(out),
        provenance,
        counters: Counters::default(),
        plans: Vec::new(),
        budget: BudgetRecord {
            formula: "k' = k".into(),
            source_k: inst.budget(),
            output_k: inst.budget(),
        },
        disks: None,
        coords: Some(coords),
    })
}

/// Identity: the source vertices keep their ids.
pub fn grid_lift_witness(art: &ReductionArtifact, seed: &[usize]) -> Result<Vec<usize>, ReduceError> {
    art.expect_kind(ReductionKind::Planar2Grid)?;
    let src = art.source.as_tss().expect("planar2grid source is TSS");
    check_target_set(src, seed)?;
    Ok(canonical_set(seed))
}

/// Same-size target set of the source from one of the grid instance.
pub fn grid_project_witness(art: &ReductionArtifact, seed: &[usize]) -> Result<Vec<usize>, ReduceError> {
    art.expect_kind(ReductionKind::Planar2Grid)?;
    let src = art.source.as_tss().expect("planar2grid source is TSS");
    let out = art.output_tss().expect("planar2grid output is TSS");
    check_target_set(out, seed)?;
    let projected = project_chain_seeds(
        src.n(),
        |s| match art.provenance[s] {
            Role::EmbedPoint { edge, .. } | Role::Subdivision { edge, .. } => Some(edge),
            _ => None,
        },
        seed,
    );
    check_target_set(src, &projected).map_err(|e| ReduceError::Internal(format!("projection failed: {e}")))?;
    Ok(projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::EdgePath;
    use crate::tss::{classify_thresholds, is_target_set, min_target_set_bruteforce, ThresholdClass};

    #[test]
    fn subdivide_p2() {
        let inst = TssInstance::new(Graph::path(2), vec![1, 1], 1).unwrap();
        let s = subdivide_edge_once(&inst, 0, 1).unwrap();
        assert_eq!(s.instance.graph(), &Graph::new(3, [(0, 2), (2, 1)]).unwrap());
        assert_eq!(s.instance.thresholds(), &[1, 1, 1]);
        assert!(is_target_set(&s.instance, &s.lift(&[0])).unwrap());
        assert_eq!(s.project(&[2]), vec![0]);
        assert!(subdivide_edge_once(&inst, 0, 0).is_err());
    }

    #[test]
    fn subdividing_breaks_unanimity() {
        let inst = TssInstance::unanimous(Graph::cycle(3), 2);
        let s = subdivide_edge_once(&inst, 0, 1).unwrap();
        assert!(!classify_thresholds(&s.instance).contains(&ThresholdClass::Unanimous));
    }

    #[test]
    fn single_edge_to_grid() {
        let inst = TssInstance::new(Graph::path(2), vec![1, 1], 1).unwrap();
        let emb = RectilinearEmbedding {
            vpoint: vec![GridPoint::new(0, 0), GridPoint::new(1, 0)],
            epath: vec![EdgePath {
                edge: [0, 1],
                points: vec![GridPoint::new(0, 0), GridPoint::new(1, 0)],
            }],
        };
        let art = planar_tss_to_grid_tss(&inst, &emb).unwrap();
        let out = art.output_tss().unwrap();
        assert_eq!(out.n(), 3);
        assert_eq!(out.graph(), &Graph::new(3, [(0, 2), (1, 2)]).unwrap());
        assert_eq!(art.coords.as_ref().unwrap().coords[2], GridPoint::new(1, 0));
        assert!(art.budget_consistent());
    }

    #[test]
    fn bent_path_preserves_optimum() {
        let inst = TssInstance::unanimous(Graph::path(2), 1);
        let pts = vec![
            GridPoint::new(0, 0),
            GridPoint::new(1, 0),
            GridPoint::new(1, 1),
            GridPoint::new(2, 1),
        ];
        let emb = RectilinearEmbedding {
            vpoint: vec![pts[0], pts[3]],
            epath: vec![EdgePath { edge: [0, 1], points: pts }],
        };
        let art = planar_tss_to_grid_tss(&inst, &emb).unwrap();
        let out = art.output_tss().unwrap();
        assert_eq!(out.n(), 2 + 2 + 3);
        let (k, w) = min_target_set_bruteforce(out, out.n()).unwrap();
        assert_eq!(k, 1);
        let back = grid_project_witness(&art, &w).unwrap();
        assert!(is_target_set(&inst, &back).unwrap());
    }
}
