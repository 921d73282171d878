//! Geometric representations (disks, grid points, intervals) and the
//! validators that tie them to abstract graphs. Every predicate here is
//! exact; nothing on these paths touches floating point.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub const fn new(x: i64, y: i64) -> Self {
        GridPoint { x, y }
    }

    pub fn l1(self, other: GridPoint) -> u64 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn offset(self, dx: i64, dy: i64) -> GridPoint {
        GridPoint::new(self.x + dx, self.y + dy)
    }

    pub fn scaled(self, k: i64) -> GridPoint {
        GridPoint::new(self.x * k, self.y * k)
    }

    pub fn to_geo(self) -> GeoPoint {
        GeoPoint::new(Rational::from_integer(self.x), Rational::from_integer(self.y))
    }
}

impl From<[i64; 2]> for GridPoint {
    fn from(p: [i64; 2]) -> Self {
        GridPoint::new(p[0], p[1])
    }
}

impl From<GridPoint> for [i64; 2] {
    fn from(p: GridPoint) -> Self {
        [p.x, p.y]
    }
}

/// The four axis directions in the fixed order used throughout the crate.
pub const AXIS_DIRECTIONS: [(i64, i64); 4] = [(0, 1), (1, 0), (-1, 0), (0, -1)];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[Rational; 2]", into = "[Rational; 2]")]
pub struct GeoPoint {
    pub x: Rational,
    pub y: Rational,
}

impl GeoPoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        GeoPoint { x, y }
    }

    pub fn squared_distance(&self, other: &GeoPoint) -> Rational {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        dx.square() + dy.square()
    }
}

impl From<[Rational; 2]> for GeoPoint {
    fn from([x, y]: [Rational; 2]) -> Self {
        GeoPoint { x, y }
    }
}

impl From<GeoPoint> for [Rational; 2] {
    fn from(p: GeoPoint) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("disk diameter must be positive, got {0}")]
    NonPositiveDiameter(Rational),
    #[error("interval {index} has lo > hi")]
    InvertedInterval { index: usize },
    #[error("representation has {got} entries but the graph has {expected} vertices")]
    SizeMismatch { expected: usize, got: usize },
}

/// Equal-diameter closed disks, one per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskRepresentation {
    pub diameter: Rational,
    pub centers: Vec<GeoPoint>,
}

impl DiskRepresentation {
    pub fn new(diameter: Rational, centers: Vec<GeoPoint>) -> Result<Self, GeometryError> {
        if !diameter.is_positive() {
            return Err(GeometryError::NonPositiveDiameter(diameter));
        }
        Ok(DiskRepresentation { diameter, centers })
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Closed-disk intersection: tangent disks intersect.
    pub fn intersects(&self, i: usize, j: usize) -> bool {
        self.centers[i].squared_distance(&self.centers[j]) <= self.diameter.square()
    }
}

/// Integer coordinates for all centers and the diameter after multiplying
/// by the least common denominator of every value involved.
fn scaled_integers(rep: &DiskRepresentation) -> (Vec<(BigInt, BigInt)>, BigInt) {
    let mut lcm = rep.diameter.denom().clone();
    for c in &rep.centers {
        lcm = lcm.lcm(c.x.denom());
        lcm = lcm.lcm(c.y.denom());
    }
    let scale = |r: &Rational| -> BigInt { r.numer() * (&lcm / r.denom()) };
    let pts = rep.centers.iter().map(|c| (scale(&c.x), scale(&c.y))).collect();
    (pts, scale(&rep.diameter))
}

/// Intersection graph of a disk representation. All `n(n-1)/2` pairs are
/// decided with the exact closed-disk predicate.
pub fn intersection_graph_disks(rep: &DiskRepresentation) -> Graph {
    let n = rep.centers.len();
    let (pts, diam) = scaled_integers(rep);
    let limit = BigInt::one() << 60;
    let small = diam.abs() < limit && pts.iter().all(|(x, y)| x.abs() < limit && y.abs() < limit);
    let mut edges = Vec::new();
    if small {
        let p: Vec<(i128, i128)> = pts
            .iter()
            .map(|(x, y)| (x.to_i128().unwrap(), y.to_i128().unwrap()))
            .collect();
        let d = diam.to_i128().unwrap();
        let d2 = d * d;
        for i in 0..n {
            for j in i + 1..n {
                let dx = p[i].0 - p[j].0;
                let dy = p[i].1 - p[j].1;
                if dx * dx + dy * dy <= d2 {
                    edges.push((i, j));
                }
            }
        }
    } else {
        let d2 = &diam * &diam;
        for i in 0..n {
            for j in i + 1..n {
                let dx = &pts[i].0 - &pts[j].0;
                let dy = &pts[i].1 - &pts[j].1;
                if &dx * &dx + &dy * &dy <= d2 {
                    edges.push((i, j));
                }
            }
        }
    }
    Graph::new(n, edges).expect("pairs are distinct and in range")
}

/// Closed intervals `[lo, hi]`, one per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntervalJson", into = "IntervalJson")]
pub struct IntervalModel {
    intervals: Vec<(Rational, Rational)>,
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    intervals: Vec<[Rational; 2]>,
}

impl TryFrom<IntervalJson> for IntervalModel {
    type Error = GeometryError;
    fn try_from(raw: IntervalJson) -> Result<Self, Self::Error> {
        IntervalModel::new(raw.intervals.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<IntervalModel> for IntervalJson {
    fn from(m: IntervalModel) -> Self {
        IntervalJson {
            intervals: m.intervals.into_iter().map(|(a, b)| [a, b]).collect(),
        }
    }
}

impl IntervalModel {
    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Self, GeometryError> {
        if let Some(index) = intervals.iter().position(|(lo, hi)| lo > hi) {
            return Err(GeometryError::InvertedInterval { index });
        }
        Ok(IntervalModel { intervals })
    }

    pub fn from_integers(iv: &[(i64, i64)]) -> Result<Self, GeometryError> {
        IntervalModel::new(iv.iter().map(|&(a, b)| (Rational::from(a), Rational::from(b))).collect())
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn intersects(&self, i: usize, j: usize) -> bool {
        let (a, b) = &self.intervals[i];
        let (c, d) = &self.intervals[j];
        a.max(c) <= b.min(d)
    }
}

pub fn intersection_graph_intervals(model: &IntervalModel) -> Graph {
    let n = model.len();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if model.intersects(i, j) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, edges).expect("pairs are distinct and in range")
}

/// Index-aligned grid coordinates claimed to realize a grid graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCoords {
    pub coords: Vec<GridPoint>,
}

impl GridCoords {
    pub fn new(coords: Vec<GridPoint>) -> Self {
        GridCoords { coords }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridViolation {
    #[error("coordinates cover {got} vertices, graph has {expected}")]
    Coverage { expected: usize, got: usize },
    #[error("vertices {u} and {v} share grid point {point:?}")]
    DuplicatePoint { u: usize, v: usize, point: GridPoint },
    #[error("vertices {u} and {v} are grid neighbours but not adjacent")]
    MissingEdge { u: usize, v: usize },
    #[error("edge {{{u}, {v}}} joins grid points at L1 distance {distance}")]
    NonUnitEdge { u: usize, v: usize, distance: u64 },
}

/// Checks that `coords` is an injective placement under which `g` is
/// exactly the induced subgraph of the integer grid. Reports the first
/// violation found.
pub fn validate_grid_graph(g: &Graph, coords: &GridCoords) -> Result<(), GridViolation> {
    let n = g.n();
    if coords.coords.len() != n {
        return Err(GridViolation::Coverage {
            expected: n,
            got: coords.coords.len(),
        });
    }
    let mut at: HashMap<GridPoint, usize> = HashMap::with_capacity(n);
    for (v, &p) in coords.coords.iter().enumerate() {
        if let Some(&u) = at.get(&p) {
            return Err(GridViolation::DuplicatePoint { u, v, point: p });
        }
        at.insert(p, v);
    }
    for &(u, v) in g.edges() {
        let distance = coords.coords[u].l1(coords.coords[v]);
        if distance != 1 {
            return Err(GridViolation::NonUnitEdge { u, v, distance });
        }
    }
    for (u, &p) in coords.coords.iter().enumerate() {
        for (dx, dy) in AXIS_DIRECTIONS {
            if let Some(&v) = at.get(&p.offset(dx, dy)) {
                if !g.has_edge(u, v) {
                    let (u, v) = if u < v { (u, v) } else { (v, u) };
                    return Err(GridViolation::MissingEdge { u, v });
                }
            }
        }
    }
    Ok(())
}

/// Disks of diameter 1 centered at the grid points of `coords`.
pub fn grid_disks(coords: &GridCoords) -> DiskRepresentation {
    DiskRepresentation {
        diameter: Rational::one(),
        centers: coords.coords.iter().map(|p| p.to_geo()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    fn pt(x: Rational, y: Rational) -> GeoPoint {
        GeoPoint::new(x, y)
    }

    #[test]
    fn tangent_disks_intersect() {
        let rep = DiskRepresentation::new(r(1, 7), vec![pt(r(0, 1), r(0, 1)), pt(r(1, 7), r(0, 1))]).unwrap();
        let g = intersection_graph_disks(&rep);
        assert_eq!(g.edges(), &[(0, 1)]);
    }

    #[test]
    fn single_disk_is_edgeless() {
        let rep = DiskRepresentation::new(r(1, 7), vec![pt(r(3, 1), r(2, 5))]).unwrap();
        let g = intersection_graph_disks(&rep);
        assert_eq!(g.n(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn slightly_apart_disks_do_not_intersect() {
        let rep = DiskRepresentation::new(r(1, 7), vec![pt(r(0, 1), r(0, 1)), pt(r(1, 7), r(1, 1_000_000_007))]).unwrap();
        assert_eq!(intersection_graph_disks(&rep).edge_count(), 0);
    }

    #[test]
    fn non_positive_diameter_rejected() {
        assert!(DiskRepresentation::new(r(0, 1), vec![]).is_err());
    }

    #[test]
    fn interval_examples() {
        let m = IntervalModel::from_integers(&[(0, 1), (2, 3)]).unwrap();
        assert_eq!(intersection_graph_intervals(&m).edge_count(), 0);
        let m = IntervalModel::from_integers(&[(0, 2), (1, 3), (2, 4)]).unwrap();
        assert_eq!(intersection_graph_intervals(&m).edges(), &[(0, 1), (0, 2), (1, 2)]);
        let m = IntervalModel::from_integers(&[(0, 1), (1, 2)]).unwrap();
        assert_eq!(intersection_graph_intervals(&m).edges(), &[(0, 1)]);
        assert!(IntervalModel::from_integers(&[(2, 1)]).is_err());
    }

    #[test]
    fn grid_validation_examples() {
        let p2 = Graph::path(2);
        let ok = GridCoords::new(vec![GridPoint::new(0, 0), GridPoint::new(0, 1)]);
        assert_eq!(validate_grid_graph(&p2, &ok), Ok(()));
        let far = GridCoords::new(vec![GridPoint::new(0, 0), GridPoint::new(0, 2)]);
        assert_eq!(
            validate_grid_graph(&p2, &far),
            Err(GridViolation::NonUnitEdge { u: 0, v: 1, distance: 2 })
        );
        let c4 = Graph::cycle(4);
        let square = GridCoords::new(vec![
            GridPoint::new(0, 0),
            GridPoint::new(1, 0),
            GridPoint::new(1, 1),
            GridPoint::new(0, 1),
        ]);
        assert_eq!(validate_grid_graph(&c4, &square), Ok(()));
        let p4 = Graph::path(4);
        assert_eq!(
            validate_grid_graph(&p4, &square),
            Err(GridViolation::MissingEdge { u: 0, v: 3 })
        );
        let dup = GridCoords::new(vec![GridPoint::new(0, 0), GridPoint::new(0, 0)]);
        assert!(matches!(
            validate_grid_graph(&Graph::empty(2), &dup),
            Err(GridViolation::DuplicatePoint { .. })
        ));
    }

    #[test]
    fn disk_json_shape() {
        let rep = DiskRepresentation::new(r(1, 7), vec![pt(r(1, 7), r(0, 1))]).unwrap();
        let s = serde_json::to_string(&rep).unwrap();
        assert_eq!(s, r#"{"diameter":"1/7","centers":[["1/7","0/1"]]}"#);
    }
}
