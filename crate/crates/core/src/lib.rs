//! Target Set Selection on geometric graph classes.
//!
//! The crate simulates threshold activation, solves the unanimous case
//! exactly on interval and grid graphs through the vertex-cover
//! equivalence, and implements certified instance transformations between
//! SAT, independent set and TSS variants on planar, grid and unit disk
//! graphs, each with witness translation in both directions.

pub mod embed;
pub mod gen;
pub mod geometry;
pub mod graph;
pub mod harness;
pub mod polysolve;
pub mod rational;
pub mod reduce;
pub mod svg;
pub mod tss;

pub use geometry::{
    intersection_graph_disks, intersection_graph_intervals, validate_grid_graph, DiskRepresentation, GeoPoint,
    GridCoords, GridPoint, IntervalModel,
};
pub use graph::{check_regular, Graph};
pub use rational::Rational;
pub use tss::{
    classify_thresholds, is_target_set, min_target_set_bruteforce, normalize_seed, preprocess_cap_thresholds,
    simulate, ActivationTrace, ThresholdClass, TssInstance,
};
