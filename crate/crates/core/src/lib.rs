//! Temporal multi-broadcast scheduling.
//!
//! A temporal graph assigns each edge a set of time labels and a
//! time-dependent traversal time. Given an undirected graph, a set of
//! sources and a per-edge label budget, the task is to choose labels so that
//! every source temporally reaches every vertex, optimizing one of six
//! temporal distances in the worst case.

pub mod distances;
pub mod error;
pub mod graph;
pub mod io;
pub mod reductions;
pub mod solvers;
pub mod tsot;

pub use distances::{distance, objective, sssp, Bounds, DistanceResult, Measure};
pub use error::{Result, TmbError};
pub use graph::{
    full_temporal_graph, is_feasible, path_stats, validate_path, EdgeId, Instance, Labeling,
    PathStats, ReachFastInstance, Schedule, StaticGraph, Step, TemporalPath, Time, TraversalSpec,
    Vertex,
};
pub use solvers::{
    add_super_source, approx_ft_mw, brute_force, detect_regime, solve_exact, solve_multi_full_mu,
    solve_single_source, solve_tree, BruteForceLimits, Regime, SolveResult, Status,
};
pub use tsot::{build_ea_tsot, build_ld_tsot, Tsot};
