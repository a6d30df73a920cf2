//! Coined discrete-time quantum walks on undirected graphs with an adjustable
//! self-loop weight per vertex.
//!
//! * [`graph`] builds complete graphs, periodic or open lattices and edge-list
//!   graphs, and indexes their arcs.
//! * [`walk`] holds the Grover and Grover-loop coins, the flip-flop shift and
//!   the blocked evolution kernel.
//! * [`search`] runs phase-flip spatial search and its sweeps.
//! * [`oracle`] is a brute-force multi-loop simulator used to cross-check the
//!   kernel.
//! * [`experiment`] turns runs into CSV artifacts; [`cli`] wires it to flags.

pub mod cli;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod oracle;
pub mod search;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{
    build_arc_table, build_complete, build_lattice, load_edge_list, Arc, ArcTable, Boundary, Graph,
};
pub use search::{
    degree_centrality_weights, find_first_peak, run_search, scaling_study, search_initial_state,
    weight_sweep, GraphFamily, PeakResult, ProbabilityTrace, ScalingReport, WeightRule, WindowRule,
};
pub use walk::{
    diagonal_state, position_distribution, spreading_probe, CoinConfig, CoinFamily, Evolution,
    WalkKernel, WalkerState,
};
