//! Graph layout problems, one-shot pebbling, treewidth and pathwidth, and
//! the reductions connecting them, with exact solvers for small instances.

pub mod error;
pub mod graph;
pub mod io;
pub mod enumerate;
pub mod layout;
pub mod pebbling;
pub mod reductions;
pub mod sse;
pub mod suites;
pub mod width;

mod lattice;

pub use error::{Error, Result};
pub use graph::{
    cut_edges, expansion, is_topological, AnyGraph, Dag, Direction, LayoutGraph, Ordering,
    UGraph, VertexId, VertexSet,
};
pub use layout::{LayoutLimits, LayoutResult, Method, ProblemSpec};
