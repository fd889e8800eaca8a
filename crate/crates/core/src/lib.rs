//! Unambiguous reachability via iteratively built limb weights.
//!
//! [`pipeline::build_weights_and_decide`] is the entry point. The other
//! modules supply graphs, the limb arithmetic, brute-force oracles, the
//! nondeterminism harness and the step/space meters.

pub mod graph;
pub mod harness;
pub mod metrics;
pub mod numeric;
pub mod oracle;
pub mod pipeline;

pub use graph::{Graph, GraphError, Vertex};
pub use numeric::{Distance, LimbWeight, WeightAssignment};
pub use pipeline::{build_weights_and_decide, BuildOptions, ConstructionResult, CoreError, Mode};
