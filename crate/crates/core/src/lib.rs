//! Directed multigraph learning toolkit.
//!
//! * [`graph`] and [`ports`]: multigraph storage, degree/fan statistics and
//!   timestamp-ordered port numbering.
//! * [`generator`] and [`oracles`]: the random circulant benchmark and exact
//!   labels for its eleven subgraph-detection tasks.
//! * [`nodeid`]: BFS unique node IDs from an ego root and 1-WL refinement.
//! * [`nn`]: a matrix-level reverse-mode autodiff engine and the message
//!   passing model with reverse MP, port features and ego IDs.
//! * [`harness`]: ego sampling, splits, training, evaluation and ablations.

pub mod error;
pub mod generator;
pub mod graph;
pub mod harness;
pub mod io;
pub mod nn;
pub mod nodeid;
pub mod oracles;
pub mod ports;

pub use error::{DataError, GraphError, HarnessError, NnError, OracleError};
pub use graph::{DirectedMultigraph, Direction, EdgeInput, EdgeRecord};
pub use oracles::{LabelMatrix, TaskId, Thresholds};
pub use ports::{assign_ports, PortAssignment};
