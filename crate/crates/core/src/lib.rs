//! Multistage-graph simple path instances, the Z-H decision procedure,
//! exact oracles, the Hamiltonian circuit reduction and a differential lab.

pub mod dense;
pub mod format;
pub mod lab;
pub mod model;
pub mod operators;
pub mod oracle;
pub mod reduction;
pub mod zh;

pub use format::{parse_instance, parse_ugraph, serialize_instance, serialize_ugraph, FormatError};
pub use model::{EdgeId, EdgeSet, GraphDraft, MultistageGraph, VertexId};
pub use operators::{ReachMap, Operators};
pub use oracle::{oracle_hamilton, oracle_simple_path, Budget, OracleAnswer, OracleResult};
pub use reduction::{lift_path, reduce_hc_to_msp, ReductionMap, UndirectedGraph};
pub use zh::{zh_solve, zh_trace, Answer, SolveOptions, ZhError, ZhResult};
