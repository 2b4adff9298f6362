//! Differential testing of the solver against the exact oracle.

pub mod bench;
pub mod campaign;
pub mod config;
pub mod generate;
pub mod metric;
pub mod minimize;
pub mod verdict;

use thiserror::Error;

pub use bench::{scaling_family, ScalingPoint, ScalingReport};
pub use campaign::{
    instance_for, judge, rerun_archived, run_differential, run_differential_with, CampaignControl, CampaignReport,
    FindingRecord,
};
pub use config::{CampaignConfig, InstanceSource};
pub use generate::{gen_msp, gen_ugraph, GenShape, ShapeRange};
pub use metric::{lex_compare, vec_metric, GraphVector};
pub use minimize::{apply_move, minimize, neighbours, MinimizeBudget, Minimized, ShrinkMove};
pub use verdict::{classify, classify_answers, Verdict, VerdictKind};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("vectors have different lengths ({left} and {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("predicate does not hold on the input")]
    PredicateFalse,
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("seed {seed}: {source}")]
    Solver {
        seed: u64,
        #[source]
        source: crate::zh::ZhError,
    },
    #[error("{path}: {message}")]
    Parse { path: std::path::PathBuf, message: String },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}
