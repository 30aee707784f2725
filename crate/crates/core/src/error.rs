//! Shared error type for the crate.

use crate::space::MetricDefect;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input matrix is not square (or row lengths disagree).
    #[error("matrix is not square: {detail}")]
    Shape { detail: String },

    /// A matrix entry is NaN or infinite.
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// The matrix fails one or more metric axioms; one defect is reported per
    /// violated class, each with a minimal witnessing index tuple.
    #[error("matrix is not a metric: {}", summarize_defects(.0))]
    InvalidMetric(Vec<MetricDefect>),

    /// A caller-supplied parameter is out of its documented range.
    #[error("invalid parameter: {what}")]
    Parameter { what: String },

    /// The requested size exceeds the configured cap (see
    /// [`crate::space::size_cap`]).
    #[error("size {requested} exceeds cap {cap} (override with METRIC_PROPS_MAX_SIZE)")]
    Capacity { requested: usize, cap: usize },

    /// The known entries of a partial metric do not connect all points, so no
    /// shortest-path completion exists. Components are listed by point index.
    #[error("known entries leave the space disconnected into {} components: {components:?}", components.len())]
    Disconnected { components: Vec<Vec<usize>> },

    /// A file could not be parsed; `detail` carries the position when known.
    #[error("failed to parse {path}: {detail}")]
    Parse { path: String, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Frozen entries of an extension problem admit no metric completion.
    #[error("frozen entries admit no completion: {what}")]
    Infeasible { what: String },

    /// Brute-force and fast strategies disagreed; this indicates a bug, never
    /// a property of the input.
    #[error("check strategies disagree on {what}; this is a bug")]
    StrategyDisagreement { what: String },
}

fn summarize_defects(defects: &[MetricDefect]) -> String {
    let parts: Vec<String> = defects.iter().map(|d| d.to_string()).collect();
    parts.join("; ")
}
