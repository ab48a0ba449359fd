use std::path::PathBuf;

use thiserror::Error;

use crate::graph::VertexId;

/// Failures while reading or building a graph.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has no edges")]
    Empty,
    #[error("binary graph cache: {0}")]
    BadCache(String),
    #[error("invalid weight range [{low}, {high})")]
    BadWeightRange { low: f64, high: f64 },
}

/// Failures raised while growing samples.
#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("sample {sample}, step {step}: stepTransits returned {transit:?}, which is not in the sample")]
    TransitNotInSample {
        sample: u64,
        step: usize,
        transit: VertexId,
    },
    #[error("sample {sample}, step {step}, transit {transit_idx}: next returned out-of-range vertex {vertex:?}")]
    InvalidVertex {
        sample: u64,
        step: usize,
        transit_idx: usize,
        vertex: VertexId,
    },
    #[error("rejection sampler stalled after {iterations} iterations")]
    SamplerStall { iterations: u64 },
    #[error("sample {sample}, step {step}, transit {transit_idx}: {source}")]
    Next {
        sample: u64,
        step: usize,
        transit_idx: usize,
        #[source]
        source: Box<SamplingError>,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sample-parallel and transit-parallel outputs differ: {0}")]
    EngineMismatch(String),
}

impl SamplingError {
    pub(crate) fn in_context(self, sample: u64, step: usize, transit_idx: usize) -> Self {
        match self {
            e @ (SamplingError::Next { .. }
            | SamplingError::InvalidVertex { .. }
            | SamplingError::TransitNotInSample { .. }) => e,
            other => SamplingError::Next {
                sample,
                step,
                transit_idx,
                source: Box::new(other),
            },
        }
    }
}
