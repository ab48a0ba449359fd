//! Handle-style API for embedding the sampler in ML pipelines: configure
//! once, call [`Sampler::do_sampling`], then read dense arrays.

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::apps::AppConfig;
use crate::engine::Paradigm;
use crate::error::{GraphError, SamplingError};
use crate::graph::{open_graph, Graph, LoadOptions};
use crate::output::{Layout, SampleSetOutput};
use crate::run::{multi_worker_run, RunConfig, RunReport};

/// Padding value of ragged rows in [`DenseSamples`].
pub const PAD: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("sampler is not configured")]
    NotConfigured,
    #[error("do_sampling has not been called")]
    NotSampled,
}

#[derive(Debug, Clone)]
pub struct SamplerOptions {
    pub load: LoadOptions,
    pub seed: u64,
    pub num_samples: usize,
    pub paradigm: Paradigm,
    pub threads: usize,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            load: LoadOptions::default(),
            seed: 0,
            num_samples: 1000,
            paradigm: Paradigm::TransitParallel,
            threads: 0,
        }
    }
}

/// Row-major `rows x cols` array of original vertex ids, ragged rows padded
/// with [`PAD`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseSamples {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl DenseSamples {
    fn from_rows(rows: Vec<Vec<u64>>) -> Self {
        let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in &rows {
            data.extend_from_slice(r);
            data.extend(std::iter::repeat_n(PAD, cols - r.len()));
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row `i` without padding.
    pub fn unpadded(&self, i: usize) -> &[u64] {
        let row = self.row(i);
        let end = row.iter().position(|&v| v == PAD).unwrap_or(row.len());
        &row[..end]
    }
}

struct Configured {
    graph: Arc<Graph>,
    run: RunConfig,
}

/// A configured sampler. Graph loading and parameter validation happen in
/// [`Sampler::new`]; engine errors surface from [`Sampler::do_sampling`].
#[derive(Default)]
pub struct Sampler {
    config: Option<Configured>,
    result: Option<(SampleSetOutput, RunReport)>,
}

impl Sampler {
    pub fn new(graph_path: impl AsRef<Path>, app: AppConfig, opts: SamplerOptions) -> Result<Self, SessionError> {
        let graph = open_graph(graph_path, &opts.load)?;
        Self::with_graph(Arc::new(graph), app, opts)
    }

    pub fn with_graph(graph: Arc<Graph>, app: AppConfig, opts: SamplerOptions) -> Result<Self, SessionError> {
        app.build(&graph, opts.seed)?;
        let run = RunConfig {
            paradigm: opts.paradigm,
            seed: opts.seed,
            num_samples: opts.num_samples,
            threads: opts.threads,
            ..RunConfig::new(app)
        };
        Ok(Self {
            config: Some(Configured { graph, run }),
            result: None,
        })
    }

    pub fn graph(&self) -> Option<&Graph> {
        self.config.as_ref().map(|c| c.graph.as_ref())
    }

    pub fn do_sampling(&mut self) -> Result<(), SessionError> {
        let c = self.config.as_ref().ok_or(SessionError::NotConfigured)?;
        let result = multi_worker_run(&c.run, &c.graph)?;
        let out = result.output(&c.graph, Layout::FinalSamples);
        self.result = Some((out, result.report));
        Ok(())
    }

    fn output(&self) -> Result<&SampleSetOutput, SessionError> {
        if self.config.is_none() {
            return Err(SessionError::NotConfigured);
        }
        self.result.as_ref().map(|r| &r.0).ok_or(SessionError::NotSampled)
    }

    pub fn report(&self) -> Result<&RunReport, SessionError> {
        self.output()?;
        Ok(&self.result.as_ref().expect("checked").1)
    }

    /// One row per sample: roots then every step, as in the final-samples file.
    pub fn final_samples(&self) -> Result<DenseSamples, SessionError> {
        let out = self.output()?;
        Ok(DenseSamples::from_rows(out.samples.iter().map(|s| s.flat()).collect()))
    }

    /// One row per sample with the vertices it added at `step` (empty rows
    /// for samples that had finished).
    pub fn step_samples(&self, step: usize) -> Result<DenseSamples, SessionError> {
        let out = self.output()?;
        Ok(DenseSamples::from_rows(
            out.samples
                .iter()
                .map(|s| s.steps.get(step).cloned().unwrap_or_default())
                .collect(),
        ))
    }
}
