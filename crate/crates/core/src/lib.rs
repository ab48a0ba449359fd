//! Graph sampling with sample-parallel and transit-parallel engines.
//!
//! An application is a [`SamplingApp`]: a handful of functions that say how
//! many steps to run, how many vertices to draw per transit and how to draw
//! one. The engines in [`engine`] grow a set of [`Sample`]s with it, either
//! sample by sample or grouped by transit vertex, and produce identical
//! output either way.

pub mod app;
pub mod apps;
pub mod engine;
pub mod error;
pub mod graph;
pub mod output;
pub mod rng;
pub mod run;
pub mod sample;
pub mod session;
pub mod validate;

pub use app::{is_alive, seed_samples, transit_count, EdgeSink, EdgeView, NextQuery, SamplingApp, SamplingType, Steps};
pub use apps::{AppConfig, AppId};
pub use engine::{EngineConfig, EngineRun, Paradigm, StepRecord};
pub use error::{GraphError, SamplingError};
pub use graph::{Graph, LoadOptions, Neighbors, VertexId};
pub use output::{Layout, SampleSetOutput};
pub use rng::{rng_uniform, RngKey, SlotRng};
pub use sample::Sample;
pub use run::{compare_paradigms, multi_worker_run, split_ranges, Comparison, RunConfig, RunReport, RunResult};
pub use session::{DenseSamples, Sampler, SamplerOptions, SessionError};
