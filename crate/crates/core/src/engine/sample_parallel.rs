//! Sample-parallel engine.
//!
//! Work items are `(sample, transit, slot)` triples visited sample-major.
//! Each worker owns one contiguous chunk of samples and walks the transits
//! of a sample one after another, reading the transit's adjacency once per
//! (sample, transit) pair.

use rayon::prelude::*;

use super::{alive_mask, run, sample_parallel_one, timed, EngineConfig, EngineRun, Paradigm, StepEnv, StepRecord};
use crate::app::SamplingApp;
use crate::error::SamplingError;
use crate::graph::Graph;
use crate::sample::Sample;

/// Runs `app` on `samples` until every sample is finished.
pub fn sp_run(
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: Vec<Sample>,
    cfg: &EngineConfig,
) -> Result<EngineRun, SamplingError> {
    run(Paradigm::SampleParallel, app, graph, samples, cfg)
}

/// Advances every live sample by one step.
pub fn sp_step(
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: &mut [Sample],
    step: usize,
    cfg: &EngineConfig,
) -> Result<StepRecord, SamplingError> {
    let alive = alive_mask(app, samples, step);
    step_with_mask(app, graph, samples, step, cfg, &alive)
}

pub(crate) fn step_with_mask(
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: &mut [Sample],
    step: usize,
    cfg: &EngineConfig,
    alive: &[bool],
) -> Result<StepRecord, SamplingError> {
    let env = StepEnv { app, graph, step, cfg };
    let workers = rayon::current_num_threads().max(1);
    let chunk = samples.len().div_ceil(workers).max(1);
    let (counts, elapsed) = timed(|| {
        samples
            .par_chunks_mut(chunk)
            .zip(alive.par_chunks(chunk))
            .map(|(chunk, alive)| {
                let mut calls = 0u64;
                let mut fetches = 0u64;
                for (sample, _) in chunk.iter_mut().zip(alive).filter(|(_, &a)| a) {
                    let out = sample_parallel_one(&env, sample)?;
                    calls += out.next_calls;
                    fetches += out.fetches;
                }
                Ok((calls, fetches))
            })
            .collect::<Result<Vec<_>, SamplingError>>()
    });
    let counts = counts?;
    Ok(StepRecord {
        step,
        alive: alive.iter().filter(|&&a| a).count(),
        sample: elapsed,
        next_calls: counts.iter().map(|c| c.0).sum(),
        adjacency_fetches: counts.iter().map(|c| c.1).sum(),
        ..Default::default()
    })
}
