//! Sample-parallel and transit-parallel execution.
//!
//! Both engines share one driver loop and one set of per-sample helpers;
//! they differ only in how a step's `next` invocations are enumerated and
//! distributed. Every invocation draws from the stream keyed by
//! `(seed, sample, step, transit_idx, slot)`, so the two engines write the
//! same value into every slot.

pub mod collective;
mod sample_parallel;
mod transit_parallel;

use std::time::{Duration, Instant};

use log::warn;
use rayon::prelude::*;

use crate::app::{is_alive, EdgeSink, EdgeView, NextQuery, SamplingApp, Steps};
use crate::error::SamplingError;
use crate::graph::{Graph, VertexId};
use crate::output::{dedup_step, fallback_check};
use crate::rng::RngKey;
use crate::sample::Sample;

/// Transits of one sample at one step.
pub type Transits = smallvec::SmallVec<[VertexId; 4]>;

pub use sample_parallel::{sp_run, sp_step};
pub use transit_parallel::{
    build_transit_map, partition_work_classes, tp_execute_class, tp_run, tp_step, ClassOutput, Member, TaskOutput,
    TransitGroup, TransitMap, TransitSchedule, WorkClass, LARGE_THRESHOLD, SMALL_THRESHOLD,
    SUBGROUP_WIDTH,
};

/// Default bound on the number of steps of an `INF`-step application.
pub const DEFAULT_STEP_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Paradigm {
    SampleParallel,
    TransitParallel,
}

impl Paradigm {
    pub fn as_str(self) -> &'static str {
        match self {
            Paradigm::SampleParallel => "sp",
            Paradigm::TransitParallel => "tp",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub seed: u64,
    /// Worker threads for one engine instance; 0 uses rayon's default.
    pub threads: usize,
    /// Hard limit for applications with `Steps::Infinite`.
    pub step_cap: usize,
    /// Verify that every transit belongs to its sample.
    pub check_transits: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            threads: 0,
            step_cap: DEFAULT_STEP_CAP,
            check_transits: true,
        }
    }
}

impl EngineConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// Timing and work counters of one step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub alive: usize,
    /// Scheduling-index build (transit map, partition); zero for SP.
    pub build: Duration,
    /// Everything else in the step.
    pub sample: Duration,
    pub next_calls: u64,
    /// Adjacency lists read by the engine (one per (sample, transit) in SP,
    /// one per transit group in TP).
    pub adjacency_fetches: u64,
    pub small_groups: usize,
    pub medium_groups: usize,
    pub large_groups: usize,
    /// Samples routed to the sample-parallel path after unique-neighbour elimination.
    pub fallback_samples: usize,
}

impl StepRecord {
    pub fn total(&self) -> Duration {
        self.build + self.sample
    }

    /// Adds the counters and times of `other` (same step of another worker).
    pub fn merge(&mut self, other: &StepRecord) {
        self.alive += other.alive;
        self.build += other.build;
        self.sample += other.sample;
        self.next_calls += other.next_calls;
        self.adjacency_fetches += other.adjacency_fetches;
        self.small_groups += other.small_groups;
        self.medium_groups += other.medium_groups;
        self.large_groups += other.large_groups;
        self.fallback_samples += other.fallback_samples;
    }
}

/// Result of a full engine run.
#[derive(Debug, Clone)]
pub struct EngineRun {
    pub samples: Vec<Sample>,
    pub steps: Vec<StepRecord>,
    pub wall_time: Duration,
    /// An `INF`-step application still had live samples at the step cap.
    pub hit_step_cap: bool,
}

/// Runs `app` to completion under `paradigm`.
pub fn run(
    paradigm: Paradigm,
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: Vec<Sample>,
    cfg: &EngineConfig,
) -> Result<EngineRun, SamplingError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| SamplingError::Config(format!("thread pool: {e}")))?;
    pool.install(|| drive(paradigm, app, graph, samples, cfg))
}

/// Runs the step loop. Samples that drop out are moved aside so later steps
/// only touch live ones; a sample that missed a step never has transits
/// again, because it has no entry for that step.
/// Live samples are compacted once at least `1 / COMPACT_RATIO` of them
/// have finished.
const COMPACT_RATIO: usize = 8;

fn drive(
    paradigm: Paradigm,
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: Vec<Sample>,
    cfg: &EngineConfig,
) -> Result<EngineRun, SamplingError> {
    let start = Instant::now();
    let limit = match app.steps() {
        Steps::Fixed(k) => k,
        Steps::Infinite => cfg.step_cap,
    };
    let n = samples.len();
    let mut live = samples;
    let mut live_pos: Vec<usize> = (0..n).collect();
    let mut finished: Vec<(usize, Sample)> = Vec::new();
    let mut steps = Vec::new();
    for step in 0..limit {
        let mut alive = alive_mask(app, &live, step);
        let dead = alive.iter().filter(|&&a| !a).count();
        // Finished samples stay finished, so they can be moved out once
        // enough of them accumulate; until then they are masked off.
        if dead > 0 && dead * COMPACT_RATIO >= live.len() {
            let mut kept = Vec::with_capacity(live.len() - dead);
            let mut kept_pos = Vec::with_capacity(live.len() - dead);
            for ((s, p), a) in live.into_iter().zip(live_pos).zip(&alive) {
                if *a {
                    kept.push(s);
                    kept_pos.push(p);
                } else {
                    finished.push((p, s));
                }
            }
            live = kept;
            live_pos = kept_pos;
            alive = vec![true; live.len()];
        }
        if !alive.contains(&true) {
            break;
        }
        let record = match paradigm {
            Paradigm::SampleParallel => sample_parallel::step_with_mask(app, graph, &mut live, step, cfg, &alive)?,
            Paradigm::TransitParallel => transit_parallel::step_with_mask(app, graph, &mut live, step, cfg, &alive)?,
        };
        steps.push(record);
    }

    let mut hit_step_cap = false;
    if app.steps() == Steps::Infinite && steps.len() == limit {
        let still = alive_mask(app, &live, limit).iter().filter(|&&a| a).count();
        if still > 0 {
            hit_step_cap = true;
            warn!(
                "{}: step cap {} reached with {} live samples; stopping",
                app.name(),
                cfg.step_cap,
                still
            );
        }
    }
    finished.extend(live_pos.into_iter().zip(live));
    finished.sort_unstable_by_key(|(p, _)| *p);
    Ok(EngineRun {
        samples: finished.into_iter().map(|(_, s)| s).collect(),
        steps,
        wall_time: start.elapsed(),
        hit_step_cap,
    })
}

pub(crate) fn alive_mask(app: &dyn SamplingApp, samples: &[Sample], step: usize) -> Vec<bool> {
    samples.par_iter().map(|s| is_alive(app, s, step)).collect()
}

/// Shared per-step context.
#[derive(Clone, Copy)]
pub(crate) struct StepEnv<'a> {
    pub app: &'a dyn SamplingApp,
    pub graph: &'a Graph,
    pub step: usize,
    pub cfg: &'a EngineConfig,
}

impl StepEnv<'_> {
    /// Evaluates `stepTransits` for every transit index of `sample`.
    pub fn transits_of(&self, sample: &Sample) -> Result<Transits, SamplingError> {
        let n = self.app.transit_count(sample, self.step);
        let transits: Transits = (0..n)
            .map(|j| {
                let mut rng = RngKey::transit(self.cfg.seed, sample.id, self.step, j).stream();
                self.app.step_transits(self.step, sample, j, &mut rng)
            })
            .collect();
        if self.cfg.check_transits {
            self.verify_transits(sample, &transits)?;
        }
        Ok(transits)
    }

    fn verify_transits(&self, sample: &Sample, transits: &[VertexId]) -> Result<(), SamplingError> {
        let violation = |t: VertexId| SamplingError::TransitNotInSample {
            sample: sample.id,
            step: self.step,
            transit: t,
        };
        if transits.len() <= 8 {
            for &t in transits {
                if !sample.contains(t) {
                    return Err(violation(t));
                }
            }
        } else {
            let members = sample.sorted_members();
            for &t in transits {
                if members.binary_search(&t).is_err() {
                    return Err(violation(t));
                }
            }
        }
        Ok(())
    }

    /// One `next` invocation with its keyed stream; returns the slot value.
    #[allow(clippy::too_many_arguments)]
    pub fn invoke_next(
        &self,
        sample: &Sample,
        transits: &[VertexId],
        transit_idx: usize,
        slot: usize,
        src_edges: EdgeView<'_>,
        edges: &mut Vec<(VertexId, VertexId)>,
    ) -> Result<VertexId, SamplingError> {
        let mut rng = RngKey::slot(self.cfg.seed, sample.id, self.step, transit_idx, slot).stream();
        let query = NextQuery {
            graph: self.graph,
            sample,
            step: self.step,
            transits,
            transit_idx,
            slot,
            src_edges,
        };
        let drawn = self
            .app
            .next(&query, &mut rng, &mut EdgeSink::new(edges))
            .map_err(|e| e.in_context(sample.id, self.step, transit_idx))?;
        match drawn {
            None => Ok(VertexId::NULL),
            Some(v) if self.graph.contains_vertex(v) => Ok(v),
            Some(v) => Err(SamplingError::InvalidVertex {
                sample: sample.id,
                step: self.step,
                transit_idx,
                vertex: v,
            }),
        }
    }

    /// Appends a finished step to `sample` and runs the post-step hooks:
    /// the app's `finish_step`, then unique-neighbour elimination and the
    /// sample-parallel fallback check when `unique(step)` holds.
    pub fn complete(
        &self,
        sample: &mut Sample,
        transits: &[VertexId],
        slots: &[VertexId],
        edges: &[(VertexId, VertexId)],
    ) {
        sample.push_step(slots, edges);
        self.app.finish_step(sample, self.step, transits);
        if self.app.unique(self.step) {
            dedup_step(sample, self.step);
            sample.fallback = fallback_check(sample, self.step, self.app.sample_size(self.step));
        } else {
            sample.fallback = false;
        }
    }
}

/// Sample-parallel work for one sample at one step (also the TP fallback path).
pub(crate) struct SampleStepOutcome {
    pub next_calls: u64,
    pub fetches: u64,
}

pub(crate) fn sample_parallel_one(
    env: &StepEnv<'_>,
    sample: &mut Sample,
) -> Result<SampleStepOutcome, SamplingError> {
    use crate::app::SamplingType;

    let transits = env.transits_of(sample)?;
    let m = env.app.sample_size(env.step);
    let mut edges = Vec::new();
    let (slots, fetches) = match env.app.sampling_type() {
        SamplingType::Individual => {
            let mut slots: Transits = smallvec::smallvec![VertexId::NULL; transits.len() * m];
            for (j, &t) in transits.iter().enumerate() {
                let view: EdgeView<'_> = env.graph.neighbors(t).into();
                for slot in 0..m {
                    slots[j * m + slot] =
                        env.invoke_next(sample, &transits[j..=j], j, slot, view, &mut edges)?;
                }
            }
            (slots, transits.len() as u64)
        }
        SamplingType::Collective => {
            let combined = collective::combine_sample_parallel(env.graph, sample.id, &transits);
            let slots = collective::select(env, sample, &transits, &combined, &mut edges)?;
            (Transits::from_vec(slots), transits.len() as u64)
        }
    };
    let next_calls = slots.len() as u64;
    env.complete(sample, &transits, &slots, &edges);
    Ok(SampleStepOutcome { next_calls, fetches })
}

pub(crate) fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}
