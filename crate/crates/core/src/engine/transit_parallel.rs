//! Transit-parallel engine.
//!
//! Each step:
//!
//! 1. evaluate `stepTransits` for every live sample and group the resulting
//!    `(transit, sample, transit_idx)` triples by transit with a sort;
//! 2. split the groups into three work classes by the number of `next`
//!    calls they need and give each group its rank inside its class
//!    (the scheduling index);
//! 3. execute every group with its transit's adjacency read once and shared
//!    by all members. Members are walked in sub-groups of
//!    `SUBGROUP_WIDTH / m` samples whose slots are written contiguously, and
//!    large groups are split across workers by member range.
//!
//! Steps 1-2 are timed separately as the scheduling-index build.

use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;

use super::collective::{self, combine_transit_parallel};
use super::{Transits, alive_mask, run, sample_parallel_one, EngineConfig, EngineRun, Paradigm, StepEnv, StepRecord};
use crate::app::{EdgeView, SamplingApp, SamplingType};
use crate::error::SamplingError;
use crate::graph::{Graph, VertexId};
use crate::sample::Sample;

/// Groups with fewer `next` calls than this are small.
pub const SMALL_THRESHOLD: usize = 32;
/// Groups with more `next` calls than this are large.
pub const LARGE_THRESHOLD: usize = 1024;
/// Slots per sub-group; a sub-group holds `SUBGROUP_WIDTH / m` samples.
pub const SUBGROUP_WIDTH: usize = 32;

/// `(sample position, transit index)` of one group member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Member {
    pub sample: u32,
    pub transit_idx: u32,
}

/// All (sample, transit index) pairs sharing one transit at a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitGroup {
    pub transit: VertexId,
    /// Ascending by (sample position, transit index).
    pub members: Vec<Member>,
    /// `next` calls needed by the group; set by the partition.
    pub work: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkClass {
    /// work < 32: several transits share one sub-group-sized unit.
    Small,
    /// 32 <= work <= 1024: one transit per worker task.
    Medium,
    /// work > 1024: one transit split over several worker tasks.
    Large,
}

impl WorkClass {
    pub const ALL: [WorkClass; 3] = [WorkClass::Small, WorkClass::Medium, WorkClass::Large];

    pub fn of(work: usize) -> Self {
        if work < SMALL_THRESHOLD {
            WorkClass::Small
        } else if work <= LARGE_THRESHOLD {
            WorkClass::Medium
        } else {
            WorkClass::Large
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

/// Output of [`build_transit_map`].
#[derive(Debug, Clone)]
pub struct TransitMap {
    pub step: usize,
    /// Sorted by transit id.
    pub groups: Vec<TransitGroup>,
    /// Transits of every sample position (empty for samples not scheduled).
    pub sample_transits: Vec<Transits>,
}

impl TransitMap {
    /// Members in group order, flattened.
    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, Member)> + '_ {
        self.groups
            .iter()
            .flat_map(|g| g.members.iter().map(move |&m| (g.transit, m)))
    }
}

/// Transit groups partitioned into work classes.
#[derive(Debug, Clone)]
pub struct TransitSchedule {
    sample_size: usize,
    groups: Vec<TransitGroup>,
    class_of: Vec<WorkClass>,
    scheduling_index: Vec<usize>,
    classes: [Vec<usize>; 3],
}

impl TransitSchedule {
    pub fn groups(&self) -> &[TransitGroup] {
        &self.groups
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    /// Indices (into [`TransitSchedule::groups`]) of the groups in `class`,
    /// ordered by scheduling index.
    pub fn class(&self, class: WorkClass) -> &[usize] {
        &self.classes[class.slot()]
    }

    pub fn class_of(&self, group: usize) -> WorkClass {
        self.class_of[group]
    }

    /// Dense rank of `group` inside its class.
    pub fn scheduling_index(&self, group: usize) -> usize {
        self.scheduling_index[group]
    }

    pub fn total_work(&self) -> usize {
        self.groups.iter().map(|g| g.work).sum()
    }
}

/// Groups every live sample's transits at `step` by transit vertex.
pub fn build_transit_map(
    app: &dyn SamplingApp,
    samples: &[Sample],
    graph: &Graph,
    step: usize,
    cfg: &EngineConfig,
) -> Result<TransitMap, SamplingError> {
    let alive = alive_mask(app, samples, step);
    let env = StepEnv { app, graph, step, cfg };
    build_map_masked(&env, samples, &alive)
}

pub(crate) fn build_map_masked(
    env: &StepEnv<'_>,
    samples: &[Sample],
    mask: &[bool],
) -> Result<TransitMap, SamplingError> {
    let sample_transits = samples
        .par_iter()
        .zip(mask.par_iter())
        .map(|(s, &on)| if on { env.transits_of(s) } else { Ok(Transits::new()) })
        .collect::<Result<Vec<_>, _>>()?;

    let mut pairs: Vec<(VertexId, Member)> = sample_transits
        .iter()
        .enumerate()
        .flat_map(|(s, ts)| {
            ts.iter().enumerate().map(move |(j, &t)| {
                (
                    t,
                    Member {
                        sample: s as u32,
                        transit_idx: j as u32,
                    },
                )
            })
        })
        .collect();
    pairs.par_sort_unstable();

    let mut groups: Vec<TransitGroup> = Vec::new();
    for (t, m) in pairs {
        match groups.last_mut() {
            Some(g) if g.transit == t => g.members.push(m),
            _ => groups.push(TransitGroup {
                transit: t,
                members: vec![m],
                work: 0,
            }),
        }
    }
    Ok(TransitMap {
        step: env.step,
        groups,
        sample_transits,
    })
}

/// Places each group in its work class by `work = members * m`.
pub fn partition_work_classes(groups: Vec<TransitGroup>, sample_size: usize) -> TransitSchedule {
    let m = sample_size.max(1);
    partition_by(groups, m, |g| g.members.len() * m)
}

/// Partition for building combined neighbourhoods, where a member costs one
/// copy per neighbour of the transit.
pub(crate) fn partition_collective(groups: Vec<TransitGroup>, graph: &Graph) -> TransitSchedule {
    partition_by(groups, 1, |g| g.members.len() * graph.degree(g.transit).max(1))
}

fn partition_by(
    mut groups: Vec<TransitGroup>,
    sample_size: usize,
    work: impl Fn(&TransitGroup) -> usize,
) -> TransitSchedule {
    let mut classes: [Vec<usize>; 3] = Default::default();
    let mut class_of = Vec::with_capacity(groups.len());
    let mut scheduling_index = Vec::with_capacity(groups.len());
    for (i, g) in groups.iter_mut().enumerate() {
        g.work = work(g);
        let c = WorkClass::of(g.work);
        scheduling_index.push(classes[c.slot()].len());
        classes[c.slot()].push(i);
        class_of.push(c);
    }
    TransitSchedule {
        sample_size,
        groups,
        class_of,
        scheduling_index,
        classes,
    }
}

/// Slots produced by one task: members `range` of group `group`, `m` slots each.
#[derive(Debug, Clone)]
pub struct TaskOutput {
    pub group: usize,
    pub range: Range<usize>,
    pub slots: Vec<VertexId>,
    pub edges: Vec<(Member, Vec<(VertexId, VertexId)>)>,
}

/// Output of [`tp_execute_class`].
#[derive(Debug, Clone, Default)]
pub struct ClassOutput {
    pub tasks: Vec<TaskOutput>,
    pub adjacency_fetches: u64,
    pub next_calls: u64,
}

fn members_per_subgroup(m: usize) -> usize {
    if m <= SUBGROUP_WIDTH {
        SUBGROUP_WIDTH / m.max(1)
    } else {
        1
    }
}

/// Executes every group of one work class for an individual application.
pub fn tp_execute_class(
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: &[Sample],
    schedule: &TransitSchedule,
    class: WorkClass,
    step: usize,
    cfg: &EngineConfig,
) -> Result<ClassOutput, SamplingError> {
    let env = StepEnv { app, graph, step, cfg };
    execute_class(&env, samples, schedule, class)
}

fn execute_class(
    env: &StepEnv<'_>,
    samples: &[Sample],
    schedule: &TransitSchedule,
    class: WorkClass,
) -> Result<ClassOutput, SamplingError> {
    let m = schedule.sample_size;
    let ids = schedule.class(class);
    // One adjacency read per group, shared by every task of the group.
    let views: Vec<EdgeView<'_>> = ids
        .iter()
        .map(|&g| env.graph.neighbors(schedule.groups[g].transit).into())
        .collect();

    let mut tasks: Vec<(usize, usize, Range<usize>)> = Vec::new();
    for (k, &g) in ids.iter().enumerate() {
        let n = schedule.groups[g].members.len();
        if class == WorkClass::Large {
            let span = (LARGE_THRESHOLD / m).max(1);
            let mut start = 0;
            while start < n {
                let end = (start + span).min(n);
                tasks.push((k, g, start..end));
                start = end;
            }
        } else {
            tasks.push((k, g, 0..n));
        }
    }

    let per_subgroup = members_per_subgroup(m);
    let outputs = tasks
        .into_par_iter()
        .map(|(k, g, range)| {
            let group = &schedule.groups[g];
            let view = views[k];
            let transit = [group.transit];
            let members = &group.members[range.clone()];
            let mut slots = Vec::with_capacity(members.len() * m);
            let mut edges = Vec::new();
            for batch in members.chunks(per_subgroup) {
                for member in batch {
                    let sample = &samples[member.sample as usize];
                    let mut recorded = Vec::new();
                    for slot in 0..m {
                        slots.push(env.invoke_next(
                            sample,
                            &transit,
                            member.transit_idx as usize,
                            slot,
                            view,
                            &mut recorded,
                        )?);
                    }
                    if !recorded.is_empty() {
                        edges.push((*member, recorded));
                    }
                }
            }
            Ok(TaskOutput {
                group: g,
                range,
                slots,
                edges,
            })
        })
        .collect::<Result<Vec<_>, SamplingError>>()?;

    let next_calls = outputs.iter().map(|t| t.slots.len() as u64).sum();
    Ok(ClassOutput {
        tasks: outputs,
        adjacency_fetches: ids.len() as u64,
        next_calls,
    })
}

/// Runs `app` on `samples` until every sample is finished.
pub fn tp_run(
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: Vec<Sample>,
    cfg: &EngineConfig,
) -> Result<EngineRun, SamplingError> {
    run(Paradigm::TransitParallel, app, graph, samples, cfg)
}

/// Advances every live sample by one step.
pub fn tp_step(
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
    let start = Instant::now();

    // Samples flagged after unique-neighbour elimination take the
    // sample-parallel path this step.
    let tp_mask: Vec<bool> = samples
        .iter()
        .zip(alive)
        .map(|(s, &a)| a && !s.fallback)
        .collect();
    let fallback_mask: Vec<bool> = samples
        .iter()
        .zip(alive)
        .map(|(s, &a)| a && s.fallback)
        .collect();

    let map = build_map_masked(&env, samples, &tp_mask)?;
    let TransitMap {
        groups,
        sample_transits,
        ..
    } = map;

    let mut record = StepRecord {
        step,
        alive: alive.iter().filter(|&&a| a).count(),
        fallback_samples: fallback_mask.iter().filter(|&&f| f).count(),
        ..Default::default()
    };

    match app.sampling_type() {
        SamplingType::Individual => {
            let m = app.sample_size(step);
            let schedule = partition_work_classes(groups, m);
            record.build = start.elapsed();
            let sampling = Instant::now();
            count_classes(&mut record, &schedule);

            let mut offsets = Vec::with_capacity(samples.len() + 1);
            offsets.push(0);
            for t in &sample_transits {
                offsets.push(offsets.last().unwrap() + t.len() * m);
            }
            let mut slots = vec![VertexId::NULL; *offsets.last().unwrap()];
            let mut edge_parts: Vec<(Member, Vec<(VertexId, VertexId)>)> = Vec::new();
            for class in WorkClass::ALL {
                let out = execute_class(&env, samples, &schedule, class)?;
                record.adjacency_fetches += out.adjacency_fetches;
                record.next_calls += out.next_calls;
                for task in out.tasks {
                    let group = &schedule.groups[task.group];
                    for (k, member) in group.members[task.range].iter().enumerate() {
                        let at = offsets[member.sample as usize] + member.transit_idx as usize * m;
                        slots[at..at + m]
                            .copy_from_slice(&task.slots[k * m..(k + 1) * m]);
                    }
                    edge_parts.extend(task.edges);
                }
            }
            edge_parts.sort_by_key(|(member, _)| *member);
            let mut edges: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); samples.len()];
            for (member, e) in edge_parts {
                edges[member.sample as usize].extend(e);
            }

            samples
                .par_iter_mut()
                .zip(tp_mask.par_iter())
                .zip(offsets.par_windows(2).zip(edges.par_iter()))
                .zip(sample_transits.par_iter())
                .for_each(|(((sample, &on), (range, edges)), transits)| {
                    if on {
                        env.complete(sample, transits, &slots[range[0]..range[1]], edges);
                    }
                });
            record.sample = sampling.elapsed();
        }
        SamplingType::Collective => {
            let schedule = partition_collective(groups, graph);
            record.build = start.elapsed();
            let sampling = Instant::now();
            count_classes(&mut record, &schedule);

            let (combined, fetches) =
                combine_transit_parallel(graph, samples, &sample_transits, &schedule);
            record.adjacency_fetches += fetches;
            let calls = samples
                .par_iter_mut()
                .zip(tp_mask.par_iter())
                .zip(combined.par_iter().zip(sample_transits.par_iter()))
                .map(|((sample, &on), (nbhd, transits))| {
                    if !on {
                        return Ok(0u64);
                    }
                    let mut edges = Vec::new();
                    let slots = collective::select(&env, sample, transits, nbhd, &mut edges)?;
                    let n = slots.len() as u64;
                    env.complete(sample, transits, &slots, &edges);
                    Ok(n)
                })
                .collect::<Result<Vec<_>, SamplingError>>()?;
            record.next_calls += calls.iter().sum::<u64>();
            record.sample = sampling.elapsed();
        }
    }

    if record.fallback_samples > 0 {
        let sampling = Instant::now();
        let counts = samples
            .par_iter_mut()
            .zip(fallback_mask.par_iter())
            .filter(|(_, &f)| f)
            .map(|(sample, _)| sample_parallel_one(&env, sample).map(|o| (o.next_calls, o.fetches)))
            .collect::<Result<Vec<_>, SamplingError>>()?;
        record.next_calls += counts.iter().map(|c| c.0).sum::<u64>();
        record.adjacency_fetches += counts.iter().map(|c| c.1).sum::<u64>();
        record.sample += sampling.elapsed();
    }
    Ok(record)
}

fn count_classes(record: &mut StepRecord, schedule: &TransitSchedule) {
    record.small_groups = schedule.class(WorkClass::Small).len();
    record.medium_groups = schedule.class(WorkClass::Medium).len();
    record.large_groups = schedule.class(WorkClass::Large).len();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(transit: u32, n: usize) -> TransitGroup {
        TransitGroup {
            transit: VertexId(transit),
            members: (0..n as u32)
                .map(|s| Member {
                    sample: s,
                    transit_idx: 0,
                })
                .collect(),
            work: 0,
        }
    }

    #[test]
    fn class_thresholds() {
        let s = partition_work_classes(vec![group(0, 3), group(1, 4), group(2, 110)], 10);
        assert_eq!(s.class_of(0), WorkClass::Small); // 30
        assert_eq!(s.class_of(1), WorkClass::Medium); // 40
        assert_eq!(s.class_of(2), WorkClass::Large); // 1100
        assert_eq!(s.groups()[2].work, 1100);
    }

    #[test]
    fn boundaries() {
        assert_eq!(WorkClass::of(31), WorkClass::Small);
        assert_eq!(WorkClass::of(32), WorkClass::Medium);
        assert_eq!(WorkClass::of(1024), WorkClass::Medium);
        assert_eq!(WorkClass::of(1025), WorkClass::Large);
    }

    #[test]
    fn scheduling_index_is_rank_within_class() {
        let s = partition_work_classes(
            vec![group(0, 1), group(1, 40), group(2, 2), group(3, 50), group(4, 1)],
            1,
        );
        assert_eq!(s.class(WorkClass::Small), &[0, 2, 4]);
        assert_eq!(s.class(WorkClass::Medium), &[1, 3]);
        assert_eq!(
            (0..5).map(|g| s.scheduling_index(g)).collect::<Vec<_>>(),
            vec![0, 0, 1, 1, 2]
        );
    }

    #[test]
    fn subgroup_sizes() {
        assert_eq!(members_per_subgroup(1), 32);
        assert_eq!(members_per_subgroup(10), 3);
        assert_eq!(members_per_subgroup(25), 1);
        assert_eq!(members_per_subgroup(64), 1);
    }
}
