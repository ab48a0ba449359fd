//! Combined neighbourhoods for collective applications.
//!
//! Phase one of a collective step concatenates the adjacency lists of all of
//! a sample's transits, in transit order. The transit-parallel builder reads
//! each distinct transit's adjacency once and copies it into every member
//! sample's buffer; the sample-parallel builder reads it once per (sample,
//! transit). Phase two (`select`) is always per sample.

use rayon::prelude::*;

use super::transit_parallel::{self, TransitSchedule};
use super::{Transits, alive_mask, EngineConfig, Paradigm, StepEnv};
use crate::app::{EdgeView, SamplingApp, SamplingType};
use crate::error::SamplingError;
use crate::graph::{Graph, Neighbors, VertexId};
use crate::sample::Sample;

/// Concatenated adjacency of one sample's transits.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CombinedNeighborhood {
    pub sample_id: u64,
    sources: Vec<VertexId>,
    targets: Vec<VertexId>,
    weights: Option<Vec<f32>>,
}

impl CombinedNeighborhood {
    fn with_capacity(sample_id: u64, n: usize, weighted: bool) -> Self {
        Self {
            sample_id,
            sources: Vec::with_capacity(n),
            targets: Vec::with_capacity(n),
            weights: weighted.then(|| Vec::with_capacity(n)),
        }
    }

    fn append(&mut self, nb: &Neighbors<'_>) {
        self.sources.extend(std::iter::repeat_n(nb.vertex, nb.len()));
        self.targets.extend_from_slice(nb.targets());
        if let (Some(dst), Some(src)) = (self.weights.as_mut(), nb.weights()) {
            dst.extend_from_slice(src);
        }
    }

    /// Concatenated adjacency of `transits`, in order.
    pub fn from_transits(graph: &Graph, sample_id: u64, transits: &[VertexId]) -> Self {
        combine_sample_parallel(graph, sample_id, transits)
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// `(source_transit, neighbor, weight)` entries in order.
    pub fn entries(&self) -> impl Iterator<Item = (VertexId, VertexId, f32)> + '_ {
        self.targets.iter().enumerate().map(move |(i, &t)| {
            (
                self.sources[i],
                t,
                self.weights.as_ref().map_or(1.0, |w| w[i]),
            )
        })
    }

    pub fn view(&self) -> EdgeView<'_> {
        EdgeView::new(&self.targets, self.weights.as_deref(), Some(&self.sources))
    }
}

pub(crate) fn combine_sample_parallel(
    graph: &Graph,
    sample_id: u64,
    transits: &[VertexId],
) -> CombinedNeighborhood {
    let total = transits.iter().map(|&t| graph.degree(t)).sum();
    let mut out = CombinedNeighborhood::with_capacity(sample_id, total, graph.is_weighted());
    for &t in transits {
        out.append(&graph.neighbors(t));
    }
    out
}

/// Builds every sample's combined neighbourhood from a transit schedule.
/// Returns one entry per sample position plus the number of adjacency reads.
pub(crate) fn combine_transit_parallel(
    graph: &Graph,
    samples: &[Sample],
    sample_transits: &[Transits],
    schedule: &TransitSchedule,
) -> (Vec<CombinedNeighborhood>, u64) {
    let groups = schedule.groups();
    let views: Vec<Neighbors<'_>> = groups.par_iter().map(|g| graph.neighbors(g.transit)).collect();

    let mut group_of: Vec<Vec<u32>> = sample_transits.iter().map(|t| vec![0; t.len()]).collect();
    for (gi, g) in groups.iter().enumerate() {
        for m in &g.members {
            group_of[m.sample as usize][m.transit_idx as usize] = gi as u32;
        }
    }

    let weighted = graph.is_weighted();
    let combined = samples
        .par_iter()
        .zip(group_of.par_iter())
        .map(|(sample, slots)| {
            let total = slots.iter().map(|&g| views[g as usize].len()).sum();
            let mut out = CombinedNeighborhood::with_capacity(sample.id, total, weighted);
            for &g in slots {
                out.append(&views[g as usize]);
            }
            out
        })
        .collect();
    (combined, groups.len() as u64)
}

/// Phase two: `sample_size(step)` calls of `next` over the combined entries.
pub(crate) fn select(
    env: &StepEnv<'_>,
    sample: &Sample,
    transits: &[VertexId],
    combined: &CombinedNeighborhood,
    edges: &mut Vec<(VertexId, VertexId)>,
) -> Result<Vec<VertexId>, SamplingError> {
    let m = env.app.sample_size(env.step);
    let view = combined.view();
    (0..m)
        .map(|slot| env.invoke_next(sample, transits, 0, slot, view, edges))
        .collect()
}

/// Combined neighbourhood of every live sample at `step` (`None` for
/// finished samples).
pub fn build_combined(
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: &[Sample],
    step: usize,
    paradigm: Paradigm,
    cfg: &EngineConfig,
) -> Result<Vec<Option<CombinedNeighborhood>>, SamplingError> {
    if app.sampling_type() != SamplingType::Collective {
        return Err(SamplingError::Config(format!(
            "{} is not a collective application",
            app.name()
        )));
    }
    let alive = alive_mask(app, samples, step);
    let env = StepEnv { app, graph, step, cfg };
    match paradigm {
        Paradigm::SampleParallel => samples
            .par_iter()
            .zip(alive.par_iter())
            .map(|(s, &a)| {
                if !a {
                    return Ok(None);
                }
                let transits = env.transits_of(s)?;
                Ok(Some(combine_sample_parallel(graph, s.id, &transits)))
            })
            .collect(),
        Paradigm::TransitParallel => {
            let map = transit_parallel::build_map_masked(&env, samples, &alive)?;
            let schedule = transit_parallel::partition_collective(map.groups, graph);
            let (combined, _) =
                combine_transit_parallel(graph, samples, &map.sample_transits, &schedule);
            Ok(combined
                .into_iter()
                .zip(alive)
                .map(|(c, a)| a.then_some(c))
                .collect())
        }
    }
}

/// Runs phase two for every sample with a neighbourhood and appends the step.
pub fn collective_select(
    app: &dyn SamplingApp,
    graph: &Graph,
    samples: &mut [Sample],
    neighborhoods: &[Option<CombinedNeighborhood>],
    step: usize,
    cfg: &EngineConfig,
) -> Result<(), SamplingError> {
    let env = StepEnv { app, graph, step, cfg };
    samples
        .par_iter_mut()
        .zip(neighborhoods.par_iter())
        .try_for_each(|(sample, nbhd)| {
            let Some(nbhd) = nbhd else { return Ok(()) };
            let transits = env.transits_of(sample)?;
            let mut edges = Vec::new();
            let slots = select(&env, sample, &transits, nbhd, &mut edges)?;
            env.complete(sample, &transits, &slots, &edges);
            Ok(())
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concatenates_in_transit_order() {
        // a = 0 (degree 2), b = 1 (degree 3)
        let g = Graph::from_edges(6, &[(0, 2), (0, 3), (1, 3), (1, 4), (1, 5)]);
        let c = combine_sample_parallel(&g, 0, &[VertexId(0), VertexId(1)]);
        assert_eq!(c.len(), 5);
        let e: Vec<_> = c.entries().map(|(s, t, _)| (s.0, t.0)).collect();
        assert_eq!(e, vec![(0, 2), (0, 3), (1, 3), (1, 4), (1, 5)]);
    }

    #[test]
    fn zero_degree_transits_give_empty_neighbourhood() {
        let g = Graph::from_edges(3, &[(0, 1)]);
        let c = combine_sample_parallel(&g, 0, &[VertexId(1), VertexId(2)]);
        assert!(c.is_empty());
    }
}
