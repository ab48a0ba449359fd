use super::{uniform_edge, uniform_roots, MultiRwParams};
use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::{Graph, VertexId};
use crate::rng::SlotRng;
use crate::sample::Sample;

/// Multi-dimensional random walk: each step moves one uniformly chosen root
/// to a uniform neighbour, which replaces it in the root set.
///
/// The move is recorded as the edge `(transit, v)` so consumers can replay
/// the root set.
#[derive(Debug, Clone)]
pub struct MultiRw {
    params: MultiRwParams,
}

impl MultiRw {
    pub fn new(params: MultiRwParams) -> Self {
        Self { params }
    }
}

impl SamplingApp for MultiRw {
    fn name(&self) -> &'static str {
        "multirw"
    }

    fn steps(&self) -> Steps {
        Steps::Fixed(self.params.walk_length)
    }

    fn sample_size(&self, _step: usize) -> usize {
        1
    }

    fn sampling_type(&self) -> SamplingType {
        SamplingType::Individual
    }

    fn initial_roots(&self, graph: &Graph, sample_id: u64, seed: u64) -> Vec<VertexId> {
        uniform_roots(graph, sample_id, seed, self.params.roots_per_sample)
    }

    fn transit_count(&self, sample: &Sample, step: usize) -> usize {
        usize::from(sample.steps_taken() == step && !sample.roots().is_empty())
    }

    fn step_transits(
        &self,
        _step: usize,
        sample: &Sample,
        _transit_idx: usize,
        rng: &mut SlotRng,
    ) -> VertexId {
        let roots = sample.roots();
        roots[rng.below(roots.len())]
    }

    fn next(
        &self,
        q: &NextQuery<'_>,
        rng: &mut SlotRng,
        edges: &mut EdgeSink<'_>,
    ) -> Result<Option<VertexId>, SamplingError> {
        let picked = uniform_edge(&q.src_edges, rng).map(|i| q.src_edges.target(i));
        if let Some(v) = picked {
            edges.add_edge(q.transits[0], v);
        }
        Ok(picked)
    }

    fn finish_step(&self, sample: &mut Sample, step: usize, transits: &[VertexId]) {
        let Some(&v) = sample.step(step).first() else { return };
        if v.is_null() {
            return;
        }
        let roots = sample.roots_mut();
        if let Some(slot) = roots.iter_mut().find(|r| **r == transits[0]) {
            *slot = v;
        }
    }
}
