use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::VertexId;
use crate::rng::SlotRng;

/// Fixed-length random walk following edges with probability proportional
/// to their weight.
#[derive(Debug, Clone)]
pub struct DeepWalk {
    walk_length: usize,
}

impl DeepWalk {
    pub fn new(walk_length: usize) -> Self {
        Self { walk_length }
    }
}

impl SamplingApp for DeepWalk {
    fn name(&self) -> &'static str {
        "deepwalk"
    }

    fn steps(&self) -> Steps {
        Steps::Fixed(self.walk_length)
    }

    fn sample_size(&self, _step: usize) -> usize {
        1
    }

    fn sampling_type(&self) -> SamplingType {
        SamplingType::Individual
    }

    fn next(
        &self,
        q: &NextQuery<'_>,
        rng: &mut SlotRng,
        _edges: &mut EdgeSink<'_>,
    ) -> Result<Option<VertexId>, SamplingError> {
        Ok(q.graph.weighted_pick(q.transits[0], rng.uniform()))
    }
}
