use super::{uniform_edge, KhopParams};
use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::VertexId;
use crate::rng::SlotRng;

/// k-hop neighbourhood sampler: `fanouts[i]` uniform neighbours of every
/// vertex added at the previous hop.
#[derive(Debug, Clone)]
pub struct Khop {
    params: KhopParams,
}

impl Khop {
    pub fn new(params: KhopParams) -> Self {
        Self { params }
    }
}

impl SamplingApp for Khop {
    fn name(&self) -> &'static str {
        "khop"
    }

    fn steps(&self) -> Steps {
        Steps::Fixed(self.params.fanouts.len())
    }

    fn sample_size(&self, step: usize) -> usize {
        self.params.fanouts.get(step).copied().unwrap_or(1)
    }

    fn unique(&self, _step: usize) -> bool {
        self.params.unique
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
        Ok(uniform_edge(&q.src_edges, rng).map(|i| q.src_edges.target(i)))
    }
}
