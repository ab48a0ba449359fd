use super::{uniform_edge, LayerParams};
use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::VertexId;
use crate::rng::SlotRng;
use crate::sample::Sample;

/// Layer sampling: `step_size` uniform picks per step from the combined
/// neighbourhood of the previous layer, until the sample holds `max_size`
/// vertices (roots included).
#[derive(Debug, Clone)]
pub struct Layer {
    params: LayerParams,
}

impl Layer {
    pub fn new(params: LayerParams) -> Self {
        Self { params }
    }
}

impl SamplingApp for Layer {
    fn name(&self) -> &'static str {
        "layer"
    }

    fn steps(&self) -> Steps {
        Steps::Infinite
    }

    fn sample_size(&self, _step: usize) -> usize {
        self.params.step_size
    }

    fn sampling_type(&self) -> SamplingType {
        SamplingType::Collective
    }

    /// A full sample has no transits, so it finishes without building a
    /// neighbourhood it could not use.
    fn transit_count(&self, sample: &Sample, step: usize) -> usize {
        if sample.steps_taken() != step || sample.vertex_count() >= self.params.max_size {
            return 0;
        }
        sample.candidate_count(step, 1)
    }

    fn next(
        &self,
        q: &NextQuery<'_>,
        rng: &mut SlotRng,
        _edges: &mut EdgeSink<'_>,
    ) -> Result<Option<VertexId>, SamplingError> {
        // Earlier slots of this step are non-NULL whenever the view is
        // non-empty, so `vertex_count + slot` is the size after this pick.
        if q.sample.vertex_count() + q.slot >= self.params.max_size {
            return Ok(None);
        }
        Ok(uniform_edge(&q.src_edges, rng).map(|i| q.src_edges.target(i)))
    }
}
