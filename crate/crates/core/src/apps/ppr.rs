use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::VertexId;
use crate::rng::SlotRng;

/// Weighted random walk that stops with a fixed probability at every step.
#[derive(Debug, Clone)]
pub struct Ppr {
    termination_probability: f64,
}

impl Ppr {
    pub fn new(termination_probability: f64) -> Self {
        Self {
            termination_probability,
        }
    }
}

impl SamplingApp for Ppr {
    fn name(&self) -> &'static str {
        "ppr"
    }

    fn steps(&self) -> Steps {
        Steps::Infinite
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
        if rng.uniform() < self.termination_probability {
            return Ok(None);
        }
        Ok(q.graph.weighted_pick(q.transits[0], rng.uniform()))
    }
}
