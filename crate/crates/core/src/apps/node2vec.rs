use super::Node2vecParams;
use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::{Graph, VertexId};
use crate::rng::SlotRng;

/// Rejection-sampling attempts before giving up with [`SamplingError::SamplerStall`].
pub const REJECTION_CAP: u64 = 1_000_000;

/// Which edge factors to apply relative to the previous stop `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node2vecFactors {
    /// `1/p` back to `t`, `1` to neighbours of `t`, `1/q` elsewhere.
    Canonical,
    /// `p` back to `t`, `1/q` to neighbours of `t`, `1` elsewhere.
    Prose,
}

/// Second-order random walk.
#[derive(Debug, Clone)]
pub struct Node2vec {
    walk_length: usize,
    ret: f64,
    near: f64,
    far: f64,
}

impl Node2vec {
    pub fn new(walk_length: usize, params: Node2vecParams) -> Self {
        let (ret, near, far) = match params.factors {
            Node2vecFactors::Canonical => (1.0 / params.p, 1.0, 1.0 / params.q),
            Node2vecFactors::Prose => (params.p, 1.0 / params.q, 1.0),
        };
        Self {
            walk_length,
            ret,
            near,
            far,
        }
    }

    /// Unnormalised factor of moving to `u` when the walk came from `t`.
    pub fn factor(&self, graph: &Graph, t: VertexId, u: VertexId) -> f64 {
        if u == t {
            self.ret
        } else if graph.has_edge(t, u) {
            self.near
        } else {
            self.far
        }
    }

    fn envelope_factor(&self) -> f64 {
        self.ret.max(self.near).max(self.far)
    }
}

impl SamplingApp for Node2vec {
    fn name(&self) -> &'static str {
        "node2vec"
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
        let v = q.transits[0];
        let Some(t) = q.sample.prev_vertex(q.step, 2, 0).filter(|_| q.step > 0) else {
            return Ok(q.graph.weighted_pick(v, rng.uniform()));
        };
        let edges = q.src_edges;
        if edges.is_empty() {
            return Ok(None);
        }
        let envelope = q.graph.max_edge_weight(v) as f64 * self.envelope_factor();
        if envelope <= 0.0 {
            return Ok(None);
        }
        for _ in 0..REJECTION_CAP {
            let i = rng.below(edges.len());
            let u = edges.target(i);
            let accept = edges.weight(i) as f64 * self.factor(q.graph, t, u);
            if rng.uniform() * envelope < accept {
                return Ok(Some(u));
            }
        }
        Err(SamplingError::SamplerStall {
            iterations: REJECTION_CAP,
        })
    }
}
