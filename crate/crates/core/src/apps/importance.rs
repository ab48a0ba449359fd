use std::str::FromStr;

use super::{uniform_edge, uniform_roots, BatchParams};
use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::{Graph, VertexId};
use crate::rng::SlotRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportanceKind {
    FastGcn,
    Ladies,
    /// One step, picks from the 1-hop neighbours of the batch.
    Mvs,
}

/// Distribution of whole-graph draws for FastGCN and LADIES.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportanceDist {
    Uniform,
    /// Probability proportional to out-degree squared.
    DegreeSquared,
}

impl FromStr for ImportanceDist {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(ImportanceDist::Uniform),
            "degree2" | "degree-squared" => Ok(ImportanceDist::DegreeSquared),
            other => Err(format!("unknown importance distribution '{other}'")),
        }
    }
}

/// Layer-wise importance samplers. Each step draws `step_size` vertices and
/// records an edge from every transit adjacent to a drawn vertex.
#[derive(Debug, Clone)]
pub struct Importance {
    kind: ImportanceKind,
    params: BatchParams,
    /// Inclusive prefix of degree squared, for `DegreeSquared`.
    prefix: Option<Vec<f64>>,
}

impl Importance {
    pub fn new(kind: ImportanceKind, params: BatchParams, graph: &Graph) -> Self {
        let prefix = (kind != ImportanceKind::Mvs && params.dist == ImportanceDist::DegreeSquared)
            .then(|| {
                let mut acc = 0.0;
                (0..graph.n_vertices())
                    .map(|v| {
                        let d = graph.degree(VertexId(v as u32)) as f64;
                        acc += d * d;
                        acc
                    })
                    .collect::<Vec<f64>>()
            })
            .filter(|p| p.last().is_some_and(|&t| t > 0.0));
        Self {
            kind,
            params,
            prefix,
        }
    }

    fn draw(&self, graph: &Graph, rng: &mut SlotRng) -> VertexId {
        match &self.prefix {
            Some(p) => {
                let target = rng.uniform() * p[p.len() - 1];
                VertexId(p.partition_point(|&x| x <= target).min(p.len() - 1) as u32)
            }
            None => VertexId(rng.below(graph.n_vertices()) as u32),
        }
    }
}

impl SamplingApp for Importance {
    fn name(&self) -> &'static str {
        match self.kind {
            ImportanceKind::FastGcn => "fastgcn",
            ImportanceKind::Ladies => "ladies",
            ImportanceKind::Mvs => "mvs",
        }
    }

    fn steps(&self) -> Steps {
        match self.kind {
            ImportanceKind::Mvs => Steps::Fixed(1),
            _ => Steps::Fixed(self.params.steps),
        }
    }

    fn sample_size(&self, _step: usize) -> usize {
        self.params.step_size
    }

    fn sampling_type(&self) -> SamplingType {
        SamplingType::Collective
    }

    fn initial_roots(&self, graph: &Graph, sample_id: u64, seed: u64) -> Vec<VertexId> {
        uniform_roots(graph, sample_id, seed, self.params.batch_size)
    }

    fn next(
        &self,
        q: &NextQuery<'_>,
        rng: &mut SlotRng,
        edges: &mut EdgeSink<'_>,
    ) -> Result<Option<VertexId>, SamplingError> {
        let v = match self.kind {
            ImportanceKind::Mvs => match uniform_edge(&q.src_edges, rng) {
                Some(i) => q.src_edges.target(i),
                None => return Ok(None),
            },
            _ => self.draw(q.graph, rng),
        };
        for &t in q.transits {
            if q.graph.has_edge(t, v) {
                edges.add_edge(t, v);
            }
        }
        Ok(Some(v))
    }
}
