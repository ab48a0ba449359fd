use std::collections::BTreeSet;

use super::ClusterParams;
use crate::app::{EdgeSink, NextQuery, SamplingApp, SamplingType, Steps};
use crate::error::SamplingError;
use crate::graph::{Graph, VertexId};
use crate::rng::{RngKey, SlotRng, GRAPH_STEP};

/// ClusterGCN: every sample is the union of randomly chosen vertex clusters
/// and records the graph edges with both endpoints inside it.
#[derive(Debug, Clone)]
pub struct ClusterGcn {
    per_sample: usize,
    /// Members of every cluster, ascending.
    clusters: Vec<Vec<VertexId>>,
}

impl ClusterGcn {
    pub fn new(params: ClusterParams, graph: &Graph, seed: u64) -> Self {
        let n = graph.n_vertices();
        let k = params
            .num_clusters
            .unwrap_or_else(|| params.clusters_per_sample.max(n / 50))
            .max(1);
        let mut clusters = vec![Vec::new(); k];
        for v in 0..n {
            let c = RngKey::new(seed, v as u64, GRAPH_STEP, 1, 0).stream().below(k);
            clusters[c].push(VertexId(v as u32));
        }
        Self {
            per_sample: params.clusters_per_sample,
            clusters,
        }
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn cluster_of(&self, v: VertexId) -> usize {
        self.clusters
            .iter()
            .position(|c| c.binary_search(&v).is_ok())
            .expect("every vertex has a cluster")
    }

    /// Distinct cluster ids of one sample (Floyd's subset sampling).
    pub fn chosen_clusters(&self, rng: &mut SlotRng) -> Vec<usize> {
        let n = self.clusters.len();
        let k = self.per_sample.min(n);
        let mut chosen = BTreeSet::new();
        for j in n - k..n {
            let t = rng.below(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }
}

impl SamplingApp for ClusterGcn {
    fn name(&self) -> &'static str {
        "clustergcn"
    }

    fn steps(&self) -> Steps {
        Steps::Fixed(1)
    }

    fn sample_size(&self, _step: usize) -> usize {
        1
    }

    fn sampling_type(&self) -> SamplingType {
        SamplingType::Collective
    }

    fn initial_roots(&self, _graph: &Graph, sample_id: u64, seed: u64) -> Vec<VertexId> {
        let mut rng = RngKey::init(seed, sample_id).stream();
        let mut roots: Vec<VertexId> = self
            .chosen_clusters(&mut rng)
            .into_iter()
            .flat_map(|c| self.clusters[c].iter().copied())
            .collect();
        roots.sort_unstable();
        roots
    }

    /// Records every combined-neighbourhood edge that lands on another
    /// transit; adds no vertices.
    fn next(
        &self,
        q: &NextQuery<'_>,
        _rng: &mut SlotRng,
        edges: &mut EdgeSink<'_>,
    ) -> Result<Option<VertexId>, SamplingError> {
        if q.slot == 0 {
            let view = q.src_edges;
            for i in 0..view.len() {
                let u = view.target(i);
                if q.transits.binary_search(&u).is_ok() {
                    edges.add_edge(view.source(i), u);
                }
            }
        }
        Ok(None)
    }
}
