//! Immutable CSR graph.
//!
//! Adjacency segments are sorted by target id (parallel edges and self-loops
//! are kept), which lets [`Graph::has_edge`] binary-search a vertex's
//! neighbourhood. Per-vertex maximum edge weight and segmented inclusive
//! prefix sums of edge weights are computed once at construction.

mod binary;
pub mod generators;
mod load;

use std::fmt;

pub use binary::{read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION};
pub use load::{load_edge_list, open_graph, parse_edge_list, LoadOptions};

/// Dense vertex index in `[0, n_vertices)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    /// "Add nothing" result of `next`. Never a valid vertex.
    pub const NULL: VertexId = VertexId(u32::MAX);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_null(self) -> bool {
        self == Self::NULL
    }

    /// `None` for the sentinel.
    #[inline]
    pub fn get(self) -> Option<VertexId> {
        if self.is_null() {
            None
        } else {
            Some(self)
        }
    }
}

impl From<Option<VertexId>> for VertexId {
    fn from(v: Option<VertexId>) -> Self {
        v.unwrap_or(VertexId::NULL)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_null() {
            f.write_str("NULL")
        } else {
            write!(f, "v{}", self.0)
        }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Zero-copy view of one vertex's CSR segment.
#[derive(Clone, Copy, Debug)]
pub struct Neighbors<'g> {
    pub vertex: VertexId,
    targets: &'g [VertexId],
    weights: Option<&'g [f32]>,
    prefix: Option<&'g [f64]>,
}

impl<'g> Neighbors<'g> {
    #[inline]
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    #[inline]
    pub fn targets(&self) -> &'g [VertexId] {
        self.targets
    }

    #[inline]
    pub fn weights(&self) -> Option<&'g [f32]> {
        self.weights
    }

    /// Weight of the `i`-th edge; 1.0 on unweighted graphs.
    #[inline]
    pub fn weight(&self, i: usize) -> f32 {
        self.weights.map_or(1.0, |w| w[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f32)> + 'g {
        let weights = self.weights;
        self.targets
            .iter()
            .enumerate()
            .map(move |(i, &t)| (t, weights.map_or(1.0, |w| w[i])))
    }

    /// Sum of edge weights (the last prefix entry).
    pub fn total_weight(&self) -> f64 {
        match self.prefix {
            Some(p) => p.last().copied().unwrap_or(0.0),
            None => self.targets.len() as f64,
        }
    }

    /// Binary search over the sorted segment.
    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.targets.binary_search(&v).is_ok()
    }

    /// Edge index whose prefix interval contains `r * total_weight`.
    pub fn pick_index(&self, r: f64) -> Option<usize> {
        let deg = self.targets.len();
        if deg == 0 {
            return None;
        }
        let idx = match self.prefix {
            Some(prefix) => {
                let target = r * prefix[deg - 1];
                prefix.partition_point(|&p| p <= target)
            }
            None => (r * deg as f64) as usize,
        };
        Some(idx.min(deg - 1))
    }
}

/// Weighted directed graph in compressed sparse row form.
#[derive(Clone, PartialEq)]
pub struct Graph {
    row_offsets: Vec<usize>,
    col_indices: Vec<VertexId>,
    weights: Option<Vec<f32>>,
    max_weight: Vec<f32>,
    weight_prefix: Option<Vec<f64>>,
    remap: Option<Vec<u64>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n_vertices", &self.n_vertices())
            .field("n_edges", &self.n_edges())
            .field("weighted", &self.is_weighted())
            .finish()
    }
}

impl Graph {
    /// Builds an unweighted graph from `(src, dst)` pairs over `n_vertices` dense ids.
    pub fn from_edges(n_vertices: usize, edges: &[(u32, u32)]) -> Self {
        let (src, dst): (Vec<u32>, Vec<u32>) = edges.iter().copied().unzip();
        Self::build(n_vertices, &src, &dst, None)
    }

    /// Builds a weighted graph from `(src, dst, weight)` triples.
    pub fn from_weighted_edges(n_vertices: usize, edges: &[(u32, u32, f32)]) -> Self {
        let src: Vec<u32> = edges.iter().map(|e| e.0).collect();
        let dst: Vec<u32> = edges.iter().map(|e| e.1).collect();
        let w: Vec<f32> = edges.iter().map(|e| e.2).collect();
        Self::build(n_vertices, &src, &dst, Some(&w))
    }

    pub(crate) fn build(
        n_vertices: usize,
        src: &[u32],
        dst: &[u32],
        weights: Option<&[f32]>,
    ) -> Self {
        assert_eq!(src.len(), dst.len());
        let n_edges = src.len();
        let mut row_offsets = vec![0usize; n_vertices + 1];
        for &s in src {
            assert!((s as usize) < n_vertices, "source {s} out of range");
            row_offsets[s as usize + 1] += 1;
        }
        for i in 0..n_vertices {
            row_offsets[i + 1] += row_offsets[i];
        }

        // Counting sort by source keeps input order inside each segment.
        let mut cursor = row_offsets.clone();
        let mut order = vec![0usize; n_edges];
        for (e, &s) in src.iter().enumerate() {
            order[cursor[s as usize]] = e;
            cursor[s as usize] += 1;
        }
        for v in 0..n_vertices {
            order[row_offsets[v]..row_offsets[v + 1]].sort_by_key(|&e| dst[e]);
        }

        let col_indices: Vec<VertexId> = order
            .iter()
            .map(|&e| {
                assert!((dst[e] as usize) < n_vertices, "target {} out of range", dst[e]);
                VertexId(dst[e])
            })
            .collect();
        let weights: Option<Vec<f32>> = weights.map(|w| order.iter().map(|&e| w[e]).collect());

        let mut max_weight = vec![0f32; n_vertices];
        let mut weight_prefix = weights.as_ref().map(|_| vec![0f64; n_edges]);
        for v in 0..n_vertices {
            let seg = row_offsets[v]..row_offsets[v + 1];
            match (&weights, &mut weight_prefix) {
                (Some(w), Some(prefix)) => {
                    let mut acc = 0f64;
                    let mut max = 0f32;
                    for i in seg {
                        acc += w[i] as f64;
                        prefix[i] = acc;
                        max = max.max(w[i]);
                    }
                    max_weight[v] = max;
                }
                _ => {
                    if !seg.is_empty() {
                        max_weight[v] = 1.0;
                    }
                }
            }
        }

        Graph {
            row_offsets,
            col_indices,
            weights,
            max_weight,
            weight_prefix,
            remap: None,
        }
    }

    pub(crate) fn with_remap(mut self, remap: Vec<u64>) -> Self {
        debug_assert_eq!(remap.len(), self.n_vertices());
        self.remap = Some(remap);
        self
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.row_offsets.len() - 1
    }

    #[inline]
    pub fn n_edges(&self) -> usize {
        self.col_indices.len()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    #[inline]
    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v.index() < self.n_vertices()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[VertexId] {
        &self.col_indices
    }

    pub fn raw_weights(&self) -> Option<&[f32]> {
        self.weights.as_deref()
    }

    /// Dense-id to original-id table, when the graph came from a file.
    pub fn remap(&self) -> Option<&[u64]> {
        self.remap.as_deref()
    }

    /// Id the vertex had in the source file (identity for generated graphs).
    pub fn original_id(&self, v: VertexId) -> u64 {
        match &self.remap {
            Some(r) => r[v.index()],
            None => v.0 as u64,
        }
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        let i = v.index();
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> Neighbors<'_> {
        let i = v.index();
        let seg = self.row_offsets[i]..self.row_offsets[i + 1];
        Neighbors {
            vertex: v,
            targets: &self.col_indices[seg.clone()],
            weights: self.weights.as_ref().map(|w| &w[seg.clone()]),
            prefix: self.weight_prefix.as_ref().map(|p| &p[seg]),
        }
    }

    /// Largest weight on `v`'s out-edges, 0 for an isolated vertex.
    #[inline]
    pub fn max_edge_weight(&self, v: VertexId) -> f32 {
        self.max_weight[v.index()]
    }

    /// Inclusive prefix sums of `v`'s edge weights.
    pub fn weight_prefix(&self, v: VertexId) -> Vec<f64> {
        let nb = self.neighbors(v);
        match nb.prefix {
            Some(p) => p.to_vec(),
            None => (1..=nb.len()).map(|i| i as f64).collect(),
        }
    }

    /// Picks a neighbour of `v` with probability proportional to edge weight,
    /// by binary search of `r * total_weight(v)` in the prefix segment.
    /// `None` when `v` has no out-edges.
    #[inline]
    pub fn weighted_pick(&self, v: VertexId, r: f64) -> Option<VertexId> {
        let nb = self.neighbors(v);
        nb.pick_index(r).map(|i| nb.targets[i])
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).contains(v)
    }

    /// All edges as `(src, dst, weight)` in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f32)> + '_ {
        (0..self.n_vertices()).flat_map(move |v| {
            let v = VertexId(v as u32);
            self.neighbors(v).iter().map(move |(u, w)| (v, u, w))
        })
    }

    /// True when every vertex has at least one out-edge.
    pub fn has_no_dead_ends(&self) -> bool {
        self.row_offsets.windows(2).all(|w| w[1] > w[0])
    }
}
