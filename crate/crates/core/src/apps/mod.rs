//! The bundled sampling applications.
//!
//! Random walks: [`DeepWalk`], [`Ppr`], [`Node2vec`], [`MultiRw`].
//! Neighbourhood and layer samplers: [`Khop`], [`Layer`], [`Importance`]
//! (FastGCN, LADIES, MVS) and [`ClusterGcn`].

mod clustergcn;
mod deepwalk;
mod importance;
mod khop;
mod layer;
mod multirw;
mod node2vec;
mod ppr;

use std::fmt;
use std::str::FromStr;

pub use clustergcn::ClusterGcn;
pub use deepwalk::DeepWalk;
pub use importance::{Importance, ImportanceDist, ImportanceKind};
pub use khop::Khop;
pub use layer::Layer;
pub use multirw::MultiRw;
pub use node2vec::{Node2vec, Node2vecFactors, REJECTION_CAP};
pub use ppr::Ppr;

use crate::app::{EdgeView, SamplingApp};
use crate::error::SamplingError;
use crate::graph::{Graph, VertexId};
use crate::rng::{RngKey, SlotRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AppId {
    DeepWalk,
    Ppr,
    Node2vec,
    MultiRw,
    Khop,
    Layer,
    FastGcn,
    Ladies,
    ClusterGcn,
    Mvs,
}

impl AppId {
    pub const ALL: [AppId; 10] = [
        AppId::DeepWalk,
        AppId::Ppr,
        AppId::Node2vec,
        AppId::MultiRw,
        AppId::Khop,
        AppId::Layer,
        AppId::FastGcn,
        AppId::Ladies,
        AppId::ClusterGcn,
        AppId::Mvs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AppId::DeepWalk => "deepwalk",
            AppId::Ppr => "ppr",
            AppId::Node2vec => "node2vec",
            AppId::MultiRw => "multirw",
            AppId::Khop => "khop",
            AppId::Layer => "layer",
            AppId::FastGcn => "fastgcn",
            AppId::Ladies => "ladies",
            AppId::ClusterGcn => "clustergcn",
            AppId::Mvs => "mvs",
        }
    }
}

impl fmt::Display for AppId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AppId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        AppId::ALL
            .into_iter()
            .find(|a| a.as_str() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown app '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node2vecParams {
    pub p: f64,
    pub q: f64,
    pub factors: Node2vecFactors,
}

impl Default for Node2vecParams {
    fn default() -> Self {
        Self {
            p: 2.0,
            q: 0.5,
            factors: Node2vecFactors::Canonical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PprParams {
    pub termination_probability: f64,
}

impl Default for PprParams {
    fn default() -> Self {
        Self {
            termination_probability: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerParams {
    pub max_size: usize,
    pub step_size: usize,
}

impl Default for LayerParams {
    fn default() -> Self {
        Self {
            max_size: 2000,
            step_size: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KhopParams {
    pub fanouts: Vec<usize>,
    /// Deduplicate every hop.
    pub unique: bool,
}

impl Default for KhopParams {
    fn default() -> Self {
        Self {
            fanouts: vec![25, 10],
            unique: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiRwParams {
    pub roots_per_sample: usize,
    pub walk_length: usize,
}

impl Default for MultiRwParams {
    fn default() -> Self {
        Self {
            roots_per_sample: 100,
            walk_length: 100,
        }
    }
}

/// FastGCN, LADIES and MVS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchParams {
    pub batch_size: usize,
    pub step_size: usize,
    /// Layers sampled by FastGCN and LADIES.
    pub steps: usize,
    pub dist: ImportanceDist,
}

impl Default for BatchParams {
    fn default() -> Self {
        Self {
            batch_size: 64,
            step_size: 64,
            steps: 5,
            dist: ImportanceDist::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterParams {
    pub clusters_per_sample: usize,
    /// Total clusters; `None` picks `max(clusters_per_sample, n / 50)`.
    pub num_clusters: Option<usize>,
}

impl Default for ClusterParams {
    fn default() -> Self {
        Self {
            clusters_per_sample: 20,
            num_clusters: None,
        }
    }
}

/// Parameters of every application; only the selected app's fields are read.
#[derive(Debug, Clone, PartialEq)]
pub struct AppConfig {
    pub app: AppId,
    /// DeepWalk and node2vec walk length.
    pub walk_length: usize,
    pub node2vec: Node2vecParams,
    pub ppr: PprParams,
    pub khop: KhopParams,
    pub layer: LayerParams,
    pub multirw: MultiRwParams,
    pub batch: BatchParams,
    pub cluster: ClusterParams,
}

impl AppConfig {
    pub fn new(app: AppId) -> Self {
        Self {
            app,
            walk_length: 100,
            node2vec: Node2vecParams::default(),
            ppr: PprParams::default(),
            khop: KhopParams::default(),
            layer: LayerParams::default(),
            multirw: MultiRwParams::default(),
            batch: BatchParams::default(),
            cluster: ClusterParams::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        let bad = |m: &str| Err(SamplingError::Config(m.to_string()));
        match self.app {
            AppId::DeepWalk | AppId::Node2vec if self.walk_length == 0 => bad("walk length must be positive"),
            AppId::Node2vec if !(self.node2vec.p > 0.0 && self.node2vec.q > 0.0) => {
                bad("node2vec p and q must be positive")
            }
            AppId::Ppr
                if !(self.ppr.termination_probability > 0.0
                    && self.ppr.termination_probability <= 1.0) =>
            {
                bad("termination probability must be in (0, 1]")
            }
            AppId::Khop if self.khop.fanouts.is_empty() || self.khop.fanouts.contains(&0) => {
                bad("fanouts must be a non-empty list of positive counts")
            }
            AppId::Layer
                if self.layer.step_size == 0 || self.layer.step_size > self.layer.max_size =>
            {
                bad("layer step size must be in [1, max size]")
            }
            AppId::MultiRw
                if self.multirw.roots_per_sample == 0 || self.multirw.walk_length == 0 =>
            {
                bad("multirw needs at least one root and a positive length")
            }
            AppId::FastGcn | AppId::Ladies | AppId::Mvs
                if self.batch.batch_size == 0 || self.batch.step_size == 0 =>
            {
                bad("batch and step size must be positive")
            }
            AppId::FastGcn | AppId::Ladies if self.batch.steps == 0 => bad("steps must be positive"),
            AppId::ClusterGcn
                if self.cluster.clusters_per_sample == 0 || self.cluster.num_clusters == Some(0) =>
            {
                bad("cluster counts must be positive")
            }
            _ => Ok(()),
        }
    }

    /// Instantiates the application for `graph`. `seed` drives any
    /// graph-level randomness the app needs up front (cluster assignment).
    pub fn build(&self, graph: &Graph, seed: u64) -> Result<Box<dyn SamplingApp>, SamplingError> {
        self.validate()?;
        if graph.n_vertices() == 0 {
            return Err(SamplingError::Config("graph has no vertices".into()));
        }
        Ok(match self.app {
            AppId::DeepWalk => Box::new(DeepWalk::new(self.walk_length)),
            AppId::Ppr => Box::new(Ppr::new(self.ppr.termination_probability)),
            AppId::Node2vec => Box::new(Node2vec::new(self.walk_length, self.node2vec)),
            AppId::MultiRw => Box::new(MultiRw::new(self.multirw)),
            AppId::Khop => Box::new(Khop::new(self.khop.clone())),
            AppId::Layer => Box::new(Layer::new(self.layer)),
            AppId::FastGcn => Box::new(Importance::new(ImportanceKind::FastGcn, self.batch, graph)),
            AppId::Ladies => Box::new(Importance::new(ImportanceKind::Ladies, self.batch, graph)),
            AppId::Mvs => Box::new(Importance::new(ImportanceKind::Mvs, self.batch, graph)),
            AppId::ClusterGcn => Box::new(ClusterGcn::new(self.cluster, graph, seed)),
        })
    }
}

/// `randInt(0, len)` over a source edge view.
pub(crate) fn uniform_edge(view: &EdgeView<'_>, rng: &mut SlotRng) -> Option<usize> {
    (!view.is_empty()).then(|| rng.below(view.len()))
}

/// `count` uniform roots drawn with replacement from the init stream.
pub(crate) fn uniform_roots(graph: &Graph, sample_id: u64, seed: u64, count: usize) -> Vec<VertexId> {
    let mut rng = RngKey::init(seed, sample_id).stream();
    (0..count)
        .map(|_| VertexId(rng.below(graph.n_vertices()) as u32))
        .collect()
}
