//! The user-facing sampling abstraction.
//!
//! A [`SamplingApp`] is the bundle of functions that defines one sampling
//! application: how many steps, how many `next` calls per transit (or per
//! sample) at each step, which vertices act as transits, and the `next`
//! function itself. The engines only ever talk to an application through
//! this trait.

use crate::error::SamplingError;
use crate::graph::{Graph, Neighbors, VertexId};
use crate::rng::{RngKey, SlotRng};
use crate::sample::Sample;

/// Number of steps `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Steps {
    Fixed(usize),
    /// Runs until no sample has transits left (bounded by the engine's step cap).
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingType {
    /// `next` runs per (sample, transit) with that transit's adjacency.
    Individual,
    /// `next` runs per sample over the combined adjacency of all its transits.
    Collective,
}

/// Source edge set handed to `next`: one transit's adjacency for individual
/// apps, the combined neighbourhood for collective ones.
#[derive(Debug, Clone, Copy)]
pub struct EdgeView<'a> {
    targets: &'a [VertexId],
    weights: Option<&'a [f32]>,
    sources: Option<&'a [VertexId]>,
    single_source: VertexId,
}

impl<'a> EdgeView<'a> {
    pub fn new(
        targets: &'a [VertexId],
        weights: Option<&'a [f32]>,
        sources: Option<&'a [VertexId]>,
    ) -> Self {
        Self {
            targets,
            weights,
            sources,
            single_source: VertexId::NULL,
        }
    }

    pub fn empty() -> Self {
        Self::new(&[], None, None)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    #[inline]
    pub fn targets(&self) -> &'a [VertexId] {
        self.targets
    }

    #[inline]
    pub fn target(&self, i: usize) -> VertexId {
        self.targets[i]
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f32 {
        self.weights.map_or(1.0, |w| w[i])
    }

    /// Transit whose adjacency list contributed edge `i`.
    #[inline]
    pub fn source(&self, i: usize) -> VertexId {
        self.sources.map_or(self.single_source, |s| s[i])
    }
}

impl<'a> From<Neighbors<'a>> for EdgeView<'a> {
    fn from(nb: Neighbors<'a>) -> Self {
        Self {
            targets: nb.targets(),
            weights: nb.weights(),
            sources: None,
            single_source: nb.vertex,
        }
    }
}

/// Arguments of one `next` invocation.
#[derive(Debug, Clone, Copy)]
pub struct NextQuery<'a> {
    pub graph: &'a Graph,
    pub sample: &'a Sample,
    pub step: usize,
    /// One transit for individual apps; all of the sample's transits for collective ones.
    pub transits: &'a [VertexId],
    /// Index of the transit (always 0 for collective apps).
    pub transit_idx: usize,
    /// Invocation index in `[0, sample_size(step))`.
    pub slot: usize,
    pub src_edges: EdgeView<'a>,
}

/// Collects `s.addEdge(step, transit, v)` calls made by `next`.
pub struct EdgeSink<'a> {
    buf: &'a mut Vec<(VertexId, VertexId)>,
}

impl<'a> EdgeSink<'a> {
    pub fn new(buf: &'a mut Vec<(VertexId, VertexId)>) -> Self {
        Self { buf }
    }

    pub fn add_edge(&mut self, transit: VertexId, v: VertexId) {
        self.buf.push((transit, v));
    }
}

/// One sampling application.
///
/// `next` and `step_transits` must not depend on anything but their
/// arguments; state changes to the sample other than the drawn vertices go
/// through [`SamplingApp::finish_step`], which the engines call once per
/// sample after all of its slots for the step are known.
pub trait SamplingApp: Send + Sync {
    fn name(&self) -> &'static str;

    fn steps(&self) -> Steps;

    /// `m_i`: `next` calls per transit (individual) or per sample (collective) at step `i`.
    fn sample_size(&self, step: usize) -> usize;

    fn unique(&self, _step: usize) -> bool {
        false
    }

    fn sampling_type(&self) -> SamplingType;

    /// Initial roots of sample `sample_id`. Defaults to one uniformly random vertex.
    fn initial_roots(&self, graph: &Graph, sample_id: u64, seed: u64) -> Vec<VertexId> {
        let mut rng = RngKey::init(seed, sample_id).stream();
        vec![VertexId(rng.below(graph.n_vertices()) as u32)]
    }

    /// Number of transits of `sample` at `step`: the roots at step 0, then the
    /// non-NULL vertices added at the previous step.
    fn transit_count(&self, sample: &Sample, step: usize) -> usize {
        if sample.steps_taken() != step {
            return 0;
        }
        sample.candidate_count(step, 1)
    }

    /// Transit number `transit_idx` of `sample` at `step`. Defaults to
    /// `s.prevVertex(1, transitIdx)`.
    fn step_transits(
        &self,
        step: usize,
        sample: &Sample,
        transit_idx: usize,
        _rng: &mut SlotRng,
    ) -> VertexId {
        sample.prev_vertex(step, 1, transit_idx).unwrap_or(VertexId::NULL)
    }

    /// Draws one vertex, or `None` for "add nothing".
    fn next(
        &self,
        query: &NextQuery<'_>,
        rng: &mut SlotRng,
        edges: &mut EdgeSink<'_>,
    ) -> Result<Option<VertexId>, SamplingError>;

    /// Called once per sample after its slots for `step` were appended.
    fn finish_step(&self, _sample: &mut Sample, _step: usize, _transits: &[VertexId]) {}
}

/// Transit count of `sample` at `step` under `app`.
pub fn transit_count(app: &dyn SamplingApp, sample: &Sample, step: usize) -> usize {
    app.transit_count(sample, step)
}

/// Whether `sample` takes part in `step`.
pub fn is_alive(app: &dyn SamplingApp, sample: &Sample, step: usize) -> bool {
    if let Steps::Fixed(k) = app.steps() {
        if step >= k {
            return false;
        }
    }
    app.transit_count(sample, step) > 0
}

/// One initial sample per id in `ids`, with roots from the app.
pub fn seed_samples(
    app: &dyn SamplingApp,
    graph: &Graph,
    ids: std::ops::Range<u64>,
    seed: u64,
) -> Vec<Sample> {
    ids.map(|id| Sample::new(id, app.initial_roots(graph, id, seed)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Walk;

    impl SamplingApp for Walk {
        fn name(&self) -> &'static str {
            "walk"
        }
        fn steps(&self) -> Steps {
            Steps::Fixed(100)
        }
        fn sample_size(&self, _: usize) -> usize {
            1
        }
        fn sampling_type(&self) -> SamplingType {
            SamplingType::Individual
        }
        fn next(
            &self,
            q: &NextQuery<'_>,
            rng: &mut SlotRng,
            _: &mut EdgeSink<'_>,
        ) -> Result<Option<VertexId>, SamplingError> {
            Ok(q.graph.weighted_pick(q.transits[0], rng.uniform()))
        }
    }

    #[test]
    fn alive_rules() {
        let mut s = Sample::new(0, vec![VertexId(1)]);
        assert!(is_alive(&Walk, &s, 0));
        assert_eq!(transit_count(&Walk, &s, 0), 1);
        s.push_step(vec![VertexId(2)], vec![]);
        assert_eq!(transit_count(&Walk, &s, 1), 1);
        s.push_step(vec![VertexId::NULL], vec![]);
        assert_eq!(transit_count(&Walk, &s, 2), 0);
        assert!(!is_alive(&Walk, &s, 2));
        // a sample that skipped a step stays dead
        assert!(!is_alive(&Walk, &s, 3));
    }

    #[test]
    fn fixed_steps_bound() {
        let mut s = Sample::new(0, vec![VertexId(1)]);
        for _ in 0..100 {
            s.push_step(vec![VertexId(1)], vec![]);
        }
        assert!(!is_alive(&Walk, &s, 100));
    }

    #[test]
    fn step_transits_is_pure() {
        let mut s = Sample::new(0, vec![VertexId(4)]);
        s.push_step(vec![VertexId(2), VertexId(3)], vec![]);
        let mut r1 = RngKey::transit(1, 0, 1, 1).stream();
        let mut r2 = RngKey::transit(1, 0, 1, 1).stream();
        assert_eq!(
            Walk.step_transits(1, &s, 1, &mut r1),
            Walk.step_transits(1, &s, 1, &mut r2)
        );
        assert_eq!(Walk.step_transits(1, &s, 1, &mut r1), VertexId(3));
    }

    #[test]
    fn edge_view_sources() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]);
        let view: EdgeView<'_> = g.neighbors(VertexId(0)).into();
        assert_eq!(view.len(), 2);
        assert_eq!(view.source(1), VertexId(0));
        assert_eq!(view.weight(0), 1.0);
    }
}
