use std::collections::HashMap;
use std::sync::Mutex;

use gsample::apps::{AppConfig, AppId};
use gsample::engine::{self, build_transit_map, EngineConfig, Member, Paradigm};
use gsample::graph::generators;
use gsample::{
    EdgeSink, Graph, NextQuery, Sample, SamplingApp, SamplingError, SamplingType, SlotRng, Steps, VertexId,
};

/// One-step app that logs every `next` invocation.
struct Probe {
    m: usize,
    calls: Mutex<Vec<(u64, usize, usize, VertexId)>>,
}

impl Probe {
    fn new(m: usize) -> Self {
        Self {
            m,
            calls: Mutex::new(Vec::new()),
        }
    }

    fn take(&self) -> Vec<(u64, usize, usize, VertexId)> {
        let mut c = std::mem::take(&mut *self.calls.lock().unwrap());
        c.sort();
        c
    }
}

impl SamplingApp for Probe {
    fn name(&self) -> &'static str {
        "probe"
    }

    fn steps(&self) -> Steps {
        Steps::Fixed(1)
    }

    fn sample_size(&self, _step: usize) -> usize {
        self.m
    }

    fn sampling_type(&self) -> SamplingType {
        SamplingType::Individual
    }

    fn next(
        &self,
        q: &NextQuery<'_>,
        _rng: &mut SlotRng,
        _edges: &mut EdgeSink<'_>,
    ) -> Result<Option<VertexId>, SamplingError> {
        let t = q.transits[0];
        self.calls.lock().unwrap().push((q.sample.id, q.transit_idx, q.slot, t));
        Ok(q.src_edges.targets().first().copied())
    }
}

fn v(x: u32) -> VertexId {
    VertexId(x)
}

fn samples(roots: &[&[u32]]) -> Vec<Sample> {
    roots
        .iter()
        .enumerate()
        .map(|(i, r)| Sample::new(i as u64, r.iter().map(|&x| v(x)).collect()))
        .collect()
}

const BOTH: [Paradigm; 2] = [Paradigm::SampleParallel, Paradigm::TransitParallel];

#[test]
fn every_slot_is_visited_exactly_once() {
    let g = generators::path(10);
    let roots: Vec<Vec<u32>> = (0..20).map(|i| vec![i % 10, (i * 3) % 10, (i * 7 + 1) % 10]).collect();
    let refs: Vec<&[u32]> = roots.iter().map(Vec::as_slice).collect();
    for p in BOTH {
        let app = Probe::new(4);
        let run = engine::run(p, &app, &g, samples(&refs), &EngineConfig::with_seed(3)).unwrap();
        let calls = app.take();
        let mut expected = Vec::new();
        for (i, r) in roots.iter().enumerate() {
            for (j, &t) in r.iter().enumerate() {
                for slot in 0..4 {
                    expected.push((i as u64, j, slot, v(t)));
                }
            }
        }
        expected.sort();
        assert_eq!(calls, expected, "{p:?}");
        assert!(run.samples.iter().all(|s| s.step(0).len() == 12));
    }
}

#[test]
fn samples_sharing_transits_are_grouped() {
    let g = generators::path(8);
    let app = Probe::new(1);
    let s = samples(&[&[1, 2], &[2, 3], &[1, 3]]);
    let map = build_transit_map(&app, &s, &g, 0, &EngineConfig::default()).unwrap();
    let member = |sample, transit_idx| Member { sample, transit_idx };
    let groups: Vec<(VertexId, Vec<Member>)> = map.groups.iter().map(|g| (g.transit, g.members.clone())).collect();
    assert_eq!(
        groups,
        vec![
            (v(1), vec![member(0, 0), member(2, 0)]),
            (v(2), vec![member(0, 1), member(1, 0)]),
            (v(3), vec![member(1, 1), member(2, 1)]),
        ]
    );
}

#[test]
fn transit_parallel_reads_each_shared_adjacency_once() {
    let g = generators::path(8);
    let app = Probe::new(1);
    let mut s = samples(&[&[4], &[4], &[4]]);
    let rec = engine::tp_step(&app, &g, &mut s, 0, &EngineConfig::default()).unwrap();
    assert_eq!(rec.next_calls, 3);
    assert_eq!(rec.adjacency_fetches, 1);
    assert_eq!(rec.small_groups, 1);
}

#[test]
fn sample_parallel_reads_per_sample() {
    let g = generators::path(8);
    let app = Probe::new(2);
    let mut s = samples(&[&[4], &[4], &[4]]);
    let rec = engine::sp_step(&app, &g, &mut s, 0, &EngineConfig::default()).unwrap();
    assert_eq!(rec.next_calls, 6);
    assert_eq!(rec.adjacency_fetches, 3);
}

#[test]
fn zero_degree_transit_yields_null_and_ends_the_walk() {
    let g = Graph::from_edges(3, &[(0, 1), (1, 0)]);
    let mut cfg = AppConfig::new(AppId::DeepWalk);
    cfg.walk_length = 5;
    let app = cfg.build(&g, 1).unwrap();
    for p in BOTH {
        let run = engine::run(p, app.as_ref(), &g, samples(&[&[2], &[0]]), &EngineConfig::with_seed(1)).unwrap();
        let isolated = &run.samples[0];
        assert_eq!(isolated.steps_taken(), 1, "{p:?}");
        assert_eq!(isolated.step(0), &[VertexId::NULL]);
        assert_eq!(run.samples[1].steps_taken(), 5);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let g = generators::power_law(500, 3, 9);
    for id in [AppId::DeepWalk, AppId::Khop, AppId::Layer] {
        let app = AppConfig::new(id).build(&g, 4).unwrap();
        let mut seen: HashMap<Paradigm, Vec<Sample>> = HashMap::new();
        for threads in [1, 2, 8] {
            for p in BOTH {
                let cfg = EngineConfig {
                    threads,
                    ..EngineConfig::with_seed(4)
                };
                let s = gsample::seed_samples(app.as_ref(), &g, 0..40, 4);
                let out = engine::run(p, app.as_ref(), &g, s, &cfg).unwrap().samples;
                let first = seen.entry(p).or_insert_with(|| out.clone());
                assert_eq!(*first, out, "{id} {p:?} threads={threads}");
            }
        }
        assert_eq!(seen[&Paradigm::SampleParallel], seen[&Paradigm::TransitParallel]);
    }
}

#[test]
fn empty_sample_set() {
    let g = generators::path(4);
    let app = AppConfig::new(AppId::DeepWalk).build(&g, 0).unwrap();
    for p in BOTH {
        let run = engine::run(p, app.as_ref(), &g, Vec::new(), &EngineConfig::default()).unwrap();
        assert!(run.samples.is_empty());
        assert!(run.steps.is_empty());
        assert!(!run.hit_step_cap);
    }
}

#[test]
fn collective_transit_parallel_reads_each_transit_once() {
    let g = generators::star(20);
    let mut cfg = AppConfig::new(AppId::Layer);
    cfg.layer.max_size = 50;
    cfg.layer.step_size = 5;
    let app = cfg.build(&g, 2).unwrap();
    let mut s = samples(&[&[0, 3], &[0, 3], &[0]]);
    let rec = engine::tp_step(app.as_ref(), &g, &mut s, 0, &EngineConfig::default()).unwrap();
    assert_eq!(rec.adjacency_fetches, 2);
    assert_eq!(rec.next_calls, 15);
    let mut s = samples(&[&[0, 3], &[0, 3], &[0]]);
    let rec = engine::sp_step(app.as_ref(), &g, &mut s, 0, &EngineConfig::default()).unwrap();
    assert_eq!(rec.adjacency_fetches, 5);
}
