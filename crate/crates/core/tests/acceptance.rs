//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gsample::apps::{AppConfig, AppId, ClusterParams, KhopParams};
use gsample::engine::{self, build_transit_map, partition_work_classes, EngineConfig, Paradigm, WorkClass, SMALL_THRESHOLD};
use gsample::graph::generators;
use gsample::output::{dedup_vertices, Layout, SampleSetOutput};
use gsample::rng::{RngKey, SlotRng};
use gsample::run::{compare_paradigms, multi_worker_run, RunConfig};
use gsample::validate;
use gsample::{seed_samples, Graph, Sample, SamplingApp, VertexId};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn run_app(app: &dyn SamplingApp, g: &Graph, n: usize, seed: u64, paradigm: Paradigm) -> Vec<Sample> {
    let samples = seed_samples(app, g, 0..n as u64, seed);
    engine::run(paradigm, app, g, samples, &EngineConfig::with_seed(seed))
        .expect("engine run")
        .samples
}

/// Final and per-step text plus every recorded edge.
fn output_bytes(samples: &[Sample], g: &Graph) -> Vec<u8> {
    let mut bytes = SampleSetOutput::from_samples(samples, g, Layout::FinalSamples)
        .to_text()
        .into_bytes();
    bytes.extend(SampleSetOutput::from_samples(samples, g, Layout::PerStep).to_text().into_bytes());
    for s in samples {
        for (i, e) in s.recorded_edges().enumerate() {
            for (a, b) in e {
                bytes.extend(format!("{} {} {} {}\n", s.id, i, a.0, b.0).into_bytes());
            }
        }
    }
    bytes
}

fn app_configs() -> Vec<(String, AppConfig)> {
    let mut out: Vec<(String, AppConfig)> = AppId::ALL
        .into_iter()
        .map(|a| (a.as_str().to_string(), AppConfig::new(a)))
        .collect();
    let mut unique = AppConfig::new(AppId::Khop);
    unique.khop = KhopParams {
        fanouts: vec![25, 10],
        unique: true,
    };
    out.push(("khop-unique".into(), unique));
    out
}

fn cross_engine() -> Outcome {
    let graphs: Vec<(&str, Graph)> = vec![
        ("path(1000)", generators::with_random_weights(&generators::path(1000), (1.0, 5.0), 1)),
        ("star(1000)", generators::with_random_weights(&generators::star(1000), (1.0, 5.0), 2)),
        (
            "power-law(10^4)",
            generators::with_random_weights(&generators::power_law(10_000, 4, 3), (1.0, 5.0), 3),
        ),
    ];
    let mut runs = 0;
    for (gname, g) in &graphs {
        for (aname, cfg) in app_configs() {
            for seed in [1u64, 17, 4242] {
                let app = cfg.build(g, seed).expect("app");
                let sp = run_app(app.as_ref(), g, 32, seed, Paradigm::SampleParallel);
                let tp = run_app(app.as_ref(), g, 32, seed, Paradigm::TransitParallel);
                if sp != tp || output_bytes(&sp, g) != output_bytes(&tp, g) {
                    return outcome(false, format!("{aname} on {gname}, seed {seed}: outputs differ"));
                }
                runs += 1;
            }
        }
    }
    outcome(true, format!("{runs} (app, graph, seed) triples byte-identical"))
}

fn scheduler_partition() -> Outcome {
    let g = generators::power_law(5000, 3, 9);
    let mut rng = SlotRng::seeded(77, 1);
    for (trial, m) in [1usize, 10, 25, 64].into_iter().enumerate() {
        // Skewed transit choice so every work class is populated.
        let mut samples = Vec::new();
        let mut pairs = 0;
        let mut id = 0u64;
        while pairs < 100_000 {
            let k = 1 + rng.below(20);
            let roots: Vec<VertexId> = (0..k)
                .map(|_| {
                    let r = rng.uniform();
                    VertexId((r * r * r * r * g.n_vertices() as f64) as u32)
                })
                .collect();
            pairs += k;
            samples.push(Sample::new(id, roots));
            id += 1;
        }
        let app = AppConfig {
            khop: KhopParams {
                fanouts: vec![m],
                unique: false,
            },
            ..AppConfig::new(AppId::Khop)
        }
        .build(&g, 0)
        .unwrap();
        let map = build_transit_map(app.as_ref(), &samples, &g, 0, &EngineConfig::default()).unwrap();

        let mut brute: Vec<(u32, u32, u32)> = Vec::new();
        for (s, sample) in samples.iter().enumerate() {
            for (j, r) in sample.roots().iter().enumerate() {
                brute.push((r.0, s as u32, j as u32));
            }
        }
        brute.sort_unstable();
        let flat: Vec<(u32, u32, u32)> = map
            .groups
            .iter()
            .flat_map(|grp| grp.members.iter().map(move |mm| (grp.transit.0, mm.sample, mm.transit_idx)))
            .collect();
        if flat != brute {
            return outcome(false, format!("trial {trial}: flattened map differs from enumeration"));
        }
        let distinct: HashSet<u32> = map.groups.iter().map(|grp| grp.transit.0).collect();
        if distinct.len() != map.groups.len() {
            return outcome(false, "a transit has two groups");
        }

        let n_groups = map.groups.len();
        let schedule = partition_work_classes(map.groups, m);
        let mut seen = vec![0u32; n_groups];
        for class in WorkClass::ALL {
            for (rank, &gi) in schedule.class(class).iter().enumerate() {
                seen[gi] += 1;
                let work = schedule.groups()[gi].work;
                let ok = match class {
                    WorkClass::Small => work < 32,
                    WorkClass::Medium => (32..=1024).contains(&work),
                    WorkClass::Large => work > 1024,
                };
                if !ok || work != schedule.groups()[gi].members.len() * m {
                    return outcome(false, format!("group {gi} with work {work} in {class:?}"));
                }
                if schedule.scheduling_index(gi) != rank || schedule.class_of(gi) != class {
                    return outcome(false, "scheduling index is not the rank within its class");
                }
            }
            let ids = schedule.class(class);
            if ids.windows(2).any(|w| schedule.groups()[w[0]].transit >= schedule.groups()[w[1]].transit) {
                return outcome(false, "class order is not by transit id");
            }
        }
        if seen.iter().any(|&c| c != 1) {
            return outcome(false, "classes do not partition the groups");
        }
        if schedule.total_work() != pairs * m {
            return outcome(false, "total work differs from pairs * m");
        }
        // With m >= 32 every group has at least 32 calls, so none can be small.
        let reachable = |c: &&WorkClass| **c != WorkClass::Small || m < SMALL_THRESHOLD;
        if m >= 10 && WorkClass::ALL.iter().filter(reachable).any(|&c| schedule.class(c).is_empty()) {
            return outcome(false, format!("m = {m}: a work class is empty"));
        }
    }
    outcome(true, "4 trials of >= 10^5 pairs; thresholds, partition and enumeration exact")
}

fn deepwalk_distribution() -> Outcome {
    let (max_abs, l1) = validate::deepwalk_check(1_000_000, 11);
    outcome(max_abs < 0.005, format!("max |empirical - exact| = {max_abs:.5} (L1 {l1:.5}), bound 0.005"))
}

fn node2vec_distribution() -> Outcome {
    let l1 = validate::node2vec_check(Default::default(), 1_000_000, 12);
    outcome(l1 < 0.01, format!("L1 = {l1:.5} at p = 2.0, q = 0.5, bound 0.01"))
}

fn ppr_length() -> Outcome {
    let s = validate::ppr_check(0.01, 100_000, 13);
    outcome(
        (97.0..=103.0).contains(&s.mean_length) && s.chi_square_p > 0.001 && !s.hit_step_cap,
        format!(
            "mean walk length {:.3} (root included), geometric chi-square p = {:.4}",
            s.mean_length, s.chi_square_p
        ),
    )
}

fn khop_shape() -> Outcome {
    let g = generators::power_law(10_000, 3, 5);
    assert!(g.has_no_dead_ends());
    let app = AppConfig::new(AppId::Khop).build(&g, 5).unwrap();
    let samples = run_app(app.as_ref(), &g, 2000, 5, Paradigm::TransitParallel);
    let bad = samples.iter().find(|s| {
        s.steps_taken() != 2
            || s.step(0).len() != 25
            || s.non_null_count(0) != 25
            || s.step(1).len() != 250
            || s.non_null_count(1) != 250
    });
    match bad {
        Some(s) => outcome(false, format!("sample {} has {:?} vertices per hop", s.id, (s.non_null_count(0), s.non_null_count(1)))),
        None => outcome(true, "2000 samples with exactly 25 and 250 vertices at hops 1 and 2"),
    }
}

fn layer_cap() -> Outcome {
    let g = generators::power_law(10_000, 4, 6);
    let app = AppConfig::new(AppId::Layer).build(&g, 6).unwrap();
    let samples = run_app(app.as_ref(), &g, 200, 6, Paradigm::TransitParallel);
    let max = samples.iter().map(Sample::vertex_count).max().unwrap_or(0);
    let full = samples.iter().filter(|s| s.vertex_count() == 2000).count();
    outcome(max <= 2000, format!("largest sample {max} vertices; {full}/200 reached 2000"))
}

fn dedup_property() -> Outcome {
    use proptest::prelude::*;
    use proptest::test_runner::{Config, TestRunner};

    let mut runner = TestRunner::new(Config {
        cases: 10_000,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = proptest::collection::vec(prop_oneof![9 => 0u32..200, 1 => Just(u32::MAX)], 0..100);
    let result = runner.run(&strategy, |xs| {
        let input: Vec<VertexId> = xs.iter().map(|&x| VertexId(x)).collect();
        let d = dedup_vertices(&input);
        prop_assert!(d.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(dedup_vertices(&d), d.clone());
        prop_assert!(d.iter().all(|v| !v.is_null() && input.contains(v)));
        prop_assert!(input.iter().all(|v| v.is_null() || d.contains(v)));
        Ok(())
    });
    match result {
        Ok(()) => outcome(true, "10^4 random lists: sorted, distinct, idempotent, subset"),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn multirw_roots() -> Outcome {
    let g = generators::power_law(5000, 3, 7);
    let seed = 7;
    let app = AppConfig::new(AppId::MultiRw).build(&g, seed).unwrap();
    let samples = run_app(app.as_ref(), &g, 100, seed, Paradigm::TransitParallel);
    for s in &samples {
        let mut roots = s.initial_roots().to_vec();
        if roots.len() != 100 || s.steps_taken() != 100 {
            return outcome(false, format!("sample {}: {} roots, {} steps", s.id, roots.len(), s.steps_taken()));
        }
        for step in 0..100 {
            // Independent replay of the transit choice from its keyed stream.
            let mut rng = RngKey::transit(seed, s.id, step, 0).stream();
            let transit = roots[rng.below(roots.len())];
            let v = s.step(step)[0];
            if s.edges(step) != [(transit, v)] || !g.has_edge(transit, v) {
                return outcome(false, format!("sample {} step {step}: {v} is not a neighbour of {transit}", s.id));
            }
            let at = roots.iter().position(|&r| r == transit).unwrap();
            roots[at] = v;
            if roots.len() != 100 {
                return outcome(false, "root count changed");
            }
        }
        if roots != s.roots() {
            return outcome(false, format!("sample {}: replayed roots differ", s.id));
        }
    }
    outcome(true, "100 samples x 100 steps: 100 roots throughout, every move along a graph edge")
}

fn edge_recording() -> Outcome {
    let g = generators::power_law(200, 2, 8);
    if g.n_edges() > 1000 {
        return outcome(false, format!("test graph has {} edges", g.n_edges()));
    }
    let edge_set: HashSet<(VertexId, VertexId)> = g.edges().map(|(a, b, _)| (a, b)).collect();
    let mut checked = 0usize;

    let mut cluster = AppConfig::new(AppId::ClusterGcn);
    cluster.cluster = ClusterParams {
        clusters_per_sample: 5,
        num_clusters: Some(20),
    };
    for (name, cfg) in [
        ("clustergcn", cluster),
        ("fastgcn", AppConfig::new(AppId::FastGcn)),
        ("ladies", AppConfig::new(AppId::Ladies)),
        ("mvs", AppConfig::new(AppId::Mvs)),
    ] {
        let app = cfg.build(&g, 8).unwrap();
        for s in run_app(app.as_ref(), &g, 50, 8, Paradigm::TransitParallel) {
            for step in 0..s.steps_taken() {
                let transits: Vec<VertexId> = if step == 0 {
                    s.initial_roots().to_vec()
                } else {
                    s.step(step - 1).iter().copied().filter(|v| !v.is_null()).collect()
                };
                let mut expected: Vec<(VertexId, VertexId)> = Vec::new();
                if name == "clustergcn" {
                    let members: HashSet<VertexId> = transits.iter().copied().collect();
                    expected = g
                        .edges()
                        .map(|(a, b, _)| (a, b))
                        .filter(|(a, b)| members.contains(a) && members.contains(b))
                        .collect();
                } else {
                    for &v in s.step(step) {
                        for &t in &transits {
                            if edge_set.contains(&(t, v)) {
                                expected.push((t, v));
                            }
                        }
                    }
                }
                let mut got = s.edges(step).to_vec();
                if name == "clustergcn" {
                    got.sort_unstable();
                    expected.sort_unstable();
                }
                if got != expected {
                    return outcome(false, format!("{name}: sample {} step {step} edges differ from brute force", s.id));
                }
                checked += got.len();
            }
        }
    }
    outcome(checked > 0, format!("{checked} recorded edges match the brute-force filter"))
}

fn multi_worker() -> Outcome {
    let g = generators::power_law(3000, 3, 10);
    for app in [AppId::Khop, AppId::DeepWalk, AppId::Layer, AppId::ClusterGcn] {
        let mut cfg = RunConfig::new(AppConfig::new(app));
        cfg.num_samples = 203;
        cfg.seed = 10;
        let mut reference: Option<Vec<u8>> = None;
        for workers in [1, 2, 4, 8] {
            cfg.workers = workers;
            let r = multi_worker_run(&cfg, &g).unwrap();
            let sizes = &r.worker_sizes;
            if sizes.len() != workers || sizes.iter().max().unwrap() - sizes.iter().min().unwrap() > 1 {
                return outcome(false, format!("{workers} workers: split sizes {sizes:?}"));
            }
            let bytes = output_bytes(&r.samples, &g);
            match &reference {
                None => reference = Some(bytes),
                Some(b) if *b != bytes => {
                    return outcome(false, format!("{app}: {workers} workers changed the output"));
                }
                _ => {}
            }
        }
    }
    outcome(true, "4 apps x workers {1, 2, 4, 8}: identical bytes, split sizes within 1")
}

fn locality() -> Outcome {
    let g = generators::power_law(100_000, 4, 11);
    let mut cfg = RunConfig::new(AppConfig::new(AppId::Khop));
    cfg.num_samples = 20_000;
    cfg.seed = 11;
    match compare_paradigms(&cfg, &g) {
        Ok(c) => {
            let (sp, tp) = (c.sp.adjacency_fetches(), c.tp.adjacency_fetches());
            outcome(
                tp < sp,
                format!(
                    "fetches SP {sp} vs TP {tp}; throughput TP/SP = {:.2}x; TP index build share {:.1}%",
                    c.throughput_ratio(),
                    100.0 * c.tp.build_share()
                ),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

/// Name, time budget and check.
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("cross-engine equivalence", Duration::from_secs(120), cross_engine),
        ("scheduler partition", Duration::from_secs(10), scheduler_partition),
        ("deepwalk distribution", Duration::from_secs(10), deepwalk_distribution),
        ("node2vec distribution", Duration::from_secs(30), node2vec_distribution),
        ("ppr length law", Duration::from_secs(30), ppr_length),
        ("k-hop shape", Duration::from_secs(10), khop_shape),
        ("layer cap", Duration::from_secs(10), layer_cap),
        ("dedup properties", Duration::from_secs(5), dedup_property),
        ("multirw root invariant", Duration::from_secs(10), multirw_roots),
        ("edge recording", Duration::from_secs(10), edge_recording),
        ("multi-worker determinism", Duration::from_secs(30), multi_worker),
        ("locality benefit", Duration::MAX, locality),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, limit, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let in_time = took <= limit;
        let pass = out.pass && in_time;
        failed += usize::from(!pass);
        let budget = if limit == Duration::MAX {
            String::new()
        } else {
            format!(" / {}s", limit.as_secs())
        };
        println!(
            "{} {name}: {}{} [{:.2}s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            if in_time { "" } else { " (over time budget)" },
            took.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
