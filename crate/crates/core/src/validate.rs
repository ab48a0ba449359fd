//! Statistical checks of the bundled applications against exact
//! distributions computed by brute force on tiny graphs.

use std::fmt::Write as _;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::app::{EdgeSink, EdgeView, NextQuery, SamplingApp};
use crate::apps::{AppConfig, AppId, DeepWalk, Khop, KhopParams, Layer, LayerParams, Node2vec, Node2vecParams};
use crate::engine::{self, collective, EngineConfig, Paradigm};
use crate::graph::{generators, Graph, VertexId};
use crate::rng::RngKey;
use crate::sample::Sample;

#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    /// Draws per exact-distribution check.
    pub draws: usize,
    /// Walks for the PPR length check.
    pub walks: usize,
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            draws: 1_000_000,
            walks: 100_000,
            seed: 1,
        }
    }
}

/// One line of the validation table.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub metric: &'static str,
    pub value: f64,
    pub bound: String,
    pub pass: bool,
}

impl Check {
    fn below(name: &'static str, metric: &'static str, value: f64, limit: f64) -> Self {
        Self {
            name,
            metric,
            value,
            bound: format!("< {limit}"),
            pass: value < limit,
        }
    }

    fn above(name: &'static str, metric: &'static str, value: f64, limit: f64) -> Self {
        Self {
            name,
            metric,
            value,
            bound: format!("> {limit}"),
            pass: value > limit,
        }
    }

    fn within(name: &'static str, metric: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name,
            metric,
            value,
            bound: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }
}

pub fn render_table(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(
            s,
            "{:<6} {:<22} {:<14} {:>12.6} {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.metric,
            c.value,
            c.bound
        );
    }
    s
}

/// Frequencies of `next` outcomes over `draws` keyed streams, one per
/// sample id, for a fixed sample state and transit set.
#[allow(clippy::too_many_arguments)]
pub fn empirical(
    app: &dyn SamplingApp,
    graph: &Graph,
    sample: &Sample,
    step: usize,
    transits: &[VertexId],
    view: EdgeView<'_>,
    draws: usize,
    seed: u64,
) -> Vec<f64> {
    let mut counts = vec![0u64; graph.n_vertices()];
    let mut sink = Vec::new();
    for i in 0..draws {
        let mut rng = RngKey::slot(seed, i as u64, step, 0, 0).stream();
        let q = NextQuery {
            graph,
            sample,
            step,
            transits,
            transit_idx: 0,
            slot: 0,
            src_edges: view,
        };
        sink.clear();
        if let Ok(Some(v)) = app.next(&q, &mut rng, &mut EdgeSink::new(&mut sink)) {
            counts[v.index()] += 1;
        }
    }
    counts.iter().map(|&c| c as f64 / draws as f64).collect()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Upper-tail p-value of Pearson's statistic for `observed` counts against
/// `expected` counts (same total).
pub fn chi_square_p(observed: &[f64], expected: &[f64]) -> f64 {
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(o, e)| (o - e) * (o - e) / e)
        .sum();
    let df = (expected.iter().filter(|&&e| e > 0.0).count() as f64 - 1.0).max(1.0);
    ChiSquared::new(df).map_or(0.0, |d| d.sf(stat))
}

/// The two-neighbour weighted example: vertex 0 with edges to 1 (weight 1)
/// and 2 (weight 3).
pub fn two_neighbor_graph() -> Graph {
    Graph::from_weighted_edges(3, &[(0, 1, 1.0), (0, 2, 3.0)])
}

/// Exact transition probabilities of a weighted first-order walk from `v`.
pub fn weighted_oracle(graph: &Graph, v: VertexId) -> Vec<f64> {
    let mut p = vec![0.0; graph.n_vertices()];
    let nb = graph.neighbors(v);
    let total: f64 = nb.iter().map(|(_, w)| w as f64).sum();
    for (u, w) in nb.iter() {
        p[u.index()] += w as f64 / total;
    }
    p
}

/// Deepwalk next-vertex frequencies against the weight oracle.
pub fn deepwalk_check(draws: usize, seed: u64) -> (f64, f64) {
    let g = two_neighbor_graph();
    let s = Sample::new(0, vec![VertexId(0)]);
    let t = [VertexId(0)];
    let emp = empirical(&DeepWalk::new(1), &g, &s, 0, &t, g.neighbors(t[0]).into(), draws, seed);
    let exact = weighted_oracle(&g, t[0]);
    (max_abs(&emp, &exact), l1(&emp, &exact))
}

/// Five-vertex weighted graph for the second-order walk. The walk came from
/// 0 and sits at 1; 1's neighbours cover all three factor cases.
pub fn node2vec_graph() -> Graph {
    Graph::from_weighted_edges(
        5,
        &[
            (0, 1, 1.0),
            (0, 2, 2.0),
            (1, 0, 1.0),
            (1, 2, 2.0),
            (1, 3, 1.5),
            (1, 4, 3.0),
            (2, 3, 1.0),
            (3, 4, 1.0),
            (4, 0, 1.0),
        ],
    )
}

/// Exact distribution of the step from `v` given previous stop `t`,
/// enumerating every neighbour with the three-case factor.
pub fn node2vec_oracle(graph: &Graph, app: &Node2vec, t: VertexId, v: VertexId) -> Vec<f64> {
    let mut p = vec![0.0; graph.n_vertices()];
    let nb = graph.neighbors(v);
    for (u, w) in nb.iter() {
        p[u.index()] += w as f64 * app.factor(graph, t, u);
    }
    let total: f64 = p.iter().sum();
    p.iter().map(|x| x / total).collect()
}

pub fn node2vec_check(params: Node2vecParams, draws: usize, seed: u64) -> f64 {
    let g = node2vec_graph();
    let app = Node2vec::new(2, params);
    let mut s = Sample::new(0, vec![VertexId(0)]);
    s.push_step(vec![VertexId(1)], vec![]);
    let t = [VertexId(1)];
    let emp = empirical(&app, &g, &s, 1, &t, g.neighbors(t[0]).into(), draws, seed);
    l1(&emp, &node2vec_oracle(&g, &app, VertexId(0), VertexId(1)))
}

/// Uniform neighbour pick of a 4-neighbour transit.
pub fn khop_check(draws: usize, seed: u64) -> f64 {
    let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
    let s = Sample::new(0, vec![VertexId(0)]);
    let t = [VertexId(0)];
    let app = Khop::new(KhopParams {
        fanouts: vec![1],
        unique: false,
    });
    let emp = empirical(&app, &g, &s, 0, &t, g.neighbors(t[0]).into(), draws, seed);
    let mut exact = vec![0.25; 5];
    exact[0] = 0.0;
    max_abs(&emp, &exact)
}

/// Uniform pick over a combined neighbourhood with a repeated target.
pub fn layer_check(draws: usize, seed: u64) -> f64 {
    let g = Graph::from_edges(6, &[(0, 2), (0, 3), (1, 3), (1, 4), (1, 5)]);
    let s = Sample::new(0, vec![VertexId(0), VertexId(1)]);
    let t = [VertexId(0), VertexId(1)];
    let combined = collective::CombinedNeighborhood::from_transits(&g, 0, &t);
    let app = Layer::new(LayerParams {
        max_size: 100,
        step_size: 1,
    });
    let emp = empirical(&app, &g, &s, 0, &t, combined.view(), draws, seed);
    let exact = [0.0, 0.0, 0.2, 0.4, 0.2, 0.2];
    max_abs(&emp, &exact)
}

/// Walk-length statistics of PPR on a dead-end-free graph.
#[derive(Debug, Clone, Copy)]
pub struct PprStats {
    /// Mean vertices per walk, root included.
    pub mean_length: f64,
    pub chi_square_p: f64,
    pub hit_step_cap: bool,
}

pub fn ppr_check(termination: f64, walks: usize, seed: u64) -> PprStats {
    let g = generators::power_law(2000, 3, seed);
    let mut cfg = AppConfig::new(AppId::Ppr);
    cfg.ppr.termination_probability = termination;
    let app = cfg.build(&g, seed).expect("valid ppr config");
    let samples = crate::app::seed_samples(app.as_ref(), &g, 0..walks as u64, seed);
    let run = engine::run(
        Paradigm::TransitParallel,
        app.as_ref(),
        &g,
        samples,
        &EngineConfig::with_seed(seed),
    )
    .expect("ppr run");
    let lengths: Vec<usize> = run.samples.iter().map(Sample::sampled_count).collect();
    let mean_length =
        run.samples.iter().map(|s| s.vertex_count()).sum::<usize>() as f64 / walks.max(1) as f64;

    // Sampled vertices follow P(L = l) = (1 - p)^l p. Bins of roughly equal
    // mass, the last one an open tail.
    let bins = 20usize;
    let q = 1.0 - termination;
    let mut edges = vec![0usize];
    for b in 1..bins {
        let quantile = b as f64 / bins as f64;
        let l = ((1.0 - quantile).ln() / q.ln()).ceil().max(0.0) as usize;
        if l > *edges.last().unwrap() {
            edges.push(l);
        }
    }
    let mut observed = vec![0.0; edges.len()];
    for &l in &lengths {
        let bin = edges.partition_point(|&e| e <= l) - 1;
        observed[bin] += 1.0;
    }
    let cdf_below = |l: usize| 1.0 - q.powi(l as i32);
    let expected: Vec<f64> = (0..edges.len())
        .map(|i| {
            let hi = edges.get(i + 1).map_or(1.0, |&e| cdf_below(e));
            (hi - cdf_below(edges[i])) * walks as f64
        })
        .collect();
    PprStats {
        mean_length,
        chi_square_p: chi_square_p(&observed, &expected),
        hit_step_cap: run.hit_step_cap,
    }
}

/// Runs every distribution check and returns the table.
pub fn validate_distributions(cfg: &ValidationConfig) -> Vec<Check> {
    let (dw_max, dw_l1) = deepwalk_check(cfg.draws, cfg.seed);
    let n2v = node2vec_check(Node2vecParams::default(), cfg.draws, cfg.seed);
    let kh = khop_check(cfg.draws, cfg.seed);
    let la = layer_check(cfg.draws, cfg.seed);
    let ppr = ppr_check(0.01, cfg.walks, cfg.seed);
    vec![
        Check::below("deepwalk", "max_abs_diff", dw_max, 0.005),
        Check::below("deepwalk", "l1", dw_l1, 0.01),
        Check::below("node2vec", "l1", n2v, 0.01),
        Check::below("khop", "max_abs_diff", kh, 0.005),
        Check::below("layer", "max_abs_diff", la, 0.005),
        Check::within("ppr", "mean_length", ppr.mean_length, 97.0, 103.0),
        Check::above("ppr", "chi_square_p", ppr.chi_square_p, 0.001),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::Node2vecFactors;

    #[test]
    fn oracles_sum_to_one() {
        let g = node2vec_graph();
        let app = Node2vec::new(2, Node2vecParams::default());
        let p = node2vec_oracle(&g, &app, VertexId(0), VertexId(1));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // neighbours 0, 2, 3, 4: weights 1, 2, 1.5, 3 with factors 1/2, 1, 2, 2
        let raw = [(0, 0.5), (2, 2.0), (3, 3.0), (4, 6.0)];
        let total: f64 = raw.iter().map(|r| r.1).sum();
        for (v, r) in raw {
            assert!((p[v] - r / total).abs() < 1e-12);
        }
        assert_eq!(p[1], 0.0);
        assert_eq!(weighted_oracle(&two_neighbor_graph(), VertexId(0)), vec![0.0, 0.25, 0.75]);
    }

    #[test]
    fn uniform_factors_give_uniform_walk() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 0), (1, 2), (1, 3)]);
        let app = Node2vec::new(
            2,
            Node2vecParams {
                p: 1.0,
                q: 1.0,
                factors: Node2vecFactors::Canonical,
            },
        );
        let p = node2vec_oracle(&g, &app, VertexId(0), VertexId(1));
        for &x in &p[..] {
            assert!(x == 0.0 || (x - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn only_neighbour_is_certain() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0)]);
        let app = Node2vec::new(2, Node2vecParams::default());
        let mut s = Sample::new(0, vec![VertexId(0)]);
        s.push_step(vec![VertexId(1)], vec![]);
        let t = [VertexId(1)];
        let emp = empirical(&app, &g, &s, 1, &t, g.neighbors(t[0]).into(), 1000, 3);
        assert_eq!(emp, vec![1.0, 0.0]);
    }

    #[test]
    fn chi_square_of_exact_counts_is_one() {
        assert!((chi_square_p(&[10.0, 20.0], &[10.0, 20.0]) - 1.0).abs() < 1e-12);
        assert!(chi_square_p(&[0.0, 30.0], &[15.0, 15.0]) < 1e-6);
    }

    #[test]
    fn small_runs() {
        assert!(khop_check(200_000, 2) < 0.01);
        assert!(layer_check(200_000, 2) < 0.01);
        let stats = ppr_check(1.0, 100, 1);
        assert_eq!(stats.mean_length, 1.0);
    }
}
