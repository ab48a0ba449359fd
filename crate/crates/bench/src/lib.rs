//! Shared fixtures for the paradigm benchmarks.

use gsample::graph::generators;
use gsample::{seed_samples, AppConfig, AppId, Graph, Sample, SamplingApp};

/// Vertices and attachment degree of the benchmark graph.
pub const GRAPH_SIZE: (usize, usize) = (20_000, 4);

pub fn bench_graph() -> Graph {
    generators::power_law(GRAPH_SIZE.0, GRAPH_SIZE.1, 1)
}

/// Applications benchmarked, with settings small enough for a quick run.
pub fn bench_apps() -> Vec<AppConfig> {
    let mut deepwalk = AppConfig::new(AppId::DeepWalk);
    deepwalk.walk_length = 20;
    let khop = AppConfig::new(AppId::Khop);
    let mut layer = AppConfig::new(AppId::Layer);
    layer.layer.max_size = 500;
    layer.layer.step_size = 100;
    vec![deepwalk, khop, layer]
}

pub fn initial_samples(app: &dyn SamplingApp, graph: &Graph, n: u64) -> Vec<Sample> {
    seed_samples(app, graph, 0..n, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let g = generators::power_law(200, 2, 1);
        for cfg in bench_apps() {
            let app = cfg.build(&g, 1).unwrap();
            assert_eq!(initial_samples(app.as_ref(), &g, 5).len(), 5);
        }
    }
}
