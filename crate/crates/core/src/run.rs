//! Whole runs: seeding, multi-worker partitioning, reports and the
//! sample-parallel versus transit-parallel comparison.

use std::fmt::Write as _;
use std::ops::Range;
use std::time::{Duration, Instant};

use crate::app::seed_samples;
use crate::apps::AppConfig;
use crate::engine::{self, EngineConfig, Paradigm, StepRecord, DEFAULT_STEP_CAP};
use crate::error::SamplingError;
use crate::graph::Graph;
use crate::output::{Layout, SampleSetOutput};
use crate::sample::Sample;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub app: AppConfig,
    pub paradigm: Paradigm,
    pub seed: u64,
    pub num_samples: usize,
    /// Independent engine instances, each over a contiguous range of samples.
    pub workers: usize,
    /// Threads per worker; 0 divides the machine evenly between workers.
    pub threads: usize,
    pub step_cap: usize,
    pub layout: Layout,
}

impl RunConfig {
    pub fn new(app: AppConfig) -> Self {
        Self {
            app,
            paradigm: Paradigm::TransitParallel,
            seed: 0,
            num_samples: 1000,
            workers: 1,
            threads: 0,
            step_cap: DEFAULT_STEP_CAP,
            layout: Layout::FinalSamples,
        }
    }

    fn engine_config(&self) -> EngineConfig {
        let threads = if self.threads > 0 {
            self.threads
        } else if self.workers > 1 {
            let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
            (cores / self.workers).max(1)
        } else {
            0
        };
        EngineConfig {
            seed: self.seed,
            threads,
            step_cap: self.step_cap,
            check_transits: true,
        }
    }
}

/// Splits `0..n` into `workers` contiguous ranges whose sizes differ by at
/// most one, larger ranges first.
pub fn split_ranges(n: usize, workers: usize) -> Vec<Range<u64>> {
    let workers = workers.max(1);
    let (base, extra) = (n / workers, n % workers);
    let mut start = 0u64;
    (0..workers)
        .map(|w| {
            let len = (base + usize::from(w < extra)) as u64;
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Timing and counters of one run.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub app: String,
    pub paradigm: String,
    pub seed: u64,
    pub num_samples: usize,
    pub workers: usize,
    /// Per-step records, summed over workers.
    pub steps: Vec<StepRecord>,
    /// Engine time excluding graph loading and output.
    pub wall_time: Duration,
    pub total_vertices: usize,
    pub hit_step_cap: bool,
}

impl RunReport {
    pub fn build_time(&self) -> Duration {
        self.steps.iter().map(|s| s.build).sum()
    }

    pub fn sample_time(&self) -> Duration {
        self.steps.iter().map(|s| s.sample).sum()
    }

    pub fn next_calls(&self) -> u64 {
        self.steps.iter().map(|s| s.next_calls).sum()
    }

    pub fn adjacency_fetches(&self) -> u64 {
        self.steps.iter().map(|s| s.adjacency_fetches).sum()
    }

    /// Samples per second of wall time.
    pub fn throughput(&self) -> f64 {
        let secs = self.wall_time.as_secs_f64();
        if secs > 0.0 {
            self.num_samples as f64 / secs
        } else {
            0.0
        }
    }

    /// Fraction of step time spent building the scheduling index.
    pub fn build_share(&self) -> f64 {
        let total = (self.build_time() + self.sample_time()).as_secs_f64();
        if total > 0.0 {
            self.build_time().as_secs_f64() / total
        } else {
            0.0
        }
    }

    /// `key=value` lines, then one line per step.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let sum = |f: fn(&StepRecord) -> usize| self.steps.iter().map(f).sum::<usize>();
        let _ = writeln!(s, "app={}", self.app);
        let _ = writeln!(s, "paradigm={}", self.paradigm);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "samples={}", self.num_samples);
        let _ = writeln!(s, "workers={}", self.workers);
        let _ = writeln!(s, "steps={}", self.steps.len());
        let _ = writeln!(s, "total_vertices={}", self.total_vertices);
        let _ = writeln!(s, "next_calls={}", self.next_calls());
        let _ = writeln!(s, "adjacency_fetches={}", self.adjacency_fetches());
        let _ = writeln!(s, "small_groups={}", sum(|r| r.small_groups));
        let _ = writeln!(s, "medium_groups={}", sum(|r| r.medium_groups));
        let _ = writeln!(s, "large_groups={}", sum(|r| r.large_groups));
        let _ = writeln!(s, "fallback_samples={}", sum(|r| r.fallback_samples));
        let _ = writeln!(s, "build_time_s={:.6}", self.build_time().as_secs_f64());
        let _ = writeln!(s, "sample_time_s={:.6}", self.sample_time().as_secs_f64());
        let _ = writeln!(s, "build_share={:.4}", self.build_share());
        let _ = writeln!(s, "wall_time_s={:.6}", self.wall_time.as_secs_f64());
        let _ = writeln!(s, "throughput_samples_per_s={:.1}", self.throughput());
        let _ = writeln!(s, "hit_step_cap={}", self.hit_step_cap);
        for r in &self.steps {
            let _ = writeln!(
                s,
                "step={} alive={} build_s={:.6} sample_s={:.6} next_calls={} fetches={} small={} medium={} large={} fallback={}",
                r.step,
                r.alive,
                r.build.as_secs_f64(),
                r.sample.as_secs_f64(),
                r.next_calls,
                r.adjacency_fetches,
                r.small_groups,
                r.medium_groups,
                r.large_groups,
                r.fallback_samples
            );
        }
        s
    }
}

/// Samples and report of a finished run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub samples: Vec<Sample>,
    pub report: RunReport,
    /// Sample count handled by each worker.
    pub worker_sizes: Vec<usize>,
}

impl RunResult {
    pub fn output(&self, graph: &Graph, layout: Layout) -> SampleSetOutput {
        SampleSetOutput::from_samples(&self.samples, graph, layout)
    }
}

/// Runs `cfg` on `graph`. Samples are split into `cfg.workers` contiguous
/// ranges that run as independent engine instances; their outputs are
/// concatenated in sample-id order.
pub fn multi_worker_run(cfg: &RunConfig, graph: &Graph) -> Result<RunResult, SamplingError> {
    if cfg.workers == 0 {
        return Err(SamplingError::Config("workers must be at least 1".into()));
    }
    let app = cfg.app.build(graph, cfg.seed)?;
    let app = app.as_ref();
    let ecfg = cfg.engine_config();
    let ranges = split_ranges(cfg.num_samples, cfg.workers);
    let start = Instant::now();

    let one = |r: Range<u64>| {
        let samples = seed_samples(app, graph, r, cfg.seed);
        engine::run(cfg.paradigm, app, graph, samples, &ecfg)
    };
    let runs = if ranges.len() == 1 {
        vec![one(ranges[0].clone())]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = ranges.iter().map(|r| s.spawn(|| one(r.clone()))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker thread panicked"))
                .collect::<Vec<_>>()
        })
    };
    let wall_time = start.elapsed();

    let mut samples = Vec::with_capacity(cfg.num_samples);
    let mut steps: Vec<StepRecord> = Vec::new();
    let mut hit_step_cap = false;
    let mut worker_sizes = Vec::with_capacity(runs.len());
    for run in runs {
        let run = run?;
        worker_sizes.push(run.samples.len());
        hit_step_cap |= run.hit_step_cap;
        for r in &run.steps {
            match steps.get_mut(r.step) {
                Some(acc) => acc.merge(r),
                None => steps.push(r.clone()),
            }
        }
        samples.extend(run.samples);
    }
    let total_vertices = samples.iter().map(Sample::vertex_count).sum();
    Ok(RunResult {
        report: RunReport {
            app: cfg.app.app.as_str().to_string(),
            paradigm: cfg.paradigm.as_str().to_string(),
            seed: cfg.seed,
            num_samples: samples.len(),
            workers: cfg.workers,
            steps,
            wall_time,
            total_vertices,
            hit_step_cap,
        },
        samples,
        worker_sizes,
    })
}

/// Both engines on one configuration.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub sp: RunReport,
    pub tp: RunReport,
    pub samples: Vec<Sample>,
}

impl Comparison {
    /// TP throughput over SP throughput.
    pub fn throughput_ratio(&self) -> f64 {
        let sp = self.sp.throughput();
        if sp > 0.0 {
            self.tp.throughput() / sp
        } else {
            0.0
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "app={}", self.tp.app);
        let _ = writeln!(s, "samples={}", self.tp.num_samples);
        let _ = writeln!(s, "outputs_equal=true");
        let _ = writeln!(s, "sp_wall_time_s={:.6}", self.sp.wall_time.as_secs_f64());
        let _ = writeln!(s, "tp_wall_time_s={:.6}", self.tp.wall_time.as_secs_f64());
        let _ = writeln!(s, "sp_throughput_samples_per_s={:.1}", self.sp.throughput());
        let _ = writeln!(s, "tp_throughput_samples_per_s={:.1}", self.tp.throughput());
        let _ = writeln!(s, "throughput_ratio_tp_over_sp={:.3}", self.throughput_ratio());
        let _ = writeln!(s, "sp_adjacency_fetches={}", self.sp.adjacency_fetches());
        let _ = writeln!(s, "tp_adjacency_fetches={}", self.tp.adjacency_fetches());
        let _ = writeln!(s, "tp_build_share={:.4}", self.tp.build_share());
        s
    }
}

/// Runs the sample-parallel and transit-parallel engines on the same
/// configuration, checks that they produced identical samples, and returns
/// both reports.
pub fn compare_paradigms(cfg: &RunConfig, graph: &Graph) -> Result<Comparison, SamplingError> {
    let with = |p| RunConfig {
        paradigm: p,
        ..cfg.clone()
    };
    let sp = multi_worker_run(&with(Paradigm::SampleParallel), graph)?;
    let tp = multi_worker_run(&with(Paradigm::TransitParallel), graph)?;
    if let Some(diff) = first_difference(&sp.samples, &tp.samples) {
        return Err(SamplingError::EngineMismatch(diff));
    }
    Ok(Comparison {
        sp: sp.report,
        tp: tp.report,
        samples: tp.samples,
    })
}

/// Description of the first sample that differs, if any.
pub fn first_difference(a: &[Sample], b: &[Sample]) -> Option<String> {
    if a.len() != b.len() {
        return Some(format!("{} samples vs {}", a.len(), b.len()));
    }
    a.iter().zip(b).find(|(x, y)| x != y).map(|(x, y)| {
        let step = (0..x.steps_taken().max(y.steps_taken()))
            .find(|&i| x.step(i) != y.step(i) || x.edges(i) != y.edges(i));
        match step {
            Some(i) => format!("sample {} differs at step {}", x.id, i),
            None => format!("sample {} differs in its roots", x.id),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::AppId;
    use crate::graph::generators;

    #[test]
    fn split_sizes() {
        let sizes: Vec<u64> = split_ranges(10, 4).iter().map(|r| r.end - r.start).collect();
        assert_eq!(sizes, vec![3, 3, 2, 2]);
        assert_eq!(split_ranges(0, 3).iter().map(|r| r.end - r.start).sum::<u64>(), 0);
        let r = split_ranges(7, 1);
        assert_eq!(r, vec![0..7]);
    }

    #[test]
    fn workers_do_not_change_samples() {
        let g = generators::power_law(500, 3, 1);
        let mut cfg = RunConfig::new(AppConfig::new(AppId::Khop));
        cfg.num_samples = 37;
        cfg.seed = 5;
        let one = multi_worker_run(&cfg, &g).unwrap();
        cfg.workers = 4;
        let four = multi_worker_run(&cfg, &g).unwrap();
        assert_eq!(four.worker_sizes, vec![10, 9, 9, 9]);
        assert_eq!(one.samples, four.samples);
        assert_eq!(one.report.next_calls(), four.report.next_calls());
    }

    #[test]
    fn report_totals_are_step_sums() {
        let g = generators::path(50);
        let mut cfg = RunConfig::new(AppConfig::new(AppId::DeepWalk));
        cfg.num_samples = 5;
        cfg.app.walk_length = 10;
        let r = multi_worker_run(&cfg, &g).unwrap().report;
        assert_eq!(r.steps.len(), 10);
        assert_eq!(r.next_calls(), 50);
        let text = r.to_text();
        assert!(text.contains("next_calls=50\n"));
        assert!(text.contains("throughput_samples_per_s="));
    }

    #[test]
    fn comparison_checks_equality() {
        let g = generators::power_law(300, 2, 4);
        let mut cfg = RunConfig::new(AppConfig::new(AppId::Khop));
        cfg.num_samples = 20;
        let c = compare_paradigms(&cfg, &g).unwrap();
        assert!(c.tp.adjacency_fetches() < c.sp.adjacency_fetches());
        assert!(c.to_text().contains("outputs_equal=true"));
    }
}
