use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use log::info;

use gsample::apps::{ImportanceDist, Node2vecFactors};
use gsample::graph::{generators, open_graph};
use gsample::run::{compare_paradigms, multi_worker_run, RunConfig};
use gsample::validate::{render_table, validate_distributions, ValidationConfig};
use gsample::{AppConfig, AppId, Graph, Layout, LoadOptions, Paradigm, SampleSetOutput};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParadigmArg {
    Sp,
    Tp,
}

impl From<ParadigmArg> for Paradigm {
    fn from(p: ParadigmArg) -> Self {
        match p {
            ParadigmArg::Sp => Paradigm::SampleParallel,
            ParadigmArg::Tp => Paradigm::TransitParallel,
        }
    }
}

/// Runs a graph sampling application under the sample-parallel or
/// transit-parallel engine.
#[derive(Debug, Parser)]
#[command(name = "gsample", version)]
struct Cli {
    /// deepwalk, ppr, node2vec, multirw, khop, layer, fastgcn, ladies, clustergcn or mvs.
    #[arg(long, required_unless_present = "validate")]
    app: Option<AppId>,
    /// Edge list ("src dst [weight]" per line) or binary graph cache.
    #[arg(long, conflicts_with = "synthetic")]
    graph: Option<PathBuf>,
    /// Generated graph: path:N, star:N, power-law:N:M or uniform:N:E.
    #[arg(long)]
    synthetic: Option<String>,
    /// Use edge weights, generating them where missing.
    #[arg(long)]
    weighted: bool,
    /// Add the reverse of every input edge.
    #[arg(long)]
    undirected: bool,
    #[arg(long, value_enum, default_value = "tp")]
    paradigm: ParadigmArg,
    /// Run both engines, check that they agree and report the speed ratio.
    #[arg(long)]
    compare: bool,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Independent engine instances over disjoint sample ranges.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    workers: u32,
    /// Threads per worker; 0 picks automatically.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Upper bound on steps for applications without a fixed length.
    #[arg(long)]
    step_cap: Option<usize>,

    /// Walk length for deepwalk, node2vec and multirw.
    #[arg(long)]
    walk_length: Option<usize>,
    /// Per-hop fanouts for khop.
    #[arg(long, value_delimiter = ',')]
    fanouts: Option<Vec<usize>>,
    /// Keep only distinct vertices per khop hop.
    #[arg(long)]
    unique: bool,
    /// node2vec return parameter.
    #[arg(long)]
    p: Option<f64>,
    /// node2vec in-out parameter.
    #[arg(long)]
    q: Option<f64>,
    /// Use p for returning and 1/q for neighbours of the previous vertex.
    #[arg(long)]
    node2vec_prose: bool,
    /// PPR termination probability.
    #[arg(long)]
    term_prob: Option<f64>,
    /// Maximum layer sample size.
    #[arg(long)]
    layer_max: Option<usize>,
    /// Vertices added per layer step.
    #[arg(long)]
    layer_step: Option<usize>,
    /// Batch size for fastgcn, ladies and mvs.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Vertices drawn per step for fastgcn, ladies and mvs.
    #[arg(long)]
    step_size: Option<usize>,
    /// Importance distribution: uniform or degree2.
    #[arg(long)]
    importance_dist: Option<ImportanceDist>,
    /// Clusters per clustergcn sample.
    #[arg(long)]
    clusters: Option<usize>,
    /// Total clustergcn clusters.
    #[arg(long)]
    num_clusters: Option<usize>,
    /// Roots per multirw sample.
    #[arg(long)]
    roots: Option<usize>,

    /// Sample file; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "final")]
    layout: Layout,
    /// Write the sample file in binary form.
    #[arg(long, requires = "output")]
    binary_output: bool,
    /// Run report (key=value lines).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Run the distribution checks and print the table.
    #[arg(long)]
    validate: bool,
    /// Draws per distribution check.
    #[arg(long, default_value_t = 1_000_000)]
    draws: usize,
}

impl Cli {
    fn app_config(&self, app: AppId) -> Result<AppConfig> {
        let mut cfg = AppConfig::new(app);
        if let Some(l) = self.walk_length {
            cfg.walk_length = l;
            cfg.multirw.walk_length = l;
        }
        if let Some(f) = &self.fanouts {
            cfg.khop.fanouts = f.clone();
        }
        cfg.khop.unique = self.unique;
        if let Some(p) = self.p {
            cfg.node2vec.p = p;
        }
        if let Some(q) = self.q {
            cfg.node2vec.q = q;
        }
        if self.node2vec_prose {
            cfg.node2vec.factors = Node2vecFactors::Prose;
        }
        if let Some(t) = self.term_prob {
            cfg.ppr.termination_probability = t;
        }
        if let Some(m) = self.layer_max {
            cfg.layer.max_size = m;
        }
        if let Some(s) = self.layer_step {
            cfg.layer.step_size = s;
        }
        if let Some(b) = self.batch_size {
            cfg.batch.batch_size = b;
        }
        if let Some(s) = self.step_size {
            cfg.batch.step_size = s;
        }
        if let Some(d) = self.importance_dist {
            cfg.batch.dist = d;
        }
        if let Some(c) = self.clusters {
            cfg.cluster.clusters_per_sample = c;
        }
        if self.num_clusters.is_some() {
            cfg.cluster.num_clusters = self.num_clusters;
        }
        if let Some(r) = self.roots {
            cfg.multirw.roots_per_sample = r;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn load_graph(&self) -> Result<Graph> {
        let opts = LoadOptions {
            weighted: self.weighted,
            undirected: self.undirected,
            seed: self.seed,
            ..LoadOptions::default()
        };
        match (&self.graph, &self.synthetic) {
            (Some(path), None) => {
                open_graph(path, &opts).with_context(|| format!("loading {}", path.display()))
            }
            (None, Some(spec)) => {
                let g = synthetic_graph(spec, self.seed)?;
                Ok(if self.weighted {
                    generators::with_random_weights(&g, opts.weight_range, self.seed)
                } else {
                    g
                })
            }
            _ => bail!("one of --graph or --synthetic is required"),
        }
    }
}

fn synthetic_graph(spec: &str, seed: u64) -> Result<Graph> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |i: usize| -> Result<usize> {
        parts
            .get(i)
            .with_context(|| format!("synthetic graph '{spec}' is missing a size"))?
            .parse()
            .with_context(|| format!("bad size in synthetic graph '{spec}'"))
    };
    let g = match parts[0] {
        "path" => generators::path(num(1)?),
        "star" => generators::star(num(1)?),
        "power-law" => generators::power_law(num(1)?, num(2)?, seed),
        "uniform" => generators::uniform_random(num(1)?, num(2)?, seed),
        other => bail!("unknown synthetic graph '{other}' (expected path, star, power-law or uniform)"),
    };
    if g.n_vertices() == 0 {
        bail!("synthetic graph '{spec}' has no vertices");
    }
    Ok(g)
}

fn remap_path(output: &Path) -> PathBuf {
    let mut p = output.as_os_str().to_owned();
    p.push(".remap");
    PathBuf::from(p)
}

fn write_samples(out: &SampleSetOutput, cli: &Cli) -> Result<()> {
    match &cli.output {
        Some(path) => {
            if cli.binary_output {
                let mut w = BufWriter::new(fs::File::create(path)?);
                out.write_binary(&mut w)?;
                w.flush()?;
            } else {
                out.write_text_file(path)?;
            }
            out.write_remap_file(&remap_path(path))?;
        }
        None => out.write_text(BufWriter::new(io::stdout().lock()))?,
    }
    Ok(())
}

fn write_report(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if cli.validate {
        let checks = validate_distributions(&ValidationConfig {
            draws: cli.draws,
            seed: cli.seed.max(1),
            ..ValidationConfig::default()
        });
        print!("{}", render_table(&checks));
        return Ok(checks.iter().all(|c| c.pass));
    }
    let app = cli.app.expect("required by clap");
    let app_cfg = cli.app_config(app)?;
    let graph = cli.load_graph()?;
    info!("graph: {} vertices, {} edges", graph.n_vertices(), graph.n_edges());

    let mut cfg = RunConfig::new(app_cfg);
    cfg.paradigm = cli.paradigm.into();
    cfg.seed = cli.seed;
    cfg.num_samples = cli.samples;
    cfg.workers = cli.workers as usize;
    cfg.threads = cli.threads;
    cfg.layout = cli.layout;
    if let Some(c) = cli.step_cap {
        cfg.step_cap = c;
    }

    if cli.compare {
        let cmp = compare_paradigms(&cfg, &graph)?;
        let out = SampleSetOutput::from_samples(&cmp.samples, &graph, cfg.layout);
        if cli.output.is_some() {
            write_samples(&out, cli)?;
        }
        print!("{}", cmp.to_text());
        if let Some(p) = &cli.report {
            fs::write(p, cmp.to_text())?;
        }
        return Ok(true);
    }

    let result = multi_worker_run(&cfg, &graph)?;
    write_samples(&result.output(&graph, cfg.layout), cli)?;
    write_report(&result.report.to_text(), cli.report.as_deref())?;
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
