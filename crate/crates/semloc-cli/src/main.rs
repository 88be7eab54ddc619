//! `semloc`: semantic-graph multi-robot localization pipeline.
//!
//! Subcommands cover the full pipeline (extract → match → reject →
//! localize) plus the synthetic benchmark tools (synth, eval, sweep).
//! Exit codes: 0 success, 2 bad input or usage, 3 localization failure.

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semloc_core::descriptor::DescriptorKind;
use semloc_core::error::Error;
use semloc_core::extraction::{backproject, merge_vertices, segment};
use semloc_core::graph::SemanticGraph;
use semloc_core::io;
use semloc_core::pipeline::{run_pipeline, PipelineConfig};
use semloc_core::rejection::{reject_with, EtaDenominator};
use semloc_core::scenario::{
    self, evaluate, evaluate_pipeline, generate_scenario, random_rigid_transform, ScenarioConfig,
    SweepAxis, SweepPlan,
};
use semloc_core::seed as seeding;

#[derive(Parser, Debug)]
#[command(name = "semloc", version, about = "Semantic-graph multi-robot global localization")]
struct Cli {
    /// Worker threads (0 = auto). The SEMLOC_THREADS environment variable
    /// is used when the flag is absent.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a graph file from a manifest of semantic/depth/pose frames.
    Extract(ExtractArgs),
    /// Match two graph files by vertex descriptors.
    Match(MatchArgs),
    /// Filter a match file with the neighbor-constraint rejection.
    Reject(RejectArgs),
    /// Full localization: match, reject, RANSAC; prints the transform.
    Localize(LocalizeArgs),
    /// Generate a synthetic scenario with planted ground truth.
    Synth(SynthArgs),
    /// Score a localization result against ground truth.
    Eval(EvalArgs),
    /// Sweep a parameter axis, localizing with and without rejection.
    Sweep(SweepArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DescriptorArg {
    Histogram,
    RandomWalk,
}

impl From<DescriptorArg> for DescriptorKind {
    fn from(d: DescriptorArg) -> Self {
        match d {
            DescriptorArg::Histogram => DescriptorKind::Histogram,
            DescriptorArg::RandomWalk => DescriptorKind::RandomWalk,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EtaDenominatorArg {
    Current,
    Original,
}

impl From<EtaDenominatorArg> for EtaDenominator {
    fn from(d: EtaDenominatorArg) -> Self {
        match d {
            EtaDenominatorArg::Current => EtaDenominator::Current,
            EtaDenominatorArg::Original => EtaDenominator::Original,
        }
    }
}

/// Pipeline tunables shared by `match`, `reject`, `localize` and `sweep`.
/// A TOML config file provides the base values; flags override it.
#[derive(Args, Debug, Clone)]
struct PipelineArgs {
    /// TOML file deserializing into the pipeline configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    edge_threshold: Option<f64>,
    /// Neighbor-constraint threshold, meters.
    #[arg(long)]
    nei_threshold: Option<f64>,
    #[arg(long, value_enum)]
    descriptor: Option<DescriptorArg>,
    /// Semantic class count; inferred from the graphs when absent.
    #[arg(long)]
    labels: Option<usize>,
    /// Random walks per vertex.
    #[arg(long)]
    walks: Option<usize>,
    /// Random walk depth (labels per walk).
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    similarity_threshold: Option<f64>,
    /// Bad-match ratio bound of the rejection loop, in (0, 1).
    #[arg(long)]
    eta: Option<f64>,
    /// What the rejection guard compares against: the shrinking survivor
    /// count or the original match count.
    #[arg(long, value_enum)]
    eta_denominator: Option<EtaDenominatorArg>,
    /// RANSAC accept deviation, meters.
    #[arg(long)]
    ransac_threshold: Option<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Minimum consensus size for a RANSAC model.
    #[arg(long)]
    min_inliers: Option<usize>,
    /// Master seed for all randomness.
    #[arg(long)]
    seed: Option<u64>,
}

impl PipelineArgs {
    fn build(&self) -> Result<PipelineConfig, Error> {
        let mut cfg: PipelineConfig = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str(&text).map_err(|e| Error::Parse {
                    path: path.display().to_string(),
                    line: 0,
                    msg: e.to_string(),
                })?
            }
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.edge_threshold {
            cfg.edge_threshold = v;
        }
        if let Some(v) = self.nei_threshold {
            cfg.nei_threshold = v;
        }
        if let Some(v) = self.descriptor {
            cfg.descriptor = v.into();
        }
        if self.labels.is_some() {
            cfg.label_count = self.labels;
        }
        if let Some(v) = self.walks {
            cfg.walk_count = v;
        }
        if let Some(v) = self.depth {
            cfg.walk_depth = v;
        }
        if let Some(v) = self.similarity_threshold {
            cfg.similarity_threshold = v;
        }
        if let Some(v) = self.eta {
            cfg.eta = v;
        }
        if let Some(v) = self.eta_denominator {
            cfg.eta_denominator = v.into();
        }
        if let Some(v) = self.ransac_threshold {
            cfg.ransac.threshold = v;
        }
        if let Some(v) = self.iterations {
            cfg.ransac.iterations = v;
        }
        if let Some(v) = self.min_inliers {
            cfg.ransac.min_inliers = v;
        }
        if let Some(v) = self.seed {
            cfg = cfg.with_seed(v);
        }
        cfg.validate()?;
        match toml::to_string(&cfg) {
            Ok(text) => {
                eprintln!("# effective config");
                for line in text.lines() {
                    eprintln!("# {line}");
                }
            }
            Err(e) => eprintln!("# (config echo failed: {e})"),
        }
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Manifest listing `semantic depth meta` file triples, one per line.
    #[arg(long)]
    manifest: PathBuf,
    /// Output graph file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 15.0)]
    edge_threshold: f64,
    #[arg(long, default_value_t = 50)]
    min_blob_size: usize,
    /// Labels to skip during segmentation (stuff classes), comma separated.
    #[arg(long, value_delimiter = ',')]
    ignore_labels: Vec<u32>,
    #[arg(long, default_value_t = 1.5)]
    merge_radius: f64,
}

#[derive(Args, Debug)]
struct MatchArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
}

#[derive(Args, Debug)]
struct RejectArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Input match file.
    #[arg(long)]
    matches: PathBuf,
    /// Output (filtered) match file.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Print ms=0 in the stats line (for byte-reproducible output).
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct LocalizeArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    target: PathBuf,
    /// Write the estimated transform here as well as to stdout.
    #[arg(long)]
    out_transform: Option<PathBuf>,
    /// Write the final inlier matches here.
    #[arg(long)]
    out_matches: Option<PathBuf>,
    /// Ground-truth file; enables the stats line.
    #[arg(long)]
    gt: Option<PathBuf>,
    /// Skip the rejection stage (the baseline pipeline).
    #[arg(long)]
    no_reject: bool,
    /// Evaluation inlier distance threshold, meters.
    #[arg(long, default_value_t = scenario::DEFAULT_TP)]
    tp: f64,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Print ms=0 in the stats line (for byte-reproducible output).
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 300)]
    objects: usize,
    #[arg(long, default_value_t = 8)]
    labels: u32,
    /// Scene cube side, meters.
    #[arg(long, default_value_t = 100.0)]
    area: f64,
    #[arg(long, default_value_t = 0.6)]
    overlap: f64,
    /// Position noise sigma on shared target vertices, meters.
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    /// Outlier vertices per graph as a fraction of the object count.
    #[arg(long, default_value_t = 0.2)]
    outlier_rate: f64,
    #[arg(long, default_value_t = 15.0)]
    edge_threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Planted transform file (12 reals); random when absent.
    #[arg(long)]
    transform_file: Option<PathBuf>,
    #[arg(long)]
    out_query: PathBuf,
    #[arg(long)]
    out_target: PathBuf,
    #[arg(long)]
    out_truth: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Estimated transform file.
    #[arg(long)]
    transform: PathBuf,
    /// Final match file produced by `localize`.
    #[arg(long)]
    matches: PathBuf,
    #[arg(long, default_value_t = scenario::DEFAULT_TP)]
    tp: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: AxisArg,
    /// Axis values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 300)]
    objects: usize,
    #[arg(long, default_value_t = 8)]
    scenario_labels: u32,
    #[arg(long, default_value_t = 100.0)]
    area: f64,
    #[arg(long, default_value_t = 0.6)]
    overlap: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma: f64,
    #[arg(long, default_value_t = 0.2)]
    outlier_rate: f64,
    #[arg(long, default_value_t = scenario::DEFAULT_TP)]
    tp: f64,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Zero the ms columns (for byte-reproducible output).
    #[arg(long)]
    no_timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AxisArg {
    RansacThreshold,
    OverlapRate,
    Eta,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::RansacThreshold => SweepAxis::RansacThreshold,
            AxisArg::OverlapRate => SweepAxis::OverlapRate,
            AxisArg::Eta => SweepAxis::Eta,
        }
    }
}

fn cmd_extract(args: &ExtractArgs) -> Result<(), Error> {
    let entries = io::load_manifest(&args.manifest)?;
    if entries.is_empty() {
        return Err(Error::InvalidParameter("manifest lists no frames".into()));
    }
    let ignored: HashSet<u32> = args.ignore_labels.iter().copied().collect();
    let mut observations = Vec::new();
    for entry in &entries {
        let frame = io::load_frame(entry)?;
        for blob in segment(&frame, args.min_blob_size, &ignored) {
            observations.push(backproject(&blob, &frame)?);
        }
    }
    eprintln!("extracted {} observations from {} frames", observations.len(), entries.len());
    let vertices = merge_vertices(&observations, args.merge_radius)?;
    eprintln!("merged into {} vertices", vertices.len());
    let graph = SemanticGraph::build(vertices, args.edge_threshold)?;
    io::save_graph(&args.out, &graph)?;
    Ok(())
}

fn load_pair(query: &PathBuf, target: &PathBuf) -> Result<(SemanticGraph, SemanticGraph), Error> {
    Ok((io::load_graph(query)?, io::load_graph(target)?))
}

fn compute_descriptors(
    g: &SemanticGraph,
    other: &SemanticGraph,
    cfg: &PipelineConfig,
) -> Result<semloc_core::DescriptorSet, Error> {
    use semloc_core::DescriptorSet;
    match cfg.descriptor {
        DescriptorKind::Histogram => {
            let label_count = cfg.label_count.unwrap_or_else(|| {
                g.max_label()
                    .into_iter()
                    .chain(other.max_label())
                    .max()
                    .map_or(1, |m| m as usize + 1)
            });
            DescriptorSet::histogram(g, label_count)
        }
        DescriptorKind::RandomWalk => {
            DescriptorSet::random_walk(g, cfg.walk_count, cfg.walk_depth, cfg.seed)
        }
    }
}

fn cmd_match(args: &MatchArgs) -> Result<(), Error> {
    let cfg = args.pipeline.build()?;
    let (gq, gt) = load_pair(&args.query, &args.target)?;
    let dq = compute_descriptors(&gq, &gt, &cfg)?;
    let dt = compute_descriptors(&gt, &gq, &cfg)?;
    let matches = semloc_core::matching::match_graphs(&gq, &dq, &gt, &dt, cfg.similarity_threshold)?;
    eprintln!("{} matches above threshold {}", matches.len(), cfg.similarity_threshold);
    io::save_matches(&args.out, &matches)?;
    Ok(())
}

fn cmd_reject(args: &RejectArgs) -> Result<(), Error> {
    let cfg = args.pipeline.build()?;
    let (gq, gt) = load_pair(&args.query, &args.target)?;
    let m0 = io::load_matches(&args.matches)?;
    let start = Instant::now();
    let survivors = reject_with(&gq, &gt, &m0, cfg.nei_threshold, cfg.eta, cfg.eta_denominator)?;
    let ms = if args.no_timing { 0.0 } else { start.elapsed().as_secs_f64() * 1e3 };
    io::save_matches(&args.out, &survivors)?;
    println!(
        "rejected={} survivors={} ms={:.3}",
        m0.len() - survivors.len(),
        survivors.len(),
        ms
    );
    Ok(())
}

fn cmd_localize(args: &LocalizeArgs) -> Result<(), Error> {
    let mut cfg = args.pipeline.build()?;
    if args.no_reject {
        cfg.use_rejection = false;
    }
    let (gq, gt) = load_pair(&args.query, &args.target)?;
    let report = run_pipeline(&gq, &gt, &cfg)?;
    println!("{}", io::format_transform(&report.result.transform));
    if let Some(path) = &args.out_transform {
        io::save_transform(path, &report.result.transform)?;
    }
    if let Some(path) = &args.out_matches {
        io::save_matches(path, &report.result.inlier_matches)?;
    }
    if let Some(gt_path) = &args.gt {
        let truth = io::load_truth(gt_path)?;
        let eval = evaluate_pipeline(&report, &truth, &gq, &gt, args.tp);
        let ms = if args.no_timing { 0.0 } else { report.timings.total() };
        println!(
            "t_err={:.6} r_err={:.6} inliers={} ms={:.3}",
            eval.translation_error,
            eval.rotation_error,
            report.result.inlier_matches.len(),
            ms
        );
    }
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<(), Error> {
    let planted = match &args.transform_file {
        Some(path) => io::load_transform(path)?,
        None => {
            let mut rng = rand_seeded(seeding::derive2(args.seed, seeding::DOMAIN_SCENARIO, 1, 0));
            random_rigid_transform(&mut rng, args.area)
        }
    };
    let cfg = ScenarioConfig {
        object_count: args.objects,
        label_count: args.labels,
        area: args.area,
        overlap_rate: args.overlap,
        position_noise_sigma: args.sigma,
        outlier_vertex_rate: args.outlier_rate,
        planted_transform: planted,
        edge_threshold: args.edge_threshold,
        seed: args.seed,
    };
    let (gq, gt, truth) = generate_scenario(&cfg)?;
    io::save_graph(&args.out_query, &gq)?;
    io::save_graph(&args.out_target, &gt)?;
    io::save_truth(&args.out_truth, &truth)?;
    eprintln!(
        "scenario: {} query vertices, {} target vertices, {} shared",
        gq.len(),
        gt.len(),
        truth.matches.len()
    );
    Ok(())
}

fn rand_seeded(seed_value: u64) -> rand_chacha::ChaCha8Rng {
    use rand_chacha::rand_core::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed_value)
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Error> {
    let (gq, gt) = load_pair(&args.query, &args.target)?;
    let truth = io::load_truth(&args.truth)?;
    let transform = io::load_transform(&args.transform)?;
    let matches = io::load_matches(&args.matches)?;
    matches.validate(&gq, &gt)?;
    let result = semloc_core::RegistrationResult {
        transform,
        inlier_matches: matches,
        residual_rms: 0.0,
    };
    let eval = evaluate(&result, &truth, &gq, &gt, args.tp);
    println!(
        "t_err={:.6} r_err={:.6} recall={:.6} precision={:.6} n_final={}",
        eval.translation_error, eval.rotation_error, eval.recall, eval.precision, eval.final_match_count
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Error> {
    let pipeline = args.pipeline.build()?;
    let scenario_cfg = ScenarioConfig {
        object_count: args.objects,
        label_count: args.scenario_labels,
        area: args.area,
        overlap_rate: args.overlap,
        position_noise_sigma: args.sigma,
        outlier_vertex_rate: args.outlier_rate,
        planted_transform: semloc_core::RigidTransform::identity(),
        edge_threshold: pipeline.edge_threshold,
        seed: pipeline.seed,
    };
    let plan = SweepPlan { scenario: scenario_cfg, pipeline, t_p: args.tp, trials: args.trials };
    let mut rows = scenario::sweep(args.axis.into(), &args.values, &plan)?;
    if args.no_timing {
        for row in &mut rows {
            row.reject_ms = 0.0;
            row.ransac_ms = 0.0;
        }
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(&args.out)?);
    scenario::write_sweep_csv(&rows, &mut file)?;
    use std::io::Write;
    file.flush()?;
    eprintln!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Match(args) => cmd_match(args),
        Command::Reject(args) => cmd_reject(args),
        Command::Localize(args) => cmd_localize(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("SEMLOC_THREADS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if threads > 0 {
        builder = builder.num_threads(threads);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: failed to build thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_localization_failure() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
