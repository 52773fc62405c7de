//! The `landskew` command-line tool.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod manifest;
pub mod svg;

#[derive(Debug, Parser)]
#[command(name = "landskew", version, about = "Elastic alignment of persistence landscapes")]
pub struct Cli {
    /// Cap on worker threads; 0 uses every core.
    #[arg(long, global = true, env = "LANDSKEW_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample point clouds from a simulation design.
    Simulate(SimulateArgs),
    /// Persistence diagrams of point clouds.
    Ph(PhArgs),
    /// Landscapes of diagrams on a common padded domain.
    Landscape(LandscapeArgs),
    /// Karcher mean and warps of a landscape sample.
    Align(AlignArgs),
    /// Amplitude principal components and scores.
    Pca(PcaArgs),
    /// Map diagrams through the inverse warps.
    Denoise(DenoiseArgs),
    /// Compare the elastic means of two groups.
    Compare(CompareArgs),
    /// Run an experiment file end to end.
    Pipeline(PipelineArgs),
    /// Render a figure as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment file whose [[simulate]] designs are used.
    #[arg(long, conflicts_with_all = ["design", "n_clouds", "noise", "size", "fixed_radii", "equispaced"])]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = ["circle", "two-circles", "spirals", "torus"], default_value = "circle")]
    pub design: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub n_clouds: Option<usize>,
    /// Additive noise standard deviation as a multiple of the radius.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Points per cloud as MIN,MAX.
    #[arg(long, value_delimiter = ',')]
    pub size: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub fixed_radii: Option<Vec<f64>>,
    #[arg(long)]
    pub equispaced: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PhArgs {
    /// Cloud CSV files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    #[arg(long, value_parser = ["rips", "cech2d"], default_value = "rips")]
    pub complex: String,
    #[arg(long, value_parser = ["radius", "diameter"], default_value = "radius")]
    pub convention: String,
    #[arg(long)]
    pub max_scale: Option<f64>,
    #[arg(long)]
    pub max_points: Option<usize>,
    #[arg(long)]
    pub subsample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub subsample_seed: u64,
    #[arg(long)]
    pub top_j: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// Diagram JSON files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Number of levels; defaults to the largest overlap in the sample.
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "T", default_value_t = landskew::landscape::DEFAULT_GRID)]
    pub t: usize,
    #[arg(long, default_value_t = landskew::landscape::DEFAULT_DOMAIN_PAD)]
    pub pad: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct KarcherArgs {
    #[arg(long, default_value_t = landskew::elastic::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = landskew::elastic::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    /// Landscape JSON files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[command(flatten)]
    pub karcher: KarcherArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PcaArgs {
    /// Landscape JSON files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Number of components.
    #[arg(long = "B", default_value_t = 2)]
    pub b: usize,
    /// Fit on the raw landscapes instead of the aligned ones.
    #[arg(long)]
    pub no_align: bool,
    #[command(flatten)]
    pub karcher: KarcherArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    /// Diagram JSON files or directories of them.
    #[arg(long, required = true, num_args = 1..)]
    pub diagrams: Vec<PathBuf>,
    /// Warp JSON files or directories of them, one per diagram.
    #[arg(long, required = true, num_args = 1..)]
    pub warps: Vec<PathBuf>,
    /// Domain end of the landscapes the warps were computed on; defaults to
    /// the padded common domain of the diagrams.
    #[arg(long)]
    pub scale_s: Option<f64>,
    #[arg(long, default_value_t = landskew::landscape::DEFAULT_DOMAIN_PAD)]
    pub pad: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, required = true, num_args = 1..)]
    pub group_a: Vec<PathBuf>,
    #[arg(long, required = true, num_args = 1..)]
    pub group_b: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "a,b")]
    pub labels: Vec<String>,
    #[command(flatten)]
    pub karcher: KarcherArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// TOML or JSON experiment file.
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Landscapes,
    Mean,
    Diagrams,
    Warps,
    Scores,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiagramStage {
    Original,
    Transformed,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub kind: PlotKind,
    /// Data files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Landscape level to draw, starting at 1.
    #[arg(long, default_value_t = 1)]
    pub level: usize,
    /// Coordinates of denoised diagrams to draw.
    #[arg(long, value_enum, default_value_t = DiagramStage::Transformed)]
    pub stage: DiagramStage,
    /// Mean landscape for `mean` plots.
    #[arg(long)]
    pub mean: Option<PathBuf>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let threads = cli.threads;
    match landskew::par::with_threads(threads, move || commands::dispatch(cli.command, command_line)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("landskew: {e}");
            e.kind.exit_code()
        }
    }
}
