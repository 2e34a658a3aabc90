use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use swdft::window::parse_extents;
use swdft::{Normalization, WindowSpec};

#[derive(Debug, Parser)]
#[command(
    name = "swdft",
    version,
    about = "Sliding window DFTs over 1D, 2D and k-dimensional arrays"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transform an SWDF container or a 2D real CSV file.
    Transform(TransformArgs),
    /// Check the tree transform against the direct sum and per-window FFTs.
    Verify(VerifyArgs),
    /// Time the 2D algorithms over a range of window sizes and emit CSV.
    Bench(BenchArgs),
    /// Print predicted operation counts and memory for one configuration.
    Opcount(OpcountArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Tree,
    Fft,
    Naive,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Window extents, e.g. 8x8, or 8 for a 1D window. Every extent must be a power of two.
    #[arg(long, value_parser = parse_window)]
    pub window: WindowSpec,

    /// none, paper-1d, paper-2d or unitary.
    #[arg(long, default_value_t = Normalization::None)]
    pub normalization: Normalization,

    /// Memory budget in bytes.
    #[arg(long, env = "SWDFT_MEM_BUDGET", default_value_t = 4 << 30, value_parser = parse_budget)]
    pub budget: u64,

    /// Worker threads; more than one enables the parallel level loop.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,
}

impl Common {
    pub fn spec(&self) -> WindowSpec {
        self.window.clone().with_normalization(self.normalization)
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Input array (.csv for 2D real data, otherwise an SWDF container).
    #[arg(long)]
    pub input: PathBuf,

    /// Output SWDF container.
    #[arg(long)]
    pub output: PathBuf,

    #[arg(long, value_enum, default_value_t = AlgorithmArg::Tree)]
    pub algorithm: AlgorithmArg,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Input array. Without it a seeded random array of --size is used.
    #[arg(long)]
    pub input: Option<PathBuf>,

    #[arg(long, value_parser = parse_size, default_value = "12x12")]
    pub size: ::std::vec::Vec<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub common: Common,

    /// Flip one bit of the tree output before comparing.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_parser = parse_size, default_value = "100x100")]
    pub size: ::std::vec::Vec<usize>,

    /// Comma-separated square window sizes or NxM extents.
    #[arg(long, value_delimiter = ',', value_parser = parse_bench_window, default_value = "4,8,16,32,64")]
    pub windows: Vec<WindowSpec>,

    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "naive,fft,tree"
    )]
    pub algorithms: Vec<AlgorithmArg>,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub repetitions: u32,

    #[arg(long, default_value_t = 0x5eed)]
    pub seed: u64,

    /// Skip naive runs predicted to take more operations than this.
    #[arg(long)]
    pub max_naive_ops: Option<u64>,

    #[arg(long, env = "SWDFT_MEM_BUDGET", default_value_t = 4 << 30, value_parser = parse_budget)]
    pub budget: u64,

    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,

    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OpcountArgs {
    #[arg(long, value_parser = parse_window)]
    pub window: WindowSpec,

    #[arg(long, value_parser = parse_size)]
    pub size: ::std::vec::Vec<usize>,

    #[arg(long, value_enum, default_value_t = AlgorithmArg::Tree)]
    pub algorithm: AlgorithmArg,
}

fn parse_window(s: &str) -> Result<WindowSpec, String> {
    s.parse().map_err(|e: swdft::SwdftError| e.to_string())
}

/// Like [`parse_window`], but a bare size means a square 2D window.
fn parse_bench_window(s: &str) -> Result<WindowSpec, String> {
    match s.trim().parse::<usize>() {
        Ok(n) => WindowSpec::from_sizes(&[n, n]).map_err(|e| e.to_string()),
        Err(_) => parse_window(s),
    }
}

fn parse_size(s: &str) -> Result<Vec<usize>, String> {
    parse_extents(s).map_err(|e| e.to_string())
}

fn parse_budget(s: &str) -> Result<u64, String> {
    match s.trim().parse::<u64>() {
        Ok(0) => Err("budget must be positive".into()),
        Ok(b) => Ok(b),
        Err(_) => Err(format!("malformed byte count {s:?}")),
    }
}
