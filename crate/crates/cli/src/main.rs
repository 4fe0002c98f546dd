//! `tqf`: discriminants, enumeration and reduction of ternary forms.

mod commands;
mod manifest;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit status 1: something went wrong inside the tool or the machine.
/// Exit status 2: the request or its input was malformed.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn io(context: String, e: std::io::Error) -> Self {
        CliError::Internal(format!("{context}: {e}"))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<tqf_core::Error> for CliError {
    fn from(e: tqf_core::Error) -> Self {
        use tqf_core::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidDegree(_)
            | E::CoefficientCount { .. }
            | E::Arity(..)
            | E::DegreeMismatch(_)
            | E::InvalidPrime(_)
            | E::Range { .. }
            | E::State(_)
            | E::Parse { .. }
            | E::BadMagic { .. }
            | E::Truncated(_)
            | E::ExponentOutOfRange { .. }
            | E::ZeroCoefficient(_)
            | E::SingularInput
            | E::BadReduction(_)
            | E::Shape(_)
            | E::TreeCacheMissing { .. } => CliError::Usage(msg),
            _ => CliError::Internal(msg),
        }
    }
}

#[derive(Parser)]
#[command(name = "tqf", version, about = "Ternary forms of small discriminant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminant evaluation and polynomial files.
    #[command(subcommand)]
    Disc(DiscCommand),
    /// Monomial tree caches.
    #[command(subcommand)]
    Tree(TreeCommand),
    /// List the jobs of a search, one `index tuple` per line.
    Jobs(JobsArgs),
    /// Run jobs of a search.
    Search(SearchArgs),
    /// Merge record files into one sorted, duplicate-free file.
    Merge(MergeArgs),
    /// Remove records equivalent under the bounded orbit search.
    Reduce(ReduceArgs),
    /// Point-count fingerprints and a report of colliding classes.
    Fingerprint(FingerprintArgs),
    /// Search, merge, reduce and fingerprint in one working directory.
    Pipeline(PipelineArgs),
    /// Check that every output recorded in a manifest is unchanged.
    Verify { manifest: PathBuf },
}

#[derive(Subcommand)]
pub enum DiscCommand {
    /// Print the discriminant of one form.
    Eval {
        #[arg(short, long, default_value_t = 4)]
        degree: u32,
        /// Form as a polynomial, e.g. `x^4 + y^4 + z^4`.
        #[arg(long, conflicts_with = "coeffs")]
        form: Option<String>,
        /// Coefficients in canonical order (a_{d00}, a_{d−1,1,0}, ...).
        #[arg(allow_negative_numbers = true, required_unless_present = "form")]
        coeffs: Vec<i64>,
    },
    /// Write the discriminant polynomial of one degree.
    Poly {
        #[arg(short, long)]
        degree: u32,
        #[arg(short, long)]
        output: PathBuf,
        /// Write text even without a `.txt` extension.
        #[arg(long)]
        text: bool,
    },
    /// Transcode a polynomial file; the output format follows its extension.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long)]
        text: bool,
    },
}

#[derive(Subcommand)]
pub enum TreeCommand {
    /// Build the discriminant tree for a degree in the search variable order.
    Build {
        #[arg(short, long)]
        degree: u32,
        /// Cache directory; defaults to `$TQF_TREE_CACHE`, then `tqf-cache`.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Print the level sizes of a cached tree.
    Info {
        #[arg(short, long)]
        degree: u32,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
pub struct SearchBounds {
    #[arg(long, default_value_t = 4)]
    pub degree: u32,
    /// Coefficient bound.
    #[arg(long, default_value_t = 9)]
    pub cmax: i64,
    /// Discriminant bound.
    #[arg(long, default_value_t = 10_000_000)]
    pub dmax: u64,
}

#[derive(Args)]
pub struct JobsArgs {
    #[command(flatten)]
    pub bounds: SearchBounds,
    /// Print only the number of jobs.
    #[arg(long)]
    pub count: bool,
}

#[derive(Args, Clone)]
pub struct SearchArgs {
    #[command(flatten)]
    pub bounds: SearchBounds,
    /// Job indices: `7`, `0..35` (inclusive) or a comma list of both.
    #[arg(long)]
    pub job: String,
    /// Run only this shard; all shards when omitted.
    #[arg(long)]
    pub shard: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub shards: u32,
    #[arg(long, default_value = "tree")]
    pub engine: String,
    /// Directory for checkpoints; defaults to the output directory.
    #[arg(long)]
    pub checkpoint_dir: Option<PathBuf>,
    /// Completed prefixes between checkpoints.
    #[arg(long, default_value_t = 64)]
    pub interval: u64,
    /// Output directory for per-job record files.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long)]
    pub tree_cache: Option<PathBuf>,
    /// Manifest to record the stage in.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct MergeArgs {
    /// Record files, or directories whose `.txt` files are merged.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct ReduceArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Orbit norm bound; repeat for successive passes.
    #[arg(long = "bound", required = true)]
    pub bounds: Vec<i64>,
    /// Removed records with the kept record and transform word.
    #[arg(long)]
    pub audit: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct FingerprintArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Collision report.
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long, default_value_t = 256)]
    pub pmax: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub bounds: SearchBounds,
    #[arg(long, default_value = "direct")]
    pub engine: String,
    /// Working directory; rerunning resumes from its checkpoints.
    #[arg(long)]
    pub work: PathBuf,
    /// Reduction bounds; defaults to `cmax` then `cmax²`.
    #[arg(long = "bound")]
    pub bounds_reduce: Vec<i64>,
    #[arg(long, default_value_t = 256)]
    pub pmax: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    #[arg(long)]
    pub tree_cache: Option<PathBuf>,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Disc(c) => commands::disc(c),
        Command::Tree(c) => commands::tree(c),
        Command::Jobs(a) => commands::jobs(a),
        Command::Search(a) => commands::search(a),
        Command::Merge(a) => commands::merge(a).map(|_| ()),
        Command::Reduce(a) => commands::reduce(a).map(|_| ()),
        Command::Fingerprint(a) => commands::fingerprint(a).map(|_| ()),
        Command::Pipeline(a) => pipeline::run(a),
        Command::Verify { manifest } => commands::verify(&manifest),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Internal(m) => eprintln!("internal error: {m}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
