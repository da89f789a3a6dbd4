//! `psdi-sat`: classification, solving, padding, reductions, instance
//! generation and benchmarks from the command line.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use psdi::exec::{self, Exec};

/// Exit code for a satisfiable answer.
pub const EXIT_SAT: u8 = 10;
/// Exit code for an unsatisfiable answer.
pub const EXIT_UNSAT: u8 = 20;
/// Exit code for a violated solver precondition.
pub const EXIT_PRECONDITION: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "psdi-sat", version, about = "Partial-polymorphism based SAT/CSP toolkit")]
pub struct Cli {
    /// Worker threads; 1 runs sequentially, 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Place each explicit relation in the near / edge / universal hierarchy.
    Classify(ClassifyArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Draw a random parity pad and check its universality.
    Pad(PadArgs),
    /// Run one of the reductions.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Write a generated instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Seeded scaling runs, one CSV row per instance.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Instance file, or a file of tuples such as `001 010 100`.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub max_level: usize,
    /// Domain size for a bare tuple file.
    #[arg(long, default_value_t = 2)]
    pub domain: u32,
    /// Extra polymorphism pattern to test, e.g. `xxy>y;xyx>y`.
    #[arg(long)]
    pub pattern: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "mitm2e")]
    pub algo: String,
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub restarts: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Level of the near operation assumed by local search.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub skip_precheck: bool,
    /// Keep the file's variable order instead of sorting by degree.
    #[arg(long)]
    pub no_reorder: bool,
    /// Include wall time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct PadArgs {
    /// Operation, e.g. `edge2`, `nu:4`, `universal:3`.
    #[arg(long)]
    pub op: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `exact`, `sample:N` or `none`.
    #[arg(long, default_value = "exact")]
    pub verify: String,
    /// Pad size; defaults to the recommended size.
    #[arg(long)]
    pub m: Option<usize>,
    /// Write the pad sets here, one line per pad.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ReduceCommand {
    /// Subset Sum to a family of 2-edge instances.
    Subsetsum(SubsetSumArgs),
    /// CNF to a parity-padded instance.
    Seth(SethArgs),
}

#[derive(Debug, Args)]
pub struct SubsetSumArgs {
    /// Whitespace-separated weights.
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long)]
    pub target: u64,
    /// Defaults to the rounded-up square root of the item count.
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Search the carry guesses with the meet-in-the-middle solver.
    #[arg(long)]
    pub solve: bool,
    /// Write every carry-guess instance into this directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SethArgs {
    #[arg(long)]
    pub cnf: PathBuf,
    #[arg(long, default_value = "edge2")]
    pub op: String,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Instance output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pad-set output path.
    #[arg(long)]
    pub pad_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random k-CNF, or a DIMACS file converted to the instance format.
    Ksat {
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        from_dimacs: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Random 1-in-k constraints.
    Exactsat {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Ternary linear equations modulo p.
    Linear {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Random binary CSP.
    Binary {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 0.3)]
        tightness: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Graph colouring.
    Coloring {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
        #[arg(long, default_value_t = 3)]
        colors: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Mixed symmetric 3-edge instance.
    Sym3e {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Subset-Sum weights (first line) and target (second line).
    Subsetsum {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        bits: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "mitm2e")]
    pub algo: String,
    #[arg(long, default_value_t = 8)]
    pub n_min: usize,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    /// Seeds per size.
    #[arg(long, default_value_t = 3)]
    pub seeds: u64,
    /// Domain size of the generated family.
    #[arg(long, default_value_t = 2)]
    pub d: u32,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads(threads: usize) -> anyhow::Result<()> {
    if threads == 1 {
        exec::set_default(Exec::Sequential);
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    exec::set_default(Exec::Parallel);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(psdi::Error::Precondition(msg)) = e.downcast_ref::<psdi::Error>() {
                eprintln!("precondition violated: {msg}");
                return ExitCode::from(EXIT_PRECONDITION);
            }
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
