//! `cbfs` — cluster-BFS and distance-oracle command line suite.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

mod bench;
mod cbfs_cmd;
mod common;
mod convert;
mod ll_cmd;
mod pll_cmd;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "cbfs",
    version,
    about = "Parallel cluster-BFS and distance oracles"
)]
pub struct Cli {
    /// Worker threads (0 = all available cores)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Output format for reports and dumps
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a text edge list into a validated binary graph cache
    Convert {
        /// Input edge list ("u v" per line, '#' comments)
        input: PathBuf,
        /// Output cache path
        #[arg(long)]
        out: PathBuf,
        /// Keep arc directions instead of symmetrizing
        #[arg(long)]
        directed: bool,
    },

    /// Run one cluster-BFS and dump per-vertex distance vectors
    Cbfs {
        /// Graph file (binary cache or text edge list)
        #[arg(long)]
        graph: PathBuf,
        /// Treat a text edge list as directed
        #[arg(long)]
        directed: bool,
        /// Cluster capacity
        #[arg(long, default_value_t = 64)]
        k: usize,
        /// Cluster diameter bound
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Build the cluster around this center vertex
        #[arg(long, conflicts_with = "cluster_file")]
        center: Option<u32>,
        /// Load the cluster from a text file ("d k v1 ... vk")
        #[arg(long)]
        cluster_file: Option<PathBuf>,
        /// Write the dump here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dump raw vectors (delta + subset words) instead of decoded distances
        #[arg(long)]
        raw: bool,
    },

    /// Build the cluster landmark index under a per-vertex byte budget
    BuildLl {
        #[arg(long)]
        graph: PathBuf,
        /// Byte budget per vertex
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        out: PathBuf,
    },

    /// Answer approximate distance queries from a landmark index
    QueryLl {
        #[arg(long)]
        index: PathBuf,
        /// Pairs file ("u v" per line); stdin when omitted
        #[arg(long)]
        pairs_file: Option<PathBuf>,
        /// Bidirectional refinement budget (vertices per side; needs --graph)
        #[arg(long, default_value_t = 0)]
        tau: usize,
        /// Graph file, required when --tau > 0
        #[arg(long)]
        graph: Option<PathBuf>,
    },

    /// Measure distortion of an oracle on sampled reachable pairs
    Eval {
        #[arg(long)]
        graph: PathBuf,
        /// Existing index file (landmark or 2-hop); built fresh when omitted
        #[arg(long)]
        index: Option<PathBuf>,
        /// Byte budget per vertex for a fresh index
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Use the plain single-vertex landmark baseline
        #[arg(long)]
        plain: bool,
        /// Number of sampled pairs
        #[arg(long, default_value_t = 10_000)]
        pairs: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Bidirectional refinement budget per side
        #[arg(long, default_value_t = 0)]
        tau: usize,
    },

    /// Build the exact 2-hop pruned-landmark index
    BuildPll {
        #[arg(long)]
        graph: PathBuf,
        /// Number of cluster-BFS rounds before pruned BFS takes over
        #[arg(long, default_value_t = 0)]
        r: usize,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        out: PathBuf,
    },

    /// Answer exact distance queries from a 2-hop index
    QueryPll {
        #[arg(long)]
        index: PathBuf,
        /// Pairs file ("u v" per line); stdin when omitted
        #[arg(long)]
        pairs_file: Option<PathBuf>,
    },

    /// Benchmark cluster-BFS against per-source sequential BFS
    Bench {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 64)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Comma-separated thread counts for the parallel runs
        #[arg(long, default_value = "0")]
        threads_list: String,
        /// Number of distinct clusters to measure
        #[arg(long, default_value_t = 10)]
        reps: usize,
    },
}

fn run(cli: Cli) -> cbfs::Result<()> {
    let format = cli.format;
    match cli.command {
        Command::Convert {
            input,
            out,
            directed,
        } => convert::run(&input, &out, directed),
        Command::Cbfs {
            graph,
            directed,
            k,
            d,
            center,
            cluster_file,
            out,
            raw,
        } => cbfs_cmd::run(
            &graph,
            directed,
            k,
            d,
            center,
            cluster_file.as_deref(),
            out.as_deref(),
            raw,
            format,
        ),
        Command::BuildLl {
            graph,
            budget,
            k,
            d,
            out,
        } => ll_cmd::build(&graph, budget, k, d, &out),
        Command::QueryLl {
            index,
            pairs_file,
            tau,
            graph,
        } => ll_cmd::query(&index, pairs_file.as_deref(), tau, graph.as_deref(), format),
        Command::Eval {
            graph,
            index,
            budget,
            k,
            d,
            plain,
            pairs,
            seed,
            tau,
        } => ll_cmd::eval(
            &graph,
            index.as_deref(),
            budget,
            k,
            d,
            plain,
            pairs,
            seed,
            tau,
            format,
        ),
        Command::BuildPll {
            graph,
            r,
            k,
            d,
            out,
        } => pll_cmd::build(&graph, r, k, d, &out),
        Command::QueryPll { index, pairs_file } => {
            pll_cmd::query(&index, pairs_file.as_deref(), format)
        }
        Command::Bench {
            graph,
            k,
            d,
            threads_list,
            reps,
        } => bench::run(&graph, k, d, &threads_list, reps, format),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };

    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .expect("global thread pool initialized once");
    }

    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        let code = match e {
            cbfs::Error::Usage(_) => 1,
            _ => 2,
        };
        std::process::exit(code);
    }
}
