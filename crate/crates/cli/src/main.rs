use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

mod commands;

use commands::Failure;

#[derive(Parser)]
#[command(name = "ht-extremes", version, about = "Sum-to-maximum ratio experiments for heavy-tailed samples")]
struct Cli {
    /// Worker threads; output never depends on this.
    #[arg(long, global = true, env = "HT_EXTREMES_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate φ_α(s) with its error bound.
    Phi {
        #[arg(long)]
        alpha: f64,
        /// Comma-separated s values.
        #[arg(long = "s", value_delimiter = ',', required = true)]
        s: Vec<f64>,
    },
    /// Simulate R_n for every n in an experiment file's ladder.
    Simulate(ExperimentArgs),
    /// Test Laplace-transform order between two sample files.
    ///
    /// FILE_A is the hypothesised smaller population (smaller alpha).
    /// Exit status: 0 ordered, 2 inconclusive, 3 violated.
    Order {
        file_a: std::path::PathBuf,
        file_b: std::path::PathBuf,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Comma-separated s grid; defaults to the grid stored with FILE_A.
        #[arg(long = "s", value_delimiter = ',')]
        s: Option<Vec<f64>>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// SIR and capacity statistics over an alpha sweep.
    Sir {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Print capacity in bits rather than nats.
        #[arg(long)]
        bits: bool,
    },
    /// CDF of the limiting ratio by Laplace inversion.
    Invert {
        #[arg(long)]
        alpha: f64,
        /// `lo:hi:points`, log-spaced.
        #[arg(long, default_value = "1.001:50:200")]
        x_grid: String,
        #[arg(long, default_value_t = 14)]
        order: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    experiment: std::path::PathBuf,
    /// Overrides the seed in the experiment file.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides `out_dir` in the experiment file.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => commands::EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be positive"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Failure::usage(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::Phi { alpha, s } => commands::phi(alpha, &s),
        Command::Simulate(a) => commands::simulate(&a.experiment, a.seed, a.out.as_deref()),
        Command::Order {
            file_a,
            file_b,
            confidence,
            s,
            out,
        } => commands::order(&file_a, &file_b, confidence, s.as_deref(), out.as_deref()),
        Command::Sir { experiment: a, bits } => commands::sir(&a.experiment, a.seed, a.out.as_deref(), bits),
        Command::Invert {
            alpha,
            x_grid,
            order,
            out,
        } => commands::invert(alpha, &x_grid, order, out.as_deref()),
    })
}
