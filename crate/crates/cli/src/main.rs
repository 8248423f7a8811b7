//! Batch front-end: generate or read matrices, run the
//! scale → order → factor → solve → analyze → update pipeline, and drive
//! the blocked factorization and update with their cost ledgers.

mod pipeline;
mod shapes;

use clap::{Parser, Subcommand};
use pipeline::{PipelineConfig, ReportFormat};

#[derive(Parser)]
#[command(name = "sparsedirect", version, about = "sparse direct linear algebra toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the batch pipeline (scale, order, factor, solve, analyze, updates).
    Run(RunArgs),
    /// Print the norm/condition report of a matrix.
    Analyze(AnalyzeArgs),
    /// Generate a test matrix and write it as Matrix Market.
    Gen {
        /// binomial | hilbert | tridiagonal
        kind: String,
        n: usize,
        /// output path (Matrix Market coordinate format)
        #[arg(long)]
        out: std::path::PathBuf,
    },
    /// Blocked Cholesky of a random block-angular instance; emits the ledger.
    Bch {
        /// block shape, e.g. "7:5,6:4,8:6;6" for (m:n)* and the residual width
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "csv")]
        report: String,
    },
    /// Blocked updates on a random square block-angular basis.
    Bup {
        #[arg(long)]
        shape: String,
        /// update case to exercise: I, II, III, IV or V
        #[arg(long, default_value = "I")]
        case: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "csv")]
        report: String,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Matrix Market input file
    #[arg(long)]
    input: Option<std::path::PathBuf>,
    /// generator spec KIND:N (binomial, hilbert, tridiagonal)
    #[arg(long)]
    gen: Option<String>,
    /// scaling method: var_reduce | geo_mean | maxmin | infnorm
    #[arg(long)]
    scale: Option<String>,
    /// ordering: none | markowitz | tewarson | p3 | p4 | orgm | dissection
    #[arg(long, default_value = "none")]
    order: String,
    /// factorization: lu | cholesky | qr
    #[arg(long, default_value = "lu")]
    factor: String,
    #[arg(long = "fp-base", default_value_t = 10)]
    fp_base: u32,
    #[arg(long = "fp-digits", default_value_t = 6)]
    fp_digits: u32,
    /// rounding | truncation
    #[arg(long = "fp-mode", default_value = "rounding")]
    fp_mode: String,
    /// balance weight of the partition cost
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pivomin: f64,
    #[arg(long, default_value_t = 1e12)]
    multmax: f64,
    /// text | csv
    #[arg(long, default_value = "text")]
    report: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// comma-separated column slots to replace with seeded random columns
    #[arg(long)]
    updates: Option<String>,
    /// key=value file supplying any of the above (flags win)
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// skip condition-number analysis
    #[arg(long, default_value_t = false)]
    no_analyze: bool,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: Option<std::path::PathBuf>,
    #[arg(long)]
    gen: Option<String>,
    #[arg(long, default_value = "text")]
    report: String,
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run(args) => {
            let config = PipelineConfig::from_args(&args)?;
            let report = pipeline::run(&config)?;
            print!("{report}");
            Ok(())
        }
        Command::Analyze(args) => {
            let fmt = ReportFormat::parse(&args.report)?;
            let (a, _, label) = pipeline::load_matrix(args.input.as_deref(), args.gen.as_deref())?;
            print!("{}", pipeline::analyze_report(&a, &label, fmt)?);
            Ok(())
        }
        Command::Gen { kind, n, out } => {
            let k = sparsedirect::testmat::TestKind::parse(&kind)
                .ok_or_else(|| format!("unknown generator '{kind}'"))?;
            let (a, _) = sparsedirect::testmat::gen_test::<f64>(k, n);
            let sp = sparsedirect::SpMat::from_dense(&a, sparsedirect::ReprKind::StaticRows);
            sparsedirect::mm::write_mm(&out, &sp).map_err(|e| e.to_string())?;
            println!("wrote {} ({} x {}, {} entries)", out.display(), n, n, sp.enn());
            Ok(())
        }
        Command::Bch { shape, seed, report } => shapes::run_bch(&shape, seed, &report),
        Command::Bup { shape, case, times, seed, report } => {
            shapes::run_bup(&shape, &case, times, seed, &report)
        }
    }
}
