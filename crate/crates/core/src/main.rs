use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ptvir::cli::{parse_insertion, run_suite, Format, VerifyOptions};
use ptvir::cubicpt::{cubic_model, partition_function, FanoModel};

#[derive(Parser)]
#[command(name = "ptvir", version, about = "Exact checks of descendent Virasoro constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(ptvir::cli::SUITES))]
        suite: String,
        /// Brackets are computed for n+1 = 1..=N+1.
        #[arg(long, default_value_t = 10)]
        max_order: u32,
        /// Surface spec file (repeatable).
        #[arg(long = "spec")]
        specs: Vec<PathBuf>,
        /// Number of random surface specs or pairs.
        #[arg(long, default_value_t = 50)]
        fuzz: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
    /// Partition function of an insertion product on the cubic, e.g. `ch4(1)*ch3(H)`.
    Partition {
        insertion: String,
        #[arg(long, default_value_t = 10)]
        max_order: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::Verify { suite, max_order, specs, fuzz, seed, format } => {
            let opts = VerifyOptions { max_order, specs, fuzz, seed };
            let report = match run_suite(&suite, &opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let format = match format {
                OutputFormat::Text => Format::Text,
                OutputFormat::Tsv => Format::Tsv,
            };
            print!("{}", report.emit(format));
            match report.first_failure() {
                None => ExitCode::SUCCESS,
                Some(row) => {
                    eprintln!("first failing check: {} (expected {}, computed {})", row.id, row.expected, row.computed);
                    ExitCode::from(1)
                }
            }
        }
        Command::Partition { insertion, max_order } => {
            let m = cubic_model();
            let d = match parse_insertion(&insertion, &m) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match partition_function(&d, max_order, &FanoModel::new()) {
                Ok(z) => {
                    println!("series:       {}", z.series);
                    println!("closed form:  {}", z.closed_form);
                    println!("functional equation holds: {}", z.satisfies_functional_equation());
                    if z.ambiguous {
                        println!("note: the fit is not saturated; raise --max-order");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
