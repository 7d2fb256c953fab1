use clap::{Parser, Subcommand};

use dioph::cli;

#[derive(Parser)]
#[command(
    name = "dioph",
    about = "Diophantine equation solver: certificates, finite sets, families",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem given as text, e.g. "15*x^2 + 6*y^2 = 12 ; x,y in Z"
    Solve {
        problem: String,
        /// Largest modulus in the obstruction scan
        #[arg(long, default_value_t = 64)]
        max_modulus: u64,
        /// Restrict every variable to [lo, hi] (format LO..HI)
        #[arg(long)]
        r#box: Option<String>,
        #[arg(long)]
        probe_budget: Option<u128>,
        #[arg(long)]
        enum_budget: Option<u128>,
        #[arg(long)]
        timeout_ms: Option<u64>,
        /// Emit the verdict as JSON
        #[arg(long)]
        json: bool,
        /// Include the strategy trace
        #[arg(long)]
        trace: bool,
    },
    /// Run a corpus file of cases with expectations
    Corpus {
        path: String,
        /// Worker threads
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 64)]
        max_modulus: u64,
    },
    /// Check a non-solvability certificate against a problem
    Check {
        problem: String,
        #[arg(long)]
        cert: String,
    },
    /// Verify a solutions file against a problem
    Verify {
        problem: String,
        #[arg(long)]
        solutions: String,
    },
}

fn parse_box(s: &str) -> Option<(i64, i64)> {
    let (lo, hi) = s.split_once("..")?;
    Some((lo.parse().ok()?, hi.parse().ok()?))
}

fn main() {
    let args = Args::parse();
    let mut out = std::io::stdout();
    let code = match args.command {
        Command::Solve {
            problem,
            max_modulus,
            r#box,
            probe_budget,
            enum_budget,
            timeout_ms,
            json,
            trace,
        } => {
            let mut config = cli::env_config();
            config.max_modulus = max_modulus;
            if let Some(b) = probe_budget {
                config.probe_budget = b;
            }
            if let Some(b) = enum_budget {
                config.enum_budget = b;
            }
            if let Some(t) = timeout_ms {
                config.timeout_ms = t;
            }
            let box_override = match r#box.as_deref() {
                Some(s) => match parse_box(s) {
                    Some(b) => Some(b),
                    None => {
                        eprintln!("invalid --box, expected LO..HI");
                        std::process::exit(1);
                    }
                },
                None => None,
            };
            let opts = cli::SolveOptions {
                json,
                trace,
                config,
                box_override,
            };
            cli::cmd_solve(&problem, &opts, &mut out)
        }
        Command::Corpus {
            path,
            jobs,
            json,
            max_modulus,
        } => {
            let mut config = cli::env_config();
            config.max_modulus = max_modulus;
            cli::cmd_corpus(&path, jobs.max(1), json, &config, &mut out)
        }
        Command::Check { problem, cert } => {
            cli::cmd_check(&problem, &cert, &cli::env_config(), &mut out)
        }
        Command::Verify { problem, solutions } => {
            cli::cmd_verify(&problem, &solutions, &mut out)
        }
    };
    std::process::exit(code);
}
