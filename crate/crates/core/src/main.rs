use aafre::io::{emit_report, instance_to_document, parse_instance, Mode, ReportRef};
use aafre::optimizer::{solve, SolveOptions};
use aafre::oracle::{brute_force_solve, generate_feasible, satisfies, GeneratorConfig};
use aafre::resolution::{feasible_candidates, ResolveOptions};
use aafre::{FreError, Instance, TNormParam};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_SOLVED: u8 = 0;
const EXIT_INFEASIBLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_LIMIT: u8 = 3;
const EXIT_MISMATCH: u8 = 4;

#[derive(Parser)]
#[command(
    name = "aafre",
    version,
    about = "Max-Aczel-Alsina fuzzy relational equation solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Feasibility, maximum solution and candidate minimal solutions.
    Resolve {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
    },
    /// Minimize the linear objective over the feasible set.
    Optimize {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
    },
    /// Cross-check the solver against exhaustive enumeration.
    Check {
        file: PathBuf,
        #[command(flatten)]
        opts: SolveArgs,
        /// Random feasible points sampled to challenge the optimum.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Print a random feasible instance document.
    Generate {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.8)]
        density: f64,
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct SolveArgs {
    /// Override the document's lambda.
    #[arg(long)]
    lambda: Option<f64>,
    /// Override the document's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Branch-and-bound search for the best minimal candidate.
    #[arg(long)]
    prune: bool,
    /// Report all kept candidates rather than only minimal ones.
    #[arg(long)]
    no_minimality_filter: bool,
    /// List every optimum tied on the non-negative part of the cost.
    #[arg(long)]
    all_optima: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Abort with exit code 3 when the candidate frontier grows past this.
    #[arg(long)]
    max_candidates: Option<u64>,
    /// Worker threads for candidate enumeration.
    #[arg(long)]
    parallel: Option<usize>,
}

impl SolveArgs {
    fn mode(&self) -> Mode {
        match self.format {
            Format::Text => Mode::Text,
            Format::Machine => Mode::Machine,
        }
    }

    fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            prune: self.prune,
            all_optima: self.all_optima,
            max_candidates: self.max_candidates,
            workers: self.parallel,
        }
    }

    fn load(&self, file: &PathBuf) -> Result<Instance, FreError> {
        let text = std::fs::read_to_string(file).map_err(|e| FreError::Parse {
            location: file.display().to_string(),
            message: e.to_string(),
        })?;
        let mut inst = parse_instance(&text)?;
        if let Some(l) = self.lambda {
            inst = inst.with_param(TNormParam::new(l).map_err(|_| FreError::Validation {
                location: "--lambda".into(),
                message: format!("{l} must be positive"),
            })?);
        }
        if let Some(t) = self.tol {
            inst = inst.with_tol(t)?;
        }
        Ok(inst)
    }
}

fn exit_for(err: &FreError) -> u8 {
    match err {
        FreError::Size { .. } => EXIT_LIMIT,
        FreError::Infeasible => EXIT_INFEASIBLE,
        _ => EXIT_INPUT,
    }
}

fn verdict_code(feasible: bool) -> u8 {
    if feasible {
        EXIT_SOLVED
    } else {
        EXIT_INFEASIBLE
    }
}

#[derive(Serialize)]
struct CheckSummary {
    feasible_solver: bool,
    feasible_oracle: bool,
    z_star_solver: Option<f64>,
    z_star_oracle: Option<f64>,
    kept_failing_membership: usize,
    samples_checked: usize,
    sample_violations: usize,
    agree: bool,
}

fn run(cli: Cli) -> Result<u8, FreError> {
    match cli.command {
        Command::Resolve { file, opts } => {
            let inst = opts.load(&file)?;
            let run = || {
                feasible_candidates(
                    &inst,
                    ResolveOptions {
                        minimality_filter: !opts.no_minimality_filter,
                        max_candidates: opts.max_candidates,
                    },
                )
            };
            let report = match opts.parallel {
                Some(w) => rayon::ThreadPoolBuilder::new()
                    .num_threads(w.max(1))
                    .build()
                    .map_err(|e| FreError::Domain(e.to_string()))?
                    .install(run)?,
                None => run()?,
            };
            print!(
                "{}",
                emit_report(ReportRef::Resolution(&report), opts.mode())
            );
            if opts.mode() == Mode::Machine {
                println!();
            }
            Ok(verdict_code(report.feasible))
        }
        Command::Optimize { file, opts } => {
            let inst = opts.load(&file)?;
            let report = solve(&inst, opts.solve_options())?;
            print!(
                "{}",
                emit_report(ReportRef::Optimization(&report), opts.mode())
            );
            if opts.mode() == Mode::Machine {
                println!();
            }
            Ok(verdict_code(report.feasible))
        }
        Command::Check {
            file,
            opts,
            samples,
        } => {
            let inst = opts.load(&file)?;
            let report = solve(&inst, opts.solve_options())?;
            let oracle = brute_force_solve(&inst, samples, 0)?;
            let kept = feasible_candidates(
                &inst,
                ResolveOptions {
                    minimality_filter: false,
                    max_candidates: opts.max_candidates,
                },
            )?;
            let kept_failing_membership = kept
                .kept
                .iter()
                .filter(|k| !satisfies(&inst, &k.point))
                .count();
            let z_agree = match (report.z_star, oracle.z_star) {
                (Some(a), Some(b)) => (a - b).abs() <= 1e-9,
                (None, None) => true,
                _ => false,
            };
            let summary = CheckSummary {
                feasible_solver: report.feasible,
                feasible_oracle: oracle.feasible,
                z_star_solver: report.z_star,
                z_star_oracle: oracle.z_star,
                kept_failing_membership,
                samples_checked: oracle.samples_checked,
                sample_violations: oracle.sample_violations.len(),
                agree: report.feasible == oracle.feasible
                    && z_agree
                    && kept_failing_membership == 0
                    && oracle.sample_violations.is_empty(),
            };
            match opts.mode() {
                Mode::Machine => println!(
                    "{}",
                    serde_json::to_string_pretty(&summary).expect("finite floats serialize")
                ),
                Mode::Text => {
                    println!(
                        "feasibility: solver={} oracle={}",
                        summary.feasible_solver, summary.feasible_oracle
                    );
                    if let (Some(a), Some(b)) = (summary.z_star_solver, summary.z_star_oracle) {
                        println!(
                            "z*: solver={a:.12} oracle={b:.12} diff={:.3e}",
                            (a - b).abs()
                        );
                    }
                    println!(
                        "kept candidates failing direct membership: {kept_failing_membership}"
                    );
                    println!(
                        "box samples: {} checked, {} beat the optimum",
                        summary.samples_checked, summary.sample_violations
                    );
                    println!("{}", if summary.agree { "AGREE" } else { "MISMATCH" });
                }
            }
            Ok(if !summary.agree {
                EXIT_MISMATCH
            } else {
                verdict_code(report.feasible)
            })
        }
        Command::Generate {
            m,
            n,
            density,
            lambda,
            seed,
        } => {
            let cfg = GeneratorConfig {
                m,
                n,
                density,
                lambda: TNormParam::new(lambda)?,
                seed,
            };
            let inst = generate_feasible(&cfg)?;
            println!("{}", instance_to_document(&inst));
            Ok(EXIT_SOLVED)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
