//! Command-line front end: validate scenario files, solve the
//! management model, optimize investments under a budget, and sweep
//! carbon taxes / budgets.
//!
//! Exit codes: 0 success, 1 invalid input, 2 solver failure. Result
//! data goes to stdout or the requested output files; diagnostics and
//! progress go to stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use techpath::io::{
    export_dot, parse_scenario, write_solution_csv, write_sweep_csv, Diagnostics, DotOptions,
};
use techpath::management::{solve_management, utility_cost, ManagementSolution};
use techpath::model::{validate_scenario, Scenario};
use techpath::sweep::{
    activity_tolerance, detect_breakpoints, linear_grid, sweep_tax, sweep_tax_budget, SweepTable,
};
use techpath::investment::{solve_investment, InvestmentOptions};

const EXIT_INVALID_INPUT: u8 = 1;
const EXIT_SOLVER_FAILURE: u8 = 2;

#[derive(Parser)]
#[command(name = "techpath", version, about = "Technology pathway screening")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and report every problem found
    Validate { file: PathBuf },
    /// Solve the management model and report allocations, prices, profits
    Solve {
        file: PathBuf,
        /// Treat every candidate technology as already built
        #[arg(long)]
        assume_built: bool,
        /// Write a Graphviz pathway diagram here
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the solution table here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Choose unit purchases under an investment budget
    Invest {
        file: PathBuf,
        /// Total investment budget
        #[arg(long)]
        budget: f64,
        /// Subtract annualized investment from the objective instead of
        /// capping it with the budget
        #[arg(long)]
        objective_invest: bool,
        /// Write the operating solution table here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Sweep a tax on a waste product, optionally crossed with budgets
    Sweep {
        file: PathBuf,
        /// Treat every candidate technology as already built
        #[arg(long, conflicts_with = "budget_grid")]
        assume_built: bool,
        #[command(flatten)]
        grid: SweepArgs,
        /// Write the sweep table here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Waste product whose single consumer carries the tax
    #[arg(long)]
    waste: String,
    /// Tax grid as lo:hi:n
    #[arg(long, value_parser = parse_grid)]
    tax_grid: (f64, f64, usize),
    /// Budget grid as lo:hi:n; omitted means unlimited budget
    #[arg(long, value_parser = parse_grid)]
    budget_grid: Option<(f64, f64, usize)>,
}

fn parse_grid(text: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected lo:hi:n, got '{text}'"));
    };
    let lo: f64 = lo.parse().map_err(|_| format!("bad grid start '{lo}'"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad grid end '{hi}'"))?;
    let n: usize = n.parse().map_err(|_| format!("bad grid size '{n}'"))?;
    if !lo.is_finite() || !hi.is_finite() || hi < lo {
        return Err(format!("grid '{text}' must satisfy lo <= hi"));
    }
    if n == 0 {
        return Err("grid needs at least one point".to_owned());
    }
    Ok((lo, hi, n))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            err.exit()
        }
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(EXIT_INVALID_INPUT);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { message, code }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    message: String,
    code: u8,
}

fn invalid(message: impl ToString) -> Failure {
    Failure {
        message: message.to_string(),
        code: EXIT_INVALID_INPUT,
    }
}

fn solver(message: impl ToString) -> Failure {
    Failure {
        message: message.to_string(),
        code: EXIT_SOLVER_FAILURE,
    }
}

fn load(file: &PathBuf) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(file)
        .map_err(|err| invalid(format!("cannot read {}: {err}", file.display())))?;
    parse_scenario(&text).map_err(|Diagnostics { diagnostics }| {
        let mut message = format!("{} is not a valid scenario:", file.display());
        for d in diagnostics {
            message.push_str("\n  ");
            message.push_str(&d.to_string());
        }
        invalid(message)
    })
}

fn emit(path: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|err| invalid(format!("cannot write {}: {err}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn report_solution(scenario: &Scenario, solution: &ManagementSolution) {
    eprintln!("surplus: {:.6}", solution.surplus);
    eprintln!("utility cost: {:.6}", utility_cost(scenario, solution));
    if solution.degenerate {
        eprintln!("note: degenerate optimum; prices are one of several dual solutions");
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { file } => {
            let text = fs::read_to_string(&file)
                .map_err(|err| invalid(format!("cannot read {}: {err}", file.display())))?;
            let doc =
                techpath::io::parse_document(&text).map_err(|Diagnostics { diagnostics }| {
                    let mut message = format!("{} does not parse:", file.display());
                    for d in diagnostics {
                        message.push_str("\n  ");
                        message.push_str(&d.to_string());
                    }
                    invalid(message)
                })?;
            let scenario = doc.into_scenario();
            let report = validate_scenario(&scenario);
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            if report.is_valid() {
                println!(
                    "{}: ok ({} products, {} suppliers, {} consumers, {} technologies)",
                    file.display(),
                    scenario.products.len(),
                    scenario.suppliers.len(),
                    scenario.consumers.len(),
                    scenario.technologies.len()
                );
                Ok(())
            } else {
                let mut message = format!("{} failed validation:", file.display());
                for error in &report.errors {
                    message.push_str("\n  ");
                    message.push_str(error);
                }
                Err(invalid(message))
            }
        }

        Command::Solve {
            file,
            assume_built,
            dot,
            csv,
        } => {
            let mut scenario = load(&file)?;
            if assume_built {
                scenario = scenario.assume_built();
            }
            let solution = solve_management(&scenario).map_err(solver)?;
            report_solution(&scenario, &solution);
            if let Some(dot_path) = &dot {
                let options = DotOptions {
                    activity_tol: activity_tolerance(&scenario),
                };
                let graph = export_dot(&scenario, Some(&solution), &options).map_err(solver)?;
                fs::write(dot_path, graph)
                    .map_err(|err| invalid(format!("cannot write {}: {err}", dot_path.display())))?;
            }
            emit(&csv, &write_solution_csv(&scenario, &solution))
        }

        Command::Invest {
            file,
            budget,
            objective_invest,
            csv,
        } => {
            let scenario = load(&file)?;
            if budget < 0.0 {
                return Err(invalid(format!("budget must be non-negative, got {budget}")));
            }
            let options = InvestmentOptions {
                invest_in_objective: objective_invest,
                ..InvestmentOptions::default()
            };
            let solution = solve_investment(&scenario, budget, &options).map_err(solver)?;
            for (tech, units) in &solution.units {
                if *units > 0 {
                    eprintln!("build {tech}: {units} units");
                }
            }
            eprintln!(
                "budget used: {:.6} of {:.6}",
                solution.budget_used, solution.budget_limit
            );
            eprintln!("objective: {:.6}", solution.objective);
            if !solution.proven_optimal {
                eprintln!("warning: node limit reached; best solution found may not be optimal");
            }
            report_solution(&scenario, &solution.management);
            emit(&csv, &write_solution_csv(&scenario, &solution.management))
        }

        Command::Sweep {
            file,
            assume_built,
            grid,
            csv,
        } => {
            let mut scenario = load(&file)?;
            if assume_built {
                scenario = scenario.assume_built();
            }
            let taxes = {
                let (lo, hi, n) = grid.tax_grid;
                linear_grid(lo, hi, n)
            };
            let threads = thread_count();
            let table = match grid.budget_grid {
                None => run_chunked(&taxes, threads, |chunk| {
                    sweep_tax(&scenario, &grid.waste, chunk)
                })?,
                Some((lo, hi, n)) => {
                    let budgets = linear_grid(lo, hi, n);
                    let options = InvestmentOptions::default();
                    run_chunked(&taxes, threads, |chunk| {
                        sweep_tax_budget(&scenario, &grid.waste, chunk, &budgets, &options)
                    })?
                }
            };
            match detect_breakpoints(&table) {
                Ok(intervals) => {
                    eprintln!("{} active-set interval(s):", intervals.len());
                    for interval in intervals {
                        eprintln!(
                            "  tax {:.6}..{:.6}: {}",
                            interval.start,
                            interval.end,
                            interval.active_set.join(";")
                        );
                    }
                }
                Err(err) => eprintln!("breakpoint detection failed: {err}"),
            }
            emit(&csv, &write_sweep_csv(&scenario, &table))
        }
    }
}

fn thread_count() -> usize {
    std::env::var("TECHPATH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Split the tax grid into contiguous chunks, sweep each on its own
/// thread, and splice the tables back in grid order, so output is
/// identical for any thread count.
fn run_chunked<F>(taxes: &[f64], threads: usize, sweep_chunk: F) -> Result<SweepTable, Failure>
where
    F: Fn(&[f64]) -> Result<SweepTable, techpath::sweep::SweepError> + Sync,
{
    let threads = threads.min(taxes.len()).max(1);
    if threads == 1 {
        return sweep_chunk(taxes).map_err(sweep_failure);
    }
    let chunk_size = taxes.len().div_ceil(threads);
    let results: Vec<Result<SweepTable, _>> = std::thread::scope(|scope| {
        let handles: Vec<_> = taxes
            .chunks(chunk_size)
            .map(|chunk| scope.spawn(|| sweep_chunk(chunk)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep thread panicked"))
            .collect()
    });
    let mut merged: Option<SweepTable> = None;
    for result in results {
        let part = result.map_err(sweep_failure)?;
        match &mut merged {
            None => merged = Some(part),
            Some(table) => {
                table.taxes.extend(part.taxes);
                table.points.extend(part.points);
            }
        }
    }
    Ok(merged.expect("at least one chunk"))
}

fn sweep_failure(err: techpath::sweep::SweepError) -> Failure {
    use techpath::sweep::SweepError;
    match err {
        SweepError::MissingWasteConsumer(_) | SweepError::AmbiguousWasteConsumer(_, _) => {
            invalid(err)
        }
        other => solver(other),
    }
}
