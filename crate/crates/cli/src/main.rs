/*
 * Copyright (C) 2026 The ccbs-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/

mod generate;
mod report;

use ccbs_core::ccbs::{Budget, Mode};
use ccbs_core::constraints::DeltaRule;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

pub const EXIT_SOLVED: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_CONFLICTS: u8 = 4;
pub const EXIT_DEMO_FAILED: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "ccbs", version, about = "Continuous-time conflict-based search laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Motion,
    VertexRange,
    Shifting,
    Dt,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one or more scenarios.
    Solve {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "vertex-range")]
        mode: ModeArg,
        /// Time step of the discrete lattice (dt mode).
        #[arg(long, default_value_t = 1.0)]
        unit: f64,
        /// half, zero or fixed:<real> (shifting mode).
        #[arg(long, default_value = "half", value_parser = parse_delta_rule)]
        delta_rule: DeltaRule,
        /// Maximum constraint-tree expansions.
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        /// Wall-clock limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// Write one line per expansion to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Where to write the solution; defaults to the scenario path with a `.sol` extension.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Scenarios solved at once.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check a solution against a scenario.
    Validate { scenario: PathBuf, solution: PathBuf },
    /// Report whether a scenario is non-overlapping, with witnesses otherwise.
    Classify { scenario: PathBuf },
    /// Exhaustive optimum on the discrete lattice for tiny scenarios.
    Oracle {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        unit: f64,
        /// Largest sum of costs searched.
        #[arg(long)]
        bound: f64,
    },
    /// Run a bundled demonstration.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(ccbs_core::demo::NAMES))]
        name: String,
    },
    /// Print a random small scenario.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        #[arg(long, default_value_t = 3)]
        agents: usize,
        #[arg(long, default_value_t = 0.3)]
        radius: f64,
    },
}

fn parse_delta_rule(s: &str) -> Result<DeltaRule, String> {
    match s {
        "half" => Ok(DeltaRule::Half),
        "zero" => Ok(DeltaRule::Zero),
        _ => match s.strip_prefix("fixed:").map(str::parse::<f64>) {
            Some(Ok(d)) if d >= 0.0 && d.is_finite() => Ok(DeltaRule::Fixed(d)),
            _ => Err(format!("expected half, zero or fixed:<non-negative real>, got {s:?}")),
        },
    }
}

fn mode(arg: ModeArg, unit: f64, rule: DeltaRule) -> Result<Mode, String> {
    Ok(match arg {
        ModeArg::Motion => Mode::Motion,
        ModeArg::VertexRange => Mode::VertexRange,
        ModeArg::Shifting => Mode::Shifting(rule),
        ModeArg::Dt if unit > 0.0 && unit.is_finite() => Mode::Discrete { unit },
        ModeArg::Dt => return Err(format!("--unit must be positive, got {unit}")),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_SOLVED });
        }
    };
    let code = match cli.command {
        Command::Solve { scenarios, mode: m, unit, delta_rule, budget, timeout, trace, output, jobs } => {
            let setup = mode(m, unit, delta_rule).and_then(|m| {
                if !(timeout > 0.0 && timeout.is_finite()) {
                    return Err(format!("--timeout must be positive, got {timeout}"));
                }
                if budget == 0 || jobs == 0 {
                    return Err("--budget and --jobs must be positive".to_string());
                }
                if scenarios.len() > 1 && (output.is_some() || trace.is_some()) {
                    return Err("--output and --trace take a single scenario".to_string());
                }
                Ok(m)
            });
            match setup {
                Ok(m) => {
                    let budget = Budget { max_expansions: budget, max_time: Duration::from_secs_f64(timeout) };
                    report::solve_all(&scenarios, m, budget, trace.as_deref(), output.as_deref(), jobs)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_ERROR
                }
            }
        }
        Command::Validate { scenario, solution } => report::validate(&scenario, &solution),
        Command::Classify { scenario } => report::classify(&scenario),
        Command::Oracle { scenario, unit, bound } => report::oracle(&scenario, unit, bound),
        Command::Demo { name } => report::demo(&name),
        Command::Generate { seed, vertices, agents, radius } => generate::run(seed, vertices, agents, radius),
    };
    ExitCode::from(code)
}
