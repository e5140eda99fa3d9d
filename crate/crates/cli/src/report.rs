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

//! Subcommand bodies. Reports go to stdout, diagnostics to stderr; nothing
//! time-dependent is printed so repeated runs give identical bytes.

use crate::{EXIT_BUDGET, EXIT_CONFLICTS, EXIT_DEMO_FAILED, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_SOLVED};
use ccbs_core::ccbs::{oracle_dt, solve, Budget, Mode, SearchOutcome, SolveOptions, Status};
use ccbs_core::demo::trace_is_flat;
use ccbs_core::model::{classify as classify_instance, validate_solution, Instance, InstanceClass, OverlapWitness, Solution};
use ccbs_core::scenario::{fmt_num, load_scenario, load_solution, save_scenario, save_solution};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance, String> {
    let text = read(path)?;
    load_scenario(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Short SHA-256 of the canonical scenario text.
pub fn digest(inst: &Instance) -> String {
    let hash = Sha256::digest(save_scenario(inst).as_bytes());
    hash.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

fn plan_table(inst: &Instance, sol: &Solution, out: &mut String) {
    let _ = writeln!(out, "{:<12} {:>14} {:>6}  route", "agent", "cost", "moves");
    for p in &sol.plans {
        let moves: Vec<_> = p.motions.iter().filter(|m| !m.is_wait()).collect();
        let mut route = vec![inst.vertex_name(inst.agent(p.agent).start).to_string()];
        route.extend(moves.iter().map(|m| inst.vertex_name(m.motion.to).to_string()));
        let _ = writeln!(
            out,
            "{:<12} {:>14} {:>6}  {}",
            inst.agent(p.agent).name,
            fmt_num(p.completion_time()),
            moves.len(),
            route.join(" ")
        );
    }
}

fn solution_block(inst: &Instance, sol: &Solution, out: &mut String) {
    out.push_str("--- solution ---\n");
    out.push_str(&save_solution(inst, sol));
    if !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str("--- end ---\n");
}

struct Run {
    code: u8,
    stdout: String,
    stderr: String,
}

fn default_output(scenario: &Path) -> PathBuf {
    scenario.with_extension("sol")
}

fn solve_one(path: &Path, mode: Mode, budget: Budget, trace: Option<&Path>, output: Option<&Path>) -> Run {
    let fail = |msg: String| Run {
        code: EXIT_ERROR,
        stdout: String::new(),
        stderr: format!("error: {msg}\n"),
    };
    let inst = match load_instance(path) {
        Ok(i) => i,
        Err(e) => return fail(e),
    };
    let mut options = SolveOptions::new(mode, budget);
    options.dump = trace.is_some();
    let out = match solve(&inst, &options) {
        Ok(o) => o,
        Err(e) => return fail(format!("{}: {e}", path.display())),
    };
    if let Some(t) = trace {
        let mut text = out.stats.dump.join("\n");
        text.push('\n');
        if let Err(e) = std::fs::write(t, text) {
            return fail(format!("{}: {e}", t.display()));
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", path.display());
    let _ = writeln!(s, "digest: sha256:{}", digest(&inst));
    let _ = writeln!(s, "mode: {mode}");
    let code = match &out.status {
        Status::Solved { g, .. } => {
            let _ = writeln!(s, "outcome: solved, SIC {}", fmt_num(*g));
            EXIT_SOLVED
        }
        Status::BudgetExhausted { lower_bound, frontier } => {
            let _ = writeln!(
                s,
                "outcome: budget exhausted, lower bound {}, frontier {frontier}",
                fmt_num(*lower_bound)
            );
            EXIT_BUDGET
        }
        Status::Infeasible => {
            let _ = writeln!(s, "outcome: infeasible");
            EXIT_INFEASIBLE
        }
    };
    stats_lines(&out, &mut s);
    if let Status::Solved { solution, .. } = &out.status {
        let target = output.map(Path::to_path_buf).unwrap_or_else(|| default_output(path));
        if let Err(e) = std::fs::write(&target, save_solution(&inst, solution)) {
            return fail(format!("{}: {e}", target.display()));
        }
        let _ = writeln!(s, "solution written: {}", target.display());
        plan_table(&inst, solution, &mut s);
        solution_block(&inst, solution, &mut s);
    }
    Run {
        code,
        stdout: s,
        stderr: String::new(),
    }
}

fn stats_lines(out: &SearchOutcome, s: &mut String) {
    let st = &out.stats;
    let _ = writeln!(
        s,
        "stats: expansions {}, generated {}, pruned {}, conflicts {}, delta fallbacks {}",
        st.expansions, st.generated, st.pruned, st.conflicts, st.delta_fallbacks
    );
    if let Some(root) = st.lower_bounds.first() {
        let _ = writeln!(
            s,
            "lower bounds: root {}, highest {}, flat {}",
            fmt_num(*root),
            fmt_num(st.max_lower_bound()),
            if trace_is_flat(&st.lower_bounds) { "yes" } else { "no" }
        );
    }
}

/// Solves every scenario, `jobs` at a time, and prints the reports in input
/// order. Returns the highest exit code.
pub fn solve_all(
    scenarios: &[PathBuf],
    mode: Mode,
    budget: Budget,
    trace: Option<&Path>,
    output: Option<&Path>,
    jobs: usize,
) -> u8 {
    let slots: Vec<Mutex<Option<Run>>> = scenarios.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(scenarios.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = scenarios.get(i) else { break };
                let run = solve_one(path, mode, budget, trace, output);
                *slots[i].lock().expect("no panics while holding the lock") = Some(run);
            });
        }
    });
    let mut code = EXIT_SOLVED;
    for (i, slot) in slots.into_iter().enumerate() {
        let run = slot.into_inner().expect("lock is free").expect("every scenario ran");
        if i > 0 {
            println!();
        }
        print!("{}", run.stdout);
        eprint!("{}", run.stderr);
        code = code.max(run.code);
    }
    code
}

pub fn validate(scenario: &Path, solution: &Path) -> u8 {
    let loaded = load_instance(scenario).and_then(|inst| {
        let text = read(solution)?;
        let sol = load_solution(&inst, &text).map_err(|e| format!("{}: {e}", solution.display()))?;
        Ok((inst, sol))
    });
    let (inst, sol) = match loaded {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    match validate_solution(&inst, &sol) {
        Err(e) => {
            eprintln!("error: structural: {e}");
            EXIT_ERROR
        }
        Ok(conflicts) => {
            println!("{} conflicts, SIC={}", conflicts.len(), fmt_num(sol.sic()));
            for c in &conflicts {
                println!("  {}", c.describe(&inst));
            }
            if conflicts.is_empty() {
                EXIT_SOLVED
            } else {
                EXIT_CONFLICTS
            }
        }
    }
}

pub fn classify(scenario: &Path) -> u8 {
    let inst = match load_instance(scenario) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    let name = |v| inst.vertex_name(v);
    match classify_instance(&inst) {
        InstanceClass::NonOverlapping => println!("class: non-overlapping"),
        InstanceClass::General(ws) => {
            println!("class: general ({} witnesses)", ws.len());
            for w in ws {
                match w {
                    OverlapWitness::Vertex(a, b) => println!("  vertices {} and {} overlap", name(a), name(b)),
                    OverlapWitness::Edge { vertex, edge } => {
                        println!("  vertex {} overlaps edge {}-{}", name(vertex), name(edge.0), name(edge.1))
                    }
                }
            }
        }
    }
    EXIT_SOLVED
}

pub fn oracle(scenario: &Path, unit: f64, bound: f64) -> u8 {
    let inst = match load_instance(scenario) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if !(unit > 0.0 && unit.is_finite()) {
        eprintln!("error: --unit must be positive, got {unit}");
        return EXIT_ERROR;
    }
    match oracle_dt(&inst, unit, bound) {
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
        Ok(None) => {
            println!("no solution with SIC <= {}", fmt_num(bound));
            EXIT_INFEASIBLE
        }
        Ok(Some(sol)) => {
            let mut s = String::new();
            let _ = writeln!(s, "optimal SIC {}", fmt_num(sol.sic()));
            plan_table(&inst, &sol, &mut s);
            solution_block(&inst, &sol, &mut s);
            print!("{s}");
            EXIT_SOLVED
        }
    }
}

pub fn demo(name: &str) -> u8 {
    match ccbs_core::demo::run(name) {
        None => {
            eprintln!("error: unknown demo {name:?}");
            EXIT_ERROR
        }
        Some(Err(e)) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
        Some(Ok(r)) => {
            print!("{r}");
            if r.pass {
                EXIT_SOLVED
            } else {
                EXIT_DEMO_FAILED
            }
        }
    }
}
