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

//! Self-checking demonstrations on the bundled fixtures. Every verdict is
//! computed from solver and validator output.

use crate::ccbs::{detect_conflict, solve, Budget, Mode, SearchOutcome, SolveError, SolveOptions, Status};
use crate::constraints::{satisfies, split_vertex_range, Constraint, DeltaRule};
use crate::fixtures;
use crate::geometry::Extent;
use crate::model::{validate_solution, Instance, Motion, Plan, Solution};
use crate::scenario::fmt_num;
use std::fmt;

/// Slack on "the trace never rises above the root cost".
pub const FLAT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct DemoReport {
    pub name: &'static str,
    pub claim: String,
    pub lines: Vec<String>,
    pub pass: bool,
}

impl fmt::Display for DemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "demo {}", self.name)?;
        writeln!(f, "claim: {}", self.claim)?;
        for l in &self.lines {
            writeln!(f, "  {l}")?;
        }
        writeln!(f, "verdict: {}", if self.pass { "PASS" } else { "FAIL" })
    }
}

pub const NAMES: [&str; 4] = ["fig2-unsound", "nontermination", "shifting", "counterexample"];

/// Runs a demo by name with its default budget.
pub fn run(name: &str) -> Option<Result<DemoReport, SolveError>> {
    Some(match name {
        "fig2-unsound" => Ok(fig2_unsound()),
        "nontermination" => nontermination(10_000),
        "shifting" => demo_shifting_failure(&fixtures::fig2(), DeltaRule::Half, 5_000).map(|r| r.report),
        "counterexample" => counterexample(20_000).map(|r| r.report),
        _ => return None,
    })
}

fn status_line(out: &SearchOutcome) -> String {
    match &out.status {
        Status::Solved { g, .. } => format!("outcome: solved g={}", fmt_num(*g)),
        Status::BudgetExhausted { lower_bound, frontier } => format!(
            "outcome: budget exhausted, lower bound {}, frontier {}",
            fmt_num(*lower_bound),
            frontier
        ),
        Status::Infeasible => "outcome: infeasible".to_string(),
    }
}

fn shortest_plans(inst: &Instance) -> Solution {
    let plans = inst
        .agent_ids()
        .map(|a| crate::sipp::plan(inst, a, &[], crate::sipp::LowLevelMode::Continuous, None).expect("unconstrained plan exists"))
        .collect();
    Solution::new(plans)
}

/// Shifts every move of `plan` later by `by`.
fn delayed(inst: &Instance, plan: &Plan, by: f64) -> Plan {
    let moves = plan
        .motions
        .iter()
        .filter(|m| !m.is_wait())
        .map(|m| m.motion.at(m.start + by))
        .collect();
    Plan::normalized(inst, plan.agent, moves)
}

/// The two constraints that resolve the first fig2 conflict by vertex
/// range also forbid a plan pair that never collides: the waiter holds its
/// vertex to the end of the range and then steps aside, and the mover starts
/// late enough to arrive after it left.
pub fn fig2_unsound() -> DemoReport {
    let inst = fixtures::fig2();
    let mut lines = Vec::new();
    let claim = "vertex-range splitting removes a collision-free plan pair from both children".to_string();
    let root = shortest_plans(&inst);
    let Some(conflict) = detect_conflict(&inst, &root) else {
        lines.push("root solution has no conflict".to_string());
        return DemoReport { name: "fig2-unsound", claim, lines, pass: false };
    };
    lines.push(format!("root conflict: {}", conflict.describe(&inst)));
    let (range, motion) = match split_vertex_range(&inst, &conflict) {
        Ok(pair) => pair,
        Err(e) => {
            lines.push(format!("split failed: {e}"));
            return DemoReport { name: "fig2-unsound", claim, lines, pass: false };
        }
    };
    let (range_k, motion_k) = (Constraint::from(range), Constraint::from(motion));
    lines.push(format!("constraint 1: {}", range_k.describe(&inst)));
    lines.push(format!("constraint 2: {}", motion_k.describe(&inst)));

    let Extent::Finite(leave) = range.forbidden.hi() else {
        lines.push("range has no finite end".to_string());
        return DemoReport { name: "fig2-unsound", claim, lines, pass: false };
    };
    let v = range.vertex;
    let escape = inst
        .neighbours(v)
        .iter()
        .copied()
        .find(|&(w, _)| {
            root.plans[motion.agent.0]
                .motions
                .iter()
                .all(|m| m.motion.from != w && m.motion.to != w)
        });
    let Some((escape, len)) = escape else {
        lines.push("waiter has no side vertex".to_string());
        return DemoReport { name: "fig2-unsound", claim, lines, pass: false };
    };
    let waiter_plan = Plan::normalized(
        &inst,
        range.agent,
        vec![
            Motion::travel(v, escape, len).at(leave),
            Motion::travel(escape, v, len).at(leave + len),
        ],
    );
    let mover_plan = delayed(&inst, &root.plans[motion.agent.0], leave);
    let mut plans = root.plans.clone();
    plans[range.agent.0] = waiter_plan;
    plans[motion.agent.0] = mover_plan;
    let witness = Solution::new(plans);
    for p in &witness.plans {
        let steps: Vec<String> = p.motions.iter().map(|m| m.describe(&inst)).collect();
        lines.push(format!("{}: {}", inst.agent(p.agent).name, steps.join(", ")));
    }

    let conflicts = match validate_solution(&inst, &witness) {
        Ok(c) => c.len(),
        Err(e) => {
            lines.push(format!("witness is malformed: {e}"));
            return DemoReport { name: "fig2-unsound", claim, lines, pass: false };
        }
    };
    let breaks_range = !satisfies(&witness.plans[range.agent.0], &range_k);
    let breaks_motion = !satisfies(&witness.plans[motion.agent.0], &motion_k);
    lines.push(format!("witness conflicts: {conflicts}"));
    lines.push(format!("violates constraint 1: {breaks_range}"));
    lines.push(format!("violates constraint 2: {breaks_motion}"));
    DemoReport {
        name: "fig2-unsound",
        claim,
        lines,
        pass: conflicts == 0 && breaks_range && breaks_motion,
    }
}

/// True when no expanded node cost more than the root.
pub fn trace_is_flat(trace: &[f64]) -> bool {
    match trace.first() {
        Some(&root) => trace.iter().all(|&g| g <= root + FLAT_TOL),
        None => false,
    }
}

fn trace_lines(out: &SearchOutcome, lines: &mut Vec<String>) {
    let trace = &out.stats.lower_bounds;
    lines.push(format!(
        "expansions {}, generated {}, pruned {}",
        out.stats.expansions, out.stats.generated, out.stats.pruned
    ));
    if let Some(root) = trace.first() {
        lines.push(format!(
            "root g {}, highest expanded g {}",
            fmt_num(*root),
            fmt_num(out.stats.max_lower_bound())
        ));
    }
}

/// Motion splitting on the fig2 fixture keeps producing children of unchanged cost.
pub fn nontermination(budget: usize) -> Result<DemoReport, SolveError> {
    let inst = fixtures::fig2();
    let out = solve(&inst, &SolveOptions::new(Mode::Motion, Budget::expansions(budget)))?;
    let mut lines = vec![format!("mode motion, budget {budget} expansions"), status_line(&out)];
    trace_lines(&out, &mut lines);
    let flat = trace_is_flat(&out.stats.lower_bounds);
    lines.push(format!("lower-bound trace flat: {flat}"));
    let exhausted = matches!(out.status, Status::BudgetExhausted { .. });
    Ok(DemoReport {
        name: "nontermination",
        claim: "motion splitting exhausts any budget without raising the lower bound".to_string(),
        lines,
        pass: exhausted && flat,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftingDemo {
    pub report: DemoReport,
    pub outcome: SearchOutcome,
    /// Splits whose vertex-range child was audited for the original conflict.
    pub audited: usize,
    pub residual: usize,
}

/// Runs shifting splits and audits every vertex-range child for the conflict
/// it was meant to remove.
pub fn demo_shifting_failure(inst: &Instance, rule: DeltaRule, budget: usize) -> Result<ShiftingDemo, SolveError> {
    let mut options = SolveOptions::new(Mode::Shifting(rule), Budget::expansions(budget));
    options.audit = true;
    let out = solve(inst, &options)?;
    let audits: Vec<bool> = out.stats.splits.iter().filter_map(|s| s.residual).collect();
    let audited = audits.len();
    let residual = audits.iter().filter(|&&r| r).count();
    let positive = out.stats.splits.iter().any(|s| s.delta.is_some_and(|d| d > 0.0));
    let mut lines = vec![format!("mode shifting, delta rule {rule}, budget {budget} expansions"), status_line(&out)];
    trace_lines(&out, &mut lines);
    lines.push(format!("delta fallbacks: {}", out.stats.delta_fallbacks));
    lines.push(format!("vertex-range children audited: {audited}, still in conflict: {residual}"));
    let flat = trace_is_flat(&out.stats.lower_bounds);
    lines.push(format!("lower-bound trace flat: {flat}"));
    let exhausted = matches!(out.status, Status::BudgetExhausted { .. });
    let signature = if positive {
        audited > 0 && residual == audited
    } else {
        flat
    };
    Ok(ShiftingDemo {
        report: DemoReport {
            name: "shifting",
            claim: "shifting splits leave the conflict in place and the search does not finish".to_string(),
            lines,
            pass: exhausted && signature,
        },
        outcome: out,
        audited,
        residual,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CounterexampleDemo {
    pub report: DemoReport,
    pub handcrafted_sic: f64,
    pub handcrafted_conflicts: usize,
    pub outcome: SearchOutcome,
}

/// Vertex-range splitting returns a plan set dearer than the handcrafted one.
pub fn counterexample(budget: usize) -> Result<CounterexampleDemo, SolveError> {
    let inst = fixtures::counterexample();
    let hand = fixtures::counterexample_handcrafted(&inst);
    let handcrafted_conflicts = validate_solution(&inst, &hand).map(|c| c.len()).unwrap_or(usize::MAX);
    let handcrafted_sic = hand.sic();
    let out = solve(&inst, &SolveOptions::new(Mode::VertexRange, Budget::expansions(budget)))?;
    let mut lines = vec![
        format!(
            "handcrafted: SIC {}, conflicts {}",
            fmt_num(handcrafted_sic),
            handcrafted_conflicts
        ),
        format!("mode vertex-range, budget {budget} expansions"),
        status_line(&out),
    ];
    trace_lines(&out, &mut lines);
    let pass = match &out.status {
        Status::Solved { g, .. } => {
            lines.push(format!("gap to handcrafted: {}", fmt_num(g - handcrafted_sic)));
            handcrafted_conflicts == 0 && *g > handcrafted_sic + FLAT_TOL
        }
        _ => false,
    };
    Ok(CounterexampleDemo {
        report: DemoReport {
            name: "counterexample",
            claim: "vertex-range splitting misses a cheaper collision-free plan set".to_string(),
            lines,
            pass,
        },
        handcrafted_sic,
        handcrafted_conflicts,
        outcome: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::line_instance;

    #[test]
    fn fig2_witness_passes() {
        let r = fig2_unsound();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn short_nontermination_run_is_flat() {
        let r = nontermination(200).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn conflict_free_shifting_run_solves_with_nothing_audited() {
        let inst = line_instance(&[(0., 0.), (4., 0.)], &[(0, 1)], 0.5);
        let d = demo_shifting_failure(&inst, DeltaRule::Half, 100).unwrap();
        assert!(matches!(d.outcome.status, Status::Solved { .. }));
        assert_eq!(d.audited, 0);
        assert!(!d.report.pass);
    }

    #[test]
    fn reports_are_repeatable() {
        assert_eq!(fig2_unsound().to_string(), fig2_unsound().to_string());
        assert_eq!(run("nope"), None);
    }
}
