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

//! Best-first constraint-tree search over joint solutions.

use crate::constraints::{
    residual_conflict, shape, split_motion, split_shifting, split_vertex_range, split_wait_wait,
    Constraint, ConflictShape, ConstraintError, DeltaRule, ShiftParameters,
};
use crate::geometry::Extent;
use crate::model::{
    all_conflicts, validate_instance, AgentId, Conflict, Instance, InstanceViolation, Motion, Plan, Solution, TimedMotion,
};
use crate::sipp::{self, LowLevelMode};
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Slack allowed when checking that children never cost less than parents.
pub const MONOTONICITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Motion,
    VertexRange,
    Shifting(DeltaRule),
    Discrete { unit: f64 },
}

impl Mode {
    fn low_level(&self) -> LowLevelMode {
        match *self {
            Mode::Motion => LowLevelMode::Motion,
            Mode::VertexRange | Mode::Shifting(_) => LowLevelMode::Continuous,
            Mode::Discrete { unit } => LowLevelMode::Discrete { unit },
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Motion => write!(f, "motion"),
            Mode::VertexRange => write!(f, "vertex-range"),
            Mode::Shifting(rule) => write!(f, "shifting({rule})"),
            Mode::Discrete { unit } => write!(f, "dt(unit={unit})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    pub max_expansions: usize,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_expansions: 100_000,
            max_time: Duration::from_secs(60),
        }
    }
}

impl Budget {
    pub fn expansions(max_expansions: usize) -> Self {
        Self {
            max_expansions,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub mode: Mode,
    pub budget: Budget,
    /// Record one text line per expansion.
    pub dump: bool,
    /// Record what each split did.
    pub audit: bool,
}

impl SolveOptions {
    pub fn new(mode: Mode, budget: Budget) -> Self {
        Self {
            mode,
            budget,
            dump: false,
            audit: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    /// `path` holds every constraint from the root to the goal node.
    Solved {
        solution: Solution,
        g: f64,
        path: Vec<Constraint>,
    },
    BudgetExhausted { lower_bound: f64, frontier: usize },
    Infeasible,
}

/// What one split did, recorded when auditing.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitRecord {
    pub parent_g: f64,
    pub shape: ConflictShape,
    pub delta: Option<f64>,
    /// For shifting splits of a wait-move conflict: whether the original
    /// conflict survives in the vertex-range child.
    pub residual: Option<bool>,
    pub children_g: [Option<f64>; 2],
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    pub expansions: usize,
    pub generated: usize,
    pub pruned: usize,
    pub conflicts: usize,
    pub delta_fallbacks: usize,
    /// Cost of every expanded node, in expansion order.
    pub lower_bounds: Vec<f64>,
    pub splits: Vec<SplitRecord>,
    pub dump: Vec<String>,
}

impl Stats {
    pub fn max_lower_bound(&self) -> f64 {
        self.lower_bounds.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub status: Status,
    pub stats: Stats,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<InstanceViolation>),
    #[error("child cost {child} below parent cost {parent} after adding {constraint}")]
    CostDecrease {
        parent: f64,
        child: f64,
        constraint: String,
    },
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// The conflict with the earliest collision start; ties go to the
/// lexicographically smallest agent pair.
pub fn detect_conflict(inst: &Instance, sol: &Solution) -> Option<Conflict> {
    earliest(all_conflicts(inst, sol).into_iter())
}

fn earliest(conflicts: impl Iterator<Item = Conflict>) -> Option<Conflict> {
    conflicts.fold(None, |best: Option<Conflict>, c| match best {
        Some(b)
            if (b.interval.lo(), b.agents.0, b.agents.1) <= (c.interval.lo(), c.agents.0, c.agents.1) =>
        {
            Some(b)
        }
        _ => Some(c),
    })
}

struct CtNode {
    parent: Option<usize>,
    constraint: Option<Constraint>,
    g: f64,
    solution: Option<Solution>,
    conflict: Option<Conflict>,
    conflicts: usize,
}

#[derive(Clone, Copy, Debug)]
struct FrontierKey {
    g: f64,
    conflicts: usize,
    id: usize,
}

impl PartialEq for FrontierKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FrontierKey {}

impl PartialOrd for FrontierKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FrontierKey {
    /// Reversed so the max-heap pops the smallest `(g, conflicts, id)`.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .g
            .total_cmp(&self.g)
            .then(other.conflicts.cmp(&self.conflicts))
            .then(other.id.cmp(&self.id))
    }
}

fn agent_constraints(nodes: &[CtNode], mut at: usize, agent: AgentId) -> Vec<Constraint> {
    let mut out = Vec::new();
    loop {
        let node = &nodes[at];
        if let Some(k) = node.constraint.filter(|k| k.agent() == agent) {
            out.push(k);
        }
        match node.parent {
            Some(p) => at = p,
            None => break,
        }
    }
    out.reverse();
    out
}

/// Every constraint on the path from `at` to the root.
fn path_constraints(nodes: &[CtNode], mut at: usize) -> Vec<Constraint> {
    let mut out = Vec::new();
    loop {
        let node = &nodes[at];
        out.extend(node.constraint);
        match node.parent {
            Some(p) => at = p,
            None => break,
        }
    }
    out.reverse();
    out
}

/// Splits a conflict per the mode. Returns the two constraints and, for a
/// shifting split of a wait-move conflict, its parameters.
fn split(
    inst: &Instance,
    mode: Mode,
    c: &Conflict,
    stats: &mut Stats,
) -> Result<([Constraint; 2], Option<ShiftParameters>), SolveError> {
    let s = shape(c);
    let pair = match (mode, s) {
        (Mode::Motion | Mode::Discrete { .. }, _) | (_, ConflictShape::MoveMove) => {
            let (a, b) = split_motion(inst, c)?;
            ([a.into(), b.into()], None)
        }
        (_, ConflictShape::WaitWait) => {
            let (a, b) = split_wait_wait(c)?;
            ([a.into(), b.into()], None)
        }
        (Mode::VertexRange, ConflictShape::WaitMove { .. }) => {
            let (a, b) = split_vertex_range(inst, c)?;
            ([a.into(), b.into()], None)
        }
        (Mode::Shifting(rule), ConflictShape::WaitMove { .. }) => {
            let probe = ShiftParameters::new(inst, c, 0.0)?;
            let length = probe.collision.length().as_f64();
            let p = match ShiftParameters::new(inst, c, rule.delta(length)) {
                Ok(p) => p,
                Err(ConstraintError::Parameter(_)) => {
                    stats.delta_fallbacks += 1;
                    ShiftParameters::new(inst, c, DeltaRule::Half.delta(length))?
                }
                Err(e) => return Err(e.into()),
            };
            let (a, b) = split_shifting(c, &p)?;
            ([a.into(), b.into()], Some(p))
        }
    };
    Ok(pair)
}

/// Runs the constraint-tree search.
pub fn solve(inst: &Instance, options: &SolveOptions) -> Result<SearchOutcome, SolveError> {
    let violations = validate_instance(inst);
    if !violations.is_empty() {
        return Err(SolveError::InvalidInstance(violations));
    }
    let started = Instant::now();
    let mode = options.mode;
    let low = mode.low_level();
    let heuristics: Vec<Vec<Extent>> = inst
        .agents()
        .iter()
        .map(|a| sipp::admissible_heuristic(inst, a.goal))
        .collect();
    let mut stats = Stats::default();

    let mut plans = Vec::with_capacity(inst.agents().len());
    for agent in inst.agent_ids() {
        match sipp::plan(inst, agent, &[], low, Some(&heuristics[agent.0])) {
            Ok(p) => plans.push(p),
            Err(_) => {
                return Ok(SearchOutcome {
                    status: Status::Infeasible,
                    stats,
                })
            }
        }
    }
    let root = Solution::new(plans);
    let mut nodes = Vec::new();
    let mut frontier = BinaryHeap::new();
    let push = |nodes: &mut Vec<CtNode>, frontier: &mut BinaryHeap<FrontierKey>, mut node: CtNode| {
        let sol = node.solution.as_ref().expect("fresh node");
        let all = all_conflicts(inst, sol);
        node.conflicts = all.len();
        node.conflict = earliest(all.into_iter());
        let id = nodes.len();
        frontier.push(FrontierKey {
            g: node.g,
            conflicts: node.conflicts,
            id,
        });
        nodes.push(node);
    };
    let g0 = root.sic();
    push(
        &mut nodes,
        &mut frontier,
        CtNode {
            parent: None,
            constraint: None,
            g: g0,
            solution: Some(root),
            conflict: None,
            conflicts: 0,
        },
    );
    stats.generated = 1;

    loop {
        let out_of_budget = stats.expansions >= options.budget.max_expansions
            || started.elapsed() >= options.budget.max_time;
        if out_of_budget {
            let lower_bound = frontier.peek().map(|k| k.g).unwrap_or(f64::INFINITY);
            return Ok(SearchOutcome {
                status: Status::BudgetExhausted {
                    lower_bound,
                    frontier: frontier.len(),
                },
                stats,
            });
        }
        let Some(key) = frontier.pop() else {
            return Ok(SearchOutcome {
                status: Status::Infeasible,
                stats,
            });
        };
        let id = key.id;
        stats.expansions += 1;
        let g = nodes[id].g;
        stats.lower_bounds.push(g);
        let solution = nodes[id].solution.take().expect("each node is expanded once");
        let Some(conflict) = nodes[id].conflict else {
            if options.dump {
                stats.dump.push(format!("expand {} g={} goal", stats.expansions, g));
            }
            return Ok(SearchOutcome {
                status: Status::Solved {
                    solution,
                    g,
                    path: path_constraints(&nodes, id),
                },
                stats,
            });
        };
        stats.conflicts += 1;
        let (pair, shift) = split(inst, mode, &conflict, &mut stats)?;
        if options.dump {
            let added = nodes[id]
                .constraint
                .map(|k| k.describe(inst))
                .unwrap_or_else(|| "root".to_string());
            stats.dump.push(format!(
                "expand {} g={} added={} conflict={}",
                stats.expansions,
                g,
                added,
                conflict.describe(inst)
            ));
        }
        let mut children_g = [None, None];
        for (slot, k) in pair.into_iter().enumerate() {
            let agent = k.agent();
            let mut ks = agent_constraints(&nodes, id, agent);
            ks.push(k);
            let replanned = match sipp::plan(inst, agent, &ks, low, Some(&heuristics[agent.0])) {
                Ok(p) => p,
                Err(_) => {
                    stats.pruned += 1;
                    continue;
                }
            };
            let mut child_solution = solution.clone();
            let old = child_solution.plans[agent.0].completion_time();
            let new = replanned.completion_time();
            child_solution.plans[agent.0] = replanned;
            let child_g = g - old + new;
            if child_g < g - MONOTONICITY_TOL {
                return Err(SolveError::CostDecrease {
                    parent: g,
                    child: child_g,
                    constraint: k.describe(inst),
                });
            }
            children_g[slot] = Some(child_g);
            stats.generated += 1;
            push(
                &mut nodes,
                &mut frontier,
                CtNode {
                    parent: Some(id),
                    constraint: Some(k),
                    g: child_g,
                    solution: Some(child_solution),
                    conflict: None,
                    conflicts: 0,
                },
            );
        }
        if options.audit {
            stats.splits.push(SplitRecord {
                parent_g: g,
                shape: shape(&conflict),
                delta: shift.map(|p| p.delta),
                residual: shift.map(|p| residual_conflict(inst, &p)),
                children_g,
            });
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle is limited to {max_agents} agents and {max_vertices} vertices with a finite bound")]
    TooLarge { max_agents: usize, max_vertices: usize },
}

pub const ORACLE_MAX_AGENTS: usize = 4;
pub const ORACLE_MAX_VERTICES: usize = 10;

#[derive(Clone, Debug)]
struct Walker {
    vertex: crate::model::VertexId,
    /// Time of the agent's next decision.
    free: f64,
    last_move_end: f64,
    finished: bool,
    motions: Vec<TimedMotion>,
}

#[derive(Clone, Debug)]
struct Joint {
    agents: Vec<Walker>,
    bound: f64,
}

fn quantize(t: f64) -> i64 {
    (t * 1e9).round() as i64
}

impl Joint {
    /// Lower bound on the final cost.
    fn lower_bound(&self, inst: &Instance, h: &[Vec<Extent>]) -> f64 {
        self.agents
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if a.finished || a.vertex == inst.agents()[k].goal {
                    a.last_move_end
                } else {
                    a.free + h[k][a.vertex.0].as_f64()
                }
            })
            .sum()
    }

    /// Everything that can still influence the future: per-agent position
    /// and timing, plus the motions that end after the earliest decision.
    fn key(&self) -> Vec<i64> {
        let now = self
            .agents
            .iter()
            .filter(|a| !a.finished)
            .map(|a| a.free)
            .fold(f64::INFINITY, f64::min);
        let mut key = Vec::new();
        for a in &self.agents {
            key.extend([
                a.vertex.0 as i64,
                quantize(a.free),
                quantize(a.last_move_end),
                a.finished as i64,
                -1,
            ]);
            for m in a.motions.iter().filter(|m| m.end().as_f64() > now) {
                key.extend([
                    m.motion.from.0 as i64,
                    m.motion.to.0 as i64,
                    quantize(m.start),
                    m.end().finite().map(quantize).unwrap_or(i64::MAX),
                ]);
            }
        }
        key
    }
}

fn collides_with_others(inst: &Instance, joint: &Joint, agent: usize, m: &TimedMotion) -> bool {
    let Ok(seg) = m.segment(inst) else { return true };
    joint.agents.iter().enumerate().any(|(k, other)| {
        k != agent
            && other.motions.iter().any(|o| {
                o.segment(inst)
                    .map(|s| crate::geometry::in_collision(&seg, &s, inst.radius()))
                    .unwrap_or(true)
            })
    })
}

/// Exhaustive best-first search over joint unit-wait plans, returning a
/// minimum-cost collision-free solution with cost at most `bound`.
pub fn oracle_dt(inst: &Instance, unit: f64, bound: f64) -> Result<Option<Solution>, OracleError> {
    if inst.agents().len() > ORACLE_MAX_AGENTS || inst.vertices().len() > ORACLE_MAX_VERTICES || !bound.is_finite()
    {
        return Err(OracleError::TooLarge {
            max_agents: ORACLE_MAX_AGENTS,
            max_vertices: ORACLE_MAX_VERTICES,
        });
    }
    let h: Vec<Vec<Extent>> = inst
        .agents()
        .iter()
        .map(|a| sipp::admissible_heuristic(inst, a.goal))
        .collect();
    let start = Joint {
        agents: inst
            .agents()
            .iter()
            .map(|a| Walker {
                vertex: a.start,
                free: 0.0,
                last_move_end: 0.0,
                finished: false,
                motions: Vec::new(),
            })
            .collect(),
        bound,
    };
    // Nobody moves after `bound`, so an agent parked at its goal never
    // needs to wait past it.
    let time_cap = bound + unit + crate::geometry::EPS;
    let mut arena = vec![start];
    let mut seen = std::collections::HashSet::new();
    let mut open = BinaryHeap::new();
    let lb0 = arena[0].lower_bound(inst, &h);
    if lb0 > bound + crate::geometry::EPS {
        return Ok(None);
    }
    open.push(FrontierKey {
        g: lb0,
        conflicts: 0,
        id: 0,
    });
    while let Some(FrontierKey { id, .. }) = open.pop() {
        let joint = arena[id].clone();
        let Some(agent) = joint
            .agents
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.finished)
            .min_by(|(i, a), (j, b)| a.free.total_cmp(&b.free).then(i.cmp(j)))
            .map(|(k, _)| k)
        else {
            let plans = joint
                .agents
                .into_iter()
                .enumerate()
                .map(|(k, a)| Plan {
                    agent: AgentId(k),
                    motions: a.motions,
                })
                .collect();
            return Ok(Some(Solution::new(plans)));
        };
        let w = &joint.agents[agent];
        let goal = inst.agents()[agent].goal;
        let mut actions: Vec<(TimedMotion, bool)> = Vec::new();
        if w.vertex == goal {
            actions.push((Motion::wait(w.vertex, Extent::Unbounded).at(w.free), true));
        }
        if w.free + unit <= time_cap {
            actions.push((Motion::wait(w.vertex, Extent::Finite(unit)).at(w.free), false));
        }
        for &(to, len) in inst.neighbours(w.vertex) {
            if !h[agent][to.0].is_unbounded() {
                actions.push((Motion::travel(w.vertex, to, len).at(w.free), false));
            }
        }
        for (m, finish) in actions {
            if collides_with_others(inst, &joint, agent, &m) {
                continue;
            }
            let mut next = joint.clone();
            let a = &mut next.agents[agent];
            a.motions.push(m);
            a.vertex = m.motion.to;
            if finish {
                a.finished = true;
            } else {
                a.free = m.end().as_f64();
                if !m.is_wait() {
                    a.last_move_end = a.free;
                }
            }
            let lb = next.lower_bound(inst, &h);
            if lb > next.bound + crate::geometry::EPS {
                continue;
            }
            if !seen.insert(next.key()) {
                continue;
            }
            let id = arena.len();
            arena.push(next);
            open.push(FrontierKey { g: lb, conflicts: 0, id });
        }
    }
    Ok(None)
}
