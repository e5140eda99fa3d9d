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

//! Single-agent planning under constraints: safe-interval search in
//! continuous time and a lattice search for unit waits.

use crate::constraints::{Constraint, MotionConstraint};
use crate::geometry::{Extent, TimeInterval, EPS};
use crate::model::{AgentId, Instance, Motion, Plan, TimedMotion, VertexId};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("agent {0}: goal unreachable under the constraints")]
    Infeasible(AgentId),
    #[error("agent {0}: wait repair needs a piece shorter than the tolerance")]
    Unrepairable(AgentId),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LowLevelMode {
    /// Waits of any length; presence and move-departure constraints are
    /// searched directly.
    Continuous,
    /// As `Continuous`; waits that match a forbidden wait signature are then
    /// split into equal-cost pieces.
    Motion,
    /// Waits of exactly `unit`; departures at arrival plus whole units.
    Discrete { unit: f64 },
}

/// Presence-safe intervals per vertex, safe departure intervals per
/// directed edge, and the wait-signature constraints the table cannot hold.
#[derive(Clone, Debug, Default)]
pub struct SafeIntervalTable {
    pub vertices: Vec<Vec<TimeInterval>>,
    pub edges: HashMap<(VertexId, VertexId), Vec<TimeInterval>>,
    pub waits: Vec<MotionConstraint>,
}

fn subtract_all(base: Vec<TimeInterval>, cut: &TimeInterval) -> Vec<TimeInterval> {
    base.iter().flat_map(|iv| iv.subtract(cut)).collect()
}

impl SafeIntervalTable {
    pub fn vertex(&self, v: VertexId) -> &[TimeInterval] {
        &self.vertices[v.0]
    }

    /// Safe departures along `(u, w)`; `None` means unrestricted.
    pub fn edge(&self, u: VertexId, w: VertexId) -> Option<&[TimeInterval]> {
        self.edges.get(&(u, w)).map(Vec::as_slice)
    }
}

pub fn build_safe_intervals(inst: &Instance, agent: AgentId, constraints: &[Constraint]) -> SafeIntervalTable {
    let all = vec![TimeInterval::from(0.0)];
    let mut table = SafeIntervalTable {
        vertices: vec![all.clone(); inst.vertices().len()],
        ..Default::default()
    };
    for k in constraints.iter().filter(|k| k.agent() == agent) {
        match k {
            Constraint::VertexRange(c) => {
                let slot = &mut table.vertices[c.vertex.0];
                *slot = subtract_all(std::mem::take(slot), &c.forbidden);
            }
            Constraint::Motion(c) if c.motion.is_wait() => table.waits.push(*c),
            Constraint::Motion(c) => {
                let slot = table
                    .edges
                    .entry((c.motion.from, c.motion.to))
                    .or_insert_with(|| all.clone());
                *slot = subtract_all(std::mem::take(slot), &c.forbidden);
            }
        }
    }
    for list in table.vertices.iter_mut().chain(table.edges.values_mut()) {
        list.sort_by(|a, b| a.lo().total_cmp(&b.lo()));
    }
    table
}

/// Shortest-path distance from every vertex to `goal`.
pub fn admissible_heuristic(inst: &Instance, goal: VertexId) -> Vec<Extent> {
    let mut dist = vec![Extent::Unbounded; inst.vertices().len()];
    let mut heap = BinaryHeap::new();
    dist[goal.0] = Extent::Finite(0.0);
    heap.push(MinKey::new([0.0, 0.0], goal.0, 0));
    while let Some(MinKey { key, vertex, .. }) = heap.pop() {
        let d = key[0];
        if d > dist[vertex].as_f64() {
            continue;
        }
        for &(w, len) in inst.neighbours(VertexId(vertex)) {
            let nd = d + len;
            if nd < dist[w.0].as_f64() {
                dist[w.0] = Extent::Finite(nd);
                heap.push(MinKey::new([nd, 0.0], w.0, 0));
            }
        }
    }
    dist
}

/// Heap entry ordered so that `BinaryHeap` pops the smallest `key[0]`,
/// then the largest `key[1]`, then the smallest vertex, then the oldest.
#[derive(Clone, Copy, Debug)]
struct MinKey {
    key: [f64; 2],
    vertex: usize,
    seq: usize,
}

impl MinKey {
    fn new(key: [f64; 2], vertex: usize, seq: usize) -> Self {
        Self { key, vertex, seq }
    }
}

impl PartialEq for MinKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for MinKey {}

impl PartialOrd for MinKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MinKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key[0]
            .total_cmp(&self.key[0])
            .then(self.key[1].total_cmp(&other.key[1]))
            .then(other.vertex.cmp(&self.vertex))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Plans a minimum-completion-time path for `agent` under `constraints`
/// (other agents' constraints are ignored).
pub fn plan(
    inst: &Instance,
    agent: AgentId,
    constraints: &[Constraint],
    mode: LowLevelMode,
    heuristic: Option<&[Extent]>,
) -> Result<Plan, PlanError> {
    let owned;
    let h = match heuristic {
        Some(h) => h,
        None => {
            owned = admissible_heuristic(inst, inst.agent(agent).goal);
            &owned
        }
    };
    match mode {
        LowLevelMode::Continuous | LowLevelMode::Motion => {
            let table = build_safe_intervals(inst, agent, constraints);
            let raw = search_intervals(inst, agent, &table, h)?;
            if table.waits.is_empty() {
                return Ok(raw);
            }
            let repaired = repair_waits(agent, raw.motions.clone(), &table.waits)?;
            let out = Plan { agent, motions: repaired };
            debug_assert_eq!(out.completion_time(), raw.completion_time());
            Ok(out)
        }
        LowLevelMode::Discrete { unit } => search_lattice(inst, agent, constraints, unit, h),
    }
}

#[derive(Clone, Copy, Debug)]
struct IntervalNode {
    vertex: VertexId,
    interval: usize,
    arrival: f64,
    /// Parent node and the departure time from it.
    parent: Option<(usize, f64)>,
}

/// Earliest departure `d >= t` with `d` inside `stay` and `window`, and the
/// arrival `d + len` inside `target`.
fn earliest_departure(
    t: f64,
    stay: &TimeInterval,
    window: &TimeInterval,
    target: &TimeInterval,
    len: f64,
) -> Option<f64> {
    let w = stay
        .intersect(&TimeInterval::from(t))?
        .intersect(window)?
        .intersect(&target.shifted(-len))?;
    let mut d = w.earliest_from(t)?;
    for _ in 0..8 {
        if target.contains(d + len) {
            return Some(d);
        }
        d = d.next_up();
        if !w.contains(d) {
            return None;
        }
    }
    None
}

/// Whether a terminal wait can begin at `t` or later at the goal, given
/// wait-signature constraints that never end.
fn terminal_possible(goal: VertexId, t: f64, waits: &[MotionConstraint]) -> bool {
    waits.iter().all(|c| {
        let f = &c.forbidden;
        !(c.motion.from == goal && c.motion.duration.is_unbounded() && f.hi().is_unbounded())
            || t < f.lo()
            || (t == f.lo() && !f.lo_closed())
    })
}

fn search_intervals(
    inst: &Instance,
    agent: AgentId,
    table: &SafeIntervalTable,
    h: &[Extent],
) -> Result<Plan, PlanError> {
    let spec = inst.agent(agent);
    let everywhere = [TimeInterval::from(0.0)];
    let start_iv = table
        .vertex(spec.start)
        .iter()
        .position(|iv| iv.contains(0.0))
        .ok_or(PlanError::Infeasible(agent))?;
    let mut nodes = vec![IntervalNode {
        vertex: spec.start,
        interval: start_iv,
        arrival: 0.0,
        parent: None,
    }];
    let mut best: HashMap<(VertexId, usize), f64> = HashMap::new();
    best.insert((spec.start, start_iv), 0.0);
    let mut open = BinaryHeap::new();
    let hv = |v: VertexId| h[v.0].as_f64();
    if h[spec.start.0].is_unbounded() {
        return Err(PlanError::Infeasible(agent));
    }
    open.push(MinKey::new([hv(spec.start), 0.0], spec.start.0, 0));
    while let Some(MinKey { seq: id, .. }) = open.pop() {
        let node = nodes[id];
        if best.get(&(node.vertex, node.interval)).is_some_and(|&b| b < node.arrival) {
            continue;
        }
        let stay = table.vertex(node.vertex)[node.interval];
        if node.vertex == spec.goal
            && stay.hi().is_unbounded()
            && terminal_possible(spec.goal, node.arrival, &table.waits)
        {
            return Ok(rebuild_intervals(inst, agent, &nodes, id));
        }
        for &(w, len) in inst.neighbours(node.vertex) {
            if h[w.0].is_unbounded() {
                continue;
            }
            let windows = table.edge(node.vertex, w).unwrap_or(&everywhere);
            for (j, target) in table.vertex(w).iter().enumerate() {
                if target.hi().as_f64() < node.arrival + len {
                    continue;
                }
                let d = windows
                    .iter()
                    .filter_map(|win| earliest_departure(node.arrival, &stay, win, target, len))
                    .min_by(f64::total_cmp);
                let Some(d) = d else { continue };
                let arrival = d + len;
                if best.get(&(w, j)).is_some_and(|&b| b <= arrival) {
                    continue;
                }
                best.insert((w, j), arrival);
                let seq = nodes.len();
                nodes.push(IntervalNode {
                    vertex: w,
                    interval: j,
                    arrival,
                    parent: Some((id, d)),
                });
                open.push(MinKey::new([arrival + hv(w), arrival], w.0, seq));
            }
        }
    }
    Err(PlanError::Infeasible(agent))
}

fn rebuild_intervals(inst: &Instance, agent: AgentId, nodes: &[IntervalNode], last: usize) -> Plan {
    let mut steps = Vec::new();
    let mut cur = last;
    while let Some((parent, departure)) = nodes[cur].parent {
        steps.push((parent, departure, cur));
        cur = parent;
    }
    steps.reverse();
    let mut motions = Vec::new();
    for (p, d, c) in steps {
        let (from, to) = (nodes[p].vertex, nodes[c].vertex);
        let t = nodes[p].arrival;
        if d > t {
            motions.push(Motion::wait(from, Extent::Finite(d - t)).at(t));
        }
        let len = inst.edge_length(from, to).expect("searched along an edge");
        motions.push(Motion::travel(from, to, len).at(d));
    }
    let end = nodes[last].arrival;
    motions.push(Motion::wait(nodes[last].vertex, Extent::Unbounded).at(end));
    Plan { agent, motions }
}

/// Forbidden wait signatures sorted by vertex and duration.
struct WaitIndex {
    entries: Vec<(VertexId, f64, TimeInterval)>,
}

impl WaitIndex {
    fn new(waits: &[MotionConstraint]) -> Self {
        let mut entries: Vec<_> = waits
            .iter()
            .map(|c| (c.motion.from, c.motion.duration.as_f64(), c.forbidden))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        Self { entries }
    }

    /// The forbidden window hit by `m`, if any.
    fn violated(&self, m: &TimedMotion) -> Option<TimeInterval> {
        let v = m.motion.from;
        let d = m.motion.duration.as_f64();
        let lo = self.entries.partition_point(|e| (e.0, e.1) < (v, d - EPS));
        self.entries[lo..]
            .iter()
            .take_while(|e| e.0 == v && (e.1 <= d + EPS || d.is_infinite() && e.1.is_infinite()))
            .find(|e| Extent::from_f64(e.1).approx_eq(m.motion.duration) && e.2.contains(m.start))
            .map(|e| e.2)
    }
}

/// Fraction at which to cut on the `k`-th attempt: the midpoint first, then
/// a low-discrepancy sequence kept away from the ends.
fn cut_fraction(k: usize) -> f64 {
    if k == 0 {
        return 0.5;
    }
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    0.1 + 0.8 * (0.5 + k as f64 * golden).fract()
}

/// Rewrites waits that match a forbidden wait signature. A terminal wait
/// is preceded by a finite wait that carries it past the forbidden window.
/// A finite wait is cut in two at its midpoint, or at the first later
/// candidate from [`cut_fraction`] for which both pieces are allowed; when
/// no candidate works the midpoint halves are repaired in turn. Adjacent
/// pieces are merged back whenever the merged wait is allowed. Presence at
/// every vertex and all move departures are unchanged, so other constraints
/// stay satisfied and the cost is equal.
pub fn repair_waits(
    agent: AgentId,
    motions: Vec<TimedMotion>,
    waits: &[MotionConstraint],
) -> Result<Vec<TimedMotion>, PlanError> {
    let index = WaitIndex::new(waits);
    let attempts = 4 * waits.len() + 16;
    let mut queue: VecDeque<TimedMotion> = motions.into();
    let mut out: Vec<TimedMotion> = Vec::new();
    let mut steps = 0usize;
    while let Some(m) = queue.pop_front() {
        steps += 1;
        if steps > 100_000 {
            return Err(PlanError::Unrepairable(agent));
        }
        if !m.is_wait() {
            out.push(m);
            continue;
        }
        if let Some(forbidden) = index.violated(&m) {
            let v = m.motion.from;
            match m.motion.duration {
                Extent::Unbounded => {
                    let resume = match forbidden.hi() {
                        Extent::Finite(hi) if forbidden.hi_closed() => hi.next_up(),
                        Extent::Finite(hi) => hi,
                        Extent::Unbounded => return Err(PlanError::Infeasible(agent)),
                    };
                    if resume - m.start < EPS {
                        return Err(PlanError::Unrepairable(agent));
                    }
                    queue.push_front(Motion::wait(v, Extent::Unbounded).at(resume));
                    queue.push_front(Motion::wait(v, Extent::Finite(resume - m.start)).at(m.start));
                }
                Extent::Finite(d) => {
                    if d < 2.0 * EPS {
                        return Err(PlanError::Unrepairable(agent));
                    }
                    let pieces = |x: f64| {
                        (
                            Motion::wait(v, Extent::Finite(x)).at(m.start),
                            Motion::wait(v, Extent::Finite(d - x)).at(m.start + x),
                        )
                    };
                    // Past the midpoint, start deep in the sequence: earlier
                    // candidates are likely forbidden already.
                    let skip = index.entries.len();
                    let (first, second) = std::iter::once(0)
                        .chain(skip + 1..skip + attempts)
                        .map(|k| pieces(d * cut_fraction(k)))
                        .find(|(a, b)| index.violated(a).is_none() && index.violated(b).is_none())
                        .unwrap_or_else(|| pieces(0.5 * d));
                    queue.push_front(second);
                    queue.push_front(first);
                }
            }
            continue;
        }
        if let Some(prev) = out.last().copied().filter(|p| p.is_wait() && p.motion.from == m.motion.from) {
            let duration = match m.motion.duration {
                Extent::Unbounded => Extent::Unbounded,
                Extent::Finite(d) => Extent::Finite(m.start + d - prev.start),
            };
            let merged = Motion::wait(prev.motion.from, duration).at(prev.start);
            if index.violated(&merged).is_none() {
                *out.last_mut().expect("checked above") = merged;
                continue;
            }
        }
        out.push(m);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
struct LatticeNode {
    vertex: VertexId,
    time: f64,
    /// End of the last move, the cost if the agent stops here.
    last_move_end: f64,
    settled: bool,
    parent: Option<usize>,
}

fn forbidden_at(constraints: &[&MotionConstraint], m: &Motion, t: f64) -> bool {
    constraints
        .iter()
        .any(|c| c.motion.same_signature(m) && c.forbidden.contains(t))
}

/// Time after which no finite constraint window matters any more, plus
/// enough slack for one wait and any simple path.
fn lattice_horizon(inst: &Instance, constraints: &[&MotionConstraint], unit: f64) -> f64 {
    let last = constraints
        .iter()
        .flat_map(|c| [Extent::Finite(c.forbidden.lo()), c.forbidden.hi()])
        .filter_map(Extent::finite)
        .fold(0.0, f64::max);
    let paths: f64 = inst.edges().iter().map(|e| e.length).sum();
    last + unit + paths + EPS
}

fn search_lattice(
    inst: &Instance,
    agent: AgentId,
    constraints: &[Constraint],
    unit: f64,
    h: &[Extent],
) -> Result<Plan, PlanError> {
    let spec = inst.agent(agent);
    let mine: Vec<&MotionConstraint> = constraints
        .iter()
        .filter_map(|k| match k {
            Constraint::Motion(c) if c.agent == agent => Some(c),
            _ => None,
        })
        .collect();
    if h[spec.start.0].is_unbounded() {
        return Err(PlanError::Infeasible(agent));
    }
    let horizon = lattice_horizon(inst, &mine, unit);
    let quantize = |t: f64| (t * 1e9).round() as i64;
    let priority = |n: &LatticeNode| {
        if n.settled || n.vertex == spec.goal {
            n.last_move_end
        } else {
            n.time + h[n.vertex.0].as_f64()
        }
    };
    let mut nodes = vec![LatticeNode {
        vertex: spec.start,
        time: 0.0,
        last_move_end: 0.0,
        settled: false,
        parent: None,
    }];
    let mut seen: HashMap<(VertexId, i64, bool), f64> = HashMap::new();
    let mut open = BinaryHeap::new();
    open.push(MinKey::new([priority(&nodes[0]), 0.0], spec.start.0, 0));
    let wait_unit = Extent::Finite(unit);
    while let Some(MinKey { seq: id, .. }) = open.pop() {
        let n = nodes[id];
        if n.settled {
            return Ok(rebuild_lattice(inst, agent, &nodes, id, unit));
        }
        let mut children = Vec::with_capacity(4);
        if n.vertex == spec.goal
            && !forbidden_at(&mine, &Motion::wait(n.vertex, Extent::Unbounded), n.time)
        {
            children.push(LatticeNode { settled: true, parent: Some(id), ..n });
        }
        if !forbidden_at(&mine, &Motion::wait(n.vertex, wait_unit), n.time) {
            children.push(LatticeNode {
                time: n.time + unit,
                parent: Some(id),
                ..n
            });
        }
        for &(w, len) in inst.neighbours(n.vertex) {
            if h[w.0].is_unbounded() || forbidden_at(&mine, &Motion::travel(n.vertex, w, len), n.time) {
                continue;
            }
            let t = n.time + len;
            children.push(LatticeNode {
                vertex: w,
                time: t,
                last_move_end: t,
                settled: false,
                parent: Some(id),
            });
        }
        for child in children {
            if child.time > horizon {
                continue;
            }
            let key = (child.vertex, quantize(child.time), child.settled);
            let relevant = child.settled || child.vertex == spec.goal;
            match seen.get(&key) {
                Some(&b) if !relevant || b <= child.last_move_end => continue,
                _ => {}
            }
            seen.insert(key, child.last_move_end);
            let seq = nodes.len();
            let f = priority(&child);
            nodes.push(child);
            // Settled nodes win ties so trailing waits are not emitted.
            let g = if child.settled { f64::INFINITY } else { child.time };
            open.push(MinKey::new([f, g], child.vertex.0, seq));
        }
    }
    Err(PlanError::Infeasible(agent))
}

fn rebuild_lattice(inst: &Instance, agent: AgentId, nodes: &[LatticeNode], last: usize, unit: f64) -> Plan {
    let mut chain = vec![last];
    while let Some(p) = nodes[*chain.last().expect("non-empty")].parent {
        chain.push(p);
    }
    chain.reverse();
    let mut motions = Vec::new();
    for pair in chain.windows(2) {
        let (a, b) = (nodes[pair[0]], nodes[pair[1]]);
        if b.settled {
            motions.push(Motion::wait(a.vertex, Extent::Unbounded).at(a.time));
        } else if a.vertex == b.vertex {
            motions.push(Motion::wait(a.vertex, Extent::Finite(unit)).at(a.time));
        } else {
            let len = inst.edge_length(a.vertex, b.vertex).expect("searched along an edge");
            motions.push(Motion::travel(a.vertex, b.vertex, len).at(a.time));
        }
    }
    Plan { agent, motions }
}
