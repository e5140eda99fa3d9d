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

//! Instances, plans and joint solutions, plus the checks that run on them.

use crate::geometry::{
    self, Coordinate, Extent, GeometryError, KinematicSegment, TimeInterval, EPS,
};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub name: String,
    pub at: Coordinate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Agent {
    pub name: String,
    pub start: VertexId,
    pub goal: VertexId,
}

/// Embedded undirected graph, agents and the shared agent radius.
#[derive(Clone, Debug)]
pub struct Instance {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    agents: Vec<Agent>,
    radius: f64,
    adjacency: Vec<Vec<(VertexId, f64)>>,
    edge_lookup: HashMap<(VertexId, VertexId), usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
            && self.edges == other.edges
            && self.agents == other.agents
            && self.radius == other.radius
    }
}

impl Instance {
    /// Assembles an instance. Out-of-range ids are tolerated here and
    /// reported by [`validate_instance`].
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, agents: Vec<Agent>, radius: f64) -> Self {
        let mut adjacency = vec![Vec::new(); vertices.len()];
        let mut edge_lookup = HashMap::new();
        for (k, e) in edges.iter().enumerate() {
            if e.u.0 < vertices.len() && e.v.0 < vertices.len() && e.u != e.v {
                adjacency[e.u.0].push((e.v, e.length));
                adjacency[e.v.0].push((e.u, e.length));
                edge_lookup.insert((e.u, e.v), k);
                edge_lookup.insert((e.v, e.u), k);
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|(v, _)| *v);
        }
        Self {
            vertices,
            edges,
            agents,
            radius,
            adjacency,
            edge_lookup,
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, id: AgentId) -> &Agent {
        &self.agents[id.0]
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coordinate(&self, v: VertexId) -> Coordinate {
        self.vertices[v.0].at
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.0].name
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.name == name).map(VertexId)
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a.name == name).map(AgentId)
    }

    /// Neighbours with edge lengths, sorted by vertex id.
    pub fn neighbours(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adjacency[v.0]
    }

    pub fn edge_length(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.edge_lookup.get(&(u, v)).map(|&k| self.edges[k].length)
    }

    pub fn agent_ids(&self) -> impl Iterator<Item = AgentId> {
        (0..self.agents.len()).map(AgentId)
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices.len()).map(VertexId)
    }
}

/// A motion without a start time: a move along an edge in a direction, or
/// a wait of a given (possibly unbounded) duration at a vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Motion {
    pub from: VertexId,
    pub to: VertexId,
    pub duration: Extent,
}

impl Motion {
    pub fn wait(at: VertexId, duration: Extent) -> Self {
        Self {
            from: at,
            to: at,
            duration,
        }
    }

    pub fn travel(from: VertexId, to: VertexId, length: f64) -> Self {
        Self {
            from,
            to,
            duration: Extent::Finite(length),
        }
    }

    pub fn is_wait(&self) -> bool {
        self.from == self.to
    }

    /// Same motion signature: identical endpoints and duration within `EPS`.
    pub fn same_signature(&self, other: &Motion) -> bool {
        self.from == other.from && self.to == other.to && self.duration.approx_eq(other.duration)
    }

    pub fn at(self, start: f64) -> TimedMotion {
        TimedMotion {
            motion: self,
            start,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimedMotion {
    pub motion: Motion,
    pub start: f64,
}

impl TimedMotion {
    pub fn end(&self) -> Extent {
        self.motion.duration.after(self.start)
    }

    pub fn is_wait(&self) -> bool {
        self.motion.is_wait()
    }

    pub fn segment(&self, inst: &Instance) -> Result<KinematicSegment, GeometryError> {
        let a = inst.coordinate(self.motion.from);
        if self.is_wait() {
            KinematicSegment::waiting(a, self.start, self.motion.duration)
        } else {
            KinematicSegment::moving_for(
                a,
                inst.coordinate(self.motion.to),
                self.start,
                self.motion.duration,
            )
        }
    }

    pub fn describe(&self, inst: &Instance) -> String {
        if self.is_wait() {
            format!(
                "wait {} for {} @{}",
                inst.vertex_name(self.motion.from),
                self.motion.duration,
                self.start
            )
        } else {
            format!(
                "move {}->{} @{}",
                inst.vertex_name(self.motion.from),
                inst.vertex_name(self.motion.to),
                self.start
            )
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StructuralError {
    #[error("agent {agent}: plan is empty")]
    Empty { agent: AgentId },
    #[error("agent {agent}: first motion must start at the start vertex at time 0")]
    BadStart { agent: AgentId },
    #[error("agent {agent}: motion {index} does not continue from the previous target vertex")]
    Discontinuous { agent: AgentId, index: usize },
    #[error("agent {agent}: motion {index} starts at {start} but the previous motion ends at {expected}")]
    TimeGap {
        agent: AgentId,
        index: usize,
        start: f64,
        expected: f64,
    },
    #[error("agent {agent}: motion {index} is not along an edge of the graph")]
    NoSuchEdge { agent: AgentId, index: usize },
    #[error("agent {agent}: motion {index} has duration {found}, edge length is {expected}")]
    WrongDuration {
        agent: AgentId,
        index: usize,
        found: Extent,
        expected: f64,
    },
    #[error("agent {agent}: motion {index} has a non-positive or unbounded duration")]
    BadWait { agent: AgentId, index: usize },
    #[error("agent {agent}: plan must end with an unbounded wait at the goal")]
    BadTerminal { agent: AgentId },
    #[error("solution has {found} plans for {expected} agents")]
    PlanCount { found: usize, expected: usize },
    #[error("plan {index} belongs to agent {agent}")]
    PlanOrder { index: usize, agent: AgentId },
}

/// Per-agent sequence of timed motions. A well-formed plan starts at the
/// agent's start vertex at time 0 and ends with an unbounded wait at its
/// goal.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub agent: AgentId,
    pub motions: Vec<TimedMotion>,
}

impl Plan {
    /// Builds a plan, materialising an initial wait when the first motion
    /// starts after time 0 and appending the terminal wait when missing.
    pub fn normalized(inst: &Instance, agent: AgentId, motions: Vec<TimedMotion>) -> Self {
        let start_vertex = inst.agent(agent).start;
        let mut out = Vec::with_capacity(motions.len() + 2);
        match motions.first() {
            Some(first) if first.start > EPS => {
                out.push(Motion::wait(start_vertex, Extent::Finite(first.start)).at(0.0));
            }
            None => {
                out.push(Motion::wait(start_vertex, Extent::Unbounded).at(0.0));
            }
            _ => {}
        }
        out.extend(motions);
        let last = *out.last().expect("non-empty");
        if !last.end().is_unbounded() {
            let end = last.end().as_f64();
            out.push(Motion::wait(last.motion.to, Extent::Unbounded).at(end));
        }
        Plan { agent, motions: out }
    }

    /// A plan that never leaves the start vertex.
    pub fn stay(inst: &Instance, agent: AgentId) -> Self {
        Self::normalized(inst, agent, Vec::new())
    }

    /// Time the agent reaches its goal for the last time: the end of the
    /// final move. Trailing waits at the goal do not count.
    pub fn completion_time(&self) -> f64 {
        self.motions
            .iter()
            .rev()
            .find(|m| !m.is_wait())
            .map(|m| m.end().as_f64())
            .unwrap_or(0.0)
    }

    pub fn check(&self, inst: &Instance) -> Result<(), StructuralError> {
        let agent = self.agent;
        let spec = inst.agent(agent);
        let first = self.motions.first().ok_or(StructuralError::Empty { agent })?;
        if first.motion.from != spec.start || first.start.abs() > EPS {
            return Err(StructuralError::BadStart { agent });
        }
        let last_index = self.motions.len() - 1;
        for (index, m) in self.motions.iter().enumerate() {
            if index > 0 {
                let prev = &self.motions[index - 1];
                if prev.motion.to != m.motion.from {
                    return Err(StructuralError::Discontinuous { agent, index });
                }
                let expected = prev.end().as_f64();
                if (m.start - expected).abs() > EPS {
                    return Err(StructuralError::TimeGap {
                        agent,
                        index,
                        start: m.start,
                        expected,
                    });
                }
            }
            if m.is_wait() {
                match m.motion.duration {
                    Extent::Finite(d) if d > 0.0 => {}
                    Extent::Unbounded if index == last_index => {}
                    _ => return Err(StructuralError::BadWait { agent, index }),
                }
            } else {
                let expected = inst
                    .edge_length(m.motion.from, m.motion.to)
                    .ok_or(StructuralError::NoSuchEdge { agent, index })?;
                if !m.motion.duration.approx_eq(Extent::Finite(expected)) {
                    return Err(StructuralError::WrongDuration {
                        agent,
                        index,
                        found: m.motion.duration,
                        expected,
                    });
                }
            }
        }
        let last = self.motions[last_index];
        if !(last.is_wait() && last.motion.duration.is_unbounded() && last.motion.to == spec.goal) {
            return Err(StructuralError::BadTerminal { agent });
        }
        Ok(())
    }

    /// Index of the motion active at time `t` (the later one at a boundary).
    pub fn motion_index_at(&self, t: f64) -> usize {
        self.motions
            .partition_point(|m| m.start <= t)
            .saturating_sub(1)
    }
}

/// One plan per agent, indexed by agent id.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub plans: Vec<Plan>,
}

impl Solution {
    pub fn new(plans: Vec<Plan>) -> Self {
        Self { plans }
    }

    /// Sum of individual completion times.
    pub fn sic(&self) -> f64 {
        self.plans.iter().map(Plan::completion_time).sum()
    }

    pub fn check(&self, inst: &Instance) -> Result<(), StructuralError> {
        if self.plans.len() != inst.agents().len() {
            return Err(StructuralError::PlanCount {
                found: self.plans.len(),
                expected: inst.agents().len(),
            });
        }
        for (index, plan) in self.plans.iter().enumerate() {
            if plan.agent != AgentId(index) {
                return Err(StructuralError::PlanOrder {
                    index,
                    agent: plan.agent,
                });
            }
            plan.check(inst)?;
        }
        Ok(())
    }
}

/// Two timed motions of different agents that bring the agents closer than
/// `2r`, with their open collision interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Conflict {
    pub agents: (AgentId, AgentId),
    pub motions: (TimedMotion, TimedMotion),
    pub interval: TimeInterval,
}

impl Conflict {
    pub fn describe(&self, inst: &Instance) -> String {
        format!(
            "{} [{}] vs {} [{}] in {}",
            inst.agent(self.agents.0).name,
            self.motions.0.describe(inst),
            inst.agent(self.agents.1).name,
            self.motions.1.describe(inst),
            self.interval
        )
    }
}

/// All conflicts between the plans of `a` and `b`, in time order.
pub fn plan_conflicts(inst: &Instance, a: &Plan, b: &Plan) -> Vec<Conflict> {
    let r = inst.radius();
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.motions.len() && j < b.motions.len() {
        let (ma, mb) = (a.motions[i], b.motions[j]);
        if let (Ok(sa), Ok(sb)) = (ma.segment(inst), mb.segment(inst)) {
            if let Some(interval) = geometry::collision_interval(&sa, &sb, r) {
                out.push(Conflict {
                    agents: (a.agent, b.agent),
                    motions: (ma, mb),
                    interval,
                });
            }
        }
        if ma.end().as_f64() <= mb.end().as_f64() {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Every pairwise conflict of a structurally valid solution.
pub fn validate_solution(inst: &Instance, sol: &Solution) -> Result<Vec<Conflict>, StructuralError> {
    sol.check(inst)?;
    Ok(all_conflicts(inst, sol))
}

/// Conflicts without the structural check, for solutions built internally.
pub fn all_conflicts(inst: &Instance, sol: &Solution) -> Vec<Conflict> {
    let mut out = Vec::new();
    for (i, a) in sol.plans.iter().enumerate() {
        for b in &sol.plans[i + 1..] {
            out.extend(plan_conflicts(inst, a, b));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceViolation {
    NonPositiveRadius(f64),
    DuplicateVertexName(String),
    NonFiniteCoordinate(String),
    UnknownVertex { context: String, index: usize },
    SelfLoop(String),
    NonPositiveLength { u: String, v: String },
    LengthMismatch { u: String, v: String, length: f64, distance: f64 },
    DuplicateEdge { u: String, v: String },
    DuplicateAgentName(String),
    DuplicateStart(String),
    DuplicateGoal(String),
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InstanceViolation::*;
        match self {
            NonPositiveRadius(r) => write!(f, "radius must be positive, got {r}"),
            DuplicateVertexName(n) => write!(f, "duplicate vertex {n}"),
            NonFiniteCoordinate(n) => write!(f, "vertex {n} has a non-finite coordinate"),
            UnknownVertex { context, index } => write!(f, "{context} refers to unknown vertex #{index}"),
            SelfLoop(n) => write!(f, "self-loop edge at {n}"),
            NonPositiveLength { u, v } => write!(f, "edge {u}-{v}: non-positive length"),
            LengthMismatch { u, v, length, distance } => write!(
                f,
                "edge {u}-{v}: length mismatch ({length} vs coordinate distance {distance})"
            ),
            DuplicateEdge { u, v } => write!(f, "duplicate edge {u}-{v}"),
            DuplicateAgentName(n) => write!(f, "duplicate agent {n}"),
            DuplicateStart(n) => write!(f, "duplicate start at {n}"),
            DuplicateGoal(n) => write!(f, "duplicate goal at {n}"),
        }
    }
}

/// Checks every instance invariant and reports all violations.
pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    use InstanceViolation::*;
    let mut out = Vec::new();
    if !(inst.radius > 0.0) {
        out.push(NonPositiveRadius(inst.radius));
    }
    let n = inst.vertices.len();
    let mut names = HashMap::new();
    for v in &inst.vertices {
        if names.insert(v.name.as_str(), ()).is_some() {
            out.push(DuplicateVertexName(v.name.clone()));
        }
        if !v.at.is_finite() {
            out.push(NonFiniteCoordinate(v.name.clone()));
        }
    }
    let name = |v: VertexId| inst.vertices[v.0].name.clone();
    let mut seen = HashMap::new();
    for (k, e) in inst.edges.iter().enumerate() {
        let mut bad = false;
        for end in [e.u, e.v] {
            if end.0 >= n {
                out.push(UnknownVertex {
                    context: format!("edge #{k}"),
                    index: end.0,
                });
                bad = true;
            }
        }
        if bad {
            continue;
        }
        if e.u == e.v {
            out.push(SelfLoop(name(e.u)));
            continue;
        }
        if !(e.length > 0.0) {
            out.push(NonPositiveLength { u: name(e.u), v: name(e.v) });
        }
        let distance = inst.coordinate(e.u).distance(&inst.coordinate(e.v));
        if (distance - e.length).abs() > EPS {
            out.push(LengthMismatch {
                u: name(e.u),
                v: name(e.v),
                length: e.length,
                distance,
            });
        }
        let key = (e.u.min(e.v), e.u.max(e.v));
        if seen.insert(key, ()).is_some() {
            out.push(DuplicateEdge { u: name(e.u), v: name(e.v) });
        }
    }
    let mut agent_names = HashMap::new();
    let mut starts = HashMap::new();
    let mut goals = HashMap::new();
    for a in &inst.agents {
        if agent_names.insert(a.name.as_str(), ()).is_some() {
            out.push(DuplicateAgentName(a.name.clone()));
        }
        let mut ok = true;
        for (what, v) in [("start", a.start), ("goal", a.goal)] {
            if v.0 >= n {
                out.push(UnknownVertex {
                    context: format!("agent {} {what}", a.name),
                    index: v.0,
                });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        if starts.insert(a.start, ()).is_some() {
            out.push(DuplicateStart(name(a.start)));
        }
        if goals.insert(a.goal, ()).is_some() {
            out.push(DuplicateGoal(name(a.goal)));
        }
    }
    out
}

/// Whether an agent parked at `v` blocks some traversal of edge `(u, w)`.
pub fn edge_overlapping(inst: &Instance, v: VertexId, e: &Edge) -> bool {
    match KinematicSegment::moving(inst.coordinate(e.u), inst.coordinate(e.v), 0.0) {
        Ok(seg) => geometry::wait_move_collision_interval(inst.coordinate(v), &seg, inst.radius()).is_some(),
        Err(_) => false,
    }
}

/// Whether agents parked at `a` and `b` would touch.
pub fn vertex_overlapping(inst: &Instance, a: VertexId, b: VertexId) -> bool {
    inst.coordinate(a).distance(&inst.coordinate(b)) < 2.0 * inst.radius()
}

#[derive(Clone, Debug, PartialEq)]
pub enum OverlapWitness {
    Edge { vertex: VertexId, edge: (VertexId, VertexId) },
    Vertex(VertexId, VertexId),
}

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceClass {
    /// No vertex blocks a non-incident edge and no two vertices overlap.
    NonOverlapping,
    General(Vec<OverlapWitness>),
}

pub fn classify(inst: &Instance) -> InstanceClass {
    let mut witnesses = Vec::new();
    let ids: Vec<VertexId> = inst.vertex_ids().collect();
    for (k, &a) in ids.iter().enumerate() {
        for &b in &ids[k + 1..] {
            if vertex_overlapping(inst, a, b) {
                witnesses.push(OverlapWitness::Vertex(a, b));
            }
        }
    }
    for &v in &ids {
        for e in inst.edges() {
            if e.u == v || e.v == v {
                continue;
            }
            if edge_overlapping(inst, v, e) {
                witnesses.push(OverlapWitness::Edge {
                    vertex: v,
                    edge: (e.u.min(e.v), e.u.max(e.v)),
                });
            }
        }
    }
    if witnesses.is_empty() {
        InstanceClass::NonOverlapping
    } else {
        InstanceClass::General(witnesses)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn line_instance(points: &[(f64, f64)], agents: &[(usize, usize)], radius: f64) -> Instance {
        let vertices = points
            .iter()
            .enumerate()
            .map(|(k, &(x, y))| Vertex {
                name: format!("V{k}"),
                at: Coordinate::new(x, y),
            })
            .collect::<Vec<_>>();
        let edges = (1..points.len())
            .map(|k| Edge {
                u: VertexId(k - 1),
                v: VertexId(k),
                length: vertices[k - 1].at.distance(&vertices[k].at),
            })
            .collect();
        let agents = agents
            .iter()
            .enumerate()
            .map(|(k, &(s, g))| Agent {
                name: format!("a{k}"),
                start: VertexId(s),
                goal: VertexId(g),
            })
            .collect();
        Instance::new(vertices, edges, agents, radius)
    }

    fn grid(n: usize, radius: f64) -> Instance {
        let mut vertices = Vec::new();
        let mut edges = Vec::new();
        for y in 0..n {
            for x in 0..n {
                vertices.push(Vertex {
                    name: format!("g{x}_{y}"),
                    at: Coordinate::new(x as f64, y as f64),
                });
                let id = y * n + x;
                if x > 0 {
                    edges.push(Edge { u: VertexId(id - 1), v: VertexId(id), length: 1.0 });
                }
                if y > 0 {
                    edges.push(Edge { u: VertexId(id - n), v: VertexId(id), length: 1.0 });
                }
            }
        }
        Instance::new(vertices, edges, Vec::new(), radius)
    }

    #[test]
    fn well_formed_instance_validates() {
        let inst = line_instance(&[(0., 0.), (3., 0.), (6., 0.)], &[(0, 2), (2, 0)], 0.5);
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn duplicate_goal_and_length_mismatch_are_reported_together() {
        let mut inst = line_instance(&[(0., 0.), (3., 0.), (6., 0.)], &[(0, 2), (1, 2)], 0.5);
        inst.edges[0].length = 5.0;
        let inst = Instance::new(inst.vertices.clone(), inst.edges.clone(), inst.agents.clone(), 0.5);
        let v = validate_instance(&inst);
        assert!(v.iter().any(|x| matches!(x, InstanceViolation::DuplicateGoal(_))));
        assert!(v.iter().any(|x| x.to_string().contains("length mismatch")));
        assert!(v.iter().any(|x| x.to_string().contains("duplicate goal")));
    }

    #[test]
    fn sic_sums_completion_times() {
        let inst = line_instance(&[(0., 0.), (8.8, 0.), (20., 0.), (26.3, 0.)], &[(0, 1), (2, 3)], 0.5);
        let p0 = Plan::normalized(&inst, AgentId(0), vec![Motion::travel(VertexId(0), VertexId(1), 8.8).at(0.0)]);
        let p1 = Plan::normalized(&inst, AgentId(1), vec![Motion::travel(VertexId(2), VertexId(3), 6.3).at(0.0)]);
        let sol = Solution::new(vec![p0, p1]);
        assert!((sol.sic() - 15.1).abs() < 1e-12);
        assert!(validate_solution(&inst, &sol).unwrap().is_empty());
    }

    #[test]
    fn swap_on_one_edge_conflicts() {
        let inst = line_instance(&[(0., 0.), (3., 0.)], &[(0, 1), (1, 0)], 0.5);
        let p0 = Plan::normalized(&inst, AgentId(0), vec![Motion::travel(VertexId(0), VertexId(1), 3.).at(0.0)]);
        let p1 = Plan::normalized(&inst, AgentId(1), vec![Motion::travel(VertexId(1), VertexId(0), 3.).at(0.0)]);
        let conflicts = validate_solution(&inst, &Solution::new(vec![p0, p1])).unwrap();
        assert!(!conflicts.is_empty());
        let first = conflicts[0];
        assert!(!first.motions.0.is_wait() && !first.motions.1.is_wait());
        // Head-on at closing speed 2: centres within 1 for t in (1, 2).
        assert!((first.interval.lo() - 1.0).abs() < 1e-9);
        assert!((first.interval.hi().as_f64() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn single_agent_is_conflict_free() {
        let inst = line_instance(&[(0., 0.), (3., 0.)], &[(0, 1)], 0.5);
        let p0 = Plan::normalized(&inst, AgentId(0), vec![Motion::travel(VertexId(0), VertexId(1), 3.).at(0.0)]);
        assert!(validate_solution(&inst, &Solution::new(vec![p0])).unwrap().is_empty());
    }

    #[test]
    fn structural_errors() {
        let inst = line_instance(&[(0., 0.), (3., 0.)], &[(0, 1)], 0.5);
        let gap = Plan {
            agent: AgentId(0),
            motions: vec![
                Motion::wait(VertexId(0), Extent::Finite(1.0)).at(0.0),
                Motion::travel(VertexId(0), VertexId(1), 3.).at(1.5),
                Motion::wait(VertexId(1), Extent::Unbounded).at(4.5),
            ],
        };
        assert!(matches!(gap.check(&inst), Err(StructuralError::TimeGap { index: 1, .. })));
        let no_terminal = Plan {
            agent: AgentId(0),
            motions: vec![Motion::travel(VertexId(0), VertexId(1), 3.).at(0.0)],
        };
        assert!(matches!(no_terminal.check(&inst), Err(StructuralError::BadTerminal { .. })));
    }

    #[test]
    fn implicit_start_wait_is_materialised() {
        let inst = line_instance(&[(0., 0.), (3., 0.)], &[(0, 1)], 0.5);
        let p = Plan::normalized(&inst, AgentId(0), vec![Motion::travel(VertexId(0), VertexId(1), 3.).at(2.0)]);
        assert_eq!(p.motions.len(), 3);
        assert!(p.motions[0].is_wait());
        assert_eq!(p.completion_time(), 5.0);
        p.check(&inst).unwrap();
    }

    #[test]
    fn overlap_predicates() {
        let mut inst = line_instance(&[(0., 0.), (4., 0.), (2., 0.5), (2., 3.), (2., 1.)], &[], 0.5);
        let e = inst.edges[0];
        assert!(edge_overlapping(&inst, VertexId(2), &e));
        assert!(!edge_overlapping(&inst, VertexId(3), &e));
        assert!(!edge_overlapping(&inst, VertexId(4), &e));
        inst = line_instance(&[(0., 0.), (0.8, 0.), (1.8, 0.), (8.8, 0.)], &[], 0.5);
        assert!(vertex_overlapping(&inst, VertexId(0), VertexId(1)));
        assert!(!vertex_overlapping(&inst, VertexId(1), VertexId(2)));
        assert!(!vertex_overlapping(&inst, VertexId(2), VertexId(3)));
    }

    #[test]
    fn grid_classification() {
        assert_eq!(classify(&grid(3, 0.3)), InstanceClass::NonOverlapping);
        match classify(&grid(3, 0.6)) {
            InstanceClass::General(w) => {
                assert!(w.iter().any(|x| matches!(x, OverlapWitness::Vertex(..))));
            }
            other => panic!("expected general, got {other:?}"),
        }
        let single = line_instance(&[(0., 0.)], &[], 0.5);
        assert_eq!(classify(&single), InstanceClass::NonOverlapping);
    }
}
