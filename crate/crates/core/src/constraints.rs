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

//! Motion, vertex-range and shifting constraints, conflict splitting, and
//! the samplers that probe the soundness of a shifting split.

use crate::geometry::{self, Extent, GeometryError, TimeInterval, EPS};
use crate::model::{AgentId, Conflict, Instance, Motion, Plan, TimedMotion, VertexId};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error("split not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("invalid shift parameters: {0}")]
    Parameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Forbids `agent` from starting `motion` at any time in `forbidden`. Wait
/// signatures match on vertex and exact duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionConstraint {
    pub agent: AgentId,
    pub motion: Motion,
    pub forbidden: TimeInterval,
}

/// Forbids `agent` from being at `vertex` at any instant of `forbidden`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VertexRangeConstraint {
    pub agent: AgentId,
    pub vertex: VertexId,
    pub forbidden: TimeInterval,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constraint {
    Motion(MotionConstraint),
    VertexRange(VertexRangeConstraint),
}

impl Constraint {
    pub fn agent(&self) -> AgentId {
        match self {
            Constraint::Motion(c) => c.agent,
            Constraint::VertexRange(c) => c.agent,
        }
    }

    pub fn describe(&self, inst: &Instance) -> String {
        match self {
            Constraint::Motion(c) => {
                let m = c.motion;
                let what = if m.is_wait() {
                    format!("wait {} {}", inst.vertex_name(m.from), m.duration)
                } else {
                    format!("move {} {}", inst.vertex_name(m.from), inst.vertex_name(m.to))
                };
                format!("motion {} {} {}", inst.agent(c.agent).name, what, c.forbidden)
            }
            Constraint::VertexRange(c) => format!(
                "range {} {} {}",
                inst.agent(c.agent).name,
                inst.vertex_name(c.vertex),
                c.forbidden
            ),
        }
    }
}

impl From<MotionConstraint> for Constraint {
    fn from(c: MotionConstraint) -> Self {
        Constraint::Motion(c)
    }
}

impl From<VertexRangeConstraint> for Constraint {
    fn from(c: VertexRangeConstraint) -> Self {
        Constraint::VertexRange(c)
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Motion(c) => write!(
                f,
                "motion {} {}->{} {} {}",
                c.agent, c.motion.from, c.motion.to, c.motion.duration, c.forbidden
            ),
            Constraint::VertexRange(c) => write!(f, "range {} {} {}", c.agent, c.vertex, c.forbidden),
        }
    }
}

/// How the two motions of a conflict relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConflictShape {
    /// `waiter` is 0 or 1, the side of the conflict that waits.
    WaitMove { waiter: usize },
    MoveMove,
    WaitWait,
}

pub fn shape(c: &Conflict) -> ConflictShape {
    match (c.motions.0.is_wait(), c.motions.1.is_wait()) {
        (true, false) => ConflictShape::WaitMove { waiter: 0 },
        (false, true) => ConflictShape::WaitMove { waiter: 1 },
        (false, false) => ConflictShape::MoveMove,
        (true, true) => ConflictShape::WaitWait,
    }
}

fn side(c: &Conflict, k: usize) -> (AgentId, TimedMotion) {
    if k == 0 {
        (c.agents.0, c.motions.0)
    } else {
        (c.agents.1, c.motions.1)
    }
}

/// Departures of `own` from its own start time up to the end of its
/// unsafe interval against `other`. Collision depends only on the
/// difference of the two departure times, so pairing the two clipped
/// intervals is sound: whichever agent departs relatively later can be
/// shifted back to its original departure with the other still inside its
/// own interval.
fn motion_constraint(
    inst: &Instance,
    agent: AgentId,
    own: TimedMotion,
    other: TimedMotion,
) -> Result<MotionConstraint, ConstraintError> {
    let target = own.segment(inst)?;
    let fixed = other.segment(inst)?;
    let hi = geometry::unsafe_interval(&target, &fixed, inst.radius())
        .map(|u| u.hi())
        .unwrap_or(Extent::Finite(own.start));
    let forbidden = TimeInterval::half_open(own.start, hi)
        .or_else(|| TimeInterval::closed(own.start, own.start))
        .expect("single instant is non-empty");
    Ok(MotionConstraint {
        agent,
        motion: own.motion,
        forbidden,
    })
}

/// Motion constraints for both agents over their unsafe departure windows.
pub fn split_motion(
    inst: &Instance,
    c: &Conflict,
) -> Result<(MotionConstraint, MotionConstraint), ConstraintError> {
    let a = motion_constraint(inst, c.agents.0, c.motions.0, c.motions.1)?;
    let b = motion_constraint(inst, c.agents.1, c.motions.1, c.motions.0)?;
    Ok((a, b))
}

/// Where the waiter's forbidden presence starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RangeStart {
    /// The collision interval itself.
    #[default]
    Collision,
    /// From the start of the conflicting wait, closed on the left. Wider,
    /// and never used by the solver.
    WaitStart,
}

/// Vertex-range constraint for the waiter over the collision interval and a
/// motion constraint for the mover.
pub fn split_vertex_range(
    inst: &Instance,
    c: &Conflict,
) -> Result<(VertexRangeConstraint, MotionConstraint), ConstraintError> {
    split_vertex_range_with(inst, c, RangeStart::Collision)
}

pub fn split_vertex_range_with(
    inst: &Instance,
    c: &Conflict,
    start: RangeStart,
) -> Result<(VertexRangeConstraint, MotionConstraint), ConstraintError> {
    let waiter = match shape(c) {
        ConflictShape::WaitMove { waiter } => waiter,
        ConflictShape::MoveMove => return Err(ConstraintError::NotApplicable("both motions are moves")),
        ConflictShape::WaitWait => return Err(ConstraintError::NotApplicable("both motions are waits")),
    };
    let (wa, wm) = side(c, waiter);
    let (ma, mm) = side(c, 1 - waiter);
    let forbidden = match start {
        RangeStart::Collision => c.interval,
        RangeStart::WaitStart => TimeInterval::new(wm.start, true, c.interval.hi(), false)
            .expect("wait starts before the collision"),
    };
    let range = VertexRangeConstraint {
        agent: wa,
        vertex: wm.motion.from,
        forbidden,
    };
    Ok((range, motion_constraint(inst, ma, mm, wm)?))
}

/// Vertex-range constraints on both agents of a wait-wait conflict.
pub fn split_wait_wait(
    c: &Conflict,
) -> Result<(VertexRangeConstraint, VertexRangeConstraint), ConstraintError> {
    if shape(c) != ConflictShape::WaitWait {
        return Err(ConstraintError::NotApplicable("not a wait-wait conflict"));
    }
    let make = |k| {
        let (agent, m) = side(c, k);
        VertexRangeConstraint {
            agent,
            vertex: m.motion.from,
            forbidden: c.interval,
        }
    };
    Ok((make(0), make(1)))
}

/// How the shift `delta` is chosen from the collision interval length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaRule {
    Half,
    Zero,
    Fixed(f64),
}

impl DeltaRule {
    pub fn delta(&self, collision_length: f64) -> f64 {
        match *self {
            DeltaRule::Half => 0.5 * collision_length,
            DeltaRule::Zero => 0.0,
            DeltaRule::Fixed(d) => d,
        }
    }
}

impl fmt::Display for DeltaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeltaRule::Half => write!(f, "half"),
            DeltaRule::Zero => write!(f, "zero"),
            DeltaRule::Fixed(d) => write!(f, "fixed:{d}"),
        }
    }
}

/// Shift interval `[t_j, t_j + delta]` for the mover and overlap interval
/// `(t_s + delta, t_e)` for the waiter, where `(t_s, t_e)` is the interval
/// during which the mover (departing at `t_j`) is within `2r` of the
/// waiter's vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftParameters {
    pub waiter: usize,
    pub vertex: VertexId,
    pub mover: TimedMotion,
    pub delta: f64,
    pub collision: TimeInterval,
    pub shift: TimeInterval,
    pub overlap: TimeInterval,
}

impl ShiftParameters {
    pub fn new(inst: &Instance, c: &Conflict, delta: f64) -> Result<Self, ConstraintError> {
        let waiter = match shape(c) {
            ConflictShape::WaitMove { waiter } => waiter,
            _ => return Err(ConstraintError::NotApplicable("shifting needs a wait-move conflict")),
        };
        let (_, wm) = side(c, waiter);
        let (_, mm) = side(c, 1 - waiter);
        let vertex = wm.motion.from;
        let seg = mm.segment(inst)?;
        let collision = geometry::wait_move_collision_interval(inst.coordinate(vertex), &seg, inst.radius())
            .ok_or(ConstraintError::NotApplicable("mover does not pass the waiting vertex"))?;
        let length = collision.length().as_f64();
        if !(delta >= 0.0) || delta >= length {
            return Err(ConstraintError::Parameter(format!(
                "delta {delta} must lie in [0, {length})"
            )));
        }
        let shift = TimeInterval::closed(mm.start, mm.start + delta).expect("delta is non-negative");
        let overlap = TimeInterval::open(collision.lo() + delta, collision.hi())
            .ok_or_else(|| ConstraintError::Parameter("overlap interval is empty".into()))?;
        Ok(Self {
            waiter,
            vertex,
            mover: mm,
            delta,
            collision,
            shift,
            overlap,
        })
    }

    /// `|I^c| - |I^o| - |shift|`, zero up to rounding.
    pub fn width_defect(&self) -> f64 {
        self.collision.length().as_f64() - self.overlap.length().as_f64() - self.shift.length().as_f64()
    }
}

/// Vertex-range constraint on the waiter over the overlap interval and a
/// motion constraint on the mover over the shift interval.
pub fn split_shifting(
    c: &Conflict,
    p: &ShiftParameters,
) -> Result<(VertexRangeConstraint, MotionConstraint), ConstraintError> {
    let (wa, _) = side(c, p.waiter);
    let (ma, mm) = side(c, 1 - p.waiter);
    Ok((
        VertexRangeConstraint {
            agent: wa,
            vertex: p.vertex,
            forbidden: p.overlap,
        },
        MotionConstraint {
            agent: ma,
            motion: mm.motion,
            forbidden: p.shift,
        },
    ))
}

/// Whether one timed motion violates `k` (ignoring the agent).
pub fn motion_violates(m: &TimedMotion, k: &Constraint) -> bool {
    match k {
        Constraint::Motion(c) => m.motion.same_signature(&c.motion) && c.forbidden.contains(m.start),
        Constraint::VertexRange(c) => {
            let f = &c.forbidden;
            if m.is_wait() {
                m.motion.from == c.vertex && f.meets_span(m.start, m.end())
            } else {
                (m.motion.from == c.vertex && f.meets_span(m.start, Extent::Finite(m.start)))
                    || (m.motion.to == c.vertex && {
                        let e = m.end().as_f64();
                        f.meets_span(e, Extent::Finite(e))
                    })
            }
        }
    }
}

/// Whether `plan` respects `k`. Constraints on other agents hold trivially.
pub fn satisfies(plan: &Plan, k: &Constraint) -> bool {
    k.agent() != plan.agent || !plan.motions.iter().any(|m| motion_violates(m, k))
}

pub fn satisfies_all(plan: &Plan, ks: &[Constraint]) -> bool {
    ks.iter().all(|k| satisfies(plan, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SoundnessReport {
    pub samples: usize,
    pub violations: usize,
}

/// Evenly spaced points of `iv` (`n >= 2`); open endpoints are nudged inward.
fn grid(iv: &TimeInterval, n: usize) -> Vec<f64> {
    let lo = iv.lo();
    let hi = iv.hi().as_f64();
    if n < 2 || hi <= lo {
        return vec![lo];
    }
    let nudge = (hi - lo) * 1e-6;
    (0..n)
        .map(|k| {
            let t = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            if k == 0 && !iv.lo_closed() {
                t + nudge
            } else if k == n - 1 && !iv.hi_closed() {
                t - nudge
            } else {
                t
            }
        })
        .collect()
}

/// Whether the mover, departing at `departure`, is strictly within `2r` of
/// the waiting vertex at instant `t`.
fn mover_hits(inst: &Instance, p: &ShiftParameters, departure: f64, t: f64) -> bool {
    let seg = match p.mover.segment(inst) {
        Ok(s) => s.departing_at(departure),
        Err(_) => return false,
    };
    match seg.position_at(t) {
        Ok(pos) => pos.distance(&inst.coordinate(p.vertex)) < 2.0 * inst.radius(),
        Err(_) => false,
    }
}

/// Samples departures over `shift` and presence instants over `overlap` and
/// counts the pairs that do not collide.
pub fn check_shifting_sound_over(
    inst: &Instance,
    p: &ShiftParameters,
    shift: &TimeInterval,
    overlap: &TimeInterval,
    n: usize,
) -> SoundnessReport {
    let mut report = SoundnessReport::default();
    let departures = grid(shift, n);
    let presences = grid(overlap, n);
    for &d in &departures {
        for &t in &presences {
            report.samples += 1;
            if !mover_hits(inst, p, d, t) {
                report.violations += 1;
            }
        }
    }
    report
}

pub fn check_shifting_sound(inst: &Instance, p: &ShiftParameters, n: usize) -> SoundnessReport {
    check_shifting_sound_over(inst, p, &p.shift, &p.overlap, n)
}

/// The overlap interval moved `mu` earlier and the shift interval moved `mu`
/// later.
pub fn widened(p: &ShiftParameters, mu: f64) -> (TimeInterval, TimeInterval) {
    let overlap = TimeInterval::open(p.overlap.lo() - mu, p.overlap.hi()).expect("wider is non-empty");
    let shift = TimeInterval::closed(p.shift.lo(), p.shift.hi().as_f64() + mu).expect("wider is non-empty");
    (overlap, shift)
}

/// Whether the waiter can still be at the vertex during `(t_s, t_s + delta]`
/// in the child that only adds the vertex-range constraint, while the
/// unchanged mover still hits it. Always false for `delta = 0`.
pub fn residual_conflict(inst: &Instance, p: &ShiftParameters) -> bool {
    if p.delta <= 0.0 {
        return false;
    }
    let t = p.collision.lo() + 0.5 * p.delta;
    !p.overlap.contains_strictly(t) && mover_hits(inst, p, p.mover.start, t)
}

/// Splits a finite wait at its midpoint. The two halves cover the same
/// span, so the plan's cost is unchanged.
pub fn split_wait(m: &TimedMotion) -> Option<(TimedMotion, TimedMotion)> {
    let d = m.motion.duration.finite()?;
    if !m.is_wait() || d <= 2.0 * EPS {
        return None;
    }
    let half = 0.5 * d;
    let v = m.motion.from;
    Some((
        Motion::wait(v, Extent::Finite(half)).at(m.start),
        Motion::wait(v, Extent::Finite(d - half)).at(m.start + half),
    ))
}
