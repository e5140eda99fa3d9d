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

//! Exact collision predicates for circular agents that either travel along a
//! straight segment at unit speed or sit still at a point.
//!
//! All interval arithmetic keeps an explicit [`Extent::Unbounded`] instead of
//! a large float so that terminal waits clip correctly.

use std::fmt;
use thiserror::Error;

/// Comparison tolerance for interval boundaries and durations.
pub const EPS: f64 = 1e-9;

/// Minimum squared-distance deficit (relative to `(2r)^2`) that counts as a
/// collision. Anything shallower is treated as tangency.
const TANGENCY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("coordinate is not finite: ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("move duration {duration} does not match distance {distance}")]
    SpeedMismatch { duration: f64, distance: f64 },
    #[error("a move cannot have an unbounded duration")]
    UnboundedMove,
    #[error("time {t} lies outside the active window [{start}, {end}]")]
    OutsideWindow { t: f64, start: f64, end: Extent },
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Coordinate {
    pub x: f64,
    pub y: f64,
}

impl Coordinate {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Coordinate) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn sub(self, other: Coordinate) -> Coordinate {
        Coordinate::new(self.x - other.x, self.y - other.y)
    }

    fn add_scaled(self, dir: Coordinate, s: f64) -> Coordinate {
        Coordinate::new(self.x + dir.x * s, self.y + dir.y * s)
    }

    fn dot(self, other: Coordinate) -> f64 {
        self.x * other.x + self.y * other.y
    }

    fn norm_sq(self) -> f64 {
        self.dot(self)
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A non-negative length of time, or an upper time bound, that may be
/// unbounded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extent {
    Finite(f64),
    Unbounded,
}

impl Extent {
    pub fn finite(self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(v),
            Extent::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Extent::Unbounded)
    }

    /// Value for ordering comparisons; `Unbounded` maps to `+inf`.
    pub fn as_f64(self) -> f64 {
        match self {
            Extent::Finite(v) => v,
            Extent::Unbounded => f64::INFINITY,
        }
    }

    pub fn from_f64(v: f64) -> Extent {
        if v == f64::INFINITY {
            Extent::Unbounded
        } else {
            Extent::Finite(v)
        }
    }

    /// `start + self`.
    pub fn after(self, start: f64) -> Extent {
        match self {
            Extent::Finite(d) => Extent::Finite(start + d),
            Extent::Unbounded => Extent::Unbounded,
        }
    }

    /// Equality within [`EPS`]; two unbounded extents are equal.
    pub fn approx_eq(self, other: Extent) -> bool {
        match (self, other) {
            (Extent::Finite(a), Extent::Finite(b)) => (a - b).abs() <= EPS,
            (Extent::Unbounded, Extent::Unbounded) => true,
            _ => false,
        }
    }
}

impl fmt::Display for Extent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extent::Finite(v) => write!(f, "{v}"),
            Extent::Unbounded => write!(f, "inf"),
        }
    }
}

/// A non-empty time interval with per-endpoint closedness. Empty intervals
/// are never constructed; operations that may produce nothing return
/// `Option<TimeInterval>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeInterval {
    lo: f64,
    hi: Extent,
    lo_closed: bool,
    hi_closed: bool,
}

impl TimeInterval {
    /// Builds an interval, returning `None` if it would be empty.
    pub fn new(lo: f64, lo_closed: bool, hi: Extent, hi_closed: bool) -> Option<Self> {
        if !lo.is_finite() {
            return None;
        }
        let hi_closed = hi_closed && !hi.is_unbounded();
        let h = hi.as_f64();
        if h.is_nan() || lo > h || (lo == h && !(lo_closed && hi_closed)) {
            return None;
        }
        // An open interval between adjacent floats holds no representable time.
        if !lo_closed && !hi_closed && lo.next_up() >= h {
            return None;
        }
        Some(Self {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn open(lo: f64, hi: Extent) -> Option<Self> {
        Self::new(lo, false, hi, false)
    }

    pub fn half_open(lo: f64, hi: Extent) -> Option<Self> {
        Self::new(lo, true, hi, false)
    }

    pub fn closed(lo: f64, hi: f64) -> Option<Self> {
        Self::new(lo, true, Extent::Finite(hi), true)
    }

    /// `[lo, inf)`
    pub fn from(lo: f64) -> Self {
        Self {
            lo,
            hi: Extent::Unbounded,
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> Extent {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn length(&self) -> Extent {
        match self.hi {
            Extent::Finite(h) => Extent::Finite(h - self.lo),
            Extent::Unbounded => Extent::Unbounded,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_closed { t >= self.lo } else { t > self.lo };
        let h = self.hi.as_f64();
        let below = if self.hi_closed { t <= h } else { t < h };
        above && below
    }

    /// Membership test where open endpoints are widened outward by [`EPS`],
    /// i.e. a point within `EPS` of an open boundary counts as outside.
    /// Closed endpoints stay exact.
    pub fn contains_strictly(&self, t: f64) -> bool {
        let above = if self.lo_closed {
            t >= self.lo
        } else {
            t > self.lo + EPS
        };
        let below = match self.hi {
            Extent::Unbounded => true,
            Extent::Finite(h) if self.hi_closed => t <= h,
            Extent::Finite(h) => t < h - EPS,
        };
        above && below
    }

    /// Whether the closed span `[a, b]` shares a point with this interval,
    /// ignoring contact within [`EPS`] of an open endpoint.
    pub fn meets_span(&self, a: f64, b: Extent) -> bool {
        let b = b.as_f64();
        let lower_ok = if self.lo_closed {
            b >= self.lo
        } else {
            b > self.lo + EPS
        };
        let upper_ok = match self.hi {
            Extent::Unbounded => true,
            Extent::Finite(h) if self.hi_closed => a <= h,
            Extent::Finite(h) => a < h - EPS,
        };
        lower_ok && upper_ok
    }

    pub fn intersect(&self, other: &TimeInterval) -> Option<TimeInterval> {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (a, b) = (self.hi.as_f64(), other.hi.as_f64());
        let (hi, hi_closed) = if a < b {
            (self.hi, self.hi_closed)
        } else if b < a {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        TimeInterval::new(lo, lo_closed, hi, hi_closed)
    }

    /// Shifts both endpoints by `dt`.
    pub fn shifted(&self, dt: f64) -> TimeInterval {
        TimeInterval {
            lo: self.lo + dt,
            hi: match self.hi {
                Extent::Finite(h) => Extent::Finite(h + dt),
                Extent::Unbounded => Extent::Unbounded,
            },
            ..*self
        }
    }

    /// Smallest member that is `>= t`, if any.
    pub fn earliest_from(&self, t: f64) -> Option<f64> {
        let cand = if t > self.lo {
            t
        } else if self.lo_closed {
            self.lo
        } else {
            self.lo.next_up()
        };
        if self.contains(cand) {
            Some(cand)
        } else {
            None
        }
    }

    /// Approximate equality of both endpoints (closedness ignored).
    pub fn approx_eq(&self, other: &TimeInterval) -> bool {
        (self.lo - other.lo).abs() <= EPS && self.hi.approx_eq(other.hi)
    }

    /// The parts of `self` not covered by `cut`.
    pub fn subtract(&self, cut: &TimeInterval) -> Vec<TimeInterval> {
        let mut out = Vec::with_capacity(2);
        if let Some(left) = TimeInterval::new(
            self.lo,
            self.lo_closed,
            Extent::Finite(cut.lo),
            !cut.lo_closed,
        )
        .and_then(|l| l.intersect(self))
        {
            out.push(left);
        }
        if let Extent::Finite(h) = cut.hi {
            if let Some(right) =
                TimeInterval::new(h, !cut.hi_closed, Extent::Unbounded, false)
                    .and_then(|r| r.intersect(self))
            {
                out.push(right);
            }
        }
        out
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// One constant-velocity piece of an agent trajectory: a unit-speed move
/// between two points, or a wait at a single point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KinematicSegment {
    origin: Coordinate,
    target: Coordinate,
    departure: f64,
    duration: Extent,
}

impl KinematicSegment {
    /// A move at unit speed; its duration is the Euclidean length.
    pub fn moving(
        origin: Coordinate,
        target: Coordinate,
        departure: f64,
    ) -> Result<Self, GeometryError> {
        check_finite(origin)?;
        check_finite(target)?;
        let length = origin.distance(&target);
        if length <= 0.0 {
            return Err(GeometryError::NonPositiveDuration(length));
        }
        Ok(Self {
            origin,
            target,
            departure,
            duration: Extent::Finite(length),
        })
    }

    /// A move with an explicit duration, which must match the length.
    pub fn moving_for(
        origin: Coordinate,
        target: Coordinate,
        departure: f64,
        duration: Extent,
    ) -> Result<Self, GeometryError> {
        let seg = Self::moving(origin, target, departure)?;
        let distance = origin.distance(&target);
        match duration {
            Extent::Unbounded => Err(GeometryError::UnboundedMove),
            Extent::Finite(d) if (d - distance).abs() > EPS => {
                Err(GeometryError::SpeedMismatch { duration: d, distance })
            }
            Extent::Finite(d) => Ok(Self {
                duration: Extent::Finite(d),
                ..seg
            }),
        }
    }

    pub fn waiting(at: Coordinate, departure: f64, duration: Extent) -> Result<Self, GeometryError> {
        check_finite(at)?;
        if let Extent::Finite(d) = duration {
            if !(d > 0.0) {
                return Err(GeometryError::NonPositiveDuration(d));
            }
        }
        Ok(Self {
            origin: at,
            target: at,
            departure,
            duration,
        })
    }

    pub fn origin(&self) -> Coordinate {
        self.origin
    }

    pub fn target(&self) -> Coordinate {
        self.target
    }

    pub fn departure(&self) -> f64 {
        self.departure
    }

    pub fn duration(&self) -> Extent {
        self.duration
    }

    pub fn end(&self) -> Extent {
        self.duration.after(self.departure)
    }

    pub fn is_wait(&self) -> bool {
        self.origin == self.target
    }

    /// Same geometry, different departure time.
    pub fn departing_at(&self, departure: f64) -> Self {
        Self { departure, ..*self }
    }

    fn velocity(&self) -> Coordinate {
        match self.duration {
            Extent::Finite(d) if !self.is_wait() => {
                let delta = self.target.sub(self.origin);
                Coordinate::new(delta.x / d, delta.y / d)
            }
            _ => Coordinate::default(),
        }
    }

    fn position_unchecked(&self, t: f64) -> Coordinate {
        if self.is_wait() {
            return self.origin;
        }
        let d = self.duration.as_f64();
        let s = ((t - self.departure) / d).clamp(0.0, 1.0);
        Coordinate::new(
            self.origin.x + (self.target.x - self.origin.x) * s,
            self.origin.y + (self.target.y - self.origin.y) * s,
        )
    }

    pub fn position_at(&self, t: f64) -> Result<Coordinate, GeometryError> {
        let end = self.end();
        if t < self.departure || t > end.as_f64() {
            return Err(GeometryError::OutsideWindow {
                t,
                start: self.departure,
                end,
            });
        }
        Ok(self.position_unchecked(t))
    }
}

fn check_finite(c: Coordinate) -> Result<(), GeometryError> {
    if c.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::NonFinite(c.x, c.y))
    }
}

/// Relative motion of `a` with respect to `b` over their common window,
/// expressed as `q + v * s` for `s` in `[0, span]`.
struct Relative {
    start: f64,
    span: Extent,
    q: Coordinate,
    v: Coordinate,
}

fn relative(a: &KinematicSegment, b: &KinematicSegment) -> Option<Relative> {
    let start = a.departure.max(b.departure);
    let end = a.end().as_f64().min(b.end().as_f64());
    if !(end > start) {
        return None;
    }
    let q = a
        .position_unchecked(start)
        .sub(b.position_unchecked(start));
    let v = a.velocity().sub(b.velocity());
    Some(Relative {
        start,
        span: Extent::from_f64(end - start),
        q,
        v,
    })
}

impl Relative {
    /// Minimum of `|q + v s|^2 - R^2` over the window.
    fn min_clearance(&self, reach_sq: f64) -> f64 {
        let a = self.v.norm_sq();
        let s = if a > 0.0 {
            (-self.q.dot(self.v) / a).clamp(0.0, self.span.as_f64())
        } else {
            0.0
        };
        self.q.add_scaled(self.v, s).norm_sq() - reach_sq
    }
}

fn tangency_tol(reach_sq: f64) -> f64 {
    TANGENCY_TOL * reach_sq.max(1.0)
}

/// Refines a root of `a s^2 + 2 b s + c` by Newton steps.
fn polish_root(mut s: f64, a: f64, b: f64, c: f64) -> f64 {
    for _ in 0..3 {
        let f = (a * s + 2.0 * b) * s + c;
        let df = 2.0 * (a * s + b);
        if df.abs() < 1e-12 {
            break;
        }
        let step = f / df;
        s -= step;
        if step.abs() < 1e-15 * s.abs().max(1.0) {
            break;
        }
    }
    s
}

/// Open interval during which the centres of `a` and `b` are strictly
/// closer than `2r`, clipped to the common active window.
pub fn collision_interval(
    a: &KinematicSegment,
    b: &KinematicSegment,
    r: f64,
) -> Option<TimeInterval> {
    let rel = relative(a, b)?;
    let reach_sq = 4.0 * r * r;
    if rel.min_clearance(reach_sq) >= -tangency_tol(reach_sq) {
        return None;
    }
    let qa = rel.v.norm_sq();
    if qa == 0.0 {
        return TimeInterval::open(rel.start, rel.span.after(rel.start));
    }
    let qb = rel.q.dot(rel.v);
    let qc = rel.q.norm_sq() - reach_sq;
    let disc = (qb * qb - qa * qc).max(0.0);
    let root = disc.sqrt();
    // Numerically stable pair of roots.
    let (s1, s2) = if qb >= 0.0 {
        let k = -(qb + root);
        (k / qa, if k != 0.0 { qc / k } else { 0.0 })
    } else {
        let k = -qb + root;
        (if k != 0.0 { qc / k } else { 0.0 }, k / qa)
    };
    let (s1, s2) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
    let s1 = polish_root(s1, qa, qb, qc);
    let s2 = polish_root(s2, qa, qb, qc);
    let lo = rel.start + s1.max(0.0);
    let hi = match rel.span {
        Extent::Finite(span) => rel.start + s2.min(span),
        Extent::Unbounded => rel.start + s2,
    };
    TimeInterval::open(lo, Extent::Finite(hi))
}

/// Whether the two segments bring the agents strictly closer than `2r` at
/// some instant of a common window of positive length.
pub fn in_collision(a: &KinematicSegment, b: &KinematicSegment, r: f64) -> bool {
    collision_interval(a, b, r).is_some()
}

/// Collision interval of a move against an agent parked at `wait_vertex`
/// for all time, built from the perpendicular foot `H` of the parked centre
/// on the supporting line and the entry point `P1` where the distance first
/// reaches `2r`. The result is clipped to the move's own window.
pub fn wait_move_collision_interval(
    wait_vertex: Coordinate,
    mover: &KinematicSegment,
    r: f64,
) -> Option<TimeInterval> {
    if mover.is_wait() {
        return None;
    }
    let length = mover.duration.as_f64();
    let start = mover.departure;
    let dir = mover.target.sub(mover.origin);
    let unit = Coordinate::new(dir.x / length, dir.y / length);
    // Signed |MH| along the direction of travel.
    let along = wait_vertex.sub(mover.origin).dot(unit);
    let foot = mover.origin.add_scaled(unit, along);
    let offset_sq = wait_vertex.sub(foot).norm_sq();
    let reach_sq = 4.0 * r * r;
    if reach_sq - offset_sq <= tangency_tol(reach_sq) {
        return None;
    }
    // |P1 H|
    let half_chord = (reach_sq - offset_sq).sqrt();
    let entry = (along - half_chord).max(0.0);
    let exit = (along + half_chord).min(length);
    if !(exit > entry) {
        return None;
    }
    // Reject grazes whose depth inside the window is below tangency.
    let closest = along.clamp(entry, exit);
    let depth = mover.origin.add_scaled(unit, closest).sub(wait_vertex).norm_sq() - reach_sq;
    if depth >= -tangency_tol(reach_sq) {
        return None;
    }
    TimeInterval::open(start + entry, Extent::Finite(start + exit))
}

/// Minimum clearance of `target` departing at `tau` against `fixed`, or
/// `+inf` when the windows do not overlap on an interval.
fn clearance_at(target: &KinematicSegment, fixed: &KinematicSegment, tau: f64, reach_sq: f64) -> f64 {
    match relative(&target.departing_at(tau), fixed) {
        Some(rel) => rel.min_clearance(reach_sq),
        None => f64::INFINITY,
    }
}

/// Maximal set of departure times `tau >= 0` for which `target` departing at
/// `tau` collides with `fixed`. The departure time stored in `target` is
/// ignored.
///
/// The minimum clearance is a convex function of `tau` (squared norm of an
/// affine map minimised over a convex window), so the colliding set is a
/// single interval: locate the minimiser, then bisect each side.
pub fn unsafe_interval(
    target: &KinematicSegment,
    fixed: &KinematicSegment,
    r: f64,
) -> Option<TimeInterval> {
    let reach_sq = 4.0 * r * r;
    let tol = tangency_tol(reach_sq);
    let collides = |tau: f64| clearance_at(target, fixed, tau, reach_sq) < -tol;

    let lo_domain = match target.duration {
        Extent::Finite(d) => (fixed.departure - d).max(0.0),
        Extent::Unbounded => 0.0,
    };
    // Past the fixed departure an unbounded fixed wait looks identical for
    // every tau, so the search can stop there.
    let (hi_domain, open_ended) = match fixed.end() {
        Extent::Finite(e) => (e, false),
        Extent::Unbounded => (fixed.departure.max(lo_domain) + 1.0, true),
    };
    if hi_domain <= lo_domain {
        return None;
    }

    // Golden-section search for the minimiser.
    let f = |tau: f64| clearance_at(target, fixed, tau, reach_sq);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo_domain, hi_domain);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let mut best = 0.5 * (a + b);
    // Golden search can stall on a plateau of +inf; fall back to sampling.
    if !collides(best) {
        let n = 2000;
        best = (0..=n)
            .map(|k| lo_domain + (hi_domain - lo_domain) * k as f64 / n as f64)
            .find(|&t| collides(t))?;
    }

    let bisect = |mut inside: f64, mut outside: f64| -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if collides(mid) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };

    let (lo, lo_closed) = if collides(lo_domain) {
        (lo_domain, true)
    } else {
        (bisect(best, lo_domain), false)
    };
    let hi = if open_ended && collides(hi_domain) {
        Extent::Unbounded
    } else {
        Extent::Finite(bisect(best, hi_domain))
    };
    TimeInterval::new(lo, lo_closed, hi, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> Coordinate {
        Coordinate::new(x, y)
    }

    fn wait(at: Coordinate, start: f64, dur: f64) -> KinematicSegment {
        KinematicSegment::waiting(at, start, Extent::Finite(dur)).unwrap()
    }

    fn mv(a: Coordinate, b: Coordinate, start: f64) -> KinematicSegment {
        KinematicSegment::moving(a, b, start).unwrap()
    }

    #[test]
    fn position_examples() {
        assert_eq!(mv(c(0., 0.), c(4., 0.), 0.).position_at(2.).unwrap(), c(2., 0.));
        assert_eq!(wait(c(1., 1.), 5., 200.).position_at(100.).unwrap(), c(1., 1.));
        let p = mv(c(0., 0.), c(3., 4.), 1.).position_at(6.).unwrap();
        assert!((p.x - 3.).abs() < 1e-12 && (p.y - 4.).abs() < 1e-12);
        assert!(matches!(
            mv(c(0., 0.), c(4., 0.), 0.).position_at(4.5),
            Err(GeometryError::OutsideWindow { .. })
        ));
        let terminal = KinematicSegment::waiting(c(1., 1.), 5., Extent::Unbounded).unwrap();
        assert_eq!(terminal.position_at(1e9).unwrap(), c(1., 1.));
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(KinematicSegment::moving(c(0., 0.), c(0., 0.), 0.).is_err());
        assert!(KinematicSegment::moving(c(f64::NAN, 0.), c(1., 0.), 0.).is_err());
        assert!(KinematicSegment::moving_for(c(0., 0.), c(3., 4.), 0., Extent::Finite(4.)).is_err());
        assert!(KinematicSegment::waiting(c(0., 0.), 0., Extent::Finite(0.)).is_err());
    }

    #[test]
    fn waits_far_apart_do_not_collide() {
        assert!(!in_collision(&wait(c(0., 0.), 0., 5.), &wait(c(3., 0.), 1., 5.), 0.5));
        assert!(collision_interval(&wait(c(0., 0.), 0., 5.), &wait(c(3., 0.), 1., 5.), 0.5).is_none());
    }

    #[test]
    fn coincident_waits_collide() {
        let iv = collision_interval(&wait(c(1., 1.), 0., 5.), &wait(c(1., 1.), 2., 5.), 0.5).unwrap();
        assert_eq!((iv.lo(), iv.hi()), (2., Extent::Finite(5.)));
    }

    #[test]
    fn crossing_mover_interval() {
        let w = wait(c(0., 0.), 0., 10.);
        let m = mv(c(-2., 0.), c(2., 0.), 0.);
        assert!(in_collision(&w, &m, 0.5));
        let iv = collision_interval(&w, &m, 0.5).unwrap();
        assert!((iv.lo() - 1.).abs() < 1e-12);
        assert!((iv.hi().as_f64() - 3.).abs() < 1e-12);
        assert!(!iv.lo_closed() && !iv.hi_closed());

        let late = mv(c(-2., 0.), c(2., 0.), 8.);
        let iv = collision_interval(&w, &late, 0.5).unwrap();
        assert!((iv.lo() - 9.).abs() < 1e-12);
        assert!((iv.hi().as_f64() - 10.).abs() < 1e-12);
    }

    #[test]
    fn tangent_pass_is_safe() {
        // Passes at exactly 2r = 1 from the waiting centre.
        let w = wait(c(0., 1.), 0., 10.);
        let m = mv(c(-2., 0.), c(2., 0.), 0.);
        assert!(!in_collision(&w, &m, 0.5));
        assert!(wait_move_collision_interval(c(0., 1.), &m, 0.5).is_none());
    }

    #[test]
    fn closed_form_matches_example() {
        let m = mv(c(-2., 0.), c(2., 0.), 0.);
        let iv = wait_move_collision_interval(c(0., 1.), &m, 0.75).unwrap();
        let half = 1.25f64.sqrt();
        assert!((iv.lo() - (2. - half)).abs() < 1e-12);
        assert!((iv.hi().as_f64() - (2. + half).min(4.)).abs() < 1e-12);
        let generic = collision_interval(&KinematicSegment::waiting(c(0., 1.), -1., Extent::Unbounded).unwrap(), &m, 0.75).unwrap();
        assert!(iv.approx_eq(&generic));
    }

    #[test]
    fn closed_form_clips_to_window() {
        let m = mv(c(-0.5, 0.), c(3.5, 0.), 2.);
        let iv = wait_move_collision_interval(c(0., 0.), &m, 0.5).unwrap();
        assert_eq!(iv.lo(), 2.);
        assert!((iv.hi().as_f64() - 3.5).abs() < 1e-12);
        assert!(wait_move_collision_interval(c(0., 5.), &m, 0.5).is_none());
    }

    #[test]
    fn unsafe_interval_against_finite_wait() {
        let fixed = wait(c(0., 0.), 0., 10.);
        let target = mv(c(-2., 0.), c(2., 0.), 0.);
        let iv = unsafe_interval(&target, &fixed, 0.5).unwrap();
        assert_eq!(iv.lo(), 0.);
        assert!(iv.lo_closed());
        assert!((iv.hi().as_f64() - 9.).abs() < 1e-9);
    }

    #[test]
    fn unsafe_interval_against_terminal_wait_is_unbounded() {
        let fixed = KinematicSegment::waiting(c(0., 0.), 0., Extent::Unbounded).unwrap();
        let target = mv(c(-3., 0.), c(0., 0.), 0.);
        let iv = unsafe_interval(&target, &fixed, 0.5).unwrap();
        assert_eq!((iv.lo(), iv.hi()), (0., Extent::Unbounded));
    }

    #[test]
    fn unsafe_interval_disjoint_geometry() {
        let fixed = wait(c(0., 10.), 0., 10.);
        let target = mv(c(-2., 0.), c(2., 0.), 0.);
        assert!(unsafe_interval(&target, &fixed, 0.5).is_none());
    }

    #[test]
    fn interval_subtraction_flips_closedness() {
        let all = TimeInterval::from(0.);
        let parts = all.subtract(&TimeInterval::open(2., Extent::Finite(5.)).unwrap());
        assert_eq!(parts.len(), 2);
        assert!(parts[0].contains(2.) && !parts[0].contains(2.1));
        assert!(parts[1].contains(5.) && parts[1].hi().is_unbounded());
        let parts = all.subtract(&TimeInterval::closed(0., 1.).unwrap());
        assert_eq!(parts.len(), 1);
        assert!(!parts[0].contains(1.) && parts[0].contains(1.0000001));
    }

    #[test]
    fn earliest_member() {
        let iv = TimeInterval::open(1., Extent::Finite(2.)).unwrap();
        assert_eq!(iv.earliest_from(0.), Some(1f64.next_up()));
        assert_eq!(iv.earliest_from(1.5), Some(1.5));
        assert_eq!(iv.earliest_from(2.), None);
    }
}
