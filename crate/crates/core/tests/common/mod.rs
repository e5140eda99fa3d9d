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

//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use ccbs_core::geometry::{Coordinate, Extent, KinematicSegment};
use ccbs_core::model::{Agent, Edge, Instance, Vertex, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A motion described by plain numbers; position is evaluated here without
/// going through the library.
#[derive(Clone, Copy, Debug)]
pub struct Seg {
    pub from: (f64, f64),
    pub to: (f64, f64),
    pub start: f64,
    /// `None` for a wait that never ends.
    pub duration: Option<f64>,
}

impl Seg {
    pub fn end(&self) -> f64 {
        self.duration.map_or(f64::INFINITY, |d| self.start + d)
    }

    pub fn at(&self, t: f64) -> (f64, f64) {
        let d = self.duration.unwrap_or(0.0);
        if d == 0.0 || self.from == self.to {
            return self.from;
        }
        let s = ((t - self.start) / d).clamp(0.0, 1.0);
        (
            self.from.0 + s * (self.to.0 - self.from.0),
            self.from.1 + s * (self.to.1 - self.from.1),
        )
    }

    pub fn kinematic(&self) -> KinematicSegment {
        let c = |p: (f64, f64)| Coordinate::new(p.0, p.1);
        if self.from == self.to {
            let d = self.duration.map_or(Extent::Unbounded, Extent::Finite);
            KinematicSegment::waiting(c(self.from), self.start, d).unwrap()
        } else {
            KinematicSegment::moving(c(self.from), c(self.to), self.start).unwrap()
        }
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// First and last sampled instants at which the two discs overlap, sampling
/// the common window every `step`. The overlap set of two straight motions
/// is a single interval, so the extremes describe it.
pub fn sampled_collision(a: &Seg, b: &Seg, r: f64, step: f64) -> Option<(f64, f64)> {
    let lo = a.start.max(b.start);
    let hi = a.end().min(b.end());
    if hi <= lo {
        return None;
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let mut first = None;
    let mut last = None;
    for i in 0..=n {
        let t = (lo + i as f64 * step).min(hi);
        if dist(a.at(t), b.at(t)) < 2.0 * r {
            first.get_or_insert(t);
            last = Some(t);
        }
    }
    first.zip(last)
}

/// Smallest distance between the two centres over a sampled window.
pub fn closest_approach(a: &Seg, b: &Seg, step: f64) -> f64 {
    let lo = a.start.max(b.start);
    let hi = a.end().min(b.end());
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n)
        .map(|i| {
            let t = (lo + i as f64 * step).min(hi);
            dist(a.at(t), b.at(t))
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn random_point(rng: &mut impl Rng, span: f64) -> (f64, f64) {
    (rng.gen_range(-span..span), rng.gen_range(-span..span))
}

/// A move of random direction and timing inside a `span` box.
pub fn random_move(rng: &mut impl Rng, span: f64) -> Seg {
    let from = random_point(rng, span);
    let mut to = random_point(rng, span);
    while dist(from, to) < 1e-3 {
        to = random_point(rng, span);
    }
    Seg {
        from,
        to,
        start: rng.gen_range(0.0..5.0),
        duration: Some(dist(from, to)),
    }
}

pub fn random_wait(rng: &mut impl Rng, span: f64) -> Seg {
    let at = random_point(rng, span);
    Seg {
        from: at,
        to: at,
        start: rng.gen_range(0.0..5.0),
        duration: if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(0.5..20.0)) },
    }
}

/// A small connected roadmap on grid points at least 1 apart, with up to
/// `max_agents` agents on distinct starts and distinct goals.
pub fn random_instance(rng: &mut impl Rng, max_vertices: usize, max_agents: usize, radius: f64) -> Instance {
    let n = rng.gen_range(3..=max_vertices);
    let mut grid: Vec<(i32, i32)> = (0..4).flat_map(|x| (0..4).map(move |y| (x, y))).collect();
    grid.shuffle(rng);
    let vertices: Vec<Vertex> = grid[..n]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Vertex {
            name: format!("v{i}"),
            at: Coordinate::new(x as f64 * 1.5, y as f64 * 1.5),
        })
        .collect();
    let len = |a: usize, b: usize| vertices[a].at.distance(&vertices[b].at);
    let mut pairs = Vec::new();
    for i in 1..n {
        pairs.push((rng.gen_range(0..i), i));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let key = (a.min(b), a.max(b));
        if a != b && !pairs.iter().any(|&(x, y)| (x.min(y), x.max(y)) == key) {
            pairs.push(key);
        }
    }
    let edges = pairs
        .iter()
        .map(|&(a, b)| Edge {
            u: VertexId(a),
            v: VertexId(b),
            length: len(a, b),
        })
        .collect();
    let k = rng.gen_range(1..=max_agents.min(n));
    let mut starts: Vec<usize> = (0..n).collect();
    let mut goals: Vec<usize> = (0..n).collect();
    starts.shuffle(rng);
    goals.shuffle(rng);
    let agents = (0..k)
        .map(|i| Agent {
            name: format!("a{i}"),
            start: VertexId(starts[i]),
            goal: VertexId(goals[i]),
        })
        .collect();
    Instance::new(vertices, edges, agents, radius)
}

/// Sampled collision window: a pass every `10 * step` finds the overlap,
/// then each edge of it is resolved to `step` inside its bracket.
pub fn refined_collision(a: &Seg, b: &Seg, r: f64, step: f64) -> Option<(f64, f64)> {
    let lo = a.start.max(b.start);
    let hi = a.end().min(b.end()).min(lo + 100.0);
    if hi <= lo {
        return None;
    }
    let hit = |t: f64| dist(a.at(t), b.at(t)) < 2.0 * r;
    let coarse = 10.0 * step;
    let n = ((hi - lo) / coarse).ceil() as usize;
    let at = |i: usize| (lo + i as f64 * coarse).min(hi);
    let first = (0..=n).find(|&i| hit(at(i)))?;
    let last = (first..=n).rev().find(|&i| hit(at(i))).unwrap();
    let refine = |from: f64, to: f64, forward: bool| {
        let m = ((to - from).abs() / step).ceil() as usize;
        let pts: Vec<f64> = (0..=m).map(|j| from + (to - from) * j as f64 / m.max(1) as f64).collect();
        if forward {
            pts.into_iter().find(|&t| hit(t))
        } else {
            pts.into_iter().rev().find(|&t| hit(t))
        }
    };
    let s = if first == 0 { at(0) } else { refine(at(first - 1), at(first), true).unwrap_or(at(first)) };
    let e = if last == n { at(n) } else { refine(at(last), at(last + 1), false).unwrap_or(at(last)) };
    Some((s, e))
}

/// Compares the library's collision window for one pair with the sampled
/// one. Pairs whose closest approach is within `margin` of `2r`, or whose
/// window is shorter than the sampling resolution, only need to agree
/// loosely since sampling cannot resolve them.
pub fn check_pair(a: &Seg, b: &Seg, r: f64, step: f64, tol: f64) -> Result<(), String> {
    use ccbs_core::geometry::{collision_interval, in_collision};
    let (ka, kb) = (a.kinematic(), b.kinematic());
    let lib = collision_interval(&ka, &kb, r);
    let sampled = refined_collision(a, b, r, step);
    let near_boundary = (closest_approach(a, b, step) - 2.0 * r).abs() < 1e-3;
    if in_collision(&ka, &kb, r) != lib.is_some() {
        return Err("in_collision disagrees with collision_interval".into());
    }
    match (lib, sampled) {
        (None, None) => Ok(()),
        (Some(iv), Some((s, e))) => {
            let hi = iv.hi().finite().unwrap_or(f64::INFINITY).min(a.start.max(b.start) + 100.0);
            if (iv.lo() - s).abs() <= tol && (hi - e).abs() <= tol {
                Ok(())
            } else {
                Err(format!("boundaries differ: library {iv}, sampled ({s}, {e})"))
            }
        }
        (Some(iv), None) if near_boundary || iv.length().as_f64() < 10.0 * step => Ok(()),
        (None, Some(_)) if near_boundary => Ok(()),
        (lib, sampled) => Err(format!("library {lib:?} vs sampled {sampled:?}")),
    }
}

/// The motions of `plan` as plain segments.
pub fn plan_segs(inst: &Instance, plan: &ccbs_core::model::Plan) -> Vec<Seg> {
    plan.motions
        .iter()
        .map(|m| {
            let p = |v: VertexId| {
                let c = inst.coordinate(v);
                (c.x, c.y)
            };
            Seg {
                from: p(m.motion.from),
                to: p(m.motion.to),
                start: m.start,
                duration: m.motion.duration.finite(),
            }
        })
        .collect()
}

/// Position of an agent following `segs` at time `t`.
pub fn plan_position(segs: &[Seg], t: f64) -> (f64, f64) {
    let s = segs
        .iter()
        .rev()
        .find(|s| s.start <= t)
        .unwrap_or(&segs[0]);
    s.at(t)
}

/// Smallest centre distance between any two agents of a solution, sampled
/// every `step` from 0 to one time unit past the last finite motion end.
pub fn sampled_min_distance(inst: &Instance, sol: &ccbs_core::model::Solution, step: f64) -> f64 {
    let segs: Vec<Vec<Seg>> = sol.plans.iter().map(|p| plan_segs(inst, p)).collect();
    let horizon = segs
        .iter()
        .flatten()
        .map(|s| if s.end().is_finite() { s.end() } else { s.start })
        .fold(0.0, f64::max)
        + 1.0;
    let n = (horizon / step).ceil() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let t = i as f64 * step;
        let pos: Vec<_> = segs.iter().map(|s| plan_position(s, t)).collect();
        for a in 0..pos.len() {
            for b in a + 1..pos.len() {
                best = best.min(dist(pos[a], pos[b]));
            }
        }
    }
    best
}

/// Agent `w` parked at O for ever while agent `m` crosses the L-R edge
/// close enough to hit it. Returns the instance and the root conflict.
pub fn wait_move_case(rng: &mut impl Rng) -> (Instance, ccbs_core::model::Conflict) {
    use ccbs_core::model::{Motion, Plan, Solution};
    loop {
        let r = rng.gen_range(0.1..1.0);
        let l = random_point(rng, 10.0);
        let rr = random_point(rng, 10.0);
        let len = dist(l, rr);
        if len < 4.0 * r {
            continue;
        }
        let s = rng.gen_range(0.1..0.9);
        let off = rng.gen_range(-1.8 * r..1.8 * r);
        let (ux, uy) = ((rr.0 - l.0) / len, (rr.1 - l.1) / len);
        let o = (l.0 + s * len * ux - off * uy, l.1 + s * len * uy + off * ux);
        if dist(o, l) <= 2.0 * r || dist(o, rr) <= 2.0 * r {
            continue;
        }
        let vx = |name: &str, p: (f64, f64)| Vertex { name: name.into(), at: Coordinate::new(p.0, p.1) };
        let inst = Instance::new(
            vec![vx("O", o), vx("L", l), vx("R", rr)],
            vec![Edge { u: VertexId(1), v: VertexId(2), length: Coordinate::new(l.0, l.1).distance(&Coordinate::new(rr.0, rr.1)) }],
            vec![
                Agent { name: "w".into(), start: VertexId(0), goal: VertexId(0) },
                Agent { name: "m".into(), start: VertexId(1), goal: VertexId(2) },
            ],
            r,
        );
        let depart = rng.gen_range(0.0..3.0);
        let len = inst.edges()[0].length;
        let sol = Solution::new(vec![
            Plan::stay(&inst, ccbs_core::model::AgentId(0)),
            Plan::normalized(
                &inst,
                ccbs_core::model::AgentId(1),
                vec![Motion::travel(VertexId(1), VertexId(2), len).at(depart)],
            ),
        ]);
        if let Some(c) = ccbs_core::ccbs::detect_conflict(&inst, &sol) {
            return (inst, c);
        }
    }
}

/// Outcome of comparing `solve(dt)` with the exhaustive oracle on one
/// random instance.
#[derive(Debug)]
pub struct DtCheck {
    pub solver: Option<f64>,
    pub oracle: Option<f64>,
    pub bound: f64,
    /// Expanded costs never dropped by more than the monotonicity slack.
    pub monotone: bool,
}

impl DtCheck {
    /// Equal costs, or both report nothing within the bound.
    pub fn agrees(&self) -> bool {
        match (self.solver, self.oracle) {
            (Some(a), Some(b)) => (a - b).abs() < 1e-6,
            (Some(a), None) => a > self.bound + 1e-9,
            (None, None) => true,
            (None, Some(_)) => false,
        }
    }
}

/// Whether the agents' independent shortest plans collide.
pub fn conflicting_roots(inst: &Instance) -> bool {
    use ccbs_core::sipp::{plan, LowLevelMode};
    let mut plans = Vec::new();
    for a in inst.agent_ids() {
        match plan(inst, a, &[], LowLevelMode::Discrete { unit: 1.0 }, None) {
            Ok(p) => plans.push(p),
            Err(_) => return false,
        }
    }
    ccbs_core::ccbs::detect_conflict(inst, &ccbs_core::model::Solution::new(plans)).is_some()
}

/// Random tiny instance for seed `seed` whose shortest plans collide and
/// which the oracle can solve within its bound, solved both ways at unit 1.
pub fn dt_versus_oracle(seed: u64) -> Result<DtCheck, ccbs_core::ccbs::SolveError> {
    use ccbs_core::ccbs::{oracle_dt, solve, Budget, Mode, SolveOptions, Status};
    let mut g = rng(1000 + seed);
    let (inst, bound, oracle) = loop {
        let r = g.gen_range(0.2..0.4);
        let inst = random_instance(&mut g, 6, 3, r);
        if !conflicting_roots(&inst) {
            continue;
        }
        let bound: f64 = inst
            .agents()
            .iter()
            .map(|a| ccbs_core::sipp::admissible_heuristic(&inst, a.goal)[a.start.0].as_f64())
            .sum::<f64>()
            + 6.0;
        if let Some(best) = oracle_dt(&inst, 1.0, bound).expect("instance is small") {
            break (inst, bound, best.sic());
        }
    };
    let out = solve(&inst, &SolveOptions::new(Mode::Discrete { unit: 1.0 }, Budget::expansions(20_000)))?;
    let monotone = out
        .stats
        .lower_bounds
        .windows(2)
        .all(|w| w[1] >= w[0] - ccbs_core::ccbs::MONOTONICITY_TOL);
    let solver = match out.status {
        Status::Solved { g, .. } => Some(g),
        _ => None,
    };
    Ok(DtCheck {
        solver,
        oracle: Some(oracle),
        bound,
        monotone,
    })
}
