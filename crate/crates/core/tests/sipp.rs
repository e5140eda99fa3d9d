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

mod common;

use ccbs_core::constraints::{satisfies_all, Constraint, VertexRangeConstraint};
use ccbs_core::geometry::{Extent, TimeInterval};
use ccbs_core::model::{AgentId, Instance, VertexId};
use ccbs_core::sipp::{plan, LowLevelMode, PlanError};
use common::*;
use rand::Rng;

type Set = Vec<(f64, f64)>;

/// Closed safe pieces of `[0, inf)` once the open `cuts` are removed.
fn safe_set(cuts: &[(f64, f64)]) -> Set {
    let mut cuts = cuts.to_vec();
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::new();
    let mut from = 0.0;
    for (lo, hi) in cuts {
        if hi <= from {
            continue;
        }
        if lo >= from {
            out.push((from, lo));
        }
        from = from.max(hi);
    }
    out.push((from, f64::INFINITY));
    out
}

/// Best arrival time at `goal` that can be held for ever, over every walk of
/// at most `depth` edges, by propagating the exact set of reachable times.
fn oracle(inst: &Instance, agent: AgentId, safe: &[Set], depth: usize) -> Option<f64> {
    let a = inst.agent(agent);
    let start: Set = safe[a.start.0].iter().filter(|s| s.0 <= 0.0).map(|_| (0.0, 0.0)).collect();
    let mut best: Option<f64> = None;
    let mut stack = vec![(a.start, start, 0usize)];
    while let Some((v, reach, d)) = stack.pop() {
        if reach.is_empty() {
            continue;
        }
        if v == a.goal {
            let tail = *safe[v.0].last().unwrap();
            for &(lo, hi) in &reach {
                if hi >= tail.0 {
                    let t = lo.max(tail.0);
                    best = Some(best.map_or(t, |b: f64| b.min(t)));
                }
            }
        }
        if d == depth {
            continue;
        }
        // Waiting stretches each reachable piece to the end of its safe piece.
        let mut depart: Set = Vec::new();
        for &(slo, shi) in &safe[v.0] {
            if let Some(first) = reach.iter().filter(|r| r.1 >= slo && r.0 <= shi).map(|r| r.0.max(slo)).reduce(f64::min) {
                depart.push((first, shi));
            }
        }
        for &(w, len) in inst.neighbours(v) {
            let mut arrive = Vec::new();
            for &(lo, hi) in &depart {
                for &(slo, shi) in &safe[w.0] {
                    let (x, y) = ((lo + len).max(slo), (hi + len).min(shi));
                    if x <= y {
                        arrive.push((x, y));
                    }
                }
            }
            stack.push((w, arrive, d + 1));
        }
    }
    best
}

#[test]
fn continuous_planner_is_optimal_under_vertex_ranges() {
    let mut g = rng(31);
    let mut solved = 0;
    for case in 0..300 {
        let inst = random_instance(&mut g, 5, 1, 0.3);
        let agent = AgentId(0);
        let n = inst.vertices().len();
        let mut cuts = vec![Vec::new(); n];
        let mut ks = Vec::new();
        for _ in 0..g.gen_range(1..=5) {
            let v = g.gen_range(0..n);
            let lo = g.gen_range(0.0..8.0);
            let hi = lo + g.gen_range(0.2..3.0);
            cuts[v].push((lo, hi));
            ks.push(Constraint::from(VertexRangeConstraint {
                agent,
                vertex: VertexId(v),
                forbidden: TimeInterval::open(lo, Extent::Finite(hi)).unwrap(),
            }));
        }
        let safe: Vec<Set> = cuts.iter().map(|c| safe_set(c)).collect();
        let expect = oracle(&inst, agent, &safe, 7);
        match plan(&inst, agent, &ks, LowLevelMode::Continuous, None) {
            Ok(p) => {
                assert!(satisfies_all(&p, &ks), "case {case}");
                p.check(&inst).unwrap();
                let got = p.completion_time();
                let moves = p.motions.iter().filter(|m| !m.is_wait()).count();
                let e = expect.unwrap_or(f64::INFINITY);
                assert!(got <= e + 1e-9, "case {case}: planner {got}, oracle {e}");
                if moves <= 7 {
                    assert!((got - e).abs() < 1e-9, "case {case}: planner {got}, oracle {e}");
                }
                solved += 1;
            }
            Err(PlanError::Infeasible(_)) => assert_eq!(expect, None, "case {case}"),
            Err(e) => panic!("case {case}: {e}"),
        }
    }
    assert!(solved > 200);
}
