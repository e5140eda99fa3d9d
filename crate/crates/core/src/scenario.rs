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

//! Line-oriented text formats for scenarios and solutions.
//!
//! Scenario:
//!
//! ```text
//! ccbs-scenario 1
//! radius 0.5
//! vertex A 0 0
//! vertex B 3 0
//! edge A B 3
//! agent a1 A B
//! ```
//!
//! Solution:
//!
//! ```text
//! ccbs-solution 1
//! plan a1
//! wait A 0 1.5
//! move A B 1.5
//! wait B 4.5 inf
//! end
//! ```
//!
//! Blank lines and `#` comments are ignored. Numbers are written with 12
//! significant digits. Move durations come from the scenario's edge length.

use crate::geometry::{Coordinate, Extent};
use crate::model::{Agent, AgentId, Edge, Instance, Motion, Plan, Solution, Vertex, VertexId};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

pub const SCENARIO_HEADER: &str = "ccbs-scenario 1";
pub const SOLUTION_HEADER: &str = "ccbs-solution 1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {field}: {message}")]
    Field {
        line: usize,
        field: &'static str,
        message: String,
    },
    #[error("{0}")]
    Missing(String),
}

fn field_err(line: usize, field: &'static str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        line,
        field,
        message: message.into(),
    }
}

/// Formats a number with 12 significant digits, without trailing zeros.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{:.11e}", v).parse().expect("formatted float parses");
    format!("{rounded}")
}

fn fmt_extent(e: Extent) -> String {
    match e {
        Extent::Finite(v) => fmt_num(v),
        Extent::Unbounded => "inf".to_string(),
    }
}

fn parse_num(line: usize, field: &'static str, tok: Option<&str>) -> Result<f64, ParseError> {
    let tok = tok.ok_or_else(|| field_err(line, field, "missing value"))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| field_err(line, field, format!("not a number: {tok:?}")))?;
    if !v.is_finite() {
        return Err(field_err(line, field, format!("not finite: {tok:?}")));
    }
    Ok(v)
}

fn parse_extent(line: usize, field: &'static str, tok: Option<&str>) -> Result<Extent, ParseError> {
    match tok {
        Some("inf") => Ok(Extent::Unbounded),
        other => parse_num(line, field, other).map(Extent::Finite),
    }
}

/// Content lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        (!toks.is_empty()).then_some((k + 1, toks))
    })
}

fn expect_header<'a>(
    it: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    header: &str,
) -> Result<(), ParseError> {
    match it.next() {
        Some((_, toks)) if toks.join(" ") == header => Ok(()),
        Some((line, toks)) => Err(field_err(
            line,
            "header",
            format!("expected {header:?}, found {:?}", toks.join(" ")),
        )),
        None => Err(ParseError::Missing(format!("header {header:?} required"))),
    }
}

fn no_extra(line: usize, field: &'static str, toks: &[&str], n: usize) -> Result<(), ParseError> {
    if toks.len() > n {
        return Err(field_err(line, field, format!("unexpected token {:?}", toks[n])));
    }
    Ok(())
}

pub fn load_scenario(text: &str) -> Result<Instance, ParseError> {
    let mut it = lines(text);
    expect_header(&mut it, SCENARIO_HEADER)?;
    let mut radius = None;
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut names: HashMap<String, VertexId> = HashMap::new();
    let mut edges = Vec::new();
    let mut agents = Vec::new();
    for (line, toks) in it {
        let vertex = |tok: Option<&&str>, field| -> Result<VertexId, ParseError> {
            let name = tok.ok_or_else(|| field_err(line, field, "missing value"))?;
            names
                .get(*name)
                .copied()
                .ok_or_else(|| field_err(line, field, format!("unknown vertex {name:?}")))
        };
        match toks[0] {
            "radius" => {
                if radius.is_some() {
                    return Err(field_err(line, "radius", "given twice"));
                }
                radius = Some(parse_num(line, "radius", toks.get(1).copied())?);
                no_extra(line, "radius", &toks, 2)?;
            }
            "vertex" => {
                let name = toks.get(1).ok_or_else(|| field_err(line, "vertex.name", "missing value"))?;
                let x = parse_num(line, "vertex.x", toks.get(2).copied())?;
                let y = parse_num(line, "vertex.y", toks.get(3).copied())?;
                no_extra(line, "vertex", &toks, 4)?;
                if names.contains_key(*name) {
                    return Err(field_err(line, "vertex.name", format!("duplicate vertex {name:?}")));
                }
                names.insert(name.to_string(), VertexId(vertices.len()));
                vertices.push(Vertex {
                    name: name.to_string(),
                    at: Coordinate::new(x, y),
                });
            }
            "edge" => {
                let u = vertex(toks.get(1), "edge.u")?;
                let v = vertex(toks.get(2), "edge.v")?;
                let length = parse_num(line, "edge.length", toks.get(3).copied())?;
                no_extra(line, "edge", &toks, 4)?;
                edges.push(Edge { u, v, length });
            }
            "agent" => {
                let name = toks.get(1).ok_or_else(|| field_err(line, "agent.name", "missing value"))?;
                let start = vertex(toks.get(2), "agent.start")?;
                let goal = vertex(toks.get(3), "agent.goal")?;
                no_extra(line, "agent", &toks, 4)?;
                agents.push(Agent {
                    name: name.to_string(),
                    start,
                    goal,
                });
            }
            other => return Err(field_err(line, "record", format!("unknown record {other:?}"))),
        }
    }
    let radius = radius.ok_or_else(|| ParseError::Missing("radius required".to_string()))?;
    Ok(Instance::new(vertices, edges, agents, radius))
}

pub fn save_scenario(inst: &Instance) -> String {
    let mut out = String::new();
    writeln!(out, "{SCENARIO_HEADER}").unwrap();
    writeln!(out, "radius {}", fmt_num(inst.radius())).unwrap();
    for v in inst.vertices() {
        writeln!(out, "vertex {} {} {}", v.name, fmt_num(v.at.x), fmt_num(v.at.y)).unwrap();
    }
    for e in inst.edges() {
        writeln!(
            out,
            "edge {} {} {}",
            inst.vertex_name(e.u),
            inst.vertex_name(e.v),
            fmt_num(e.length)
        )
        .unwrap();
    }
    for a in inst.agents() {
        writeln!(
            out,
            "agent {} {} {}",
            a.name,
            inst.vertex_name(a.start),
            inst.vertex_name(a.goal)
        )
        .unwrap();
    }
    out
}

/// Parses a solution against its instance. Plans may appear in any order;
/// each is completed with the implicit start wait and terminal goal wait
/// when those are omitted. Time gaps and the like are left for
/// [`crate::model::validate_solution`] to report.
pub fn load_solution(inst: &Instance, text: &str) -> Result<Solution, ParseError> {
    let mut it = lines(text);
    expect_header(&mut it, SOLUTION_HEADER)?;
    let mut plans: Vec<Option<Plan>> = vec![None; inst.agents().len()];
    let mut current: Option<(AgentId, Vec<crate::model::TimedMotion>)> = None;
    for (line, toks) in it {
        let vertex = |tok: Option<&&str>, field| -> Result<VertexId, ParseError> {
            let name = tok.ok_or_else(|| field_err(line, field, "missing value"))?;
            inst.vertex_by_name(name)
                .ok_or_else(|| field_err(line, field, format!("unknown vertex {name:?}")))
        };
        match (toks[0], current.as_mut()) {
            ("plan", None) => {
                let name = toks.get(1).ok_or_else(|| field_err(line, "plan.agent", "missing value"))?;
                no_extra(line, "plan", &toks, 2)?;
                let id = inst
                    .agent_by_name(name)
                    .ok_or_else(|| field_err(line, "plan.agent", format!("unknown agent {name:?}")))?;
                if plans[id.0].is_some() {
                    return Err(field_err(line, "plan.agent", format!("second plan for {name:?}")));
                }
                current = Some((id, Vec::new()));
            }
            ("move", Some((_, motions))) => {
                let from = vertex(toks.get(1), "move.from")?;
                let to = vertex(toks.get(2), "move.to")?;
                let start = parse_num(line, "move.start", toks.get(3).copied())?;
                no_extra(line, "move", &toks, 4)?;
                let length = inst
                    .edge_length(from, to)
                    .ok_or_else(|| field_err(line, "move", "no such edge"))?;
                motions.push(Motion::travel(from, to, length).at(start));
            }
            ("wait", Some((_, motions))) => {
                let at = vertex(toks.get(1), "wait.vertex")?;
                let start = parse_num(line, "wait.start", toks.get(2).copied())?;
                let duration = parse_extent(line, "wait.duration", toks.get(3).copied())?;
                no_extra(line, "wait", &toks, 4)?;
                motions.push(Motion::wait(at, duration).at(start));
            }
            ("end", Some(_)) => {
                no_extra(line, "end", &toks, 1)?;
                let (id, motions) = current.take().expect("inside plan");
                plans[id.0] = Some(Plan::normalized(inst, id, motions));
            }
            ("plan", Some(_)) => return Err(field_err(line, "plan", "previous plan not closed with end")),
            ("move" | "wait" | "end", None) => {
                return Err(field_err(line, "record", format!("{:?} outside a plan", toks[0])))
            }
            (other, _) => return Err(field_err(line, "record", format!("unknown record {other:?}"))),
        }
    }
    if current.is_some() {
        return Err(ParseError::Missing("last plan not closed with end".to_string()));
    }
    let plans = plans
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.ok_or_else(|| ParseError::Missing(format!("plan for agent {} required", inst.agents()[k].name))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Solution::new(plans))
}

pub fn save_solution(inst: &Instance, sol: &Solution) -> String {
    let mut out = String::new();
    writeln!(out, "{SOLUTION_HEADER}").unwrap();
    for plan in &sol.plans {
        writeln!(out, "plan {}", inst.agent(plan.agent).name).unwrap();
        for m in &plan.motions {
            if m.is_wait() {
                writeln!(
                    out,
                    "wait {} {} {}",
                    inst.vertex_name(m.motion.from),
                    fmt_num(m.start),
                    fmt_extent(m.motion.duration)
                )
                .unwrap();
            } else {
                writeln!(
                    out,
                    "move {} {} {}",
                    inst.vertex_name(m.motion.from),
                    inst.vertex_name(m.motion.to),
                    fmt_num(m.start)
                )
                .unwrap();
            }
        }
        writeln!(out, "end").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "ccbs-scenario 1\n# two vertices\nradius 0.5\nvertex A 0 0\nvertex B 3 0\nedge A B 3\nagent a1 A B\n";

    #[test]
    fn scenario_round_trip() {
        let inst = load_scenario(TINY).unwrap();
        assert_eq!(inst.vertices().len(), 2);
        let again = load_scenario(&save_scenario(&inst)).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn missing_radius() {
        let err = load_scenario("ccbs-scenario 1\nvertex A 0 0\n").unwrap_err();
        assert_eq!(err.to_string(), "radius required");
    }

    #[test]
    fn bad_field_names_line_and_field() {
        let err = load_scenario("ccbs-scenario 1\nradius 0.5\nvertex A zero 0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("line 3: vertex.x"), "{msg}");
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(4.85), "4.85");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(123456.7890123456), "123456.789012");
    }

    #[test]
    fn solution_round_trip_with_implicit_waits() {
        let inst = load_scenario(TINY).unwrap();
        let sol = load_solution(&inst, "ccbs-solution 1\nplan a1\nmove A B 1.5\nend\n").unwrap();
        assert_eq!(sol.plans[0].motions.len(), 3);
        assert_eq!(sol.sic(), 4.5);
        let text = save_solution(&inst, &sol);
        assert_eq!(load_solution(&inst, &text).unwrap(), sol);
    }

    #[test]
    fn missing_plan_is_reported() {
        let inst = load_scenario(TINY).unwrap();
        let err = load_solution(&inst, "ccbs-solution 1\n").unwrap_err();
        assert!(err.to_string().contains("a1"));
    }
}
