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

//! Seeded random scenarios: grid-placed vertices joined by a random
//! spanning tree plus a few chords, agents on distinct starts and goals.

use crate::{EXIT_ERROR, EXIT_SOLVED};
use ccbs_core::geometry::Coordinate;
use ccbs_core::model::{Agent, Edge, Instance, Vertex, VertexId};
use ccbs_core::scenario::save_scenario;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid spacing; vertices never overlap for radii below half of it.
const SPACING: f64 = 1.5;

pub fn scenario(seed: u64, vertices: usize, agents: usize, radius: f64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = ((2 * vertices) as f64).sqrt().ceil() as i32;
    let mut cells: Vec<(i32, i32)> = (0..side).flat_map(|x| (0..side).map(move |y| (x, y))).collect();
    cells.shuffle(&mut rng);
    let verts: Vec<Vertex> = cells[..vertices]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Vertex {
            name: format!("v{i}"),
            at: Coordinate::new(x as f64 * SPACING, y as f64 * SPACING),
        })
        .collect();
    let mut pairs: Vec<(usize, usize)> = (1..vertices).map(|i| (rng.gen_range(0..i), i)).collect();
    for _ in 0..vertices / 2 {
        let (a, b) = (rng.gen_range(0..vertices), rng.gen_range(0..vertices));
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
            length: verts[a].at.distance(&verts[b].at),
        })
        .collect();
    let mut starts: Vec<usize> = (0..vertices).collect();
    let mut goals = starts.clone();
    starts.shuffle(&mut rng);
    goals.shuffle(&mut rng);
    let agents = (0..agents)
        .map(|i| Agent {
            name: format!("a{i}"),
            start: VertexId(starts[i]),
            goal: VertexId(goals[i]),
        })
        .collect();
    Instance::new(verts, edges, agents, radius)
}

pub fn run(seed: u64, vertices: usize, agents: usize, radius: f64) -> u8 {
    if vertices < 2 || agents == 0 || agents > vertices {
        eprintln!("error: need at least 2 vertices and between 1 and {vertices} agents");
        return EXIT_ERROR;
    }
    if !(radius > 0.0 && radius < 0.5 * SPACING) {
        eprintln!("error: --radius must lie in (0, {})", 0.5 * SPACING);
        return EXIT_ERROR;
    }
    print!("{}", save_scenario(&scenario(seed, vertices, agents, radius)));
    EXIT_SOLVED
}
