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

use ccbs_core::ccbs::*;
use ccbs_core::constraints::{satisfies_all, DeltaRule};
use ccbs_core::fixtures;
use ccbs_core::model::validate_solution;
use common::*;

#[test]
fn discrete_search_matches_exhaustive_oracle() {
    let mut solved = 0;
    for seed in 0..24 {
        let check = dt_versus_oracle(seed).unwrap();
        assert!(check.agrees(), "seed {seed}: {check:?}");
        if check.solver.is_some() {
            solved += 1;
        }
    }
    assert!(solved >= 20);
}

#[test]
fn solved_nodes_satisfy_their_constraint_path() {
    let inst = fixtures::counterexample();
    for mode in [Mode::VertexRange, Mode::Discrete { unit: 1.0 }] {
        let out = solve(&inst, &SolveOptions::new(mode, Budget::expansions(20_000))).unwrap();
        let Status::Solved { solution, g, path } = out.status else {
            panic!("{mode} did not solve");
        };
        assert!(validate_solution(&inst, &solution).unwrap().is_empty());
        assert!((solution.sic() - g).abs() < 1e-9);
        assert!(!path.is_empty());
        for p in &solution.plans {
            let mine: Vec<_> = path.iter().copied().filter(|k| k.agent() == p.agent).collect();
            assert!(satisfies_all(p, &mine), "{mode}");
        }
        assert!(out.stats.lower_bounds.windows(2).all(|w| w[1] >= w[0] - MONOTONICITY_TOL));
    }
}

#[test]
fn repeated_runs_are_identical() {
    let inst = fixtures::counterexample();
    let run = || {
        let mut o = SolveOptions::new(Mode::VertexRange, Budget::expansions(20_000));
        o.dump = true;
        solve(&inst, &o).unwrap()
    };
    assert_eq!(run(), run());
    let fig2 = fixtures::fig2();
    let shifting = || {
        let mut o = SolveOptions::new(Mode::Shifting(DeltaRule::Half), Budget::expansions(300));
        o.audit = true;
        solve(&fig2, &o).unwrap()
    };
    assert_eq!(shifting(), shifting());
}
