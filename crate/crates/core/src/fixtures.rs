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

//! Bundled scenarios used by the demos and regression tests.

use crate::model::{Instance, Solution};
use crate::scenario::{load_scenario, load_solution};

pub const FIG2: &str = include_str!("../fixtures/fig2.scn");
pub const COUNTEREXAMPLE: &str = include_str!("../fixtures/counterexample.scn");
pub const COUNTEREXAMPLE_HANDCRAFTED: &str = include_str!("../fixtures/counterexample.handcrafted.sol");

/// Two agents: a1 crosses B while a2 sits at its goal B.
pub fn fig2() -> Instance {
    load_scenario(FIG2).expect("bundled fixture parses")
}

/// Four agents around hub C where the cheapest plan set needs two early waits.
pub fn counterexample() -> Instance {
    load_scenario(COUNTEREXAMPLE).expect("bundled fixture parses")
}

pub fn counterexample_handcrafted(inst: &Instance) -> Solution {
    load_solution(inst, COUNTEREXAMPLE_HANDCRAFTED).expect("bundled fixture parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_instance, validate_solution};

    #[test]
    fn fixtures_are_valid() {
        assert!(validate_instance(&fig2()).is_empty());
        let inst = counterexample();
        assert!(validate_instance(&inst).is_empty());
        let sol = counterexample_handcrafted(&inst);
        assert!(validate_solution(&inst, &sol).unwrap().is_empty());
        assert!((sol.sic() - 32.1).abs() < 1e-9);
    }
}
