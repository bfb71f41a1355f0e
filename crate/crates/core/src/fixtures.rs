//! Reference plants shipped with the crate.
//!
//! * `toy`: two sources (1 with service 1, 15 with service 2) feeding user 18,
//!   with switches 2 and 3 on node 1's outgoing routes.
//! * `switch_line`: a 25-node backbone `1 S1 2 S2 ... S8 9` linked in both
//!   directions, sources A, B and C attached to nodes 1, 5 and 7, and
//!   passive-resistant users 10 to 14 tapping nodes 1, 4, 6, 8 and 9.

use crate::graph::PlantGraph;

pub const TOY_JSON: &str = include_str!("../fixtures/fixture_t.json");
pub const SWITCH_LINE_JSON: &str = include_str!("../fixtures/fixture_l.json");

pub fn toy() -> PlantGraph {
    PlantGraph::load(TOY_JSON).expect("toy fixture is valid")
}

pub fn switch_line() -> PlantGraph {
    PlantGraph::load(SWITCH_LINE_JSON).expect("switch-line fixture is valid")
}
