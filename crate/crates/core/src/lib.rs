//! Plant digital-twin engine.
//!
//! Plants are weighted digraphs with typed nodes (SOURCE, HUB, SWITCH,
//! USER) and logical edges (SINGLE, AND, OR). The crate propagates faults,
//! measures the residual service reaching users, and searches switch
//! configurations that contain the damage.
//!
//! ```
//! use plantgraph_core::{fixtures, optimizer, FaultScenario};
//!
//! let plant = fixtures::switch_line();
//! let scenario = FaultScenario::new(&plant, &["1"]);
//! let best = optimizer::brute_force_best(&plant, &scenario, 20).unwrap();
//! assert_eq!(best[0].fitness, -25.0);
//! ```

pub mod error;
pub mod fixtures;
pub mod generator;
pub mod graph;
pub mod measures;
pub mod optimizer;
pub mod paths;
pub mod propagation;
pub mod runner;
pub mod service;
pub mod switches;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeLogic, GraphDocument, Node, NodeRole, PlantGraph};
pub use measures::MeasureSet;
pub use optimizer::{EvaluatedState, FaultScenario, FitnessWeights, GaParams};
pub use paths::{Algorithm, DistanceMatrix};
pub use propagation::{propagate, PropagationResult, StepEvent};
pub use runner::{run_scenario, DiagnosisReport, RunConfig, RunMode};
pub use service::{compute_service, ServiceReport};
pub use switches::{n_actions, SwitchState};
