//! Command line and HTTP front ends for `plantgraph-core`.
//!
//! Both front ends go through [`gateway`], so the same request produces the
//! same report bytes whether it arrives as flags or as a JSON body.

pub mod cli;
pub mod gateway;
pub mod server;
