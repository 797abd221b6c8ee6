//! Experiment orchestration for the regem clustering library:
//! configuration parsing, seeded Monte-Carlo runners, CSV emission.

pub mod config;
pub mod csvout;
pub mod experiments;
