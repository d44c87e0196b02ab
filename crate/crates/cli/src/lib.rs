//! Batch front end for the gallerist engine: index a museum, answer query
//! folders, score results and artifacts, cluster, and generate synthetic
//! datasets.

pub mod cli;
pub mod commands;
pub mod config;
pub mod results;
pub mod truth;

pub use cli::{run, Cli, Status};
