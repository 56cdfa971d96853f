//! Scenario runner for the Signorini finite-element lab.
//!
//! Scenarios are JSON documents ([`config::ScenarioConfig`]). [`pipeline::run`]
//! meshes, assembles, solves (with α-continuation for pure Signorini layouts),
//! certifies barriers and extracts the coincidence set, producing a
//! [`report::RunReport`]. [`plot`] turns reports into CSV series and [`io`]
//! writes meshes, matrices and gap tables.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};

pub mod config;
pub mod exact;
pub mod io;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod scenarios;

pub use config::ScenarioConfig;
pub use pipeline::{run, run_batch, Overrides};
pub use report::RunReport;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] signorini_core::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("plot {kind}: {msg}")]
    Plot { kind: String, msg: String },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        LabError::Io { path: path.to_path_buf(), source }
    }
}

/// Process exit codes of the command-line front end.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const ERROR: i32 = 1;
    pub const FAILED: i32 = 2;
}
