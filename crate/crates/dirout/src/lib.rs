//! File formats, experiment runner and diagnostics around `dirout-core`.
//!
//! Curves are exchanged as long-format CSV (`curve_id,group,t,c1,…,cp`),
//! experiments are described by a JSON [`experiment::ExperimentSpec`], and
//! the `dirout` binary exposes `simulate`, `bench`, `classify` and
//! `diagnose` subcommands on top of these.

pub mod diagnostics;
pub mod experiment;
pub mod io;

pub use dirout_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] dirout_core::Error),
    #[error("line {line}: {message}")]
    Format { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Stream(#[from] std::io::Error),
    #[error("cannot access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid experiment: {0}")]
    Spec(String),
    #[error("replicate {replicate} failed")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
