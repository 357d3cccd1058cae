//! A laboratory for random constraint satisfaction problems.
//!
//! The crate provides builders for named random CSP models, sparse instance
//! samplers, an exact solver, constraint-hypergraph analytics, audits that
//! decide whether every tree or unicyclic instance over a model's support is
//! satisfiable, forcing/percolation diagnostics for binary domain-3 models,
//! and a Monte Carlo harness for locating and classifying satisfiability
//! thresholds.

pub mod audit;
pub mod csp;
pub mod forcing;
pub mod models;
pub mod probe;
pub mod sampler;
pub mod solver;
pub mod structure;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
    pub fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
