use std::path::PathBuf;

use thiserror::Error;

use crate::game::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid game ({} violation(s)): {}", .0.len(), summarize(.0))]
    InvalidGame(Vec<Violation>),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear solve failed for {what} (residual {residual:e})")]
    LinearSolve { what: &'static str, residual: f64 },

    #[error("occupancy identity violated for player {player}: bellman {bellman}, occupancy {occupancy}")]
    IdentityCheck {
        player: usize,
        bellman: f64,
        occupancy: f64,
    },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("game is not two-player zero-sum (max |r1 + r2| = {max_violation:e})")]
    NotZeroSum { max_violation: f64 },

    #[error("negative nash gap {gap:e} for player {player}; best response is not optimal")]
    NegativeGap { player: usize, gap: f64 },

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("empty sample list")]
    EmptySamples,

    #[error("support recovery produced an empty support for player {player}")]
    EmptySupport { player: usize },

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", .path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

fn summarize(v: &[Violation]) -> String {
    let mut parts: Vec<String> = v.iter().take(3).map(|x| x.to_string()).collect();
    if v.len() > 3 {
        parts.push(format!("... and {} more", v.len() - 3));
    }
    parts.join("; ")
}
