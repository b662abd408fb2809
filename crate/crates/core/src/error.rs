use thiserror::Error;

use crate::lattice::{LatticeVariant, Vertex};

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid step ({0}, {1}): components must be in {{-1,0,1}} and not both zero")]
    InvalidStep(i8, i8),
    #[error("unsupported variant {0}: no up-step set is defined for it")]
    UnsupportedVariant(LatticeVariant),
    #[error("generation k must be at least 1")]
    ZeroGeneration,
    #[error("generation {0} exceeds the coordinate range")]
    Overflow(u64),
    #[error("index i = {i} out of range 0..={k}")]
    IndexOutOfRange { k: u64, i: u64 },
    #[error("coefficient row is empty")]
    EmptyRow,
    #[error("brute-force enumeration needs 1 <= k <= {cap}, got k = {k}")]
    BruteforceBudget { k: u64, cap: u64 },
    #[error("probability {0} outside {1}")]
    InvalidProbability(f64, &'static str),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("k = {0} must be odd")]
    EvenGeneration(u64),
    #[error("p grid must be sorted ascending")]
    UnsortedGrid,
    #[error(
        "interval [{lo}, {hi}] does not bracket target {target}: estimates {phat_lo} and {phat_hi}"
    )]
    NotBracketing {
        lo: f64,
        hi: f64,
        target: f64,
        phat_lo: f64,
        phat_hi: f64,
    },
    #[error("vertex {0} lies outside the simulation ball")]
    OutOfBall(Vertex),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
