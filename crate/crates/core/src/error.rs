use thiserror::Error;

use crate::params::WaveIndex;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index ({j}, {k}, {l}) is not in the wavenumber lattice")]
    OutOfLattice { j: i64, k: i64, l: i64 },

    #[error("index {index} is in {found:?}, expected {expected}")]
    WrongClass {
        index: WaveIndex,
        found: crate::params::LatticeClass,
        expected: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cubic root refinement did not converge: {0}")]
    NonConvergence(String),

    #[error("eigenvector formula is singular at beta = {re} + {im}i (shift denominator vanishes)")]
    SingularShift { re: f64, im: f64 },

    #[error("lattice minimizer {index} touches the truncation boundary; enlarge jmax/kmax")]
    TruncationTooSmall { index: WaveIndex },

    #[error("oscillatory onset requires sigma < 1, got sigma = {0}")]
    SigmaOutOfRange(f64),

    #[error("cubic coefficient delta = {0} is not negative")]
    PositiveDelta(f64),

    #[error("simulation blew up at t = {t}: max |field| = {max_abs}")]
    BlowUp { t: f64, max_abs: f64 },

    #[error("need at least 5 zero crossings to estimate a period, found {0}")]
    InsufficientOscillations(usize),

    #[error("unknown {kind} '{name}'; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
