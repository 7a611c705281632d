use thiserror::Error;

use crate::phase_log::Phase;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("event {index} at {timestamp_ms} ms precedes the previous event at {previous_ms} ms")]
    OutOfOrderEvent {
        index: usize,
        timestamp_ms: i64,
        previous_ms: i64,
    },

    #[error("ring {ring} sequence broken at event {index}: {detail}")]
    RingSequenceViolation { ring: u8, index: usize, detail: String },

    #[error("barrier identity violated in cycle starting at {cycle_start_ms} ms: {identity} off by {residual:.3} s")]
    BarrierViolation {
        cycle_start_ms: i64,
        identity: &'static str,
        residual: f64,
    },

    #[error("no cycle records in the requested stratum ({0})")]
    EmptyStratum(String),

    #[error("timing plan is infeasible: {0}")]
    InfeasiblePlan(String),

    #[error("table mixes cycle lengths {0:?}; stratify before fitting")]
    MixedStrata(Vec<f64>),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("no historical sample exceeds t = {t} s")]
    EmptyCondition { t: f64 },

    #[error("asymmetric loss weights must be positive (c1 = {c1}, c2 = {c2})")]
    NonpositiveWeight { c1: f64, c2: f64 },

    #[error("{name} = {value} is outside (0, 1)")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("no grid point has surviving evaluation samples")]
    EmptyGrid,

    #[error("at least one predictor is required")]
    NoPredictors,

    #[error("cadence {0} ms is below the 10 ms minimum")]
    InvalidCadence(u64),

    #[error("phase {phase} is not modelled for this operation")]
    UnsupportedPhase { phase: Phase },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
