//! Signal phase and timing prediction for actuated traffic signals.
//!
//! Cycles are logged per intersection, split into strata by cycle length,
//! and turned into empirical distributions of phase durations. Predictions
//! condition those distributions on the time a phase has already been green.

pub mod dist;
pub mod error;
pub mod evaluator;
pub mod phase_log;
pub mod predictor;
pub mod sim;
pub mod spat;

pub use dist::{condition_joint_gt_d4, Bin, EmpiricalDist, JointSamples, Provenance, Quantity};
pub use error::{Error, Result};
pub use evaluator::{
    compare, error_curve, loss_curve, mae_curve, mse_curve, windowed_day_curve, write_plot_data, Comparison,
    Conditioning, CurvePoint, ErrorCurve, EvalConfig, EvalSample, EvalSet, Metric, Predictor, Training,
};
pub use phase_log::{
    emit_events, ingest_events, quantize, read_events_csv, stratum_key, write_events_csv, BarrierResiduals,
    CycleRecord, CycleTable, EventKind, Phase, PhaseEndTimes, PhaseEvent, Ring, DEFAULT_TOLERANCE_S, MS_PER_DAY,
    WINDOW_PRESETS,
};
pub use predictor::{
    predict, predict_asymmetric, predict_confidence, predict_expectation, predict_or_hold, predict_schedule,
    predict_sum_approach1, predict_sum_approach2, Method, PhaseState, Prediction, RingModel, Schedule, StratumModel,
    Transition, DEFAULT_HOLD_S,
};
pub use sim::{simulate, DailyProfile, DemandProfile, SimConfig, Simulator, TimingPlan};
pub use spat::{
    compose, stream, MessageContext, MessageStream, ModelSet, ModelSource, SpatMessage, Speed, StreamConfig,
    StreamSummary, Tick, MIN_CADENCE_MS,
};
