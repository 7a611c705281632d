//! Residual phase-time predictors.
//!
//! Every predictor conditions the empirical distribution on what the
//! controller already knows (the phase is still green at `t`) and then picks
//! a point under some loss:
//!
//! * squared loss: the conditional mean,
//! * confidence level `alpha`: the largest duration reached with probability
//!   at least `alpha`,
//! * asymmetric linear loss (`c1` per second of underestimate, `c2` per second
//!   of overestimate): the `c1 / (c1 + c2)` conditional quantile.
//!
//! The residual is `predicted_duration - t`. It need not shrink as `t`
//! grows: once `t` passes an atom of the distribution the conditional mean
//! jumps to the next mode.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dist::{single_stratum, EmpiricalDist, JointSamples, Quantity};
use crate::error::{check_probability, Error, Result};
use crate::phase_log::{CycleTable, Phase, Ring};

/// Extra time granted to a phase that has outlived every historical sample.
pub const DEFAULT_HOLD_S: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Expectation,
    Confidence(f64),
    Asymmetric { c1: f64, c2: f64 },
}

impl Method {
    pub const MEDIAN: Method = Method::Asymmetric { c1: 1.0, c2: 1.0 };

    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::Expectation => Ok(()),
            Method::Confidence(alpha) => check_probability("alpha", alpha),
            Method::Asymmetric { c1, c2 } => {
                if c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite() {
                    Ok(())
                } else {
                    Err(Error::NonpositiveWeight { c1, c2 })
                }
            }
        }
    }

    /// Point prediction from an already-conditioned distribution.
    pub fn apply(&self, dist: &EmpiricalDist) -> Result<f64> {
        match *self {
            Method::Expectation => Ok(dist.mean()),
            Method::Confidence(alpha) => dist.upper_quantile(alpha),
            Method::Asymmetric { c1, c2 } => {
                self.validate()?;
                dist.lower_quantile(c1 / (c1 + c2))
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Expectation => f.write_str("expectation"),
            Method::Confidence(a) => write!(f, "confidence:{a}"),
            Method::Asymmetric { c1, c2 } => write!(f, "asymmetric:{c1}:{c2}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// `expectation`, `median`, `confidence:<alpha>`, `asymmetric:<c1>:<c2>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("'{v}' is not a number in method '{s}'")))
        };
        let method = match parts.as_slice() {
            ["expectation"] | ["mean"] => Method::Expectation,
            ["median"] => Method::MEDIAN,
            ["confidence", a] => Method::Confidence(num(a)?),
            ["asymmetric", c1, c2] => Method::Asymmetric {
                c1: num(c1)?,
                c2: num(c2)?,
            },
            _ => return Err(Error::InvalidArgument(format!("unknown method '{s}'"))),
        };
        method.validate()?;
        Ok(method)
    }
}

impl Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub made_at: f64,
    #[serde(serialize_with = "serialize_quantity")]
    pub quantity: Option<Quantity>,
    pub method: Method,
    pub predicted_duration: f64,
    pub residual: f64,
    /// Zero only for degraded (hold) predictions.
    pub n_conditioning_samples: u64,
    pub degraded: bool,
}

fn serialize_quantity<S: serde::Serializer>(q: &Option<Quantity>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.collect_str(q),
        None => s.serialize_none(),
    }
}

impl Prediction {
    fn from_conditioned(conditioned: &EmpiricalDist, t: f64, method: Method) -> Result<Prediction> {
        let predicted_duration = method.apply(conditioned)?;
        Ok(Prediction {
            made_at: t,
            quantity: conditioned.quantity,
            method,
            predicted_duration,
            residual: predicted_duration - t,
            n_conditioning_samples: conditioned.len(),
            degraded: false,
        })
    }

    /// The phase has outlived its history: report it ending `hold` seconds
    /// from now.
    pub fn hold(t: f64, method: Method, quantity: Option<Quantity>, hold: f64) -> Prediction {
        Prediction {
            made_at: t,
            quantity,
            method,
            predicted_duration: t + hold,
            residual: hold,
            n_conditioning_samples: 0,
            degraded: true,
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "elapsed time must be non-negative, got {t}"
        )))
    }
}

/// Conditions `dist` on `X > t` and applies `method`.
pub fn predict(dist: &EmpiricalDist, t: f64, method: Method) -> Result<Prediction> {
    check_time(t)?;
    method.validate()?;
    Prediction::from_conditioned(&dist.condition_gt(t)?, t, method)
}

/// Like [`predict`], but answers an empty condition with a degraded hold
/// prediction instead of an error.
pub fn predict_or_hold(dist: &EmpiricalDist, t: f64, method: Method, hold: f64) -> Result<Prediction> {
    match predict(dist, t, method) {
        Err(Error::EmptyCondition { .. }) => Ok(Prediction::hold(t, method, dist.quantity, hold)),
        other => other,
    }
}

/// `E[d | d > t]`.
pub fn predict_expectation(dist: &EmpiricalDist, t: f64) -> Result<Prediction> {
    predict(dist, t, Method::Expectation)
}

pub fn predict_confidence(dist: &EmpiricalDist, t: f64, alpha: f64) -> Result<Prediction> {
    predict(dist, t, Method::Confidence(alpha))
}

pub fn predict_asymmetric(dist: &EmpiricalDist, t: f64, c1: f64, c2: f64) -> Result<Prediction> {
    predict(dist, t, Method::Asymmetric { c1, c2 })
}

/// Phase-sum prediction treating `d4 + d1` as one variable: condition the
/// per-cycle sums on `d4 + d1 > t`.
pub fn predict_sum_approach1(dist_sum: &EmpiricalDist, t: f64, method: Method) -> Result<Prediction> {
    predict(dist_sum, t, method)
}

/// Phase-sum prediction on the joint `(d4, d1)` samples: condition on the
/// event actually observed while `p4` is green, `d4 > t`.
pub fn predict_sum_approach2(joint: &JointSamples, t: f64, method: Method) -> Result<Prediction> {
    check_time(t)?;
    method.validate()?;
    let mut conditioned = joint.condition_lead_gt(t)?;
    conditioned.quantity = Some(Quantity::D4_PLUS_D1);
    Prediction::from_conditioned(&conditioned, t, method)
}

/// Fitted distributions for one ring in one stratum.
#[derive(Debug, Clone)]
pub struct RingModel {
    pub ring: Ring,
    /// Cross-street phase (`d4` / `d8`).
    pub lead: EmpiricalDist,
    /// Left-turn phase (`d1` / `d5`).
    pub left: EmpiricalDist,
    /// Per-cycle `lead + left`.
    pub lead_plus_left: EmpiricalDist,
    pub joint: JointSamples,
}

impl RingModel {
    pub fn fit(table: &CycleTable, ring: Ring) -> Result<Self> {
        let [lead, left, _] = ring.sequence();
        Ok(RingModel {
            ring,
            lead: EmpiricalDist::fit(table, Quantity::Duration(lead))?,
            left: EmpiricalDist::fit(table, Quantity::Duration(left))?,
            lead_plus_left: EmpiricalDist::fit(table, Quantity::LeadPlusLeft(ring))?,
            joint: JointSamples::fit(table, ring)?,
        })
    }
}

/// Everything the engine needs to predict within one cycle-length stratum.
#[derive(Debug, Clone)]
pub struct StratumModel {
    pub cycle_length: f64,
    pub rings: [RingModel; 2],
}

impl StratumModel {
    pub fn fit(table: &CycleTable) -> Result<Self> {
        let cycle_length = single_stratum(table)?;
        Ok(StratumModel {
            cycle_length,
            rings: [RingModel::fit(table, Ring::One)?, RingModel::fit(table, Ring::Two)?],
        })
    }

    pub fn ring(&self, ring: Ring) -> &RingModel {
        match ring {
            Ring::One => &self.rings[0],
            Ring::Two => &self.rings[1],
        }
    }
}

/// Where the controller is right now, all in seconds from the cycle start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub phase: Phase,
    /// When the active phase turned green.
    pub start: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(phase: Phase, start: f64, t: f64) -> Result<Self> {
        check_time(start)?;
        check_time(t)?;
        if t < start {
            return Err(Error::InvalidArgument(format!(
                "t = {t} precedes the phase start {start}"
            )));
        }
        if phase.slot() == 0 && start != 0.0 {
            return Err(Error::InvalidArgument(format!("{phase} always starts the cycle")));
        }
        Ok(PhaseState { phase, start, t })
    }

    pub fn elapsed(&self) -> f64 {
        self.t - self.start
    }
}

/// Predicted end of one phase, in seconds from the start of the current cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub phase: Phase,
    pub cycle_offset: u32,
    pub time: f64,
    pub degraded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule {
    pub transitions: Vec<Transition>,
    /// When the active phase next turns green.
    pub next_start: f64,
}

/// Predicted phase end times for the rest of the current cycle and
/// `horizon_cycles - 1` further cycles.
///
/// Within the current cycle predictions are conditioned on the elapsed time.
/// Later cycles use unconditional means laid end to end at multiples of `L`.
pub fn predict_schedule(model: &StratumModel, state: PhaseState, horizon_cycles: u32, hold: f64) -> Result<Schedule> {
    if horizon_cycles == 0 {
        return Err(Error::InvalidArgument("horizon must be at least one cycle".into()));
    }
    let ring = state.phase.ring();
    let rm = model.ring(ring);
    let [lead, left, coord] = ring.sequence();
    let l = model.cycle_length;
    let t = state.t;
    let mut transitions = Vec::new();
    let push = |v: &mut Vec<Transition>, phase, time, degraded| {
        v.push(Transition {
            phase,
            cycle_offset: 0,
            time,
            degraded,
        })
    };

    let left_end = match state.phase.slot() {
        0 => {
            let p = predict_or_hold(&rm.lead, t, Method::Expectation, hold)?;
            push(&mut transitions, lead, p.predicted_duration, p.degraded);
            let (sum_end, degraded) = match predict_sum_approach2(&rm.joint, t, Method::Expectation) {
                Ok(s) => (s.predicted_duration, false),
                Err(Error::EmptyCondition { .. }) => (p.predicted_duration + rm.left.mean(), true),
                Err(e) => return Err(e),
            };
            let end = sum_end.max(p.predicted_duration);
            push(&mut transitions, left, end, degraded);
            Some(end)
        }
        1 => {
            let p = predict_or_hold(&rm.left, state.elapsed(), Method::Expectation, hold)?;
            let end = state.start + p.predicted_duration;
            push(&mut transitions, left, end, p.degraded);
            Some(end)
        }
        _ => None,
    };
    let cycle_end = match left_end {
        Some(end) if end >= l => end + hold,
        _ if t >= l => t + hold,
        _ => l,
    };
    push(&mut transitions, coord, cycle_end, cycle_end != l);

    let mean_lead = rm.lead.mean();
    let mean_sum = rm.lead_plus_left.mean();
    for k in 1..horizon_cycles {
        let cycle_start = cycle_end + f64::from(k - 1) * l;
        for (phase, offset) in [(lead, mean_lead), (left, mean_sum), (coord, l)] {
            transitions.push(Transition {
                phase,
                cycle_offset: k,
                time: cycle_start + offset,
                degraded: false,
            });
        }
    }
    let next_start = cycle_end
        + match state.phase.slot() {
            0 => 0.0,
            1 => mean_lead,
            _ => mean_sum,
        };
    Ok(Schedule {
        transitions,
        next_start,
    })
}
