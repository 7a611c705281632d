//! Prediction-error curves as a function of elapsed time.
//!
//! At each grid time `t` the error is averaged over exactly the evaluation
//! cycles whose phase is still green at `t`. Training and evaluation may be
//! the same cycles (in-sample, optionally leave-one-out) or disjoint ones.

use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dist::{EmpiricalDist, Quantity};
use crate::error::{Error, Result};
use crate::phase_log::{CycleTable, Ring};
use crate::predictor::{Method, DEFAULT_HOLD_S};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Mae,
    Mse,
    /// Asymmetric linear loss: `c1` per second under, `c2` per second over.
    Loss {
        c1: f64,
        c2: f64,
    },
}

impl Metric {
    /// Loss of predicting `predicted` when the phase actually lasted `actual`.
    pub fn loss(&self, predicted: f64, actual: f64) -> f64 {
        let y = predicted - actual;
        match *self {
            Metric::Mae => y.abs(),
            Metric::Mse => y * y,
            Metric::Loss { c1, c2 } => {
                if y < 0.0 {
                    -c1 * y
                } else {
                    c2 * y
                }
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Mae => f.write_str("mae"),
            Metric::Mse => f.write_str("mse"),
            Metric::Loss { c1, c2 } => write!(f, "loss:{c1}:{c2}"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["mae"] => Ok(Metric::Mae),
            ["mse"] => Ok(Metric::Mse),
            ["loss", c1, c2] => {
                let c1: f64 = c1
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad c1 in '{s}'")))?;
                let c2: f64 = c2
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad c2 in '{s}'")))?;
                if !(c1 > 0.0 && c2 > 0.0) {
                    return Err(Error::NonpositiveWeight { c1, c2 });
                }
                Ok(Metric::Loss { c1, c2 })
            }
            _ => Err(Error::InvalidArgument(format!("unknown metric '{s}'"))),
        }
    }
}

/// One evaluation cycle: the value the live phase is conditioned on and the
/// value being predicted. For a single phase both are its duration; for
/// `d4 + d1` while `p4` is green the condition is `d4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSample {
    pub condition: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSet {
    pub quantity: Quantity,
    samples: Vec<EvalSample>,
}

impl EvalSet {
    /// Samples of one quantity, conditioned on itself.
    pub fn scalar(table: &CycleTable, quantity: Quantity) -> Self {
        EvalSet {
            quantity,
            samples: table
                .records()
                .iter()
                .map(|r| {
                    let v = quantity.value(r);
                    EvalSample {
                        condition: v,
                        target: v,
                    }
                })
                .collect(),
        }
    }

    /// `lead + left` targets conditioned on the lead phase (`d4`/`d8`).
    pub fn phase_sum(table: &CycleTable, ring: Ring) -> Self {
        EvalSet {
            quantity: Quantity::LeadPlusLeft(ring),
            samples: table
                .records()
                .iter()
                .map(|r| {
                    let [lead, left, _] = r.ring_durations(ring);
                    EvalSample {
                        condition: lead,
                        target: lead + left,
                    }
                })
                .collect(),
        }
    }

    pub fn from_samples(quantity: Quantity, samples: Vec<EvalSample>) -> Self {
        EvalSet { quantity, samples }
    }

    pub fn samples(&self) -> &[EvalSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Which event a predictor conditions its training data on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conditioning {
    /// `target > t`: the scalar predictors, and sum prediction treating the
    /// sum as one variable.
    Target,
    /// `condition > t`: the event actually observed, using joint samples.
    Observed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Predictor {
    pub name: String,
    pub method: Method,
    pub conditioning: Conditioning,
}

impl Predictor {
    pub fn new(method: Method) -> Self {
        Predictor {
            name: method.to_string(),
            method,
            conditioning: Conditioning::Target,
        }
    }

    pub fn on_observed(method: Method) -> Self {
        Predictor {
            name: format!("{method}/joint"),
            method,
            conditioning: Conditioning::Observed,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn admits(&self, s: &EvalSample, t: f64) -> bool {
        match self.conditioning {
            Conditioning::Target => s.target > t,
            Conditioning::Observed => s.condition > t,
        }
    }

    /// Training targets that survive the conditioning event at `t`.
    pub fn conditioned(&self, train: &EvalSet, t: f64) -> Result<EmpiricalDist> {
        let survivors: Vec<f64> = train
            .samples
            .iter()
            .filter(|s| self.admits(s, t))
            .map(|s| s.target)
            .collect();
        if survivors.is_empty() {
            return Err(Error::EmptyCondition { t });
        }
        EmpiricalDist::from_samples(survivors)
    }

    pub fn predict(&self, train: &EvalSet, t: f64) -> Result<f64> {
        self.method.apply(&self.conditioned(train, t)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Training<'a> {
    /// Predict with the evaluation cycles themselves.
    InSample {
        leave_one_out: bool,
    },
    Holdout(&'a EvalSet),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    /// Grid spacing in seconds; at least 0.1.
    pub step: f64,
    pub hold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            step: 1.0,
            hold: DEFAULT_HOLD_S,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: f64,
    pub value: f64,
    /// Evaluation cycles still green at `t`.
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub predictor: String,
    pub metric: Metric,
    pub points: Vec<CurvePoint>,
}

impl ErrorCurve {
    pub fn at(&self, t: f64) -> Option<&CurvePoint> {
        self.points.iter().find(|p| p.t == t)
    }

    pub fn first(&self) -> &CurvePoint {
        &self.points[0]
    }

    pub fn last(&self) -> &CurvePoint {
        self.points.last().unwrap()
    }

    /// Loss averaged over every (cycle, grid time) pair the curve covers.
    pub fn pooled(&self) -> f64 {
        let (sum, n) = self
            .points
            .iter()
            .fold((0.0, 0usize), |(s, n), p| (s + p.value * p.n as f64, n + p.n));
        sum / n as f64
    }
}

fn grid(eval: &EvalSet, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step < 0.1 - 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "grid step must be at least 0.1 s, got {step}"
        )));
    }
    let max = eval
        .samples
        .iter()
        .map(|s| s.condition)
        .fold(f64::NEG_INFINITY, f64::max);
    if max.is_nan() || max <= 0.0 {
        return Err(Error::EmptyGrid);
    }
    let mut ts = Vec::new();
    let mut k = 0u64;
    loop {
        let t = k as f64 * step;
        if t >= max {
            break;
        }
        ts.push(t);
        k += 1;
    }
    Ok(ts)
}

fn point(
    predictor: &Predictor,
    metric: Metric,
    training: Training<'_>,
    eval: &EvalSet,
    t: f64,
    hold: f64,
) -> Result<CurvePoint> {
    let survivors: Vec<&EvalSample> = eval.samples.iter().filter(|s| s.condition > t).collect();
    let n = survivors.len();
    let or_hold = |r: Result<f64>| match r {
        Err(Error::EmptyCondition { .. }) => Ok(t + hold),
        other => other,
    };
    let total: f64 = match training {
        Training::Holdout(train) => {
            let x = or_hold(predictor.predict(train, t))?;
            survivors.iter().map(|s| metric.loss(x, s.target)).sum()
        }
        Training::InSample { leave_one_out: false } => {
            let x = or_hold(predictor.predict(eval, t))?;
            survivors.iter().map(|s| metric.loss(x, s.target)).sum()
        }
        Training::InSample { leave_one_out: true } => {
            let full = match predictor.conditioned(eval, t) {
                Ok(d) => Some(d),
                Err(Error::EmptyCondition { .. }) => None,
                Err(e) => return Err(e),
            };
            // The held-out prediction depends only on the left-out target
            // and whether it was in the conditioning set.
            let mut cache: Vec<(f64, bool, f64)> = Vec::new();
            let mut total = 0.0;
            for s in &survivors {
                let admitted = predictor.admits(s, t);
                let x = match cache.iter().find(|(v, a, _)| *v == s.target && *a == admitted) {
                    Some(&(_, _, x)) => x,
                    None => {
                        let x = match &full {
                            Some(d) if admitted => match d.without_one(s.target) {
                                Some(rest) => predictor.method.apply(&rest)?,
                                None => t + hold,
                            },
                            Some(d) => predictor.method.apply(d)?,
                            None => t + hold,
                        };
                        cache.push((s.target, admitted, x));
                        x
                    }
                };
                total += metric.loss(x, s.target);
            }
            total
        }
    };
    Ok(CurvePoint {
        t,
        value: total / n as f64,
        n,
    })
}

/// Error of `predictor` under `metric` at every grid time with survivors.
pub fn error_curve(
    predictor: &Predictor,
    metric: Metric,
    training: Training<'_>,
    eval: &EvalSet,
    cfg: &EvalConfig,
) -> Result<ErrorCurve> {
    predictor.method.validate()?;
    let ts = grid(eval, cfg.step)?;
    let points = ts
        .par_iter()
        .map(|&t| point(predictor, metric, training, eval, t, cfg.hold))
        .collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(ErrorCurve {
        predictor: predictor.name.clone(),
        metric,
        points,
    })
}

pub fn mae_curve(
    predictor: &Predictor,
    training: Training<'_>,
    eval: &EvalSet,
    cfg: &EvalConfig,
) -> Result<ErrorCurve> {
    error_curve(predictor, Metric::Mae, training, eval, cfg)
}

pub fn mse_curve(
    predictor: &Predictor,
    training: Training<'_>,
    eval: &EvalSet,
    cfg: &EvalConfig,
) -> Result<ErrorCurve> {
    error_curve(predictor, Metric::Mse, training, eval, cfg)
}

pub fn loss_curve(
    predictor: &Predictor,
    training: Training<'_>,
    eval: &EvalSet,
    cfg: &EvalConfig,
    c1: f64,
    c2: f64,
) -> Result<ErrorCurve> {
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::NonpositiveWeight { c1, c2 });
    }
    error_curve(predictor, Metric::Loss { c1, c2 }, training, eval, cfg)
}

/// Error curves for several predictors and metrics over the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub curves: Vec<ErrorCurve>,
}

impl Comparison {
    pub fn curve(&self, predictor: &str, metric: Metric) -> Option<&ErrorCurve> {
        self.curves
            .iter()
            .find(|c| c.predictor == predictor && c.metric == metric)
    }

    /// Long-format CSV: `t,predictor,metric,value,n`, one row per grid time,
    /// predictor and metric, ordered by `t`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "predictor", "metric", "value", "n"])?;
        let n_points = self.curves.first().map_or(0, |c| c.points.len());
        for i in 0..n_points {
            for c in &self.curves {
                let p = &c.points[i];
                w.write_record([
                    format!("{:.2}", p.t),
                    c.predictor.clone(),
                    c.metric.to_string(),
                    format!("{:.6}", p.value),
                    p.n.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

pub fn compare(
    predictors: &[Predictor],
    metrics: &[Metric],
    training: Training<'_>,
    eval: &EvalSet,
    cfg: &EvalConfig,
) -> Result<Comparison> {
    if predictors.is_empty() {
        return Err(Error::NoPredictors);
    }
    if metrics.is_empty() {
        return Err(Error::InvalidArgument("at least one metric is required".into()));
    }
    let mut curves = Vec::with_capacity(predictors.len() * metrics.len());
    for p in predictors {
        for &m in metrics {
            curves.push(error_curve(p, m, training, eval, cfg)?);
        }
    }
    Ok(Comparison { curves })
}

/// Error on `target_day` of a predictor trained on the `delta_days` days
/// before it. Days are those of [`CycleTable::window`].
pub fn windowed_day_curve(
    history: &CycleTable,
    quantity: Quantity,
    target_day: i64,
    delta_days: u32,
    predictor: &Predictor,
    metric: Metric,
    cfg: &EvalConfig,
) -> Result<ErrorCurve> {
    let train = EvalSet::scalar(&history.window(target_day, delta_days)?, quantity);
    let day = history.days(target_day..target_day + 1);
    if day.is_empty() {
        return Err(Error::EmptyStratum(format!("no cycles on day {target_day}")));
    }
    let eval = EvalSet::scalar(&day, quantity);
    error_curve(predictor, metric, Training::Holdout(&train), &eval, cfg)
}

/// Binned pdf/cdf of a fitted distribution: `lower,upper,probability,cdf`.
pub fn write_plot_data<W: io::Write>(dist: &EmpiricalDist, bin_width: f64, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["lower", "upper", "probability", "cdf"])?;
    for b in dist.binned(bin_width)? {
        w.write_record([
            format!("{:.2}", b.lower),
            format!("{:.2}", b.upper),
            format!("{:.6}", b.probability),
            format!("{:.6}", b.cdf),
        ])?;
    }
    w.flush()?;
    Ok(())
}
