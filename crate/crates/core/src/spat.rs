//! SPaT message composition and NDJSON streaming.
//!
//! One message per active phase per tick. All times are seconds from the
//! start of the current cycle.
//!
//! ## NDJSON schema
//!
//! Fields appear in this order on every line; seconds carry two decimals.
//!
//! | field              | meaning                                          |
//! |--------------------|--------------------------------------------------|
//! | `ts_ms`            | wall-clock time of the tick, ms since epoch      |
//! | `site_id`          | intersection identifier                          |
//! | `cycle`            | cycle index from the source table                |
//! | `phase`            | `p1` .. `p8`                                     |
//! | `startTime`        | when the phase turned green                      |
//! | `minEndTime`       | earliest end consistent with history             |
//! | `maxEndTime`       | latest end seen in history                       |
//! | `likelyTime`       | conditional expected end                         |
//! | `confidence_alpha` | confidence level                                 |
//! | `confidence_value` | end time reached with probability `alpha`        |
//! | `nextTime`         | when the phase next turns green                  |
//! | `made_at`          | tick time within the cycle                       |
//! | `degraded`         | `true` when the phase outlived its history       |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{check_probability, Error, Result};
use crate::phase_log::{seconds_to_ms, stratum_key, CycleRecord, CycleTable, Ring};
use crate::predictor::{predict_schedule, PhaseState, StratumModel, DEFAULT_HOLD_S};
use crate::Phase;

pub const MIN_CADENCE_MS: u64 = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpatMessage {
    pub ts_ms: i64,
    pub site_id: String,
    pub cycle: u64,
    pub phase: Phase,
    pub start_time: f64,
    pub min_end_time: f64,
    pub max_end_time: f64,
    pub likely_time: f64,
    pub confidence_alpha: f64,
    pub confidence_value: f64,
    pub next_time: f64,
    pub made_at: f64,
    pub degraded: bool,
}

impl SpatMessage {
    /// Ordering invariants every broadcast message must satisfy.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.start_time > self.min_end_time {
            v.push("startTime <= minEndTime");
        }
        if self.min_end_time > self.likely_time {
            v.push("minEndTime <= likelyTime");
        }
        if self.likely_time > self.max_end_time {
            v.push("likelyTime <= maxEndTime");
        }
        if self.next_time <= self.likely_time {
            v.push("nextTime > likelyTime");
        }
        if self.min_end_time < self.made_at {
            v.push("minEndTime >= made_at");
        }
        v
    }

    /// Appends the NDJSON line (with trailing newline) to `out`.
    pub fn write_line(&self, out: &mut String) {
        let site = serde_json::to_string(&self.site_id).expect("string serialization");
        let _ = writeln!(
            out,
            "{{\"ts_ms\":{},\"site_id\":{},\"cycle\":{},\"phase\":\"{}\",\"startTime\":{:.2},\"minEndTime\":{:.2},\"maxEndTime\":{:.2},\"likelyTime\":{:.2},\"confidence_alpha\":{},\"confidence_value\":{:.2},\"nextTime\":{:.2},\"made_at\":{:.2},\"degraded\":{}}}",
            self.ts_ms,
            site,
            self.cycle,
            self.phase,
            self.start_time,
            self.min_end_time,
            self.max_end_time,
            self.likely_time,
            self.confidence_alpha,
            self.confidence_value,
            self.next_time,
            self.made_at,
            self.degraded,
        );
    }

    pub fn to_line(&self) -> String {
        let mut s = String::new();
        self.write_line(&mut s);
        s
    }
}

/// Identifies where a message belongs; copied verbatim into it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MessageContext {
    pub site_id: String,
    pub cycle: u64,
    pub ts_ms: i64,
}

/// Builds the SPaT message for the active phase described by `state`.
pub fn compose(
    ctx: &MessageContext,
    model: &StratumModel,
    state: PhaseState,
    alpha: f64,
    hold: f64,
) -> Result<SpatMessage> {
    check_probability("alpha", alpha)?;
    compose_until(ctx, model, state, alpha, hold).map(|(m, _)| m)
}

/// Also returns the elapsed time below which the message stays the same
/// apart from its timestamps: the conditioning set only shrinks when the
/// elapsed time reaches the next surviving sample.
fn compose_until(
    ctx: &MessageContext,
    model: &StratumModel,
    state: PhaseState,
    alpha: f64,
    hold: f64,
) -> Result<(SpatMessage, f64)> {
    let rm = model.ring(state.phase.ring());
    let schedule = predict_schedule(model, state, 1, hold)?;
    let t = state.t;
    let conditioned = match state.phase.slot() {
        0 => Some(rm.lead.condition_gt(state.elapsed())),
        1 => Some(rm.left.condition_gt(state.elapsed())),
        _ => None,
    };
    let (min, max, likely, conf, degraded, valid_below) = match conditioned {
        Some(Ok(c)) => {
            let s = state.start;
            (
                t.max(s + c.support_min()),
                s + c.support_max(),
                s + c.mean(),
                s + c.upper_quantile(alpha)?,
                false,
                c.support_min(),
            )
        }
        Some(Err(Error::EmptyCondition { .. })) => {
            let end = t + hold;
            (end, end, end, end, true, state.elapsed())
        }
        Some(Err(e)) => return Err(e),
        None => {
            // The coordination phase ends with the cycle.
            let end = schedule.transitions[0].time;
            let degraded = schedule.transitions[0].degraded;
            let valid_below = if degraded {
                state.elapsed()
            } else {
                model.cycle_length - state.start
            };
            (end, end, end, end, degraded, valid_below)
        }
    };
    let message = SpatMessage {
        ts_ms: ctx.ts_ms,
        site_id: ctx.site_id.clone(),
        cycle: ctx.cycle,
        phase: state.phase,
        start_time: state.start,
        min_end_time: min,
        max_end_time: max,
        likely_time: likely,
        confidence_alpha: alpha,
        confidence_value: conf,
        next_time: schedule.next_start,
        made_at: t,
        degraded,
    };
    Ok((message, valid_below))
}

/// Fitted models keyed by stratum (cycle length rounded to 0.1 s).
#[derive(Debug, Clone, Default)]
pub struct ModelSet {
    by_stratum: BTreeMap<i64, StratumModel>,
}

impl ModelSet {
    /// Fits one model per cycle length present in `table`.
    pub fn fit(table: &CycleTable) -> Result<Self> {
        let mut by_stratum = BTreeMap::new();
        for l in table.cycle_lengths() {
            by_stratum.insert(stratum_key(l), StratumModel::fit(&table.stratify(l)?)?);
        }
        Ok(ModelSet { by_stratum })
    }

    pub fn get(&self, cycle_length: f64) -> Option<&StratumModel> {
        self.by_stratum.get(&stratum_key(cycle_length))
    }

    pub fn len(&self) -> usize {
        self.by_stratum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_stratum.is_empty()
    }
}

/// Where the stream gets its distributions.
#[derive(Debug, Clone)]
pub enum ModelSource {
    Fixed(ModelSet),
    /// Refit at each new day from the `delta_days` days before it.
    Sliding {
        history: CycleTable,
        delta_days: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Speed {
    Unlimited,
    /// Multiple of real time; 1.0 is real time.
    Factor(f64),
}

impl FromStr for Speed {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "max" | "unlimited" => Ok(Speed::Unlimited),
            "realtime" => Ok(Speed::Factor(1.0)),
            other => match other.trim_end_matches('x').parse::<f64>() {
                Ok(f) if f > 0.0 && f.is_finite() => Ok(Speed::Factor(f)),
                _ => Err(Error::InvalidArgument(format!("bad speed '{s}'"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamConfig {
    pub cadence_ms: u64,
    pub speed: Speed,
    pub alpha: f64,
    pub hold: f64,
}

impl Default for StreamConfig {
    fn default() -> Self {
        StreamConfig {
            cadence_ms: 100,
            speed: Speed::Unlimited,
            alpha: 0.8,
            hold: DEFAULT_HOLD_S,
        }
    }
}

/// Messages for every active phase at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Tick {
    pub ts_ms: i64,
    pub cycle: u64,
    pub messages: Vec<SpatMessage>,
}

/// Replays a cycle table tick by tick.
///
/// Cycles whose stratum has no model (or whose sliding window is empty) are
/// skipped.
pub struct MessageStream<'a> {
    table: &'a CycleTable,
    source: &'a ModelSource,
    cfg: StreamConfig,
    record: usize,
    tick_ms: i64,
    window_day: Option<i64>,
    window_models: Option<ModelSet>,
    skipped_cycles: usize,
    /// Last message per ring and the elapsed time it stays valid below.
    cached: [Option<(SpatMessage, f64)>; 2],
}

impl<'a> MessageStream<'a> {
    pub fn new(table: &'a CycleTable, source: &'a ModelSource, cfg: StreamConfig) -> Result<Self> {
        if cfg.cadence_ms < MIN_CADENCE_MS {
            return Err(Error::InvalidCadence(cfg.cadence_ms));
        }
        check_probability("alpha", cfg.alpha)?;
        if let ModelSource::Sliding { delta_days: 0, .. } = source {
            return Err(Error::InvalidArgument("window length must be at least one day".into()));
        }
        Ok(MessageStream {
            table,
            source,
            cfg,
            record: 0,
            tick_ms: 0,
            window_day: None,
            window_models: None,
            skipped_cycles: 0,
            cached: [None, None],
        })
    }

    pub fn skipped_cycles(&self) -> usize {
        self.skipped_cycles
    }

    /// Refits the sliding window when the replay reaches a new day.
    fn refresh(&mut self, r: &CycleRecord) {
        if let ModelSource::Sliding { history, delta_days } = self.source {
            let day = r.day();
            if self.window_day != Some(day) {
                self.window_day = Some(day);
                self.window_models = history
                    .window(day, *delta_days)
                    .ok()
                    .and_then(|w| ModelSet::fit(&w).ok());
            }
        }
    }

    fn model_for(&self, r: &CycleRecord) -> Option<&StratumModel> {
        match self.source {
            ModelSource::Fixed(set) => set.get(r.cycle_length),
            ModelSource::Sliding { .. } => self.window_models.as_ref()?.get(r.cycle_length),
        }
    }

    fn tick(&mut self, r: CycleRecord) -> Result<Tick> {
        let cfg = self.cfg;
        let site_id = self.table.site_id.clone();
        let tick_ms = self.tick_ms;
        let source = self.source;
        let model = match source {
            ModelSource::Fixed(set) => set.get(r.cycle_length),
            ModelSource::Sliding { .. } => self.window_models.as_ref().and_then(|m| m.get(r.cycle_length)),
        }
        .expect("model checked before ticking");
        let t = tick_ms as f64 / 1000.0;
        let ctx = MessageContext {
            site_id,
            cycle: r.cycle_index,
            ts_ms: r.cycle_start_ms + tick_ms,
        };
        let mut messages = Vec::with_capacity(2);
        for (i, ring) in [Ring::One, Ring::Two].into_iter().enumerate() {
            let [lead, left, _] = r.ring_durations(ring);
            let lead_end = seconds_to_ms(lead);
            let left_end = seconds_to_ms(lead + left);
            let [p_lead, p_left, p_coord] = ring.sequence();
            let state = if tick_ms < lead_end {
                PhaseState::new(p_lead, 0.0, t)?
            } else if tick_ms < left_end {
                PhaseState::new(p_left, lead, t)?
            } else {
                PhaseState::new(p_coord, lead + left, t)?
            };
            let reusable = match &self.cached[i] {
                Some((m, below)) => m.cycle == ctx.cycle && m.phase == state.phase && state.elapsed() < *below,
                None => false,
            };
            if !reusable {
                self.cached[i] = Some(compose_until(&ctx, model, state, cfg.alpha, cfg.hold)?);
            }
            let (cached, _) = self.cached[i].as_ref().expect("filled above");
            messages.push(SpatMessage {
                ts_ms: ctx.ts_ms,
                made_at: t,
                ..cached.clone()
            });
        }
        Ok(Tick {
            ts_ms: ctx.ts_ms,
            cycle: r.cycle_index,
            messages,
        })
    }
}

impl Iterator for MessageStream<'_> {
    type Item = Result<Tick>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let r = *self.table.records().get(self.record)?;
            if self.tick_ms == 0 {
                self.refresh(&r);
            }
            if self.tick_ms == 0 && self.model_for(&r).is_none() {
                self.skipped_cycles += 1;
                self.record += 1;
                continue;
            }
            if self.tick_ms >= seconds_to_ms(r.cycle_length) {
                self.record += 1;
                self.tick_ms = 0;
                continue;
            }
            let tick = self.tick(r);
            self.tick_ms += self.cfg.cadence_ms as i64;
            return Some(tick);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StreamSummary {
    pub ticks: u64,
    pub messages: u64,
    pub skipped_cycles: usize,
    /// The sink went away before the replay finished.
    pub closed_early: bool,
}

/// Streams NDJSON to `sink`, pacing ticks to wall-clock time unless the
/// speed is unlimited. A closed sink ends the stream without error.
pub fn stream<W: Write>(
    table: &CycleTable,
    source: &ModelSource,
    cfg: StreamConfig,
    mut sink: W,
) -> Result<StreamSummary> {
    let mut messages = MessageStream::new(table, source, cfg)?;
    let mut summary = StreamSummary::default();
    let started = Instant::now();
    let mut first_ts = None;
    let mut line = String::new();
    for tick in messages.by_ref() {
        let tick = tick?;
        if let Speed::Factor(f) = cfg.speed {
            let first = *first_ts.get_or_insert(tick.ts_ms);
            let due = Duration::from_secs_f64((tick.ts_ms - first) as f64 / 1000.0 / f);
            if let Some(wait) = due.checked_sub(started.elapsed()) {
                std::thread::sleep(wait);
            }
        }
        line.clear();
        for m in &tick.messages {
            m.write_line(&mut line);
        }
        match sink.write_all(line.as_bytes()) {
            Ok(()) => {}
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {
                summary.closed_early = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
        summary.ticks += 1;
        summary.messages += tick.messages.len() as u64;
    }
    match sink.flush() {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => summary.closed_early = true,
        other => other?,
    }
    summary.skipped_cycles = messages.skipped_cycles();
    Ok(summary)
}
