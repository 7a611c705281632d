//! Phase-transition logs and per-cycle duration records.
//!
//! A dual-ring controller runs ring 1 (`p4 -> p1 -> p2`) and ring 2
//! (`p8 -> p5 -> p6`) side by side. Every cycle starts with `p4`/`p8` and the
//! two rings cross the barriers together, so a well-formed cycle satisfies
//!
//! ```text
//! d4 + d1 + d2 = d8 + d5 + d6 = L
//! d1 + d2      = d5 + d6
//! d4           = d8
//! ```
//!
//! Yellow and all-red intervals are folded into the green durations; the log
//! carries green-phase transitions only.
//!
//! ## Cycle-record CSV
//!
//! | column           | unit            |
//! |------------------|-----------------|
//! | `cycle_index`    | ordinal         |
//! | `cycle_start_ms` | ms since epoch  |
//! | `L_s`            | seconds         |
//! | `d4_s` .. `d6_s` | seconds (0.01)  |
//!
//! ## Phase-event CSV
//!
//! `timestamp_ms, ring, phase, kind` with `phase` one of `p1 p2 p4 p5 p6 p8`
//! and `kind` one of `start`/`end`.

use std::fmt;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MS_PER_DAY: i64 = 86_400_000;

/// Default barrier tolerance in seconds: the controller clock is accurate to
/// 10 ms, so 50 ms leaves room for skew on both rings.
pub const DEFAULT_TOLERANCE_S: f64 = 0.05;

/// Canonical sliding-window lengths in days.
pub const WINDOW_PRESETS: [u32; 3] = [14, 60, 120];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[serde(rename = "p1")]
    P1,
    #[serde(rename = "p2")]
    P2,
    #[serde(rename = "p4")]
    P4,
    #[serde(rename = "p5")]
    P5,
    #[serde(rename = "p6")]
    P6,
    #[serde(rename = "p8")]
    P8,
}

impl Phase {
    pub const ALL: [Phase; 6] = [Phase::P4, Phase::P1, Phase::P2, Phase::P8, Phase::P5, Phase::P6];

    pub fn ring(self) -> Ring {
        match self {
            Phase::P4 | Phase::P1 | Phase::P2 => Ring::One,
            Phase::P8 | Phase::P5 | Phase::P6 => Ring::Two,
        }
    }

    /// Position within the ring sequence: 0 = cross-street, 1 = left turn,
    /// 2 = coordination phase.
    pub fn slot(self) -> usize {
        match self {
            Phase::P4 | Phase::P8 => 0,
            Phase::P1 | Phase::P5 => 1,
            Phase::P2 | Phase::P6 => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::P1 => "p1",
            Phase::P2 => "p2",
            Phase::P4 => "p4",
            Phase::P5 => "p5",
            Phase::P6 => "p6",
            Phase::P8 => "p8",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Phase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1" => Ok(Phase::P1),
            "p2" => Ok(Phase::P2),
            "p4" => Ok(Phase::P4),
            "p5" => Ok(Phase::P5),
            "p6" => Ok(Phase::P6),
            "p8" => Ok(Phase::P8),
            other => Err(Error::InvalidArgument(format!("unknown phase '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ring {
    One,
    Two,
}

impl Ring {
    pub fn number(self) -> u8 {
        match self {
            Ring::One => 1,
            Ring::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Ring> {
        match n {
            1 => Some(Ring::One),
            2 => Some(Ring::Two),
            _ => None,
        }
    }

    /// Phases in the order they are served within a cycle.
    pub fn sequence(self) -> [Phase; 3] {
        match self {
            Ring::One => [Phase::P4, Phase::P1, Phase::P2],
            Ring::Two => [Phase::P8, Phase::P5, Phase::P6],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Start,
    End,
}

/// One green-phase transition from a controller log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseEvent {
    pub timestamp_ms: i64,
    pub ring: u8,
    pub phase: Phase,
    pub kind: EventKind,
}

impl PhaseEvent {
    pub fn new(timestamp_ms: i64, phase: Phase, kind: EventKind) -> Self {
        PhaseEvent {
            timestamp_ms,
            ring: phase.ring().number(),
            phase,
            kind,
        }
    }
}

/// Phase end times measured from the cycle start, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseEndTimes {
    pub p4: f64,
    pub p1: f64,
    pub p2: f64,
    pub p8: f64,
    pub p5: f64,
    pub p6: f64,
}

/// Largest deviation from each barrier identity within one cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierResiduals {
    pub ring1_length: f64,
    pub ring2_length: f64,
    pub middle_barrier: f64,
    pub lead_phases: f64,
}

impl BarrierResiduals {
    pub fn max(&self) -> f64 {
        self.ring1_length
            .max(self.ring2_length)
            .max(self.middle_barrier)
            .max(self.lead_phases)
    }

    fn first_violation(&self, tolerance: f64) -> Option<(&'static str, f64)> {
        [
            ("d4 + d1 + d2 = L", self.ring1_length),
            ("d8 + d5 + d6 = L", self.ring2_length),
            ("d4 = d8", self.lead_phases),
            ("d1 + d2 = d5 + d6", self.middle_barrier),
        ]
        .into_iter()
        .find(|(_, r)| *r > tolerance)
    }
}

/// One cycle: its start, length and the six green durations (seconds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord {
    pub cycle_index: u64,
    pub cycle_start_ms: i64,
    pub cycle_length: f64,
    pub d4: f64,
    pub d1: f64,
    pub d2: f64,
    pub d8: f64,
    pub d5: f64,
    pub d6: f64,
}

impl CycleRecord {
    pub fn duration(&self, phase: Phase) -> f64 {
        match phase {
            Phase::P4 => self.d4,
            Phase::P1 => self.d1,
            Phase::P2 => self.d2,
            Phase::P8 => self.d8,
            Phase::P5 => self.d5,
            Phase::P6 => self.d6,
        }
    }

    pub fn ring_durations(&self, ring: Ring) -> [f64; 3] {
        ring.sequence().map(|p| self.duration(p))
    }

    pub fn end_times(&self) -> PhaseEndTimes {
        PhaseEndTimes {
            p4: self.d4,
            p1: self.d4 + self.d1,
            p2: self.d4 + self.d1 + self.d2,
            p8: self.d8,
            p5: self.d8 + self.d5,
            p6: self.d8 + self.d5 + self.d6,
        }
    }

    /// Calendar day (UTC days since the epoch) in which the cycle starts.
    pub fn day(&self) -> i64 {
        self.cycle_start_ms.div_euclid(MS_PER_DAY)
    }

    pub fn residuals(&self) -> BarrierResiduals {
        BarrierResiduals {
            ring1_length: (self.d4 + self.d1 + self.d2 - self.cycle_length).abs(),
            ring2_length: (self.d8 + self.d5 + self.d6 - self.cycle_length).abs(),
            middle_barrier: ((self.d1 + self.d2) - (self.d5 + self.d6)).abs(),
            lead_phases: (self.d4 - self.d8).abs(),
        }
    }

    pub fn check_barriers(&self, tolerance: f64) -> Result<()> {
        match self.residuals().first_violation(tolerance) {
            None => Ok(()),
            Some((identity, residual)) => Err(Error::BarrierViolation {
                cycle_start_ms: self.cycle_start_ms,
                identity,
                residual,
            }),
        }
    }
}

/// Stratum key: the cycle length rounded to 0.1 s.
pub fn stratum_key(cycle_length: f64) -> i64 {
    (cycle_length * 10.0).round() as i64
}

pub(crate) fn ms_to_seconds(ms: i64) -> f64 {
    // 0.01 s resolution.
    let centis = (ms as f64 / 10.0).round();
    centis / 100.0
}

pub(crate) fn seconds_to_ms(seconds: f64) -> i64 {
    (seconds * 1000.0).round() as i64
}

/// Quantizes a duration in seconds to 0.01 s.
pub fn quantize(seconds: f64) -> f64 {
    (seconds * 100.0).round() / 100.0
}

/// An ordered run of cycles from one site. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTable {
    pub site_id: String,
    records: Vec<CycleRecord>,
}

impl CycleTable {
    /// Builds a table, checking that cycle starts strictly increase.
    pub fn new(site_id: impl Into<String>, records: Vec<CycleRecord>) -> Result<Self> {
        for (i, pair) in records.windows(2).enumerate() {
            if pair[1].cycle_start_ms <= pair[0].cycle_start_ms {
                return Err(Error::Parse {
                    row: i + 2,
                    message: format!(
                        "cycle_start_ms {} does not follow {}",
                        pair[1].cycle_start_ms, pair[0].cycle_start_ms
                    ),
                });
            }
        }
        Ok(CycleTable {
            site_id: site_id.into(),
            records,
        })
    }

    pub fn empty(site_id: impl Into<String>) -> Self {
        CycleTable {
            site_id: site_id.into(),
            records: Vec::new(),
        }
    }

    pub fn records(&self) -> &[CycleRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn into_records(self) -> Vec<CycleRecord> {
        self.records
    }

    /// Distinct cycle lengths in the table (rounded to 0.1 s), ascending.
    pub fn cycle_lengths(&self) -> Vec<f64> {
        let mut keys: Vec<i64> = self.records.iter().map(|r| stratum_key(r.cycle_length)).collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter().map(|k| k as f64 / 10.0).collect()
    }

    pub fn first_day(&self) -> Option<i64> {
        self.records.first().map(CycleRecord::day)
    }

    pub fn last_day(&self) -> Option<i64> {
        self.records.last().map(CycleRecord::day)
    }

    /// Checks every record against the barrier identities and every
    /// consecutive pair of starts against the earlier cycle length.
    ///
    /// Starts may be further apart than `L` (log outages), never closer.
    pub fn validate(&self, tolerance: f64) -> Result<()> {
        for r in &self.records {
            if [r.d4, r.d1, r.d2, r.d8, r.d5, r.d6].iter().any(|d| *d < 0.0) || r.cycle_length <= 0.0 {
                return Err(Error::Parse {
                    row: r.cycle_index as usize,
                    message: "negative duration or nonpositive cycle length".into(),
                });
            }
            r.check_barriers(tolerance)?;
        }
        for pair in self.records.windows(2) {
            let gap_s = (pair[1].cycle_start_ms - pair[0].cycle_start_ms) as f64 / 1000.0;
            if gap_s + tolerance < pair[0].cycle_length {
                return Err(Error::BarrierViolation {
                    cycle_start_ms: pair[1].cycle_start_ms,
                    identity: "c(n+1) - c(n) = L",
                    residual: pair[0].cycle_length - gap_s,
                });
            }
        }
        Ok(())
    }

    /// Records whose cycle length equals `cycle_length` after rounding to
    /// 0.1 s, in their original order.
    pub fn stratify(&self, cycle_length: f64) -> Result<CycleTable> {
        if cycle_length.is_nan() || cycle_length <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cycle length must be positive, got {cycle_length}"
            )));
        }
        let key = stratum_key(cycle_length);
        let records: Vec<CycleRecord> = self
            .records
            .iter()
            .filter(|r| stratum_key(r.cycle_length) == key)
            .copied()
            .collect();
        if records.is_empty() {
            return Err(Error::EmptyStratum(format!("L = {cycle_length} s")));
        }
        Ok(CycleTable {
            site_id: self.site_id.clone(),
            records,
        })
    }

    /// Records from days `target_day - delta_days ..= target_day - 1`.
    ///
    /// The target day itself is excluded. A window reaching before the first
    /// day of data is clipped to what exists.
    pub fn window(&self, target_day: i64, delta_days: u32) -> Result<CycleTable> {
        if delta_days == 0 {
            return Err(Error::InvalidArgument("window length must be at least one day".into()));
        }
        let first = target_day - i64::from(delta_days);
        let records: Vec<CycleRecord> = self
            .records
            .iter()
            .filter(|r| (first..target_day).contains(&r.day()))
            .copied()
            .collect();
        if records.is_empty() {
            return Err(Error::EmptyStratum(format!(
                "days {first}..={} (target day {target_day}, window {delta_days})",
                target_day - 1
            )));
        }
        Ok(CycleTable {
            site_id: self.site_id.clone(),
            records,
        })
    }

    /// Records whose day index lies in `days`.
    pub fn days(&self, days: std::ops::Range<i64>) -> CycleTable {
        CycleTable {
            site_id: self.site_id.clone(),
            records: self
                .records
                .iter()
                .filter(|r| days.contains(&r.day()))
                .copied()
                .collect(),
        }
    }

    /// Appends `other`, renumbering its cycle indices to follow this table.
    pub fn concat(mut self, other: CycleTable) -> Result<CycleTable> {
        let offset = self.records.last().map_or(0, |r| r.cycle_index + 1);
        let base = other.records.first().map_or(0, |r| r.cycle_index);
        self.records.extend(other.records.into_iter().map(|mut r| {
            r.cycle_index = r.cycle_index - base + offset;
            r
        }));
        CycleTable::new(self.site_id, self.records)
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CYCLE_HEADER)?;
        for r in &self.records {
            w.write_record(&[
                r.cycle_index.to_string(),
                r.cycle_start_ms.to_string(),
                format!("{:.2}", r.cycle_length),
                format!("{:.2}", r.d4),
                format!("{:.2}", r.d1),
                format!("{:.2}", r.d2),
                format!("{:.2}", r.d8),
                format!("{:.2}", r.d5),
                format!("{:.2}", r.d6),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a cycle-record CSV. The header row is mandatory.
    pub fn read_csv<R: io::Read>(site_id: impl Into<String>, reader: R) -> Result<CycleTable> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        for col in CYCLE_HEADER {
            if !headers.iter().any(|h| h == col) {
                return Err(Error::Parse {
                    row: 1,
                    message: format!("missing column '{col}'"),
                });
            }
        }
        let mut records = Vec::new();
        for (i, row) in rdr.deserialize::<CycleRow>().enumerate() {
            let row = row.map_err(|e| Error::Parse {
                row: i + 2,
                message: e.to_string(),
            })?;
            records.push(CycleRecord {
                cycle_index: row.cycle_index,
                cycle_start_ms: row.cycle_start_ms,
                cycle_length: quantize(row.l_s),
                d4: quantize(row.d4_s),
                d1: quantize(row.d1_s),
                d2: quantize(row.d2_s),
                d8: quantize(row.d8_s),
                d5: quantize(row.d5_s),
                d6: quantize(row.d6_s),
            });
        }
        CycleTable::new(site_id, records)
    }
}

const CYCLE_HEADER: [&str; 9] = [
    "cycle_index",
    "cycle_start_ms",
    "L_s",
    "d4_s",
    "d1_s",
    "d2_s",
    "d8_s",
    "d5_s",
    "d6_s",
];

#[derive(Deserialize)]
struct CycleRow {
    cycle_index: u64,
    cycle_start_ms: i64,
    #[serde(rename = "L_s")]
    l_s: f64,
    d4_s: f64,
    d1_s: f64,
    d2_s: f64,
    d8_s: f64,
    d5_s: f64,
    d6_s: f64,
}

pub fn write_events_csv<W: io::Write>(events: &[PhaseEvent], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for e in events {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events_csv<R: io::Read>(reader: R) -> Result<Vec<PhaseEvent>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut events = Vec::new();
    for (i, row) in rdr.deserialize::<PhaseEvent>().enumerate() {
        let e = row.map_err(|e| Error::Parse {
            row: i + 2,
            message: e.to_string(),
        })?;
        events.push(e);
    }
    Ok(events)
}

/// One ring's view of a completed cycle, as absolute timestamps.
#[derive(Debug, Clone, Copy)]
struct RingCycle {
    starts: [i64; 3],
    ends: [i64; 3],
}

#[derive(Debug)]
struct RingTracker {
    ring: Ring,
    synced: bool,
    step: usize,
    current: RingCycle,
    completed: Vec<RingCycle>,
}

impl RingTracker {
    fn new(ring: Ring) -> Self {
        RingTracker {
            ring,
            synced: false,
            step: 0,
            current: RingCycle {
                starts: [0; 3],
                ends: [0; 3],
            },
            completed: Vec::new(),
        }
    }

    fn expected(&self) -> (Phase, EventKind) {
        let phase = self.ring.sequence()[self.step / 2];
        let kind = if self.step.is_multiple_of(2) {
            EventKind::Start
        } else {
            EventKind::End
        };
        (phase, kind)
    }

    fn accept(&mut self, index: usize, event: &PhaseEvent) -> Result<()> {
        if !self.synced {
            // Drop the partial leading cycle: wait for a cycle boundary.
            if event.phase.slot() == 0 && event.kind == EventKind::Start {
                self.synced = true;
            } else {
                return Ok(());
            }
        }
        let (phase, kind) = self.expected();
        if event.phase != phase || event.kind != kind {
            return Err(Error::RingSequenceViolation {
                ring: self.ring.number(),
                index,
                detail: format!(
                    "expected {phase} {}, got {} {}",
                    kind_str(kind),
                    event.phase,
                    kind_str(event.kind)
                ),
            });
        }
        let slot = self.step / 2;
        match kind {
            EventKind::Start => self.current.starts[slot] = event.timestamp_ms,
            EventKind::End => self.current.ends[slot] = event.timestamp_ms,
        }
        self.step += 1;
        if self.step == 6 {
            self.completed.push(self.current);
            self.step = 0;
        }
        Ok(())
    }
}

fn kind_str(kind: EventKind) -> &'static str {
    match kind {
        EventKind::Start => "start",
        EventKind::End => "end",
    }
}

/// Reconstructs per-cycle records from a phase-transition stream.
///
/// Incomplete leading and trailing cycles are dropped. `tolerance` is in
/// seconds and bounds every barrier residual as well as the misalignment of
/// the two rings' cycle starts.
pub fn ingest_events(site_id: impl Into<String>, events: &[PhaseEvent], tolerance: f64) -> Result<CycleTable> {
    let mut rings = [RingTracker::new(Ring::One), RingTracker::new(Ring::Two)];
    let mut previous_ms = i64::MIN;
    for (index, event) in events.iter().enumerate() {
        if event.timestamp_ms < previous_ms {
            return Err(Error::OutOfOrderEvent {
                index,
                timestamp_ms: event.timestamp_ms,
                previous_ms,
            });
        }
        previous_ms = event.timestamp_ms;
        let ring = Ring::from_number(event.ring).ok_or_else(|| Error::RingSequenceViolation {
            ring: event.ring,
            index,
            detail: format!("unknown ring {}", event.ring),
        })?;
        if event.phase.ring() != ring {
            return Err(Error::RingSequenceViolation {
                ring: event.ring,
                index,
                detail: format!("phase {} does not belong to ring {}", event.phase, event.ring),
            });
        }
        let tracker = match ring {
            Ring::One => &mut rings[0],
            Ring::Two => &mut rings[1],
        };
        tracker.accept(index, event)?;
    }

    let [ring1, ring2] = rings;
    let tol_ms = (tolerance * 1000.0).round() as i64;
    let (a, b) = (&ring1.completed, &ring2.completed);
    let (mut i, mut j) = (0, 0);
    let mut records = Vec::new();
    while i < a.len() && j < b.len() {
        let offset = a[i].starts[0] - b[j].starts[0];
        if offset.abs() <= tol_ms {
            let record = build_record(records.len() as u64, &a[i], &b[j]);
            record.check_barriers(tolerance)?;
            records.push(record);
            i += 1;
            j += 1;
        } else if records.is_empty() {
            // One ring synced a cycle earlier than the other.
            if offset < 0 {
                i += 1;
            } else {
                j += 1;
            }
        } else {
            return Err(Error::BarrierViolation {
                cycle_start_ms: a[i].starts[0].min(b[j].starts[0]),
                identity: "rings start the cycle together",
                residual: offset.abs() as f64 / 1000.0,
            });
        }
    }
    CycleTable::new(site_id, records)
}

fn build_record(cycle_index: u64, r1: &RingCycle, r2: &RingCycle) -> CycleRecord {
    let origin = r1.starts[0];
    // Positions are quantized before differencing so durations telescope to L.
    let pos = |ts: i64| ms_to_seconds(ts - origin);
    let dur = |rc: &RingCycle, slot: usize| quantize(pos(rc.ends[slot]) - pos(rc.starts[slot]));
    CycleRecord {
        cycle_index,
        cycle_start_ms: origin,
        cycle_length: pos(r1.ends[2]),
        d4: dur(r1, 0),
        d1: dur(r1, 1),
        d2: dur(r1, 2),
        d8: dur(r2, 0),
        d5: dur(r2, 1),
        d6: dur(r2, 2),
    }
}

/// Serializes a table back into a phase-event stream (12 events per cycle).
///
/// Events are ordered by timestamp; at equal timestamps ring 1 precedes ring
/// 2 and each ring keeps its own sequence order.
pub fn emit_events(table: &CycleTable) -> Vec<PhaseEvent> {
    let mut per_ring: [Vec<PhaseEvent>; 2] = [Vec::new(), Vec::new()];
    for (k, ring) in [Ring::One, Ring::Two].into_iter().enumerate() {
        let out = &mut per_ring[k];
        let mut last = i64::MIN;
        for r in table.records() {
            let mut elapsed = 0.0;
            for phase in ring.sequence() {
                let start = (r.cycle_start_ms + seconds_to_ms(elapsed)).max(last);
                elapsed += r.duration(phase);
                let end = (r.cycle_start_ms + seconds_to_ms(elapsed)).max(start);
                out.push(PhaseEvent::new(start, phase, EventKind::Start));
                out.push(PhaseEvent::new(end, phase, EventKind::End));
                last = end;
            }
        }
    }
    let [ring1, ring2] = per_ring;
    let mut merged = Vec::with_capacity(ring1.len() + ring2.len());
    let (mut a, mut b) = (ring1.into_iter().peekable(), ring2.into_iter().peekable());
    loop {
        let take_a = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => x.timestamp_ms <= y.timestamp_ms,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        merged.extend(if take_a { a.next() } else { b.next() });
    }
    merged
}
