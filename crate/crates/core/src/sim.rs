//! Semi-actuated, coordinated dual-ring controller model.
//!
//! Each cycle draws Poisson counts of side-street and left-turn detections.
//! The cross-street phase gets its minimum green plus one extension per
//! detection, the left turn gets one extension per detection (zero when no
//! vehicle shows up), and the coordination phase absorbs the rest of the
//! cycle. Ring 2 mirrors ring 1 across the barriers with its own left-turn
//! draw.
//!
//! ## Config file
//!
//! Flat `key = value` lines, `#` starts a comment. Profiles are either a
//! single number or comma-separated `HH:MM-HH:MM=value` segments covering the
//! whole day.
//!
//! ```text
//! site_id          = sim
//! seed             = 7
//! start_ms         = 0
//! schedule         = 00:00-06:00=100, 06:00-22:00=120, 22:00-24:00=110
//! min_green_p4     = 36
//! extension        = 5
//! max_d4           = 60
//! max_d1           = 25
//! side_street_rate = 00:00-07:00=0.2, 07:00-09:00=1.5, 09:00-16:00=0.4, 16:00-19:00=2.0, 19:00-24:00=0.2
//! left_turn_rate   = 0.6
//! ```

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::phase_log::{quantize, seconds_to_ms, CycleRecord, CycleTable, MS_PER_DAY};

const SECONDS_PER_DAY: u32 = 86_400;

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    from_s: u32,
    to_s: u32,
    value: f64,
}

/// Piecewise-constant function of the time of day, periodic over 24 h.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyProfile {
    segments: Vec<Segment>,
}

impl DailyProfile {
    pub fn constant(value: f64) -> Self {
        DailyProfile {
            segments: vec![Segment {
                from_s: 0,
                to_s: SECONDS_PER_DAY,
                value,
            }],
        }
    }

    /// Builds a profile from `(from_hour, to_hour, value)` segments, which
    /// must tile the day in order.
    pub fn from_hours(segments: &[(f64, f64, f64)]) -> Result<Self> {
        let segments = segments
            .iter()
            .map(|&(a, b, value)| Segment {
                from_s: (a * 3600.0).round() as u32,
                to_s: (b * 3600.0).round() as u32,
                value,
            })
            .collect();
        let profile = DailyProfile { segments };
        profile.check_tiling()?;
        Ok(profile)
    }

    fn check_tiling(&self) -> Result<()> {
        let mut cursor = 0;
        for s in &self.segments {
            if s.from_s != cursor || s.to_s <= s.from_s {
                return Err(Error::InvalidArgument(format!(
                    "profile segments must tile the day in order; gap or overlap at {}",
                    hhmm(cursor)
                )));
            }
            cursor = s.to_s;
        }
        if cursor != SECONDS_PER_DAY {
            return Err(Error::InvalidArgument(format!(
                "profile ends at {} instead of 24:00",
                hhmm(cursor)
            )));
        }
        Ok(())
    }

    pub fn at(&self, seconds_of_day: u32) -> f64 {
        let s = seconds_of_day % SECONDS_PER_DAY;
        self.segments
            .iter()
            .find(|seg| s >= seg.from_s && s < seg.to_s)
            .map_or(0.0, |seg| seg.value)
    }

    pub fn at_ms(&self, timestamp_ms: i64) -> f64 {
        self.at((timestamp_ms.rem_euclid(MS_PER_DAY) / 1000) as u32)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments.iter().map(|s| s.value)
    }
}

fn hhmm(seconds: u32) -> String {
    format!("{:02}:{:02}", seconds / 3600, (seconds % 3600) / 60)
}

fn parse_hhmm(s: &str) -> Option<u32> {
    let (h, m) = s.trim().split_once(':')?;
    let (h, m): (u32, u32) = (h.parse().ok()?, m.parse().ok()?);
    if m >= 60 || h > 24 || (h == 24 && m != 0) {
        return None;
    }
    Some(h * 3600 + m * 60)
}

impl FromStr for DailyProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Ok(v) = s.trim().parse::<f64>() {
            return Ok(DailyProfile::constant(v));
        }
        let mut segments = Vec::new();
        for part in s.split(',') {
            let bad = || Error::InvalidArgument(format!("bad profile segment '{}'", part.trim()));
            let (range, value) = part.split_once('=').ok_or_else(bad)?;
            let (from, to) = range.split_once('-').ok_or_else(bad)?;
            segments.push(Segment {
                from_s: parse_hhmm(from).ok_or_else(bad)?,
                to_s: parse_hhmm(to).ok_or_else(bad)?,
                value: value.trim().parse().map_err(|_| bad())?,
            });
        }
        let profile = DailyProfile { segments };
        profile.check_tiling()?;
        Ok(profile)
    }
}

impl fmt::Display for DailyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.segments.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}-{}={}", hhmm(s.from_s), hhmm(s.to_s), s.value)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingPlan {
    /// Cycle length in seconds by time of day.
    pub schedule: DailyProfile,
    pub min_green_p4: f64,
    /// Green added per detected vehicle, seconds.
    pub extension: f64,
    pub max_d4: f64,
    pub max_d1: f64,
}

impl Default for TimingPlan {
    fn default() -> Self {
        TimingPlan {
            schedule: DailyProfile::constant(120.0),
            min_green_p4: 36.0,
            extension: 5.0,
            max_d4: 60.0,
            max_d1: 25.0,
        }
    }
}

impl TimingPlan {
    pub fn fixed(cycle_length: f64) -> Self {
        TimingPlan {
            schedule: DailyProfile::constant(cycle_length),
            ..TimingPlan::default()
        }
    }

    /// The coordination phase must keep positive green even when both
    /// actuated phases run to their caps.
    pub fn validate(&self) -> Result<()> {
        if self.extension.is_nan() || self.extension <= 0.0 {
            return Err(Error::InfeasiblePlan(format!(
                "extension must be positive, got {}",
                self.extension
            )));
        }
        if self.min_green_p4 < 0.0 || self.max_d1 < 0.0 || self.max_d4 < self.min_green_p4 {
            return Err(Error::InfeasiblePlan(format!(
                "need 0 <= min_green_p4 <= max_d4 and max_d1 >= 0 (min_green_p4 = {}, max_d4 = {}, max_d1 = {})",
                self.min_green_p4, self.max_d4, self.max_d1
            )));
        }
        for l in self.schedule.values() {
            if self.max_d4 + self.max_d1 >= l {
                return Err(Error::InfeasiblePlan(format!(
                    "max_d4 + max_d1 = {} leaves no coordination green in a {l} s cycle",
                    self.max_d4 + self.max_d1
                )));
            }
        }
        Ok(())
    }
}

/// Expected detections per cycle by time of day.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    pub side_street_rate: DailyProfile,
    pub left_turn_rate: DailyProfile,
    pub rng_seed: u64,
}

impl DemandProfile {
    pub fn none(rng_seed: u64) -> Self {
        DemandProfile {
            side_street_rate: DailyProfile::constant(0.0),
            left_turn_rate: DailyProfile::constant(0.0),
            rng_seed,
        }
    }

    /// Light off-peak demand with AM and PM peaks on the side street.
    pub fn peaked(rng_seed: u64) -> Self {
        DemandProfile {
            side_street_rate: DailyProfile::from_hours(&[
                (0.0, 7.0, 0.2),
                (7.0, 9.0, 1.5),
                (9.0, 16.0, 0.4),
                (16.0, 19.0, 2.0),
                (19.0, 24.0, 0.2),
            ])
            .expect("static profile"),
            left_turn_rate: DailyProfile::from_hours(&[
                (0.0, 7.0, 0.3),
                (7.0, 9.0, 1.0),
                (9.0, 16.0, 0.6),
                (16.0, 19.0, 1.2),
                (19.0, 24.0, 0.3),
            ])
            .expect("static profile"),
            rng_seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = |p: &DailyProfile| p.values().all(|v| v >= 0.0 && v.is_finite());
        if ok(&self.side_street_rate) && ok(&self.left_turn_rate) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "demand rates must be finite and non-negative".into(),
            ))
        }
    }
}

/// Everything needed to reproduce a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub site_id: String,
    pub start_ms: i64,
    pub plan: TimingPlan,
    pub demand: DemandProfile,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            site_id: "sim".into(),
            start_ms: 0,
            plan: TimingPlan::default(),
            demand: DemandProfile::peaked(0),
        }
    }
}

impl SimConfig {
    /// Parses the flat key-value format; unspecified keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SimConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line: n + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| err(format!("'{key}' expects a number, got '{v}'")))
            };
            let profile = |v: &str| v.parse::<DailyProfile>().map_err(|e| err(e.to_string()));
            match key {
                "site_id" => cfg.site_id = value.to_string(),
                "seed" => cfg.demand.rng_seed = value.parse().map_err(|_| err(format!("bad seed '{value}'")))?,
                "start_ms" => cfg.start_ms = value.parse().map_err(|_| err(format!("bad start_ms '{value}'")))?,
                "schedule" | "cycle_length" => cfg.plan.schedule = profile(value)?,
                "min_green_p4" => cfg.plan.min_green_p4 = num(value)?,
                "extension" => cfg.plan.extension = num(value)?,
                "max_d4" => cfg.plan.max_d4 = num(value)?,
                "max_d1" => cfg.plan.max_d1 = num(value)?,
                "side_street_rate" => cfg.demand.side_street_rate = profile(value)?,
                "left_turn_rate" => cfg.demand.left_turn_rate = profile(value)?,
                other => return Err(err(format!("unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }

    pub fn simulate(&self, n_cycles: usize) -> Result<CycleTable> {
        Simulator::new(self.plan.clone(), self.demand.clone())
            .site(self.site_id.clone())
            .starting_at(self.start_ms)
            .run(n_cycles)
    }
}

impl fmt::Display for SimConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "site_id = {}", self.site_id)?;
        writeln!(f, "seed = {}", self.demand.rng_seed)?;
        writeln!(f, "start_ms = {}", self.start_ms)?;
        writeln!(f, "schedule = {}", self.plan.schedule)?;
        writeln!(f, "min_green_p4 = {}", self.plan.min_green_p4)?;
        writeln!(f, "extension = {}", self.plan.extension)?;
        writeln!(f, "max_d4 = {}", self.plan.max_d4)?;
        writeln!(f, "max_d1 = {}", self.plan.max_d1)?;
        writeln!(f, "side_street_rate = {}", self.demand.side_street_rate)?;
        writeln!(f, "left_turn_rate = {}", self.demand.left_turn_rate)
    }
}

#[derive(Debug, Clone)]
pub struct Simulator {
    plan: TimingPlan,
    demand: DemandProfile,
    site_id: String,
    start_ms: i64,
    first_index: u64,
}

impl Simulator {
    pub fn new(plan: TimingPlan, demand: DemandProfile) -> Self {
        Simulator {
            plan,
            demand,
            site_id: "sim".into(),
            start_ms: 0,
            first_index: 0,
        }
    }

    pub fn site(mut self, site_id: impl Into<String>) -> Self {
        self.site_id = site_id.into();
        self
    }

    pub fn starting_at(mut self, start_ms: i64) -> Self {
        self.start_ms = start_ms;
        self
    }

    pub fn first_index(mut self, index: u64) -> Self {
        self.first_index = index;
        self
    }

    pub fn run(&self, n_cycles: usize) -> Result<CycleTable> {
        let mut records = Vec::with_capacity(n_cycles);
        self.run_until(|_, n| n < n_cycles, &mut records)?;
        if records.is_empty() {
            return Err(Error::InvalidArgument("n_cycles must be at least 1".into()));
        }
        CycleTable::new(self.site_id.clone(), records)
    }

    /// Simulates every cycle that starts before `end_ms`.
    pub fn run_until_ms(&self, end_ms: i64) -> Result<CycleTable> {
        let mut records = Vec::new();
        self.run_until(|start, _| start < end_ms, &mut records)?;
        CycleTable::new(self.site_id.clone(), records)
    }

    fn run_until(&self, mut keep_going: impl FnMut(i64, usize) -> bool, out: &mut Vec<CycleRecord>) -> Result<()> {
        self.plan.validate()?;
        self.demand.validate()?;
        let plan = &self.plan;
        let mut rng = ChaCha8Rng::seed_from_u64(self.demand.rng_seed);
        let mut start = self.start_ms;
        while keep_going(start, out.len()) {
            let l = plan.schedule.at_ms(start);
            let side = draw(&mut rng, self.demand.side_street_rate.at_ms(start));
            let left = self.demand.left_turn_rate.at_ms(start);
            let d4 = quantize((plan.min_green_p4 + plan.extension * side).min(plan.max_d4));
            let d1 = quantize((plan.extension * draw(&mut rng, left)).min(plan.max_d1));
            let d2 = quantize(l - d4 - d1);
            // Ring 2 only has to respect the barrier sums; the plan check
            // guarantees d6 > 0 at the caps so this never loops forever.
            let (d5, d6) = loop {
                let d5 = quantize((plan.extension * draw(&mut rng, left)).min(plan.max_d1));
                let d6 = quantize(d1 + d2 - d5);
                if d6 > 0.0 {
                    break (d5, d6);
                }
            };
            out.push(CycleRecord {
                cycle_index: self.first_index + out.len() as u64,
                cycle_start_ms: start,
                cycle_length: l,
                d4,
                d1,
                d2,
                d8: d4,
                d5,
                d6,
            });
            start += seconds_to_ms(l);
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, rate: f64) -> f64 {
    if rate <= 0.0 {
        return 0.0;
    }
    Poisson::new(rate).expect("positive finite rate").sample(rng)
}

/// Runs the controller model for `n_cycles` cycles starting at time zero.
pub fn simulate(plan: &TimingPlan, demand: &DemandProfile, n_cycles: usize) -> Result<CycleTable> {
    Simulator::new(plan.clone(), demand.clone()).run(n_cycles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_log::{emit_events, ingest_events, Phase};

    #[test]
    fn no_demand_gives_minimum_greens() {
        let table = simulate(&TimingPlan::fixed(120.0), &DemandProfile::none(1), 50).unwrap();
        assert_eq!(table.len(), 50);
        for r in table.records() {
            assert_eq!((r.d4, r.d1, r.d2), (36.0, 0.0, 84.0));
            assert_eq!((r.d8, r.d5, r.d6), (36.0, 0.0, 84.0));
        }
    }

    #[test]
    fn extension_rule_arithmetic() {
        // k = 2 side-street and m = 1 left-turn detections, caps loose.
        let plan = TimingPlan::fixed(120.0);
        let d4 = (plan.min_green_p4 + plan.extension * 2.0).min(plan.max_d4);
        let d1 = (plan.extension * 1.0).min(plan.max_d1);
        let d2 = 120.0 - d4 - d1;
        assert_eq!((d4, d1, d2), (46.0, 5.0, 69.0));
        assert_eq!(d4 + d1 + d2, 120.0);
    }

    #[test]
    fn records_satisfy_barriers_exactly() {
        let table = simulate(&TimingPlan::fixed(120.0), &DemandProfile::peaked(3), 2000).unwrap();
        for r in table.records() {
            assert_eq!(r.residuals().max(), 0.0, "{r:?}");
            assert!(r.d1 >= 0.0 && r.d5 >= 0.0 && r.d2 > 0.0 && r.d6 > 0.0);
            assert!(r.d4 >= 36.0 && r.d4 <= 60.0 && r.d1 <= 25.0);
        }
        assert!(table.validate(0.0).is_ok());
    }

    #[test]
    fn same_seed_same_table() {
        let a = simulate(&TimingPlan::default(), &DemandProfile::peaked(11), 500).unwrap();
        let b = simulate(&TimingPlan::default(), &DemandProfile::peaked(11), 500).unwrap();
        let c = simulate(&TimingPlan::default(), &DemandProfile::peaked(12), 500).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn schedule_switches_at_cycle_boundaries() {
        let cfg = SimConfig::parse("schedule = 00:00-01:00=100, 01:00-24:00=120\nseed = 2").unwrap();
        let table = cfg.simulate(60).unwrap();
        let lengths = table.cycle_lengths();
        assert_eq!(lengths, vec![100.0, 120.0]);
        // 36 cycles of 100 s fill the first hour exactly.
        assert!(table.records()[..36].iter().all(|r| r.cycle_length == 100.0));
        assert!(table.records()[36..].iter().all(|r| r.cycle_length == 120.0));
        assert!(table.validate(0.0).is_ok());
    }

    #[test]
    fn infeasible_caps_are_rejected() {
        let plan = TimingPlan {
            max_d4: 80.0,
            max_d1: 25.0,
            ..TimingPlan::fixed(100.0)
        };
        assert!(matches!(
            simulate(&plan, &DemandProfile::none(0), 1),
            Err(Error::InfeasiblePlan(_))
        ));
        let plan = TimingPlan {
            extension: 0.0,
            ..TimingPlan::default()
        };
        assert!(matches!(
            simulate(&plan, &DemandProfile::none(0), 1),
            Err(Error::InfeasiblePlan(_))
        ));
        assert!(simulate(&TimingPlan::default(), &DemandProfile::none(0), 0).is_err());
    }

    #[test]
    fn peaked_demand_has_an_atom_at_minimum_green() {
        let table = simulate(&TimingPlan::fixed(120.0), &DemandProfile::peaked(5), 5000).unwrap();
        let n = table.len() as f64;
        let share = |v: f64| table.records().iter().filter(|r| r.d4 == v).count() as f64 / n;
        assert!(share(36.0) > 0.5);
        assert!(share(36.0) > share(41.0) && share(41.0) > share(46.0) && share(46.0) > share(51.0));
        assert!(table.records().iter().any(|r| r.d1 == 0.0));
    }

    #[test]
    fn emitted_events_reingest_to_the_same_table() {
        let table = simulate(&TimingPlan::default(), &DemandProfile::peaked(9), 100).unwrap();
        let events = emit_events(&table);
        assert_eq!(events.len(), 1200);
        assert_eq!(events[0].phase, Phase::P4);
        let back = ingest_events("sim", &events, 0.05).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn config_round_trips_through_display() {
        let cfg = SimConfig {
            demand: DemandProfile::peaked(42),
            ..SimConfig::default()
        };
        let again = SimConfig::parse(&cfg.to_string()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        match SimConfig::parse("seed = 1\nbogus = 3\n") {
            Err(Error::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(SimConfig::parse("schedule = 00:00-12:00=120").is_err());
        assert!(SimConfig::parse("extension = five").is_err());
    }

    #[test]
    fn run_until_covers_whole_days() {
        let sim = Simulator::new(TimingPlan::fixed(120.0), DemandProfile::peaked(1)).starting_at(MS_PER_DAY);
        let day = sim.run_until_ms(2 * MS_PER_DAY).unwrap();
        assert_eq!(day.len(), 720);
        assert!(day.records().iter().all(|r| r.day() == 1));
    }
}
