//! Empirical duration distributions on exact sample values.
//!
//! No binning or smoothing: a distribution is the multiset of observed
//! durations (0.01 s resolution) with one unit of mass per sample.
//! Conditioning events are strict (`X > t`).

use std::fmt;
use std::io;
use std::str::FromStr;

use crate::error::{check_probability, Error, Result};
use crate::phase_log::{stratum_key, CycleRecord, CycleTable, Phase, Ring};

/// Levels such as `c1 / (c1 + c2)` carry rounding error, so a count that
/// hits `level * n` exactly must not be missed by a few ulps.
const COUNT_SLACK: f64 = 1e-9;

/// A per-cycle quantity that can be fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Duration(Phase),
    /// Cross-street plus left-turn duration of one ring, summed per cycle.
    LeadPlusLeft(Ring),
}

impl Quantity {
    pub const D4: Quantity = Quantity::Duration(Phase::P4);
    pub const D1: Quantity = Quantity::Duration(Phase::P1);
    pub const D4_PLUS_D1: Quantity = Quantity::LeadPlusLeft(Ring::One);

    pub fn value(self, record: &CycleRecord) -> f64 {
        match self {
            Quantity::Duration(p) => record.duration(p),
            Quantity::LeadPlusLeft(ring) => {
                let [lead, left, _] = record.ring_durations(ring);
                lead + left
            }
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Duration(p) => write!(f, "d{}", &p.as_str()[1..]),
            Quantity::LeadPlusLeft(Ring::One) => f.write_str("d4+d1"),
            Quantity::LeadPlusLeft(Ring::Two) => f.write_str("d8+d5"),
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .to_ascii_lowercase();
        match s.as_str() {
            "d4+d1" | "d1+d4" => Ok(Quantity::LeadPlusLeft(Ring::One)),
            "d8+d5" | "d5+d8" => Ok(Quantity::LeadPlusLeft(Ring::Two)),
            _ => match s.strip_prefix('d') {
                Some(n) => format!("p{n}").parse().map(Quantity::Duration),
                None => Err(Error::InvalidArgument(format!("unknown quantity '{s}'"))),
            },
        }
    }
}

/// Which slice of the history a distribution was fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Provenance {
    #[default]
    AllData,
    Window {
        target_day: i64,
        delta_days: u32,
    },
}

/// Weighted sample set with exact cdf, quantile and conditioning queries.
///
/// Support values are kept sorted and distinct; `counts[i]` is the number of
/// samples equal to `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDist {
    values: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
    pub quantity: Option<Quantity>,
    pub stratum: Option<f64>,
    pub provenance: Provenance,
}

impl EmpiricalDist {
    pub fn from_samples<I: IntoIterator<Item = f64>>(samples: I) -> Result<Self> {
        let mut xs: Vec<f64> = samples.into_iter().collect();
        if xs.is_empty() {
            return Err(Error::EmptyInput("no samples"));
        }
        if let Some(bad) = xs.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "sample {bad} is not a non-negative duration"
            )));
        }
        xs.sort_unstable_by(f64::total_cmp);
        let mut values = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        for x in xs {
            match values.last() {
                Some(&v) if v == x => *counts.last_mut().unwrap() += 1,
                _ => {
                    values.push(x);
                    counts.push(1);
                }
            }
        }
        let total = counts.iter().sum();
        Ok(EmpiricalDist {
            values,
            counts,
            total,
            quantity: None,
            stratum: None,
            provenance: Provenance::AllData,
        })
    }

    /// One sample per cycle of a single-stratum table.
    pub fn fit(table: &CycleTable, quantity: Quantity) -> Result<Self> {
        let stratum = single_stratum(table)?;
        let mut dist = EmpiricalDist::from_samples(table.records().iter().map(|r| quantity.value(r)))?;
        dist.quantity = Some(quantity);
        dist.stratum = Some(stratum);
        Ok(dist)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    fn derived(&self, values: Vec<f64>, counts: Vec<u64>) -> EmpiricalDist {
        let total = counts.iter().sum();
        EmpiricalDist {
            values,
            counts,
            total,
            quantity: self.quantity,
            stratum: self.stratum,
            provenance: self.provenance,
        }
    }

    /// Number of samples.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn support(&self) -> &[f64] {
        &self.values
    }

    /// `(value, probability)` pairs in ascending value order.
    pub fn pdf(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.total as f64;
        self.values
            .iter()
            .zip(&self.counts)
            .map(move |(&v, &c)| (v, c as f64 / n))
    }

    /// Restricts to samples strictly greater than `t` and renormalizes.
    pub fn condition_gt(&self, t: f64) -> Result<EmpiricalDist> {
        let first = self.values.partition_point(|&v| v <= t);
        if first == self.values.len() {
            return Err(Error::EmptyCondition { t });
        }
        Ok(self.derived(self.values[first..].to_vec(), self.counts[first..].to_vec()))
    }

    /// Same distribution with one sample equal to `value` removed, or `None`
    /// if that would leave it empty or no such sample exists.
    pub fn without_one(&self, value: f64) -> Option<EmpiricalDist> {
        let i = self.values.iter().position(|&v| v == value)?;
        if self.total == 1 {
            return None;
        }
        let (mut values, mut counts) = (self.values.clone(), self.counts.clone());
        if counts[i] == 1 {
            values.remove(i);
            counts.remove(i);
        } else {
            counts[i] -= 1;
        }
        Some(self.derived(values, counts))
    }

    pub fn mean(&self) -> f64 {
        let sum: f64 = self.values.iter().zip(&self.counts).map(|(&v, &c)| v * c as f64).sum();
        sum / self.total as f64
    }

    /// `P(X <= d)`.
    pub fn cdf(&self, d: f64) -> f64 {
        let k = self.values.partition_point(|&v| v <= d);
        self.counts[..k].iter().sum::<u64>() as f64 / self.total as f64
    }

    /// `P(X >= d)`.
    pub fn survival_ge(&self, d: f64) -> f64 {
        let k = self.values.partition_point(|&v| v < d);
        self.counts[k..].iter().sum::<u64>() as f64 / self.total as f64
    }

    pub fn support_min(&self) -> f64 {
        self.values[0]
    }

    pub fn support_max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Largest support value `d` with `P(X >= d) >= alpha`: the duration the
    /// phase reaches with probability at least `alpha`.
    pub fn upper_quantile(&self, alpha: f64) -> Result<f64> {
        check_probability("alpha", alpha)?;
        let n = self.total as f64;
        let mut at_least = 0u64;
        for (&v, &c) in self.values.iter().zip(&self.counts).rev() {
            at_least += c;
            if at_least as f64 >= alpha * n - COUNT_SLACK {
                return Ok(v);
            }
        }
        Ok(self.values[0])
    }

    /// Smallest support value `d` with `P(X <= d) >= level`.
    pub fn lower_quantile(&self, level: f64) -> Result<f64> {
        check_probability("level", level)?;
        let n = self.total as f64;
        let mut at_most = 0u64;
        for (&v, &c) in self.values.iter().zip(&self.counts) {
            at_most += c;
            if at_most as f64 >= level * n - COUNT_SLACK {
                return Ok(v);
            }
        }
        Ok(self.support_max())
    }

    /// Writes `value,probability` rows.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["value", "probability"])?;
        for (v, p) in self.pdf() {
            w.write_record([format!("{v:.2}"), format!("{p:.6}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Histogram with bins `[k*width, (k+1)*width)` plus the cdf at each
    /// bin's upper edge. For plotting only.
    pub fn binned(&self, width: f64) -> Result<Vec<Bin>> {
        if width.is_nan() || width <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "bin width must be positive, got {width}"
            )));
        }
        let n = self.total as f64;
        let mut bins: Vec<Bin> = Vec::new();
        let mut cumulative = 0u64;
        for (&v, &c) in self.values.iter().zip(&self.counts) {
            let k = (v / width).floor() as i64;
            cumulative += c;
            match bins.last_mut() {
                Some(b) if b.index == k => {
                    b.probability += c as f64 / n;
                    b.cdf = cumulative as f64 / n;
                }
                _ => bins.push(Bin {
                    index: k,
                    lower: k as f64 * width,
                    upper: (k + 1) as f64 * width,
                    probability: c as f64 / n,
                    cdf: cumulative as f64 / n,
                }),
            }
        }
        Ok(bins)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    index: i64,
    pub lower: f64,
    pub upper: f64,
    pub probability: f64,
    pub cdf: f64,
}

pub(crate) fn single_stratum(table: &CycleTable) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::EmptyInput("cycle table"));
    }
    let lengths = table.cycle_lengths();
    if lengths.len() > 1 {
        return Err(Error::MixedStrata(lengths));
    }
    let key = stratum_key(table.records()[0].cycle_length);
    Ok(key as f64 / 10.0)
}

/// Per-cycle `(lead, left)` duration pairs of one ring, e.g. `(d4, d1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSamples {
    pairs: Vec<(f64, f64)>,
}

impl JointSamples {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyInput("no sample pairs"));
        }
        if pairs.iter().any(|(a, b)| !(*a >= 0.0 && *b >= 0.0)) {
            return Err(Error::InvalidArgument("pair components must be non-negative".into()));
        }
        Ok(JointSamples { pairs })
    }

    pub fn fit(table: &CycleTable, ring: Ring) -> Result<Self> {
        single_stratum(table)?;
        JointSamples::new(
            table
                .records()
                .iter()
                .map(|r| {
                    let [lead, left, _] = r.ring_durations(ring);
                    (lead, left)
                })
                .collect(),
        )
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    /// Distribution of `lead + left` over exactly the pairs with `lead > t`.
    pub fn condition_lead_gt(&self, t: f64) -> Result<EmpiricalDist> {
        let sums: Vec<f64> = self
            .pairs
            .iter()
            .filter(|(lead, _)| *lead > t)
            .map(|(a, b)| a + b)
            .collect();
        if sums.is_empty() {
            return Err(Error::EmptyCondition { t });
        }
        EmpiricalDist::from_samples(sums)
    }
}

/// Distribution of `d4 + d1` over the pairs with `d4 > t`.
pub fn condition_joint_gt_d4(joint: &JointSamples, t: f64) -> Result<EmpiricalDist> {
    joint.condition_lead_gt(t)
}
