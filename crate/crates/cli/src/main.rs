//! `spat`: simulate, ingest, fit, predict, evaluate and emit.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, CommandFactory, Parser, Subcommand};
use spat_core::{
    compare, compose, emit_events, ingest_events, predict_or_hold, predict_sum_approach1, predict_sum_approach2,
    read_events_csv, stream, write_events_csv, write_plot_data, CycleTable, EmpiricalDist, EvalConfig, EvalSet,
    JointSamples, MessageContext, Method, Metric, ModelSet, ModelSource, Phase, PhaseState, Prediction, Predictor,
    Quantity, SimConfig, Simulator, Speed, StratumModel, StreamConfig, Training, MS_PER_DAY,
};

const SCHEMAS: &str = "\
File formats:
  cycle CSV   cycle_index,cycle_start_ms,L_s,d4_s,d1_s,d2_s,d8_s,d5_s,d6_s
              (header required; durations in seconds, two decimals)
  event CSV   timestamp_ms,ring,phase,kind   e.g. 1000,1,p4,start
  NDJSON      one SPaT message per active phase per tick; see `spat emit --help`

Days are integers counted from the Unix epoch (cycle_start_ms / 86400000)
or calendar dates written YYYY-MM-DD.";

const SIM_CONFIG: &str = "\
Config file: one `key = value` per line, `#` starts a comment.
  site_id, seed, start_ms, schedule (alias cycle_length), min_green_p4,
  extension, max_d4, max_d1, side_street_rate, left_turn_rate
Rates and the schedule are a single number or time-of-day segments that
cover the whole day, e.g. `00:00-07:00=0.2, 07:00-24:00=1.5`.
Print the defaults with `spat simulate --print-config`.";

const NDJSON: &str = "\
Message fields, in order: ts_ms, site_id, cycle, phase, startTime,
minEndTime, maxEndTime, likelyTime, confidence_alpha, confidence_value,
nextTime, made_at, degraded. Times other than ts_ms are seconds from the
start of the cycle with two decimals.";

#[derive(Parser, Debug)]
#[command(name = "spat", version, about = "Signal phase and timing prediction", after_help = SCHEMAS)]
struct Cli {
    /// Worker threads for evaluation (default: all cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate synthetic cycles from the controller model
    #[command(after_help = SIM_CONFIG)]
    Simulate(SimulateArgs),
    /// Rebuild cycle records from a phase-event log
    Ingest(IngestArgs),
    /// Fit and summarize a duration distribution
    Fit(FitArgs),
    /// Predict the end of a phase that has been green for a while
    Predict(PredictArgs),
    /// Error curves of one or more predictors
    Evaluate(EvaluateArgs),
    /// Replay cycles as a stream of SPaT messages (NDJSON)
    #[command(after_help = NDJSON)]
    Emit(EmitArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Simulator config file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of cycles
    #[arg(long, conflicts_with = "days")]
    cycles: Option<usize>,
    /// Simulate whole days instead of a cycle count
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed cycle length in seconds, overriding the config schedule
    #[arg(long = "cycle-length", short = 'L', value_parser = positive_f64)]
    cycle_length: Option<f64>,
    #[arg(long)]
    site: Option<String>,
    /// Cycle CSV output (default: stdout)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the phase-event log
    #[arg(long)]
    events: Option<PathBuf>,
    /// Print the effective config and exit
    #[arg(long)]
    print_config: bool,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Event CSV (`-` for stdin)
    #[arg(short, long)]
    input: PathBuf,
    /// Cycle CSV output (default: stdout)
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "site")]
    site: String,
    /// Barrier tolerance in seconds
    #[arg(long, default_value_t = spat_core::DEFAULT_TOLERANCE_S, value_parser = non_negative_f64)]
    tolerance: f64,
}

/// Selects the cycles a model is fitted on.
#[derive(Args, Debug, Clone)]
struct DataArgs {
    /// Cycle CSV (`-` for stdin)
    #[arg(short, long)]
    input: PathBuf,
    /// Cycle length stratum in seconds (required when the data has several)
    #[arg(long = "cycle-length", short = 'L', value_parser = positive_f64)]
    cycle_length: Option<f64>,
    /// Target day; with --delta, fit on the days before it
    #[arg(long, value_parser = parse_day)]
    day: Option<i64>,
    /// Window length in days (14, 60 and 120 are common choices)
    #[arg(long, requires = "day", value_parser = clap::value_parser!(u32).range(1..))]
    delta: Option<u32>,
}

/// Point-prediction method. --alpha and --c1/--c2 are shorthands.
#[derive(Args, Debug, Clone)]
struct MethodArgs {
    /// expectation | median | confidence:<alpha> | asymmetric:<c1>:<c2>
    #[arg(long, value_parser = parse_method, conflicts_with_all = ["alpha", "c1", "c2"])]
    method: Option<Method>,
    /// Confidence level in (0, 1)
    #[arg(long, value_parser = parse_alpha, conflicts_with_all = ["c1", "c2"])]
    alpha: Option<f64>,
    /// Cost per second of predicting too early
    #[arg(long, value_parser = positive_f64, requires = "c2")]
    c1: Option<f64>,
    /// Cost per second of predicting too late
    #[arg(long, value_parser = positive_f64, requires = "c1")]
    c2: Option<f64>,
}

impl MethodArgs {
    fn method(&self) -> Method {
        if let Some(m) = self.method {
            m
        } else if let Some(a) = self.alpha {
            Method::Confidence(a)
        } else if let (Some(c1), Some(c2)) = (self.c1, self.c2) {
            Method::Asymmetric { c1, c2 }
        } else {
            Method::Expectation
        }
    }
}

#[derive(Args, Debug)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    /// d4, d1, d2, d8, d5, d6, d4+d1 or d8+d5
    #[arg(long, default_value = "d4", value_parser = parse_quantity)]
    quantity: Quantity,
    /// Write the distribution as `value,probability` CSV
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write a binned pdf/cdf (`lower,upper,probability,cdf`) for plotting
    #[arg(long)]
    plot_data: Option<PathBuf>,
    /// Bin width in seconds for --plot-data
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    bin_width: f64,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = parse_phase)]
    phase: Phase,
    /// Seconds since the start of the cycle
    #[arg(long, value_parser = non_negative_f64)]
    t: f64,
    /// When the phase turned green, in seconds since the start of the cycle
    /// (lead phases start at 0)
    #[arg(long, value_parser = non_negative_f64)]
    start: Option<f64>,
    #[command(flatten)]
    method: MethodArgs,
    /// Predict the lead plus left-turn sum; 1 conditions on the sum, 2 on the
    /// lead phase
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    sum_approach: Option<u8>,
    /// Print a SPaT message instead of a bare prediction
    #[arg(long)]
    message: bool,
    /// Seconds added to the elapsed time when a phase outlives its history
    #[arg(long, default_value_t = spat_core::DEFAULT_HOLD_S, value_parser = positive_f64)]
    hold: f64,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Cycle CSV (`-` for stdin)
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long = "cycle-length", short = 'L', value_parser = positive_f64)]
    cycle_length: Option<f64>,
    #[arg(long, default_value = "d4", value_parser = parse_quantity)]
    quantity: Quantity,
    /// Comma-separated methods, e.g. expectation,confidence:0.8
    #[arg(long, default_value = "expectation", value_delimiter = ',', value_parser = parse_method)]
    compare: Vec<Method>,
    /// Comma-separated metrics: mae, mse, loss (weights from --c1/--c2) or loss:<c1>:<c2>
    #[arg(long, default_value = "mae,mse,loss", value_delimiter = ',')]
    metric: Vec<String>,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    c1: f64,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    c2: f64,
    /// For sums: 1 conditions on the sum, 2 (default) on the lead phase
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    sum_approach: u8,
    /// Leave each cycle out of its own prediction
    #[arg(long, conflicts_with = "split_day")]
    loo: bool,
    /// Train on days before this one and evaluate on the rest
    #[arg(long, value_parser = parse_day)]
    split_day: Option<i64>,
    /// Grid step in seconds (at least 0.1)
    #[arg(long, default_value_t = 1.0, value_parser = parse_step)]
    step: f64,
    #[arg(long, default_value_t = spat_core::DEFAULT_HOLD_S, value_parser = positive_f64)]
    hold: f64,
    /// Long-format CSV `t,predictor,metric,value,n` (default: stdout)
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write a binned pdf/cdf of the quantity
    #[arg(long)]
    plot_data: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, value_parser = positive_f64)]
    bin_width: f64,
}

#[derive(Args, Debug)]
struct EmitArgs {
    /// Cycles to replay; without it, cycles are simulated (see --seed)
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Fit models on this file instead of the replayed cycles
    #[arg(long, conflicts_with = "delta")]
    train: Option<PathBuf>,
    /// Refit every day on the previous DELTA days of the input
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    delta: Option<u32>,
    /// Replay only this day
    #[arg(long, value_parser = parse_day)]
    day: Option<i64>,
    /// Simulation seed when no input is given
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cycles to simulate for training and again for replay when no input is given
    #[arg(long, default_value_t = 720, value_parser = clap::value_parser!(u64).range(1..))]
    cycles: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(spat_core::MIN_CADENCE_MS..))]
    cadence_ms: u64,
    /// inf (as fast as possible), realtime, or a multiple of real time such as 10x
    #[arg(long, default_value = "inf", value_parser = parse_speed)]
    speed: Speed,
    #[arg(long, default_value_t = 0.8, value_parser = parse_alpha)]
    alpha: f64,
    #[arg(long, default_value_t = spat_core::DEFAULT_HOLD_S, value_parser = positive_f64)]
    hold: f64,
    /// NDJSON output (default: stdout)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

fn non_negative_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got '{s}'")),
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        _ => Err(format!("alpha must lie strictly between 0 and 1, got '{s}'")),
    }
}

fn parse_step(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.1 && v.is_finite() => Ok(v),
        _ => Err(format!("grid step must be at least 0.1 s, got '{s}'")),
    }
}

fn parse_day(s: &str) -> Result<i64, String> {
    if let Ok(d) = s.parse::<i64>() {
        return Ok(d);
    }
    let date = NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| format!("expected a day number or YYYY-MM-DD, got '{s}'"))?;
    Ok(date.signed_duration_since(NaiveDate::default()).num_days())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: spat_core::Error| e.to_string())
}

fn parse_quantity(s: &str) -> Result<Quantity, String> {
    s.parse().map_err(|e: spat_core::Error| e.to_string())
}

fn parse_phase(s: &str) -> Result<Phase, String> {
    s.parse().map_err(|e: spat_core::Error| e.to_string())
}

fn parse_speed(s: &str) -> Result<Speed, String> {
    s.parse().map_err(|e: spat_core::Error| e.to_string())
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        return Ok(Box::new(io::stdin().lock()));
    }
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(Box::new(BufReader::new(f)))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let f = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn read_cycles(path: &Path) -> Result<CycleTable> {
    let site = path.file_stem().and_then(|s| s.to_str()).unwrap_or("site").to_string();
    let table = CycleTable::read_csv(site, open_input(path)?).with_context(|| format!("reading {}", path.display()))?;
    table
        .validate(spat_core::DEFAULT_TOLERANCE_S)
        .with_context(|| format!("validating {}", path.display()))?;
    Ok(table)
}

/// Picks the stratum: the requested cycle length, or the only one present.
fn stratum(table: &CycleTable, cycle_length: Option<f64>) -> Result<CycleTable> {
    let l = match cycle_length {
        Some(l) => l,
        None => match table.cycle_lengths().as_slice() {
            [l] => *l,
            [] => bail!("no cycles in input"),
            many => bail!("input has several cycle lengths {many:?}; pick one with --cycle-length"),
        },
    };
    Ok(table.stratify(l)?)
}

impl DataArgs {
    fn load(&self) -> Result<CycleTable> {
        let table = read_cycles(&self.input)?;
        let table = match (self.day, self.delta) {
            (Some(day), Some(delta)) => table.window(day, delta)?,
            (Some(day), None) => table.days(day..day + 1),
            _ => table,
        };
        stratum(&table, self.cycle_length)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.into()).build_global() {
            eprintln!("spat: error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Ingest(a) => ingest(a),
        Command::Fit(a) => fit(a),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Emit(a) => emit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spat: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            SimConfig::parse(&text).with_context(|| format!("in {}", p.display()))?
        }
        None => SimConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.demand.rng_seed = seed;
    }
    if let Some(l) = a.cycle_length {
        cfg.plan.schedule = spat_core::DailyProfile::constant(l);
    }
    if let Some(site) = a.site {
        cfg.site_id = site;
    }
    if a.print_config {
        print!("{cfg}");
        return Ok(());
    }
    let sim = Simulator::new(cfg.plan.clone(), cfg.demand.clone())
        .site(cfg.site_id.clone())
        .starting_at(cfg.start_ms);
    let table = match (a.cycles, a.days) {
        (_, Some(days)) => sim.run_until_ms(cfg.start_ms + days as i64 * MS_PER_DAY)?,
        (n, None) => sim.run(n.unwrap_or(1000))?,
    };
    if let Some(p) = &a.events {
        let mut w = open_output(Some(p))?;
        write_events_csv(&emit_events(&table), &mut w)?;
        w.flush()?;
    }
    let mut w = open_output(a.output.as_deref())?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn ingest(a: IngestArgs) -> Result<()> {
    let events = read_events_csv(open_input(&a.input)?).with_context(|| format!("reading {}", a.input.display()))?;
    let table = ingest_events(a.site, &events, a.tolerance)?;
    eprintln!("{} events -> {} cycles", events.len(), table.len());
    let mut w = open_output(a.output.as_deref())?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn fit(a: FitArgs) -> Result<()> {
    let table = a.data.load()?;
    let dist = EmpiricalDist::fit(&table, a.quantity)?;
    let summary = serde_json::json!({
        "quantity": a.quantity.to_string(),
        "cycle_length": dist.stratum,
        "samples": dist.len(),
        "distinct": dist.support().len(),
        "mean": dist.mean(),
        "min": dist.support_min(),
        "max": dist.support_max(),
    });
    if let Some(p) = &a.output {
        let mut w = open_output(Some(p))?;
        dist.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.plot_data {
        let mut w = open_output(Some(p))?;
        write_plot_data(&dist, a.bin_width, &mut w)?;
        w.flush()?;
    }
    println!("{summary}");
    Ok(())
}

fn predict(a: PredictArgs) -> Result<()> {
    let start = match (a.phase.slot(), a.start) {
        (0, s) => s.unwrap_or(0.0),
        (_, Some(s)) => s,
        (_, None) => Cli::command()
            .error(
                clap::error::ErrorKind::MissingRequiredArgument,
                format!("--start is required for {}", a.phase),
            )
            .exit(),
    };
    let table = a.data.load()?;
    let state = PhaseState::new(a.phase, start, a.t)?;
    if a.message {
        let model = StratumModel::fit(&table)?;
        let alpha = match a.method.method() {
            Method::Confidence(alpha) => alpha,
            _ => 0.8,
        };
        let ctx = MessageContext {
            site_id: table.site_id.clone(),
            ..MessageContext::default()
        };
        print!("{}", compose(&ctx, &model, state, alpha, a.hold)?.to_line());
        return Ok(());
    }
    let method = a.method.method();
    let elapsed = state.elapsed();
    let ring = a.phase.ring();
    let prediction: Prediction = match a.sum_approach {
        Some(approach) => {
            if a.phase.slot() != 0 {
                bail!("sum predictions are made while the lead phase is green; use a lead phase");
            }
            let hold = |r: spat_core::Result<Prediction>| match r {
                Err(spat_core::Error::EmptyCondition { .. }) => Ok(Prediction::hold(
                    elapsed,
                    method,
                    Some(Quantity::LeadPlusLeft(ring)),
                    a.hold,
                )),
                other => other,
            };
            if approach == 1 {
                let sums = EmpiricalDist::fit(&table, Quantity::LeadPlusLeft(ring))?;
                hold(predict_sum_approach1(&sums, elapsed, method))?
            } else {
                hold(predict_sum_approach2(
                    &JointSamples::fit(&table, ring)?,
                    elapsed,
                    method,
                ))?
            }
        }
        None => {
            let dist = EmpiricalDist::fit(&table, Quantity::Duration(a.phase))?;
            predict_or_hold(&dist, elapsed, method, a.hold)?
        }
    };
    println!("{}", serde_json::to_string(&prediction)?);
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let table = stratum(&read_cycles(&a.input)?, a.cycle_length)?;
    let metrics = a
        .metric
        .iter()
        .map(|m| match m.trim() {
            "loss" => Ok(Metric::Loss { c1: a.c1, c2: a.c2 }),
            other => other.parse::<Metric>().map_err(anyhow::Error::from),
        })
        .collect::<Result<Vec<_>>>()?;
    let predictors: Vec<Predictor> = a
        .compare
        .iter()
        .map(|&m| match (a.quantity, a.sum_approach) {
            (Quantity::LeadPlusLeft(_), 2) => Predictor::on_observed(m).named(m.to_string()),
            _ => Predictor::new(m),
        })
        .collect();
    let eval_set = |t: &CycleTable| match a.quantity {
        Quantity::LeadPlusLeft(ring) => EvalSet::phase_sum(t, ring),
        q => EvalSet::scalar(t, q),
    };
    let cfg = EvalConfig {
        step: a.step,
        hold: a.hold,
    };
    let comparison = match a.split_day {
        Some(day) => {
            let first = table.first_day().unwrap_or(day);
            let last = table.last_day().unwrap_or(day);
            let train = eval_set(&table.days(first..day));
            let test = eval_set(&table.days(day..last + 1));
            if train.is_empty() || test.is_empty() {
                bail!(
                    "--split-day {day} leaves no training or no evaluation cycles (data covers days {first}..={last})"
                );
            }
            compare(&predictors, &metrics, Training::Holdout(&train), &test, &cfg)?
        }
        None => compare(
            &predictors,
            &metrics,
            Training::InSample { leave_one_out: a.loo },
            &eval_set(&table),
            &cfg,
        )?,
    };
    if let Some(p) = &a.plot_data {
        let mut w = open_output(Some(p))?;
        write_plot_data(&EmpiricalDist::fit(&table, a.quantity)?, a.bin_width, &mut w)?;
        w.flush()?;
    }
    let mut w = open_output(a.output.as_deref())?;
    comparison.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn emit(a: EmitArgs) -> Result<()> {
    let (replay, history) = match &a.input {
        Some(p) => {
            let table = read_cycles(p)?;
            let replay = match a.day {
                Some(d) => table.days(d..d + 1),
                None => table.clone(),
            };
            (replay, table)
        }
        None => {
            let sim = Simulator::new(
                spat_core::TimingPlan::default(),
                spat_core::DemandProfile::peaked(a.seed),
            )
            .site("sim");
            let all = sim.run(2 * a.cycles as usize)?;
            let records = all.into_records();
            let (train, replay) = records.split_at(a.cycles as usize);
            let history = CycleTable::new("sim", train.to_vec())?;
            let replay = CycleTable::new("sim", replay.to_vec())?;
            (replay, history)
        }
    };
    if replay.is_empty() {
        bail!("nothing to replay");
    }
    let source = match (&a.train, a.delta) {
        (Some(p), _) => ModelSource::Fixed(ModelSet::fit(&read_cycles(p)?)?),
        (None, Some(delta)) => ModelSource::Sliding {
            history,
            delta_days: delta,
        },
        (None, None) => ModelSource::Fixed(ModelSet::fit(&history)?),
    };
    let cfg = StreamConfig {
        cadence_ms: a.cadence_ms,
        speed: a.speed,
        alpha: a.alpha,
        hold: a.hold,
    };
    let summary = stream(&replay, &source, cfg, open_output(a.output.as_deref())?)?;
    if summary.skipped_cycles > 0 {
        eprintln!("skipped {} cycles with no fitted model", summary.skipped_cycles);
    }
    Ok(())
}
