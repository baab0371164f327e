//! Seeded synthetic instances for load curtailment and PV curtailment.
//!
//! Load mode: each (node, interval) gets the zero default plus five
//! curtailments drawn log-uniformly from `load_range`, then all values are
//! rescaled so the tightest interval can curtail exactly twice its target. PV mode: each node
//! gets a panel area and yield; an hour's output `O` (kWh) is split evenly
//! over its four 15-minute intervals and each interval offers the fractions
//! `0, 1/8, 1/4, 1/2, 3/4, 1` of that share.
//!
//! Interval targets split the lower total `L` at random and the aggregate cap
//! is the upper total `U`. PV targets are clipped to 90% of what the nodes can
//! curtail in the interval, and the cap shrinks by the same proportion.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fair::proportional_budgets;
use crate::model::CurtailmentInstance;

pub const PV_FRACTIONS: [f64; 6] = [0.0, 0.125, 0.25, 0.5, 0.75, 1.0];
pub const INTERVALS_PER_HOUR: usize = 4;
pub const REFERENCE_AREA: (f64, f64) = (10.0, 20.0);
pub const REFERENCE_YIELD: (f64, f64) = (0.05, 0.15);
const LOAD_STRATEGIES: usize = 6;
const TARGET_HEADROOM: f64 = 0.9;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("radiance trace has {available} hours, horizon needs {needed}")]
    TraceTooShort { needed: usize, available: usize },
    #[error("interval {interval} has no PV output to curtail")]
    NoOutput { interval: usize },
    #[error("invalid scenario: {0}")]
    InvalidSpec(String),
    #[error("radiance trace: {0}")]
    Trace(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioMode {
    Load,
    Solar,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostShape {
    Linear,
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostFunction {
    pub shape: CostShape,
    pub coefficient: f64,
}

impl CostFunction {
    pub fn apply(&self, gamma: f64) -> f64 {
        match self.shape {
            CostShape::Linear => self.coefficient * gamma,
            CostShape::Quadratic => self.coefficient * gamma * gamma,
        }
    }
}

impl Default for CostFunction {
    fn default() -> Self {
        Self {
            shape: CostShape::Quadratic,
            coefficient: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub nodes: usize,
    pub intervals: usize,
    pub mode: ScenarioMode,
    /// `(L, U)` in kWh.
    pub target_range: (f64, f64),
    /// m².
    pub area_range: (f64, f64),
    pub yield_range: (f64, f64),
    /// W/m² indexed by hour of day; a clear-sky curve when absent.
    pub radiance: Option<Vec<f64>>,
    pub start_hour: usize,
    /// Spread of load curtailments before rescaling to the targets.
    pub load_range: (f64, f64),
    pub cost: CostFunction,
    /// Curtailments are rounded to multiples of this many kWh; 0 disables.
    pub resolution: f64,
    /// Attach budgets proportional to node capacity with this lower fraction.
    pub alpha: Option<f64>,
    /// Reject PV parameters outside the reference ranges.
    pub enforce_reference_ranges: bool,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            nodes: 20,
            intervals: 16,
            mode: ScenarioMode::Load,
            target_range: (500.0, 1000.0),
            area_range: REFERENCE_AREA,
            yield_range: REFERENCE_YIELD,
            radiance: None,
            start_hour: 10,
            load_range: (1.0, 25.0),
            cost: CostFunction::default(),
            resolution: 0.01,
            alpha: None,
            enforce_reference_ranges: false,
        }
    }
}

impl ScenarioSpec {
    fn check(&self) -> Result<(), ScenarioError> {
        let bad = |m: String| Err(ScenarioError::InvalidSpec(m));
        let (l, u) = self.target_range;
        if self.nodes == 0 || self.intervals == 0 {
            return bad("nodes and intervals must be positive".into());
        }
        if !(l > 0.0 && l <= u && u.is_finite()) {
            return bad(format!("target range ({l}, {u}) needs 0 < L <= U"));
        }
        let ordered = |(a, b): (f64, f64)| a <= b && a >= 0.0 && b.is_finite();
        if !ordered(self.area_range) || !ordered(self.yield_range) {
            return bad("area and yield ranges must be ordered and non-negative".into());
        }
        let (lo, hi) = self.load_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("load range ({lo}, {hi}) needs 0 < low <= high"));
        }
        if !(self.resolution >= 0.0 && self.resolution.is_finite()) {
            return bad(format!(
                "resolution {} must be non-negative",
                self.resolution
            ));
        }
        if !(self.cost.coefficient > 0.0 && self.cost.coefficient.is_finite()) {
            return bad("cost coefficient must be positive".into());
        }
        if let Some(alpha) = self.alpha {
            if !(0.0..=1.0).contains(&alpha) {
                return bad(format!("alpha {alpha} outside [0, 1]"));
            }
        }
        if self.enforce_reference_ranges {
            let within = |(a, b): (f64, f64), (ra, rb): (f64, f64)| a >= ra && b <= rb;
            if !within(self.area_range, REFERENCE_AREA)
                || !within(self.yield_range, REFERENCE_YIELD)
            {
                return bad("PV parameters outside the reference ranges".into());
            }
        }
        Ok(())
    }

    fn quantize(&self, x: f64) -> f64 {
        if self.resolution > 0.0 {
            (x / self.resolution).round() * self.resolution
        } else {
            x
        }
    }
}

/// Hourly PV energy in kWh from radiance (W/m²), area (m²) and yield.
pub fn hourly_pv_output(radiance: f64, area: f64, panel_yield: f64) -> f64 {
    radiance * area * panel_yield / 1000.0
}

/// The six PV curtailment options for an output `o`.
pub fn pv_strategies(o: f64) -> [f64; 6] {
    PV_FRACTIONS.map(|f| f * o)
}

/// 24-hour clear-sky curve peaking at 1000 W/m² at noon, dark outside 6..18.
pub fn clear_sky_trace() -> Vec<f64> {
    (0..24)
        .map(|h| {
            if h > 6 && h < 18 {
                1000.0 * (std::f64::consts::PI * (h as f64 - 6.0) / 12.0).sin()
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Deserialize)]
struct TraceRow {
    hour: usize,
    wm2: f64,
}

/// Read an `hour,wm2` CSV. Hours must cover `0..n` exactly once each.
pub fn read_radiance_csv<R: std::io::Read>(reader: R) -> Result<Vec<f64>, ScenarioError> {
    let mut rows: Vec<TraceRow> = csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<Result<_, _>>()?;
    rows.sort_by_key(|r| r.hour);
    for (i, row) in rows.iter().enumerate() {
        if row.hour != i {
            return Err(ScenarioError::Trace(format!(
                "expected hour {i}, found {}",
                row.hour
            )));
        }
        if !(row.wm2 >= 0.0 && row.wm2.is_finite()) {
            return Err(ScenarioError::Trace(format!(
                "hour {i} has radiance {}",
                row.wm2
            )));
        }
    }
    Ok(rows.into_iter().map(|r| r.wm2).collect())
}

fn split_targets(rng: &mut ChaCha8Rng, total: f64, intervals: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..intervals).map(|_| rng.gen_range(0.5..1.5)).collect();
    let sum: f64 = weights.iter().sum();
    let mut targets: Vec<f64> = weights.iter().map(|w| total * w / sum).collect();
    let head: f64 = targets[..intervals - 1].iter().sum();
    targets[intervals - 1] = total - head;
    targets
}

fn assemble(
    spec: &ScenarioSpec,
    curtailment: Vec<Vec<Vec<f64>>>,
    interval_targets: Vec<f64>,
    aggregate_cap: f64,
) -> CurtailmentInstance {
    let cost = curtailment
        .iter()
        .map(|nodes| {
            nodes
                .iter()
                .map(|row| row.iter().map(|&g| spec.cost.apply(g)).collect())
                .collect()
        })
        .collect();
    let mut instance = CurtailmentInstance {
        num_nodes: spec.nodes,
        num_strategies: curtailment[0][0].len(),
        num_intervals: spec.intervals,
        curtailment,
        cost,
        interval_targets,
        aggregate_cap,
        budgets: None,
    };
    if let Some(alpha) = spec.alpha {
        instance.budgets = Some(proportional_budgets(&instance, alpha));
    }
    instance
}

pub fn generate_load(spec: &ScenarioSpec) -> Result<CurtailmentInstance, ScenarioError> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = (spec.load_range.0.ln(), spec.load_range.1.ln());
    let mut raw: Vec<Vec<Vec<f64>>> = (0..spec.intervals)
        .map(|_| {
            (0..spec.nodes)
                .map(|_| {
                    let mut row: Vec<f64> = (1..LOAD_STRATEGIES)
                        .map(|_| rng.gen_range(lo..=hi).exp())
                        .collect();
                    row.sort_by(f64::total_cmp);
                    row.insert(0, 0.0);
                    row
                })
                .collect()
        })
        .collect();
    // Separate stream: the target profile does not depend on the node count.
    let mut target_rng = ChaCha8Rng::seed_from_u64(spec.seed);
    target_rng.set_stream(2);
    let targets = split_targets(&mut target_rng, spec.target_range.0, spec.intervals);
    // Scale so the tightest interval can cover exactly twice its target.
    let scale = raw
        .iter()
        .zip(&targets)
        .map(|(nodes, &target)| {
            let capacity: f64 = nodes.iter().map(|row| row[LOAD_STRATEGIES - 1]).sum();
            2.0 * target / capacity
        })
        .fold(0.0, f64::max);
    for row in raw.iter_mut().flatten() {
        for g in row.iter_mut() {
            *g = spec.quantize(*g * scale);
        }
    }
    Ok(assemble(spec, raw, targets, spec.target_range.1))
}

pub fn generate_solar(spec: &ScenarioSpec) -> Result<CurtailmentInstance, ScenarioError> {
    spec.check()?;
    let default_trace;
    let trace = match &spec.radiance {
        Some(t) => t,
        None => {
            default_trace = clear_sky_trace();
            &default_trace
        }
    };
    let hours = spec.intervals.div_ceil(INTERVALS_PER_HOUR);
    if spec.start_hour + hours > trace.len() {
        return Err(ScenarioError::TraceTooShort {
            needed: spec.start_hour + hours,
            available: trace.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let panels: Vec<(f64, f64)> = (0..spec.nodes)
        .map(|_| {
            (
                rng.gen_range(spec.area_range.0..=spec.area_range.1),
                rng.gen_range(spec.yield_range.0..=spec.yield_range.1),
            )
        })
        .collect();
    let curtailment: Vec<Vec<Vec<f64>>> = (0..spec.intervals)
        .map(|t| {
            let radiance = trace[spec.start_hour + t / INTERVALS_PER_HOUR];
            panels
                .iter()
                .map(|&(area, y)| {
                    let share = hourly_pv_output(radiance, area, y) / INTERVALS_PER_HOUR as f64;
                    pv_strategies(share)
                        .iter()
                        .map(|&g| spec.quantize(g))
                        .collect()
                })
                .collect()
        })
        .collect();
    let (l, u) = spec.target_range;
    let mut targets = split_targets(&mut rng, l, spec.intervals);
    for (t, target) in targets.iter_mut().enumerate() {
        let capacity: f64 = curtailment[t]
            .iter()
            .map(|row| row[PV_FRACTIONS.len() - 1])
            .sum();
        if capacity <= 0.0 {
            return Err(ScenarioError::NoOutput { interval: t });
        }
        *target = target.min(TARGET_HEADROOM * capacity);
    }
    let kept: f64 = targets.iter().sum();
    Ok(assemble(spec, curtailment, targets, u * kept / l))
}

/// Instances for the requested mode, labelled by kind; mixed mode yields one
/// of each.
pub fn generate(
    spec: &ScenarioSpec,
) -> Result<Vec<(ScenarioMode, CurtailmentInstance)>, ScenarioError> {
    match spec.mode {
        ScenarioMode::Load => Ok(vec![(ScenarioMode::Load, generate_load(spec)?)]),
        ScenarioMode::Solar => Ok(vec![(ScenarioMode::Solar, generate_solar(spec)?)]),
        ScenarioMode::Mixed => Ok(vec![
            (ScenarioMode::Load, generate_load(spec)?),
            (ScenarioMode::Solar, generate_solar(spec)?),
        ]),
    }
}
