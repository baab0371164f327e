//! Memoryless single-interval heuristic for when only the current interval's
//! target and strategies are known.
//!
//! Horizon-level quantities (total target, aggregate cap, node budgets) come
//! from a past horizon and are pro-rated to the current target. Strategies
//! outside a node's pro-rated band are dropped, then a single rounded node
//! table picks the cheapest combination whose curtailment lands between the
//! current target and the pro-rated cap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dp::{reconstruct_interval, rounded_units, NodeOption, ThetaTable, MAX_TABLE_CELLS};
use crate::model::{
    evaluate, Budget, CurtailmentInstance, EvaluateError, EvaluationReport, Outcome, Schedule,
    DEFAULT_TOLERANCE,
};

const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OnlineError {
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("invalid step: {0}")]
    InvalidStep(String),
    #[error("epsilon {0} outside (0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("node table would need {cells} cells (limit {limit})")]
    TableTooLarge { cells: usize, limit: usize },
    #[error("internal table inconsistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Evaluate(#[from] EvaluateError),
}

/// Quantities observed over a past horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineContext {
    pub total_target: f64,
    pub aggregate_cap: f64,
    pub budgets: Vec<Budget>,
}

impl OnlineContext {
    pub fn validate(&self) -> Result<(), OnlineError> {
        if !(self.total_target > 0.0 && self.total_target.is_finite()) {
            return Err(OnlineError::InvalidContext(format!(
                "total target {} must be positive",
                self.total_target
            )));
        }
        if !(self.aggregate_cap + DEFAULT_TOLERANCE >= self.total_target) {
            return Err(OnlineError::InvalidContext(format!(
                "cap {} is below the total target {}",
                self.aggregate_cap, self.total_target
            )));
        }
        for (b, budget) in self.budgets.iter().enumerate() {
            if !(0.0..=1.0).contains(&budget.lower_fraction) || !(budget.upper_budget >= 0.0) {
                return Err(OnlineError::InvalidContext(format!(
                    "node {b} has budget {budget:?}"
                )));
            }
        }
        Ok(())
    }

    /// Context taken from a full instance, which must carry budgets.
    pub fn from_instance(instance: &CurtailmentInstance) -> Result<Self, OnlineError> {
        let budgets = instance
            .budgets
            .clone()
            .ok_or_else(|| OnlineError::InvalidContext("instance has no budgets".into()))?;
        Ok(Self {
            total_target: instance.total_target(),
            aggregate_cap: instance.aggregate_cap,
            budgets,
        })
    }
}

/// The current interval's target and `[node][strategy]` matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineStep {
    pub target: f64,
    pub curtailment: Vec<Vec<f64>>,
    pub cost: Vec<Vec<f64>>,
}

impl OnlineStep {
    pub fn from_instance(instance: &CurtailmentInstance, t: usize) -> Self {
        Self {
            target: instance.interval_targets[t],
            curtailment: instance.curtailment[t].clone(),
            cost: instance.cost[t].clone(),
        }
    }

    fn validate(&self, nodes: usize) -> Result<(), OnlineError> {
        let bad = |msg: String| Err(OnlineError::InvalidStep(msg));
        if !(self.target >= 0.0 && self.target.is_finite()) {
            return bad(format!("target {} must be non-negative", self.target));
        }
        if self.curtailment.len() != nodes || self.cost.len() != nodes {
            return bad(format!(
                "expected {nodes} node rows, found {} curtailment and {} cost rows",
                self.curtailment.len(),
                self.cost.len()
            ));
        }
        let width = self.curtailment.first().map_or(0, Vec::len);
        if width == 0 {
            return bad("nodes need at least one strategy".into());
        }
        for (b, (g, c)) in self.curtailment.iter().zip(&self.cost).enumerate() {
            if g.len() != width || c.len() != width {
                return bad(format!("node {b} rows do not have {width} strategies"));
            }
            if g.iter().chain(c).any(|v| !(*v >= 0.0 && v.is_finite())) {
                return bad(format!("node {b} has a negative or non-finite value"));
            }
        }
        Ok(())
    }
}

/// Pro-rated cap and per-node bands for one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineBounds {
    pub lower_target: f64,
    pub upper_target: f64,
    /// `(lower, upper)` per node.
    pub node_bands: Vec<(f64, f64)>,
}

pub fn derive_online_bounds(ctx: &OnlineContext, step: &OnlineStep) -> OnlineBounds {
    OnlineBounds {
        lower_target: step.target,
        upper_target: ctx.aggregate_cap / ctx.total_target * step.target,
        node_bands: ctx
            .budgets
            .iter()
            .map(|b| (b.lower(), b.upper_budget / ctx.total_target * step.target))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnlineOptions {
    pub epsilon: f64,
    /// Drop zero-curtailment strategies that fall below a node's lower bound
    /// instead of always keeping them.
    pub strict_filter: bool,
}

impl OnlineOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            strict_filter: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineAssignment {
    pub strategies: Vec<usize>,
    pub cost: f64,
    pub curtailment: f64,
    pub per_node_curtailment: Vec<f64>,
    pub bounds: OnlineBounds,
}

fn in_band(g: f64, (lo, hi): (f64, f64)) -> bool {
    let slack = |x: f64| DEFAULT_TOLERANCE * x.abs().max(1.0);
    g >= lo - slack(lo) && g <= hi + slack(hi)
}

/// Strategy indices of each node that survive band filtering.
pub fn filter_strategies(
    step: &OnlineStep,
    bounds: &OnlineBounds,
    strict: bool,
) -> Vec<Vec<usize>> {
    step.curtailment
        .iter()
        .zip(&bounds.node_bands)
        .map(|(row, &band)| {
            (0..row.len())
                .filter(|&j| in_band(row[j], band) || (!strict && row[j] == 0.0))
                .collect()
        })
        .collect()
}

pub fn solve_online(
    ctx: &OnlineContext,
    step: &OnlineStep,
    options: &OnlineOptions,
) -> Result<Outcome<OnlineAssignment>, OnlineError> {
    if !(options.epsilon > 0.0 && options.epsilon <= 1.0) {
        return Err(OnlineError::EpsilonOutOfRange(options.epsilon));
    }
    ctx.validate()?;
    let m = ctx.budgets.len();
    step.validate(m)?;
    let bounds = derive_online_bounds(ctx, step);
    let kept = filter_strategies(step, &bounds, options.strict_filter);
    if kept.iter().any(Vec::is_empty) {
        return Ok(Outcome::Infeasible);
    }
    let finish = |strategies: Vec<usize>| {
        let per_node: Vec<f64> = strategies
            .iter()
            .enumerate()
            .map(|(b, &j)| step.curtailment[b][j])
            .collect();
        OnlineAssignment {
            cost: strategies
                .iter()
                .enumerate()
                .map(|(b, &j)| step.cost[b][j])
                .sum(),
            curtailment: per_node.iter().sum(),
            per_node_curtailment: per_node,
            strategies,
            bounds: bounds.clone(),
        }
    };

    if step.target <= DEFAULT_TOLERANCE {
        // Nothing to curtail: cheapest zero-curtailment survivor per node.
        let mut strategies = Vec::with_capacity(m);
        for (b, js) in kept.iter().enumerate() {
            let pick = js
                .iter()
                .copied()
                .filter(|&j| step.curtailment[b][j] == 0.0)
                .min_by(|&x, &y| step.cost[b][x].total_cmp(&step.cost[b][y]).then(x.cmp(&y)));
            match pick {
                Some(j) => strategies.push(j),
                None => return Ok(Outcome::Infeasible),
            }
        }
        return Ok(Outcome::Solved(finish(strategies)));
    }

    let mu = options.epsilon * step.target / m as f64;
    let mut slack = 0.0;
    let node_options: Vec<Vec<NodeOption>> = kept
        .iter()
        .enumerate()
        .map(|(b, js)| {
            let opts: Vec<NodeOption> = js
                .iter()
                .map(|&j| NodeOption {
                    strategy: j,
                    rounded: rounded_units(step.curtailment[b][j], mu),
                    cost: step.cost[b][j],
                })
                .collect();
            slack += opts
                .iter()
                .map(|o| (o.rounded as f64 - step.curtailment[b][o.strategy] / mu).max(0.0))
                .fold(0.0, f64::max);
            opts
        })
        .collect();
    let floor = rounded_units(step.target, mu);
    let cap = rounded_units(bounds.upper_target, mu)
        .max((bounds.upper_target / mu + slack + SNAP).floor() as usize);
    let cells = (cap + 1).saturating_mul(m);
    if cells > MAX_TABLE_CELLS {
        return Err(OnlineError::TableTooLarge {
            cells,
            limit: MAX_TABLE_CELLS,
        });
    }
    let theta = ThetaTable::build(node_options, cap);
    let best = theta
        .candidates(floor)
        .into_iter()
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let Some(best) = best else {
        return Ok(Outcome::Infeasible);
    };
    let strategies =
        reconstruct_interval(&theta, best, 0).map_err(|e| OnlineError::Internal(e.to_string()))?;
    Ok(Outcome::Solved(finish(strategies)))
}

/// Per-interval results of running the heuristic across a whole instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineHorizon {
    /// Infeasible intervals fall back to each node's default strategy.
    pub schedule: Schedule,
    pub infeasible_intervals: Vec<usize>,
    pub steps: Vec<Option<OnlineAssignment>>,
    pub report: EvaluationReport,
}

pub fn run_online_horizon(
    instance: &CurtailmentInstance,
    ctx: &OnlineContext,
    options: &OnlineOptions,
) -> Result<OnlineHorizon, OnlineError> {
    let mut assignment = Vec::with_capacity(instance.num_intervals);
    let mut steps = Vec::with_capacity(instance.num_intervals);
    let mut infeasible_intervals = Vec::new();
    for t in 0..instance.num_intervals {
        let step = OnlineStep::from_instance(instance, t);
        match solve_online(ctx, &step, options)? {
            Outcome::Solved(a) => {
                assignment.push(a.strategies.clone());
                steps.push(Some(a));
            }
            Outcome::Infeasible => {
                infeasible_intervals.push(t);
                let defaults = (0..instance.num_nodes)
                    .map(|b| instance.default_strategy(t, b).unwrap_or(0))
                    .collect();
                assignment.push(defaults);
                steps.push(None);
            }
        }
    }
    let schedule = Schedule::new(assignment);
    let report = evaluate(instance, &schedule)?;
    Ok(OnlineHorizon {
        schedule,
        infeasible_intervals,
        steps,
        report,
    })
}
