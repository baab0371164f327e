//! Problem instances, schedules and schedule evaluation.
//!
//! A [`CurtailmentInstance`] holds, for every interval `t`, node `b` and
//! strategy `j`, the curtailment (kWh) and the cost of node `b` following
//! strategy `j` during `t`. A [`Schedule`] picks exactly one strategy per
//! (interval, node). Every solver in the crate consumes the former and
//! produces the latter; [`evaluate`] turns the pair into constraint
//! left-hand sides and violation factors.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Absolute tolerance (kWh) used for constraint comparisons unless a caller
/// supplies its own.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Per-node fairness budget `[lower_fraction * upper_budget, upper_budget]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub lower_fraction: f64,
    pub upper_budget: f64,
}

impl Budget {
    pub fn new(lower_fraction: f64, upper_budget: f64) -> Self {
        Self {
            lower_fraction,
            upper_budget,
        }
    }

    /// Lower end of the band, `alpha_b * B_b`.
    pub fn lower(&self) -> f64 {
        self.lower_fraction * self.upper_budget
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurtailmentInstance {
    pub num_nodes: usize,
    pub num_strategies: usize,
    pub num_intervals: usize,
    /// `[interval][node][strategy]`, kWh.
    pub curtailment: Vec<Vec<Vec<f64>>>,
    /// `[interval][node][strategy]`, same indexing as `curtailment`.
    pub cost: Vec<Vec<Vec<f64>>>,
    pub interval_targets: Vec<f64>,
    pub aggregate_cap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<Budget>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("shape mismatch in {field}: expected {expected}, found {found}")]
    ShapeMismatch {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("node {node} has no zero-curtailment zero-cost strategy in interval {interval}")]
    MissingDefaultStrategy { interval: usize, node: usize },
    #[error("interval targets sum to {sum} which exceeds the aggregate cap {cap}")]
    TargetsExceedCap { sum: f64, cap: f64 },
    #[error("negative or non-finite value {value} in {field}")]
    NegativeValue { field: String, value: f64 },
    #[error("invalid budget for node {node}: {reason}")]
    InvalidBudget { node: usize, reason: String },
}

/// Every violated invariant of an instance, in discovery order.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} validation error(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "; {e}")?;
        }
        Ok(())
    }
}

impl CurtailmentInstance {
    /// Check every invariant and return the instance unchanged when all hold.
    pub fn validate(self) -> Result<Self, ValidationErrors> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(self)
        } else {
            Err(ValidationErrors(errors))
        }
    }

    /// All violated invariants; empty when the instance is valid.
    pub fn validation_errors(&self) -> Vec<ValidationError> {
        let mut errors = Vec::new();
        let mut shape = |field: &str, expected: usize, found: usize| {
            if expected != found {
                errors.push(ValidationError::ShapeMismatch {
                    field: field.to_string(),
                    expected,
                    found,
                });
                false
            } else {
                true
            }
        };
        let mut shapes_ok = true;
        for (name, dim) in [
            ("num_nodes", self.num_nodes),
            ("num_strategies", self.num_strategies),
            ("num_intervals", self.num_intervals),
        ] {
            if dim == 0 {
                shapes_ok &= shape(name, 1, 0);
            }
        }
        for (name, grid) in [("curtailment", &self.curtailment), ("cost", &self.cost)] {
            shapes_ok &= shape(name, self.num_intervals, grid.len());
            for (t, rows) in grid.iter().enumerate() {
                shapes_ok &= shape(&format!("{name}[{t}]"), self.num_nodes, rows.len());
                for (b, row) in rows.iter().enumerate() {
                    shapes_ok &=
                        shape(&format!("{name}[{t}][{b}]"), self.num_strategies, row.len());
                }
            }
        }
        shape(
            "interval_targets",
            self.num_intervals,
            self.interval_targets.len(),
        );

        let mut negative = |field: String, value: f64| {
            if !(value.is_finite() && value >= 0.0) {
                errors.push(ValidationError::NegativeValue { field, value });
            }
        };
        for (name, grid) in [("curtailment", &self.curtailment), ("cost", &self.cost)] {
            for (t, rows) in grid.iter().enumerate() {
                for (b, row) in rows.iter().enumerate() {
                    for (j, &v) in row.iter().enumerate() {
                        negative(format!("{name}[{t}][{b}][{j}]"), v);
                    }
                }
            }
        }
        for (t, &g) in self.interval_targets.iter().enumerate() {
            negative(format!("interval_targets[{t}]"), g);
        }
        negative("aggregate_cap".to_string(), self.aggregate_cap);

        if shapes_ok {
            for t in 0..self.num_intervals {
                for b in 0..self.num_nodes {
                    let has_default = (0..self.num_strategies)
                        .any(|j| self.curtailment[t][b][j] == 0.0 && self.cost[t][b][j] == 0.0);
                    if !has_default {
                        errors.push(ValidationError::MissingDefaultStrategy {
                            interval: t,
                            node: b,
                        });
                    }
                }
            }
        }

        let sum: f64 = self.interval_targets.iter().sum();
        if sum > self.aggregate_cap + DEFAULT_TOLERANCE {
            errors.push(ValidationError::TargetsExceedCap {
                sum,
                cap: self.aggregate_cap,
            });
        }

        if let Some(budgets) = &self.budgets {
            if budgets.len() != self.num_nodes {
                errors.push(ValidationError::ShapeMismatch {
                    field: "budgets".to_string(),
                    expected: self.num_nodes,
                    found: budgets.len(),
                });
            }
            for (b, budget) in budgets.iter().enumerate() {
                let reason = if !(0.0..=1.0).contains(&budget.lower_fraction) {
                    Some(format!(
                        "lower_fraction {} outside [0, 1]",
                        budget.lower_fraction
                    ))
                } else if !(budget.upper_budget.is_finite() && budget.upper_budget >= 0.0) {
                    Some(format!("upper_budget {} is negative", budget.upper_budget))
                } else {
                    None
                };
                if let Some(reason) = reason {
                    errors.push(ValidationError::InvalidBudget { node: b, reason });
                }
            }
            let floors: f64 = budgets.iter().map(Budget::lower).sum();
            if floors > self.aggregate_cap + DEFAULT_TOLERANCE {
                errors.push(ValidationError::InvalidBudget {
                    node: 0,
                    reason: format!(
                        "budget floors sum to {floors}, above the aggregate cap {}",
                        self.aggregate_cap
                    ),
                });
            }
        }
        errors
    }

    /// Sum of all interval targets.
    pub fn total_target(&self) -> f64 {
        self.interval_targets.iter().sum()
    }

    /// Index of the cheapest zero-curtailment strategy of `(t, b)`, if any.
    pub fn default_strategy(&self, t: usize, b: usize) -> Option<usize> {
        (0..self.num_strategies)
            .filter(|&j| self.curtailment[t][b][j] == 0.0)
            .min_by(|&x, &y| self.cost[t][b][x].total_cmp(&self.cost[t][b][y]))
    }

    /// Schedule that puts every node on its default strategy.
    pub fn default_schedule(&self) -> Schedule {
        Schedule {
            assignment: (0..self.num_intervals)
                .map(|t| {
                    (0..self.num_nodes)
                        .map(|b| self.default_strategy(t, b).unwrap_or(0))
                        .collect()
                })
                .collect(),
        }
    }

    /// Sub-instance restricted to a contiguous range of intervals. The cap is
    /// the sum of the kept targets scaled by the original cap share; budgets
    /// are dropped.
    pub fn slice_intervals(&self, range: Range<usize>) -> CurtailmentInstance {
        let targets = self.interval_targets[range.clone()].to_vec();
        let share = if self.total_target() > 0.0 {
            targets.iter().sum::<f64>() / self.total_target()
        } else {
            0.0
        };
        CurtailmentInstance {
            num_nodes: self.num_nodes,
            num_strategies: self.num_strategies,
            num_intervals: range.len(),
            curtailment: self.curtailment[range.clone()].to_vec(),
            cost: self.cost[range].to_vec(),
            interval_targets: targets,
            aggregate_cap: self.aggregate_cap * share,
            budgets: None,
        }
    }
}

/// Strategy index per `[interval][node]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub assignment: Vec<Vec<usize>>,
}

impl Schedule {
    pub fn new(assignment: Vec<Vec<usize>>) -> Self {
        Self { assignment }
    }
}

/// A ratio that is undefined when its denominator is zero.
///
/// Serializes as a JSON number, or the string `"undefined"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Value(f64),
    Undefined,
}

impl Ratio {
    pub fn of(numerator: f64, denominator: f64) -> Self {
        if denominator == 0.0 {
            Ratio::Undefined
        } else {
            Ratio::Value(numerator / denominator)
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::Undefined => None,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Value(v) => write!(f, "{v}"),
            Ratio::Undefined => f.write_str("undefined"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Ratio::Value(v) => serializer.serialize_f64(*v),
            Ratio::Undefined => serializer.serialize_str("undefined"),
        }
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(Ratio::Value(v)),
            Repr::Str(s) if s == "undefined" => Ok(Ratio::Undefined),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"undefined\", found {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetFactors {
    /// achieved / (alpha_b * B_b)
    pub lower: Ratio,
    /// achieved / B_b
    pub upper: Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub total_cost: f64,
    pub per_interval_cost: Vec<f64>,
    pub per_interval_curtailment: Vec<f64>,
    pub aggregate_curtailment: f64,
    pub per_node_curtailment: Vec<f64>,
    pub target_violation_factors: Vec<Ratio>,
    pub cap_violation_factor: Ratio,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_violation_factors: Option<Vec<BudgetFactors>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvaluateError {
    #[error("schedule has {found} intervals, instance has {expected}")]
    IntervalCount { expected: usize, found: usize },
    #[error("schedule interval {interval} has {found} nodes, instance has {expected}")]
    NodeCount {
        interval: usize,
        expected: usize,
        found: usize,
    },
    #[error("strategy index {index} out of range at interval {interval}, node {node}")]
    IndexOutOfRange {
        interval: usize,
        node: usize,
        index: usize,
    },
}

/// Check that `schedule` has the instance's shape and valid strategy indices.
pub fn check_schedule(
    instance: &CurtailmentInstance,
    schedule: &Schedule,
) -> Result<(), EvaluateError> {
    if schedule.assignment.len() != instance.num_intervals {
        return Err(EvaluateError::IntervalCount {
            expected: instance.num_intervals,
            found: schedule.assignment.len(),
        });
    }
    for (t, row) in schedule.assignment.iter().enumerate() {
        if row.len() != instance.num_nodes {
            return Err(EvaluateError::NodeCount {
                interval: t,
                expected: instance.num_nodes,
                found: row.len(),
            });
        }
        for (b, &j) in row.iter().enumerate() {
            if j >= instance.num_strategies {
                return Err(EvaluateError::IndexOutOfRange {
                    interval: t,
                    node: b,
                    index: j,
                });
            }
        }
    }
    Ok(())
}

/// Compute cost, curtailment sums and violation factors of a schedule.
pub fn evaluate(
    instance: &CurtailmentInstance,
    schedule: &Schedule,
) -> Result<EvaluationReport, EvaluateError> {
    check_schedule(instance, schedule)?;
    let mut per_interval_cost = vec![0.0; instance.num_intervals];
    let mut per_interval = vec![0.0; instance.num_intervals];
    let mut per_node = vec![0.0; instance.num_nodes];
    for (t, row) in schedule.assignment.iter().enumerate() {
        for (b, &j) in row.iter().enumerate() {
            let gamma = instance.curtailment[t][b][j];
            per_interval_cost[t] += instance.cost[t][b][j];
            per_interval[t] += gamma;
            per_node[b] += gamma;
        }
    }
    let aggregate: f64 = per_interval.iter().sum();
    let target_violation_factors = per_interval
        .iter()
        .zip(&instance.interval_targets)
        .map(|(&achieved, &target)| Ratio::of(achieved, target))
        .collect();
    let budget_violation_factors = instance.budgets.as_ref().map(|budgets| {
        budgets
            .iter()
            .zip(&per_node)
            .map(|(budget, &achieved)| BudgetFactors {
                lower: Ratio::of(achieved, budget.lower()),
                upper: Ratio::of(achieved, budget.upper_budget),
            })
            .collect()
    });
    Ok(EvaluationReport {
        total_cost: per_interval_cost.iter().sum(),
        per_interval_cost,
        per_interval_curtailment: per_interval,
        aggregate_curtailment: aggregate,
        per_node_curtailment: per_node,
        target_violation_factors,
        cap_violation_factor: Ratio::of(aggregate, instance.aggregate_cap),
        budget_violation_factors,
    })
}

impl EvaluationReport {
    /// Smallest defined per-interval target factor; intervals with a zero
    /// target are skipped.
    pub fn worst_target_factor(&self) -> Option<f64> {
        self.target_violation_factors
            .iter()
            .filter_map(|r| r.value())
            .min_by(f64::total_cmp)
    }

    /// Largest defined `achieved / B_b` over nodes.
    pub fn worst_budget_upper_factor(&self) -> Option<f64> {
        self.budget_violation_factors
            .as_ref()?
            .iter()
            .filter_map(|f| f.upper.value())
            .max_by(f64::total_cmp)
    }

    /// Writes one CSV row per interval: index, target, achieved curtailment,
    /// target factor and interval cost.
    pub fn write_interval_csv<W: std::io::Write>(
        &self,
        instance: &CurtailmentInstance,
        writer: W,
    ) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["interval", "target", "curtailment", "target_factor", "cost"])?;
        for t in 0..self.per_interval_curtailment.len() {
            w.write_record([
                t.to_string(),
                instance.interval_targets[t].to_string(),
                self.per_interval_curtailment[t].to_string(),
                self.target_violation_factors[t].to_string(),
                self.per_interval_cost[t].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Outcome of a solver that may legitimately find no schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    Solved(T),
    Infeasible,
}

impl<T> Outcome<T> {
    pub fn solved(self) -> Option<T> {
        match self {
            Outcome::Solved(v) => Some(v),
            Outcome::Infeasible => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Outcome::Infeasible)
    }
}
