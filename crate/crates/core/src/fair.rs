//! Minimum-cost balancing with per-node fairness budgets.
//!
//! The 0-1 program is relaxed to `0 <= x <= 1`, solved with the in-crate
//! simplex, and each (node, interval) is rounded independently: its expected
//! curtailment `sum_j gamma_j x_j` is moved to the nearer of the two strategy
//! curtailments bracketing it, rounding up at the midpoint.
//!
//! Rounding up only happens when the expected value is at least half the upper
//! bracket, so upper-side constraints (aggregate cap, node budgets) grow by at
//! most a factor of two, and the cost by at most two (linear costs) or four
//! (quadratic costs) relative to the relaxation optimum. Lower-side
//! constraints lose at most a factor `k` when consecutive positive strategy
//! curtailments satisfy `gamma_{i+1} <= (2k - 1) gamma_i`; rounding a positive
//! expected value down to a zero strategy voids that bound.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    evaluate, Budget, CurtailmentInstance, EvaluateError, EvaluationReport, Schedule,
    DEFAULT_TOLERANCE,
};
use crate::simplex::{
    solve_lp, LinearProgram, LpError, LpSolution, LpStatus, Relation, FEASIBILITY_TOL,
};

/// Relative slack allowed when asserting the rounding guarantees.
const GUARANTEE_TOL: f64 = 1e-6;

/// Reachable-sum states explored per node before the integral budget check
/// gives up.
pub const DEFAULT_REACH_STATES: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Linear,
    Quadratic,
    Custom,
}

impl CostKind {
    /// Classify the instance's costs as `a * gamma`, `a * gamma^2`, or neither.
    pub fn detect(instance: &CurtailmentInstance) -> CostKind {
        let mut linear: Option<f64> = None;
        let mut quadratic: Option<f64> = None;
        let mut is_linear = true;
        let mut is_quadratic = true;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12);
        for t in 0..instance.num_intervals {
            for b in 0..instance.num_nodes {
                for j in 0..instance.num_strategies {
                    let g = instance.curtailment[t][b][j];
                    let c = instance.cost[t][b][j];
                    if g == 0.0 {
                        if c != 0.0 {
                            return CostKind::Custom;
                        }
                        continue;
                    }
                    let a1 = c / g;
                    let a2 = c / (g * g);
                    is_linear &= *linear.get_or_insert(a1) == a1 || close(linear.unwrap(), a1);
                    is_quadratic &=
                        *quadratic.get_or_insert(a2) == a2 || close(quadratic.unwrap(), a2);
                }
            }
        }
        if is_linear {
            CostKind::Linear
        } else if is_quadratic {
            CostKind::Quadratic
        } else {
            CostKind::Custom
        }
    }

    /// Worst-case ratio of rounded cost to the relaxation optimum.
    pub fn cost_factor(self) -> Option<f64> {
        match self {
            CostKind::Linear => Some(2.0),
            CostKind::Quadratic => Some(4.0),
            CostKind::Custom => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairnessConfig {
    pub budgets: Vec<Budget>,
    pub cost_kind: CostKind,
}

impl FairnessConfig {
    pub fn from_instance(
        instance: &CurtailmentInstance,
        cost_kind: CostKind,
    ) -> Result<Self, FairError> {
        let budgets = instance.budgets.clone().ok_or(FairError::MissingBudgets)?;
        if budgets.len() != instance.num_nodes {
            return Err(FairError::InvalidConfig(format!(
                "{} budgets for {} nodes",
                budgets.len(),
                instance.num_nodes
            )));
        }
        for (b, budget) in budgets.iter().enumerate() {
            if !(0.0..=1.0).contains(&budget.lower_fraction) || !(budget.upper_budget >= 0.0) {
                return Err(FairError::InvalidConfig(format!(
                    "node {b} has budget {budget:?}"
                )));
            }
        }
        let floors: f64 = budgets.iter().map(Budget::lower).sum();
        if floors > instance.aggregate_cap + DEFAULT_TOLERANCE {
            return Err(FairError::InvalidConfig(format!(
                "budget floors {floors} exceed the aggregate cap {}",
                instance.aggregate_cap
            )));
        }
        Ok(Self { budgets, cost_kind })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FairError {
    #[error("instance has no fairness budgets")]
    MissingBudgets,
    #[error("invalid fairness configuration: {0}")]
    InvalidConfig(String),
    #[error("the relaxation is infeasible: budgets and targets contradict each other")]
    LpInfeasible,
    #[error("node {node} cannot reach its budget band with any strategy sequence")]
    BudgetUnreachable { node: usize },
    #[error("relaxation returned status {0:?}")]
    NotOptimal(LpStatus),
    #[error("rounding guarantee violated: {0}")]
    GuaranteeViolated(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Evaluate(#[from] EvaluateError),
}

impl FairError {
    /// Errors that mean no fair schedule exists, as opposed to bad input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            FairError::LpInfeasible | FairError::BudgetUnreachable { .. }
        )
    }
}

/// Column of `x_bj(t)` in the relaxation.
pub fn var_index(instance: &CurtailmentInstance, t: usize, b: usize, j: usize) -> usize {
    (t * instance.num_nodes + b) * instance.num_strategies + j
}

/// The relaxation: interval targets, aggregate cap, per-node budget band and
/// one-strategy rows over `x in [0, 1]`, minimizing total cost.
const LOWER_BUDGET_ROW: &str = "budget_lo_";

pub fn build_fair_relaxation(instance: &CurtailmentInstance) -> Result<LinearProgram, FairError> {
    let budgets = instance.budgets.as_ref().ok_or(FairError::MissingBudgets)?;
    let (m, n, nt) = (
        instance.num_nodes,
        instance.num_strategies,
        instance.num_intervals,
    );
    let mut objective = vec![0.0; m * n * nt];
    let mut names = Vec::with_capacity(objective.len());
    for t in 0..nt {
        for b in 0..m {
            for j in 0..n {
                objective[var_index(instance, t, b, j)] = instance.cost[t][b][j];
                names.push(format!("x_{t}_{b}_{j}"));
            }
        }
    }
    let mut lp = LinearProgram::new(objective).with_bounds(0.0, 1.0);
    lp.names = names;
    let gamma = |t: usize, b: usize, j: usize| instance.curtailment[t][b][j];

    for t in 0..nt {
        let terms = (0..m)
            .flat_map(|b| (0..n).map(move |j| (b, j)))
            .map(|(b, j)| (var_index(instance, t, b, j), gamma(t, b, j)))
            .collect();
        lp.add_row(
            format!("target_{t}"),
            terms,
            Relation::Ge,
            instance.interval_targets[t],
        );
    }
    let all: Vec<(usize, f64)> = (0..nt)
        .flat_map(|t| (0..m).flat_map(move |b| (0..n).map(move |j| (t, b, j))))
        .map(|(t, b, j)| (var_index(instance, t, b, j), gamma(t, b, j)))
        .collect();
    lp.add_row("cap", all, Relation::Le, instance.aggregate_cap);
    for (b, budget) in budgets.iter().enumerate() {
        let terms: Vec<(usize, f64)> = (0..nt)
            .flat_map(|t| (0..n).map(move |j| (t, j)))
            .map(|(t, j)| (var_index(instance, t, b, j), gamma(t, b, j)))
            .collect();
        lp.add_row(
            format!("{LOWER_BUDGET_ROW}{b}"),
            terms.clone(),
            Relation::Ge,
            budget.lower(),
        );
        lp.add_row(
            format!("budget_hi_{b}"),
            terms,
            Relation::Le,
            budget.upper_budget,
        );
    }
    for t in 0..nt {
        for b in 0..m {
            let terms = (0..n)
                .map(|j| (var_index(instance, t, b, j), 1.0))
                .collect();
            lp.add_row(format!("one_{t}_{b}"), terms, Relation::Eq, 1.0);
        }
    }
    Ok(lp)
}

/// Solve the relaxation with lower budget rows added lazily: an optimum of
/// the program without them that already satisfies them is optimal for the
/// full program. Slack lower budgets therefore never move the chosen vertex.
pub fn solve_relaxation(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let mut relaxed = lp.clone();
    relaxed
        .rows
        .retain(|r| !r.name.starts_with(LOWER_BUDGET_ROW));
    if relaxed.rows.len() == lp.rows.len() {
        return solve_lp(lp);
    }
    let first = solve_lp(&relaxed)?;
    match first.status {
        LpStatus::Optimal if lp.is_feasible(&first.values, FEASIBILITY_TOL) => Ok(first),
        LpStatus::Infeasible => Ok(first),
        _ => solve_lp(lp),
    }
}

/// Outcome of rounding one (node, interval).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundingStep {
    pub expected: f64,
    pub lower: f64,
    pub upper: f64,
    pub chosen: usize,
    pub chosen_curtailment: f64,
}

/// Pick the strategy nearest to `expected` among `(curtailment, cost)` pairs.
/// Equal curtailments collapse onto the cheaper (then lower-index) strategy,
/// exact hits take that strategy, and midpoint ties round up.
pub fn nearest_strategy(strategies: &[(f64, f64)], expected: f64, tol: f64) -> RoundingStep {
    let mut order: Vec<usize> = (0..strategies.len()).collect();
    order.sort_by(|&x, &y| {
        strategies[x]
            .0
            .total_cmp(&strategies[y].0)
            .then(strategies[x].1.total_cmp(&strategies[y].1))
            .then(x.cmp(&y))
    });
    order.dedup_by(|later, earlier| strategies[*later].0 == strategies[*earlier].0);
    let value = |k: usize| strategies[order[k]].0;
    let step = |lower: usize, upper: usize, pick: usize| RoundingStep {
        expected,
        lower: value(lower),
        upper: value(upper),
        chosen: order[pick],
        chosen_curtailment: value(pick),
    };
    if let Some(k) = (0..order.len()).find(|&k| (value(k) - expected).abs() <= tol) {
        return step(k, k, k);
    }
    let last = order.len() - 1;
    if expected <= value(0) {
        return step(0, 0, 0);
    }
    if expected >= value(last) {
        return step(last, last, last);
    }
    let i = (0..last)
        .find(|&k| value(k) <= expected && expected <= value(k + 1))
        .expect("expected lies strictly inside the strategy range");
    let pick = if expected - value(i) >= value(i + 1) - expected {
        i + 1
    } else {
        i
    };
    step(i, i + 1, pick)
}

/// Expected curtailment of `(t, b)` under a fractional solution.
pub fn expected_curtailment(
    instance: &CurtailmentInstance,
    values: &[f64],
    t: usize,
    b: usize,
) -> f64 {
    (0..instance.num_strategies)
        .map(|j| instance.curtailment[t][b][j] * values[var_index(instance, t, b, j)].max(0.0))
        .sum()
}

/// Round every (node, interval) of a fractional solution; steps are returned
/// `[interval][node]` alongside the schedule.
pub fn round_with_steps(
    instance: &CurtailmentInstance,
    fractional: &LpSolution,
) -> Result<(Schedule, Vec<Vec<RoundingStep>>), FairError> {
    if fractional.status != LpStatus::Optimal {
        return Err(FairError::NotOptimal(fractional.status));
    }
    let mut assignment = Vec::with_capacity(instance.num_intervals);
    let mut steps = Vec::with_capacity(instance.num_intervals);
    for t in 0..instance.num_intervals {
        let mut row = Vec::with_capacity(instance.num_nodes);
        let mut step_row = Vec::with_capacity(instance.num_nodes);
        for b in 0..instance.num_nodes {
            let expected = expected_curtailment(instance, &fractional.values, t, b);
            let strategies: Vec<(f64, f64)> = (0..instance.num_strategies)
                .map(|j| (instance.curtailment[t][b][j], instance.cost[t][b][j]))
                .collect();
            let step = nearest_strategy(&strategies, expected, DEFAULT_TOLERANCE);
            row.push(step.chosen);
            step_row.push(step);
        }
        assignment.push(row);
        steps.push(step_row);
    }
    Ok((Schedule::new(assignment), steps))
}

pub fn round_fair_solution(
    instance: &CurtailmentInstance,
    fractional: &LpSolution,
) -> Result<Schedule, FairError> {
    round_with_steps(instance, fractional).map(|(s, _)| s)
}

/// Smallest `k` with `gamma_{i+1} <= (2k - 1) gamma_i` for every consecutive
/// pair of distinct positive strategy curtailments; 1 when no such pair
/// exists.
pub fn spacing_factor(instance: &CurtailmentInstance) -> f64 {
    let mut k: f64 = 1.0;
    for t in 0..instance.num_intervals {
        for b in 0..instance.num_nodes {
            let mut values: Vec<f64> = instance.curtailment[t][b]
                .iter()
                .copied()
                .filter(|&g| g > 0.0)
                .collect();
            values.sort_by(f64::total_cmp);
            values.dedup();
            for pair in values.windows(2) {
                k = k.max((pair[1] / pair[0] + 1.0) / 2.0);
            }
        }
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reachability {
    Reachable,
    Unreachable,
    /// The state budget ran out before a decision.
    Unknown,
}

/// Whether some strategy sequence of node `b` puts its horizon total inside
/// `[lo, hi]`. Every interval offers a zero strategy, so any prefix landing in
/// the band completes to a full sequence.
pub fn budget_reachable(
    instance: &CurtailmentInstance,
    b: usize,
    lo: f64,
    hi: f64,
    tol: f64,
    max_states: usize,
) -> Reachability {
    if lo <= tol {
        return Reachability::Reachable;
    }
    let mut sums = vec![0.0f64];
    for t in 0..instance.num_intervals {
        let mut values: Vec<f64> = instance.curtailment[t][b]
            .iter()
            .copied()
            .filter(|&g| g > 0.0 && g <= hi + tol)
            .collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let mut next = sums.clone();
        for &s in &sums {
            for &v in &values {
                let total = s + v;
                if total > hi + tol {
                    break;
                }
                if total >= lo - tol {
                    return Reachability::Reachable;
                }
                next.push(total);
            }
        }
        next.sort_by(f64::total_cmp);
        next.dedup_by(|later, earlier| *later - *earlier <= tol);
        if next.len() > max_states {
            return Reachability::Unknown;
        }
        sums = next;
    }
    Reachability::Unreachable
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairOptions {
    /// Detected from the costs when absent.
    pub cost_kind: Option<CostKind>,
    /// Reject instances where some node provably cannot reach its band.
    pub integral_budget_check: bool,
    pub reach_states: usize,
}

impl Default for FairOptions {
    fn default() -> Self {
        Self {
            cost_kind: None,
            integral_budget_check: true,
            reach_states: DEFAULT_REACH_STATES,
        }
    }
}

/// Evaluation of a rounded schedule plus the quantities its guarantees are
/// stated against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FairReport {
    pub evaluation: EvaluationReport,
    pub cost_kind: CostKind,
    pub lp_optimum: f64,
    pub cost_ratio: crate::model::Ratio,
    pub worst_target_factor: Option<f64>,
    pub cap_factor: crate::model::Ratio,
    pub worst_budget_upper_factor: Option<f64>,
    pub worst_budget_lower_factor: Option<f64>,
    /// Percent by which each node exceeds its upper budget (0 when within).
    pub budget_overshoot_pct: Vec<f64>,
    /// Percent by which each interval falls short of its target (0 when met).
    pub target_undershoot_pct: Vec<f64>,
    pub spacing_k: f64,
    /// False when some positive expected curtailment was rounded to a zero
    /// strategy, which voids the lower-side bound.
    pub lower_side_guaranteed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FairSolution {
    pub schedule: Schedule,
    pub report: FairReport,
    pub fractional: LpSolution,
    pub steps: Vec<Vec<RoundingStep>>,
}

/// Relax, solve, round and evaluate.
pub fn solve_fair(
    instance: &CurtailmentInstance,
    options: &FairOptions,
) -> Result<FairSolution, FairError> {
    let cost_kind = options
        .cost_kind
        .unwrap_or_else(|| CostKind::detect(instance));
    let config = FairnessConfig::from_instance(instance, cost_kind)?;
    if options.integral_budget_check {
        for (b, budget) in config.budgets.iter().enumerate() {
            let reach = budget_reachable(
                instance,
                b,
                budget.lower(),
                budget.upper_budget,
                DEFAULT_TOLERANCE,
                options.reach_states,
            );
            if reach == Reachability::Unreachable {
                return Err(FairError::BudgetUnreachable { node: b });
            }
        }
    }
    let fractional = solve_relaxation(&build_fair_relaxation(instance)?)?;
    match fractional.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(FairError::LpInfeasible),
        status => return Err(FairError::NotOptimal(status)),
    }
    let (schedule, steps) = round_with_steps(instance, &fractional)?;
    let evaluation = evaluate(instance, &schedule)?;
    let lower_side_guaranteed = steps
        .iter()
        .flatten()
        .all(|s| s.expected <= DEFAULT_TOLERANCE || s.chosen_curtailment > 0.0);
    let report = FairReport {
        cost_kind,
        lp_optimum: fractional.objective,
        cost_ratio: crate::model::Ratio::of(evaluation.total_cost, fractional.objective),
        worst_target_factor: evaluation.worst_target_factor(),
        cap_factor: evaluation.cap_violation_factor,
        worst_budget_upper_factor: evaluation.worst_budget_upper_factor(),
        worst_budget_lower_factor: evaluation.budget_violation_factors.as_ref().and_then(|f| {
            f.iter()
                .filter_map(|x| x.lower.value())
                .min_by(f64::total_cmp)
        }),
        budget_overshoot_pct: evaluation
            .budget_violation_factors
            .as_ref()
            .map(|f| {
                f.iter()
                    .map(|x| x.upper.value().map_or(0.0, |v| (v - 1.0).max(0.0) * 100.0))
                    .collect()
            })
            .unwrap_or_default(),
        target_undershoot_pct: evaluation
            .target_violation_factors
            .iter()
            .map(|r| r.value().map_or(0.0, |v| (1.0 - v).max(0.0) * 100.0))
            .collect(),
        spacing_k: spacing_factor(instance),
        lower_side_guaranteed,
        evaluation,
    };
    check_guarantees(instance, &config, &report)?;
    Ok(FairSolution {
        schedule,
        report,
        fractional,
        steps,
    })
}

fn check_guarantees(
    instance: &CurtailmentInstance,
    config: &FairnessConfig,
    report: &FairReport,
) -> Result<(), FairError> {
    let within =
        |value: f64, bound: f64| value <= bound * (1.0 + GUARANTEE_TOL) + DEFAULT_TOLERANCE;
    let eval = &report.evaluation;
    if let Some(factor) = config.cost_kind.cost_factor() {
        if !within(eval.total_cost, factor * report.lp_optimum) {
            return Err(FairError::GuaranteeViolated(format!(
                "cost {} exceeds {factor} x relaxation optimum {}",
                eval.total_cost, report.lp_optimum
            )));
        }
    }
    if !within(eval.aggregate_curtailment, 2.0 * instance.aggregate_cap) {
        return Err(FairError::GuaranteeViolated(format!(
            "aggregate {} exceeds twice the cap {}",
            eval.aggregate_curtailment, instance.aggregate_cap
        )));
    }
    for (b, (budget, &achieved)) in config
        .budgets
        .iter()
        .zip(&eval.per_node_curtailment)
        .enumerate()
    {
        if !within(achieved, 2.0 * budget.upper_budget) {
            return Err(FairError::GuaranteeViolated(format!(
                "node {b} curtails {achieved}, above twice its budget {}",
                budget.upper_budget
            )));
        }
    }
    if report.lower_side_guaranteed {
        let k = report.spacing_k;
        for (t, (&achieved, &target)) in eval
            .per_interval_curtailment
            .iter()
            .zip(&instance.interval_targets)
            .enumerate()
        {
            if !within(target / k, achieved) {
                return Err(FairError::GuaranteeViolated(format!(
                    "interval {t} achieves {achieved}, below target {target} / {k}"
                )));
            }
        }
    }
    Ok(())
}

/// Budgets proportional to each node's horizon capacity (sum over intervals
/// of its largest strategy curtailment), scaled to total the aggregate cap.
pub fn proportional_budgets(instance: &CurtailmentInstance, alpha: f64) -> Vec<Budget> {
    let capacity: Vec<f64> = (0..instance.num_nodes)
        .map(|b| {
            (0..instance.num_intervals)
                .map(|t| {
                    instance.curtailment[t][b]
                        .iter()
                        .copied()
                        .fold(0.0, f64::max)
                })
                .sum()
        })
        .collect();
    let total: f64 = capacity.iter().sum();
    capacity
        .iter()
        .map(|&c| {
            let share = if total > 0.0 { c / total } else { 0.0 };
            Budget::new(alpha, share * instance.aggregate_cap)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_node(budgets: Option<Vec<Budget>>) -> CurtailmentInstance {
        CurtailmentInstance {
            num_nodes: 2,
            num_strategies: 2,
            num_intervals: 1,
            curtailment: vec![vec![vec![0.0, 5.0], vec![0.0, 4.0]]],
            cost: vec![vec![vec![0.0, 50.0], vec![0.0, 32.0]]],
            interval_targets: vec![7.0],
            aggregate_cap: 10.0,
            budgets,
        }
    }

    #[test]
    fn relaxation_shape_single_node() {
        let inst = CurtailmentInstance {
            num_nodes: 1,
            num_strategies: 2,
            num_intervals: 1,
            curtailment: vec![vec![vec![0.0, 3.0]]],
            cost: vec![vec![vec![0.0, 18.0]]],
            interval_targets: vec![2.0],
            aggregate_cap: 3.0,
            budgets: Some(vec![Budget::new(0.5, 3.0)]),
        };
        let lp = build_fair_relaxation(&inst).unwrap();
        assert_eq!(lp.num_vars(), 2);
        let count = |prefix: &str| {
            lp.rows
                .iter()
                .filter(|r| r.name.starts_with(prefix))
                .count()
        };
        assert_eq!(count("target_"), 1);
        assert_eq!(count("cap"), 1);
        assert_eq!(count("budget_"), 2);
        assert_eq!(count("one_"), 1);
        assert_eq!(lp.rows.len(), 5);
    }

    #[test]
    fn relaxation_requires_budgets() {
        assert_eq!(
            build_fair_relaxation(&two_node(None)),
            Err(FairError::MissingBudgets)
        );
    }

    #[test]
    fn slack_budgets_leave_optimum_unchanged() {
        let inst = two_node(Some(vec![Budget::new(0.0, 5.0), Budget::new(0.0, 4.0)]));
        let sol = solve_lp(&build_fair_relaxation(&inst).unwrap()).unwrap();
        assert!((sol.objective - 62.0).abs() < 1e-9, "{}", sol.objective);
    }

    #[test]
    fn midpoint_rounding() {
        let s = [(4.0, 32.0), (5.0, 50.0)];
        assert_eq!(nearest_strategy(&s, 4.6, 1e-9).chosen, 1);
        assert_eq!(nearest_strategy(&s, 4.5, 1e-9).chosen, 1);
        assert_eq!(nearest_strategy(&s, 4.4, 1e-9).chosen, 0);
        assert_eq!(nearest_strategy(&s, 5.0, 1e-9).chosen, 1);
        let z = [(0.0, 0.0), (4.0, 32.0)];
        assert_eq!(nearest_strategy(&z, 1.9, 1e-9).chosen, 0);
        assert_eq!(nearest_strategy(&z, 2.0, 1e-9).chosen, 1);
    }

    #[test]
    fn duplicate_values_keep_cheaper() {
        let s = [(0.0, 0.0), (3.0, 9.0), (3.0, 7.0), (6.0, 20.0)];
        assert_eq!(nearest_strategy(&s, 3.1, 1e-9).chosen, 2);
        assert_eq!(nearest_strategy(&s, 3.0, 1e-9).chosen, 2);
    }

    #[test]
    fn cost_kind_detection() {
        let inst = two_node(None);
        assert_eq!(CostKind::detect(&inst), CostKind::Quadratic);
        let mut lin = inst.clone();
        lin.cost = vec![vec![vec![0.0, 10.0], vec![0.0, 8.0]]];
        assert_eq!(CostKind::detect(&lin), CostKind::Linear);
        let mut custom = inst;
        custom.cost = vec![vec![vec![0.0, 10.0], vec![0.0, 30.0]]];
        assert_eq!(CostKind::detect(&custom), CostKind::Custom);
    }

    #[test]
    fn integral_lp_optimum_is_kept() {
        // Budgets force node 0 fully on and node 1 off, so the relaxation is integral.
        let inst = two_node(Some(vec![Budget::new(1.0, 5.0), Budget::new(0.0, 0.0)]));
        let mut inst = inst;
        inst.interval_targets = vec![5.0];
        let sol = solve_fair(&inst, &FairOptions::default()).unwrap();
        assert_eq!(sol.schedule.assignment, vec![vec![1, 0]]);
        assert!((sol.report.lp_optimum - 50.0).abs() < 1e-9);
        assert_eq!(sol.report.evaluation.total_cost, 50.0);
        assert_eq!(
            sol.report
                .cost_ratio
                .value()
                .map(|v| (v - 1.0).abs() < 1e-9),
            Some(true)
        );
        assert_eq!(sol.report.worst_target_factor, Some(1.0));
    }

    #[test]
    fn spacing_factor_from_consecutive_pairs() {
        let mut inst = two_node(None);
        inst.curtailment = vec![vec![vec![0.0, 5.0], vec![0.0, 4.0]]];
        assert_eq!(spacing_factor(&inst), 1.0);
        inst.num_strategies = 3;
        inst.curtailment = vec![vec![vec![0.0, 2.0, 6.0], vec![0.0, 4.0, 5.0]]];
        inst.cost = vec![vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0]]];
        // 6 <= (2k - 1) * 2 -> k = 2
        assert_eq!(spacing_factor(&inst), 2.0);
    }

    #[test]
    fn reachability() {
        let mut inst = two_node(None);
        inst.num_intervals = 2;
        inst.curtailment = vec![vec![vec![0.0, 5.0], vec![0.0, 4.0]]; 2];
        inst.cost = vec![vec![vec![0.0, 50.0], vec![0.0, 32.0]]; 2];
        // node 0 can total 0, 5, 10
        let r = |lo, hi| budget_reachable(&inst, 0, lo, hi, 1e-9, 1000);
        assert_eq!(r(0.0, 1.0), Reachability::Reachable);
        assert_eq!(r(6.0, 9.0), Reachability::Unreachable);
        assert_eq!(r(9.0, 10.0), Reachability::Reachable);
        assert_eq!(r(11.0, 20.0), Reachability::Unreachable);
        assert_eq!(
            budget_reachable(&inst, 0, 6.0, 9.0, 1e-9, 1),
            Reachability::Unknown
        );
    }

    #[test]
    fn proportional_budget_shares() {
        let inst = two_node(None);
        let budgets = proportional_budgets(&inst, 0.1);
        assert!((budgets[0].upper_budget - 10.0 * 5.0 / 9.0).abs() < 1e-12);
        assert!((budgets[1].upper_budget - 10.0 * 4.0 / 9.0).abs() < 1e-12);
        assert_eq!(budgets[0].lower_fraction, 0.1);
    }
}
