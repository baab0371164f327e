//! Ground-truth solvers for small instances.
//!
//! [`brute_force`] walks every assignment in mixed-radix order, with the
//! first (interval, node) slot most significant, so ties resolve to the
//! lexicographically smallest assignment. [`exact_dp`] is an unrounded
//! integer dynamic program written independently of the approximation
//! tables.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    evaluate, CurtailmentInstance, EvaluateError, Outcome, Schedule, DEFAULT_TOLERANCE,
};

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;
pub const DEFAULT_TABLE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    /// Interval targets and the aggregate cap.
    Mcnlb,
    /// Additionally every node's horizon total within its budget band.
    Fair,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("search space of {size} exceeds the cap {cap}")]
    TooLarge { size: u64, cap: u64 },
    #[error("{0} is not integral")]
    NotIntegral(String),
    #[error("fairness problem requires budgets")]
    MissingBudgets,
    #[error(transparent)]
    Evaluate(#[from] EvaluateError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSolution {
    pub schedule: Schedule,
    pub cost: f64,
}

fn at_least(value: f64, bound: f64) -> bool {
    value >= bound - DEFAULT_TOLERANCE * bound.abs().max(1.0)
}

fn at_most(value: f64, bound: f64) -> bool {
    value <= bound + DEFAULT_TOLERANCE * bound.abs().max(1.0)
}

/// `N^(M*T)`, saturating.
pub fn enumeration_size(instance: &CurtailmentInstance) -> u64 {
    let slots = (instance.num_nodes * instance.num_intervals) as u32;
    (instance.num_strategies as u64).saturating_pow(slots)
}

pub fn brute_force(
    instance: &CurtailmentInstance,
    problem: Problem,
) -> Result<Outcome<ExactSolution>, ExactError> {
    brute_force_capped(instance, problem, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_capped(
    instance: &CurtailmentInstance,
    problem: Problem,
    cap: u64,
) -> Result<Outcome<ExactSolution>, ExactError> {
    let size = enumeration_size(instance);
    if size > cap {
        return Err(ExactError::TooLarge { size, cap });
    }
    let bands: Option<Vec<(f64, f64)>> = match problem {
        Problem::Mcnlb => None,
        Problem::Fair => Some(
            instance
                .budgets
                .as_ref()
                .ok_or(ExactError::MissingBudgets)?
                .iter()
                .map(|b| (b.lower(), b.upper_budget))
                .collect(),
        ),
    };
    let (m, nt) = (instance.num_nodes, instance.num_intervals);
    let slots = m * nt;
    let gamma = |slot: usize, j: usize| instance.curtailment[slot / m][slot % m][j];
    let cost = |slot: usize, j: usize| instance.cost[slot / m][slot % m][j];

    let mut digits = vec![0usize; slots];
    let mut per_interval: Vec<f64> = (0..nt)
        .map(|t| (0..m).map(|b| instance.curtailment[t][b][0]).sum())
        .collect();
    let mut per_node: Vec<f64> = (0..m)
        .map(|b| (0..nt).map(|t| instance.curtailment[t][b][0]).sum())
        .collect();
    let mut total_cost: f64 = (0..slots).map(|s| cost(s, 0)).sum();
    let mut best: Option<(f64, Vec<usize>)> = None;

    loop {
        let feasible = per_interval
            .iter()
            .zip(&instance.interval_targets)
            .all(|(&g, &target)| at_least(g, target))
            && at_most(per_interval.iter().sum(), instance.aggregate_cap)
            && bands.as_ref().is_none_or(|bands| {
                per_node
                    .iter()
                    .zip(bands)
                    .all(|(&g, &(lo, hi))| at_least(g, lo) && at_most(g, hi))
            });
        if feasible {
            let better = match &best {
                None => true,
                Some((c, _)) => total_cost < *c - 1e-9 * c.abs().max(1.0),
            };
            if better {
                best = Some((total_cost, digits.clone()));
            }
        }
        // Odometer step from the least significant slot.
        let mut slot = slots;
        loop {
            if slot == 0 {
                return finish(instance, best);
            }
            slot -= 1;
            let old = digits[slot];
            let new = if old + 1 == instance.num_strategies {
                0
            } else {
                old + 1
            };
            digits[slot] = new;
            let dg = gamma(slot, new) - gamma(slot, old);
            per_interval[slot / m] += dg;
            per_node[slot % m] += dg;
            total_cost += cost(slot, new) - cost(slot, old);
            if new != 0 {
                break;
            }
        }
    }
}

fn finish(
    instance: &CurtailmentInstance,
    best: Option<(f64, Vec<usize>)>,
) -> Result<Outcome<ExactSolution>, ExactError> {
    let Some((_, digits)) = best else {
        return Ok(Outcome::Infeasible);
    };
    let schedule = Schedule::new(
        digits
            .chunks(instance.num_nodes)
            .map(<[usize]>::to_vec)
            .collect(),
    );
    let cost = evaluate(instance, &schedule)?.total_cost;
    Ok(Outcome::Solved(ExactSolution { schedule, cost }))
}

fn as_integer(value: f64, what: impl FnOnce() -> String) -> Result<u64, ExactError> {
    let r = value.round();
    if (value - r).abs() > 1e-9 || r < 0.0 {
        return Err(ExactError::NotIntegral(what()));
    }
    Ok(r as u64)
}

pub fn exact_dp(instance: &CurtailmentInstance) -> Result<Outcome<ExactSolution>, ExactError> {
    exact_dp_capped(instance, DEFAULT_TABLE_CAP)
}

/// Exact minimum cost over integer data, ignoring budgets.
#[allow(clippy::needless_range_loop)]
pub fn exact_dp_capped(
    instance: &CurtailmentInstance,
    table_cap: u64,
) -> Result<Outcome<ExactSolution>, ExactError> {
    let cap = as_integer(instance.aggregate_cap, || "aggregate cap".into())?;
    if cap > table_cap {
        return Err(ExactError::TooLarge {
            size: cap,
            cap: table_cap,
        });
    }
    let cap = cap as usize;
    let (m, n, nt) = (
        instance.num_nodes,
        instance.num_strategies,
        instance.num_intervals,
    );
    let targets = instance
        .interval_targets
        .iter()
        .enumerate()
        .map(|(t, &g)| as_integer(g, || format!("target of interval {t}")).map(|v| v as usize))
        .collect::<Result<Vec<_>, _>>()?;
    let mut units = vec![vec![vec![0usize; n]; m]; nt];
    for t in 0..nt {
        for b in 0..m {
            for j in 0..n {
                units[t][b][j] = as_integer(instance.curtailment[t][b][j], || {
                    format!("curtailment [{t}][{b}][{j}]")
                })? as usize;
            }
        }
    }

    // interval_best[t][g]: cheapest way for interval t to curtail exactly g,
    // with per-node choices kept for reconstruction.
    let mut interval_best: Vec<Vec<f64>> = Vec::with_capacity(nt);
    let mut interval_choice: Vec<Vec<Vec<u32>>> = Vec::with_capacity(nt);
    for t in 0..nt {
        let mut table = vec![f64::INFINITY; cap + 1];
        table[0] = 0.0;
        let mut choices = Vec::with_capacity(m);
        for b in 0..m {
            let mut next = vec![f64::INFINITY; cap + 1];
            let mut pick = vec![u32::MAX; cap + 1];
            for g in 0..=cap {
                if !table[g].is_finite() {
                    continue;
                }
                for j in 0..n {
                    let to = g + units[t][b][j];
                    if to > cap {
                        continue;
                    }
                    let c = table[g] + instance.cost[t][b][j];
                    if c < next[to] {
                        next[to] = c;
                        pick[to] = j as u32;
                    }
                }
            }
            choices.push(pick);
            table = next;
        }
        interval_best.push(table);
        interval_choice.push(choices);
    }

    // horizon[t][g]: cheapest over intervals 0..=t with aggregate exactly g.
    let mut horizon = vec![f64::INFINITY; cap + 1];
    horizon[0] = 0.0;
    let mut horizon_pick: Vec<Vec<u32>> = Vec::with_capacity(nt);
    for t in 0..nt {
        let mut next = vec![f64::INFINITY; cap + 1];
        let mut pick = vec![u32::MAX; cap + 1];
        for g in 0..=cap {
            if !horizon[g].is_finite() {
                continue;
            }
            for here in targets[t]..=cap - g {
                let c = interval_best[t][here];
                if !c.is_finite() {
                    continue;
                }
                let total = horizon[g] + c;
                if total < next[g + here] {
                    next[g + here] = total;
                    pick[g + here] = here as u32;
                }
            }
        }
        horizon = next;
        horizon_pick.push(pick);
    }

    let Some((mut aggregate, _)) = horizon
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
    else {
        return Ok(Outcome::Infeasible);
    };
    let mut assignment = vec![vec![0usize; m]; nt];
    for t in (0..nt).rev() {
        let here = horizon_pick[t][aggregate] as usize;
        aggregate -= here;
        let mut rest = here;
        for b in (0..m).rev() {
            let j = interval_choice[t][b][rest] as usize;
            assignment[t][b] = j;
            rest -= units[t][b][j];
        }
    }
    let schedule = Schedule::new(assignment);
    let cost = evaluate(instance, &schedule)?.total_cost;
    Ok(Outcome::Solved(ExactSolution { schedule, cost }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Budget;

    fn two_node(intervals: usize, target: f64, cap: f64) -> CurtailmentInstance {
        CurtailmentInstance {
            num_nodes: 2,
            num_strategies: 2,
            num_intervals: intervals,
            curtailment: vec![vec![vec![0.0, 5.0], vec![0.0, 4.0]]; intervals],
            cost: vec![vec![vec![0.0, 50.0], vec![0.0, 32.0]]; intervals],
            interval_targets: vec![target; intervals],
            aggregate_cap: cap,
            budgets: None,
        }
    }

    #[test]
    fn four_schedule_instance() {
        let inst = two_node(1, 7.0, 10.0);
        let bf = brute_force(&inst, Problem::Mcnlb)
            .unwrap()
            .solved()
            .unwrap();
        assert_eq!(bf.cost, 82.0);
        assert_eq!(bf.schedule.assignment, vec![vec![1, 1]]);
        let dp = exact_dp(&inst).unwrap().solved().unwrap();
        assert_eq!(dp.cost, 82.0);
    }

    #[test]
    fn zero_targets_cost_nothing() {
        let inst = two_node(1, 0.0, 0.0);
        let bf = brute_force(&inst, Problem::Mcnlb)
            .unwrap()
            .solved()
            .unwrap();
        assert_eq!(bf.cost, 0.0);
        assert_eq!(bf.schedule.assignment, vec![vec![0, 0]]);
        assert_eq!(exact_dp(&inst).unwrap().solved().unwrap().cost, 0.0);
    }

    #[test]
    fn unreachable_target() {
        let inst = two_node(1, 100.0, 100.0);
        assert!(brute_force(&inst, Problem::Mcnlb).unwrap().is_infeasible());
        assert!(exact_dp(&inst).unwrap().is_infeasible());
    }

    #[test]
    fn cap_one_short_of_requirement() {
        let inst = two_node(2, 7.0, 17.0);
        assert!(brute_force(&inst, Problem::Mcnlb).unwrap().is_infeasible());
        assert!(exact_dp(&inst).unwrap().is_infeasible());
        let inst = two_node(2, 7.0, 18.0);
        assert_eq!(exact_dp(&inst).unwrap().solved().unwrap().cost, 164.0);
        assert_eq!(
            brute_force(&inst, Problem::Mcnlb)
                .unwrap()
                .solved()
                .unwrap()
                .cost,
            164.0
        );
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let mut inst = two_node(1, 4.0, 10.0);
        inst.curtailment = vec![vec![vec![0.0, 4.0], vec![0.0, 4.0]]];
        inst.cost = vec![vec![vec![0.0, 32.0], vec![0.0, 32.0]]];
        let bf = brute_force(&inst, Problem::Mcnlb)
            .unwrap()
            .solved()
            .unwrap();
        assert_eq!(bf.schedule.assignment, vec![vec![0, 1]]);
    }

    #[test]
    fn fair_mode_applies_budgets() {
        let mut inst = two_node(1, 4.0, 10.0);
        assert_eq!(
            brute_force(&inst, Problem::Fair),
            Err(ExactError::MissingBudgets)
        );
        // node 1 must stay idle, forcing the costlier node 0
        inst.budgets = Some(vec![Budget::new(0.0, 5.0), Budget::new(0.0, 0.0)]);
        let bf = brute_force(&inst, Problem::Fair).unwrap().solved().unwrap();
        assert_eq!(bf.schedule.assignment, vec![vec![1, 0]]);
        assert_eq!(bf.cost, 50.0);
    }

    #[test]
    fn caps_are_enforced() {
        let inst = two_node(3, 7.0, 30.0);
        assert_eq!(
            brute_force_capped(&inst, Problem::Mcnlb, 63),
            Err(ExactError::TooLarge { size: 64, cap: 63 })
        );
        assert!(matches!(
            exact_dp_capped(&inst, 29),
            Err(ExactError::TooLarge { .. })
        ));
        let mut frac = inst;
        frac.interval_targets[0] = 6.5;
        assert!(matches!(exact_dp(&frac), Err(ExactError::NotIntegral(_))));
    }
}
