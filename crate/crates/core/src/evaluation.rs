//! Experiment metrics: Gini fairness, guarantee checks, runtime scaling
//! fits and rank correlation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fair::CostKind;
use crate::model::{evaluate, CurtailmentInstance, EvaluateError, Schedule};
use crate::online::OnlineContext;

/// Relative tolerance applied to every bound comparison.
pub const BOUND_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("undefined for empty or all-zero input")]
    Undefined,
    #[error("negative value {0}")]
    NegativeValue(f64),
    #[error("scaling fit needs at least 4 positive samples with strictly increasing sizes")]
    DegenerateSamples,
}

/// `sum_i sum_j |v_i - v_j| / (2 n^2 mean)`.
pub fn gini(values: &[f64]) -> Result<f64, MetricError> {
    if let Some(&v) = values.iter().find(|v| !(**v >= 0.0)) {
        return Err(MetricError::NegativeValue(v));
    }
    let n = values.len() as f64;
    let total: f64 = values.iter().sum();
    if values.is_empty() || total <= 0.0 {
        return Err(MetricError::Undefined);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    // With ascending order, sum_{i<j} (v_j - v_i) = sum_i (2i - n + 1) v_i.
    let pairwise: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * i as f64 - n + 1.0) * v)
        .sum();
    let mean = total / n;
    Ok((2.0 * pairwise / (2.0 * n * n * mean)).max(0.0))
}

/// Achieved curtailment over upper budget per node, skipping zero budgets.
pub fn budget_shares(per_node: &[f64], upper_budgets: &[f64]) -> Vec<f64> {
    per_node
        .iter()
        .zip(upper_budgets)
        .filter(|(_, &b)| b > 0.0)
        .map(|(&a, &b)| a / b)
        .collect()
}

/// Least-squares slope of `ln(runtime)` against `ln(size)`.
pub fn scaling_fit(samples: &[(f64, f64)]) -> Result<f64, MetricError> {
    let increasing = samples.windows(2).all(|w| w[0].0 < w[1].0);
    let positive = samples.iter().all(|&(s, r)| s > 0.0 && r > 0.0);
    if samples.len() < 4 || !increasing || !positive {
        return Err(MetricError::DegenerateSamples);
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(s, r)| (s.ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let average = (i + j) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = average;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties; `None` when either
/// side is constant or lengths differ.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// `100 * (observed / reference - 1)`.
pub fn error_pct(observed: f64, reference: f64) -> Option<f64> {
    (reference != 0.0).then(|| 100.0 * (observed / reference - 1.0))
}

/// Of two signed errors, the one with the larger magnitude.
pub fn worse_error(a: f64, b: f64) -> f64 {
    if b.abs() > a.abs() {
        b
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundSide {
    /// Observed factor must be at least the bound.
    Lower,
    /// Observed factor must be at most the bound.
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub family: String,
    pub side: BoundSide,
    pub bound: f64,
    /// Worst factor across the family; `None` when nothing was measurable.
    pub observed: Option<f64>,
    pub status: BoundStatus,
    /// Distance from the bound in the passing direction.
    pub slack: Option<f64>,
}

impl BoundRecord {
    fn check(family: &str, side: BoundSide, bound: f64, observed: Option<f64>) -> Self {
        let mut record = Self::skipped(family, side, bound);
        record.observed = observed;
        record.judge(BOUND_TOLERANCE);
        record
    }

    /// Recompute status and slack with relative tolerance `tol`.
    fn judge(&mut self, tol: f64) {
        let Some(value) = self.observed else {
            self.status = BoundStatus::Skipped;
            self.slack = None;
            return;
        };
        let tol = tol * self.bound.abs().max(1.0);
        let (ok, slack) = match self.side {
            BoundSide::Lower => (value >= self.bound - tol, value - self.bound),
            BoundSide::Upper => (value <= self.bound + tol, self.bound - value),
        };
        self.status = if ok {
            BoundStatus::Pass
        } else {
            BoundStatus::Fail
        };
        self.slack = Some(slack);
    }

    fn skipped(family: &str, side: BoundSide, bound: f64) -> Self {
        Self {
            family: family.to_string(),
            side,
            bound,
            observed: None,
            status: BoundStatus::Skipped,
            slack: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub records: Vec<BoundRecord>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != BoundStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundRecord> {
        self.records
            .iter()
            .filter(|r| r.status == BoundStatus::Fail)
    }
}

/// Which guarantees to check a schedule against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundKind {
    /// `(1 - eps)` interval targets and `(1 + eps)` aggregate cap; with an
    /// exact optimum, cost must not exceed it.
    Dp { epsilon: f64, optimum: Option<f64> },
    /// Rounding factors: cost against the relaxation optimum, aggregate and
    /// node budgets at twice their limit, lower sides divided by `spacing_k`
    /// when that guarantee applies.
    Fair {
        cost_kind: CostKind,
        lp_optimum: Option<f64>,
        spacing_k: Option<f64>,
    },
    /// Per interval `(1 - eps)` target and per node and interval
    /// `(1 + eps)` pro-rated budget.
    Online {
        epsilon: f64,
        context: OnlineContext,
    },
}

fn min_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().min_by(f64::total_cmp)
}

fn max_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    values.flatten().max_by(f64::total_cmp)
}

pub fn bound_report(
    instance: &CurtailmentInstance,
    schedule: &Schedule,
    kind: &BoundKind,
) -> Result<BoundReport, EvaluateError> {
    use BoundSide::{Lower, Upper};
    let report = evaluate(instance, schedule)?;
    let worst_target = min_of(report.target_violation_factors.iter().map(|r| r.value()));
    let cap = report.cap_violation_factor.value();
    let budget = report.budget_violation_factors.as_ref();
    let worst_upper = budget.and_then(|f| max_of(f.iter().map(|x| x.upper.value())));
    let worst_lower = budget.and_then(|f| min_of(f.iter().map(|x| x.lower.value())));
    let mut records = Vec::new();
    match kind {
        BoundKind::Dp { epsilon, optimum } => {
            records.push(BoundRecord::check(
                "interval_target",
                Lower,
                1.0 - epsilon,
                worst_target,
            ));
            records.push(BoundRecord::check(
                "aggregate_cap",
                Upper,
                1.0 + epsilon,
                cap,
            ));
            let cost = optimum.and_then(|o| (o > 0.0).then(|| report.total_cost / o));
            let record = match optimum {
                Some(o) if *o == 0.0 => {
                    BoundRecord::check("cost", Upper, 0.0, Some(report.total_cost))
                }
                _ => BoundRecord::check("cost", Upper, 1.0, cost),
            };
            records.push(record);
        }
        BoundKind::Fair {
            cost_kind,
            lp_optimum,
            spacing_k,
        } => {
            match (cost_kind.cost_factor(), lp_optimum) {
                (Some(f), Some(lp)) if *lp > 0.0 => records.push(BoundRecord::check(
                    "cost",
                    Upper,
                    f,
                    Some(report.total_cost / lp),
                )),
                (Some(_), Some(_)) => records.push(BoundRecord::check(
                    "cost",
                    Upper,
                    0.0,
                    Some(report.total_cost),
                )),
                (f, _) => records.push(BoundRecord::skipped("cost", Upper, f.unwrap_or(f64::NAN))),
            }
            records.push(BoundRecord::check("aggregate_cap", Upper, 2.0, cap));
            records.push(BoundRecord::check(
                "node_budget_upper",
                Upper,
                2.0,
                worst_upper,
            ));
            match spacing_k {
                Some(k) => {
                    records.push(BoundRecord::check(
                        "interval_target",
                        Lower,
                        1.0 / k,
                        worst_target,
                    ));
                    records.push(BoundRecord::check(
                        "node_budget_lower",
                        Lower,
                        1.0 / k,
                        worst_lower,
                    ));
                }
                None => {
                    records.push(BoundRecord::skipped("interval_target", Lower, f64::NAN));
                    records.push(BoundRecord::skipped("node_budget_lower", Lower, f64::NAN));
                }
            }
        }
        BoundKind::Online { epsilon, context } => {
            records.push(BoundRecord::check(
                "interval_target",
                Lower,
                1.0 - epsilon,
                worst_target,
            ));
            let mut worst: Option<f64> = None;
            for t in 0..instance.num_intervals {
                let share = instance.interval_targets[t] / context.total_target;
                for (b, budget) in context.budgets.iter().enumerate() {
                    let limit = budget.upper_budget * share;
                    let achieved = instance.curtailment[t][b][schedule.assignment[t][b]];
                    let factor = if limit > 0.0 {
                        Some(achieved / limit)
                    } else if achieved > 0.0 {
                        Some(f64::INFINITY)
                    } else {
                        None
                    };
                    worst = max_of([worst, factor].into_iter());
                }
            }
            records.push(BoundRecord::check(
                "node_interval_budget",
                Upper,
                1.0 + epsilon,
                worst,
            ));
        }
    }
    Ok(BoundReport { records })
}

/// [`bound_report`] with relative tolerance `tol` in place of the default.
pub fn bound_report_with_tolerance(
    instance: &CurtailmentInstance,
    schedule: &Schedule,
    kind: &BoundKind,
    tol: f64,
) -> Result<BoundReport, EvaluateError> {
    let mut report = bound_report(instance, schedule, kind)?;
    for record in &mut report.records {
        record.judge(tol);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Budget;

    #[test]
    fn gini_examples() {
        assert_eq!(gini(&[0.5, 0.5, 0.5]), Ok(0.0));
        assert!((gini(&[0.0, 1.0]).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(gini(&[1.0]), Ok(0.0));
        assert_eq!(gini(&[]), Err(MetricError::Undefined));
        assert_eq!(gini(&[0.0, 0.0]), Err(MetricError::Undefined));
        assert_eq!(gini(&[-1.0, 2.0]), Err(MetricError::NegativeValue(-1.0)));
    }

    #[test]
    fn gini_matches_pairwise_definition() {
        let v = [0.3, 1.7, 0.0, 2.2, 0.9];
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let pairwise: f64 = v
            .iter()
            .flat_map(|a| v.iter().map(move |b| (a - b).abs()))
            .sum();
        assert!((gini(&v).unwrap() - pairwise / (2.0 * n * n * mean)).abs() < 1e-12);
    }

    #[test]
    fn fits() {
        let quad: Vec<(f64, f64)> = (1..=6).map(|m| (m as f64 * 10.0, (m * m) as f64)).collect();
        assert!((scaling_fit(&quad).unwrap() - 2.0).abs() < 0.01);
        let lin: Vec<(f64, f64)> = (1..=6).map(|m| (m as f64, 3.0 * m as f64)).collect();
        assert!((scaling_fit(&lin).unwrap() - 1.0).abs() < 0.01);
        assert_eq!(scaling_fit(&lin[..3]), Err(MetricError::DegenerateSamples));
        let mut unordered = lin.clone();
        unordered.swap(0, 1);
        assert_eq!(scaling_fit(&unordered), Err(MetricError::DegenerateSamples));
    }

    #[test]
    fn rank_correlation() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0], &[5.0, 5.0]), None);
    }

    fn two_node() -> CurtailmentInstance {
        CurtailmentInstance {
            num_nodes: 2,
            num_strategies: 2,
            num_intervals: 1,
            curtailment: vec![vec![vec![0.0, 5.0], vec![0.0, 4.0]]],
            cost: vec![vec![vec![0.0, 50.0], vec![0.0, 32.0]]],
            interval_targets: vec![10.0],
            aggregate_cap: 10.0,
            budgets: Some(vec![Budget::new(0.0, 2.0), Budget::new(0.0, 4.0)]),
        }
    }

    #[test]
    fn dp_threshold() {
        // achieved 9 of 10 at eps 0.1 sits exactly on the bound
        let inst = two_node();
        let s = Schedule::new(vec![vec![1, 1]]);
        let r = bound_report(
            &inst,
            &s,
            &BoundKind::Dp {
                epsilon: 0.1,
                optimum: None,
            },
        )
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.records[2].status, BoundStatus::Skipped);
        let r = bound_report(
            &inst,
            &s,
            &BoundKind::Dp {
                epsilon: 0.05,
                optimum: None,
            },
        )
        .unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn fair_factors() {
        let inst = two_node();
        let s = Schedule::new(vec![vec![1, 1]]);
        let kind = |lp| BoundKind::Fair {
            cost_kind: CostKind::Quadratic,
            lp_optimum: Some(lp),
            spacing_k: None,
        };
        // cost 82 = 3.7 x 22.16...
        let r = bound_report(&inst, &s, &kind(82.0 / 3.7)).unwrap();
        assert_eq!(r.records[0].status, BoundStatus::Pass);
        // node 0 curtails 5 against budget 2: factor 2.5
        let upper = r
            .records
            .iter()
            .find(|x| x.family == "node_budget_upper")
            .unwrap();
        assert_eq!(upper.status, BoundStatus::Fail);
        assert_eq!(upper.observed, Some(2.5));
    }

    #[test]
    fn node_over_budget_by_factor() {
        let mut inst = two_node();
        inst.budgets = Some(vec![Budget::new(0.0, 5.0 / 2.3), Budget::new(0.0, 4.0)]);
        let s = Schedule::new(vec![vec![1, 1]]);
        let r = bound_report(
            &inst,
            &s,
            &BoundKind::Fair {
                cost_kind: CostKind::Quadratic,
                lp_optimum: Some(82.0),
                spacing_k: Some(1.0),
            },
        )
        .unwrap();
        assert!(!r.passed());
        assert_eq!(r.failures().next().unwrap().family, "node_budget_upper");
    }
}
