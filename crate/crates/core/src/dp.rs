//! Rounded two-level dynamic program for minimum-cost net-load balancing.
//!
//! Curtailments are scaled by `mu = epsilon * min_t target_t / M` and rounded
//! up to integer units. For each interval a node-by-node table
//! ([`ThetaTable`]) records the cheapest way to reach every rounded
//! curtailment exactly; a second table across intervals ([`PhiTable`])
//! combines one per-interval entry at or above that interval's rounded target
//! while keeping the rounded aggregate under the search cap. Backtracking
//! through both tables yields a [`Schedule`].
//!
//! Returned schedules meet every interval target up to a `(1 - epsilon)`
//! factor and the aggregate cap up to a `(1 + epsilon)` factor, and never cost
//! more than the exact optimum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{evaluate, CurtailmentInstance, EvaluateError, Outcome, Schedule};

/// Relative distance under which a scaled quotient is treated as an integer.
const SNAP: f64 = 1e-9;

/// Upper limit on `(search_cap + 1) * max(M, T)` table cells.
pub const MAX_TABLE_CELLS: usize = 200_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DpError {
    #[error("interval {interval} has a zero target, so the rounding scale would be zero")]
    ZeroTarget { interval: usize },
    #[error("epsilon {0} outside (0, 1]")]
    EpsilonOutOfRange(f64),
    #[error("scale override {0} must be positive and finite")]
    InvalidScale(f64),
    #[error("instance carries fairness budgets; use the fairness solver")]
    UnexpectedBudgets,
    #[error("DP tables would need {cells} cells (limit {limit})")]
    TableTooLarge { cells: usize, limit: usize },
    #[error("table entry ({rounded}, node {node}) of interval {interval} is not reproducible")]
    InconsistentTable {
        interval: usize,
        node: usize,
        rounded: usize,
    },
    #[error(transparent)]
    Evaluate(#[from] EvaluateError),
}

/// `ceil(x / mu)`, treating quotients within [`SNAP`] of an integer as that
/// integer so that exact multiples are not pushed up by floating-point noise.
pub fn rounded_units(x: f64, mu: f64) -> usize {
    let q = x / mu;
    let nearest = q.round();
    if (q - nearest).abs() <= SNAP * nearest.abs().max(1.0) {
        nearest.max(0.0) as usize
    } else {
        q.ceil().max(0.0) as usize
    }
}

/// Instance curtailments, targets and cap expressed in rounded units of `mu`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledInstance {
    pub mu: f64,
    pub epsilon: f64,
    /// `[interval][node][strategy]`
    pub rounded_curtailment: Vec<Vec<Vec<usize>>>,
    pub rounded_targets: Vec<usize>,
    /// `ceil(cap / mu)`.
    pub rounded_cap: usize,
    /// Largest total rounding excess any schedule can accumulate: the sum over
    /// (interval, node) of the worst `rounded - gamma / mu` among strategies.
    pub rounding_slack: f64,
    /// Largest rounded aggregate the tables explore.
    pub search_cap: usize,
}

/// Scale with `mu = epsilon * min_t target_t / M`.
pub fn scale_instance(
    instance: &CurtailmentInstance,
    epsilon: f64,
) -> Result<ScaledInstance, DpError> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(DpError::EpsilonOutOfRange(epsilon));
    }
    let (interval, min_target) = instance
        .interval_targets
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("validated instance has at least one interval");
    if min_target <= 0.0 {
        return Err(DpError::ZeroTarget { interval });
    }
    let mu = epsilon * min_target / instance.num_nodes as f64;
    scale_with_mu(instance, mu, epsilon)
}

/// Scale with an explicit `mu`. With `mu = 1` and integer data the rounding is
/// the identity and the DP becomes exact.
pub fn scale_with_mu(
    instance: &CurtailmentInstance,
    mu: f64,
    epsilon: f64,
) -> Result<ScaledInstance, DpError> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(DpError::InvalidScale(mu));
    }
    let mut rounding_slack = 0.0;
    let rounded_curtailment: Vec<Vec<Vec<usize>>> = instance
        .curtailment
        .iter()
        .map(|nodes| {
            nodes
                .iter()
                .map(|row| {
                    let rounded: Vec<usize> = row.iter().map(|&g| rounded_units(g, mu)).collect();
                    let worst = row
                        .iter()
                        .zip(&rounded)
                        .map(|(&g, &r)| (r as f64 - g / mu).max(0.0))
                        .fold(0.0, f64::max);
                    rounding_slack += worst;
                    rounded
                })
                .collect()
        })
        .collect();
    let rounded_targets = instance
        .interval_targets
        .iter()
        .map(|&g| rounded_units(g, mu))
        .collect();
    let rounded_cap = rounded_units(instance.aggregate_cap, mu);
    let widened = (instance.aggregate_cap / mu + rounding_slack + SNAP).floor();
    let search_cap = rounded_cap.max(widened.max(0.0) as usize);
    let cells = (search_cap + 1).saturating_mul(instance.num_nodes.max(instance.num_intervals));
    if cells > MAX_TABLE_CELLS {
        return Err(DpError::TableTooLarge {
            cells,
            limit: MAX_TABLE_CELLS,
        });
    }
    Ok(ScaledInstance {
        mu,
        epsilon,
        rounded_curtailment,
        rounded_targets,
        rounded_cap,
        rounding_slack,
        search_cap,
    })
}

/// One selectable strategy of a node inside a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeOption {
    pub strategy: usize,
    pub rounded: usize,
    pub cost: f64,
}

const NO_CHOICE: u32 = u32::MAX;

/// Minimum cost to reach each rounded curtailment `0..=cap` exactly using
/// nodes `1..=b`, for one interval.
#[derive(Debug, Clone)]
pub struct ThetaTable {
    cap: usize,
    options: Vec<Vec<NodeOption>>,
    cost: Vec<f64>,
    choice: Vec<u32>,
}

impl ThetaTable {
    /// Fill the table from per-node option lists. Options whose rounded value
    /// exceeds `cap` are unreachable and skipped. Ties keep the earlier option.
    pub fn build(options: Vec<Vec<NodeOption>>, cap: usize) -> Self {
        let width = cap + 1;
        let m = options.len();
        let mut cost = vec![f64::INFINITY; width * m];
        let mut choice = vec![NO_CHOICE; width * m];
        for (b, node_options) in options.iter().enumerate() {
            let (done, rest) = cost.split_at_mut(b * width);
            let row = &mut rest[..width];
            let choice_row = &mut choice[b * width..(b + 1) * width];
            for (k, opt) in node_options.iter().enumerate() {
                if opt.rounded > cap {
                    continue;
                }
                if b == 0 {
                    let g = opt.rounded;
                    if opt.cost < row[g] {
                        row[g] = opt.cost;
                        choice_row[g] = k as u32;
                    }
                    continue;
                }
                let prev = &done[(b - 1) * width..];
                for g in opt.rounded..width {
                    let base = prev[g - opt.rounded];
                    if base.is_finite() {
                        let candidate = base + opt.cost;
                        if candidate < row[g] {
                            row[g] = candidate;
                            choice_row[g] = k as u32;
                        }
                    }
                }
            }
        }
        Self {
            cap,
            options,
            cost,
            choice,
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn num_nodes(&self) -> usize {
        self.options.len()
    }

    pub fn options(&self) -> &[Vec<NodeOption>] {
        &self.options
    }

    /// Entry for rounded curtailment `rounded` using nodes `1..=nodes`;
    /// `None` is the infeasible marker.
    pub fn get(&self, rounded: usize, nodes: usize) -> Option<f64> {
        if nodes == 0 || nodes > self.num_nodes() || rounded > self.cap {
            return None;
        }
        let v = self.cost[(nodes - 1) * (self.cap + 1) + rounded];
        v.is_finite().then_some(v)
    }

    fn chosen(&self, rounded: usize, nodes: usize) -> Option<NodeOption> {
        let k = self.choice[(nodes - 1) * (self.cap + 1) + rounded];
        (k != NO_CHOICE).then(|| self.options[nodes - 1][k as usize])
    }

    /// Finite entries `(cost, rounded)` over all nodes with `rounded >= floor`.
    pub fn candidates(&self, floor: usize) -> Vec<(f64, usize)> {
        let m = self.num_nodes();
        (floor..=self.cap)
            .filter_map(|g| self.get(g, m).map(|c| (c, g)))
            .collect()
    }

    /// Candidates that no other candidate beats on both cost and rounded
    /// curtailment. Ascending in rounded value, strictly descending in cost.
    pub fn frontier(&self, floor: usize) -> Vec<(f64, usize)> {
        let mut kept: Vec<(f64, usize)> = Vec::new();
        for (c, g) in self.candidates(floor) {
            if kept.last().is_none_or(|&(best, _)| c < best) {
                kept.push((c, g));
            }
        }
        kept
    }
}

/// Build the table of interval `t` from a scaled instance, with every strategy
/// selectable and the search cap as its upper bound.
pub fn build_theta(
    scaled: &ScaledInstance,
    instance: &CurtailmentInstance,
    t: usize,
) -> ThetaTable {
    let options = (0..instance.num_nodes)
        .map(|b| {
            (0..instance.num_strategies)
                .map(|j| NodeOption {
                    strategy: j,
                    rounded: scaled.rounded_curtailment[t][b][j],
                    cost: instance.cost[t][b][j],
                })
                .collect()
        })
        .collect();
    ThetaTable::build(options, scaled.search_cap)
}

fn same_cost(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Per-node strategy indices realizing table entry `target = (cost, rounded)`
/// at `b = M`, walking nodes from last to first along the stored choices.
pub fn reconstruct_interval(
    theta: &ThetaTable,
    target: (f64, usize),
    t: usize,
) -> Result<Vec<usize>, DpError> {
    let m = theta.num_nodes();
    let inconsistent = |node: usize, rounded: usize| DpError::InconsistentTable {
        interval: t,
        node,
        rounded,
    };
    let (cost, mut current) = target;
    match theta.get(current, m) {
        Some(c) if same_cost(c, cost) => {}
        _ => return Err(inconsistent(m, current)),
    }
    let mut strategies = vec![0; m];
    for b in (1..=m).rev() {
        let here = theta
            .get(current, b)
            .ok_or_else(|| inconsistent(b, current))?;
        let opt = theta
            .chosen(current, b)
            .ok_or_else(|| inconsistent(b, current))?;
        if opt.rounded > current {
            return Err(inconsistent(b, current));
        }
        let rest = current - opt.rounded;
        let reproduced = if b == 1 {
            (rest == 0).then_some(opt.cost)
        } else {
            theta.get(rest, b - 1).map(|c| c + opt.cost)
        };
        if !reproduced.is_some_and(|r| same_cost(r, here)) {
            return Err(inconsistent(b, current));
        }
        strategies[b - 1] = opt.strategy;
        current = rest;
    }
    Ok(strategies)
}

/// Reconstruction that re-derives each node's strategy by argmin over the
/// previous column instead of reading stored choices. Used to cross-check
/// [`reconstruct_interval`].
pub fn reconstruct_by_argmin(theta: &ThetaTable, rounded: usize) -> Option<Vec<usize>> {
    let m = theta.num_nodes();
    theta.get(rounded, m)?;
    let mut current = rounded;
    let mut strategies = vec![0; m];
    for b in (1..=m).rev() {
        let opts = &theta.options()[b - 1];
        let pick = if b == 1 {
            opts.iter()
                .filter(|o| o.rounded == current)
                .min_by(|x, y| x.cost.total_cmp(&y.cost))?
        } else {
            opts.iter()
                .filter(|o| o.rounded <= current)
                .filter_map(|o| {
                    theta
                        .get(current - o.rounded, b - 1)
                        .map(|c| (o, c + o.cost))
                })
                .min_by(|x, y| x.1.total_cmp(&y.1))?
                .0
        };
        strategies[b - 1] = pick.strategy;
        current -= pick.rounded;
    }
    Some(strategies)
}

/// Minimum cost over intervals `1..=t` to reach each rounded aggregate,
/// taking exactly one candidate per interval.
#[derive(Debug, Clone)]
pub struct PhiTable {
    cap: usize,
    candidates: Vec<Vec<(f64, usize)>>,
    cost: Vec<f64>,
    choice: Vec<u32>,
}

impl PhiTable {
    /// `candidates[t]` is the sparse set of `(cost, rounded)` pairs of
    /// interval `t`, ascending in `rounded`.
    pub fn build(candidates: Vec<Vec<(f64, usize)>>, cap: usize) -> Self {
        let width = cap + 1;
        let n = candidates.len();
        let mut cost = vec![f64::INFINITY; width * n];
        let mut choice = vec![NO_CHOICE; width * n];
        for t in 0..n {
            let (done, rest) = cost.split_at_mut(t * width);
            let row = &mut rest[..width];
            let choice_row = &mut choice[t * width..(t + 1) * width];
            if t == 0 {
                for (k, &(c, g)) in candidates[0].iter().enumerate() {
                    if g <= cap && c < row[g] {
                        row[g] = c;
                        choice_row[g] = k as u32;
                    }
                }
                continue;
            }
            let prev = &done[(t - 1) * width..];
            for g in 0..width {
                for (k, &(c, s)) in candidates[t].iter().enumerate() {
                    if s > g {
                        break;
                    }
                    let base = prev[g - s];
                    if base.is_finite() && base + c < row[g] {
                        row[g] = base + c;
                        choice_row[g] = k as u32;
                    }
                }
            }
        }
        Self {
            cap,
            candidates,
            cost,
            choice,
        }
    }

    pub fn num_intervals(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidates(&self, t: usize) -> &[(f64, usize)] {
        &self.candidates[t]
    }

    /// Entry for rounded aggregate `rounded` over intervals `1..=intervals`.
    pub fn get(&self, rounded: usize, intervals: usize) -> Option<f64> {
        if intervals == 0 || intervals > self.num_intervals() || rounded > self.cap {
            return None;
        }
        let v = self.cost[(intervals - 1) * (self.cap + 1) + rounded];
        v.is_finite().then_some(v)
    }

    /// Cheapest finite entry over all intervals with aggregate at most `limit`;
    /// ties go to the smaller aggregate.
    pub fn best_within(&self, limit: usize) -> Option<(f64, usize)> {
        let t = self.num_intervals();
        (0..=limit.min(self.cap))
            .filter_map(|g| self.get(g, t).map(|c| (c, g)))
            .fold(None, |best: Option<(f64, usize)>, cur| match best {
                Some(b) if b.0 <= cur.0 => Some(b),
                _ => Some(cur),
            })
    }

    /// Per-interval `(cost, rounded)` picks realizing aggregate entry
    /// `rounded` at the last interval.
    pub fn backtrack(&self, rounded: usize) -> Option<Vec<(f64, usize)>> {
        let n = self.num_intervals();
        self.get(rounded, n)?;
        let mut picks = vec![(0.0, 0); n];
        let mut current = rounded;
        for t in (0..n).rev() {
            let k = self.choice[t * (self.cap + 1) + current];
            if k == NO_CHOICE {
                return None;
            }
            let pick = self.candidates[t][k as usize];
            picks[t] = pick;
            current -= pick.1;
        }
        (current == 0).then_some(picks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpOptions {
    pub epsilon: f64,
    /// Force the rounding scale instead of deriving it from epsilon.
    pub mu_override: Option<f64>,
}

impl DpOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            mu_override: None,
        }
    }
}

/// Per-interval pick recorded by the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalChoice {
    pub interval: usize,
    pub cost: f64,
    pub rounded_curtailment: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpTrace {
    pub epsilon: f64,
    pub mu: f64,
    pub rounded_cap: usize,
    pub search_cap: usize,
    pub rounded_aggregate: usize,
    pub intervals: Vec<IntervalChoice>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub schedule: Schedule,
    pub total_cost: f64,
    pub trace: DpTrace,
}

/// Solve the unbudgeted problem at accuracy `epsilon`.
pub fn solve_mcnlb(
    instance: &CurtailmentInstance,
    epsilon: f64,
) -> Result<Outcome<DpSolution>, DpError> {
    solve_mcnlb_with(instance, &DpOptions::new(epsilon))
}

pub fn solve_mcnlb_with(
    instance: &CurtailmentInstance,
    options: &DpOptions,
) -> Result<Outcome<DpSolution>, DpError> {
    if instance.budgets.is_some() {
        return Err(DpError::UnexpectedBudgets);
    }
    let scaled = match options.mu_override {
        Some(mu) => {
            if !(options.epsilon > 0.0 && options.epsilon <= 1.0) {
                return Err(DpError::EpsilonOutOfRange(options.epsilon));
            }
            scale_with_mu(instance, mu, options.epsilon)?
        }
        None => scale_instance(instance, options.epsilon)?,
    };
    let thetas: Vec<ThetaTable> = (0..instance.num_intervals)
        .map(|t| build_theta(&scaled, instance, t))
        .collect();
    let candidates = thetas
        .iter()
        .zip(&scaled.rounded_targets)
        // Only the aggregate cap constrains the choice per interval, so a
        // dominated candidate can always be swapped for a dominating one.
        .map(|(theta, &floor)| theta.frontier(floor))
        .collect();
    let phi = PhiTable::build(candidates, scaled.search_cap);
    let Some((_, aggregate)) = phi.best_within(scaled.search_cap) else {
        return Ok(Outcome::Infeasible);
    };
    let picks = phi.backtrack(aggregate).ok_or(DpError::InconsistentTable {
        interval: instance.num_intervals - 1,
        node: instance.num_nodes,
        rounded: aggregate,
    })?;
    let mut assignment = Vec::with_capacity(instance.num_intervals);
    let mut intervals = Vec::with_capacity(instance.num_intervals);
    for (t, (theta, &pick)) in thetas.iter().zip(&picks).enumerate() {
        assignment.push(reconstruct_interval(theta, pick, t)?);
        intervals.push(IntervalChoice {
            interval: t,
            cost: pick.0,
            rounded_curtailment: pick.1,
        });
    }
    let schedule = Schedule::new(assignment);
    let total_cost = evaluate(instance, &schedule)?.total_cost;
    Ok(Outcome::Solved(DpSolution {
        schedule,
        total_cost,
        trace: DpTrace {
            epsilon: scaled.epsilon,
            mu: scaled.mu,
            rounded_cap: scaled.rounded_cap,
            search_cap: scaled.search_cap,
            rounded_aggregate: aggregate,
            intervals,
        },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

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

    fn opts(list: &[(usize, f64)]) -> Vec<NodeOption> {
        list.iter()
            .enumerate()
            .map(|(j, &(rounded, cost))| NodeOption {
                strategy: j,
                rounded,
                cost,
            })
            .collect()
    }

    #[test]
    fn ceiling_examples() {
        let scaled = scale_instance(&two_node(1, 7.0, 10.0), 0.2).unwrap();
        assert!((scaled.mu - 0.7).abs() < 1e-12);
        assert_eq!(scaled.rounded_curtailment[0][0], vec![0, 8]);
        assert_eq!(scaled.rounded_curtailment[0][1], vec![0, 6]);
        assert_eq!(scaled.rounded_targets, vec![10]);
        assert_eq!(scaled.rounded_cap, 15);
        assert_eq!(rounded_units(0.0, 0.3), 0);
    }

    #[test]
    fn scale_rejects_bad_inputs() {
        assert_eq!(
            scale_instance(&two_node(1, 0.0, 10.0), 0.2),
            Err(DpError::ZeroTarget { interval: 0 })
        );
        assert_eq!(
            scale_instance(&two_node(1, 7.0, 10.0), 1.5),
            Err(DpError::EpsilonOutOfRange(1.5))
        );
        assert_eq!(
            scale_instance(&two_node(1, 7.0, 10.0), 0.0),
            Err(DpError::EpsilonOutOfRange(0.0))
        );
    }

    #[test]
    fn theta_single_node() {
        let theta = ThetaTable::build(vec![opts(&[(0, 0.0), (8, 50.0)])], 10);
        assert_eq!(theta.get(8, 1), Some(50.0));
        assert_eq!(theta.get(3, 1), None);
        assert_eq!(theta.get(0, 1), Some(0.0));
    }

    #[test]
    fn theta_two_nodes_matches_enumeration() {
        let theta = ThetaTable::build(
            vec![opts(&[(0, 0.0), (8, 50.0)]), opts(&[(0, 0.0), (6, 32.0)])],
            15,
        );
        assert_eq!(theta.get(14, 2), Some(82.0));
        assert_eq!(theta.get(6, 2), Some(32.0));
        assert_eq!(theta.get(8, 2), Some(50.0));
        assert_eq!(theta.get(0, 2), Some(0.0));
        for g in [1, 5, 7, 9, 13, 15] {
            assert_eq!(theta.get(g, 2), None, "{g}");
        }
        assert_eq!(
            reconstruct_interval(&theta, (82.0, 14), 0).unwrap(),
            vec![1, 1]
        );
        assert_eq!(
            reconstruct_interval(&theta, (0.0, 0), 0).unwrap(),
            vec![0, 0]
        );
        assert_eq!(
            reconstruct_interval(&theta, (32.0, 6), 0).unwrap(),
            vec![0, 1]
        );
        assert_eq!(reconstruct_by_argmin(&theta, 14), Some(vec![1, 1]));
        assert!(matches!(
            reconstruct_interval(&theta, (81.0, 14), 0),
            Err(DpError::InconsistentTable { .. })
        ));
    }

    #[test]
    fn theta_ties_prefer_lower_strategy() {
        let theta = ThetaTable::build(vec![opts(&[(0, 0.0), (3, 5.0), (3, 5.0)])], 5);
        assert_eq!(reconstruct_interval(&theta, (5.0, 3), 0).unwrap(), vec![1]);
    }

    #[test]
    fn solve_single_interval() {
        let sol = solve_mcnlb(&two_node(1, 7.0, 10.0), 0.2)
            .unwrap()
            .solved()
            .unwrap();
        assert_eq!(sol.schedule.assignment, vec![vec![1, 1]]);
        assert_eq!(sol.total_cost, 82.0);
        assert_eq!(sol.trace.intervals[0].rounded_curtailment, 14);
    }

    #[test]
    fn solve_two_intervals_reaches_optimum_near_cap() {
        let sol = solve_mcnlb(&two_node(2, 7.0, 18.0), 0.2)
            .unwrap()
            .solved()
            .unwrap();
        assert_eq!(sol.total_cost, 164.0);
        assert_eq!(sol.schedule.assignment, vec![vec![1, 1], vec![1, 1]]);
    }

    #[test]
    fn unreachable_target_is_infeasible() {
        let inst = CurtailmentInstance {
            num_nodes: 2,
            num_strategies: 1,
            num_intervals: 1,
            curtailment: vec![vec![vec![0.0], vec![0.0]]],
            cost: vec![vec![vec![0.0], vec![0.0]]],
            interval_targets: vec![1e-6],
            aggregate_cap: 1.0,
            budgets: None,
        };
        assert_eq!(solve_mcnlb(&inst, 0.5).unwrap(), Outcome::Infeasible);
    }

    #[test]
    fn budgets_rejected() {
        let mut inst = two_node(1, 7.0, 10.0);
        inst.budgets = Some(vec![crate::model::Budget::new(0.0, 5.0); 2]);
        assert_eq!(solve_mcnlb(&inst, 0.2), Err(DpError::UnexpectedBudgets));
    }

    #[test]
    fn unit_scale_on_integers_is_exact() {
        let sol = solve_mcnlb_with(
            &two_node(2, 7.0, 18.0),
            &DpOptions {
                epsilon: 0.2,
                mu_override: Some(1.0),
            },
        )
        .unwrap()
        .solved()
        .unwrap();
        assert_eq!(sol.trace.search_cap, 18);
        assert_eq!(sol.total_cost, 164.0);
    }

    #[test]
    fn phi_prefers_lower_aggregate_on_ties() {
        let phi = PhiTable::build(vec![vec![(5.0, 2), (5.0, 3)]], 4);
        assert_eq!(phi.best_within(4), Some((5.0, 2)));
        assert_eq!(phi.backtrack(3), Some(vec![(5.0, 3)]));
    }
}
