#![allow(dead_code)]

use curtail::fair::proportional_budgets;
use curtail::{Budget, CurtailmentInstance};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Non-default strategies per (interval, node) as `(curtailment, cost)`.
pub type Draws = Vec<Vec<Vec<(u32, u32)>>>;

/// Assemble an integer instance: strategy 0 is the `(0, 0)` default, each
/// interval target is a fraction of what its nodes can curtail (at least 1),
/// and the cap adds `cap_slack` on top of the target total.
pub fn from_draws(draws: &Draws, target_fractions: &[f64], cap_slack: f64) -> CurtailmentInstance {
    let t_len = draws.len();
    let m = draws[0].len();
    let n = draws[0][0].len() + 1;
    let mut curtailment = Vec::with_capacity(t_len);
    let mut cost = Vec::with_capacity(t_len);
    let mut targets = Vec::with_capacity(t_len);
    for (t, nodes) in draws.iter().enumerate() {
        let mut g_rows = Vec::with_capacity(m);
        let mut c_rows = Vec::with_capacity(m);
        let mut capacity = 0u32;
        for row in nodes {
            let mut g = vec![0.0];
            let mut c = vec![0.0];
            for &(gv, cv) in row {
                g.push(gv as f64);
                c.push(cv as f64);
            }
            capacity += row.iter().map(|p| p.0).max().unwrap_or(0);
            g_rows.push(g);
            c_rows.push(c);
        }
        curtailment.push(g_rows);
        cost.push(c_rows);
        targets.push((target_fractions[t] * capacity as f64).round().max(1.0));
    }
    let total: f64 = targets.iter().sum();
    CurtailmentInstance {
        num_nodes: m,
        num_strategies: n,
        num_intervals: t_len,
        curtailment,
        cost,
        interval_targets: targets,
        aggregate_cap: (total * (1.0 + cap_slack)).round(),
        budgets: None,
    }
}

pub fn integer_instance(
    max_nodes: usize,
    max_strategies: usize,
    max_intervals: usize,
) -> impl Strategy<Value = CurtailmentInstance> {
    (1..=max_nodes, 2..=max_strategies, 1..=max_intervals).prop_flat_map(|(m, n, t)| {
        (
            prop::collection::vec(
                prop::collection::vec(prop::collection::vec((1u32..=9, 1u32..=60), n - 1), m),
                t,
            ),
            prop::collection::vec(0.05f64..1.0, t),
            0.0f64..0.6,
        )
            .prop_map(|(draws, fracs, slack)| from_draws(&draws, &fracs, slack))
    })
}

/// Seeded counterpart of [`integer_instance`] for fixed-count suites.
pub fn random_integer_instance(
    rng: &mut ChaCha8Rng,
    max_nodes: usize,
    max_strategies: usize,
    max_intervals: usize,
) -> CurtailmentInstance {
    let m = rng.gen_range(1..=max_nodes);
    let n = rng.gen_range(2..=max_strategies);
    let t = rng.gen_range(1..=max_intervals);
    let draws: Draws = (0..t)
        .map(|_| {
            (0..m)
                .map(|_| {
                    (1..n)
                        .map(|_| (rng.gen_range(1..=9), rng.gen_range(1..=60)))
                        .collect()
                })
                .collect()
        })
        .collect();
    let fracs: Vec<f64> = (0..t).map(|_| rng.gen_range(0.05..1.0)).collect();
    let slack = rng.gen_range(0.0..0.6);
    from_draws(&draws, &fracs, slack)
}

/// Replace costs with `a * gamma` (linear) or `2 * gamma^2` (quadratic).
pub fn with_cost_shape(
    mut instance: CurtailmentInstance,
    quadratic: bool,
    a: f64,
) -> CurtailmentInstance {
    for (t, nodes) in instance.curtailment.iter().enumerate() {
        for (b, row) in nodes.iter().enumerate() {
            for (j, &g) in row.iter().enumerate() {
                instance.cost[t][b][j] = if quadratic { 2.0 * g * g } else { a * g };
            }
        }
    }
    instance
}

/// Attach capacity-proportional budgets with a loose upper side so that most
/// draws stay feasible.
pub fn with_budgets(
    mut instance: CurtailmentInstance,
    alpha: f64,
    stretch: f64,
) -> CurtailmentInstance {
    let budgets: Vec<Budget> = proportional_budgets(&instance, alpha)
        .into_iter()
        .map(|b| Budget::new(b.lower_fraction, b.upper_budget * stretch))
        .collect();
    let floors: f64 = budgets.iter().map(Budget::lower).sum();
    if floors > instance.aggregate_cap {
        instance.aggregate_cap = floors.ceil();
    }
    instance.budgets = Some(budgets);
    instance
}

pub fn random_budgeted_instance(
    rng: &mut ChaCha8Rng,
    max_nodes: usize,
    max_strategies: usize,
    max_intervals: usize,
    quadratic: bool,
) -> CurtailmentInstance {
    let base = random_integer_instance(rng, max_nodes, max_strategies, max_intervals);
    let a = rng.gen_range(1.0..10.0);
    let alpha = rng.gen_range(0.0..0.3);
    let stretch = rng.gen_range(1.0..2.0);
    with_budgets(with_cost_shape(base, quadratic, a), alpha, stretch)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
