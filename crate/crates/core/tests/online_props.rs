mod common;

use curtail::online::{derive_online_bounds, filter_strategies, run_online_horizon};
use curtail::{solve_online, OnlineContext, OnlineOptions, OnlineStep, Outcome};
use proptest::prelude::*;

fn horizon() -> impl Strategy<Value = (curtail::CurtailmentInstance, f64)> {
    (
        common::integer_instance(4, 4, 4),
        0.0f64..0.2,
        1.0f64..2.0,
        prop::sample::select(vec![0.5, 0.2, 0.1, 0.05]),
    )
        .prop_map(|(inst, alpha, stretch, eps)| (common::with_budgets(inst, alpha, stretch), eps))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn per_step_guarantees((inst, eps) in horizon(), strict in any::<bool>()) {
        let ctx = OnlineContext::from_instance(&inst).unwrap();
        let options = OnlineOptions { epsilon: eps, strict_filter: strict };
        for t in 0..inst.num_intervals {
            let step = OnlineStep::from_instance(&inst, t);
            if let Outcome::Solved(a) = solve_online(&ctx, &step, &options).unwrap() {
                let floor = (1.0 - eps) * step.target;
                prop_assert!(a.curtailment >= floor - 1e-6 * floor.max(1.0));
                let cap = (1.0 + eps) * a.bounds.upper_target;
                prop_assert!(a.curtailment <= cap + 1e-6 * cap.max(1.0));
                for (g, &(_, hi)) in a.per_node_curtailment.iter().zip(&a.bounds.node_bands) {
                    prop_assert!(*g <= (1.0 + eps) * hi + 1e-9);
                }
            }
        }
    }

    #[test]
    fn filtered_sets_respect_bands((inst, _) in horizon()) {
        let ctx = OnlineContext::from_instance(&inst).unwrap();
        for t in 0..inst.num_intervals {
            let step = OnlineStep::from_instance(&inst, t);
            let bounds = derive_online_bounds(&ctx, &step);
            let kept = filter_strategies(&step, &bounds, true);
            for (b, js) in kept.iter().enumerate() {
                let (lo, hi) = bounds.node_bands[b];
                for &j in js {
                    let g = step.curtailment[b][j];
                    prop_assert!(g >= lo - 1e-6 && g <= hi + 1e-6);
                }
            }
            let relaxed = filter_strategies(&step, &bounds, false);
            for (b, js) in relaxed.iter().enumerate() {
                prop_assert!(js.iter().any(|&j| step.curtailment[b][j] == 0.0));
            }
        }
    }

    #[test]
    fn horizon_report_sums_steps((inst, eps) in horizon()) {
        let ctx = OnlineContext::from_instance(&inst).unwrap();
        let run = run_online_horizon(&inst, &ctx, &OnlineOptions::new(eps)).unwrap();
        let step_cost: f64 = run.steps.iter().flatten().map(|a| a.cost).sum();
        prop_assert!(common::close(run.report.total_cost, step_cost, 1e-12));
        prop_assert_eq!(
            run.infeasible_intervals.len(),
            run.steps.iter().filter(|s| s.is_none()).count()
        );
    }
}
