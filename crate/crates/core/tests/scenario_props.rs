use curtail::scenario::{generate, CostShape, INTERVALS_PER_HOUR};
use curtail::{ScenarioMode, ScenarioSpec};
use proptest::prelude::*;

fn spec() -> impl Strategy<Value = ScenarioSpec> {
    (
        any::<u64>(),
        1usize..30,
        1usize..24,
        prop::sample::select(vec![
            ScenarioMode::Load,
            ScenarioMode::Solar,
            ScenarioMode::Mixed,
        ]),
        100.0f64..1500.0,
        0.0f64..1.0,
        prop::option::of(0.0f64..0.3),
        any::<bool>(),
    )
        .prop_map(|(seed, nodes, intervals, mode, l, extra, alpha, linear)| {
            let mut spec = ScenarioSpec {
                seed,
                nodes,
                intervals,
                mode,
                target_range: (l, l * (1.0 + extra)),
                alpha,
                ..ScenarioSpec::default()
            };
            if linear {
                spec.cost.shape = CostShape::Linear;
            }
            spec
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_instances_validate(spec in spec()) {
        for (_, inst) in generate(&spec).unwrap() {
            let errors = inst.validation_errors();
            prop_assert!(errors.is_empty(), "{errors:?}");
            prop_assert_eq!(inst.num_strategies, 6);
        }
    }

    #[test]
    fn generation_is_deterministic(spec in spec()) {
        prop_assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn costs_follow_the_cost_function(spec in spec()) {
        for (_, inst) in generate(&spec).unwrap() {
            for (gs, cs) in inst.curtailment.iter().flatten().zip(inst.cost.iter().flatten()) {
                for (&g, &c) in gs.iter().zip(cs) {
                    prop_assert_eq!(c, spec.cost.apply(g));
                }
            }
        }
    }

    #[test]
    fn pv_options_constant_within_each_hour(spec in spec()) {
        for (mode, inst) in generate(&spec).unwrap() {
            if mode == ScenarioMode::Solar {
                for hour in inst.curtailment.chunks(INTERVALS_PER_HOUR) {
                    prop_assert!(hour.iter().all(|nodes| nodes == &hour[0]));
                }
            }
        }
    }

    #[test]
    fn load_targets_total_lower_end(spec in spec()) {
        let spec = ScenarioSpec { mode: ScenarioMode::Load, ..spec };
        let (_, inst) = generate(&spec).unwrap().remove(0);
        prop_assert!((inst.total_target() - spec.target_range.0).abs() <= 1e-9 * spec.target_range.0);
        prop_assert_eq!(inst.aggregate_cap, spec.target_range.1);
    }
}
