//! Grid experiments. Rows come out in grid order whatever the worker count,
//! so output is byte-identical across runs unless `--timing` is set.

use std::time::Instant;

use rayon::prelude::*;

use curtail::evaluation::{budget_shares, error_pct};
use curtail::online::run_online_horizon;
use curtail::{
    generate, gini, solve_fair, solve_mcnlb, CurtailmentInstance, EvaluationReport, FairError,
    FairOptions, OnlineContext, OnlineOptions, Outcome, ScenarioMode, ScenarioSpec,
};

use crate::error::{input, CliError};
use crate::io::open_output;
use crate::{Algo, SweepArgs};

const COLUMNS: [&str; 16] = [
    "algorithm",
    "lower",
    "upper",
    "seed",
    "epsilon",
    "alpha",
    "status",
    "total_cost",
    "reference_cost",
    "cost_ratio",
    "target_error_pct",
    "cap_error_pct",
    "budget_overshoot_pct",
    "gini",
    "infeasible_intervals",
    "note",
];

#[derive(Clone, Copy)]
struct Cell {
    lower: f64,
    upper: f64,
    seed: u64,
    epsilon: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Default)]
struct Measures {
    status: &'static str,
    total_cost: Option<f64>,
    reference_cost: Option<f64>,
    cost_ratio: Option<f64>,
    target_error_pct: Option<f64>,
    cap_error_pct: Option<f64>,
    budget_overshoot_pct: Option<f64>,
    gini: Option<f64>,
    infeasible_intervals: Option<usize>,
    note: String,
}

impl Measures {
    fn solved(inst: &CurtailmentInstance, report: &EvaluationReport) -> Self {
        let shortfall = report
            .worst_target_factor()
            .map(|f| ((1.0 - f) * 100.0).max(0.0));
        let cap = report
            .cap_violation_factor
            .value()
            .map(|f| ((f - 1.0) * 100.0).max(0.0));
        let overshoot = report
            .worst_budget_upper_factor()
            .map(|f| ((f - 1.0) * 100.0).max(0.0));
        let gini = inst.budgets.as_ref().and_then(|budgets| {
            let uppers: Vec<f64> = budgets.iter().map(|b| b.upper_budget).collect();
            gini(&budget_shares(&report.per_node_curtailment, &uppers)).ok()
        });
        Self {
            status: "solved",
            total_cost: Some(report.total_cost),
            target_error_pct: shortfall,
            cap_error_pct: cap,
            budget_overshoot_pct: overshoot,
            gini,
            ..Self::default()
        }
    }

    fn status(status: &'static str, note: String) -> Self {
        Self {
            status,
            note,
            ..Self::default()
        }
    }
}

fn fmt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fair_measures(inst: &CurtailmentInstance) -> Measures {
    match solve_fair(inst, &FairOptions::default()) {
        Ok(sol) => {
            let mut m = Measures::solved(inst, &sol.report.evaluation);
            m.reference_cost = Some(sol.report.lp_optimum);
            m.cost_ratio = sol.report.cost_ratio.value();
            m
        }
        Err(e) if e.is_infeasible() => Measures::status("infeasible", e.to_string()),
        Err(e) => Measures::status("error", e.to_string()),
    }
}

fn run_cell(algo: Algo, args: &SweepArgs, cell: Cell) -> Result<Measures, CliError> {
    let spec = ScenarioSpec {
        seed: cell.seed,
        nodes: args.nodes,
        intervals: args.intervals,
        mode: args.mode.into(),
        target_range: (cell.lower, cell.upper),
        alpha: cell.alpha,
        ..ScenarioSpec::default()
    };
    let inst = generate(&spec)?.remove(0).1;
    Ok(match algo {
        Algo::Dp => match solve_mcnlb(&inst, cell.epsilon.unwrap_or_default()) {
            Ok(Outcome::Solved(sol)) => match curtail::evaluate(&inst, &sol.schedule) {
                Ok(report) => Measures::solved(&inst, &report),
                Err(e) => Measures::status("error", e.to_string()),
            },
            Ok(Outcome::Infeasible) => Measures::status("infeasible", String::new()),
            Err(e) => Measures::status("error", e.to_string()),
        },
        Algo::Fair => fair_measures(&inst),
        Algo::Online => {
            let options = OnlineOptions {
                epsilon: cell.epsilon.unwrap_or_default(),
                strict_filter: args.strict_online_filter,
            };
            let run = OnlineContext::from_instance(&inst)
                .and_then(|ctx| run_online_horizon(&inst, &ctx, &options));
            match run {
                Ok(run) => {
                    let mut m = Measures::solved(&inst, &run.report);
                    m.infeasible_intervals = Some(run.infeasible_intervals.len());
                    if !run.infeasible_intervals.is_empty() {
                        m.status = "partial";
                    }
                    match solve_fair(&inst, &FairOptions::default()) {
                        Ok(offline) => {
                            let reference = offline.report.evaluation.total_cost;
                            m.reference_cost = Some(reference);
                            m.cost_ratio =
                                (reference > 0.0).then(|| run.report.total_cost / reference);
                            if let Some(e) = error_pct(run.report.total_cost, reference) {
                                m.note = format!("cost error {e:.2}% vs offline fair");
                            }
                        }
                        Err(FairError::LpInfeasible | FairError::BudgetUnreachable { .. }) => {
                            m.note = "offline fair reference infeasible".into();
                        }
                        Err(e) => m.note = format!("offline fair reference failed: {e}"),
                    }
                    m
                }
                Err(e) => Measures::status("error", e.to_string()),
            }
        }
        Algo::Exact => unreachable!("rejected before the sweep starts"),
    })
}

fn grid(args: &SweepArgs) -> Vec<Cell> {
    let epsilons: Vec<Option<f64>> = match args.alg {
        Algo::Fair => vec![None],
        _ => args.epsilon.iter().copied().map(Some).collect(),
    };
    let alphas: Vec<Option<f64>> = match args.alg {
        Algo::Dp => vec![None],
        _ => args.alpha.iter().copied().map(Some).collect(),
    };
    let mut cells = Vec::new();
    for range in &args.target_range {
        for seed in args.seed..args.seed + args.seeds {
            for &epsilon in &epsilons {
                for &alpha in &alphas {
                    cells.push(Cell {
                        lower: range.0,
                        upper: range.1,
                        seed,
                        epsilon,
                        alpha,
                    });
                }
            }
        }
    }
    cells
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    if args.alg == Algo::Exact {
        return Err(input("sweep supports dp, fair and online"));
    }
    if args.mode == crate::ModeArg::Mixed {
        return Err(input("sweep needs a single scenario mode, load or solar"));
    }
    if args.seeds == 0 {
        return Err(input("--seeds must be at least 1"));
    }
    let cells = grid(args);
    // Reject bad grids before spending time on solves.
    for cell in &cells {
        let spec = ScenarioSpec {
            nodes: args.nodes,
            intervals: args.intervals,
            mode: ScenarioMode::from(args.mode),
            target_range: (cell.lower, cell.upper),
            alpha: cell.alpha,
            ..ScenarioSpec::default()
        };
        if let Some(eps) = cell.epsilon {
            if !(eps > 0.0 && eps <= 1.0) {
                return Err(input(format!("epsilon {eps} outside (0, 1]")));
            }
        }
        generate(&ScenarioSpec {
            seed: cell.seed,
            ..spec
        })?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| input(format!("worker pool: {e}")))?;
    let results: Vec<Result<(Measures, f64), CliError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&cell| {
                let start = Instant::now();
                run_cell(args.alg, args, cell).map(|m| (m, start.elapsed().as_secs_f64()))
            })
            .collect()
    });
    let algorithm = match args.alg {
        Algo::Dp => "dp",
        Algo::Fair => "fair",
        Algo::Online => "online",
        Algo::Exact => "exact",
    };
    let mut writer = csv::Writer::from_writer(open_output(args.output.as_deref())?);
    let csv_error = |e: csv::Error| input(format!("writing CSV: {e}"));
    let mut header: Vec<&str> = COLUMNS.to_vec();
    if args.timing {
        header.push("runtime_s");
    }
    writer.write_record(&header).map_err(csv_error)?;
    for (cell, result) in cells.iter().zip(results) {
        let (m, seconds) = result?;
        let mut record = vec![
            algorithm.to_string(),
            cell.lower.to_string(),
            cell.upper.to_string(),
            cell.seed.to_string(),
            fmt(cell.epsilon),
            fmt(cell.alpha),
            m.status.to_string(),
            fmt(m.total_cost),
            fmt(m.reference_cost),
            fmt(m.cost_ratio),
            fmt(m.target_error_pct),
            fmt(m.cap_error_pct),
            fmt(m.budget_overshoot_pct),
            fmt(m.gini),
            fmt(m.infeasible_intervals),
            m.note,
        ];
        if args.timing {
            record.push(seconds.to_string());
        }
        writer.write_record(&record).map_err(csv_error)?;
    }
    writer
        .flush()
        .map_err(|e| input(format!("writing CSV: {e}")))
}
