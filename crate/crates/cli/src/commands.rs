use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use curtail::dp::DpTrace;
use curtail::evaluation::bound_report_with_tolerance;
use curtail::exact::ExactError;
use curtail::fair::{proportional_budgets, FairReport};
use curtail::online::{run_online_horizon, OnlineAssignment};
use curtail::scenario::read_radiance_csv;
use curtail::{
    brute_force, evaluate, exact_dp, solve_fair, solve_mcnlb, solve_online, BoundKind,
    CurtailmentInstance, EvaluationReport, FairOptions, OnlineContext, OnlineOptions, OnlineStep,
    Outcome, Problem, ScenarioMode, ScenarioSpec, Schedule,
};

use crate::error::{input, CliError};
use crate::io::{open_output, read_json, write_error, write_json};
use crate::{Algo, BoundArg, GenerateArgs, ProblemArg, SolveArgs, VerifyArgs};

pub fn generate(args: &GenerateArgs) -> Result<(), CliError> {
    let mut spec: ScenarioSpec = match &args.spec {
        Some(path) => read_json(path)?,
        None => ScenarioSpec::default(),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(nodes) = args.nodes {
        spec.nodes = nodes;
    }
    if let Some(intervals) = args.intervals {
        spec.intervals = intervals;
    }
    if let Some(mode) = args.mode {
        spec.mode = mode.into();
    }
    if let Some(range) = args.target_range {
        spec.target_range = (range.0, range.1);
    }
    if args.alpha.is_some() {
        spec.alpha = args.alpha;
    }
    if let Some(path) = &args.radiance {
        let file =
            std::fs::File::open(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        spec.radiance = Some(read_radiance_csv(file)?);
    }
    let generated = curtail::generate(&spec)?;
    let pick = |wanted: ScenarioMode| {
        generated
            .iter()
            .find(|(mode, _)| *mode == wanted)
            .map(|(_, inst)| inst)
            .ok_or_else(|| CliError::Solver(format!("generator returned no {wanted:?} instance")))
    };
    if spec.mode == ScenarioMode::Mixed {
        let pair = MixedOutput {
            load: pick(ScenarioMode::Load)?,
            solar: pick(ScenarioMode::Solar)?,
        };
        write_json(args.output.as_deref(), &pair)
    } else {
        write_json(args.output.as_deref(), pick(spec.mode)?)
    }
}

#[derive(Serialize)]
struct MixedOutput<'a> {
    load: &'a CurtailmentInstance,
    solar: &'a CurtailmentInstance,
}

/// Extra output of the online solver.
#[derive(Debug, Serialize, Deserialize)]
pub struct OnlineDetails {
    pub infeasible_intervals: Vec<usize>,
    pub steps: Vec<Option<OnlineAssignment>>,
}

/// What `solve` prints; `verify` reads back `schedule` and `bound`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolveOutput {
    pub algorithm: String,
    pub schedule: Schedule,
    pub total_cost: f64,
    pub evaluation: EvaluationReport,
    /// Guarantees this schedule is expected to meet.
    pub bound: BoundKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dp_trace: Option<DpTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fair_report: Option<FairReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub online: Option<OnlineDetails>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_problem: Option<Problem>,
}

fn load_instance(args: &SolveArgs) -> Result<CurtailmentInstance, CliError> {
    let path = args
        .instance
        .as_deref()
        .ok_or_else(|| input("--instance is required"))?;
    let mut inst: CurtailmentInstance = read_json(path)?;
    if let Some(alpha) = args.alpha {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(input(format!("alpha {alpha} outside [0, 1]")));
        }
        inst.budgets = Some(proportional_budgets(&inst, alpha));
    }
    inst.validate().map_err(|e| input(e.to_string()))
}

fn online_options(args: &SolveArgs) -> OnlineOptions {
    OnlineOptions {
        epsilon: args.epsilon,
        strict_filter: args.strict_online_filter,
    }
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    if args.stream {
        if args.algo != Algo::Online {
            return Err(input("--stream needs --algo online"));
        }
        return stream_online(args);
    }
    let inst = load_instance(args)?;
    let mut pending_infeasible = None;
    let output = match args.algo {
        Algo::Dp => {
            let Outcome::Solved(sol) = solve_mcnlb(&inst, args.epsilon)? else {
                return Err(CliError::Infeasible(format!(
                    "no schedule meets the rounded targets within the cap at epsilon {}",
                    args.epsilon
                )));
            };
            SolveOutput {
                algorithm: "dp".into(),
                evaluation: evaluate(&inst, &sol.schedule)?,
                total_cost: sol.total_cost,
                schedule: sol.schedule,
                bound: BoundKind::Dp {
                    epsilon: args.epsilon,
                    optimum: None,
                },
                dp_trace: Some(sol.trace),
                fair_report: None,
                online: None,
                exact_problem: None,
            }
        }
        Algo::Fair => {
            let sol = solve_fair(&inst, &FairOptions::default())?;
            let report = sol.report;
            SolveOutput {
                algorithm: "fair".into(),
                total_cost: report.evaluation.total_cost,
                evaluation: report.evaluation.clone(),
                schedule: sol.schedule,
                bound: BoundKind::Fair {
                    cost_kind: report.cost_kind,
                    lp_optimum: Some(report.lp_optimum),
                    spacing_k: report.lower_side_guaranteed.then_some(report.spacing_k),
                },
                dp_trace: None,
                fair_report: Some(report),
                online: None,
                exact_problem: None,
            }
        }
        Algo::Online => {
            let ctx = match &args.context {
                Some(path) => read_json(path)?,
                None => OnlineContext::from_instance(&inst)?,
            };
            let run = run_online_horizon(&inst, &ctx, &online_options(args))?;
            if !run.infeasible_intervals.is_empty() {
                pending_infeasible = Some(format!(
                    "intervals {:?} have no feasible choice; nodes keep their default strategy there",
                    run.infeasible_intervals
                ));
            }
            SolveOutput {
                algorithm: "online".into(),
                total_cost: run.report.total_cost,
                evaluation: run.report,
                schedule: run.schedule,
                bound: BoundKind::Online {
                    epsilon: args.epsilon,
                    context: ctx,
                },
                dp_trace: None,
                fair_report: None,
                online: Some(OnlineDetails {
                    infeasible_intervals: run.infeasible_intervals,
                    steps: run.steps,
                }),
                exact_problem: None,
            }
        }
        Algo::Exact => {
            let problem = match args.problem {
                Some(ProblemArg::Fair) => Problem::Fair,
                Some(ProblemArg::Mcnlb) => Problem::Mcnlb,
                None if inst.budgets.is_some() => Problem::Fair,
                None => Problem::Mcnlb,
            };
            let outcome = match problem {
                Problem::Mcnlb => match exact_dp(&inst) {
                    Err(ExactError::NotIntegral(_)) => brute_force(&inst, problem)?,
                    other => other?,
                },
                Problem::Fair => brute_force(&inst, problem)?,
            };
            let Outcome::Solved(sol) = outcome else {
                return Err(CliError::Infeasible(
                    "no schedule meets every target within the cap".into(),
                ));
            };
            SolveOutput {
                algorithm: "exact".into(),
                evaluation: evaluate(&inst, &sol.schedule)?,
                total_cost: sol.cost,
                schedule: sol.schedule,
                bound: BoundKind::Dp {
                    epsilon: 0.0,
                    optimum: Some(sol.cost),
                },
                dp_trace: None,
                fair_report: None,
                online: None,
                exact_problem: Some(problem),
            }
        }
    };
    if let Some(path) = &args.report_csv {
        let file =
            std::fs::File::create(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        output
            .evaluation
            .write_interval_csv(&inst, file)
            .map_err(|e| input(format!("{}: {e}", path.display())))?;
    }
    write_json(args.output.as_deref(), &output)?;
    match pending_infeasible {
        Some(message) => Err(CliError::Infeasible(message)),
        None => Ok(()),
    }
}

/// One line per input step; a malformed line stops the stream.
#[derive(Serialize)]
struct StreamLine {
    step: usize,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    assignment: Option<OnlineAssignment>,
}

fn stream_online(args: &SolveArgs) -> Result<(), CliError> {
    let path = args
        .context
        .as_deref()
        .ok_or_else(|| input("--stream needs --context"))?;
    let ctx: OnlineContext = read_json(path)?;
    let options = online_options(args);
    let mut out = open_output(args.output.as_deref())?;
    let mut infeasible = Vec::new();
    let mut step_index = 0;
    for line in std::io::stdin().lock().lines() {
        let line = line.map_err(|e| input(format!("reading standard input: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let step: OnlineStep =
            serde_json::from_str(&line).map_err(|e| input(format!("step {step_index}: {e}")))?;
        let record = match solve_online(&ctx, &step, &options)? {
            Outcome::Solved(a) => StreamLine {
                step: step_index,
                status: "solved",
                assignment: Some(a),
            },
            Outcome::Infeasible => {
                infeasible.push(step_index);
                StreamLine {
                    step: step_index,
                    status: "infeasible",
                    assignment: None,
                }
            }
        };
        let text = serde_json::to_string(&record)
            .map_err(|e| CliError::Solver(format!("serializing step: {e}")))?;
        writeln!(out, "{text}")
            .and_then(|_| out.flush())
            .map_err(write_error)?;
        step_index += 1;
    }
    if infeasible.is_empty() {
        Ok(())
    } else {
        Err(CliError::Infeasible(format!(
            "steps {infeasible:?} had no feasible choice"
        )))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SolutionFile {
    Full {
        schedule: Schedule,
        bound: Option<BoundKind>,
    },
    Bare(Schedule),
}

#[derive(Serialize)]
struct VerifyOutput {
    passed: bool,
    bound: BoundKind,
    tolerance: f64,
    #[serde(flatten)]
    report: curtail::BoundReport,
}

pub fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let inst: CurtailmentInstance = read_json(&args.instance)?;
    let inst = inst.validate().map_err(|e| input(e.to_string()))?;
    let (schedule, embedded) = match read_json::<SolutionFile>(&args.solution)? {
        SolutionFile::Full { schedule, bound } => (schedule, bound),
        SolutionFile::Bare(schedule) => (schedule, None),
    };
    let mut bound = match (args.kind, embedded) {
        (Some(kind), _) => bound_from_flags(kind, args, &inst)?,
        (None, Some(b)) => b,
        (None, None) => return Err(input("a bare schedule needs --kind")),
    };
    apply_overrides(&mut bound, args);
    if !(args.tolerance >= 0.0 && args.tolerance.is_finite()) {
        return Err(input(format!(
            "tolerance {} must be non-negative",
            args.tolerance
        )));
    }
    let report = bound_report_with_tolerance(&inst, &schedule, &bound, args.tolerance)?;
    let passed = report.passed();
    let failures: Vec<String> = report.failures().map(|r| r.family.clone()).collect();
    write_json(
        args.output.as_deref(),
        &VerifyOutput {
            passed,
            bound,
            tolerance: args.tolerance,
            report,
        },
    )?;
    if passed {
        Ok(())
    } else {
        Err(CliError::BoundViolation(format!(
            "failed bounds: {}",
            failures.join(", ")
        )))
    }
}

fn bound_from_flags(
    kind: BoundArg,
    args: &VerifyArgs,
    inst: &CurtailmentInstance,
) -> Result<BoundKind, CliError> {
    let need_epsilon = || {
        args.epsilon
            .ok_or_else(|| input("this bound needs --epsilon"))
    };
    Ok(match kind {
        BoundArg::Dp => BoundKind::Dp {
            epsilon: need_epsilon()?,
            optimum: args.optimum,
        },
        BoundArg::Fair => BoundKind::Fair {
            cost_kind: curtail::CostKind::detect(inst),
            lp_optimum: args.optimum,
            spacing_k: None,
        },
        BoundArg::Online => BoundKind::Online {
            epsilon: need_epsilon()?,
            context: match &args.context {
                Some(path) => read_json(path)?,
                None => OnlineContext::from_instance(inst)?,
            },
        },
    })
}

fn apply_overrides(bound: &mut BoundKind, args: &VerifyArgs) {
    match bound {
        BoundKind::Dp { epsilon, optimum } => {
            if let Some(e) = args.epsilon {
                *epsilon = e;
            }
            if args.optimum.is_some() {
                *optimum = args.optimum;
            }
        }
        BoundKind::Fair { lp_optimum, .. } => {
            if args.optimum.is_some() {
                *lp_optimum = args.optimum;
            }
        }
        BoundKind::Online { epsilon, .. } => {
            if let Some(e) = args.epsilon {
                *epsilon = e;
            }
        }
    }
}
