//! Curtailment scheduling for net-load balancing.
//!
//! Every (interval, node) pair picks one discrete curtailment strategy so that
//! each interval meets its target and the horizon total stays under a cap, at
//! minimum cost. Solvers:
//!
//! - [`dp::solve_mcnlb`]: rounded dynamic program with `(1 -/+ epsilon)`
//!   constraint factors and cost no higher than the optimum.
//! - [`fair::solve_fair`]: LP relaxation and nearest-strategy rounding under
//!   per-node budget bands.
//! - [`online::solve_online`]: single-interval heuristic with pro-rated bounds.
//! - [`exact::brute_force`] and [`exact::exact_dp`]: ground truth for small
//!   instances.

// Negated comparisons deliberately reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dp;
pub mod evaluation;
pub mod exact;
pub mod fair;
pub mod model;
pub mod online;
pub mod scenario;
pub mod simplex;

pub use dp::{solve_mcnlb, DpError, DpSolution};
pub use evaluation::{bound_report, gini, BoundKind, BoundReport};
pub use exact::{brute_force, exact_dp, Problem};
pub use fair::{solve_fair, CostKind, FairError, FairOptions, FairSolution};
pub use model::{
    evaluate, Budget, CurtailmentInstance, EvaluationReport, Outcome, Ratio, Schedule,
};
pub use online::{solve_online, OnlineContext, OnlineOptions, OnlineStep};
pub use scenario::{generate, ScenarioMode, ScenarioSpec};
pub use simplex::{solve_lp, LinearProgram, LpSolution, LpStatus};
