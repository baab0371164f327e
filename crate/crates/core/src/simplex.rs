//! Dense bounded-variable primal simplex.
//!
//! Solves `minimize c'x` subject to rows `a'x (<=|>=|=) b` and per-variable
//! bounds `lo <= x <= hi` (either side may be infinite). Variables are shifted
//! to `[0, u]`, rows normalized to non-negative right-hand sides, and a
//! two-phase method is run on a dense tableau. Nonbasic variables sit at
//! either bound, so finite upper bounds never become rows.
//!
//! Pricing is Dantzig's largest reduced cost. After a run of degenerate pivots
//! the solver switches to Bland's smallest-index rule until the objective
//! moves again. Every optimal answer is re-substituted into the original rows
//! and checked against a dual bound rebuilt from the original matrix.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const PHASE1_TOL: f64 = 1e-7;
const DEGENERATE_STREAK: usize = 50;
/// Eliminated entries below this magnitude are cancellation noise.
const DROP_TOL: f64 = 1e-13;
/// Relative tolerance for the feasibility re-substitution pass.
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    /// Sparse `(variable, coefficient)` terms.
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    /// Minimized.
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// `(lo, hi)` per variable.
    pub bounds: Vec<(f64, f64)>,
    #[serde(default)]
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Empty unless optimal.
    pub values: Vec<f64>,
    /// `+inf` when infeasible, `-inf` when unbounded.
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("invalid linear program: {0}")]
    InvalidProgram(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            rows: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
            names: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) {
        self.rows.push(Row {
            name: name.into(),
            terms,
            relation,
            rhs,
        });
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = vec![(lo, hi); self.num_vars()];
        self
    }

    fn var_name(&self, i: usize) -> String {
        self.names
            .get(i)
            .cloned()
            .unwrap_or_else(|| format!("x{i}"))
    }

    pub fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let bad = |msg: String| Err(LpError::InvalidProgram(msg));
        if self.bounds.len() != n {
            return bad(format!("{} bounds for {n} variables", self.bounds.len()));
        }
        if !self.names.is_empty() && self.names.len() != n {
            return bad(format!("{} names for {n} variables", self.names.len()));
        }
        if let Some(i) = self.objective.iter().position(|c| !c.is_finite()) {
            return bad(format!("objective coefficient {i} is not finite"));
        }
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan()
                || hi.is_nan()
                || lo > hi
                || lo == f64::INFINITY
                || hi == f64::NEG_INFINITY
            {
                return bad(format!("variable {i} has bounds [{lo}, {hi}]"));
            }
        }
        for row in &self.rows {
            if !row.rhs.is_finite() {
                return bad(format!("row {} has a non-finite right-hand side", row.name));
            }
            for &(j, a) in &row.terms {
                if j >= n || !a.is_finite() {
                    return bad(format!("row {} has a bad term ({j}, {a})", row.name));
                }
            }
        }
        Ok(())
    }

    /// Value of row `row` at `x`.
    pub fn row_activity(&self, row: &Row, x: &[f64]) -> f64 {
        row.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Whether `x` satisfies every row and bound within `rel_tol` relative
    /// (to `1 + |rhs|`) tolerance.
    pub fn is_feasible(&self, x: &[f64], rel_tol: f64) -> bool {
        let bounds_ok = self.bounds.iter().zip(x).all(|(&(lo, hi), &v)| {
            v >= lo - rel_tol * (1.0 + lo.abs()) && v <= hi + rel_tol * (1.0 + hi.abs())
        });
        bounds_ok
            && self.rows.iter().all(|row| {
                let lhs = self.row_activity(row, x);
                let tol = rel_tol * (1.0 + row.rhs.abs());
                match row.relation {
                    Relation::Le => lhs <= row.rhs + tol,
                    Relation::Ge => lhs >= row.rhs - tol,
                    Relation::Eq => (lhs - row.rhs).abs() <= tol,
                }
            })
    }

    /// CPLEX LP text format, for cross-checking with external solvers.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::from("\\ curtail linear program\nMinimize\n obj:");
        let mut wrote = false;
        for (i, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                write_term(&mut out, c, &self.var_name(i), !wrote);
                wrote = true;
            }
        }
        if !wrote {
            out.push_str(" 0 ");
            out.push_str(&self.var_name(0));
        }
        out.push_str("\nSubject To\n");
        for (k, row) in self.rows.iter().enumerate() {
            let name = if row.name.is_empty() {
                format!("c{k}")
            } else {
                row.name.clone()
            };
            let _ = write!(out, " {name}:");
            if row.terms.is_empty() {
                out.push_str(" 0 ");
                out.push_str(&self.var_name(0));
            }
            for (idx, &(j, a)) in row.terms.iter().enumerate() {
                write_term(&mut out, a, &self.var_name(j), idx == 0);
            }
            let op = match row.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            let name = self.var_name(i);
            let _ = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => writeln!(out, " {lo} <= {name} <= {hi}"),
                (true, false) => writeln!(out, " {name} >= {lo}"),
                (false, true) => writeln!(out, " -inf <= {name} <= {hi}"),
                (false, false) => writeln!(out, " {name} free"),
            };
        }
        out.push_str("End\n");
        out
    }
}

fn write_term(out: &mut String, coef: f64, name: &str, first: bool) {
    let sign = if coef < 0.0 { "-" } else { "+" };
    if first {
        if coef < 0.0 {
            let _ = write!(out, " - {} {name}", -coef);
        } else {
            let _ = write!(out, " {coef} {name}");
        }
    } else {
        let _ = write!(out, " {sign} {} {name}", coef.abs());
    }
}

/// How an original variable maps onto non-negative tableau columns.
#[derive(Debug, Clone)]
struct VarMap {
    offset: f64,
    /// `(column, sign)`; two entries for free variables.
    parts: Vec<(usize, f64)>,
}

struct Tableau {
    m: usize,
    ncols: usize,
    a: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    at_upper: Vec<bool>,
    ub: Vec<f64>,
    enterable: Vec<bool>,
    d: Vec<f64>,
    iterations: usize,
    iteration_cap: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn reduced_costs(&mut self, cost: &[f64]) {
        let mut d = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.a[i * self.ncols..(i + 1) * self.ncols];
                for (dj, &aij) in d.iter_mut().zip(row) {
                    *dj -= cb * aij;
                }
            }
        }
        for i in 0..self.m {
            d[self.basis[i]] = 0.0;
        }
        self.d = d;
    }

    fn price(&self, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.ncols {
            if self.is_basic[j] || !self.enterable[j] {
                continue;
            }
            let dj = self.d[j];
            let improving = if self.at_upper[j] {
                dj > OPT_TOL
            } else {
                dj < -OPT_TOL && self.ub[j] > 0.0
            };
            if !improving {
                continue;
            }
            if bland {
                return Some(j);
            }
            if best.is_none_or(|(_, v)| dj.abs() > v) {
                best = Some((j, dj.abs()));
            }
        }
        best.map(|(j, _)| j)
    }

    fn run(&mut self, bland_only: bool) -> Result<PhaseEnd, LpError> {
        let mut streak = 0usize;
        loop {
            let bland = bland_only || streak >= DEGENERATE_STREAK;
            let Some(q) = self.price(bland) else {
                return Ok(PhaseEnd::Optimal);
            };
            self.iterations += 1;
            if self.iterations > self.iteration_cap {
                return Err(LpError::NumericalBreakdown(format!(
                    "iteration cap {} exceeded",
                    self.iteration_cap
                )));
            }
            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };
            let mut theta = self.ub[q];
            // (row, leaves at upper, |pivot|)
            let mut leave: Option<(usize, bool, f64)> = None;
            for i in 0..self.m {
                let alpha = self.a[i * self.ncols + q] * dir;
                let var = self.basis[i];
                let (limit, to_upper) = if alpha > PIVOT_TOL {
                    (self.beta[i].max(0.0) / alpha, false)
                } else if alpha < -PIVOT_TOL && self.ub[var].is_finite() {
                    ((self.ub[var] - self.beta[i]).max(0.0) / -alpha, true)
                } else {
                    continue;
                };
                let tie = 1e-12 * theta.abs().max(1.0);
                let better = match leave {
                    _ if limit < theta - tie => true,
                    None => limit <= theta,
                    Some((r, _, piv)) if (limit - theta).abs() <= tie => {
                        if bland {
                            var < self.basis[r]
                        } else {
                            alpha.abs() > piv
                        }
                    }
                    Some(_) => false,
                };
                if better {
                    theta = limit.min(theta);
                    leave = Some((i, to_upper, alpha.abs()));
                }
            }
            if theta.is_infinite() {
                return Ok(PhaseEnd::Unbounded);
            }
            if theta <= 1e-12 {
                streak += 1;
            } else {
                streak = 0;
            }
            for i in 0..self.m {
                let aiq = self.a[i * self.ncols + q];
                if aiq != 0.0 {
                    self.beta[i] -= aiq * dir * theta;
                }
            }
            let entering_value = if self.at_upper[q] { self.ub[q] } else { 0.0 } + dir * theta;
            match leave {
                None => {
                    self.at_upper[q] = !self.at_upper[q];
                }
                Some((r, to_upper, _)) => {
                    let out = self.basis[r];
                    self.is_basic[out] = false;
                    self.at_upper[out] = to_upper;
                    self.pivot(r, q);
                    self.basis[r] = q;
                    self.is_basic[q] = true;
                    self.at_upper[q] = false;
                    self.beta[r] = entering_value;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let n = self.ncols;
        let piv = self.a[r * n + q];
        for v in &mut self.a[r * n..(r + 1) * n] {
            *v /= piv;
        }
        let (before, rest) = self.a.split_at_mut(r * n);
        let (prow, after) = rest.split_at_mut(n);
        let nonzero: Vec<usize> = (0..n).filter(|&j| prow[j] != 0.0).collect();
        let eliminate = |row: &mut [f64]| {
            let f = row[q];
            if f != 0.0 {
                for &j in &nonzero {
                    let v = row[j] - f * prow[j];
                    row[j] = if v.abs() < DROP_TOL { 0.0 } else { v };
                }
                row[q] = 0.0;
            }
        };
        for row in before.chunks_mut(n) {
            eliminate(row);
        }
        for row in after.chunks_mut(n) {
            eliminate(row);
        }
        let f = self.d[q];
        if f != 0.0 {
            for &j in &nonzero {
                self.d[j] -= f * prow[j];
            }
            self.d[q] = 0.0;
        }
    }

    fn column_values(&self) -> Vec<f64> {
        let mut y: Vec<f64> = (0..self.ncols)
            .map(|j| if self.at_upper[j] { self.ub[j] } else { 0.0 })
            .collect();
        for (i, &var) in self.basis.iter().enumerate() {
            y[var] = self.beta[i];
        }
        y
    }
}

/// Solve `lp` to optimality, or report it infeasible or unbounded.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.check()?;
    let n = lp.num_vars();

    // Shift variables onto [0, u].
    let mut maps = Vec::with_capacity(n);
    let mut col_ub = Vec::new();
    for &(lo, hi) in &lp.bounds {
        let map = if lo.is_finite() {
            col_ub.push(hi - lo);
            VarMap {
                offset: lo,
                parts: vec![(col_ub.len() - 1, 1.0)],
            }
        } else if hi.is_finite() {
            col_ub.push(f64::INFINITY);
            VarMap {
                offset: hi,
                parts: vec![(col_ub.len() - 1, -1.0)],
            }
        } else {
            col_ub.push(f64::INFINITY);
            col_ub.push(f64::INFINITY);
            let k = col_ub.len();
            VarMap {
                offset: 0.0,
                parts: vec![(k - 2, 1.0), (k - 1, -1.0)],
            }
        };
        maps.push(map);
    }
    let nstruct = col_ub.len();
    let mut struct_cost = vec![0.0; nstruct];
    let mut const_obj = 0.0;
    for (i, map) in maps.iter().enumerate() {
        const_obj += lp.objective[i] * map.offset;
        for &(c, s) in &map.parts {
            struct_cost[c] += lp.objective[i] * s;
        }
    }

    // Rows in shifted space, normalized to `<=` with rhs >= 0 where possible.
    let m = lp.rows.len();
    let mut dense = vec![0.0; m * nstruct];
    let mut rhs = vec![0.0; m];
    let mut kinds = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let mut b = row.rhs;
        for &(j, a) in &row.terms {
            b -= a * maps[j].offset;
            for &(c, s) in &maps[j].parts {
                dense[i * nstruct + c] += a * s;
            }
        }
        let mut rel = row.relation;
        if rel == Relation::Ge {
            rel = Relation::Le;
            b = -b;
            dense[i * nstruct..(i + 1) * nstruct]
                .iter_mut()
                .for_each(|v| *v = -*v);
        }
        if b < 0.0 {
            b = -b;
            dense[i * nstruct..(i + 1) * nstruct]
                .iter_mut()
                .for_each(|v| *v = -*v);
            if rel == Relation::Le {
                rel = Relation::Ge;
            }
        }
        rhs[i] = b;
        kinds.push(rel);
    }

    // Column layout: structural | slacks | artificials.
    let slack_rows: Vec<usize> = (0..m).filter(|&i| kinds[i] != Relation::Eq).collect();
    let art_rows: Vec<usize> = (0..m).filter(|&i| kinds[i] != Relation::Le).collect();
    let nslack = slack_rows.len();
    let ncols = nstruct + nslack + art_rows.len();
    let mut a = vec![0.0; m * ncols];
    for i in 0..m {
        a[i * ncols..i * ncols + nstruct].copy_from_slice(&dense[i * nstruct..(i + 1) * nstruct]);
    }
    // Row -> (column, sign) of the unit column that prices its dual.
    let mut dual_col = vec![(0usize, 0.0f64); m];
    let mut basis = vec![0usize; m];
    for (k, &i) in slack_rows.iter().enumerate() {
        let sign = if kinds[i] == Relation::Le { 1.0 } else { -1.0 };
        a[i * ncols + nstruct + k] = sign;
        dual_col[i] = (nstruct + k, sign);
        if kinds[i] == Relation::Le {
            basis[i] = nstruct + k;
        }
    }
    for (k, &i) in art_rows.iter().enumerate() {
        let col = nstruct + nslack + k;
        a[i * ncols + col] = 1.0;
        dual_col[i] = (col, 1.0);
        basis[i] = col;
    }
    let mut ub = col_ub.clone();
    ub.extend(std::iter::repeat_n(f64::INFINITY, nslack + art_rows.len()));
    let mut enterable = vec![true; ncols];
    let mut beta = rhs.clone();

    // Crash: a structural column that is nonzero only in an artificial row,
    // with a positive entry and room for the row's value, replaces that
    // row's artificial in the starting basis.
    let mut col_row = vec![usize::MAX; nstruct];
    for i in 0..m {
        for c in 0..nstruct {
            if dense[i * nstruct + c] != 0.0 {
                col_row[c] = if col_row[c] == usize::MAX {
                    i
                } else {
                    usize::MAX - 1
                };
            }
        }
    }
    for (k, &i) in art_rows.iter().enumerate() {
        let pick = (0..nstruct).find(|&c| {
            let v = dense[i * nstruct + c];
            col_row[c] == i && v > PIVOT_TOL && rhs[i] / v <= col_ub[c]
        });
        if let Some(c) = pick {
            let piv = dense[i * nstruct + c];
            a[i * ncols..(i + 1) * ncols]
                .iter_mut()
                .for_each(|v| *v /= piv);
            beta[i] = rhs[i] / piv;
            basis[i] = c;
            let art = nstruct + nslack + k;
            ub[art] = 0.0;
            enterable[art] = false;
        }
    }
    let mut is_basic = vec![false; ncols];
    for &v in &basis {
        is_basic[v] = true;
    }
    let mut tab = Tableau {
        m,
        ncols,
        a,
        beta,
        basis,
        is_basic,
        at_upper: vec![false; ncols],
        ub,
        enterable,
        d: Vec::new(),
        iterations: 0,
        iteration_cap: 50 * (m + ncols),
    };

    if !art_rows.is_empty() {
        let mut phase1 = vec![0.0; ncols];
        for k in 0..art_rows.len() {
            phase1[nstruct + nslack + k] = 1.0;
        }
        tab.reduced_costs(&phase1);
        tab.run(false)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.beta)
            .filter(|(&v, _)| v >= nstruct + nslack)
            .map(|(_, &x)| x.max(0.0))
            .sum();
        let scale = 1.0 + rhs.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > PHASE1_TOL * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: Vec::new(),
                objective: f64::INFINITY,
                iterations: tab.iterations,
            });
        }
        for k in 0..art_rows.len() {
            let col = nstruct + nslack + k;
            tab.ub[col] = 0.0;
            tab.enterable[col] = false;
        }
        for (i, &v) in tab.basis.iter().enumerate() {
            if v >= nstruct + nslack {
                tab.beta[i] = 0.0;
            }
        }
    }

    let mut cost = struct_cost.clone();
    cost.resize(ncols, 0.0);
    tab.reduced_costs(&cost);
    if let PhaseEnd::Unbounded = tab.run(false)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective: f64::NEG_INFINITY,
            iterations: tab.iterations,
        });
    }

    let y = tab.column_values();
    let values: Vec<f64> = maps
        .iter()
        .map(|map| map.offset + map.parts.iter().map(|&(c, s)| s * y[c]).sum::<f64>())
        .collect();
    let objective: f64 = lp.objective.iter().zip(&values).map(|(c, x)| c * x).sum();

    if !lp.is_feasible(&values, FEASIBILITY_TOL) {
        return Err(LpError::NumericalBreakdown(
            "optimal basis fails re-substitution into the original rows".to_string(),
        ));
    }

    // Dual bound from the original matrix: b'pi + sum_j u_j min(0, c_j - A_j'pi).
    let pi: Vec<f64> = (0..m)
        .map(|i| {
            let (col, sign) = dual_col[i];
            -tab.d[col] / sign
        })
        .collect();
    let mut dual = const_obj + rhs.iter().zip(&pi).map(|(b, p)| b * p).sum::<f64>();
    let mut dual_ok = true;
    for c in 0..nstruct {
        let dj = struct_cost[c] - (0..m).map(|i| dense[i * nstruct + c] * pi[i]).sum::<f64>();
        if dj < 0.0 {
            if col_ub[c].is_finite() {
                dual += col_ub[c] * dj;
            } else if dj < -1e-6 {
                dual_ok = false;
            }
        }
    }
    let gap_tol = 1e-6 * (1.0 + objective.abs());
    if !dual_ok || dual > objective + gap_tol || (objective - dual) > gap_tol {
        return Err(LpError::NumericalBreakdown(format!(
            "duality check failed: primal {objective}, dual bound {dual}"
        )));
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_bound() {
        let mut lp = LinearProgram::new(vec![1.0]).with_bounds(0.0, 10.0);
        lp.add_row("lo", vec![(0, 1.0)], Relation::Ge, 3.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 3.0).abs() < 1e-12);
        assert!((sol.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn tight_corner() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.add_row("sum", vec![(0, 1.0), (1, 1.0)], Relation::Ge, 2.0);
        lp.add_row("x", vec![(0, 1.0)], Relation::Le, 1.0);
        lp.add_row("y", vec![(1, 1.0)], Relation::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row("a", vec![(0, 1.0)], Relation::Ge, 5.0);
        lp.add_row("b", vec![(0, 1.0)], Relation::Le, 4.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_row("a", vec![(0, 1.0), (1, -1.0)], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_negative_bounds() {
        // min x + 2y, x free, y in [-3, inf), x - y >= 1, x + y >= -4
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.bounds = vec![(f64::NEG_INFINITY, f64::INFINITY), (-3.0, f64::INFINITY)];
        lp.add_row("a", vec![(0, 1.0), (1, -1.0)], Relation::Ge, 1.0);
        lp.add_row("b", vec![(0, 1.0), (1, 1.0)], Relation::Ge, -4.0);
        let sol = solve_lp(&lp).unwrap();
        // y = -3 gives x >= max(-2, -1) = -1: objective -7.
        assert!((sol.objective + 7.0).abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn bad_program_rejected() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.bounds = vec![(2.0, 1.0)];
        assert!(matches!(solve_lp(&lp), Err(LpError::InvalidProgram(_))));
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_row("r", vec![(3, 1.0)], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(LpError::InvalidProgram(_))));
    }

    #[test]
    fn lp_text_export() {
        let mut lp = LinearProgram::new(vec![1.0, -2.0]).with_bounds(0.0, 1.0);
        lp.add_row("cap", vec![(0, 1.0), (1, 3.0)], Relation::Le, 2.0);
        let text = lp.to_lp_format();
        assert!(text.contains("Minimize\n obj: 1 x0 - 2 x1\n"));
        assert!(text.contains(" cap: 1 x0 + 3 x1 <= 2\n"));
        assert!(text.contains(" 0 <= x1 <= 1\n"));
        assert!(text.ends_with("End\n"));
    }
}
