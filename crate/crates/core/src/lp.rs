//! Dense two-phase primal simplex.
//!
//! Problems are stated as
//!
//! ```text
//! maximize   c · x
//! subject to a_i · x (<= | = | >=) b_i   for every constraint i
//!            x >= 0
//! ```
//!
//! The solver works on a full tableau. Pricing is Dantzig's rule until the
//! objective stalls for `2 * (num_vars + num_constraints)` pivots, after which
//! Bland's rule takes over for the rest of the phase.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Primal feasibility tolerance (constraint residuals, phase-one residual).
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;
/// Smallest magnitude accepted as a pivot element.
pub const PIVOT_TOLERANCE: f64 = 1e-10;
/// Reduced costs at or below this value are treated as non-improving.
pub const OPTIMALITY_TOLERANCE: f64 = 1e-9;
/// Total pivot budget across both phases.
pub const ITERATION_LIMIT: usize = 10_000;

const RATIO_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coefficients: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Self {
            coefficients,
            relation,
            rhs,
        }
    }

    /// Signed violation of this constraint at `x`; zero or negative means satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs: f64 = self.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
        match self.relation {
            Relation::Le => lhs - self.rhs,
            Relation::Ge => self.rhs - lhs,
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// A maximization problem over nonnegative variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            num_vars: objective.len(),
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints
            .push(Constraint::new(coefficients, relation, rhs));
    }

    pub fn with(mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        self.push(coefficients, relation, rhs);
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.num_vars == 0 {
            return Err(LpError::NoVariables);
        }
        if self.objective.len() != self.num_vars {
            return Err(LpError::ObjectiveLength {
                expected: self.num_vars,
                found: self.objective.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite { row: None });
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != self.num_vars {
                return Err(LpError::ConstraintLength {
                    row,
                    expected: self.num_vars,
                    found: c.coefficients.len(),
                });
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite { row: Some(row) });
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
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
    pub objective_value: Option<f64>,
    pub primal: Option<Vec<f64>>,
    /// Constraint multipliers read off the final basis, in constraint order.
    pub dual: Option<Vec<f64>>,
    pub iterations: usize,
}

impl LpSolution {
    fn without_point(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            objective_value: None,
            primal: None,
            dual: None,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program has no variables")]
    NoVariables,
    #[error("objective has {found} coefficients, expected {expected}")]
    ObjectiveLength { expected: usize, found: usize },
    #[error("constraint {row} has {found} coefficients, expected {expected}")]
    ConstraintLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {}", match .row { Some(r) => format!("constraint {r}"), None => "objective".to_string() })]
    NonFinite { row: Option<usize> },
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
}

impl LpError {
    /// True for errors caused by a malformed problem rather than by the solver.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, LpError::IterationLimit(_))
    }
}

/// Solves `lp`, reporting optimality, infeasibility or unboundedness.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    Tableau::build(lp).solve(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows + 1` rows of `cols + 1` entries; the last row holds reduced costs,
    /// the last column holds right-hand sides.
    data: Vec<f64>,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Column that started as the unit vector of each row.
    unit_column: Vec<usize>,
    /// +1 if the row kept its sign, -1 if it was negated to make the rhs nonnegative.
    row_sign: Vec<f64>,
    iterations: usize,
    stall_limit: usize,
    rhs_scale: f64,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let rows = lp.constraints.len();
        let n = lp.num_vars;

        let mut normalized = Vec::with_capacity(rows);
        let mut row_sign = Vec::with_capacity(rows);
        for c in &lp.constraints {
            if c.rhs < 0.0 {
                let coeffs: Vec<f64> = c.coefficients.iter().map(|a| -a).collect();
                normalized.push((coeffs, c.relation.flipped(), -c.rhs));
                row_sign.push(-1.0);
            } else {
                normalized.push((c.coefficients.clone(), c.relation, c.rhs));
                row_sign.push(1.0);
            }
        }

        let slack_count = normalized
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Eq)
            .count();
        let artificial_count = normalized
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Le)
            .count();
        let cols = n + slack_count + artificial_count;
        let width = cols + 1;

        let mut kinds = vec![ColumnKind::Structural; n];
        kinds.extend(std::iter::repeat_n(ColumnKind::Slack, slack_count));
        kinds.extend(std::iter::repeat_n(ColumnKind::Artificial, artificial_count));

        let mut data = vec![0.0; (rows + 1) * width];
        let mut basis = Vec::with_capacity(rows);
        let mut unit_column = Vec::with_capacity(rows);
        let mut next_slack = n;
        let mut next_artificial = n + slack_count;
        for (r, (coeffs, rel, rhs)) in normalized.iter().enumerate() {
            let row = &mut data[r * width..(r + 1) * width];
            row[..n].copy_from_slice(coeffs);
            row[cols] = *rhs;
            match rel {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    unit_column.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_artificial] = 1.0;
                    basis.push(next_artificial);
                    unit_column.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = 1.0;
                    basis.push(next_artificial);
                    unit_column.push(next_artificial);
                    next_artificial += 1;
                }
            }
        }

        let rhs_scale = normalized
            .iter()
            .map(|(_, _, b)| b.abs())
            .fold(1.0_f64, f64::max);

        Self {
            rows,
            cols,
            data,
            basis,
            kinds,
            unit_column,
            row_sign,
            iterations: 0,
            stall_limit: 2 * (n + rows),
            rhs_scale,
        }
    }

    #[inline]
    fn width(&self) -> usize {
        self.cols + 1
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    #[inline]
    fn cost_row(&self) -> &[f64] {
        let w = self.width();
        &self.data[self.rows * w..(self.rows + 1) * w]
    }

    /// Installs reduced costs for the column costs `costs`, given the current basis.
    fn price(&mut self, costs: &[f64]) {
        let w = self.width();
        let mut row = vec![0.0; w];
        row[..self.cols].copy_from_slice(costs);
        for r in 0..self.rows {
            let cb = costs[self.basis[r]];
            if cb != 0.0 {
                let src = &self.data[r * w..(r + 1) * w];
                for (dst, a) in row.iter_mut().zip(src) {
                    *dst -= cb * a;
                }
            }
        }
        self.data[self.rows * w..].copy_from_slice(&row);
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width();
        let p = self.data[pr * w + pc];
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v /= p;
        }
        self.data[pr * w + pc] = 1.0;
        let pivot_row: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..=self.rows {
            if r == pr {
                continue;
            }
            let factor = self.data[r * w + pc];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.data[r * w..(r + 1) * w];
            for (dst, a) in row.iter_mut().zip(&pivot_row) {
                *dst -= factor * a;
            }
            row[pc] = 0.0;
            if r < self.rows && row[self.cols] < 0.0 && row[self.cols] > -FEASIBILITY_TOLERANCE {
                row[self.cols] = 0.0;
            }
        }
        self.basis[pr] = pc;
    }

    fn entering(&self, allowed: &[bool], bland: bool) -> Option<usize> {
        let costs = self.cost_row();
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            if !allowed[j] || costs[j] <= OPTIMALITY_TOLERANCE {
                continue;
            }
            if bland {
                return Some(j);
            }
            match best {
                Some((_, d)) if costs[j] <= d => {}
                _ => best = Some((j, costs[j])),
            }
        }
        best.map(|(j, _)| j)
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, col);
            if a <= PIVOT_TOLERANCE {
                continue;
            }
            let ratio = self.rhs(r).max(0.0) / a;
            best = match best {
                None => Some((r, ratio)),
                Some((br, bratio)) => {
                    if ratio < bratio - RATIO_TIE
                        || (ratio <= bratio + RATIO_TIE && self.basis[r] < self.basis[br])
                    {
                        Some((r, ratio))
                    } else {
                        Some((br, bratio))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn run_phase(&mut self, allowed: &[bool]) -> Result<PhaseOutcome, LpError> {
        let mut stalled = 0usize;
        let mut bland = false;
        // The cost row's rhs entry is minus the current objective.
        let mut last_objective = -self.cost_row()[self.cols];
        loop {
            let Some(col) = self.entering(allowed, bland) else {
                return Ok(PhaseOutcome::Optimal);
            };
            let Some(row) = self.leaving(col) else {
                return Ok(PhaseOutcome::Unbounded);
            };
            if self.iterations >= ITERATION_LIMIT {
                return Err(LpError::IterationLimit(ITERATION_LIMIT));
            }
            self.pivot(row, col);
            self.iterations += 1;

            let objective = -self.cost_row()[self.cols];
            if objective > last_objective + RATIO_TIE * last_objective.abs().max(1.0) {
                stalled = 0;
                last_objective = objective;
            } else {
                stalled += 1;
                if stalled >= self.stall_limit {
                    bland = true;
                }
            }
        }
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(r).max(0.0);
            }
        }
        x
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        let n = lp.num_vars;
        let has_artificials = self.kinds.contains(&ColumnKind::Artificial);

        if has_artificials {
            let phase_one_costs: Vec<f64> = self
                .kinds
                .iter()
                .map(|k| if *k == ColumnKind::Artificial { -1.0 } else { 0.0 })
                .collect();
            self.price(&phase_one_costs);
            let everything = vec![true; self.cols];
            // Phase one is bounded above by zero, so it always ends optimal.
            self.run_phase(&everything)?;

            let residual: f64 = (0..self.rows)
                .filter(|&r| self.kinds[self.basis[r]] == ColumnKind::Artificial)
                .map(|r| self.rhs(r).max(0.0))
                .sum();
            if residual > FEASIBILITY_TOLERANCE * self.rhs_scale {
                return Ok(LpSolution::without_point(
                    LpStatus::Infeasible,
                    self.iterations,
                ));
            }
            self.evict_artificials();
        }

        let mut costs = vec![0.0; self.cols];
        costs[..n].copy_from_slice(&lp.objective);
        self.price(&costs);
        let allowed: Vec<bool> = self
            .kinds
            .iter()
            .map(|k| *k != ColumnKind::Artificial)
            .collect();
        match self.run_phase(&allowed)? {
            PhaseOutcome::Unbounded => Ok(LpSolution::without_point(
                LpStatus::Unbounded,
                self.iterations,
            )),
            PhaseOutcome::Optimal => {
                let x = self.primal(n);
                let reduced = self.cost_row();
                let dual = (0..self.rows)
                    .map(|r| -reduced[self.unit_column[r]] * self.row_sign[r])
                    .collect();
                Ok(LpSolution {
                    status: LpStatus::Optimal,
                    objective_value: Some(lp.objective_at(&x)),
                    primal: Some(x),
                    dual: Some(dual),
                    iterations: self.iterations,
                })
            }
        }
    }

    /// Pivots zero-level artificials out of the basis where a non-artificial
    /// column can replace them. Rows with no such column are redundant and keep
    /// their artificial at zero; their entries never change afterwards.
    fn evict_artificials(&mut self) {
        for r in 0..self.rows {
            if self.kinds[self.basis[r]] != ColumnKind::Artificial {
                continue;
            }
            let w = self.width();
            self.data[r * w + self.cols] = 0.0;
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.cols {
                if self.kinds[j] == ColumnKind::Artificial {
                    continue;
                }
                let a = self.at(r, j).abs();
                if a > PIVOT_TOLERANCE && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(r, j);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(lp: &LinearProgram) -> LpSolution {
        let sol = solve_lp(lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal, "{lp:?}");
        sol
    }

    #[test]
    fn single_upper_bound() {
        let lp = LinearProgram::new(vec![1.0]).with(vec![1.0], Relation::Le, 1.0);
        let sol = optimal(&lp);
        assert!((sol.objective_value.unwrap() - 1.0).abs() < 1e-12);
        assert!((sol.primal.unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_upper_bound_is_infeasible() {
        let lp = LinearProgram::new(vec![1.0]).with(vec![1.0], Relation::Le, -1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.primal.is_none() && sol.objective_value.is_none());
    }

    #[test]
    fn open_ray_is_unbounded() {
        let lp = LinearProgram::new(vec![1.0, 1.0]).with(vec![1.0, 1.0], Relation::Ge, 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn no_constraints() {
        let lp = LinearProgram::new(vec![-1.0, 0.0]);
        let sol = optimal(&lp);
        assert_eq!(sol.objective_value, Some(0.0));
        let lp = LinearProgram::new(vec![0.0, 2.0]);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn textbook_problem_with_duals() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let lp = LinearProgram::new(vec![3.0, 5.0])
            .with(vec![1.0, 0.0], Relation::Le, 4.0)
            .with(vec![0.0, 2.0], Relation::Le, 12.0)
            .with(vec![3.0, 2.0], Relation::Le, 18.0);
        let sol = optimal(&lp);
        assert!((sol.objective_value.unwrap() - 36.0).abs() < 1e-9);
        let x = sol.primal.unwrap();
        assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
        let y = sol.dual.unwrap();
        let expected = [0.0, 1.5, 1.0];
        for (a, b) in y.iter().zip(expected) {
            assert!((a - b).abs() < 1e-9, "{y:?}");
        }
    }

    #[test]
    fn equality_and_ge_rows() {
        // max x1 + 2 x2, x1 + x2 = 3, x1 >= 1, x2 <= 5 -> (1, 2), 5
        let lp = LinearProgram::new(vec![1.0, 2.0])
            .with(vec![1.0, 1.0], Relation::Eq, 3.0)
            .with(vec![1.0, 0.0], Relation::Ge, 1.0)
            .with(vec![0.0, 1.0], Relation::Le, 5.0);
        let sol = optimal(&lp);
        assert!((sol.objective_value.unwrap() - 5.0).abs() < 1e-9);
        let y = sol.dual.unwrap();
        // b . y equals the optimum.
        let bound: f64 = lp.constraints.iter().zip(&y).map(|(c, v)| c.rhs * v).sum();
        assert!((bound - 5.0).abs() < 1e-9);
        assert!(y[1] <= 1e-12, "multiplier on a >= row must be nonpositive");
    }

    #[test]
    fn redundant_equalities() {
        let lp = LinearProgram::new(vec![1.0, 1.0])
            .with(vec![1.0, 1.0], Relation::Eq, 2.0)
            .with(vec![2.0, 2.0], Relation::Eq, 4.0)
            .with(vec![1.0, 0.0], Relation::Le, 1.5);
        let sol = optimal(&lp);
        assert!((sol.objective_value.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic instance that cycles under naive Dantzig pricing.
        let lp = LinearProgram::new(vec![0.75, -150.0, 0.02, -6.0])
            .with(vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0)
            .with(vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0)
            .with(vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0);
        let sol = optimal(&lp);
        assert!((sol.objective_value.unwrap() - 0.05).abs() < 1e-9);
    }

    #[test]
    fn chvatal_cycling_example_terminates() {
        let lp = LinearProgram::new(vec![10.0, -57.0, -9.0, -24.0])
            .with(vec![0.5, -5.5, -2.5, 9.0], Relation::Le, 0.0)
            .with(vec![0.5, -1.5, -0.5, 1.0], Relation::Le, 0.0)
            .with(vec![1.0, 0.0, 0.0, 0.0], Relation::Le, 1.0);
        let sol = optimal(&lp);
        assert!((sol.objective_value.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn malformed_dimensions_are_input_errors() {
        let lp = LinearProgram::new(vec![1.0, 1.0]).with(vec![1.0], Relation::Le, 1.0);
        let err = solve_lp(&lp).unwrap_err();
        assert!(matches!(err, LpError::ConstraintLength { row: 0, .. }));
        assert!(err.is_input_error());

        let mut lp = LinearProgram::new(vec![1.0]);
        lp.num_vars = 2;
        assert!(matches!(
            solve_lp(&lp),
            Err(LpError::ObjectiveLength { .. })
        ));
        assert_eq!(
            solve_lp(&LinearProgram::new(vec![])),
            Err(LpError::NoVariables)
        );
        let lp = LinearProgram::new(vec![1.0]).with(vec![f64::NAN], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp), Err(LpError::NonFinite { row: Some(0) }));
    }

    #[test]
    fn repeated_solves_are_bitwise_identical() {
        let lp = LinearProgram::new(vec![1.0, 1.0, 1.0])
            .with(vec![1.0, 2.0, 0.5], Relation::Le, 3.0)
            .with(vec![0.3, 1.0, 2.0], Relation::Le, 2.0)
            .with(vec![1.0, 1.0, 1.0], Relation::Ge, 0.5);
        let a = solve_lp(&lp).unwrap();
        for _ in 0..5 {
            let b = solve_lp(&lp).unwrap();
            let (pa, pb) = (a.primal.as_ref().unwrap(), b.primal.as_ref().unwrap());
            assert!(pa.iter().zip(pb).all(|(u, v)| u.to_bits() == v.to_bits()));
        }
    }
}
