//! Dense two-phase primal simplex for small linear programs.
//!
//! Variables carry arbitrary bounds. Finite lower bounds are shifted to zero,
//! variables with only an upper bound are mirrored, free variables are split,
//! and finite upper bounds are kept implicit: nonbasic columns sit at either
//! bound and the ratio test allows bound flips. Pricing is Dantzig's rule
//! until `3 (m + n)` consecutive pivots fail to improve the objective, after
//! which the phase finishes under Bland's rule.

use thiserror::Error;

/// Primal feasibility tolerance, scaled by the largest right-hand side.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-7;
/// Smallest tableau entry accepted as a pivot.
pub const PIVOT_TOLERANCE: f64 = 1e-9;
const OPTIMALITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tolerance: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tolerance,
            Relation::Ge => lhs >= rhs - tolerance,
            Relation::Eq => (lhs - rhs).abs() <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `min c^T x` subject to linear rows and variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub constraints: Vec<LinearConstraint>,
}

impl LinearProgram {
    /// `n` variables bounded below by zero, zero objective, no rows.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(LinearConstraint { coefficients, relation, rhs });
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for row in &self.constraints {
            let lhs: f64 = row.coefficients.iter().zip(x).map(|(a, v)| a * v).sum();
            let gap = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        for (what, len) in [("lower bounds", self.lower.len()), ("upper bounds", self.upper.len())] {
            if len != n {
                return Err(LpError::DimensionMismatch { what, expected: n, actual: len });
            }
        }
        if self.objective.iter().any(|v| v.is_nan()) {
            return Err(LpError::NotANumber("objective"));
        }
        for j in 0..n {
            let (l, u) = (self.lower[j], self.upper[j]);
            if l.is_nan() || u.is_nan() {
                return Err(LpError::NotANumber("bounds"));
            }
            if l == f64::INFINITY || u == f64::NEG_INFINITY {
                return Err(LpError::InvalidBounds { var: j, lower: l, upper: u });
            }
        }
        for row in &self.constraints {
            if row.coefficients.len() != n {
                return Err(LpError::DimensionMismatch {
                    what: "constraint",
                    expected: n,
                    actual: row.coefficients.len(),
                });
            }
            if !row.rhs.is_finite() || row.coefficients.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NotANumber("constraint"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when optimal.
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("{what} has length {actual}, expected {expected}")]
    DimensionMismatch { what: &'static str, expected: usize, actual: usize },
    #[error("non-finite value in {0}")]
    NotANumber(&'static str),
    #[error("variable {var} has empty or invalid bounds [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("simplex did not terminate within {0} iterations")]
    IterationLimit(usize),
}

/// How an original variable maps onto nonnegative tableau columns.
#[derive(Debug, Clone, Copy)]
enum Column {
    /// `x = offset + col`
    Shifted { col: usize, offset: f64 },
    /// `x = offset - col`
    Mirrored { col: usize, offset: f64 },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

struct Tableau {
    rows: usize,
    /// Column count, excluding the transformed right-hand side.
    cols: usize,
    /// Row-major `rows x (cols + 1)`; the last column is `B^-1 b`.
    data: Vec<f64>,
    upper: Vec<f64>,
    at_upper: Vec<bool>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    values: Vec<f64>,
    reduced: Vec<f64>,
    first_artificial: usize,
    iterations: usize,
}

enum PhaseOutcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    fn recompute_values(&mut self) {
        for r in 0..self.rows {
            let mut v = self.at(r, self.cols);
            for j in 0..self.cols {
                if self.at_upper[j] && !self.is_basic[j] {
                    v -= self.at(r, j) * self.upper[j];
                }
            }
            self.values[r] = v;
        }
    }

    fn price(&mut self, costs: &[f64]) {
        self.reduced.copy_from_slice(costs);
        for r in 0..self.rows {
            let cb = costs[self.basis[r]];
            if cb != 0.0 {
                let w = self.width();
                for j in 0..self.cols {
                    self.reduced[j] -= cb * self.data[r * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let inv = 1.0 / self.data[row * w + col];
        for j in 0..w {
            self.data[row * w + j] *= inv;
        }
        self.data[row * w + col] = 1.0;
        let pivot_row: Vec<f64> = self.data[row * w..(row + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == row {
                continue;
            }
            let factor = self.data[r * w + col];
            if factor != 0.0 {
                let dst = &mut self.data[r * w..(r + 1) * w];
                for (d, p) in dst.iter_mut().zip(&pivot_row) {
                    *d -= factor * p;
                }
                dst[col] = 0.0;
            }
        }
        let factor = self.reduced[col];
        if factor != 0.0 {
            for (r, p) in self.reduced.iter_mut().zip(&pivot_row) {
                *r -= factor * p;
            }
            self.reduced[col] = 0.0;
        }
        let leaving = self.basis[row];
        self.is_basic[leaving] = false;
        self.is_basic[col] = true;
        self.basis[row] = col;
    }

    fn run(&mut self, phase: Phase, costs: &[f64], limit: usize) -> Result<PhaseOutcome, LpError> {
        let eligible = match phase {
            Phase::One => self.cols,
            Phase::Two => self.first_artificial,
        };
        let stall_limit = 3 * (self.rows + self.cols);
        let mut stalled = 0usize;
        let mut bland = false;
        loop {
            if self.iterations >= limit {
                return Err(LpError::IterationLimit(limit));
            }
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..eligible {
                if self.is_basic[j] {
                    continue;
                }
                let d = self.reduced[j];
                let attractive = if self.at_upper[j] {
                    d > OPTIMALITY_TOLERANCE
                } else {
                    d < -OPTIMALITY_TOLERANCE && self.upper[j] > 0.0
                };
                if attractive {
                    if bland {
                        entering = Some((j, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                        entering = Some((j, d));
                    }
                }
            }
            let Some((q, dq)) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            let dir = if self.at_upper[q] { -1.0 } else { 1.0 };

            let mut theta = self.upper[q];
            let mut leave: Option<(usize, bool)> = None;
            let mut leave_pivot = 0.0f64;
            for r in 0..self.rows {
                let g = dir * self.at(r, q);
                let b = self.basis[r];
                let limit = if g > PIVOT_TOLERANCE {
                    (self.values[r].max(0.0)) / g
                } else if g < -PIVOT_TOLERANCE && self.upper[b].is_finite() {
                    (self.upper[b] - self.values[r]).max(0.0) / -g
                } else {
                    continue;
                };
                let better = match leave {
                    _ if limit < theta - 1e-12 => true,
                    Some((lr, _)) if limit <= theta + 1e-12 => {
                        if bland {
                            b < self.basis[lr]
                        } else {
                            g.abs() > leave_pivot
                        }
                    }
                    None if limit <= theta + 1e-12 && theta.is_finite() => {
                        // prefer a real pivot over a bound flip of equal length
                        true
                    }
                    _ => false,
                };
                if better {
                    theta = limit.min(theta);
                    leave = Some((r, g < 0.0));
                    leave_pivot = g.abs();
                }
            }
            if theta == f64::INFINITY {
                return Ok(PhaseOutcome::Unbounded);
            }
            self.iterations += 1;
            for r in 0..self.rows {
                let a = self.at(r, q);
                self.values[r] -= theta * dir * a;
            }
            match leave {
                None => self.at_upper[q] = !self.at_upper[q],
                Some((row, to_upper)) => {
                    let leaving = self.basis[row];
                    let entering_value =
                        if self.at_upper[q] { self.upper[q] - theta } else { theta };
                    self.pivot(row, q);
                    self.at_upper[leaving] = to_upper;
                    self.at_upper[q] = false;
                    self.values[row] = entering_value;
                }
            }
            let improvement = -dq * dir * theta;
            let scale = costs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            if improvement > 1e-12 * scale {
                stalled = 0;
            } else {
                stalled += 1;
                if stalled > stall_limit {
                    bland = true;
                }
            }
        }
    }
}

/// Solves `lp` to optimality, or reports infeasibility or unboundedness.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();

    // empty bounds are infeasible, not an input error
    if (0..n).any(|j| lp.lower[j] > lp.upper[j]) {
        return Ok(infeasible(n, 0));
    }

    let mut mapping = Vec::with_capacity(n);
    let mut col_upper = Vec::new();
    let mut col_cost = Vec::new();
    for j in 0..n {
        let (l, u, c) = (lp.lower[j], lp.upper[j], lp.objective[j]);
        let col = col_upper.len();
        if l.is_finite() {
            mapping.push(Column::Shifted { col, offset: l });
            col_upper.push(u - l);
            col_cost.push(c);
        } else if u.is_finite() {
            mapping.push(Column::Mirrored { col, offset: u });
            col_upper.push(f64::INFINITY);
            col_cost.push(-c);
        } else {
            mapping.push(Column::Split { pos: col, neg: col + 1 });
            col_upper.extend([f64::INFINITY, f64::INFINITY]);
            col_cost.extend([c, -c]);
        }
    }
    let structural = col_upper.len();
    let m = lp.constraints.len();

    // transformed rows over structural columns, plus slack sign and rhs
    let mut rows: Vec<(Vec<f64>, f64, f64)> = Vec::with_capacity(m);
    for row in &lp.constraints {
        let mut coeffs = vec![0.0; structural];
        let mut rhs = row.rhs;
        for (j, &a) in row.coefficients.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match mapping[j] {
                Column::Shifted { col, offset } => {
                    coeffs[col] = a;
                    rhs -= a * offset;
                }
                Column::Mirrored { col, offset } => {
                    coeffs[col] = -a;
                    rhs -= a * offset;
                }
                Column::Split { pos, neg } => {
                    coeffs[pos] = a;
                    coeffs[neg] = -a;
                }
            }
        }
        let mut slack = match row.relation {
            Relation::Le => 1.0,
            Relation::Ge => -1.0,
            Relation::Eq => 0.0,
        };
        if rhs < 0.0 {
            coeffs.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
            slack = -slack;
        }
        rows.push((coeffs, slack, rhs));
    }

    let slack_count = lp.constraints.iter().filter(|r| r.relation != Relation::Eq).count();
    let artificial_count = rows.iter().filter(|(_, s, _)| *s != 1.0).count();
    let first_slack = structural;
    let first_artificial = structural + slack_count;
    let cols = first_artificial + artificial_count;
    let width = cols + 1;

    let mut data = vec![0.0; m * width];
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_artificial) = (first_slack, first_artificial);
    for (r, (coeffs, slack, rhs)) in rows.iter().enumerate() {
        let row = &mut data[r * width..(r + 1) * width];
        row[..structural].copy_from_slice(coeffs);
        row[cols] = *rhs;
        if *slack != 0.0 {
            row[next_slack] = *slack;
            if *slack == 1.0 {
                basis.push(next_slack);
            }
            next_slack += 1;
        }
        if *slack != 1.0 {
            row[next_artificial] = 1.0;
            basis.push(next_artificial);
            next_artificial += 1;
        }
    }

    let mut upper = col_upper;
    upper.resize(cols, f64::INFINITY);
    let mut is_basic = vec![false; cols];
    for &b in &basis {
        is_basic[b] = true;
    }
    let mut tableau = Tableau {
        rows: m,
        cols,
        data,
        upper,
        at_upper: vec![false; cols],
        basis,
        is_basic,
        values: vec![0.0; m],
        reduced: vec![0.0; cols],
        first_artificial,
        iterations: 0,
    };
    tableau.recompute_values();
    let limit = 50_000 + 200 * (m + cols);
    let rhs_scale = rows.iter().fold(1.0f64, |s, (_, _, b)| s.max(b.abs()));

    if artificial_count > 0 {
        let mut phase_one = vec![0.0; cols];
        phase_one[first_artificial..].iter_mut().for_each(|c| *c = 1.0);
        tableau.price(&phase_one);
        tableau.run(Phase::One, &phase_one, limit)?;
        tableau.recompute_values();
        let infeasibility: f64 = (0..m)
            .filter(|&r| tableau.basis[r] >= first_artificial)
            .map(|r| tableau.values[r])
            .sum();
        if infeasibility > FEASIBILITY_TOLERANCE * rhs_scale {
            return Ok(infeasible(n, tableau.iterations));
        }
        for j in first_artificial..cols {
            tableau.upper[j] = 0.0;
            tableau.at_upper[j] = false;
        }
    }

    let mut costs = col_cost;
    costs.resize(cols, 0.0);
    tableau.price(&costs);
    let outcome = tableau.run(Phase::Two, &costs, limit)?;
    if let PhaseOutcome::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            values: vec![0.0; n],
            objective: f64::NEG_INFINITY,
            iterations: tableau.iterations,
        });
    }
    tableau.recompute_values();

    let mut column_values: Vec<f64> =
        (0..cols).map(|j| if tableau.at_upper[j] { tableau.upper[j] } else { 0.0 }).collect();
    for r in 0..m {
        column_values[tableau.basis[r]] = tableau.values[r];
    }
    let values: Vec<f64> = mapping
        .iter()
        .enumerate()
        .map(|(j, map)| {
            let v = match *map {
                Column::Shifted { col, offset } => offset + column_values[col],
                Column::Mirrored { col, offset } => offset - column_values[col],
                Column::Split { pos, neg } => column_values[pos] - column_values[neg],
            };
            v.clamp(lp.lower[j], lp.upper[j])
        })
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective: lp.objective_value(&values),
        values,
        iterations: tableau.iterations,
    })
}

fn infeasible(n: usize, iterations: usize) -> LpSolution {
    LpSolution { status: LpStatus::Infeasible, values: vec![0.0; n], objective: f64::INFINITY, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(objective: Vec<f64>, rows: Vec<(Vec<f64>, Relation, f64)>) -> LinearProgram {
        let mut lp = LinearProgram::new(objective.len());
        lp.objective = objective;
        for (c, rel, b) in rows {
            lp.add_constraint(c, rel, b);
        }
        lp
    }

    #[test]
    fn single_lower_bound_row() {
        let sol = solve_lp(&lp(vec![1.0], vec![(vec![1.0], Relation::Ge, 3.0)])).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.values[0] - 3.0).abs() < 1e-9);
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_row() {
        let sol = solve_lp(&lp(vec![0.0], vec![(vec![1.0], Relation::Le, -1.0)])).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let mut empty = LinearProgram::new(1);
        empty.lower[0] = 2.0;
        empty.upper[0] = 1.0;
        assert_eq!(solve_lp(&empty).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let sol = solve_lp(&lp(vec![-1.0, 0.0], vec![(vec![1.0, -1.0], Relation::Le, 1.0)])).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_mirrored_variables() {
        // min x + y, x free, y <= 2 only, x - y >= -5, x + y >= 1
        let mut p = lp(
            vec![1.0, 1.0],
            vec![(vec![1.0, -1.0], Relation::Ge, -5.0), (vec![1.0, 1.0], Relation::Ge, 1.0)],
        );
        p.lower = vec![f64::NEG_INFINITY, f64::NEG_INFINITY];
        p.upper = vec![f64::INFINITY, 2.0];
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert!(p.max_violation(&sol.values) < 1e-9);
    }

    #[test]
    fn equality_and_bound_flips() {
        // min -x1 - 2 x2 - 3 x3, x1 + x2 + x3 = 2, 0 <= x <= 1
        let mut p = lp(vec![-1.0, -2.0, -3.0], vec![(vec![1.0, 1.0, 1.0], Relation::Eq, 2.0)]);
        p.upper = vec![1.0; 3];
        let sol = solve_lp(&p).unwrap();
        assert!((sol.objective + 5.0).abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale (1955): cycles under textbook Dantzig pricing with lowest-index ties
        let p = lp(
            vec![-0.75, 150.0, -0.02, 6.0],
            vec![
                (vec![0.25, -60.0, -0.04, 9.0], Relation::Le, 0.0),
                (vec![0.5, -90.0, -0.02, 3.0], Relation::Le, 0.0),
                (vec![0.0, 0.0, 1.0, 0.0], Relation::Le, 1.0),
            ],
        );
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 0.05).abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn kuhn_cycling_example_terminates() {
        let p = lp(
            vec![-2.0, -3.0, 1.0, 12.0],
            vec![
                (vec![-2.0, -9.0, 1.0, 9.0], Relation::Le, 0.0),
                (vec![1.0 / 3.0, 1.0, -1.0 / 3.0, -2.0], Relation::Le, 0.0),
                (vec![2.0, 3.0, -1.0, -12.0], Relation::Le, 2.0),
            ],
        );
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 2.0).abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn chvatal_cycling_example_terminates() {
        let p = lp(
            vec![-10.0, 57.0, 9.0, 24.0],
            vec![
                (vec![0.5, -5.5, -2.5, 9.0], Relation::Le, 0.0),
                (vec![0.5, -1.5, -0.5, 1.0], Relation::Le, 0.0),
                (vec![1.0, 0.0, 0.0, 0.0], Relation::Le, 1.0),
            ],
        );
        let sol = solve_lp(&p).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 1.0).abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn adding_a_row_never_lowers_the_optimum() {
        let mut p = lp(
            vec![1.0, 2.0],
            vec![(vec![1.0, 1.0], Relation::Ge, 2.0), (vec![1.0, -1.0], Relation::Le, 1.0)],
        );
        let before = solve_lp(&p).unwrap().objective;
        p.add_constraint(vec![0.0, 1.0], Relation::Ge, 1.2);
        let after = solve_lp(&p).unwrap().objective;
        assert!(after >= before - 1e-12);
    }

    #[test]
    fn input_errors() {
        let mut p = LinearProgram::new(2);
        p.add_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(matches!(solve_lp(&p), Err(LpError::DimensionMismatch { .. })));
        let mut p = LinearProgram::new(1);
        p.objective[0] = f64::NAN;
        assert_eq!(solve_lp(&p), Err(LpError::NotANumber("objective")));
    }
}
