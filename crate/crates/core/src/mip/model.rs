use std::collections::HashMap;

use thiserror::Error;

use crate::lp::{LinearProgram, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// Sparse linear expression: `(variable index, coefficient)` pairs.
pub type Terms = Vec<(usize, f64)>;

/// `sum terms  relation  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Terms,
    pub relation: Relation,
    pub rhs: f64,
}

/// `guard = active_when -> sum terms  relation  rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Indicator {
    pub name: String,
    pub guard: usize,
    pub active_when: bool,
    pub terms: Terms,
    pub relation: Relation,
    pub rhs: f64,
}

impl Indicator {
    pub fn is_active(&self, x: &[f64]) -> bool {
        let target = if self.active_when { 1.0 } else { 0.0 };
        (x[self.guard] - target).abs() < 0.5
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("variable index {0} out of range")]
    UnknownVariable(usize),
    #[error("invalid bounds [{lower}, {upper}] for `{name}`")]
    InvalidBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in `{0}`")]
    NonFinite(String),
    #[error("guard of `{0}` is not a binary variable")]
    GuardNotBinary(String),
}

/// A minimization MILP with optional indicator constraints.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    indicators: Vec<Indicator>,
    objective: Terms,
    objective_constant: f64,
    var_index: HashMap<String, usize>,
    row_names: HashMap<String, usize>,
}

pub(crate) fn dot(terms: &[(usize, f64)], x: &[f64]) -> f64 {
    terms.iter().map(|&(j, c)| c * x[j]).sum()
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        name: &str,
        kind: VarKind,
        lower: f64,
        upper: f64,
    ) -> Result<usize, ModelError> {
        let bad_binary = kind == VarKind::Binary && (lower < 0.0 || upper > 1.0);
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY || bad_binary {
            return Err(ModelError::InvalidBounds { name: name.to_string(), lower, upper });
        }
        if self.var_index.contains_key(name) {
            return Err(ModelError::DuplicateName(name.to_string()));
        }
        let index = self.variables.len();
        self.var_index.insert(name.to_string(), index);
        self.variables.push(Variable { name: name.to_string(), kind, lower, upper });
        Ok(index)
    }

    pub fn add_binary(&mut self, name: &str) -> Result<usize, ModelError> {
        self.add_variable(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_continuous(&mut self, name: &str, lower: f64, upper: f64) -> Result<usize, ModelError> {
        self.add_variable(name, VarKind::Continuous, lower, upper)
    }

    fn check_row(&mut self, name: &str, terms: &[(usize, f64)], rhs: f64) -> Result<(), ModelError> {
        for &(j, c) in terms {
            if j >= self.variables.len() {
                return Err(ModelError::UnknownVariable(j));
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite(name.to_string()));
            }
        }
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite(name.to_string()));
        }
        if self.row_names.contains_key(name) {
            return Err(ModelError::DuplicateName(name.to_string()));
        }
        self.row_names.insert(name.to_string(), self.row_names.len());
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        name: &str,
        terms: Terms,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, ModelError> {
        self.check_row(name, &terms, rhs)?;
        self.constraints.push(Constraint { name: name.to_string(), terms, relation, rhs });
        Ok(self.constraints.len() - 1)
    }

    pub fn add_indicator(
        &mut self,
        name: &str,
        guard: usize,
        active_when: bool,
        terms: Terms,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize, ModelError> {
        match self.variables.get(guard) {
            None => return Err(ModelError::UnknownVariable(guard)),
            Some(v) if v.kind != VarKind::Binary => return Err(ModelError::GuardNotBinary(name.to_string())),
            Some(_) => {}
        }
        self.check_row(name, &terms, rhs)?;
        self.indicators.push(Indicator { name: name.to_string(), guard, active_when, terms, relation, rhs });
        Ok(self.indicators.len() - 1)
    }

    pub fn set_objective(&mut self, terms: Terms, constant: f64) -> Result<(), ModelError> {
        for &(j, c) in &terms {
            if j >= self.variables.len() {
                return Err(ModelError::UnknownVariable(j));
            }
            if !c.is_finite() {
                return Err(ModelError::NonFinite("objective".into()));
            }
        }
        self.objective = terms;
        self.objective_constant = constant;
        Ok(())
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> Result<(), ModelError> {
        let v = self.variables.get_mut(var).ok_or(ModelError::UnknownVariable(var))?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(ModelError::InvalidBounds { name: v.name.clone(), lower, upper });
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn indicators(&self) -> &[Indicator] {
        &self.indicators
    }

    pub fn objective(&self) -> &[(usize, f64)] {
        &self.objective
    }

    pub fn objective_constant(&self) -> f64 {
        self.objective_constant
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn variable(&self, name: &str) -> Option<usize> {
        self.var_index.get(name).copied()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant + dot(&self.objective, x)
    }

    /// Largest violation of any bound, integrality requirement, linear row or
    /// active indicator at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &value) in self.variables.iter().zip(x) {
            worst = worst.max(v.lower - value).max(value - v.upper);
            if v.kind == VarKind::Binary {
                worst = worst.max((value - value.round()).abs());
            }
        }
        let row_violation = |terms: &[(usize, f64)], relation: Relation, rhs: f64| {
            let lhs = dot(terms, x);
            match relation {
                Relation::Le => lhs - rhs,
                Relation::Ge => rhs - lhs,
                Relation::Eq => (lhs - rhs).abs(),
            }
        };
        for c in &self.constraints {
            worst = worst.max(row_violation(&c.terms, c.relation, c.rhs));
        }
        for ind in self.indicators.iter().filter(|ind| ind.is_active(x)) {
            worst = worst.max(row_violation(&ind.terms, ind.relation, ind.rhs));
        }
        worst
    }

    /// The continuous relaxation. Indicator constraints are dropped.
    pub fn relaxation(&self) -> LinearProgram {
        let n = self.variables.len();
        let mut lp = LinearProgram::new(n);
        for (j, v) in self.variables.iter().enumerate() {
            lp.lower[j] = v.lower;
            lp.upper[j] = v.upper;
        }
        for &(j, c) in &self.objective {
            lp.objective[j] += c;
        }
        for c in &self.constraints {
            lp.add_constraint(densify(&c.terms, n), c.relation, c.rhs);
        }
        lp
    }
}

pub(crate) fn densify(terms: &[(usize, f64)], n: usize) -> Vec<f64> {
    let mut row = vec![0.0; n];
    for &(j, c) in terms {
        row[j] += c;
    }
    row
}
