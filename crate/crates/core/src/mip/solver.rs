use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::model::{densify, dot, Model, Terms, VarKind};
use crate::cut::CutFamily;
use crate::lp::{solve_lp, LinearProgram, LpError, LpSolution, LpStatus, Relation};

/// A valid inequality `sum terms >= rhs` supplied by a callback.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub family: CutFamily,
    pub terms: Terms,
    pub rhs: f64,
}

impl Cut {
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.rhs - dot(&self.terms, x)
    }
}

/// Hooks run from inside [`solve_mip`]. Both default to adding nothing.
pub trait SolveCallbacks {
    /// Called with every integer-feasible LP solution. Returning a cut that
    /// the point violates rejects the point.
    fn on_incumbent(&mut self, _values: &[f64]) -> Vec<Cut> {
        Vec::new()
    }

    /// Called with every fractional node solution.
    fn on_node_lp(&mut self, _values: &[f64]) -> Vec<Cut> {
        Vec::new()
    }
}

pub struct NoCallbacks;

impl SolveCallbacks for NoCallbacks {}

#[derive(Debug, Clone, PartialEq)]
pub struct MipConfig {
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    pub relative_gap: f64,
    pub absolute_gap: f64,
    pub integrality_tolerance: f64,
    /// Violation a callback cut needs before it counts.
    pub cut_tolerance: f64,
    /// Callback rounds per node before branching anyway.
    pub max_node_rounds: usize,
}

impl Default for MipConfig {
    fn default() -> Self {
        Self {
            node_limit: 1_000_000,
            time_limit: None,
            relative_gap: 1e-6,
            absolute_gap: 1e-9,
            integrality_tolerance: 1e-6,
            cut_tolerance: 1e-6,
            max_node_rounds: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MipStatus {
    Optimal,
    /// Stopped at a limit with an incumbent.
    Feasible,
    Infeasible,
    /// Stopped at a limit without an incumbent.
    Limit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MipSolution {
    pub status: MipStatus,
    pub values: Option<Vec<f64>>,
    pub objective: Option<f64>,
    pub lower_bound: f64,
    /// Root LP value after root callback rounds.
    pub root_bound: f64,
    pub nodes: usize,
    /// Every cut accepted from a callback, in the order added.
    pub cuts: Vec<Cut>,
    pub rejected_incumbents: usize,
    /// Global lower bound after each processed node.
    pub bound_trace: Vec<f64>,
}

impl MipSolution {
    /// `(ub - lb) / max(|ub|, 1e-9) * 100`, `None` without an incumbent.
    pub fn gap_percent(&self) -> Option<f64> {
        let ub = self.objective?;
        Some(((ub - self.lower_bound) / ub.abs().max(1e-9) * 100.0).max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MipError {
    #[error("model still contains indicator constraints; rewrite them first")]
    IndicatorsPresent,
    #[error("LP relaxation unbounded at node {0}")]
    Unbounded(usize),
    #[error("LP failure at node {node}: {source}")]
    Lp { node: usize, source: LpError },
}

#[derive(Debug)]
struct Node {
    bound: f64,
    id: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on bound, then on creation order
        other.bound.total_cmp(&self.bound).then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Search {
    base: LinearProgram,
    pool: Vec<Cut>,
    binaries: Vec<usize>,
}

impl Search {
    fn solve(&self, lower: &[f64], upper: &[f64], node: usize) -> Result<LpSolution, MipError> {
        let mut lp = self.base.clone();
        lp.lower = lower.to_vec();
        lp.upper = upper.to_vec();
        let n = lp.num_vars();
        for cut in &self.pool {
            lp.add_constraint(densify(&cut.terms, n), Relation::Ge, cut.rhs);
        }
        solve_lp(&lp).map_err(|source| MipError::Lp { node, source })
    }

    /// Most fractional binary, ties to the lowest index.
    fn branching_variable(&self, x: &[f64], tolerance: f64) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for &j in &self.binaries {
            let frac = (x[j] - x[j].floor()).min(x[j].ceil() - x[j]);
            if frac > tolerance && best.is_none_or(|(b, _)| frac > b) {
                best = Some((frac, j));
            }
        }
        best.map(|(_, j)| j)
    }

    /// Rounds binaries and re-optimizes the continuous part.
    fn polish(&self, x: &[f64], lower: &[f64], upper: &[f64], node: usize) -> Result<Option<LpSolution>, MipError> {
        let (mut lo, mut hi) = (lower.to_vec(), upper.to_vec());
        for &j in &self.binaries {
            let v = x[j].round();
            lo[j] = v;
            hi[j] = v;
        }
        let sol = self.solve(&lo, &hi, node)?;
        Ok((sol.status == LpStatus::Optimal).then_some(sol))
    }
}

/// Best-bound branch and bound on binary variables. Integer-feasible points
/// are passed to `callbacks.on_incumbent`; violated cuts it returns join a
/// global pool and the node is re-solved.
pub fn solve_mip(
    model: &Model,
    config: &MipConfig,
    callbacks: &mut dyn SolveCallbacks,
) -> Result<MipSolution, MipError> {
    if !model.indicators().is_empty() {
        return Err(MipError::IndicatorsPresent);
    }
    let start = Instant::now();
    let mut search = Search {
        base: model.relaxation(),
        pool: Vec::new(),
        binaries: (0..model.num_vars()).filter(|&j| model.variables()[j].kind == VarKind::Binary).collect(),
    };
    let constant = model.objective_constant();
    let tol = |ub: f64| config.absolute_gap.max(config.relative_gap * ub.abs().max(1e-9));

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        lower: search.base.lower.clone(),
        upper: search.base.upper.clone(),
    });
    let mut next_id = 1;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut lower_bound = f64::NEG_INFINITY;
    let mut root_bound = f64::NEG_INFINITY;
    let mut nodes = 0;
    let mut rejected = 0;
    let mut trace = Vec::new();
    let mut hit_limit = false;

    while let Some(node) = heap.pop() {
        let ub = incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
        if node.bound >= ub - tol(ub) {
            heap.clear();
            break;
        }
        let out_of_time = config.time_limit.is_some_and(|t| start.elapsed() >= t);
        if nodes >= config.node_limit || out_of_time {
            lower_bound = lower_bound.max(node.bound.min(ub));
            heap.push(node);
            hit_limit = true;
            break;
        }
        lower_bound = lower_bound.max(node.bound);
        nodes += 1;
        let mut rounds = 0;
        loop {
            let sol = search.solve(&node.lower, &node.upper, node.id)?;
            match sol.status {
                LpStatus::Infeasible => break,
                LpStatus::Unbounded => return Err(MipError::Unbounded(node.id)),
                LpStatus::Optimal => {}
            }
            let value = sol.objective + constant;
            if node.id == 0 {
                root_bound = value;
            }
            let ub = incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
            if value >= ub - tol(ub) {
                break;
            }
            match search.branching_variable(&sol.values, config.integrality_tolerance) {
                None => {
                    let Some(polished) = search.polish(&sol.values, &node.lower, &node.upper, node.id)? else {
                        break;
                    };
                    let point = polished.values;
                    let cuts: Vec<Cut> = callbacks
                        .on_incumbent(&point)
                        .into_iter()
                        .filter(|c| c.violation(&point) > config.cut_tolerance)
                        .collect();
                    if cuts.is_empty() {
                        let objective = model.objective_value(&point);
                        if objective < ub {
                            incumbent = Some((objective, point));
                        }
                        break;
                    }
                    rejected += 1;
                    search.pool.extend(cuts);
                }
                Some(j) => {
                    let cuts: Vec<Cut> = if rounds < config.max_node_rounds {
                        callbacks
                            .on_node_lp(&sol.values)
                            .into_iter()
                            .filter(|c| c.violation(&sol.values) > config.cut_tolerance)
                            .collect()
                    } else {
                        Vec::new()
                    };
                    if !cuts.is_empty() {
                        rounds += 1;
                        search.pool.extend(cuts);
                        continue;
                    }
                    let mut down_upper = node.upper.clone();
                    down_upper[j] = 0.0;
                    heap.push(Node { bound: value, id: next_id, lower: node.lower.clone(), upper: down_upper });
                    let mut up_lower = node.lower.clone();
                    up_lower[j] = 1.0;
                    heap.push(Node { bound: value, id: next_id + 1, lower: up_lower, upper: node.upper.clone() });
                    next_id += 2;
                    break;
                }
            }
        }
        let ub = incumbent.as_ref().map_or(f64::INFINITY, |(v, _)| *v);
        let open = heap.peek().map_or(ub, |n| n.bound.min(ub));
        lower_bound = lower_bound.max(open.min(ub));
        trace.push(lower_bound);
    }

    let (status, lower_bound) = match (&incumbent, hit_limit) {
        (Some((ub, _)), false) => (MipStatus::Optimal, lower_bound.max(*ub - tol(*ub)).min(*ub)),
        (Some(_), true) => (MipStatus::Feasible, lower_bound),
        (None, false) => (MipStatus::Infeasible, f64::INFINITY),
        (None, true) => (MipStatus::Limit, lower_bound),
    };
    // A proven optimum closes the gap exactly.
    let lower_bound = match (&incumbent, status) {
        (Some((ub, _)), MipStatus::Optimal) => *ub,
        _ => lower_bound,
    };
    Ok(MipSolution {
        status,
        objective: incumbent.as_ref().map(|(v, _)| *v),
        values: incumbent.map(|(_, x)| x),
        lower_bound,
        root_bound,
        nodes,
        cuts: search.pool,
        rejected_incumbents: rejected,
        bound_trace: trace,
    })
}

/// LP relaxation value of `model` (indicators dropped), with the objective
/// constant included.
pub fn relaxation_bound(model: &Model) -> Result<LpSolution, LpError> {
    let mut sol = solve_lp(&model.relaxation())?;
    sol.objective += model.objective_constant();
    Ok(sol)
}
