//! The six solution methods: the full indicator model with optional root
//! cuts, and constraint generation with optional root cuts.
//!
//! Variable names: `x_{i}_{t}` (intervention `i`, 1-based, starts at `t`),
//! `y_{t}` (quantile), `w_{t}` (excess), `z_{t}_{s}` (scenario risk, full
//! model only), `k_{t}_{s}` (gadget guard).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cut::{CutError, CutFamily};
use crate::instance::{evaluate, rank_at, risk_matrix, Instance, ObjectiveBreakdown, RiskMatrix, Schedule};
use crate::lp::{LpError, LpStatus, Relation};
use crate::mip::{
    relaxation_bound, solve_mip, to_bigm, BigMError, BigMVariant, Cut, MipConfig, MipError, MipStatus, Model,
    ModelError, NoCallbacks, SolveCallbacks, Terms,
};
use crate::polyhedral_cuts::{separate_asymmetric, BoxBounds};
use crate::quantile::kth_largest;
use crate::subset_cuts::{
    generated_subset_cut, per_column_subsets, separate_general_exhaustive, separate_subset_bestfirst,
    simple_generated_cut, SubsetCut, EXHAUSTIVE_MAX_ROWS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Full,
    FullC,
    FullS,
    CGen,
    CGenS,
    CGenO,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Full, Method::FullC, Method::FullS, Method::CGen, Method::CGenS, Method::CGenO];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Full => "full",
            Method::FullC => "full+C",
            Method::FullS => "full+S",
            Method::CGen => "cgen",
            Method::CGenS => "cgen+S",
            Method::CGenO => "cgen+O",
        }
    }

    pub fn is_cgen(self) -> bool {
        matches!(self, Method::CGen | Method::CGenS | Method::CGenO)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected one of full, full+C, full+S, cgen, cgen+S, cgen+O)"))
    }
}

/// Cut family used by the lazy constraint-generation callback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LazyFamily {
    GeneratedSubset,
    Simple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodConfig {
    pub method: Method,
    pub mip: MipConfig,
    /// Root rounds for the `+C` loop and the `+O` separation.
    pub cut_rounds: usize,
    pub variant: BigMVariant,
    pub lazy_family: LazyFamily,
    /// Fractional coordinates whose β is enumerated in `+O` separation.
    pub max_free_beta: usize,
    /// Absolute slack for rejecting an incumbent's `y_t`.
    pub tolerance: f64,
}

impl MethodConfig {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            mip: MipConfig::default(),
            cut_rounds: 20,
            variant: BigMVariant::Activate,
            lazy_family: LazyFamily::GeneratedSubset,
            max_free_beta: 6,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MethodError {
    #[error("intervention `{0}` has no admissible start")]
    NoAdmissibleStart(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    BigM(#[from] BigMError),
    #[error(transparent)]
    Mip(#[from] MipError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error("LP relaxation is {0:?}")]
    Relaxation(LpStatus),
}

/// Variable indices of a formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// `(intervention, start, variable)`.
    pub x: Vec<(usize, usize, usize)>,
    x_lookup: BTreeMap<(usize, usize), usize>,
    /// Per timestep (index `t - 1`).
    pub y: Vec<usize>,
    pub w: Vec<usize>,
    /// Scenario-risk variables, full model only.
    pub z: Option<Vec<Vec<usize>>>,
    pub kappa: Vec<Vec<usize>>,
}

impl Layout {
    pub fn x_var(&self, intervention: usize, start: usize) -> Option<usize> {
        self.x_lookup.get(&(intervention, start)).copied()
    }
}

/// A model together with what is needed to read and extend it.
#[derive(Debug, Clone)]
pub struct Formulation {
    pub model: Model,
    pub layout: Layout,
    /// Scenario matrix per timestep (index `t - 1`).
    pub risk: Vec<RiskMatrix>,
    /// Quantile rank per timestep.
    pub ranks: Vec<usize>,
    names: Vec<String>,
    row_counter: usize,
}

impl Formulation {
    /// Variable of each column of `risk[t - 1]`.
    pub fn column_vars(&self, t: usize) -> Vec<usize> {
        self.risk[t - 1]
            .columns
            .iter()
            .map(|&(i, s)| self.layout.x_var(i, s).expect("columns are admissible"))
            .collect()
    }

    /// Values of the columns of `risk[t - 1]` in the point `values`.
    pub fn column_point(&self, t: usize, values: &[f64]) -> Vec<f64> {
        self.column_vars(t).iter().map(|&j| values[j].clamp(0.0, 1.0)).collect()
    }

    /// Schedule read off the `x` variables (values above 0.5).
    pub fn decode(&self, values: &[f64]) -> Schedule {
        let mut starts = BTreeMap::new();
        for &(i, start, var) in &self.layout.x {
            if values[var] > 0.5 {
                starts.insert(self.names[i].clone(), start);
            }
        }
        Schedule { starts }
    }

    /// Binary `x` encoding of a schedule; other variables are 0.
    pub fn encode(&self, sched: &Schedule) -> Vec<f64> {
        let mut values = vec![0.0; self.model.num_vars()];
        for &(i, start, var) in &self.layout.x {
            if sched.is_scheduled(&self.names[i], start) {
                values[var] = 1.0;
            }
        }
        values
    }

    /// `sum_s weights[s] * (A_t x)_s` as terms over `x`.
    fn risk_terms(&self, t: usize, weights: &[f64]) -> Terms {
        let a = &self.risk[t - 1].matrix;
        self.column_vars(t)
            .into_iter()
            .enumerate()
            .filter_map(|(c, var)| {
                let v: f64 = weights.iter().enumerate().map(|(s, w)| w * a.get(s, c)).sum();
                (v != 0.0).then_some((var, v))
            })
            .collect()
    }

    fn next_name(&mut self, prefix: &str) -> String {
        self.row_counter += 1;
        format!("{prefix}_{}", self.row_counter)
    }

    /// Adds `y_t >= sum_j coefficients[j] x_col(j) + constant`.
    fn add_column_cut(&mut self, prefix: &str, t: usize, cut: &SubsetCut) -> Result<(), MethodError> {
        let terms = self.cut_terms(t, &cut.coefficients);
        let name = self.next_name(prefix);
        self.model.add_constraint(&name, terms, Relation::Ge, cut.constant)?;
        Ok(())
    }

    /// `y_t - sum_j coefficients[j] x_col(j)`.
    fn cut_terms(&self, t: usize, coefficients: &[f64]) -> Terms {
        let mut terms: Terms = vec![(self.layout.y[t - 1], 1.0)];
        for (var, &c) in self.column_vars(t).into_iter().zip(coefficients) {
            if c != 0.0 {
                terms.push((var, -c));
            }
        }
        terms
    }
}

/// Assignment, resource and exclusion rows plus the blended objective with
/// `w_t >= y_t - mean_t(x)`. `y_t` is unconstrained from above.
pub fn build_base(inst: &Instance) -> Result<Formulation, MethodError> {
    build(inst, false)
}

/// Base model plus the quantile gadget per timestep: `z_{t,s} = (A_t x)_s`,
/// guards `k_{t,s}` with `k = 1 -> y_t >= z_{t,s}`, and `n - k + 1` active
/// guards. When `k = 1` every guard would be active, so plain rows are used.
pub fn build_full(inst: &Instance) -> Result<Formulation, MethodError> {
    build(inst, true)
}

fn build(inst: &Instance, full: bool) -> Result<Formulation, MethodError> {
    let horizon = inst.horizon;
    let mut model = Model::new();
    let mut x = Vec::new();
    let mut x_lookup = BTreeMap::new();
    for (i, iv) in inst.interventions.iter().enumerate() {
        let starts = iv.admissible_starts(horizon);
        if starts.is_empty() {
            return Err(MethodError::NoAdmissibleStart(iv.name.clone()));
        }
        for start in starts {
            let var = model.add_binary(&format!("x_{}_{}", i + 1, start))?;
            x.push((i, start, var));
            x_lookup.insert((i, start), var);
        }
    }
    let y: Vec<usize> =
        (1..=horizon).map(|t| model.add_continuous(&format!("y_{t}"), 0.0, f64::INFINITY)).collect::<Result<_, _>>()?;
    let w: Vec<usize> =
        (1..=horizon).map(|t| model.add_continuous(&format!("w_{t}"), 0.0, f64::INFINITY)).collect::<Result<_, _>>()?;
    let risk: Vec<RiskMatrix> = (1..=horizon).map(|t| risk_matrix(inst, t)).collect();
    let ranks: Vec<usize> = (1..=horizon).map(|t| rank_at(inst, t)).collect();
    let names = inst.interventions.iter().map(|iv| iv.name.clone()).collect();
    let layout = Layout { x, x_lookup, y, w, z: None, kappa: Vec::new() };
    let mut f = Formulation { model, layout, risk, ranks, names, row_counter: 0 };

    for i in 0..inst.interventions.len() {
        let terms = f.layout.x.iter().filter(|e| e.0 == i).map(|e| (e.2, 1.0)).collect();
        f.model.add_constraint(&format!("assign_{}", i + 1), terms, Relation::Eq, 1.0)?;
    }
    for (c, r) in inst.resources.iter().enumerate() {
        for t in 1..=horizon {
            let terms: Terms = f
                .layout
                .x
                .iter()
                .filter_map(|&(i, start, var)| {
                    let amount = inst.interventions[i].workload_at(&r.name, t, start);
                    (amount != 0.0).then_some((var, amount))
                })
                .collect();
            if r.lower[t - 1] > 0.0 {
                f.model.add_constraint(&format!("res_lo_{}_{t}", c + 1), terms.clone(), Relation::Ge, r.lower[t - 1])?;
            }
            let max_usage: f64 = terms.iter().map(|t| t.1).sum();
            if max_usage > r.upper[t - 1] {
                f.model.add_constraint(&format!("res_hi_{}_{t}", c + 1), terms, Relation::Le, r.upper[t - 1])?;
            }
        }
    }
    let index = |name: &str| inst.interventions.iter().position(|iv| iv.name == name);
    for (e, ex) in inst.exclusions.iter().enumerate() {
        let (Some(a), Some(b)) = (index(&ex.first), index(&ex.second)) else { continue };
        let mut pairs = std::collections::BTreeSet::new();
        for &t in &ex.timesteps {
            for &(ia, sa, va) in f.layout.x.iter().filter(|e| e.0 == a) {
                for &(ib, sb, vb) in f.layout.x.iter().filter(|e| e.0 == b) {
                    if inst.interventions[ia].covers(sa, t) && inst.interventions[ib].covers(sb, t) {
                        pairs.insert((va, vb));
                    }
                }
            }
        }
        for (va, vb) in pairs {
            f.model.add_constraint(&format!("excl_{}_{va}_{vb}", e + 1), vec![(va, 1.0), (vb, 1.0)], Relation::Le, 1.0)?;
        }
    }

    if full {
        let bounds = risk_upper_bounds(inst);
        let mut z = Vec::new();
        let mut kappa = Vec::new();
        for t in 1..=horizon {
            let n = inst.scenario_counts[t - 1];
            let mut zt = Vec::new();
            for s in 0..n {
                let var = f.model.add_continuous(&format!("z_{t}_{}", s + 1), 0.0, bounds[t - 1][s])?;
                let mut onehot = vec![0.0; n];
                onehot[s] = 1.0;
                let mut terms = f.risk_terms(t, &onehot);
                for term in &mut terms {
                    term.1 = -term.1;
                }
                terms.insert(0, (var, 1.0));
                f.model.add_constraint(&format!("risk_{t}_{}", s + 1), terms, Relation::Eq, 0.0)?;
                zt.push(var);
            }
            let k = f.ranks[t - 1];
            let yt = f.layout.y[t - 1];
            let mut kt = Vec::new();
            if k == 1 {
                for (s, &var) in zt.iter().enumerate() {
                    f.model.add_constraint(&format!("max_{t}_{}", s + 1), vec![(yt, 1.0), (var, -1.0)], Relation::Ge, 0.0)?;
                }
            } else {
                for (s, &var) in zt.iter().enumerate() {
                    let guard = f.model.add_binary(&format!("k_{t}_{}", s + 1))?;
                    f.model.add_indicator(
                        &format!("q_{t}_{}", s + 1),
                        guard,
                        true,
                        vec![(yt, 1.0), (var, -1.0)],
                        Relation::Ge,
                        0.0,
                    )?;
                    kt.push(guard);
                }
                let terms = kt.iter().map(|&g| (g, 1.0)).collect();
                f.model.add_constraint(&format!("card_{t}"), terms, Relation::Eq, (n - k + 1) as f64)?;
            }
            z.push(zt);
            kappa.push(kt);
        }
        f.layout.z = Some(z);
        f.layout.kappa = kappa;
    }

    // w_t - y_t + mean_t >= 0 and the objective
    let scale = 1.0 / horizon as f64;
    let mut objective: BTreeMap<usize, f64> = BTreeMap::new();
    for t in 1..=horizon {
        let n = inst.scenario_counts[t - 1];
        let mean: Terms = match &f.layout.z {
            Some(z) => z[t - 1].iter().map(|&v| (v, 1.0 / n as f64)).collect(),
            None => f.risk_terms(t, &vec![1.0 / n as f64; n]),
        };
        let mut terms: Terms = vec![(f.layout.w[t - 1], 1.0), (f.layout.y[t - 1], -1.0)];
        terms.extend(mean.iter().copied());
        f.model.add_constraint(&format!("excess_{t}"), terms, Relation::Ge, 0.0)?;
        for (var, c) in mean {
            *objective.entry(var).or_default() += inst.alpha * scale * c;
        }
        *objective.entry(f.layout.w[t - 1]).or_default() += (1.0 - inst.alpha) * scale;
    }
    f.model.set_objective(objective.into_iter().filter(|e| e.1 != 0.0).collect(), 0.0)?;
    Ok(f)
}

/// `u_{t,s} = sum_i max_{t'} risk_{i t'}^{s t}` over admissible starts; per
/// timestep (index `t - 1`) and scenario.
pub fn risk_upper_bounds(inst: &Instance) -> Vec<Vec<f64>> {
    (1..=inst.horizon)
        .map(|t| {
            let mut bound = vec![0.0; inst.scenario_counts[t - 1]];
            for iv in &inst.interventions {
                for (s, b) in bound.iter_mut().enumerate() {
                    let top = iv
                        .admissible_starts(inst.horizon)
                        .into_iter()
                        .filter_map(|start| iv.risk_at(t, start).and_then(|r| r.get(s).copied()))
                        .fold(0.0, f64::max);
                    *b += top;
                }
            }
            bound
        })
        .collect()
}

/// Adds the per-column subset cuts of every timestep. Returns the number of
/// rows added; cuts with all-zero coefficients are skipped.
pub fn add_root_subset_cuts(f: &mut Formulation) -> Result<usize, MethodError> {
    let mut added = 0;
    for t in 1..=f.risk.len() {
        let cuts = per_column_subsets(&f.risk[t - 1].matrix, f.ranks[t - 1])?;
        for cut in cuts.iter().filter(|c| !c.is_trivial()) {
            f.add_column_cut("sub", t, cut)?;
            added += 1;
        }
    }
    Ok(added)
}

/// LP relaxation value of the big-M form of `f.model`.
pub fn root_bound(f: &Formulation, variant: BigMVariant) -> Result<f64, MethodError> {
    Ok(relaxation(f, variant)?.0)
}

fn relaxation(f: &Formulation, variant: BigMVariant) -> Result<(f64, Vec<f64>), MethodError> {
    let sol = relaxation_bound(&to_bigm(&f.model, variant)?)?;
    if sol.status != LpStatus::Optimal {
        return Err(MethodError::Relaxation(sol.status));
    }
    Ok((sol.objective, sol.values))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CutLoopReport {
    pub rounds: usize,
    pub cuts: usize,
    /// LP bound before the first round and after each round.
    pub bounds: Vec<f64>,
}

/// Root cutting-plane loop with asymmetric quantile cuts on the scenario
/// risks `z_t in [0, u_t]`. Stops when no cut is violated or after
/// `max_rounds` rounds.
pub fn run_quantile_cut_loop(
    f: &mut Formulation,
    bounds: &[Vec<f64>],
    max_rounds: usize,
    variant: BigMVariant,
) -> Result<CutLoopReport, MethodError> {
    let mut report = CutLoopReport::default();
    let (mut value, mut point) = relaxation(f, variant)?;
    report.bounds.push(value);
    while report.rounds < max_rounds {
        let mut added = 0;
        for t in 1..=f.risk.len() {
            let a = &f.risk[t - 1].matrix;
            let columns = f.column_point(t, &point);
            let upper = &bounds[t - 1];
            let z: Vec<f64> = a.apply(&columns).iter().zip(upper).map(|(v, u)| v.clamp(0.0, *u)).collect();
            let box_bounds = BoxBounds::new(vec![0.0; z.len()], upper.clone())?;
            let y = point[f.layout.y[t - 1]];
            if let Some(cut) = separate_asymmetric(&z, f.ranks[t - 1], y, &box_bounds)? {
                // y_t >= sum_s c_s (A_t x)_s + c_0
                let mut terms = f.risk_terms(t, &cut.coefficients);
                for term in &mut terms {
                    term.1 = -term.1;
                }
                terms.insert(0, (f.layout.y[t - 1], 1.0));
                let name = f.next_name("qcut");
                f.model.add_constraint(&name, terms, Relation::Ge, cut.constant)?;
                added += 1;
            }
        }
        if added == 0 {
            break;
        }
        report.rounds += 1;
        report.cuts += added;
        (value, point) = relaxation(f, variant)?;
        report.bounds.push(value);
    }
    Ok(report)
}

/// Root rounds of general subset separation on the unit box (exhaustive
/// over `P`; best-first subset separation beyond
/// [`EXHAUSTIVE_MAX_ROWS`] scenarios).
pub fn run_general_subset_rounds(
    f: &mut Formulation,
    max_rounds: usize,
    max_free_beta: usize,
    variant: BigMVariant,
    tolerance: f64,
) -> Result<CutLoopReport, MethodError> {
    let mut report = CutLoopReport::default();
    let (mut value, mut point) = relaxation(f, variant)?;
    report.bounds.push(value);
    while report.rounds < max_rounds {
        let mut added = 0;
        for t in 1..=f.risk.len() {
            let a = &f.risk[t - 1].matrix;
            if a.cols() == 0 {
                continue;
            }
            let columns = f.column_point(t, &point);
            let cut = if a.rows() <= EXHAUSTIVE_MAX_ROWS {
                separate_general_exhaustive(a, f.ranks[t - 1], &columns, max_free_beta)?
            } else {
                separate_subset_bestfirst(a, f.ranks[t - 1], &columns, 64 * a.rows(), t as u64)?
            };
            if cut.rhs_at(&columns) > point[f.layout.y[t - 1]] + tolerance {
                f.add_column_cut("gsub", t, &cut)?;
                added += 1;
            }
        }
        if added == 0 {
            break;
        }
        report.rounds += 1;
        report.cuts += added;
        (value, point) = relaxation(f, variant)?;
        report.bounds.push(value);
    }
    Ok(report)
}

/// One incumbent offered to the lazy callback.
#[derive(Debug, Clone, PartialEq)]
pub struct IncumbentRecord {
    pub schedule: Schedule,
    pub y: Vec<f64>,
    pub rejected: bool,
}

struct LazyQuantile<'a> {
    f: &'a Formulation,
    family: LazyFamily,
    tolerance: f64,
    log: Vec<IncumbentRecord>,
    error: Option<CutError>,
}

impl LazyQuantile<'_> {
    fn cuts_for(&mut self, values: &[f64]) -> Result<Vec<Cut>, CutError> {
        let mut cuts = Vec::new();
        for t in 1..=self.f.risk.len() {
            let a = &self.f.risk[t - 1].matrix;
            let k = self.f.ranks[t - 1];
            let incumbent: Vec<f64> = self.f.column_point(t, values).iter().map(|v| v.round()).collect();
            let q = kth_largest(&a.apply(&incumbent), k);
            if values[self.f.layout.y[t - 1]] >= q - self.tolerance {
                continue;
            }
            let (cut, family) = match self.family {
                LazyFamily::GeneratedSubset => (generated_subset_cut(a, k, &incumbent)?, CutFamily::GeneratedSubset),
                LazyFamily::Simple => (simple_generated_cut(a, k, &incumbent)?, CutFamily::Simple),
            };
            cuts.push(Cut { family, terms: self.f.cut_terms(t, &cut.coefficients), rhs: cut.constant });
        }
        Ok(cuts)
    }
}

impl SolveCallbacks for LazyQuantile<'_> {
    fn on_incumbent(&mut self, values: &[f64]) -> Vec<Cut> {
        let cuts = self.cuts_for(values).unwrap_or_else(|e| {
            self.error.get_or_insert(e);
            Vec::new()
        });
        self.log.push(IncumbentRecord {
            schedule: self.f.decode(values),
            y: self.f.layout.y.iter().map(|&v| values[v]).collect(),
            rejected: !cuts.is_empty(),
        });
        cuts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub status: MipStatus,
    pub schedule: Option<Schedule>,
    pub breakdown: Option<ObjectiveBreakdown>,
    /// Model objective of the incumbent.
    pub objective: Option<f64>,
    pub lower_bound: f64,
    pub gap_percent: Option<f64>,
    /// LP bound at the root after any root cuts.
    pub root_bound: f64,
    /// `y_t` after fixing the schedule and minimizing `sum_t y_t`.
    pub y: Vec<f64>,
    pub cuts: BTreeMap<CutFamily, usize>,
    pub nodes: usize,
    pub rejected_incumbents: usize,
    pub root_rounds: usize,
    pub incumbents: Vec<IncumbentRecord>,
    /// Every lazy cut, as `sum terms >= rhs` over the master's variables.
    pub lazy_cuts: Vec<Cut>,
    pub elapsed: Duration,
}

/// Builds and solves `config.method` on `inst`.
pub fn solve_method(inst: &Instance, config: &MethodConfig) -> Result<MethodResult, MethodError> {
    let start = Instant::now();
    let method = config.method;
    let mut cuts = BTreeMap::new();
    let mut f = if method.is_cgen() { build_base(inst)? } else { build_full(inst)? };
    let mut root_rounds = 0;
    match method {
        Method::FullS | Method::CGenS => {
            cuts.insert(CutFamily::Subset, add_root_subset_cuts(&mut f)?);
        }
        Method::FullC => {
            let report = run_quantile_cut_loop(&mut f, &risk_upper_bounds(inst), config.cut_rounds, config.variant)?;
            root_rounds = report.rounds;
            cuts.insert(CutFamily::Asymmetric, report.cuts);
        }
        Method::CGenO => {
            let report =
                run_general_subset_rounds(&mut f, config.cut_rounds, config.max_free_beta, config.variant, config.tolerance)?;
            root_rounds = report.rounds;
            cuts.insert(CutFamily::GeneralSubset, report.cuts);
        }
        Method::Full | Method::CGen => {}
    }
    let bigm = to_bigm(&f.model, config.variant)?;
    let mut callbacks = LazyQuantile { f: &f, family: config.lazy_family, tolerance: config.tolerance, log: Vec::new(), error: None };
    let sol = if method.is_cgen() {
        solve_mip(&bigm, &config.mip, &mut callbacks)?
    } else {
        solve_mip(&bigm, &config.mip, &mut NoCallbacks)?
    };
    if let Some(e) = callbacks.error.take() {
        return Err(e.into());
    }
    for cut in &sol.cuts {
        *cuts.entry(cut.family).or_default() += 1;
    }
    let incumbents = std::mem::take(&mut callbacks.log);
    let schedule = sol.values.as_ref().map(|v| f.decode(v));
    let breakdown = schedule.as_ref().map(|s| evaluate(inst, s).expect("decoded names are known"));
    let y = match &sol.values {
        Some(v) => polish(&f, &bigm, &sol.cuts, v)?,
        None => Vec::new(),
    };
    Ok(MethodResult {
        method,
        status: sol.status,
        schedule,
        breakdown,
        objective: sol.objective,
        lower_bound: sol.lower_bound,
        gap_percent: sol.gap_percent(),
        root_bound: sol.root_bound,
        y,
        cuts,
        nodes: sol.nodes,
        rejected_incumbents: sol.rejected_incumbents,
        root_rounds,
        incumbents,
        lazy_cuts: sol.cuts,
        elapsed: start.elapsed(),
    })
}

/// Constraint generation (`cgen`, `cgen+S`, `cgen+O`).
pub fn solve_cgen(inst: &Instance, config: &MethodConfig) -> Result<MethodResult, MethodError> {
    debug_assert!(config.method.is_cgen());
    solve_method(inst, config)
}

/// Fixes the schedule and minimizes `sum_t y_t`, with the tight generated
/// subset cut at the schedule added, so every `y_t` lands on its quantile.
fn polish(f: &Formulation, bigm: &Model, pool: &[Cut], values: &[f64]) -> Result<Vec<f64>, MethodError> {
    let mut m = bigm.clone();
    for (n, cut) in pool.iter().enumerate() {
        m.add_constraint(&format!("pool_{n}"), cut.terms.clone(), Relation::Ge, cut.rhs)?;
    }
    for t in 1..=f.risk.len() {
        let incumbent: Vec<f64> = f.column_point(t, values).iter().map(|v| v.round()).collect();
        let cut = generated_subset_cut(&f.risk[t - 1].matrix, f.ranks[t - 1], &incumbent)?;
        m.add_constraint(&format!("tight_{t}"), f.cut_terms(t, &cut.coefficients), Relation::Ge, cut.constant)?;
    }
    for &(_, _, var) in &f.layout.x {
        let v = values[var].round();
        m.set_bounds(var, v, v)?;
    }
    m.set_objective(f.layout.y.iter().map(|&v| (v, 1.0)).collect(), 0.0)?;
    let sol = solve_mip(&m, &MipConfig::default(), &mut NoCallbacks)?;
    let v = sol.values.ok_or(MethodError::Relaxation(LpStatus::Infeasible))?;
    Ok(f.layout.y.iter().map(|&j| v[j]).collect())
}

/// Comparison table: one row per instance, one column per method.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub instances: Vec<String>,
    pub methods: Vec<Method>,
    /// `cells[row][col]`; `None` for a failed run.
    pub cells: Vec<Vec<Option<CellSummary>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub status: MipStatus,
    pub objective: Option<f64>,
    pub lower_bound: f64,
    pub gap_percent: Option<f64>,
    pub nodes: usize,
    pub cuts: usize,
}

impl From<&MethodResult> for CellSummary {
    fn from(r: &MethodResult) -> Self {
        CellSummary {
            status: r.status,
            objective: r.breakdown.as_ref().map(|b| b.blended),
            lower_bound: r.lower_bound,
            gap_percent: r.gap_percent,
            nodes: r.nodes,
            cuts: r.cuts.values().sum(),
        }
    }
}

fn status_str(status: MipStatus) -> &'static str {
    match status {
        MipStatus::Optimal => "optimal",
        MipStatus::Feasible => "feasible",
        MipStatus::Infeasible => "infeasible",
        MipStatus::Limit => "limit",
    }
}

/// Builds the table from `(instance, result)` pairs; a missing result or an
/// error becomes a failed cell.
pub fn report(
    instances: &[String],
    methods: &[Method],
    results: &[(String, Method, Result<MethodResult, String>)],
) -> Comparison {
    let cells = instances
        .iter()
        .map(|inst| {
            methods
                .iter()
                .map(|&m| {
                    results
                        .iter()
                        .find(|(i, rm, _)| i == inst && *rm == m)
                        .and_then(|(_, _, r)| r.as_ref().ok())
                        .map(CellSummary::from)
                })
                .collect()
        })
        .collect();
    Comparison { instances: instances.to_vec(), methods: methods.to_vec(), cells }
}

impl Comparison {
    fn gap(cell: &Option<CellSummary>) -> Option<f64> {
        cell.as_ref().and_then(|c| c.gap_percent)
    }

    /// Gap percentages with two decimals, `-` for failures, and the best gap
    /// of each row in bold.
    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| instance |");
        for m in &self.methods {
            out.push_str(&format!(" {m} |"));
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(self.methods.len()));
        out.push('\n');
        for (name, row) in self.instances.iter().zip(&self.cells) {
            let best = row.iter().filter_map(Self::gap).map(|g| format!("{g:.2}")).min_by(|a, b| {
                a.parse::<f64>().unwrap().total_cmp(&b.parse::<f64>().unwrap())
            });
            out.push_str(&format!("| {name} |"));
            for cell in row {
                let text = match Self::gap(cell) {
                    Some(g) => {
                        let g = format!("{g:.2}");
                        if Some(&g) == best.as_ref() {
                            format!("**{g}%**")
                        } else {
                            format!("{g}%")
                        }
                    }
                    None => "-".into(),
                };
                out.push_str(&format!(" {text} |"));
            }
            out.push('\n');
        }
        out
    }

    /// One line per cell with raw numbers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,method,status,objective,lower_bound,gap_percent,nodes,cuts\n");
        for (name, row) in self.instances.iter().zip(&self.cells) {
            for (m, cell) in self.methods.iter().zip(row) {
                match cell {
                    Some(c) => out.push_str(&format!(
                        "{name},{m},{},{},{},{},{},{}\n",
                        status_str(c.status),
                        c.objective.map_or(String::new(), |v| v.to_string()),
                        c.lower_bound,
                        c.gap_percent.map_or(String::new(), |v| v.to_string()),
                        c.nodes,
                        c.cuts
                    )),
                    None => out.push_str(&format!("{name},{m},failed,,,,,\n")),
                }
            }
        }
        out
    }

    /// Fixed-width text.
    pub fn to_text(&self) -> String {
        let width = self.instances.iter().map(String::len).max().unwrap_or(8).max(8);
        let mut out = format!("{:width$}", "instance");
        for m in &self.methods {
            out.push_str(&format!(" {:>9}", m.as_str()));
        }
        out.push('\n');
        for (name, row) in self.instances.iter().zip(&self.cells) {
            out.push_str(&format!("{name:width$}"));
            for cell in row {
                let text = Self::gap(cell).map_or("-".to_string(), |g| format!("{g:.2}%"));
                out.push_str(&format!(" {text:>9}"));
            }
            out.push('\n');
        }
        out
    }
}
