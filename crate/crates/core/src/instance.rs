//! Scheduling instances: the JSON document format, validation, schedules,
//! feasibility checks, the blended risk objective and a synthetic generator.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantile::{kth_largest, tau_to_k};
use crate::subset_cuts::ScenarioMatrix;

/// Timestep-keyed map; timesteps are 1-based.
pub type ByTime<V> = BTreeMap<usize, V>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub horizon: usize,
    pub alpha: f64,
    pub tau: f64,
    pub scenario_counts: Vec<usize>,
    pub resources: Vec<Resource>,
    pub interventions: Vec<Intervention>,
    pub exclusions: Vec<Exclusion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resource {
    pub name: String,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intervention {
    pub name: String,
    /// start → duration in days
    pub duration: ByTime<usize>,
    /// resource → t → start → amount
    pub workload: BTreeMap<String, ByTime<ByTime<f64>>>,
    /// t → start → risk per scenario
    pub risk: ByTime<ByTime<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exclusion {
    pub first: String,
    pub second: String,
    pub timesteps: Vec<usize>,
}

impl Intervention {
    /// Starts with a defined duration that finish by `horizon`.
    pub fn admissible_starts(&self, horizon: usize) -> Vec<usize> {
        self.duration
            .iter()
            .filter(|&(&t, &d)| t >= 1 && d >= 1 && t + d - 1 <= horizon)
            .map(|(&t, _)| t)
            .collect()
    }

    pub fn is_admissible(&self, start: usize, horizon: usize) -> bool {
        self.duration.get(&start).is_some_and(|&d| start >= 1 && d >= 1 && start + d - 1 <= horizon)
    }

    /// Whether starting at `start` keeps the intervention running at `t`.
    pub fn covers(&self, start: usize, t: usize) -> bool {
        self.duration.get(&start).is_some_and(|&d| start <= t && t < start + d)
    }

    pub fn risk_at(&self, t: usize, start: usize) -> Option<&[f64]> {
        self.risk.get(&t)?.get(&start).map(Vec::as_slice)
    }

    pub fn workload_at(&self, resource: &str, t: usize, start: usize) -> f64 {
        self.workload.get(resource).and_then(|m| m.get(&t)).and_then(|m| m.get(&start)).copied().unwrap_or(0.0)
    }
}

/// One broken instance invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Issue {
    ZeroHorizon,
    AlphaOutOfRange(f64),
    TauOutOfRange(f64),
    ScenarioCountsLength { expected: usize, actual: usize },
    NoScenarios { t: usize },
    DuplicateName(String),
    ResourceLength { resource: String, expected: usize, actual: usize },
    NegativeResourceBound { resource: String, t: usize },
    InvertedResourceBounds { resource: String, t: usize, lower: f64, upper: f64 },
    NonFinite { entity: String },
    NoAdmissibleStart { intervention: String },
    BadDuration { intervention: String, start: usize },
    UnknownResource { intervention: String, resource: String },
    NegativeWorkload { intervention: String, resource: String, t: usize, start: usize },
    NegativeRisk { intervention: String, t: usize, start: usize, value: f64 },
    ScenarioCountMismatch { intervention: String, t: usize, start: usize, expected: usize, actual: usize },
    OutsideExecution { intervention: String, t: usize, start: usize },
    UnknownIntervention { exclusion: usize, name: String },
    SelfExclusion { exclusion: usize, name: String },
    EmptyExclusion { exclusion: usize },
    ExclusionTimestep { exclusion: usize, t: usize },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::ZeroHorizon => write!(f, "horizon must be at least 1"),
            Issue::AlphaOutOfRange(a) => write!(f, "alpha {a} outside [0, 1]"),
            Issue::TauOutOfRange(t) => write!(f, "tau {t} outside (0, 1]"),
            Issue::ScenarioCountsLength { expected, actual } => {
                write!(f, "scenario_counts has {actual} entries, expected {expected}")
            }
            Issue::NoScenarios { t } => write!(f, "timestep {t} has no scenarios"),
            Issue::DuplicateName(n) => write!(f, "duplicate name `{n}`"),
            Issue::ResourceLength { resource, expected, actual } => {
                write!(f, "resource `{resource}`: bound sequence has {actual} entries, expected {expected}")
            }
            Issue::NegativeResourceBound { resource, t } => {
                write!(f, "resource `{resource}`: negative bound at t={t}")
            }
            Issue::InvertedResourceBounds { resource, t, lower, upper } => {
                write!(f, "resource `{resource}`: lower {lower} exceeds upper {upper} at t={t}")
            }
            Issue::NonFinite { entity } => write!(f, "non-finite number in {entity}"),
            Issue::NoAdmissibleStart { intervention } => {
                write!(f, "intervention `{intervention}`: no admissible start")
            }
            Issue::BadDuration { intervention, start } => {
                write!(f, "intervention `{intervention}`: invalid duration entry for start {start}")
            }
            Issue::UnknownResource { intervention, resource } => {
                write!(f, "intervention `{intervention}`: unknown resource `{resource}`")
            }
            Issue::NegativeWorkload { intervention, resource, t, start } => {
                write!(f, "intervention `{intervention}`: negative workload on `{resource}` at t={t}, start {start}")
            }
            Issue::NegativeRisk { intervention, t, start, value } => {
                write!(f, "intervention `{intervention}`: negative risk {value} at t={t}, start {start}")
            }
            Issue::ScenarioCountMismatch { intervention, t, start, expected, actual } => write!(
                f,
                "intervention `{intervention}`: {actual} risk values at t={t}, start {start}, expected {expected}"
            ),
            Issue::OutsideExecution { intervention, t, start } => write!(
                f,
                "intervention `{intervention}`: data at t={t} for start {start} outside its execution window"
            ),
            Issue::UnknownIntervention { exclusion, name } => {
                write!(f, "exclusion {exclusion}: unknown intervention `{name}`")
            }
            Issue::SelfExclusion { exclusion, name } => {
                write!(f, "exclusion {exclusion}: `{name}` excluded with itself")
            }
            Issue::EmptyExclusion { exclusion } => write!(f, "exclusion {exclusion}: no timesteps"),
            Issue::ExclusionTimestep { exclusion, t } => {
                write!(f, "exclusion {exclusion}: timestep {t} outside the horizon")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(f, "- {issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid instance:\n{0}")]
    Semantic(ValidationReport),
}

/// Parses a document without checking cross-references.
pub fn parse_document(text: &str) -> Result<Instance, InstanceError> {
    serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let inst = parse_document(text)?;
    let report = validate(&inst);
    if report.is_empty() {
        Ok(inst)
    } else {
        Err(InstanceError::Semantic(report))
    }
}

/// Pretty-printed canonical document.
pub fn to_document(inst: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(inst).expect("instance serializes");
    text.push('\n');
    text
}

pub fn validate(inst: &Instance) -> ValidationReport {
    let mut issues = Vec::new();
    let horizon = inst.horizon;
    if horizon == 0 {
        issues.push(Issue::ZeroHorizon);
    }
    if !(0.0..=1.0).contains(&inst.alpha) {
        issues.push(Issue::AlphaOutOfRange(inst.alpha));
    }
    if !(inst.tau > 0.0 && inst.tau <= 1.0) {
        issues.push(Issue::TauOutOfRange(inst.tau));
    }
    if inst.scenario_counts.len() != horizon {
        issues.push(Issue::ScenarioCountsLength { expected: horizon, actual: inst.scenario_counts.len() });
    }
    for (i, &count) in inst.scenario_counts.iter().enumerate() {
        if count == 0 {
            issues.push(Issue::NoScenarios { t: i + 1 });
        }
    }
    let mut names = BTreeSet::new();
    let mut duplicate = |name: &str, issues: &mut Vec<Issue>| {
        if !names.insert(name.to_string()) {
            issues.push(Issue::DuplicateName(name.to_string()));
        }
    };
    for r in &inst.resources {
        duplicate(&r.name, &mut issues);
        for seq in [&r.lower, &r.upper] {
            if seq.len() != horizon {
                issues.push(Issue::ResourceLength { resource: r.name.clone(), expected: horizon, actual: seq.len() });
            }
        }
        if r.lower.iter().chain(&r.upper).any(|v| !v.is_finite()) {
            issues.push(Issue::NonFinite { entity: format!("resource `{}`", r.name) });
        }
        for (i, (&lo, &hi)) in r.lower.iter().zip(&r.upper).enumerate() {
            if lo < 0.0 || hi < 0.0 {
                issues.push(Issue::NegativeResourceBound { resource: r.name.clone(), t: i + 1 });
            }
            if lo > hi {
                issues.push(Issue::InvertedResourceBounds { resource: r.name.clone(), t: i + 1, lower: lo, upper: hi });
            }
        }
    }
    let resource_names: BTreeSet<&str> = inst.resources.iter().map(|r| r.name.as_str()).collect();
    let mut intervention_names = BTreeSet::new();
    for iv in &inst.interventions {
        intervention_names.insert(iv.name.as_str());
        duplicate(&iv.name, &mut issues);
        let name = || iv.name.clone();
        for (&start, &d) in &iv.duration {
            if start == 0 || start > horizon || d == 0 {
                issues.push(Issue::BadDuration { intervention: name(), start });
            }
        }
        if horizon > 0 && iv.admissible_starts(horizon).is_empty() {
            issues.push(Issue::NoAdmissibleStart { intervention: name() });
        }
        let in_window = |t: usize, start: usize| t >= 1 && t <= horizon && iv.covers(start, t);
        for (resource, by_t) in &iv.workload {
            if !resource_names.contains(resource.as_str()) {
                issues.push(Issue::UnknownResource { intervention: name(), resource: resource.clone() });
            }
            for (&t, by_start) in by_t {
                for (&start, &amount) in by_start {
                    if !amount.is_finite() {
                        issues.push(Issue::NonFinite { entity: format!("intervention `{}` workload", iv.name) });
                    } else if amount < 0.0 {
                        issues.push(Issue::NegativeWorkload {
                            intervention: name(),
                            resource: resource.clone(),
                            t,
                            start,
                        });
                    }
                    if !in_window(t, start) {
                        issues.push(Issue::OutsideExecution { intervention: name(), t, start });
                    }
                }
            }
        }
        for (&t, by_start) in &iv.risk {
            for (&start, values) in by_start {
                if !in_window(t, start) {
                    issues.push(Issue::OutsideExecution { intervention: name(), t, start });
                } else if let Some(&expected) = inst.scenario_counts.get(t - 1) {
                    if values.len() != expected {
                        issues.push(Issue::ScenarioCountMismatch {
                            intervention: name(),
                            t,
                            start,
                            expected,
                            actual: values.len(),
                        });
                    }
                }
                if values.iter().any(|v| !v.is_finite()) {
                    issues.push(Issue::NonFinite { entity: format!("intervention `{}` risk", iv.name) });
                }
                if let Some(&value) = values.iter().find(|&&v| v < 0.0) {
                    issues.push(Issue::NegativeRisk { intervention: name(), t, start, value });
                }
            }
        }
    }
    for (e, ex) in inst.exclusions.iter().enumerate() {
        for n in [&ex.first, &ex.second] {
            if !intervention_names.contains(n.as_str()) {
                issues.push(Issue::UnknownIntervention { exclusion: e, name: n.clone() });
            }
        }
        if ex.first == ex.second {
            issues.push(Issue::SelfExclusion { exclusion: e, name: ex.first.clone() });
        }
        if ex.timesteps.is_empty() {
            issues.push(Issue::EmptyExclusion { exclusion: e });
        }
        for &t in &ex.timesteps {
            if t == 0 || t > horizon {
                issues.push(Issue::ExclusionTimestep { exclusion: e, t });
            }
        }
    }
    ValidationReport { issues }
}

/// Start time per intervention name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub starts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown intervention `{0}` in schedule")]
    UnknownIntervention(String),
}

impl Schedule {
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, usize)>) -> Self {
        Schedule { starts: pairs.into_iter().map(|(n, t)| (n.to_string(), t)).collect() }
    }

    /// Parses `<name> <start>` lines; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self, ScheduleError> {
        let mut starts = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let fields: Vec<&str> = raw.split_whitespace().collect();
            match fields.as_slice() {
                [] => continue,
                [name, start] => {
                    let start: usize = start.parse().map_err(|_| ScheduleError::Syntax {
                        line,
                        message: format!("`{start}` is not a timestep"),
                    })?;
                    if starts.insert(name.to_string(), start).is_some() {
                        return Err(ScheduleError::Syntax { line, message: format!("`{name}` scheduled twice") });
                    }
                }
                _ => {
                    return Err(ScheduleError::Syntax { line, message: "expected `<name> <start>`".into() });
                }
            }
        }
        Ok(Schedule { starts })
    }

    /// One `<name> <start>` line per intervention, in name order.
    pub fn to_text(&self) -> String {
        self.starts.iter().map(|(n, t)| format!("{n} {t}\n")).collect()
    }

    /// Binary encoding over `(intervention index, start)` pairs.
    pub fn is_scheduled(&self, name: &str, start: usize) -> bool {
        self.starts.get(name) == Some(&start)
    }
}

/// Resolves a schedule to `(intervention index, start)` pairs.
fn resolve(inst: &Instance, sched: &Schedule) -> Result<Vec<(usize, usize)>, ScheduleError> {
    let index: BTreeMap<&str, usize> =
        inst.interventions.iter().enumerate().map(|(i, iv)| (iv.name.as_str(), i)).collect();
    sched
        .starts
        .iter()
        .map(|(n, &t)| {
            index.get(n.as_str()).map(|&i| (i, t)).ok_or_else(|| ScheduleError::UnknownIntervention(n.clone()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Unscheduled { intervention: String },
    InadmissibleStart { intervention: String, start: usize },
    ResourceBelow { resource: String, t: usize, usage: f64, lower: f64 },
    ResourceAbove { resource: String, t: usize, usage: f64, upper: f64 },
    Exclusion { first: String, second: String, t: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unscheduled { intervention } => write!(f, "`{intervention}` is not scheduled"),
            Violation::InadmissibleStart { intervention, start } => {
                write!(f, "`{intervention}` cannot start at {start}")
            }
            Violation::ResourceBelow { resource, t, usage, lower } => {
                write!(f, "resource `{resource}` at t={t}: usage {usage} below {lower}")
            }
            Violation::ResourceAbove { resource, t, usage, upper } => {
                write!(f, "resource `{resource}` at t={t}: usage {usage} above {upper}")
            }
            Violation::Exclusion { first, second, t } => {
                write!(f, "`{first}` and `{second}` both run at t={t}")
            }
        }
    }
}

/// Absolute slack allowed on resource sums.
pub const RESOURCE_TOLERANCE: f64 = 1e-9;

pub fn check_feasibility(inst: &Instance, sched: &Schedule) -> Result<Vec<Violation>, ScheduleError> {
    let pairs = resolve(inst, sched)?;
    let mut violations = Vec::new();
    for iv in &inst.interventions {
        if !sched.starts.contains_key(&iv.name) {
            violations.push(Violation::Unscheduled { intervention: iv.name.clone() });
        }
    }
    for &(i, start) in &pairs {
        let iv = &inst.interventions[i];
        if !iv.is_admissible(start, inst.horizon) {
            violations.push(Violation::InadmissibleStart { intervention: iv.name.clone(), start });
        }
    }
    for r in &inst.resources {
        for t in 1..=inst.horizon {
            let usage: f64 =
                pairs.iter().map(|&(i, start)| inst.interventions[i].workload_at(&r.name, t, start)).sum();
            let (lower, upper) = (r.lower[t - 1], r.upper[t - 1]);
            if usage < lower - RESOURCE_TOLERANCE {
                violations.push(Violation::ResourceBelow { resource: r.name.clone(), t, usage, lower });
            }
            if usage > upper + RESOURCE_TOLERANCE {
                violations.push(Violation::ResourceAbove { resource: r.name.clone(), t, usage, upper });
            }
        }
    }
    for ex in &inst.exclusions {
        let (Some(&a), Some(&b)) = (sched.starts.get(&ex.first), sched.starts.get(&ex.second)) else {
            continue;
        };
        let find = |n: &str| inst.interventions.iter().find(|iv| iv.name == n);
        let (Some(ia), Some(ib)) = (find(&ex.first), find(&ex.second)) else { continue };
        for &t in &ex.timesteps {
            if ia.covers(a, t) && ib.covers(b, t) {
                violations.push(Violation::Exclusion { first: ex.first.clone(), second: ex.second.clone(), t });
            }
        }
    }
    Ok(violations)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveBreakdown {
    pub mean: Vec<f64>,
    pub quantile: Vec<f64>,
    pub excess: Vec<f64>,
    pub obj1: f64,
    pub obj2: f64,
    pub blended: f64,
}

/// Per-timestep scenario risks `risk^{st}` of a schedule (index `t - 1`).
pub fn scenario_risks(inst: &Instance, sched: &Schedule) -> Result<Vec<Vec<f64>>, ScheduleError> {
    let pairs = resolve(inst, sched)?;
    Ok((1..=inst.horizon)
        .map(|t| {
            let mut risk = vec![0.0; inst.scenario_counts[t - 1]];
            for &(i, start) in &pairs {
                if let Some(values) = inst.interventions[i].risk_at(t, start) {
                    for (acc, v) in risk.iter_mut().zip(values) {
                        *acc += v;
                    }
                }
            }
            risk
        })
        .collect())
}

/// Quantile rank used at timestep `t` (1-based).
pub fn rank_at(inst: &Instance, t: usize) -> usize {
    tau_to_k(inst.scenario_counts[t - 1], inst.tau).expect("validated instance")
}

pub fn evaluate(inst: &Instance, sched: &Schedule) -> Result<ObjectiveBreakdown, ScheduleError> {
    let risks = scenario_risks(inst, sched)?;
    let horizon = inst.horizon as f64;
    let mut out = ObjectiveBreakdown {
        mean: Vec::new(),
        quantile: Vec::new(),
        excess: Vec::new(),
        obj1: 0.0,
        obj2: 0.0,
        blended: 0.0,
    };
    for (t, risk) in risks.iter().enumerate() {
        let mean = risk.iter().sum::<f64>() / risk.len() as f64;
        let q = kth_largest(risk, rank_at(inst, t + 1));
        out.mean.push(mean);
        out.quantile.push(q);
        out.excess.push((q - mean).max(0.0));
    }
    out.obj1 = out.mean.iter().sum::<f64>() / horizon;
    out.obj2 = out.excess.iter().sum::<f64>() / horizon;
    out.blended = inst.alpha * out.obj1 + (1.0 - inst.alpha) * out.obj2;
    Ok(out)
}

/// Scenario matrix of one timestep with its column map.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskMatrix {
    pub matrix: ScenarioMatrix,
    /// `(intervention index, start)` per column.
    pub columns: Vec<(usize, usize)>,
}

/// Columns are the admissible `(i, t')` pairs whose execution covers `t`,
/// by intervention then start.
pub fn risk_matrix(inst: &Instance, t: usize) -> RiskMatrix {
    let rows = inst.scenario_counts[t - 1];
    let mut columns = Vec::new();
    for (i, iv) in inst.interventions.iter().enumerate() {
        for start in iv.admissible_starts(inst.horizon) {
            if iv.covers(start, t) {
                columns.push((i, start));
            }
        }
    }
    let mut matrix = ScenarioMatrix::zeros(rows, columns.len());
    for (c, &(i, start)) in columns.iter().enumerate() {
        if let Some(values) = inst.interventions[i].risk_at(t, start) {
            for (s, &v) in values.iter().enumerate().take(rows) {
                matrix.set(s, c, v);
            }
        }
    }
    RiskMatrix { matrix, columns }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub interventions: usize,
    pub horizon: usize,
    pub min_scenarios: usize,
    pub max_scenarios: usize,
    pub resources: usize,
    pub max_duration: usize,
    pub exclusions: usize,
    pub alpha: f64,
    pub tau: f64,
    /// Risk values are multiples of 0.25 up to this.
    pub max_risk: f64,
}

impl Default for GeneratorParams {
    /// Desk scale: small enough to enumerate every schedule.
    fn default() -> Self {
        Self {
            interventions: 4,
            horizon: 4,
            min_scenarios: 2,
            max_scenarios: 6,
            resources: 1,
            max_duration: 2,
            exclusions: 1,
            alpha: 0.5,
            tau: 0.8,
            max_risk: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synthetic {
    pub instance: Instance,
    /// Feasible by construction.
    pub planted: Schedule,
}

fn quarter(rng: &mut ChaCha8Rng, max: f64) -> f64 {
    rng.random_range(0..=(max * 4.0).round() as u32) as f64 / 4.0
}

/// Deterministic random instance around a planted feasible schedule.
pub fn generate_synthetic(params: &GeneratorParams, seed: u64) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let horizon = params.horizon.max(1);
    let scenario_counts: Vec<usize> = (0..horizon)
        .map(|_| rng.random_range(params.min_scenarios.max(1)..=params.max_scenarios.max(params.min_scenarios.max(1))))
        .collect();
    let resource_names: Vec<String> = (1..=params.resources).map(|c| format!("c{c}")).collect();
    let mut interventions = Vec::new();
    let mut planted = BTreeMap::new();
    for i in 1..=params.interventions {
        let name = format!("i{i}");
        let length = rng.random_range(1..=params.max_duration.clamp(1, horizon));
        let last = horizon + 1 - length;
        let duration: ByTime<usize> = (1..=last).map(|t| (t, length)).collect();
        // scenario profile shared by all starts, scaled per start
        let mut risk: ByTime<ByTime<Vec<f64>>> = BTreeMap::new();
        let mut workload: BTreeMap<String, ByTime<ByTime<f64>>> = BTreeMap::new();
        for start in 1..=last {
            for t in start..start + length {
                let values = (0..scenario_counts[t - 1]).map(|_| quarter(&mut rng, params.max_risk)).collect();
                risk.entry(t).or_default().insert(start, values);
                for c in &resource_names {
                    let amount = rng.random_range(0..=3) as f64;
                    workload.entry(c.clone()).or_default().entry(t).or_default().insert(start, amount);
                }
            }
        }
        planted.insert(name.clone(), rng.random_range(1..=last));
        interventions.push(Intervention { name, duration, workload, risk });
    }
    let planted = Schedule { starts: planted };

    let mut resources = Vec::new();
    for c in &resource_names {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for t in 1..=horizon {
            let usage: f64 = interventions.iter().map(|iv| iv.workload_at(c, t, planted.starts[&iv.name])).sum();
            upper.push(usage + rng.random_range(1..=4) as f64);
            lower.push(if rng.random_range(0..5) == 0 { (usage / 2.0).floor() } else { 0.0 });
        }
        resources.push(Resource { name: c.clone(), lower, upper });
    }

    let mut exclusions = Vec::new();
    if interventions.len() >= 2 {
        for _ in 0..params.exclusions {
            let a = rng.random_range(0..interventions.len());
            let mut b = rng.random_range(0..interventions.len() - 1);
            if b >= a {
                b += 1;
            }
            let (ia, ib) = (&interventions[a], &interventions[b]);
            let (sa, sb) = (planted.starts[&ia.name], planted.starts[&ib.name]);
            let timesteps: Vec<usize> = (1..=horizon)
                .filter(|&t| !(ia.covers(sa, t) && ib.covers(sb, t)) && rng.random_range(0..2) == 0)
                .collect();
            if !timesteps.is_empty() {
                exclusions.push(Exclusion { first: ia.name.clone(), second: ib.name.clone(), timesteps });
            }
        }
    }

    let instance = Instance {
        horizon,
        alpha: params.alpha,
        tau: params.tau,
        scenario_counts,
        resources,
        interventions,
        exclusions,
    };
    Synthetic { instance, planted }
}
