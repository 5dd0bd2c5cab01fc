//! Exhaustive schedule enumeration with its own objective and feasibility
//! arithmetic, read straight from the instance maps.

use quantcut::instance::{GeneratorParams, Instance, Schedule};

/// Desk-scale corpus member `seed`: at most 6 interventions, 5 timesteps,
/// 8 scenarios.
pub fn corpus_params(seed: u64) -> GeneratorParams {
    let taus = [0.5, 0.75, 0.8, 0.9, 0.95, 1.0];
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    GeneratorParams {
        interventions: 3 + (seed % 4) as usize,
        horizon: 3 + (seed % 3) as usize,
        min_scenarios: 1 + (seed % 2) as usize,
        max_scenarios: 8,
        resources: 1 + (seed % 2) as usize,
        max_duration: 1 + (seed % 3) as usize,
        exclusions: (seed % 3) as usize,
        alpha: alphas[(seed / 2 % 5) as usize],
        tau: taus[(seed % 6) as usize],
        max_risk: 10.0,
    }
}

fn starts_of(inst: &Instance, i: usize) -> Vec<usize> {
    let iv = &inst.interventions[i];
    iv.duration.iter().filter(|(&t, &d)| t + d - 1 <= inst.horizon).map(|(&t, _)| t).collect()
}

fn active(inst: &Instance, i: usize, start: usize, t: usize) -> bool {
    let d = inst.interventions[i].duration[&start];
    start <= t && t < start + d
}

pub fn is_feasible(inst: &Instance, starts: &[usize]) -> bool {
    for r in &inst.resources {
        for t in 1..=inst.horizon {
            let mut usage = 0.0;
            for (i, &s) in starts.iter().enumerate() {
                let iv = &inst.interventions[i];
                if let Some(v) = iv.workload.get(&r.name).and_then(|m| m.get(&t)).and_then(|m| m.get(&s)) {
                    usage += v;
                }
            }
            if usage < r.lower[t - 1] - 1e-9 || usage > r.upper[t - 1] + 1e-9 {
                return false;
            }
        }
    }
    let index = |n: &str| inst.interventions.iter().position(|iv| iv.name == n).unwrap();
    inst.exclusions.iter().all(|ex| {
        let (a, b) = (index(&ex.first), index(&ex.second));
        ex.timesteps.iter().all(|&t| !(active(inst, a, starts[a], t) && active(inst, b, starts[b], t)))
    })
}

/// `⌈τ n⌉`-th smallest per timestep, mean, blended objective.
pub fn objective(inst: &Instance, starts: &[usize]) -> f64 {
    let mut obj1 = 0.0;
    let mut obj2 = 0.0;
    for t in 1..=inst.horizon {
        let n = inst.scenario_counts[t - 1];
        let mut risk = vec![0.0; n];
        for (i, &s) in starts.iter().enumerate() {
            if let Some(values) = inst.interventions[i].risk.get(&t).and_then(|m| m.get(&s)) {
                for (acc, v) in risk.iter_mut().zip(values) {
                    *acc += v;
                }
            }
        }
        let mean = risk.iter().sum::<f64>() / n as f64;
        risk.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let rank = (1..=n).find(|&r| r as f64 >= inst.tau * n as f64 - 1e-9).unwrap();
        obj1 += mean;
        obj2 += (risk[rank - 1] - mean).max(0.0);
    }
    let h = inst.horizon as f64;
    inst.alpha * obj1 / h + (1.0 - inst.alpha) * obj2 / h
}

/// Every combination of admissible starts, feasible or not.
pub fn all_schedules(inst: &Instance) -> Vec<Vec<usize>> {
    let options: Vec<Vec<usize>> = (0..inst.interventions.len()).map(|i| starts_of(inst, i)).collect();
    let mut out = vec![Vec::new()];
    for opts in &options {
        out = out.into_iter().flat_map(|prefix| opts.iter().map(move |&s| [prefix.clone(), vec![s]].concat())).collect();
    }
    out
}

pub fn to_schedule(inst: &Instance, starts: &[usize]) -> Schedule {
    Schedule::from_pairs(inst.interventions.iter().zip(starts).map(|(iv, &s)| (iv.name.as_str(), s)))
}

pub struct Enumeration {
    pub optimum: Option<f64>,
    pub feasible: usize,
    pub feasible_schedules: Vec<Vec<usize>>,
}

pub fn enumerate(inst: &Instance) -> Enumeration {
    let feasible_schedules: Vec<Vec<usize>> = all_schedules(inst).into_iter().filter(|s| is_feasible(inst, s)).collect();
    let optimum = feasible_schedules.iter().map(|s| objective(inst, s)).min_by(f64::total_cmp);
    Enumeration { optimum, feasible: feasible_schedules.len(), feasible_schedules }
}
