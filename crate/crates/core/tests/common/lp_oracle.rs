use quantcut::lp::{LinearProgram, Relation};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Optimum of a box-bounded LP by enumerating every basic point. `None` when
/// the LP is infeasible.
pub fn vertex_enumeration_optimum(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    let mut equalities: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut inequalities: Vec<(Vec<f64>, f64)> = Vec::new();
    for row in &lp.constraints {
        let neg: Vec<f64> = row.coefficients.iter().map(|v| -v).collect();
        match row.relation {
            Relation::Le => inequalities.push((row.coefficients.clone(), row.rhs)),
            Relation::Ge => inequalities.push((neg, -row.rhs)),
            Relation::Eq => equalities.push((row.coefficients.clone(), row.rhs)),
        }
    }
    for j in 0..n {
        assert!(lp.lower[j].is_finite() && lp.upper[j].is_finite(), "oracle needs a bounded box");
        let mut unit = vec![0.0; n];
        unit[j] = 1.0;
        inequalities.push((unit.clone(), lp.upper[j]));
        unit[j] = -1.0;
        inequalities.push((unit, -lp.lower[j]));
    }
    if equalities.len() > n {
        return None;
    }
    let pick = n - equalities.len();
    let mut best: Option<f64> = None;
    let mut chosen: Vec<usize> = (0..pick).collect();
    let total = inequalities.len();
    loop {
        let mut system: Vec<(Vec<f64>, f64)> = equalities.clone();
        system.extend(chosen.iter().map(|&i| inequalities[i].clone()));
        if let Some(x) = solve_square(system) {
            let feasible = inequalities
                .iter()
                .all(|(a, b)| dot(a, &x) <= b + 1e-9)
                && equalities.iter().all(|(a, b)| (dot(a, &x) - b).abs() <= 1e-9);
            if feasible {
                let value = dot(&lp.objective, &x);
                best = Some(best.map_or(value, |b: f64| b.min(value)));
            }
        }
        // next combination
        let Some(pos) = (0..pick).rev().find(|&p| chosen[p] < total - pick + p) else {
            break;
        };
        chosen[pos] += 1;
        for q in pos + 1..pick {
            chosen[q] = chosen[q - 1] + 1;
        }
    }
    best
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut system: Vec<(Vec<f64>, f64)>) -> Option<Vec<f64>> {
    let n = system.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| system[a].0[col].abs().total_cmp(&system[b].0[col].abs()))?;
        if system[pivot].0[col].abs() < 1e-9 {
            return None;
        }
        system.swap(col, pivot);
        let (head, tail) = system.split_at_mut(col + 1);
        let (prow, prhs) = (&head[col].0, head[col].1);
        for (row, rhs) in tail.iter_mut() {
            let f = row[col] / prow[col];
            if f != 0.0 {
                for c in col..n {
                    row[c] -= f * prow[c];
                }
                *rhs -= f * prhs;
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| system[r].0[c] * x[c]).sum();
        x[r] = (system[r].1 - s) / system[r].0[r];
    }
    Some(x)
}

/// Random box-bounded LP with at most `max_vars` variables. Rows are built
/// around an interior point, so most instances are feasible; a few get an
/// infeasible extra row.
pub fn random_lp(rng: &mut ChaCha8Rng, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(0..=max_rows);
    let mut lp = LinearProgram::new(n);
    let mut point = Vec::with_capacity(n);
    for j in 0..n {
        let l = rng.random_range(-3..=1) as f64;
        let u = l + rng.random_range(0..=5) as f64;
        lp.lower[j] = l;
        lp.upper[j] = u;
        lp.objective[j] = rng.random_range(-5..=5) as f64;
        point.push(l + (u - l) * rng.random_range(0..=4) as f64 / 4.0);
    }
    let mut equalities = 0;
    for _ in 0..m {
        let coefficients: Vec<f64> = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        let at_point = dot(&coefficients, &point);
        let slack = rng.random_range(0..=3) as f64;
        let (relation, rhs) = match rng.random_range(0..5) {
            0 if equalities < n / 2 => {
                equalities += 1;
                (Relation::Eq, at_point)
            }
            1 | 2 => (Relation::Ge, at_point - slack),
            _ => (Relation::Le, at_point + slack),
        };
        lp.add_constraint(coefficients, relation, rhs);
    }
    if rng.random_range(0..10) == 0 {
        // sum of variables above the box's maximum
        let total_upper: f64 = lp.upper.iter().sum();
        lp.add_constraint(vec![1.0; n], Relation::Ge, total_upper + 1.0);
    }
    lp
}
