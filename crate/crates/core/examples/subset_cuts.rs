//! Subset constraints on a scenario matrix, for binary and fractional points.

use quantcut::polyhedral_cuts::BoxBounds;
use quantcut::quantile::q_k;
use quantcut::subset_cuts::{
    general_subset_cut, generated_subset_cut, per_column_subsets, separate_general_exhaustive,
    separate_subset_exhaustive, simple_generated_cut, ScenarioMatrix,
};

fn main() {
    // rows are scenarios, columns are (intervention, start) decisions
    let a = ScenarioMatrix::from_rows(&[
        vec![3.0, 0.0, 2.0, 1.0],
        vec![1.0, 4.0, 2.0, 0.0],
        vec![2.0, 1.0, 0.0, 3.0],
        vec![0.5, 0.5, 1.0, 1.0],
    ])
    .unwrap();
    let k = 2;
    let incumbent = [1.0, 0.0, 1.0, 0.0];
    println!("Q_{k}(A x~) = {}", q_k(&a.apply(&incumbent), k).unwrap());

    let simple = simple_generated_cut(&a, k, &incumbent).unwrap();
    let generated = generated_subset_cut(&a, k, &incumbent).unwrap();
    println!("simple cut:    coefficients {:?}, constant {}", simple.coefficients, simple.constant);
    println!("generated cut: P = {:?}, coefficients {:?}, constant {}", generated.scenarios.as_ref().unwrap(), generated.coefficients, generated.constant);

    let other = [0.0, 1.0, 0.0, 1.0];
    println!(
        "at another schedule: Q_k = {}, simple {}, generated {}",
        q_k(&a.apply(&other), k).unwrap(),
        simple.rhs_at(&other),
        generated.rhs_at(&other)
    );

    println!("{} per-column cuts at the root", per_column_subsets(&a, k).unwrap().len());

    let fractional = [0.5, 0.5, 1.0, 0.0];
    let subset = separate_subset_exhaustive(&a, k, &fractional).unwrap();
    let general = separate_general_exhaustive(&a, k, &fractional, 6).unwrap();
    println!("best subset cut at x* = {:?}: {:.3}", fractional, subset.rhs_at(&fractional));
    println!("best general cut at x*: {:.3}, beta {:?}", general.rhs_at(&fractional), general.beta.as_ref().unwrap());

    let manual = general_subset_cut(&a, k, &[0, 1], &[0.5, 0.5, 1.0, 0.0], &BoxBounds::unit(4)).unwrap();
    println!("hand-picked beta: {:.3}", manual.rhs_at(&fractional));
}
