//! Separating symmetric (unit box) and asymmetric (general box) quantile cuts.

use quantcut::polyhedral_cuts::{best_asymmetric_cut, separate_asymmetric, separate_symmetric, BoxBounds};
use quantcut::quantile::q_k;

fn main() {
    let x = [0.9, 0.8, 0.3, 0.1, 0.0];
    let k = 2;
    println!("Q_{k}(x) = {}", q_k(&x, k).unwrap());

    // A relaxation that claims y = 0.5 is cut off.
    match separate_symmetric(&x, k, 0.5).unwrap() {
        Some(cut) => println!("symmetric cut on W = {:?}, bound {:.4}", cut.support, cut.bound_at(&x)),
        None => println!("no violated symmetric cut"),
    }

    let bounds = BoxBounds::new(vec![0.0, 1.0, 0.0, 0.0, 2.0], vec![10.0, 6.0, 4.0, 3.0, 5.0]).unwrap();
    let z = [8.0, 5.5, 1.0, 0.5, 2.0];
    println!("Q_{k}(z) = {}, floor L = {}", q_k(&z, k).unwrap(), bounds.floor(k).unwrap());
    let best = best_asymmetric_cut(&z, k, &bounds).unwrap().expect("some upper bound exceeds L");
    println!(
        "best asymmetric cut: W = {:?}, U = {}, bound {:.4}",
        best.support,
        best.threshold,
        best.bound_at(&z)
    );
    let terms: Vec<String> = best
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(i, c)| format!("{c:.4} z{i}"))
        .collect();
    println!("  y >= {} + {:.4}", terms.join(" + "), best.constant);
    println!("violated at y = 4: {}", separate_asymmetric(&z, k, 4.0, &bounds).unwrap().is_some());
}
