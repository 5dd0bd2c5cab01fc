//! Order statistics, the τ-to-k mapping, and why the quantile is not convex.

use quantcut::quantile::{q_k, tau_to_k, top_k_indices};

fn main() {
    let risks = [4.0, 9.5, 1.0, 7.25, 7.25, 3.0];
    for k in 1..=risks.len() {
        println!("Q_{k} = {}", q_k(&risks, k).unwrap());
    }

    // The 0.8-quantile of 6 scenarios is the 5th smallest, i.e. the 2nd largest.
    let k = tau_to_k(risks.len(), 0.8).unwrap();
    println!("tau = 0.8 over {} scenarios -> k = {k}, value {}", risks.len(), q_k(&risks, k).unwrap());
    println!("scenarios attaining the top {k}: {:?}", top_k_indices(&risks, k));

    let a = [2.0, 0.0, 0.0, 0.0];
    let b = [0.0, 2.0, 0.0, 0.0];
    let mid: Vec<f64> = a.iter().zip(&b).map(|(u, v)| (u + v) / 2.0).collect();
    println!(
        "Q_2 at the endpoints: {} and {}, at the midpoint: {}",
        q_k(&a, 2).unwrap(),
        q_k(&b, 2).unwrap(),
        q_k(&mid, 2).unwrap()
    );
}
