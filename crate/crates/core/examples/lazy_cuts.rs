//! Branch and bound with a lazy constraint callback.
//!
//! `y` must cover the second largest of three weighted sums, but the model
//! only learns that through cuts returned for rejected incumbents.

use quantcut::cut::CutFamily;
use quantcut::lp::Relation;
use quantcut::mip::{solve_mip, Cut, MipConfig, Model, SolveCallbacks};
use quantcut::quantile::q_k;
use quantcut::subset_cuts::{generated_subset_cut, ScenarioMatrix};

struct QuantileOracle {
    a: ScenarioMatrix,
    k: usize,
    y: usize,
}

impl SolveCallbacks for QuantileOracle {
    fn on_incumbent(&mut self, values: &[f64]) -> Vec<Cut> {
        let x: Vec<f64> = values[..self.a.cols()].iter().map(|v| v.round()).collect();
        let q = q_k(&self.a.apply(&x), self.k).unwrap();
        if values[self.y] >= q - 1e-9 {
            return Vec::new();
        }
        let cut = generated_subset_cut(&self.a, self.k, &x).unwrap();
        // y - sum_j c_j x_j >= constant
        let mut terms = vec![(self.y, 1.0)];
        terms.extend(cut.coefficients.iter().enumerate().map(|(j, &c)| (j, -c)));
        vec![Cut { family: CutFamily::GeneratedSubset, terms, rhs: cut.constant }]
    }
}

fn main() {
    let a = ScenarioMatrix::from_rows(&[vec![4.0, 1.0, 3.0], vec![2.0, 5.0, 1.0], vec![1.0, 2.0, 4.0]]).unwrap();
    let mut m = Model::new();
    let xs: Vec<usize> = (0..3).map(|j| m.add_binary(&format!("x{j}")).unwrap()).collect();
    let y = m.add_continuous("y", 0.0, 100.0).unwrap();
    m.add_constraint("pick_two", xs.iter().map(|&j| (j, 1.0)).collect(), Relation::Eq, 2.0).unwrap();
    m.set_objective(vec![(y, 1.0)], 0.0).unwrap();

    let mut oracle = QuantileOracle { a, k: 2, y };
    let sol = solve_mip(&m, &MipConfig::default(), &mut oracle).unwrap();
    let values = sol.values.unwrap();
    println!("status {:?}, objective {}", sol.status, sol.objective.unwrap());
    println!("x = {:?}", &values[..3]);
    println!("{} nodes, {} incumbents rejected, {} cuts", sol.nodes, sol.rejected_incumbents, sol.cuts.len());
}
