//! Indicator rows for `y >= Q_k(x)`, their big-M rewrite, and LP-format output.

use quantcut::lp::Relation;
use quantcut::mip::{export_lp_format, import_lp_format, solve_mip, to_bigm, BigMVariant, MipConfig, Model, NoCallbacks};

fn main() {
    let x = [3.0, 8.0, 5.0, 1.0];
    let k = 2;
    let n = x.len();

    let mut m = Model::new();
    let y = m.add_continuous("y", 0.0, f64::INFINITY).unwrap();
    let xs: Vec<usize> = x.iter().enumerate().map(|(i, &v)| m.add_continuous(&format!("x_{i}"), v, v).unwrap()).collect();
    let guards: Vec<usize> = (0..n).map(|i| m.add_binary(&format!("k_{i}")).unwrap()).collect();
    for i in 0..n {
        m.add_indicator(&format!("q_{i}"), guards[i], true, vec![(y, 1.0), (xs[i], -1.0)], Relation::Ge, 0.0).unwrap();
    }
    // n - k + 1 guards active: y covers all but the k - 1 largest entries
    m.add_constraint("card", guards.iter().map(|&g| (g, 1.0)).collect(), Relation::Eq, (n - k + 1) as f64).unwrap();
    m.set_objective(vec![(y, 1.0)], 0.0).unwrap();

    println!("--- indicator form ---\n{}", export_lp_format(&m).unwrap());
    for variant in [BigMVariant::Activate, BigMVariant::Deactivate] {
        let bigm = to_bigm(&m, variant).unwrap();
        let sol = solve_mip(&bigm, &MipConfig::default(), &mut NoCallbacks).unwrap();
        println!("{variant:?}: min y = {}", sol.objective.unwrap());
    }

    let text = export_lp_format(&to_bigm(&m, BigMVariant::Deactivate).unwrap()).unwrap();
    println!("--- deactivate big-M form ---\n{text}");
    let back = import_lp_format(&text).unwrap();
    assert_eq!(export_lp_format(&back).unwrap(), text);
}
