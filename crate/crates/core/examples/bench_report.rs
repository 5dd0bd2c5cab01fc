//! A small comparison table across instances and methods.

use quantcut::instance::{generate_synthetic, GeneratorParams};
use quantcut::methods::{report, solve_method, Method, MethodConfig};

fn main() {
    let methods = [Method::Full, Method::FullS, Method::CGen, Method::CGenO];
    let mut names = Vec::new();
    let mut results = Vec::new();
    for seed in 0..4 {
        let params = GeneratorParams { interventions: 5, horizon: 4, ..GeneratorParams::default() };
        let inst = generate_synthetic(&params, seed).instance;
        let name = format!("synthetic-{seed}");
        for &m in &methods {
            let r = solve_method(&inst, &MethodConfig::new(m)).map_err(|e| e.to_string());
            results.push((name.clone(), m, r));
        }
        names.push(name);
    }
    let table = report(&names, &methods, &results);
    print!("{}", table.to_markdown());
    println!();
    print!("{}", table.to_csv());
}
