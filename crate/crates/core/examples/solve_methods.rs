//! Every solution method on one generated instance.

use quantcut::instance::{generate_synthetic, GeneratorParams};
use quantcut::methods::{solve_method, Method, MethodConfig};

fn main() {
    let params = GeneratorParams { interventions: 6, horizon: 5, max_scenarios: 6, ..GeneratorParams::default() };
    let inst = generate_synthetic(&params, 21).instance;

    for method in Method::ALL {
        let result = solve_method(&inst, &MethodConfig::new(method)).unwrap();
        let objective = result.breakdown.as_ref().map_or(f64::NAN, |b| b.blended);
        let cuts: usize = result.cuts.values().sum();
        println!(
            "{:<8} {:?} objective {objective:.4} root {:.4} nodes {:>4} cuts {:>4} rejected {:>3}",
            method.as_str(),
            result.status,
            result.root_bound,
            result.nodes,
            cuts,
            result.rejected_incumbents
        );
    }

    let best = solve_method(&inst, &MethodConfig::new(Method::CGenS)).unwrap();
    print!("schedule:\n{}", best.schedule.unwrap().to_text());
}
