//! Generate an instance with a planted feasible schedule, then validate,
//! serialize and score it.

use quantcut::instance::{check_feasibility, evaluate, generate_synthetic, parse_instance, to_document, validate, GeneratorParams};

fn main() {
    let params = GeneratorParams { interventions: 5, horizon: 6, max_scenarios: 8, exclusions: 2, ..GeneratorParams::default() };
    let synthetic = generate_synthetic(&params, 7);
    let inst = &synthetic.instance;
    println!("{} interventions, horizon {}, scenarios per step {:?}", inst.interventions.len(), inst.horizon, inst.scenario_counts);
    println!("validation issues: {}", validate(inst).issues.len());

    let text = to_document(inst);
    let reread = parse_instance(&text).unwrap();
    assert_eq!(&reread, inst);
    println!("document is {} bytes", text.len());

    print!("planted schedule:\n{}", synthetic.planted.to_text());
    println!("violations: {:?}", check_feasibility(inst, &synthetic.planted).unwrap());
    let b = evaluate(inst, &synthetic.planted).unwrap();
    println!("obj1 {:.4}, obj2 {:.4}, blended {:.4}", b.obj1, b.obj2, b.blended);
    for t in 0..inst.horizon {
        println!("  t={} mean {:.3} quantile {:.3} excess {:.3}", t + 1, b.mean[t], b.quantile[t], b.excess[t]);
    }
}
