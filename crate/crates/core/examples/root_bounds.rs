//! How much the root LP bound moves with subset cuts and with the asymmetric
//! cut loop.

use quantcut::instance::{generate_synthetic, GeneratorParams};
use quantcut::methods::{add_root_subset_cuts, build_full, risk_upper_bounds, root_bound, run_quantile_cut_loop};
use quantcut::mip::BigMVariant;

fn main() {
    let variant = BigMVariant::Activate;
    for seed in 0..5 {
        let params = GeneratorParams { interventions: 6, horizon: 4, max_scenarios: 8, ..GeneratorParams::default() };
        let inst = generate_synthetic(&params, seed).instance;
        let full = build_full(&inst).unwrap();
        let base = root_bound(&full, variant).unwrap();

        let mut with_subsets = full.clone();
        let added = add_root_subset_cuts(&mut with_subsets).unwrap();
        let subsets = root_bound(&with_subsets, variant).unwrap();

        let mut with_loop = full.clone();
        let report = run_quantile_cut_loop(&mut with_loop, &risk_upper_bounds(&inst), 20, variant).unwrap();
        let looped = root_bound(&with_loop, variant).unwrap();

        println!(
            "seed {seed}: full {base:.4} | +{added} subset cuts {subsets:.4} | {} rounds, {} cuts {looped:.4}",
            report.rounds, report.cuts
        );
    }
}
