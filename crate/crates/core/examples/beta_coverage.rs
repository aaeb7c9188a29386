//! Empirical per-position coverage against 1 - (1 - m/Q)^(S-1).

use vdmac::channel::InterferenceModel;
use vdmac::ks::FrameLayout;
use vdmac::simulation::coverage_experiment;

pub fn run() -> f64 {
    let layout = FrameLayout::new(8, 4, 2, 64).unwrap();
    let mut worst: f64 = 0.0;
    for model in [InterferenceModel::IidSubset, InterferenceModel::FullStream] {
        let c = coverage_experiment(layout, 8, model, 5, 4000).unwrap();
        println!("{model}: {:.5} vs beta {:.5} (z = {:+.2})", c.rate(), c.beta, c.z_score());
        worst = worst.max(c.z_score().abs());
    }
    worst
}

#[allow(dead_code)]
fn main() {
    run();
}
