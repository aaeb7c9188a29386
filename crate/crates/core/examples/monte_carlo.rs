//! A Monte-Carlo campaign checked against the union bound.

use vdmac::channel::InterferenceModel;
use vdmac::codes::LinearCode;
use vdmac::decoders::Codebook;
use vdmac::field::Field;
use vdmac::ks::FrameLayout;
use vdmac::simulation::{exhaustive_bounds, run_exhaustive, CampaignConfig};

pub fn run() -> u64 {
    let f = Field::new(7, 1).unwrap();
    let book = Codebook::new(LinearCode::reed_solomon(&f, 6, 2).unwrap()).unwrap();
    let layout = FrameLayout::new(7, 2, 3, 28).unwrap();
    let cfg = CampaignConfig {
        users: 5,
        model: InterferenceModel::FullStream,
        seed: 2024,
        trials: 5000,
        jobs: None,
    };
    let report = run_exhaustive(&book, layout, &cfg).unwrap();
    let b = exhaustive_bounds(&book, &layout, cfg.users).unwrap();
    let s = report.summary;
    let (lo, hi) = s.failure_interval();
    println!(
        "{} trials: {} failures ({:.4}, 95% CI [{lo:.4}, {hi:.4}]), {} wrong; bound {:.4} (loose {:.4})",
        s.trials,
        s.failures,
        s.failure_rate(),
        s.wrong,
        b.exact,
        b.loose
    );
    s.wrong
}

#[allow(dead_code)]
fn main() {
    run();
}
