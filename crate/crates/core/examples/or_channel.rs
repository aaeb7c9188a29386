//! One transmission over the OR channel with per-tact permutations.

use vdmac::channel::{ChannelScenario, InterferenceModel, RandomSymbols};
use vdmac::codes::LinearCode;
use vdmac::field::Field;
use vdmac::ks::{ks_encode, stack, FrameLayout};

pub fn run() -> usize {
    let f = Field::new(7, 1).unwrap();
    let code = LinearCode::reed_solomon(&f, 6, 2).unwrap();
    let word = code.encode(&[f.element(1).unwrap(), f.element(4).unwrap()]).unwrap();
    let layout = FrameLayout::new(7, 2, 3, 28).unwrap();
    let block = stack(&ks_encode(&f, &word), layout).unwrap();

    let mut extra = 0;
    for model in [InterferenceModel::IidSubset, InterferenceModel::FullStream] {
        let scenario = ChannelScenario::new(layout, 5, 0, model, 42).unwrap();
        let rx = scenario.run(&block, &RandomSymbols(layout)).unwrap();
        let added = rx.received.weight() - block.to_dense().weight();
        println!("{model}: received\n{}{added} ones added by 4 interferers", rx.received);
        extra += added;
    }
    extra
}

#[allow(dead_code)]
fn main() {
    run();
}
