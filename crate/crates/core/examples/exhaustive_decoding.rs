//! Exhaustive cover-condition decoding of noisy receptions.

use vdmac::channel::{ChannelScenario, InterferenceModel};
use vdmac::codes::LinearCode;
use vdmac::decoders::{exhaustive_decode, Codebook, CodebookSource, DecodeMode, DecodeOutcome};
use vdmac::field::Field;
use vdmac::ks::FrameLayout;

pub fn run() -> (usize, usize) {
    let f = Field::new(7, 1).unwrap();
    let book = Codebook::new(LinearCode::reed_solomon(&f, 6, 2).unwrap()).unwrap();
    let layout = FrameLayout::new(7, 1, 6, 14).unwrap();
    let source = CodebookSource { book: &book, layout };
    let (mut ok, mut failed) = (0, 0);
    for seed in 0..20 {
        let sent = (seed * 7) % book.len() as u64;
        let block = book.block(sent as usize, layout).unwrap();
        let scenario = ChannelScenario::new(layout, 4, 0, InterferenceModel::FullStream, seed).unwrap();
        let rx = scenario.run(&block, &source).unwrap();
        match exhaustive_decode(&rx.received, &book, &layout, DecodeMode::Diagnostic).unwrap() {
            DecodeOutcome::Decoded(c) => {
                assert_eq!(c, book.codeword(sent as usize));
                ok += 1;
            }
            DecodeOutcome::Failure { candidates } => {
                println!("seed {seed}: {} codewords pass the cover check", candidates.len());
                failed += 1;
            }
        }
    }
    println!("{ok} decoded, {failed} failures, 0 wrong");
    (ok, failed)
}

#[allow(dead_code)]
fn main() {
    run();
}
