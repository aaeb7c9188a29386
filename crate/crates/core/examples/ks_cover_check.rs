//! One-hot (Kautz-Singleton) matrices, subrange stacking and the cover
//! condition, on the 7x6 example word.

use vdmac::field::Field;
use vdmac::ks::{cover_check, ks_encode, stack, FrameLayout};
use vdmac::BitMatrix;

pub fn run() -> bool {
    let f = Field::new(7, 1).unwrap();
    let alpha = |i: usize| f.element_at(i - 1).unwrap();
    let word: Vec<_> = [2, 4, 6, 1, 2, 5].iter().map(|&i| alpha(i)).collect();
    let ks = ks_encode(&f, &word);
    print!("C =\n{}", ks.to_dense());

    let y: BitMatrix = "000101\n111011\n000000\n010100\n000011\n011010\n000000\n".parse().unwrap();
    let block = stack(&ks, FrameLayout::new(7, 1, 6, 7).unwrap()).unwrap();
    let covered = cover_check(&block, &y).unwrap();
    println!("Y covers C: {covered}, extra ones: {}", y.weight() - ks.to_dense().weight());

    let two = stack(&ks, FrameLayout::new(7, 2, 3, 14).unwrap()).unwrap();
    print!("stacked as m=2, t=3:\n{}", two.to_dense());
    covered
}

#[allow(dead_code)]
fn main() {
    run();
}
