//! Concatenated code: RS(4,2) outer over GF(49), RS(3,2) inner over GF(7).
//! Each subrange is decoded on its own; the outer code fills erasures.

use vdmac::codes::LinearCode;
use vdmac::decoders::ConcatenatedCode;
use vdmac::field::Field;
use vdmac::ks::{ks_encode, stack};
use vdmac::Gf;

pub fn run() -> bool {
    let f7 = Field::new(7, 1).unwrap();
    let f49 = Field::extension(&f7, 2).unwrap();
    let code = ConcatenatedCode::new(
        LinearCode::reed_solomon(&f49, 4, 2).unwrap(),
        LinearCode::reed_solomon(&f7, 3, 2).unwrap(),
    )
    .unwrap();
    println!("n = {}, k = {}, d >= {}", code.n(), code.k(), code.designed_distance());

    let word = code.encode_base(&[Gf(1), Gf(2), Gf(3), Gf(4)]).unwrap();
    let layout = code.layout(28).unwrap();
    let mut y = stack(&ks_encode(&f7, &word), layout).unwrap().to_dense();
    // flood subrange 1 so its inner block is ambiguous
    for r in 7..14 {
        for c in 0..3 {
            y.set(r, c, true);
        }
    }
    let inner = code.inner_decode_all(&y, &layout).unwrap();
    println!("inner results: {:?}", inner);
    let out = code.decode(&y, &layout).unwrap();
    println!("decoded: {}", out.codeword() == Some(&word[..]));
    out.is_decoded()
}

#[allow(dead_code)]
fn main() {
    run();
}
