//! RS(6,2) over GF(7): weight distribution and erasure decoding.

use vdmac::codes::LinearCode;
use vdmac::field::Field;

pub fn run() -> usize {
    let f = Field::new(7, 1).unwrap();
    let code = LinearCode::reed_solomon(&f, 6, 2).unwrap();
    let wd = code.weight_distribution().unwrap();
    println!("RS(6,2): d = {}, A(W) = {:?}", code.d(), wd.counts());

    let msg = [f.element(3).unwrap(), f.element(5).unwrap()];
    let word = code.encode(&msg).unwrap();
    let mut received: Vec<_> = word.iter().copied().map(Some).collect();
    for p in [0, 2, 3, 5] {
        received[p] = None;
    }
    let decoded = code.erasure_decode(&received).unwrap();
    println!("4 erasures: {:?}", decoded.as_ref().map(|w| w == &word));
    received[1] = None;
    println!("5 erasures: {:?}", code.erasure_decode(&received).unwrap());
    received.iter().filter(|s| s.is_none()).count()
}

#[allow(dead_code)]
fn main() {
    run();
}
