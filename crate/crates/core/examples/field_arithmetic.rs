//! Prime and extension fields: canonical element order, table-free towers.

use vdmac::field::Field;
use vdmac::Gf;

pub fn run() -> Vec<u32> {
    let f7 = Field::new(7, 1).unwrap();
    let order: Vec<u32> = f7.canonical_elements().map(Gf::value).collect();
    println!("GF(7) canonical order (alpha_1 .. alpha_7): {order:?}");

    let f64_ = Field::new(2, 6).unwrap();
    let x = f64_.primitive();
    println!("GF(64) modulus coefficients: {:?}", f64_.modulus().iter().map(|c| c.0).collect::<Vec<_>>());
    println!("x^63 = {:?}, x^-1 = {:?}", f64_.pow(x, 63), f64_.inv(x).unwrap());

    // GF(64^2) built over GF(64); elements are pairs of GF(64) digits
    let f4096 = Field::extension(&f64_, 2).unwrap();
    let a = f4096.element(1234).unwrap();
    let digits = f4096.to_base_digits(a);
    println!("GF(4096) element 1234 has GF(64) coordinates {:?}", digits.iter().map(|d| d.0).collect::<Vec<_>>());
    assert_eq!(f4096.from_base_digits(&digits).unwrap(), a);
    order
}

#[allow(dead_code)]
fn main() {
    run();
}
