//! Figure datasets as CSV, here the user-count comparison and the rho(m) scan.

use vdmac::cli::{render, Format};
use vdmac::figures::{Fig1, Fig4};

pub fn run() -> usize {
    let fig1 = Fig1 {
        users: vec![100],
        ..Fig1::default()
    }
    .table()
    .unwrap();
    let text = render(&fig1, Format::Csv);
    println!("{}", text.lines().take(12).collect::<Vec<_>>().join("\n"));

    let points = Fig4::default().points().unwrap();
    let below = points.iter().filter(|p| p.s_max <= p.s_max_exhaustive).count();
    println!("figure 4: {below} of {} concatenated points at or below exhaustive decoding", points.len());
    points.len() - below
}

#[allow(dead_code)]
fn main() {
    run();
}
