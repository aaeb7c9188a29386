//! Sizing a system: beta, required distance, blocklength, tacts, users.

use vdmac::bounds::{self, SystemParams};
use vdmac::codes::gv_exact_n;

pub fn run() -> u64 {
    let mut p = SystemParams {
        subchannels: 4096,
        q: 64,
        m: 27,
        t: 1,
        users: 100,
        k: 120,
        p_r: 1e-10,
    };
    let beta = p.beta().unwrap();
    let d = bounds::required_d(p.k, p.q, p.p_r, beta).unwrap();
    let n = bounds::closed_form_n(p.k, d, p.q).unwrap();
    p.t = bounds::min_tacts(&p).unwrap();
    let rates = bounds::rates(&p).unwrap();
    let s_max = bounds::s_max_for_code(p.q, n, p.k, d, p.p_r, p.m, p.subchannels).unwrap();
    println!("beta = {beta:.4}, d = {d}, n = {n} (GV exact {}), t = {}", gv_exact_n(p.q, p.k as usize, d as usize).unwrap(), p.t);
    println!("R_i = {:.2} bits/tact, R_sum = {:.1}, rho = {:.4}", rates.per_user, rates.sum, rates.relative);
    println!("this code carries up to S = {s_max} users");
    s_max
}

#[allow(dead_code)]
fn main() {
    run();
}
