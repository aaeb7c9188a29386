//! The Chernoff bound, the largest admissible inner failure rate, and the
//! asymptotic rate maximized over mu.

use vdmac::bounds;

pub fn run() -> f64 {
    let p_hat = bounds::p_inner_max(1e-10, 200, 0.5).unwrap();
    let back = bounds::chernoff_p_star(100.0, 200, p_hat).unwrap();
    println!("p_hat = {p_hat:.6}, Chernoff at p_hat = {back:.3e}");

    for q in [16, 64, 256] {
        let r = bounds::rho_star_inf(q, 1000, 1e-6).unwrap();
        println!(
            "q = {q}: rho* = {:.4} at mu = {:.3e}; mu_hat gives {:.4}; floor {:.4}",
            r.value,
            r.mu,
            r.value_piecewise,
            bounds::rho_floor(q, 1000, 1e-6).unwrap()
        );
    }
    back
}

#[allow(dead_code)]
fn main() {
    run();
}
