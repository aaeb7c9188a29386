//! One-dimensional maximization: a coarse scan to find the peak's
//! neighbourhood, then golden-section search inside it.
//!
//! [`grid_max`] is the brute-force counterpart used to check the optimizer.

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// Geometric spacing; needs `lo > 0`.
    Log,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn better(a: Optimum, b: Optimum) -> Optimum {
    // NaN loses; ties keep the earlier (smaller x) candidate
    if b.value > a.value || a.value.is_nan() {
        b
    } else {
        a
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Stops once the bracket is narrower than `tol · max(1, |x|)`. The bracket
/// endpoints are also evaluated so a maximum on the boundary is not lost.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Optimum {
    assert!(lo <= hi, "empty bracket [{lo}, {hi}]");
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol * a.abs().max(b.abs()).max(1.0) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [
        Optimum { x: lo, value: f(lo) },
        Optimum { x: c, value: fc },
        Optimum { x: mid, value: f(mid) },
        Optimum { x: d, value: fd },
        Optimum { x: hi, value: f(hi) },
    ]
    .into_iter()
    .reduce(better)
    .expect("nonempty")
}

fn grid_point(lo: f64, hi: f64, i: usize, points: usize, spacing: Spacing) -> f64 {
    if i + 1 == points {
        return hi;
    }
    let frac = i as f64 / (points - 1) as f64;
    match spacing {
        Spacing::Linear => lo + (hi - lo) * frac,
        Spacing::Log => (lo.ln() + (hi.ln() - lo.ln()) * frac).exp(),
    }
}

/// Best point of a `points`-point grid on `[lo, hi]` together with its grid
/// neighbours, which bracket the maximum of a unimodal function.
fn scan(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize, spacing: Spacing) -> (f64, f64, Optimum) {
    assert!(points >= 3, "scan needs at least 3 points");
    if spacing == Spacing::Log {
        assert!(lo > 0.0, "log spacing needs lo > 0");
    }
    let mut best = (0, Optimum { x: lo, value: f(lo) });
    for i in 1..points {
        let x = grid_point(lo, hi, i, points, spacing);
        let cand = Optimum { x, value: f(x) };
        if better(best.1, cand) != best.1 {
            best = (i, cand);
        }
    }
    let i = best.0;
    let left = grid_point(lo, hi, i.saturating_sub(1), points, spacing);
    let right = grid_point(lo, hi, (i + 1).min(points - 1), points, spacing);
    (left, right, best.1)
}

/// Scans `points` grid points, then refines the bracket around the best one
/// by golden section to tolerance `tol`.
pub fn maximize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, spacing: Spacing, tol: f64) -> Optimum {
    let (left, right, coarse) = scan(&f, lo, hi, points, spacing);
    better(coarse, golden_section_max(&f, left, right, tol))
}

pub fn minimize<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, spacing: Spacing, tol: f64) -> Optimum {
    let opt = maximize(|x| -f(x), lo, hi, points, spacing, tol);
    Optimum {
        x: opt.x,
        value: -opt.value,
    }
}

/// Brute-force maximum: a `points`-point grid on `[lo, hi]`, then `levels`
/// further grids of the same size on the neighbourhood of the previous best.
/// No unimodality is assumed within the first grid.
pub fn grid_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, spacing: Spacing, levels: usize) -> Optimum {
    let (mut left, mut right, mut best) = scan(&f, lo, hi, points, spacing);
    for _ in 0..levels {
        let (l, r, b) = scan(&f, left, right, points, Spacing::Linear);
        best = better(best, b);
        (left, right) = (l, r);
    }
    best
}

pub fn grid_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize, spacing: Spacing, levels: usize) -> Optimum {
    let opt = grid_max(|x| -f(x), lo, hi, points, spacing, levels);
    Optimum {
        x: opt.x,
        value: -opt.value,
    }
}
