//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use vdmac::bounds;
use vdmac::channel::InterferenceModel;
use vdmac::codes::LinearCode;
use vdmac::decoders::{Codebook, ConcatenatedCode};
use vdmac::field::Field;
use vdmac::figures::{Fig1, Fig4};
use vdmac::ks::{cover_check, ks_encode, stack, FrameLayout};
use vdmac::optimize::{grid_max, grid_min, Spacing};
use vdmac::simulation::{
    concatenated_bounds, coverage_experiment, exhaustive_bounds, run_concatenated, run_exhaustive, CampaignConfig,
};
use vdmac::BitMatrix;

const MODELS: [InterferenceModel; 2] = [InterferenceModel::IidSubset, InterferenceModel::FullStream];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Wrong decodes seen by every campaign, shared between the dominance and
/// zero-error checks.
#[derive(Default)]
struct Tally {
    exhaustive_trials: u64,
    concatenated_trials: u64,
    wrong: u64,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn golden_example() -> Outcome {
    let start = Instant::now();
    let f = Field::new(7, 1).unwrap();
    let word: Vec<_> = [2, 4, 6, 1, 2, 5].iter().map(|&i| f.element_at(i - 1).unwrap()).collect();
    let c = ks_encode(&f, &word).to_dense();
    let expected: BitMatrix = "000100\n100010\n000000\n010000\n000001\n001000\n000000\n".parse().unwrap();
    let y: BitMatrix = "000101\n111011\n000000\n010100\n000011\n011010\n000000\n".parse().unwrap();
    let block = stack(&ks_encode(&f, &word), FrameLayout::new(7, 1, 6, 7).unwrap()).unwrap();
    let covered = cover_check(&block, &y).unwrap();
    let extra = y.weight() as i64 - c.weight() as i64;
    let elapsed = start.elapsed();
    outcome(
        c == expected && covered && extra == 8 && elapsed.as_secs_f64() < 1.0,
        format!(
            "C matches: {}, Y covers C: {covered}, extra ones: {extra}, {:.1} ms",
            c == expected,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn dominance(tally: &mut Tally) -> Outcome {
    let f = Field::new(7, 1).unwrap();
    let book = Codebook::new(LinearCode::reed_solomon(&f, 6, 2).unwrap()).unwrap();
    // (m, t, Q, S)
    let scenarios = [
        (1, 6, 7, 2),
        (1, 6, 14, 3),
        (1, 6, 28, 5),
        (2, 3, 14, 2),
        (2, 3, 14, 3),
        (2, 3, 28, 5),
        (2, 3, 28, 3),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (i, &(m, t, q_sub, users)) in scenarios.iter().enumerate() {
        let layout = FrameLayout::new(7, m, t, q_sub).unwrap();
        let b = exhaustive_bounds(&book, &layout, users).unwrap();
        for (j, &model) in MODELS.iter().enumerate() {
            let cfg = CampaignConfig {
                users,
                model,
                seed: 1000 + 10 * i as u64 + j as u64,
                trials: 10_000,
                jobs: None,
            };
            let s = run_exhaustive(&book, layout, &cfg).unwrap().summary;
            tally.exhaustive_trials += s.trials;
            tally.wrong += s.wrong;
            let ok = s.within(b.exact, 3.0) && b.exact <= b.loose;
            pass &= ok;
            if !ok {
                lines.push(format!(
                    "m={m} Q={q_sub} S={users} {model}: {:.4} vs {:.4} <= {:.4}",
                    s.failure_rate(),
                    b.exact,
                    b.loose
                ));
            }
        }
    }
    let detail = if lines.is_empty() {
        format!("{} scenarios x 2 models x 1e4 trials within 3 sigma of the union bound", scenarios.len())
    } else {
        lines.join("; ")
    };
    outcome(pass, detail)
}

fn zero_error(tally: &mut Tally) -> Outcome {
    let f7 = Field::new(7, 1).unwrap();
    let f49 = Field::extension(&f7, 2).unwrap();
    let codes = [
        ConcatenatedCode::new(
            LinearCode::reed_solomon(&f7, 4, 2).unwrap(),
            LinearCode::reed_solomon(&f7, 3, 1).unwrap(),
        )
        .unwrap(),
        ConcatenatedCode::new(
            LinearCode::reed_solomon(&f49, 4, 2).unwrap(),
            LinearCode::reed_solomon(&f7, 3, 2).unwrap(),
        )
        .unwrap(),
    ];
    let mut chernoff_ok = true;
    for (i, code) in codes.iter().enumerate() {
        for users in [3, 5] {
            for (j, &model) in MODELS.iter().enumerate() {
                let cfg = CampaignConfig {
                    users,
                    model,
                    seed: 5000 + 100 * i as u64 + 10 * users as u64 + j as u64,
                    trials: 10_000,
                    jobs: None,
                };
                let s = run_concatenated(code, 28, &cfg).unwrap().summary;
                tally.concatenated_trials += s.trials;
                tally.wrong += s.wrong;
                if let Some(p) = concatenated_bounds(code, 28, users).unwrap().chernoff {
                    chernoff_ok &= s.within(p, 3.0);
                }
            }
        }
    }
    let total = tally.exhaustive_trials + tally.concatenated_trials;
    outcome(
        total >= 100_000 && tally.exhaustive_trials > 0 && tally.concatenated_trials > 0 && tally.wrong == 0,
        format!(
            "{total} trials ({} exhaustive, {} concatenated), {} wrong; concatenated failures within Chernoff bound: {chernoff_ok}",
            tally.exhaustive_trials, tally.concatenated_trials, tally.wrong
        ),
    )
}

fn beta_coverage() -> Outcome {
    // (q, m, t, Q, S); the last point has m (S - 1) = 24 of Q = 28
    let points = [
        (7, 1, 6, 7, 3),
        (7, 2, 3, 28, 5),
        (8, 4, 2, 64, 8),
        (16, 16, 1, 256, 10),
        (7, 4, 1, 28, 7),
    ];
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut min_samples = u64::MAX;
    for (i, &(q, m, t, q_sub, users)) in points.iter().enumerate() {
        let layout = FrameLayout::new(q, m, t, q_sub).unwrap();
        let tacts = 200_000_u64.div_ceil(q_sub as u64);
        for (j, &model) in MODELS.iter().enumerate() {
            let c = coverage_experiment(layout, users, model, 77 + 2 * i as u64 + j as u64, tacts).unwrap();
            min_samples = min_samples.min(c.samples);
            worst = worst.max(c.z_score().abs());
            pass &= c.z_score().abs() <= 3.0 && c.samples >= 100_000;
        }
    }
    outcome(
        pass,
        format!("5 points x 2 models, >= {min_samples} samples each, worst |z| = {worst:.2}"),
    )
}

fn fig1_shape() -> Outcome {
    let table = Fig1::default().table().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for users in Fig1::default().users {
        let series = table.filter("series", &format!("S={users}"));
        let rho = series.numbers("rho");
        let ms = series.numbers("m");
        let (best, _) = rho
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &r)| if r > acc.1 { (i, r) } else { acc });
        let interior = best > 0 && best + 1 < rho.len();
        pass &= interior && rho.len() == 64;
        parts.push(format!("S={users}: argmax m={}", ms[best]));
    }
    outcome(pass, parts.join(", "))
}

fn fig4_ordering() -> Outcome {
    let points = Fig4::default().points().unwrap();
    let above = points.iter().filter(|p| p.s_max > p.s_max_exhaustive).count();
    let all_dims = (1..=4).all(|k| points.iter().any(|p| p.k_inner == k));
    outcome(
        above == 0 && all_dims,
        format!("{} points over k_I in 1..=4, {above} above exhaustive", points.len()),
    )
}

/// Brute-force counterparts of the three optimizers, sharing nothing with
/// them but the objective functions.
fn oracle_chernoff(d: f64, m: u64, p: f64) -> f64 {
    if d <= m as f64 * p {
        return 1.0;
    }
    let hi = 100.0 - 4.0 * p.ln();
    grid_min(|s| bounds::chernoff_ln(d, m, p, s), 1e-9, hi, 1_000_000, Spacing::Log, 3)
        .value
        .exp()
}

fn oracle_p_inner(p_r: f64, m: u64, delta: f64) -> f64 {
    let hi = 100.0 - 4.0 * p_r.ln() / m as f64 / delta;
    grid_max(|s| bounds::p_inner_ln(p_r, m, delta, s), 1e-9, hi, 1_000_000, Spacing::Log, 3)
        .value
        .exp()
}

fn oracle_rho_star_inf(q: u64, users: u64, c: f64) -> f64 {
    let hi = 1.0 / q as f64;
    let f = |mu: f64| bounds::rho_inf_lower(q, users, mu, c).unwrap_or(f64::NEG_INFINITY);
    grid_max(f, hi * 1e-12, hi, 1_000_000, Spacing::Log, 3).value
}

fn optimizers() -> Outcome {
    let chernoff_cases = [
        (100.0, 200, 0.1),
        (5.0, 10, 0.2),
        (30.0, 40, 0.01),
        (3.0, 4, 0.3),
        (150.0, 200, 1e-3),
        (20.0, 200, 0.05),
        (60.0, 64, 1e-6),
        (1.0, 2, 0.4),
        (99.5, 200, 0.25),
        (10.0, 1000, 0.001),
    ];
    let p_inner_cases = [
        (1e-10, 200, 0.5),
        (1e-3, 20, 0.25),
        (1e-6, 50, 0.9),
        (1e-10, 200, 0.05),
        (1e-10, 200, 1.0),
        (1e-4, 10, 0.3),
        (1e-12, 1000, 0.1),
        (1e-2, 100, 0.6),
        (1e-8, 64, 0.75),
        (1e-10, 30, 0.4),
    ];
    let rho_cases = [
        (16, 20, 1e-6),
        (64, 100, 1e-6),
        (256, 1000, 1e-6),
        (16, 2, 1e-6),
        (64, 10, 1e-6),
        (4, 50, 1e-3),
        (64, 640, 1e-9),
        (256, 180, 1e-6),
        (16, 13, 1e-4),
        (128, 5000, 1e-6),
    ];
    let mut worst = [0.0f64; 3];
    for &(d, m, p) in &chernoff_cases {
        worst[0] = worst[0].max(rel(bounds::chernoff_p_star(d, m, p).unwrap(), oracle_chernoff(d, m, p)));
    }
    let mut round_trip: f64 = 0.0;
    for &(p_r, m, delta) in &p_inner_cases {
        let p = bounds::p_inner_max(p_r, m, delta).unwrap();
        worst[1] = worst[1].max(rel(p, oracle_p_inner(p_r, m, delta)));
        let back = bounds::chernoff_p_star(delta * m as f64, m, p).unwrap();
        round_trip = round_trip.max(back / p_r);
    }
    for &(q, users, c) in &rho_cases {
        worst[2] = worst[2].max(rel(bounds::rho_star_inf(q, users, c).unwrap().value, oracle_rho_star_inf(q, users, c)));
    }
    outcome(
        worst.iter().all(|&w| w <= 1e-9) && round_trip <= 1.0 + 1e-2,
        format!(
            "max relative error chernoff {:.1e}, p_inner {:.1e}, rho_star_inf {:.1e}; round trip max p*/p_r = {round_trip:.6}",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn erasure_exhaustiveness() -> Outcome {
    let start = Instant::now();
    let f = Field::new(7, 1).unwrap();
    let code = LinearCode::reed_solomon(&f, 6, 2).unwrap();
    let words: Vec<Vec<_>> = code.codewords().unwrap().collect();
    let (mut exact, mut patterns_small, mut failures, mut patterns_five) = (0u64, 0u64, 0u64, 0u64);
    for word in &words {
        for mask in 0u32..64 {
            let erased = mask.count_ones();
            let received: Vec<_> = (0..6)
                .map(|i| (mask >> i & 1 == 0).then_some(word[i]))
                .collect();
            let got = code.erasure_decode(&received).unwrap();
            if erased <= 4 {
                patterns_small += 1;
                exact += u64::from(got.as_deref() == Some(&word[..]));
            } else if erased == 5 {
                let consistent = words
                    .iter()
                    .filter(|w| received.iter().zip(w.iter()).all(|(r, c)| r.is_none_or(|r| r == *c)))
                    .count();
                if consistent >= 2 {
                    patterns_five += 1;
                    failures += u64::from(got.is_none());
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        words.len() == 49
            && exact == patterns_small
            && patterns_five > 0
            && failures == patterns_five
            && elapsed.as_secs_f64() < 10.0,
        format!(
            "{exact}/{patterns_small} patterns of size <= 4 exact, {failures}/{patterns_five} size-5 patterns fail, {:.1} ms",
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn asymptotic_consistency() -> Outcome {
    let mut checked = 0;
    let mut violations = 0;
    let mut switch_mismatch = 0;
    for q in [16u64, 64] {
        let lo = (q as f64 * std::f64::consts::LN_2).ceil() as u64 + 2;
        for users in lo..=10 * q {
            let mh = bounds::mu_hat(users).unwrap();
            checked += 1;
            if bounds::rho_floor(q, users, 1e-6).unwrap() > bounds::rho_inf_lower(q, users, mh, 1e-6).unwrap() {
                violations += 1;
            }
        }
        // μ̂ < 1/q exactly when S exceeds the threshold
        for users in 2..=10 * q {
            let below = bounds::mu_hat(users).unwrap() < 1.0 / q as f64;
            if below != (users as f64 > bounds::mu_hat_threshold(q)) {
                switch_mismatch += 1;
            }
        }
    }
    outcome(
        violations == 0 && switch_mismatch == 0,
        format!("{checked} (q, S) pairs, {violations} floor violations, {switch_mismatch} switchover mismatches"),
    )
}

type Check = Box<dyn FnOnce(&mut Tally) -> Outcome>;

fn main() -> ExitCode {
    let mut tally = Tally::default();
    let checks: Vec<(&str, Check)> = vec![
        ("golden example matrices", Box::new(|_| golden_example())),
        ("union bound dominance", Box::new(dominance)),
        ("zero wrong decodes", Box::new(zero_error)),
        ("beta coverage", Box::new(|_| beta_coverage())),
        ("rho(m) interior maximum", Box::new(|_| fig1_shape())),
        ("concatenated below exhaustive", Box::new(|_| fig4_ordering())),
        ("optimizers vs grid oracle", Box::new(|_| optimizers())),
        ("erasure decoder exhaustiveness", Box::new(|_| erasure_exhaustiveness())),
        ("asymptotic floor and switchover", Box::new(|_| asymptotic_consistency())),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let start = Instant::now();
        let r = check(&mut tally);
        failed += usize::from(!r.pass);
        println!(
            "criterion {}: {} {name} ({}) [{:.2} s]",
            i + 1,
            if r.pass { "PASS" } else { "FAIL" },
            r.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
