//! Runs every example so they keep compiling and keep telling the truth.

#[path = "../examples/beta_coverage.rs"]
mod beta_coverage;
#[path = "../examples/bounds_report.rs"]
mod bounds_report;
#[path = "../examples/concatenated_decoding.rs"]
mod concatenated_decoding;
#[path = "../examples/exhaustive_decoding.rs"]
mod exhaustive_decoding;
#[path = "../examples/field_arithmetic.rs"]
mod field_arithmetic;
#[path = "../examples/figure_data.rs"]
mod figure_data;
#[path = "../examples/ks_cover_check.rs"]
mod ks_cover_check;
#[path = "../examples/monte_carlo.rs"]
mod monte_carlo;
#[path = "../examples/optimizers.rs"]
mod optimizers;
#[path = "../examples/or_channel.rs"]
mod or_channel;
#[path = "../examples/reed_solomon_erasures.rs"]
mod reed_solomon_erasures;

#[test]
fn field_order_starts_at_zero_then_powers_of_three() {
    assert_eq!(field_arithmetic::run(), vec![0, 1, 3, 2, 6, 4, 5]);
}

#[test]
fn erasure_example_ends_with_five_erasures() {
    assert_eq!(reed_solomon_erasures::run(), 5);
}

#[test]
fn golden_reception_covers_example_word() {
    assert!(ks_cover_check::run());
}

#[test]
fn interferers_add_ones() {
    assert!(or_channel::run() > 0);
}

#[test]
fn exhaustive_example_never_decodes_wrongly() {
    let (ok, failed) = exhaustive_decoding::run();
    assert_eq!(ok + failed, 20);
}

#[test]
fn flooded_subrange_is_recovered_by_outer_code() {
    assert!(concatenated_decoding::run());
}

#[test]
fn bounds_report_supports_target_users() {
    assert!(bounds_report::run() >= 100);
}

#[test]
fn chernoff_round_trip_lands_on_target() {
    let back = optimizers::run();
    assert!((1e-10 * 0.99..=1e-10 * 1.01).contains(&back), "{back}");
}

#[test]
fn campaign_has_no_wrong_decodes() {
    assert_eq!(monte_carlo::run(), 0);
}

#[test]
fn coverage_matches_beta() {
    assert!(beta_coverage::run() < 4.0);
}

#[test]
fn figure_four_has_no_point_above_exhaustive() {
    assert_eq!(figure_data::run(), 0);
}
