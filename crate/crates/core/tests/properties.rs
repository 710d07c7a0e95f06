mod common;

use chart2text::eval::levenshtein;
use proptest::prelude::*;

fn ok(check: common::Check) {
    if let Err(e) = check {
        panic!("{e}");
    }
}

#[test]
fn levenshtein_agrees_with_dp_oracle() {
    ok(common::levenshtein_matches_dp(1000, 17));
}

#[test]
fn match_thresholds_are_inclusive() {
    ok(common::match_boundaries());
}

#[test]
fn ap_equals_enumerated_pr_area() {
    ok(common::ap_fixtures());
}

#[test]
fn otsu_level_maximizes_between_class_variance() {
    ok(common::otsu_matches_exhaustive(&common::otsu_test_images()));
}

#[test]
fn ransac_survives_a_fifth_outliers() {
    ok(common::ransac_recovers_circles(25));
}

#[test]
fn deskew_handles_diagonal_and_vertical_text() {
    ok(common::deskew_realigns());
}

#[test]
fn pie_shares_total_one_hundred() {
    ok(common::pie_shares_sum(0..12));
}

#[test]
fn stack_segments_add_up_to_their_bar() {
    ok(common::stack_sums(0..6));
}

#[test]
fn rendered_text_reads_back_exactly() {
    let specs = chart2text::ChartType::ALL.into_iter().flat_map(|t| (0..3).map(move |s| (t, s)));
    ok(common::ocr_exact(specs));
}

proptest! {
    #[test]
    fn levenshtein_is_a_metric(a in "[ab1 ]{0,8}", b in "[ab1 ]{0,8}", c in "[ab1 ]{0,8}") {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
        prop_assert!(levenshtein(&a, &b) <= a.chars().count().max(b.chars().count()));
    }
}
