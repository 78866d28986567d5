mod common;

use common::CASES;

#[test]
fn field_axioms() {
    common::field_axioms(CASES).unwrap();
}

#[test]
fn square_count() {
    common::square_count(CASES).unwrap();
}

#[test]
fn reduction_homomorphism() {
    common::reduction_homomorphism(CASES).unwrap();
}

#[test]
fn reflection_preserves_form() {
    common::reflection_preserves_form(CASES).unwrap();
}

#[test]
fn dedekind_degree_sum() {
    common::dedekind_degree_sum(CASES).unwrap();
}

#[test]
fn factored_order_evaluation() {
    common::factored_order_evaluation(CASES).unwrap();
}

#[test]
fn prime_divides_matches_direct() {
    common::prime_divides_matches_direct(10_000).unwrap();
}
