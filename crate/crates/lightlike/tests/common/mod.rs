#![allow(dead_code)]

use lightlike::{DifferentialForm, Expr};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![(-2.0..2.0f64).prop_map(Expr::constant), (1..=3usize).prop_map(Expr::coord)]
}

/// Expressions over `x1..x3` without singular loci on `[-1, 1]^3`.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(|a| -a),
            (inner.clone(), 2..4i32).prop_map(|(a, n)| a.powi(n)),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| (a * Expr::constant(0.3)).exp()),
            inner.clone().prop_map(|a| (a * Expr::constant(0.3)).sinh()),
            inner.prop_map(|a| (a * Expr::constant(0.3)).cosh()),
        ]
    })
}

const TUPLES: [&[&[usize]]; 4] = [&[&[]], &[&[1], &[2], &[3]], &[&[1, 2], &[1, 3], &[2, 3]], &[&[1, 2, 3]]];

/// A `degree`-form on `R^3` with random coefficients.
pub fn arb_form(degree: usize) -> impl Strategy<Value = DifferentialForm> {
    let tuples = TUPLES[degree];
    prop::collection::vec(arb_expr(), tuples.len())
        .prop_map(move |cs| DifferentialForm::from_terms(3, degree, tuples.iter().map(|t| t.to_vec()).zip(cs)).unwrap())
}

pub fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Largest coefficient gap between two forms at `p`, relative to their size.
pub fn form_gap(a: &DifferentialForm, b: &DifferentialForm, p: &[f64]) -> f64 {
    let scale = a.max_abs(p).unwrap().max(b.max_abs(p).unwrap()).max(1.0);
    a.sub(b).unwrap().max_abs(p).unwrap() / scale
}
