#![allow(dead_code)]

use proptest::prelude::*;
use pworlds_core::rational::Rational;
use pworlds_core::{Distribution, Formula, Signature, Term, WorldSpace};

/// `A`, `B`, `C`.
pub fn props() -> Signature {
    Signature::propositional(["A", "B", "C"]).unwrap()
}

/// `A`, `P/1`, `R/2` over `a`, `b`.
pub fn mixed() -> Signature {
    Signature::new(
        [("A".into(), 0), ("P".into(), 1), ("R".into(), 2)],
        ["a".into(), "b".into()],
    )
    .unwrap()
}

/// Quantifier-free formulas over `A`, `B`, `C`.
pub fn prop_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop_oneof![Just("A"), Just("B"), Just("C")].prop_map(Formula::prop),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

fn term(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    prop_oneof![
        prop::sample::select(vec!["a", "b"]).prop_map(|c| Term::Const(c.into())),
        prop::sample::select(vars.to_vec()).prop_map(|v| Term::Var(v.into())),
    ]
}

/// Formulas over [`mixed`], possibly with quantifiers and free variables
/// among `x`, `y`.
pub fn fo_formula() -> impl Strategy<Value = Formula> {
    const VARS: &[&str] = &["x", "y"];
    let leaf = prop_oneof![
        Just(Formula::prop("A")),
        term(VARS).prop_map(|t| Formula::atom("P", vec![t])),
        (term(VARS), term(VARS)).prop_map(|(s, t)| Formula::atom("R", vec![s, t])),
        Just(Formula::True),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (prop::sample::select(VARS.to_vec()), inner.clone())
                .prop_map(|(v, b)| Formula::forall(v, b)),
            (prop::sample::select(VARS.to_vec()), inner).prop_map(|(v, b)| Formula::exists(v, b)),
        ]
    })
}

/// A distribution over `space` from small integer weights, not all zero.
pub fn distribution_over(space: &WorldSpace) -> impl Strategy<Value = Distribution> {
    let space = space.clone();
    let n = space.world_count();
    prop::collection::vec(0u32..6, n)
        .prop_filter("some positive weight", |w| w.iter().any(|&x| x > 0))
        .prop_map(move |w| from_ints(&space, &w))
}

pub fn from_ints(space: &WorldSpace, w: &[u32]) -> Distribution {
    let total: u32 = w.iter().sum();
    Distribution::from_weights(
        space,
        w.iter()
            .enumerate()
            .map(|(k, &x)| (k, Rational::new(x.into(), total.into()))),
    )
    .unwrap()
}
