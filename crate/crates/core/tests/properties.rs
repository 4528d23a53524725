use cartan_core::calculus::{conj_h, exterior_d, hbar_coefficient, DerivationTable, Dir, Form, HbarMethod};
use cartan_core::expr::{
    normalize_relation, Coeff, Gen, Ledger, Monomial, Poly, Rational, RationalExpr, Registry, Weight,
};
use proptest::prelude::*;

const INDICES: [i32; 8] = [2, -2, 3, -3, 4, -4, 5, -5];

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn coeff() -> impl Strategy<Value = Coeff> {
    prop::array::uniform4((-5i64..=5, 1i64..=4)).prop_map(|c| Coeff::from_basis(c.map(|(n, d)| q(n, d))))
}

fn rational_coeff() -> impl Strategy<Value = Coeff> {
    (-9i64..=9, 1i64..=6).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| Coeff::frac(n, d))
}

fn monomial(max_index: usize) -> impl Strategy<Value = Monomial> {
    prop::collection::vec((0..max_index, 1u32..=2), 1..=3)
        .prop_map(|v| Monomial::from_pairs(v.into_iter().map(|(i, e)| (Gen::h(INDICES[i]), e))))
}

fn poly(max_index: usize, terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((monomial(max_index), coeff()), 1..=terms).prop_map(Poly::from_terms)
}

fn weight(p: &Poly) -> Weight {
    p.weight(&Registry::new()).unwrap()
}

fn mono_weight(m: &Monomial) -> i64 {
    m.iter().map(|(g, e)| g.h_index().unwrap() as i64 * *e as i64).sum()
}

/// Keeps the terms sharing the weight of the first one.
fn homogeneous(max_index: usize, terms: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((monomial(max_index), rational_coeff()), 1..=terms)
        .prop_map(|v| {
            let w = mono_weight(&v[0].0);
            Poly::from_terms(v.into_iter().filter(|(m, _)| mono_weight(m) == w))
        })
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn table() -> DerivationTable {
    DerivationTable::new(Registry::new())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn conj_is_an_involution(p in poly(8, 6)) {
        prop_assert_eq!(conj_h(&conj_h(&p)), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conj_is_a_ring_map(p in poly(8, 4), r in poly(8, 4)) {
        prop_assert_eq!(conj_h(&p.mul(&r)), conj_h(&p).mul(&conj_h(&r)));
        prop_assert_eq!(conj_h(&(&p + &r)), &conj_h(&p) + &conj_h(&r));
    }

    #[test]
    fn weight_is_additive_and_negated_by_conj(p in homogeneous(8, 4), r in homogeneous(8, 4)) {
        let (Weight::Homogeneous(a), Weight::Homogeneous(b)) = (weight(&p), weight(&r)) else {
            return Err(TestCaseError::fail("generator produced a non-homogeneous input"));
        };
        prop_assert_eq!(weight(&p.mul(&r)), Weight::Homogeneous(a + b));
        prop_assert_eq!(weight(&conj_h(&p)), Weight::Homogeneous(-a));
    }

    #[test]
    fn exact_divide_recovers_factor(p in poly(6, 4), d in poly(6, 3)) {
        prop_assert_eq!(p.mul(&d).exact_div(&d).unwrap(), Some(p));
    }

    #[test]
    fn normalize_is_idempotent_and_scale_invariant(
        p in poly(6, 4),
        c in rational_coeff(),
        e in 0u32..3,
    ) {
        let mut ledger = Ledger::new();
        ledger.assume(&Poly::h(2), "test");
        ledger.assume(&Poly::h(-3), "test");
        let n = normalize_relation(&p, &ledger);
        prop_assert_eq!(normalize_relation(&n, &ledger), n.clone());
        let m = Poly::h(2).pow(e).mul(&Poly::h(-3));
        prop_assert_eq!(normalize_relation(&p.mul(&m).scale(&c), &ledger), n);
    }

    #[test]
    fn derivatives_shift_weight(x in homogeneous(6, 3)) {
        let Weight::Homogeneous(w) = weight(&x) else { unreachable!() };
        let t = table();
        for (dir, shift) in [(Dir::Holo, 1), (Dir::Antiholo, -1)] {
            let d = t.derive(&x, dir).unwrap();
            if !d.is_zero() {
                prop_assert_eq!(t.weight_of(&d).unwrap(), Weight::Homogeneous(w + shift));
            }
        }
    }

    #[test]
    fn dbar_is_conjugate_of_d(x in poly(6, 3)) {
        let t = table();
        let dbar = t.derive(&x, Dir::Antiholo).unwrap();
        let d_conj = t.derive(&conj_h(&x), Dir::Holo).unwrap();
        prop_assert_eq!(dbar.numer().clone(), conj_h(d_conj.numer()));
    }
}

fn one_form(w: i64) -> impl Strategy<Value = Form> {
    // coefficient weights for (ω, ω̄, ρ) making the form homogeneous of weight w
    let pick = |target: i64| {
        prop::collection::vec((monomial(6), rational_coeff()), 1..=3)
            .prop_map(move |v| Poly::from_terms(v.into_iter().filter(|(m, _)| mono_weight(m) == target)))
    };
    (pick(w + 1), pick(w - 1), pick(w)).prop_map(|(a, b, c)| {
        Form::one_form(RationalExpr::from_poly(a), RationalExpr::from_poly(b), RationalExpr::from_poly(c))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn d_squared_vanishes_on_functions(x in homogeneous(6, 3)) {
        let t = table();
        let dd = exterior_d(&exterior_d(&Form::function(x), &t).unwrap(), &t).unwrap();
        prop_assert!(dd.is_zero());
    }

    #[test]
    fn d_squared_vanishes_on_one_forms(f in (-4i64..=4).prop_flat_map(one_form)) {
        let t = table();
        let dd = exterior_d(&exterior_d(&f, &t).unwrap(), &t).unwrap();
        prop_assert!(dd.is_zero());
    }
}

#[test]
fn tower_reduction_is_canonical() {
    let s = &Coeff::zeta8() + &Coeff::zeta8_inv();
    assert_eq!(&s * &s, Coeff::from_i64(2));
    assert_eq!(s, Coeff::sqrt2());
    let z2 = &Coeff::zeta8() * &Coeff::zeta8();
    assert_eq!(z2, Coeff::i());
    assert_eq!(&(&z2 * &z2) * &Coeff::one(), Coeff::from_i64(-1));
    let one_plus_i = &Coeff::one() + &Coeff::i();
    let one_minus_i = &Coeff::one() - &Coeff::i();
    assert_eq!(&one_plus_i * &one_minus_i, Coeff::from_i64(2));
}

#[test]
fn closed_form_matches_recursion() {
    for j in 3..=9 {
        assert_eq!(hbar_coefficient(j, HbarMethod::ClosedForm), hbar_coefficient(j, HbarMethod::Recursion), "j = {j}");
    }
}
