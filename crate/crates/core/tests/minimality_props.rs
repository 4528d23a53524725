use cartan_core::expr::{Coeff, Gen, Monomial, Poly, Rational};
use cartan_core::minimality::{certify, defect, CoordinatePoly};
use proptest::prelude::*;

const LAWSON: &str = "-2*x0*x1*x2 + x3*(x1^2 - x2^2)";

fn signed_permutation() -> impl Strategy<Value = [[i64; 4]; 4]> {
    (Just([0usize, 1, 2, 3]).prop_shuffle(), prop::array::uniform4(prop::bool::ANY)).prop_map(|(perm, signs)| {
        let mut m = [[0i64; 4]; 4];
        for k in 0..4 {
            m[k][perm[k]] = if signs[k] { -1 } else { 1 };
        }
        m
    })
}

/// Random homogeneous polynomial of degree `d` in x0..x3 with small integer coefficients.
fn coordinate_poly(d: u32) -> impl Strategy<Value = CoordinatePoly> {
    prop::collection::vec((prop::array::uniform4(0u32..=d), -3i64..=3), 1..=5).prop_filter_map("degree", move |v| {
        let terms = v.into_iter().filter_map(|(e, c)| {
            // clamp exponents onto the simplex of degree d
            let mut e = e;
            let mut total: u32 = e.iter().sum();
            for v in e.iter_mut() {
                while total > d && *v > 0 {
                    *v -= 1;
                    total -= 1;
                }
            }
            e[3] += d - total;
            (c != 0).then(|| {
                (
                    Monomial::from_pairs((0..4).filter(|&k| e[k] > 0).map(|k| (Gen::x(k as u8), e[k]))),
                    Coeff::from_i64(c),
                )
            })
        });
        let p = Poly::from_terms(terms);
        (!p.is_zero()).then(|| CoordinatePoly::new(p).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn certify_is_invariant_under_signed_permutations(m in signed_permutation()) {
        let minimal = ["x3", "x0*x3 - x1*x2", LAWSON];
        for s in minimal {
            let f = CoordinatePoly::parse(s).unwrap().transform(&m);
            prop_assert!(certify(&f).unwrap().passed(), "{} fails after {:?}", s, m);
        }
        for s in ["x0^2 + 2*x1^2 + 3*x2^2", "x0^3 + x1^3 + x2^3"] {
            let f = CoordinatePoly::parse(s).unwrap().transform(&m);
            prop_assert!(!certify(&f).unwrap().passed());
        }
    }

    #[test]
    fn certify_commutes_with_signed_permutations(f in coordinate_poly(3), m in signed_permutation()) {
        prop_assert_eq!(certify(&f).unwrap().passed(), certify(&f.transform(&m)).unwrap().passed());
    }

    #[test]
    fn defect_is_cubic_in_scale(f in coordinate_poly(3), n in -7i64..=7, d in 1i64..=5) {
        prop_assume!(n != 0);
        let c = Rational::new(n.into(), d.into());
        let lhs = defect(&f.scale(&c)).unwrap();
        let rhs = defect(&f).unwrap().scale(&(&c * &c * &c));
        prop_assert_eq!(lhs.poly(), rhs.poly());
        prop_assert_eq!(certify(&f.scale(&c)).unwrap().passed(), certify(&f).unwrap().passed());
    }
}
