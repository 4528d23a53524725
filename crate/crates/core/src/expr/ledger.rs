//! The nonvanishing-assumption ledger and canonical relation normalization.

use serde::Serialize;

use super::gen::Gen;
use super::poly::{Monomial, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Assumption {
    pub factor: String,
    pub reason: String,
}

/// Quantities declared nonvanishing, each with a justification. Monomial factors
/// are split into their generators on insertion.
#[derive(Clone, Debug, Default)]
pub struct Ledger {
    gens: Vec<Gen>,
    polys: Vec<Poly>,
    log: Vec<Assumption>,
}

impl Ledger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `p` nonvanishing. Returns false if it was already implied.
    pub fn assume(&mut self, p: &Poly, reason: &str) -> bool {
        if p.is_zero() {
            panic!("cannot assume the zero polynomial is nonvanishing");
        }
        if self.is_nonvanishing(p) {
            return false;
        }
        let mono = p.monomial_content();
        for &(g, _) in mono.iter() {
            if !self.gens.contains(&g) {
                self.gens.push(g);
            }
        }
        let rest = p.div_monomial(&mono).expect("content divides");
        if !rest.is_constant() {
            let (_, q) = rest.primitive();
            if !self.polys.contains(&q) {
                self.polys.push(q);
            }
        }
        self.log.push(Assumption { factor: p.to_string(), reason: reason.to_string() });
        true
    }

    pub fn contains_gen(&self, g: Gen) -> bool {
        self.gens.contains(&g)
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn entries(&self) -> &[Assumption] {
        &self.log
    }

    /// Strips ledger generators and ledger polynomial factors from `p`.
    pub fn strip(&self, p: &Poly) -> Poly {
        if p.is_zero() {
            return Poly::zero();
        }
        let mono = p.monomial_content();
        let strip = Monomial::from_pairs(mono.iter().filter(|(g, _)| self.gens.contains(g)).copied());
        let mut q = p.div_monomial(&strip).expect("content divides");
        for f in &self.polys {
            while q.len() >= f.len() {
                match q.exact_div(f).expect("nonzero factor") {
                    Some(r) => q = r,
                    None => break,
                }
            }
        }
        q
    }

    /// Is `p` a nonzero constant times a product of ledger factors?
    pub fn is_nonvanishing(&self, p: &Poly) -> bool {
        !p.is_zero() && self.strip(p).is_constant()
    }
}

/// Canonical form of a relation `p = 0`: ledger factors removed, integer content
/// removed, leading coefficient positive.
pub fn normalize_relation(p: &Poly, ledger: &Ledger) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    ledger.strip(p).primitive().1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::gen::SecName;

    #[test]
    fn strips_ledger_monomials_and_content() {
        let mut l = Ledger::new();
        l.assume(&Poly::h(2), "test");
        let p1 = Poly::var(Gen::sec(SecName::p(1)));
        let p = &p1.mul(&Poly::h(2).pow(2)).scale(&6.into_coeff())
            - &p1.mul(&Poly::h(2).pow(3)).mul(&Poly::h(-2)).scale(&6.into_coeff());
        let n = normalize_relation(&p, &l);
        let expected = &p1.mul(&Poly::h(2)).mul(&Poly::h(-2)) - &p1;
        assert_eq!(n, expected);
        assert_eq!(normalize_relation(&n, &l), n);
    }

    #[test]
    fn zero_stays_zero() {
        assert!(normalize_relation(&Poly::zero(), &Ledger::new()).is_zero());
    }

    #[test]
    fn strips_polynomial_factor() {
        let mut l = Ledger::new();
        let k = &Poly::one() - &Poly::h(2).mul(&Poly::h(-2));
        l.assume(&k, "curvature");
        let p = k.mul(&Poly::h(3)).scale(&(-3).into_coeff());
        assert_eq!(normalize_relation(&p, &l), Poly::h(3));
        assert!(l.is_nonvanishing(&k.pow(2)));
    }

    trait IntoCoeff {
        fn into_coeff(self) -> crate::expr::coeff::Coeff;
    }
    impl IntoCoeff for i64 {
        fn into_coeff(self) -> crate::expr::coeff::Coeff {
            crate::expr::coeff::Coeff::from_i64(self)
        }
    }
}
