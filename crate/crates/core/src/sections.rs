//! Degree-m symmetric tensors in the complexified frame (e₀, E₁, E₋₁, e₃) and the
//! coefficient structure systems that dF = 0 imposes on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::calculus::{DerivationTable, Dir};
use crate::error::{Error, Result};
use crate::expr::{Coeff, Gen, Poly, Rational, RationalExpr, Registry, SecName};

/// Exponents of (e₀, e₃, E₁, E₋₁).
pub type FrameMono = [u32; 4];

const E0: usize = 0;
const E3: usize = 1;
const EP: usize = 2;
const EM: usize = 3;

#[derive(Clone, Debug)]
pub struct SectionTerm {
    pub mono: FrameMono,
    pub prefactor: Rational,
    pub name: SecName,
}

#[derive(Clone, Debug)]
pub struct FrameSection {
    pub degree: u32,
    pub terms: Vec<SectionTerm>,
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn term(mono: FrameMono, pre: i64, name: SecName) -> SectionTerm {
    SectionTerm { mono, prefactor: rat(pre), name }
}

/// The general section of degree m with the printed names and prefactors.
pub fn general_section(m: u32) -> Result<FrameSection> {
    use SecName as S;
    let terms = match m {
        1 => vec![
            term([1, 0, 0, 0], 1, S::p(0)),
            term([0, 0, 1, 0], 2, S::p(1)),
            term([0, 0, 0, 1], 2, S::p(-1)),
            term([0, 1, 0, 0], 1, S::p(3)),
        ],
        2 => vec![
            term([2, 0, 0, 0], 1, S::p2(0, 0)),
            term([1, 1, 0, 0], 2, S::p2(0, 3)),
            term([0, 2, 0, 0], 1, S::p2(3, 3)),
            term([1, 0, 1, 0], 2, S::r(0, 1)),
            term([1, 0, 0, 1], 2, S::r(0, -1)),
            term([0, 1, 1, 0], 2, S::r(3, 1)),
            term([0, 1, 0, 1], 2, S::r(3, -1)),
            term([0, 0, 2, 0], 4, S::r(1, 1)),
            term([0, 0, 1, 1], 8, S::r(1, -1)),
            term([0, 0, 0, 2], 4, S::r(-1, -1)),
        ],
        3 => vec![
            term([3, 0, 0, 0], 1, S::p(0)),
            term([2, 1, 0, 0], 1, S::p(1)),
            term([1, 2, 0, 0], 1, S::p(2)),
            term([0, 3, 0, 0], 1, S::p(3)),
            term([0, 0, 3, 0], 8, S::q(0)),
            term([0, 0, 2, 1], 8, S::q(1)),
            term([0, 0, 1, 2], 8, S::q(2)),
            term([0, 0, 0, 3], 8, S::q(3)),
            term([2, 0, 1, 0], 2, S::r(0, 1)),
            term([2, 0, 0, 1], 2, S::r(0, -1)),
            term([1, 1, 1, 0], 2, S::r(1, 1)),
            term([1, 1, 0, 1], 2, S::r(1, -1)),
            term([0, 2, 1, 0], 2, S::r(2, 1)),
            term([0, 2, 0, 1], 2, S::r(2, -1)),
            term([1, 0, 2, 0], 4, S::r(0, 2)),
            term([1, 0, 1, 1], 4, S::r(0, 0)),
            term([1, 0, 0, 2], 4, S::r(0, -2)),
            term([0, 1, 2, 0], 4, S::r(1, 2)),
            term([0, 1, 1, 1], 4, S::r(1, 0)),
            term([0, 1, 0, 2], 4, S::r(1, -2)),
        ],
        _ => return Err(Error::Unsupported(format!("sections of degree {m}"))),
    };
    Ok(FrameSection { degree: m, terms })
}

impl FrameSection {
    pub fn weight_of(mono: &FrameMono) -> i32 {
        mono[EM] as i32 - mono[EP] as i32
    }

    pub fn partner_mono(mono: &FrameMono) -> FrameMono {
        [mono[E0], mono[E3], mono[EM], mono[EP]]
    }

    pub fn term_at(&self, mono: &FrameMono) -> Option<&SectionTerm> {
        self.terms.iter().find(|t| &t.mono == mono)
    }

    pub fn names(&self) -> impl Iterator<Item = SecName> + '_ {
        self.terms.iter().map(|t| t.name)
    }

    /// Registers weights and reality partners of all coefficients.
    pub fn register(&self, reg: &mut Registry) {
        for t in &self.terms {
            let partner = self.term_at(&Self::partner_mono(&t.mono)).expect("section closed under swap").name;
            reg.register(t.name, Self::weight_of(&t.mono), partner);
        }
    }

    pub fn registry(&self) -> Registry {
        let mut reg = Registry::new();
        self.register(&mut reg);
        reg
    }

    /// Substitutes coefficient values and a chart (images of e₀, e₃, E₁, E₋₁).
    pub fn evaluate(&self, values: &BTreeMap<SecName, Poly>, chart: &[Poly; 4]) -> Result<Poly> {
        let mut out = Poly::zero();
        for t in &self.terms {
            let v = values.get(&t.name).ok_or_else(|| Error::Incomplete(t.name.to_string()))?;
            if v.is_zero() {
                continue;
            }
            let mut mono = Poly::constant(Coeff::from_rational(t.prefactor.clone()));
            for (k, e) in t.mono.iter().enumerate() {
                mono = mono.mul(&chart[k].pow(*e));
            }
            out = &out + &v.mul(&mono);
        }
        Ok(out)
    }
}

/// Per coefficient: weight and the ∂, ∂̄ images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemEntry {
    pub weight: i32,
    pub holo: Poly,
    pub antiholo: Poly,
}

#[derive(Clone, Debug)]
pub struct CoefficientSystem {
    pub degree: u32,
    pub entries: BTreeMap<SecName, SystemEntry>,
    pub registry: Registry,
}

/// One-form components (ω, ω̄, ρ).
type OneForm = [Poly; 3];

fn zero_form() -> OneForm {
    [Poly::zero(), Poly::zero(), Poly::zero()]
}

/// d of a frame vector as a list of (target vector, one-form coefficients).
fn frame_d(v: usize) -> Vec<(usize, OneForm)> {
    let half = Coeff::frac(1, 2);
    let i = Coeff::i();
    let mk = |w: Poly, wb: Poly, r: Poly| -> OneForm { [w, wb, r] };
    let z = Poly::zero;
    match v {
        E0 => vec![(EP, mk(Poly::one(), z(), z())), (EM, mk(z(), Poly::one(), z()))],
        EP => vec![
            (E0, mk(z(), Poly::constant(-&half), z())),
            (EP, mk(z(), z(), Poly::constant(-&i))),
            (E3, mk(Poly::h(2).scale(&half), z(), z())),
        ],
        EM => vec![
            (E0, mk(Poly::constant(-&half), z(), z())),
            (EM, mk(z(), z(), Poly::constant(i.clone()))),
            (E3, mk(z(), Poly::h(-2).scale(&half), z())),
        ],
        E3 => vec![(EP, mk(z(), -Poly::h(-2), z())), (EM, mk(-Poly::h(2), z(), z()))],
        _ => unreachable!(),
    }
}

/// Builds the coefficient system of `general_section(m)` from dF = 0 and the frame
/// matrix. The ρ-components are checked against the weight rule.
pub fn coefficient_system(m: u32) -> Result<CoefficientSystem> {
    let sec = general_section(m)?;
    let registry = sec.registry();
    // contributions to each frame monomial: Σ prefactor · s · d(monomial)
    let mut acc: BTreeMap<FrameMono, OneForm> = BTreeMap::new();
    for t in &sec.terms {
        let s = Poly::var(Gen::sec(t.name)).scale(&Coeff::from_rational(t.prefactor.clone()));
        for v in 0..4 {
            let e = t.mono[v];
            if e == 0 {
                continue;
            }
            for (target, form) in frame_d(v) {
                let mut mono = t.mono;
                mono[v] -= 1;
                mono[target] += 1;
                let slot = acc.entry(mono).or_insert_with(zero_form);
                let mult = Coeff::from_i64(e as i64);
                for c in 0..3 {
                    if !form[c].is_zero() {
                        slot[c] = &slot[c] + &form[c].mul(&s).scale(&mult);
                    }
                }
            }
        }
    }
    let mut entries = BTreeMap::new();
    for t in &sec.terms {
        let form = acc.remove(&t.mono).unwrap_or_else(zero_form);
        // prefactor·ds + form = 0
        let inv = Coeff::from_rational(-t.prefactor.recip());
        let ds: Vec<Poly> = form.iter().map(|p| p.scale(&inv)).collect();
        let w = FrameSection::weight_of(&t.mono);
        let expected_rho = Poly::var(Gen::sec(t.name)).scale(&Coeff::i().scale(&rat(-(w as i64))));
        if ds[2] != expected_rho {
            return Err(Error::Consistency(format!(
                "rho-component of d{} is {} but weight {} requires {}",
                t.name, ds[2], w, expected_rho
            )));
        }
        entries.insert(t.name, SystemEntry { weight: w, holo: ds[0].clone(), antiholo: ds[1].clone() });
    }
    if let Some((mono, _)) = acc.iter().find(|(_, f)| f.iter().any(|p| !p.is_zero())) {
        return Err(Error::Consistency(format!("dF has a component on {:?} outside the section", mono)));
    }
    Ok(CoefficientSystem { degree: m, entries, registry })
}

impl CoefficientSystem {
    /// A derivation table with the section coefficients installed.
    pub fn table(&self) -> DerivationTable {
        let mut t = DerivationTable::new(self.registry.clone());
        self.install(&mut t);
        t
    }

    pub fn install(&self, t: &mut DerivationTable) {
        for (name, e) in &self.entries {
            t.set(
                Gen::sec(*name),
                RationalExpr::from_poly(e.holo.clone()),
                RationalExpr::from_poly(e.antiholo.clone()),
            );
        }
    }

    /// Fixture lines `d <name> : <weight> : <∂-image> : <∂̄-image>`.
    pub fn to_fixture_text(&self) -> String {
        let mut s = String::new();
        for (name, e) in &self.entries {
            s.push_str(&format!("d {} : {} : {} : {}\n", name, e.weight, e.holo, e.antiholo));
        }
        s
    }

    /// Conjugation consistency: conj(∂s) = ∂̄(partner of s).
    pub fn check_conjugation(&self) -> Result<()> {
        for (name, e) in &self.entries {
            let partner = self.registry.section(*name).expect("registered").partner;
            let pe = &self.entries[&partner];
            if e.holo.conj(&self.registry)? != pe.antiholo {
                return Err(Error::Consistency(format!("conj(d{name}) differs from dbar{partner}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystemDiff {
    pub name: String,
    pub field: String,
    pub engine: String,
    pub fixture: String,
}

/// Parses a system fixture.
pub fn parse_system_fixture(text: &str) -> Result<BTreeMap<SecName, SystemEntry>> {
    let mut out = BTreeMap::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("").trim();
        let here = offset;
        offset += line.len();
        if body.is_empty() {
            continue;
        }
        let parts: Vec<&str> = body.split(':').map(str::trim).collect();
        if parts.len() != 4 || !parts[0].starts_with("d ") {
            return Err(Error::Parse { pos: here, msg: "expected `d <name> : <weight> : <d> : <dbar>`".into() });
        }
        let name_text = parts[0][2..].trim();
        let g = crate::expr::parse_poly(name_text)?;
        let name = match g.as_monomial().and_then(|(m, _)| m.iter().next().map(|(g, _)| *g)) {
            Some(Gen::Sec(s)) => s,
            _ => return Err(Error::UnknownGenerator(name_text.to_string())),
        };
        let weight: i32 =
            parts[1].parse().map_err(|_| Error::Parse { pos: here, msg: format!("bad weight `{}`", parts[1]) })?;
        let holo = crate::expr::parse_poly(parts[2])?;
        let antiholo = crate::expr::parse_poly(parts[3])?;
        out.insert(name, SystemEntry { weight, holo, antiholo });
    }
    Ok(out)
}

/// Term-level comparison of an engine system against a fixture.
pub fn compare_system(engine: &CoefficientSystem, fixture: &BTreeMap<SecName, SystemEntry>) -> Vec<SystemDiff> {
    let mut diffs = Vec::new();
    let names: std::collections::BTreeSet<SecName> = engine.entries.keys().chain(fixture.keys()).copied().collect();
    for n in names {
        match (engine.entries.get(&n), fixture.get(&n)) {
            (Some(e), Some(f)) => {
                if e.weight != f.weight {
                    diffs.push(SystemDiff {
                        name: n.to_string(),
                        field: "weight".into(),
                        engine: e.weight.to_string(),
                        fixture: f.weight.to_string(),
                    });
                }
                for (field, a, b) in [("d", &e.holo, &f.holo), ("dbar", &e.antiholo, &f.antiholo)] {
                    if a != b {
                        diffs.push(SystemDiff {
                            name: n.to_string(),
                            field: field.into(),
                            engine: a.to_string(),
                            fixture: b.to_string(),
                        });
                    }
                }
            }
            (e, f) => diffs.push(SystemDiff {
                name: n.to_string(),
                field: "presence".into(),
                engine: e.map(|_| "present").unwrap_or("missing").into(),
                fixture: f.map(|_| "present").unwrap_or("missing").into(),
            }),
        }
    }
    diffs
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealityVerdict {
    Pass,
    /// Residual per frame monomial, as (coefficient of the monomial in F − F̄).
    Violation(Vec<(FrameMono, RationalExpr)>),
}

/// F − conj(F) coefficientwise, with an optional reduction applied to each residual.
pub fn reality_check(
    sec: &FrameSection,
    values: &BTreeMap<SecName, RationalExpr>,
    reg: &Registry,
    reduce: &dyn Fn(&RationalExpr) -> Result<RationalExpr>,
) -> Result<RealityVerdict> {
    let mut residuals = Vec::new();
    for t in &sec.terms {
        let p = FrameSection::partner_mono(&t.mono);
        let pt = sec.term_at(&p).expect("section closed under swap");
        let v = values.get(&t.name).ok_or_else(|| Error::Incomplete(t.name.to_string()))?;
        let pv = values.get(&pt.name).ok_or_else(|| Error::Incomplete(pt.name.to_string()))?;
        let a = v.scale(&Coeff::from_rational(t.prefactor.clone()));
        let b = pv.conj(reg)?.scale(&Coeff::from_rational(pt.prefactor.clone()));
        let r = reduce(&a.sub(&b).reduce())?;
        if !r.is_zero() {
            residuals.push((t.mono, r));
        }
    }
    Ok(if residuals.is_empty() { RealityVerdict::Pass } else { RealityVerdict::Violation(residuals) })
}

impl fmt::Display for SystemDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: engine `{}` vs fixture `{}`", self.name, self.field, self.engine, self.fixture)
    }
}

/// Convenience: ∂ or ∂̄ of a single section coefficient.
pub fn section_image(sys: &CoefficientSystem, name: SecName, dir: Dir) -> Option<&Poly> {
    sys.entries.get(&name).map(|e| match dir {
        Dir::Holo => &e.holo,
        Dir::Antiholo => &e.antiholo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{exterior_d, Form};
    use crate::expr::parse_poly;

    #[test]
    fn coefficient_counts() {
        assert_eq!(general_section(1).unwrap().terms.len(), 4);
        assert_eq!(general_section(2).unwrap().terms.len(), 10);
        assert_eq!(general_section(3).unwrap().terms.len(), 20);
        assert!(general_section(4).is_err());
        let s2 = general_section(2).unwrap();
        assert_eq!(s2.term_at(&[0, 0, 1, 1]).unwrap().prefactor, rat(8));
    }

    #[test]
    fn degree_one_system() {
        let sys = coefficient_system(1).unwrap();
        let p0 = &sys.entries[&SecName::p(0)];
        assert_eq!(p0.holo, parse_poly("pm1").unwrap());
        assert_eq!(p0.antiholo, parse_poly("p1").unwrap());
        sys.check_conjugation().unwrap();
    }

    #[test]
    fn degree_three_samples() {
        let sys = coefficient_system(3).unwrap();
        let q0 = &sys.entries[&SecName::q(0)];
        assert_eq!(q0.weight, -3);
        assert_eq!(q0.antiholo, parse_poly("1/2*hm2*r1_2").unwrap());
        sys.check_conjugation().unwrap();
    }

    #[test]
    fn df_vanishes_for_every_degree() {
        for m in 1..=3 {
            let sys = coefficient_system(m).unwrap();
            let t = sys.table();
            for (name, e) in &sys.entries {
                let d = exterior_d(&Form::function(Poly::var(Gen::sec(*name))), &t).unwrap();
                assert_eq!(d.coeffs()[0].numer(), &e.holo);
                // d² of every coefficient vanishes identically
                let dd = exterior_d(&d, &t).unwrap();
                assert!(dd.is_zero(), "degree {m}: d²{name} = {dd}");
            }
        }
    }

    #[test]
    fn systems_match_transcribed_fixtures() {
        for m in 1..=3 {
            let path = format!("{}/fixtures/system_deg{m}.txt", env!("CARGO_MANIFEST_DIR"));
            let fixture = parse_system_fixture(&std::fs::read_to_string(path).unwrap()).unwrap();
            let diffs = compare_system(&coefficient_system(m).unwrap(), &fixture);
            assert!(diffs.is_empty(), "degree {m}: {diffs:?}");
        }
    }

    #[test]
    fn all_zero_assignment_is_real() {
        let sec = general_section(2).unwrap();
        let reg = sec.registry();
        let vals = sec.names().map(|n| (n, RationalExpr::zero())).collect();
        let v = reality_check(&sec, &vals, &reg, &|r| Ok(r.clone())).unwrap();
        assert_eq!(v, RealityVerdict::Pass);
    }
}
