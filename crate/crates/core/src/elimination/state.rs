use std::collections::BTreeMap;

use serde::Serialize;

use crate::calculus::{DerivationTable, Dir};
use crate::error::{Error, Result};
use crate::expr::ledger::Assumption;
use crate::expr::{normalize_relation, Coeff, Gen, Ledger, Monomial, Poly, RationalExpr, Weight};

/// A relation `body = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub label: String,
    pub body: Poly,
    pub provenance: String,
}

impl Relation {
    pub fn new(label: impl Into<String>, body: Poly, provenance: impl Into<String>) -> Self {
        Relation { label: label.into(), body, provenance: provenance.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationRecord {
    pub label: String,
    pub body: String,
    pub provenance: String,
}

impl From<&Relation> for RelationRecord {
    fn from(r: &Relation) -> Self {
        RelationRecord { label: r.label.clone(), body: r.body.to_string(), provenance: r.provenance.clone() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepRecord {
    pub step: String,
    pub note: String,
    pub relations: Vec<RelationRecord>,
    pub solved: Vec<(String, String)>,
    pub pivots: Vec<String>,
    pub assumptions: Vec<Assumption>,
}

/// A branch relation used for reduction by pseudo-remainder in `var`.
#[derive(Clone, Debug)]
pub struct Modulus {
    pub name: String,
    pub poly: Poly,
    pub var: Gen,
}

/// Relation set, solved substitutions, nonvanishing ledger and step log of one run.
///
/// Structure-function substitutions live in the derivation table and are applied
/// before differentiating; solved section coefficients are applied afterwards, so
/// that differentiating a relation uses the structure equations of every
/// coefficient it mentions.
#[derive(Clone, Debug)]
pub struct PipelineState {
    pub table: DerivationTable,
    pub subs: BTreeMap<Gen, RationalExpr>,
    pub ledger: Ledger,
    pub moduli: Vec<Modulus>,
    pub relations: Vec<Relation>,
    pub log: Vec<StepRecord>,
}

/// Outcome of reducing a relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reduced {
    Trivial,
    Relation(Poly),
}

impl PipelineState {
    pub fn new(table: DerivationTable) -> Self {
        PipelineState {
            table,
            subs: BTreeMap::new(),
            ledger: Ledger::new(),
            moduli: Vec::new(),
            relations: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn begin_step(&mut self, step: &str, note: &str) {
        self.log.push(StepRecord { step: step.into(), note: note.into(), ..Default::default() });
    }

    fn current(&mut self) -> &mut StepRecord {
        if self.log.is_empty() {
            self.begin_step("setup", "");
        }
        self.log.last_mut().unwrap()
    }

    pub fn assume(&mut self, p: &Poly, reason: &str) {
        let before = self.ledger.entries().len();
        self.ledger.assume(p, reason);
        let added: Vec<Assumption> = self.ledger.entries()[before..].to_vec();
        self.current().assumptions.extend(added);
    }

    /// Logs an image installed outside `solve` (e.g. a structure-function elimination).
    pub fn log_solved(&mut self, g: Gen, img: &RationalExpr) {
        self.current().solved.push((g.to_string(), img.to_string()));
    }

    pub fn record(&mut self, r: &Relation) {
        self.current().relations.push(r.into());
    }

    pub fn add_modulus(&mut self, name: &str, poly: Poly, var: Gen) {
        self.moduli.push(Modulus { name: name.into(), poly, var });
    }

    /// Applies solved substitutions and structure substitutions.
    pub fn substitute(&self, r: &RationalExpr) -> Result<RationalExpr> {
        let mut out = r.clone();
        for (g, img) in &self.subs {
            if out.numer().contains(*g) {
                out = out.subst(*g, img)?;
            }
        }
        self.table.apply_eliminations(&out)
    }

    /// Numerator of `r`, after checking that every denominator factor is
    /// declared nonvanishing.
    pub fn clear(&self, r: &RationalExpr) -> Result<Poly> {
        for (f, _) in r.den_factors() {
            if !self.ledger.is_nonvanishing(f) {
                return Err(Error::LedgerViolation(format!("denominator factor `{f}` is not in the ledger")));
            }
        }
        Ok(r.numer().clone())
    }

    /// Reduction modulo the branch relations.
    pub fn reduce_mod(&self, p: &Poly) -> Poly {
        let mut p = p.clone();
        for m in &self.moduli {
            if p.degree_in(m.var) >= m.poly.degree_in(m.var) {
                p = p.pseudo_rem(&m.poly, m.var);
            }
        }
        p
    }

    pub fn normalize(&self, p: &Poly) -> Poly {
        normalize_relation(p, &self.ledger)
    }

    /// Substitutes, clears ledger denominators, reduces modulo the branch and
    /// normalizes.
    pub fn reduce_rational(&self, r: &RationalExpr) -> Result<Reduced> {
        let p = self.clear(&self.substitute(r)?)?;
        let p = self.normalize(&self.reduce_mod(&p));
        Ok(if p.is_zero() { Reduced::Trivial } else { Reduced::Relation(p) })
    }

    pub fn reduce(&self, p: &Poly) -> Result<Reduced> {
        self.reduce_rational(&RationalExpr::from_poly(p.clone()))
    }

    pub fn reduce_or_zero(&self, p: &Poly) -> Result<Poly> {
        Ok(match self.reduce(p)? {
            Reduced::Trivial => Poly::zero(),
            Reduced::Relation(q) => q,
        })
    }

    /// ∂ and ∂̄ of a relation body, reduced. Structure substitutions are applied
    /// before differentiating, solved coefficients afterwards.
    pub fn differentiate(&self, body: &Poly) -> Result<(Reduced, Reduced)> {
        let x = self.table.apply_eliminations(&RationalExpr::from_poly(body.clone()))?;
        if let Weight::NotHomogeneous = self.table.weight_of(&x)? {
            return Err(Error::NotHomogeneous(body.to_string()));
        }
        let d = self.table.derive_rational(&x, Dir::Holo)?;
        let db = self.table.derive_rational(&x, Dir::Antiholo)?;
        Ok((self.reduce_rational(&d)?, self.reduce_rational(&db)?))
    }

    /// Solves the linear system `rels` for `targets` by fraction-free elimination.
    /// Pivots must be nonvanishing by the ledger.
    pub fn solve(&mut self, rels: &[Poly], targets: &[Gen]) -> Result<Vec<(Gen, RationalExpr)>> {
        let mut rows: Vec<Option<Poly>> = rels.iter().map(|r| Some(r.clone())).collect();
        let mut solved: Vec<(Gen, RationalExpr)> = Vec::new();
        let mut pivots = Vec::new();
        for (k, &t) in targets.iter().enumerate() {
            let mut best: Option<(usize, Poly)> = None;
            let mut unjustified: Option<Poly> = None;
            for (i, row) in rows.iter().enumerate() {
                let Some(row) = row else { continue };
                let d = row.degree_in(t);
                if d == 0 {
                    continue;
                }
                if d > 1 {
                    return Err(Error::Unsupported(format!("relation is not linear in {t}")));
                }
                let c = row.coeffs_in(t).pop().unwrap();
                if self.ledger.is_nonvanishing(&c) {
                    if best.as_ref().is_none_or(|(_, b)| c.len() < b.len()) {
                        best = Some((i, c));
                    }
                } else if unjustified.is_none() {
                    unjustified = Some(c);
                }
            }
            let Some((i, c)) = best else {
                return Err(match unjustified {
                    Some(p) => Error::UnjustifiedPivot { pivot: p.to_string() },
                    None => Error::Singular {
                        defect: targets.len() - k,
                        targets: targets[k..].iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", "),
                    },
                });
            };
            let row = rows[i].take().unwrap();
            let rest = &row - &c.mul(&Poly::var(t));
            let img = RationalExpr::new(-rest, &c)?.reduce();
            for r in rows.iter_mut().flatten() {
                if r.contains(t) {
                    let s = RationalExpr::subst_into(r, t, &img);
                    *r = self.normalize(&self.reduce_mod(s.numer()));
                }
            }
            for (_, prev) in solved.iter_mut() {
                if prev.numer().contains(t) {
                    *prev = prev.subst(t, &img)?;
                }
            }
            pivots.push(c.to_string());
            solved.push((t, img));
        }
        for r in rows.into_iter().flatten() {
            if !r.is_zero() {
                let left = self.reduce(&r)?;
                if let Reduced::Relation(p) = left {
                    return Err(Error::Consistency(format!("relation left over after solving: {p}")));
                }
            }
        }
        self.install(&solved)?;
        let rec = self.current();
        rec.pivots.extend(pivots);
        rec.solved.extend(solved.iter().map(|(g, e)| (g.to_string(), e.to_string())));
        Ok(solved)
    }

    /// A copy of the state in which `basis` (linear in section coefficients) has
    /// been solved, each relation for the first of `prefer` it can be solved for,
    /// else for its section coefficient with the simplest ledger-nonvanishing
    /// coefficient.
    pub fn modulo_span(&self, basis: &[Poly], prefer: &[Gen]) -> Result<PipelineState> {
        let mut q = self.clone();
        for b in basis {
            let Reduced::Relation(row) = q.reduce(b)? else { continue };
            let preferred = prefer
                .iter()
                .copied()
                .find(|&g| row.degree_in(g) == 1 && q.ledger.is_nonvanishing(&row.coeffs_in(g).pop().unwrap()));
            if let Some(g) = preferred {
                q.solve(&[row], &[g])?;
                continue;
            }
            let mut best: Option<(Gen, usize)> = None;
            for g in row.gens().into_iter().filter(|g| g.is_section()) {
                if row.degree_in(g) != 1 {
                    continue;
                }
                let c = row.coeffs_in(g).pop().unwrap();
                if q.ledger.is_nonvanishing(&c) && best.is_none_or(|(_, n)| c.len() < n) {
                    best = Some((g, c.len()));
                }
            }
            let Some((g, _)) = best else {
                return Err(Error::UnjustifiedPivot { pivot: row.to_string() });
            };
            q.solve(&[row], &[g])?;
        }
        Ok(q)
    }

    /// Adds solved images to the substitution map, keeping it triangular.
    pub fn install(&mut self, solved: &[(Gen, RationalExpr)]) -> Result<()> {
        for (t, img) in solved {
            let img = self.substitute(img)?.reduce();
            for v in self.subs.values_mut() {
                if v.numer().contains(*t) {
                    *v = v.subst(*t, &img)?.reduce();
                }
            }
            self.subs.insert(*t, img);
        }
        let mut kept = Vec::new();
        for r in std::mem::take(&mut self.relations) {
            if let Reduced::Relation(_) = self.reduce(&r.body)? {
                kept.push(r);
            }
        }
        self.relations = kept;
        Ok(())
    }

    /// Re-applies the structure substitutions to solved images (after a new
    /// structure substitution is installed).
    pub fn refresh_subs(&mut self) -> Result<()> {
        let keys: Vec<Gen> = self.subs.keys().copied().collect();
        for k in keys {
            let v = self.table.apply_eliminations(&self.subs[&k])?.reduce();
            self.subs.insert(k, v);
        }
        Ok(())
    }

    /// Coefficients of a relation that is linear in section coefficients, keyed by
    /// the section monomial (the empty monomial for the section-free part).
    pub fn linear_parts(p: &Poly) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        for (m, c) in p.terms() {
            let sec = Monomial::from_pairs(m.iter().filter(|(g, _)| g.is_section()).copied());
            let rest = Monomial::from_pairs(m.iter().filter(|(g, _)| !g.is_section()).copied());
            out.entry(sec).or_insert_with(Poly::zero).add_term(rest, c.clone());
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Are `a = 0` and `b = 0` the same relation up to a nonzero factor, modulo the
    /// branch? Both must already be reduced.
    pub fn proportional(&self, a: &Poly, b: &Poly) -> bool {
        if a.is_zero() || b.is_zero() {
            return false;
        }
        let pa = Self::linear_parts(a);
        let pb = Self::linear_parts(b);
        if pa.keys().ne(pb.keys()) {
            // keys may differ only by parts vanishing modulo the branch
            let ka: Vec<_> = pa.iter().filter(|(_, v)| !self.reduce_mod(v).is_zero()).map(|(k, _)| k).collect();
            let kb: Vec<_> = pb.iter().filter(|(_, v)| !self.reduce_mod(v).is_zero()).map(|(k, _)| k).collect();
            if ka != kb {
                return false;
            }
        }
        // a single monomial key carries no ratio information; compare inside it
        if pa.len() == 1 {
            let (x, y) = (pa.values().next().unwrap(), pb.values().next().unwrap());
            return self.proportional_scalar(x, y);
        }
        let k0 = pa.keys().next().unwrap().clone();
        let (a0, b0) = (&pa[&k0], pb.get(&k0).cloned().unwrap_or_else(Poly::zero));
        for (k, ak) in &pa {
            let bk = pb.get(k).cloned().unwrap_or_else(Poly::zero);
            let minor = &ak.mul(&b0) - &bk.mul(a0);
            if !self.reduce_mod(&minor).is_zero() {
                return false;
            }
        }
        true
    }

    /// Proportionality of two section-free polynomials: equal after normalization,
    /// possibly up to a unit of the coefficient field.
    fn proportional_scalar(&self, x: &Poly, y: &Poly) -> bool {
        let nx = self.normalize(&self.reduce_mod(x));
        let ny = self.normalize(&self.reduce_mod(y));
        if nx == ny {
            return true;
        }
        let (Some((_, cx)), Some((_, cy))) = (nx.leading(), ny.leading()) else { return false };
        let s = &cy.inv().expect("nonzero") * cx;
        ny.scale(&s) == nx
    }

    pub fn conj(&self, p: &Poly) -> Result<Poly> {
        p.conj(self.table.registry())
    }

    /// Declares a relation active (after reduction). Returns the stored body, or
    /// None when it reduces to Trivial.
    pub fn push_relation(&mut self, label: &str, body: &Poly, provenance: &str) -> Result<Option<Poly>> {
        match self.reduce(body)? {
            Reduced::Trivial => Ok(None),
            Reduced::Relation(p) => {
                let r = Relation::new(label, p.clone(), provenance);
                self.record(&r);
                self.relations.push(r);
                Ok(Some(p))
            }
        }
    }

    pub fn relation(&self, label: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.label == label)
    }

    /// Weight check at insertion: a stored relation must be weight-homogeneous.
    pub fn check_homogeneous(&self, p: &Poly) -> Result<i64> {
        match p.weight(self.table.registry())? {
            Weight::Homogeneous(w) => Ok(w),
            Weight::Any => Ok(0),
            Weight::NotHomogeneous => Err(Error::NotHomogeneous(p.to_string())),
        }
    }

    pub fn scalar(c: i64) -> Coeff {
        Coeff::from_i64(c)
    }
}
