//! Relation bookkeeping and the scripted elimination runs.

mod cubic;
pub mod fixtures;
mod low;
pub mod state;

use serde::Serialize;

pub use fixtures::{FixtureCheck, FixtureSet, MatchStatus};
pub use state::{Modulus, PipelineState, Reduced, Relation, StepRecord};

use crate::error::{Error, Result};
use crate::expr::ledger::Assumption;
use crate::expr::{Gen, Poly, RationalExpr};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    None,
    A,
    B,
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Branch::A),
            "B" | "b" => Ok(Branch::B),
            "none" => Ok(Branch::None),
            _ => Err(Error::Config(format!("unknown case `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    StructureConditions { conditions: Vec<String>, consequences: Vec<String>, survivor: String },
    UniqueUpToScale { coefficient: String, relations: Vec<String> },
    Contradiction { witness: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub schema: u32,
    pub degree: u32,
    pub branch: Branch,
    pub steps: Vec<StepRecord>,
    pub verdict: Verdict,
    pub ledger: Vec<Assumption>,
    pub fixtures: Vec<FixtureCheck>,
    pub substitutions: Vec<(String, String)>,
    /// Named relations produced along the way (e.g. the step-8 compatibility factor).
    pub results: Vec<(String, String)>,
    /// Final relation state, used for coefficient extraction.
    #[serde(skip)]
    pub state: Option<PipelineState>,
}

impl PipelineReport {
    pub fn fixtures_ok(&self) -> bool {
        self.fixtures.iter().all(FixtureCheck::ok)
    }

    pub fn result(&self, name: &str) -> Option<&str> {
        self.results.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("degree {} case {:?}\n", self.degree, self.branch);
        for step in &self.steps {
            s.push_str(&format!("[{}] {}\n", step.step, step.note));
            for r in &step.relations {
                s.push_str(&format!("  {} = 0   ({}: {})\n", r.body, r.label, r.provenance));
            }
            for (g, v) in &step.solved {
                s.push_str(&format!("  {g} := {v}\n"));
            }
            for a in &step.assumptions {
                s.push_str(&format!("  assume {} != 0 ({})\n", a.factor, a.reason));
            }
        }
        for c in &self.fixtures {
            s.push_str(&format!("fixture {}: {:?}\n", c.label, c.status));
            for d in &c.diff {
                s.push_str(&format!("  {d}\n"));
            }
        }
        for (n, v) in &self.results {
            s.push_str(&format!("{n}: {v}\n"));
        }
        s.push_str(&format!("verdict: {:?}\n", self.verdict));
        s
    }
}

/// Shared driver state for the scripted runs.
pub(crate) struct Runner<'a> {
    pub st: PipelineState,
    pub fx: &'a FixtureSet,
    pub checks: Vec<FixtureCheck>,
    pub results: Vec<(String, String)>,
}

impl<'a> Runner<'a> {
    pub fn new(st: PipelineState, fx: &'a FixtureSet) -> Self {
        Runner { st, fx, checks: Vec::new(), results: Vec::new() }
    }

    /// Nontrivial ∂- and ∂̄-components of d(body), without duplicates.
    pub fn d(&self, body: &Poly) -> Result<Vec<Poly>> {
        let (a, b) = self.st.differentiate(body)?;
        let mut out = Vec::new();
        for r in [a, b] {
            if let Reduced::Relation(p) = r {
                out.push(p);
            }
        }
        Ok(self.dedup(out))
    }

    pub fn d_all(&self, bodies: &[Poly]) -> Result<Vec<Poly>> {
        let mut out = Vec::new();
        for b in bodies {
            out.extend(self.d(b)?);
        }
        Ok(self.dedup(out))
    }

    pub fn dedup(&self, ps: Vec<Poly>) -> Vec<Poly> {
        let mut out: Vec<Poly> = Vec::new();
        for p in ps {
            if p.is_zero() || out.iter().any(|q| *q == p || self.st.proportional(q, &p)) {
                continue;
            }
            out.push(p);
        }
        out
    }

    /// Records a fixture comparison; a plain mismatch aborts the run.
    pub fn check(&mut self, label: &str, engine: &[Poly]) -> Result<()> {
        let c = fixtures::check_relations(&self.st, self.fx, label, engine)?;
        let bad = !c.ok();
        let diff = c.diff.join("; ");
        self.checks.push(c);
        if bad {
            return Err(Error::FixtureMismatch { label: label.into(), diff });
        }
        Ok(())
    }

    /// Records a fixture comparison without aborting on a mismatch.
    pub fn record_check(&mut self, label: &str, engine: &[Poly]) -> Result<()> {
        let c = fixtures::check_relations(&self.st, self.fx, label, engine)?;
        self.checks.push(c);
        Ok(())
    }

    pub fn push(&mut self, label: &str, body: &Poly, provenance: &str) -> Result<Poly> {
        self.st.check_homogeneous(body)?;
        self.st
            .push_relation(label, body, provenance)?
            .ok_or_else(|| Error::Consistency(format!("{label} reduces to zero")))
    }

    pub fn solve(&mut self, rels: &[Poly], targets: &[Gen]) -> Result<Vec<(Gen, RationalExpr)>> {
        self.st.solve(rels, targets)
    }

    pub fn result(&mut self, name: &str, value: String) {
        self.results.push((name.into(), value));
    }

    pub fn finish(self, degree: u32, branch: Branch, verdict: Verdict) -> PipelineReport {
        PipelineReport {
            schema: 1,
            degree,
            branch,
            steps: self.st.log.clone(),
            verdict,
            ledger: self.st.ledger.entries().to_vec(),
            fixtures: self.checks,
            substitutions: self.st.subs.iter().map(|(g, v)| (g.to_string(), v.to_string())).collect(),
            results: self.results,
            state: Some(self.st),
        }
    }
}

/// Runs the scripted elimination for `degree` (1, 2 or 3; degree 3 needs a branch).
pub fn run_pipeline(degree: u32, branch: Branch, fixtures: &FixtureSet) -> Result<PipelineReport> {
    match (degree, branch) {
        (1, Branch::None) => low::degree_one(fixtures),
        (2, Branch::None) => low::degree_two(fixtures),
        (3, Branch::A) => cubic::case_a(fixtures),
        (3, Branch::B) => cubic::case_b(fixtures),
        (3, Branch::None) => Err(Error::Config("degree 3 needs a case (A or B)".into())),
        (1 | 2, _) => Err(Error::Config("a case applies only to degree 3".into())),
        _ => Err(Error::Domain(format!("degree {degree} is not supported"))),
    }
}

pub(crate) fn sec(name: &str) -> Gen {
    match crate::expr::parse::resolve_name(name) {
        Some(Ok(g)) => g,
        _ => panic!("bad section name {name}"),
    }
}

pub(crate) fn var(name: &str) -> Poly {
    Poly::var(sec(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(degree: u32, branch: Branch) -> PipelineReport {
        run_pipeline(degree, branch, &FixtureSet::bundled().unwrap()).unwrap()
    }

    #[test]
    fn degree_one_forces_totally_geodesic() {
        let r = run(1, Branch::None);
        assert!(r.fixtures_ok());
        let Verdict::StructureConditions { conditions, survivor, .. } = &r.verdict else { panic!("{:?}", r.verdict) };
        assert_eq!(conditions, &["h2", "hm2"]);
        assert_eq!(survivor, "p3");
    }

    #[test]
    fn degree_two_forces_flat_clifford() {
        let r = run(2, Branch::None);
        assert!(r.fixtures_ok());
        let Verdict::StructureConditions { conditions, consequences, .. } = &r.verdict else { panic!() };
        assert_eq!(conditions, &["h2*hm2 - 1"]);
        assert_eq!(consequences, &["h3", "hm3"]);
    }

    #[test]
    fn case_a_is_unique_up_to_scale() {
        let r = run(3, Branch::A);
        assert!(r.fixtures_ok());
        assert!(matches!(r.verdict, Verdict::UniqueUpToScale { .. }));
        assert_eq!(r.result("J"), Some("5/4"));
        assert_eq!(r.result("Step-8 compatibility"), Some("(8*J + 10)*(8*J - 10)"));
        assert_eq!(r.result("d²p1"), Some("0"));
        let suspect = r.fixtures.iter().find(|c| c.label == "A1_Eq_6_3").unwrap();
        assert_eq!(suspect.status, MatchStatus::SuspectMatch);
    }

    #[test]
    fn case_b_is_contradictory() {
        let r = run(3, Branch::B);
        assert!(matches!(r.verdict, Verdict::Contradiction { .. }));
        let status = |l: &str| r.fixtures.iter().find(|c| c.label == l).unwrap().status.clone();
        assert_eq!(status("A2_Eq_7"), MatchStatus::Match);
        assert_eq!(status("A2_h5"), MatchStatus::Consequence);
        assert_eq!(status("Step_9_D4pp"), MatchStatus::Match);
        assert_eq!(status("Eq_10_2"), MatchStatus::Match);
        assert_eq!(status("Eq_10_3"), MatchStatus::Match);
        assert_eq!(status("Eq_10_1"), MatchStatus::Mismatch);
        assert_eq!(r.result("p3 - conj(p3) with the printed h±5"), Some("Δ₄·Δ₄′"));
        assert_eq!(r.result("Eq_8_c on the branch"), Some("Δ₃⁻·Δ₄″"));
    }

    #[test]
    fn case_selection_is_validated() {
        let fx = FixtureSet::bundled().unwrap();
        assert!(matches!(run_pipeline(3, Branch::None, &fx), Err(Error::Config(_))));
        assert!(matches!(run_pipeline(2, Branch::A, &fx), Err(Error::Config(_))));
        assert!(matches!(run_pipeline(4, Branch::None, &fx), Err(Error::Domain(_))));
    }
}
