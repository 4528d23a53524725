//! Transcribed relation fixtures and comparison against engine output.
//!
//! File format: `#! <directive>` lines, `#` comments, then one relation per line.
//! The only directive is `stray-symbol <name>`, which marks the fixture suspect.
//! The named symbol is read as 1; the reading with the symbol's term dropped is
//! kept as an alternate so a comparison can tell which one the engine supports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::state::PipelineState;
use crate::error::{Error, Result};
use crate::expr::{parse_relations, Poly};

#[derive(Clone, Debug)]
pub struct Fixture {
    pub label: String,
    pub relations: Vec<Poly>,
    pub suspect: Option<String>,
    pub alternate: Vec<Poly>,
}

fn replace_symbol(text: &str, sym: &str, by: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        out.push_str(if word == sym { by } else { word });
        word.clear();
    };
    for c in text.chars() {
        if c.is_ascii_alphanumeric() || c == '_' {
            word.push(c);
        } else {
            flush(&mut word, &mut out);
            out.push(c);
        }
    }
    flush(&mut word, &mut out);
    out
}

impl Fixture {
    pub fn parse(label: &str, text: &str) -> Result<Fixture> {
        let mut suspect = None;
        let mut body = String::new();
        for line in text.lines() {
            if let Some(d) = line.strip_prefix("#!") {
                let mut it = d.split_whitespace();
                match (it.next(), it.next()) {
                    (Some("stray-symbol"), Some(sym)) => suspect = Some(sym.to_string()),
                    _ => return Err(Error::Config(format!("{label}: unknown directive `{}`", d.trim()))),
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut alternate = Vec::new();
        if let Some(sym) = &suspect {
            alternate = parse_relations(&replace_symbol(&body, sym, "0"))?;
            body = replace_symbol(&body, sym, "1");
        }
        Ok(Fixture { label: label.into(), relations: parse_relations(&body)?, suspect, alternate })
    }

    pub fn single(&self) -> Result<&Poly> {
        match self.relations.as_slice() {
            [p] => Ok(p),
            _ => Err(Error::Config(format!("{}: expected one relation", self.label))),
        }
    }
}

/// Relation fixtures keyed by file stem.
#[derive(Clone, Debug, Default)]
pub struct FixtureSet {
    pub dir: Option<PathBuf>,
    map: BTreeMap<String, Fixture>,
}

impl FixtureSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Loads every `*.txt` file except the structure-system goldens.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut map = BTreeMap::new();
        let rd = std::fs::read_dir(dir).map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?;
        let mut paths: Vec<PathBuf> = rd.filter_map(|e| e.ok().map(|e| e.path())).collect();
        paths.sort();
        for p in paths {
            let Some(stem) = p.file_stem().and_then(|s| s.to_str()) else { continue };
            if p.extension().and_then(|e| e.to_str()) != Some("txt") || stem.starts_with("system_") {
                continue;
            }
            let text = std::fs::read_to_string(&p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            map.insert(stem.to_string(), Fixture::parse(stem, &text)?);
        }
        Ok(FixtureSet { dir: Some(dir.to_path_buf()), map })
    }

    /// The fixtures shipped with the crate.
    pub fn bundled() -> Result<Self> {
        Self::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"))
    }

    pub fn get(&self, label: &str) -> Option<&Fixture> {
        self.map.get(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchStatus {
    Match,
    Conjugate,
    Mismatch,
    /// Fixture marked suspect; the engine agrees with the reading symbol = 1 only.
    SuspectMatch,
    /// Fixture marked suspect; both readings agree with the engine.
    SuspectAmbiguous,
    /// Fixture marked suspect; neither reading agrees. Engine output is kept.
    SuspectMismatch,
    /// The fixture relation is a consequence of the engine relations of its step.
    Consequence,
    Missing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureCheck {
    pub label: String,
    pub status: MatchStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub diff: Vec<String>,
}

impl FixtureCheck {
    pub fn ok(&self) -> bool {
        matches!(
            self.status,
            MatchStatus::Match
                | MatchStatus::Conjugate
                | MatchStatus::SuspectMatch
                | MatchStatus::SuspectAmbiguous
                | MatchStatus::SuspectMismatch
                | MatchStatus::Consequence
                | MatchStatus::Missing
        )
    }
}

/// Term-level difference between two normalized relations.
pub fn term_diff(engine: &Poly, fixture: &Poly) -> Vec<String> {
    let mut out = Vec::new();
    for (m, c) in engine.terms() {
        let f = fixture.coeff_of(m);
        if &f != c {
            out.push(format!("{m}: engine {c}, fixture {f}"));
        }
    }
    for (m, c) in fixture.terms() {
        if engine.coeff_of(m).is_zero() {
            out.push(format!("{m}: engine 0, fixture {c}"));
        }
    }
    out
}

fn classify(st: &PipelineState, engine: &Poly, want: &Poly) -> Result<Option<MatchStatus>> {
    if st.proportional(engine, want) {
        return Ok(Some(MatchStatus::Match));
    }
    let cw = st.reduce_or_zero(&st.conj(want)?)?;
    Ok(st.proportional(engine, &cw).then_some(MatchStatus::Conjugate))
}

/// Compares engine relations with fixture `label` relation by relation, up to
/// normalization, a nonzero factor modulo the branch, and conjugation. The order
/// within a multi-relation fixture is not significant.
pub fn check_relations(
    st: &PipelineState,
    fixtures: &FixtureSet,
    label: &str,
    engine: &[Poly],
) -> Result<FixtureCheck> {
    let Some(fx) = fixtures.get(label) else {
        return Ok(FixtureCheck { label: label.into(), status: MatchStatus::Missing, diff: Vec::new() });
    };
    let (status, diff) = compare(st, &fx.relations, engine)?;
    let Some(sym) = &fx.suspect else {
        return Ok(FixtureCheck { label: label.into(), status, diff });
    };
    let (alt, _) = compare(st, &fx.alternate, engine)?;
    let one = status != MatchStatus::Mismatch;
    let zero = alt != MatchStatus::Mismatch;
    let (status, note) = match (one, zero) {
        (true, false) => {
            (MatchStatus::SuspectMatch, format!("stray `{sym}` agrees with the engine only when read as 1"))
        }
        (true, true) => {
            (MatchStatus::SuspectAmbiguous, format!("both readings of stray `{sym}` agree with the engine"))
        }
        (false, true) => (MatchStatus::SuspectMismatch, format!("engine agrees with stray `{sym}` dropped")),
        (false, false) => (MatchStatus::SuspectMismatch, format!("no reading of stray `{sym}` agrees; engine kept")),
    };
    let mut diff = diff;
    diff.insert(0, note);
    Ok(FixtureCheck { label: label.into(), status, diff })
}

fn compare(st: &PipelineState, fixture: &[Poly], engine: &[Poly]) -> Result<(MatchStatus, Vec<String>)> {
    let wants: Vec<Poly> = fixture.iter().map(|p| st.reduce_or_zero(p)).collect::<Result<_>>()?;
    let mut used = vec![false; wants.len()];
    let mut status = MatchStatus::Match;
    let mut diff = Vec::new();
    if wants.len() != engine.len() {
        status = MatchStatus::Mismatch;
        diff.push(format!("engine has {} relations, fixture {}", engine.len(), wants.len()));
    } else {
        for e in engine {
            let mut found = None;
            for (j, w) in wants.iter().enumerate() {
                if used[j] {
                    continue;
                }
                match classify(st, e, w)? {
                    Some(MatchStatus::Match) => {
                        found = Some((j, MatchStatus::Match));
                        break;
                    }
                    Some(s) if found.is_none() => found = Some((j, s)),
                    _ => {}
                }
            }
            match found {
                Some((j, s)) => {
                    used[j] = true;
                    if s == MatchStatus::Conjugate && status == MatchStatus::Match {
                        status = s;
                    }
                }
                None => {
                    status = MatchStatus::Mismatch;
                    let closest =
                        wants.iter().zip(&used).find(|(_, u)| !**u).map(|(w, _)| w.clone()).unwrap_or_else(Poly::zero);
                    diff.extend(term_diff(e, &closest));
                }
            }
        }
    }
    Ok((status, diff))
}

pub fn check_relation(st: &PipelineState, fixtures: &FixtureSet, label: &str, engine: &Poly) -> Result<FixtureCheck> {
    check_relations(st, fixtures, label, std::slice::from_ref(engine))
}

/// Index of the first candidate matching the single-relation fixture `label`.
pub fn find_match(
    st: &PipelineState,
    fixtures: &FixtureSet,
    label: &str,
    candidates: &[Poly],
) -> Result<Option<usize>> {
    let Some(fx) = fixtures.get(label) else { return Ok(None) };
    let want = st.reduce_or_zero(fx.single()?)?;
    let mut conj = None;
    for (i, c) in candidates.iter().enumerate() {
        match classify(st, c, &want)? {
            Some(MatchStatus::Match) => return Ok(Some(i)),
            Some(_) if conj.is_none() => conj = Some(i),
            _ => {}
        }
    }
    Ok(conj)
}
