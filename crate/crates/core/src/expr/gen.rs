//! Polynomial generators and the per-session weight/reality registry.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Structure-function index stored as (|j|, sign) so the derived order is (|index|, sign).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HIndex {
    abs: u8,
    neg: bool,
}

impl HIndex {
    pub fn value(self) -> i32 {
        if self.neg {
            -(self.abs as i32)
        } else {
            self.abs as i32
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    P,
    Q,
    R,
}

/// Name of a section coefficient, e.g. `p1`, `p0_3`, `q2`, `r1_m2`, `rm1_m1`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SecName {
    pub family: Family,
    pub first: i8,
    /// `None` for single-index names (`p1`, `q0`).
    pub second: Option<i8>,
}

impl SecName {
    pub fn p(i: i8) -> Self {
        SecName { family: Family::P, first: i, second: None }
    }
    pub fn p2(i: i8, j: i8) -> Self {
        SecName { family: Family::P, first: i, second: Some(j) }
    }
    pub fn q(i: i8) -> Self {
        SecName { family: Family::Q, first: i, second: None }
    }
    pub fn r(i: i8, j: i8) -> Self {
        SecName { family: Family::R, first: i, second: Some(j) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Aux {
    /// |h₂| at a specialization point.
    A,
    /// |h₃| at a specialization point.
    B,
    /// m with m² = h₂h₋₂.
    M,
    /// The first integral.
    J,
    Cos,
    Sin,
}

/// A polynomial indeterminate. The derived order is the fixed generator order
/// (kind, |index|, sign) used for deglex monomial comparison.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    H(HIndex),
    Sec(SecName),
    X(u8),
    Aux(Aux),
}

impl Gen {
    /// Structure function h_j; |j| ≥ 2.
    pub fn h(j: i32) -> Gen {
        assert!(j.abs() >= 2 && j.abs() < 256, "structure function index {j} out of range");
        Gen::H(HIndex { abs: j.unsigned_abs() as u8, neg: j < 0 })
    }

    pub fn x(k: u8) -> Gen {
        assert!(k < 4);
        Gen::X(k)
    }

    pub fn sec(name: SecName) -> Gen {
        Gen::Sec(name)
    }

    pub fn h_index(self) -> Option<i32> {
        match self {
            Gen::H(h) => Some(h.value()),
            _ => None,
        }
    }

    pub fn is_section(self) -> bool {
        matches!(self, Gen::Sec(_))
    }
}

fn signed(f: &mut fmt::Formatter<'_>, v: i8) -> fmt::Result {
    if v < 0 {
        write!(f, "m{}", -(v as i32))
    } else {
        write!(f, "{}", v)
    }
}

impl fmt::Display for SecName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.family {
            Family::P => 'p',
            Family::Q => 'q',
            Family::R => 'r',
        };
        write!(f, "{}", c)?;
        signed(f, self.first)?;
        if let Some(s) = self.second {
            write!(f, "_")?;
            signed(f, s)?;
        }
        Ok(())
    }
}

impl fmt::Debug for SecName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::H(h) => {
                if h.neg {
                    write!(f, "hm{}", h.abs)
                } else {
                    write!(f, "h{}", h.abs)
                }
            }
            Gen::Sec(s) => write!(f, "{}", s),
            Gen::X(k) => write!(f, "x{}", k),
            Gen::Aux(a) => write!(
                f,
                "{}",
                match a {
                    Aux::A => "a",
                    Aux::B => "b",
                    Aux::M => "m",
                    Aux::J => "J",
                    Aux::Cos => "cos",
                    Aux::Sin => "sin",
                }
            ),
        }
    }
}

impl fmt::Debug for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecInfo {
    pub weight: i32,
    pub partner: SecName,
}

/// Weights and reality partners of section coefficients. Structure functions and
/// auxiliaries carry intrinsic weights; section coefficients are registered here by
/// `frame_sections` when a section is built.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    sections: BTreeMap<SecName, SecInfo>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: SecName, weight: i32, partner: SecName) {
        self.sections.insert(name, SecInfo { weight, partner });
    }

    pub fn section(&self, name: SecName) -> Option<&SecInfo> {
        self.sections.get(&name)
    }

    pub fn sections(&self) -> impl Iterator<Item = (&SecName, &SecInfo)> {
        self.sections.iter()
    }

    pub fn weight(&self, g: Gen) -> Result<i32> {
        match g {
            Gen::H(h) => Ok(h.value()),
            Gen::Sec(s) => {
                self.sections.get(&s).map(|i| i.weight).ok_or_else(|| Error::UnknownGenerator(s.to_string()))
            }
            Gen::X(_) | Gen::Aux(_) => Ok(0),
        }
    }

    pub fn conj_gen(&self, g: Gen) -> Result<Gen> {
        match g {
            Gen::H(h) => Ok(Gen::h(-h.value())),
            Gen::Sec(s) => self
                .sections
                .get(&s)
                .map(|i| Gen::Sec(i.partner))
                .ok_or_else(|| Error::UnregisteredPartner(s.to_string())),
            Gen::X(_) | Gen::Aux(_) => Ok(g),
        }
    }
}
