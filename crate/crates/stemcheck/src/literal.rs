//! Signed propositional literals and consistent literal sets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A propositional atom name. Cheap to clone.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Self, LiteralError> {
        let valid = !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.');
        if valid {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(LiteralError::BadAtom(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiteralError {
    #[error("invalid atom name {0:?}")]
    BadAtom(String),
    #[error("annotation contains both {0} and its complement")]
    Inconsistent(Literal),
}

/// An atom together with a polarity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    atom: Atom,
    positive: bool,
}

impl Literal {
    pub fn new(atom: Atom, positive: bool) -> Self {
        Literal { atom, positive }
    }

    pub fn pos(name: &str) -> Result<Self, LiteralError> {
        Ok(Literal::new(Atom::new(name)?, true))
    }

    pub fn neg(name: &str) -> Result<Self, LiteralError> {
        Ok(Literal::new(Atom::new(name)?, false))
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn complement(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }
}

/// Formats as `a` or `!a`.
impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "{}", self.atom)
    }
}

/// Accepts `a`, `!a` and `¬a`.
impl FromStr for Literal {
    type Err = LiteralError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('!').or_else(|| s.strip_prefix('¬')) {
            Literal::neg(rest.trim())
        } else {
            Literal::pos(s)
        }
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// A consistent, ordered set of literals. Used both for task annotations and
/// for process states.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LiteralSet(BTreeSet<Literal>);

pub type AnnotationSet = LiteralSet;
pub type ProcessState = LiteralSet;

impl LiteralSet {
    pub fn empty() -> Self {
        LiteralSet(BTreeSet::new())
    }

    pub fn from_literals<I: IntoIterator<Item = Literal>>(lits: I) -> Result<Self, LiteralError> {
        let mut set = BTreeSet::new();
        for l in lits {
            if set.contains(&l.complement()) {
                return Err(LiteralError::Inconsistent(l));
            }
            set.insert(l);
        }
        Ok(LiteralSet(set))
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.0.contains(l)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Adds `l`, failing if its complement is present.
    pub fn with(&self, l: Literal) -> Result<Self, LiteralError> {
        if self.contains(&l.complement()) {
            return Err(LiteralError::Inconsistent(l));
        }
        let mut set = self.0.clone();
        set.insert(l);
        Ok(LiteralSet(set))
    }

    /// The state update `self ⊕ update`: literals of `update` override their
    /// complements in `self`.
    pub fn update(&self, update: &LiteralSet) -> LiteralSet {
        let mut set: BTreeSet<Literal> = self
            .0
            .iter()
            .filter(|l| !update.contains(&l.complement()))
            .cloned()
            .collect();
        set.extend(update.0.iter().cloned());
        LiteralSet(set)
    }
}

impl fmt::Display for LiteralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// `L1 ⊕ L2`.
pub fn state_update(state: &ProcessState, annotation: &AnnotationSet) -> ProcessState {
    state.update(annotation)
}
