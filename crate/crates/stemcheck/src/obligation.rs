//! Conditional obligations.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::literal::{Literal, LiteralError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObligationKind {
    Achievement,
    Maintenance,
}

impl ObligationKind {
    pub fn name(self) -> &'static str {
        match self {
            ObligationKind::Achievement => "achievement",
            ObligationKind::Maintenance => "maintenance",
        }
    }
}

/// `O^kind⟨requirement, trigger, deadline⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionalObligation {
    pub kind: ObligationKind,
    pub requirement: Literal,
    pub trigger: Literal,
    pub deadline: Literal,
}

impl ConditionalObligation {
    pub fn new(
        kind: ObligationKind,
        requirement: Literal,
        trigger: Literal,
        deadline: Literal,
    ) -> Self {
        ConditionalObligation {
            kind,
            requirement,
            trigger,
            deadline,
        }
    }

    fn parse(kind: ObligationKind, r: &str, t: &str, d: &str) -> Result<Self, LiteralError> {
        Ok(ConditionalObligation::new(
            kind,
            r.parse()?,
            t.parse()?,
            d.parse()?,
        ))
    }

    pub fn achievement(r: &str, t: &str, d: &str) -> Result<Self, LiteralError> {
        Self::parse(ObligationKind::Achievement, r, t, d)
    }

    pub fn maintenance(r: &str, t: &str, d: &str) -> Result<Self, LiteralError> {
        Self::parse(ObligationKind::Maintenance, r, t, d)
    }
}

impl fmt::Display for ConditionalObligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            ObligationKind::Achievement => 'a',
            ObligationKind::Maintenance => 'm',
        };
        write!(
            f,
            "O^{tag}<{},{},{}>",
            self.requirement, self.trigger, self.deadline
        )
    }
}
