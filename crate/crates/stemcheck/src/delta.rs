//! Failure Δ-constraints: translation from obligations, pattern
//! parametrisation, and direct matching over task sequences.

use std::fmt;

use thiserror::Error;

use crate::literal::{AnnotationSet, Literal};
use crate::obligation::{ConditionalObligation, ObligationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A1,
    A1S,
    A2,
    A2_1,
    A2_2,
    M1,
    M2,
    M2S,
}

impl Family {
    pub const ENGINE: [Family; 5] = [
        Family::A1S,
        Family::A2_1,
        Family::A2_2,
        Family::M1,
        Family::M2S,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::A1 => "AD1",
            Family::A1S => "AD1S",
            Family::A2 => "AD2",
            Family::A2_1 => "AD2.1",
            Family::A2_2 => "AD2.2",
            Family::M1 => "MD1",
            Family::M2 => "MD2",
            Family::M2S => "MD2S",
        }
    }

    pub fn is_engine_facing(self) -> bool {
        Family::ENGINE.contains(&self)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A failure pattern over the literals of one obligation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DeltaConstraint {
    pub family: Family,
    pub r: Literal,
    pub t: Literal,
    pub d: Literal,
}

impl DeltaConstraint {
    pub fn new(family: Family, ob: &ConditionalObligation) -> Self {
        DeltaConstraint {
            family,
            r: ob.requirement.clone(),
            t: ob.trigger.clone(),
            d: ob.deadline.clone(),
        }
    }
}

impl fmt::Display for DeltaConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<{},{},{}>", self.family, self.r, self.t, self.d)
    }
}

/// Engine-facing constraints of an obligation.
pub fn translate_obligation(ob: &ConditionalObligation) -> Vec<DeltaConstraint> {
    let families: &[Family] = match ob.kind {
        ObligationKind::Achievement => &[Family::A1S, Family::A2_1, Family::A2_2],
        ObligationKind::Maintenance => &[Family::M1, Family::M2S],
    };
    families
        .iter()
        .map(|&f| DeltaConstraint::new(f, ob))
        .collect()
}

/// The unsimplified constraints of an obligation, for the oracle only.
pub fn raw_constraints(ob: &ConditionalObligation) -> Vec<DeltaConstraint> {
    let families: &[Family] = match ob.kind {
        ObligationKind::Achievement => &[Family::A1, Family::A2],
        ObligationKind::Maintenance => &[Family::M1, Family::M2],
    };
    families
        .iter()
        .map(|&f| DeltaConstraint::new(f, ob))
        .collect()
}

/// Where on the stem a pattern is being evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Context {
    OvernodeMain,
    SeqLeft,
    SeqRight,
    AndUndernode,
}

/// A generic pattern instantiated with literals.
///
/// `Isp::joint` marks interval sub-patterns whose two ends may be supplied
/// by the same task; this is the case when they feed a sequence pattern,
/// which only looks at the part of an execution preceding the trigger.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Iop {
        x: Literal,
        y: Literal,
        z: Literal,
    },
    Lsp {
        x: Literal,
        y: Literal,
    },
    Rsp {
        y: Literal,
        z: Literal,
    },
    Isp {
        x: Literal,
        y: Literal,
        z: Literal,
        joint: bool,
    },
    Gsp {
        x: Literal,
        y: Literal,
        z: Literal,
        k: Literal,
    },
    Igp {
        k: Literal,
        y: Literal,
    },
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Iop { x, y, z } => write!(f, "iop({x},{y},{z})"),
            Pattern::Lsp { x, y } => write!(f, "lsp({x},{y})"),
            Pattern::Rsp { y, z } => write!(f, "rsp({y},{z})"),
            Pattern::Isp { x, y, z, .. } => write!(f, "isp({x},{y},{z})"),
            Pattern::Gsp { x, y, z, k } => write!(f, "gsp({x},{y},{z},{k})"),
            Pattern::Igp { k, y } => write!(f, "igp({k},{y})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{family} has no pattern for context {context:?}")]
pub struct InvalidContext {
    pub family: Family,
    pub context: Context,
}

pub fn parametrise(c: &DeltaConstraint, context: Context) -> Result<Pattern, InvalidContext> {
    let (r, nr, d, nd) = (c.r.clone(), c.r.complement(), c.d.clone(), c.d.complement());
    let gsp = |x: &Literal, y: &Literal, z: &Literal, k: &Literal| match context {
        Context::OvernodeMain | Context::SeqLeft => Some(Pattern::Gsp {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            k: k.clone(),
        }),
        Context::AndUndernode => Some(Pattern::Isp {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            joint: true,
        }),
        Context::SeqRight => None,
    };
    let pattern = match (c.family, context) {
        (Family::A1S, Context::OvernodeMain) => Some(Pattern::Iop { x: nr, y: r, z: d }),
        (Family::A1S, Context::SeqLeft) => Some(Pattern::Lsp { x: nr, y: r }),
        (Family::A1S, Context::SeqRight) => Some(Pattern::Rsp { y: r, z: d }),
        (Family::A1S, Context::AndUndernode) => Some(Pattern::Isp {
            x: nr,
            y: r,
            z: d,
            joint: false,
        }),
        (Family::A2_1, _) => gsp(&nr, &r, &d, &nd),
        (Family::A2_2, _) => gsp(&d, &nd, &nr, &r),
        (Family::M1, Context::OvernodeMain | Context::SeqLeft) => {
            Some(Pattern::Lsp { x: nr, y: r })
        }
        (Family::M1, Context::AndUndernode) => Some(Pattern::Igp { k: nr, y: r }),
        (Family::M2S, Context::OvernodeMain | Context::SeqRight) => {
            Some(Pattern::Rsp { y: d, z: nr })
        }
        (Family::M2S, Context::AndUndernode) => Some(Pattern::Igp { k: nr, y: d }),
        _ => None,
    };
    pattern.ok_or(InvalidContext {
        family: c.family,
        context,
    })
}

/// Per-task membership of the obligation's literals, packed into bits.
pub type Mask = u8;
pub const R: Mask = 1;
pub const NOT_R: Mask = 2;
pub const T: Mask = 4;
pub const D: Mask = 8;
pub const NOT_D: Mask = 16;

/// Projects an annotation onto the literals `r, !r, t, d, !d`.
pub fn project(ann: &AnnotationSet, r: &Literal, t: &Literal, d: &Literal) -> Mask {
    let mut m = 0;
    if ann.contains(r) {
        m |= R;
    }
    if ann.contains(&r.complement()) {
        m |= NOT_R;
    }
    if ann.contains(t) {
        m |= T;
    }
    if ann.contains(d) {
        m |= D;
    }
    if ann.contains(&d.complement()) {
        m |= NOT_D;
    }
    m
}

struct Seq<'a>(&'a [Mask]);

impl Seq<'_> {
    fn at(&self, i: usize, bit: Mask) -> bool {
        self.0[i] & bit != 0
    }

    fn positions(&self, bit: Mask) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len()).filter(move |&i| self.0[i] & bit != 0)
    }

    /// No task in the closed range `[lo, hi]` carries `bit`.
    fn none(&self, bit: Mask, lo: usize, hi: usize) -> bool {
        lo > hi || (lo..=hi).all(|i| !self.at(i, bit))
    }

    /// Some task `p ≤ tt` carries `set` with nothing carrying `unset` in `[p, tt]`.
    fn holds_at(&self, set: Mask, unset: Mask, tt: usize) -> bool {
        (0..=tt).any(|p| self.at(p, set) && self.none(unset, p, tt))
    }
}

/// Whether the task sequence (given as projected masks) matches `family`.
pub fn matches(masks: &[Mask], family: Family) -> bool {
    let s = Seq(masks);
    let n = masks.len();
    let found = s.positions(T).any(|tt| match family {
        Family::A1 => {
            !s.holds_at(D, NOT_D, tt)
                && s.positions(NOT_R)
                    .filter(|&a| a <= tt)
                    .any(|a| (tt..n).any(|b| s.at(b, D) && s.none(R, a, b)))
        }
        Family::A1S => s
            .positions(NOT_R)
            .filter(|&a| a <= tt)
            .any(|a| (tt..n).any(|b| s.at(b, D) && s.none(R, a, b))),
        Family::A2 => s.holds_at(NOT_R, R, tt) && s.holds_at(D, NOT_D, tt),
        Family::A2_1 => (0..=tt).any(|a| {
            s.at(a, NOT_R)
                && s.none(R, a, tt)
                && (a..=tt).any(|b| s.at(b, D) && s.none(NOT_D, b, tt))
        }),
        Family::A2_2 => (0..=tt).any(|a| {
            s.at(a, D)
                && s.none(NOT_D, a, tt)
                && (a..=tt).any(|b| s.at(b, NOT_R) && s.none(R, b, tt))
        }),
        Family::M1 => s.holds_at(NOT_R, R, tt),
        Family::M2 => {
            s.holds_at(R, NOT_R, tt)
                && (tt..n)
                    .filter(|&b| s.at(b, D))
                    .all(|b| (tt..b).any(|a| s.at(a, NOT_R)))
        }
        Family::M2S => (tt..n).any(|a| s.at(a, NOT_R) && s.none(D, tt, a)),
    });
    found
}

/// Projects the annotations of a task sequence for `c`.
pub fn project_all<'a, I>(annotations: I, c: &DeltaConstraint) -> Vec<Mask>
where
    I: IntoIterator<Item = &'a AnnotationSet>,
{
    annotations
        .into_iter()
        .map(|a| project(a, &c.r, &c.t, &c.d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ob() -> ConditionalObligation {
        fixtures::fig1_obligation()
    }

    #[test]
    fn translation_shapes() {
        let a = translate_obligation(&ob());
        assert_eq!(
            a.iter().map(|c| c.family).collect::<Vec<_>>(),
            vec![Family::A1S, Family::A2_1, Family::A2_2]
        );
        assert!(a
            .iter()
            .all(|c| c.r.to_string() == "b" && c.t.to_string() == "c" && c.d.to_string() == "!a"));
        let m = ConditionalObligation::maintenance("r", "t", "d").unwrap();
        assert_eq!(translate_obligation(&m).len(), 2);
        assert_eq!(translate_obligation(&m), translate_obligation(&m));
    }

    #[test]
    fn parametrise_examples() {
        let lit = |s: &str| -> Literal { s.parse().unwrap() };
        let c = DeltaConstraint::new(Family::A1S, &ob());
        assert_eq!(
            parametrise(&c, Context::AndUndernode).unwrap(),
            Pattern::Isp {
                x: lit("!b"),
                y: lit("b"),
                z: lit("!a"),
                joint: false
            }
        );
        let c = DeltaConstraint::new(Family::A2_2, &ob());
        assert_eq!(
            parametrise(&c, Context::OvernodeMain).unwrap(),
            Pattern::Gsp {
                x: lit("!a"),
                y: lit("a"),
                z: lit("!b"),
                k: lit("b")
            }
        );
        let m = ConditionalObligation::maintenance("r", "t", "d").unwrap();
        let c = DeltaConstraint::new(Family::M2S, &m);
        assert_eq!(
            parametrise(&c, Context::AndUndernode).unwrap(),
            Pattern::Igp {
                k: lit("!r"),
                y: lit("d")
            }
        );
        assert!(parametrise(&c, Context::SeqLeft).is_err());
        assert!(parametrise(&DeltaConstraint::new(Family::A1, &m), Context::OvernodeMain).is_err());
    }

    #[test]
    fn fig1_row3_matches_a1s() {
        // start{!b} t3{c,d} t1{a} t4{!a} end{!a}
        let seq = [NOT_R, T, 0, D, D];
        assert!(matches(&seq, Family::A1S));
        assert!(!matches(&[NOT_R, 0, D], Family::A1S));
    }

    #[test]
    fn a2_parts() {
        // deadline holds at the trigger, requirement does not
        let seq = [NOT_R, D, T, D];
        assert!(matches(&seq, Family::A2));
        assert!(matches(&seq, Family::A2_1));
        assert!(!matches(&seq, Family::A2_2));
        let seq = [NOT_R | D, T, D];
        assert!(matches(&seq, Family::A2_1) && matches(&seq, Family::A2_2));
        let seq = [D, NOT_R, T, D];
        assert!(!matches(&seq, Family::A2_1) && matches(&seq, Family::A2_2));
    }

    #[test]
    fn m2s_blocked_by_deadline() {
        assert!(matches(&[NOT_R, R | T, NOT_R, D], Family::M2S));
        assert!(!matches(&[NOT_R, R | T, D, NOT_R, D], Family::M2S));
        assert!(!matches(&[NOT_R, R | T, D | NOT_R], Family::M2S));
    }
}
