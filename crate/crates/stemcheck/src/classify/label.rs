//! Classification labels and their preference orders.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Plus, Sign::Zero, Sign::Minus];

    fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }
}

/// Label families. The `*Over` families label stem nodes, which contain the
/// trigger task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LabelFamily {
    Lsp,
    Rsp,
    Isp,
    Iop,
    Gsp,
    GspOver,
    Igp,
    LspOver,
    RspOver,
}

impl LabelFamily {
    pub fn is_pair(self) -> bool {
        matches!(
            self,
            LabelFamily::Isp | LabelFamily::Iop | LabelFamily::Gsp | LabelFamily::GspOver
        )
    }

    /// Every label of the family, best first.
    pub fn labels(self) -> Vec<Label> {
        let mut out = Vec::new();
        if self.is_pair() {
            for x in Sign::ALL {
                for z in Sign::ALL {
                    if let Some(l) = Label::pair(self, x, z) {
                        if !out.contains(&l) {
                            out.push(l);
                        }
                    }
                }
            }
        } else {
            for s in Sign::ALL {
                if let Some(l) = Label::single(self, s) {
                    out.push(l);
                }
            }
        }
        out
    }

    /// The label that leaves its partner unchanged under aggregation.
    pub fn neutral(self) -> Label {
        Label {
            family: self,
            x: Sign::Zero,
            z: Sign::Zero,
        }
    }

    /// The label whose presence at a stem node certifies a match.
    pub fn fulfilment(self) -> Label {
        Label {
            family: self,
            x: Sign::Plus,
            z: if self.is_pair() {
                Sign::Plus
            } else {
                Sign::Zero
            },
        }
    }
}

/// A classification label. Single-sign families keep their sign in `x`
/// with `z` fixed at zero. The collapsed blocking labels of the interval
/// and sequence families are stored as `(-, -)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    pub family: LabelFamily,
    pub x: Sign,
    pub z: Sign,
}

impl Label {
    pub fn single(family: LabelFamily, s: Sign) -> Option<Label> {
        if family.is_pair() || (family == LabelFamily::Igp && s == Sign::Minus) {
            return None;
        }
        Some(Label {
            family,
            x: s,
            z: Sign::Zero,
        })
    }

    /// Builds a pair label, collapsing blocked combinations where the
    /// family does so.
    pub fn pair(family: LabelFamily, x: Sign, z: Sign) -> Option<Label> {
        use Sign::*;
        let (x, z) = match (family, x, z) {
            (LabelFamily::Isp, Minus, Zero | Minus) | (LabelFamily::Isp, Zero, Minus) => {
                (Minus, Minus)
            }
            (LabelFamily::Gsp | LabelFamily::GspOver, Minus, Zero | Minus) => (Minus, Minus),
            _ => (x, z),
        };
        family.is_pair().then_some(Label { family, x, z })
    }

    pub fn sign(self) -> Sign {
        self.x
    }

    /// Same label, other family.
    pub fn retag(self, family: LabelFamily) -> Label {
        Label { family, ..self }
    }

    /// Partial order: total for single-sign families, componentwise for
    /// pairs. Labels of different families are incomparable.
    pub fn compare(self, other: Label) -> Option<Ordering> {
        if self.family != other.family {
            return None;
        }
        match (self.x.cmp(&other.x), self.z.cmp(&other.z)) {
            (a, b) if a == b => Some(a),
            (Ordering::Equal, b) => Some(b),
            (a, Ordering::Equal) => Some(a),
            _ => None,
        }
    }

    pub fn is_below(self, other: Label) -> bool {
        self.compare(other) == Some(Ordering::Less)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, z) = (self.x.symbol(), self.z.symbol());
        let blocked = self.x == Sign::Minus && self.z == Sign::Minus;
        match self.family {
            LabelFamily::Lsp => write!(f, "x{x}"),
            LabelFamily::Rsp => write!(f, "z{x}"),
            LabelFamily::Igp => write!(f, "k{x}"),
            LabelFamily::LspOver => write!(f, "x{x}t"),
            LabelFamily::RspOver => write!(f, "z{x}t"),
            LabelFamily::Iop => write!(f, "x{x}tz{z}"),
            LabelFamily::Isp | LabelFamily::Gsp if blocked => f.write_str("xz-"),
            LabelFamily::GspOver if blocked => f.write_str("xz-t"),
            LabelFamily::Isp | LabelFamily::Gsp => write!(f, "x{x}z{z}"),
            LabelFamily::GspOver => write!(f, "x{x}z{z}t"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0:?} is not a label of family {1:?}")]
pub struct LabelParseError(pub String, pub LabelFamily);

impl Label {
    /// Parses the ASCII form produced by `Display`.
    pub fn parse(family: LabelFamily, s: &str) -> Result<Label, LabelParseError> {
        family
            .labels()
            .into_iter()
            .find(|l| l.to_string() == s)
            .ok_or_else(|| LabelParseError(s.to_string(), family))
    }
}

impl FromStr for LabelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "lsp" => LabelFamily::Lsp,
            "rsp" => LabelFamily::Rsp,
            "isp" => LabelFamily::Isp,
            "iop" => LabelFamily::Iop,
            "gsp" => LabelFamily::Gsp,
            "gsp-t" => LabelFamily::GspOver,
            "igp" => LabelFamily::Igp,
            "lsp-t" => LabelFamily::LspOver,
            "rsp-t" => LabelFamily::RspOver,
            _ => return Err(format!("unknown label family {s:?}")),
        })
    }
}

/// An antichain of labels of one family.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ClassSet(SmallVec<[Label; 4]>);

impl ClassSet {
    pub fn one(l: Label) -> Self {
        ClassSet(SmallVec::from_buf_and_len([l, l, l, l], 1))
    }

    /// Keeps only the maximal labels of `labels`.
    pub fn prune<I: IntoIterator<Item = Label>>(labels: I) -> Self {
        let mut all: SmallVec<[Label; 8]> = labels.into_iter().collect();
        all.sort_unstable_by(|a, b| b.cmp(a));
        all.dedup();
        let kept: SmallVec<[Label; 4]> = all
            .iter()
            .copied()
            .filter(|l| !all.iter().any(|o| l.is_below(*o)))
            .collect();
        ClassSet(kept)
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: Label) -> bool {
        self.0.contains(&l)
    }

    pub fn iter(&self) -> impl Iterator<Item = Label> + '_ {
        self.0.iter().copied()
    }
}

impl fmt::Display for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

/// `prune_to_maximal` over a family.
pub fn prune_to_maximal(labels: &[Label]) -> ClassSet {
    ClassSet::prune(labels.iter().copied())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn isp(s: &str) -> Label {
        Label::parse(LabelFamily::Isp, s).unwrap()
    }

    #[test]
    fn family_sizes() {
        let sizes: Vec<usize> = [
            LabelFamily::Lsp,
            LabelFamily::Rsp,
            LabelFamily::Isp,
            LabelFamily::Iop,
            LabelFamily::Gsp,
            LabelFamily::GspOver,
            LabelFamily::Igp,
        ]
        .iter()
        .map(|f| f.labels().len())
        .collect();
        assert_eq!(sizes, [3, 3, 7, 9, 8, 8, 2]);
    }

    #[test]
    fn round_trip_names() {
        for fam in [
            LabelFamily::Isp,
            LabelFamily::Iop,
            LabelFamily::GspOver,
            LabelFamily::RspOver,
        ] {
            for l in fam.labels() {
                assert_eq!(Label::parse(fam, &l.to_string()).unwrap(), l);
            }
        }
        assert_eq!(isp("xz-").to_string(), "xz-");
        assert!(Label::parse(LabelFamily::Isp, "x0z-").is_err());
        assert!(Label::parse(LabelFamily::Gsp, "x0z-").is_ok());
    }

    #[test]
    fn pruning_examples() {
        assert_eq!(
            prune_to_maximal(&[isp("x0z0"), isp("xz-")]),
            ClassSet::one(isp("x0z0"))
        );
        assert_eq!(
            prune_to_maximal(&[isp("x+z0"), isp("x0z+"), isp("x0z0")]),
            ClassSet::prune([isp("x+z0"), isp("x0z+")])
        );
        let lsp = Label::parse(LabelFamily::Lsp, "x+").unwrap();
        assert_eq!(prune_to_maximal(&[lsp, lsp]), ClassSet::one(lsp));
        assert_eq!(
            prune_to_maximal(&[isp("x0z0"), isp("x+z-"), isp("x-z+")]).len(),
            3
        );
    }

    #[test]
    fn bottoms_and_tops() {
        for fam in [LabelFamily::Isp, LabelFamily::Iop, LabelFamily::Gsp] {
            let top = fam.fulfilment();
            let bottom = Label {
                family: fam,
                x: Sign::Minus,
                z: Sign::Minus,
            };
            for l in fam.labels() {
                assert!(l == top || l.is_below(top));
                assert!(l == bottom || bottom.is_below(l));
            }
        }
    }

    fn arb_labels() -> impl Strategy<Value = Vec<Label>> {
        let all = LabelFamily::Iop.labels();
        proptest::collection::vec(proptest::sample::select(all), 0..12)
    }

    proptest! {
        #[test]
        fn prune_idempotent_and_order_free(mut ls in arb_labels()) {
            let p = prune_to_maximal(&ls);
            prop_assert_eq!(prune_to_maximal(p.labels()), p.clone());
            ls.reverse();
            prop_assert_eq!(prune_to_maximal(&ls), p.clone());
            prop_assert!(p.len() <= 3);
            for a in p.iter() {
                for b in p.iter() {
                    prop_assert!(!a.is_below(b));
                }
            }
        }
    }
}
