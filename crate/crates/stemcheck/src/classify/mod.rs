//! Leaf classification and bottom-up aggregation of off-stem subtrees.

pub mod label;
pub mod tables;

use std::collections::HashMap;

use crate::delta::Pattern;
use crate::literal::AnnotationSet;
use crate::model::BlockKind;
use crate::tree::{NodeId, NodeKind, ProcessTree};

pub use label::{prune_to_maximal, ClassSet, Label, LabelFamily, LabelParseError, Sign};
pub use tables::{
    check_tables, dump_tables, table, AggregationTable, TableError, TableId, TableViolation,
};

/// Number of table cells consulted plus XOR unions performed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Counter(pub usize);

impl Pattern {
    /// Family of the labels this pattern assigns to blocks.
    pub fn label_family(&self) -> LabelFamily {
        match self {
            Pattern::Iop { .. } => LabelFamily::Iop,
            Pattern::Lsp { .. } => LabelFamily::Lsp,
            Pattern::Rsp { .. } => LabelFamily::Rsp,
            Pattern::Isp { .. } => LabelFamily::Isp,
            Pattern::Gsp { .. } => LabelFamily::Gsp,
            Pattern::Igp { .. } => LabelFamily::Igp,
        }
    }
}

fn sibling_table(family: LabelFamily, kind: BlockKind) -> Option<TableId> {
    use BlockKind::*;
    use LabelFamily::*;
    Some(match (family, kind) {
        (Lsp, Seq) => TableId::LspSeq,
        (Lsp, And) => TableId::LspAnd,
        (Rsp, Seq) => TableId::RspSeq,
        (Rsp, And) => TableId::RspAnd,
        (Isp, Seq) => TableId::IspSeq,
        (Isp, And) => TableId::IspAnd,
        (Gsp, Seq) => TableId::GspSeq,
        (Gsp, And) => TableId::GspAnd,
        (Igp, Seq) => TableId::IgpSeq,
        (Igp, And) => TableId::IgpAnd,
        _ => return None,
    })
}

/// Looks up every pair of `a × b` in table `id`, keeping the maximal results.
pub fn combine(
    id: TableId,
    a: &ClassSet,
    b: &ClassSet,
    counter: &mut Counter,
) -> Result<ClassSet, TableError> {
    let t = table(id);
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a.iter() {
        for y in b.iter() {
            out.extend(t.cell(x, y)?.iter());
        }
    }
    counter.0 += a.len() * b.len();
    Ok(ClassSet::prune(out))
}

/// Aggregates two sibling class sets of `family` under a block of `kind`.
pub fn aggregate_sets(
    family: LabelFamily,
    kind: BlockKind,
    a: &ClassSet,
    b: &ClassSet,
    counter: &mut Counter,
) -> Result<ClassSet, TableError> {
    match sibling_table(family, kind) {
        Some(id) => combine(id, a, b, counter),
        None if kind == BlockKind::Xor => {
            counter.0 += 1;
            Ok(ClassSet::prune(a.iter().chain(b.iter())))
        }
        None => Err(TableError::NoTable {
            family,
            kind: kind.name(),
        }),
    }
}

/// Classification of a single task under `p`.
pub fn classify_leaf(p: &Pattern, ann: &AnnotationSet) -> ClassSet {
    use Sign::*;
    let has = |l| ann.contains(l);
    let sign = |present: bool| if present { Plus } else { Zero };
    let pair = |fam, x, z| ClassSet::one(Label::pair(fam, x, z).expect("pair family"));
    let single = |fam, s| ClassSet::one(Label::single(fam, s).expect("single family"));
    match p {
        Pattern::Lsp { x, y } => {
            single(LabelFamily::Lsp, if has(y) { Minus } else { sign(has(x)) })
        }
        Pattern::Rsp { y, z } => {
            single(LabelFamily::Rsp, if has(y) { Minus } else { sign(has(z)) })
        }
        Pattern::Igp { k, y } => single(LabelFamily::Igp, sign(has(k) && !has(y))),
        Pattern::Iop { x, z, .. } => pair(LabelFamily::Iop, sign(has(x)), sign(has(z))),
        Pattern::Isp { x, y, z, joint } => {
            let fam = LabelFamily::Isp;
            match (has(x), has(y), has(z)) {
                (_, true, _) => pair(fam, Minus, Minus),
                (true, _, true) if *joint => pair(fam, Plus, Plus),
                (true, _, true) => ClassSet::prune([
                    Label::pair(fam, Plus, Zero).expect("isp"),
                    Label::pair(fam, Zero, Plus).expect("isp"),
                ]),
                (hx, _, hz) => pair(fam, sign(hx), sign(hz)),
            }
        }
        Pattern::Gsp { x, y, z, k } => {
            let fam = LabelFamily::Gsp;
            let zs = if has(z) {
                Plus
            } else if has(k) {
                Minus
            } else {
                Zero
            };
            if has(y) {
                pair(fam, Minus, Minus)
            } else {
                pair(fam, sign(has(x)), zs)
            }
        }
    }
}

/// Memoized classification of off-stem subtrees under one pattern.
#[derive(Debug)]
pub struct SubtreeClassifier<'t, 'm> {
    tree: &'t ProcessTree<'m>,
    pattern: Pattern,
    memo: HashMap<NodeId, ClassSet>,
}

impl<'t, 'm> SubtreeClassifier<'t, 'm> {
    pub fn new(tree: &'t ProcessTree<'m>, pattern: Pattern) -> Self {
        SubtreeClassifier {
            tree,
            pattern,
            memo: HashMap::new(),
        }
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    /// Classifies the subtree rooted at `node`, folding children left to
    /// right. Work on memoized nodes is not counted again.
    pub fn classify(
        &mut self,
        node: NodeId,
        counter: &mut Counter,
    ) -> Result<ClassSet, TableError> {
        if let Some(c) = self.memo.get(&node) {
            return Ok(c.clone());
        }
        let set = match self.tree.kind(node) {
            NodeKind::Leaf(t) => classify_leaf(&self.pattern, self.tree.model().annotation(t)),
            NodeKind::Composite(kind) => {
                let fam = self.pattern.label_family();
                let children = self.tree.children(node).to_vec();
                let mut acc: Option<ClassSet> = None;
                for c in children {
                    let cs = self.classify(c, counter)?;
                    acc = Some(match acc {
                        None => cs,
                        Some(a) => aggregate_sets(fam, kind, &a, &cs, counter)?,
                    });
                }
                acc.unwrap_or_else(|| ClassSet::one(fam.neutral()))
            }
        };
        self.memo.insert(node, set.clone());
        Ok(set)
    }
}

/// One-shot subtree classification.
pub fn classify_subtree(
    tree: &ProcessTree<'_>,
    p: &Pattern,
    node: NodeId,
) -> Result<ClassSet, TableError> {
    SubtreeClassifier::new(tree, p.clone()).classify(node, &mut Counter::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::literal::{Literal, LiteralSet};
    use crate::tree::build_tree;

    fn lit(s: &str) -> Literal {
        s.parse().unwrap()
    }

    fn ann(ls: &[&str]) -> AnnotationSet {
        LiteralSet::from_literals(ls.iter().map(|s| lit(s))).unwrap()
    }

    fn isp_fig1() -> Pattern {
        Pattern::Isp {
            x: lit("!b"),
            y: lit("b"),
            z: lit("!a"),
            joint: false,
        }
    }

    fn one(fam: LabelFamily, s: &str) -> ClassSet {
        ClassSet::one(Label::parse(fam, s).unwrap())
    }

    #[test]
    fn fig1_leaves() {
        assert_eq!(
            classify_leaf(&isp_fig1(), &ann(&["a"])),
            one(LabelFamily::Isp, "x0z0")
        );
        assert_eq!(
            classify_leaf(&isp_fig1(), &ann(&["b", "c"])),
            one(LabelFamily::Isp, "xz-")
        );
        let lsp = Pattern::Lsp {
            x: lit("!b"),
            y: lit("b"),
        };
        assert_eq!(
            classify_leaf(&lsp, &ann(&["!b"])),
            one(LabelFamily::Lsp, "x+")
        );
    }

    #[test]
    fn fig1_xor_subtree() {
        let m = fixtures::fig1();
        let t = build_tree(&m);
        assert_eq!(
            classify_subtree(&t, &isp_fig1(), 3).unwrap(),
            one(LabelFamily::Isp, "x0z0")
        );
    }

    #[test]
    fn leaf_rules_for_each_family() {
        let (x, y, z, k) = (lit("a"), lit("b"), lit("c"), lit("!c"));
        let gsp = Pattern::Gsp {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            k: k.clone(),
        };
        let g = |ls: &[&str]| classify_leaf(&gsp, &ann(ls)).to_string();
        assert_eq!(g(&["b", "c"]), "{xz-}");
        assert_eq!(g(&["b"]), "{xz-}");
        assert_eq!(g(&["a", "!c"]), "{x+z-}");
        assert_eq!(g(&["!c"]), "{x0z-}");
        assert_eq!(g(&[]), "{x0z0}");
        let isp = |joint| Pattern::Isp {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
            joint,
        };
        assert_eq!(
            classify_leaf(&isp(false), &ann(&["a", "c"])).to_string(),
            "{x+z0, x0z+}"
        );
        assert_eq!(
            classify_leaf(&isp(true), &ann(&["a", "c"])).to_string(),
            "{x+z+}"
        );
        assert_eq!(
            classify_leaf(&isp(true), &ann(&["b", "c"])).to_string(),
            "{xz-}"
        );
        assert_eq!(
            classify_leaf(&isp(false), &ann(&["b", "c"])).to_string(),
            "{xz-}"
        );
        let igp = Pattern::Igp {
            k: x.clone(),
            y: y.clone(),
        };
        assert_eq!(classify_leaf(&igp, &ann(&["a"])).to_string(), "{k+}");
        assert_eq!(classify_leaf(&igp, &ann(&["a", "b"])).to_string(), "{k0}");
        let rsp = Pattern::Rsp {
            y: y.clone(),
            z: z.clone(),
        };
        assert_eq!(classify_leaf(&rsp, &ann(&["b", "c"])).to_string(), "{z-}");
    }

    #[test]
    fn xor_is_union_and_counted() {
        let mut n = Counter::default();
        let a = one(LabelFamily::Isp, "x0z0");
        let b = one(LabelFamily::Isp, "xz-");
        assert_eq!(
            aggregate_sets(LabelFamily::Isp, BlockKind::Xor, &a, &b, &mut n).unwrap(),
            a
        );
        assert_eq!(n, Counter(1));
        let c = ClassSet::prune([
            Label::parse(LabelFamily::Isp, "x+z0").unwrap(),
            Label::parse(LabelFamily::Isp, "x0z+").unwrap(),
        ]);
        let r = aggregate_sets(LabelFamily::Isp, BlockKind::And, &c, &c, &mut n).unwrap();
        assert_eq!(r, one(LabelFamily::Isp, "x+z+"));
        assert_eq!(n, Counter(5));
    }
}
