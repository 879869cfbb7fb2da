//! Stem evaluation: polynomial search for an execution matching a failure
//! Δ-constraint, and the full-compliance decision built on it.

use std::collections::HashMap;

use thiserror::Error;

use crate::classify::{
    combine, ClassSet, Counter, Label, LabelFamily, Sign, SubtreeClassifier, TableError, TableId,
};
use crate::delta::{
    parametrise, translate_obligation, Context, DeltaConstraint, Family, InvalidContext, Pattern,
};
use crate::literal::AnnotationSet;
use crate::model::{BlockKind, ModelError, ProcessModel};
use crate::obligation::ConditionalObligation;
use crate::tree::{build_tree, check_leaf_fail, NodeId, Overnode, ProcessTree, PrunedTree};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Context(#[from] InvalidContext),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Stop walking the stem once the fulfilment label appears.
    pub early_exit: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { early_exit: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StemOutcome {
    Satisfied,
    Unsatisfied,
    LeafFail,
}

impl StemOutcome {
    pub fn name(self) -> &'static str {
        match self {
            StemOutcome::Satisfied => "satisfied",
            StemOutcome::Unsatisfied => "unsatisfied",
            StemOutcome::LeafFail => "leaf-fail",
        }
    }
}

/// One constraint evaluated along the stem of one trigger leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemEvaluation {
    pub constraint: DeltaConstraint,
    pub trigger_leaf: NodeId,
    /// Class set of the trigger leaf, then of each overnode visited.
    pub trail: Vec<(NodeId, ClassSet)>,
    pub counter: Counter,
    pub outcome: StemOutcome,
}

impl StemEvaluation {
    pub fn root_set(&self) -> Option<&ClassSet> {
        self.trail.last().map(|(_, s)| s)
    }
}

/// How a family walks the stem.
struct Plan {
    fulfilment: Label,
    seed: Pattern,
    seed_family: LabelFamily,
    left: Option<Pattern>,
    right: Option<Pattern>,
    under: Pattern,
}

fn plan(c: &DeltaConstraint) -> Result<Plan, InvalidContext> {
    let p = |ctx| parametrise(c, ctx);
    let under = p(Context::AndUndernode)?;
    Ok(match c.family {
        Family::A1S => Plan {
            fulfilment: LabelFamily::Iop.fulfilment(),
            seed: p(Context::OvernodeMain)?,
            seed_family: LabelFamily::Iop,
            left: Some(p(Context::SeqLeft)?),
            right: Some(p(Context::SeqRight)?),
            under,
        },
        Family::A2_1 | Family::A2_2 => Plan {
            fulfilment: LabelFamily::GspOver.fulfilment(),
            seed: p(Context::OvernodeMain)?,
            seed_family: LabelFamily::GspOver,
            left: Some(p(Context::SeqLeft)?),
            right: None,
            under,
        },
        Family::M1 => Plan {
            fulfilment: LabelFamily::LspOver.fulfilment(),
            seed: p(Context::OvernodeMain)?,
            seed_family: LabelFamily::LspOver,
            left: Some(p(Context::SeqLeft)?),
            right: None,
            under,
        },
        Family::M2S => Plan {
            fulfilment: LabelFamily::RspOver.fulfilment(),
            seed: p(Context::OvernodeMain)?,
            seed_family: LabelFamily::RspOver,
            left: None,
            right: Some(p(Context::SeqRight)?),
            under,
        },
        Family::A1 | Family::A2 | Family::M2 => {
            return Err(InvalidContext {
                family: c.family,
                context: Context::OvernodeMain,
            })
        }
    })
}

/// Classification of the trigger task itself. Nothing follows the trigger
/// within a matching prefix, so an `x` there only counts together with `z`.
fn seed(plan: &Plan, ann: &AnnotationSet) -> ClassSet {
    let set = crate::classify::classify_leaf(&plan.seed, ann);
    let set = match plan.seed_family {
        LabelFamily::GspOver => ClassSet::prune(set.iter().map(|l| match (l.x, l.z) {
            (Sign::Plus, Sign::Plus) => l,
            (Sign::Plus, z) => Label::pair(l.family, Sign::Zero, z).expect("pair family"),
            _ => l,
        })),
        _ => set,
    };
    retag(&set, plan.seed_family)
}

fn retag(set: &ClassSet, family: LabelFamily) -> ClassSet {
    ClassSet::prune(set.iter().map(|l| l.retag(family)))
}

/// Memoized undernode classifiers of one tree, keyed by pattern.
#[derive(Debug)]
pub struct UndernodeCache<'t, 'm> {
    tree: &'t ProcessTree<'m>,
    by_pattern: HashMap<Pattern, SubtreeClassifier<'t, 'm>>,
}

impl<'t, 'm> UndernodeCache<'t, 'm> {
    pub fn new(tree: &'t ProcessTree<'m>) -> Self {
        UndernodeCache {
            tree,
            by_pattern: HashMap::new(),
        }
    }

    fn classify(
        &mut self,
        p: &Pattern,
        node: NodeId,
        counter: &mut Counter,
    ) -> Result<ClassSet, TableError> {
        let tree = self.tree;
        self.by_pattern
            .entry(p.clone())
            .or_insert_with(|| SubtreeClassifier::new(tree, p.clone()))
            .classify(node, counter)
    }

    /// Classifies `nodes` and folds them left to right under `kind`.
    fn fold(
        &mut self,
        p: &Pattern,
        kind: BlockKind,
        nodes: &[NodeId],
        counter: &mut Counter,
    ) -> Result<Option<ClassSet>, TableError> {
        let mut acc: Option<ClassSet> = None;
        for &n in nodes {
            let cs = self.classify(p, n, counter)?;
            acc = Some(match acc {
                None => cs,
                Some(a) => {
                    crate::classify::aggregate_sets(p.label_family(), kind, &a, &cs, counter)?
                }
            });
        }
        Ok(acc)
    }
}

/// Walks the stem of `pruned` from its trigger leaf to the root.
pub fn evaluate(
    pruned: &PrunedTree<'_, '_>,
    c: &DeltaConstraint,
    options: EngineOptions,
    cache: &mut UndernodeCache<'_, '_>,
) -> Result<StemEvaluation, EngineError> {
    let tree = pruned.tree();
    let leaf = pruned.leaf();
    let mut eval = StemEvaluation {
        constraint: c.clone(),
        trigger_leaf: leaf,
        trail: Vec::new(),
        counter: Counter::default(),
        outcome: StemOutcome::LeafFail,
    };
    if check_leaf_fail(tree, leaf, c) {
        return Ok(eval);
    }
    let plan = plan(c)?;
    let ann = tree.annotation(leaf).expect("trigger leaf is a task");
    let mut set = seed(&plan, ann);
    eval.trail.push((leaf, set.clone()));
    let counter = &mut eval.counter;
    let mut hit = set.contains(plan.fulfilment);
    for over in pruned.stem().overnodes {
        if hit && options.early_exit {
            break;
        }
        set = step(&plan, c.family, &over, set, cache, counter)?;
        hit = set.contains(plan.fulfilment);
        eval.trail.push((over.node, set.clone()));
    }
    eval.outcome = if hit {
        StemOutcome::Satisfied
    } else {
        StemOutcome::Unsatisfied
    };
    Ok(eval)
}

fn step(
    plan: &Plan,
    family: Family,
    over: &Overnode,
    set: ClassSet,
    cache: &mut UndernodeCache<'_, '_>,
    counter: &mut Counter,
) -> Result<ClassSet, EngineError> {
    match over.kind {
        BlockKind::Xor => Ok(set),
        BlockKind::Seq => {
            let mut set = set;
            if let Some(p) = &plan.left {
                if let Some(a) = cache.fold(p, BlockKind::Seq, &over.left, counter)? {
                    set = match family {
                        Family::A1S => combine(TableId::IopSeqLeft, &set, &a, counter)?,
                        Family::A2_1 | Family::A2_2 => {
                            let s = retag(&set, LabelFamily::Gsp);
                            retag(
                                &combine(TableId::GspSeq, &a, &s, counter)?,
                                LabelFamily::GspOver,
                            )
                        }
                        _ => {
                            let s = retag(&set, LabelFamily::Lsp);
                            retag(
                                &combine(TableId::LspSeq, &a, &s, counter)?,
                                LabelFamily::LspOver,
                            )
                        }
                    };
                }
            }
            if let Some(p) = &plan.right {
                if let Some(a) = cache.fold(p, BlockKind::Seq, &over.right, counter)? {
                    set = match family {
                        Family::A1S => combine(TableId::IopSeqRight, &set, &a, counter)?,
                        _ => {
                            let s = retag(&set, LabelFamily::Rsp);
                            retag(
                                &combine(TableId::RspSeq, &s, &a, counter)?,
                                LabelFamily::RspOver,
                            )
                        }
                    };
                }
            }
            Ok(set)
        }
        BlockKind::And => {
            let siblings: Vec<NodeId> = over.left.iter().chain(&over.right).copied().collect();
            let Some(u) = cache.fold(&plan.under, BlockKind::And, &siblings, counter)? else {
                return Ok(set);
            };
            Ok(match family {
                Family::A1S => combine(TableId::IopAnd, &set, &u, counter)?,
                Family::A2_1 | Family::A2_2 => combine(TableId::GspOverAnd, &set, &u, counter)?,
                Family::M1 => combine(TableId::IgpOver, &set, &u, counter)?,
                _ => {
                    let s = retag(&set, LabelFamily::LspOver);
                    retag(
                        &combine(TableId::IgpOver, &s, &u, counter)?,
                        LabelFamily::RspOver,
                    )
                }
            })
        }
    }
}

/// Every trigger leaf of `c` in an obligation-specialized model, evaluated.
pub fn evaluate_all(
    tree: &ProcessTree<'_>,
    c: &DeltaConstraint,
    options: EngineOptions,
) -> Result<Vec<StemEvaluation>, EngineError> {
    let mut cache = UndernodeCache::new(tree);
    let mut out = Vec::new();
    for leaf in tree.trigger_leaves(c) {
        let ev = evaluate(&tree.prune_stem(leaf), c, options, &mut cache)?;
        let done = ev.outcome == StemOutcome::Satisfied;
        out.push(ev);
        if done && options.early_exit {
            break;
        }
    }
    Ok(out)
}

/// Whether some execution of the specialized `model` matches `c`.
pub fn stem_evaluation(
    model: &ProcessModel,
    c: &DeltaConstraint,
    options: EngineOptions,
) -> Result<bool, EngineError> {
    let tree = build_tree(model);
    Ok(evaluate_all(&tree, c, options)?
        .iter()
        .any(|e| e.outcome == StemOutcome::Satisfied))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    FullyCompliant,
    NotFullyCompliant,
}

impl Verdict {
    pub fn text(self) -> &'static str {
        match self {
            Verdict::FullyCompliant => "Fully Compliant",
            Verdict::NotFullyCompliant => "Not Fully Compliant",
        }
    }
}

/// Outcome of one constraint at one trigger leaf, with the leaf's task id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafOutcome {
    pub constraint: DeltaConstraint,
    pub trigger_task: String,
    pub outcome: StemOutcome,
    pub aggregations: usize,
    pub root: Option<ClassSet>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationReport {
    pub obligation: ConditionalObligation,
    pub outcomes: Vec<LeafOutcome>,
}

impl ObligationReport {
    /// First satisfied (constraint, trigger leaf), if any.
    pub fn witness(&self) -> Option<&LeafOutcome> {
        self.outcomes
            .iter()
            .find(|o| o.outcome == StemOutcome::Satisfied)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineReport {
    pub verdict: Verdict,
    pub obligations: Vec<ObligationReport>,
    pub nodes: usize,
    pub aggregations: usize,
    pub trigger_leaves: usize,
}

/// Decides full compliance of `model` with every obligation in `framework`.
pub fn check_full_compliance(
    model: &ProcessModel,
    framework: &[ConditionalObligation],
    options: EngineOptions,
) -> Result<EngineReport, EngineError> {
    let mut report = EngineReport {
        verdict: Verdict::FullyCompliant,
        obligations: Vec::new(),
        nodes: model.root().size(),
        aggregations: 0,
        trigger_leaves: 0,
    };
    for ob in framework {
        let m = model.specialize_for(ob)?;
        let tree = build_tree(&m);
        let mut outcomes = Vec::new();
        for c in translate_obligation(ob) {
            for ev in evaluate_all(&tree, &c, options)? {
                report.aggregations += ev.counter.0;
                report.trigger_leaves += 1;
                outcomes.push(LeafOutcome {
                    trigger_task: tree.label(ev.trigger_leaf),
                    aggregations: ev.counter.0,
                    root: ev.root_set().cloned(),
                    outcome: ev.outcome,
                    constraint: ev.constraint,
                });
            }
        }
        let o = ObligationReport {
            obligation: ob.clone(),
            outcomes,
        };
        if o.witness().is_some() {
            report.verdict = Verdict::NotFullyCompliant;
        }
        report.obligations.push(o);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::DEFAULT_EXECUTION_BUDGET;
    use crate::oracle::{classify_process_compliance, exists_match, ComplianceLevel};

    #[test]
    fn fig1_worked_example() {
        let ob = fixtures::fig1_obligation();
        let m = fixtures::fig1().specialize_for(&ob).unwrap();
        let tree = build_tree(&m);
        let c = &translate_obligation(&ob)[0];
        let evs = evaluate_all(&tree, c, EngineOptions { early_exit: false }).unwrap();
        let by_leaf: Vec<(String, StemOutcome)> = evs
            .iter()
            .map(|e| (tree.label(e.trigger_leaf), e.outcome))
            .collect();
        assert_eq!(
            by_leaf,
            [
                ("t2".to_string(), StemOutcome::LeafFail),
                ("t3".to_string(), StemOutcome::Satisfied)
            ]
        );
        let root = evs[1].root_set().unwrap();
        assert!(root.contains(LabelFamily::Iop.fulfilment()));
        assert_eq!(root.to_string(), "{x+tz+}");
    }

    #[test]
    fn fig1_report() {
        let r = check_full_compliance(
            &fixtures::fig1(),
            &[fixtures::fig1_obligation()],
            EngineOptions::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::NotFullyCompliant);
        let w = r.obligations[0].witness().unwrap();
        assert_eq!(
            (w.constraint.family, w.trigger_task.as_str()),
            (Family::A1S, "t3")
        );
        let empty =
            check_full_compliance(&fixtures::fig1(), &[], EngineOptions::default()).unwrap();
        assert_eq!(empty.verdict, Verdict::FullyCompliant);
    }

    #[test]
    fn lone_trigger_is_violation() {
        let ob = fixtures::fig1_obligation();
        let m = fixtures::single_task(&["c"]).specialize_for(&ob).unwrap();
        assert!(
            stem_evaluation(&m, &translate_obligation(&ob)[0], EngineOptions::default()).unwrap()
        );
    }

    #[test]
    fn absent_trigger_is_false() {
        let ob = ConditionalObligation::achievement("b", "zz", "!a").unwrap();
        let m = fixtures::fig1().specialize_for(&ob).unwrap();
        for c in translate_obligation(&ob) {
            assert!(!stem_evaluation(&m, &c, EngineOptions::default()).unwrap());
        }
    }

    #[test]
    fn fig1_maintenance_matches_oracle() {
        let ob = ConditionalObligation::maintenance("c", "b", "d").unwrap();
        let model = fixtures::fig1();
        let r = check_full_compliance(&model, std::slice::from_ref(&ob), EngineOptions::default())
            .unwrap();
        let v = classify_process_compliance(
            &model,
            std::slice::from_ref(&ob),
            DEFAULT_EXECUTION_BUDGET,
        )
        .unwrap();
        assert_eq!(
            r.verdict == Verdict::FullyCompliant,
            v.level == ComplianceLevel::Full
        );
        let m = model.specialize_for(&ob).unwrap();
        for c in translate_obligation(&ob) {
            assert_eq!(
                stem_evaluation(&m, &c, EngineOptions::default()).unwrap(),
                exists_match(&m, &c, DEFAULT_EXECUTION_BUDGET).unwrap(),
                "{c}"
            );
        }
    }
}
