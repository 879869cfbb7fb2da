//! Process trees, stems and stem pruning.

use std::collections::HashMap;

use crate::delta::{DeltaConstraint, Family};
use crate::literal::AnnotationSet;
use crate::model::{Block, BlockKind, ProcessModel, TaskIx};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf(TaskIx),
    Composite(BlockKind),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
}

/// One node per block of a model, numbered in document order.
#[derive(Debug, Clone)]
pub struct ProcessTree<'m> {
    model: &'m ProcessModel,
    nodes: Vec<Node>,
}

pub fn build_tree(model: &ProcessModel) -> ProcessTree<'_> {
    let mut nodes = Vec::with_capacity(model.root().size());
    add(&mut nodes, model.root(), None);
    ProcessTree { model, nodes }
}

fn add(nodes: &mut Vec<Node>, block: &Block, parent: Option<NodeId>) -> NodeId {
    let id = nodes.len();
    let kind = match block {
        Block::Task(t) => NodeKind::Leaf(*t),
        Block::Composite(k, _) => NodeKind::Composite(*k),
    };
    nodes.push(Node {
        kind,
        children: Vec::new(),
        parent,
    });
    if let Block::Composite(_, cs) = block {
        let ids = cs.iter().map(|c| add(nodes, c, Some(id))).collect();
        nodes[id].children = ids;
    }
    id
}

impl<'m> ProcessTree<'m> {
    pub const ROOT: NodeId = 0;

    pub fn model(&self) -> &'m ProcessModel {
        self.model
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.nodes[id].kind
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn task(&self, id: NodeId) -> Option<TaskIx> {
        match self.nodes[id].kind {
            NodeKind::Leaf(t) => Some(t),
            NodeKind::Composite(_) => None,
        }
    }

    pub fn annotation(&self, leaf: NodeId) -> Option<&'m AnnotationSet> {
        self.task(leaf).map(|t| self.model.annotation(t))
    }

    pub fn leaf_of(&self, task: TaskIx) -> Option<NodeId> {
        (0..self.nodes.len()).find(|&n| self.task(n) == Some(task))
    }

    pub fn label(&self, id: NodeId) -> String {
        match self.nodes[id].kind {
            NodeKind::Leaf(t) => self.model.task(t).id.clone(),
            NodeKind::Composite(k) => format!("{}#{id}", k.name()),
        }
    }

    /// Leaves annotating the constraint's trigger, left to right.
    pub fn trigger_leaves(&self, c: &DeltaConstraint) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&n| self.annotation(n).is_some_and(|a| a.contains(&c.t)))
            .collect()
    }

    /// Replaces every XOR on the path from the root to `leaf` by its child on
    /// that path.
    pub fn prune_stem(&self, leaf: NodeId) -> PrunedTree<'_, 'm> {
        let mut bypass = HashMap::new();
        let mut child = leaf;
        let mut cur = self.nodes[leaf].parent;
        while let Some(p) = cur {
            if self.nodes[p].kind == NodeKind::Composite(BlockKind::Xor) {
                bypass.insert(p, child);
            }
            child = p;
            cur = self.nodes[p].parent;
        }
        PrunedTree {
            tree: self,
            leaf,
            bypass,
        }
    }
}

/// A view of a process tree in which the XOR nodes on one stem are skipped.
/// Node ids are those of the underlying tree.
#[derive(Debug, Clone)]
pub struct PrunedTree<'t, 'm> {
    tree: &'t ProcessTree<'m>,
    leaf: NodeId,
    bypass: HashMap<NodeId, NodeId>,
}

/// The path from the root to a trigger leaf, with the off-path children of
/// each node on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stem {
    pub leaf: NodeId,
    pub overnodes: Vec<Overnode>,
}

/// A stem node above the leaf. `left` and `right` hold the siblings of the
/// stem child in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Overnode {
    pub node: NodeId,
    pub kind: BlockKind,
    pub stem_child: NodeId,
    pub left: Vec<NodeId>,
    pub right: Vec<NodeId>,
}

impl<'t, 'm> PrunedTree<'t, 'm> {
    pub fn tree(&self) -> &'t ProcessTree<'m> {
        self.tree
    }

    pub fn leaf(&self) -> NodeId {
        self.leaf
    }

    fn resolve(&self, mut id: NodeId) -> NodeId {
        while let Some(&c) = self.bypass.get(&id) {
            id = c;
        }
        id
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.tree.children(id).iter().map(move |&c| self.resolve(c))
    }

    pub fn root(&self) -> NodeId {
        self.resolve(ProcessTree::ROOT)
    }

    pub fn node_count(&self) -> usize {
        let mut count = 0;
        let mut todo = vec![self.root()];
        while let Some(n) = todo.pop() {
            count += 1;
            todo.extend(self.children(n));
        }
        count
    }

    /// The pruned tree as a block.
    pub fn to_block(&self) -> Block {
        self.block_of(self.root())
    }

    fn block_of(&self, id: NodeId) -> Block {
        match self.tree.kind(id) {
            NodeKind::Leaf(t) => Block::Task(t),
            NodeKind::Composite(k) => {
                Block::Composite(k, self.children(id).map(|c| self.block_of(c)).collect())
            }
        }
    }

    /// Overnodes from the leaf's parent up to the root.
    pub fn stem(&self) -> Stem {
        let mut overnodes = Vec::new();
        let mut child = self.leaf;
        let mut cur = self.tree.node(self.leaf).parent;
        while let Some(p) = cur {
            if !self.bypass.contains_key(&p) {
                let NodeKind::Composite(kind) = self.tree.kind(p) else {
                    unreachable!("parent is composite")
                };
                let cs: Vec<NodeId> = self.children(p).collect();
                let at = cs
                    .iter()
                    .position(|&c| c == child)
                    .expect("stem child present");
                overnodes.push(Overnode {
                    node: p,
                    kind,
                    stem_child: child,
                    left: cs[..at].to_vec(),
                    right: cs[at + 1..].to_vec(),
                });
                child = p;
            }
            cur = self.tree.node(p).parent;
        }
        Stem {
            leaf: self.leaf,
            overnodes,
        }
    }
}

/// Whether the trigger leaf alone rules the constraint out.
pub fn check_leaf_fail(tree: &ProcessTree<'_>, leaf: NodeId, c: &DeltaConstraint) -> bool {
    let Some(ann) = tree.annotation(leaf) else {
        return false;
    };
    match c.family {
        Family::A1S | Family::M1 => ann.contains(&c.r),
        Family::A2_1 | Family::A2_2 => ann.contains(&c.r) || ann.contains(&c.d.complement()),
        Family::M2S => ann.contains(&c.d),
        Family::A1 | Family::A2 | Family::M2 => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::translate_obligation;
    use crate::fixtures;
    use crate::model::enumerate_executions;
    use crate::obligation::ConditionalObligation;

    #[test]
    fn fig1_tree_shape() {
        let m = fixtures::fig1();
        let t = build_tree(&m);
        assert_eq!(t.len(), m.root().size());
        assert_eq!(t.len(), 9);
        let labels: Vec<String> = t
            .children(ProcessTree::ROOT)
            .iter()
            .map(|&c| t.label(c))
            .collect();
        assert_eq!(labels, ["start", "and#2", "t4", "end"]);
        let and_children: Vec<String> = t.children(2).iter().map(|&c| t.label(c)).collect();
        assert_eq!(and_children, ["xor#3", "t3"]);
    }

    #[test]
    fn single_task_tree() {
        let m = fixtures::single_task(&["a"]);
        let t = build_tree(&m);
        assert_eq!(t.children(ProcessTree::ROOT).len(), 3);
    }

    #[test]
    fn fig1_triggers_and_leaf_fail() {
        let ob = fixtures::fig1_obligation();
        let m = fixtures::fig1().specialize_for(&ob).unwrap();
        let t = build_tree(&m);
        let c = &translate_obligation(&ob)[0];
        let leaves = t.trigger_leaves(c);
        assert_eq!(
            leaves.iter().map(|&l| t.label(l)).collect::<Vec<_>>(),
            ["t2", "t3"]
        );
        assert!(check_leaf_fail(&t, leaves[0], c));
        assert!(!check_leaf_fail(&t, leaves[1], c));

        let absent = ConditionalObligation::achievement("b", "zz", "!a").unwrap();
        assert!(t
            .trigger_leaves(&translate_obligation(&absent)[0])
            .is_empty());

        let m2 = fixtures::single_task(&["t", "d"]);
        let mob = ConditionalObligation::maintenance("r", "t", "d").unwrap();
        let t2 = build_tree(&m2);
        let ms = &translate_obligation(&mob)[1];
        assert!(check_leaf_fail(&t2, t2.trigger_leaves(ms)[0], ms));
    }

    #[test]
    fn fig1_pruning() {
        let m = fixtures::fig1();
        let t = build_tree(&m);
        let t1 = t.leaf_of(m.task_index("t1").unwrap()).unwrap();
        let p = t.prune_stem(t1);
        assert_eq!(p.node_count(), t.len() - 2);
        let and_children: Vec<String> = p.children(2).map(|c| t.label(c)).collect();
        assert_eq!(and_children, ["t1", "t3"]);
        let stem = p.stem();
        assert_eq!(stem.overnodes.len(), 2);
        assert_eq!(stem.overnodes[0].kind, BlockKind::And);
        assert_eq!(stem.overnodes[1].left.len(), 1);
        assert_eq!(stem.overnodes[1].right.len(), 2);

        let t3 = t.leaf_of(m.task_index("t3").unwrap()).unwrap();
        let p3 = t.prune_stem(t3);
        assert_eq!(p3.to_block(), *m.root());

        let pruned = enumerate_executions(&p.to_block(), 100).unwrap();
        let all = m.executions(100).unwrap();
        let kept: Vec<_> = all
            .into_iter()
            .filter(|e| e.contains(m.task_index("t1").unwrap()))
            .collect();
        assert_eq!(pruned.len(), 2);
        assert!(pruned.iter().all(|e| kept.contains(e)));
    }
}
