//! Small reference models.

use std::collections::BTreeSet;

use crate::literal::{Atom, Literal, LiteralSet};
use crate::model::{Block, ProcessModel, Task};
use crate::obligation::ConditionalObligation;

fn task(id: &str, lits: &[&str]) -> Task {
    Task {
        id: id.to_string(),
        annotation: LiteralSet::from_literals(
            lits.iter().map(|s| s.parse::<Literal>().expect("literal")),
        )
        .expect("consistent annotation"),
    }
}

fn atoms_of(tasks: &[Task]) -> Vec<Atom> {
    let set: BTreeSet<Atom> = tasks
        .iter()
        .flat_map(|t| t.annotation.iter().map(|l| l.atom().clone()))
        .collect();
    set.into_iter().collect()
}

/// `SEQ(start, AND(XOR(t1{a}, t2{b,c}), t3{c,d}), t4{!a}, end)`.
pub fn fig1() -> ProcessModel {
    let tasks = vec![
        task("start", &[]),
        task("t1", &["a"]),
        task("t2", &["b", "c"]),
        task("t3", &["c", "d"]),
        task("t4", &["!a"]),
        task("end", &[]),
    ];
    let root = Block::seq(vec![
        Block::Task(0),
        Block::and(vec![
            Block::xor(vec![Block::Task(1), Block::Task(2)]),
            Block::Task(3),
        ]),
        Block::Task(4),
        Block::Task(5),
    ]);
    ProcessModel::new(atoms_of(&tasks), tasks, root, 0, 5).expect("valid model")
}

/// `O^a⟨b, c, !a⟩`.
pub fn fig1_obligation() -> ConditionalObligation {
    ConditionalObligation::achievement("b", "c", "!a").expect("literals")
}

/// `SEQ(start, t, end)` with `t` annotated by `lits`.
pub fn single_task(lits: &[&str]) -> ProcessModel {
    let tasks = vec![task("start", &[]), task("t", lits), task("end", &[])];
    let root = Block::seq(vec![Block::Task(0), Block::Task(1), Block::Task(2)]);
    ProcessModel::new(atoms_of(&tasks), tasks, root, 0, 2).expect("valid model")
}

/// A plain sequence; the first annotation belongs to the start task and the
/// last to the end task.
pub fn sequence(anns: &[&[&str]]) -> ProcessModel {
    assert!(anns.len() >= 2, "a model needs start and end");
    let n = anns.len();
    let tasks: Vec<Task> = anns
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let id = match i {
                0 => "start".to_string(),
                _ if i == n - 1 => "end".to_string(),
                _ => format!("t{i}"),
            };
            task(&id, a)
        })
        .collect();
    let root = Block::seq((0..n).map(Block::Task).collect());
    ProcessModel::new(atoms_of(&tasks), tasks, root, 0, n - 1).expect("valid model")
}

/// A model over named tasks. The first task is start, the last is end, and
/// `root` refers to tasks by position.
pub fn custom(anns: &[(&str, &[&str])], root: Block) -> ProcessModel {
    let tasks: Vec<Task> = anns.iter().map(|(id, a)| task(id, a)).collect();
    let end = tasks.len() - 1;
    ProcessModel::new(atoms_of(&tasks), tasks, root, 0, end).expect("valid model")
}
