//! Structured process models, their executions and traces.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::literal::{AnnotationSet, Atom, Literal, LiteralSet, ProcessState};
use crate::obligation::ConditionalObligation;

/// Index of a task inside its model.
pub type TaskIx = usize;

/// Default cap on the number of executions the enumerator will produce.
pub const DEFAULT_EXECUTION_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Seq,
    Xor,
    And,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Seq => "seq",
            BlockKind::Xor => "xor",
            BlockKind::And => "and",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub id: String,
    pub annotation: AnnotationSet,
}

/// A nested process block over task indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Task(TaskIx),
    Composite(BlockKind, Vec<Block>),
}

impl Block {
    pub fn seq(children: Vec<Block>) -> Block {
        Block::Composite(BlockKind::Seq, children)
    }

    pub fn xor(children: Vec<Block>) -> Block {
        Block::Composite(BlockKind::Xor, children)
    }

    pub fn and(children: Vec<Block>) -> Block {
        Block::Composite(BlockKind::And, children)
    }

    /// Number of blocks in this subtree, tasks included.
    pub fn size(&self) -> usize {
        match self {
            Block::Task(_) => 1,
            Block::Composite(_, cs) => 1 + cs.iter().map(Block::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Block::Task(_) => 0,
            Block::Composite(_, cs) => 1 + cs.iter().map(Block::depth).max().unwrap_or(0),
        }
    }

    /// Task indices in left-to-right order.
    pub fn tasks(&self) -> Vec<TaskIx> {
        let mut out = Vec::new();
        self.collect_tasks(&mut out);
        out
    }

    fn collect_tasks(&self, out: &mut Vec<TaskIx>) {
        match self {
            Block::Task(t) => out.push(*t),
            Block::Composite(_, cs) => cs.iter().for_each(|c| c.collect_tasks(out)),
        }
    }
}

/// An unvalidated model as it comes out of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawModel {
    pub atoms: Vec<String>,
    pub tasks: Vec<(String, Vec<Literal>)>,
    pub root: RawBlock,
    pub start: String,
    pub end: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawBlock {
    Task(String),
    Composite(BlockKind, Vec<RawBlock>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    #[error("duplicate task id {0:?}")]
    DuplicateTaskId(String),
    #[error("task {0:?} has an inconsistent annotation")]
    InconsistentAnnotation(String),
    #[error("composite block at {0} has fewer than two children")]
    CompositeArityBelowTwo(String),
    #[error("root must be a seq starting with the start task and ending with the end task")]
    MissingStartOrEnd,
    #[error("unresolved task reference {1:?} at {0}")]
    UnresolvedTaskRef(String, String),
    #[error("task {0:?} is never referenced")]
    UnreferencedTask(String),
    #[error("task {0:?} uses undeclared atom {1:?}")]
    UndeclaredAtom(String, String),
    #[error("invalid atom name {0:?}")]
    BadAtom(String),
}

/// Every problem found while validating a [`RawModel`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid model: {0}")]
    Invalid(ValidationReport),
    #[error("execution budget of {0} exceeded")]
    ExecutionBudgetExceeded(usize),
    #[error("unknown task index {0}")]
    UnknownTask(usize),
    #[error("obligation conflicts with the start/end annotation: {0}")]
    AssumptionConflict(String),
}

/// A validated, immutable structured process model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessModel {
    atoms: Vec<Atom>,
    tasks: Vec<Task>,
    root: Block,
    start: TaskIx,
    end: TaskIx,
}

/// Checks every structural invariant of `raw`, collecting all violations.
pub fn validate_model(raw: &RawModel) -> ValidationReport {
    build_model(raw).err().unwrap_or_default()
}

fn build_model(raw: &RawModel) -> Result<ProcessModel, ValidationReport> {
    let mut issues = Vec::new();
    let mut atoms = Vec::new();
    for a in &raw.atoms {
        match Atom::new(a) {
            Ok(atom) => atoms.push(atom),
            Err(_) => issues.push(ValidationIssue::BadAtom(a.clone())),
        }
    }
    let declared: BTreeSet<&str> = raw.atoms.iter().map(String::as_str).collect();

    let mut index: HashMap<&str, TaskIx> = HashMap::new();
    let mut tasks = Vec::new();
    for (id, lits) in &raw.tasks {
        if index.contains_key(id.as_str()) {
            issues.push(ValidationIssue::DuplicateTaskId(id.clone()));
            continue;
        }
        for l in lits {
            if !declared.contains(l.atom().name()) {
                issues.push(ValidationIssue::UndeclaredAtom(
                    id.clone(),
                    l.atom().to_string(),
                ));
            }
        }
        let annotation = match LiteralSet::from_literals(lits.iter().cloned()) {
            Ok(a) => a,
            Err(_) => {
                issues.push(ValidationIssue::InconsistentAnnotation(id.clone()));
                LiteralSet::empty()
            }
        };
        index.insert(id, tasks.len());
        tasks.push(Task {
            id: id.clone(),
            annotation,
        });
    }

    let mut refs = vec![0usize; tasks.len()];
    let root = resolve(&raw.root, "root", &index, &mut refs, &mut issues);
    for (ix, count) in refs.iter().enumerate() {
        match count {
            0 => issues.push(ValidationIssue::UnreferencedTask(tasks[ix].id.clone())),
            1 => {}
            _ => issues.push(ValidationIssue::DuplicateTaskId(tasks[ix].id.clone())),
        }
    }

    let start = index.get(raw.start.as_str()).copied();
    let end = index.get(raw.end.as_str()).copied();
    let shape_ok = match (&root, start, end) {
        (Block::Composite(BlockKind::Seq, cs), Some(s), Some(e)) => {
            s != e && cs.first() == Some(&Block::Task(s)) && cs.last() == Some(&Block::Task(e))
        }
        _ => false,
    };
    if !shape_ok {
        issues.push(ValidationIssue::MissingStartOrEnd);
    }

    if issues.is_empty() {
        Ok(ProcessModel {
            atoms,
            tasks,
            root,
            start: start.unwrap_or_default(),
            end: end.unwrap_or_default(),
        })
    } else {
        Err(ValidationReport { issues })
    }
}

fn resolve(
    raw: &RawBlock,
    path: &str,
    index: &HashMap<&str, TaskIx>,
    refs: &mut [usize],
    issues: &mut Vec<ValidationIssue>,
) -> Block {
    match raw {
        RawBlock::Task(id) => match index.get(id.as_str()) {
            Some(&ix) => {
                refs[ix] += 1;
                Block::Task(ix)
            }
            None => {
                issues.push(ValidationIssue::UnresolvedTaskRef(
                    path.to_string(),
                    id.clone(),
                ));
                Block::Task(usize::MAX)
            }
        },
        RawBlock::Composite(kind, children) => {
            if children.len() < 2 {
                issues.push(ValidationIssue::CompositeArityBelowTwo(path.to_string()));
            }
            let cs = children
                .iter()
                .enumerate()
                .map(|(i, c)| resolve(c, &format!("{path}/{i}"), index, refs, issues))
                .collect();
            Block::Composite(*kind, cs)
        }
    }
}

impl ProcessModel {
    pub fn from_raw(raw: &RawModel) -> Result<Self, ModelError> {
        build_model(raw).map_err(ModelError::Invalid)
    }

    /// Builds a model from already indexed parts; `root` must be
    /// `SEQ(start, ..., end)` over exactly the given tasks.
    pub fn new(
        atoms: Vec<Atom>,
        tasks: Vec<Task>,
        root: Block,
        start: TaskIx,
        end: TaskIx,
    ) -> Result<Self, ModelError> {
        ProcessModel::from_raw(&RawModel {
            atoms: atoms.iter().map(|a| a.to_string()).collect(),
            tasks: tasks
                .iter()
                .map(|t| (t.id.clone(), t.annotation.iter().cloned().collect()))
                .collect(),
            root: to_raw(&root, &tasks),
            start: tasks.get(start).map(|t| t.id.clone()).unwrap_or_default(),
            end: tasks.get(end).map(|t| t.id.clone()).unwrap_or_default(),
        })
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel {
            atoms: self.atoms.iter().map(|a| a.to_string()).collect(),
            tasks: self
                .tasks
                .iter()
                .map(|t| (t.id.clone(), t.annotation.iter().cloned().collect()))
                .collect(),
            root: to_raw(&self.root, &self.tasks),
            start: self.tasks[self.start].id.clone(),
            end: self.tasks[self.end].id.clone(),
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task(&self, ix: TaskIx) -> &Task {
        &self.tasks[ix]
    }

    pub fn task_index(&self, id: &str) -> Option<TaskIx> {
        self.tasks.iter().position(|t| t.id == id)
    }

    pub fn root(&self) -> &Block {
        &self.root
    }

    pub fn start(&self) -> TaskIx {
        self.start
    }

    pub fn end(&self) -> TaskIx {
        self.end
    }

    pub fn annotation(&self, ix: TaskIx) -> &AnnotationSet {
        &self.tasks[ix].annotation
    }

    /// Task ids of an execution, for display.
    pub fn ids(&self, exe: &Execution) -> Vec<&str> {
        exe.0.iter().map(|&t| self.tasks[t].id.as_str()).collect()
    }

    /// All executions of the whole model.
    pub fn executions(&self, limit: usize) -> Result<Vec<Execution>, ModelError> {
        enumerate_executions(&self.root, limit)
    }

    /// Returns a copy with `!r` added to the start task and `d` added to
    /// the end task.
    pub fn specialize_for(&self, ob: &ConditionalObligation) -> Result<Self, ModelError> {
        let mut out = self.clone();
        let start = &mut out.tasks[self.start].annotation;
        *start = start
            .with(ob.requirement.complement())
            .map_err(|_| conflict("start", self.task(self.start), &ob.requirement))?;
        let end = &mut out.tasks[self.end].annotation;
        *end = end
            .with(ob.deadline.clone())
            .map_err(|_| conflict("end", self.task(self.end), &ob.deadline.complement()))?;
        for l in [ob.requirement.atom(), ob.deadline.atom()] {
            if !out.atoms.contains(l) {
                out.atoms.push(l.clone());
            }
        }
        Ok(out)
    }
}

fn conflict(which: &str, task: &Task, lit: &Literal) -> ModelError {
    ModelError::AssumptionConflict(format!(
        "{which} task {:?} already annotates {lit}",
        task.id
    ))
}

fn to_raw(block: &Block, tasks: &[Task]) -> RawBlock {
    match block {
        Block::Task(ix) => RawBlock::Task(tasks.get(*ix).map(|t| t.id.clone()).unwrap_or_default()),
        Block::Composite(k, cs) => {
            RawBlock::Composite(*k, cs.iter().map(|c| to_raw(c, tasks)).collect())
        }
    }
}

/// Validates the model and returns its specialization for `ob`.
pub fn specialize_for_obligation(
    model: &ProcessModel,
    ob: &ConditionalObligation,
) -> Result<ProcessModel, ModelError> {
    model.specialize_for(ob)
}

/// An ordered, duplicate-free sequence of task indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Execution(pub Vec<TaskIx>);

impl Execution {
    pub fn contains(&self, t: TaskIx) -> bool {
        self.0.contains(&t)
    }
}

/// Enumerates every execution of `block`, failing once more than `limit`
/// would be produced.
pub fn enumerate_executions(block: &Block, limit: usize) -> Result<Vec<Execution>, ModelError> {
    Ok(enumerate(block, limit)?
        .into_iter()
        .map(Execution)
        .collect())
}

fn enumerate(block: &Block, limit: usize) -> Result<Vec<Vec<TaskIx>>, ModelError> {
    let over = || ModelError::ExecutionBudgetExceeded(limit);
    match block {
        Block::Task(t) => Ok(vec![vec![*t]]),
        Block::Composite(BlockKind::Xor, cs) => {
            let mut out = Vec::new();
            for c in cs {
                out.extend(enumerate(c, limit)?);
                if out.len() > limit {
                    return Err(over());
                }
            }
            Ok(out)
        }
        Block::Composite(BlockKind::Seq, cs) => {
            let mut out = vec![Vec::new()];
            for c in cs {
                let tails = enumerate(c, limit)?;
                if out.len().saturating_mul(tails.len()) > limit {
                    return Err(over());
                }
                out = out
                    .iter()
                    .flat_map(|head| {
                        tails.iter().map(move |tail| {
                            let mut e = head.clone();
                            e.extend_from_slice(tail);
                            e
                        })
                    })
                    .collect();
            }
            Ok(out)
        }
        Block::Composite(BlockKind::And, cs) => {
            let mut out = vec![Vec::new()];
            for c in cs {
                let others = enumerate(c, limit)?;
                let mut next = Vec::new();
                for a in &out {
                    for b in &others {
                        interleave(a, b, &mut Vec::new(), &mut next);
                        if next.len() > limit {
                            return Err(over());
                        }
                    }
                }
                out = next;
            }
            Ok(out)
        }
    }
}

/// Pushes every interleaving of `a` and `b` (each kept in order) onto `out`.
fn interleave(a: &[TaskIx], b: &[TaskIx], prefix: &mut Vec<TaskIx>, out: &mut Vec<Vec<TaskIx>>) {
    match (a.split_first(), b.split_first()) {
        (None, _) => {
            let mut e = prefix.clone();
            e.extend_from_slice(b);
            out.push(e);
        }
        (_, None) => {
            let mut e = prefix.clone();
            e.extend_from_slice(a);
            out.push(e);
        }
        (Some((&x, rest_a)), Some((&y, rest_b))) => {
            prefix.push(x);
            interleave(rest_a, b, prefix, out);
            prefix.pop();
            prefix.push(y);
            interleave(a, rest_b, prefix, out);
            prefix.pop();
        }
    }
}

/// One step of a trace: the executed task and the state after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub task: TaskIx,
    pub state: ProcessState,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
}

/// Folds the state update over the annotations of `exe`.
pub fn compute_trace(model: &ProcessModel, exe: &Execution) -> Result<Trace, ModelError> {
    let mut state = ProcessState::empty();
    let mut steps = Vec::with_capacity(exe.0.len());
    for &t in &exe.0 {
        let task = model.tasks.get(t).ok_or(ModelError::UnknownTask(t))?;
        state = state.update(&task.annotation);
        steps.push(Step {
            task: t,
            state: state.clone(),
        });
    }
    Ok(Trace { steps })
}
