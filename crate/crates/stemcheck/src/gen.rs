//! Seeded random models and obligations.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::literal::{Atom, Literal, LiteralSet};
use crate::model::{Block, BlockKind, ProcessModel, Task};
use crate::obligation::{ConditionalObligation, ObligationKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    /// Upper bound on tasks between start and end.
    pub max_tasks: usize,
    /// Upper bound on composite nesting, the root included.
    pub max_depth: usize,
    pub atom_count: usize,
    /// Relative weights of SEQ, XOR and AND.
    pub kind_weights: [u32; 3],
    pub obligations: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            max_tasks: 8,
            max_depth: 3,
            atom_count: 4,
            kind_weights: [1, 1, 1],
            obligations: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub seed: u64,
    pub model: ProcessModel,
    pub obligations: Vec<ConditionalObligation>,
}

const KINDS: [BlockKind; 3] = [BlockKind::Seq, BlockKind::Xor, BlockKind::And];

fn atoms(count: usize) -> Vec<Atom> {
    (0..count.max(1))
        .map(|i| {
            let name = if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("p{i}")
            };
            Atom::new(&name).expect("generated atom name")
        })
        .collect()
}

fn random_literal(rng: &mut impl Rng, atom: &Atom) -> Literal {
    Literal::new(atom.clone(), rng.gen_bool(0.5))
}

fn random_annotation(rng: &mut impl Rng, pool: &[Atom]) -> LiteralSet {
    let k = rng.gen_range(0..=pool.len().min(3));
    let lits = pool.choose_multiple(rng, k).map(|a| random_literal(rng, a));
    LiteralSet::from_literals(lits).expect("distinct atoms")
}

/// Splits `n` leaves into between 2 and 4 parts of at most `cap` each.
fn split(rng: &mut impl Rng, n: usize, cap: usize) -> Vec<usize> {
    let lo = n.div_ceil(cap).max(2);
    let k = rng.gen_range(lo..=n.min(4));
    let mut parts = vec![1; k];
    for _ in k..n {
        let open: Vec<usize> = (0..k).filter(|&i| parts[i] < cap).collect();
        parts[*open.choose(rng).expect("capacity suffices")] += 1;
    }
    parts
}

fn random_block(
    rng: &mut impl Rng,
    leaves: usize,
    depth: usize,
    kinds: &WeightedIndex<u32>,
    next: &mut usize,
) -> Block {
    if leaves == 1 {
        *next += 1;
        return Block::Task(*next - 1);
    }
    let cap = 4usize.saturating_pow(depth.saturating_sub(1) as u32);
    let kind = KINDS[kinds.sample(rng)];
    let children = split(rng, leaves, cap)
        .into_iter()
        .map(|n| random_block(rng, n, depth - 1, kinds, next))
        .collect();
    Block::Composite(kind, children)
}

/// A random model `SEQ(start, ..., end)`; start and end are unannotated.
pub fn generate_random_model(rng: &mut impl Rng, p: &GenParams) -> ProcessModel {
    let pool = atoms(p.atom_count);
    let body_depth = p.max_depth.max(2) - 1;
    let max = p
        .max_tasks
        .clamp(1, 4usize.saturating_pow(body_depth as u32));
    let n = rng.gen_range(1..=max);
    let weights = WeightedIndex::new(p.kind_weights)
        .unwrap_or_else(|_| WeightedIndex::new([1, 1, 1]).expect("weights"));
    let mut next = 1;
    let body = random_block(rng, n, body_depth, &weights, &mut next);
    let mut tasks = vec![Task {
        id: "start".into(),
        annotation: LiteralSet::empty(),
    }];
    for i in 1..=n {
        tasks.push(Task {
            id: format!("t{i}"),
            annotation: random_annotation(rng, &pool),
        });
    }
    tasks.push(Task {
        id: "end".into(),
        annotation: LiteralSet::empty(),
    });
    let mut top = vec![Block::Task(0)];
    match body {
        Block::Composite(BlockKind::Seq, cs) => top.extend(cs),
        b => top.push(b),
    }
    top.push(Block::Task(n + 1));
    ProcessModel::new(pool, tasks, Block::seq(top), 0, n + 1).expect("generated model is valid")
}

/// A random obligation over the atoms of `model`, with distinct atoms for
/// requirement, trigger and deadline when there are at least three.
pub fn random_obligation(rng: &mut impl Rng, model: &ProcessModel) -> ConditionalObligation {
    let pool = model.atoms();
    let picked: Vec<&Atom> = if pool.len() >= 3 {
        pool.choose_multiple(rng, 3).collect()
    } else {
        (0..3).map(|_| pool.choose(rng).expect("atoms")).collect()
    };
    let kind = if rng.gen_bool(0.5) {
        ObligationKind::Achievement
    } else {
        ObligationKind::Maintenance
    };
    ConditionalObligation::new(
        kind,
        random_literal(rng, picked[0]),
        random_literal(rng, picked[1]),
        random_literal(rng, picked[2]),
    )
}

/// Deterministic model and obligations for `seed`.
pub fn generate_instance(seed: u64, p: &GenParams) -> GeneratedInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = generate_random_model(&mut rng, p);
    let obligations = (0..p.obligations)
        .map(|_| random_obligation(&mut rng, &model))
        .collect();
    GeneratedInstance {
        seed,
        model,
        obligations,
    }
}

/// A balanced tree of `tasks` annotated tasks, arity 4, cycling SEQ, AND
/// and XOR by level.
pub fn balanced_model(seed: u64, tasks: usize, atom_count: usize) -> ProcessModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = atoms(atom_count);
    let n = tasks.max(1);
    fn build(lo: usize, hi: usize, level: usize) -> Block {
        if hi - lo == 1 {
            return Block::Task(lo);
        }
        let k = (hi - lo).min(4);
        let kind = [BlockKind::And, BlockKind::Seq, BlockKind::Xor][level % 3];
        let children = (0..k)
            .map(|i| {
                build(
                    lo + (hi - lo) * i / k,
                    lo + (hi - lo) * (i + 1) / k,
                    level + 1,
                )
            })
            .collect();
        Block::Composite(kind, children)
    }
    let mut all = vec![Task {
        id: "start".into(),
        annotation: LiteralSet::empty(),
    }];
    for i in 1..=n {
        all.push(Task {
            id: format!("t{i}"),
            annotation: random_annotation(&mut rng, &pool),
        });
    }
    all.push(Task {
        id: "end".into(),
        annotation: LiteralSet::empty(),
    });
    let root = Block::seq(vec![Block::Task(0), build(1, n + 1, 0), Block::Task(n + 1)]);
    ProcessModel::new(pool, all, root, 0, n + 1).expect("balanced model is valid")
}
