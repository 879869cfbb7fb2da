//! JSON documents for models, obligation frameworks and check reports.

use std::fmt;
use std::fmt::Write as _;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::engine::{EngineReport, LeafOutcome};
use crate::literal::Literal;
use crate::model::{compute_trace, BlockKind, ModelError, ProcessModel, RawBlock, RawModel};
use crate::obligation::ConditionalObligation;
use crate::oracle::ComplianceVerdict;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Task annotations keyed by id, in document order. Duplicate keys are kept
/// so that validation can report them.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TaskTable(pub Vec<(String, Vec<Literal>)>);

impl Serialize for TaskTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (id, lits) in &self.0 {
            map.serialize_entry(id, lits)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for TaskTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct TableVisitor;

        impl<'de> Visitor<'de> for TableVisitor {
            type Value = TaskTable;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping task ids to literal lists")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<TaskTable, A::Error> {
                let mut out = Vec::new();
                while let Some((id, lits)) = map.next_entry::<String, Vec<Literal>>()? {
                    out.push((id, lits));
                }
                Ok(TaskTable(out))
            }
        }

        d.deserialize_map(TableVisitor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BlockDocument {
    Task { id: String },
    Seq { children: Vec<BlockDocument> },
    Xor { children: Vec<BlockDocument> },
    And { children: Vec<BlockDocument> },
}

impl From<&RawBlock> for BlockDocument {
    fn from(b: &RawBlock) -> Self {
        match b {
            RawBlock::Task(id) => BlockDocument::Task { id: id.clone() },
            RawBlock::Composite(kind, cs) => {
                let children = cs.iter().map(BlockDocument::from).collect();
                match kind {
                    BlockKind::Seq => BlockDocument::Seq { children },
                    BlockKind::Xor => BlockDocument::Xor { children },
                    BlockKind::And => BlockDocument::And { children },
                }
            }
        }
    }
}

impl BlockDocument {
    fn to_raw(&self) -> RawBlock {
        let comp = |kind, cs: &[BlockDocument]| {
            RawBlock::Composite(kind, cs.iter().map(Self::to_raw).collect())
        };
        match self {
            BlockDocument::Task { id } => RawBlock::Task(id.clone()),
            BlockDocument::Seq { children } => comp(BlockKind::Seq, children),
            BlockDocument::Xor { children } => comp(BlockKind::Xor, children),
            BlockDocument::And { children } => comp(BlockKind::And, children),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub atoms: Vec<String>,
    pub tasks: TaskTable,
    pub root: BlockDocument,
    pub start: String,
    pub end: String,
}

impl From<&ProcessModel> for ModelDocument {
    fn from(m: &ProcessModel) -> Self {
        let raw = m.to_raw();
        ModelDocument {
            atoms: raw.atoms,
            tasks: TaskTable(raw.tasks),
            root: BlockDocument::from(&raw.root),
            start: raw.start,
            end: raw.end,
        }
    }
}

impl ModelDocument {
    pub fn to_raw(&self) -> RawModel {
        RawModel {
            atoms: self.atoms.clone(),
            tasks: self.tasks.0.clone(),
            root: self.root.to_raw(),
            start: self.start.clone(),
            end: self.end.clone(),
        }
    }

    pub fn into_model(self) -> Result<ProcessModel, ModelError> {
        ProcessModel::from_raw(&self.to_raw())
    }
}

pub fn parse_model_file(bytes: &[u8]) -> Result<ProcessModel, DocumentError> {
    let doc: ModelDocument = serde_json::from_slice(bytes)?;
    Ok(doc.into_model()?)
}

pub fn print_model(m: &ProcessModel) -> String {
    serde_json::to_string_pretty(&ModelDocument::from(m)).expect("model documents serialize")
}

/// An obligation framework is a JSON array of obligations.
pub fn parse_obligations_file(bytes: &[u8]) -> Result<Vec<ConditionalObligation>, DocumentError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn print_obligations(obs: &[ConditionalObligation]) -> String {
    serde_json::to_string_pretty(obs).expect("obligations serialize")
}

/// A generated model together with its obligations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub seed: u64,
    pub model: ModelDocument,
    pub obligations: Vec<ConditionalObligation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeEntry {
    pub constraint: String,
    pub trigger: String,
    pub outcome: String,
    pub aggregations: usize,
    pub root: Vec<String>,
}

impl From<&LeafOutcome> for OutcomeEntry {
    fn from(o: &LeafOutcome) -> Self {
        OutcomeEntry {
            constraint: o.constraint.family.name().to_string(),
            trigger: o.trigger_task.clone(),
            outcome: o.outcome.name().to_string(),
            aggregations: o.aggregations,
            root: o
                .root
                .iter()
                .flat_map(|s| s.iter().map(|l| l.to_string()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObligationEntry {
    pub obligation: ConditionalObligation,
    pub outcomes: Vec<OutcomeEntry>,
    pub witness: Option<OutcomeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleWitnessEntry {
    pub obligation: ConditionalObligation,
    pub compliant: Option<Vec<String>>,
    pub violating: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSection {
    pub level: String,
    pub executions: usize,
    pub witnesses: Vec<OracleWitnessEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub nodes: usize,
    pub aggregations: usize,
    pub trigger_leaves: usize,
}

/// The outcome of one `check` run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub mode: String,
    pub verdict: String,
    pub obligations: Vec<ObligationEntry>,
    pub oracle: Option<OracleSection>,
    pub counters: Option<Counters>,
}

pub const FULLY_COMPLIANT: &str = "Fully Compliant";
pub const NOT_FULLY_COMPLIANT: &str = "Not Fully Compliant";

impl ReportDocument {
    /// Assembles a report from an engine run, an oracle run, or both. The
    /// engine verdict wins when both are present.
    pub fn new(
        mode: &str,
        model: &ProcessModel,
        framework: &[ConditionalObligation],
        engine: Option<&EngineReport>,
        oracle: Option<&ComplianceVerdict>,
    ) -> Self {
        let obligations = match engine {
            Some(r) => r
                .obligations
                .iter()
                .map(|o| ObligationEntry {
                    obligation: o.obligation.clone(),
                    outcomes: o.outcomes.iter().map(OutcomeEntry::from).collect(),
                    witness: o.witness().map(OutcomeEntry::from),
                })
                .collect(),
            None => framework
                .iter()
                .map(|ob| ObligationEntry {
                    obligation: ob.clone(),
                    outcomes: Vec::new(),
                    witness: None,
                })
                .collect(),
        };
        let ids =
            |e: &crate::model::Execution| model.ids(e).into_iter().map(str::to_string).collect();
        let oracle_section = oracle.map(|v| OracleSection {
            level: v.level.name().to_string(),
            executions: v.executions,
            witnesses: v
                .witnesses
                .iter()
                .map(|w| OracleWitnessEntry {
                    obligation: w.obligation.clone(),
                    compliant: w.compliant.as_ref().map(ids),
                    violating: w.violating.as_ref().map(ids),
                })
                .collect(),
        });
        let full = match (engine, oracle) {
            (Some(r), _) => r.verdict == crate::engine::Verdict::FullyCompliant,
            (None, Some(v)) => v.level == crate::oracle::ComplianceLevel::Full,
            (None, None) => true,
        };
        ReportDocument {
            mode: mode.to_string(),
            verdict: if full {
                FULLY_COMPLIANT
            } else {
                NOT_FULLY_COMPLIANT
            }
            .to_string(),
            obligations,
            oracle: oracle_section,
            counters: engine.map(|r| Counters {
                nodes: r.nodes,
                aggregations: r.aggregations,
                trigger_leaves: r.trigger_leaves,
            }),
        }
    }

    pub fn is_fully_compliant(&self) -> bool {
        self.verdict == FULLY_COMPLIANT
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(s)?)
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.verdict);
        for o in &self.obligations {
            match &o.witness {
                Some(w) => {
                    let _ = writeln!(
                        s,
                        "{}: violated, {} at {} (root {{{}}})",
                        o.obligation,
                        w.constraint,
                        w.trigger,
                        w.root.join(", ")
                    );
                }
                None if self.mode != "oracle" => {
                    let _ = writeln!(s, "{}: no violating execution", o.obligation);
                }
                None => {}
            }
        }
        if let Some(or) = &self.oracle {
            let _ = writeln!(s, "oracle: {} over {} executions", or.level, or.executions);
            for w in &or.witnesses {
                if let Some(v) = &w.violating {
                    let _ = writeln!(s, "{}: violated by ({})", w.obligation, v.join(","));
                }
            }
        }
        if let Some(c) = &self.counters {
            let _ = writeln!(
                s,
                "nodes {}, aggregations {}, trigger leaves {}",
                c.nodes, c.aggregations, c.trigger_leaves
            );
        }
        s
    }
}

/// One line per execution in the layout `(ids) | ((id, state), ...)`,
/// executions sorted by their task ids.
pub fn render_traces(model: &ProcessModel, limit: usize) -> Result<String, ModelError> {
    let mut rows = Vec::new();
    for exe in model.executions(limit)? {
        let trace = compute_trace(model, &exe)?;
        let ids: Vec<&str> = model.ids(&exe);
        let steps: Vec<String> = trace
            .steps
            .iter()
            .map(|st| format!("({},{})", model.task(st.task).id, st.state))
            .collect();
        rows.push((ids.join(","), steps.join(",")));
    }
    rows.sort();
    Ok(rows
        .into_iter()
        .map(|(e, t)| format!("({e}) | ({t})\n"))
        .collect())
}
