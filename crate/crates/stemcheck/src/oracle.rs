//! Brute-force compliance semantics over traces.
//!
//! An interval opens at every position whose task annotates the trigger.
//! For achievement it closes at the first position at or after the trigger
//! whose state contains the deadline, and complies when the requirement
//! holds in some state of the closed range. For maintenance it closes at
//! the first position at or after the trigger whose task annotates the
//! deadline; the requirement must hold at the trigger and at every position
//! strictly between trigger and closing task.

use crate::delta::{self, DeltaConstraint};
use crate::literal::{AnnotationSet, ProcessState};
use crate::model::{compute_trace, Execution, ModelError, ProcessModel, Trace};
use crate::obligation::{ConditionalObligation, ObligationKind};

/// Positions of one in-force interval. `close` is `None` when the
/// deadline is never reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InForceInterval {
    pub trigger: usize,
    pub close: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCheck {
    pub intervals: Vec<InForceInterval>,
    pub violated: Vec<InForceInterval>,
}

impl TraceCheck {
    pub fn complies(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Checks one trace of `model` against `ob`.
pub fn trace_complies(
    trace: &Trace,
    model: &ProcessModel,
    ob: &ConditionalObligation,
) -> TraceCheck {
    let anns: Vec<&AnnotationSet> = trace
        .steps
        .iter()
        .map(|s| model.annotation(s.task))
        .collect();
    let states: Vec<&ProcessState> = trace.steps.iter().map(|s| &s.state).collect();
    sequence_complies(&anns, &states, ob)
}

/// Interval semantics over parallel slices of task annotations and the
/// states they produce.
pub fn sequence_complies(
    anns: &[&AnnotationSet],
    states: &[&ProcessState],
    ob: &ConditionalObligation,
) -> TraceCheck {
    let n = anns.len();
    let r_holds: Vec<bool> = states.iter().map(|s| s.contains(&ob.requirement)).collect();
    let mut intervals = Vec::new();
    let mut violated = Vec::new();
    for i in (0..n).filter(|&i| anns[i].contains(&ob.trigger)) {
        let (close, ok) = match ob.kind {
            ObligationKind::Achievement => {
                let close = (i..n).find(|&j| states[j].contains(&ob.deadline));
                let last = close.unwrap_or(n - 1);
                (close, (i..=last).any(|k| r_holds[k]))
            }
            ObligationKind::Maintenance => {
                let close = (i..n).find(|&j| anns[j].contains(&ob.deadline));
                let last = close.unwrap_or(n);
                (close, r_holds[i] && (i + 1..last).all(|k| r_holds[k]))
            }
        };
        let iv = InForceInterval { trigger: i, close };
        intervals.push(iv);
        if !ok {
            violated.push(iv);
        }
    }
    TraceCheck {
        intervals,
        violated,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComplianceLevel {
    Full,
    Partial,
    NonCompliant,
}

impl ComplianceLevel {
    pub fn name(self) -> &'static str {
        match self {
            ComplianceLevel::Full => "full",
            ComplianceLevel::Partial => "partial",
            ComplianceLevel::NonCompliant => "non-compliant",
        }
    }
}

/// First compliant and first violating execution found for one obligation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObligationWitness {
    pub obligation: ConditionalObligation,
    pub compliant: Option<Execution>,
    pub violating: Option<Execution>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplianceVerdict {
    pub level: ComplianceLevel,
    pub executions: usize,
    pub witnesses: Vec<ObligationWitness>,
}

/// Classifies `model` against every obligation by exhaustive enumeration.
pub fn classify_process_compliance(
    model: &ProcessModel,
    obs: &[ConditionalObligation],
    limit: usize,
) -> Result<ComplianceVerdict, ModelError> {
    let exes = model.executions(limit)?;
    let specialized = obs
        .iter()
        .map(|ob| model.specialize_for(ob))
        .collect::<Result<Vec<_>, _>>()?;
    let mut witnesses: Vec<ObligationWitness> = obs
        .iter()
        .map(|ob| ObligationWitness {
            obligation: ob.clone(),
            compliant: None,
            violating: None,
        })
        .collect();
    let (mut any_ok, mut any_bad) = (false, false);
    for exe in &exes {
        let mut all = true;
        for ((ob, m), w) in obs.iter().zip(&specialized).zip(witnesses.iter_mut()) {
            let trace = compute_trace(m, exe)?;
            if trace_complies(&trace, m, ob).complies() {
                w.compliant.get_or_insert_with(|| exe.clone());
            } else {
                w.violating.get_or_insert_with(|| exe.clone());
                all = false;
            }
        }
        any_ok |= all;
        any_bad |= !all;
    }
    let level = match (any_ok, any_bad) {
        (_, false) => ComplianceLevel::Full,
        (true, true) => ComplianceLevel::Partial,
        (false, true) => ComplianceLevel::NonCompliant,
    };
    Ok(ComplianceVerdict {
        level,
        executions: exes.len(),
        witnesses,
    })
}

/// Whether the task sequence `exe` of `model` matches `c`.
pub fn trace_matches_delta(exe: &Execution, model: &ProcessModel, c: &DeltaConstraint) -> bool {
    let masks = delta::project_all(exe.0.iter().map(|&t| model.annotation(t)), c);
    delta::matches(&masks, c.family)
}

/// Whether some execution of `model` matches `c`.
pub fn exists_match(
    model: &ProcessModel,
    c: &DeltaConstraint,
    limit: usize,
) -> Result<bool, ModelError> {
    Ok(model
        .executions(limit)?
        .iter()
        .any(|e| trace_matches_delta(e, model, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delta::{translate_obligation, Family};
    use crate::fixtures;
    use crate::model::DEFAULT_EXECUTION_BUDGET;

    fn exe(m: &ProcessModel, ids: &[&str]) -> Execution {
        Execution(ids.iter().map(|id| m.task_index(id).unwrap()).collect())
    }

    #[test]
    fn fig1_rows() {
        let ob = fixtures::fig1_obligation();
        let m = fixtures::fig1().specialize_for(&ob).unwrap();
        let row1 = compute_trace(&m, &exe(&m, &["start", "t1", "t3", "t4", "end"])).unwrap();
        let check = trace_complies(&row1, &m, &ob);
        assert!(!check.complies());
        assert_eq!(
            check.violated,
            vec![InForceInterval {
                trigger: 2,
                close: Some(3)
            }]
        );
        let row2 = compute_trace(&m, &exe(&m, &["start", "t2", "t3", "t4", "end"])).unwrap();
        assert!(trace_complies(&row2, &m, &ob).complies());
    }

    #[test]
    fn vacuous_when_untriggered() {
        let ob = ConditionalObligation::achievement("b", "zz", "!a").unwrap();
        let m = fixtures::fig1().specialize_for(&ob).unwrap();
        for e in m.executions(100).unwrap() {
            assert!(trace_complies(&compute_trace(&m, &e).unwrap(), &m, &ob).complies());
        }
    }

    #[test]
    fn fig1_partial() {
        let m = fixtures::fig1();
        let v = classify_process_compliance(
            &m,
            &[fixtures::fig1_obligation()],
            DEFAULT_EXECUTION_BUDGET,
        )
        .unwrap();
        assert_eq!(v.level, ComplianceLevel::Partial);
        assert_eq!(v.executions, 4);
        let v = classify_process_compliance(&m, &[], DEFAULT_EXECUTION_BUDGET).unwrap();
        assert_eq!(v.level, ComplianceLevel::Full);
    }

    #[test]
    fn lone_trigger_is_non_compliant() {
        let m = fixtures::single_task(&["c"]);
        let v = classify_process_compliance(&m, &[fixtures::fig1_obligation()], 10).unwrap();
        assert_eq!(v.level, ComplianceLevel::NonCompliant);
    }

    #[test]
    fn fig1_row3_matches_simplified() {
        let ob = fixtures::fig1_obligation();
        let m = fixtures::fig1().specialize_for(&ob).unwrap();
        let e = exe(&m, &["start", "t3", "t1", "t4", "end"]);
        let c = &translate_obligation(&ob)[0];
        assert_eq!(c.family, Family::A1S);
        assert!(trace_matches_delta(&e, &m, c));
        let untriggered = ConditionalObligation::achievement("b", "zz", "!a").unwrap();
        assert!(!trace_matches_delta(
            &e,
            &m,
            &translate_obligation(&untriggered)[0]
        ));
    }

    #[test]
    fn maintenance_persisting_deadline_does_not_close() {
        // d set before the trigger, r holds at the trigger, then !r before
        // the next task annotating d: a violation
        let m = fixtures::sequence(&[&["!r"], &["d"], &["t", "r"], &["!r"], &["d"]]);
        let ob = ConditionalObligation::maintenance("r", "t", "d").unwrap();
        let v = classify_process_compliance(&m, &[ob], 10).unwrap();
        assert_eq!(v.level, ComplianceLevel::NonCompliant);
    }

    #[test]
    fn maintenance_closing_task_not_checked() {
        let m = fixtures::sequence(&[&["!r"], &["t", "r"], &["!r", "d"]]);
        let ob = ConditionalObligation::maintenance("r", "t", "d").unwrap();
        let v = classify_process_compliance(&m, &[ob], 10).unwrap();
        assert_eq!(v.level, ComplianceLevel::Full);
    }
}
