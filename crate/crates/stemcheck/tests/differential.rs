use stemcheck::delta::translate_obligation;
use stemcheck::engine::{stem_evaluation, EngineOptions};
use stemcheck::gen::{generate_instance, GenParams};
use stemcheck::oracle::exists_match;

#[test]
fn engine_matches_oracle_per_constraint() {
    let p = GenParams::default();
    let mut mismatches = Vec::new();
    for seed in 0..3000 {
        let inst = generate_instance(seed, &p);
        for ob in &inst.obligations {
            let m = inst.model.specialize_for(ob).unwrap();
            for c in translate_obligation(ob) {
                let engine = stem_evaluation(&m, &c, EngineOptions::default()).unwrap();
                let oracle = exists_match(&m, &c, 1_000_000).unwrap();
                if engine != oracle {
                    mismatches.push(format!("seed {seed} {c}: engine {engine} oracle {oracle}"));
                }
            }
        }
    }
    assert!(
        mismatches.is_empty(),
        "{} mismatches:\n{}",
        mismatches.len(),
        mismatches[..mismatches.len().min(30)].join("\n")
    );
}
