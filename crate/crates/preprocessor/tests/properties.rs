//! Pipeline-level properties: early stopping, idempotence at fixpoint,
//! infeasible inputs, and the empty technique list.

use pb_core::{Lit, Var};
use preprocessor::{preprocess, Preprocessor, Technique, TechniqueConfig};
use proof_checker::check_proof;
use proof_log::ProofWriter;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcnf_frontend::{encode_to_pb, opt_cost_bruteforce, parse_wcnf, write_wcnf, WcnfInstance, WeightedClause};

fn random_instance(rng: &mut ChaCha8Rng) -> WcnfInstance {
    let n = rng.gen_range(2..=8);
    let clauses = (0..rng.gen_range(1..=12))
        .map(|_| {
            let lits: Vec<Lit> =
                (0..rng.gen_range(0..=3)).map(|_| Var::user(rng.gen_range(1..=n)).lit(rng.gen())).collect();
            if rng.gen_bool(0.5) {
                WeightedClause::hard(lits)
            } else {
                WeightedClause::soft(rng.gen_range(1..=6), lits)
            }
        })
        .collect();
    WcnfInstance::new(clauses)
}

fn certified(input: &WcnfInstance, output: &WcnfInstance, proof: &str) -> bool {
    let a = encode_to_pb(input);
    let b = encode_to_pb(output);
    check_proof(&a.constraints, &a.objective, proof, &b.constraints, &b.objective).is_equioptimal()
        && opt_cost_bruteforce(input).unwrap() == opt_cost_bruteforce(output).unwrap()
}

fn everything() -> TechniqueConfig {
    let mut cfg = TechniqueConfig::default();
    cfg.enabled.insert(Technique::Am1);
    cfg
}

#[test]
fn stopping_after_any_number_of_steps_stays_certified() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..80 {
        let input = random_instance(&mut rng);
        let full = preprocess(&input, &everything()).unwrap().2;
        let steps: u64 = full.applied.iter().filter(|(op, _)| op.name() != "fix_literal").map(|(_, n)| n).sum();
        for limit in 0..=steps.min(12) {
            let mut cfg = everything();
            cfg.step_limit = Some(limit);
            cfg.debug_replay = true;
            let (output, proof, _) = preprocess(&input, &cfg).unwrap();
            assert!(certified(&input, &output, &proof), "limit {limit}\n{input:?}\n{proof}");
        }
    }
}

#[test]
fn rerunning_a_stage_at_fixpoint_emits_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..150 {
        let input = random_instance(&mut rng);
        let mut cfg = everything();
        cfg.rounds = 100;
        let mut pre = Preprocessor::new(&input, cfg, ProofWriter::in_memory()).unwrap();
        pre.stage2().unwrap();
        let before = pre.proof_lines();
        pre.stage2().unwrap();
        assert_eq!(pre.proof_lines(), before, "stage 2\n{input:?}");
        pre.stage4().unwrap();
        let before = pre.proof_lines();
        pre.stage4().unwrap();
        assert_eq!(pre.proof_lines(), before, "stage 4\n{input:?}");
    }
}

#[test]
fn contradictory_units_end_with_the_empty_clause() {
    let input = parse_wcnf("h 1 0\nh -1 0\n3 1 2 0\n").unwrap();
    let cfg = TechniqueConfig { debug_replay: true, ..TechniqueConfig::default() };
    let (output, proof, stats) = preprocess(&input, &cfg).unwrap();
    assert!(stats.infeasible);
    assert_eq!(write_wcnf(&output).lines().filter(|l| !l.starts_with('c')).collect::<Vec<_>>(), ["h 0"]);
    assert!(certified(&input, &output, &proof));
}

#[test]
fn empty_technique_list_only_renames() {
    let input = parse_wcnf("h 1 2 0\n2 -1 3 0\n4 -2 0\n").unwrap();
    let (output, proof, _) = preprocess(&input, &TechniqueConfig::none()).unwrap();
    let text: Vec<String> = write_wcnf(&output).lines().filter(|l| !l.starts_with('c')).map(String::from).collect();
    assert_eq!(text, ["h 1 2 0", "h -1 3 4 0", "4 -2 0", "2 -4 0"]);
    assert!(certified(&input, &output, &proof));
}

#[test]
fn minimal_instance_has_a_trailer_only_proof() {
    let input = parse_wcnf("h 1 2 0\n3 -1 0\n").unwrap();
    let (output, proof, _) = preprocess(&input, &TechniqueConfig::none()).unwrap();
    assert_eq!(proof.lines().count(), 5, "{proof}");
    assert!(certified(&input, &output, &proof));
}

#[test]
fn same_seed_same_bytes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..50 {
        let input = random_instance(&mut rng);
        let a = preprocess(&input, &everything()).unwrap();
        let b = preprocess(&input, &everything()).unwrap();
        assert_eq!(write_wcnf(&a.0), write_wcnf(&b.0));
        assert_eq!(a.1, b.1);
    }
}
