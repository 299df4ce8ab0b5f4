//! Random instances through the full pipeline. Every run must produce a
//! proof the checker accepts as equioptimal, and the brute-force optimum
//! of the output must equal that of the input.

use pb_core::{Lit, Var};
use preprocessor::{preprocess, Technique, TechniqueConfig};
use proof_checker::check_proof;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcnf_frontend::{encode_to_pb, opt_cost_bruteforce, WcnfInstance, WeightedClause};

fn random_instance(rng: &mut ChaCha8Rng, max_vars: u32, max_clauses: usize) -> WcnfInstance {
    let n = rng.gen_range(2..=max_vars);
    let m = rng.gen_range(1..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let len = rng.gen_range(0..=4);
            let lits: Vec<Lit> = (0..len).map(|_| Var::user(rng.gen_range(1..=n)).lit(rng.gen())).collect();
            if rng.gen_bool(0.55) {
                WeightedClause::hard(lits)
            } else {
                WeightedClause::soft(rng.gen_range(1..=5), lits)
            }
        })
        .collect();
    WcnfInstance::new(clauses)
}

fn run_sweep(seed: u64, runs: usize, cfg: &TechniqueConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..runs {
        let input = random_instance(&mut rng, 9, 14);
        let (output, proof, _) = preprocess(&input, cfg).unwrap_or_else(|e| panic!("run {i}: {e}\n{input:?}"));
        let a = encode_to_pb(&input);
        let b = encode_to_pb(&output);
        let v = check_proof(&a.constraints, &a.objective, &proof, &b.constraints, &b.objective);
        assert!(v.is_equioptimal(), "run {i}: {v:?}\n{input:?}\n{proof}");
        assert_eq!(
            opt_cost_bruteforce(&input).unwrap(),
            opt_cost_bruteforce(&output).unwrap(),
            "run {i}\n{input:?}\n{output:?}"
        );
    }
}

#[test]
fn all_techniques_with_replay() {
    let mut cfg = TechniqueConfig::default();
    cfg.enabled.insert(Technique::Am1);
    cfg.debug_replay = true;
    run_sweep(1, 600, &cfg);
}

#[test]
fn each_technique_alone() {
    for (k, t) in Technique::ALL.iter().enumerate() {
        let mut cfg = TechniqueConfig::with_techniques(t.name()).unwrap();
        cfg.debug_replay = true;
        run_sweep(100 + k as u64, 120, &cfg);
    }
}

#[test]
#[ignore]
fn print_coverage() {
    let mut cfg = TechniqueConfig::default();
    cfg.enabled.insert(Technique::Am1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut total = preprocessor::Stats::default();
    for _ in 0..600 {
        let input = random_instance(&mut rng, 9, 14);
        let (_, _, s) = preprocess(&input, &cfg).unwrap();
        total.merge(&s);
    }
    for (k, t) in Technique::ALL.iter().enumerate() {
        let cfg = TechniqueConfig::with_techniques(t.name()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + k as u64);
        for _ in 0..120 {
            let input = random_instance(&mut rng, 9, 14);
            let (_, _, s) = preprocess(&input, &cfg).unwrap();
            total.merge(&s);
        }
    }
    for op in preprocessor::Op::ALL {
        println!("{op}: {}", total.count(op));
    }
}
