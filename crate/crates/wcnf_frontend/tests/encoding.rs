//! Properties of the objective-centric encoding, checked against an
//! exhaustive pseudo-Boolean optimum computed here, independently of the
//! library's own MaxSAT oracle.

use pb_core::{Assignment, BigInt, Lit, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wcnf_frontend::{cost, encode_to_pb, opt_cost_bruteforce, PbEncoding, WcnfInstance, WeightedClause};

fn random_instance(rng: &mut ChaCha8Rng, max_vars: u32, max_clauses: usize) -> WcnfInstance {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(0..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let len = rng.gen_range(0..=3);
            let lits: Vec<Lit> = (0..len).map(|_| Var::user(rng.gen_range(1..=n)).lit(rng.gen())).collect();
            if rng.gen_bool(0.4) {
                WeightedClause::hard(lits)
            } else {
                WeightedClause::soft(rng.gen_range(1..=8), lits)
            }
        })
        .collect();
    WcnfInstance::new(clauses)
}

fn clause_true(c: &WeightedClause, rho: &Assignment) -> bool {
    c.lits.iter().any(|l| rho.lit_value(*l) == Some(true))
}

fn hards_hold(inst: &WcnfInstance, rho: &Assignment) -> bool {
    inst.hards().all(|c| clause_true(c, rho))
}

fn pb_feasible(enc: &PbEncoding, rho: &Assignment) -> bool {
    enc.constraints.iter().all(|c| c.satisfies(rho).unwrap())
}

fn all_assignments(vars: &[Var]) -> impl Iterator<Item = Assignment> + '_ {
    (0u64..1 << vars.len()).map(move |mask| vars.iter().enumerate().map(|(i, v)| (*v, mask >> i & 1 == 1)).collect())
}

fn encoding_vars(inst: &WcnfInstance, enc: &PbEncoding) -> Vec<Var> {
    let mut vs: Vec<Var> = (1..=inst.num_vars).map(Var::user).collect();
    vs.extend((1..=enc.num_fresh).map(Var::fresh));
    vs
}

/// Minimum of the objective over PB solutions, by enumeration.
fn pb_optimum(inst: &WcnfInstance, enc: &PbEncoding) -> Option<BigInt> {
    let vars = encoding_vars(inst, enc);
    all_assignments(&vars).filter(|rho| pb_feasible(enc, rho)).map(|rho| enc.objective.eval(&rho).unwrap()).min()
}

#[test]
fn forward_direction_solution_extends_with_equal_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 10_000 {
        let inst = random_instance(&mut rng, 6, 8);
        let enc = encode_to_pb(&inst);
        let mut rho: Assignment = (1..=inst.num_vars).map(|i| (Var::user(i), rng.gen())).collect();
        if !hards_hold(&inst, &rho) {
            continue;
        }
        for o in &enc.origin {
            if let Some(b) = o.relax {
                rho.set(b, !clause_true(&inst.clauses[o.clause], &rho));
            }
        }
        assert!(pb_feasible(&enc, &rho), "{inst:?}");
        assert_eq!(enc.objective.eval(&rho).unwrap(), BigInt::from(cost(&rho, &inst).unwrap()), "{inst:?}");
        checked += 1;
    }
}

#[test]
fn backward_direction_pb_solution_costs_at_least_wcnf_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 10_000 {
        let inst = random_instance(&mut rng, 6, 8);
        let enc = encode_to_pb(&inst);
        let rho: Assignment = encoding_vars(&inst, &enc).into_iter().map(|v| (v, rng.gen())).collect();
        if !pb_feasible(&enc, &rho) {
            continue;
        }
        assert!(hards_hold(&inst, &rho), "{inst:?}");
        let wcnf_cost = BigInt::from(cost(&rho, &inst).unwrap());
        assert!(wcnf_cost <= enc.objective.eval(&rho).unwrap(), "{inst:?}");
        checked += 1;
    }
}

#[test]
fn encoding_optimum_equals_wcnf_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut infeasible = 0;
    for _ in 0..600 {
        let inst = random_instance(&mut rng, 10, 7);
        let enc = encode_to_pb(&inst);
        let expected = pb_optimum(&inst, &enc);
        let got = opt_cost_bruteforce(&inst).unwrap().map(BigInt::from);
        assert_eq!(got, expected, "{inst:?}");
        infeasible += expected.is_none() as usize;
    }
    assert!(infeasible > 0, "sweep never produced an infeasible instance");
}

#[test]
fn constraint_count_and_relaxation_numbering() {
    let inst = WcnfInstance::new(vec![
        WeightedClause::soft(2, vec![Lit::from_dimacs(1).unwrap(), Lit::from_dimacs(2).unwrap()]),
        WeightedClause::soft(1, vec![Lit::from_dimacs(-1).unwrap()]),
        WeightedClause::hard(vec![Lit::from_dimacs(3).unwrap()]),
        WeightedClause::soft(4, vec![]),
    ]);
    let enc = encode_to_pb(&inst);
    assert_eq!(enc.constraints.len(), 3);
    assert_eq!(enc.num_fresh, 2);
    assert_eq!(enc.origin[2].relax, Some(Var::fresh(2)));
    assert_eq!(enc.constraints[2].to_string(), "1 _b2 >= 1 ;");
    assert_eq!(enc.objective.to_string(), "min: +1 x1 +2 _b1 +4 _b2 ;");
}
