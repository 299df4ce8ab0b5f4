//! Small instances on which one technique is known to apply, randomized by
//! variable permutation, polarity flips, weights and unrelated noise clauses.

#![allow(dead_code)]

use pb_core::{Lit, Var};
use preprocessor::Op;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use wcnf_frontend::{WcnfInstance, WeightedClause};

pub struct Gadget {
    pub name: &'static str,
    /// Operation the gadget is built to trigger.
    pub op: Op,
    /// Technique list passed to the preprocessor.
    pub techniques: &'static str,
    build: fn(&mut ChaCha8Rng) -> Vec<Raw>,
}

/// A weight and DIMACS literals; weight 0 marks a hard clause.
type Raw = (u64, Vec<i64>);

fn h(lits: &[i64]) -> Raw {
    (0, lits.to_vec())
}

fn s(w: u64, lits: &[i64]) -> Raw {
    (w, lits.to_vec())
}

fn w(rng: &mut ChaCha8Rng) -> u64 {
    rng.gen_range(1..=8)
}

pub const GADGETS: &[Gadget] = &[
    Gadget {
        name: "hard duplicates",
        op: Op::RemoveDuplicates,
        techniques: "dup",
        build: |r| vec![h(&[1, 2]), h(&[2, 1]), s(w(r), &[1, 2]), s(w(r), &[-1])],
    },
    Gadget {
        name: "soft duplicates",
        op: Op::RemoveDuplicates,
        techniques: "dup",
        build: |r| vec![s(w(r), &[1, 2]), s(w(r), &[1, 2]), h(&[-1, 3])],
    },
    Gadget {
        name: "tautologies",
        op: Op::RemoveTautologies,
        techniques: "taut",
        build: |r| vec![h(&[1, -1, 2]), s(w(r), &[3, -3]), s(w(r), &[1, 3])],
    },
    Gadget {
        name: "hard units",
        op: Op::PropagateHardUnits,
        techniques: "up",
        build: |r| vec![h(&[1, 2]), h(&[-2]), s(w(r), &[-1]), s(w(r), &[2, 3, -4]), s(w(r), &[1, 3])],
    },
    Gadget {
        name: "shrunk empty soft",
        op: Op::RemoveEmptySofts,
        techniques: "up,empty",
        build: |r| vec![h(&[-1]), h(&[-2]), s(w(r), &[1, 2]), s(w(r), &[])],
    },
    Gadget {
        name: "blocked clause",
        op: Op::EliminateBlockedClauses,
        techniques: "bce",
        build: |r| vec![h(&[1, 2]), h(&[-1, -2, 3]), s(w(r), &[-3]), s(w(r), &[2])],
    },
    Gadget {
        name: "subsumed clauses",
        op: Op::EliminateSubsumed,
        techniques: "sub",
        build: |r| vec![h(&[1, 2]), h(&[1, 2, 3]), s(w(r), &[1, 2, 4]), s(w(r), &[-1]), s(w(r), &[-2])],
    },
    Gadget {
        name: "shrunk unit soft",
        op: Op::ConvertToObjectiveCentric,
        techniques: "up",
        build: |r| vec![h(&[-1]), s(w(r), &[1, -2]), s(w(r), &[2, 3])],
    },
    Gadget {
        name: "bve",
        op: Op::EliminateVariableBve,
        techniques: "bve",
        build: |r| vec![h(&[1, 2]), h(&[-1, 3]), s(w(r), &[-2]), s(w(r), &[-3])],
    },
    Gadget {
        name: "bva",
        op: Op::AddVariablesBva,
        techniques: "bva",
        build: |r| {
            vec![
                h(&[1, 3]),
                h(&[1, 4]),
                h(&[1, 5]),
                h(&[2, 3]),
                h(&[2, 4]),
                h(&[2, 5]),
                s(w(r), &[-3]),
                s(w(r), &[-4]),
                s(w(r), &[-5]),
            ]
        },
    },
    Gadget {
        name: "self-subsuming resolution",
        op: Op::SelfSubsumingResolution,
        techniques: "ssr",
        build: |r| vec![h(&[1, 2]), h(&[-1, 2, 3]), s(w(r), &[-2]), s(w(r), &[-3])],
    },
    Gadget {
        name: "trim",
        op: Op::TrimMaxsat,
        techniques: "trim",
        build: |r| vec![h(&[-1, 2]), h(&[-1, -2]), s(w(r), &[-1]), h(&[-3, 4]), h(&[-3, -4]), s(w(r), &[-3])],
    },
    Gadget {
        name: "failed literal",
        op: Op::FailedLiteralElimination,
        techniques: "fle",
        build: |r| vec![h(&[-1, 2]), h(&[-1, -2]), s(w(r), &[2]), s(w(r), &[1])],
    },
    Gadget {
        name: "failed literal extension",
        op: Op::FailedLiteralElimination,
        techniques: "fle",
        build: |r| vec![h(&[-1, 2]), h(&[1, 2]), s(w(r), &[-2]), s(w(r), &[-1])],
    },
    Gadget {
        name: "implied literal",
        op: Op::ImpliedLiteralDetection,
        techniques: "implied",
        build: |r| vec![h(&[-1, 2]), h(&[1, 2]), s(w(r), &[-2]), s(w(r), &[-1, 3])],
    },
    Gadget {
        name: "equivalent literals",
        op: Op::EquivalentLiteralSubstitution,
        techniques: "equiv",
        build: |r| vec![h(&[-1, 2]), h(&[1, -2]), h(&[1, 3]), s(w(r), &[-3]), s(w(r), &[2])],
    },
    Gadget {
        name: "subsumed label",
        op: Op::SubsumedLiteralElimination,
        techniques: "sle",
        build: |r| {
            let a = w(r);
            vec![h(&[3, 1, 2]), h(&[4, 1, 2]), s(a, &[-1]), s(a + r.gen_range(0..3), &[-2])]
        },
    },
    Gadget {
        name: "subsumed literal",
        op: Op::SubsumedLiteralElimination,
        techniques: "sle-var",
        build: |r| vec![h(&[1, 2, 3]), h(&[1, 2, 4]), s(w(r), &[-3]), s(w(r), &[-4])],
    },
    Gadget {
        name: "group sle",
        op: Op::GroupSle,
        techniques: "gsle",
        build: |r| {
            let (a, b) = (w(r), w(r));
            vec![h(&[4, 1, 2]), h(&[5, 1, 3]), s(a + b + r.gen_range(0..3), &[-1]), s(a, &[-2]), s(b, &[-3])]
        },
    },
    Gadget {
        name: "intrinsic at-most-one",
        op: Op::IntrinsicAtMostOnes,
        techniques: "am1",
        build: |r| {
            let a = w(r);
            vec![h(&[1, 2]), h(&[3, 1]), h(&[4, 2]), s(a, &[-1]), s(a, &[-2])]
        },
    },
    Gadget {
        name: "binary core removal",
        op: Op::BinaryCoreRemoval,
        techniques: "bcr",
        build: |r| {
            let a = w(r);
            vec![h(&[1, 2]), h(&[3, 1]), h(&[4, 2]), h(&[5, 1]), s(a, &[-1]), s(a, &[-2])]
        },
    },
    Gadget {
        name: "label matching",
        op: Op::LabelMatching,
        techniques: "lm",
        build: |r| {
            let a = w(r);
            vec![s(a, &[-1, 2]), s(a, &[1, 3]), s(w(r), &[-2]), s(w(r), &[-3])]
        },
    },
    Gadget {
        name: "structure labelling",
        op: Op::StructureBasedLabelling,
        techniques: "slab",
        build: |r| vec![h(&[1, 2]), s(w(r), &[-1, 3]), s(w(r), &[-3])],
    },
    Gadget {
        name: "hardening",
        op: Op::Hardening,
        techniques: "harden",
        build: |r| vec![h(&[1, 2]), s(1, &[-2]), s(w(r) + 1, &[-1]), s(w(r) + 1, &[-3])],
    },
    Gadget {
        name: "objective constant",
        op: Op::RemoveObjectiveConstant,
        techniques: "empty",
        build: |r| vec![s(w(r), &[]), s(w(r), &[1, 2])],
    },
    Gadget {
        name: "renaming",
        op: Op::RenameVariables,
        techniques: "",
        build: |r| vec![s(w(r), &[1, 2]), h(&[-1, 3])],
    },
    Gadget {
        name: "literal fixing",
        op: Op::FixLiteral,
        techniques: "up",
        build: |r| vec![h(&[1]), s(w(r), &[-1, 2]), s(w(r), &[1, 3])],
    },
];

impl Gadget {
    /// Builds a randomized copy: variables permuted and polarity-flipped,
    /// plus up to two noise clauses over variables the gadget does not use.
    pub fn instance(&self, rng: &mut ChaCha8Rng) -> WcnfInstance {
        let raw = (self.build)(rng);
        let n = raw.iter().flat_map(|(_, c)| c).map(|l| l.unsigned_abs()).max().unwrap_or(0) as u32;
        let total = n + 3;
        let mut perm: Vec<u32> = (1..=total).collect();
        perm.shuffle(rng);
        let flip: Vec<bool> = (0..=total).map(|_| rng.gen()).collect();
        let map = |d: i64| -> Lit {
            let v = d.unsigned_abs() as u32;
            Var::user(perm[v as usize - 1]).lit((d > 0) != flip[v as usize])
        };
        let mut clauses: Vec<WeightedClause> = raw
            .iter()
            .map(|(wt, c)| {
                let lits = c.iter().map(|&d| map(d)).collect();
                if *wt == 0 {
                    WeightedClause::hard(lits)
                } else {
                    WeightedClause::soft(*wt, lits)
                }
            })
            .collect();
        for _ in 0..rng.gen_range(0..=2) {
            let lits = (0..rng.gen_range(1..=2))
                .map(|_| map(rng.gen_range(n as i64 + 1..=total as i64) * if rng.gen() { 1 } else { -1 }))
                .collect();
            clauses.push(WeightedClause::soft(w(rng), lits));
        }
        clauses.shuffle(rng);
        WcnfInstance::new(clauses)
    }
}
