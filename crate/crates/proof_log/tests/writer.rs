use pb_core::text::{parse_constraint, parse_objective};
use pb_core::{Objective, SubstValue, Substitution, Var};
use proof_checker::{parse_proof, Goal, Guarantee, InnerStep, PolToken, ProofState, ProofStep, Subproof};
use proof_log::{LogError, ProofWriter};
use proptest::prelude::*;

fn x(i: u32) -> Var {
    Var::user(i)
}

#[test]
fn table1_prefix_lines_and_ids() {
    let mut w = ProofWriter::in_memory();
    w.begin(4).unwrap();
    assert_eq!(w.next_id(), 5);
    assert_eq!(w.pol_sum(1, 2).unwrap(), 5);
    let mut om = Substitution::new();
    om.insert(x(2), SubstValue::Const(false)).unwrap();
    w.delete_with(2, &om).unwrap();
    w.obju_diff(&Objective::from_small(&[(-1, x(1).pos())], 1)).unwrap();
    w.end(Guarantee::Equioptimal).unwrap();
    let text = w.into_text().unwrap();
    assert_eq!(
        text,
        "pseudo-Boolean proof version 2.0\nf 4\npol 1 2 +\ndelc 2 ; x2 -> 0\nobju diff -1 x1 +1 ;\n\
         output EQUIOPTIMAL\nconclusion NONE\nend pseudo-Boolean proof\n"
    );
}

#[test]
fn empty_input() {
    let mut w = ProofWriter::in_memory();
    w.begin(0).unwrap();
    assert_eq!(w.next_id(), 1);
    assert!(w.into_text().unwrap().ends_with("f 0\n"));
}

#[test]
fn framing_errors() {
    let mut w = ProofWriter::in_memory();
    assert!(matches!(w.end(Guarantee::Equioptimal), Err(LogError::NotBegun)));
    assert!(matches!(w.rup(&parse_constraint("1 x1 >= 1 ;").unwrap()), Err(LogError::NotBegun)));
    w.begin(1).unwrap();
    assert!(matches!(w.begin(1), Err(LogError::AlreadyBegun)));
    assert!(matches!(w.delete(7), Err(LogError::DeadId(7))));
    w.delete(1).unwrap();
    assert!(matches!(w.delete(1), Err(LogError::DeadId(1))));
    w.end(Guarantee::Equioptimal).unwrap();
    assert!(matches!(w.end(Guarantee::Equioptimal), Err(LogError::Ended)));
    assert!(matches!(w.core(&[]), Err(LogError::Ended)));
}

#[test]
fn subproof_ids_are_counted() {
    let mut w = ProofWriter::in_memory();
    w.begin(1).unwrap();
    let c = parse_constraint("1 x1 >= 1 ;").unwrap();
    let step = ProofStep::Red {
        constraint: c.clone(),
        witness: Substitution::new(),
        subproofs: Some(vec![Subproof { goal: Goal::Own, steps: vec![InnerStep::Rup(c.clone()), InnerStep::Rup(c)] }]),
    };
    assert_eq!(w.emit(&step).unwrap(), Some(4));
    assert_eq!(w.next_id(), 5);
}

/// Replays a written proof in the checker and compares the IDs handed out.
#[test]
fn ids_agree_with_checker_replay() {
    let input = vec![parse_constraint("1 x1 1 x2 >= 1 ;").unwrap(), parse_constraint("1 ~x2 >= 1 ;").unwrap()];
    let obj = parse_objective("min: +1 x1 ;").unwrap();
    let mut w = ProofWriter::in_memory();
    w.begin(2).unwrap();
    let mut ids = vec![w.pol_sum(1, 2).unwrap()];
    w.core(&[ids[0]]).unwrap();
    ids.push(w.rup(&parse_constraint("1 x1 >= 1 ;").unwrap()).unwrap());
    w.delete(ids[1]).unwrap();
    let mut om = Substitution::new();
    om.insert(Var::fresh(1), SubstValue::Const(true)).unwrap();
    ids.push(w.red(&parse_constraint("1 _b1 >= 1 ;").unwrap(), &om).unwrap());
    w.end(Guarantee::Derivable).unwrap();
    let text = w.into_text().unwrap();

    let mut st = ProofState::new(&input, &obj);
    let mut got = Vec::new();
    for (_, step) in parse_proof(&text).unwrap() {
        if let Some(id) = st.apply(&step).unwrap() {
            got.push(id);
        }
    }
    assert_eq!(got, ids);
}

fn arb_lit() -> impl Strategy<Value = pb_core::Lit> {
    (1u32..6, any::<bool>(), 0u8..3).prop_map(|(i, neg, ns)| {
        let v = match ns {
            0 => Var::user(i),
            1 => Var::fresh(i),
            _ => Var::temp(i),
        };
        v.lit(!neg)
    })
}

fn arb_constraint() -> impl Strategy<Value = pb_core::LinearConstraint> {
    (prop::collection::vec((-4i64..5, arb_lit()), 0..5), -3i64..6)
        .prop_map(|(raw, d)| pb_core::LinearConstraint::from_small(&raw, d))
}

fn arb_witness() -> impl Strategy<Value = Substitution> {
    prop::collection::vec((1u32..6, 0u8..3, arb_lit()), 0..4).prop_map(|entries| {
        let mut s = Substitution::new();
        for (i, kind, l) in entries {
            let v = Var::user(i);
            let val = match kind {
                0 => SubstValue::Const(false),
                1 => SubstValue::Const(true),
                _ => SubstValue::Lit(l),
            };
            let _ = s.insert(v, val);
        }
        s
    })
}

fn arb_step() -> impl Strategy<Value = ProofStep> {
    prop_oneof![
        arb_constraint().prop_map(ProofStep::Rup),
        (arb_constraint(), arb_witness()).prop_map(|(constraint, witness)| ProofStep::Red {
            constraint,
            witness,
            subproofs: None
        }),
        (1u64..50, prop::option::of(arb_witness())).prop_map(|(id, witness)| ProofStep::Delete {
            id,
            witness,
            subproofs: None
        }),
        prop::collection::vec(1u64..50, 0..4).prop_map(ProofStep::MoveToCore),
        (prop::collection::vec((-5i64..6, arb_lit()), 0..4), -3i64..4)
            .prop_map(|(raw, k)| ProofStep::ObjUpdateDiff(Objective::from_small(&raw, k))),
        (prop::collection::vec((-5i64..6, arb_lit()), 0..4), -3i64..4)
            .prop_map(|(raw, k)| ProofStep::ObjUpdateNew(Objective::from_small(&raw, k))),
        (1u64..9, 1u64..9, 1i64..4, arb_lit()).prop_map(|(a, b, k, l)| ProofStep::Pol(vec![
            PolToken::Int(a.into()),
            PolToken::Int(b.into()),
            PolToken::Add,
            PolToken::Int(k.into()),
            PolToken::Div,
            PolToken::Axiom(l),
            PolToken::Add,
            PolToken::Sat,
        ])),
    ]
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(steps in prop::collection::vec(arb_step(), 1..12)) {
        let mut text = String::from("pseudo-Boolean proof version 2.0\n");
        for s in &steps {
            text.push_str(&s.to_string());
            text.push('\n');
        }
        let parsed: Vec<ProofStep> = parse_proof(&text).unwrap().into_iter().map(|(_, s)| s).collect();
        prop_assert_eq!(parsed, steps);
    }
}
