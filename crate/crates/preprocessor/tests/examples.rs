//! Small hand-traced runs of single techniques, compared line by line.

use preprocessor::{preprocess, TechniqueConfig};
use proof_checker::check_proof;
use wcnf_frontend::{encode_to_pb, opt_cost_bruteforce, parse_wcnf, write_wcnf};

/// Runs `techniques` on `text`, certifies the result, returns the output lines.
fn run(text: &str, techniques: &str) -> Vec<String> {
    let input = parse_wcnf(text).unwrap();
    let mut cfg = TechniqueConfig::with_techniques(techniques).unwrap();
    cfg.debug_replay = true;
    let (output, proof, _) = preprocess(&input, &cfg).unwrap();
    let a = encode_to_pb(&input);
    let b = encode_to_pb(&output);
    assert!(
        check_proof(&a.constraints, &a.objective, &proof, &b.constraints, &b.objective).is_equioptimal(),
        "{proof}"
    );
    assert_eq!(opt_cost_bruteforce(&input).unwrap(), opt_cost_bruteforce(&output).unwrap());
    write_wcnf(&output).lines().filter(|l| !l.starts_with('c')).map(String::from).collect()
}

#[test]
fn self_subsumption_strengthens() {
    assert_eq!(run("h 1 2 0\nh -1 2 3 0\n1 -2 0\n1 -3 0\n", "ssr"), ["h 1 2 0", "h 2 3 0", "1 -2 0", "1 -3 0"]);
}

#[test]
fn equivalent_literal_is_substituted() {
    assert_eq!(run("h -1 2 0\nh 1 -2 0\nh 1 3 0\n1 -3 0\n", "equiv"), ["h 2 3 0", "1 -3 0"]);
}

#[test]
fn binary_core_removal_merges_labels() {
    assert_eq!(run("h 1 2 0\nh 3 1 0\nh 4 2 0\n2 -1 0\n2 -2 0\n", "bcr"), ["h 3 4 5 0", "h 6 0", "2 -5 0", "2 -6 0"]);
}

#[test]
fn at_most_one_adds_the_reified_clause() {
    assert_eq!(
        run("h 1 2 0\nh 3 1 0\nh 4 2 0\n2 -1 0\n2 -2 0\n", "am1"),
        ["h 1 2 0", "h 1 3 0", "h 2 4 0", "h -1 -2 5 0", "h 6 0", "2 -5 0", "2 -6 0"]
    );
}

#[test]
fn label_matching_shares_one_label() {
    assert_eq!(
        run("2 -1 2 0\n2 1 3 0\n1 -2 0\n3 -3 0\n", "lm"),
        ["h -1 2 4 0", "h 1 3 4 0", "1 -2 0", "3 -3 0", "2 -4 0"]
    );
}

#[test]
fn group_sle_fixes_the_heavy_label() {
    assert_eq!(
        run("h 4 1 2 0\nh 5 1 3 0\n3 -1 0\n1 -2 0\n1 -3 0\n", "gsle"),
        ["h 2 4 0", "h 3 5 0", "1 -2 0", "1 -3 0"]
    );
}

#[test]
fn group_sle_needs_enough_weight() {
    assert_eq!(
        run("h 4 1 2 0\nh 5 1 3 0\n3 -1 0\n2 -2 0\n2 -3 0\n", "gsle"),
        ["h 1 2 4 0", "h 1 3 5 0", "3 -1 0", "2 -2 0", "2 -3 0"]
    );
}

#[test]
fn group_sle_with_equal_weights_drops_the_covered_labels() {
    assert_eq!(run("h 4 1 2 0\nh 5 1 3 0\n1 -1 0\n1 -2 0\n1 -3 0\n", "gsle"), ["h 1 4 0", "h 1 5 0", "1 -1 0"]);
}

#[test]
fn trim_finds_the_entailed_literal() {
    assert_eq!(run("h -1 2 0\nh -1 -2 0\n3 -1 0\n", "trim"), Vec::<String>::new());
}

#[test]
fn structure_labelling_adds_the_label() {
    // x3 is the first objective literal shared by every partner.
    assert_eq!(run("h 1 2 0\n2 -1 3 0\n5 -3 0\n", "slab"), ["h 1 2 3 0", "h -1 3 4 0", "5 -3 0", "2 -4 0"]);
}

#[test]
fn blocked_clause_is_removed() {
    assert_eq!(run("h 1 2 0\nh -1 -2 3 0\n1 -3 0\n", "bce"), ["1 -3 0"]);
}

#[test]
fn pure_literals_are_left_to_blocked_clause_elimination() {
    let text = "h 1 2 0\nh 1 3 0\n1 -2 0\n1 -3 0\n";
    assert_eq!(run(text, "bve"), ["h 1 2 0", "h 1 3 0", "1 -2 0", "1 -3 0"]);
    assert_eq!(run(text, "bce"), ["1 -2 0", "1 -3 0"]);
}

#[test]
fn tautological_resolvents_only() {
    assert_eq!(run("h 1 2 0\nh -1 -2 0\n1 -2 0\n", "bve"), ["1 -2 0"]);
}

#[test]
fn soft_duplicates_merge_weights() {
    assert_eq!(run("2 1 2 0\n3 1 2 0\n", "dup"), ["h 1 2 3 0", "5 -3 0"]);
}

#[test]
fn hard_unit_chain_fixes_the_table_literals() {
    assert_eq!(run("h 1 2 0\nh -2 0\n1 -1 0\n", "up"), ["h 3 0", "1 -3 0"]);
}
