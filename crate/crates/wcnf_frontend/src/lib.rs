//! # wcnf_frontend
//!
//! Weighted CNF instances: parsing (2022 and legacy formats), printing, cost
//! semantics, an exhaustive optimum oracle, and the objective-centric
//! encoding into pseudo-Boolean constraints plus a linear objective.
//!
//! Encoding contract: constraint `k` of the encoding is clause `k` of the
//! instance, skipping unit soft clauses, which become objective terms. The
//! `j`-th non-unit soft clause is relaxed by the fresh variable `_b<j>`.

use std::fmt::Write as _;

use pb_core::{Assignment, BigInt, LinearConstraint, Lit, Objective, Var};
use proof_checker::Verdict;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WcnfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("hard clause {0} is falsified")]
    HardViolated(usize),
    #[error("variable {0} is unassigned")]
    Unassigned(Var),
    #[error("instance has {vars} variables, brute-force bound is {bound}")]
    BoundExceeded { vars: usize, bound: usize },
}

/// A clause with weight 0 (hard) or a positive soft weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedClause {
    pub weight: u64,
    pub lits: Vec<Lit>,
}

impl WeightedClause {
    pub fn hard(lits: Vec<Lit>) -> WeightedClause {
        WeightedClause { weight: 0, lits }
    }

    pub fn soft(weight: u64, lits: Vec<Lit>) -> WeightedClause {
        debug_assert!(weight > 0);
        WeightedClause { weight, lits }
    }

    pub fn is_hard(&self) -> bool {
        self.weight == 0
    }

    /// Distinct literals in sorted order.
    pub fn normalized_lits(&self) -> Vec<Lit> {
        let mut ls = self.lits.clone();
        ls.sort();
        ls.dedup();
        ls
    }

    pub fn is_tautology(&self) -> bool {
        let ls = self.normalized_lits();
        ls.windows(2).any(|p| p[0].var() == p[1].var())
    }

    fn satisfied(&self, rho: &Assignment) -> Result<bool, WcnfError> {
        for l in &self.lits {
            if rho.lit_value(*l).ok_or(WcnfError::Unassigned(l.var()))? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WcnfInstance {
    pub clauses: Vec<WeightedClause>,
    pub num_vars: u32,
}

impl WcnfInstance {
    pub fn new(clauses: Vec<WeightedClause>) -> WcnfInstance {
        let num_vars = clauses.iter().flat_map(|c| &c.lits).map(|l| l.var().index()).max().unwrap_or(0);
        WcnfInstance { clauses, num_vars }
    }

    pub fn hards(&self) -> impl Iterator<Item = &WeightedClause> + '_ {
        self.clauses.iter().filter(|c| c.is_hard())
    }

    pub fn softs(&self) -> impl Iterator<Item = &WeightedClause> + '_ {
        self.clauses.iter().filter(|c| !c.is_hard())
    }

    /// Distinct variables occurring in some clause, ascending.
    pub fn occurring_vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.clauses.iter().flat_map(|c| c.lits.iter().map(|l| l.var())).collect();
        vs.sort();
        vs.dedup();
        vs
    }
}

// ---------------------------------------------------------------------------
// Text format

fn perr(line: usize, msg: impl Into<String>) -> WcnfError {
    WcnfError::Parse { line, msg: msg.into() }
}

fn parse_lits(line: usize, toks: &[&str]) -> Result<Vec<Lit>, WcnfError> {
    match toks.split_last() {
        Some((&"0", body)) => body
            .iter()
            .map(|t| {
                let v: i64 = t.parse().map_err(|_| perr(line, format!("bad literal `{t}`")))?;
                Lit::from_dimacs(v).ok_or_else(|| perr(line, format!("bad literal `{t}`")))
            })
            .collect(),
        _ => Err(perr(line, "clause must end with 0")),
    }
}

fn parse_weight(line: usize, tok: &str) -> Result<u64, WcnfError> {
    if !tok.bytes().all(|b| b.is_ascii_digit()) || tok.is_empty() {
        return Err(perr(line, format!("bad weight `{tok}`")));
    }
    tok.parse::<u64>().map_err(|_| perr(line, format!("weight `{tok}` does not fit in 64 bits")))
}

/// Parses the 2022 format (`h ... 0` hard, `<w> ... 0` soft) or the legacy
/// `p wcnf <nv> <nc> [<top>]` format (weight ≥ top is hard).
pub fn parse_wcnf(text: &str) -> Result<WcnfInstance, WcnfError> {
    let mut clauses = Vec::new();
    let mut top: Option<Option<u64>> = None;
    let mut header_vars = 0u32;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        let Some(&first) = toks.first() else { continue };
        if first.starts_with('c') {
            continue;
        }
        if first == "p" {
            if top.is_some() || !clauses.is_empty() {
                return Err(perr(line, "misplaced `p` header"));
            }
            match toks.as_slice() {
                ["p", "wcnf", nv, _nc, rest @ ..] => {
                    header_vars = nv.parse().map_err(|_| perr(line, format!("bad variable count `{nv}`")))?;
                    top = Some(match rest {
                        [] => None,
                        [t] => Some(parse_weight(line, t)?),
                        _ => return Err(perr(line, "trailing tokens in header")),
                    });
                }
                _ => return Err(perr(line, "expected `p wcnf <vars> <clauses> [<top>]`")),
            }
            continue;
        }
        let clause = match top {
            None if first == "h" => WeightedClause::hard(parse_lits(line, &toks[1..])?),
            Some(_) if first == "h" => return Err(perr(line, "`h` clause in legacy format")),
            _ => {
                let w = parse_weight(line, first)?;
                let lits = parse_lits(line, &toks[1..])?;
                match top {
                    Some(Some(t)) if w >= t => WeightedClause::hard(lits),
                    _ if w == 0 => return Err(perr(line, "soft clause with weight 0")),
                    _ => WeightedClause::soft(w, lits),
                }
            }
        };
        clauses.push(clause);
    }
    let mut inst = WcnfInstance::new(clauses);
    inst.num_vars = inst.num_vars.max(header_vars);
    Ok(inst)
}

fn write_clause(out: &mut String, c: &WeightedClause) {
    if c.is_hard() {
        out.push('h');
    } else {
        write!(out, "{}", c.weight).expect("writing to a String");
    }
    for l in &c.lits {
        let d = l.to_dimacs().expect("WCNF clauses hold user literals only");
        write!(out, " {d}").expect("writing to a String");
    }
    out.push_str(" 0\n");
}

/// Canonical 2022-format text; clause order is preserved.
pub fn write_wcnf(inst: &WcnfInstance) -> String {
    let mut out = format!("c {} variables, {} clauses\n", inst.num_vars, inst.clauses.len());
    for c in &inst.clauses {
        write_clause(&mut out, c);
    }
    out
}

// ---------------------------------------------------------------------------
// Semantics

/// Sum of weights of falsified soft clauses; errors if a hard clause fails.
pub fn cost(rho: &Assignment, inst: &WcnfInstance) -> Result<u128, WcnfError> {
    let mut total = 0u128;
    for (i, c) in inst.clauses.iter().enumerate() {
        let sat = c.satisfied(rho)?;
        if c.is_hard() && !sat {
            return Err(WcnfError::HardViolated(i));
        }
        if !sat {
            total += c.weight as u128;
        }
    }
    Ok(total)
}

pub const DEFAULT_BRUTE_FORCE_BOUND: usize = 22;

/// Exhaustive optimum with the default variable bound; `None` if infeasible.
pub fn opt_cost_bruteforce(inst: &WcnfInstance) -> Result<Option<u128>, WcnfError> {
    opt_cost_bruteforce_bounded(inst, DEFAULT_BRUTE_FORCE_BOUND)
}

/// Exhaustive optimum over the variables that occur in `inst`.
pub fn opt_cost_bruteforce_bounded(inst: &WcnfInstance, bound: usize) -> Result<Option<u128>, WcnfError> {
    let vars = inst.occurring_vars();
    if vars.len() > bound.min(63) {
        return Err(WcnfError::BoundExceeded { vars: vars.len(), bound });
    }
    let bit = |l: &Lit| 1u64 << vars.binary_search(&l.var()).expect("occurring var");
    let masks: Vec<(u64, u64, u128, bool)> = inst
        .clauses
        .iter()
        .map(|c| {
            let pos = c.lits.iter().filter(|l| l.is_positive()).map(bit).fold(0, |a, b| a | b);
            let neg = c.lits.iter().filter(|l| l.is_negated()).map(bit).fold(0, |a, b| a | b);
            (pos, neg, c.weight as u128, c.is_hard())
        })
        .collect();
    let mut best: Option<u128> = None;
    'outer: for a in 0u64..(1u64 << vars.len()) {
        let mut cost = 0u128;
        for &(pos, neg, w, hard) in &masks {
            if a & pos != 0 || !a & neg != 0 {
                continue;
            }
            if hard {
                continue 'outer;
            }
            cost += w;
            if best.is_some_and(|b| cost >= b) {
                continue 'outer;
            }
        }
        best = Some(best.map_or(cost, |b| b.min(cost)));
    }
    Ok(best)
}

// ---------------------------------------------------------------------------
// Encoding

/// Where each constraint of an encoding came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodedClause {
    /// Index of the clause in the instance.
    pub clause: usize,
    /// Relaxation variable for a non-unit soft clause.
    pub relax: Option<Var>,
}

/// The objective-centric pseudo-Boolean form of a WCNF instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbEncoding {
    pub constraints: Vec<LinearConstraint>,
    pub objective: Objective,
    /// Parallel to `constraints`.
    pub origin: Vec<EncodedClause>,
    /// Number of fresh `_b` variables used.
    pub num_fresh: u32,
}

/// Encodes hard clauses as `asPB(C)`, unit softs `(¬ℓ)` as objective terms
/// `w·ℓ`, and other softs `C` as `asPB(C ∨ b)` with objective term `w·b`.
pub fn encode_to_pb(inst: &WcnfInstance) -> PbEncoding {
    let mut constraints = Vec::new();
    let mut origin = Vec::new();
    let mut terms: Vec<(BigInt, Lit)> = Vec::new();
    let mut num_fresh = 0u32;
    for (i, c) in inst.clauses.iter().enumerate() {
        let lits = c.normalized_lits();
        if c.is_hard() {
            constraints.push(LinearConstraint::clause(&lits));
            origin.push(EncodedClause { clause: i, relax: None });
        } else if lits.len() == 1 {
            terms.push((BigInt::from(c.weight), !lits[0]));
        } else {
            num_fresh += 1;
            let b = Var::fresh(num_fresh);
            let mut with_b = lits;
            with_b.push(b.pos());
            constraints.push(LinearConstraint::clause(&with_b));
            origin.push(EncodedClause { clause: i, relax: Some(b) });
            terms.push((BigInt::from(c.weight), b.pos()));
        }
    }
    PbEncoding { constraints, objective: Objective::new(terms, BigInt::from(0)), origin, num_fresh }
}

/// What a checker verdict on `(encode(input), encode(output))` says about
/// the MaxSAT instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxSatClaim {
    /// `opt_cost(input) = opt_cost(output)`, infeasible counting as infinite.
    EqualOptima,
    /// The hard clauses of both instances are equisatisfiable.
    HardsEquisatisfiable,
    NoClaim,
}

pub fn translate_verdict(verdict: &Verdict, _input: &WcnfInstance, _output: &WcnfInstance) -> MaxSatClaim {
    match verdict {
        Verdict::Equioptimal => MaxSatClaim::EqualOptima,
        Verdict::Equisatisfiable => MaxSatClaim::HardsEquisatisfiable,
        Verdict::Derivable | Verdict::Rejected { .. } => MaxSatClaim::NoClaim,
    }
}
