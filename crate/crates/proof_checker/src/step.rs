//! Proof steps of the dialect and their text form.

use std::fmt;

use pb_core::text::{parse_constraint_tokens, parse_lit, parse_signed_terms_tokens, parse_var, write_signed_terms};
use pb_core::{BigInt, LinearConstraint, Lit, Objective, SubstValue, Substitution};

use crate::ParseError;

pub const HEADER: &str = "pseudo-Boolean proof version 2.0";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PolToken {
    /// A bare integer: a constraint ID, or the scalar of `*` / `d`.
    Int(BigInt),
    /// Literal axiom `ℓ ≥ 0`.
    Axiom(Lit),
    Add,
    Mul,
    Div,
    Sat,
}

impl fmt::Display for PolToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolToken::Int(n) => write!(f, "{n}"),
            PolToken::Axiom(l) => write!(f, "{l}"),
            PolToken::Add => f.write_str("+"),
            PolToken::Mul => f.write_str("*"),
            PolToken::Div => f.write_str("d"),
            PolToken::Sat => f.write_str("s"),
        }
    }
}

/// Which obligation a subproof discharges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Goal {
    /// The restriction of the live constraint with this ID.
    Id(u64),
    /// The restriction of the constraint being derived (or rederived).
    Own,
    /// `O ≥ O|ω`.
    Objective,
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Id(id) => write!(f, "{id}"),
            Goal::Own => f.write_str("#self"),
            Goal::Objective => f.write_str("#obj"),
        }
    }
}

/// Derivation steps allowed inside a subproof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InnerStep {
    Pol(Vec<PolToken>),
    Rup(LinearConstraint),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subproof {
    pub goal: Goal,
    pub steps: Vec<InnerStep>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Guarantee {
    Derivable,
    Equisatisfiable,
    Equioptimal,
}

impl Guarantee {
    pub fn keyword(self) -> &'static str {
        match self {
            Guarantee::Derivable => "DERIVABLE",
            Guarantee::Equisatisfiable => "EQUISATISFIABLE",
            Guarantee::Equioptimal => "EQUIOPTIMAL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofStep {
    LoadInput(usize),
    Pol(Vec<PolToken>),
    Rup(LinearConstraint),
    Red { constraint: LinearConstraint, witness: Substitution, subproofs: Option<Vec<Subproof>> },
    Delete { id: u64, witness: Option<Substitution>, subproofs: Option<Vec<Subproof>> },
    ObjUpdateDiff(Objective),
    ObjUpdateNew(Objective),
    MoveToCore(Vec<u64>),
    OutputSection(Guarantee),
    ConclusionNone,
    End,
}

impl ProofStep {
    /// Number of constraint IDs this step consumes.
    pub fn ids_consumed(&self) -> u64 {
        let inner = |sp: &Option<Vec<Subproof>>| sp.iter().flatten().map(|s| s.steps.len() as u64).sum::<u64>();
        match self {
            ProofStep::Pol(_) | ProofStep::Rup(_) => 1,
            ProofStep::Red { subproofs, .. } => 1 + inner(subproofs),
            ProofStep::Delete { subproofs, .. } => inner(subproofs),
            _ => 0,
        }
    }
}

fn write_pol(f: &mut fmt::Formatter<'_>, toks: &[PolToken]) -> fmt::Result {
    f.write_str("pol")?;
    for t in toks {
        write!(f, " {t}")?;
    }
    Ok(())
}

fn write_subproofs(f: &mut fmt::Formatter<'_>, subproofs: &Option<Vec<Subproof>>) -> fmt::Result {
    let Some(subproofs) = subproofs else { return Ok(()) };
    f.write_str(" ; begin")?;
    for sp in subproofs {
        write!(f, "\n  proofgoal {}", sp.goal)?;
        for s in &sp.steps {
            f.write_str("\n    ")?;
            match s {
                InnerStep::Pol(t) => write_pol(f, t)?,
                InnerStep::Rup(c) => write!(f, "rup {c}")?,
            }
        }
        f.write_str("\n  qed")?;
    }
    f.write_str("\nend")
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStep::LoadInput(n) => write!(f, "f {n}"),
            ProofStep::Pol(t) => write_pol(f, t),
            ProofStep::Rup(c) => write!(f, "rup {c}"),
            ProofStep::Red { constraint, witness, subproofs } => {
                write!(f, "red {constraint}")?;
                if !witness.is_empty() {
                    write!(f, " {witness}")?;
                }
                write_subproofs(f, subproofs)
            }
            ProofStep::Delete { id, witness, subproofs } => {
                write!(f, "delc {id}")?;
                match witness {
                    Some(w) if w.is_empty() => f.write_str(" ;")?,
                    Some(w) => write!(f, " ; {w}")?,
                    None if subproofs.is_some() => f.write_str(" ;")?,
                    None => {}
                }
                write_subproofs(f, subproofs)
            }
            ProofStep::ObjUpdateDiff(o) => {
                f.write_str("obju diff ")?;
                write_signed_terms(f, o.terms().iter().map(|(c, v)| (c, v.pos())), o.constant())?;
                f.write_str(if o.is_zero() { ";" } else { " ;" })
            }
            ProofStep::ObjUpdateNew(o) => {
                f.write_str("obju new ")?;
                write_signed_terms(f, o.terms().iter().map(|(c, v)| (c, v.pos())), o.constant())?;
                f.write_str(if o.is_zero() { ";" } else { " ;" })
            }
            ProofStep::MoveToCore(ids) => {
                f.write_str("core id")?;
                for id in ids {
                    write!(f, " {id}")?;
                }
                Ok(())
            }
            ProofStep::OutputSection(g) => write!(f, "output {}", g.keyword()),
            ProofStep::ConclusionNone => f.write_str("conclusion NONE"),
            ProofStep::End => f.write_str("end pseudo-Boolean proof"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing

fn perr(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, msg: msg.into() }
}

fn parse_id(line: usize, tok: &str) -> Result<u64, ParseError> {
    tok.parse::<u64>()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| perr(line, format!("expected a constraint ID, found `{tok}`")))
}

fn parse_pol_tokens(line: usize, toks: &[&str]) -> Result<Vec<PolToken>, ParseError> {
    if toks.is_empty() {
        return Err(perr(line, "empty pol expression"));
    }
    toks.iter()
        .map(|&t| match t {
            "+" => Ok(PolToken::Add),
            "*" => Ok(PolToken::Mul),
            "d" => Ok(PolToken::Div),
            "s" => Ok(PolToken::Sat),
            _ if t.bytes().all(|b| b.is_ascii_digit()) => {
                Ok(PolToken::Int(t.parse().map_err(|_| perr(line, "bad integer"))?))
            }
            _ => parse_lit(t).map(PolToken::Axiom).map_err(|e| perr(line, e.to_string())),
        })
        .collect()
}

fn parse_constraint_line(line: usize, toks: &[&str]) -> Result<(LinearConstraint, usize), ParseError> {
    parse_constraint_tokens(toks).map_err(|e| perr(line, e.to_string()))
}

fn parse_witness(line: usize, toks: &[&str]) -> Result<Substitution, ParseError> {
    if !toks.len().is_multiple_of(3) {
        return Err(perr(line, "witness must be a list of `v -> value` entries"));
    }
    let mut w = Substitution::new();
    for chunk in toks.chunks(3) {
        if chunk[1] != "->" {
            return Err(perr(line, format!("expected `->` in witness, found `{}`", chunk[1])));
        }
        let v = parse_var(chunk[0]).map_err(|e| perr(line, e.to_string()))?;
        if w.contains(v) {
            return Err(perr(line, format!("variable {v} mapped twice in witness")));
        }
        let val = match chunk[2] {
            "0" => SubstValue::Const(false),
            "1" => SubstValue::Const(true),
            t => SubstValue::Lit(parse_lit(t).map_err(|e| perr(line, e.to_string()))?),
        };
        w.insert(v, val).map_err(|e| perr(line, e.to_string()))?;
    }
    Ok(w)
}

/// Splits `<witness> [; begin]` (or `[;]`) and reports whether a block follows.
fn split_begin<'a>(toks: &'a [&'a str]) -> (&'a [&'a str], bool) {
    match toks {
        [rest @ .., ";", "begin"] => (rest, true),
        [rest @ .., ";"] => (rest, false),
        _ => (toks, false),
    }
}

fn parse_objective_terms(line: usize, toks: &[&str]) -> Result<Objective, ParseError> {
    let toks = match toks.first() {
        Some(&"min:") => &toks[1..],
        _ => toks,
    };
    let ((raw, k), used) = parse_signed_terms_tokens(toks).map_err(|e| perr(line, e.to_string()))?;
    if used != toks.len() {
        return Err(perr(line, "trailing tokens after objective terms"));
    }
    Ok(Objective::new(raw, k))
}

/// Pulls complete proof steps out of numbered lines.
pub struct StepReader<I> {
    lines: I,
    header_seen: bool,
}

impl<I, S> StepReader<I>
where
    I: Iterator<Item = (usize, S)>,
    S: AsRef<str>,
{
    /// `lines` yields 1-based line numbers with their text.
    pub fn new(lines: I) -> Self {
        StepReader { lines, header_seen: false }
    }

    fn next_content(&mut self) -> Option<(usize, String)> {
        for (n, l) in self.lines.by_ref() {
            let t = l.as_ref().trim();
            if t.is_empty() || t.starts_with('*') {
                continue;
            }
            return Some((n, t.to_string()));
        }
        None
    }

    fn parse_block(&mut self, start: usize) -> Result<Vec<Subproof>, ParseError> {
        let mut out = Vec::new();
        loop {
            let (n, l) = self.next_content().ok_or_else(|| perr(start, "unterminated subproof block"))?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            match toks.as_slice() {
                ["end"] => return Ok(out),
                ["proofgoal", g] => {
                    let goal = match *g {
                        "#self" => Goal::Own,
                        "#obj" => Goal::Objective,
                        t => Goal::Id(parse_id(n, t)?),
                    };
                    let mut steps = Vec::new();
                    loop {
                        let (m, l) = self.next_content().ok_or_else(|| perr(n, "unterminated proofgoal"))?;
                        let toks: Vec<&str> = l.split_whitespace().collect();
                        match toks.as_slice() {
                            ["qed"] => break,
                            ["pol", rest @ ..] => steps.push(InnerStep::Pol(parse_pol_tokens(m, rest)?)),
                            ["rup", rest @ ..] => {
                                let (c, used) = parse_constraint_line(m, rest)?;
                                if used != rest.len() {
                                    return Err(perr(m, "trailing tokens after rup constraint"));
                                }
                                steps.push(InnerStep::Rup(c));
                            }
                            _ => return Err(perr(m, format!("unexpected line in subproof: `{l}`"))),
                        }
                    }
                    out.push(Subproof { goal, steps });
                }
                _ => return Err(perr(n, format!("expected `proofgoal` or `end`, found `{l}`"))),
            }
        }
    }

    fn parse_line(&mut self, n: usize, l: &str) -> Result<ProofStep, ParseError> {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let step = match toks.as_slice() {
            ["f", k] => ProofStep::LoadInput(k.parse().map_err(|_| perr(n, format!("bad input count `{k}`")))?),
            ["pol", rest @ ..] => ProofStep::Pol(parse_pol_tokens(n, rest)?),
            ["rup", rest @ ..] => {
                let (c, used) = parse_constraint_line(n, rest)?;
                if used != rest.len() {
                    return Err(perr(n, "trailing tokens after rup constraint"));
                }
                ProofStep::Rup(c)
            }
            ["red", rest @ ..] => {
                let (constraint, used) = parse_constraint_line(n, rest)?;
                let (wtoks, block) = split_begin(&rest[used..]);
                let witness = parse_witness(n, wtoks)?;
                let subproofs = if block { Some(self.parse_block(n)?) } else { None };
                ProofStep::Red { constraint, witness, subproofs }
            }
            ["delc", id, rest @ ..] => {
                let id = parse_id(n, id)?;
                let (witness, subproofs) = match rest {
                    [] => (None, None),
                    [";", wtoks @ ..] => {
                        let (wtoks, block) = split_begin(wtoks);
                        let w = parse_witness(n, wtoks)?;
                        let subproofs = if block { Some(self.parse_block(n)?) } else { None };
                        (Some(w), subproofs)
                    }
                    _ => return Err(perr(n, "expected `;` before deletion witness")),
                };
                // `delc id ; ; begin` carries an empty witness that printing omits.
                let witness = match (&witness, &subproofs) {
                    (Some(w), Some(_)) if w.is_empty() => None,
                    _ => witness,
                };
                ProofStep::Delete { id, witness, subproofs }
            }
            ["obju", "diff", rest @ ..] => ProofStep::ObjUpdateDiff(parse_objective_terms(n, rest)?),
            ["obju", "new", rest @ ..] => ProofStep::ObjUpdateNew(parse_objective_terms(n, rest)?),
            ["core", "id", ids @ ..] => {
                ProofStep::MoveToCore(ids.iter().map(|t| parse_id(n, t)).collect::<Result<_, _>>()?)
            }
            ["output", g] => ProofStep::OutputSection(match *g {
                "EQUIOPTIMAL" => Guarantee::Equioptimal,
                "EQUISATISFIABLE" => Guarantee::Equisatisfiable,
                "DERIVABLE" => Guarantee::Derivable,
                other => return Err(perr(n, format!("unknown output guarantee `{other}`"))),
            }),
            ["conclusion", "NONE"] => ProofStep::ConclusionNone,
            ["end", "pseudo-Boolean", "proof"] => ProofStep::End,
            _ => return Err(perr(n, format!("unrecognized proof line `{l}`"))),
        };
        Ok(step)
    }
}

impl<I, S> Iterator for StepReader<I>
where
    I: Iterator<Item = (usize, S)>,
    S: AsRef<str>,
{
    type Item = Result<(usize, ProofStep), ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        let (n, l) = self.next_content()?;
        if !self.header_seen {
            self.header_seen = true;
            if l.split_whitespace().collect::<Vec<_>>().join(" ") != HEADER {
                return Some(Err(perr(n, format!("expected header `{HEADER}`"))));
            }
            return self.next();
        }
        Some(self.parse_line(n, &l).map(|s| (n, s)))
    }
}

/// Parses a complete proof text into numbered steps.
pub fn parse_proof(text: &str) -> Result<Vec<(usize, ProofStep)>, ParseError> {
    StepReader::new(text.lines().enumerate().map(|(i, l)| (i + 1, l))).collect()
}

/// Parses a single step; multi-line steps are given with embedded newlines.
pub fn parse_step(text: &str) -> Result<ProofStep, ParseError> {
    let mut r = StepReader::new(text.lines().enumerate().map(|(i, l)| (i + 1, l)));
    r.header_seen = true;
    let (_, step) = r.next().ok_or_else(|| perr(1, "empty step"))??;
    match r.next() {
        None => Ok(step),
        Some(_) => Err(perr(1, "more than one step")),
    }
}
