//! # proof_checker
//!
//! Streaming checker for the pseudo-Boolean proof dialect. It maintains the
//! core and derived constraint sets together with the objective, validates
//! each rule application including redundance obligations, and finally
//! compares the core against a claimed output instance.
//!
//! Two deliberate strictness choices:
//!
//! * checked deletion of a core constraint must be justified from the rest of
//!   the core alone, never from derived constraints;
//! * a proof without an output section or without its closing line is
//!   rejected.

mod error;
mod state;
mod step;

use std::fmt;
use std::io::BufRead;

use pb_core::{LinearConstraint, Objective};

pub use error::{CheckError, ParseError, RuleError};
pub use state::ProofState;
pub use step::{
    parse_proof, parse_step, Goal, Guarantee, InnerStep, PolToken, ProofStep, StepReader, Subproof, HEADER,
};

/// Outcome of checking a proof against an input and an output instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Derivable,
    Equisatisfiable,
    Equioptimal,
    Rejected { line: usize, reason: String },
}

impl Verdict {
    pub fn is_equioptimal(&self) -> bool {
        matches!(self, Verdict::Equioptimal)
    }

    fn from_level(g: Guarantee) -> Verdict {
        match g {
            Guarantee::Derivable => Verdict::Derivable,
            Guarantee::Equisatisfiable => Verdict::Equisatisfiable,
            Guarantee::Equioptimal => Verdict::Equioptimal,
        }
    }
}

impl From<CheckError> for Verdict {
    fn from(e: CheckError) -> Verdict {
        Verdict::Rejected { line: e.line(), reason: e.reason() }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Derivable => f.write_str("s VERIFIED OUTPUT DERIVABLE"),
            Verdict::Equisatisfiable => f.write_str("s VERIFIED OUTPUT EQUISATISFIABLE"),
            Verdict::Equioptimal => f.write_str("s VERIFIED OUTPUT EQUIOPTIMAL"),
            Verdict::Rejected { line, reason } => write!(f, "s REJECTED {line}: {reason}"),
        }
    }
}

/// Runs a proof to completion and returns the guarantee it established.
pub fn run_checker<I, S>(
    instance: &[LinearConstraint],
    objective: &Objective,
    lines: I,
    output: &[LinearConstraint],
    out_objective: &Objective,
) -> Result<Guarantee, CheckError>
where
    I: Iterator<Item = (usize, S)>,
    S: AsRef<str>,
{
    let mut state = ProofState::new(instance, objective);
    let mut last_line = 0;
    let mut output_line = 0;
    for item in StepReader::new(lines) {
        let (line, step) = item?;
        last_line = line;
        if matches!(step, ProofStep::OutputSection(_)) {
            output_line = line;
        }
        state.apply(&step).map_err(|source| CheckError::Rule { line, source })?;
    }
    if !state.is_ended() {
        return Err(CheckError::Structure {
            line: last_line,
            reason: "proof is truncated (missing `end pseudo-Boolean proof`)".into(),
        });
    }
    let level = state
        .output_guarantee()
        .ok_or_else(|| CheckError::Structure { line: last_line, reason: "proof has no output section".into() })?;
    state
        .check_output(level, output, out_objective)
        .map_err(|reason| CheckError::Output { line: output_line, reason })?;
    Ok(level)
}

/// Checks `proof` for the input `(instance, objective)` against the output.
pub fn check_proof(
    instance: &[LinearConstraint],
    objective: &Objective,
    proof: &str,
    output: &[LinearConstraint],
    out_objective: &Objective,
) -> Verdict {
    let lines = proof.lines().enumerate().map(|(i, l)| (i + 1, l));
    match run_checker(instance, objective, lines, output, out_objective) {
        Ok(g) => Verdict::from_level(g),
        Err(e) => e.into(),
    }
}

/// Like [`check_proof`], streaming the proof from a reader.
pub fn check_proof_reader<R: BufRead>(
    instance: &[LinearConstraint],
    objective: &Objective,
    proof: R,
    output: &[LinearConstraint],
    out_objective: &Objective,
) -> Verdict {
    let mut io_error = None;
    let lines = proof.lines().enumerate().map_while(|(i, l)| match l {
        Ok(l) => Some((i + 1, l)),
        Err(e) => {
            io_error = Some(e.to_string());
            None
        }
    });
    let result = run_checker(instance, objective, lines, output, out_objective);
    if let Some(e) = io_error {
        return CheckError::Io(e).into();
    }
    match result {
        Ok(g) => Verdict::from_level(g),
        Err(e) => e.into(),
    }
}
