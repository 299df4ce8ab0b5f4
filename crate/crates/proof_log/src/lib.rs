//! # proof_log
//!
//! [`ProofWriter`] serializes [`ProofStep`]s in the proof dialect and hands
//! out constraint IDs exactly as the checker will assign them on replay.
//!
//! ```
//! use proof_log::ProofWriter;
//! use proof_checker::{Guarantee, PolToken};
//!
//! let mut w = ProofWriter::in_memory();
//! w.begin(4).unwrap();
//! let id = w.pol(vec![PolToken::Int(1.into()), PolToken::Int(2.into()), PolToken::Add]).unwrap();
//! assert_eq!(id, 5);
//! w.end(Guarantee::Equioptimal).unwrap();
//! assert!(w.into_text().unwrap().contains("pol 1 2 +\n"));
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, BufWriter, Write};

use pb_core::{LinearConstraint, Objective, Substitution};
use proof_checker::{Guarantee, PolToken, ProofStep, HEADER};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("writing proof: {0}")]
    Io(#[from] io::Error),
    #[error("proof already begun")]
    AlreadyBegun,
    #[error("proof not begun")]
    NotBegun,
    #[error("proof already ended")]
    Ended,
    #[error("constraint {0} is not live")]
    DeadId(u64),
    #[error("`{0}` must be emitted through begin/end")]
    Framing(&'static str),
}

enum Sink {
    Memory(String),
    Stream(BufWriter<Box<dyn Write + Send>>),
    /// Logging disabled: IDs are still tracked, nothing is formatted.
    Null,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Fresh,
    Open,
    Ended,
}

pub struct ProofWriter {
    sink: Sink,
    phase: Phase,
    next_id: u64,
    live: BTreeSet<u64>,
    lines: usize,
}

impl ProofWriter {
    fn with_sink(sink: Sink) -> ProofWriter {
        ProofWriter { sink, phase: Phase::Fresh, next_id: 1, live: BTreeSet::new(), lines: 0 }
    }

    /// Collects the proof in memory; see [`ProofWriter::into_text`].
    pub fn in_memory() -> ProofWriter {
        ProofWriter::with_sink(Sink::Memory(String::new()))
    }

    /// Streams the proof to `w` (buffered, flushed by [`ProofWriter::end`]).
    pub fn streaming(w: Box<dyn Write + Send>) -> ProofWriter {
        ProofWriter::with_sink(Sink::Stream(BufWriter::new(w)))
    }

    /// Tracks IDs without producing any text.
    pub fn disabled() -> ProofWriter {
        ProofWriter::with_sink(Sink::Null)
    }

    pub fn is_enabled(&self) -> bool {
        !matches!(self.sink, Sink::Null)
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn is_live(&self, id: u64) -> bool {
        self.live.contains(&id)
    }

    pub fn live_ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.live.iter().copied()
    }

    /// Number of proof lines written so far.
    pub fn lines(&self) -> usize {
        self.lines
    }

    fn write_line(&mut self, text: &str) -> Result<(), LogError> {
        self.lines += text.lines().count().max(1);
        match &mut self.sink {
            Sink::Memory(s) => {
                s.push_str(text);
                s.push('\n');
            }
            Sink::Stream(w) => {
                w.write_all(text.as_bytes())?;
                w.write_all(b"\n")?;
            }
            Sink::Null => {}
        }
        Ok(())
    }

    fn write_step(&mut self, step: &ProofStep) -> Result<(), LogError> {
        if let Sink::Null = self.sink {
            self.lines += 1;
            return Ok(());
        }
        let mut text = String::new();
        write!(text, "{step}").expect("writing to a String");
        self.write_line(&text)
    }

    /// Emits the header and `f n`; IDs `1..=n` become live.
    pub fn begin(&mut self, n_input: usize) -> Result<(), LogError> {
        if self.phase != Phase::Fresh {
            return Err(LogError::AlreadyBegun);
        }
        self.phase = Phase::Open;
        self.write_line(HEADER)?;
        self.write_step(&ProofStep::LoadInput(n_input))?;
        self.live.extend(1..=n_input as u64);
        self.next_id = n_input as u64 + 1;
        Ok(())
    }

    /// Serializes one step and returns the ID it creates, if any.
    pub fn emit(&mut self, step: &ProofStep) -> Result<Option<u64>, LogError> {
        match self.phase {
            Phase::Fresh => return Err(LogError::NotBegun),
            Phase::Ended => return Err(LogError::Ended),
            Phase::Open => {}
        }
        match step {
            ProofStep::LoadInput(_) => return Err(LogError::Framing("f")),
            ProofStep::OutputSection(_) | ProofStep::ConclusionNone | ProofStep::End => {
                return Err(LogError::Framing("output"))
            }
            ProofStep::Delete { id, .. } if !self.live.contains(id) => return Err(LogError::DeadId(*id)),
            ProofStep::MoveToCore(ids) => {
                if let Some(id) = ids.iter().find(|id| !self.live.contains(id)) {
                    return Err(LogError::DeadId(*id));
                }
            }
            _ => {}
        }
        self.write_step(step)?;
        let consumed = step.ids_consumed();
        self.next_id += consumed;
        match step {
            ProofStep::Delete { id, .. } => {
                self.live.remove(id);
                Ok(None)
            }
            ProofStep::Pol(_) | ProofStep::Rup(_) | ProofStep::Red { .. } => {
                let id = self.next_id - 1;
                self.live.insert(id);
                Ok(Some(id))
            }
            _ => Ok(None),
        }
    }

    /// Emits the output section and trailer, then flushes.
    pub fn end(&mut self, guarantee: Guarantee) -> Result<(), LogError> {
        match self.phase {
            Phase::Fresh => return Err(LogError::NotBegun),
            Phase::Ended => return Err(LogError::Ended),
            Phase::Open => {}
        }
        self.write_step(&ProofStep::OutputSection(guarantee))?;
        self.write_step(&ProofStep::ConclusionNone)?;
        self.write_step(&ProofStep::End)?;
        self.phase = Phase::Ended;
        if let Sink::Stream(w) = &mut self.sink {
            w.flush()?;
        }
        Ok(())
    }

    /// The proof text for an in-memory writer.
    pub fn into_text(self) -> Option<String> {
        match self.sink {
            Sink::Memory(s) => Some(s),
            _ => None,
        }
    }

    /// Flushes a streaming sink without ending the proof.
    pub fn flush(&mut self) -> Result<(), LogError> {
        if let Sink::Stream(w) = &mut self.sink {
            w.flush()?;
        }
        Ok(())
    }

    // Shorthands for the common steps.

    fn derived(&mut self, step: ProofStep) -> Result<u64, LogError> {
        Ok(self.emit(&step)?.expect("derivation steps return an ID"))
    }

    pub fn pol(&mut self, toks: Vec<PolToken>) -> Result<u64, LogError> {
        self.derived(ProofStep::Pol(toks))
    }

    /// `pol a b +`.
    pub fn pol_sum(&mut self, a: u64, b: u64) -> Result<u64, LogError> {
        self.pol(vec![PolToken::Int(a.into()), PolToken::Int(b.into()), PolToken::Add])
    }

    pub fn rup(&mut self, c: &LinearConstraint) -> Result<u64, LogError> {
        self.derived(ProofStep::Rup(c.clone()))
    }

    pub fn red(&mut self, c: &LinearConstraint, witness: &Substitution) -> Result<u64, LogError> {
        self.derived(ProofStep::Red { constraint: c.clone(), witness: witness.clone(), subproofs: None })
    }

    /// `delc id` (RUP rederivation for core constraints).
    pub fn delete(&mut self, id: u64) -> Result<(), LogError> {
        self.emit(&ProofStep::Delete { id, witness: None, subproofs: None }).map(|_| ())
    }

    pub fn delete_with(&mut self, id: u64, witness: &Substitution) -> Result<(), LogError> {
        self.emit(&ProofStep::Delete { id, witness: Some(witness.clone()), subproofs: None }).map(|_| ())
    }

    pub fn obju_diff(&mut self, diff: &Objective) -> Result<(), LogError> {
        self.emit(&ProofStep::ObjUpdateDiff(diff.clone())).map(|_| ())
    }

    pub fn obju_new(&mut self, o: &Objective) -> Result<(), LogError> {
        self.emit(&ProofStep::ObjUpdateNew(o.clone())).map(|_| ())
    }

    pub fn core(&mut self, ids: &[u64]) -> Result<(), LogError> {
        self.emit(&ProofStep::MoveToCore(ids.to_vec())).map(|_| ())
    }
}
