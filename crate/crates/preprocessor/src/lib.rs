//! Certified MaxSAT preprocessing. Every change to the working instance is
//! mirrored by proof steps, so a checker can confirm that the output
//! instance has the same optimum as the input.

mod basic;
mod config;
mod db;
mod elim;
mod error;
mod labels;
mod oracle;
mod probe;
mod work;

pub use config::{parse_techniques, ConfigError, Technique, TechniqueConfig};
pub use error::PreError;
pub use oracle::{SatOracle, SatResult};
pub use work::{Op, Outcome, Preprocessor, Stats};

use proof_log::ProofWriter;
use wcnf_frontend::WcnfInstance;

/// Runs the whole pipeline with an in-memory proof.
pub fn preprocess(input: &WcnfInstance, cfg: &TechniqueConfig) -> Result<(WcnfInstance, String, Stats), PreError> {
    let out = Preprocessor::new(input, cfg.clone(), ProofWriter::in_memory())?.run()?;
    let Outcome { output, stats, writer } = out;
    let proof = writer.into_text().unwrap_or_default();
    Ok((output, proof, stats))
}

/// Runs the whole pipeline, sending the proof to `writer`.
pub fn preprocess_with_writer(
    input: &WcnfInstance,
    cfg: &TechniqueConfig,
    writer: ProofWriter,
) -> Result<Outcome, PreError> {
    Preprocessor::new(input, cfg.clone(), writer)?.run()
}
