use std::collections::BTreeSet;
use std::fmt;
use std::time::Duration;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown technique `{0}`")]
    UnknownTechnique(String),
    #[error("round cap must be at least 1")]
    ZeroRounds,
}

/// One selectable technique; names match the `--techniques` flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Technique {
    Dup,
    Taut,
    Up,
    Empty,
    Sub,
    Bce,
    Ssr,
    Fle,
    Implied,
    Equiv,
    Sle,
    SleVar,
    Gsle,
    Bve,
    Bva,
    Am1,
    Bcr,
    Lm,
    Slab,
    Trim,
    Harden,
}

impl Technique {
    pub const ALL: [Technique; 21] = [
        Technique::Dup,
        Technique::Taut,
        Technique::Up,
        Technique::Empty,
        Technique::Sub,
        Technique::Bce,
        Technique::Ssr,
        Technique::Fle,
        Technique::Implied,
        Technique::Equiv,
        Technique::Sle,
        Technique::SleVar,
        Technique::Gsle,
        Technique::Bve,
        Technique::Bva,
        Technique::Am1,
        Technique::Bcr,
        Technique::Lm,
        Technique::Slab,
        Technique::Trim,
        Technique::Harden,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technique::Dup => "dup",
            Technique::Taut => "taut",
            Technique::Up => "up",
            Technique::Empty => "empty",
            Technique::Sub => "sub",
            Technique::Bce => "bce",
            Technique::Ssr => "ssr",
            Technique::Fle => "fle",
            Technique::Implied => "implied",
            Technique::Equiv => "equiv",
            Technique::Sle => "sle",
            Technique::SleVar => "sle-var",
            Technique::Gsle => "gsle",
            Technique::Bve => "bve",
            Technique::Bva => "bva",
            Technique::Am1 => "am1",
            Technique::Bcr => "bcr",
            Technique::Lm => "lm",
            Technique::Slab => "slab",
            Technique::Trim => "trim",
            Technique::Harden => "harden",
        }
    }

    pub fn from_name(name: &str) -> Option<Technique> {
        Technique::ALL.into_iter().find(|t| t.name() == name)
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a comma-separated technique list; the empty string selects none.
pub fn parse_techniques(list: &str) -> Result<BTreeSet<Technique>, ConfigError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| Technique::from_name(s).ok_or_else(|| ConfigError::UnknownTechnique(s.to_string())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TechniqueConfig {
    pub enabled: BTreeSet<Technique>,
    /// Rounds per stage; a stage stops earlier once a round changes nothing.
    pub rounds: usize,
    /// BVE eliminates when resolvents ≤ originals + this bound.
    pub bve_growth: usize,
    /// BVA ignores literals with more occurrences than this.
    pub bva_max_occ: usize,
    /// BVA stops growing the matched literal set at this size.
    pub bva_max_lits: usize,
    /// Initial TrimMaxSAT subset size; `None` means all candidates.
    pub trim_initial: Option<usize>,
    /// Conflict budget per oracle call; exceeding it aborts the technique.
    pub conflict_budget: u64,
    /// Literals probed per FLE / implied / equivalent-literal pass.
    pub probe_budget: usize,
    /// Stop after this many technique applications and finalize.
    pub step_limit: Option<u64>,
    /// Wall-clock budget checked at the same points as `step_limit`.
    /// Runs that hit it are not reproducible.
    pub time_limit: Option<Duration>,
    pub seed: u64,
    /// Replay every emitted step in a checker and verify correspondence
    /// after every technique. Slow; meant for tests.
    pub debug_replay: bool,
}

impl Default for TechniqueConfig {
    fn default() -> Self {
        TechniqueConfig {
            enabled: Technique::ALL.into_iter().filter(|t| *t != Technique::Am1).collect(),
            rounds: 5,
            bve_growth: 0,
            bva_max_occ: 64,
            bva_max_lits: 16,
            trim_initial: None,
            conflict_budget: 10_000,
            probe_budget: 2_000,
            step_limit: None,
            time_limit: None,
            seed: 0,
            debug_replay: false,
        }
    }
}

impl TechniqueConfig {
    /// Default bounds with exactly the techniques in `list` enabled.
    pub fn with_techniques(list: &str) -> Result<TechniqueConfig, ConfigError> {
        Ok(TechniqueConfig { enabled: parse_techniques(list)?, ..TechniqueConfig::default() })
    }

    pub fn none() -> TechniqueConfig {
        TechniqueConfig { enabled: BTreeSet::new(), ..TechniqueConfig::default() }
    }

    pub fn is_enabled(&self, t: Technique) -> bool {
        self.enabled.contains(&t)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds == 0 {
            return Err(ConfigError::ZeroRounds);
        }
        Ok(())
    }
}
