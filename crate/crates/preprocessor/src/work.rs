//! Working state, proof plumbing, literal fixing, and the stage drivers.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use pb_core::{BigInt, LinearConstraint, Lit, Objective, Substitution, Var};
use proof_checker::{parse_step, Guarantee, PolToken, ProofState, ProofStep};
use proof_log::ProofWriter;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wcnf_frontend::{encode_to_pb, WcnfInstance, WeightedClause};

use crate::config::{Technique, TechniqueConfig};
use crate::db::{Clause, Db, Handle};
use crate::error::{Flow, PreError, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Phase {
    Wcnf,
    Oc,
}

/// Operations counted in [`Stats`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    FixLiteral,
    RemoveDuplicates,
    RemoveTautologies,
    PropagateHardUnits,
    RemoveEmptySofts,
    EliminateBlockedClauses,
    EliminateSubsumed,
    ConvertToObjectiveCentric,
    EliminateVariableBve,
    AddVariablesBva,
    SelfSubsumingResolution,
    TrimMaxsat,
    FailedLiteralElimination,
    ImpliedLiteralDetection,
    EquivalentLiteralSubstitution,
    SubsumedLiteralElimination,
    GroupSle,
    IntrinsicAtMostOnes,
    BinaryCoreRemoval,
    LabelMatching,
    StructureBasedLabelling,
    Hardening,
    RemoveObjectiveConstant,
    RenameVariables,
    Finalize,
}

impl Op {
    pub const ALL: [Op; 25] = [
        Op::FixLiteral,
        Op::RemoveDuplicates,
        Op::RemoveTautologies,
        Op::PropagateHardUnits,
        Op::RemoveEmptySofts,
        Op::EliminateBlockedClauses,
        Op::EliminateSubsumed,
        Op::ConvertToObjectiveCentric,
        Op::EliminateVariableBve,
        Op::AddVariablesBva,
        Op::SelfSubsumingResolution,
        Op::TrimMaxsat,
        Op::FailedLiteralElimination,
        Op::ImpliedLiteralDetection,
        Op::EquivalentLiteralSubstitution,
        Op::SubsumedLiteralElimination,
        Op::GroupSle,
        Op::IntrinsicAtMostOnes,
        Op::BinaryCoreRemoval,
        Op::LabelMatching,
        Op::StructureBasedLabelling,
        Op::Hardening,
        Op::RemoveObjectiveConstant,
        Op::RenameVariables,
        Op::Finalize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::FixLiteral => "fix_literal",
            Op::RemoveDuplicates => "remove_duplicates",
            Op::RemoveTautologies => "remove_tautologies",
            Op::PropagateHardUnits => "propagate_hard_units",
            Op::RemoveEmptySofts => "remove_empty_softs",
            Op::EliminateBlockedClauses => "eliminate_blocked_clauses",
            Op::EliminateSubsumed => "eliminate_subsumed",
            Op::ConvertToObjectiveCentric => "convert_to_objective_centric",
            Op::EliminateVariableBve => "eliminate_variable_bve",
            Op::AddVariablesBva => "add_variables_bva",
            Op::SelfSubsumingResolution => "self_subsuming_resolution",
            Op::TrimMaxsat => "trim_maxsat",
            Op::FailedLiteralElimination => "failed_literal_elimination",
            Op::ImpliedLiteralDetection => "implied_literal_detection",
            Op::EquivalentLiteralSubstitution => "equivalent_literal_substitution",
            Op::SubsumedLiteralElimination => "subsumed_literal_elimination",
            Op::GroupSle => "group_sle",
            Op::IntrinsicAtMostOnes => "intrinsic_at_most_ones",
            Op::BinaryCoreRemoval => "binary_core_removal",
            Op::LabelMatching => "label_matching",
            Op::StructureBasedLabelling => "structure_based_labelling",
            Op::Hardening => "hardening",
            Op::RemoveObjectiveConstant => "remove_objective_constant",
            Op::RenameVariables => "rename_variables",
            Op::Finalize => "finalize",
        }
    }

    /// Whether an application counts against the step limit.
    fn is_technique(self) -> bool {
        !matches!(
            self,
            Op::FixLiteral
                | Op::ConvertToObjectiveCentric
                | Op::RemoveObjectiveConstant
                | Op::RenameVariables
                | Op::Finalize
        )
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub applied: BTreeMap<Op, u64>,
    pub stage2_rounds: usize,
    pub stage4_rounds: usize,
    pub step_limit_hit: bool,
    pub time_limit_hit: bool,
    pub infeasible: bool,
    pub proof_lines: usize,
}

impl Stats {
    pub fn count(&self, op: Op) -> u64 {
        self.applied.get(&op).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &Stats) {
        for (op, n) in &other.applied {
            *self.applied.entry(*op).or_default() += n;
        }
    }
}

/// Result of a completed run.
pub struct Outcome {
    pub output: WcnfInstance,
    pub stats: Stats,
    pub writer: ProofWriter,
}

impl Outcome {
    /// Proof text, for in-memory writers.
    pub fn proof_text(self) -> Option<String> {
        self.writer.into_text()
    }
}

pub(crate) const STAGE2: [Technique; 6] =
    [Technique::Dup, Technique::Taut, Technique::Up, Technique::Empty, Technique::Sub, Technique::Bce];

pub(crate) const STAGE4: [Technique; 20] = [
    Technique::Up,
    Technique::Taut,
    Technique::Sub,
    Technique::Dup,
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

pub(crate) fn big(c: i128) -> BigInt {
    BigInt::from(c)
}

fn small(c: &BigInt) -> i128 {
    i128::try_from(c).expect("objective coefficients stay far below 2^127")
}

/// `a ⊆ b` for sorted slices.
pub(crate) fn subset(a: &[Lit], b: &[Lit]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.by_ref().any(|y| y == x))
}

pub(crate) fn clause(lits: &[Lit]) -> LinearConstraint {
    LinearConstraint::clause(&crate::db::normalize(lits.to_vec()))
}

/// The certified preprocessor. Construct with [`Preprocessor::new`], then
/// either call [`Preprocessor::run`] or drive the stages individually.
pub struct Preprocessor {
    pub(crate) cfg: TechniqueConfig,
    pub(crate) phase: Phase,
    pub(crate) db: Db,
    /// Always equal to the proof objective.
    pub(crate) obj: Objective,
    pub(crate) writer: ProofWriter,
    replay: Option<ProofState>,
    pub(crate) next_fresh: u32,
    input_vars: u32,
    pub(crate) stats: Stats,
    pub(crate) steps: u64,
    deadline: Option<Instant>,
    pub(crate) model: Option<pb_core::Assignment>,
    pub(crate) rng: ChaCha8Rng,
    infeasible: bool,
    stage5_done: bool,
}

impl Preprocessor {
    /// Stage 1: encode the input and open the proof with it as core.
    pub fn new(input: &WcnfInstance, cfg: TechniqueConfig, mut writer: ProofWriter) -> Result<Preprocessor, PreError> {
        cfg.validate()?;
        let enc = encode_to_pb(input);
        writer.begin(enc.constraints.len())?;
        let replay = if cfg.debug_replay {
            let mut st = ProofState::new(&enc.constraints, &enc.objective);
            st.apply(&ProofStep::LoadInput(enc.constraints.len()))
                .map_err(|e| PreError::Replay { step: "f".into(), reason: e.to_string() })?;
            Some(st)
        } else {
            None
        };
        let mut db = Db::default();
        for (k, o) in enc.origin.iter().enumerate() {
            let lits = input.clauses[o.clause].normalized_lits();
            db.insert(Clause::new(lits, k as u64 + 1, o.relax));
        }
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let deadline = cfg.time_limit.map(|d| Instant::now() + d);
        Ok(Preprocessor {
            cfg,
            phase: Phase::Wcnf,
            db,
            obj: enc.objective,
            writer,
            replay,
            next_fresh: enc.num_fresh + 1,
            input_vars: input.num_vars,
            stats: Stats::default(),
            steps: 0,
            deadline,
            model: None,
            rng,
            infeasible: false,
            stage5_done: false,
        })
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn proof_lines(&self) -> usize {
        self.writer.lines()
    }

    pub fn is_infeasible(&self) -> bool {
        self.infeasible
    }

    pub fn num_clauses(&self) -> usize {
        self.db.len()
    }

    /// Runs Stages 2 to 5 and finalizes.
    pub fn run(mut self) -> Result<Outcome, PreError> {
        self.stage2()?;
        self.stage3()?;
        self.stage4()?;
        self.stage5()?;
        self.finalize()
    }

    // -----------------------------------------------------------------------
    // Proof plumbing

    pub(crate) fn emit(&mut self, step: ProofStep) -> Step<Option<u64>> {
        if let Some(st) = self.replay.as_mut() {
            let text = step.to_string();
            let parsed =
                parse_step(&text).map_err(|e| PreError::Replay { step: text.clone(), reason: e.to_string() })?;
            st.apply(&parsed).map_err(|e| PreError::Replay { step: text, reason: e.to_string() })?;
        }
        Ok(self.writer.emit(&step)?)
    }

    fn emit_id(&mut self, step: ProofStep) -> Step<u64> {
        self.emit(step)?.ok_or_else(|| Flow::Fail(PreError::Internal("derivation without ID".into())))
    }

    pub(crate) fn rup(&mut self, c: LinearConstraint) -> Step<u64> {
        self.emit_id(ProofStep::Rup(c))
    }

    pub(crate) fn rup_clause(&mut self, lits: &[Lit]) -> Step<u64> {
        self.rup(clause(lits))
    }

    pub(crate) fn red(&mut self, c: LinearConstraint, witness: Substitution) -> Step<u64> {
        self.emit_id(ProofStep::Red { constraint: c, witness, subproofs: None })
    }

    pub(crate) fn pol(&mut self, toks: Vec<PolToken>) -> Step<u64> {
        self.emit_id(ProofStep::Pol(toks))
    }

    pub(crate) fn core(&mut self, ids: &[u64]) -> Step<()> {
        self.emit(ProofStep::MoveToCore(ids.to_vec())).map(|_| ())
    }

    pub(crate) fn delc(&mut self, id: u64) -> Step<()> {
        self.emit(ProofStep::Delete { id, witness: None, subproofs: None }).map(|_| ())
    }

    pub(crate) fn delc_with(&mut self, id: u64, witness: Substitution) -> Step<()> {
        self.emit(ProofStep::Delete { id, witness: Some(witness), subproofs: None }).map(|_| ())
    }

    /// Emits `obju diff` and applies it to the working objective.
    pub(crate) fn obju(&mut self, raw: &[(i128, Lit)], constant: i128) -> Step<()> {
        let diff = Objective::new(raw.iter().map(|&(c, l)| (big(c), l)), big(constant));
        self.emit(ProofStep::ObjUpdateDiff(diff.clone()))?;
        self.obj = self.obj.add(&diff);
        Ok(())
    }

    pub(crate) fn fresh_var(&mut self) -> Var {
        let v = Var::fresh(self.next_fresh);
        self.next_fresh += 1;
        v
    }

    // -----------------------------------------------------------------------
    // Objective views

    /// Canonical coefficient of `v` (positive-literal form).
    pub(crate) fn coef(&self, v: Var) -> Option<i128> {
        self.obj.coef(v).map(small)
    }

    /// The literal of `v` that costs when true, with its positive coefficient.
    pub(crate) fn obj_lit(&self, v: Var) -> Option<(Lit, i128)> {
        self.coef(v).map(|a| if a > 0 { (v.pos(), a) } else { (v.neg(), -a) })
    }

    /// Whether `l` is the costly literal of its variable.
    pub(crate) fn is_obj_lit(&self, l: Lit) -> bool {
        self.obj_lit(l.var()).is_some_and(|(m, _)| m == l)
    }

    pub(crate) fn in_obj(&self, v: Var) -> bool {
        self.obj.contains(v)
    }

    /// Constant of the objective written with positive coefficients only.
    pub(crate) fn lit_constant(&self) -> i128 {
        small(self.obj.constant()) + self.obj.terms().iter().map(|(c, _)| small(c)).filter(|&c| c < 0).sum::<i128>()
    }

    // -----------------------------------------------------------------------
    // Bookkeeping

    pub(crate) fn applied(&mut self, op: Op) {
        *self.stats.applied.entry(op).or_default() += 1;
        if op.is_technique() {
            self.steps += 1;
        }
    }

    pub(crate) fn budget_left(&mut self) -> bool {
        if self.cfg.step_limit.is_some_and(|l| self.steps >= l) {
            self.stats.step_limit_hit = true;
            return false;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.stats.time_limit_hit = true;
            return false;
        }
        true
    }

    fn check_empty(&self) -> Step<()> {
        if self.db.clauses().any(|(_, c)| c.is_hard() && c.lits.is_empty()) {
            return Err(Flow::Infeasible);
        }
        Ok(())
    }

    /// Debug replay: compares the working state with the replayed proof.
    fn check_correspondence(&self, after: &str) -> Result<(), PreError> {
        let Some(st) = &self.replay else { return Ok(()) };
        let fail = |detail: String| PreError::Correspondence { technique: after.to_string(), detail };
        // Vacuous constraints carry no information and may lag behind renaming.
        let mut core: Vec<String> = st.core().filter(|(_, c)| !c.is_vacuous()).map(|(_, c)| c.to_string()).collect();
        let mut work: Vec<String> =
            self.db.clauses().map(|(_, c)| c.constraint()).filter(|c| !c.is_vacuous()).map(|c| c.to_string()).collect();
        core.sort();
        work.sort();
        if core != work {
            return Err(fail(format!("core {core:?} vs working {work:?}")));
        }
        for (_, c) in self.db.clauses() {
            if !st.is_core(c.id) || !c.taut && st.get(c.id) != Some(&c.constraint()) {
                return Err(fail(format!("clause ID {} does not name its constraint", c.id)));
            }
        }
        if st.objective() != &self.obj {
            return Err(fail(format!("objective {} vs working {}", st.objective(), self.obj)));
        }
        if let Some((id, c)) = st.derived().next() {
            return Err(fail(format!("derived constraint {id} ({c}) left behind")));
        }
        Ok(())
    }

    // -----------------------------------------------------------------------
    // Clause removal and literal fixing

    /// Deletes a clause whose constraint is RUP from the rest of the core.
    pub(crate) fn remove_rup(&mut self, h: Handle) -> Step<()> {
        let c = self.db.remove(h);
        self.delc(c.id)?;
        if let Some(b) = c.relax {
            self.drop_relax(b)?;
        }
        Ok(())
    }

    /// Deletes a clause by redundance with the given witness.
    pub(crate) fn remove_with(&mut self, h: Handle, witness: Substitution) -> Step<()> {
        let c = self.db.remove(h);
        self.delc_with(c.id, witness)?;
        if let Some(b) = c.relax {
            self.drop_relax(b)?;
        }
        Ok(())
    }

    /// Removes a relaxation variable that no longer occurs in any constraint.
    pub(crate) fn drop_relax(&mut self, b: Var) -> Step<()> {
        let w = self.coef(b).unwrap_or(0);
        let mut zero = Substitution::new();
        zero.set_lit(b.pos(), false);
        let id = self.red(clause(&[b.neg()]), zero.clone())?;
        self.core(&[id])?;
        if w != 0 {
            self.obju(&[(-w, b.pos())], 0)?;
        }
        self.delc_with(id, zero)
    }

    /// Core-moves `id` (the constraint `l >= 1`), records it as a unit
    /// clause and fixes `l`.
    pub(crate) fn fix_new_unit(&mut self, l: Lit, id: u64) -> Step<()> {
        self.core(&[id])?;
        let h = self.db.insert(Clause::new(vec![l], id, None));
        self.fix_unit(h)
    }

    /// Fixes the literal of the hard unit clause `unit`.
    pub(crate) fn fix_unit(&mut self, unit: Handle) -> Step<()> {
        let (l, uid) = {
            let c = self.db.get(unit);
            if c.lits.len() != 1 || !c.is_hard() {
                return Err(Flow::Fail(PreError::Internal(format!("fixing a non-unit clause {:?}", c.lits))));
            }
            (c.lits[0], c.id)
        };
        self.applied(Op::FixLiteral);
        let v = l.var();
        if let Some(a) = self.coef(v) {
            self.obju(&[(-a, v.pos())], if l.is_positive() { a } else { 0 })?;
        }
        for h in self.db.occ(!l).to_vec() {
            let (cid, relax, lits) = {
                let c = self.db.get(h);
                (c.id, c.relax, c.lits.clone())
            };
            let id = self.pol(vec![PolToken::Int(cid.into()), PolToken::Int(uid.into()), PolToken::Add])?;
            let rest: Vec<Lit> = lits.into_iter().filter(|&m| m != !l).collect();
            if rest.is_empty() && relax.is_none() {
                return Err(Flow::Infeasible);
            }
            self.core(&[id])?;
            self.delc(cid)?;
            self.db.replace(h, rest, id);
        }
        for h in self.db.occ(l).to_vec() {
            if h != unit {
                self.remove_rup(h)?;
            }
        }
        self.db.remove(unit);
        self.delc_with(uid, Substitution::lit_true(l))
    }

    // -----------------------------------------------------------------------
    // Stages

    fn guard(&mut self, r: Step<()>) -> Result<(), PreError> {
        match r {
            Ok(()) => Ok(()),
            Err(Flow::Infeasible) => {
                self.infeasible = true;
                Ok(())
            }
            Err(Flow::Fail(e)) => Err(e),
        }
    }

    fn run_stage(&mut self, list: &[Technique]) -> Step<usize> {
        self.check_empty()?;
        let mut rounds = 0;
        for _ in 0..self.cfg.rounds {
            let before = self.writer.lines();
            rounds += 1;
            for &t in list {
                if !self.cfg.is_enabled(t) || !self.budget_left() {
                    continue;
                }
                self.run_technique(t)?;
                self.check_empty()?;
                self.check_correspondence(t.name())?;
            }
            if self.writer.lines() == before || !self.budget_left() {
                break;
            }
        }
        Ok(rounds)
    }

    fn run_technique(&mut self, t: Technique) -> Step<()> {
        match (self.phase, t) {
            (_, Technique::Dup) => self.remove_duplicates(),
            (_, Technique::Taut) => self.remove_tautologies(),
            (_, Technique::Up) => self.propagate_hard_units(),
            (Phase::Wcnf, Technique::Empty) => self.remove_empty_softs(),
            (_, Technique::Sub) => self.eliminate_subsumed(),
            (_, Technique::Bce) => self.eliminate_blocked_clauses(),
            (Phase::Oc, Technique::Ssr) => self.self_subsuming_resolution(),
            (Phase::Oc, Technique::Fle) => self.failed_literal_elimination(),
            (Phase::Oc, Technique::Implied) => self.probe_implications(true, false),
            (Phase::Oc, Technique::Equiv) => self.probe_implications(false, true),
            (Phase::Oc, Technique::Sle) => self.subsumed_label_elimination(),
            (Phase::Oc, Technique::SleVar) => self.subsumed_literal_elimination(),
            (Phase::Oc, Technique::Gsle) => self.group_sle(),
            (Phase::Oc, Technique::Bve) => self.bve(),
            (Phase::Oc, Technique::Bva) => self.bva(),
            (Phase::Oc, Technique::Am1) => self.intrinsic_at_most_ones(),
            (Phase::Oc, Technique::Bcr) => self.binary_core_removal(),
            (Phase::Oc, Technique::Lm) => self.label_matching(),
            (Phase::Oc, Technique::Slab) => self.structure_based_labelling(),
            (Phase::Oc, Technique::Trim) => self.trim_maxsat(),
            (Phase::Oc, Technique::Harden) => self.hardening(),
            _ => Ok(()),
        }
    }

    /// Stage 2: WCNF-phase techniques to fixpoint (or the round cap).
    pub fn stage2(&mut self) -> Result<(), PreError> {
        if self.infeasible || self.phase != Phase::Wcnf {
            return Ok(());
        }
        let r = self.run_stage(&STAGE2).map(|n| self.stats.stage2_rounds += n);
        self.guard(r)
    }

    /// Stage 3: switch to the objective-centric view.
    pub fn stage3(&mut self) -> Result<(), PreError> {
        if self.infeasible || self.phase != Phase::Wcnf {
            return Ok(());
        }
        let r = self.convert_to_objective_centric().and_then(|()| {
            self.check_correspondence("convert_to_objective_centric")?;
            Ok(())
        });
        self.guard(r)
    }

    /// Stage 4: objective-centric techniques to fixpoint (or the round cap).
    pub fn stage4(&mut self) -> Result<(), PreError> {
        self.stage3()?;
        if self.infeasible {
            return Ok(());
        }
        let r = self.run_stage(&STAGE4).map(|n| self.stats.stage4_rounds += n);
        self.guard(r)
    }

    /// Stage 5: constant removal and renaming.
    pub fn stage5(&mut self) -> Result<(), PreError> {
        self.stage3()?;
        if self.infeasible || self.stage5_done {
            return Ok(());
        }
        self.stage5_done = true;
        let r = self.remove_objective_constant().and_then(|()| self.rename_variables());
        self.guard(r)?;
        self.check_correspondence("stage 5")
    }

    /// Emits the output instance and closes the proof. Runs any stage that
    /// is still required for a well-formed output.
    pub fn finalize(mut self) -> Result<Outcome, PreError> {
        self.stage5()?;
        let output = if self.infeasible { self.finalize_infeasible()? } else { self.output_instance()? };
        self.applied(Op::Finalize);
        self.writer.end(Guarantee::Equioptimal)?;
        if let Some(st) = self.replay.as_mut() {
            st.apply(&ProofStep::OutputSection(Guarantee::Equioptimal))
                .map_err(|e| PreError::Replay { step: "output".into(), reason: e.to_string() })?;
            let enc = encode_to_pb(&output);
            st.check_output(Guarantee::Equioptimal, &enc.constraints, &enc.objective)
                .map_err(|reason| PreError::Replay { step: "output".into(), reason })?;
        }
        self.stats.infeasible = self.infeasible;
        self.stats.proof_lines = self.writer.lines();
        Ok(Outcome { output, stats: self.stats, writer: self.writer })
    }

    /// `0 >= 1` is RUP here; keep it as the only core constraint.
    fn finalize_infeasible(&mut self) -> Result<WcnfInstance, PreError> {
        let flow = |f: Flow| match f {
            Flow::Fail(e) => e,
            Flow::Infeasible => PreError::Internal("nested infeasibility".into()),
        };
        let id = self.rup(LinearConstraint::contradiction()).map_err(flow)?;
        self.core(&[id]).map_err(flow)?;
        let live: Vec<u64> = self.writer.live_ids().filter(|&x| x != id).collect();
        for x in live {
            self.delc(x).map_err(flow)?;
        }
        self.emit(ProofStep::ObjUpdateNew(Objective::zero())).map_err(flow)?;
        self.db = Db::default();
        self.obj = Objective::zero();
        Ok(WcnfInstance::new(vec![WeightedClause::hard(Vec::new())]))
    }

    fn output_instance(&self) -> Result<WcnfInstance, PreError> {
        let weight = |c: i128| u64::try_from(c).map_err(|_| PreError::WeightOverflow(c.to_string()));
        let mut clauses: Vec<WeightedClause> =
            self.db.clauses().map(|(_, c)| WeightedClause::hard(c.lits.clone())).collect();
        if self.lit_constant() != 0 {
            return Err(PreError::Internal("objective constant survived constant removal".into()));
        }
        for (c, v) in self.obj.terms() {
            let c = small(c);
            if c > 0 {
                clauses.push(WeightedClause::soft(weight(c)?, vec![v.neg()]));
            } else {
                clauses.push(WeightedClause::soft(weight(-c)?, vec![v.pos()]));
            }
        }
        Ok(WcnfInstance::new(clauses))
    }

    // -----------------------------------------------------------------------
    // Stage 5

    fn remove_objective_constant(&mut self) -> Step<()> {
        let w = self.lit_constant();
        if w <= 0 {
            return Ok(());
        }
        let bw = self.fresh_var();
        let id = self.red(clause(&[bw.pos()]), Substitution::lit_true(bw.pos()))?;
        self.core(&[id])?;
        self.obju(&[(w, bw.pos())], -w)?;
        self.db.insert(Clause::new(vec![bw.pos()], id, None));
        self.applied(Op::RemoveObjectiveConstant);
        Ok(())
    }

    /// Non-user variables become user variables numbered after the input's,
    /// in order of first occurrence in the output.
    fn rename_variables(&mut self) -> Step<()> {
        let mut order = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let clause_vars: Vec<Var> =
            self.db.clauses().flat_map(|(_, c)| c.full_lits().into_iter().map(|l| l.var())).collect();
        for v in clause_vars.into_iter().chain(self.obj.vars().collect::<Vec<_>>()) {
            if v.ns() != pb_core::Namespace::User && seen.insert(v) {
                order.push(v);
            }
        }
        let mut next = self.input_vars;
        for v in order {
            next += 1;
            self.rename_var(v, Var::user(next))?;
        }
        Ok(())
    }

    /// Moves every occurrence of `v` to the unused variable `u`.
    fn rename_var(&mut self, v: Var, u: Var) -> Step<()> {
        let mut def = Substitution::new();
        def.map_lit(u.pos(), v.pos()).map_err(|e| Flow::Fail(PreError::Internal(e.to_string())))?;
        let e1 = self.red(clause(&[u.pos(), v.neg()]), def.clone())?;
        let e2 = self.red(clause(&[u.neg(), v.pos()]), def)?;
        self.core(&[e1, e2])?;
        let map = |l: Lit| if l.var() == v { u.lit(l.is_positive()) } else { l };
        let mut hs: Vec<Handle> = self.db.occ(v.pos()).iter().chain(self.db.occ(v.neg())).copied().collect();
        hs.sort_unstable();
        hs.dedup();
        for h in hs {
            let (old, lits) = {
                let c = self.db.get(h);
                (c.id, c.lits.iter().map(|&l| map(l)).collect::<Vec<_>>())
            };
            let id = self.rup_clause(&lits)?;
            self.core(&[id])?;
            self.delc(old)?;
            self.db.replace(h, lits, id);
        }
        // Tautologies are unindexed and their constraints vacuous.
        let tauts: Vec<Handle> =
            self.db.clauses().filter(|(_, c)| c.taut && c.lits.iter().any(|l| l.var() == v)).map(|(h, _)| h).collect();
        for h in tauts {
            let (id, lits) = {
                let c = self.db.get(h);
                (c.id, c.lits.iter().map(|&l| map(l)).collect::<Vec<_>>())
            };
            self.db.replace(h, lits, id);
        }
        if let Some(a) = self.coef(v) {
            self.obju(&[(-a, v.pos()), (a, u.pos())], 0)?;
        }
        let mut back = Substitution::new();
        back.map_lit(v.pos(), u.pos()).map_err(|e| Flow::Fail(PreError::Internal(e.to_string())))?;
        self.delc_with(e1, back.clone())?;
        self.delc_with(e2, back)?;
        self.applied(Op::RenameVariables);
        Ok(())
    }
}
