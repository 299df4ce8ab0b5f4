//! Proof state and rule applications.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use pb_core::{BigInt, LinearConstraint, Objective, Propagator, Substitution, Var};

use crate::step::{Goal, Guarantee, InnerStep, PolToken, ProofStep, Subproof};
use crate::RuleError;

#[derive(Clone, Debug)]
struct Stored {
    constraint: LinearConstraint,
    primitive: LinearConstraint,
    core: bool,
}

/// Multiset of primitive forms, for syntactic implication lookups.
#[derive(Clone, Debug, Default)]
struct PrimitiveSet(HashMap<LinearConstraint, u32>);

impl PrimitiveSet {
    fn insert(&mut self, p: &LinearConstraint) {
        *self.0.entry(p.clone()).or_insert(0) += 1;
    }

    fn remove(&mut self, p: &LinearConstraint) {
        if let Some(n) = self.0.get_mut(p) {
            *n -= 1;
            if *n == 0 {
                self.0.remove(p);
            }
        }
    }

    fn count(&self, p: &LinearConstraint) -> u32 {
        self.0.get(p).copied().unwrap_or(0)
    }
}

/// Which stored constraints act as premises (and obligations) for a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Scope {
    /// `𝒞 ∪ 𝒟`.
    All,
    /// `𝒞` only.
    Core,
    /// `𝒞 ∖ {id}`.
    CoreWithout(u64),
}

/// Core set, derived set, objective and the occurrence index.
#[derive(Clone, Debug)]
pub struct ProofState {
    store: BTreeMap<u64, Stored>,
    objective: Objective,
    next_id: u64,
    n_input: usize,
    loaded: bool,
    output: Option<Guarantee>,
    concluded: bool,
    ended: bool,
    // Occurrences are appended eagerly and pruned lazily: entries for
    // deleted IDs linger until the variable is looked up or `flush` runs.
    occ: HashMap<Var, Vec<u64>>,
    prim_all: PrimitiveSet,
    prim_core: PrimitiveSet,
    all_prop: Option<Propagator>,
    core_prop: Option<Propagator>,
}

enum Item {
    Num(BigInt),
    Cons(LinearConstraint),
}

impl ProofState {
    /// Core `{1..n}` holds the instance constraints in order.
    pub fn new(instance: &[LinearConstraint], objective: &Objective) -> ProofState {
        let mut s = ProofState {
            store: BTreeMap::new(),
            objective: objective.clone(),
            next_id: 1,
            n_input: instance.len(),
            loaded: false,
            output: None,
            concluded: false,
            ended: false,
            occ: HashMap::new(),
            prim_all: PrimitiveSet::default(),
            prim_core: PrimitiveSet::default(),
            all_prop: None,
            core_prop: None,
        };
        for c in instance {
            let id = s.insert(c.clone());
            s.set_core(id);
        }
        s
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn next_id(&self) -> u64 {
        self.next_id
    }

    pub fn output_guarantee(&self) -> Option<Guarantee> {
        self.output
    }

    pub fn is_ended(&self) -> bool {
        self.ended
    }

    pub fn get(&self, id: u64) -> Option<&LinearConstraint> {
        self.store.get(&id).map(|s| &s.constraint)
    }

    pub fn is_core(&self, id: u64) -> bool {
        self.store.get(&id).is_some_and(|s| s.core)
    }

    pub fn core(&self) -> impl Iterator<Item = (u64, &LinearConstraint)> + '_ {
        self.store.iter().filter(|(_, s)| s.core).map(|(&id, s)| (id, &s.constraint))
    }

    pub fn derived(&self) -> impl Iterator<Item = (u64, &LinearConstraint)> + '_ {
        self.store.iter().filter(|(_, s)| !s.core).map(|(&id, s)| (id, &s.constraint))
    }

    // -----------------------------------------------------------------------
    // Storage

    fn insert(&mut self, c: LinearConstraint) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        for v in c.vars() {
            self.occ.entry(v).or_default().push(id);
        }
        let primitive = c.primitive();
        self.prim_all.insert(&primitive);
        if let Some(p) = &mut self.all_prop {
            p.add_constraint(&c);
        }
        self.store.insert(id, Stored { constraint: c, primitive, core: false });
        id
    }

    fn set_core(&mut self, id: u64) {
        let s = self.store.get_mut(&id).expect("live id");
        s.core = true;
        self.prim_core.insert(&s.primitive);
        if let Some(p) = &mut self.core_prop {
            p.add_constraint(&s.constraint);
        }
    }

    fn remove(&mut self, id: u64) {
        let s = self.store.remove(&id).expect("live id");
        self.prim_all.remove(&s.primitive);
        self.all_prop = None;
        if s.core {
            self.prim_core.remove(&s.primitive);
            self.core_prop = None;
        }
    }

    fn in_scope(&self, id: u64, scope: Scope) -> bool {
        match (self.store.get(&id), scope) {
            (None, _) => false,
            (Some(_), Scope::All) => true,
            (Some(s), Scope::Core) => s.core,
            (Some(s), Scope::CoreWithout(x)) => s.core && id != x,
        }
    }

    fn contains_primitive(&self, p: &LinearConstraint, scope: Scope) -> bool {
        match scope {
            Scope::All => self.prim_all.count(p) > 0,
            Scope::Core => self.prim_core.count(p) > 0,
            Scope::CoreWithout(x) => {
                let own = self.store.get(&x).is_some_and(|s| &s.primitive == p) as u32;
                self.prim_core.count(p) > own
            }
        }
    }

    fn propagator(&mut self, scope: Scope) -> Propagator {
        match scope {
            Scope::All => {
                if self.all_prop.is_none() {
                    self.all_prop = Some(Propagator::with_constraints(self.store.values().map(|s| &s.constraint)));
                }
                self.all_prop.clone().expect("just built")
            }
            Scope::Core => {
                if self.core_prop.is_none() {
                    self.core_prop = Some(Propagator::with_constraints(
                        self.store.values().filter(|s| s.core).map(|s| &s.constraint),
                    ));
                }
                self.core_prop.clone().expect("just built")
            }
            Scope::CoreWithout(x) => Propagator::with_constraints(
                self.store.iter().filter(|(&id, s)| s.core && id != x).map(|(_, s)| &s.constraint),
            ),
        }
    }

    /// `target` is vacuous, a multiple of a premise, or follows by RUP.
    fn implied(&mut self, target: &LinearConstraint, scope: Scope) -> bool {
        if target.is_vacuous() || self.contains_primitive(&target.primitive(), scope) {
            return true;
        }
        let mut p = self.propagator(scope);
        p.add_constraint(&target.negate());
        p.in_conflict()
    }

    // -----------------------------------------------------------------------
    // Occurrence index

    /// Live IDs whose constraint mentions `v`; prunes stale entries.
    fn occurrences_of(&mut self, v: Var) -> Vec<u64> {
        let Some(ids) = self.occ.get_mut(&v) else { return Vec::new() };
        ids.retain(|id| self.store.contains_key(id));
        let out = ids.clone();
        if ids.is_empty() {
            self.occ.remove(&v);
        }
        out
    }

    /// Drops every stale entry from the occurrence index.
    pub fn flush_occurrences(&mut self) {
        let store = &self.store;
        self.occ.retain(|_, ids| {
            ids.retain(|id| store.contains_key(id));
            !ids.is_empty()
        });
    }

    /// The occurrence index as currently stored.
    pub fn occurrence_index(&self) -> BTreeMap<Var, BTreeSet<u64>> {
        self.occ.iter().map(|(&v, ids)| (v, ids.iter().copied().collect())).collect()
    }

    /// The occurrence index recomputed from the live constraints.
    pub fn recompute_occurrences(&self) -> BTreeMap<Var, BTreeSet<u64>> {
        let mut out: BTreeMap<Var, BTreeSet<u64>> = BTreeMap::new();
        for (&id, s) in &self.store {
            for v in s.constraint.vars() {
                out.entry(v).or_default().insert(id);
            }
        }
        out
    }

    pub fn occurs_in_objective(&self, v: Var) -> bool {
        self.objective.contains(v)
    }

    // -----------------------------------------------------------------------
    // Rules

    /// Applies one step; returns the ID of the constraint it adds, if any.
    pub fn apply(&mut self, step: &ProofStep) -> Result<Option<u64>, RuleError> {
        if self.ended {
            return Err(RuleError::new("end", "step after end of proof"));
        }
        if !self.loaded && !matches!(step, ProofStep::LoadInput(_)) {
            return Err(RuleError::new("f", "proof must start with `f <n>`"));
        }
        if self.output.is_some() && !matches!(step, ProofStep::ConclusionNone | ProofStep::End) {
            return Err(RuleError::new("output", "only `conclusion` and `end` may follow the output section"));
        }
        match step {
            ProofStep::LoadInput(n) => {
                if self.loaded {
                    return Err(RuleError::new("f", "input loaded twice"));
                }
                if *n != self.n_input {
                    return Err(RuleError::new(
                        "f",
                        format!("proof expects {n} input constraints, instance has {}", self.n_input),
                    ));
                }
                self.loaded = true;
                Ok(None)
            }
            ProofStep::Pol(toks) => {
                let c = self.eval_pol(toks, &HashMap::new()).map_err(|r| RuleError::new("pol", r))?;
                Ok(Some(self.insert(c)))
            }
            ProofStep::Rup(c) => {
                if !self.implied(c, Scope::All) {
                    return Err(RuleError::new("rup", format!("{c} does not follow by unit propagation")));
                }
                Ok(Some(self.insert(c.clone())))
            }
            ProofStep::Red { constraint, witness, subproofs } => {
                let sub = subproofs.as_deref().unwrap_or(&[]);
                self.check_redundance(constraint, witness, sub, Scope::All).map_err(|r| RuleError::new("red", r))?;
                Ok(Some(self.insert(constraint.clone())))
            }
            ProofStep::Delete { id, witness, subproofs } => {
                self.apply_delete(*id, witness.as_ref(), subproofs.as_deref().unwrap_or(&[]))?;
                Ok(None)
            }
            ProofStep::ObjUpdateDiff(d) => {
                let new = self.objective.add(d);
                self.update_objective(new)?;
                Ok(None)
            }
            ProofStep::ObjUpdateNew(o) => {
                self.update_objective(o.clone())?;
                Ok(None)
            }
            ProofStep::MoveToCore(ids) => {
                for &id in ids {
                    match self.store.get(&id) {
                        None => return Err(RuleError::new("core", format!("constraint {id} is not live"))),
                        Some(s) if s.core => {
                            return Err(RuleError::new("core", format!("constraint {id} is already core")))
                        }
                        Some(_) => self.set_core(id),
                    }
                }
                Ok(None)
            }
            ProofStep::OutputSection(g) => {
                self.output = Some(*g);
                Ok(None)
            }
            ProofStep::ConclusionNone => {
                if self.concluded {
                    return Err(RuleError::new("conclusion", "conclusion given twice"));
                }
                self.concluded = true;
                Ok(None)
            }
            ProofStep::End => {
                self.ended = true;
                Ok(None)
            }
        }
    }

    fn apply_delete(
        &mut self,
        id: u64,
        witness: Option<&Substitution>,
        subproofs: &[Subproof],
    ) -> Result<(), RuleError> {
        let Some(s) = self.store.get(&id) else {
            return Err(RuleError::new("delc", format!("constraint {id} is not live")));
        };
        if s.core {
            let c = s.constraint.clone();
            let empty = Substitution::new();
            let w = witness.unwrap_or(&empty);
            self.check_redundance(&c, w, subproofs, Scope::CoreWithout(id))
                .map_err(|r| RuleError::new("delc", format!("cannot rederive {id}: {r}")))?;
        } else {
            // Derived constraints go unconditionally; subproof IDs are still consumed.
            self.next_id += subproofs.iter().map(|s| s.steps.len() as u64).sum::<u64>();
        }
        self.remove(id);
        Ok(())
    }

    fn update_objective(&mut self, new: Objective) -> Result<(), RuleError> {
        let down = self.objective.geq(&new);
        if !self.implied(&down, Scope::Core) {
            return Err(RuleError::new("obju", format!("cannot derive old ≥ new from the core ({down})")));
        }
        let up = new.geq(&self.objective);
        if !self.implied(&up, Scope::Core) {
            return Err(RuleError::new("obju", format!("cannot derive new ≥ old from the core ({up})")));
        }
        self.objective = new;
        Ok(())
    }

    fn eval_pol(&self, toks: &[PolToken], inner: &HashMap<u64, LinearConstraint>) -> Result<LinearConstraint, String> {
        let lookup = |n: &BigInt| -> Result<LinearConstraint, String> {
            let id: u64 = n.try_into().map_err(|_| format!("bad constraint ID {n}"))?;
            inner.get(&id).or_else(|| self.get(id)).cloned().ok_or_else(|| format!("constraint {id} is not live"))
        };
        let as_cons = |it: Item| match it {
            Item::Cons(c) => Ok(c),
            Item::Num(n) => lookup(&n),
        };
        let mut stack: Vec<Item> = Vec::new();
        for t in toks {
            match t {
                PolToken::Int(n) => stack.push(Item::Num(n.clone())),
                PolToken::Axiom(l) => stack.push(Item::Cons(LinearConstraint::literal_axiom(*l))),
                PolToken::Add => {
                    let (b, a) = (stack.pop(), stack.pop());
                    let (Some(a), Some(b)) = (a, b) else { return Err("`+` needs two operands".into()) };
                    stack.push(Item::Cons(as_cons(a)?.add(&as_cons(b)?)));
                }
                PolToken::Mul | PolToken::Div => {
                    let k = match stack.pop() {
                        Some(Item::Num(k)) => k,
                        _ => return Err(format!("`{t}` needs an integer operand")),
                    };
                    let a = stack.pop().ok_or_else(|| format!("`{t}` needs a constraint operand"))?;
                    let a = as_cons(a)?;
                    let r = if *t == PolToken::Mul { a.multiply(&k) } else { a.divide(&k) };
                    stack.push(Item::Cons(r.map_err(|e| e.to_string())?));
                }
                PolToken::Sat => {
                    let a = stack.pop().ok_or("`s` needs an operand")?;
                    stack.push(Item::Cons(as_cons(a)?.saturate()));
                }
            }
        }
        let top = stack.pop().ok_or("empty expression")?;
        if !stack.is_empty() {
            return Err("expression leaves more than one value on the stack".into());
        }
        // Results are stored renormalized; a lone axiom would otherwise keep its term.
        let c = as_cons(top)?;
        Ok(LinearConstraint::normalize(c.terms().iter().map(|t| (t.coef.clone(), t.lit)), c.degree().clone()))
    }

    /// Verifies the redundance obligations for deriving `c` with witness `w`
    /// from the constraints in `scope`, consuming IDs for subproof steps.
    fn check_redundance(
        &mut self,
        c: &LinearConstraint,
        w: &Substitution,
        subproofs: &[Subproof],
        scope: Scope,
    ) -> Result<(), String> {
        // Subproof steps take the next IDs in order of appearance.
        let mut inner_ids = Vec::with_capacity(subproofs.len());
        let mut next = self.next_id;
        for sp in subproofs {
            inner_ids.push(next);
            next += sp.steps.len() as u64;
        }
        let mut by_goal: HashMap<Goal, usize> = HashMap::new();
        for (i, sp) in subproofs.iter().enumerate() {
            if by_goal.insert(sp.goal, i).is_some() {
                return Err(format!("two subproofs for goal {}", sp.goal));
            }
            if let Goal::Id(id) = sp.goal {
                if !self.in_scope(id, scope) {
                    return Err(format!("subproof goal {id} is not a premise"));
                }
            }
        }

        let mut base = self.propagator(scope);
        base.add_constraint(&c.negate());
        let neg_prim = c.negate().primitive();

        let mut touched: BTreeSet<u64> = BTreeSet::new();
        for v in w.vars() {
            for id in self.occurrences_of(v) {
                if self.in_scope(id, scope) {
                    touched.insert(id);
                }
            }
        }

        let mut obligations: Vec<(Goal, LinearConstraint)> = Vec::new();
        for id in touched {
            let d = &self.store[&id].constraint;
            let r = d.apply_substitution(w);
            if r != *d {
                obligations.push((Goal::Id(id), r));
            }
        }
        obligations.push((Goal::Own, c.apply_substitution(w)));
        if w.vars().any(|v| self.objective.contains(v)) {
            obligations.push((Goal::Objective, self.objective.geq(&self.objective.apply_substitution(w))));
        }

        for (goal, r) in obligations {
            if r.is_vacuous() {
                continue;
            }
            let p = r.primitive();
            if self.contains_primitive(&p, scope) || p == neg_prim {
                continue;
            }
            let mut q = base.clone();
            q.add_constraint(&r.negate());
            if q.in_conflict() {
                continue;
            }
            match by_goal.get(&goal) {
                Some(&i) => self.check_subproof(&base, &r, &subproofs[i], inner_ids[i])?,
                None => return Err(format!("obligation {goal} ({r}) is not implied")),
            }
        }
        self.next_id = next;
        Ok(())
    }

    fn check_subproof(
        &self,
        base: &Propagator,
        goal: &LinearConstraint,
        sp: &Subproof,
        first_id: u64,
    ) -> Result<(), String> {
        let mut p = base.clone();
        p.add_constraint(&goal.negate());
        let mut inner: HashMap<u64, LinearConstraint> = HashMap::new();
        let mut prims: Vec<LinearConstraint> = Vec::new();
        for (k, step) in sp.steps.iter().enumerate() {
            let c = match step {
                InnerStep::Rup(c) => {
                    let ok = p.in_conflict() || c.is_vacuous() || {
                        let mut q = p.clone();
                        q.add_constraint(&c.negate());
                        q.in_conflict()
                    };
                    if !ok {
                        return Err(format!("subproof for {}: {c} does not follow by unit propagation", sp.goal));
                    }
                    c.clone()
                }
                InnerStep::Pol(t) => self.eval_pol(t, &inner).map_err(|e| format!("subproof for {}: {e}", sp.goal))?,
            };
            p.add_constraint(&c);
            prims.push(c.primitive());
            inner.insert(first_id + k as u64, c);
        }
        if p.in_conflict() || prims.contains(&goal.primitive()) {
            Ok(())
        } else {
            Err(format!("subproof for {} does not establish {goal}", sp.goal))
        }
    }

    // -----------------------------------------------------------------------
    // Output section

    /// Compares the final state against the output instance at `level`.
    pub fn check_output(&self, level: Guarantee, out: &[LinearConstraint], out_obj: &Objective) -> Result<(), String> {
        let key = |c: &LinearConstraint| (!c.is_vacuous()).then(|| c.clone());
        let core: std::collections::HashSet<LinearConstraint> = self.core().filter_map(|(_, c)| key(c)).collect();
        let outs: std::collections::HashSet<LinearConstraint> = out.iter().filter_map(key).collect();
        match level {
            Guarantee::Derivable => {
                let all: std::collections::HashSet<&LinearConstraint> =
                    self.store.values().map(|s| &s.constraint).collect();
                if let Some(c) = outs.iter().find(|c| !all.contains(c)) {
                    return Err(format!("output constraint {c} is not in the proof database"));
                }
            }
            Guarantee::Equisatisfiable | Guarantee::Equioptimal => {
                if let Some(c) = outs.iter().find(|c| !core.contains(*c)) {
                    return Err(format!("output constraint {c} is not in the core"));
                }
                if let Some(c) = core.iter().find(|c| !outs.contains(*c)) {
                    return Err(format!("core constraint {c} is not in the output"));
                }
                if level == Guarantee::Equioptimal && self.objective != *out_obj {
                    return Err(format!("objective {} differs from output objective {}", self.objective, out_obj));
                }
            }
        }
        Ok(())
    }
}
