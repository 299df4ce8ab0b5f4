//! Slack-based unit propagation over normalized constraints, and RUP.
//!
//! The slack of a constraint under a partial assignment is the sum of the
//! coefficients of its non-false literals minus the degree. A negative slack
//! is a conflict; an unassigned literal whose coefficient exceeds the slack is
//! propagated to true.

use std::collections::HashMap;
use std::fmt::Debug;
use std::ops::{AddAssign, SubAssign};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::{Assignment, LinearConstraint, Lit, Var};

/// Result of propagating to fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Fixpoint(Assignment),
    Conflict,
}

trait Num: Clone + Ord + Zero + Debug + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}
impl Num for i64 {}
impl Num for BigInt {}

// Coefficient sums below this bound cannot overflow an i64 slack.
const SMALL_LIMIT: i64 = 1 << 60;

#[derive(Clone, Debug)]
struct PCons<N> {
    lits: Vec<u32>,
    coefs: Vec<N>,
}

#[derive(Clone, Debug)]
struct Engine<N> {
    cons: Vec<PCons<N>>,
    slack: Vec<N>,
    occ: Vec<Vec<(u32, u32)>>,
    value: Vec<i8>,
    trail: Vec<u32>,
    qhead: usize,
    conflict: bool,
}

impl<N: Num> Engine<N> {
    fn new() -> Self {
        Engine {
            cons: Vec::new(),
            slack: Vec::new(),
            occ: Vec::new(),
            value: Vec::new(),
            trail: Vec::new(),
            qhead: 0,
            conflict: false,
        }
    }

    fn ensure_var(&mut self, v: usize) {
        if self.value.len() <= v {
            self.value.resize(v + 1, -1);
            self.occ.resize(2 * (v + 1), Vec::new());
        }
    }

    fn lit_value(&self, code: u32) -> i8 {
        let v = self.value[(code >> 1) as usize];
        if v < 0 {
            -1
        } else {
            (v as u32 ^ (code & 1)) as i8
        }
    }

    fn enqueue(&mut self, code: u32) {
        self.value[(code >> 1) as usize] = if code & 1 == 0 { 1 } else { 0 };
        self.trail.push(code);
    }

    fn check(&mut self, ci: usize) {
        if self.slack[ci] < N::zero() {
            self.conflict = true;
            return;
        }
        let n = self.cons[ci].lits.len();
        for j in 0..n {
            if self.cons[ci].coefs[j] <= self.slack[ci] {
                break;
            }
            let code = self.cons[ci].lits[j];
            if self.lit_value(code) < 0 {
                self.enqueue(code);
            }
        }
    }

    fn propagate(&mut self) -> bool {
        while !self.conflict && self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead] ^ 1;
            self.qhead += 1;
            let occ = std::mem::take(&mut self.occ[falsified as usize]);
            for &(ci, pos) in &occ {
                let ci = ci as usize;
                let c = self.cons[ci].coefs[pos as usize].clone();
                self.slack[ci] -= &c;
                self.check(ci);
                if self.conflict {
                    break;
                }
            }
            self.occ[falsified as usize] = occ;
        }
        !self.conflict
    }

    /// Adds a constraint given as (literal code, coefficient) pairs.
    fn add(&mut self, mut terms: Vec<(u32, N)>, degree: N) {
        self.propagate();
        terms.sort_by(|a, b| b.1.cmp(&a.1));
        let ci = self.cons.len() as u32;
        let mut slack = N::zero();
        for (pos, (code, c)) in terms.iter().enumerate() {
            self.ensure_var((code >> 1) as usize);
            self.occ[*code as usize].push((ci, pos as u32));
            if self.lit_value(*code) != 0 {
                slack += c;
            }
        }
        slack -= &degree;
        let (lits, coefs) = terms.into_iter().unzip();
        self.cons.push(PCons { lits, coefs });
        self.slack.push(slack);
        if !self.conflict {
            self.check(ci as usize);
            self.propagate();
        }
    }

    fn assign(&mut self, code: u32) -> bool {
        self.ensure_var((code >> 1) as usize);
        match self.lit_value(code) {
            1 => {}
            0 => self.conflict = true,
            _ => self.enqueue(code),
        }
        self.propagate()
    }
}

#[derive(Clone, Debug)]
enum Inner {
    Small(Engine<i64>),
    Big(Engine<BigInt>),
}

/// Incremental propagation engine.
///
/// Constraints and assumptions can be added at any time; the engine is kept
/// at its propagation fixpoint (or in conflict) after every call.
#[derive(Clone, Debug)]
pub struct Propagator {
    index: HashMap<Var, u32>,
    vars: Vec<Var>,
    inner: Inner,
    // Kept so that the engine can be rebuilt with unbounded arithmetic.
    history: Vec<Event>,
}

#[derive(Clone, Debug)]
enum Event {
    Cons(LinearConstraint),
    Assign(Lit),
}

impl Default for Propagator {
    fn default() -> Self {
        Propagator::new()
    }
}

fn fits_small(c: &LinearConstraint) -> bool {
    let mut sum: i64 = 0;
    for t in c.terms().iter().map(|t| &t.coef).chain(std::iter::once(c.degree())) {
        match t.to_i64() {
            Some(v) if v < SMALL_LIMIT => {
                sum = sum.saturating_add(v);
                if sum >= SMALL_LIMIT {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

impl Propagator {
    pub fn new() -> Propagator {
        Propagator { index: HashMap::new(), vars: Vec::new(), inner: Inner::Small(Engine::new()), history: Vec::new() }
    }

    pub fn with_constraints<'a, I>(cs: I) -> Propagator
    where
        I: IntoIterator<Item = &'a LinearConstraint>,
    {
        let mut p = Propagator::new();
        for c in cs {
            p.add_constraint(c);
        }
        p
    }

    fn code(&mut self, lit: Lit) -> u32 {
        let next = self.vars.len() as u32;
        let v = *self.index.entry(lit.var()).or_insert(next);
        if v == next {
            self.vars.push(lit.var());
        }
        v * 2 + lit.is_negated() as u32
    }

    pub fn add_constraint(&mut self, c: &LinearConstraint) {
        self.history.push(Event::Cons(c.clone()));
        if matches!(self.inner, Inner::Small(_)) && !fits_small(c) {
            self.rebuild_big();
            return;
        }
        let codes: Vec<u32> = c.lits().map(|l| self.code(l)).collect();
        match &mut self.inner {
            Inner::Small(e) => {
                let terms = codes
                    .into_iter()
                    .zip(c.terms().iter().map(|t| t.coef.to_i64().expect("checked by fits_small")))
                    .collect();
                e.add(terms, c.degree().to_i64().expect("checked by fits_small"));
            }
            Inner::Big(e) => {
                let terms = codes.into_iter().zip(c.terms().iter().map(|t| t.coef.clone())).collect();
                e.add(terms, c.degree().clone());
            }
        }
    }

    fn rebuild_big(&mut self) {
        let history = std::mem::take(&mut self.history);
        self.index.clear();
        self.vars.clear();
        let mut e: Engine<BigInt> = Engine::new();
        for ev in &history {
            match ev {
                Event::Cons(c) => {
                    let terms = c.terms().iter().map(|t| (self.code(t.lit), t.coef.clone())).collect();
                    e.add(terms, c.degree().clone());
                }
                Event::Assign(l) => {
                    let code = self.code(*l);
                    e.assign(code);
                }
            }
        }
        self.inner = Inner::Big(e);
        self.history = history;
    }

    /// Makes `lit` true and propagates. Returns false on conflict.
    pub fn assign(&mut self, lit: Lit) -> bool {
        self.history.push(Event::Assign(lit));
        let code = self.code(lit);
        match &mut self.inner {
            Inner::Small(e) => e.assign(code),
            Inner::Big(e) => e.assign(code),
        }
    }

    pub fn in_conflict(&self) -> bool {
        match &self.inner {
            Inner::Small(e) => e.conflict,
            Inner::Big(e) => e.conflict,
        }
    }

    pub fn value(&self, lit: Lit) -> Option<bool> {
        let v = *self.index.get(&lit.var())?;
        let raw = match &self.inner {
            Inner::Small(e) => e.value.get(v as usize).copied(),
            Inner::Big(e) => e.value.get(v as usize).copied(),
        }?;
        (raw >= 0).then(|| lit.eval(raw == 1))
    }

    pub fn assignment(&self) -> Assignment {
        let values = match &self.inner {
            Inner::Small(e) => &e.value,
            Inner::Big(e) => &e.value,
        };
        values.iter().enumerate().filter(|(_, &v)| v >= 0).map(|(i, &v)| (self.vars[i], v == 1)).collect()
    }

    /// Literals made true, in propagation order.
    pub fn trail(&self) -> Vec<Lit> {
        let trail = match &self.inner {
            Inner::Small(e) => &e.trail,
            Inner::Big(e) => &e.trail,
        };
        trail.iter().map(|&c| self.vars[(c >> 1) as usize].lit(c & 1 == 0)).collect()
    }
}

/// Extends `rho0` to the unit-propagation fixpoint of `cs`.
pub fn unit_propagate<'a, I>(cs: I, rho0: &Assignment) -> Propagation
where
    I: IntoIterator<Item = &'a LinearConstraint>,
{
    let mut p = Propagator::new();
    for l in rho0.true_lits() {
        p.assign(l);
    }
    for c in cs {
        p.add_constraint(c);
        if p.in_conflict() {
            return Propagation::Conflict;
        }
    }
    if p.in_conflict() {
        return Propagation::Conflict;
    }
    let mut out = rho0.clone();
    for (v, b) in p.assignment().iter() {
        out.set(v, b);
    }
    Propagation::Fixpoint(out)
}

/// True iff propagating `premises ∪ {¬target}` reaches a conflict.
pub fn rup_check<'a, I>(premises: I, target: &LinearConstraint) -> bool
where
    I: IntoIterator<Item = &'a LinearConstraint>,
{
    let mut p = Propagator::new();
    p.add_constraint(&target.negate());
    for c in premises {
        if p.in_conflict() {
            return true;
        }
        p.add_constraint(c);
    }
    p.in_conflict()
}
