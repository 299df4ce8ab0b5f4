//! A small CDCL SAT solver with assumptions whose learnt clauses are RUP
//! with respect to the clauses it was given plus earlier learnts.

use std::collections::HashMap;

use pb_core::{Assignment, Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Assignment),
    Unsat,
    /// Conflict budget exhausted.
    Unknown,
}

const NO_REASON: usize = usize::MAX;
const UNASSIGNED: i8 = -1;

#[derive(Clone, Debug, Default)]
pub struct SatOracle {
    index: HashMap<Var, u32>,
    vars: Vec<Var>,
    clauses: Vec<Vec<u32>>,
    watches: Vec<Vec<usize>>,
    value: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<usize>,
    trail: Vec<u32>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    bump: f64,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    learnts: Vec<Vec<Lit>>,
}

fn neg(code: u32) -> u32 {
    code ^ 1
}

impl SatOracle {
    pub fn new() -> SatOracle {
        SatOracle { ok: true, bump: 1.0, ..SatOracle::default() }
    }

    pub fn with_clauses<'a, I>(clauses: I) -> SatOracle
    where
        I: IntoIterator<Item = &'a [Lit]>,
    {
        let mut s = SatOracle::new();
        for c in clauses {
            s.add_clause(c);
        }
        s
    }

    fn var_code(&mut self, v: Var) -> u32 {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.vars.len() as u32;
        self.index.insert(v, i);
        self.vars.push(v);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.value.push(UNASSIGNED);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        i
    }

    fn code(&mut self, l: Lit) -> u32 {
        2 * self.var_code(l.var()) + l.is_negated() as u32
    }

    fn lit(&self, code: u32) -> Lit {
        self.vars[(code / 2) as usize].lit(code & 1 == 0)
    }

    /// 1 true, 0 false, -1 unassigned.
    fn val(&self, code: u32) -> i8 {
        match self.value[(code / 2) as usize] {
            UNASSIGNED => UNASSIGNED,
            v => v ^ (code & 1) as i8,
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, code: u32, reason: usize) {
        let v = (code / 2) as usize;
        self.value[v] = (code & 1 == 0) as i8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(code);
    }

    /// Adds a clause at decision level 0.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        self.backtrack(0);
        let mut cs: Vec<u32> = lits.iter().map(|&l| self.code(l)).collect();
        cs.sort_unstable();
        cs.dedup();
        if !self.ok || cs.windows(2).any(|p| p[0] / 2 == p[1] / 2) {
            return;
        }
        // Non-false literals first so they can be watched.
        cs.sort_by_key(|&c| self.val(c) == 0);
        let non_false = cs.iter().filter(|&&c| self.val(c) != 0).count();
        if non_false == 0 {
            self.ok = false;
            return;
        }
        let idx = self.clauses.len();
        if cs.len() >= 2 {
            self.watches[cs[0] as usize].push(idx);
            self.watches[cs[1] as usize].push(idx);
        }
        let unit = non_false == 1 && self.val(cs[0]) == UNASSIGNED;
        let first = cs[0];
        self.clauses.push(cs);
        if unit {
            self.enqueue(first, idx);
            if self.propagate().is_some() {
                self.ok = false;
            }
        }
    }

    /// Returns a conflicting clause index, if any.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = neg(p);
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let first = clause[0];
                if self.val_of(first) == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..self.clauses[ci].len() {
                    let c = self.clauses[ci][k];
                    if self.val_of(c) != 0 {
                        self.clauses[ci].swap(1, k);
                        self.watches[c as usize].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if self.val_of(first) == 0 {
                    conflict = Some(ci);
                    break;
                }
                self.enqueue(first, ci);
                i += 1;
            }
            let rest = std::mem::take(&mut self.watches[false_lit as usize]);
            ws.extend(rest);
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn val_of(&self, code: u32) -> i8 {
        self.val(code)
    }

    fn backtrack(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl as usize];
        for &c in &self.trail[start..] {
            let v = (c / 2) as usize;
            self.phase[v] = c & 1 == 0;
            self.value[v] = UNASSIGNED;
            self.reason[v] = NO_REASON;
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = self.trail.len();
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.bump;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.bump *= 1e-100;
        }
    }

    /// First-UIP analysis; returns the learnt clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<u32>, u32) {
        let current = self.decision_level();
        let mut learnt = vec![0u32];
        let mut pending = 0usize;
        let mut p: Option<u32> = None;
        let mut idx = self.trail.len();
        loop {
            let lits = self.clauses[confl].clone();
            for &q in &lits {
                if Some(q) == p {
                    continue;
                }
                let v = (q / 2) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] == current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[(self.trail[idx] / 2) as usize] {
                    break;
                }
            }
            let pl = self.trail[idx];
            let v = (pl / 2) as usize;
            self.seen[v] = false;
            pending -= 1;
            if pending == 0 {
                learnt[0] = neg(pl);
                break;
            }
            p = Some(pl);
            confl = self.reason[v];
        }
        for &q in &learnt[1..] {
            self.seen[(q / 2) as usize] = false;
        }
        let mut bt = 0;
        if learnt.len() > 1 {
            let (mut best, mut best_lvl) = (1, 0);
            for (k, &q) in learnt.iter().enumerate().skip(1) {
                let l = self.level[(q / 2) as usize];
                if l > best_lvl {
                    best = k;
                    best_lvl = l;
                }
            }
            learnt.swap(1, best);
            bt = best_lvl;
        }
        self.bump *= 1.05;
        (learnt, bt)
    }

    fn pick_branch(&self) -> Option<u32> {
        let mut best: Option<usize> = None;
        for v in 0..self.vars.len() {
            if self.value[v] == UNASSIGNED && best.is_none_or(|b| self.activity[v] > self.activity[b]) {
                best = Some(v);
            }
        }
        best.map(|v| 2 * v as u32 + (!self.phase[v]) as u32)
    }

    /// Solves under `assumptions`. Learnt clauses are appended to the
    /// export buffer (see [`SatOracle::take_learnts`]).
    pub fn solve(&mut self, assumptions: &[Lit], conflict_budget: u64) -> SatResult {
        if !self.ok {
            return SatResult::Unsat;
        }
        let assumed: Vec<u32> = assumptions.iter().map(|&l| self.code(l)).collect();
        self.backtrack(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SatResult::Unsat;
        }
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SatResult::Unsat;
                }
                conflicts += 1;
                let (learnt, bt) = self.analyze(confl);
                self.backtrack(bt);
                let export: Vec<Lit> = learnt.iter().map(|&c| self.lit(c)).collect();
                self.learnts.push(export);
                let idx = self.clauses.len();
                if learnt.len() >= 2 {
                    self.watches[learnt[0] as usize].push(idx);
                    self.watches[learnt[1] as usize].push(idx);
                }
                let asserting = learnt[0];
                self.clauses.push(learnt);
                self.enqueue(asserting, idx);
                if conflicts > conflict_budget {
                    self.backtrack(0);
                    return SatResult::Unknown;
                }
                continue;
            }
            let lvl = self.decision_level() as usize;
            if lvl < assumed.len() {
                let a = assumed[lvl];
                match self.val(a) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => {
                        self.backtrack(0);
                        return SatResult::Unsat;
                    }
                    _ => {
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(a, NO_REASON);
                    }
                }
                continue;
            }
            match self.pick_branch() {
                None => {
                    let model = self.vars.iter().enumerate().map(|(i, &v)| (v, self.value[i] == 1)).collect();
                    self.backtrack(0);
                    return SatResult::Sat(model);
                }
                Some(d) => {
                    self.trail_lim.push(self.trail.len());
                    self.enqueue(d, NO_REASON);
                }
            }
        }
    }

    /// Learnt clauses not yet taken, in the order they were learnt.
    pub fn take_learnts(&mut self) -> Vec<Vec<Lit>> {
        std::mem::take(&mut self.learnts)
    }

    pub fn has_pending_learnts(&self) -> bool {
        !self.learnts.is_empty()
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }
}
