//! Probing by unit propagation: failed literals, implied literals and
//! equivalent literals, each with its redundance-based extension.

use std::collections::HashSet;

use pb_core::{Lit, Propagator, Substitution, Var};
use proof_checker::PolToken;

use crate::db::{is_taut, normalize, Handle};
use crate::error::{Flow, PreError, Step};
use crate::work::{clause, Op, Preprocessor};

/// Propagation result of one probe.
struct Probe {
    /// Everything true after assuming the literal, root facts included.
    all: HashSet<Lit>,
    /// New literals only: neither root facts nor the probe itself.
    new: Vec<Lit>,
}

impl Preprocessor {
    fn root_propagator(&self) -> Step<Propagator> {
        let cs = self.db.constraints();
        let p = Propagator::with_constraints(cs.iter());
        if p.in_conflict() {
            return Err(Flow::Infeasible);
        }
        Ok(p)
    }

    fn probe(base: &Propagator, l: Lit) -> Option<Probe> {
        let mut p = base.clone();
        if !p.assign(l) {
            return None;
        }
        let trail = p.trail();
        let new = trail.iter().copied().filter(|&m| m.var() != l.var() && base.value(m).is_none()).collect();
        Some(Probe { all: trail.into_iter().collect(), new })
    }

    /// Every indexed clause containing `l` has another literal in `set`.
    fn covered(&self, l: Lit, set: &HashSet<Lit>) -> bool {
        self.db.occ(l).iter().all(|&h| self.db.get(h).lits.iter().any(|&m| m != l && set.contains(&m)))
    }

    pub(crate) fn failed_literal_elimination(&mut self) -> Step<()> {
        let mut base = self.root_propagator()?;
        let mut probes = 0;
        for v in self.db.vars() {
            for l in [v.pos(), v.neg()] {
                if probes >= self.cfg.probe_budget || !self.budget_left() {
                    return Ok(());
                }
                if !self.db.occurs(v) || base.value(l).is_some() {
                    continue;
                }
                probes += 1;
                let id = match Self::probe(&base, l) {
                    None => self.rup_clause(&[!l])?,
                    Some(pr) => {
                        if self.is_obj_lit(!l) || !self.covered(l, &pr.all) {
                            continue;
                        }
                        let mut w = Substitution::new();
                        w.set_lit(l, false);
                        self.red(clause(&[!l]), w)?
                    }
                };
                self.fix_new_unit(!l, id)?;
                self.applied(Op::FailedLiteralElimination);
                base = self.root_propagator()?;
            }
        }
        Ok(())
    }

    /// One pass probing both polarities of every clause variable.
    pub(crate) fn probe_implications(&mut self, implied: bool, equiv: bool) -> Step<()> {
        let mut base = self.root_propagator()?;
        let mut probes = 0;
        for v in self.db.vars() {
            if probes >= self.cfg.probe_budget || !self.budget_left() {
                return Ok(());
            }
            if !self.db.occurs(v) || base.value(v.pos()).is_some() {
                continue;
            }
            probes += 1;
            let (Some(p1), Some(p0)) = (Self::probe(&base, v.pos()), Self::probe(&base, v.neg())) else {
                continue;
            };
            let done = if implied {
                self.try_implied(v, &p1, &p0)?
            } else if equiv {
                self.try_equiv(v, &p1, &p0)?
            } else {
                false
            };
            if done {
                base = self.root_propagator()?;
            }
        }
        Ok(())
    }

    fn try_implied(&mut self, v: Var, p1: &Probe, p0: &Probe) -> Step<bool> {
        if let Some(&l2) = p1.new.iter().find(|m| p0.all.contains(m)) {
            self.implied_plain(v.pos(), l2)?;
            return Ok(true);
        }
        if self.in_obj(v) {
            return Ok(false);
        }
        for (l1, here, other) in [(v.pos(), p1, p0), (v.neg(), p0, p1)] {
            for &l2 in &here.new {
                if !self.in_obj(l2.var()) && self.covered(!l2, &other.all) {
                    self.implied_extended(l1, l2)?;
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn fix_derived(&mut self, l2: Lit, a: u64, b: u64) -> Step<()> {
        let c = self.pol(vec![
            PolToken::Int(a.into()),
            PolToken::Int(b.into()),
            PolToken::Add,
            PolToken::Int(2u32.into()),
            PolToken::Div,
        ])?;
        self.delc(a)?;
        self.delc(b)?;
        self.fix_new_unit(l2, c)?;
        self.applied(Op::ImpliedLiteralDetection);
        Ok(())
    }

    /// Both `l1` and `¬l1` propagate `l2`.
    fn implied_plain(&mut self, l1: Lit, l2: Lit) -> Step<()> {
        let a = self.rup_clause(&[!l1, l2])?;
        let b = self.rup_clause(&[l1, l2])?;
        self.fix_derived(l2, a, b)
    }

    /// `l1` propagates `l2`, and setting `l2` true is harmless when `l1` is false.
    fn implied_extended(&mut self, l1: Lit, l2: Lit) -> Step<()> {
        let b = self.red(clause(&[l1, l2]), Substitution::lit_true(l2))?;
        let a = self.rup_clause(&[!l1, l2])?;
        self.fix_derived(l2, a, b)
    }

    fn try_equiv(&mut self, v: Var, p1: &Probe, p0: &Probe) -> Step<bool> {
        if let Some(&l2) = p1.new.iter().find(|&&m| p0.all.contains(&!m)) {
            // v ⇔ l2. Eliminate whichever side is outside the objective.
            let (l1, l2) = if self.in_obj(v) && !self.in_obj(l2.var()) { (l2, v.pos()) } else { (v.pos(), l2) };
            self.substitute_equivalent(l1, l2, false)?;
            return Ok(true);
        }
        if self.in_obj(v) {
            return Ok(false);
        }
        for (l1, here, other) in [(v.pos(), p1, p0), (v.neg(), p0, p1)] {
            for &l2 in &here.new {
                if !self.in_obj(l2.var()) && self.covered(l2, &other.all) {
                    self.substitute_equivalent(l1, l2, true)?;
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    /// Replaces `l1` by `l2` everywhere. With `extended`, the direction
    /// `l2 → l1` is introduced by redundance instead of being implied.
    fn substitute_equivalent(&mut self, l1: Lit, l2: Lit, extended: bool) -> Step<()> {
        let e1 = self.rup_clause(&[!l1, l2])?;
        let e2 = if extended {
            let mut w = Substitution::new();
            w.set_lit(l2, false);
            self.red(clause(&[l1, !l2]), w)?
        } else {
            self.rup_clause(&[l1, !l2])?
        };
        self.core(&[e1, e2])?;
        let v1 = l1.var();
        let image = |m: Lit| {
            if m == l1 {
                l2
            } else if m == !l1 {
                !l2
            } else {
                m
            }
        };
        let mut hs: Vec<Handle> = self.db.occ(v1.pos()).iter().chain(self.db.occ(v1.neg())).copied().collect();
        hs.sort_unstable();
        hs.dedup();
        for h in hs {
            let (old, lits) = {
                let c = self.db.get(h);
                (c.id, normalize(c.lits.iter().map(|&m| image(m)).collect()))
            };
            if is_taut(&lits) {
                self.db.remove(h);
                self.delc(old)?;
                continue;
            }
            let id = self.rup_clause(&lits)?;
            self.core(&[id])?;
            self.delc(old)?;
            self.db.replace(h, lits, id);
        }
        if let Some(a) = self.coef(v1) {
            self.obju(&[(-a, v1.pos()), (a, image(v1.pos()))], 0)?;
        }
        let mut w = Substitution::new();
        w.map_lit(v1.pos(), image(v1.pos())).map_err(|e| Flow::Fail(PreError::Internal(e.to_string())))?;
        self.delc_with(e1, w.clone())?;
        self.delc_with(e2, w)?;
        self.applied(Op::EquivalentLiteralSubstitution);
        Ok(())
    }
}
