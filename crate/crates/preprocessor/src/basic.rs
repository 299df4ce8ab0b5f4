//! Techniques available in both phases, plus the WCNF-only ones and the
//! switch to the objective-centric view.

use std::collections::HashMap;

use pb_core::{Lit, Substitution, Var};

use crate::db::Handle;
use crate::error::Step;
use crate::work::{clause, subset, Op, Phase, Preprocessor};

impl Preprocessor {
    pub(crate) fn remove_duplicates(&mut self) -> Step<()> {
        let mut groups: HashMap<Vec<Lit>, Vec<Handle>> = HashMap::new();
        let mut order = Vec::new();
        for (h, c) in self.db.clauses() {
            if c.taut {
                continue;
            }
            let hs = groups.entry(c.lits.clone()).or_default();
            if hs.is_empty() {
                order.push(c.lits.clone());
            }
            hs.push(h);
        }
        for key in order {
            let hs = &groups[&key];
            if hs.len() < 2 {
                continue;
            }
            let keep = hs.iter().copied().find(|&h| self.db.get(h).is_hard()).unwrap_or(hs[0]);
            for &h in hs.iter().filter(|&&h| h != keep) {
                if !self.budget_left() {
                    return Ok(());
                }
                if self.db.get(keep).is_hard() {
                    self.remove_rup(h)?;
                } else {
                    self.merge_relaxed(keep, h)?;
                }
                self.applied(Op::RemoveDuplicates);
            }
        }
        Ok(())
    }

    /// Two relaxed copies of one clause: move the weight of `drop` onto `keep`.
    fn merge_relaxed(&mut self, keep: Handle, drop: Handle) -> Step<()> {
        let bd = self.db.get(keep).relax.expect("relaxed");
        let bc = self.db.get(drop).relax.expect("relaxed");
        let wc = self.coef(bc).unwrap_or(0);
        let mut bc0 = Substitution::new();
        bc0.set_lit(bc.pos(), false);
        let mut bd0 = Substitution::new();
        bd0.set_lit(bd.pos(), false);
        let e1 = self.red(clause(&[bc.neg(), bd.pos()]), bc0.clone())?;
        let e2 = self.red(clause(&[bc.pos(), bd.neg()]), bd0)?;
        self.core(&[e1, e2])?;
        self.obju(&[(-wc, bc.pos()), (wc, bd.pos())], 0)?;
        let c = self.db.remove(drop);
        self.delc(c.id)?;
        self.delc_with(e1, bc0)?;
        self.delc_with(e2, Substitution::lit_true(bc.pos()))
    }

    pub(crate) fn remove_tautologies(&mut self) -> Step<()> {
        let tauts: Vec<Handle> = self.db.clauses().filter(|(_, c)| c.taut).map(|(h, _)| h).collect();
        for h in tauts {
            if !self.budget_left() {
                break;
            }
            self.remove_rup(h)?;
            self.applied(Op::RemoveTautologies);
        }
        Ok(())
    }

    pub(crate) fn propagate_hard_units(&mut self) -> Step<()> {
        loop {
            let units: Vec<Handle> = self
                .db
                .clauses()
                .filter(|(_, c)| c.is_hard() && !c.taut && c.lits.len() == 1)
                .map(|(h, _)| h)
                .collect();
            if units.is_empty() {
                return Ok(());
            }
            for h in units {
                let still_unit = self.db.try_get(h).is_some_and(|c| c.lits.len() == 1);
                if !still_unit {
                    continue;
                }
                if !self.budget_left() {
                    return Ok(());
                }
                self.fix_unit(h)?;
                self.applied(Op::PropagateHardUnits);
            }
        }
    }

    pub(crate) fn remove_empty_softs(&mut self) -> Step<()> {
        let empties: Vec<Handle> =
            self.db.clauses().filter(|(_, c)| !c.is_hard() && c.lits.is_empty()).map(|(h, _)| h).collect();
        for h in empties {
            if !self.budget_left() {
                break;
            }
            let c = self.db.remove(h);
            let b = c.relax.expect("relaxed");
            let w = self.coef(b).unwrap_or(0);
            self.obju(&[(-w, b.pos())], w)?;
            self.delc_with(c.id, Substitution::lit_true(b.pos()))?;
            self.applied(Op::RemoveEmptySofts);
        }
        Ok(())
    }

    /// Hard clauses delete the clauses they subsume.
    pub(crate) fn eliminate_subsumed(&mut self) -> Step<()> {
        let mut hs: Vec<(usize, Handle)> = self
            .db
            .clauses()
            .filter(|(_, c)| c.is_hard() && !c.taut && !c.lits.is_empty())
            .map(|(h, c)| (c.lits.len(), h))
            .collect();
        hs.sort_unstable();
        for (_, h) in hs {
            if !self.db.alive(h) {
                continue;
            }
            let lits = self.db.get(h).lits.clone();
            let pivot = *lits.iter().min_by_key(|&&l| self.db.occ_count(l)).expect("non-empty");
            for d in self.db.occ(pivot).to_vec() {
                if d == h || !self.db.alive(d) {
                    continue;
                }
                if subset(&lits, &self.db.get(d).lits) {
                    if !self.budget_left() {
                        return Ok(());
                    }
                    self.remove_rup(d)?;
                    self.applied(Op::EliminateSubsumed);
                }
            }
        }
        Ok(())
    }

    /// `l` may be set in a witness: in the objective-centric phase its
    /// variable must be outside the objective, in the WCNF phase `l` must not
    /// be the costly literal.
    fn bce_pivot_ok(&self, l: Lit) -> bool {
        match self.phase {
            Phase::Wcnf => !self.is_obj_lit(l),
            Phase::Oc => !self.in_obj(l.var()),
        }
    }

    /// Every resolvent of `h` on `l` is a tautology.
    pub(crate) fn blocked_on(&self, h: Handle, l: Lit) -> bool {
        let c = self.db.get(h);
        self.db.occ(!l).iter().all(|&d| {
            let dl = &self.db.get(d).lits;
            c.lits.iter().any(|&m| m != l && dl.binary_search(&!m).is_ok())
        })
    }

    pub(crate) fn eliminate_blocked_clauses(&mut self) -> Step<()> {
        for h in self.db.handles() {
            let Some(c) = self.db.try_get(h) else { continue };
            if c.taut {
                continue;
            }
            let lits = c.lits.clone();
            for l in lits {
                if self.bce_pivot_ok(l) && self.blocked_on(h, l) {
                    if !self.budget_left() {
                        return Ok(());
                    }
                    self.remove_with(h, Substitution::lit_true(l))?;
                    self.applied(Op::EliminateBlockedClauses);
                    break;
                }
            }
        }
        Ok(())
    }

    /// Unit softs that shrank keep their weight as an objective literal;
    /// other relaxed clauses become hard clauses over their relaxation.
    pub(crate) fn convert_to_objective_centric(&mut self) -> Step<()> {
        for h in self.db.handles() {
            let c = self.db.get(h);
            let Some(b) = c.relax else { continue };
            if c.lits.len() == 1 && !c.taut {
                let (m, id) = (c.lits[0], c.id);
                self.shrunk_unit_soft(h, m, b, id)?;
            } else {
                self.db.harden_relaxed(h);
            }
            self.applied(Op::ConvertToObjectiveCentric);
        }
        self.phase = Phase::Oc;
        Ok(())
    }

    /// `(m ∨ b)` with cost `w·b` becomes cost `w·¬m`.
    fn shrunk_unit_soft(&mut self, h: Handle, m: Lit, b: Var, id: u64) -> Step<()> {
        let w = self.coef(b).unwrap_or(0);
        let mut b0 = Substitution::new();
        b0.set_lit(b.pos(), false);
        let e = self.red(clause(&[!m, b.neg()]), b0.clone())?;
        self.core(&[e])?;
        self.obju(&[(w, !m), (-w, b.pos())], 0)?;
        self.delc_with(e, b0)?;
        self.db.remove(h);
        self.delc_with(id, Substitution::lit_true(b.pos()))
    }
}
