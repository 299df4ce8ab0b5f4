//! Objective-driven techniques: subsumed label and literal elimination,
//! structure-based labelling, TrimMaxSAT and hardening.

use pb_core::{Assignment, Lit, Substitution, Var};
use rand::seq::SliceRandom;

use crate::db::{normalize, Handle};
use crate::error::{Flow, Step};
use crate::oracle::{SatOracle, SatResult};
use crate::work::{clause, Op, Preprocessor};

impl Preprocessor {
    fn obj_vars(&self) -> Vec<Var> {
        self.obj.vars().collect()
    }

    /// Label `ly` is dominated by a cheaper label `lx` that occurs wherever
    /// `ly` does; set `ly` false.
    pub(crate) fn subsumed_label_elimination(&mut self) -> Step<()> {
        for y in self.obj_vars() {
            if !self.budget_left() {
                break;
            }
            let Some((ly, cy)) = self.obj_lit(y) else { continue };
            let Some(&first) = self.db.occ(ly).first() else { continue };
            let cand = self.db.get(first).lits.iter().copied().find(|&lx| {
                lx.var() != y
                    && self.obj_lit(lx.var()).is_some_and(|(m, cx)| m == lx && cx <= cy)
                    && subset_handles(self.db.occ(ly), self.db.occ(lx))
                    && subset_handles(self.db.occ(!lx), self.db.occ(!ly))
            });
            let Some(lx) = cand else { continue };
            let mut w = Substitution::new();
            w.set_lit(ly, false);
            w.set_lit(lx, true);
            let id = self.red(clause(&[!ly]), w)?;
            self.fix_new_unit(!ly, id)?;
            self.applied(Op::SubsumedLiteralElimination);
        }
        Ok(())
    }

    /// The same dominance between two variables outside the objective:
    /// fix `lx` true and `ly` false.
    pub(crate) fn subsumed_literal_elimination(&mut self) -> Step<()> {
        for y in self.db.vars() {
            for ly in [y.pos(), y.neg()] {
                if !self.budget_left() {
                    return Ok(());
                }
                if self.in_obj(y) {
                    break;
                }
                let Some(&first) = self.db.occ(ly).first() else { continue };
                let cand = self.db.get(first).lits.iter().copied().find(|&lx| {
                    lx.var() != y
                        && !self.in_obj(lx.var())
                        && subset_handles(self.db.occ(ly), self.db.occ(lx))
                        && subset_handles(self.db.occ(!lx), self.db.occ(!ly))
                });
                let Some(lx) = cand else { continue };
                let mut w = Substitution::new();
                w.set_lit(ly, false);
                w.set_lit(lx, true);
                let a = self.red(clause(&[lx]), w.clone())?;
                let b = self.red(clause(&[!ly]), w)?;
                self.core(&[a, b])?;
                let ha = self.db.insert(crate::db::Clause::new(vec![lx], a, None));
                let hb = self.db.insert(crate::db::Clause::new(vec![!ly], b, None));
                self.fix_unit(ha)?;
                if self.db.alive(hb) {
                    self.fix_unit(hb)?;
                }
                self.applied(Op::SubsumedLiteralElimination);
                break;
            }
        }
        Ok(())
    }

    /// A label `lb` whose weight covers a set of cheaper labels that
    /// together occur wherever `lb` does.
    pub(crate) fn group_sle(&mut self) -> Step<()> {
        for b in self.obj_vars() {
            if !self.budget_left() {
                break;
            }
            let Some((lb, cb)) = self.obj_lit(b) else { continue };
            if !self.db.occ(!lb).is_empty() || self.db.occ(lb).is_empty() {
                continue;
            }
            let mut chosen: Vec<Lit> = Vec::new();
            let mut total = 0i128;
            let mut ok = true;
            for &h in self.db.occ(lb) {
                let lits = &self.db.get(h).lits;
                if lits.iter().any(|l| chosen.contains(l)) {
                    continue;
                }
                let best = lits
                    .iter()
                    .filter_map(|&m| {
                        let (lm, cm) = self.obj_lit(m.var())?;
                        (lm == m && m.var() != b && self.db.occ(!m).is_empty()).then_some((cm, m))
                    })
                    .min();
                match best {
                    Some((cm, m)) => {
                        chosen.push(m);
                        total += cm;
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || chosen.is_empty() || total > cb {
                continue;
            }
            let mut w = Substitution::new();
            w.set_lit(lb, false);
            for &m in &chosen {
                w.set_lit(m, true);
            }
            let id = self.red(clause(&[!lb]), w)?;
            self.fix_new_unit(!lb, id)?;
            self.applied(Op::GroupSle);
        }
        Ok(())
    }

    /// A clause over non-objective variables that would be blocked on `l`
    /// if its non-tautological partners were out of the way, and all of
    /// them share an objective literal `lb`: add `lb` to the clause, then
    /// the original is blocked relative to the rest.
    pub(crate) fn structure_based_labelling(&mut self) -> Step<()> {
        for h in self.db.handles() {
            let Some(c) = self.db.try_get(h) else { continue };
            if c.taut || c.lits.iter().any(|l| self.in_obj(l.var())) {
                continue;
            }
            let lits = c.lits.clone();
            for &l in &lits {
                if let Some(lb) = self.label_for(h, &lits, l) {
                    if !self.budget_left() {
                        return Ok(());
                    }
                    let mut new = lits.clone();
                    new.push(lb);
                    let new = normalize(new);
                    let id = self.rup_clause(&new)?;
                    self.core(&[id])?;
                    let old = self.db.get(h).id;
                    self.delc_with(old, Substitution::lit_true(l))?;
                    self.db.replace(h, new, id);
                    self.applied(Op::StructureBasedLabelling);
                    break;
                }
            }
        }
        Ok(())
    }

    fn label_for(&self, h: Handle, lits: &[Lit], l: Lit) -> Option<Lit> {
        let partners: Vec<&[Lit]> = self
            .db
            .occ(!l)
            .iter()
            .filter(|&&d| d != h)
            .map(|&d| self.db.get(d).lits.as_slice())
            .filter(|d| !lits.iter().any(|&m| m != l && d.binary_search(&!m).is_ok()))
            .collect();
        let first = partners.first()?;
        first.iter().copied().find(|&lb| self.is_obj_lit(lb) && partners.iter().all(|d| d.binary_search(&lb).is_ok()))
    }

    // -----------------------------------------------------------------------
    // Oracle-based techniques

    fn oracle(&self) -> SatOracle {
        let clauses: Vec<&[Lit]> = self.db.clauses().filter(|(_, c)| !c.taut).map(|(_, c)| c.lits.as_slice()).collect();
        SatOracle::with_clauses(clauses)
    }

    /// Logs every pending learnt clause of `oracle` as a RUP step.
    fn log_learnts(&mut self, oracle: &mut SatOracle) -> Step<Vec<u64>> {
        let mut ids = Vec::new();
        for l in oracle.take_learnts() {
            ids.push(self.rup_clause(&l)?);
        }
        Ok(ids)
    }

    /// Finds objective literals that are false in every solution and fixes them.
    pub(crate) fn trim_maxsat(&mut self) -> Step<()> {
        let budget = self.cfg.conflict_budget;
        let mut main = self.oracle();
        let mut cands: Vec<Lit> = self.obj_vars().into_iter().filter_map(|v| self.obj_lit(v)).map(|(l, _)| l).collect();
        cands.shuffle(&mut self.rng);
        let mut unknown = match main.solve(&[], budget) {
            SatResult::Unsat => {
                self.log_learnts(&mut main)?;
                return Err(Flow::Infeasible);
            }
            SatResult::Unknown => return Ok(()),
            SatResult::Sat(m) => {
                let left: Vec<Lit> = cands.into_iter().filter(|&l| m.lit_value(l) != Some(true)).collect();
                self.model = Some(m);
                left
            }
        };
        let mut size = self.cfg.trim_initial.unwrap_or(unknown.len()).max(1);
        let mut found = Vec::new();
        while !unknown.is_empty() {
            let s: Vec<Lit> = unknown[..size.min(unknown.len())].to_vec();
            let mut probe = main.clone();
            probe.add_clause(&s);
            match probe.solve(&[], budget) {
                SatResult::Sat(m) => unknown.retain(|&l| m.lit_value(l) != Some(true)),
                SatResult::Unsat => {
                    unknown.drain(..s.len());
                    found.extend(s);
                    size = (size / 2).max(1);
                }
                SatResult::Unknown if size == 1 => {
                    unknown.remove(0);
                }
                SatResult::Unknown => size /= 2,
            }
        }
        let proven: Vec<Lit> = found.into_iter().filter(|&l| main.solve(&[l], budget) == SatResult::Unsat).collect();
        if proven.is_empty() || !self.budget_left() {
            return Ok(());
        }
        let learnts = self.log_learnts(&mut main)?;
        let mut units = Vec::new();
        for &l in &proven {
            let id = self.rup_clause(&[!l])?;
            self.core(&[id])?;
            units.push(id);
        }
        for id in learnts {
            self.delc(id)?;
        }
        for (l, id) in proven.into_iter().zip(units) {
            let h = self.db.insert(crate::db::Clause::new(vec![!l], id, None));
            self.fix_unit(h)?;
        }
        self.applied(Op::TrimMaxsat);
        Ok(())
    }

    /// A solution covering every clause variable, from the cached model
    /// when it is still one.
    fn solution(&mut self) -> Option<Assignment> {
        let valid = |m: &Assignment, p: &Preprocessor| {
            p.db.clauses().all(|(_, c)| c.taut || c.lits.iter().any(|&l| m.lit_value(l) == Some(true)))
        };
        let cached = self.model.as_ref().is_some_and(|m| valid(m, self));
        if !cached {
            match self.oracle().solve(&[], self.cfg.conflict_budget) {
                SatResult::Sat(m) => self.model = Some(m),
                _ => return None,
            }
        }
        let m = self.model.as_ref()?;
        let mut rho = Assignment::new();
        for v in self.db.vars() {
            rho.set(v, m.get(v).unwrap_or(false));
        }
        for v in self.obj.vars() {
            if rho.get(v).is_none() {
                let (l, _) = self.obj_lit(v).expect("objective variable");
                rho.assign(!l);
            }
        }
        Some(rho)
    }

    /// Labels heavier than the gap between a known solution's cost and the
    /// lower bound are false in every optimal solution.
    pub(crate) fn hardening(&mut self) -> Step<()> {
        let Some(rho) = self.solution() else { return Ok(()) };
        let ub: i128 = self.obj.eval(&rho).ok().and_then(|c| i128::try_from(&c).ok()).unwrap_or(i128::MAX);
        let slack = ub - self.lit_constant();
        for v in self.obj_vars() {
            if !self.budget_left() {
                break;
            }
            let Some((l, c)) = self.obj_lit(v) else { continue };
            if c <= slack || rho.lit_value(l) != Some(false) {
                continue;
            }
            let id = self.red(clause(&[!l]), Substitution::from_assignment(&rho))?;
            self.fix_new_unit(!l, id)?;
            self.applied(Op::Hardening);
        }
        Ok(())
    }
}

fn subset_handles(a: &[Handle], b: &[Handle]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.by_ref().any(|y| y == x))
}
