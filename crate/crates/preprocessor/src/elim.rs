//! Resolution-style techniques: BVE, SSR, BVA, and the label techniques
//! that introduce fresh variables (intrinsic at-most-ones, binary core
//! removal, label matching).

use std::collections::BTreeMap;

use pb_core::{Lit, Substitution, Var};
use proof_checker::PolToken;

use crate::db::{is_taut, normalize, Clause, Handle};
use crate::error::{Flow, PreError, Step};
use crate::work::{clause, subset, Op, Preprocessor};

/// A BVA residual with the handles of the clauses it was matched in.
type Residual = (Vec<Lit>, Vec<Handle>);

fn without(lits: &[Lit], l: Lit) -> Vec<Lit> {
    lits.iter().copied().filter(|&m| m != l).collect()
}

fn pair_witness(a: Lit, av: bool, b: Lit, bv: bool) -> Substitution {
    let mut w = Substitution::new();
    w.set_lit(a, av);
    w.set_lit(b, bv);
    w
}

impl Preprocessor {
    pub(crate) fn bve(&mut self) -> Step<()> {
        for v in self.db.vars() {
            if !self.budget_left() {
                break;
            }
            self.try_bve(v, false)?;
        }
        Ok(())
    }

    /// Eliminates `x` by resolution. `forced` skips the growth bound and
    /// allows pure variables.
    pub(crate) fn try_bve(&mut self, x: Var, forced: bool) -> Step<bool> {
        if self.in_obj(x) {
            return Ok(false);
        }
        let pos = self.db.occ(x.pos()).to_vec();
        let neg = self.db.occ(x.neg()).to_vec();
        if pos.is_empty() && neg.is_empty() || !forced && (pos.is_empty() || neg.is_empty()) {
            return Ok(false);
        }
        let bound = pos.len() + neg.len() + self.cfg.bve_growth;
        let mut resolvents = Vec::new();
        for &p in &pos {
            let c = without(&self.db.get(p).lits, x.pos());
            for &n in &neg {
                let d = without(&self.db.get(n).lits, x.neg());
                let overlap = c.iter().any(|l| d.binary_search(l).is_ok());
                let lits = normalize(c.iter().chain(&d).copied().collect());
                if is_taut(&lits) {
                    continue;
                }
                resolvents.push((p, n, lits, overlap));
                if !forced && resolvents.len() > bound {
                    return Ok(false);
                }
            }
        }
        for (p, n, lits, overlap) in resolvents {
            let mut toks =
                vec![PolToken::Int(self.db.get(p).id.into()), PolToken::Int(self.db.get(n).id.into()), PolToken::Add];
            if overlap {
                toks.push(PolToken::Sat);
            }
            let id = self.pol(toks)?;
            if lits.is_empty() {
                return Err(Flow::Infeasible);
            }
            self.core(&[id])?;
            self.db.insert(Clause::new(lits, id, None));
        }
        for n in neg {
            self.remove_with(n, Substitution::lit_true(x.neg()))?;
        }
        for p in pos {
            self.remove_with(p, Substitution::lit_true(x.pos()))?;
        }
        self.applied(Op::EliminateVariableBve);
        Ok(true)
    }

    /// `C ∨ ℓ` and `D ∨ ¬ℓ` with `C ⊆ D` give `D`.
    pub(crate) fn self_subsuming_resolution(&mut self) -> Step<()> {
        for h in self.db.handles() {
            let Some(c) = self.db.try_get(h) else { continue };
            if c.taut {
                continue;
            }
            for l in c.lits.clone() {
                let Some(c) = self.db.try_get(h) else { break };
                if self.in_obj(l.var()) || !c.contains(l) {
                    continue;
                }
                let rest = without(&c.lits, l);
                for d in self.db.occ(!l).to_vec() {
                    if d == h || !self.db.alive(d) || !self.db.alive(h) {
                        continue;
                    }
                    let strengthened = without(&self.db.get(d).lits, !l);
                    if !subset(&rest, &strengthened) {
                        continue;
                    }
                    if !self.budget_left() {
                        return Ok(());
                    }
                    let id = self.rup_clause(&strengthened)?;
                    if strengthened.is_empty() {
                        return Err(Flow::Infeasible);
                    }
                    self.core(&[id])?;
                    let old = self.db.get(d).id;
                    self.delc(old)?;
                    self.db.replace(d, strengthened, id);
                    self.applied(Op::SelfSubsumingResolution);
                }
            }
        }
        Ok(())
    }

    // -----------------------------------------------------------------------
    // Bounded variable addition

    pub(crate) fn bva(&mut self) -> Step<()> {
        let mut lits: Vec<Lit> = self.db.vars().into_iter().flat_map(|v| [v.pos(), v.neg()]).collect();
        lits.retain(|&l| (2..=self.cfg.bva_max_occ).contains(&self.db.occ_count(l)));
        for l in lits {
            if !self.budget_left() {
                break;
            }
            if self.db.occ_count(l) < 2 {
                continue;
            }
            if let Some((m_lit, m_cls)) = self.bva_match(l) {
                self.apply_bva(&m_lit, &m_cls)?;
            }
        }
        Ok(())
    }

    /// Greedy matching: literals `M_lit` and residuals `R` such that
    /// `R ∨ ℓ` is a clause for every pair. Each residual keeps the handles
    /// of its matched clauses.
    fn bva_match(&self, l: Lit) -> Option<(Vec<Lit>, Vec<Residual>)> {
        let mut m_lit = vec![l];
        let mut m_cls: Vec<Residual> = Vec::new();
        for &h in self.db.occ(l) {
            let r = without(&self.db.get(h).lits, l);
            if !r.is_empty() && !m_cls.iter().any(|(q, _)| *q == r) {
                m_cls.push((r, vec![h]));
            }
        }
        let gain = |a: usize, b: usize| (a * b) as isize - (a + b) as isize;
        while m_lit.len() < self.cfg.bva_max_lits {
            let mut cand: BTreeMap<Lit, Vec<(usize, Handle)>> = BTreeMap::new();
            for (j, (r, _)) in m_cls.iter().enumerate() {
                let pivot = *r.iter().min_by_key(|&&m| self.db.occ_count(m)).expect("non-empty residual");
                for &h2 in self.db.occ(pivot) {
                    let d = &self.db.get(h2).lits;
                    if d.len() != r.len() + 1 || !subset(r, d) {
                        continue;
                    }
                    let l2 = *d.iter().find(|m| r.binary_search(m).is_err()).expect("one extra literal");
                    if m_lit.iter().any(|m| m.var() == l2.var()) {
                        continue;
                    }
                    let e = cand.entry(l2).or_default();
                    if e.last().is_none_or(|&(k, _)| k != j) {
                        e.push((j, h2));
                    }
                }
            }
            let Some((&l2, hits)) = cand.iter().max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0))) else {
                break;
            };
            if gain(m_lit.len() + 1, hits.len()) <= gain(m_lit.len(), m_cls.len()) {
                break;
            }
            let hits = hits.clone();
            let mut next = Vec::with_capacity(hits.len());
            for (j, h2) in hits {
                let (r, mut hs) = m_cls[j].clone();
                hs.push(h2);
                next.push((r, hs));
            }
            m_lit.push(l2);
            m_cls = next;
        }
        (gain(m_lit.len(), m_cls.len()) > 0).then_some((m_lit, m_cls))
    }

    fn apply_bva(&mut self, m_lit: &[Lit], m_cls: &[(Vec<Lit>, Vec<Handle>)]) -> Step<()> {
        let x = self.fresh_var();
        let mut x0 = Substitution::new();
        x0.set_lit(x.pos(), false);
        let mut added = Vec::new();
        let mut ids = Vec::new();
        for (r, _) in m_cls {
            let mut lits = r.clone();
            lits.push(x.neg());
            let id = self.red(clause(&lits), x0.clone())?;
            ids.push(id);
            added.push((lits, id));
        }
        for &l in m_lit {
            let id = self.red(clause(&[l, x.pos()]), Substitution::lit_true(x.pos()))?;
            ids.push(id);
            added.push((vec![l, x.pos()], id));
        }
        self.core(&ids)?;
        for (_, hs) in m_cls {
            for &h in hs {
                self.remove_rup(h)?;
            }
        }
        for (lits, id) in added {
            self.db.insert(Clause::new(lits, id, None));
        }
        self.applied(Op::AddVariablesBva);
        Ok(())
    }

    /// Explicit BVA over a given matching. Every `R ∨ ℓ` must be a clause
    /// (or a tautology). Accepted when the clause count does not grow.
    pub fn add_variables_bva(&mut self, m_lit: &[Lit], residuals: &[Vec<Lit>]) -> Result<bool, PreError> {
        let added = m_lit.len() + residuals.len();
        if m_lit.is_empty() || residuals.is_empty() || added > m_lit.len() * residuals.len() {
            return Ok(false);
        }
        let mut m_cls = Vec::new();
        for r in residuals {
            let r = normalize(r.clone());
            let mut hs = Vec::new();
            for &l in m_lit {
                let mut full = r.clone();
                full.push(l);
                let full = normalize(full);
                if is_taut(&full) {
                    continue;
                }
                match self.db.occ(l).iter().copied().find(|&h| self.db.get(h).lits == full) {
                    Some(h) => hs.push(h),
                    None => return Ok(false),
                }
            }
            m_cls.push((r, hs));
        }
        match self.apply_bva(m_lit, &m_cls) {
            Ok(()) => Ok(true),
            Err(Flow::Fail(e)) => Err(e),
            Err(Flow::Infeasible) => Err(PreError::Internal("BVA cannot make an instance infeasible".into())),
        }
    }

    // -----------------------------------------------------------------------
    // Fresh-variable label techniques

    /// Objective literals `p`, `q` of equal weight where `¬p`, `¬q` occur
    /// nowhere.
    fn am1_pair_ok(&self, p: Lit, q: Lit) -> bool {
        if p.var() == q.var() || !self.db.occ(!p).is_empty() || !self.db.occ(!q).is_empty() {
            return false;
        }
        match (self.obj_lit(p.var()), self.obj_lit(q.var())) {
            (Some((a, wa)), Some((b, wb))) => a == p && b == q && wa == wb,
            _ => false,
        }
    }

    pub(crate) fn intrinsic_at_most_ones(&mut self) -> Step<()> {
        for h in self.db.handles() {
            let Some(c) = self.db.try_get(h) else { continue };
            if c.lits.len() != 2 || !self.am1_pair_ok(c.lits[0], c.lits[1]) {
                continue;
            }
            let (p, q) = (c.lits[0], c.lits[1]);
            if !self.budget_left() {
                break;
            }
            self.am1(p, q, h)?;
        }
        Ok(())
    }

    /// With the clause `p ∨ q` (handle `h`), `w·p + w·q` becomes `w·z + w`
    /// where `z ⇔ p ∧ q`; the clause `¬p ∨ ¬q ∨ z` stays.
    fn am1(&mut self, p: Lit, q: Lit, h: Handle) -> Step<Var> {
        let w = self.obj_lit(p.var()).map_or(0, |(_, c)| c);
        let z = self.fresh_var();
        let mut z0 = Substitution::new();
        z0.set_lit(z.pos(), false);
        let a = self.red(clause(&[z.neg(), p]), z0.clone())?;
        let b = self.red(clause(&[z.neg(), q]), z0.clone())?;
        let r = self.red(clause(&[z.pos(), !p, !q]), Substitution::lit_true(z.pos()))?;
        let pq = self.db.get(h).id;
        let s = self.pol(vec![
            PolToken::Int(pq.into()),
            PolToken::Int(a.into()),
            PolToken::Add,
            PolToken::Int(b.into()),
            PolToken::Add,
            PolToken::Int(2u32.into()),
            PolToken::Div,
        ])?;
        self.core(&[a, b, r, s])?;
        self.obju(&[(-w, p), (-w, q), (w, z.pos())], w)?;
        self.delc_with(s, z0.clone())?;
        self.delc_with(a, z0.clone())?;
        self.delc_with(b, z0)?;
        self.db.insert(Clause::new(vec![z.pos(), !p, !q], r, None));
        self.applied(Op::IntrinsicAtMostOnes);
        Ok(z)
    }

    /// A binary clause of two labels that each occur elsewhere: introduce
    /// the at-most-one and eliminate both label variables.
    pub(crate) fn binary_core_removal(&mut self) -> Step<()> {
        for h in self.db.handles() {
            let Some(c) = self.db.try_get(h) else { continue };
            if c.lits.len() != 2 || !self.am1_pair_ok(c.lits[0], c.lits[1]) {
                continue;
            }
            let (p, q) = (c.lits[0], c.lits[1]);
            let (op, oq) = (self.db.occ(p), self.db.occ(q));
            let shared = op.iter().filter(|h| oq.binary_search(h).is_ok()).count();
            if op.len() < 2 || oq.len() < 2 || shared != 1 {
                continue;
            }
            if !self.budget_left() {
                break;
            }
            self.am1(p, q, h)?;
            self.try_bve(p.var(), true)?;
            self.try_bve(q.var(), true)?;
            self.applied(Op::BinaryCoreRemoval);
        }
        Ok(())
    }

    /// Two equal-weight labels, each in exactly one clause, whose clauses
    /// clash on a variable, merge into one label.
    pub(crate) fn label_matching(&mut self) -> Step<()> {
        let mut by_weight: BTreeMap<i128, Vec<Lit>> = BTreeMap::new();
        for v in self.obj.vars().collect::<Vec<_>>() {
            let (l, w) = self.obj_lit(v).expect("objective variable");
            if self.db.occ_count(l) == 1 && self.db.occ(!l).is_empty() {
                by_weight.entry(w).or_default().push(l);
            }
        }
        for labels in by_weight.into_values() {
            let mut used = vec![false; labels.len()];
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    if used[i] || used[j] {
                        continue;
                    }
                    let (lc, ld) = (labels[i], labels[j]);
                    let (Some(&hc), Some(&hd)) = (self.db.occ(lc).first(), self.db.occ(ld).first()) else {
                        continue;
                    };
                    if hc == hd || self.db.occ_count(lc) != 1 || self.db.occ_count(ld) != 1 {
                        continue;
                    }
                    let dl = &self.db.get(hd).lits;
                    let clash =
                        self.db.get(hc).lits.iter().copied().find(|&m| m != lc && dl.binary_search(&!m).is_ok());
                    let Some(m) = clash else { continue };
                    if !self.budget_left() {
                        return Ok(());
                    }
                    self.match_labels(lc, ld, hc, hd, !m)?;
                    used[i] = true;
                    used[j] = true;
                }
            }
        }
        Ok(())
    }

    /// `C ∨ lc`, `D ∨ ld` with `¬x ∈ C`, `x ∈ D`: both labels become one
    /// fresh label `z`.
    fn match_labels(&mut self, lc: Lit, ld: Lit, hc: Handle, hd: Handle, x: Lit) -> Step<()> {
        let w = self.obj_lit(lc.var()).map_or(0, |(_, c)| c);
        let z = self.fresh_var();
        let mut swap = Substitution::new();
        let internal = |e: pb_core::PbError| Flow::Fail(PreError::Internal(e.to_string()));
        swap.map_lit(lc, x).map_err(internal)?;
        swap.map_lit(ld, !x).map_err(internal)?;
        let am = self.red(clause(&[!lc, !ld]), swap.clone())?;
        self.core(&[am])?;
        let pair = pb_core::LinearConstraint::from_small(&[(1, z.pos()), (1, !lc), (1, !ld)], 2);
        let r1 = self.red(pair, Substitution::lit_true(z.pos()))?;
        let mut z0 = Substitution::new();
        z0.set_lit(z.pos(), false);
        let r2 = self.red(clause(&[z.neg(), lc, ld]), z0)?;
        self.core(&[r1, r2])?;
        self.obju(&[(-w, lc), (-w, ld), (w, z.pos())], 0)?;
        let mut ids = Vec::new();
        for (h, l) in [(hc, lc), (hd, ld)] {
            let mut lits = without(&self.db.get(h).lits, l);
            lits.push(z.pos());
            let id = self.rup_clause(&lits)?;
            ids.push((h, lits, id));
        }
        self.core(&ids.iter().map(|t| t.2).collect::<Vec<_>>())?;
        for (h, lits, id) in ids {
            let old = self.db.get(h).id;
            self.delc_with(old, swap.clone())?;
            self.db.replace(h, lits, id);
        }
        self.delc_with(r1, pair_witness(lc, false, ld, false))?;
        self.delc_with(r2, pair_witness(lc, true, ld, false))?;
        let mut lc0 = Substitution::new();
        lc0.set_lit(lc, false);
        self.delc_with(am, lc0)?;
        self.applied(Op::LabelMatching);
        Ok(())
    }
}
