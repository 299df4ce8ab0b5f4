//! Working clause database with an occurrence index.

use std::collections::HashMap;

use pb_core::{LinearConstraint, Lit, Var};

pub(crate) type Handle = usize;

#[derive(Clone, Debug)]
pub(crate) struct Clause {
    /// Sorted, distinct. Excludes the relaxation variable.
    pub lits: Vec<Lit>,
    pub id: u64,
    /// Relaxation variable of a soft clause (WCNF phase only).
    pub relax: Option<Var>,
    pub taut: bool,
}

pub(crate) fn normalize(mut lits: Vec<Lit>) -> Vec<Lit> {
    lits.sort();
    lits.dedup();
    lits
}

pub(crate) fn is_taut(sorted: &[Lit]) -> bool {
    sorted.windows(2).any(|p| p[0].var() == p[1].var())
}

impl Clause {
    pub fn new(lits: Vec<Lit>, id: u64, relax: Option<Var>) -> Clause {
        let lits = normalize(lits);
        let taut = is_taut(&lits);
        Clause { lits, id, relax, taut }
    }

    pub fn is_hard(&self) -> bool {
        self.relax.is_none()
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.lits.binary_search(&l).is_ok()
    }

    /// Literals of the proof constraint, relaxation variable included.
    pub fn full_lits(&self) -> Vec<Lit> {
        let mut ls = self.lits.clone();
        if let Some(b) = self.relax {
            ls.push(b.pos());
        }
        normalize(ls)
    }

    pub fn constraint(&self) -> LinearConstraint {
        LinearConstraint::clause(&self.full_lits())
    }
}

/// Clauses addressed by stable handles; handle order is creation order.
/// Tautologies are stored but not indexed, so techniques never see them.
#[derive(Clone, Debug, Default)]
pub(crate) struct Db {
    slots: Vec<Option<Clause>>,
    occ: HashMap<Lit, Vec<Handle>>,
    live: usize,
}

impl Db {
    fn index(&mut self, h: Handle) {
        let c = self.slots[h].as_ref().expect("live handle");
        if c.taut {
            return;
        }
        for &l in &c.lits {
            let list = self.occ.entry(l).or_default();
            let pos = list.binary_search(&h).unwrap_err();
            list.insert(pos, h);
        }
    }

    fn unindex(&mut self, h: Handle) {
        let c = self.slots[h].as_ref().expect("live handle");
        if c.taut {
            return;
        }
        for l in &c.lits {
            if let Some(list) = self.occ.get_mut(l) {
                if let Ok(pos) = list.binary_search(&h) {
                    list.remove(pos);
                }
            }
        }
    }

    pub fn insert(&mut self, c: Clause) -> Handle {
        let h = self.slots.len();
        self.slots.push(Some(c));
        self.live += 1;
        self.index(h);
        h
    }

    pub fn remove(&mut self, h: Handle) -> Clause {
        self.unindex(h);
        self.live -= 1;
        self.slots[h].take().expect("live handle")
    }

    /// Replaces the literals and ID of `h`, keeping its position and relaxation.
    pub fn replace(&mut self, h: Handle, lits: Vec<Lit>, id: u64) {
        self.unindex(h);
        let c = self.slots[h].as_mut().expect("live handle");
        c.lits = normalize(lits);
        c.taut = is_taut(&c.lits);
        c.id = id;
        self.index(h);
    }

    /// Turns a relaxed clause into a hard clause containing its relaxation literal.
    pub fn harden_relaxed(&mut self, h: Handle) {
        let lits = self.get(h).full_lits();
        self.unindex(h);
        let c = self.slots[h].as_mut().expect("live handle");
        c.relax = None;
        c.taut = is_taut(&lits);
        c.lits = lits;
        self.index(h);
    }

    pub fn get(&self, h: Handle) -> &Clause {
        self.slots[h].as_ref().expect("live handle")
    }

    pub fn try_get(&self, h: Handle) -> Option<&Clause> {
        self.slots.get(h).and_then(Option::as_ref)
    }

    pub fn alive(&self, h: Handle) -> bool {
        self.try_get(h).is_some()
    }

    pub fn handles(&self) -> Vec<Handle> {
        (0..self.slots.len()).filter(|&h| self.slots[h].is_some()).collect()
    }

    pub fn clauses(&self) -> impl Iterator<Item = (Handle, &Clause)> + '_ {
        self.slots.iter().enumerate().filter_map(|(h, c)| c.as_ref().map(|c| (h, c)))
    }

    /// Indexed clauses containing `l`, in handle order.
    pub fn occ(&self, l: Lit) -> &[Handle] {
        self.occ.get(&l).map_or(&[], Vec::as_slice)
    }

    pub fn occ_count(&self, l: Lit) -> usize {
        self.occ(l).len()
    }

    pub fn occurs(&self, v: Var) -> bool {
        self.occ_count(v.pos()) + self.occ_count(v.neg()) > 0
    }

    /// Variables of indexed clauses, ascending.
    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.occ.iter().filter(|(_, hs)| !hs.is_empty()).map(|(l, _)| l.var()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn len(&self) -> usize {
        self.live
    }

    /// Constraints of the non-tautological clauses.
    pub fn constraints(&self) -> Vec<LinearConstraint> {
        self.clauses().filter(|(_, c)| !c.taut).map(|(_, c)| c.constraint()).collect()
    }
}
