use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::text::write_signed_terms;
use crate::{Assignment, LinearConstraint, Lit, PbError, SubstValue, Substitution, Var};

/// Linear objective `Σ cⱼ·xⱼ + W` to be minimized.
///
/// Canonical form: one term per variable, no zero coefficients, every literal
/// positive (a term `c·¬x` is stored as `−c·x` plus `c` in the constant).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Objective {
    terms: Vec<(BigInt, Var)>,
    constant: BigInt,
}

impl Objective {
    pub fn new<I>(raw: I, constant: BigInt) -> Objective
    where
        I: IntoIterator<Item = (BigInt, Lit)>,
    {
        let mut acc: BTreeMap<Var, BigInt> = BTreeMap::new();
        let mut constant = constant;
        for (c, lit) in raw {
            if lit.is_negated() {
                constant += &c;
                *acc.entry(lit.var()).or_insert_with(BigInt::zero) -= c;
            } else {
                *acc.entry(lit.var()).or_insert_with(BigInt::zero) += c;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(v, c)| (c, v)).collect();
        Objective { terms, constant }
    }

    pub fn from_small(raw: &[(i64, Lit)], constant: i64) -> Objective {
        Objective::new(raw.iter().map(|&(c, l)| (BigInt::from(c), l)), BigInt::from(constant))
    }

    pub fn zero() -> Objective {
        Objective::default()
    }

    pub fn terms(&self) -> &[(BigInt, Var)] {
        &self.terms
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|(_, v)| *v)
    }

    pub fn coef(&self, var: Var) -> Option<&BigInt> {
        self.terms.binary_search_by(|(_, v)| v.cmp(&var)).ok().map(|i| &self.terms[i].0)
    }

    pub fn contains(&self, var: Var) -> bool {
        self.coef(var).is_some()
    }

    fn raw(&self) -> impl Iterator<Item = (BigInt, Lit)> + '_ {
        self.terms.iter().map(|(c, v)| (c.clone(), v.pos()))
    }

    pub fn eval(&self, rho: &Assignment) -> Result<BigInt, PbError> {
        let mut sum = self.constant.clone();
        for (c, v) in &self.terms {
            if rho.get(*v).ok_or(PbError::Unassigned(*v))? {
                sum += c;
            }
        }
        Ok(sum)
    }

    pub fn apply_substitution(&self, omega: &Substitution) -> Objective {
        let mut constant = self.constant.clone();
        let mut raw = Vec::with_capacity(self.terms.len());
        for (c, v) in &self.terms {
            match omega.get(*v) {
                None => raw.push((c.clone(), v.pos())),
                Some(SubstValue::Const(true)) => constant += c,
                Some(SubstValue::Const(false)) => {}
                Some(SubstValue::Lit(l)) => raw.push((c.clone(), l)),
            }
        }
        Objective::new(raw, constant)
    }

    /// `self + diff`, renormalized.
    pub fn add(&self, diff: &Objective) -> Objective {
        Objective::new(self.raw().chain(diff.raw()), &self.constant + &diff.constant)
    }

    /// The constraint `self ≥ other`.
    pub fn geq(&self, other: &Objective) -> LinearConstraint {
        let raw = self.raw().chain(other.terms.iter().map(|(c, v)| (-c, v.pos())));
        LinearConstraint::normalize(raw, &other.constant - &self.constant)
    }

    /// Terms rewritten with positive coefficients on possibly negated literals.
    pub fn positive_form(&self) -> (Vec<(BigInt, Lit)>, BigInt) {
        let mut constant = self.constant.clone();
        let mut out = Vec::with_capacity(self.terms.len());
        for (c, v) in &self.terms {
            if c < &BigInt::zero() {
                constant += c;
                out.push((-c, v.neg()));
            } else {
                out.push((c.clone(), v.pos()));
            }
        }
        (out, constant)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    /// Scales by a positive integer; used when comparing objectives.
    pub fn scaled(&self, k: &BigInt) -> Objective {
        debug_assert!(k >= &BigInt::one());
        Objective { terms: self.terms.iter().map(|(c, v)| (c * k, *v)).collect(), constant: &self.constant * k }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "min: ")?;
        write_signed_terms(f, self.terms.iter().map(|(c, v)| (c, v.pos())), &self.constant)?;
        write!(f, " ;")
    }
}
