//! Normalized linear pseudo-Boolean constraints and the cutting-planes rules.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Assignment, Lit, PbError, SubstValue, Substitution, Var};

/// One `coef * lit` term. In a normalized constraint `coef` is strictly positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coef: BigInt,
    pub lit: Lit,
}

/// `Σ aⱼ·ℓⱼ ≥ b` in normalized form.
///
/// Every variable occurs at most once, coefficients are positive, the degree
/// is non-negative and terms are sorted by variable. Two constraints are
/// equivalent as normalized forms iff they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    terms: Vec<Term>,
    degree: BigInt,
}

impl LinearConstraint {
    /// Normalizes an arbitrary signed linear inequality `Σ cⱼ·ℓⱼ ≥ d`.
    pub fn normalize<I>(raw: I, degree: BigInt) -> LinearConstraint
    where
        I: IntoIterator<Item = (BigInt, Lit)>,
    {
        // Accumulate everything as coefficients of positive literals.
        let mut acc: BTreeMap<Var, BigInt> = BTreeMap::new();
        let mut degree = degree;
        for (c, lit) in raw {
            if c.is_zero() {
                continue;
            }
            if lit.is_negated() {
                // c·¬x = c − c·x
                degree -= &c;
                *acc.entry(lit.var()).or_insert_with(BigInt::zero) -= c;
            } else {
                *acc.entry(lit.var()).or_insert_with(BigInt::zero) += c;
            }
        }
        let mut terms = Vec::with_capacity(acc.len());
        for (var, c) in acc {
            if c.is_positive() {
                terms.push(Term { coef: c, lit: var.pos() });
            } else if c.is_negative() {
                // c·x = c − c·¬x with −c > 0
                degree -= &c;
                terms.push(Term { coef: -c, lit: var.neg() });
            }
        }
        if degree.is_negative() {
            degree = BigInt::zero();
        }
        LinearConstraint { terms, degree }
    }

    pub fn from_small(raw: &[(i64, Lit)], degree: i64) -> LinearConstraint {
        LinearConstraint::normalize(raw.iter().map(|&(c, l)| (BigInt::from(c), l)), BigInt::from(degree))
    }

    /// `asPB(C)` for a clause: `Σ ℓ ≥ 1` over the distinct literals of `C`.
    pub fn clause(lits: &[Lit]) -> LinearConstraint {
        let mut ls: Vec<Lit> = lits.to_vec();
        ls.sort();
        ls.dedup();
        LinearConstraint::normalize(ls.into_iter().map(|l| (BigInt::one(), l)), BigInt::one())
    }

    /// The vacuous constraint `0 ≥ 0`.
    pub fn trivial() -> LinearConstraint {
        LinearConstraint { terms: Vec::new(), degree: BigInt::zero() }
    }

    /// The contradiction `0 ≥ 1`.
    pub fn contradiction() -> LinearConstraint {
        LinearConstraint { terms: Vec::new(), degree: BigInt::one() }
    }

    /// `ℓ ≥ 0`. Only meaningful inside derivations.
    pub fn literal_axiom(lit: Lit) -> LinearConstraint {
        LinearConstraint { terms: vec![Term { coef: BigInt::one(), lit }], degree: BigInt::zero() }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> &BigInt {
        &self.degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|t| t.lit.var())
    }

    pub fn lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.terms.iter().map(|t| t.lit)
    }

    pub fn coef_of(&self, var: Var) -> Option<(&BigInt, Lit)> {
        self.terms.binary_search_by(|t| t.lit.var().cmp(&var)).ok().map(|i| (&self.terms[i].coef, self.terms[i].lit))
    }

    pub fn coef_sum(&self) -> BigInt {
        self.terms.iter().map(|t| &t.coef).sum()
    }

    /// Satisfied by every assignment.
    pub fn is_vacuous(&self) -> bool {
        self.degree.is_zero()
    }

    /// Falsified by every assignment.
    pub fn is_contradiction(&self) -> bool {
        self.coef_sum() < self.degree
    }

    /// True when this is the normalized form of a clause.
    pub fn is_clause(&self) -> bool {
        self.degree.is_one() && self.terms.iter().all(|t| t.coef.is_one())
    }

    pub fn negate(&self) -> LinearConstraint {
        // Σ aℓ ≤ b−1  ⇔  Σ a¬ℓ ≥ Σa − b + 1
        let rhs = self.coef_sum() - &self.degree + BigInt::one();
        LinearConstraint::normalize(self.terms.iter().map(|t| (t.coef.clone(), !t.lit)), rhs)
    }

    pub fn add(&self, other: &LinearConstraint) -> LinearConstraint {
        let raw = self.terms.iter().chain(other.terms.iter()).map(|t| (t.coef.clone(), t.lit));
        LinearConstraint::normalize(raw, &self.degree + &other.degree)
    }

    pub fn multiply(&self, k: &BigInt) -> Result<LinearConstraint, PbError> {
        if !k.is_positive() {
            return Err(PbError::NonPositiveMultiplier(k.to_string()));
        }
        Ok(LinearConstraint {
            terms: self.terms.iter().map(|t| Term { coef: &t.coef * k, lit: t.lit }).collect(),
            degree: &self.degree * k,
        })
    }

    pub fn divide(&self, d: &BigInt) -> Result<LinearConstraint, PbError> {
        if !d.is_positive() {
            return Err(PbError::NonPositiveDivisor(d.to_string()));
        }
        Ok(LinearConstraint {
            terms: self.terms.iter().map(|t| Term { coef: t.coef.div_ceil(d), lit: t.lit }).collect(),
            degree: self.degree.div_ceil(d),
        })
    }

    pub fn saturate(&self) -> LinearConstraint {
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let c = if t.coef > self.degree { self.degree.clone() } else { t.coef.clone() };
                (!c.is_zero()).then_some(Term { coef: c, lit: t.lit })
            })
            .collect();
        LinearConstraint { terms, degree: self.degree.clone() }
    }

    /// Restriction under a (literal-valued) substitution, renormalized.
    pub fn apply_substitution(&self, omega: &Substitution) -> LinearConstraint {
        if !self.vars().any(|v| omega.get(v).is_some()) {
            return self.clone();
        }
        let mut degree = self.degree.clone();
        let mut raw = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            match omega.get(t.lit.var()) {
                None => raw.push((t.coef.clone(), t.lit)),
                Some(SubstValue::Const(v)) => {
                    if t.lit.eval(v) {
                        degree -= &t.coef;
                    }
                }
                Some(SubstValue::Lit(m)) => {
                    let m = if t.lit.is_negated() { !m } else { m };
                    raw.push((t.coef.clone(), m));
                }
            }
        }
        LinearConstraint::normalize(raw, degree)
    }

    /// Sum of coefficients of true literals compared against the degree.
    pub fn satisfies(&self, rho: &Assignment) -> Result<bool, PbError> {
        let mut sum = BigInt::zero();
        for t in &self.terms {
            let v = rho.get(t.lit.var()).ok_or(PbError::Unassigned(t.lit.var()))?;
            if t.lit.eval(v) {
                sum += &t.coef;
            }
        }
        Ok(sum >= self.degree)
    }

    /// Divides out the gcd of all coefficients and the degree.
    ///
    /// Two constraints with the same primitive form are positive multiples of
    /// one another and therefore equivalent.
    pub fn primitive(&self) -> LinearConstraint {
        let mut g = self.degree.clone();
        for t in &self.terms {
            g = g.gcd(&t.coef);
        }
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        LinearConstraint {
            terms: self.terms.iter().map(|t| Term { coef: &t.coef / &g, lit: t.lit }).collect(),
            degree: &self.degree / &g,
        }
    }

    /// Literals of a clause-shaped constraint.
    pub fn clause_lits(&self) -> Option<Vec<Lit>> {
        self.is_clause().then(|| self.lits().collect())
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            write!(f, "{} {} ", t.coef, t.lit)?;
        }
        write!(f, ">= {} ;", self.degree)
    }
}
