use std::collections::BTreeMap;
use std::fmt;

use crate::{Lit, PbError, Var};

/// Partial map from variables to Boolean values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    values: BTreeMap<Var, bool>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.values.get(&var).copied()
    }

    pub fn lit_value(&self, lit: Lit) -> Option<bool> {
        self.get(lit.var()).map(|v| lit.eval(v))
    }

    pub fn set(&mut self, var: Var, value: bool) {
        self.values.insert(var, value);
    }

    /// Makes `lit` true.
    pub fn assign(&mut self, lit: Lit) {
        self.values.insert(lit.var(), lit.is_positive());
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, bool)> + '_ {
        self.values.iter().map(|(&v, &b)| (v, b))
    }

    /// The literals made true by this assignment.
    pub fn true_lits(&self) -> impl Iterator<Item = Lit> + '_ {
        self.iter().map(|(v, b)| v.lit(b))
    }
}

impl FromIterator<(Var, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (Var, bool)>>(iter: T) -> Self {
        Assignment { values: iter.into_iter().collect() }
    }
}

/// Image of a variable under a substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubstValue {
    Const(bool),
    Lit(Lit),
}

impl fmt::Display for SubstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubstValue::Const(false) => write!(f, "0"),
            SubstValue::Const(true) => write!(f, "1"),
            SubstValue::Lit(l) => write!(f, "{l}"),
        }
    }
}

/// Partial substitution `ω`, used for witnesses and restrictions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, SubstValue>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Substitution, PbError>
    where
        I: IntoIterator<Item = (Var, SubstValue)>,
    {
        let mut s = Substitution::new();
        for (v, val) in pairs {
            s.insert(v, val)?;
        }
        Ok(s)
    }

    /// Substitution mapping each variable of `rho` to its constant value.
    pub fn from_assignment(rho: &Assignment) -> Substitution {
        Substitution { map: rho.iter().map(|(v, b)| (v, SubstValue::Const(b))).collect() }
    }

    /// `{ℓ → 1}` expressed on the variable of `lit`.
    pub fn lit_true(lit: Lit) -> Substitution {
        let mut s = Substitution::new();
        s.map.insert(lit.var(), SubstValue::Const(lit.is_positive()));
        s
    }

    pub fn insert(&mut self, var: Var, value: SubstValue) -> Result<(), PbError> {
        if let SubstValue::Lit(l) = value {
            if l.var() == var {
                return Err(PbError::SelfSubstitution(var));
            }
        }
        self.map.insert(var, value);
        Ok(())
    }

    /// Maps the variable of `lit` so that `lit` takes `value`.
    pub fn set_lit(&mut self, lit: Lit, value: bool) {
        self.map.insert(lit.var(), SubstValue::Const(value != lit.is_negated()));
    }

    /// Maps the variable of `lit` so that `lit` becomes `target`.
    pub fn map_lit(&mut self, lit: Lit, target: Lit) -> Result<(), PbError> {
        let image = if lit.is_negated() { !target } else { target };
        self.insert(lit.var(), SubstValue::Lit(image))
    }

    pub fn get(&self, var: Var) -> Option<SubstValue> {
        self.map.get(&var).copied()
    }

    pub fn contains(&self, var: Var) -> bool {
        self.map.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.map.keys().copied()
    }

    /// Pairs sorted by variable.
    pub fn iter(&self) -> impl Iterator<Item = (Var, SubstValue)> + '_ {
        self.map.iter().map(|(&v, &s)| (v, s))
    }

    /// Composition `ρ ∘ ω` as an assignment, for constant-only substitutions.
    pub fn compose_assignment(&self, rho: &Assignment) -> Option<Assignment> {
        let mut out = rho.clone();
        for (v, s) in self.iter() {
            match s {
                SubstValue::Const(b) => out.set(v, b),
                SubstValue::Lit(l) => out.set(v, rho.lit_value(l)?),
            }
        }
        Some(out)
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, s) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{v} -> {s}")?;
        }
        Ok(())
    }
}
