//! Variables and literals.
//!
//! A variable lives in one of three namespaces. User variables come from the
//! input instance and print as `x<i>`. Fresh variables are introduced by the
//! encoding or by preprocessing and print as `_b<j>`. Temporary variables only
//! exist while renaming and print as `_t<i>`.

use std::fmt;
use std::ops::Not;

/// Namespace tag. The derived order is the canonical term order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Namespace {
    User,
    Fresh,
    Temp,
}

impl Namespace {
    pub fn prefix(self) -> &'static str {
        match self {
            Namespace::User => "x",
            Namespace::Fresh => "_b",
            Namespace::Temp => "_t",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    ns: Namespace,
    index: u32,
}

impl Var {
    /// Panics on index 0; indices are 1-based in every namespace.
    pub fn new(ns: Namespace, index: u32) -> Var {
        assert!(index >= 1, "variable indices start at 1");
        Var { ns, index }
    }

    pub fn user(index: u32) -> Var {
        Var::new(Namespace::User, index)
    }

    pub fn fresh(index: u32) -> Var {
        Var::new(Namespace::Fresh, index)
    }

    pub fn temp(index: u32) -> Var {
        Var::new(Namespace::Temp, index)
    }

    pub fn ns(self) -> Namespace {
        self.ns
    }

    pub fn index(self) -> u32 {
        self.index
    }

    pub fn pos(self) -> Lit {
        Lit { var: self, negated: false }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit { var: self, negated: true }
    }

    /// Literal of this variable that is true when the variable takes `value`.
    pub fn lit(self, value: bool) -> Lit {
        Lit { var: self, negated: !value }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.ns.prefix(), self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    var: Var,
    negated: bool,
}

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        Lit { var, negated }
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    pub fn is_positive(self) -> bool {
        !self.negated
    }

    /// Value of the literal when its variable is `value`.
    pub fn eval(self, value: bool) -> bool {
        value != self.negated
    }

    /// DIMACS-style signed integer for user literals.
    pub fn to_dimacs(self) -> Option<i64> {
        if self.var.ns != Namespace::User {
            return None;
        }
        let i = self.var.index as i64;
        Some(if self.negated { -i } else { i })
    }

    pub fn from_dimacs(value: i64) -> Option<Lit> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        let var = Var::user(value.unsigned_abs() as u32);
        Some(Lit::new(var, value < 0))
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit { var: self.var, negated: !self.negated }
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}
