//! Typed terms over Bool and Real, and normalization of arithmetic
//! comparisons into bounds on (slack) variables.

use crate::rational::Rat;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

/// Index into the engine's real-variable table.
pub type RealVar = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    BoolConst(bool),
    BoolVar(u32),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    /// `(t < c)` or `(t <= c)` over a canonical linear form; see [`LinAtom`].
    Atom(LinAtom),
}

/// Canonical upper-bound atom `form < bound` (strict) or `form <= bound`.
///
/// `form` is a sorted, gcd-free linear combination whose leading coefficient
/// is positive; every comparison over Reals normalizes to the positive or
/// negative polarity of such an atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinAtom {
    pub form: Vec<(RealVar, Rat)>,
    pub bound: Rat,
    pub strict: bool,
}

/// A linear expression while parsing: sum of var terms plus a constant.
#[derive(Debug, Clone, Default)]
pub struct LinExpr {
    pub terms: BTreeMap<RealVar, Rat>,
    pub konst: Rat,
}

impl LinExpr {
    pub fn constant(c: Rat) -> Self {
        LinExpr {
            terms: BTreeMap::new(),
            konst: c,
        }
    }

    pub fn var(v: RealVar) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, Rat::from_integer(1.into()));
        LinExpr {
            terms,
            konst: Rat::zero(),
        }
    }

    pub fn add(mut self, other: &LinExpr) -> Self {
        for (v, c) in &other.terms {
            let e = self.terms.entry(*v).or_insert_with(Rat::zero);
            *e += c;
        }
        self.terms.retain(|_, c| !c.is_zero());
        self.konst += &other.konst;
        self
    }

    pub fn scale(mut self, k: &Rat) -> Self {
        if k.is_zero() {
            return LinExpr::constant(Rat::zero());
        }
        for c in self.terms.values_mut() {
            *c *= k;
        }
        self.konst *= k;
        self
    }

    pub fn sub(self, other: &LinExpr) -> Self {
        self.add(&other.clone().scale(&-Rat::from_integer(1.into())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Ge,
    Gt,
}

/// Turn `e ⋈ 0` into a literal over a canonical atom: `Ok(Left(bool))` for a
/// constant truth, otherwise the atom plus the polarity it is used with.
pub fn normalize_rel(e: LinExpr, rel: Rel) -> Result<(LinAtom, bool), bool> {
    // move constant right: terms ⋈ -konst
    let mut form: Vec<(RealVar, Rat)> = e.terms.into_iter().collect();
    let mut bound = -e.konst;
    if form.is_empty() {
        let z = Rat::zero();
        return Err(match rel {
            Rel::Le => z <= bound,
            Rel::Lt => z < bound,
            Rel::Ge => z >= bound,
            Rel::Gt => z > bound,
        });
    }
    // flip so the relation reads "form ≤/< bound" and lead coefficient is positive
    let mut rel = rel;
    if form[0].1.is_negative() {
        for (_, c) in form.iter_mut() {
            *c = -c.clone();
        }
        bound = -bound;
        rel = match rel {
            Rel::Le => Rel::Ge,
            Rel::Lt => Rel::Gt,
            Rel::Ge => Rel::Le,
            Rel::Gt => Rel::Lt,
        };
    }
    // scale so the leading coefficient is exactly one
    let lead = form[0].1.clone();
    if !lead.is_one() {
        for (_, c) in form.iter_mut() {
            *c = c.clone() / &lead;
        }
        bound = bound / &lead;
    }
    let (strict, positive) = match rel {
        Rel::Le => (false, true),
        Rel::Lt => (true, true),
        // form ≥ b  ==  not (form < b);  form > b  ==  not (form <= b)
        Rel::Ge => (true, false),
        Rel::Gt => (false, false),
    };
    Ok((
        LinAtom {
            form,
            bound,
            strict,
        },
        positive,
    ))
}

trait IsOne {
    fn is_one(&self) -> bool;
}

impl IsOne for Rat {
    fn is_one(&self) -> bool {
        *self == Rat::from_integer(1.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    #[test]
    fn normalizes_sign_and_scale() {
        // -2x + 4 <= 0  ==>  x >= 2  ==>  not (x < 2)
        let mut e = LinExpr::var(0).scale(&rat_int(-2));
        e.konst = rat_int(4);
        let (atom, pos) = normalize_rel(e, Rel::Le).unwrap();
        assert_eq!(atom.form, vec![(0, rat_int(1))]);
        assert_eq!(atom.bound, rat_int(2));
        assert!(atom.strict && !pos);
    }

    #[test]
    fn shared_form_across_relations() {
        // x - y <= 3 and x - y > 3 must canonicalize to the same atom
        let e1 = LinExpr::var(0).sub(&LinExpr::var(1)).add(&LinExpr::constant(rat_int(-3)));
        let e2 = LinExpr::var(0).sub(&LinExpr::var(1)).add(&LinExpr::constant(rat_int(-3)));
        let (a1, p1) = normalize_rel(e1, Rel::Le).unwrap();
        let (a2, p2) = normalize_rel(e2, Rel::Gt).unwrap();
        assert_eq!(a1, a2);
        assert!(p1 && !p2);
    }

    #[test]
    fn constant_relations_fold() {
        let e = LinExpr::constant(rat(1, 2));
        assert_eq!(normalize_rel(e.clone(), Rel::Lt), Err(false));
        assert_eq!(normalize_rel(e, Rel::Le), Err(false));
        let z = LinExpr::constant(rat_int(0));
        assert_eq!(normalize_rel(z, Rel::Ge), Err(true));
    }
}
