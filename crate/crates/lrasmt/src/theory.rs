//! Bridges the simplex into batsat's DPLL(T) loop: SAT literals mapped to
//! variable bounds, asserted as the trail grows and retracted on backtrack.

use crate::rational::{Delta, Rat};
use crate::simplex::{Side, Simplex, TVar};
use batsat::{Lit, Theory, TheoryArg};
use num_traits::{One, Zero};

/// Bounds asserted by the two polarities of an atom literal.
#[derive(Debug, Clone)]
pub struct AtomBounds {
    pub var: TVar,
    /// bound and strictness when the literal is true: form ≤/< c
    pub bound: Rat,
    pub strict: bool,
}

#[derive(Default)]
pub struct LraTheory {
    pub simplex: Simplex,
    /// SAT var index -> atom, when the var stands for an arithmetic atom
    atoms: Vec<Option<AtomBounds>>,
    /// reason tag -> literal that asserted the bound
    reason_lits: Vec<Lit>,
    n_seen: usize,
    seen_stack: Vec<usize>,
    /// set when the engine has new work between checks
    pub dirty: bool,
}

impl LraTheory {
    pub fn new() -> Self {
        LraTheory::default()
    }

    pub fn set_atom(&mut self, sat_var_idx: usize, ab: AtomBounds) {
        if self.atoms.len() <= sat_var_idx {
            self.atoms.resize(sat_var_idx + 1, None);
        }
        self.atoms[sat_var_idx] = Some(ab);
    }

    fn atom_of(&self, l: Lit) -> Option<&AtomBounds> {
        self.atoms.get(l.var().idx() as usize).and_then(|a| a.as_ref())
    }

    /// (side, value) asserted by literal `l` over its atom.
    fn bound_of(ab: &AtomBounds, positive: bool) -> (Side, Delta) {
        if positive {
            let inf = if ab.strict { -Rat::one() } else { Rat::zero() };
            (Side::Upper, Delta::new(ab.bound.clone(), inf))
        } else {
            // not (t <= c)  ==  t > c ;  not (t < c)  ==  t >= c
            let inf = if ab.strict { Rat::zero() } else { Rat::one() };
            (Side::Lower, Delta::new(ab.bound.clone(), inf))
        }
    }

    /// Consume newly-assigned trail literals, asserting their bounds.
    /// Returns Err(core reasons) on an immediate bound-vs-bound conflict.
    fn absorb(&mut self, acts: &mut TheoryArg) -> bool {
        while self.n_seen < acts.model().len() {
            let l = acts.model()[self.n_seen];
            self.n_seen += 1;
            let Some(ab) = self.atom_of(l) else { continue };
            let (side, val) = Self::bound_of(ab, l.sign());
            let var = ab.var;
            let reason = self.reason_lits.len() as u32;
            self.reason_lits.push(l);
            if let Err(core) = self.simplex.assert_bound(var, side, val, reason) {
                self.conflict(acts, &core);
                return false;
            }
        }
        true
    }

    fn conflict(&self, acts: &mut TheoryArg, core: &[u32]) {
        let clause: Vec<Lit> = core
            .iter()
            .map(|r| !self.reason_lits[*r as usize])
            .collect();
        acts.raise_conflict(&clause, true);
    }
}

impl Theory for LraTheory {
    fn final_check(&mut self, acts: &mut TheoryArg) {
        if !self.absorb(acts) {
            return;
        }
        if let Err(core) = self.simplex.check() {
            self.conflict(acts, &core);
        }
    }

    fn partial_check(&mut self, acts: &mut TheoryArg) {
        // cheap pass: only bound-vs-bound conflicts are detected here, the
        // full simplex check runs in final_check
        self.absorb(acts);
    }

    fn create_level(&mut self) {
        self.simplex.push_level();
        self.seen_stack.push(self.n_seen);
        // reason_lits grows monotonically; stale tags are never referenced
        // again because the bounds they justified are popped with the level
    }

    fn pop_levels(&mut self, n: usize) {
        if n == 0 {
            return;
        }
        self.simplex.pop_levels(n);
        let keep = self.seen_stack.len() - n;
        self.n_seen = self.seen_stack[keep];
        self.seen_stack.truncate(keep);
    }

    fn n_levels(&self) -> usize {
        self.seen_stack.len()
    }

    fn explain_propagation(&mut self, _p: Lit) -> &[Lit] {
        unreachable!("theory never propagates")
    }
}
