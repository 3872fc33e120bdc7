//! Finite unions of rational intervals with open/closed endpoints; the exact
//! set algebra behind the trace-semantics oracle.

use num_rational::BigRational;

pub type Rat = BigRational;

/// One maximal interval piece. Either a point (`lo == hi`, both inclusive)
/// or a proper interval with `lo < hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub lo: Rat,
    pub lo_incl: bool,
    pub hi: Rat,
    pub hi_incl: bool,
}

impl Piece {
    fn is_valid(&self) -> bool {
        self.lo < self.hi || (self.lo == self.hi && self.lo_incl && self.hi_incl)
    }

    pub fn contains(&self, t: &Rat) -> bool {
        (t > &self.lo || (t == &self.lo && self.lo_incl))
            && (t < &self.hi || (t == &self.hi && self.hi_incl))
    }
}

/// Sorted union of disjoint, non-adjacent pieces.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RatSet {
    pieces: Vec<Piece>,
}

impl RatSet {
    pub fn empty() -> RatSet {
        RatSet::default()
    }

    pub fn point(t: Rat) -> RatSet {
        RatSet {
            pieces: vec![Piece {
                lo: t.clone(),
                lo_incl: true,
                hi: t,
                hi_incl: true,
            }],
        }
    }

    pub fn open(a: Rat, b: Rat) -> RatSet {
        RatSet::interval(a, false, b, false)
    }

    pub fn interval(lo: Rat, lo_incl: bool, hi: Rat, hi_incl: bool) -> RatSet {
        let p = Piece {
            lo,
            lo_incl,
            hi,
            hi_incl,
        };
        if p.is_valid() {
            RatSet { pieces: vec![p] }
        } else {
            RatSet::empty()
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, t: &Rat) -> bool {
        self.pieces.iter().any(|p| p.contains(t))
    }

    /// All piece endpoints, in order.
    pub fn endpoints(&self) -> Vec<Rat> {
        let mut out = Vec::with_capacity(self.pieces.len() * 2);
        for p in &self.pieces {
            out.push(p.lo.clone());
            out.push(p.hi.clone());
        }
        out
    }

    pub fn translate(&self, d: &Rat) -> RatSet {
        RatSet {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: &p.lo + d,
                    lo_incl: p.lo_incl,
                    hi: &p.hi + d,
                    hi_incl: p.hi_incl,
                })
                .collect(),
        }
    }

    pub fn union(&self, other: &RatSet) -> RatSet {
        let mut all: Vec<Piece> = self
            .pieces
            .iter()
            .chain(other.pieces.iter())
            .cloned()
            .collect();
        all.sort_by(|a, b| {
            a.lo.cmp(&b.lo)
                .then_with(|| b.lo_incl.cmp(&a.lo_incl))
        });
        let mut out: Vec<Piece> = Vec::new();
        for p in all {
            match out.last_mut() {
                Some(last) if joinable(last, &p) => {
                    if p.hi > last.hi || (p.hi == last.hi && p.hi_incl) {
                        last.hi = p.hi;
                        last.hi_incl = p.hi_incl;
                    }
                }
                _ => out.push(p),
            }
        }
        RatSet { pieces: out }
    }

    pub fn intersect(&self, other: &RatSet) -> RatSet {
        let mut out = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let (lo, lo_incl) = match a.lo.cmp(&b.lo) {
                    std::cmp::Ordering::Greater => (a.lo.clone(), a.lo_incl),
                    std::cmp::Ordering::Less => (b.lo.clone(), b.lo_incl),
                    std::cmp::Ordering::Equal => (a.lo.clone(), a.lo_incl && b.lo_incl),
                };
                let (hi, hi_incl) = match a.hi.cmp(&b.hi) {
                    std::cmp::Ordering::Less => (a.hi.clone(), a.hi_incl),
                    std::cmp::Ordering::Greater => (b.hi.clone(), b.hi_incl),
                    std::cmp::Ordering::Equal => (a.hi.clone(), a.hi_incl && b.hi_incl),
                };
                let p = Piece {
                    lo,
                    lo_incl,
                    hi,
                    hi_incl,
                };
                if p.is_valid() {
                    out.push(p);
                }
            }
        }
        RatSet { pieces: out }.union(&RatSet::empty())
    }

    /// Complement relative to the interval `[lo, hi]` with the given
    /// end inclusiveness.
    pub fn complement_within(&self, lo: &Rat, lo_incl: bool, hi: &Rat, hi_incl: bool) -> RatSet {
        let mut out = Vec::new();
        let mut cur_lo = lo.clone();
        let mut cur_incl = lo_incl;
        for p in &self.pieces {
            if p.hi < cur_lo || (p.hi == cur_lo && !p.hi_incl && !cur_incl) {
                continue;
            }
            let gap = Piece {
                lo: cur_lo.clone(),
                lo_incl: cur_incl,
                hi: p.lo.clone(),
                hi_incl: !p.lo_incl,
            };
            if gap.is_valid() && gap.lo <= *hi {
                out.push(gap);
            }
            cur_lo = p.hi.clone();
            cur_incl = !p.hi_incl;
            if cur_lo > *hi {
                break;
            }
        }
        let tail = Piece {
            lo: cur_lo,
            lo_incl: cur_incl,
            hi: hi.clone(),
            hi_incl,
        };
        if tail.is_valid() {
            out.push(tail);
        }
        let clip = RatSet::interval(lo.clone(), lo_incl, hi.clone(), hi_incl);
        RatSet { pieces: out }.intersect(&clip)
    }

    /// Largest `m` such that the open interval `(from, m)` is contained in
    /// the set, with `m` capped at `cap`. Returns `from` when no right
    /// neighborhood of `from` is covered.
    pub fn coverage_sup(&self, from: &Rat, cap: &Rat) -> Rat {
        for p in &self.pieces {
            let starts_at_or_before =
                p.lo < *from || (p.lo == *from);
            if starts_at_or_before && p.hi > *from {
                return p.hi.clone().min(cap.clone());
            }
        }
        from.clone()
    }
}

fn joinable(a: &Piece, b: &Piece) -> bool {
    // b.lo >= a.lo by sort order; pieces join if they overlap or touch
    b.lo < a.hi || (b.lo == a.hi && (b.lo_incl || a.hi_incl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    fn rq(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn union_merges_touching() {
        let a = RatSet::interval(r(0), false, r(1), false);
        let b = RatSet::point(r(1));
        let c = RatSet::interval(r(1), false, r(2), false);
        let u = a.union(&b).union(&c);
        assert_eq!(u.pieces().len(), 1);
        assert!(u.contains(&rq(3, 2)) && u.contains(&r(1)));
        assert!(!u.contains(&r(0)) && !u.contains(&r(2)));
    }

    #[test]
    fn union_keeps_gap() {
        let a = RatSet::interval(r(0), false, r(1), false);
        let c = RatSet::interval(r(1), false, r(2), false);
        let u = a.union(&c);
        assert_eq!(u.pieces().len(), 2);
        assert!(!u.contains(&r(1)));
    }

    #[test]
    fn intersect_respects_openness() {
        let a = RatSet::interval(r(0), true, r(2), true);
        let b = RatSet::interval(r(1), false, r(3), false);
        let i = a.intersect(&b);
        assert_eq!(i.pieces().len(), 1);
        assert!(!i.contains(&r(1)) && i.contains(&r(2)));
    }

    #[test]
    fn complement_within_interval() {
        let s = RatSet::point(r(1)).union(&RatSet::open(r(2), r(3)));
        let c = s.complement_within(&r(0), false, &r(4), false);
        assert!(c.contains(&rq(1, 2)));
        assert!(!c.contains(&r(1)));
        assert!(c.contains(&r(2)));
        assert!(!c.contains(&rq(5, 2)));
        assert!(c.contains(&r(3)));
        assert!(!c.contains(&r(4)));
        // complement twice is identity within the window
        let cc = c.complement_within(&r(0), false, &r(4), false);
        let clipped = s.intersect(&RatSet::open(r(0), r(4)));
        assert_eq!(cc, clipped);
    }

    #[test]
    fn coverage_sup_cases() {
        let s = RatSet::open(r(0), r(2)).union(&RatSet::open(r(2), r(4)));
        // (0, x) coverage from 0 stops at 2 (2 itself missing)
        assert_eq!(s.coverage_sup(&r(0), &r(10)), r(2));
        // from 2: the piece (2,4) starts at 2 exclusive but covers (2, x)
        assert_eq!(s.coverage_sup(&r(2), &r(10)), r(4));
        // cap applies
        assert_eq!(s.coverage_sup(&r(0), &r(1)), r(1));
        // no coverage from 5
        assert_eq!(s.coverage_sup(&r(5), &r(10)), r(5));
    }

    #[test]
    fn coverage_sup_closed_end_extends() {
        // (0,2] followed by (2,3): 2 is included, so coverage runs to 3
        let s = RatSet::interval(r(0), false, r(2), true).union(&RatSet::open(r(2), r(3)));
        assert_eq!(s.pieces().len(), 1);
        assert_eq!(s.coverage_sup(&r(0), &r(10)), r(3));
    }
}
