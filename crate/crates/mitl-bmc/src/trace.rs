//! Super-dense timed traces as finite lassos and the exact satisfaction
//! relation used as the oracle: a trace is a prefix plus a looping segment
//! repeated forever, each repetition shifted by a fixed positive amount.

use crate::formula::{Formula, Rel, SubformulaTable};
use crate::ratset::{Rat, RatSet};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interval {
    Singleton(Rat),
    Open(Rat, Rat),
}

impl Interval {
    pub fn start(&self) -> &Rat {
        match self {
            Interval::Singleton(t) => t,
            Interval::Open(a, _) => a,
        }
    }

    pub fn end(&self) -> &Rat {
        match self {
            Interval::Singleton(t) => t,
            Interval::Open(_, b) => b,
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Interval::Open(_, _))
    }

    pub fn contains(&self, t: &Rat) -> bool {
        match self {
            Interval::Singleton(a) => t == a,
            Interval::Open(a, b) => t > a && t < b,
        }
    }

    pub fn translate(&self, d: &Rat) -> Interval {
        match self {
            Interval::Singleton(t) => Interval::Singleton(t + d),
            Interval::Open(a, b) => Interval::Open(a + d, b + d),
        }
    }

    fn as_set(&self) -> RatSet {
        match self {
            Interval::Singleton(t) => RatSet::point(t.clone()),
            Interval::Open(a, b) => RatSet::open(a.clone(), b.clone()),
        }
    }
}

pub type PropSet = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub interval: Interval,
    pub props: PropSet,
}

/// Finite lasso representation of an infinite super-dense timed trace.
/// Unrolled interval `i` is `prefix[i]` for `i < prefix.len()`, and otherwise
/// the loop step at `(i - prefix.len()) % loop.len()` translated by
/// `shift` for every completed loop iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperDenseTrace {
    pub prefix: Vec<TraceStep>,
    pub loop_steps: Vec<TraceStep>,
    pub shift: Rat,
}

/// A point of the unrolled trace: interval index plus a time inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    pub index: usize,
    pub time: Rat,
}

impl Point {
    pub fn origin() -> Point {
        Point {
            index: 0,
            time: Rat::zero(),
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace structure invalid: {0}")]
    Structure(String),
    #[error("point outside trace domain: interval {index}, time {time}")]
    BadPoint { index: usize, time: String },
    #[error("formula must be in positive normal form")]
    NotPnf,
    #[error("refinement error: {0}")]
    Refine(String),
    #[error("trace format error at line {line}: {msg}")]
    Format { line: usize, msg: String },
}

impl SuperDenseTrace {
    pub fn new(
        prefix: Vec<TraceStep>,
        loop_steps: Vec<TraceStep>,
        shift: Rat,
    ) -> Result<SuperDenseTrace, TraceError> {
        let t = SuperDenseTrace {
            prefix,
            loop_steps,
            shift,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        let err = |m: String| Err(TraceError::Structure(m));
        if self.prefix.is_empty() {
            return err("prefix must contain the initial interval".into());
        }
        if self.loop_steps.is_empty() {
            return err("loop must be non-empty".into());
        }
        if !self.shift.is_positive() {
            return err("loop shift must be positive".into());
        }
        match &self.prefix[0].interval {
            Interval::Singleton(t) if t.is_zero() => {}
            other => return err(format!("first interval must be [0,0], got {other:?}")),
        }
        for (i, s) in self.prefix.iter().chain(self.loop_steps.iter()).enumerate() {
            if let Interval::Open(a, b) = &s.interval {
                if a >= b {
                    return err(format!("interval {i} is an empty open interval"));
                }
            }
            if s.interval.start().is_negative() {
                return err(format!("interval {i} starts before time 0"));
            }
        }
        // adjacency along prefix, into the loop, around the loop (with shift)
        let all: Vec<&TraceStep> = self.prefix.iter().chain(self.loop_steps.iter()).collect();
        for w in all.windows(2) {
            check_adjacent(&w[0].interval, &w[1].interval)?;
        }
        let last = &self.loop_steps[self.loop_steps.len() - 1].interval;
        let wrapped = self.loop_steps[0].interval.translate(&self.shift);
        check_adjacent(last, &wrapped)?;
        // the shift must equal the time advanced over one loop iteration
        let advance = wrapped.start() - self.loop_steps[0].interval.start();
        if advance != self.shift {
            return err("loop shift inconsistent".into());
        }
        Ok(())
    }

    pub fn fundamental_len(&self) -> usize {
        self.prefix.len() + self.loop_steps.len()
    }

    /// Geometry and propositions of unrolled interval `i`.
    pub fn step(&self, i: usize) -> (Interval, &PropSet) {
        let plen = self.prefix.len();
        if i < plen {
            let s = &self.prefix[i];
            (s.interval.clone(), &s.props)
        } else {
            let llen = self.loop_steps.len();
            let q = (i - plen) / llen;
            let r = (i - plen) % llen;
            let s = &self.loop_steps[r];
            let d = &self.shift * BigInt::from(q);
            (s.interval.translate(&d), &s.props)
        }
    }

    /// Fold an unrolled index into the fundamental domain
    /// `0 .. prefix.len() + loop.len()`, returning the time offset removed.
    pub fn fold(&self, i: usize) -> (usize, Rat) {
        let plen = self.prefix.len();
        if i < plen + self.loop_steps.len() {
            (i, Rat::zero())
        } else {
            let llen = self.loop_steps.len();
            let q = (i - plen) / llen;
            let r = (i - plen) % llen;
            (plen + r, &self.shift * BigInt::from(q))
        }
    }

    pub fn check_point(&self, p: &Point) -> Result<(), TraceError> {
        let (iv, _) = self.step(p.index);
        if iv.contains(&p.time) {
            Ok(())
        } else {
            Err(TraceError::BadPoint {
                index: p.index,
                time: p.time.to_string(),
            })
        }
    }

    /// Present the same infinite trace with `iterations` more loop copies
    /// moved into the prefix.
    pub fn rotate(&self, iterations: usize) -> SuperDenseTrace {
        let mut prefix = self.prefix.clone();
        for q in 0..iterations {
            let d = &self.shift * BigInt::from(q);
            for s in &self.loop_steps {
                prefix.push(TraceStep {
                    interval: s.interval.translate(&d),
                    props: s.props.clone(),
                });
            }
        }
        let d = &self.shift * BigInt::from(iterations);
        let loop_steps = self
            .loop_steps
            .iter()
            .map(|s| TraceStep {
                interval: s.interval.translate(&d),
                props: s.props.clone(),
            })
            .collect();
        SuperDenseTrace {
            prefix,
            loop_steps,
            shift: self.shift.clone(),
        }
    }
}

fn check_adjacent(a: &Interval, b: &Interval) -> Result<(), TraceError> {
    let ok = match (a, b) {
        (Interval::Open(_, e), Interval::Singleton(t)) => e == t,
        (Interval::Open(_, _), Interval::Open(_, _)) => false,
        (Interval::Singleton(t), Interval::Singleton(u)) => t == u,
        (Interval::Singleton(t), Interval::Open(a2, _)) => t == a2,
    };
    if ok {
        Ok(())
    } else {
        Err(TraceError::Structure(format!(
            "intervals not adjacent: {a:?} then {b:?}"
        )))
    }
}

// ---- the oracle ----

/// Exact satisfaction oracle for one PNF formula over one trace. Truth sets
/// are computed bottom-up per subformula for every interval in the
/// fundamental domain; satisfaction is periodic from the first loop interval
/// on because all operators only look into the future, so this is complete.
pub struct TraceOracle<'t> {
    trace: &'t SuperDenseTrace,
    pub table: SubformulaTable,
    /// sets[sub][step in fundamental domain]
    sets: Vec<Vec<RatSet>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OpKind {
    Until,
    Release,
}

impl<'t> TraceOracle<'t> {
    pub fn new(trace: &'t SuperDenseTrace, f: &Formula) -> Result<TraceOracle<'t>, TraceError> {
        if !f.is_pnf() {
            return Err(TraceError::NotPnf);
        }
        trace.validate()?;
        let table = SubformulaTable::build(f);
        let mut o = TraceOracle {
            trace,
            table,
            sets: Vec::new(),
        };
        o.compute();
        Ok(o)
    }

    fn n_steps(&self) -> usize {
        self.trace.fundamental_len()
    }

    fn geom(&self, i: usize) -> Interval {
        self.trace.step(i).0
    }

    /// Truth set of subformula `sub` on (possibly virtual) unrolled step `i`.
    fn set_at(&self, sub: usize, i: usize) -> RatSet {
        let (j, d) = self.trace.fold(i);
        if d.is_zero() {
            self.sets[sub][j].clone()
        } else {
            self.sets[sub][j].translate(&d)
        }
    }

    fn compute(&mut self) {
        let n = self.n_steps();
        let entries = self.table.entries.clone();
        for (idx, f) in entries.iter().enumerate() {
            let mut row = Vec::with_capacity(n);
            for i in 0..n {
                row.push(self.truth_set(f, idx, i));
            }
            self.sets.push(row);
        }
    }

    fn child_idx(&self, f: &Formula) -> usize {
        self.table.index_of(f).expect("children are computed first")
    }

    fn full_set(&self, i: usize) -> RatSet {
        self.geom(i).as_set()
    }

    fn truth_set(&self, f: &Formula, _idx: usize, i: usize) -> RatSet {
        let iv = self.geom(i);
        let props = self.trace.step(i).1;
        match f {
            Formula::True => self.full_set(i),
            Formula::False => RatSet::empty(),
            Formula::Atom(p) => {
                if props.contains(p) {
                    self.full_set(i)
                } else {
                    RatSet::empty()
                }
            }
            Formula::NegAtom(p) => {
                if props.contains(p) {
                    RatSet::empty()
                } else {
                    self.full_set(i)
                }
            }
            Formula::Not(_) => unreachable!("oracle input is PNF"),
            Formula::And(a, b) => {
                let sa = &self.sets[self.child_idx(a)][i];
                let sb = &self.sets[self.child_idx(b)][i];
                sa.intersect(sb)
            }
            Formula::Or(a, b) => {
                let sa = &self.sets[self.child_idx(a)][i];
                let sb = &self.sets[self.child_idx(b)][i];
                sa.union(sb)
            }
            Formula::Until(rel, n, a, b) => self.temporal_set(
                i,
                &iv,
                OpKind::Until,
                *rel,
                *n,
                Some(self.child_idx(a)),
                self.child_idx(b),
            ),
            Formula::Release(rel, n, a, b) => self.temporal_set(
                i,
                &iv,
                OpKind::Release,
                *rel,
                *n,
                Some(self.child_idx(a)),
                self.child_idx(b),
            ),
            Formula::Finally(rel, n, a) => {
                self.temporal_set(i, &iv, OpKind::Until, *rel, *n, None, self.child_idx(a))
            }
            Formula::Globally(rel, n, a) => {
                self.temporal_set(i, &iv, OpKind::Release, *rel, *n, None, self.child_idx(a))
            }
        }
    }

    /// Truth set of a temporal operator on step `i` by candidate-point
    /// sampling: within one interval the truth can only change where the
    /// in-step child structure changes or where the timing window boundary
    /// `t + n` crosses a child structure endpoint.
    fn temporal_set(
        &self,
        i: usize,
        iv: &Interval,
        kind: OpKind,
        rel: Rel,
        n: u32,
        left: Option<usize>,
        right: usize,
    ) -> RatSet {
        match iv {
            Interval::Singleton(t) => {
                if self.holds_point(i, t, kind, rel, n, left, right) {
                    RatSet::point(t.clone())
                } else {
                    RatSet::empty()
                }
            }
            Interval::Open(a, b) => {
                let mut cands: BTreeSet<Rat> = BTreeSet::new();
                let nr = rat(n as i64);
                let horizon = self.scan_horizon(i, b, n);
                for sub in left.iter().copied().chain([right]) {
                    for e in self.set_endpoints_between(sub, i, horizon) {
                        for c in [e.clone(), &e - &nr] {
                            if c > *a && c < *b {
                                cands.insert(c);
                            }
                        }
                    }
                }
                // also times where the window boundary crosses interval edges
                for (j, jv) in self.geoms_between(i, horizon) {
                    let _ = j;
                    for e in [jv.start().clone(), jv.end().clone()] {
                        let c = &e - &nr;
                        if c > *a && c < *b {
                            cands.insert(c);
                        }
                    }
                }
                let cands: Vec<Rat> = cands.into_iter().collect();
                let mut out = RatSet::empty();
                let mut marks = Vec::with_capacity(cands.len() + 2);
                marks.push(a.clone());
                marks.extend(cands.iter().cloned());
                marks.push(b.clone());
                for w in marks.windows(2) {
                    let mid = (&w[0] + &w[1]) / rat(2);
                    if self.holds_point(i, &mid, kind, rel, n, left, right) {
                        out = out.union(&RatSet::open(w[0].clone(), w[1].clone()));
                    }
                }
                for c in &cands {
                    if self.holds_point(i, c, kind, rel, n, left, right) {
                        out = out.union(&RatSet::point(c.clone()));
                    }
                }
                out
            }
        }
    }

    /// Last virtual step a scan starting from step `i` may need to inspect.
    fn scan_horizon(&self, i: usize, step_end: &Rat, n: u32) -> usize {
        let plen = self.trace.prefix.len();
        let llen = self.trace.loop_steps.len();
        // steps covering [step start, step_end + n], then two more full loops
        let target_time = step_end + rat(n as i64) + &self.trace.shift;
        let mut j = i.max(plen);
        loop {
            let (jj, _) = self.trace.fold(j);
            let _ = jj;
            let (ivj, _) = self.trace.step(j);
            if ivj.start() > &target_time {
                break;
            }
            j += 1;
        }
        j + 2 * llen + 1
    }

    fn set_endpoints_between(&self, sub: usize, from: usize, to: usize) -> Vec<Rat> {
        let mut out = Vec::new();
        for j in from..=to {
            out.extend(self.set_at(sub, j).endpoints());
        }
        out
    }

    fn geoms_between(&self, from: usize, to: usize) -> Vec<(usize, Interval)> {
        (from..=to).map(|j| (j, self.geom(j))).collect()
    }

    /// Point evaluation of a temporal operator via the generic witness scan.
    ///
    /// Until: a witness point later than `p` satisfying the timing bound and
    /// the right child, with the left child holding at every point strictly
    /// in between.  Release: true unless a "violation witness" exists, i.e. a
    /// later point in the timing bound where the right child fails and no
    /// left-child point occurs strictly before it.
    fn holds_point(
        &self,
        step: usize,
        t: &Rat,
        kind: OpKind,
        rel: Rel,
        n: u32,
        left: Option<usize>,
        right: usize,
    ) -> bool {
        match kind {
            OpKind::Until => self.witness_scan(
                step,
                t,
                rel,
                n,
                &CoverSrc::Pos(left),
                &TargetSrc::Pos(right),
            ),
            OpKind::Release => !self.witness_scan(
                step,
                t,
                rel,
                n,
                &CoverSrc::Neg(left),
                &TargetSrc::Neg(right),
            ),
        }
    }

    fn cover_set(&self, src: &CoverSrc, j: usize) -> RatSet {
        let iv = self.geom(j);
        match src {
            // Finally has `true` on the left: everything is covered.
            CoverSrc::Pos(None) => iv.as_set(),
            CoverSrc::Pos(Some(s)) => self.set_at(*s, j),
            // Globally has `false` on the left: its absence covers everything.
            CoverSrc::Neg(None) => iv.as_set(),
            CoverSrc::Neg(Some(s)) => self
                .set_at(*s, j)
                .complement_within(iv.start(), !iv.is_open(), iv.end(), !iv.is_open()),
        }
    }

    fn target_set(&self, src: &TargetSrc, j: usize) -> RatSet {
        let iv = self.geom(j);
        match src {
            TargetSrc::Pos(s) => self.set_at(*s, j),
            TargetSrc::Neg(s) => self
                .set_at(*s, j)
                .complement_within(iv.start(), !iv.is_open(), iv.end(), !iv.is_open()),
        }
    }

    /// Does a point `w` later than `(step, t)` exist with `time(w) - t ⋈ n`,
    /// `w` in the target set, and the cover set containing every point
    /// strictly between? The scan walks virtual steps; periodicity of the
    /// fundamental domain bounds it.
    fn witness_scan(
        &self,
        step: usize,
        t: &Rat,
        rel: Rel,
        n: u32,
        cover: &CoverSrc,
        target: &TargetSrc,
    ) -> bool {
        let plen = self.trace.prefix.len();
        let llen = self.trace.loop_steps.len();
        let threshold = t + rat(n as i64);
        // cut: witnesses are allowed up to and including time cut.1 at step cut.0
        let mut cut: Option<(usize, Rat)> = None;
        let mut stable_streak = 0usize;
        let mut j = step;
        loop {
            if let Some((cs, _)) = &cut {
                if j > *cs {
                    return false;
                }
            }
            let iv = self.geom(j);
            // extend the cover frontier through step j
            if cut.is_none() {
                let blocked = match &iv {
                    Interval::Singleton(a) => {
                        if j == step {
                            None // no in-step points after t
                        } else if self.cover_set(cover, j).contains(a) {
                            None
                        } else {
                            Some(a.clone())
                        }
                    }
                    Interval::Open(a, b) => {
                        let from = if j == step { t } else { a };
                        let m = self.cover_set(cover, j).coverage_sup(from, b);
                        if &m == b {
                            None
                        } else {
                            Some(m)
                        }
                    }
                };
                if let Some(m) = blocked {
                    cut = Some((j, m));
                }
            }
            // witness candidates at step j
            let mut region = iv.as_set();
            if j == step {
                region = region.intersect(&RatSet::interval(
                    t.clone(),
                    false,
                    iv.end().clone(),
                    !iv.is_open(),
                ));
                if !iv.is_open() {
                    region = RatSet::empty();
                }
            }
            if let Some((cs, ct)) = &cut {
                if j == *cs {
                    region = region.intersect(&RatSet::interval(
                        iv.start().clone() - rat(1),
                        true,
                        ct.clone(),
                        true,
                    ));
                }
            }
            let window = match rel {
                Rel::Lt => RatSet::interval(Rat::zero(), true, threshold.clone(), false),
                Rel::Le => RatSet::interval(Rat::zero(), true, threshold.clone(), true),
                Rel::Ge => RatSet::interval(threshold.clone(), true, iv.end().clone(), true),
                Rel::Gt => RatSet::interval(threshold.clone(), false, iv.end().clone(), true),
            };
            region = region.intersect(&window);
            if !region.is_empty() && !region.intersect(&self.target_set(target, j)).is_empty() {
                return true;
            }
            // no more windows possible for upper bounds
            if rel.is_upper() && iv.start() > &threshold {
                return false;
            }
            // periodic termination for lower bounds and untimed operators:
            // past the threshold and inside the loop zone, one full period of
            // (cover full, target empty) repeats forever
            if cut.is_none() && j >= plen && iv.start() > &threshold {
                let cover_full = match &iv {
                    Interval::Singleton(a) => self.cover_set(cover, j).contains(a),
                    Interval::Open(a, b) => &self.cover_set(cover, j).coverage_sup(a, b) == b,
                };
                let target_empty = self.target_set(target, j).is_empty();
                if cover_full && target_empty {
                    stable_streak += 1;
                    if stable_streak >= llen {
                        return false;
                    }
                } else {
                    stable_streak = 0;
                }
            }
            j += 1;
            assert!(
                j < step + 64 * (plen + llen + n as usize + 4) + 1_000,
                "witness scan failed to terminate"
            );
        }
    }

    /// Truth of the root formula at a point of the unrolled trace.
    pub fn holds_at(&self, p: &Point) -> Result<bool, TraceError> {
        self.trace.check_point(p)?;
        self.sub_holds_at(self.table.root_index(), p)
    }

    /// Truth of subformula `sub` (by table index) at a point.
    pub fn sub_holds_at(&self, sub: usize, p: &Point) -> Result<bool, TraceError> {
        self.trace.check_point(p)?;
        let (j, d) = self.trace.fold(p.index);
        let time = &p.time - &d;
        Ok(self.sets[sub][j].contains(&time))
    }

    /// Constant truth of subformula `sub` on fundamental-domain step `j`,
    /// or `None` when the truth varies within the interval.
    pub fn interval_truth(&self, sub: usize, j: usize) -> Option<bool> {
        let s = &self.sets[sub][j];
        if s.is_empty() {
            return Some(false);
        }
        if *s == self.geom(j).as_set() {
            return Some(true);
        }
        None
    }

    /// Fine for the formula: every subformula has constant truth on every
    /// interval. Periodicity makes the fundamental domain sufficient.
    pub fn is_fine(&self) -> bool {
        for sub in 0..self.table.len() {
            for j in 0..self.n_steps() {
                if self.interval_truth(sub, j).is_none() {
                    return false;
                }
            }
        }
        true
    }
}

enum CoverSrc {
    /// until: the left child must cover everything before the witness
    Pos(Option<usize>),
    /// release: *absence* of the left child must cover everything before
    /// the violation witness
    Neg(Option<usize>),
}

enum TargetSrc {
    Pos(usize),
    Neg(usize),
}

/// Evaluate a PNF formula at a point of the trace.
pub fn evaluate_at(trace: &SuperDenseTrace, f: &Formula, p: &Point) -> Result<bool, TraceError> {
    TraceOracle::new(trace, f)?.holds_at(p)
}

/// Is the trace fine for the formula?
pub fn is_fine(trace: &SuperDenseTrace, f: &Formula) -> Result<bool, TraceError> {
    Ok(TraceOracle::new(trace, f)?.is_fine())
}

// ---- refinement and fineness ----

/// Split open intervals at the given times. Keys index the fundamental
/// domain (prefix then loop template); splitting a loop interval splits it in
/// every unrolled copy.
pub fn refine_trace(
    trace: &SuperDenseTrace,
    splits: &BTreeMap<usize, Vec<Rat>>,
) -> Result<SuperDenseTrace, TraceError> {
    let plen = trace.prefix.len();
    let refine_step = |idx: usize, s: &TraceStep| -> Result<Vec<TraceStep>, TraceError> {
        let pts = match splits.get(&idx) {
            None => return Ok(vec![s.clone()]),
            Some(p) if p.is_empty() => return Ok(vec![s.clone()]),
            Some(p) => p,
        };
        let (a, b) = match &s.interval {
            Interval::Open(a, b) => (a, b),
            Interval::Singleton(_) => {
                return Err(TraceError::Refine(format!(
                    "cannot split singleton interval {idx}"
                )))
            }
        };
        let mut sorted = pts.clone();
        sorted.sort();
        sorted.dedup();
        for t in &sorted {
            if t <= a || t >= b {
                return Err(TraceError::Refine(format!(
                    "split {t} outside open interval ({a},{b})"
                )));
            }
        }
        let mut out = Vec::new();
        let mut lo = a.clone();
        for t in &sorted {
            out.push(TraceStep {
                interval: Interval::Open(lo.clone(), t.clone()),
                props: s.props.clone(),
            });
            out.push(TraceStep {
                interval: Interval::Singleton(t.clone()),
                props: s.props.clone(),
            });
            lo = t.clone();
        }
        out.push(TraceStep {
            interval: Interval::Open(lo, b.clone()),
            props: s.props.clone(),
        });
        Ok(out)
    };
    let mut prefix = Vec::new();
    for (i, s) in trace.prefix.iter().enumerate() {
        prefix.extend(refine_step(i, s)?);
    }
    let mut loop_steps = Vec::new();
    for (i, s) in trace.loop_steps.iter().enumerate() {
        loop_steps.extend(refine_step(plen + i, s)?);
    }
    SuperDenseTrace::new(prefix, loop_steps, trace.shift.clone())
}

/// Candidate fineness splits: for every timed subformula with bound `n`,
/// every interval endpoint `B` of the unrolled horizon contributes `B - n`
/// and `B + n` wherever they fall strictly inside an open interval.
/// Timed operators are processed children-first and later operators see the
/// split points added for earlier ones.
pub fn fineness_breakpoints(
    trace: &SuperDenseTrace,
    f: &Formula,
) -> Result<BTreeMap<usize, Vec<Rat>>, TraceError> {
    trace.validate()?;
    let plen = trace.prefix.len();
    let llen = trace.loop_steps.len();
    let max_b = rat(f.max_bound() as i64);
    // endpoints of enough unrolled copies that every loop-template interval
    // sees the limit set of breakpoint offsets
    let iters = {
        let per = &trace.shift;
        let mut k = 1i64;
        while rat(k) * per.clone() <= &max_b + rat(1) {
            k += 1;
        }
        (k as usize) + 2
    };
    let horizon_steps = plen + (iters + 2) * llen;
    let mut endpoints: BTreeSet<Rat> = BTreeSet::new();
    for i in 0..horizon_steps {
        let (iv, _) = trace.step(i);
        endpoints.insert(iv.start().clone());
        endpoints.insert(iv.end().clone());
    }

    let table = SubformulaTable::build(f);
    let mut splits: BTreeMap<usize, BTreeSet<Rat>> = BTreeMap::new();

    for sub in &table.entries {
        let n = match sub {
            Formula::Until(rel, n, _, _)
            | Formula::Release(rel, n, _, _)
            | Formula::Finally(rel, n, _)
            | Formula::Globally(rel, n, _)
                if !(matches!(rel, Rel::Ge) && *n == 0) =>
            {
                rat(*n as i64)
            }
            _ => continue,
        };
        let mut new_points: Vec<(usize, Rat)> = Vec::new();
        let cands: Vec<Rat> = endpoints
            .iter()
            .flat_map(|b| [b - &n, b + &n])
            .filter(|c| !c.is_negative())
            .collect();
        for c in cands {
            // locate the candidate in every fundamental-domain interval it
            // hits across unrolled copies
            for j in 0..trace.fundamental_len() {
                let (iv, _) = trace.step(j);
                if j >= plen {
                    // map the candidate into this template interval modulo shift
                    if let Interval::Open(a, b) = &iv {
                        let mut v = c.clone();
                        // shift down into range if above
                        while &v >= b {
                            v -= trace.shift.clone();
                        }
                        while &v <= a {
                            v += trace.shift.clone();
                        }
                        if &v > a && &v < b {
                            new_points.push((j, v));
                        }
                    }
                } else if let Interval::Open(a, b) = &iv {
                    if c > *a && c < *b {
                        new_points.push((j, c.clone()));
                    }
                }
            }
        }
        for (j, v) in new_points {
            // extend the endpoint pool so later (parent) operators see these
            endpoints.insert(v.clone());
            if j >= plen {
                let mut w = v.clone();
                for _ in 0..(iters + 2) {
                    endpoints.insert(w.clone());
                    w += trace.shift.clone();
                }
            }
            splits.entry(j).or_default().insert(v);
        }
    }

    Ok(splits
        .into_iter()
        .map(|(k, v)| (k, v.into_iter().collect()))
        .collect())
}

/// Refine the trace until it is fine for the formula.
pub fn make_fine(trace: &SuperDenseTrace, f: &Formula) -> Result<SuperDenseTrace, TraceError> {
    // rotate enough loop copies into the prefix that early copies (whose
    // breakpoint sets differ from the limit) are split individually
    let max_b = f.max_bound() as i64;
    let mut iters = 1usize;
    while rat(iters as i64) * trace.shift.clone() <= rat(max_b + 1) {
        iters += 1;
    }
    let mut cur = trace.rotate(iters);
    for _ in 0..3 {
        let bp = fineness_breakpoints(&cur, f)?;
        cur = refine_trace(&cur, &bp)?;
        if is_fine(&cur, f)? {
            return Ok(cur);
        }
    }
    Err(TraceError::Refine(
        "trace did not become fine after repeated splitting".into(),
    ))
}

// ---- text format ----

pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rat::new(n, d))
    } else if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let neg = i.trim_start().starts_with('-');
        let i: BigInt = i.parse().ok()?;
        let num: BigInt = f.parse().ok()?;
        let den = BigInt::from(10u32).pow(f.len() as u32);
        let frac = Rat::new(num, den);
        let base = Rat::from_integer(i);
        Some(if neg { base - frac } else { base + frac })
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(n))
    }
}

impl fmt::Display for SuperDenseTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl SuperDenseTrace {
    pub fn to_text(&self) -> String {
        let mut out = String::from("prefix:\n");
        for s in &self.prefix {
            out.push_str(&step_line(s));
        }
        out.push_str(&format!("loop: shift={}\n", format_rat(&self.shift)));
        for s in &self.loop_steps {
            out.push_str(&step_line(s));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<SuperDenseTrace, TraceError> {
        let mut prefix = Vec::new();
        let mut loop_steps = Vec::new();
        let mut shift: Option<Rat> = None;
        let mut in_loop = false;
        let mut seen_prefix_header = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |m: &str| TraceError::Format {
                line: lineno + 1,
                msg: m.to_string(),
            };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "prefix:" {
                seen_prefix_header = true;
                continue;
            }
            if let Some(rest) = line.strip_prefix("loop:") {
                let rest = rest.trim();
                let sh = rest
                    .strip_prefix("shift=")
                    .ok_or_else(|| err("expected 'loop: shift=<rational>'"))?;
                shift = Some(parse_rat(sh).ok_or_else(|| err("bad shift rational"))?);
                in_loop = true;
                continue;
            }
            if !seen_prefix_header {
                return Err(err("expected 'prefix:' header"));
            }
            let step = parse_step_line(line).map_err(|m| TraceError::Format {
                line: lineno + 1,
                msg: m,
            })?;
            if in_loop {
                loop_steps.push(step);
            } else {
                prefix.push(step);
            }
        }
        let shift = shift.ok_or(TraceError::Format {
            line: 0,
            msg: "missing 'loop:' section".into(),
        })?;
        SuperDenseTrace::new(prefix, loop_steps, shift)
    }
}

fn step_line(s: &TraceStep) -> String {
    let iv = match &s.interval {
        Interval::Singleton(t) => format!("[{},{}]", format_rat(t), format_rat(t)),
        Interval::Open(a, b) => format!("({},{})", format_rat(a), format_rat(b)),
    };
    let props: Vec<&str> = s.props.iter().map(|s| s.as_str()).collect();
    format!("{iv} {{{}}}\n", props.join(","))
}

fn parse_step_line(line: &str) -> Result<TraceStep, String> {
    let (iv_text, props_text) = line
        .split_once(' ')
        .ok_or("expected '<interval> {props}'")?;
    let iv_text = iv_text.trim();
    let interval = if let Some(inner) = iv_text.strip_prefix('[').and_then(|s| s.strip_suffix(']'))
    {
        let (a, b) = inner.split_once(',').ok_or("expected [a,a]")?;
        let a = parse_rat(a).ok_or("bad rational")?;
        let b = parse_rat(b).ok_or("bad rational")?;
        if a != b {
            return Err("singleton interval must have equal endpoints".into());
        }
        Interval::Singleton(a)
    } else if let Some(inner) = iv_text.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        let (a, b) = inner.split_once(',').ok_or("expected (a,b)")?;
        let a = parse_rat(a).ok_or("bad rational")?;
        let b = parse_rat(b).ok_or("bad rational")?;
        Interval::Open(a, b)
    } else {
        return Err(format!("bad interval syntax: {iv_text}"));
    };
    let props_text = props_text.trim();
    let inner = props_text
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or("expected {p,q,...}")?;
    let mut props = PropSet::new();
    for p in inner.split(',') {
        let p = p.trim();
        if !p.is_empty() {
            props.insert(p.to_string());
        }
    }
    Ok(TraceStep { interval, props })
}
