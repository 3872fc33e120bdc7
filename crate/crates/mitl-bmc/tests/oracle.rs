//! Oracle regressions: the worked examples and counterexample traces that
//! pin down the super-dense semantics, plus refinement and fineness behavior.

use mitl_bmc::formula::{parse_mitl, to_pnf, Formula, Rel};
use mitl_bmc::trace::{
    evaluate_at, fineness_breakpoints, is_fine, make_fine, rat, ratq, refine_trace, Interval,
    Point, PropSet, SuperDenseTrace, TraceStep,
};
use std::collections::BTreeMap;

fn props(names: &[&str]) -> PropSet {
    names.iter().map(|s| s.to_string()).collect()
}

fn singleton(t: i64, ps: &[&str]) -> TraceStep {
    TraceStep {
        interval: Interval::Singleton(rat(t)),
        props: props(ps),
    }
}

fn singleton_q(n: i64, d: i64, ps: &[&str]) -> TraceStep {
    TraceStep {
        interval: Interval::Singleton(ratq(n, d)),
        props: props(ps),
    }
}

fn open(a: i64, b: i64, ps: &[&str]) -> TraceStep {
    TraceStep {
        interval: Interval::Open(rat(a), rat(b)),
        props: props(ps),
    }
}

fn open_q(a: (i64, i64), b: (i64, i64), ps: &[&str]) -> TraceStep {
    TraceStep {
        interval: Interval::Open(ratq(a.0, a.1), ratq(b.0, b.1)),
        props: props(ps),
    }
}

/// Append an empty idle loop `[t,t] (t, t+1)` so a finite prefix becomes
/// a lasso covering all of the time axis.
fn with_idle_loop(prefix: Vec<TraceStep>, t: i64) -> SuperDenseTrace {
    SuperDenseTrace::new(
        prefix,
        vec![singleton(t, &[]), open(t, t + 1, &[])],
        rat(1),
    )
    .unwrap()
}

fn holds(trace: &SuperDenseTrace, text: &str) -> bool {
    let f = to_pnf(&parse_mitl(text).unwrap());
    evaluate_at(trace, &f, &Point::origin()).unwrap()
}

/// The running example: [0,0]{} (0,4){p} [4,4]{p} [4,4]{q} [4,4]{} ...
fn example_one() -> SuperDenseTrace {
    with_idle_loop(
        vec![
            singleton(0, &[]),
            open(0, 4, &["p"]),
            singleton(4, &["p"]),
            singleton(4, &["q"]),
            singleton(4, &[]),
        ],
        4,
    )
}

#[test]
fn example_one_satisfactions() {
    let t = example_one();
    assert!(holds(&t, "p U[<=4] q"));
    assert!(holds(&t, "F[<=3]((G[<=1] p) & (F[<2] q))"));
}

#[test]
fn current_point_does_not_witness_timed_until() {
    // [0,0]{q} (0,3){} ... does not satisfy p U[<2] q
    let t = with_idle_loop(vec![singleton(0, &["q"]), open(0, 3, &[])], 3);
    assert!(!holds(&t, "p U[<2] q"));
}

#[test]
fn untimed_until_is_timing_sensitive() {
    // satisfied when q arrives on a singleton...
    let sat = with_idle_loop(
        vec![singleton(0, &["p"]), open(0, 2, &["p"]), singleton(2, &["q"])],
        2,
    );
    assert!(holds(&sat, "p U q"));
    // ...but not when q only holds on an open interval
    let unsat = with_idle_loop(
        vec![
            singleton(0, &["p"]),
            open(0, 2, &["p"]),
            singleton(2, &["p"]),
            open_q((2, 1), (7, 2), &["q"]),
            singleton_q(7, 2, &[]),
            open_q((7, 2), (4, 1), &[]),
        ],
        4,
    );
    assert!(!holds(&unsat, "p U q"));
}

/// [0,0]{p} (0,2){p} [2,2]{p} [2,2]{q} [2,2]{} ...
fn lower_bound_trace() -> SuperDenseTrace {
    with_idle_loop(
        vec![
            singleton(0, &["p"]),
            open(0, 2, &["p"]),
            singleton(2, &["p"]),
            singleton(2, &["q"]),
            singleton(2, &[]),
        ],
        2,
    )
}

#[test]
fn lower_bound_until_has_no_untimed_decomposition() {
    let t = lower_bound_trace();
    assert!(holds(&t, "p U[>=2] q"));
    // non-strict until: q | (p & (p U q))
    let pu = Formula::or(
        Formula::atom("q"),
        Formula::and(
            Formula::atom("p"),
            Formula::until_s(Formula::atom("p"), Formula::atom("q")),
        ),
    );
    let decomposed = Formula::and(
        Formula::globally(Rel::Le, 2, pu),
        Formula::finally(Rel::Ge, 2, Formula::atom("q")),
    );
    assert!(!evaluate_at(&t, &decomposed, &Point::origin()).unwrap());
}

#[test]
fn bounded_release_has_no_decomposition() {
    // [0,0]{} (0,2){b} [2,2]{b} (2,4){a} [4,4]{} ...
    let t = with_idle_loop(
        vec![
            singleton(0, &[]),
            open(0, 2, &["b"]),
            singleton(2, &["b"]),
            open(2, 4, &["a"]),
            singleton(4, &[]),
        ],
        4,
    );
    assert!(holds(&t, "a R[<=3] b"));
    assert!(!holds(&t, "G[<=3] b"));
    assert!(!holds(&t, "b U[<=3] (a & b)"));
}

#[test]
fn satisfaction_is_periodic_over_the_loop() {
    let t = example_one();
    let f = to_pnf(&parse_mitl("G F p | F[<=1] q").unwrap());
    let plen = t.prefix.len();
    let llen = t.loop_steps.len();
    for r in 0..llen {
        let (iv0, _) = t.step(plen + r);
        let (iv3, _) = t.step(plen + r + 3 * llen);
        let p0 = Point {
            index: plen + r,
            time: iv0.start() + (iv0.end() - iv0.start()) / rat(2),
        };
        let p3 = Point {
            index: plen + r + 3 * llen,
            time: iv3.start() + (iv3.end() - iv3.start()) / rat(2),
        };
        // singleton intervals: midpoint formula yields the point itself
        assert_eq!(
            evaluate_at(&t, &f, &p0).unwrap(),
            evaluate_at(&t, &f, &p3).unwrap()
        );
    }
}

#[test]
fn point_outside_domain_is_an_error() {
    let t = example_one();
    let p = Point {
        index: 1,
        time: rat(5),
    };
    assert!(evaluate_at(&t, &Formula::atom("p"), &p).is_err());
}

// ---- Example 2: fineness ----

/// [0,0]{p} (0,41/10){p} [41/10,41/10]{p} then {q} then {} ...
fn example_two() -> SuperDenseTrace {
    SuperDenseTrace::new(
        vec![
            singleton(0, &["p"]),
            open_q((0, 1), (41, 10), &["p"]),
            singleton_q(41, 10, &["p"]),
            singleton_q(41, 10, &["q"]),
            singleton_q(41, 10, &[]),
        ],
        vec![
            open_q((41, 10), (51, 10), &[]),
            singleton_q(51, 10, &[]),
        ],
        rat(1),
    )
    .unwrap()
}

#[test]
fn example_two_is_not_fine_before_refinement() {
    let t = example_two();
    let f = parse_mitl("G[<=1] p").unwrap();
    assert!(!is_fine(&t, &f).unwrap());
    // every trace is fine for an atomic proposition
    assert!(is_fine(&t, &Formula::atom("p")).unwrap());
}

#[test]
fn example_two_refined_at_interior_point_is_fine() {
    let t = example_two();
    let f = parse_mitl("G[<=1] p").unwrap();
    // split (0, 4.1) at 3.1 = 4.1 - 1
    let mut splits = BTreeMap::new();
    splits.insert(1usize, vec![ratq(31, 10)]);
    let refined = refine_trace(&t, &splits).unwrap();
    assert_eq!(refined.prefix.len(), t.prefix.len() + 2);
    assert!(is_fine(&refined, &f).unwrap());
}

#[test]
fn fineness_breakpoints_find_the_needed_split() {
    let t = example_two();
    let f = parse_mitl("G[<=1] p").unwrap();
    let bp = fineness_breakpoints(&t, &f).unwrap();
    let splits = bp.get(&1).expect("open interval (0,4.1) must be split");
    assert!(splits.contains(&ratq(31, 10)), "splits: {splits:?}");
}

#[test]
fn untimed_formula_needs_no_breakpoints() {
    let t = example_two();
    let f = parse_mitl("p U q").unwrap();
    let bp = fineness_breakpoints(&t, &f).unwrap();
    assert!(bp.values().all(|v| v.is_empty()) || bp.is_empty());
}

#[test]
fn finally_bound_two_gains_split_at_two() {
    let t = example_one();
    let f = parse_mitl("F[<2] q").unwrap();
    let bp = fineness_breakpoints(&t, &f).unwrap();
    let splits = bp.get(&1).expect("open interval (0,4) must be split");
    assert!(splits.contains(&rat(2)), "splits: {splits:?}");
}

#[test]
fn make_fine_produces_fine_traces() {
    for text in ["G[<=1] p", "p U[<=4] q", "F[<=3]((G[<=1] p) & (F[<2] q))"] {
        let f = to_pnf(&parse_mitl(text).unwrap());
        let t = example_one();
        let fine = make_fine(&t, &f).unwrap();
        assert!(is_fine(&fine, &f).unwrap(), "not fine for {text}");
        // refinement preserves satisfaction
        assert_eq!(
            evaluate_at(&t, &f, &Point::origin()).unwrap(),
            evaluate_at(&fine, &f, &Point::origin()).unwrap(),
        );
    }
}

// ---- refinement mechanics ----

#[test]
fn refine_examples() {
    let t = example_one();
    // empty split map: identical
    assert_eq!(refine_trace(&t, &BTreeMap::new()).unwrap(), t);
    // split (0,4) at {1,2}: five pieces
    let mut splits = BTreeMap::new();
    splits.insert(1usize, vec![rat(1), rat(2)]);
    let r = refine_trace(&t, &splits).unwrap();
    assert_eq!(r.prefix.len(), t.prefix.len() + 4);
    assert_eq!(r.prefix[1].interval, Interval::Open(rat(0), rat(1)));
    assert_eq!(r.prefix[2].interval, Interval::Singleton(rat(1)));
    assert_eq!(r.prefix[5].interval, Interval::Open(rat(2), rat(4)));
    r.validate().unwrap();
}

#[test]
fn refine_rejects_bad_splits() {
    let t = example_one();
    let mut on_singleton = BTreeMap::new();
    on_singleton.insert(0usize, vec![rat(0)]);
    assert!(refine_trace(&t, &on_singleton).is_err());
    let mut outside = BTreeMap::new();
    outside.insert(1usize, vec![rat(4)]);
    assert!(refine_trace(&t, &outside).is_err());
}

#[test]
fn loop_interval_refinement_keeps_structure() {
    let t = example_one();
    let mut splits = BTreeMap::new();
    // loop template interval (4,5) is fundamental index 6
    splits.insert(6usize, vec![ratq(9, 2)]);
    let r = refine_trace(&t, &splits).unwrap();
    assert_eq!(r.loop_steps.len(), t.loop_steps.len() + 2);
    r.validate().unwrap();
    // same satisfaction
    for text in ["F q", "G F p", "F[<=4] q"] {
        let f = to_pnf(&parse_mitl(text).unwrap());
        assert_eq!(
            evaluate_at(&t, &f, &Point::origin()).unwrap(),
            evaluate_at(&r, &f, &Point::origin()).unwrap(),
            "{text}"
        );
    }
}

// ---- file format ----

#[test]
fn trace_text_round_trip_is_exact() {
    let t = example_two();
    let text = t.to_text();
    let back = SuperDenseTrace::from_text(&text).unwrap();
    assert_eq!(t, back);
    assert_eq!(back.to_text(), text);
}

#[test]
fn trace_text_accepts_decimals_and_fractions() {
    let text = "prefix:\n[0,0] {p}\n(0,0.5) {p}\n[1/2,0.5] {}\nloop: shift=1\n(1/2,3/2) {}\n[3/2,3/2] {q}\n";
    let t = SuperDenseTrace::from_text(text).unwrap();
    assert_eq!(t.prefix[1].interval, Interval::Open(rat(0), ratq(1, 2)));
    assert_eq!(t.loop_steps[1].props, props(&["q"]));
}

#[test]
fn trace_text_rejects_garbage() {
    assert!(SuperDenseTrace::from_text("loop: shift=1\n[0,0] {}\n").is_err());
    assert!(SuperDenseTrace::from_text("prefix:\n[0,1] {}\nloop: shift=1\n").is_err());
    assert!(SuperDenseTrace::from_text("prefix:\n[0,0] {}\nloop: shift=0\n(0,1) {}\n").is_err());
}

#[test]
fn structural_validation() {
    // adjacency violation: open interval followed by open interval
    assert!(SuperDenseTrace::new(
        vec![singleton(0, &[]), open(0, 1, &[]), open(1, 2, &[])],
        vec![singleton(2, &[])],
        rat(1),
    )
    .is_err());
    // shift must match the loop's time advance
    assert!(SuperDenseTrace::new(
        vec![singleton(0, &[])],
        vec![open(0, 1, &[]), singleton(1, &[])],
        rat(2),
    )
    .is_err());
}
