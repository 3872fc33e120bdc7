//! The SMT engine: declarations, scoped assertions, CNF conversion, check-sat
//! and model queries, driven by parsed SMT-LIB2 commands.

use crate::rational::{format_smt_rat, parse_decimal, Rat};
use crate::sexpr::Sexpr;
use crate::simplex::TVar;
use crate::term::{normalize_rel, LinAtom, LinExpr, Rel, Term};
use crate::theory::{AtomBounds, LraTheory};
use batsat::{lbool, BasicCallbacks, Lit, Solver, SolverInterface, SolverOpts, Var};
use num_traits::Zero;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatResult {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    /// Command produced no answer (prints "success" unless disabled).
    Ack,
    Answer(String),
    Error(String),
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sort {
    Bool,
    Real,
}

#[derive(Debug, Clone)]
enum Decl {
    Bool(u32),
    Real(TVar),
}

#[derive(Default, Clone)]
pub struct Model {
    pub bools: HashMap<String, bool>,
    pub reals: HashMap<String, Rat>,
}

pub struct Engine {
    sat: Solver<BasicCallbacks>,
    theory: LraTheory,
    decls: HashMap<String, Decl>,
    decl_order: Vec<String>,
    /// engine-level bool var table: index -> sat var
    bool_vars: Vec<Var>,
    /// canonical linear form -> simplex variable carrying its value
    slacks: HashMap<Vec<(TVar, Rat)>, TVar>,
    /// canonical atom -> sat var standing for it
    atom_vars: HashMap<LinAtom, Var>,
    /// tseitin definitions already introduced
    defs: HashMap<Term, Lit>,
    lit_true: Lit,
    scopes: Vec<Lit>,
    print_success: bool,
    model: Option<Model>,
    last_result: Option<SatResult>,
    pub stats_checks: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new()
    }
}

impl Engine {
    pub fn new() -> Self {
        let mut sat = Solver::new(SolverOpts::default(), BasicCallbacks::new());
        let vt = sat.new_var_default();
        let lit_true = Lit::new(vt, true);
        sat.add_clause_reuse(&mut vec![lit_true]);
        Engine {
            sat,
            theory: LraTheory::new(),
            decls: HashMap::new(),
            decl_order: Vec::new(),
            bool_vars: Vec::new(),
            slacks: HashMap::new(),
            atom_vars: HashMap::new(),
            defs: HashMap::new(),
            lit_true,
            scopes: Vec::new(),
            print_success: true,
            model: None,
            last_result: None,
            stats_checks: 0,
        }
    }

    pub fn print_success(&self) -> bool {
        self.print_success
    }

    pub fn exec(&mut self, cmd: &Sexpr) -> Response {
        match self.exec_inner(cmd) {
            Ok(r) => r,
            Err(e) => Response::Error(e),
        }
    }

    fn exec_inner(&mut self, cmd: &Sexpr) -> Result<Response, String> {
        let items = cmd.as_list().ok_or("expected a command list")?;
        let head = items
            .first()
            .and_then(|h| h.as_sym())
            .ok_or("expected a command name")?;
        match head {
            "set-option" => {
                if let (Some(Sexpr::Keyword(k)), Some(v)) = (items.get(1), items.get(2)) {
                    if k == "print-success" {
                        self.print_success = v.as_sym() == Some("true");
                    }
                }
                Ok(Response::Ack)
            }
            "set-logic" | "set-info" => Ok(Response::Ack),
            "declare-fun" => {
                let name = items
                    .get(1)
                    .and_then(|s| s.as_sym())
                    .ok_or("declare-fun: missing name")?;
                let args = items
                    .get(2)
                    .and_then(|s| s.as_list())
                    .ok_or("declare-fun: missing argument list")?;
                if !args.is_empty() {
                    return Err("only constants are supported".into());
                }
                let sort = items.get(3).ok_or("declare-fun: missing sort")?;
                self.declare(name, sort)?;
                Ok(Response::Ack)
            }
            "declare-const" => {
                let name = items
                    .get(1)
                    .and_then(|s| s.as_sym())
                    .ok_or("declare-const: missing name")?;
                let sort = items.get(2).ok_or("declare-const: missing sort")?;
                self.declare(name, sort)?;
                Ok(Response::Ack)
            }
            "assert" => {
                let t = items.get(1).ok_or("assert: missing term")?;
                let term = self.parse_bool_term(t)?;
                self.assert_term(&term);
                Ok(Response::Ack)
            }
            "push" => {
                let n = Self::opt_count(items)?;
                for _ in 0..n {
                    let v = self.sat.new_var_default();
                    self.scopes.push(Lit::new(v, true));
                }
                Ok(Response::Ack)
            }
            "pop" => {
                let n = Self::opt_count(items)?;
                if n > self.scopes.len() {
                    return Err("pop: scope stack underflow".into());
                }
                for _ in 0..n {
                    let act = self.scopes.pop().unwrap();
                    // permanently disable every clause guarded by this scope
                    self.sat.add_clause_reuse(&mut vec![!act]);
                }
                Ok(Response::Ack)
            }
            "check-sat" => {
                let r = self.check_sat();
                let s = match r {
                    SatResult::Sat => "sat",
                    SatResult::Unsat => "unsat",
                    SatResult::Unknown => "unknown",
                };
                Ok(Response::Answer(s.to_string()))
            }
            "get-value" => {
                let args = items
                    .get(1)
                    .and_then(|s| s.as_list())
                    .ok_or("get-value: missing term list")?;
                self.get_value(args).map(Response::Answer)
            }
            "get-model" => {
                let model = self
                    .model
                    .as_ref()
                    .ok_or("get-model: no model available")?;
                let mut out = String::from("(");
                for name in &self.decl_order {
                    match self.decls[name] {
                        Decl::Bool(_) => {
                            let v = model.bools.get(name).copied().unwrap_or(false);
                            out.push_str(&format!("(define-fun {name} () Bool {v})"));
                        }
                        Decl::Real(_) => {
                            let v = model.reals.get(name).cloned().unwrap_or_else(Rat::zero);
                            out.push_str(&format!(
                                "(define-fun {name} () Real {})",
                                format_smt_rat(&v)
                            ));
                        }
                    }
                }
                out.push(')');
                Ok(Response::Answer(out))
            }
            "echo" => {
                if let Some(Sexpr::StringLit(s)) = items.get(1) {
                    Ok(Response::Answer(format!("\"{s}\"")))
                } else {
                    Err("echo: expected a string".into())
                }
            }
            "exit" => Ok(Response::Exit),
            other => Err(format!("unsupported command {other}")),
        }
    }

    fn opt_count(items: &[Sexpr]) -> Result<usize, String> {
        match items.get(1) {
            None => Ok(1),
            Some(Sexpr::Num(n)) => n.parse().map_err(|_| "bad numeral".to_string()),
            Some(_) => Err("expected a numeral".into()),
        }
    }

    fn declare(&mut self, name: &str, sort: &Sexpr) -> Result<(), String> {
        let sort = match sort.as_sym() {
            Some("Bool") => Sort::Bool,
            Some("Real") => Sort::Real,
            _ => return Err(format!("unsupported sort {sort}")),
        };
        if self.decls.contains_key(name) {
            return Err(format!("{name} is already declared"));
        }
        let decl = match sort {
            Sort::Bool => {
                let sv = self.sat.new_var_default();
                let idx = self.bool_vars.len() as u32;
                self.bool_vars.push(sv);
                Decl::Bool(idx)
            }
            Sort::Real => Decl::Real(self.theory.simplex.new_var()),
        };
        self.decls.insert(name.to_string(), decl);
        self.decl_order.push(name.to_string());
        Ok(())
    }

    // ---- term parsing ----

    fn parse_bool_term(&mut self, s: &Sexpr) -> Result<Term, String> {
        match self.parse_term(s)? {
            Parsed::Bool(t) => Ok(t),
            Parsed::Real(_) => Err(format!("expected Bool term, got arithmetic: {s}")),
        }
    }

    fn parse_term(&mut self, s: &Sexpr) -> Result<Parsed, String> {
        match s {
            Sexpr::Sym(name) => match name.as_str() {
                "true" => Ok(Parsed::Bool(Term::BoolConst(true))),
                "false" => Ok(Parsed::Bool(Term::BoolConst(false))),
                _ => match self.decls.get(name) {
                    Some(Decl::Bool(i)) => Ok(Parsed::Bool(Term::BoolVar(*i))),
                    Some(Decl::Real(v)) => Ok(Parsed::Real(LinExpr::var(*v))),
                    None => Err(format!("undeclared symbol {name}")),
                },
            },
            Sexpr::Num(n) => {
                let r = parse_decimal(n).ok_or_else(|| format!("bad numeral {n}"))?;
                Ok(Parsed::Real(LinExpr::constant(r)))
            }
            Sexpr::List(items) if !items.is_empty() => {
                let head = items[0]
                    .as_sym()
                    .ok_or_else(|| format!("expected operator, got {}", items[0]))?;
                match head {
                    "!" => {
                        // attributed term (names are accepted and ignored)
                        self.parse_term(items.get(1).ok_or("missing attributed term")?)
                    }
                    "not" => {
                        let t = self.parse_bool_arg(items, 1)?;
                        Ok(Parsed::Bool(Term::Not(Box::new(t))))
                    }
                    "and" => {
                        let ts = self.parse_bool_args(&items[1..])?;
                        Ok(Parsed::Bool(Term::And(ts)))
                    }
                    "or" => {
                        let ts = self.parse_bool_args(&items[1..])?;
                        Ok(Parsed::Bool(Term::Or(ts)))
                    }
                    "=>" => {
                        let ts = self.parse_bool_args(&items[1..])?;
                        if ts.len() < 2 {
                            return Err("=> needs at least two arguments".into());
                        }
                        // a => b => c  is  a => (b => c)
                        let mut out = ts.last().unwrap().clone();
                        for t in ts[..ts.len() - 1].iter().rev() {
                            out = Term::Or(vec![Term::Not(Box::new(t.clone())), out]);
                        }
                        Ok(Parsed::Bool(out))
                    }
                    "+" | "-" | "*" | "/" => self.parse_arith(head, &items[1..]).map(Parsed::Real),
                    "<" | "<=" | ">" | ">=" => {
                        let rel = match head {
                            "<" => Rel::Lt,
                            "<=" => Rel::Le,
                            ">" => Rel::Gt,
                            _ => Rel::Ge,
                        };
                        if items.len() < 3 {
                            return Err(format!("{head}: needs two arguments"));
                        }
                        // chainable: (< a b c) means a<b and b<c
                        let mut parts = Vec::new();
                        for w in items[1..].windows(2) {
                            let a = self.parse_real_arg(&w[0])?;
                            let b = self.parse_real_arg(&w[1])?;
                            parts.push(self.relation(a.sub(&b), rel));
                        }
                        Ok(Parsed::Bool(if parts.len() == 1 {
                            parts.pop().unwrap()
                        } else {
                            Term::And(parts)
                        }))
                    }
                    "=" => {
                        if items.len() < 3 {
                            return Err("=: needs two arguments".into());
                        }
                        let first = self.parse_term(&items[1])?;
                        match first {
                            Parsed::Bool(b0) => {
                                let mut parts = Vec::new();
                                let mut prev = b0;
                                for it in &items[2..] {
                                    let b = self.parse_bool_term(it)?;
                                    parts.push(iff(prev.clone(), b.clone()));
                                    prev = b;
                                }
                                Ok(Parsed::Bool(Term::And(parts)))
                            }
                            Parsed::Real(e0) => {
                                let mut parts = Vec::new();
                                let mut prev = e0;
                                for it in &items[2..] {
                                    let e = self.parse_real_arg(it)?;
                                    parts.push(self.relation(prev.clone().sub(&e), Rel::Le));
                                    parts.push(self.relation(prev.sub(&e), Rel::Ge));
                                    prev = e;
                                }
                                Ok(Parsed::Bool(Term::And(parts)))
                            }
                        }
                    }
                    other => Err(format!("unsupported operator {other}")),
                }
            }
            _ => Err(format!("cannot parse term {s}")),
        }
    }

    fn parse_bool_arg(&mut self, items: &[Sexpr], i: usize) -> Result<Term, String> {
        self.parse_bool_term(items.get(i).ok_or("missing argument")?)
    }

    fn parse_bool_args(&mut self, items: &[Sexpr]) -> Result<Vec<Term>, String> {
        items.iter().map(|s| self.parse_bool_term(s)).collect()
    }

    fn parse_real_arg(&mut self, s: &Sexpr) -> Result<LinExpr, String> {
        match self.parse_term(s)? {
            Parsed::Real(e) => Ok(e),
            Parsed::Bool(_) => Err(format!("expected Real term: {s}")),
        }
    }

    fn parse_arith(&mut self, op: &str, args: &[Sexpr]) -> Result<LinExpr, String> {
        let parsed: Result<Vec<LinExpr>, String> =
            args.iter().map(|a| self.parse_real_arg(a)).collect();
        let parsed = parsed?;
        if parsed.is_empty() {
            return Err(format!("{op}: missing arguments"));
        }
        match op {
            "+" => Ok(parsed
                .into_iter()
                .reduce(|a, b| a.add(&b))
                .unwrap()),
            "-" => {
                if parsed.len() == 1 {
                    Ok(parsed[0].clone().scale(&-Rat::from_integer(1.into())))
                } else {
                    let mut it = parsed.into_iter();
                    let first = it.next().unwrap();
                    Ok(it.fold(first, |a, b| a.sub(&b)))
                }
            }
            "*" => {
                let mut konst = Rat::from_integer(1.into());
                let mut var_part: Option<LinExpr> = None;
                for e in parsed {
                    if e.terms.is_empty() {
                        konst *= &e.konst;
                    } else if var_part.is_none() {
                        var_part = Some(e);
                    } else {
                        return Err("nonlinear multiplication".into());
                    }
                }
                Ok(match var_part {
                    Some(e) => e.scale(&konst),
                    None => LinExpr::constant(konst),
                })
            }
            "/" => {
                if parsed.len() != 2 {
                    return Err("/: needs two arguments".into());
                }
                let d = &parsed[1];
                if !d.terms.is_empty() || d.konst.is_zero() {
                    return Err("division by non-constant or zero".into());
                }
                Ok(parsed[0]
                    .clone()
                    .scale(&(Rat::from_integer(1.into()) / &d.konst)))
            }
            _ => unreachable!(),
        }
    }

    fn relation(&mut self, diff: LinExpr, rel: Rel) -> Term {
        match normalize_rel(diff, rel) {
            Err(b) => Term::BoolConst(b),
            Ok((atom, positive)) => {
                let t = Term::Atom(atom);
                if positive {
                    t
                } else {
                    Term::Not(Box::new(t))
                }
            }
        }
    }

    // ---- CNF ----

    fn atom_sat_var(&mut self, atom: &LinAtom) -> Var {
        if let Some(v) = self.atom_vars.get(atom) {
            return *v;
        }
        let tvar = if atom.form.len() == 1 && atom.form[0].1 == Rat::from_integer(1.into()) {
            atom.form[0].0
        } else {
            match self.slacks.get(&atom.form) {
                Some(s) => *s,
                None => {
                    let s = self.theory.simplex.new_slack(&atom.form);
                    self.slacks.insert(atom.form.clone(), s);
                    s
                }
            }
        };
        let v = self.sat.new_var_default();
        self.theory.set_atom(
            v.idx() as usize,
            AtomBounds {
                var: tvar,
                bound: atom.bound.clone(),
                strict: atom.strict,
            },
        );
        self.atom_vars.insert(atom.clone(), v);
        v
    }

    /// Literal equivalent to the term (tseitin definitions are unguarded and
    /// shared across scopes).
    fn cnf_lit(&mut self, t: &Term) -> Lit {
        match t {
            Term::BoolConst(true) => self.lit_true,
            Term::BoolConst(false) => !self.lit_true,
            Term::BoolVar(i) => Lit::new(self.bool_vars[*i as usize], true),
            Term::Atom(a) => Lit::new(self.atom_sat_var(a), true),
            Term::Not(inner) => !self.cnf_lit(inner),
            Term::And(_) | Term::Or(_) => {
                if let Some(l) = self.defs.get(t) {
                    return *l;
                }
                let (lits, conj): (Vec<Lit>, bool) = match t {
                    Term::And(ts) => (ts.iter().map(|x| self.cnf_lit(x)).collect(), true),
                    Term::Or(ts) => (ts.iter().map(|x| self.cnf_lit(x)).collect(), false),
                    _ => unreachable!(),
                };
                let d = Lit::new(self.sat.new_var_default(), true);
                if conj {
                    // d <-> l1 & ... & ln
                    let mut all = vec![d];
                    for l in &lits {
                        self.sat.add_clause_reuse(&mut vec![!d, *l]);
                        all.push(!*l);
                    }
                    self.sat.add_clause_reuse(&mut all);
                } else {
                    let mut all = vec![!d];
                    for l in &lits {
                        self.sat.add_clause_reuse(&mut vec![d, !*l]);
                        all.push(*l);
                    }
                    self.sat.add_clause_reuse(&mut all);
                }
                self.defs.insert(t.clone(), d);
                d
            }
        }
    }

    fn assert_term(&mut self, t: &Term) {
        // clausify the top-level conjunctive structure directly, guarding each
        // clause with the active scope's activation literal
        let guard = self.scopes.last().copied();
        match t {
            Term::And(ts) => {
                for x in ts {
                    self.assert_term(x);
                }
            }
            Term::Or(ts) => {
                let mut clause: Vec<Lit> = ts.iter().map(|x| self.cnf_lit(x)).collect();
                if let Some(g) = guard {
                    clause.push(!g);
                }
                self.sat.add_clause_reuse(&mut clause);
            }
            other => {
                let l = self.cnf_lit(other);
                let mut clause = vec![l];
                if let Some(g) = guard {
                    clause.push(!g);
                }
                self.sat.add_clause_reuse(&mut clause);
            }
        }
    }

    // ---- solving ----

    pub fn check_sat(&mut self) -> SatResult {
        self.stats_checks += 1;
        let assumps: Vec<Lit> = self.scopes.clone();
        let res = self
            .sat
            .solve_limited_preserving_trail_th(&mut self.theory, &assumps);
        let out = if res == lbool::TRUE {
            // snapshot the model before the trail unwinds
            let mut model = Model::default();
            let concrete = self.theory.simplex.concrete_model();
            for name in &self.decl_order {
                match &self.decls[name] {
                    Decl::Bool(i) => {
                        let sv = self.bool_vars[*i as usize];
                        let val = self.sat.raw_value_lit(Lit::new(sv, true)) == lbool::TRUE;
                        model.bools.insert(name.clone(), val);
                    }
                    Decl::Real(tv) => {
                        model
                            .reals
                            .insert(name.clone(), concrete[*tv as usize].clone());
                    }
                }
            }
            self.model = Some(model);
            SatResult::Sat
        } else if res == lbool::FALSE {
            self.model = None;
            SatResult::Unsat
        } else {
            self.model = None;
            SatResult::Unknown
        };
        self.sat.pop_model(&mut self.theory);
        self.last_result = Some(out);
        out
    }

    pub fn model(&self) -> Option<&Model> {
        self.model.as_ref()
    }

    fn get_value(&self, args: &[Sexpr]) -> Result<String, String> {
        let model = self
            .model
            .as_ref()
            .ok_or("get-value: no model available (last check was not sat)")?;
        let mut out = String::from("(");
        for (i, a) in args.iter().enumerate() {
            let name = a
                .as_sym()
                .ok_or_else(|| format!("get-value: only symbols are supported, got {a}"))?;
            let val = match self.decls.get(name) {
                Some(Decl::Bool(_)) => model
                    .bools
                    .get(name)
                    .map(|b| b.to_string())
                    .unwrap_or_else(|| "false".to_string()),
                Some(Decl::Real(_)) => {
                    let r = model.reals.get(name).cloned().unwrap_or_else(Rat::zero);
                    format_smt_rat(&r)
                }
                None => return Err(format!("get-value: undeclared symbol {name}")),
            };
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&format!("({name} {val})"));
        }
        out.push(')');
        Ok(out)
    }
}

enum Parsed {
    Bool(Term),
    Real(LinExpr),
}

fn iff(a: Term, b: Term) -> Term {
    Term::And(vec![
        Term::Or(vec![Term::Not(Box::new(a.clone())), b.clone()]),
        Term::Or(vec![Term::Not(Box::new(b)), a]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexpr::parse_all;

    fn run(engine: &mut Engine, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for cmd in parse_all(text).unwrap() {
            match engine.exec(&cmd) {
                Response::Answer(s) => out.push(s),
                Response::Error(e) => panic!("error on {cmd}: {e}"),
                _ => {}
            }
        }
        out
    }

    #[test]
    fn sat_and_model() {
        let mut e = Engine::new();
        let out = run(
            &mut e,
            "(declare-fun x () Real)(declare-fun b () Bool)\
             (assert (and b (> x 1) (< x 2)))(check-sat)(get-value (x b))",
        );
        assert_eq!(out[0], "sat");
        assert!(out[1].contains("(b true)"));
        let m = e.model().unwrap();
        let x = m.reals.get("x").unwrap();
        assert!(*x > crate::rational::rat_int(1) && *x < crate::rational::rat_int(2));
    }

    #[test]
    fn unsat_strict_gap() {
        let mut e = Engine::new();
        let out = run(
            &mut e,
            "(declare-fun x () Real)(declare-fun y () Real)\
             (assert (<= x y))(assert (< y x))(check-sat)",
        );
        assert_eq!(out[0], "unsat");
    }

    #[test]
    fn push_pop_scopes() {
        let mut e = Engine::new();
        let out = run(
            &mut e,
            "(declare-fun x () Real)(assert (>= x 0))\
             (push 1)(assert (< x 0))(check-sat)(pop 1)(check-sat)",
        );
        assert_eq!(out, vec!["unsat", "sat"]);
    }

    #[test]
    fn equality_and_arith() {
        let mut e = Engine::new();
        let out = run(
            &mut e,
            "(declare-fun x () Real)(declare-fun y () Real)\
             (assert (= (+ x (* 2 y)) 7))(assert (= x 1))(check-sat)(get-value (y))",
        );
        assert_eq!(out[0], "sat");
        assert_eq!(out[1], "((y 3.0))");
    }

    #[test]
    fn boolean_structure() {
        let mut e = Engine::new();
        let out = run(
            &mut e,
            "(declare-fun a () Bool)(declare-fun b () Bool)\
             (assert (or (and a (not b)) (and (not a) b)))\
             (assert (= a b))(check-sat)",
        );
        assert_eq!(out[0], "unsat");
    }

    #[test]
    fn delta_chain_over_steps() {
        // tiny fragment in the shape the model checker emits
        let mut e = Engine::new();
        let out = run(
            &mut e,
            "(declare-fun c@0 () Real)(declare-fun c@1 () Real)(declare-fun d@0 () Real)\
             (assert (>= c@0 0.0))(assert (>= d@0 0.0))\
             (assert (= c@1 (+ c@0 d@0)))(assert (< c@1 3))(assert (> d@0 3))(check-sat)",
        );
        assert_eq!(out[0], "unsat");
    }

    #[test]
    fn named_assertions_ignored() {
        let mut e = Engine::new();
        let out = run(
            &mut e,
            "(declare-fun x () Real)(assert (! (> x 0) :named g0))(check-sat)",
        );
        assert_eq!(out[0], "sat");
    }
}
