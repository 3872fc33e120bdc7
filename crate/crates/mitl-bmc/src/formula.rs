//! MITL formulas with one-sided time bounds over super-dense time: parsing,
//! positive normal form, and the rewriting of upper-bound until/release into
//! simpler operators.

use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Bound relation carried by a temporal operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Ge,
    Gt,
}

impl Rel {
    pub fn is_upper(self) -> bool {
        matches!(self, Rel::Lt | Rel::Le)
    }

    /// Does `value ⋈ n` hold?
    pub fn holds<T: PartialOrd>(self, value: &T, n: &T) -> bool {
        match self {
            Rel::Lt => value < n,
            Rel::Le => value <= n,
            Rel::Ge => value >= n,
            Rel::Gt => value > n,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        };
        write!(f, "{s}")
    }
}

/// Formula AST. Untimed operators are the canonical `rel = >=, n = 0` cases.
/// `Not` appears only before normalization; [`to_pnf`] removes it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    NegAtom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Until(Rel, u32, Box<Formula>, Box<Formula>),
    Release(Rel, u32, Box<Formula>, Box<Formula>),
    Finally(Rel, u32, Box<Formula>),
    Globally(Rel, u32, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn neg_atom(name: &str) -> Formula {
        Formula::NegAtom(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn until(rel: Rel, n: u32, l: Formula, r: Formula) -> Formula {
        Formula::Until(rel, n, Box::new(l), Box::new(r))
    }

    pub fn release(rel: Rel, n: u32, l: Formula, r: Formula) -> Formula {
        Formula::Release(rel, n, Box::new(l), Box::new(r))
    }

    pub fn finally(rel: Rel, n: u32, f: Formula) -> Formula {
        Formula::Finally(rel, n, Box::new(f))
    }

    pub fn globally(rel: Rel, n: u32, f: Formula) -> Formula {
        Formula::Globally(rel, n, Box::new(f))
    }

    /// Untimed strict until.
    pub fn until_s(l: Formula, r: Formula) -> Formula {
        Formula::until(Rel::Ge, 0, l, r)
    }

    /// Untimed strict release.
    pub fn release_s(l: Formula, r: Formula) -> Formula {
        Formula::release(Rel::Ge, 0, l, r)
    }

    pub fn finally_s(f: Formula) -> Formula {
        Formula::finally(Rel::Ge, 0, f)
    }

    pub fn globally_s(f: Formula) -> Formula {
        Formula::globally(Rel::Ge, 0, f)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => vec![],
            Formula::Not(a) | Formula::Finally(_, _, a) | Formula::Globally(_, _, a) => {
                vec![a]
            }
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
            Formula::Until(_, _, a, b) | Formula::Release(_, _, a, b) => vec![a, b],
        }
    }

    pub fn is_pnf(&self) -> bool {
        !matches!(self, Formula::Not(_)) && self.children().iter().all(|c| c.is_pnf())
    }

    /// Largest time bound occurring in the formula.
    pub fn max_bound(&self) -> u32 {
        let own = match self {
            Formula::Until(_, n, _, _)
            | Formula::Release(_, n, _, _)
            | Formula::Finally(_, n, _)
            | Formula::Globally(_, n, _) => *n,
            _ => 0,
        };
        self.children()
            .iter()
            .map(|c| c.max_bound())
            .fold(own, u32::max)
    }

    /// Number of timed until/release operators (bounds other than `>= 0`).
    pub fn timed_op_count(&self) -> usize {
        let own = match self {
            Formula::Until(rel, n, _, _)
            | Formula::Release(rel, n, _, _)
            | Formula::Finally(rel, n, _)
            | Formula::Globally(rel, n, _) => usize::from(!(matches!(rel, Rel::Ge) && *n == 0)),
            _ => 0,
        };
        own + self
            .children()
            .iter()
            .map(|c| c.timed_op_count())
            .sum::<usize>()
    }

    pub fn atom_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(p) | Formula::NegAtom(p) => out.push(p.clone()),
            _ => {
                for c in self.children() {
                    c.collect_atoms(out);
                }
            }
        }
    }
}

fn untimed(rel: Rel, n: u32) -> bool {
    rel == Rel::Ge && n == 0
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // fully parenthesized except leaves; round-trips through the parser
        fn bound(rel: Rel, n: u32) -> String {
            if untimed(rel, n) {
                String::new()
            } else {
                format!("[{rel}{n}]")
            }
        }
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Atom(p) => write!(f, "{p}"),
            Formula::NegAtom(p) => write!(f, "!{p}"),
            Formula::Not(a) => write!(f, "!({a})"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Until(rel, n, a, b) => write!(f, "({a} U{} {b})", bound(*rel, *n)),
            Formula::Release(rel, n, a, b) => write!(f, "({a} R{} {b})", bound(*rel, *n)),
            Formula::Finally(rel, n, a) => write!(f, "F{}({a})", bound(*rel, *n)),
            Formula::Globally(rel, n, a) => write!(f, "G{}({a})", bound(*rel, *n)),
        }
    }
}

/// Push negations down to atoms using the operator dualities.
pub fn to_pnf(f: &Formula) -> Formula {
    fn go(f: &Formula, neg: bool) -> Formula {
        match f {
            Formula::True => {
                if neg {
                    Formula::False
                } else {
                    Formula::True
                }
            }
            Formula::False => {
                if neg {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            Formula::Atom(p) => {
                if neg {
                    Formula::NegAtom(p.clone())
                } else {
                    Formula::Atom(p.clone())
                }
            }
            Formula::NegAtom(p) => {
                if neg {
                    Formula::Atom(p.clone())
                } else {
                    Formula::NegAtom(p.clone())
                }
            }
            Formula::Not(a) => go(a, !neg),
            Formula::And(a, b) => {
                if neg {
                    Formula::or(go(a, true), go(b, true))
                } else {
                    Formula::and(go(a, false), go(b, false))
                }
            }
            Formula::Or(a, b) => {
                if neg {
                    Formula::and(go(a, true), go(b, true))
                } else {
                    Formula::or(go(a, false), go(b, false))
                }
            }
            Formula::Until(rel, n, a, b) => {
                if neg {
                    Formula::release(*rel, *n, go(a, true), go(b, true))
                } else {
                    Formula::until(*rel, *n, go(a, false), go(b, false))
                }
            }
            Formula::Release(rel, n, a, b) => {
                if neg {
                    Formula::until(*rel, *n, go(a, true), go(b, true))
                } else {
                    Formula::release(*rel, *n, go(a, false), go(b, false))
                }
            }
            Formula::Finally(rel, n, a) => {
                if neg {
                    Formula::globally(*rel, *n, go(a, true))
                } else {
                    Formula::finally(*rel, *n, go(a, false))
                }
            }
            Formula::Globally(rel, n, a) => {
                if neg {
                    Formula::finally(*rel, *n, go(a, true))
                } else {
                    Formula::globally(*rel, *n, go(a, false))
                }
            }
        }
    }
    go(f, false)
}

/// Replace upper-bound binary untils and releases by combinations of the
/// timed unary operators and the untimed binary ones:
/// `a U[<n] b` becomes `(F[<n] b) & (a U b)` and
/// `a R[<n] b` becomes `(G[<n] b) | (a R b)`.
///
/// Lower-bound operators and the unary F/G forms are kept as they are.
pub fn rewrite_upper_until(f: &Formula) -> Formula {
    match f {
        Formula::Until(rel, n, a, b) if rel.is_upper() => {
            let a = rewrite_upper_until(a);
            let b = rewrite_upper_until(b);
            Formula::and(
                Formula::finally(*rel, *n, b.clone()),
                Formula::until_s(a, b),
            )
        }
        Formula::Release(rel, n, a, b) if rel.is_upper() => {
            let a = rewrite_upper_until(a);
            let b = rewrite_upper_until(b);
            Formula::or(
                Formula::globally(*rel, *n, b.clone()),
                Formula::release_s(a, b),
            )
        }
        Formula::Until(rel, n, a, b) => {
            Formula::until(*rel, *n, rewrite_upper_until(a), rewrite_upper_until(b))
        }
        Formula::Release(rel, n, a, b) => {
            Formula::release(*rel, *n, rewrite_upper_until(a), rewrite_upper_until(b))
        }
        Formula::And(a, b) => Formula::and(rewrite_upper_until(a), rewrite_upper_until(b)),
        Formula::Or(a, b) => Formula::or(rewrite_upper_until(a), rewrite_upper_until(b)),
        Formula::Not(a) => Formula::Not(Box::new(rewrite_upper_until(a))),
        Formula::Finally(rel, n, a) => Formula::finally(*rel, *n, rewrite_upper_until(a)),
        Formula::Globally(rel, n, a) => Formula::globally(*rel, *n, rewrite_upper_until(a)),
        leaf => leaf.clone(),
    }
}

/// Deduplicated children-first listing of all subformulas; the root is last.
#[derive(Debug, Clone)]
pub struct SubformulaTable {
    pub entries: Vec<Formula>,
    index: HashMap<Formula, usize>,
}

impl SubformulaTable {
    pub fn build(root: &Formula) -> SubformulaTable {
        let mut t = SubformulaTable {
            entries: Vec::new(),
            index: HashMap::new(),
        };
        t.visit(root);
        t
    }

    fn visit(&mut self, f: &Formula) -> usize {
        if let Some(i) = self.index.get(f) {
            return *i;
        }
        for c in f.children() {
            self.visit(c);
        }
        let i = self.entries.len();
        self.entries.push(f.clone());
        self.index.insert(f.clone(), i);
        i
    }

    pub fn index_of(&self, f: &Formula) -> Option<usize> {
        self.index.get(f).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn root_index(&self) -> usize {
        self.entries.len() - 1
    }
}

// ---- parsing ----

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: u32, col: u32, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Bang,
    Amp,
    Pipe,
    LPar,
    RPar,
    /// `[rel n]` bound annotation attached to a temporal operator
    Bound(Rel, u32),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

type Spanned = (Tok, u32, u32);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'!' => {
                    self.bump();
                    out.push((Tok::Bang, line, col));
                }
                b'&' => {
                    self.bump();
                    out.push((Tok::Amp, line, col));
                }
                b'|' => {
                    self.bump();
                    out.push((Tok::Pipe, line, col));
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LPar, line, col));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RPar, line, col));
                }
                b'[' => {
                    self.bump();
                    let rel = match self.peek() {
                        Some(b'<') => {
                            self.bump();
                            if self.peek() == Some(b'=') {
                                self.bump();
                                Rel::Le
                            } else {
                                Rel::Lt
                            }
                        }
                        Some(b'>') => {
                            self.bump();
                            if self.peek() == Some(b'=') {
                                self.bump();
                                Rel::Ge
                            } else {
                                Rel::Gt
                            }
                        }
                        _ => return Err(self.err("expected relation after '['")),
                    };
                    while self.peek() == Some(b' ') {
                        self.bump();
                    }
                    let mut digits = String::new();
                    while let Some(d) = self.peek() {
                        if d.is_ascii_digit() {
                            digits.push(d as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if digits.is_empty() {
                        if self.peek() == Some(b'-') {
                            return Err(self.err("time bounds must be non-negative"));
                        }
                        return Err(self.err("expected a number in the time bound"));
                    }
                    let n: u32 = digits
                        .parse()
                        .map_err(|_| self.err("time bound out of range"))?;
                    if self.peek() == Some(b'.') {
                        return Err(self.err("rational time bounds are not supported"));
                    }
                    if self.peek() != Some(b']') {
                        return Err(self.err("expected ']' after the time bound"));
                    }
                    self.bump();
                    out.push((Tok::Bound(rel, n), line, col));
                }
                c if c == b'_' || c.is_ascii_alphabetic() => {
                    let mut s = String::new();
                    while let Some(d) = self.peek() {
                        if d == b'_' || d == b'.' || d.is_ascii_alphanumeric() {
                            s.push(d as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    out.push((Tok::Ident(s), line, col));
                }
                other => {
                    return Err(self.err(format!("unexpected character {:?}", other as char)))
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = match self.toks.get(self.pos) {
            Some((_, l, c)) => (*l, *c),
            None => self
                .toks
                .last()
                .map(|(_, l, c)| (*l, *c + 1))
                .unwrap_or((1, 1)),
        };
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.parse_and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let right = self.parse_and()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.parse_temporal()?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let right = self.parse_temporal()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    /// Binary U/R, right associative, binding tighter than `&`.
    fn parse_temporal(&mut self) -> Result<Formula, ParseError> {
        let left = self.parse_unary()?;
        if let Some(Tok::Ident(name)) = self.peek() {
            if name == "U" || name == "R" {
                let is_until = name == "U";
                self.bump();
                let (rel, n) = self.parse_opt_bound()?;
                let right = self.parse_temporal()?;
                return Ok(if is_until {
                    Formula::until(rel, n, left, right)
                } else {
                    Formula::release(rel, n, left, right)
                });
            }
        }
        Ok(left)
    }

    fn parse_opt_bound(&mut self) -> Result<(Rel, u32), ParseError> {
        if let Some(Tok::Bound(rel, n)) = self.peek() {
            let (rel, n) = (*rel, *n);
            self.bump();
            Ok((rel, n))
        } else {
            Ok((Rel::Ge, 0))
        }
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.bump();
                let inner = self.parse_unary()?;
                Ok(match inner {
                    Formula::Atom(p) => Formula::NegAtom(p),
                    other => Formula::Not(Box::new(other)),
                })
            }
            Some(Tok::Ident(name)) if name == "F" || name == "G" => {
                let is_f = name == "F";
                self.bump();
                let (rel, n) = self.parse_opt_bound()?;
                let inner = self.parse_unary()?;
                Ok(if is_f {
                    Formula::finally(rel, n, inner)
                } else {
                    Formula::globally(rel, n, inner)
                })
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "U" | "R" => Err(self.err(format!("'{name}' is an operator, not an atom"))),
                _ => Ok(Formula::Atom(name)),
            },
            Some(Tok::LPar) => {
                let inner = self.parse_or()?;
                if self.bump() != Some(Tok::RPar) {
                    self.pos -= 1;
                    return Err(self.err("expected ')'"));
                }
                Ok(inner)
            }
            Some(t) => {
                self.pos -= 1;
                Err(self.err(format!("expected a formula, found {t:?}")))
            }
            None => Err(self.err("expected a formula, found end of input")),
        }
    }
}

/// Parse the surface syntax; negation may appear anywhere (use [`to_pnf`]
/// before encoding). `U R F G true false` are reserved words.
pub fn parse_mitl(text: &str) -> Result<Formula, ParseError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.parse_or()?;
    if p.peek().is_some() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_bounded_until() {
        let f = parse_mitl("p U[<=4] q").unwrap();
        assert_eq!(
            f,
            Formula::until(Rel::Le, 4, Formula::atom("p"), Formula::atom("q"))
        );
    }

    #[test]
    fn parses_nested_timed_operators() {
        let f = parse_mitl("F[<=3]((G[<=1] p) & (F[<2] q))").unwrap();
        let want = Formula::finally(
            Rel::Le,
            3,
            Formula::and(
                Formula::globally(Rel::Le, 1, Formula::atom("p")),
                Formula::finally(Rel::Lt, 2, Formula::atom("q")),
            ),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn missing_operand_is_an_error() {
        let e = parse_mitl("p U[<2]").unwrap_err();
        let ParseError::Syntax { msg, .. } = e;
        assert!(msg.contains("end of input"), "{msg}");
    }

    #[test]
    fn negative_bound_rejected() {
        assert!(parse_mitl("F[<= -1] p").is_err());
        assert!(parse_mitl("F[<=1.5] p").is_err());
    }

    #[test]
    fn precedence_and_associativity() {
        // ! > temporal > & > |, temporal right-assoc
        let f = parse_mitl("!p U q & r | s").unwrap();
        let want = Formula::or(
            Formula::and(
                Formula::until_s(Formula::neg_atom("p"), Formula::atom("q")),
                Formula::atom("r"),
            ),
            Formula::atom("s"),
        );
        assert_eq!(f, want);
        let g = parse_mitl("a U b U c").unwrap();
        assert_eq!(
            g,
            Formula::until_s(
                Formula::atom("a"),
                Formula::until_s(Formula::atom("b"), Formula::atom("c"))
            )
        );
    }

    #[test]
    fn pnf_pushes_through_until() {
        let f = parse_mitl("!(p U q)").unwrap();
        assert_eq!(
            to_pnf(&f),
            Formula::release_s(Formula::neg_atom("p"), Formula::neg_atom("q"))
        );
    }

    #[test]
    fn pnf_double_negation() {
        let f = parse_mitl("!!p").unwrap();
        assert_eq!(to_pnf(&f), Formula::atom("p"));
    }

    #[test]
    fn pnf_de_morgan_with_timed_finally() {
        let f = parse_mitl("!(p & F[<2] q)").unwrap();
        let want = Formula::or(
            Formula::neg_atom("p"),
            Formula::globally(Rel::Lt, 2, Formula::neg_atom("q")),
        );
        assert_eq!(to_pnf(&f), want);
    }

    #[test]
    fn pnf_is_idempotent() {
        for text in [
            "!(p U[<=4] (q R[>2] !r))",
            "!(F[<3] p | G q)",
            "!!(a & !b)",
        ] {
            let f = parse_mitl(text).unwrap();
            let once = to_pnf(&f);
            assert!(once.is_pnf());
            assert_eq!(to_pnf(&once), once);
        }
    }

    #[test]
    fn rewrite_upper_bounds() {
        let f = parse_mitl("p U[<=4] q").unwrap();
        let want = Formula::and(
            Formula::finally(Rel::Le, 4, Formula::atom("q")),
            Formula::until_s(Formula::atom("p"), Formula::atom("q")),
        );
        assert_eq!(rewrite_upper_until(&f), want);

        let g = parse_mitl("p R[<3] q").unwrap();
        let want_g = Formula::or(
            Formula::globally(Rel::Lt, 3, Formula::atom("q")),
            Formula::release_s(Formula::atom("p"), Formula::atom("q")),
        );
        assert_eq!(rewrite_upper_until(&g), want_g);
    }

    #[test]
    fn rewrite_keeps_lower_bounds() {
        let f = parse_mitl("p U[>=2] q").unwrap();
        assert_eq!(rewrite_upper_until(&f), f);
        let g = parse_mitl("F[<=4] q").unwrap();
        assert_eq!(rewrite_upper_until(&g), g);
    }

    #[test]
    fn subformula_order_leaf() {
        let t = SubformulaTable::build(&Formula::atom("p"));
        assert_eq!(t.entries, vec![Formula::atom("p")]);
    }

    #[test]
    fn subformula_order_dedups() {
        let f = Formula::and(Formula::atom("p"), Formula::atom("p"));
        let t = SubformulaTable::build(&f);
        assert_eq!(t.entries.len(), 2);
        assert_eq!(t.entries[0], Formula::atom("p"));
        assert_eq!(t.entries[1], f);
    }

    #[test]
    fn subformula_order_children_first() {
        let f = rewrite_upper_until(&parse_mitl("p U[<=4] q").unwrap());
        let t = SubformulaTable::build(&f);
        assert_eq!(t.entries.last().unwrap(), &f);
        for (i, e) in t.entries.iter().enumerate() {
            for c in e.children() {
                assert!(t.index_of(c).unwrap() < i);
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for text in [
            "p U[<=4] q",
            "F[<=3]((G[<=1] p) & (F[<2] q))",
            "!(p | q) R[>2] true",
            "a.b_c U d",
        ] {
            let f = parse_mitl(text).unwrap();
            let again = parse_mitl(&f.to_string()).unwrap();
            assert_eq!(f, again);
        }
    }
}
