//! Minimal S-expression reader for the SMT-LIB2 subset the solver accepts.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Sym(String),
    /// Numeral or decimal literal, kept as written.
    Num(String),
    Keyword(String),
    StringLit(String),
    List(Vec<Sexpr>),
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Sym(s) => write!(f, "{s}"),
            Sexpr::Num(s) => write!(f, "{s}"),
            Sexpr::Keyword(s) => write!(f, ":{s}"),
            Sexpr::StringLit(s) => write!(f, "\"{s}\""),
            Sexpr::List(xs) => {
                write!(f, "(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Sexpr {
    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexpr::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(xs) => Some(xs),
            _ => None,
        }
    }
}

/// Incremental reader: feed it text, it yields complete top-level expressions.
#[derive(Default)]
pub struct Reader {
    buf: String,
}

impl Reader {
    pub fn new() -> Self {
        Reader::default()
    }

    pub fn feed(&mut self, text: &str) {
        self.buf.push_str(text);
    }

    /// Pop the next complete expression, if the buffer holds one.
    pub fn next_expr(&mut self) -> Result<Option<Sexpr>, String> {
        let mut p = Parser {
            src: self.buf.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let start = p.pos;
        match p.parse() {
            Ok(Some(e)) => {
                let consumed = p.pos;
                self.buf.drain(..consumed);
                Ok(Some(e))
            }
            Ok(None) => {
                // keep only from the first non-ws byte to bound growth
                self.buf.drain(..start);
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

/// Parse every expression in `text`, requiring the input to be complete.
pub fn parse_all(text: &str) -> Result<Vec<Sexpr>, String> {
    let mut r = Reader::new();
    r.feed(text);
    let mut out = Vec::new();
    while let Some(e) = r.next_expr()? {
        out.push(e);
    }
    let rest = r.buf.trim();
    if !rest.is_empty() {
        return Err(format!("trailing incomplete input: {rest:.40}"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c == b';' {
                while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Returns Ok(None) when the input is incomplete (need more bytes).
    fn parse(&mut self) -> Result<Option<Sexpr>, String> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let c = self.src[self.pos];
        match c {
            b'(' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    if self.pos >= self.src.len() {
                        return Ok(None);
                    }
                    if self.src[self.pos] == b')' {
                        self.pos += 1;
                        return Ok(Some(Sexpr::List(items)));
                    }
                    match self.parse()? {
                        Some(e) => items.push(e),
                        None => return Ok(None),
                    }
                }
            }
            b')' => Err("unbalanced ')'".to_string()),
            b'"' => {
                let mut s = String::new();
                let mut i = self.pos + 1;
                while i < self.src.len() {
                    if self.src[i] == b'"' {
                        // SMT-LIB escapes a quote by doubling it
                        if i + 1 < self.src.len() && self.src[i + 1] == b'"' {
                            s.push('"');
                            i += 2;
                            continue;
                        }
                        self.pos = i + 1;
                        return Ok(Some(Sexpr::StringLit(s)));
                    }
                    s.push(self.src[i] as char);
                    i += 1;
                }
                Ok(None)
            }
            b'|' => {
                let mut s = String::new();
                let mut i = self.pos + 1;
                while i < self.src.len() {
                    if self.src[i] == b'|' {
                        self.pos = i + 1;
                        return Ok(Some(Sexpr::Sym(s)));
                    }
                    s.push(self.src[i] as char);
                    i += 1;
                }
                Ok(None)
            }
            b':' => {
                self.pos += 1;
                let tok = self.token();
                Ok(Some(Sexpr::Keyword(tok)))
            }
            _ => {
                let tok = self.token();
                if tok.is_empty() {
                    return Err(format!("unexpected byte {:?}", c as char));
                }
                let first = tok.as_bytes()[0];
                if first.is_ascii_digit() {
                    Ok(Some(Sexpr::Num(tok)))
                } else {
                    Ok(Some(Sexpr::Sym(tok)))
                }
            }
        }
    }

    fn token(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() || c == b'(' || c == b')' || c == b';' || c == b'"' {
                break;
            }
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }
}
