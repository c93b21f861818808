//! Expression parser for differential polynomials. The grammar accepts
//! exactly what the library printer emits, plus whitespace freedom:
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := atom ['^' integer]
//! atom    := number | variable | '(' expr ')'
//! number  := integer ['/' integer]
//! variable:= f<i> ("'"{1,3} | '^(' integer ')')? | a<i> | c<i>_<j> | t
//! ```
//!
//! Parse errors carry the byte position of the offending token.

use std::fmt;

use jetdiff::poly::{DiffPoly, Q, VarSym};

#[derive(Debug, Clone)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Var(VarSym),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos,
            message: message.into(),
        })
    }

    fn integer(&mut self) -> u64 {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .unwrap_or(u64::MAX)
    }

    fn tokens(&mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\n' => {
                    self.pos += 1;
                }
                b'+' => {
                    self.pos += 1;
                    out.push((start, Tok::Plus));
                }
                b'-' | 0xe2 if c == b'-' || self.src[self.pos..].starts_with("\u{2212}".as_bytes()) => {
                    self.pos += if c == b'-' { 1 } else { 3 };
                    out.push((start, Tok::Minus));
                }
                b'*' => {
                    self.pos += 1;
                    out.push((start, Tok::Star));
                }
                b'^' => {
                    self.pos += 1;
                    out.push((start, Tok::Caret));
                }
                b'(' => {
                    self.pos += 1;
                    out.push((start, Tok::LParen));
                }
                b')' => {
                    self.pos += 1;
                    out.push((start, Tok::RParen));
                }
                b'0'..=b'9' => {
                    let numer = self.integer() as i64;
                    let mut q = Q::from_integer(numer.into());
                    if self.pos < self.src.len() && self.src[self.pos] == b'/' {
                        self.pos += 1;
                        if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                            return self.err(self.pos, "expected denominator digits after '/'");
                        }
                        let denom = self.integer() as i64;
                        if denom == 0 {
                            return self.err(start, "zero denominator");
                        }
                        q = Q::new(numer.into(), denom.into());
                    }
                    out.push((start, Tok::Num(q)));
                }
                b'f' | b'a' | b'c' => {
                    self.pos += 1;
                    if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                        return self.err(start, format!("expected index digits after '{}'", c as char));
                    }
                    let i = self.integer() as u32;
                    let var = match c {
                        b'a' => VarSym::CoeffA(i),
                        b'c' => {
                            if self.pos >= self.src.len() || self.src[self.pos] != b'_' {
                                return self.err(self.pos, "expected '_' in c<i>_<j>");
                            }
                            self.pos += 1;
                            if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                                return self.err(self.pos, "expected column index in c<i>_<j>");
                            }
                            VarSym::ConstC(i, self.integer() as u32)
                        }
                        _ => {
                            // f<i>: postfix primes, or ^(j) with explicit parens
                            let mut order = 0u32;
                            while self.pos < self.src.len() && self.src[self.pos] == b'\'' {
                                order += 1;
                                self.pos += 1;
                            }
                            if order > 3 {
                                return self.err(start, "more than three primes; use f<i>^(j)");
                            }
                            if order == 0
                                && self.src[self.pos..].first() == Some(&b'^')
                                && self.src[self.pos + 1..].first() == Some(&b'(')
                            {
                                self.pos += 2;
                                if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit()
                                {
                                    return self.err(self.pos, "expected order digits in f<i>^(j)");
                                }
                                order = self.integer() as u32;
                                if self.src[self.pos..].first() != Some(&b')') {
                                    return self.err(self.pos, "expected ')' closing f<i>^(j)");
                                }
                                self.pos += 1;
                            }
                            VarSym::jet(i, order)
                        }
                    };
                    out.push((start, Tok::Var(var)));
                }
                b't' => {
                    self.pos += 1;
                    out.push((start, Tok::Var(VarSym::T)));
                }
                _ => {
                    return self.err(start, format!("unexpected character '{}'", c as char));
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<DiffPoly, ParseError> {
        let mut negate = false;
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffPoly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<DiffPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.bump() {
                Some(Tok::Num(q)) if q.is_integer() => {
                    let e: u32 = q.numer().try_into().map_err(|_| ParseError {
                        pos: self.pos(),
                        message: "exponent must fit a small nonnegative integer".into(),
                    })?;
                    return Ok(base.pow(e));
                }
                _ => return self.err("expected a nonnegative integer exponent after '^'"),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffPoly, ParseError> {
        match self.bump() {
            Some(Tok::Num(q)) => Ok(DiffPoly::constant(q)),
            Some(Tok::Var(v)) => Ok(DiffPoly::var(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.bump() != Some(Tok::RParen) {
                    self.idx -= 1;
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            _ => {
                self.idx = self.idx.saturating_sub(1);
                self.err("expected a number, variable, or '('")
            }
        }
    }
}

/// Parses a differential polynomial; the result is canonical, so
/// parse(print(p)) = p.
pub fn parse_expr(text: &str) -> Result<DiffPoly, ParseError> {
    let mut lexer = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    let toks = lexer.tokens()?;
    if toks.is_empty() {
        return Err(ParseError {
            pos: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let p = parser.expr()?;
    if parser.idx < parser.toks.len() {
        return parser.err("trailing input after expression");
    }
    Ok(p)
}
