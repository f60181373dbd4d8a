//! Shared polynomial-expression parser.
//!
//! Used for model differential rules, element strings in data files, and
//! jet components. Grammar (whitespace-insensitive, 1-based positions in
//! errors):
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ['^' digits]
//! base     := rational | identifier | '(' expr ')'
//! rational := digits ['/' digits]
//! ```
//!
//! Juxtaposition is not multiplication — `2a` is a parse error, write `2*a`.
//! The output keeps factors in written order; consumers apply their own
//! commutation rules (Koszul signs for odd generators, plain commutativity
//! for jet variables).

use crate::error::Error;
use crate::exact_linalg::Scalar;

/// One additive term: a rational coefficient times an ordered word of
/// identifiers. Numeric factors are folded into the coefficient.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RawTerm {
    pub coeff: Scalar,
    pub factors: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned>, Error> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let tok = match c {
            '+' => {
                bump(&mut chars);
                Tok::Plus
            }
            '-' => {
                bump(&mut chars);
                Tok::Minus
            }
            '*' => {
                bump(&mut chars);
                Tok::Star
            }
            '/' => {
                bump(&mut chars);
                Tok::Slash
            }
            '^' => {
                bump(&mut chars);
                Tok::Caret
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            d if d.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_digit() {
                        s.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                Tok::Num(s)
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        s.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            other => {
                return Err(err(tline, tcol, format!("unexpected character {other:?}")));
            }
        };
        out.push(Spanned {
            tok,
            line: tline,
            col: tcol,
        });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn next(&mut self) -> Option<Spanned> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Vec<RawTerm>, Error> {
        let mut terms = Vec::new();
        let mut sign = Scalar::one();
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.next();
            sign = -Scalar::one();
        } else if matches!(self.peek(), Some(Tok::Plus)) {
            self.next();
        }
        loop {
            let term = self.term()?;
            for mut t in term {
                t.coeff = t.coeff * &sign;
                terms.push(t);
            }
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    sign = Scalar::one();
                }
                Some(Tok::Minus) => {
                    self.next();
                    sign = -Scalar::one();
                }
                _ => break,
            }
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<Vec<RawTerm>, Error> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    let rhs = self.factor()?;
                    let mut prod = Vec::new();
                    for a in &acc {
                        for b in &rhs {
                            let mut factors = a.factors.clone();
                            factors.extend(b.factors.iter().cloned());
                            prod.push(RawTerm {
                                coeff: &a.coeff * &b.coeff,
                                factors,
                            });
                        }
                    }
                    acc = prod;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let (l, c) = self.here();
                    return Err(err(l, c, "juxtaposition is not multiplication; write `*`"));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Vec<RawTerm>, Error> {
        let base = self.base_factor()?;
        if !matches!(self.peek(), Some(Tok::Caret)) {
            return Ok(base);
        }
        let caret = self.next().expect("peeked");
        let exp: u32 = match self.next().map(|s| s.tok) {
            Some(Tok::Num(n)) => n
                .parse()
                .map_err(|_| err(caret.line, caret.col, "exponent out of range"))?,
            _ => {
                return Err(err(
                    caret.line,
                    caret.col,
                    "`^` needs a nonnegative integer exponent",
                ))
            }
        };
        let mut acc = vec![RawTerm {
            coeff: Scalar::one(),
            factors: Vec::new(),
        }];
        for _ in 0..exp {
            let mut prod = Vec::new();
            for a in &acc {
                for b in &base {
                    let mut factors = a.factors.clone();
                    factors.extend(b.factors.iter().cloned());
                    prod.push(RawTerm {
                        coeff: &a.coeff * &b.coeff,
                        factors,
                    });
                }
            }
            acc = prod;
        }
        Ok(acc)
    }

    fn base_factor(&mut self) -> Result<Vec<RawTerm>, Error> {
        let (l, c) = self.here();
        match self.next().map(|s| s.tok) {
            Some(Tok::Num(n)) => {
                // maybe a rational literal p/q
                if matches!(self.peek(), Some(Tok::Slash)) {
                    let slash = self.next().expect("peeked");
                    match self.next().map(|s| s.tok) {
                        Some(Tok::Num(d)) => {
                            let sc = Scalar::parse(&format!("{n}/{d}"))
                                .map_err(|_| err(l, c, "zero denominator in rational literal"))?;
                            Ok(vec![RawTerm {
                                coeff: sc,
                                factors: Vec::new(),
                            }])
                        }
                        _ => Err(err(
                            slash.line,
                            slash.col,
                            "`/` is only allowed between integer literals",
                        )),
                    }
                } else {
                    Ok(vec![RawTerm {
                        coeff: Scalar::parse(&n).expect("lexed digits"),
                        factors: Vec::new(),
                    }])
                }
            }
            Some(Tok::Ident(name)) => Ok(vec![RawTerm {
                coeff: Scalar::one(),
                factors: vec![name],
            }]),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.next().map(|s| s.tok) {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err(l, c, "unclosed parenthesis")),
                }
            }
            Some(Tok::Minus) => {
                // unary minus on a factor: -x or -(...)
                let inner = self.factor()?;
                Ok(inner
                    .into_iter()
                    .map(|mut t| {
                        t.coeff = -t.coeff;
                        t
                    })
                    .collect())
            }
            other => Err(err(
                l,
                c,
                match other {
                    None => "unexpected end of expression".to_string(),
                    Some(t) => format!("expected a factor, found {t:?}"),
                },
            )),
        }
    }
}

/// Parses a full expression into raw additive terms.
pub(crate) fn parse_expression(src: &str) -> Result<Vec<RawTerm>, Error> {
    let toks = lex(src)?;
    let (end_line, end_col) = {
        let lines: Vec<&str> = src.split('\n').collect();
        let last = lines.last().copied().unwrap_or("");
        (lines.len(), last.chars().count() + 1)
    };
    if toks.is_empty() {
        return Err(err(1, 1, "empty expression"));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end_line,
        end_col,
    };
    let terms = p.expr()?;
    if p.pos != p.toks.len() {
        let (l, c) = p.here();
        return Err(err(l, c, "trailing input after expression"));
    }
    Ok(terms)
}
