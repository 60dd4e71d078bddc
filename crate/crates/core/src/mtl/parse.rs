//! Concrete syntax for formulas.
//!
//! ```text
//! formula  := disj
//! disj     := conj { "|" conj }
//! conj     := unary { "&" unary }
//! unary    := "!" unary
//!           | "G" interval? unary
//!           | "F" interval? unary
//!           | primary [ "U" interval? unary ]
//! primary  := "(" formula ")" | ident | "T" | "F0"
//! interval := "[" int "," ( int | "inf" ) "]"
//! ```
//!
//! An omitted interval means `[0,inf]`. `G`, `F`, `U`, `T` and `F0` are
//! reserved; every other identifier is an atom.

use thiserror::Error;

use super::{AtomTable, Interval, MtlFormula};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown atom `{name}`")]
    UnknownAtom {
        line: usize,
        column: usize,
        name: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(usize),
    Always,
    Eventually,
    Until,
    True,
    False,
    Not,
    And,
    Or,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Inf,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '!' => Some(Tok::Not),
            '&' => Some(Tok::And),
            '|' => Some(Tok::Or),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let value = s.parse::<usize>().map_err(|_| ParseError::Syntax {
                line: l0,
                column: c0,
                message: format!("integer `{s}` out of range"),
            })?;
            out.push(Spanned {
                tok: Tok::Int(value),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = match s.as_str() {
                "G" => Tok::Always,
                "F" => Tok::Eventually,
                "U" => Tok::Until,
                "T" => Tok::True,
                "F0" => Tok::False,
                "inf" => Tok::Inf,
                _ => Tok::Ident(s),
            };
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(ParseError::Syntax {
            line: l0,
            column: c0,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    atoms: Option<&'a AtomTable>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.toks[self.pos];
        Err(ParseError::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn formula(&mut self) -> Result<MtlFormula, ParseError> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conj()?;
            lhs = MtlFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<MtlFormula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = MtlFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn interval(&mut self) -> Result<Interval, ParseError> {
        if *self.peek() != Tok::LBracket {
            return Ok(Interval::UNBOUNDED);
        }
        self.bump();
        let start = match self.bump().tok {
            Tok::Int(v) => v,
            _ => {
                self.pos -= 1;
                return self.error("expected interval lower bound");
            }
        };
        self.expect(Tok::Comma, "`,`")?;
        let end = match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Some(v)
            }
            Tok::Inf => {
                self.bump();
                None
            }
            _ => return self.error("expected interval upper bound"),
        };
        if let Some(end) = end {
            if end < start {
                return self.error(format!("empty interval [{start},{end}]"));
            }
        }
        self.expect(Tok::RBracket, "`]`")?;
        Ok(Interval { start, end })
    }

    fn unary(&mut self) -> Result<MtlFormula, ParseError> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(MtlFormula::not(self.unary()?))
            }
            Tok::Always => {
                self.bump();
                let i = self.interval()?;
                Ok(MtlFormula::always(self.unary()?, i))
            }
            Tok::Eventually => {
                self.bump();
                let i = self.interval()?;
                Ok(MtlFormula::eventually(self.unary()?, i))
            }
            _ => {
                let lhs = self.primary()?;
                if *self.peek() == Tok::Until {
                    self.bump();
                    let i = self.interval()?;
                    let rhs = self.unary()?;
                    Ok(MtlFormula::until(lhs, rhs, i))
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    fn primary(&mut self) -> Result<MtlFormula, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::True => Ok(MtlFormula::True),
            Tok::False => Ok(MtlFormula::False),
            Tok::Ident(name) => {
                if let Some(table) = self.atoms {
                    if !table.contains(&name) {
                        return Err(ParseError::UnknownAtom {
                            line: t.line,
                            column: t.column,
                            name,
                        });
                    }
                }
                Ok(MtlFormula::Atom(name))
            }
            other => Err(ParseError::Syntax {
                line: t.line,
                column: t.column,
                message: format!("expected formula, found {other:?}"),
            }),
        }
    }
}

fn run(text: &str, atoms: Option<&AtomTable>) -> Result<MtlFormula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        atoms,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("unexpected trailing {:?}", p.peek()));
    }
    Ok(f)
}

/// Parses `text`, rejecting atoms not bound in `atoms`.
pub fn parse(text: &str, atoms: &AtomTable) -> Result<MtlFormula, ParseError> {
    run(text, Some(atoms))
}

/// Parses `text` without resolving atom names.
pub fn parse_unchecked(text: &str) -> Result<MtlFormula, ParseError> {
    run(text, None)
}
