//! Parser for element literals and symbol expressions.
//!
//! ```text
//! element = factor { "*" factor }
//! factor  = ident [ "^" sint ] | "1" | "-1"
//! symbol  = "(" element { "," element } ")"
//! expr    = "0" | [ sint "*" ] symbol { ("+" | "-") [ uint "*" ] symbol }
//! ```
//!
//! Exponents of any size are reduced modulo the group order; coefficients
//! that overflow `i64` are reduced modulo `m`. Columns in errors are 1-based.

use std::sync::Arc;

use crate::arith;
use crate::error::{Error, Result};
use crate::symcalc::SymbolSum;
use crate::tower::{ElementClass, FieldTower, BASE_GENERATOR};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Minus,
    Plus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Int(s) => format!("integer {s}"),
            Tok::Minus => "'-'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let col = i + 1;
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match ch {
            '-' => Some(Tok::Minus),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = single {
            out.push((tok, col));
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(chars[start..i].iter().collect()), col));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(Error::Parse { column: col, message: format!("unexpected character {ch:?}") });
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    tower: &'a Arc<FieldTower>,
}

impl<'a> Parser<'a> {
    fn new(text: &str, tower: &'a Arc<FieldTower>) -> Result<Self> {
        Ok(Self { toks: lex(text)?, pos: 0, tower })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        Err(Error::Parse {
            column: self.col(),
            message: format!("expected {expected}, found {}", self.peek().describe()),
        })
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(expected)
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => self.error("end of input"),
        }
    }

    fn signed_int(&mut self) -> Result<String> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Int(s) => Ok(if neg { format!("-{s}") } else { s }),
            _ => {
                self.pos -= 1;
                self.error("integer")
            }
        }
    }

    fn element(&mut self) -> Result<ElementClass> {
        let n = self.tower.depth();
        let mut exps = vec![0u64; n + 1];
        loop {
            self.factor(&mut exps)?;
            if *self.peek() == Tok::Star {
                self.bump();
            } else {
                break;
            }
        }
        let base = exps[0] as i128;
        let unif: Vec<i128> = exps[1..].iter().map(|&e| e as i128).collect();
        self.tower.element(base, &unif)
    }

    fn factor(&mut self, exps: &mut [u64]) -> Result<()> {
        let col = self.col();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                let g = if name == BASE_GENERATOR {
                    0
                } else {
                    match self.tower.uniformizer_names().iter().position(|u| *u == name) {
                        Some(i) => i + 1,
                        None => return Err(Error::UnknownGenerator { name, column: col }),
                    }
                };
                let modulus = if g == 0 { self.tower.base_class_order() } else { self.tower.modulus() };
                let e = if *self.peek() == Tok::Caret {
                    self.bump();
                    let col = self.col();
                    let lit = self.signed_int()?;
                    arith::reduce_decimal(&lit, modulus)
                        .ok_or(Error::Parse { column: col, message: "bad exponent".into() })?
                } else {
                    1 % modulus
                };
                exps[g] = (exps[g] + e) % modulus;
                Ok(())
            }
            Tok::Int(s) if s == "1" => {
                self.bump();
                Ok(())
            }
            Tok::Minus if *self.peek_at(1) == Tok::Int("1".into()) => {
                self.bump();
                self.bump();
                let modulus = self.tower.base_class_order();
                exps[0] = (exps[0] + self.tower.minus_one_exponent()) % modulus;
                Ok(())
            }
            _ => self.error("generator, '1' or '-1'"),
        }
    }

    fn symbol(&mut self) -> Result<Vec<ElementClass>> {
        self.expect(Tok::LParen, "'('")?;
        let mut slots = vec![self.element()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            slots.push(self.element()?);
        }
        self.expect(Tok::RParen, "',' or ')'")?;
        Ok(slots)
    }

    fn coefficient(&mut self, signed: bool) -> Result<i64> {
        let is_coeff = match (self.peek(), self.peek_at(1)) {
            (Tok::Int(_), _) => true,
            (Tok::Minus, Tok::Int(_)) => signed,
            _ => false,
        };
        if !is_coeff {
            return Ok(1);
        }
        let col = self.col();
        let lit = self.signed_int()?;
        self.expect(Tok::Star, "'*'")?;
        match lit.parse::<i64>() {
            Ok(v) => Ok(v),
            Err(_) => arith::reduce_decimal(&lit, self.tower.modulus())
                .map(|v| v as i64)
                .ok_or(Error::Parse { column: col, message: "bad coefficient".into() }),
        }
    }

    fn expr(&mut self) -> Result<SymbolSum> {
        if *self.peek() == Tok::Int("0".into()) && *self.peek_at(1) == Tok::End {
            self.bump();
            return Ok(SymbolSum::new(self.tower, 0));
        }
        let mut terms = Vec::new();
        let coeff = self.coefficient(true)?;
        let col = self.col();
        terms.push((coeff, self.symbol()?, col));
        loop {
            let sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => break,
            };
            self.bump();
            let coeff = self.coefficient(false)?;
            let col = self.col();
            terms.push((sign * coeff, self.symbol()?, col));
        }
        self.finish()?;
        let degree = terms[0].1.len();
        let mut sum = SymbolSum::new(self.tower, degree);
        for (coeff, slots, col) in terms {
            if slots.len() != degree {
                return Err(Error::Parse {
                    column: col,
                    message: format!("symbol has {} slots, expected {degree}", slots.len()),
                });
            }
            sum.push(coeff, slots)?;
        }
        Ok(sum)
    }
}

/// Parses an element literal such as `c^3*t1^2*t2^-1`, `1` or `-1`.
pub fn parse_element(text: &str, tower: &Arc<FieldTower>) -> Result<ElementClass> {
    let mut p = Parser::new(text, tower)?;
    let x = p.element()?;
    p.finish()?;
    Ok(x)
}

/// Parses a symbol expression such as `2*(c*t1, t2) - (t1, t1)`.
pub fn parse_symbol_expr(text: &str, tower: &Arc<FieldTower>) -> Result<SymbolSum> {
    Parser::new(text, tower)?.expr()
}
