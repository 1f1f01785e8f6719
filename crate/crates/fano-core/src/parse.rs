use crate::alpha::HFunctional;
use crate::error::Error;
use crate::field::{FieldSpec, Scalar};
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

/// Polynomial text grammar:
///
/// ```text
/// expr   := ['-'] term (('+' | '-') term)*
/// term   := factor ('*' factor)*
/// factor := base ('^' uint)?
/// base   := var | number | '(' expr ')'
/// var    := 'z' uint
/// number := uint ('/' uint)?
/// ```
///
/// Whitespace is insignificant. Exponents must be literal non-negative
/// integers. The optional leading '-' and the '/' in numeric literals exist
/// so that the canonical printer's output (which may start with a negative
/// term and may carry rational coefficients) re-parses to the same
/// polynomial.
pub fn parse_polynomial(text: &str, nvars: usize, field: FieldSpec) -> Result<Polynomial, Error> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        nvars,
        field,
        text_len: text.len(),
    };
    let poly = p.expr()?;
    p.expect_end()?;
    Ok(poly)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, Error> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'z' => {
                let start = i;
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(Error::SyntaxError {
                        pos: start,
                        msg: "variable 'z' must be followed by digits".into(),
                    });
                }
                let idx: usize = text[ds..i].parse().map_err(|_| Error::SyntaxError {
                    pos: ds,
                    msg: "variable index too large".into(),
                })?;
                out.push((start, Tok::Var(idx)));
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits parse as BigInt");
                out.push((start, Tok::Int(n)));
            }
            _ => {
                return Err(Error::SyntaxError {
                    pos: i,
                    msg: format!(
                        "unexpected character {:?}",
                        text[i..].chars().next().unwrap()
                    ),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Tok)],
    pos: usize,
    nvars: usize,
    field: FieldSpec,
    text_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.text_len)
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_end(&self) -> Result<(), Error> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(Error::SyntaxError {
                pos: self.here(),
                msg: "trailing input".into(),
            })
        }
    }

    fn expr(&mut self) -> Result<Polynomial, Error> {
        let mut negate = false;
        if self.eat(&Tok::Minus) {
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat(&Tok::Plus) {
                let t = self.term()?;
                acc = acc.add(&t)?;
            } else if self.eat(&Tok::Minus) {
                let t = self.term()?;
                acc = acc.sub(&t)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, Error> {
        let mut acc = self.factor()?;
        while self.eat(&Tok::Star) {
            let f = self.factor()?;
            acc = acc.mul(&f)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, Error> {
        let base = self.base()?;
        if self.eat(&Tok::Caret) {
            let pos = self.here();
            match self.bump() {
                Some(Tok::Int(n)) => {
                    let e = n.to_u32().ok_or(Error::NonIntegerExponent { pos })?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::NonIntegerExponent { pos }),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Polynomial, Error> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Var(i)) => {
                if *i >= self.nvars {
                    return Err(Error::VariableOutOfRange {
                        index: *i,
                        nvars: self.nvars,
                    });
                }
                Polynomial::variable(self.field, self.nvars, *i)
            }
            Some(Tok::Int(n)) => {
                // optional '/ uint' forms a rational literal
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let dpos = self.here();
                    match self.bump() {
                        Some(Tok::Int(d)) => {
                            let c = self.field.fraction(n, d)?;
                            Ok(Polynomial::constant(self.field, self.nvars, c))
                        }
                        _ => Err(Error::SyntaxError {
                            pos: dpos,
                            msg: "expected integer denominator after '/'".into(),
                        }),
                    }
                } else {
                    Ok(Polynomial::constant(
                        self.field,
                        self.nvars,
                        self.field.from_bigint(n),
                    ))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if self.eat(&Tok::RParen) {
                    Ok(inner)
                } else {
                    Err(Error::SyntaxError {
                        pos: self.here(),
                        msg: "expected ')'".into(),
                    })
                }
            }
            _ => Err(Error::SyntaxError {
                pos,
                msg: "expected variable, number, or '('".into(),
            }),
        }
    }
}

/// Dual-functional text grammar, for a functional on s blocks of monomials
/// in z0..zk:
///
/// ```text
/// h     := comp ('+' comp)*          -- exactly s components
/// comp  := '0' | sterm | '(' sterm (('+' | '-') sterm)* ')'
/// sterm := [number '*']? '(' expr ')' '*'
/// ```
///
/// Each `expr` must reduce to a single monomial (an integer multiple is
/// folded into the coefficient) of the block's degree. Example for two
/// quadric blocks: `(z0^2)* + (2*(z0*z1)* - (z1^2)*)`.
pub fn parse_h_functional(
    text: &str,
    k: usize,
    degrees: &[u32],
    field: FieldSpec,
) -> Result<HFunctional, Error> {
    let tokens = lex(text)?;
    let mut p = HParser {
        inner: Parser {
            tokens: &tokens,
            pos: 0,
            nvars: k + 1,
            field,
            text_len: text.len(),
        },
    };
    let mut h = HFunctional::zero(field, k, degrees.to_vec());
    for (block, _) in degrees.iter().enumerate() {
        if block > 0 && !p.inner.eat(&Tok::Plus) {
            return Err(Error::SyntaxError {
                pos: p.inner.here(),
                msg: format!("expected '+' before component {block}"),
            });
        }
        p.component(&mut h, block)?;
    }
    p.inner.expect_end()?;
    Ok(h)
}

struct HParser<'a> {
    inner: Parser<'a>,
}

impl<'a> HParser<'a> {
    fn component(&mut self, h: &mut HFunctional, block: usize) -> Result<(), Error> {
        // '0': the zero functional on this block.
        if let Some(Tok::Int(n)) = self.inner.peek() {
            if n == &BigInt::from(0) {
                self.inner.pos += 1;
                return Ok(());
            }
        }
        // A '(' whose matching ')' is NOT followed by '*' opens a group of
        // signed dual terms; otherwise we are looking at a single sterm.
        if self.inner.peek() == Some(&Tok::LParen) && !self.paren_is_sterm() {
            self.inner.pos += 1;
            self.sterm(h, block, false)?;
            loop {
                if self.inner.eat(&Tok::Plus) {
                    self.sterm(h, block, false)?;
                } else if self.inner.eat(&Tok::Minus) {
                    self.sterm(h, block, true)?;
                } else {
                    break;
                }
            }
            if !self.inner.eat(&Tok::RParen) {
                return Err(Error::SyntaxError {
                    pos: self.inner.here(),
                    msg: "expected ')' closing functional group".into(),
                });
            }
            Ok(())
        } else {
            self.sterm(h, block, false)
        }
    }

    /// With the cursor on '(', true when the matching ')' is immediately
    /// followed by '*' (i.e. the parenthesis wraps a dual monomial).
    fn paren_is_sterm(&self) -> bool {
        let toks = self.inner.tokens;
        let mut depth = 0usize;
        let mut i = self.inner.pos;
        while i < toks.len() {
            match toks[i].1 {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        return matches!(toks.get(i + 1), Some((_, Tok::Star)));
                    }
                }
                _ => {}
            }
            i += 1;
        }
        false
    }

    fn sterm(&mut self, h: &mut HFunctional, block: usize, negate: bool) -> Result<(), Error> {
        let mut coeff = self.inner.field.one();
        if let Some(Tok::Int(n)) = self.inner.peek() {
            let n = n.clone();
            self.inner.pos += 1;
            coeff = if self.inner.eat(&Tok::Slash) {
                let dpos = self.inner.here();
                match self.inner.bump() {
                    Some(Tok::Int(d)) => self.inner.field.fraction(&n, d)?,
                    _ => {
                        return Err(Error::SyntaxError {
                            pos: dpos,
                            msg: "expected integer denominator after '/'".into(),
                        })
                    }
                }
            } else {
                self.inner.field.from_bigint(&n)
            };
            if !self.inner.eat(&Tok::Star) {
                return Err(Error::SyntaxError {
                    pos: self.inner.here(),
                    msg: "expected '*' after functional coefficient".into(),
                });
            }
        }
        if negate {
            coeff = self.inner.field.neg(&coeff);
        }
        if !self.inner.eat(&Tok::LParen) {
            return Err(Error::SyntaxError {
                pos: self.inner.here(),
                msg: "expected '(' opening a dual monomial".into(),
            });
        }
        let poly = self.inner.expr()?;
        if !self.inner.eat(&Tok::RParen) {
            return Err(Error::SyntaxError {
                pos: self.inner.here(),
                msg: "expected ')' after dual monomial".into(),
            });
        }
        if !self.inner.eat(&Tok::Star) {
            return Err(Error::SyntaxError {
                pos: self.inner.here(),
                msg: "expected '*' marking a dual monomial".into(),
            });
        }
        let (mono, inner_coeff) = single_term(&poly)?;
        let total = self.inner.field.mul(&coeff, &inner_coeff);
        h.add_term(block, mono, total)
    }
}

fn single_term(p: &Polynomial) -> Result<(Monomial, Scalar), Error> {
    match p.terms() {
        [(m, c)] => Ok((m.clone(), c.clone())),
        _ => Err(Error::SyntaxError {
            pos: 0,
            msg: "dual monomial must reduce to a single term".into(),
        }),
    }
}
