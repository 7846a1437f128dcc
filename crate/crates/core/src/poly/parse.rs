//! Recursive-descent parser for polynomial text.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := base ('^' uint)?
//! base   := number | var | '(' expr ')'
//! var    := 'x' uint            (1-based)
//! ```
//!
//! Unary minus binds looser than `^`, so `-x1^2` is `-(x1^2)`. Products need
//! an explicit `*`.

use super::{MultiPoly, PolyError};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num { value: f64, integer: Option<u32> },
    Var(usize),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    /// Returns the token and its starting byte offset.
    fn next(&mut self) -> Result<(Tok, usize), PolyError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&b) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let simple = match b {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, start));
        }
        if b == b'x' {
            self.pos += 1;
            let n = self.digits();
            if n == 0 {
                return Err(syntax(start, "expected variable index after 'x'"));
            }
            let text = std::str::from_utf8(&self.src[start + 1..self.pos]).unwrap();
            let index = text
                .parse::<usize>()
                .map_err(|_| syntax(start, "variable index too large"))?;
            return Ok((Tok::Var(index), start));
        }
        if b.is_ascii_digit() || b == b'.' {
            let int_digits = self.digits();
            let mut integer = true;
            if self.src.get(self.pos) == Some(&b'.') {
                integer = false;
                self.pos += 1;
                let frac = self.digits();
                if int_digits == 0 && frac == 0 {
                    return Err(syntax(start, "malformed number"));
                }
            }
            if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
                integer = false;
                self.pos += 1;
                if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                    self.pos += 1;
                }
                if self.digits() == 0 {
                    return Err(syntax(start, "malformed exponent in number"));
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let value: f64 = text
                .parse()
                .map_err(|_| syntax(start, "malformed number"))?;
            if !value.is_finite() {
                return Err(syntax(start, "number literal out of range"));
            }
            let integer = if integer { text.parse::<u32>().ok() } else { None };
            return Ok((Tok::Num { value, integer }, start));
        }
        let ch = std::str::from_utf8(&self.src[start..])
            .ok()
            .and_then(|s| s.chars().next())
            .unwrap_or('?');
        Err(syntax(start, &format!("unexpected character '{ch}'")))
    }
}

fn syntax(offset: usize, message: &str) -> PolyError {
    PolyError::Syntax {
        offset,
        message: message.to_string(),
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn bump(&mut self) -> Result<(), PolyError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.bump()?;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump()?;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.unary()?;
        while self.tok == Tok::Star {
            self.bump()?;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, PolyError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.base()?;
        if self.tok != Tok::Caret {
            return Ok(base);
        }
        self.bump()?;
        match self.tok {
            Tok::Num {
                integer: Some(k), ..
            } => {
                self.bump()?;
                Ok(base.pow(k))
            }
            Tok::Num { .. } | Tok::Minus => Err(PolyError::BadExponent { offset: self.at }),
            _ => Err(syntax(self.at, "expected exponent after '^'")),
        }
    }

    fn base(&mut self) -> Result<MultiPoly, PolyError> {
        match self.tok {
            Tok::Num { value, .. } => {
                self.bump()?;
                Ok(MultiPoly::constant(self.nvars, value))
            }
            Tok::Var(index) => {
                if index == 0 || index > self.nvars {
                    return Err(PolyError::VariableOutOfRange {
                        offset: self.at,
                        index,
                        nvars: self.nvars,
                    });
                }
                self.bump()?;
                Ok(MultiPoly::var(self.nvars, index - 1))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                if self.tok != Tok::RParen {
                    return Err(syntax(self.at, "expected ')'"));
                }
                self.bump()?;
                Ok(inner)
            }
            Tok::End => Err(syntax(self.at, "unexpected end of input")),
            _ => Err(syntax(self.at, "expected number, variable or '('")),
        }
    }
}

/// Parses and fully expands polynomial text in variables `x1..x{nvars}`.
pub fn parse(text: &str, nvars: usize) -> Result<MultiPoly, PolyError> {
    if nvars == 0 {
        return Err(PolyError::NoVariables);
    }
    let mut parser = Parser {
        lexer: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::End,
        at: 0,
        nvars,
    };
    parser.bump()?;
    let p = parser.expr()?;
    match parser.tok {
        Tok::End => Ok(p),
        Tok::Var(_) | Tok::Num { .. } | Tok::LParen => Err(syntax(
            parser.at,
            "implicit multiplication is not allowed; use '*'",
        )),
        _ => Err(syntax(parser.at, "unexpected token")),
    }
}
