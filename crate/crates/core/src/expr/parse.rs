use super::{BinOp, Expr, Func, NamedConst};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }

    fn syntax(offset: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, integer: Option<i64> },
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut integer = true;
            if i < bytes.len() && bytes[i] == b'.' {
                integer = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // Exponent only when a digit follows (optionally signed); a bare
            // `e` after a number is the named constant and a syntax error.
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    integer = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit
                .parse()
                .map_err(|_| ParseError::syntax(start, format!("bad number `{lit}`")))?;
            let integer = if integer { lit.parse::<i64>().ok() } else { None };
            out.push(Token {
                tok: Tok::Num { value, integer },
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(ParseError::syntax(i, format!("unexpected character `{ch}`")));
            }
        };
        out.push(Token { tok, offset: i });
        i += 1;
    }
    out.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok == want {
            Ok(())
        } else {
            Err(ParseError::syntax(t.offset, format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok != Tok::Op('-') {
            return self.power();
        }
        self.bump();
        // `-2` is a negative literal unless the literal is a power base.
        if let Tok::Num { value, .. } = *self.peek_at(0) {
            if *self.peek_at(1) != Tok::Op('^') {
                self.bump();
                return Ok(Expr::Const(-value));
            }
        }
        Ok(Expr::Neg(Box::new(self.unary()?)))
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let n = self.exponent()?;
        if self.peek().tok == Tok::Op('^') {
            return Err(ParseError::syntax(
                self.peek().offset,
                "chained powers need parentheses",
            ));
        }
        Ok(base.powi(n))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let parens = self.peek().tok == Tok::LParen;
        if parens {
            self.bump();
        }
        let negative = self.peek().tok == Tok::Op('-');
        if negative {
            self.bump();
        }
        let t = self.bump();
        let n = match t.tok {
            Tok::Num { integer: Some(n), .. } => n,
            Tok::Num { .. } => return Err(ParseError::syntax(t.offset, "integer exponent required")),
            _ => return Err(ParseError::syntax(t.offset, "expected integer exponent")),
        };
        let n = if negative { -n } else { n };
        let n = i32::try_from(n).map_err(|_| ParseError::syntax(t.offset, "exponent out of range"))?;
        if parens {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(n)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num { value, .. } => Ok(Expr::Const(value)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::call(func, arg));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Named(NamedConst::Pi)),
                    "e" => Ok(Expr::Named(NamedConst::E)),
                    _ => Err(ParseError::UnknownIdentifier { offset: t.offset, name }),
                }
            }
            Tok::End => Err(ParseError::syntax(t.offset, "unexpected end of input")),
            Tok::Op(c) => Err(ParseError::syntax(t.offset, format!("unexpected `{c}`"))),
            Tok::RParen => Err(ParseError::syntax(t.offset, "unexpected `)`")),
        }
    }
}

/// Parses `text` into an expression tree.
///
/// Precedence from tightest: `^` (integer exponents), unary minus, `* /`,
/// `+ -`; binary operators associate to the left. The only variable is `x`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::syntax(0, "empty expression"));
    }
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    let t = p.peek();
    if t.tok != Tok::End {
        return Err(ParseError::syntax(t.offset, "unexpected trailing input"));
    }
    Ok(e)
}
