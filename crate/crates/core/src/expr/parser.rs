//! Lexer and recursive-descent parser for the function mini-language.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := NUMBER | IDENT "(" expr ")" | IDENT | "(" expr ")"
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` while `x^-2` is accepted as `x^(-2)`.

use super::{BinOp, Expr, Func};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Caret => "`^`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(source: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            tokens.push((tok, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // exponent only if followed by digits, otherwise `e` starts an identifier
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &source[start..i];
            let value: f64 = text
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
            tokens.push((Token::Number(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            tokens.push((Token::Ident(source[start..i].to_string()), start));
            continue;
        }
        let ch = source[start..].chars().next().unwrap_or('?');
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    tokens.push((Token::End, source.len()));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Token) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.offset(),
                format!(
                    "expected {}, found {}",
                    want.describe(),
                    self.peek().describe()
                ),
            ))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Token::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Token::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let offset = self.offset();
        match self.bump() {
            Token::Number(v) => Ok(Expr::Num(v)),
            Token::Ident(name) => {
                if *self.peek() == Token::LParen {
                    let func = Func::from_name(&name).ok_or(Error::UnknownFunction {
                        name: name.clone(),
                        offset,
                    })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else if name == "x" {
                    Ok(Expr::X)
                } else if Func::from_name(&name).is_some() {
                    Err(syntax(
                        self.offset(),
                        format!("expected `(` after function `{name}`"),
                    ))
                } else {
                    Ok(Expr::Param(name))
                }
            }
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            other => Err(syntax(
                offset,
                format!("expected an operand, found {}", other.describe()),
            )),
        }
    }
}

/// Parses `source` into an expression tree.
pub fn parse(source: &str) -> Result<Expr> {
    if source.trim().is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let tokens = lex(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let expr = parser.expr()?;
    match parser.peek() {
        Token::End => Ok(expr),
        Token::RParen => Err(syntax(parser.offset(), "unbalanced `)`")),
        other => Err(syntax(
            parser.offset(),
            format!("unexpected {} after expression", other.describe()),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    #[test]
    fn single_variable() {
        assert_eq!(parse("x").unwrap(), Expr::X);
        assert_eq!(parse("  x ").unwrap(), Expr::X);
    }

    #[test]
    fn product_of_power_and_log() {
        let want = bin(
            BinOp::Mul,
            bin(BinOp::Pow, Expr::X, Expr::Num(2.0)),
            Expr::Call(Func::Ln, Box::new(Expr::X)),
        );
        assert_eq!(parse("x^2 * ln(x)").unwrap(), want);
    }

    #[test]
    fn unbalanced_paren_offset() {
        match parse("ln(x") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse("x)") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("((x)"),
            Err(Error::Syntax { offset: 4, .. })
        ));
    }

    #[test]
    fn unknown_function() {
        match parse("2 * sin(x)") {
            Err(Error::UnknownFunction { name, offset }) => {
                assert_eq!(name, "sin");
                assert_eq!(offset, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_associativity() {
        // left associative subtraction and division
        assert_eq!(
            parse("x-1-2").unwrap(),
            bin(
                BinOp::Sub,
                bin(BinOp::Sub, Expr::X, Expr::Num(1.0)),
                Expr::Num(2.0)
            )
        );
        assert_eq!(
            parse("x/2/3").unwrap(),
            bin(
                BinOp::Div,
                bin(BinOp::Div, Expr::X, Expr::Num(2.0)),
                Expr::Num(3.0)
            )
        );
        // right associative power
        assert_eq!(
            parse("x^2^3").unwrap(),
            bin(
                BinOp::Pow,
                Expr::X,
                bin(BinOp::Pow, Expr::Num(2.0), Expr::Num(3.0))
            )
        );
        // power binds tighter than unary minus
        assert_eq!(
            parse("-x^2").unwrap(),
            Expr::Neg(Box::new(bin(BinOp::Pow, Expr::X, Expr::Num(2.0))))
        );
        assert_eq!(
            parse("x^-2").unwrap(),
            bin(BinOp::Pow, Expr::X, Expr::Neg(Box::new(Expr::Num(2.0))))
        );
        assert_eq!(
            parse("1+2*x").unwrap(),
            bin(
                BinOp::Add,
                Expr::Num(1.0),
                bin(BinOp::Mul, Expr::Num(2.0), Expr::X)
            )
        );
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1.5e-3").unwrap(), Expr::Num(1.5e-3));
        assert_eq!(parse(".25").unwrap(), Expr::Num(0.25));
        assert_eq!(parse("3.").unwrap(), Expr::Num(3.0));
        assert_eq!(parse("2E+2").unwrap(), Expr::Num(200.0));
        // `2e` is a number followed by a parameter, which is not valid juxtaposition
        assert!(matches!(parse("2e"), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse("."), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn parameters_and_errors() {
        assert_eq!(parse("s").unwrap(), Expr::Param("s".into()));
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("x +"), Err(Error::Syntax { offset: 3, .. })));
        assert!(matches!(
            parse("x # 2"),
            Err(Error::Syntax { offset: 2, .. })
        ));
        assert!(matches!(parse("ln x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x(2)"), Err(Error::UnknownFunction { .. })));
    }
}
