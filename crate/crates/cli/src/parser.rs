//! Polynomial expression language for vector-field components.
//!
//! ```text
//! poly   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := NUMBER | VAR | factor '^' INT | '(' poly ')' | '-' factor
//! VAR    := 'x' INT        (1-based, at most d)
//! ```

use srheat_core::vf_analyzer::Polynomial;
use thiserror::Error;

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Var(usize),
    Int(u64),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("number {v}"),
            Token::Int(v) => format!("number {v}"),
            Token::Var(i) => format!("variable x{i}"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().peekable(),
            src,
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, c)) = next {
            if c == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
        }
        next
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }

    fn digits(&mut self) -> usize {
        let mut count = 0;
        while matches!(self.chars.peek(), Some((_, c)) if c.is_ascii_digit()) {
            self.bump();
            count += 1;
        }
        count
    }

    /// Next token with its starting position.
    fn next(&mut self) -> Result<(Token, usize, usize), ParseError> {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.bump();
        }
        let (line, column) = (self.line, self.column);
        let Some(&(start, c)) = self.chars.peek() else {
            return Ok((Token::End, line, column));
        };
        let simple = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '^' => Some(Token::Caret),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            self.bump();
            return Ok((tok, line, column));
        }
        if c == 'x' {
            self.bump();
            let from = self.chars.peek().map_or(self.src.len(), |&(i, _)| i);
            if self.digits() == 0 {
                return Err(self.error(line, column, "expected a variable index after 'x'"));
            }
            let to = self.chars.peek().map_or(self.src.len(), |&(i, _)| i);
            let index: usize = self.src[from..to]
                .parse()
                .map_err(|_| self.error(line, column, "variable index out of range"))?;
            return Ok((Token::Var(index), line, column));
        }
        if c.is_ascii_digit() || c == '.' {
            let int_digits = self.digits();
            let mut is_int = true;
            if matches!(self.chars.peek(), Some((_, '.'))) {
                self.bump();
                is_int = false;
                if int_digits + self.digits() == 0 {
                    return Err(self.error(line, column, "malformed number"));
                }
            }
            if matches!(self.chars.peek(), Some((_, 'e' | 'E'))) {
                self.bump();
                is_int = false;
                if matches!(self.chars.peek(), Some((_, '+' | '-'))) {
                    self.bump();
                }
                if self.digits() == 0 {
                    return Err(self.error(line, column, "malformed exponent in number"));
                }
            }
            let to = self.chars.peek().map_or(self.src.len(), |&(i, _)| i);
            let text = &self.src[start..to];
            if is_int {
                if let Ok(v) = text.parse::<u64>() {
                    return Ok((Token::Int(v), line, column));
                }
            }
            let v: f64 = text
                .parse()
                .map_err(|_| self.error(line, column, format!("malformed number '{text}'")))?;
            return Ok((Token::Number(v), line, column));
        }
        Err(self.error(line, column, format!("unexpected character '{c}'")))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    token: Token,
    line: usize,
    column: usize,
    d: usize,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(), ParseError> {
        let (t, l, c) = self.lexer.next()?;
        self.token = t;
        self.line = l;
        self.column = c;
        Ok(())
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn poly(&mut self) -> Result<Polynomial<f64>, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.token {
                Token::Plus => {
                    self.advance()?;
                    acc = acc.add(&self.term()?);
                }
                Token::Minus => {
                    self.advance()?;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial<f64>, ParseError> {
        let mut acc = self.factor()?;
        while self.token == Token::Star {
            self.advance()?;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    /// `'-' factor | power`; the minus covers a following power, so
    /// `-x1^2` is `-(x1^2)`.
    fn factor(&mut self) -> Result<Polynomial<f64>, ParseError> {
        if self.token == Token::Minus {
            self.advance()?;
            return Ok(self.factor()?.scale(&-1.0));
        }
        let mut base = self.atom()?;
        while self.token == Token::Caret {
            self.advance()?;
            match self.token {
                Token::Int(k) => {
                    let k = u32::try_from(k).map_err(|_| self.error("exponent too large"))?;
                    base = base.pow(k);
                    self.advance()?;
                }
                Token::Minus => return Err(self.error("negative exponents are not allowed")),
                ref t => {
                    return Err(self.error(format!(
                        "expected a non-negative integer exponent, found {}",
                        t.describe()
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial<f64>, ParseError> {
        let p = match self.token {
            Token::Number(v) => Polynomial::constant(self.d, v),
            Token::Int(v) => Polynomial::constant(self.d, v as f64),
            Token::Var(i) => {
                if i == 0 || i > self.d {
                    return Err(self.error(format!(
                        "unknown variable x{i}: variables are x1..x{}",
                        self.d
                    )));
                }
                Polynomial::var(self.d, i - 1)
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.poly()?;
                if self.token != Token::RParen {
                    return Err(self.error(format!("expected ')', found {}", self.token.describe())));
                }
                inner
            }
            ref t => return Err(self.error(format!("expected an operand, found {}", t.describe()))),
        };
        self.advance()?;
        Ok(p)
    }
}

/// Parses `src` into an expanded polynomial in `x1..x{d}`.
pub fn parse_polynomial(src: &str, d: usize) -> Result<Polynomial<f64>, ParseError> {
    let mut parser = Parser {
        lexer: Lexer::new(src),
        token: Token::End,
        line: 1,
        column: 1,
        d,
    };
    parser.advance()?;
    if parser.token == Token::End {
        return Err(parser.error("empty expression"));
    }
    let p = parser.poly()?;
    if parser.token != Token::End {
        return Err(parser.error(format!("unexpected {}", parser.token.describe())));
    }
    Ok(p)
}
