//! Tokenizer shared by the CCS and RCCS readers.

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Num(u32),
    Tilde,
    Dot,
    Plus,
    Bar,
    Triangle,
    LParen,
    RParen,
    Backslash,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Comma,
    Fork,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Num(n) => format!("number `{n}`"),
            Tok::Tilde => "`~`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Triangle => "`|>`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Backslash => "`\\`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Fork => "`Y`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '~' => Some(Tok::Tilde),
            '.' => Some(Tok::Dot),
            '+' => Some(Tok::Plus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '\\' => Some(Tok::Backslash),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            ',' => Some(Tok::Comma),
            'Y' => Some(Tok::Fork),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        if c == '|' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Spanned { tok: Tok::Triangle, line: l0, col: c0 });
                i += 2;
                col += 2;
            } else {
                out.push(Spanned { tok: Tok::Bar, line: l0, col: c0 });
                i += 1;
                col += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse::<u32>().map_err(|_| ParseError::Syntax {
                line: l0,
                col: c0,
                msg: format!("number `{text}` out of range"),
            })?;
            col += i - start;
            out.push(Spanned { tok: Tok::Num(n), line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_lowercase() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Spanned {
                tok: Tok::Name(chars[start..i].iter().collect()),
                line: l0,
                col: c0,
            });
            continue;
        }
        return Err(ParseError::Syntax {
            line: l0,
            col: c0,
            msg: format!("unexpected character `{c}`"),
        });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Cursor { toks: tokenize(src)?, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub(crate) fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.col)
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected {}", self.peek().describe())))
        }
    }
}
