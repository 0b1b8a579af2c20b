use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::error::{DslError, DslErrorKind, Span};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LParen,
    RParen,
    Comma,
    Equals,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(v) => format!("number `{v}`"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: u32,
    column: u32,
    depth: u32,
}

fn parse_error(span: Span, msg: impl Into<String>) -> DslError {
    DslError::new(DslErrorKind::ParseError, span, msg)
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.column)
    }

    fn string(&mut self, quote: char, start: Span) -> Result<Tok, DslError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(parse_error(start, "unterminated string literal")),
                Some(c) if c == quote => return Ok(Tok::Str(s)),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c @ ('\\' | '"' | '\'')) => s.push(c),
                    Some(c) => return Err(parse_error(start, format!("unknown escape `\\{c}` in string"))),
                    None => return Err(parse_error(start, "unterminated string literal")),
                },
                Some(c) => s.push(c),
            }
        }
    }

    fn number(&mut self, first: char, start: Span) -> Result<Tok, DslError> {
        let mut text = String::new();
        text.push(first);
        let mut seen_exp = false;
        while let Some(&c) = self.chars.peek() {
            let take = c.is_ascii_digit()
                || c == '.'
                || (!seen_exp && (c == 'e' || c == 'E'))
                || ((c == '+' || c == '-') && matches!(text.chars().last(), Some('e' | 'E')));
            if !take {
                break;
            }
            seen_exp |= c == 'e' || c == 'E';
            text.push(c);
            self.bump();
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Tok::Number(v)),
            Ok(_) => Err(parse_error(start, format!("number `{text}` is out of range"))),
            Err(_) => Err(parse_error(start, format!("malformed number `{text}`"))),
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, DslError> {
    let mut lx = Lexer {
        chars: src.chars().peekable(),
        line: 1,
        column: 1,
        depth: 0,
    };
    let mut out = Vec::new();
    loop {
        let span = lx.span();
        let Some(c) = lx.bump() else {
            out.push(Token { tok: Tok::Eof, span });
            return Ok(out);
        };
        let tok = match c {
            ' ' | '\t' | '\r' => continue,
            '#' => {
                while lx.chars.peek().is_some_and(|c| *c != '\n') {
                    lx.bump();
                }
                continue;
            }
            '\n' => {
                // line breaks inside an argument list are continuation
                if lx.depth > 0 || matches!(out.last(), None | Some(Token { tok: Tok::Newline, .. })) {
                    continue;
                }
                Tok::Newline
            }
            '(' => {
                lx.depth += 1;
                Tok::LParen
            }
            ')' => {
                lx.depth = lx.depth.saturating_sub(1);
                Tok::RParen
            }
            ',' => Tok::Comma,
            '=' => Tok::Equals,
            '"' | '\'' => lx.string(c, span)?,
            c if c.is_ascii_digit() || c == '.' => lx.number(c, span)?,
            '-' if lx.chars.peek().is_some_and(|n| n.is_ascii_digit() || *n == '.') => lx.number(c, span)?,
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                s.push(c);
                while let Some(&n) = lx.chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        s.push(n);
                        lx.bump();
                    } else {
                        break;
                    }
                }
                Tok::Ident(s)
            }
            c => return Err(parse_error(span, format!("unexpected character `{c}`"))),
        };
        out.push(Token { tok, span });
    }
}
