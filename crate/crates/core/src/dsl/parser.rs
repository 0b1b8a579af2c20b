use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::{Arg, Assignment, Call, Output, Program, Value};
use super::error::{DslError, DslErrorKind, Span};
use super::lexer::{tokenize, Tok, Token};

const OUTPUT: &str = "output";

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

fn parse_error(span: Span, msg: impl Into<String>) -> DslError {
    DslError::new(DslErrorKind::ParseError, span, msg)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        self.toks.get(self.pos + k).map_or(&Tok::Eof, |t| &t.tok)
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<Token, DslError> {
        let t = self.next();
        if core::mem::discriminant(&t.tok) == core::mem::discriminant(want) {
            Ok(t)
        } else {
            Err(parse_error(t.span, format!("expected {what}, found {}", t.tok.describe())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), DslError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            other => Err(parse_error(t.span, format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn end_of_statement(&mut self) -> Result<(), DslError> {
        let t = self.next();
        match t.tok {
            Tok::Newline | Tok::Eof => Ok(()),
            other => Err(parse_error(
                t.span,
                format!("expected end of line after statement, found {}", other.describe()),
            )),
        }
    }

    fn value(&mut self) -> Result<Arg, DslError> {
        let t = self.next();
        let value = match t.tok {
            Tok::Str(s) => Value::Str(s),
            Tok::Number(v) => Value::Number(v),
            Tok::Ident(s) => {
                if matches!(self.peek().tok, Tok::LParen) {
                    return Err(parse_error(
                        t.span,
                        format!("nested call to `{s}` is not allowed; assign it to a variable first"),
                    ));
                }
                Value::Ident(s)
            }
            other => {
                return Err(parse_error(
                    t.span,
                    format!("expected a string, number or name, found {}", other.describe()),
                ))
            }
        };
        Ok(Arg { value, span: t.span })
    }

    fn call(&mut self) -> Result<Call, DslError> {
        let (function, span) = self.ident("function name")?;
        self.expect(&Tok::LParen, "`(` after function name")?;
        let mut args = Vec::new();
        let mut kwargs: Vec<(String, Arg)> = Vec::new();
        let mut seen = BTreeSet::new();
        loop {
            if matches!(self.peek().tok, Tok::RParen) {
                self.next();
                break;
            }
            let arg_span = self.peek().span;
            if let (Tok::Ident(name), Tok::Equals) = (&self.peek().tok, self.peek_at(1)) {
                let name = name.clone();
                self.next();
                self.next();
                let value = self.value()?;
                if !seen.insert(name.clone()) {
                    return Err(parse_error(arg_span, format!("keyword argument `{name}` given more than once in call to `{function}`")));
                }
                kwargs.push((name, value));
            } else {
                let value = self.value()?;
                if !kwargs.is_empty() {
                    return Err(parse_error(
                        arg_span,
                        format!("positional argument follows keyword argument in call to `{function}`"),
                    ));
                }
                args.push(value);
            }
            let t = self.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => break,
                other => {
                    return Err(parse_error(
                        t.span,
                        format!("expected `,` or `)` in call to `{function}`, found {}", other.describe()),
                    ))
                }
            }
        }
        Ok(Call {
            function,
            args,
            kwargs,
            span,
        })
    }
}

/// Parses program text into a [`Program`].
pub fn parse(text: &str) -> Result<Program, DslError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut statements: Vec<Assignment> = Vec::new();
    let mut output: Option<Output> = None;
    let mut names = BTreeSet::new();
    loop {
        let t = p.peek().clone();
        match &t.tok {
            Tok::Eof => break,
            Tok::Newline => {
                p.next();
                continue;
            }
            _ => {}
        }
        if let Some(prev) = &output {
            if matches!(&t.tok, Tok::Ident(s) if s == OUTPUT) && matches!(p.peek_at(1), Tok::LParen) {
                return Err(DslError::new(
                    DslErrorKind::DuplicateOutput,
                    t.span,
                    format!("second output statement; the program already outputs `{}` at {}", prev.name, prev.span),
                ));
            }
            return Err(parse_error(t.span, "output(...) must be the last statement"));
        }
        let (name, span) = p.ident("a variable name or output(...)")?;
        if name == OUTPUT && matches!(p.peek().tok, Tok::LParen) {
            p.next();
            let (target, tspan) = p.ident("a variable name inside output(...)")?;
            p.expect(&Tok::RParen, "`)` to close output(...)")?;
            p.end_of_statement()?;
            output = Some(Output { name: target, span: tspan });
            continue;
        }
        if name == OUTPUT {
            return Err(parse_error(span, "`output` is reserved and cannot be assigned"));
        }
        p.expect(&Tok::Equals, &format!("`=` after `{name}`"))?;
        let call = p.call()?;
        p.end_of_statement()?;
        if !names.insert(name.clone()) {
            return Err(parse_error(
                span,
                format!("variable `{name}` is assigned twice; each name may be assigned once"),
            ));
        }
        statements.push(Assignment { name, call, span });
    }
    let output = output.ok_or_else(|| {
        DslError::new(
            DslErrorKind::MissingOutput,
            p.peek().span,
            "program has no output(...) statement",
        )
    })?;
    Ok(Program { statements, output })
}
