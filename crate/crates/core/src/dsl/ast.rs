use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::error::Span;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Str(String),
    /// Always finite.
    Number(f64),
    Ident(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arg {
    pub value: Value,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Call {
    pub function: String,
    pub args: Vec<Arg>,
    pub kwargs: Vec<(String, Arg)>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    pub name: String,
    pub call: Call,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub statements: Vec<Assignment>,
    pub output: Output,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Ident(s) => f.write_str(s),
            Value::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.function)?;
        let mut first = true;
        for a in &self.args {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}", a.value)?;
        }
        for (k, a) in &self.kwargs {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{k}={}", a.value)?;
        }
        f.write_str(")")
    }
}

/// Canonical source form; parsing it yields an equal program modulo spans.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{} = {}", s.name, s.call)?;
        }
        writeln!(f, "output({})", self.output.name)
    }
}

impl Program {
    /// Copy with every span zeroed, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let zero = Span::default();
        let arg = |a: &Arg| Arg {
            value: a.value.clone(),
            span: zero,
        };
        Program {
            statements: self
                .statements
                .iter()
                .map(|s| Assignment {
                    name: s.name.clone(),
                    span: zero,
                    call: Call {
                        function: s.call.function.clone(),
                        args: s.call.args.iter().map(arg).collect(),
                        kwargs: s.call.kwargs.iter().map(|(k, a)| (k.clone(), arg(a))).collect(),
                        span: zero,
                    },
                })
                .collect(),
            output: Output {
                name: self.output.name.clone(),
                span: zero,
            },
        }
    }
}
