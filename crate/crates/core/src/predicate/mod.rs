//! Conditions over a single k-bit unsigned input `x`.
//!
//! A condition is written in a small expression language (see [`parser`]),
//! evaluated with wrapping 64-bit unsigned arithmetic, and compiled into an
//! [`OracleTable`] holding the indicator bit for every input.

pub mod ast;
mod oracle;
pub mod parser;

use std::fmt;

pub use ast::{BinOp, Expr, Sort};
pub use oracle::{build_oracle_table, exact_fraction, ExactFraction, OracleTable};
pub use parser::{ParseError, ParseErrorKind};

use crate::error::{Error, Result};
use crate::width::Width;

/// A boolean condition over `x`, tied to the register width it was parsed for.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PredicateAst {
    root: Expr,
    width: Width,
}

impl PredicateAst {
    /// Wraps an already-built tree, checking that it is a well-sorted boolean.
    pub fn new(root: Expr, width: Width) -> Result<Self> {
        match root.sort_check() {
            Ok(Sort::Bool) => Ok(PredicateAst { root, width }),
            Ok(Sort::Int) => Err(ParseError {
                offset: 0,
                kind: ParseErrorKind::Sort("predicate root must be boolean".into()),
            }
            .into()),
            Err(m) => Err(ParseError {
                offset: 0,
                kind: ParseErrorKind::Sort(m.to_string()),
            }
            .into()),
        }
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    pub fn width(&self) -> Width {
        self.width
    }

    /// Indicator `y(x)`: true iff the condition holds at `x`. Bits of `x`
    /// above the register width are ignored.
    pub fn eval(&self, x: u64) -> bool {
        self.root.value(x & self.width.mask()) != 0
    }
}

impl fmt::Display for PredicateAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

pub fn parse_predicate(text: &str, width: u32) -> Result<PredicateAst> {
    let width = Width::new(width)?;
    let root = parser::parse_expr(text).map_err(Error::Parse)?;
    Ok(PredicateAst { root, width })
}

/// Returns the indicator bit (0 or 1) of `ast` at `x`.
pub fn eval_predicate(ast: &PredicateAst, x: u64) -> u8 {
    u8::from(ast.eval(x))
}
