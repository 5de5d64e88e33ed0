//! Recursive-descent parser for the predicate language.
//!
//! ```text
//! expr  := or
//! or    := and {"||" and}
//! and   := cmp {"&&" cmp}
//! cmp   := bor [("=="|"!="|"<"|"<="|">"|">=") bor]
//! bor   := bxor {"|" bxor}
//! bxor  := band {"^" band}
//! band  := shift {"&" shift}
//! shift := add {("<<"|">>") add}
//! add   := mul {("+"|"-") mul}
//! mul   := unary {("*"|"mod") unary}
//! unary := ["!"] atom
//! atom  := "x" | decimal | "0x" hex | "(" expr ")"
//! ```
//!
//! Sorts are checked while parsing so errors can point at the offending
//! operand. A predicate that is arithmetic as a whole is read as `e != 0`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::ast::{BinOp, Expr, Sort};

const MAX_DEPTH: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} at byte {offset}: {kind}", kind.category())]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax {
        found: String,
        expected: Vec<&'static str>,
    },
    Sort(String),
    LiteralOverflow,
    TooDeep,
}

impl ParseErrorKind {
    pub fn category(&self) -> &'static str {
        match self {
            ParseErrorKind::Syntax { .. } | ParseErrorKind::TooDeep => "syntax error",
            ParseErrorKind::Sort(_) => "type error",
            ParseErrorKind::LiteralOverflow => "literal overflow",
        }
    }
}

fn quote(label: &str) -> String {
    match label {
        "integer literal" | "end of input" => label.to_string(),
        sym => format!("`{sym}`"),
    }
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax { found, expected } => {
                write!(f, "found {found}, expected ")?;
                let quoted: Vec<String> = expected.iter().map(|e| quote(e)).collect();
                match quoted.as_slice() {
                    [one] => f.write_str(one),
                    many => write!(f, "one of {}", many.join(", ")),
                }
            }
            ParseErrorKind::Sort(msg) => f.write_str(msg),
            ParseErrorKind::LiteralOverflow => f.write_str("integer literal does not fit in 64 bits"),
            ParseErrorKind::TooDeep => write!(f, "expression nested deeper than {MAX_DEPTH} levels"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    X,
    Mod,
    Num(u64),
    Overflow,
    LParen,
    RParen,
    Bang,
    Op(BinOp),
    Unknown(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::X => "`x`".into(),
            Tok::Mod => "`mod`".into(),
            Tok::Num(v) => format!("literal `{v}`"),
            Tok::Overflow => "oversized literal".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Op(op) => format!("`{op}`"),
            Tok::Unknown(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn lex(src: &str) -> Vec<Token> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = bytes.get(i..i + 2);
        let (tok, len) = match (c, two) {
            (_, Some(b"||")) => (Tok::Op(BinOp::Or), 2),
            (_, Some(b"&&")) => (Tok::Op(BinOp::And), 2),
            (_, Some(b"==")) => (Tok::Op(BinOp::Eq), 2),
            (_, Some(b"!=")) => (Tok::Op(BinOp::Ne), 2),
            (_, Some(b"<=")) => (Tok::Op(BinOp::Le), 2),
            (_, Some(b">=")) => (Tok::Op(BinOp::Ge), 2),
            (_, Some(b"<<")) => (Tok::Op(BinOp::Shl), 2),
            (_, Some(b">>")) => (Tok::Op(BinOp::Shr), 2),
            (b'<', _) => (Tok::Op(BinOp::Lt), 1),
            (b'>', _) => (Tok::Op(BinOp::Gt), 1),
            (b'|', _) => (Tok::Op(BinOp::BitOr), 1),
            (b'^', _) => (Tok::Op(BinOp::BitXor), 1),
            (b'&', _) => (Tok::Op(BinOp::BitAnd), 1),
            (b'+', _) => (Tok::Op(BinOp::Add), 1),
            (b'-', _) => (Tok::Op(BinOp::Sub), 1),
            (b'*', _) => (Tok::Op(BinOp::Mul), 1),
            (b'!', _) => (Tok::Bang, 1),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b'0', Some(b"0x")) => {
                let digits = bytes[i + 2..].iter().take_while(|b| b.is_ascii_hexdigit()).count();
                if digits == 0 {
                    (Tok::Unknown("0x".into()), 2)
                } else {
                    let text = &src[i + 2..i + 2 + digits];
                    let tok = u64::from_str_radix(text, 16).map_or(Tok::Overflow, Tok::Num);
                    (tok, 2 + digits)
                }
            }
            (b'0'..=b'9', _) => {
                let digits = bytes[i..].iter().take_while(|b| b.is_ascii_digit()).count();
                let tok = src[i..i + digits].parse::<u64>().map_or(Tok::Overflow, Tok::Num);
                (tok, digits)
            }
            (b'a'..=b'z' | b'A'..=b'Z' | b'_', _) => {
                let n = bytes[i..]
                    .iter()
                    .take_while(|b| b.is_ascii_alphanumeric() || **b == b'_')
                    .count();
                let tok = match &src[i..i + n] {
                    "x" => Tok::X,
                    "mod" => Tok::Mod,
                    other => Tok::Unknown(other.to_string()),
                };
                (tok, n)
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                (Tok::Unknown(ch.to_string()), ch.len_utf8())
            }
        };
        out.push(Token { tok, offset: start });
        i += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: src.len(),
    });
    out
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Alternatives tried at `pos` without success.
    expected: BTreeSet<&'static str>,
    open_parens: Vec<usize>,
}

/// Parsed subtree with its sort and starting offset.
struct Node {
    expr: Expr,
    sort: Sort,
    offset: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
            self.expected.clear();
        }
        t
    }

    fn eat(&mut self, tok: &Tok, label: &'static str) -> bool {
        if &self.peek().tok == tok {
            self.advance();
            true
        } else {
            self.expected.insert(label);
            false
        }
    }

    /// Consumes one of `ops` if present.
    fn eat_op(&mut self, ops: &[BinOp]) -> Option<BinOp> {
        if let Tok::Op(op) = self.peek().tok {
            if ops.contains(&op) {
                self.advance();
                return Some(op);
            }
        }
        for op in ops {
            self.expected.insert(op.symbol());
        }
        None
    }

    fn syntax_error(&self) -> ParseError {
        let tok = self.peek();
        let offset = match (&tok.tok, self.open_parens.last()) {
            // Input ended inside a group: blame the unclosed parenthesis.
            (Tok::Eof, Some(&open)) => open,
            _ => tok.offset,
        };
        ParseError {
            offset,
            kind: ParseErrorKind::Syntax {
                found: tok.tok.describe(),
                expected: self.expected.iter().copied().collect(),
            },
        }
    }

    fn expect_sort(node: &Node, want: Sort, context: &str) -> Result<(), ParseError> {
        if node.sort == want {
            Ok(())
        } else {
            Err(ParseError {
                offset: node.offset,
                kind: ParseErrorKind::Sort(format!(
                    "operand of `{context}` must be {want}, found {}",
                    node.sort
                )),
            })
        }
    }

    /// Parses a left-associative chain of `ops` over `next`.
    fn chain(
        &mut self,
        ops: &[BinOp],
        depth: usize,
        next: fn(&mut Self, usize) -> Result<Node, ParseError>,
    ) -> Result<Node, ParseError> {
        let mut lhs = next(self, depth)?;
        while let Some(op) = self.eat_op(ops) {
            let rhs = next(self, depth)?;
            lhs = Self::combine(op, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn combine(op: BinOp, lhs: Node, rhs: Node) -> Result<Node, ParseError> {
        Self::expect_sort(&lhs, op.operand_sort(), op.symbol())?;
        Self::expect_sort(&rhs, op.operand_sort(), op.symbol())?;
        Ok(Node {
            offset: lhs.offset,
            sort: op.result_sort(),
            expr: Expr::binary(op, lhs.expr, rhs.expr),
        })
    }

    fn or(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(&[BinOp::Or], depth, Self::and)
    }

    fn and(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(&[BinOp::And], depth, Self::cmp)
    }

    fn cmp(&mut self, depth: usize) -> Result<Node, ParseError> {
        const CMP: [BinOp; 6] = [BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge];
        let lhs = self.bor(depth)?;
        match self.eat_op(&CMP) {
            Some(op) => {
                let rhs = self.bor(depth)?;
                Self::combine(op, lhs, rhs)
            }
            None => Ok(lhs),
        }
    }

    fn bor(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(&[BinOp::BitOr], depth, Self::bxor)
    }

    fn bxor(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(&[BinOp::BitXor], depth, Self::band)
    }

    fn band(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(&[BinOp::BitAnd], depth, Self::shift)
    }

    fn shift(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(&[BinOp::Shl, BinOp::Shr], depth, Self::add)
    }

    fn add(&mut self, depth: usize) -> Result<Node, ParseError> {
        self.chain(&[BinOp::Add, BinOp::Sub], depth, Self::mul)
    }

    fn mul(&mut self, depth: usize) -> Result<Node, ParseError> {
        let mut lhs = self.unary(depth)?;
        loop {
            let op = if self.eat(&Tok::Mod, "mod") {
                BinOp::Mod
            } else if let Some(op) = self.eat_op(&[BinOp::Mul]) {
                op
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary(depth)?;
            lhs = Self::combine(op, lhs, rhs)?;
        }
    }

    fn unary(&mut self, depth: usize) -> Result<Node, ParseError> {
        let offset = self.peek().offset;
        if self.eat(&Tok::Bang, "!") {
            let inner = self.atom(depth)?;
            Self::expect_sort(&inner, Sort::Bool, "!")?;
            return Ok(Node {
                expr: Expr::not(inner.expr),
                sort: Sort::Bool,
                offset,
            });
        }
        self.atom(depth)
    }

    fn atom(&mut self, depth: usize) -> Result<Node, ParseError> {
        let Token { tok, offset } = self.peek().clone();
        let int = |expr| Node {
            expr,
            sort: Sort::Int,
            offset,
        };
        match tok {
            Tok::X => {
                self.advance();
                Ok(int(Expr::Var))
            }
            Tok::Num(v) => {
                self.advance();
                Ok(int(Expr::Literal(v)))
            }
            Tok::Overflow => Err(ParseError {
                offset,
                kind: ParseErrorKind::LiteralOverflow,
            }),
            Tok::LParen => {
                if depth >= MAX_DEPTH {
                    return Err(ParseError {
                        offset,
                        kind: ParseErrorKind::TooDeep,
                    });
                }
                self.advance();
                self.open_parens.push(offset);
                let inner = self.or(depth + 1)?;
                if !self.eat(&Tok::RParen, ")") {
                    return Err(self.syntax_error());
                }
                self.open_parens.pop();
                Ok(Node { offset, ..inner })
            }
            _ => {
                self.expected.extend(["x", "integer literal", "("]);
                Err(self.syntax_error())
            }
        }
    }
}

/// Parses predicate text into a boolean expression tree.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        tokens: lex(text),
        pos: 0,
        expected: BTreeSet::new(),
        open_parens: Vec::new(),
    };
    let root = p.or(0)?;
    if p.peek().tok != Tok::Eof {
        p.expected.insert("end of input");
        return Err(p.syntax_error());
    }
    Ok(match root.sort {
        Sort::Bool => root.expr,
        Sort::Int => Expr::binary(BinOp::Ne, root.expr, Expr::Literal(0)),
    })
}
