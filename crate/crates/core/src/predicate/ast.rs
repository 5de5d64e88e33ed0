use std::fmt;

/// Value sort of an expression node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Int,
    Bool,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Int => "arithmetic",
            Sort::Bool => "boolean",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
    BitAnd,
    BitOr,
    BitXor,
    Shl,
    Shr,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub const ALL: [BinOp; 17] = [
        BinOp::Add,
        BinOp::Sub,
        BinOp::Mul,
        BinOp::Mod,
        BinOp::BitAnd,
        BinOp::BitOr,
        BinOp::BitXor,
        BinOp::Shl,
        BinOp::Shr,
        BinOp::Eq,
        BinOp::Ne,
        BinOp::Lt,
        BinOp::Le,
        BinOp::Gt,
        BinOp::Ge,
        BinOp::And,
        BinOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Mod => "mod",
            BinOp::BitAnd => "&",
            BinOp::BitOr => "|",
            BinOp::BitXor => "^",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; larger binds tighter. Atoms and `!` sit at 10.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::BitOr => 4,
            BinOp::BitXor => 5,
            BinOp::BitAnd => 6,
            BinOp::Shl | BinOp::Shr => 7,
            BinOp::Add | BinOp::Sub => 8,
            BinOp::Mul | BinOp::Mod => 9,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }

    /// Sort both operands must have.
    pub fn operand_sort(self) -> Sort {
        if self.is_logical() {
            Sort::Bool
        } else {
            Sort::Int
        }
    }

    pub fn result_sort(self) -> Sort {
        if self.is_logical() || self.is_comparison() {
            Sort::Bool
        } else {
            Sort::Int
        }
    }

    /// Applies an arithmetic, bitwise or comparison operator with unsigned
    /// 64-bit wrapping semantics. Comparisons yield 0 or 1.
    pub fn apply(self, a: u64, b: u64) -> u64 {
        match self {
            BinOp::Add => a.wrapping_add(b),
            BinOp::Sub => a.wrapping_sub(b),
            BinOp::Mul => a.wrapping_mul(b),
            BinOp::Mod => {
                if b == 0 {
                    a
                } else {
                    a % b
                }
            }
            BinOp::BitAnd => a & b,
            BinOp::BitOr => a | b,
            BinOp::BitXor => a ^ b,
            // Shifting out every bit leaves zero.
            BinOp::Shl => u32::try_from(b).ok().and_then(|s| a.checked_shl(s)).unwrap_or(0),
            BinOp::Shr => u32::try_from(b).ok().and_then(|s| a.checked_shr(s)).unwrap_or(0),
            BinOp::Eq => u64::from(a == b),
            BinOp::Ne => u64::from(a != b),
            BinOp::Lt => u64::from(a < b),
            BinOp::Le => u64::from(a <= b),
            BinOp::Gt => u64::from(a > b),
            BinOp::Ge => u64::from(a >= b),
            BinOp::And => u64::from(a != 0 && b != 0),
            BinOp::Or => u64::from(a != 0 || b != 0),
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Expression node over the single variable `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Literal(u64),
    Var,
    Not(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn not(inner: Expr) -> Expr {
        Expr::Not(Box::new(inner))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            _ => 10,
        }
    }

    /// Sort of this node, or the first ill-sorted subtree found.
    pub fn sort_check(&self) -> Result<Sort, SortMismatch> {
        match self {
            Expr::Literal(_) | Expr::Var => Ok(Sort::Int),
            Expr::Not(inner) => {
                expect_sort(inner, Sort::Bool, "!")?;
                Ok(Sort::Bool)
            }
            Expr::Binary { op, lhs, rhs } => {
                expect_sort(lhs, op.operand_sort(), op.symbol())?;
                expect_sort(rhs, op.operand_sort(), op.symbol())?;
                Ok(op.result_sort())
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Literal(_) | Expr::Var => 1,
            Expr::Not(inner) => 1 + inner.size(),
            Expr::Binary { lhs, rhs, .. } => 1 + lhs.size() + rhs.size(),
        }
    }

    pub fn mentions_var(&self) -> bool {
        match self {
            Expr::Literal(_) => false,
            Expr::Var => true,
            Expr::Not(inner) => inner.mentions_var(),
            Expr::Binary { lhs, rhs, .. } => lhs.mentions_var() || rhs.mentions_var(),
        }
    }

    /// Evaluates with `x` already reduced to the register width. Boolean nodes
    /// evaluate to 0 or 1.
    pub fn value(&self, x: u64) -> u64 {
        match self {
            Expr::Literal(v) => *v,
            Expr::Var => x,
            Expr::Not(inner) => u64::from(inner.value(x) == 0),
            Expr::Binary { op: BinOp::And, lhs, rhs } => {
                u64::from(lhs.value(x) != 0 && rhs.value(x) != 0)
            }
            Expr::Binary { op: BinOp::Or, lhs, rhs } => {
                u64::from(lhs.value(x) != 0 || rhs.value(x) != 0)
            }
            Expr::Binary { op, lhs, rhs } => op.apply(lhs.value(x), rhs.value(x)),
        }
    }
}

fn expect_sort(e: &Expr, want: Sort, context: &'static str) -> Result<(), SortMismatch> {
    let got = e.sort_check()?;
    if got == want {
        Ok(())
    } else {
        Err(SortMismatch {
            context,
            expected: want,
            found: got,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortMismatch {
    pub context: &'static str,
    pub expected: Sort,
    pub found: Sort,
}

impl fmt::Display for SortMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "operand of `{}` must be {}, found {}",
            self.context, self.expected, self.found
        )
    }
}

/// Prints with the minimum parentheses needed to reparse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write!(f, "{v}"),
            Expr::Var => f.write_str("x"),
            Expr::Not(inner) => match **inner {
                Expr::Literal(_) | Expr::Var => write!(f, "!{inner}"),
                _ => write!(f, "!({inner})"),
            },
            Expr::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                // Comparisons do not chain, so an equal-precedence left child
                // needs parentheses as well.
                let lhs_parens = lhs.precedence() < p || (op.is_comparison() && lhs.precedence() == p);
                let rhs_parens = rhs.precedence() <= p;
                write_operand(f, lhs, lhs_parens)?;
                write!(f, " {op} ")?;
                write_operand(f, rhs, rhs_parens)
            }
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}
