#![allow(dead_code)]

use proptest::prelude::*;
use qfrac_core::predicate::{BinOp, Expr};

const ARITH: [BinOp; 9] = [
    BinOp::Add,
    BinOp::Sub,
    BinOp::Mul,
    BinOp::Mod,
    BinOp::BitAnd,
    BinOp::BitOr,
    BinOp::BitXor,
    BinOp::Shl,
    BinOp::Shr,
];
const CMP: [BinOp; 6] = [BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge];

fn literal() -> impl Strategy<Value = u64> {
    prop_oneof![0u64..20, any::<u64>(), Just(u64::MAX)]
}

pub fn int_expr() -> BoxedStrategy<Expr> {
    let leaf = prop_oneof![Just(Expr::Var), literal().prop_map(Expr::Literal)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        (prop::sample::select(&ARITH[..]), inner.clone(), inner)
            .prop_map(|(op, l, r)| Expr::binary(op, l, r))
    })
    .boxed()
}

pub fn bool_expr() -> BoxedStrategy<Expr> {
    let cmp = (prop::sample::select(&CMP[..]), int_expr(), int_expr())
        .prop_map(|(op, l, r)| Expr::binary(op, l, r));
    cmp.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (prop::sample::select(&[BinOp::And, BinOp::Or][..]), inner.clone(), inner.clone())
                .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            inner.prop_map(Expr::not),
        ]
    })
    .boxed()
}

/// Predicates with no occurrence of `x`.
pub fn closed_bool_expr() -> BoxedStrategy<Expr> {
    let leaf = literal().prop_map(Expr::Literal);
    let int = leaf
        .prop_recursive(3, 8, 2, |inner| {
            (prop::sample::select(&ARITH[..]), inner.clone(), inner)
                .prop_map(|(op, l, r)| Expr::binary(op, l, r))
        })
        .boxed();
    (prop::sample::select(&CMP[..]), int.clone(), int)
        .prop_map(|(op, l, r)| Expr::binary(op, l, r))
        .boxed()
}

const TWO_64: u128 = 1 << 64;

/// Reference semantics computed in 128-bit arithmetic, written independently
/// of the library's evaluator.
pub fn reference_int(e: &Expr, x: u64) -> u64 {
    match e {
        Expr::Literal(v) => *v,
        Expr::Var => x,
        Expr::Binary { op, lhs, rhs } => {
            let a = reference_int(lhs, x) as u128;
            let b = reference_int(rhs, x) as u128;
            let r = match op {
                BinOp::Add => (a + b) % TWO_64,
                BinOp::Sub => (a + TWO_64 - b) % TWO_64,
                BinOp::Mul => (a * b) % TWO_64,
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
                BinOp::Shl => {
                    if b >= 64 {
                        0
                    } else {
                        (a << b) % TWO_64
                    }
                }
                BinOp::Shr => {
                    if b >= 64 {
                        0
                    } else {
                        a >> b
                    }
                }
                other => panic!("{other:?} is not arithmetic"),
            };
            r as u64
        }
        Expr::Not(_) => panic!("boolean node in arithmetic position"),
    }
}

pub fn reference_bool(e: &Expr, x: u64) -> bool {
    match e {
        Expr::Not(inner) => !reference_bool(inner, x),
        Expr::Binary { op, lhs, rhs } => match op {
            BinOp::And => reference_bool(lhs, x) && reference_bool(rhs, x),
            BinOp::Or => reference_bool(lhs, x) || reference_bool(rhs, x),
            _ => {
                let (a, b) = (reference_int(lhs, x), reference_int(rhs, x));
                match op {
                    BinOp::Eq => a == b,
                    BinOp::Ne => a != b,
                    BinOp::Lt => a < b,
                    BinOp::Le => a <= b,
                    BinOp::Gt => a > b,
                    BinOp::Ge => a >= b,
                    other => panic!("{other:?} is not boolean"),
                }
            }
        },
        _ => panic!("arithmetic node in boolean position"),
    }
}

/// Brute-force solution count over `[0, 2^k)`.
pub fn brute_force_count(e: &Expr, k: u32) -> u64 {
    (0..1u64 << k).filter(|&x| reference_bool(e, x)).count() as u64
}
