//! Exact rationals and certified evaluation of real expressions.

mod expr;
mod interval;
mod parse;
mod symbolic;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

pub use expr::{Node, RealExpr};
pub use interval::{eval_interval, eval_interval_within, rational_to_f64, sci, IntervalApprox};
pub use parse::{parse_list, parse_rational};

use interval::refine;
use symbolic::{normalize, Normal};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision exhausted at {bits} bits")]
    PrecisionExhausted { bits: u64 },
    #[error("precision budget must be at least 64 bits, got {0}")]
    InvalidBudget(u64),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Upper limit on the working precision of any refinement loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionBudget {
    pub max_bits: u64,
}

impl PrecisionBudget {
    pub const DEFAULT_BITS: u64 = 4096;

    pub fn new(max_bits: u64) -> Result<Self, ExactError> {
        if max_bits < 64 {
            return Err(ExactError::InvalidBudget(max_bits));
        }
        Ok(PrecisionBudget { max_bits })
    }
}

impl Default for PrecisionBudget {
    fn default() -> Self {
        PrecisionBudget { max_bits: Self::DEFAULT_BITS }
    }
}

/// Orders two real expressions.
///
/// `Equal` is only ever reported when the difference normalises to zero;
/// otherwise intervals are refined until they separate or the budget runs
/// out.
pub fn compare(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<Ordering, ExactError> {
    if let (Some(x), Some(y)) = (a.as_rational(), b.as_rational()) {
        return Ok(x.cmp(y));
    }
    let diff = RealExpr::from_node(Node::Sub(a.clone(), b.clone()));
    sign(&diff, budget)
}

/// Sign of `expr` as an ordering against zero.
pub fn sign(expr: &RealExpr, budget: &PrecisionBudget) -> Result<Ordering, ExactError> {
    if let Some(r) = expr.as_rational() {
        return Ok(r.cmp(&BigRational::from_integer(0.into())));
    }
    match normalize(expr, budget) {
        Some(Normal::Zero) => return Ok(Ordering::Equal),
        Some(Normal::Rational(r)) => return Ok(if r.is_positive() { Ordering::Greater } else { Ordering::Less }),
        _ => {}
    }
    refine(expr, budget.max_bits, |iv| {
        if iv.lo.is_positive() {
            Some(Ordering::Greater)
        } else if iv.hi.is_negative() {
            Some(Ordering::Less)
        } else {
            None
        }
    })
}

/// `a <= b`, the non-strict test used by every hypothesis check.
pub fn le(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<bool, ExactError> {
    Ok(compare(a, b, budget)? != Ordering::Greater)
}

/// `a < b`.
pub fn lt(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<bool, ExactError> {
    Ok(compare(a, b, budget)? == Ordering::Less)
}

/// Exact floor of a real expression.
pub fn floor_expr(expr: &RealExpr, budget: &PrecisionBudget) -> Result<BigInt, ExactError> {
    if let Some(r) = expr.fold_rational() {
        return Ok(r.floor().to_integer());
    }
    let mut tried: Option<BigInt> = None;
    refine(expr, budget.max_bits, |iv| {
        let lo = iv.lo.floor().to_integer();
        let hi = iv.hi.floor().to_integer();
        if lo == hi {
            return Some(lo);
        }
        // The interval straddles the integer `hi`; only an exact identity
        // can settle which side the value is on.
        if hi.clone() - &lo == BigInt::from(1) && tried.as_ref() != Some(&hi) {
            tried = Some(hi.clone());
            let gap = RealExpr::from_node(Node::Sub(expr.clone(), RealExpr::big_int(hi.clone())));
            if normalize(&gap, budget) == Some(Normal::Zero) {
                return Some(hi);
            }
        }
        None
    })
}
