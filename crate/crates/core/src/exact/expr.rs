use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// One node of a real expression tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Rational(BigRational),
    Add(RealExpr, RealExpr),
    Sub(RealExpr, RealExpr),
    Mul(RealExpr, RealExpr),
    Div(RealExpr, RealExpr),
    /// `base^exponent`; a non-integer exponent requires a nonnegative base.
    Pow(RealExpr, BigRational),
    Floor(RealExpr),
}

/// A real number built from rationals, the four field operations, rational
/// powers and floors. Cheap to clone; subtrees are shared.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RealExpr(Arc<Node>);

/// Largest bit size we are willing to materialise when folding an exact
/// rational power at construction time.
const FOLD_BIT_LIMIT: u64 = 1 << 16;

impl RealExpr {
    /// Wraps a node verbatim, without any folding.
    pub fn from_node(node: Node) -> Self {
        RealExpr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn rational(r: BigRational) -> Self {
        Self::from_node(Node::Rational(r))
    }

    pub fn int(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn big_int(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    /// `p/q` as an exact leaf. Panics if `q == 0`.
    pub fn ratio(p: i64, q: i64) -> Self {
        Self::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Evaluates the tree exactly if every operation stays within the
    /// rationals, e.g. `10^52` or `(9/4)^(1/2) + 1`.
    pub fn fold_rational(&self) -> Option<BigRational> {
        Some(match self.node() {
            Node::Rational(r) => r.clone(),
            Node::Add(a, b) => a.fold_rational()? + b.fold_rational()?,
            Node::Sub(a, b) => a.fold_rational()? - b.fold_rational()?,
            Node::Mul(a, b) => a.fold_rational()? * b.fold_rational()?,
            Node::Div(a, b) => {
                let d = b.fold_rational()?;
                if d.is_zero() {
                    return None;
                }
                a.fold_rational()? / d
            }
            Node::Pow(a, e) => exact_rational_pow(&a.fold_rational()?, e)?,
            Node::Floor(a) => BigRational::from_integer(a.fold_rational()?.floor().to_integer()),
        })
    }

    /// `self^exponent`, folded to a rational leaf when the result is exact.
    pub fn pow(&self, exponent: BigRational) -> Self {
        if exponent.is_one() {
            return self.clone();
        }
        if let Some(r) = self.as_rational() {
            if let Some(v) = exact_rational_pow(r, &exponent) {
                return Self::rational(v);
            }
        }
        if let Node::Pow(base, inner) = self.node() {
            // x^a with non-integer a already forces x >= 0, so exponents multiply.
            if !inner.is_integer() {
                return base.pow(inner * &exponent);
            }
        }
        Self::from_node(Node::Pow(self.clone(), exponent))
    }

    pub fn pow_ratio(&self, p: i64, q: i64) -> Self {
        self.pow(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn powi(&self, n: i64) -> Self {
        self.pow(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn sqrt(&self) -> Self {
        self.pow_ratio(1, 2)
    }

    /// Principal `k`-th root.
    pub fn root(&self, k: u32) -> Self {
        self.pow_ratio(1, k as i64)
    }

    pub fn floor(&self) -> Self {
        if let Some(r) = self.as_rational() {
            return Self::big_int(r.floor().to_integer());
        }
        Self::from_node(Node::Floor(self.clone()))
    }

    /// Nesting depth of the tree (a leaf has depth 1).
    pub fn depth(&self) -> usize {
        match self.node() {
            Node::Rational(_) => 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => 1 + a.depth().max(b.depth()),
            Node::Pow(a, _) | Node::Floor(a) => 1 + a.depth(),
        }
    }

    fn combine(&self, other: &Self, op: BinOp) -> Self {
        if let (Some(a), Some(b)) = (self.as_rational(), other.as_rational()) {
            match op {
                BinOp::Add => return Self::rational(a + b),
                BinOp::Sub => return Self::rational(a - b),
                BinOp::Mul => return Self::rational(a * b),
                BinOp::Div if !b.is_zero() => return Self::rational(a / b),
                BinOp::Div => {}
            }
        }
        let is = |e: &Self, v: i64| e.as_rational() == Some(&BigRational::from_integer(v.into()));
        match op {
            BinOp::Add if is(self, 0) => return other.clone(),
            BinOp::Add | BinOp::Sub if is(other, 0) => return self.clone(),
            BinOp::Mul if is(self, 1) => return other.clone(),
            BinOp::Mul | BinOp::Div if is(other, 1) => return self.clone(),
            _ => {}
        }
        let (a, b) = (self.clone(), other.clone());
        Self::from_node(match op {
            BinOp::Add => Node::Add(a, b),
            BinOp::Sub => Node::Sub(a, b),
            BinOp::Mul => Node::Mul(a, b),
            BinOp::Div => Node::Div(a, b),
        })
    }

    /// Product of a sequence, `1` when empty.
    pub fn product<'a>(items: impl IntoIterator<Item = &'a RealExpr>) -> Self {
        items.into_iter().fold(Self::one(), |acc, x| &acc * x)
    }
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// `r^e` when it is rational, else `None`.
pub(crate) fn exact_rational_pow(r: &BigRational, e: &BigRational) -> Option<BigRational> {
    let p = e.numer();
    let q = e.denom().to_u32()?;
    if r.is_zero() {
        return if p.is_positive() { Some(BigRational::zero()) } else { None };
    }
    if r.is_negative() && q != 1 {
        return None;
    }
    let p_abs = p.abs().to_u32()?;
    let est_bits = (r.numer().bits() + r.denom().bits()) * p_abs as u64 / q as u64;
    if est_bits > FOLD_BIT_LIMIT {
        return None;
    }
    let num = exact_root(r.numer(), q)?;
    let den = exact_root(r.denom(), q)?;
    let base = BigRational::new(num, den);
    let v = num_traits::pow(base, p_abs as usize);
    Some(if p.is_negative() { v.recip() } else { v })
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if q == 1 {
        return Some(n.clone());
    }
    let mag: BigUint = n.magnitude().clone();
    let r = mag.nth_root(q);
    if num_traits::pow(r.clone(), q as usize) == mag {
        let r = BigInt::from(r);
        Some(if n.is_negative() { -r } else { r })
    } else {
        None
    }
}

pub(crate) fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Rational(r) => fmt_rational(r, f),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Pow(a, e) => {
                write!(f, "pow({a}, ")?;
                fmt_rational(e, f)?;
                write!(f, ")")
            }
            Node::Floor(a) => write!(f, "floor({a})"),
        }
    }
}

impl fmt::Debug for RealExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<BigRational> for RealExpr {
    fn from(r: BigRational) -> Self {
        Self::rational(r)
    }
}

impl From<&BigRational> for RealExpr {
    fn from(r: &BigRational) -> Self {
        Self::rational(r.clone())
    }
}

impl From<BigInt> for RealExpr {
    fn from(n: BigInt) -> Self {
        Self::big_int(n)
    }
}

impl From<BigUint> for RealExpr {
    fn from(n: BigUint) -> Self {
        Self::big_int(BigInt::from(n))
    }
}

impl From<i64> for RealExpr {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

macro_rules! bin_ops {
    ($($trait:ident $method:ident $op:ident),*) => {$(
        impl $trait<&RealExpr> for &RealExpr {
            type Output = RealExpr;
            fn $method(self, rhs: &RealExpr) -> RealExpr {
                self.combine(rhs, BinOp::$op)
            }
        }
        impl $trait<RealExpr> for RealExpr {
            type Output = RealExpr;
            fn $method(self, rhs: RealExpr) -> RealExpr {
                self.combine(&rhs, BinOp::$op)
            }
        }
        impl $trait<&RealExpr> for RealExpr {
            type Output = RealExpr;
            fn $method(self, rhs: &RealExpr) -> RealExpr {
                self.combine(rhs, BinOp::$op)
            }
        }
        impl $trait<RealExpr> for &RealExpr {
            type Output = RealExpr;
            fn $method(self, rhs: RealExpr) -> RealExpr {
                self.combine(&rhs, BinOp::$op)
            }
        }
    )*};
}

bin_ops!(Add add Add, Sub sub Sub, Mul mul Mul, Div div Div);

impl Neg for &RealExpr {
    type Output = RealExpr;
    fn neg(self) -> RealExpr {
        match self.as_rational() {
            Some(r) => RealExpr::rational(-r),
            None => &RealExpr::int(-1) * self,
        }
    }
}

impl Neg for RealExpr {
    type Output = RealExpr;
    fn neg(self) -> RealExpr {
        -&self
    }
}
