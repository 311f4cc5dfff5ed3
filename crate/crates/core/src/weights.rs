//! Continued fractions, weight expansions and the reduction of a
//! four-dimensional ellipsoid embedding to a ball packing.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// `[l_0; l_1, ..., l_K]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContinuedFraction {
    pub terms: Vec<BigInt>,
}

impl ContinuedFraction {
    /// Folds the expansion back into a rational.
    pub fn value(&self) -> BigRational {
        let mut terms = self.terms.iter().rev();
        let mut acc = BigRational::from_integer(terms.next().cloned().unwrap_or_default());
        for l in terms {
            acc = BigRational::from_integer(l.clone()) + acc.recip();
        }
        acc
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.terms[0])?;
        for (i, t) in self.terms[1..].iter().enumerate() {
            write!(f, "{}{t}", if i == 0 { "; " } else { ", " })?;
        }
        write!(f, "]")
    }
}

/// Weights `X_i` with multiplicities `l_i`, weights strictly decreasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightExpansion {
    pub entries: Vec<(BigRational, BigInt)>,
}

impl WeightExpansion {
    pub fn total_count(&self) -> BigInt {
        self.entries.iter().map(|(_, l)| l.clone()).sum()
    }

    /// `Σ l_i X_i^2`.
    pub fn square_sum(&self) -> BigRational {
        self.entries.iter().map(|(x, l)| x * x * BigRational::from_integer(l.clone())).sum()
    }

    /// `Σ l_i X_i`.
    pub fn linear_sum(&self) -> BigRational {
        self.entries.iter().map(|(x, l)| x * BigRational::from_integer(l.clone())).sum()
    }

    pub fn scaled(&self, t: &BigRational) -> WeightExpansion {
        WeightExpansion { entries: self.entries.iter().map(|(x, l)| (x * t, l.clone())).collect() }
    }
}

impl fmt::Display for WeightExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (x, l)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if l.is_one() {
                write!(f, "{x}")?;
            } else {
                write!(f, "{x}^{l}")?;
            }
        }
        write!(f, ")")
    }
}

fn check_pair(e: &BigRational, f: &BigRational, what: &str) -> Result<()> {
    if !e.is_positive() || !f.is_positive() {
        return Err(Error::InvalidInput(format!("{what}: both entries must be positive, got {e}, {f}")));
    }
    if e > f {
        return Err(Error::InvalidInput(format!("{what}: need {e} <= {f}")));
    }
    Ok(())
}

/// Euclidean-quotient expansion of `f / e` for `0 < e <= f`.
pub fn continued_fraction(e: &BigRational, f: &BigRational) -> Result<ContinuedFraction> {
    check_pair(e, f, "continued fraction")?;
    let ratio = f / e;
    let (mut num, mut den) = (ratio.numer().clone(), ratio.denom().clone());
    let mut terms = Vec::new();
    while !den.is_zero() {
        let (q, r) = num.div_rem(&den);
        terms.push(q);
        num = den;
        den = r;
    }
    Ok(ContinuedFraction { terms })
}

/// `W(e, f)`: runs `X_{-1} = f, X_0 = e, X_{i+1} = X_{i-1} - l_i X_i`.
///
/// Rational inputs are handled directly; the recursion is homogeneous.
pub fn weight_expansion(e: &BigRational, f: &BigRational) -> Result<WeightExpansion> {
    let cf = continued_fraction(e, f)?;
    let (mut prev, mut cur) = (f.clone(), e.clone());
    let mut entries = Vec::with_capacity(cf.terms.len());
    for l in &cf.terms {
        entries.push((cur.clone(), l.clone()));
        let next = &prev - &cur * BigRational::from_integer(l.clone());
        prev = cur;
        cur = next;
    }
    debug_assert!(cur.is_zero());
    Ok(WeightExpansion { entries })
}

pub fn weight_expansion_int(e: i64, f: i64) -> Result<WeightExpansion> {
    weight_expansion(&BigRational::from_integer(e.into()), &BigRational::from_integer(f.into()))
}

/// Target capacity `μ` and ball capacities grouped as `(capacity, count)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallPackingProblem {
    pub target: BigRational,
    pub balls: Vec<(BigRational, BigInt)>,
}

impl BallPackingProblem {
    pub fn new(target: BigRational, balls: Vec<(BigRational, BigInt)>) -> Result<Self> {
        if !target.is_positive() {
            return Err(Error::InvalidInput(format!("target capacity {target} must be positive")));
        }
        let balls: Vec<_> = balls.into_iter().filter(|(_, n)| n.is_positive()).collect();
        if balls.is_empty() {
            return Err(Error::InvalidInput("a packing problem needs at least one ball".into()));
        }
        if let Some((w, _)) = balls.iter().find(|(w, _)| !w.is_positive()) {
            return Err(Error::InvalidInput(format!("ball capacity {w} must be positive")));
        }
        Ok(BallPackingProblem { target, balls })
    }

    /// One ball per listed capacity.
    pub fn from_list(target: BigRational, balls: &[BigRational]) -> Result<Self> {
        Self::new(target, balls.iter().map(|w| (w.clone(), BigInt::one())).collect())
    }

    pub fn ball_count(&self) -> BigInt {
        self.balls.iter().map(|(_, n)| n.clone()).sum()
    }

    /// Every ball listed individually, largest first.
    pub fn expanded(&self) -> Vec<BigRational> {
        let mut out = Vec::new();
        for (w, n) in &self.balls {
            let mut i = BigInt::zero();
            while &i < n {
                out.push(w.clone());
                i += 1;
            }
        }
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    pub fn scaled(&self, t: &BigRational) -> BallPackingProblem {
        BallPackingProblem {
            target: &self.target * t,
            balls: self.balls.iter().map(|(w, n)| (w * t, n.clone())).collect(),
        }
    }
}

impl fmt::Display for BallPackingProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; ", self.target)?;
        for (i, (w, n)) in self.balls.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if n.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{w}^{n}")?;
            }
        }
        write!(f, ")")
    }
}

/// Balls `W(e, f)` and `W(d - c, d)` inside `B(d)`; the second family is
/// empty when `c = d`.
pub fn ellipsoid_to_ball_problem(
    e: &BigRational,
    f: &BigRational,
    c: &BigRational,
    d: &BigRational,
) -> Result<BallPackingProblem> {
    check_pair(e, f, "source ellipsoid")?;
    check_pair(c, d, "target ellipsoid")?;
    let mut balls = weight_expansion(e, f)?.entries;
    if c != d {
        balls.extend(weight_expansion(&(d - c), d)?.entries);
    }
    BallPackingProblem::new(d.clone(), balls)
}

pub fn ellipsoid_to_ball_problem_int(e: i64, f: i64, c: i64, d: i64) -> Result<BallPackingProblem> {
    let r = |x: i64| BigRational::from_integer(x.into());
    ellipsoid_to_ball_problem(&r(e), &r(f), &r(c), &r(d))
}
