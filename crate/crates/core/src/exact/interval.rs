//! Outward-rounded interval evaluation with dyadic endpoints.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{Node, RealExpr};
use super::{ExactError, PrecisionBudget};

/// First working precision tried by every refinement loop.
pub(crate) const START_BITS: u64 = 64;

/// A closed interval with dyadic endpoints that contains the true value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalApprox {
    pub lo: BigRational,
    pub hi: BigRational,
    /// Working precision of the last evaluation level that contributed.
    pub precision_bits: u64,
}

impl IntervalApprox {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &IntervalApprox) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Lies strictly inside `(a, b)`.
    pub fn inside(&self, a: &BigRational, b: &BigRational) -> bool {
        a < &self.lo && &self.hi < b
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    /// Midpoint as a float, for display only.
    pub fn approx_f64(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }
}

impl fmt::Display for IntervalApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", sci(&self.lo, false), sci(&self.hi, true))
    }
}

/// Lossy conversion used only for human-readable output.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let shift = 60i64 - (r.numer().bits() as i64 - r.denom().bits() as i64);
    let scaled = shift_rational(r, shift).to_integer();
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(shift as i32))
}

/// Scientific notation with 6 significant digits rounded in the given
/// direction, so printed bounds stay valid bounds.
pub fn sci(r: &BigRational, up: bool) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let mag = r.abs();
    let digits = 6i64;
    let approx_exp = (rational_to_f64(&mag).log10().floor()) as i64;
    let mut exp = approx_exp;
    // mantissa m = mag / 10^(exp - digits + 1), rounded away from the bound
    loop {
        let scale = pow10(exp - digits + 1);
        let m = &mag / &scale;
        let rounded = if up != neg { ceil(&m) } else { m.floor().to_integer() };
        let len = rounded.to_string().len() as i64;
        if len > digits {
            exp += 1;
            continue;
        }
        if len < digits && !rounded.is_zero() {
            exp -= 1;
            continue;
        }
        let s = rounded.to_string();
        let (head, tail) = s.split_at(1);
        let sign = if neg { "-" } else { "" };
        return format!("{sign}{head}.{tail}e{exp}");
    }
}

fn pow10(e: i64) -> BigRational {
    let ten = BigRational::from_integer(10.into());
    if e >= 0 {
        num_traits::pow(ten, e as usize)
    } else {
        num_traits::pow(ten, (-e) as usize).recip()
    }
}

fn ceil(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// `x * 2^shift`.
pub(crate) fn shift_rational(x: &BigRational, shift: i64) -> BigRational {
    if shift >= 0 {
        BigRational::new(x.numer() << (shift as usize), x.denom().clone())
    } else {
        BigRational::new(x.numer().clone(), x.denom() << ((-shift) as usize))
    }
}

fn is_power_of_two(n: &BigInt) -> bool {
    n.is_positive() && n.trailing_zeros() == Some(n.bits() - 1)
}

/// Rounds `x` to a dyadic rational with about `w` significant bits, towards
/// `+inf` if `up`, else towards `-inf`.
pub(crate) fn round_dyadic(x: &BigRational, w: u64, up: bool) -> BigRational {
    if x.is_zero() || (is_power_of_two(x.denom()) && x.numer().bits() <= w) {
        return x.clone();
    }
    let mag = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = w as i64 - mag;
    let scaled = shift_rational(x, shift);
    let q = if up { ceil(&scaled) } else { scaled.floor().to_integer() };
    shift_rational(&BigRational::from_integer(q), -shift)
}

/// Bound on `x^(1/q)` for `x >= 0`, with about `w` significant bits.
fn root_bound(x: &BigRational, q: u32, w: u64, up: bool) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let mag = x.numer().bits() as i64 - x.denom().bits() as i64;
    let t = w as i64 - Integer::div_floor(&mag, &(q as i64));
    let scaled = shift_rational(x, t * q as i64);
    let r: BigUint = if up {
        let c = ceil(&scaled).to_biguint().unwrap_or_default();
        let mut r = c.nth_root(q);
        if num_traits::pow(r.clone(), q as usize) < c {
            r += 1u32;
        }
        r
    } else {
        scaled.floor().to_integer().to_biguint().unwrap_or_default().nth_root(q)
    };
    shift_rational(&BigRational::from_integer(BigInt::from(r)), -t)
}

#[derive(Clone, Debug)]
pub(crate) struct Iv {
    pub lo: BigRational,
    pub hi: BigRational,
}

#[derive(Debug)]
pub(crate) enum LevelError {
    Domain(String),
    /// Not decidable at this precision (e.g. a divisor straddling zero).
    Unresolved,
}

impl Iv {
    fn point(r: &BigRational, w: u64) -> Iv {
        Iv { lo: round_dyadic(r, w, false), hi: round_dyadic(r, w, true) }
    }

    fn rounded(lo: BigRational, hi: BigRational, w: u64) -> Iv {
        Iv { lo: round_dyadic(&lo, w, false), hi: round_dyadic(&hi, w, true) }
    }

    fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    fn mul(&self, o: &Iv, w: u64) -> Iv {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().cloned().unwrap_or_default();
        let hi = c.iter().max().cloned().unwrap_or_default();
        Iv::rounded(lo, hi, w)
    }

    fn recip(&self, w: u64) -> Result<Iv, LevelError> {
        if self.contains_zero() {
            return Err(if self.lo.is_zero() && self.hi.is_zero() {
                LevelError::Domain("division by zero".into())
            } else {
                LevelError::Unresolved
            });
        }
        Ok(Iv::rounded(self.hi.recip(), self.lo.recip(), w))
    }

    fn powi(&self, n: u64, w: u64) -> Iv {
        let p = |x: &BigRational| num_traits::pow(x.clone(), n as usize);
        let (lo, hi) = if !self.lo.is_negative() || n % 2 == 1 {
            (p(&self.lo), p(&self.hi))
        } else if !self.hi.is_positive() {
            (p(&self.hi), p(&self.lo))
        } else {
            (BigRational::zero(), p(&self.lo).max(p(&self.hi)))
        };
        Iv::rounded(lo, hi, w)
    }
}

pub(crate) fn eval_level(expr: &RealExpr, w: u64) -> Result<Iv, LevelError> {
    Ok(match expr.node() {
        Node::Rational(r) => Iv::point(r, w),
        Node::Add(a, b) => {
            let (a, b) = (eval_level(a, w)?, eval_level(b, w)?);
            Iv::rounded(&a.lo + &b.lo, &a.hi + &b.hi, w)
        }
        Node::Sub(a, b) => {
            let (a, b) = (eval_level(a, w)?, eval_level(b, w)?);
            Iv::rounded(&a.lo - &b.hi, &a.hi - &b.lo, w)
        }
        Node::Mul(a, b) => eval_level(a, w)?.mul(&eval_level(b, w)?, w),
        Node::Div(a, b) => {
            let den = eval_level(b, w)?.recip(w)?;
            eval_level(a, w)?.mul(&den, w)
        }
        Node::Pow(base, e) => pow_level(&eval_level(base, w)?, e, w)?,
        Node::Floor(a) => {
            let a = eval_level(a, w)?;
            Iv {
                lo: BigRational::from_integer(a.lo.floor().to_integer()),
                hi: BigRational::from_integer(a.hi.floor().to_integer()),
            }
        }
    })
}

fn pow_level(base: &Iv, e: &BigRational, w: u64) -> Result<Iv, LevelError> {
    let p = e.numer();
    let p_abs = p.abs().to_u64().ok_or_else(|| LevelError::Domain("exponent too large".into()))?;
    if e.is_zero() {
        return Ok(Iv { lo: BigRational::one(), hi: BigRational::one() });
    }
    if e.is_integer() {
        let v = base.powi(p_abs, w);
        return if p.is_negative() { v.recip(w) } else { Ok(v) };
    }
    let q = e.denom().to_u32().ok_or_else(|| LevelError::Domain("root index too large".into()))?;
    if base.hi.is_negative() {
        return Err(LevelError::Domain(format!(
            "fractional power of a negative quantity (upper bound {})",
            sci(&base.hi, true)
        )));
    }
    // Well-formed expressions only take fractional powers of nonnegative
    // quantities, so a slightly negative lower bound is rounding noise.
    let lo = base.lo.clone().max(BigRational::zero());
    if p.is_positive() {
        let lo_p = num_traits::pow(lo, p_abs as usize);
        let hi_p = num_traits::pow(base.hi.clone(), p_abs as usize);
        Ok(Iv { lo: root_bound(&lo_p, q, w, false), hi: root_bound(&hi_p, q, w, true) })
    } else {
        if lo.is_zero() {
            return if base.hi.is_zero() {
                Err(LevelError::Domain("negative power of zero".into()))
            } else {
                Err(LevelError::Unresolved)
            };
        }
        let lo_p = num_traits::pow(lo, p_abs as usize);
        let hi_p = num_traits::pow(base.hi.clone(), p_abs as usize);
        let small = root_bound(&lo_p, q, w, false);
        let large = root_bound(&hi_p, q, w, true);
        Ok(Iv::rounded(large.recip(), small.recip(), w))
    }
}

/// The deterministic precision schedule `64, 128, ...` capped at `cap`.
pub(crate) fn levels(cap: u64) -> impl Iterator<Item = u64> {
    let cap = cap.max(START_BITS);
    let mut next = Some(START_BITS);
    std::iter::from_fn(move || {
        let w = next?;
        next = if w >= cap { None } else { Some((w * 2).min(cap)) };
        Some(w)
    })
}

/// Runs the precision schedule, intersecting every level's interval, until
/// `done` accepts the running intersection.
pub(crate) fn refine<T>(
    expr: &RealExpr,
    cap: u64,
    mut done: impl FnMut(&IntervalApprox) -> Option<T>,
) -> Result<T, ExactError> {
    let mut acc: Option<IntervalApprox> = None;
    for w in levels(cap) {
        match eval_level(expr, w) {
            Ok(iv) => {
                let next = match acc.take() {
                    None => IntervalApprox { lo: iv.lo, hi: iv.hi, precision_bits: w },
                    Some(prev) => IntervalApprox { lo: prev.lo.max(iv.lo), hi: prev.hi.min(iv.hi), precision_bits: w },
                };
                if let Some(out) = done(&next) {
                    return Ok(out);
                }
                acc = Some(next);
            }
            Err(LevelError::Domain(msg)) => return Err(ExactError::Domain(msg)),
            Err(LevelError::Unresolved) => {}
        }
    }
    Err(ExactError::PrecisionExhausted { bits: cap })
}

fn width_ok(iv: &IntervalApprox, bits: u64) -> bool {
    let scale = if iv.lo.is_positive() {
        iv.lo.clone()
    } else if iv.hi.is_negative() {
        -iv.hi.clone()
    } else {
        BigRational::zero()
    };
    let scale = scale.max(BigRational::one());
    shift_rational(&iv.width(), bits as i64) <= scale
}

/// Encloses the value of `expr` in an interval of width at most
/// `2^-bits * max(1, |value|)`.
///
/// Raising `bits` only ever shrinks the returned interval: every call walks
/// the same precision schedule and intersects all levels it visits.
pub fn eval_interval(expr: &RealExpr, bits: u64) -> Result<IntervalApprox, ExactError> {
    let cap = PrecisionBudget::default().max_bits.max(bits.saturating_mul(4));
    eval_interval_capped(expr, bits, cap)
}

/// As [`eval_interval`], but gives up once the working precision exceeds the
/// budget.
pub fn eval_interval_within(
    expr: &RealExpr,
    bits: u64,
    budget: &PrecisionBudget,
) -> Result<IntervalApprox, ExactError> {
    eval_interval_capped(expr, bits, budget.max_bits.max(bits))
}

fn eval_interval_capped(expr: &RealExpr, bits: u64, cap: u64) -> Result<IntervalApprox, ExactError> {
    refine(expr, cap, |iv| width_ok(iv, bits).then(|| iv.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn dyadic_rounding_brackets() {
        let third = r(1, 3);
        let lo = round_dyadic(&third, 64, false);
        let hi = round_dyadic(&third, 64, true);
        assert!(lo < third && third < hi);
        assert!(is_power_of_two(lo.denom()) && is_power_of_two(hi.denom()));
        assert!(shift_rational(&(&hi - &lo), 64) <= BigRational::one());
        assert_eq!(round_dyadic(&r(7, 2), 8, false), r(7, 2));
    }

    #[test]
    fn root_bounds_bracket_exactly() {
        for (x, q) in [(r(2, 1), 2u32), (r(3, 7), 3), (r(1_000_000, 1), 12), (r(1, 1000), 5)] {
            let lo = root_bound(&x, q, 80, false);
            let hi = root_bound(&x, q, 80, true);
            assert!(num_traits::pow(lo.clone(), q as usize) <= x);
            assert!(num_traits::pow(hi.clone(), q as usize) >= x);
            assert!(lo <= hi);
        }
        assert_eq!(root_bound(&r(4096, 1), 12, 64, false), r(2, 1));
        assert_eq!(root_bound(&r(4096, 1), 12, 64, true), r(2, 1));
    }

    #[test]
    fn schedule_is_a_prefix_chain() {
        let a: Vec<u64> = levels(4096).collect();
        assert_eq!(a, vec![64, 128, 256, 512, 1024, 2048, 4096]);
        let b: Vec<u64> = levels(300).collect();
        assert_eq!(b, vec![64, 128, 256, 300]);
    }

    #[test]
    fn division_by_an_exact_zero_is_a_domain_error() {
        let e = RealExpr::from_node(Node::Div(RealExpr::one(), RealExpr::zero()));
        assert!(matches!(eval_interval(&e, 32), Err(ExactError::Domain(_))));
        let neg = RealExpr::int(-4).sqrt();
        assert!(matches!(eval_interval(&neg, 32), Err(ExactError::Domain(_))));
    }

    #[test]
    fn scientific_bounds_are_directed() {
        let x = r(1, 3);
        assert_eq!(sci(&x, false), "3.33333e-1");
        assert_eq!(sci(&x, true), "3.33334e-1");
        assert_eq!(sci(&r(-5, 1), true), "-5.00000e0");
    }
}
