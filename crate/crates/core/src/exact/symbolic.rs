//! Normal form for sums of rational multiples of radicals.
//!
//! Every integer that appears under a fractional power is rewritten over a
//! pairwise coprime basis of integers that are not perfect powers. Over such
//! a basis, monomials with exponents in `[0, 1)` are linearly independent
//! over the rationals, so the normal form is zero exactly when the value is.
//! Subexpressions we cannot break apart are kept as opaque atoms; with atoms
//! present only a zero result is conclusive.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::expr::{Node, RealExpr};
use super::{floor_expr, PrecisionBudget};

const MAX_TERMS: usize = 256;
const MAX_POWER_BITS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Monomial {
    /// Integer base (> 1) to rational exponent.
    radicals: BTreeMap<BigUint, BigRational>,
    /// Display form of an opaque subexpression to integer exponent.
    atoms: BTreeMap<String, BigInt>,
}

impl Monomial {
    fn one() -> Self {
        Monomial { radicals: BTreeMap::new(), atoms: BTreeMap::new() }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (b, e) in &other.radicals {
            let slot = out.radicals.entry(b.clone()).or_insert_with(BigRational::zero);
            *slot += e;
            if slot.is_zero() {
                out.radicals.remove(b);
            }
        }
        for (k, e) in &other.atoms {
            let slot = out.atoms.entry(k.clone()).or_insert_with(BigInt::zero);
            *slot += e;
            if slot.is_zero() {
                out.atoms.remove(k);
            }
        }
        out
    }
}

/// `Σ coefficient · monomial`, with monomials not yet canonical.
#[derive(Clone, Debug)]
struct Sum(Vec<(BigRational, Monomial)>);

impl Sum {
    fn constant(r: BigRational) -> Sum {
        if r.is_zero() {
            Sum(Vec::new())
        } else {
            Sum(vec![(r, Monomial::one())])
        }
    }

    fn atom(e: &RealExpr) -> Sum {
        let mut m = Monomial::one();
        m.atoms.insert(e.to_string(), BigInt::one());
        Sum(vec![(BigRational::one(), m)])
    }

    fn add(mut self, other: Sum, sign: i32) -> Option<Sum> {
        for (c, m) in other.0 {
            self.0.push((if sign < 0 { -c } else { c }, m));
        }
        self.compact()
    }

    fn mul(&self, other: &Sum) -> Option<Sum> {
        if self.0.len() * other.0.len() > MAX_TERMS * 4 {
            return None;
        }
        let mut out = Vec::new();
        for (c1, m1) in &self.0 {
            for (c2, m2) in &other.0 {
                out.push((c1 * c2, m1.mul(m2)));
            }
        }
        Sum(out).compact()
    }

    /// Merges equal monomials syntactically; canonical merging comes later.
    fn compact(self) -> Option<Sum> {
        let mut map: BTreeMap<Monomial, BigRational> = BTreeMap::new();
        for (c, m) in self.0 {
            *map.entry(m).or_insert_with(BigRational::zero) += c;
        }
        let terms: Vec<_> = map.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (c, m)).collect();
        (terms.len() <= MAX_TERMS).then_some(Sum(terms))
    }

    fn single(&self) -> Option<&(BigRational, Monomial)> {
        match self.0.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }
}

/// Result of normalising an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Normal {
    Zero,
    /// Proven nonzero and radical-free: the exact rational value.
    Rational(BigRational),
    /// Proven nonzero, value not rational.
    NonZero,
    /// Normal form is nonzero but contains opaque atoms.
    Unknown,
}

pub(crate) fn normalize(expr: &RealExpr, budget: &PrecisionBudget) -> Option<Normal> {
    let sum = build(expr, budget)?;
    let terms = canonical(&sum)?;
    if terms.is_empty() {
        return Some(Normal::Zero);
    }
    if terms.iter().any(|(_, m)| !m.atoms.is_empty()) {
        return Some(Normal::Unknown);
    }
    match terms.as_slice() {
        [(c, m)] if m.radicals.is_empty() => Some(Normal::Rational(c.clone())),
        _ => Some(Normal::NonZero),
    }
}

fn build(expr: &RealExpr, budget: &PrecisionBudget) -> Option<Sum> {
    match expr.node() {
        Node::Rational(r) => Some(Sum::constant(r.clone())),
        Node::Add(a, b) => build(a, budget)?.add(build(b, budget)?, 1),
        Node::Sub(a, b) => build(a, budget)?.add(build(b, budget)?, -1),
        Node::Mul(a, b) => build(a, budget)?.mul(&build(b, budget)?),
        Node::Div(a, b) => {
            let den = build(b, budget)?;
            let inv = match den.single() {
                Some((c, m)) if !c.is_zero() => invert_monomial(c, m),
                _ => {
                    if den.0.is_empty() {
                        return None;
                    }
                    let mut m = Monomial::one();
                    m.atoms.insert(b.to_string(), -BigInt::one());
                    Sum(vec![(BigRational::one(), m)])
                }
            };
            build(a, budget)?.mul(&inv)
        }
        Node::Pow(base, e) => {
            let inner = build(base, budget)?;
            power(&inner, e).or_else(|| Some(Sum::atom(expr)))
        }
        Node::Floor(a) => match floor_expr(a, budget) {
            Ok(n) => Some(Sum::constant(BigRational::from_integer(n))),
            Err(_) => Some(Sum::atom(expr)),
        },
    }
}

fn invert_monomial(c: &BigRational, m: &Monomial) -> Sum {
    let mut inv = Monomial::one();
    for (b, e) in &m.radicals {
        inv.radicals.insert(b.clone(), -e);
    }
    for (k, e) in &m.atoms {
        inv.atoms.insert(k.clone(), -e);
    }
    Sum(vec![(c.recip(), inv)])
}

fn int_pow(r: &BigRational, n: &BigInt) -> Option<BigRational> {
    let mag = n.abs().to_u64()?;
    let size = r.numer().bits() + r.denom().bits();
    if size.saturating_mul(mag) > MAX_POWER_BITS {
        return None;
    }
    let v = num_traits::pow(r.clone(), mag as usize);
    Some(if n.is_negative() { v.recip() } else { v })
}

fn power(base: &Sum, e: &BigRational) -> Option<Sum> {
    if e.is_zero() {
        return Some(Sum::constant(BigRational::one()));
    }
    if base.0.is_empty() {
        return e.is_positive().then(|| Sum(Vec::new()));
    }
    if let Some((c, m)) = base.single() {
        return monomial_power(c, m, e);
    }
    // A genuine sum: only small nonnegative integer powers are expanded.
    let n = e.to_integer().to_u32().filter(|&n| e.is_integer() && n <= 8)?;
    let mut acc = Sum::constant(BigRational::one());
    for _ in 0..n {
        acc = acc.mul(base)?;
    }
    Some(acc)
}

fn monomial_power(c: &BigRational, m: &Monomial, e: &BigRational) -> Option<Sum> {
    let mut out = Monomial::one();
    for (k, x) in &m.atoms {
        let y = BigRational::from_integer(x.clone()) * e;
        if !y.is_integer() {
            return None;
        }
        out.atoms.insert(k.clone(), y.to_integer());
    }
    for (b, x) in &m.radicals {
        out.radicals.insert(b.clone(), x * e);
    }
    let coeff = if e.is_integer() {
        int_pow(c, &e.to_integer())?
    } else {
        if c.is_negative() {
            return None;
        }
        for (part, sign) in [(c.numer(), 1), (c.denom(), -1)] {
            if !part.is_one() {
                let b = part.to_biguint()?;
                let x = if sign > 0 { e.clone() } else { -e };
                let slot = out.radicals.entry(b).or_insert_with(BigRational::zero);
                *slot += x;
            }
        }
        BigRational::one()
    };
    out.radicals.retain(|_, x| !x.is_zero());
    Some(Sum(vec![(coeff, out)]))
}

/// Replaces the integers by a pairwise coprime set with the same
/// multiplicative span.
fn coprime_basis(values: impl IntoIterator<Item = BigUint>) -> Vec<BigUint> {
    let mut basis: Vec<BigUint> = values.into_iter().filter(|v| *v > BigUint::one()).collect();
    basis.sort();
    basis.dedup();
    'outer: loop {
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let g = basis[i].gcd(&basis[j]);
                if !g.is_one() {
                    let a = &basis[i] / &g;
                    let b = &basis[j] / &g;
                    basis.swap_remove(j);
                    basis.swap_remove(i);
                    basis.extend([a, b, g].into_iter().filter(|v| *v > BigUint::one()));
                    basis.sort();
                    basis.dedup();
                    continue 'outer;
                }
            }
        }
        return basis;
    }
}

/// `n = root^power` with `power` maximal.
fn perfect_power(n: &BigUint) -> (BigUint, u64) {
    let mut best = (n.clone(), 1u64);
    let mut t = 2u64;
    while t <= n.bits() {
        let r = best.0.nth_root(t as u32);
        if num_traits::pow(r.clone(), t as usize) == best.0 {
            best = (r, best.1 * t);
        } else {
            t += 1;
        }
    }
    best
}

fn canonical(sum: &Sum) -> Option<Vec<(BigRational, Monomial)>> {
    let bases = sum.0.iter().flat_map(|(_, m)| m.radicals.keys().cloned());
    let basis: Vec<(BigUint, BigUint, u64)> = coprime_basis(bases)
        .into_iter()
        .map(|b| {
            let (root, t) = perfect_power(&b);
            (b, root, t)
        })
        .collect();

    let mut grouped: BTreeMap<Monomial, BigRational> = BTreeMap::new();
    for (c, m) in &sum.0 {
        let mut coeff = c.clone();
        let mut exps: BTreeMap<BigUint, BigRational> = BTreeMap::new();
        for (b, x) in &m.radicals {
            let mut rest = b.clone();
            for (elem, root, t) in &basis {
                let mut v = 0u64;
                while (&rest % elem).is_zero() {
                    rest /= elem;
                    v += 1;
                }
                if v > 0 {
                    let slot = exps.entry(root.clone()).or_insert_with(BigRational::zero);
                    *slot += x * BigRational::from_integer(BigInt::from(v * t));
                }
            }
            debug_assert!(rest.is_one());
        }
        let mut key = Monomial { radicals: BTreeMap::new(), atoms: m.atoms.clone() };
        for (root, x) in exps {
            let whole = x.floor();
            let frac = &x - &whole;
            let base = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, root.clone()));
            coeff *= int_pow(&base, &whole.to_integer())?;
            if !frac.is_zero() {
                key.radicals.insert(root, frac);
            }
        }
        *grouped.entry(key).or_insert_with(BigRational::zero) += coeff;
    }
    Some(grouped.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (c, m)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(e: &RealExpr) -> Normal {
        normalize(e, &PrecisionBudget::default()).unwrap()
    }

    fn int(n: i64) -> RealExpr {
        RealExpr::int(n)
    }

    #[test]
    fn coprime_basis_refines() {
        let b = coprime_basis([12u32, 18, 35].map(BigUint::from));
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                assert!(b[i].gcd(&b[j]).is_one());
            }
        }
        assert_eq!(perfect_power(&BigUint::from(4096u32)), (BigUint::from(2u32), 12));
        assert_eq!(perfect_power(&BigUint::from(72u32)), (BigUint::from(72u32), 1));
    }

    #[test]
    fn radical_identities_vanish() {
        let two = int(2);
        let raw = |n: Node| RealExpr::from_node(n);
        let sq = raw(Node::Pow(two.clone(), BigRational::new(1.into(), 2.into())));
        let e = raw(Node::Sub(raw(Node::Mul(sq.clone(), sq)), two));
        assert_eq!(norm(&e), Normal::Zero);

        // sqrt(8) = 2 sqrt(2)
        let e = &int(8).sqrt() - &(&int(2) * &int(2).sqrt());
        assert_eq!(norm(&e), Normal::Zero);

        // a^(1/2) b^(1/4) b^(1/12) / a^(1/6) = (ab)^(1/3) for a = 6, b = 10
        let (a, b) = (int(6), int(10));
        let lhs = &(&(&a.sqrt() * &b.root(4)) * &b.root(12)) / &a.root(6);
        let rhs = (&a * &b).root(3);
        assert_eq!(norm(&(&lhs - &rhs)), Normal::Zero);
    }

    #[test]
    fn independent_radicals_are_nonzero() {
        let e = &int(3).root(4) - &int(2).root(4);
        assert_eq!(norm(&e), Normal::NonZero);
        let e = &int(12).sqrt() - &int(3).sqrt();
        assert_eq!(norm(&e), Normal::NonZero);
        let e = &int(12).sqrt() - &(&int(2) * &int(3).sqrt());
        assert_eq!(norm(&e), Normal::Zero);
    }

    #[test]
    fn floors_become_integers() {
        let e = &int(2_000_000_000_000).root(12).floor() - &int(10);
        assert_eq!(norm(&e), Normal::Zero);
    }

    #[test]
    fn opaque_sums_are_inconclusive_unless_cancelling() {
        let s = (&int(1) + &int(2).sqrt()).sqrt();
        assert_eq!(norm(&(&s - &int(1))), Normal::Unknown);
        assert_eq!(norm(&(&s - &s)), Normal::Zero);
    }
}
