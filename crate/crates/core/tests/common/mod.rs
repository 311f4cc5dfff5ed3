//! Independent oracles shared by the integration tests. None of them call
//! into the library code they are compared against.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Squares cut greedily from an `e x f` rectangle, largest first, as
/// `(side, count)`.
pub fn square_cut(e: i64, f: i64) -> Vec<(i64, i64)> {
    let (mut short, mut long) = (e.min(f), e.max(f));
    let mut out = Vec::new();
    while short > 0 {
        let mut count = 0;
        while long >= short {
            long -= short;
            count += 1;
        }
        out.push((short, count));
        (short, long) = (long, short);
    }
    out
}

/// First `count` values of `{ j a_i }` by sorting a generous prefix.
pub fn brute_capacities(axes: &[BigRational], count: usize) -> Vec<BigRational> {
    let mut all = Vec::new();
    for a in axes {
        for j in 1..=count as i64 {
            all.push(a * int(j));
        }
    }
    all.sort();
    all.truncate(count);
    all
}

/// Classes `(d; m_1 >= ... >= m_M >= 0)` with `d >= 1`, `Σ m = 3d - 1`
/// and `Σ m^2 = d^2 + 1`, found by exhaustive search.
pub fn diophantine_classes(m: usize, max_degree: i64) -> Vec<(i64, Vec<i64>)> {
    fn fill(d: i64, left: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<(i64, Vec<i64>)>) {
        if left == 0 {
            let s: i64 = cur.iter().sum();
            let q: i64 = cur.iter().map(|x| x * x).sum();
            if s == 3 * d - 1 && q == d * d + 1 {
                out.push((d, cur.clone()));
            }
            return;
        }
        for x in (0..=cap).rev() {
            cur.push(x);
            fill(d, left - 1, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for d in 1..=max_degree {
        fill(d, m, d, &mut Vec::new(), &mut out);
    }
    out
}

/// Ball packing criterion checked against an explicit class list: volume
/// plus `d μ >= Σ m_i w_i` with balls sorted to maximise the pairing.
pub fn oracle_feasible(target: &BigRational, balls: &[BigRational], classes: &[(i64, Vec<i64>)]) -> bool {
    let mut w = balls.to_vec();
    w.sort_by(|a, b| b.cmp(a));
    let volume: BigRational = w.iter().map(|x| x * x).sum();
    if volume > target * target {
        return false;
    }
    classes.iter().all(|(d, mults)| {
        let pairing: BigRational = mults.iter().zip(&w).map(|(m, x)| x * int(*m)).sum();
        int(*d) * target >= pairing
    })
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

pub fn is_one(x: &BigRational) -> bool {
    x.is_one()
}

pub fn is_zero(x: &BigRational) -> bool {
    x.is_zero()
}
