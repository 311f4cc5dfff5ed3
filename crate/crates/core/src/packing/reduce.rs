use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::classes::ClassVector;
use crate::weights::BallPackingProblem;
use crate::{Error, Result};

/// Problems with at most this many balls get an explicit class witness when
/// infeasible.
pub const WITNESS_BALL_LIMIT: usize = 20_000;

/// Hard cap on reduction moves; each move lowers the integer-scaled target
/// by at least one, so this is only reached for astronomically large input.
pub const MOVE_LIMIT: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `μ^2 < Σ w_i^2`.
    Volume { target_sq: BigRational, balls_sq: BigRational },
    /// An exceptional class pairing negatively with the problem. Its
    /// multiplicities refer to the balls sorted by decreasing capacity.
    Class { class: ClassVector, pairing: BigRational },
    /// Fallback for very large problems: the reduced vector at the point a
    /// ball capacity went negative, not composed back into a class.
    Reduced { target: BigRational, negative_entry: BigRational, moves: u64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Volume { target_sq, balls_sq } => {
                write!(f, "volume {target_sq} < {balls_sq}")
            }
            Witness::Class { class, .. } => write!(f, "{class}"),
            Witness::Reduced { target, negative_entry, moves } => write!(
                f,
                "reduced vector after {moves} moves has target {target} and entry {negative_entry} (class not composed)"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub status: Status,
    pub witness: Option<Witness>,
    /// Number of reduction moves performed.
    pub moves: u64,
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        self.status == Status::Feasible
    }
}

/// Integer-scaled copy of the problem and the scale used.
fn to_integers(p: &BallPackingProblem) -> (BigInt, Vec<(BigInt, BigInt)>, BigInt) {
    let scale = p.balls.iter().map(|(w, _)| w.denom().clone()).fold(p.target.denom().clone(), |acc, d| acc.lcm(&d));
    let s = BigRational::from_integer(scale.clone());
    let target = (&p.target * &s).to_integer();
    let balls = p.balls.iter().map(|(w, n)| ((w * &s).to_integer(), n.clone())).collect();
    (target, balls, scale)
}

/// Decides whether the balls embed into the target ball.
///
/// The volume condition is checked first; then the vector `(μ; w)` is
/// reduced by repeatedly applying the reflection on its three largest ball
/// entries while their sum exceeds `μ`. The problem is feasible iff no
/// entry ever becomes negative.
pub fn feasible(p: &BallPackingProblem) -> Result<FeasibilityResult> {
    if !p.target.is_positive() || p.balls.iter().any(|(w, _)| !w.is_positive()) {
        return Err(Error::InvalidInput("capacities must be positive".into()));
    }
    let (target, balls, scale) = to_integers(p);
    let target_sq = &target * &target;
    let balls_sq: BigInt = balls.iter().map(|(w, n)| w * w * n).sum();
    if target_sq < balls_sq {
        let s2 = BigRational::from_integer(&scale * &scale);
        return Ok(FeasibilityResult {
            status: Status::Infeasible,
            witness: Some(Witness::Volume {
                target_sq: BigRational::from_integer(target_sq) / &s2,
                balls_sq: BigRational::from_integer(balls_sq) / &s2,
            }),
            moves: 0,
        });
    }
    let outcome = reduce_grouped(target, &balls)?;
    match outcome {
        Grouped::Feasible { moves } => Ok(FeasibilityResult { status: Status::Feasible, witness: None, moves }),
        Grouped::Negative { target, entry, moves } => {
            let count = p.ball_count().to_usize().unwrap_or(usize::MAX);
            let witness = if count <= WITNESS_BALL_LIMIT {
                let class = track_classes(p)?;
                let pairing = class.pairing(&p.target, &p.expanded());
                Witness::Class { class, pairing }
            } else {
                let s = BigRational::from_integer(scale);
                Witness::Reduced {
                    target: BigRational::from_integer(target) / &s,
                    negative_entry: BigRational::from_integer(entry) / &s,
                    moves,
                }
            };
            Ok(FeasibilityResult { status: Status::Infeasible, witness: Some(witness), moves })
        }
    }
}

enum Grouped {
    Feasible { moves: u64 },
    Negative { target: BigInt, entry: BigInt, moves: u64 },
}

/// Pops one entry of the largest value from a value -> count multiset.
fn pop_max(set: &mut BTreeMap<BigInt, BigInt>) -> Option<BigInt> {
    let mut entry = set.last_entry()?;
    let v = entry.key().clone();
    *entry.get_mut() -= 1;
    if entry.get().is_zero() {
        entry.remove();
    }
    Some(v)
}

fn push(set: &mut BTreeMap<BigInt, BigInt>, v: BigInt) {
    if !v.is_zero() {
        *set.entry(v).or_insert_with(BigInt::zero) += 1;
    }
}

/// Reduction on the multiset of ball sizes; copes with millions of equal
/// balls because only the three largest entries ever change.
fn reduce_grouped(mut target: BigInt, balls: &[(BigInt, BigInt)]) -> Result<Grouped> {
    let mut set: BTreeMap<BigInt, BigInt> = BTreeMap::new();
    for (w, n) in balls {
        *set.entry(w.clone()).or_insert_with(BigInt::zero) += n;
    }
    let mut moves = 0u64;
    loop {
        let top: Vec<BigInt> = (0..3).map(|_| pop_max(&mut set).unwrap_or_default()).collect();
        let defect = &target - top.iter().sum::<BigInt>();
        if !defect.is_negative() {
            return Ok(Grouped::Feasible { moves });
        }
        moves += 1;
        if moves > MOVE_LIMIT {
            return Err(Error::ResourceLimit(format!("Cremona reduction exceeded {MOVE_LIMIT} moves")));
        }
        target += &defect;
        for w in top {
            let w = w + &defect;
            if w.is_negative() {
                return Ok(Grouped::Negative { target, entry: w, moves });
            }
            push(&mut set, w);
        }
    }
}

/// Sparse class `d L - Σ m_i E_i` keyed by ball index.
#[derive(Clone, Debug, Default)]
struct Sparse {
    degree: BigInt,
    mults: BTreeMap<usize, BigInt>,
}

impl Sparse {
    /// `Σ coeff_i * class_i`.
    fn combine(parts: &[(i64, &Sparse)]) -> Sparse {
        let mut out = Sparse::default();
        for (c, s) in parts {
            let c = BigInt::from(*c);
            out.degree += &c * &s.degree;
            for (i, m) in &s.mults {
                *out.mults.entry(*i).or_insert_with(BigInt::zero) += &c * m;
            }
        }
        out.mults.retain(|_, m| !m.is_zero());
        out
    }
}

/// Reruns the reduction on individual balls while tracking, for every
/// entry, the class whose pairing with the original vector equals it. The
/// entry that goes negative yields the witness.
fn track_classes(p: &BallPackingProblem) -> Result<ClassVector> {
    let (target, _, scale) = to_integers(p);
    let s = BigRational::from_integer(scale);
    let sizes: Vec<BigInt> = p.expanded().iter().map(|w| (w * &s).to_integer()).collect();
    let m = sizes.len();
    // Indices m, m+1, m+2 are zero-capacity padding slots.
    let mut value: Vec<BigInt> = sizes.into_iter().chain(std::iter::repeat_n(BigInt::zero(), 3)).collect();
    let mut class: Vec<Sparse> =
        (0..m + 3).map(|i| Sparse { degree: BigInt::zero(), mults: BTreeMap::from([(i, -BigInt::one())]) }).collect();
    let mut line = Sparse { degree: BigInt::one(), mults: BTreeMap::new() };
    let mut mu = target;
    let mut order: BTreeSet<(Reverse<BigInt>, usize)> =
        value.iter().enumerate().map(|(i, v)| (Reverse(v.clone()), i)).collect();
    loop {
        let top: Vec<usize> = order.iter().take(3).map(|(_, i)| *i).collect();
        let defect = &mu - top.iter().map(|&i| &value[i]).sum::<BigInt>();
        if !defect.is_negative() {
            return Err(Error::VerificationFailed("class tracking disagrees with the grouped reduction".into()));
        }
        let (a, b, c) = (&class[top[0]], &class[top[1]], &class[top[2]]);
        let new_line = Sparse::combine(&[(2, &line), (-1, a), (-1, b), (-1, c)]);
        let new_a = Sparse::combine(&[(1, &line), (-1, b), (-1, c)]);
        let new_b = Sparse::combine(&[(1, &line), (-1, a), (-1, c)]);
        let new_c = Sparse::combine(&[(1, &line), (-1, a), (-1, b)]);
        line = new_line;
        mu += &defect;
        for (&i, cls) in top.iter().zip([new_a, new_b, new_c]) {
            order.remove(&(Reverse(value[i].clone()), i));
            value[i] += &defect;
            class[i] = cls;
            if value[i].is_negative() {
                return to_class_vector(&class[i], m);
            }
            order.insert((Reverse(value[i].clone()), i));
        }
    }
}

fn to_class_vector(s: &Sparse, m: usize) -> Result<ClassVector> {
    let overflow = || Error::ResourceLimit("witness class coefficients overflow i64".into());
    let degree = s.degree.to_i64().ok_or_else(overflow)?;
    let len = s.mults.keys().next_back().map_or(0, |&i| i + 1).min(m + 3);
    let mut mults = vec![0i64; len];
    for (&i, v) in &s.mults {
        mults[i] = v.to_i64().ok_or_else(overflow)?;
    }
    while mults.last() == Some(&0) {
        mults.pop();
    }
    Ok(ClassVector { degree, mults })
}

#[cfg(test)]
mod tests {
    use super::super::classes::is_exceptional;
    use super::*;
    use crate::weights::ellipsoid_to_ball_problem_int;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn problem(mu: BigRational, balls: &[i64]) -> BallPackingProblem {
        let v: Vec<_> = balls.iter().map(|&w| r(w, 1)).collect();
        BallPackingProblem::from_list(mu, &v).unwrap()
    }

    #[test]
    fn four_unit_balls_fill_capacity_two() {
        assert!(feasible(&problem(r(2, 1), &[1, 1, 1, 1])).unwrap().is_feasible());
    }

    #[test]
    fn two_balls_too_large() {
        let res = feasible(&problem(r(3, 2), &[1, 1])).unwrap();
        assert_eq!(res.status, Status::Infeasible);
        match res.witness {
            Some(Witness::Class { class, pairing }) => {
                assert_eq!(class, ClassVector::new(1, vec![1, 1]));
                assert_eq!(pairing, r(-1, 2));
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn volume_failure_is_reported_first() {
        let res = feasible(&problem(r(2, 1), &[1, 1, 1, 1, 1])).unwrap();
        assert!(matches!(res.witness, Some(Witness::Volume { .. })));
    }

    #[test]
    fn strip_instances() {
        let p = ellipsoid_to_ball_problem_int(1, 8, 2, 4).unwrap();
        assert!(feasible(&p).unwrap().is_feasible());
        let p = ellipsoid_to_ball_problem_int(1, 27, 3, 9).unwrap();
        assert!(feasible(&p).unwrap().is_feasible());
    }

    #[test]
    fn witnesses_are_exceptional_and_violated() {
        // five equal balls beyond the conic bound
        let res = feasible(&problem(r(9, 2), &[2, 2, 2, 2, 2])).unwrap();
        let Some(Witness::Class { class, pairing }) = res.witness else { panic!("no class witness") };
        assert!(is_exceptional(&class));
        assert!(pairing.is_negative());
        assert_eq!(class, ClassVector::new(2, vec![1, 1, 1, 1, 1]));
    }

    #[test]
    fn nonpositive_input_rejected() {
        let p = BallPackingProblem { target: r(1, 1), balls: vec![(r(0, 1), BigInt::one())] };
        assert!(feasible(&p).is_err());
    }
}
