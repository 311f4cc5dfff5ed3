//! Ellipsoids, Ekeland-Hofer capacities and the volume constraint.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use crate::exact::{compare, eval_interval, sign, IntervalApprox, PrecisionBudget, RealExpr};
use crate::{Error, Result};

/// Number of capacities examined when no explicit count is given.
pub const DEFAULT_COUNT: usize = 1000;

/// `E(a_1, ..., a_n)` with positive axes sorted nondecreasingly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ellipsoid {
    axes: Vec<RealExpr>,
}

impl Ellipsoid {
    /// Validates positivity and sorts the axes.
    pub fn new(axes: Vec<RealExpr>, budget: &PrecisionBudget) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidInput("an ellipsoid needs at least one axis".into()));
        }
        for a in &axes {
            if sign(a, budget)? != Ordering::Greater {
                return Err(Error::InvalidInput(format!("axis {a} is not positive")));
            }
        }
        Ok(Ellipsoid { axes: sort_exprs(axes, budget)? })
    }

    pub fn from_rationals(axes: &[BigRational]) -> Result<Self> {
        Self::new(axes.iter().map(RealExpr::from).collect(), &PrecisionBudget::default())
    }

    pub fn from_ints(axes: &[i64]) -> Result<Self> {
        Self::new(axes.iter().map(|&a| RealExpr::int(a)).collect(), &PrecisionBudget::default())
    }

    /// The ball `B^{2n}(c)`.
    pub fn ball(capacity: RealExpr, n: usize, budget: &PrecisionBudget) -> Result<Self> {
        Self::new(vec![capacity; n], budget)
    }

    pub fn axes(&self) -> &[RealExpr] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn into_axes(self) -> Vec<RealExpr> {
        self.axes
    }

    /// Product of the axes, proportional to the volume.
    pub fn axis_product(&self) -> RealExpr {
        RealExpr::product(&self.axes)
    }

    /// Multiplies every axis by a positive rational.
    pub fn scaled(&self, t: &BigRational) -> Self {
        assert!(t.is_positive(), "scale factor must be positive");
        let t = RealExpr::from(t);
        Ellipsoid { axes: self.axes.iter().map(|a| &t * a).collect() }
    }
}

impl fmt::Display for Ellipsoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E(")?;
        for (i, a) in self.axes.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Stable insertion sort driven by certified comparisons.
pub fn sort_exprs(mut items: Vec<RealExpr>, budget: &PrecisionBudget) -> Result<Vec<RealExpr>> {
    for i in 1..items.len() {
        let mut j = i;
        while j > 0 && compare(&items[j - 1], &items[j], budget)? == Ordering::Greater {
            items.swap(j - 1, j);
            j -= 1;
        }
    }
    Ok(items)
}

/// The sequence `c_1, c_2, ...` of Ekeland-Hofer capacities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityList {
    pub values: Vec<RealExpr>,
}

impl CapacityList {
    /// `c_k`, with `k` starting at 1.
    pub fn get(&self, k: usize) -> Option<&RealExpr> {
        k.checked_sub(1).and_then(|i| self.values.get(i))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One arithmetic progression `j * a` in the merge, with a cached enclosure
/// of `a` for cheap comparisons.
struct Progression {
    axis: RealExpr,
    rational: Option<BigRational>,
    approx: Option<IntervalApprox>,
    next: u64,
}

impl Progression {
    fn new(axis: &RealExpr) -> Result<Self> {
        let rational = axis.fold_rational();
        let approx = match rational {
            Some(_) => None,
            None => Some(eval_interval(axis, 128)?),
        };
        Ok(Progression { axis: axis.clone(), rational, approx, next: 1 })
    }

    fn value(&self) -> RealExpr {
        &RealExpr::int(self.next as i64) * &self.axis
    }

    fn bounds(&self) -> (BigRational, BigRational) {
        let j = BigRational::from_integer(BigInt::from(self.next));
        match (&self.rational, &self.approx) {
            (Some(r), _) => (&j * r, &j * r),
            (None, Some(iv)) => (&j * &iv.lo, &j * &iv.hi),
            (None, None) => unreachable!("progression without value"),
        }
    }

    fn cmp(&self, other: &Progression, budget: &PrecisionBudget) -> Result<Ordering> {
        let (alo, ahi) = self.bounds();
        let (blo, bhi) = other.bounds();
        if self.rational.is_some() && other.rational.is_some() {
            return Ok(alo.cmp(&blo));
        }
        if ahi < blo {
            return Ok(Ordering::Less);
        }
        if bhi < alo {
            return Ok(Ordering::Greater);
        }
        Ok(compare(&self.value(), &other.value(), budget)?)
    }
}

/// The `count` smallest elements, with multiplicity, of `{ j * a_i : j >= 1 }`.
pub fn ek_capacities(e: &Ellipsoid, count: usize, budget: &PrecisionBudget) -> Result<CapacityList> {
    if count == 0 {
        return Err(Error::InvalidInput("count must be at least 1".into()));
    }
    let mut lanes = e.axes.iter().map(Progression::new).collect::<Result<Vec<_>>>()?;
    let mut values = Vec::with_capacity(count);
    while values.len() < count {
        // Ties go to the lower index, so equal values appear once per axis.
        let mut best = 0;
        for i in 1..lanes.len() {
            if lanes[i].cmp(&lanes[best], budget)? == Ordering::Less {
                best = i;
            }
        }
        values.push(lanes[best].value());
        lanes[best].next += 1;
    }
    Ok(CapacityList { values })
}

fn same_dim(a: &Ellipsoid, b: &Ellipsoid) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} has {} axes, {} has {}",
            a,
            a.dim(),
            b,
            b.dim()
        )));
    }
    Ok(())
}

/// Smallest `k <= count` with `c_k(source) > c_k(target)`.
pub fn ek_obstruction(
    source: &Ellipsoid,
    target: &Ellipsoid,
    count: usize,
    budget: &PrecisionBudget,
) -> Result<Option<usize>> {
    same_dim(source, target)?;
    let s = ek_capacities(source, count, budget)?;
    let t = ek_capacities(target, count, budget)?;
    for (k, (x, y)) in s.values.iter().zip(&t.values).enumerate() {
        if compare(x, y, budget)? == Ordering::Greater {
            return Ok(Some(k + 1));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VolumeCheck {
    Pass,
    Fail,
}

/// Passes iff the source's axis product does not exceed the target's.
pub fn volume_obstruction(source: &Ellipsoid, target: &Ellipsoid, budget: &PrecisionBudget) -> Result<VolumeCheck> {
    same_dim(source, target)?;
    Ok(match compare(&source.axis_product(), &target.axis_product(), budget)? {
        Ordering::Greater => VolumeCheck::Fail,
        _ => VolumeCheck::Pass,
    })
}

/// Which necessary condition produced a lower bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowerWitness {
    Volume,
    /// Ekeland-Hofer capacity with this index.
    Capacity(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBound {
    pub value: RealExpr,
    pub witness: LowerWitness,
}

/// Largest ball capacity ruled out by volume and by `c_1, ..., c_count`.
///
/// `c_k(B(c)) = c * ceil(k / n)`, so each capacity gives the bound
/// `c_k(e) / ceil(k / n)`. The volume bound is kept on ties.
pub fn ball_lower_bound_detail(e: &Ellipsoid, count: usize, budget: &PrecisionBudget) -> Result<LowerBound> {
    let n = e.dim();
    let mut best = LowerBound { value: e.axis_product().root(n as u32), witness: LowerWitness::Volume };
    let caps = ek_capacities(e, count, budget)?;
    for (i, c) in caps.values.iter().enumerate() {
        let k = i + 1;
        let layers = k.div_ceil(n) as i64;
        let candidate = c / &RealExpr::int(layers);
        if compare(&candidate, &best.value, budget)? == Ordering::Greater {
            best = LowerBound { value: candidate, witness: LowerWitness::Capacity(k) };
        }
    }
    Ok(best)
}

pub fn ball_lower_bound(e: &Ellipsoid, count: usize, budget: &PrecisionBudget) -> Result<RealExpr> {
    Ok(ball_lower_bound_detail(e, count, budget)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> PrecisionBudget {
        PrecisionBudget::default()
    }

    fn ints(v: &[i64]) -> Vec<RealExpr> {
        v.iter().map(|&x| RealExpr::int(x)).collect()
    }

    #[test]
    fn axes_are_sorted_and_positive() {
        let e = Ellipsoid::new(vec![RealExpr::int(3), RealExpr::int(2).sqrt(), RealExpr::one()], &b()).unwrap();
        assert_eq!(e.axes()[0], RealExpr::one());
        assert_eq!(e.axes()[2], RealExpr::int(3));
        assert!(Ellipsoid::new(vec![RealExpr::zero()], &b()).is_err());
        assert!(Ellipsoid::new(vec![], &b()).is_err());
        assert_eq!(e.to_string(), "E(1, pow(2, 1/2), 3)");
    }

    #[test]
    fn capacities_of_small_ellipsoids() {
        let e = Ellipsoid::from_ints(&[1, 2]).unwrap();
        assert_eq!(ek_capacities(&e, 6, &b()).unwrap().values, ints(&[1, 2, 2, 3, 4, 4]));
        let ball = Ellipsoid::from_ints(&[2, 2, 2]).unwrap();
        assert_eq!(ek_capacities(&ball, 6, &b()).unwrap().values, ints(&[2, 2, 2, 4, 4, 4]));
    }

    #[test]
    fn irrational_axes_merge() {
        let e = Ellipsoid::new(vec![RealExpr::one(), RealExpr::int(2).sqrt()], &b()).unwrap();
        let caps = ek_capacities(&e, 5, &b()).unwrap();
        // 1, sqrt2, 2, 2 sqrt2, 3
        assert_eq!(caps.values[2], RealExpr::int(2));
        assert_eq!(caps.values[4], RealExpr::int(3));
        assert_eq!(caps.get(2), Some(&RealExpr::int(2).sqrt()));
    }

    #[test]
    fn obstructions() {
        let s = Ellipsoid::new(vec![RealExpr::one(), RealExpr::ratio(3, 2), RealExpr::ratio(7, 4)], &b()).unwrap();
        let t = Ellipsoid::ball(RealExpr::ratio(3, 2), 3, &b()).unwrap();
        assert_eq!(ek_obstruction(&s, &t, 3, &b()).unwrap(), Some(3));
        let s = Ellipsoid::from_ints(&[1, 2, 36]).unwrap();
        let t = Ellipsoid::from_ints(&[4, 4, 4]).unwrap();
        assert_eq!(volume_obstruction(&s, &t, &b()).unwrap(), VolumeCheck::Fail);
        let s = Ellipsoid::from_ints(&[1, 1, 8]).unwrap();
        let t = Ellipsoid::from_ints(&[2, 2, 2]).unwrap();
        assert_eq!(volume_obstruction(&s, &t, &b()).unwrap(), VolumeCheck::Pass);
        assert_eq!(ek_obstruction(&s, &t, 50, &b()).unwrap(), None);
        let two = Ellipsoid::from_ints(&[1, 1]).unwrap();
        assert!(ek_obstruction(&s, &two, 5, &b()).is_err());
    }

    #[test]
    fn volume_equality_passes_for_cube_root_target() {
        let s = Ellipsoid::from_ints(&[1, 2, 3]).unwrap();
        let t = Ellipsoid::ball(RealExpr::int(6).root(3), 3, &b()).unwrap();
        assert_eq!(volume_obstruction(&s, &t, &b()).unwrap(), VolumeCheck::Pass);
    }

    #[test]
    fn lower_bounds() {
        let e = Ellipsoid::from_ints(&[1, 1, 4]).unwrap();
        let lb = ball_lower_bound_detail(&e, DEFAULT_COUNT, &b()).unwrap();
        assert_eq!(lb.value, RealExpr::int(2));
        assert_eq!(lb.witness, LowerWitness::Capacity(3));
        let e = Ellipsoid::from_ints(&[1, 3, 20]).unwrap();
        let lb = ball_lower_bound_detail(&e, DEFAULT_COUNT, &b()).unwrap();
        assert_eq!(lb.witness, LowerWitness::Volume);
        assert_eq!(lb.value, RealExpr::int(60).root(3));
    }
}
