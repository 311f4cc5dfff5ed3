//! Outputs and hypothesis checks of the individual step rules.

use std::cmp::Ordering;

use num_traits::Signed;

use super::{fmt_axes, EmbeddingCertificate, StepRule};
use crate::capacities::sort_exprs;
use crate::exact::{compare, sign, PrecisionBudget, RealExpr};
use crate::packing::feasible;
use crate::weights::ellipsoid_to_ball_problem;
use crate::{Error, Result};

/// Lower end of the range where `E(1, b)` fills `B(sqrt b)`, as `p/q`.
pub const SQRT_THRESHOLD: (i64, i64) = (289, 36);

pub(crate) fn sqrt_threshold() -> RealExpr {
    RealExpr::ratio(SQRT_THRESHOLD.0, SQRT_THRESHOLD.1)
}

/// Result of checking one rule against the ellipsoid before it.
pub(crate) enum Check {
    /// Hypotheses hold; the rule's output.
    Holds(Vec<RealExpr>),
    /// Hypotheses fail, with a reason and the nested step path if any.
    Fails { path: Option<String>, reason: String },
}

fn fails(reason: impl Into<String>) -> Check {
    Check::Fails { path: None, reason: reason.into() }
}

fn eq(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<bool> {
    Ok(compare(a, b, budget)? == Ordering::Equal)
}

fn ge(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<bool> {
    Ok(compare(a, b, budget)? != Ordering::Less)
}

fn positive(a: &RealExpr, budget: &PrecisionBudget) -> Result<bool> {
    Ok(sign(a, budget)? == Ordering::Greater)
}

fn all_equal(a: &[RealExpr], b: &[RealExpr], budget: &PrecisionBudget) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    for (x, y) in a.iter().zip(b) {
        if !eq(x, y, budget)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The rule's output on `prev` without checking its hypotheses. Used by the
/// builders, which construct chains whose hypotheses hold by design.
pub(crate) fn output(rule: &StepRule, prev: &[RealExpr]) -> Result<Vec<RealExpr>> {
    let pair = || -> Result<(&RealExpr, &RealExpr)> {
        match prev {
            [x, y] => Ok((x, y)),
            _ => Err(Error::InvalidInput(format!("{} acts on two axes, got {}", rule.name(), prev.len()))),
        }
    };
    Ok(match rule {
        StepRule::Inclusion => {
            return Err(Error::InvalidInput("an inclusion has no implied output".into()));
        }
        StepRule::Permute(perm) => {
            if !is_permutation(perm, prev.len()) {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of {} axes", prev.len())));
            }
            perm.iter().map(|&i| prev[i].clone()).collect()
        }
        StepRule::Rescale { factor, inner } => inner.target.iter().map(|a| factor * a).collect(),
        StepRule::Suspend { m, inner } => {
            if *m == 0 || *m > prev.len() {
                return Err(Error::InvalidInput(format!("cannot suspend over {m} of {} axes", prev.len())));
            }
            inner.target.iter().chain(&prev[*m..]).cloned().collect()
        }
        StepRule::SqrtCapacity { b } => {
            let (x, _) = pair()?;
            vec![x * b.sqrt(); 2]
        }
        StepRule::CapacityTwo { .. } => {
            let (x, _) = pair()?;
            vec![x * RealExpr::int(2); 2]
        }
        StepRule::ShortAxes => {
            let top = prev.last().ok_or_else(|| Error::InvalidInput("empty ellipsoid".into()))?;
            vec![top.clone(); prev.len()]
        }
        StepRule::LambdaSplit { lambda, b } => {
            let (x, _) = pair()?;
            let root = b.sqrt();
            vec![x * (lambda * &root), x * (&root / lambda)]
        }
        StepRule::BallPacking { e, c, d, .. } => {
            let (x, _) = pair()?;
            let (c, d) = (RealExpr::from(c / e), RealExpr::from(d / e));
            vec![x * c, x * d]
        }
    })
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    perm.len() == n && perm.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
}

/// `prev = (x, y)` with `y = b x`.
fn ratio_matches(prev: &[RealExpr], b: &RealExpr, budget: &PrecisionBudget) -> Result<Option<String>> {
    match prev {
        [x, y] => Ok((!eq(y, &(x * b), budget)?).then(|| format!("{} is not E(x, {b} x)", fmt_axes(prev)))),
        _ => Ok(Some(format!("rule acts on two axes, got {}", prev.len()))),
    }
}

/// Checks the hypotheses of `rule` on `prev` and returns its output.
/// Nested certificates are verified recursively.
pub(crate) fn check(
    rule: &StepRule,
    prev: &[RealExpr],
    result: &[RealExpr],
    budget: &PrecisionBudget,
) -> Result<Check> {
    match rule {
        StepRule::Inclusion => {
            if result.len() != prev.len() {
                return Ok(fails(format!("inclusion changes the dimension from {} to {}", prev.len(), result.len())));
            }
            let from = sort_exprs(prev.to_vec(), budget)?;
            let to = sort_exprs(result.to_vec(), budget)?;
            for (a, b) in from.iter().zip(&to) {
                if !ge(b, a, budget)? {
                    return Ok(fails(format!("{} does not contain {}", fmt_axes(result), fmt_axes(prev))));
                }
            }
            Ok(Check::Holds(result.to_vec()))
        }
        StepRule::Permute(perm) => {
            if !is_permutation(perm, prev.len()) {
                return Ok(fails(format!("{perm:?} is not a permutation of {} axes", prev.len())));
            }
            Ok(Check::Holds(output(rule, prev)?))
        }
        StepRule::Rescale { factor, inner } => {
            if !positive(factor, budget)? {
                return Ok(fails(format!("rescale factor {factor} is not positive")));
            }
            let scaled: Vec<RealExpr> = inner.source.iter().map(|a| factor * a).collect();
            if !all_equal(prev, &scaled, budget)? {
                return Ok(fails(format!("{} is not {factor} times {}", fmt_axes(prev), fmt_axes(&inner.source))));
            }
            nested(inner, budget, || output(rule, prev))
        }
        StepRule::Suspend { m, inner } => {
            if *m == 0 || *m > prev.len() {
                return Ok(fails(format!("cannot suspend over {m} of {} axes", prev.len())));
            }
            if !all_equal(&prev[..*m], &inner.source, budget)? {
                return Ok(fails(format!(
                    "first {m} axes {} differ from the inner source {}",
                    fmt_axes(&prev[..*m]),
                    fmt_axes(&inner.source)
                )));
            }
            nested(inner, budget, || output(rule, prev))
        }
        StepRule::SqrtCapacity { b } => {
            if let Some(r) = ratio_matches(prev, b, budget)? {
                return Ok(fails(r));
            }
            if !eq(b, &RealExpr::int(4), budget)? && !ge(b, &sqrt_threshold(), budget)? {
                return Ok(fails(format!("hypothesis b = 4 or b >= 289/36 fails for b = {b}")));
            }
            Ok(Check::Holds(output(rule, prev)?))
        }
        StepRule::CapacityTwo { b } => {
            if let Some(r) = ratio_matches(prev, b, budget)? {
                return Ok(fails(r));
            }
            if !ge(b, &RealExpr::int(2), budget)? || !ge(&RealExpr::int(4), b, budget)? {
                return Ok(fails(format!("hypothesis 2 <= b <= 4 fails for b = {b}")));
            }
            Ok(Check::Holds(output(rule, prev)?))
        }
        StepRule::ShortAxes => {
            let sorted = sort_exprs(prev.to_vec(), budget)?;
            let (Some(lo), Some(hi)) = (sorted.first(), sorted.last()) else {
                return Ok(fails("empty ellipsoid"));
            };
            if !ge(&(lo * RealExpr::int(2)), hi, budget)? {
                return Ok(fails(format!("largest axis {hi} exceeds twice the smallest {lo}")));
            }
            Ok(Check::Holds(vec![hi.clone(); prev.len()]))
        }
        StepRule::LambdaSplit { lambda, b } => {
            if let Some(r) = ratio_matches(prev, b, budget)? {
                return Ok(fails(r));
            }
            if !ge(b, &RealExpr::int(9), budget)? {
                return Ok(fails(format!("hypothesis b >= 9 fails for b = {b}")));
            }
            if !positive(lambda, budget)? || !ge(&RealExpr::one(), lambda, budget)? {
                return Ok(fails(format!("hypothesis lambda <= 1 fails for lambda = {lambda}")));
            }
            if !ge(&(lambda * lambda), &RealExpr::ratio(2, 3), budget)? {
                return Ok(fails(format!("hypothesis lambda^2 >= 2/3 fails for lambda = {lambda}")));
            }
            Ok(Check::Holds(output(rule, prev)?))
        }
        StepRule::BallPacking { e, f, c, d } => {
            if !e.is_positive() || e > f || !c.is_positive() || c > d {
                return Ok(fails(format!("need 0 < e <= f and 0 < c <= d, got E({e}, {f}) -> E({c}, {d})")));
            }
            if let Some(r) = ratio_matches(prev, &RealExpr::from(f / e), budget)? {
                return Ok(fails(r));
            }
            let problem = ellipsoid_to_ball_problem(e, f, c, d)?;
            let verdict = feasible(&problem)?;
            if !verdict.is_feasible() {
                let why = verdict.witness.map(|w| format!(", witness {w}")).unwrap_or_default();
                return Ok(fails(format!("ball packing {problem} is infeasible{why}")));
            }
            Ok(Check::Holds(output(rule, prev)?))
        }
    }
}

fn nested(
    inner: &EmbeddingCertificate,
    budget: &PrecisionBudget,
    out: impl FnOnce() -> Result<Vec<RealExpr>>,
) -> Result<Check> {
    match super::verify::verify_chain(inner, budget)? {
        super::Verdict::Valid => Ok(Check::Holds(out()?)),
        super::Verdict::Invalid { step, reason } => Ok(Check::Fails { path: Some(step), reason }),
    }
}
