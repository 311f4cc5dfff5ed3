//! Known values of `f(a, b)`, the smallest ball capacity admitting
//! `E(1, a, b)`, and two-sided bounds elsewhere.

use std::cmp::Ordering;
use std::fmt;

use super::builders::{build_fullfill2, build_olga3};
use super::rules::sqrt_threshold;
use super::verify::verify_chain;
use super::{EmbeddingCertificate, EmbeddingStep, StepRule};
use crate::capacities::{ball_lower_bound, ek_capacities, Ellipsoid, LowerWitness};
use crate::exact::{compare, le, PrecisionBudget, RealExpr};
use crate::{Error, Result};

/// Region of the `(a, b)` plane where `f` is known, named by the
/// construction behind the upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    /// `b <= 2`: `f = b`.
    ShortAxes,
    /// `g(b) <= a <= 3`: `f = a`.
    FourDimCapacity,
    /// `a <= 2 <= b <= 4`: `f = 2`.
    CapacityTwo,
    /// `a = 1`, `4 < b <= 8`: `f = 2`.
    ThinEllipsoid,
    /// `a = g(b)`: `f = g(b)`.
    Diagonal,
    /// Large `b`: `f = (ab)^{1/3}`.
    VolumeFilling,
}

impl Region {
    pub fn name(&self) -> &'static str {
        match self {
            Region::ShortAxes => "short-axes",
            Region::FourDimCapacity => "four-dim-capacity",
            Region::CapacityTwo => "capacity-two",
            Region::ThinEllipsoid => "thin-ellipsoid",
            Region::Diagonal => "diagonal",
            Region::VolumeFilling => "volume-filling",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnownValue {
    pub value: RealExpr,
    pub region: Region,
    /// Lower bound matching `value`.
    pub witness: LowerWitness,
    /// Verified embedding `E(1, a, b) -> B(value)`.
    pub certificate: EmbeddingCertificate,
}

fn eq(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<bool> {
    Ok(compare(a, b, budget)? == Ordering::Equal)
}

/// The four-dimensional capacity `g(b)` where it is known: `2` on
/// `[2, 4]` and `sqrt b` for `b = 4` or `b >= 289/36`, with the rule that
/// proves it.
fn known_g(b: &RealExpr, budget: &PrecisionBudget) -> Result<Option<(RealExpr, StepRule)>> {
    let (two, four) = (RealExpr::int(2), RealExpr::int(4));
    if le(&two, b, budget)? && le(b, &four, budget)? {
        return Ok(Some((two, StepRule::CapacityTwo { b: b.clone() })));
    }
    if le(&sqrt_threshold(), b, budget)? {
        return Ok(Some((b.sqrt(), StepRule::SqrtCapacity { b: b.clone() })));
    }
    Ok(None)
}

fn ball(c: &RealExpr) -> Vec<RealExpr> {
    vec![c.clone(); 3]
}

/// `E(1, a, b)`: the four-dimensional rule on `(1, b)`, then inclusion.
fn via_four_dim(a: &RealExpr, b: &RealExpr, rule: StepRule, value: &RealExpr) -> Result<EmbeddingCertificate> {
    let one = RealExpr::one();
    let inner = {
        let result = super::rules::output(&rule, &[one.clone(), b.clone()])?;
        EmbeddingCertificate {
            source: vec![one.clone(), b.clone()],
            target: result.clone(),
            steps: vec![EmbeddingStep { rule, result }],
        }
    };
    let after = inner.target.iter().cloned().chain([a.clone()]).collect();
    let steps = vec![
        EmbeddingStep { rule: StepRule::Permute(vec![0, 2, 1]), result: vec![one.clone(), b.clone(), a.clone()] },
        EmbeddingStep { rule: StepRule::Suspend { m: 2, inner: Box::new(inner) }, result: after },
        EmbeddingStep { rule: StepRule::Inclusion, result: ball(value) },
    ];
    Ok(EmbeddingCertificate { source: vec![one, a.clone(), b.clone()], target: ball(value), steps })
}

fn check_input(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<()> {
    if !le(&RealExpr::one(), a, budget)? || !le(a, b, budget)? {
        return Err(Error::InvalidInput(format!("need 1 <= a <= b, got a = {a}, b = {b}")));
    }
    Ok(())
}

/// The exact value of `f(a, b)` where a matching pair of bounds is known.
/// Both bounds are re-checked before returning.
pub fn f_known(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<Option<KnownValue>> {
    check_input(a, b, budget)?;
    let Some((region, value, witness, certificate)) = classify(a, b, budget)? else {
        return Ok(None);
    };
    let source = Ellipsoid::new(vec![RealExpr::one(), a.clone(), b.clone()], budget)?;
    let lower = match witness {
        LowerWitness::Volume => (a * b).pow_ratio(1, 3),
        LowerWitness::Capacity(k) => ek_capacities(&source, k, budget)?
            .get(k)
            .cloned()
            .ok_or_else(|| Error::VerificationFailed("missing capacity".into()))?,
    };
    if !eq(&lower, &value, budget)? {
        return Err(Error::VerificationFailed(format!("{region} lower bound {lower} differs from {value}")));
    }
    let verdict = verify_chain(&certificate, budget)?;
    if !verdict.is_valid() {
        return Err(Error::VerificationFailed(format!("{region} certificate: {verdict}")));
    }
    Ok(Some(KnownValue { value, region, witness, certificate }))
}

type Classified = (Region, RealExpr, LowerWitness, EmbeddingCertificate);

fn classify(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<Option<Classified>> {
    let (one, two, three, four) = (RealExpr::one(), RealExpr::int(2), RealExpr::int(3), RealExpr::int(4));
    let source = vec![one.clone(), a.clone(), b.clone()];
    if le(b, &two, budget)? {
        let certificate = EmbeddingCertificate {
            source,
            target: ball(b),
            steps: vec![EmbeddingStep { rule: StepRule::ShortAxes, result: ball(b) }],
        };
        return Ok(Some((Region::ShortAxes, b.clone(), LowerWitness::Capacity(3), certificate)));
    }
    let g = known_g(b, budget)?;
    if let Some((gb, rule)) = &g {
        if le(a, &three, budget)? && le(gb, a, budget)? {
            let certificate = via_four_dim(a, b, rule.clone(), a)?;
            return Ok(Some((Region::FourDimCapacity, a.clone(), LowerWitness::Capacity(3), certificate)));
        }
    }
    if le(a, &two, budget)? && le(b, &four, budget)? {
        let certificate = via_four_dim(a, b, StepRule::CapacityTwo { b: b.clone() }, &two)?;
        return Ok(Some((Region::CapacityTwo, two, LowerWitness::Capacity(3), certificate)));
    }
    if eq(a, &one, budget)? && le(b, &RealExpr::int(8), budget)? {
        let thin = build_olga3(&2.into(), 3)?;
        let mut steps = vec![EmbeddingStep { rule: StepRule::Inclusion, result: thin.source.clone() }];
        steps.extend(thin.steps);
        let certificate = EmbeddingCertificate { source, target: ball(&two), steps };
        return Ok(Some((Region::ThinEllipsoid, two, LowerWitness::Capacity(3), certificate)));
    }
    if let Some((gb, rule)) = g {
        if eq(a, &gb, budget)? {
            let certificate = via_four_dim(a, b, rule, &gb)?;
            return Ok(Some((Region::Diagonal, gb, LowerWitness::Volume, certificate)));
        }
    }
    match build_fullfill2(a, b, budget) {
        Ok(certificate) => {
            let value = certificate.target[0].clone();
            Ok(Some((Region::VolumeFilling, value, LowerWitness::Volume, certificate)))
        }
        Err(Error::HypothesisViolated(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Two-sided bounds on `f(a, b)` with the certificate behind the upper one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FBounds {
    pub lower: RealExpr,
    pub upper: RealExpr,
    pub region: Option<Region>,
    pub certificate: EmbeddingCertificate,
}

impl FBounds {
    pub fn is_exact(&self, budget: &PrecisionBudget) -> Result<bool> {
        eq(&self.lower, &self.upper, budget)
    }
}

/// Lower bound from capacities and volume over the first `count`
/// capacities; upper bound from the best verified construction, falling
/// back to the inclusion into `B(b)`.
pub fn f_bounds(a: &RealExpr, b: &RealExpr, count: usize, budget: &PrecisionBudget) -> Result<FBounds> {
    check_input(a, b, budget)?;
    let source = Ellipsoid::new(vec![RealExpr::one(), a.clone(), b.clone()], budget)?;
    let lower = ball_lower_bound(&source, count.max(1), budget)?;
    if let Some(known) = f_known(a, b, budget)? {
        if compare(&lower, &known.value, budget)? == Ordering::Greater {
            return Err(Error::VerificationFailed(format!(
                "capacity bound {lower} exceeds the constructed value {}",
                known.value
            )));
        }
        return Ok(FBounds {
            lower: known.value.clone(),
            upper: known.value,
            region: Some(known.region),
            certificate: known.certificate,
        });
    }
    let mut best = (
        b.clone(),
        EmbeddingCertificate {
            source: vec![RealExpr::one(), a.clone(), b.clone()],
            target: ball(b),
            steps: vec![EmbeddingStep { rule: StepRule::Inclusion, result: ball(b) }],
        },
    );
    let mut candidates = Vec::new();
    let two = RealExpr::int(2);
    if le(&two, b, budget)? && le(b, &RealExpr::int(4), budget)? {
        candidates.push((StepRule::CapacityTwo { b: b.clone() }, two.clone()));
    }
    if eq(b, &RealExpr::int(4), budget)? || le(&sqrt_threshold(), b, budget)? {
        candidates.push((StepRule::SqrtCapacity { b: b.clone() }, b.sqrt()));
    }
    for (rule, g) in candidates {
        let value = if le(a, &g, budget)? { g } else { a.clone() };
        if compare(&value, &best.0, budget)? == Ordering::Less {
            let certificate = via_four_dim(a, b, rule, &value)?;
            if verify_chain(&certificate, budget)?.is_valid() {
                best = (value, certificate);
            }
        }
    }
    Ok(FBounds { lower, upper: best.0, region: None, certificate: best.1 })
}
