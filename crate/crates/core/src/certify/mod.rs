//! Step-chain certificates for ellipsoid embeddings: the rules, a verifier,
//! builders for the known constructions and the known values of the
//! six-dimensional capacity function.

mod builders;
mod json;
mod known;
mod rules;
mod verify;

use std::fmt;

use num_rational::BigRational;

use crate::capacities::Ellipsoid;
use crate::exact::{PrecisionBudget, RealExpr};
use crate::Result;

pub use builders::{
    build_fullfill2, build_lambdatrick, build_olga2, build_olga3, build_olga4, build_pack, fullfill_hypothesis_bound,
    fullfill_hypothesis_expr, stability_bounds, stability_threshold, verify_pack, LambdaReport, PackCertificate,
    StabilityBounds, ToricEvidence, EXPLICIT_TORIC_LIMIT,
};
pub use json::CERTIFICATE_VERSION;
pub use known::{f_bounds, f_known, FBounds, KnownValue, Region};
pub use rules::SQRT_THRESHOLD;
pub use verify::{verify_certificate, Verdict};

/// One inference rule. Two-axis rules act on a pair `(x, y)` with
/// `y / x = b` and are scale invariant.
#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepRule {
    /// Every axis grows or stays; the result is given explicitly.
    Inclusion,
    /// `result[i] = previous[perm[i]]`.
    Permute(Vec<usize>),
    /// The previous ellipsoid is `factor` times the inner source; the result
    /// is `factor` times the inner target.
    Rescale { factor: RealExpr, inner: Box<EmbeddingCertificate> },
    /// The inner certificate acts on the first `m` axes; the others stay.
    Suspend { m: usize, inner: Box<EmbeddingCertificate> },
    /// `E(1, b) -> B(sqrt b)` when `b = 4` or `b >= 289/36`.
    SqrtCapacity { b: RealExpr },
    /// `E(1, b) -> B(2)` when `2 <= b <= 4`.
    CapacityTwo { b: RealExpr },
    /// `E(a_1, ..., a_n) -> B(max)` when `max <= 2 min`.
    ShortAxes,
    /// `E(1, b) -> E(λ sqrt b, sqrt b / λ)` when `2/3 <= λ^2`, `λ <= 1`
    /// and `b >= 9`.
    LambdaSplit { lambda: RealExpr, b: RealExpr },
    /// `E(e, f) -> E(c, d)`, checked through the ball packing problem.
    BallPacking { e: BigRational, f: BigRational, c: BigRational, d: BigRational },
}

impl StepRule {
    /// Name used in serialized certificates.
    pub fn name(&self) -> &'static str {
        match self {
            StepRule::Inclusion => "Inclusion",
            StepRule::Permute(_) => "Permute",
            StepRule::Rescale { .. } => "Rescale",
            StepRule::Suspend { .. } => "Suspend",
            StepRule::SqrtCapacity { .. } => "AxiomMSsqrt",
            StepRule::CapacityTwo { .. } => "AxiomMSg2",
            StepRule::ShortAxes => "AxiomTwoA1",
            StepRule::LambdaSplit { .. } => "AxiomLambda35",
            StepRule::BallPacking { .. } => "BallPack4D",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingStep {
    pub rule: StepRule,
    /// Axes after the step, in order.
    pub result: Vec<RealExpr>,
}

/// A chain of steps from `source` to `target` (up to permutation).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingCertificate {
    pub source: Vec<RealExpr>,
    pub target: Vec<RealExpr>,
    pub steps: Vec<EmbeddingStep>,
}

impl EmbeddingCertificate {
    pub fn source_ellipsoid(&self, budget: &PrecisionBudget) -> Result<Ellipsoid> {
        Ellipsoid::new(self.source.clone(), budget)
    }

    pub fn target_ellipsoid(&self, budget: &PrecisionBudget) -> Result<Ellipsoid> {
        Ellipsoid::new(self.target.clone(), budget)
    }

    /// Total number of steps including those of nested certificates.
    pub fn total_steps(&self) -> usize {
        self.steps
            .iter()
            .map(|s| {
                1 + match &s.rule {
                    StepRule::Rescale { inner, .. } | StepRule::Suspend { inner, .. } => inner.total_steps(),
                    _ => 0,
                }
            })
            .sum()
    }

    /// The same chain with every ellipsoid multiplied by `t > 0`.
    pub fn scaled(&self, t: &RealExpr) -> EmbeddingCertificate {
        let scale = |v: &[RealExpr]| v.iter().map(|a| t * a).collect::<Vec<_>>();
        EmbeddingCertificate {
            source: scale(&self.source),
            target: scale(&self.target),
            steps: self
                .steps
                .iter()
                .map(|s| EmbeddingStep {
                    rule: match &s.rule {
                        StepRule::Rescale { factor, inner } => {
                            StepRule::Rescale { factor: t * factor, inner: inner.clone() }
                        }
                        StepRule::Suspend { m, inner } => StepRule::Suspend { m: *m, inner: Box::new(inner.scaled(t)) },
                        other => other.clone(),
                    },
                    result: scale(&s.result),
                })
                .collect(),
        }
    }
}

pub(crate) fn fmt_axes(axes: &[RealExpr]) -> String {
    let inner: Vec<String> = axes.iter().map(ToString::to_string).collect();
    format!("E({})", inner.join(", "))
}

impl fmt::Display for EmbeddingCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}

impl EmbeddingCertificate {
    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        writeln!(f, "{pad}{} -> {}", fmt_axes(&self.source), fmt_axes(&self.target))?;
        for (i, s) in self.steps.iter().enumerate() {
            let detail = match &s.rule {
                StepRule::Permute(p) => format!(" {p:?}"),
                StepRule::Rescale { factor, .. } => format!(" by {factor}"),
                StepRule::Suspend { m, .. } => format!(" on first {m} axes"),
                StepRule::SqrtCapacity { b } | StepRule::CapacityTwo { b } => format!(" b = {b}"),
                StepRule::LambdaSplit { lambda, b } => format!(" lambda = {lambda}, b = {b}"),
                StepRule::BallPacking { e, f: ff, c, d } => format!(" E({e}, {ff}) -> E({c}, {d})"),
                StepRule::Inclusion | StepRule::ShortAxes => String::new(),
            };
            writeln!(f, "{pad}  {}. {}{} => {}", i + 1, s.rule.name(), detail, fmt_axes(&s.result))?;
            if let StepRule::Rescale { inner, .. } | StepRule::Suspend { inner, .. } = &s.rule {
                inner.write_indented(f, depth + 2)?;
            }
        }
        Ok(())
    }
}
