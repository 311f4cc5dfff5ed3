//! Independent re-check of a certificate chain.

use std::cmp::Ordering;
use std::fmt;

use super::rules::{check, Check};
use super::{fmt_axes, EmbeddingCertificate};
use crate::capacities::sort_exprs;
use crate::exact::{compare, sign, PrecisionBudget, RealExpr};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// `step` is 1-based; nested steps are joined with dots, e.g. `2.3`.
    /// Step `0` refers to the source or target themselves.
    Invalid {
        step: String,
        reason: String,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        *self == Verdict::Valid
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "Valid"),
            Verdict::Invalid { step, reason } => write!(f, "Invalid at step {step}: {reason}"),
        }
    }
}

/// Re-checks every step of `c`: hypotheses, the stored results, that the
/// axis product never shrinks, and that the chain ends at the target up to
/// permutation. Precision exhaustion is reported as an error tagged with
/// the step where it happened.
pub fn verify_certificate(c: &EmbeddingCertificate, budget: &PrecisionBudget) -> Result<Verdict> {
    verify_chain(c, budget)
}

fn invalid(step: impl Into<String>, reason: impl Into<String>) -> Verdict {
    Verdict::Invalid { step: step.into(), reason: reason.into() }
}

fn definite(e: Error, step: &str) -> Result<Verdict> {
    if e.is_exhaustion() {
        Err(e.at_step(step))
    } else {
        Ok(invalid(step, e.to_string()))
    }
}

pub(crate) fn verify_chain(c: &EmbeddingCertificate, budget: &PrecisionBudget) -> Result<Verdict> {
    if c.source.is_empty() || c.source.len() != c.target.len() {
        return Ok(invalid(
            "0",
            format!("source {} and target {} differ in dimension", fmt_axes(&c.source), fmt_axes(&c.target)),
        ));
    }
    for a in c.source.iter().chain(&c.target) {
        match sign(a, budget) {
            Ok(Ordering::Greater) => {}
            Ok(_) => return Ok(invalid("0", format!("axis {a} is not positive"))),
            Err(e) => return definite(e.into(), "0"),
        }
    }
    let mut current = c.source.clone();
    for (i, s) in c.steps.iter().enumerate() {
        let label = (i + 1).to_string();
        match step(&current, s, budget) {
            Ok(Ok(())) => current = s.result.clone(),
            Ok(Err((path, reason))) => {
                let step = path.map_or_else(|| label.clone(), |p| format!("{label}.{p}"));
                return Ok(invalid(step, reason));
            }
            Err(e) => return definite(e, &label),
        }
    }
    match ends_at(&current, &c.target, budget) {
        Ok(true) => Ok(Verdict::Valid),
        Ok(false) => Ok(invalid(
            c.steps.len().to_string(),
            format!("chain ends at {}, not at the target {}", fmt_axes(&current), fmt_axes(&c.target)),
        )),
        Err(e) => definite(e, &c.steps.len().to_string()),
    }
}

type StepOutcome = std::result::Result<(), (Option<String>, String)>;

fn step(prev: &[RealExpr], s: &super::EmbeddingStep, budget: &PrecisionBudget) -> Result<StepOutcome> {
    let expected = match check(&s.rule, prev, &s.result, budget)? {
        Check::Holds(v) => v,
        Check::Fails { path, reason } => return Ok(Err((path, reason))),
    };
    if expected.len() != s.result.len() {
        return Ok(Err((
            None,
            format!("{} yields {} axes, result has {}", s.rule.name(), expected.len(), s.result.len()),
        )));
    }
    for (x, y) in expected.iter().zip(&s.result) {
        if compare(x, y, budget)? != Ordering::Equal {
            return Ok(Err((
                None,
                format!("{} yields {}, result states {}", s.rule.name(), fmt_axes(&expected), fmt_axes(&s.result)),
            )));
        }
    }
    if compare(&RealExpr::product(&s.result), &RealExpr::product(prev), budget)? == Ordering::Less {
        return Ok(Err((None, "axis product decreases".into())));
    }
    Ok(Ok(()))
}

fn ends_at(end: &[RealExpr], target: &[RealExpr], budget: &PrecisionBudget) -> Result<bool> {
    if end.len() != target.len() {
        return Ok(false);
    }
    let a = sort_exprs(end.to_vec(), budget)?;
    let b = sort_exprs(target.to_vec(), budget)?;
    for (x, y) in a.iter().zip(&b) {
        if compare(x, y, budget)? != Ordering::Equal {
            return Ok(false);
        }
    }
    Ok(true)
}
