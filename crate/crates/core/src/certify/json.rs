//! JSON form of certificates. Numbers are strings in the expression
//! grammar, so a document parses back to the identical certificate.

use serde_json::{json, Map, Value};

use super::{EmbeddingCertificate, EmbeddingStep, StepRule};
use crate::exact::{parse_rational, RealExpr};
use crate::{Error, Result};

pub const CERTIFICATE_VERSION: u64 = 1;

fn exprs(v: &[RealExpr]) -> Value {
    Value::Array(v.iter().map(|a| Value::String(a.to_string())).collect())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(format!("malformed certificate: {}", msg.into()))
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| bad(format!("missing `{key}`")))
}

fn expr(v: &Value) -> Result<RealExpr> {
    let s = v.as_str().ok_or_else(|| bad(format!("expected an expression string, got {v}")))?;
    Ok(s.parse()?)
}

fn expr_list(v: &Value) -> Result<Vec<RealExpr>> {
    v.as_array().ok_or_else(|| bad("expected an array of expressions"))?.iter().map(expr).collect()
}

fn uint(v: &Value) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| bad(format!("expected a nonnegative integer, got {v}")))
}

fn rational(v: &Value) -> Result<num_rational::BigRational> {
    let s = v.as_str().ok_or_else(|| bad(format!("expected a rational string, got {v}")))?;
    Ok(parse_rational(s)?)
}

impl EmbeddingCertificate {
    /// Top-level document with a version tag.
    pub fn to_json(&self) -> Value {
        let mut v = self.body_json();
        v["version"] = json!(CERTIFICATE_VERSION);
        v
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("certificate serializes")
    }

    fn body_json(&self) -> Value {
        json!({
            "source": exprs(&self.source),
            "target": exprs(&self.target),
            "steps": self.steps.iter().map(step_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        if let Some(ver) = v.get("version") {
            if ver.as_u64() != Some(CERTIFICATE_VERSION) {
                return Err(bad(format!("unsupported version {ver}")));
            }
        }
        let steps = field(v, "steps")?.as_array().ok_or_else(|| bad("`steps` is not an array"))?;
        Ok(EmbeddingCertificate {
            source: expr_list(field(v, "source")?)?,
            target: expr_list(field(v, "target")?)?,
            steps: steps.iter().map(step_from_json).collect::<Result<_>>()?,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
        Self::from_json(&v)
    }
}

fn step_json(s: &EmbeddingStep) -> Value {
    let r = |x: &num_rational::BigRational| Value::String(RealExpr::from(x).to_string());
    let params = match &s.rule {
        StepRule::Inclusion | StepRule::ShortAxes => json!({}),
        StepRule::Permute(p) => json!({ "perm": p }),
        StepRule::Rescale { factor, inner } => json!({ "factor": factor.to_string(), "inner": inner.body_json() }),
        StepRule::Suspend { m, inner } => json!({ "m": m, "inner": inner.body_json() }),
        StepRule::SqrtCapacity { b } | StepRule::CapacityTwo { b } => json!({ "b": b.to_string() }),
        StepRule::LambdaSplit { lambda, b } => json!({ "lambda": lambda.to_string(), "b": b.to_string() }),
        StepRule::BallPacking { e, f, c, d } => json!({ "e": r(e), "f": r(f), "c": r(c), "d": r(d) }),
    };
    json!({ "rule": s.rule.name(), "params": params, "result": exprs(&s.result) })
}

fn step_from_json(v: &Value) -> Result<EmbeddingStep> {
    let name = field(v, "rule")?.as_str().ok_or_else(|| bad("`rule` is not a string"))?;
    let empty = Value::Object(Map::new());
    let p = v.get("params").unwrap_or(&empty);
    let inner =
        || -> Result<Box<EmbeddingCertificate>> { Ok(Box::new(EmbeddingCertificate::from_json(field(p, "inner")?)?)) };
    let rule = match name {
        "Inclusion" => StepRule::Inclusion,
        "AxiomTwoA1" => StepRule::ShortAxes,
        "Permute" => StepRule::Permute(
            field(p, "perm")?
                .as_array()
                .ok_or_else(|| bad("`perm` is not an array"))?
                .iter()
                .map(uint)
                .collect::<Result<_>>()?,
        ),
        "Rescale" => StepRule::Rescale { factor: expr(field(p, "factor")?)?, inner: inner()? },
        "Suspend" => StepRule::Suspend { m: uint(field(p, "m")?)?, inner: inner()? },
        "AxiomMSsqrt" => StepRule::SqrtCapacity { b: expr(field(p, "b")?)? },
        "AxiomMSg2" => StepRule::CapacityTwo { b: expr(field(p, "b")?)? },
        "AxiomLambda35" => StepRule::LambdaSplit { lambda: expr(field(p, "lambda")?)?, b: expr(field(p, "b")?)? },
        "BallPack4D" => StepRule::BallPacking {
            e: rational(field(p, "e")?)?,
            f: rational(field(p, "f")?)?,
            c: rational(field(p, "c")?)?,
            d: rational(field(p, "d")?)?,
        },
        other => return Err(bad(format!("unknown rule `{other}`"))),
    };
    Ok(EmbeddingStep { rule, result: expr_list(field(v, "result")?)? })
}
