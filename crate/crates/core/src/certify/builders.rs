//! Builders for the embedding constructions, the stability constants and
//! the ball packing certificates.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rules::{output, sqrt_threshold};
use super::verify::verify_chain;
use super::{EmbeddingCertificate, EmbeddingStep, StepRule, Verdict};
use crate::exact::{compare, eval_interval, floor_expr, lt, IntervalApprox, PrecisionBudget, RealExpr};
use crate::packing::feasible;
use crate::toric::{subdivide, theta, verify_tiling, LatticePolytope, Subdivision, UnimodularAffineMap};
use crate::weights::ellipsoid_to_ball_problem;
use crate::{Error, Result};

/// Chains are assembled with the rule outputs; hypotheses are left to the
/// verifier.
struct Chain {
    source: Vec<RealExpr>,
    current: Vec<RealExpr>,
    steps: Vec<EmbeddingStep>,
}

impl Chain {
    fn new(source: Vec<RealExpr>) -> Self {
        Chain { current: source.clone(), source, steps: Vec::new() }
    }

    fn push(&mut self, rule: StepRule) -> Result<()> {
        let result = output(&rule, &self.current)?;
        self.current = result.clone();
        self.steps.push(EmbeddingStep { rule, result });
        Ok(())
    }

    /// Consecutive permutations are merged into one step.
    fn permute(&mut self, mut perm: Vec<usize>) -> Result<()> {
        if let Some(EmbeddingStep { rule: StepRule::Permute(prev), .. }) = self.steps.last() {
            perm = perm.iter().map(|&i| prev[i]).collect();
            self.steps.pop();
            self.current = self.steps.last().map_or_else(|| self.source.clone(), |s| s.result.clone());
        }
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(());
        }
        self.push(StepRule::Permute(perm))
    }

    /// Moves the given positions to the front, in the given order, keeping
    /// the others in their current order.
    fn focus(&mut self, front: &[usize]) -> Result<()> {
        let mut perm = front.to_vec();
        perm.extend((0..self.current.len()).filter(|i| !front.contains(i)));
        self.permute(perm)
    }

    /// Position of the first axis structurally equal to `value` not in `skip`.
    fn find(&self, value: &RealExpr, skip: &[usize]) -> Result<usize> {
        (0..self.current.len())
            .find(|i| !skip.contains(i) && &self.current[*i] == value)
            .ok_or_else(|| Error::InvalidInput(format!("no free axis {value} in the chain")))
    }

    /// Applies `inner` to the leading axes.
    fn suspend(&mut self, inner: EmbeddingCertificate) -> Result<()> {
        if inner.steps.is_empty() {
            return Ok(());
        }
        let m = inner.source.len();
        if m == self.current.len() {
            for s in inner.steps {
                self.current = s.result.clone();
                self.steps.push(s);
            }
            return Ok(());
        }
        self.push(StepRule::Suspend { m, inner: Box::new(inner) })
    }

    fn rescale(&mut self, factor: RealExpr, inner: EmbeddingCertificate) -> Result<()> {
        self.push(StepRule::Rescale { factor, inner: Box::new(inner) })
    }

    fn include(&mut self, target: Vec<RealExpr>) {
        self.current = target.clone();
        self.steps.push(EmbeddingStep { rule: StepRule::Inclusion, result: target });
    }

    fn finish(self, target: Vec<RealExpr>) -> EmbeddingCertificate {
        EmbeddingCertificate { source: self.source, target, steps: self.steps }
    }
}

fn big(k: &BigInt) -> RealExpr {
    RealExpr::big_int(k.clone())
}

fn ones(n: usize) -> Vec<RealExpr> {
    vec![RealExpr::one(); n]
}

/// `E(1^{n-1}, b)`.
fn thin(n: usize, b: RealExpr) -> Vec<RealExpr> {
    let mut v = ones(n - 1);
    v.push(b);
    v
}

/// Two-axis certificate consisting of a single axiom step.
fn single(source: Vec<RealExpr>, rule: StepRule) -> Result<EmbeddingCertificate> {
    let mut chain = Chain::new(source);
    chain.push(rule)?;
    let target = chain.current.clone();
    Ok(chain.finish(target))
}

fn hypothesis(msg: impl Into<String>) -> Error {
    Error::HypothesisViolated(msg.into())
}

/// `E(1, k^{2x+1}) -> E(k^x, k^{x+1})` through one ball packing step.
pub fn build_olga2(k: &BigInt, x: u32) -> Result<EmbeddingCertificate> {
    if !k.is_positive() || x == 0 {
        return Err(Error::InvalidInput("need k >= 1 and x >= 1".into()));
    }
    let f = k.pow(2 * x + 1);
    let (c, d) = (k.pow(x), k.pow(x + 1));
    let source = vec![RealExpr::one(), big(&f)];
    let target = vec![big(&c), big(&d)];
    let mut chain = Chain::new(source);
    if k.is_one() {
        chain.include(target.clone());
    } else {
        let r = |v: BigInt| BigRational::from_integer(v);
        chain.push(StepRule::BallPacking { e: BigRational::one(), f: r(f), c: r(c), d: r(d) })?;
    }
    Ok(chain.finish(target))
}

/// `E(1^{n-1}, k^n) -> B(k)`, by splitting odd `n = 2m + 1` into the
/// dimensions `m` and `m + 1`, and reducing even `n = 2m` to `k^2` in
/// dimension `m`.
pub fn build_olga3(k: &BigInt, n: usize) -> Result<EmbeddingCertificate> {
    if !k.is_positive() || n == 0 {
        return Err(Error::InvalidInput("need k >= 1 and n >= 1".into()));
    }
    let exp = u32::try_from(n).map_err(|_| Error::ResourceLimit("dimension too large".into()))?;
    let kk = big(k);
    let source = thin(n, big(&k.pow(exp)));
    let target = vec![kk.clone(); n];
    let mut chain = Chain::new(source);
    if n == 1 || k.is_one() {
        return Ok(chain.finish(target));
    }
    if n == 2 {
        chain.push(StepRule::SqrtCapacity { b: big(&(k * k)) })?;
        return Ok(chain.finish(target));
    }
    let m = n / 2;
    let one = RealExpr::one();
    if n % 2 == 1 {
        chain.focus(&[0, n - 1])?;
        chain.suspend(build_olga2(k, m as u32)?)?;
        // now (k^m, k^{m+1}, 1^{2m-1}); arrange (1^{m-1}, k^m, 1^m, k^{m+1})
        let mut perm: Vec<usize> = (2..m + 1).collect();
        perm.push(0);
        perm.extend(m + 1..n);
        perm.push(1);
        chain.permute(perm)?;
        chain.suspend(build_olga3(k, m)?)?;
        chain.focus(&(m..n).collect::<Vec<_>>())?;
        chain.suspend(build_olga3(k, m + 1)?)?;
    } else {
        let k2 = k * k;
        let top = big(&k.pow(exp));
        let mut front: Vec<usize> = Vec::with_capacity(m);
        for _ in 0..m - 1 {
            front.push(chain.find(&one, &front)?);
        }
        front.push(chain.find(&top, &front)?);
        chain.focus(&front)?;
        chain.suspend(build_olga3(&k2, m)?)?;
        let kk2 = big(&k2);
        for _ in 0..m {
            let i = chain.find(&one, &[])?;
            let j = chain.find(&kk2, &[])?;
            chain.focus(&[i, j])?;
            chain.suspend(single(vec![one.clone(), kk2.clone()], StepRule::SqrtCapacity { b: kk2.clone() })?)?;
        }
    }
    Ok(chain.finish(target))
}

/// `β_n` for `n >= 3`.
fn beta_expr(n: usize) -> RealExpr {
    let q = 2 * n as i64 - 2;
    let r = RealExpr::int(3).pow_ratio(1, q);
    let t = RealExpr::int(2).pow_ratio(1, q);
    let e = BigRational::new(BigInt::from(2 * n * (n - 1)), BigInt::from(n - 2));
    (&r / (&r - &t)).pow(e)
}

/// The threshold `M_n` as an exact expression: `289/36` for `n = 2`, then
/// `max(M_{n-1}^2, β_n)`.
pub fn stability_threshold(n: usize, budget: &PrecisionBudget) -> Result<RealExpr> {
    if n < 2 {
        return Err(Error::InvalidInput("the threshold is defined for n >= 2".into()));
    }
    let mut m = sqrt_threshold();
    for d in 3..=n {
        let sq = m.powi(2);
        let beta = beta_expr(d);
        m = if compare(&sq, &beta, budget)? == Ordering::Less { beta } else { sq };
    }
    Ok(m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityBounds {
    pub n: usize,
    /// `β_n`; absent for `n = 2`.
    pub beta: Option<IntervalApprox>,
    pub m: RealExpr,
    pub m_interval: IntervalApprox,
}

pub fn stability_bounds(n: usize, bits: u64) -> Result<StabilityBounds> {
    let budget = PrecisionBudget::default();
    let m = stability_threshold(n, &budget)?;
    let beta = if n >= 3 { Some(eval_interval(&beta_expr(n), bits)?) } else { None };
    let m_interval = eval_interval(&m, bits)?;
    Ok(StabilityBounds { n, beta, m, m_interval })
}

/// `E(1^{n-1}, b) -> B(b^{1/n})` for `b >= M_n`.
pub fn build_olga4(b: &RealExpr, n: usize, budget: &PrecisionBudget) -> Result<EmbeddingCertificate> {
    let threshold = stability_threshold(n, budget)?;
    if compare(b, &threshold, budget)? == Ordering::Less {
        return Err(hypothesis(format!("b = {b} is below the threshold for n = {n}")));
    }
    let source = thin(n, b.clone());
    let target = vec![b.pow(BigRational::new(BigInt::one(), BigInt::from(n))); n];
    if n == 2 {
        return Ok(single(source, StepRule::SqrtCapacity { b: b.clone() })?.retarget(target));
    }
    let e = BigRational::new(BigInt::from(n - 2), BigInt::from(2 * n * (n - 1)));
    let be = b.pow(e);
    let k = floor_expr(&be, budget)?;
    let lambda = (big(&k) / &be).powi(n as i64 - 1);
    let mut chain = Chain::new(source);
    chain.focus(&[0, n - 1])?;
    chain.suspend(single(vec![RealExpr::one(), b.clone()], StepRule::LambdaSplit { lambda, b: b.clone() })?)?;
    // (λ sqrt b, sqrt b / λ, 1^{n-2}) to (1^{n-2}, sqrt b / λ, λ sqrt b)
    let mut perm: Vec<usize> = (2..n).collect();
    perm.extend([1, 0]);
    chain.permute(perm)?;
    let c = chain.current[n - 2].clone();
    chain.suspend(build_olga4(&c, n - 1, budget)?)?;
    let s = chain.current[0].clone();
    chain.rescale(s, build_olga3(&k, n)?)?;
    Ok(chain.finish(target))
}

impl EmbeddingCertificate {
    fn retarget(mut self, target: Vec<RealExpr>) -> Self {
        self.target = target;
        self
    }
}

fn threshold_three(budget: &PrecisionBudget) -> Result<RealExpr> {
    stability_threshold(3, budget)
}

/// `E(1, a, b) -> B((ab)^{1/3})` when `b > M_3^4 a^2`, or `a >= 289/36`
/// and `b > M_3^2`.
pub fn build_fullfill2(a: &RealExpr, b: &RealExpr, budget: &PrecisionBudget) -> Result<EmbeddingCertificate> {
    let one = RealExpr::one();
    if lt(a, &one, budget)? || lt(b, a, budget)? {
        return Err(Error::InvalidInput(format!("need 1 <= a <= b, got a = {a}, b = {b}")));
    }
    let m3 = threshold_three(budget)?;
    let source = vec![one.clone(), a.clone(), b.clone()];
    let target = vec![(a * b).pow_ratio(1, 3); 3];
    let mut chain = Chain::new(source);
    if lt(&(m3.powi(4) * a.powi(2)), b, budget)? {
        let root_b = b.sqrt();
        chain.permute(vec![0, 2, 1])?;
        chain.suspend(single(vec![one.clone(), b.clone()], StepRule::SqrtCapacity { b: b.clone() })?)?;
        chain.permute(vec![2, 0, 1])?;
        let ratio = &root_b / a;
        chain.suspend(single(vec![a.clone(), chain.current[1].clone()], StepRule::SqrtCapacity { b: ratio })?)?;
        let t = a.sqrt() * b.pow_ratio(1, 4);
        let inner_b = b.pow_ratio(1, 4) / a.sqrt();
        chain.rescale(t, build_olga4(&inner_b, 3, budget)?)?;
    } else if !lt(a, &sqrt_threshold(), budget)? && lt(&m3.powi(2), b, budget)? {
        chain.suspend(single(vec![one.clone(), a.clone()], StepRule::SqrtCapacity { b: a.clone() })?)?;
        let root_a = a.sqrt();
        chain.rescale(root_a.clone(), build_olga4(&(b / &root_a), 3, budget)?)?;
    } else {
        return Err(hypothesis(format!(
            "E(1, {a}, {b}) satisfies neither b > M_3^4 a^2 nor a >= 289/36 with b > M_3^2"
        )));
    }
    Ok(chain.finish(target))
}

/// `(289/36)^2 (1 + (289/36)^2 (3^{1/4} / (3^{1/4} - 2^{1/4}))^{96})`.
pub fn fullfill_hypothesis_expr() -> RealExpr {
    let m2 = sqrt_threshold().powi(2);
    let r = RealExpr::int(3).pow_ratio(1, 4);
    let t = RealExpr::int(2).pow_ratio(1, 4);
    let big_term = (&r / (&r - &t)).powi(96);
    &m2 * (RealExpr::one() + &m2 * big_term)
}

pub fn fullfill_hypothesis_bound(bits: u64) -> Result<IntervalApprox> {
    Ok(eval_interval(&fullfill_hypothesis_expr(), bits)?)
}

/// Ball problems larger than this are not cross-checked.
const LAMBDA_CROSS_CHECK_LIMIT: u64 = 5000;

/// A split certificate with the arithmetic behind it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaReport {
    pub certificate: EmbeddingCertificate,
    /// The two sufficiency inequalities as `(lhs, rhs)` with `lhs <= rhs`.
    pub checks: Vec<(BigInt, BigInt)>,
    /// Verdict of the packing reduction when the problem is small enough.
    pub cross_check: Option<bool>,
}

/// `E(1, p^2/q^2) -> E(up/(vq), vp/(uq))`.
pub fn build_lambdatrick(u: u64, v: u64, p: u64, q: u64) -> Result<LambdaReport> {
    if u == 0 || v == 0 || p == 0 || q == 0 {
        return Err(Error::InvalidInput("u, v, p, q must be positive".into()));
    }
    let (u, v, p, q) = (BigInt::from(u), BigInt::from(v), BigInt::from(p), BigInt::from(q));
    if u > v {
        return Err(hypothesis(format!("u <= v fails: {u} > {v}")));
    }
    if p < BigInt::from(3) * &q {
        return Err(hypothesis(format!("p >= 3q fails: {p} < {}", BigInt::from(3) * &q)));
    }
    if BigInt::from(2) * &v * &v > BigInt::from(3) * &u * &u {
        return Err(hypothesis(format!(
            "2v^2 <= 3u^2 fails: {} > {}",
            BigInt::from(2) * &v * &v,
            BigInt::from(3) * &u * &u
        )));
    }
    let vvpq = &v * &v * &p * &q;
    let checks = vec![
        (BigInt::from(3) * &u * &v * &q * &q, vvpq.clone()),
        (BigInt::from(3) * (&v * &v - &u * &u) * &p * &q, vvpq.clone()),
    ];
    if let Some((l, r)) = checks.iter().find(|(l, r)| l > r) {
        return Err(hypothesis(format!("sufficiency inequality fails: {l} > {r}")));
    }
    let rat = |a: &BigInt, b: &BigInt| RealExpr::rational(BigRational::new(a.clone(), b.clone()));
    let b = rat(&(&p * &p), &(&q * &q));
    let source = vec![RealExpr::one(), b.clone()];
    let target = vec![rat(&(&u * &p), &(&v * &q)), rat(&(&v * &p), &(&u * &q))];
    let certificate = single(source, StepRule::LambdaSplit { lambda: rat(&u, &v), b })?.retarget(target);
    let r = |x: BigInt| BigRational::from_integer(x);
    let problem =
        ellipsoid_to_ball_problem(&r(&u * &v * &q * &q), &r(&u * &v * &p * &p), &r(&u * &u * &p * &q), &r(vvpq))?;
    let cross_check = if problem.ball_count() <= BigInt::from(LAMBDA_CROSS_CHECK_LIMIT) {
        let verdict = feasible(&problem)?.is_feasible();
        if !verdict {
            return Err(Error::VerificationFailed(format!("packing reduction rejects {problem}")));
        }
        Some(verdict)
    } else {
        None
    };
    Ok(LambdaReport { certificate, checks, cross_check })
}

/// Largest `k` for which the toric subdivision is enumerated explicitly.
pub const EXPLICIT_TORIC_LIMIT: u64 = 64;

/// Evidence that `k` unit balls fill `E(1^{n-1}, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ToricEvidence {
    /// All `k` slices, checked one by one.
    Explicit(Subdivision),
    /// The slices depend affinely on their index, so the checks at the two
    /// ends and at two consecutive indices cover the whole family.
    Family { k: BigInt, n: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackCertificate {
    pub k: BigInt,
    pub n: usize,
    pub toric: ToricEvidence,
    /// `E(1^{n-1}, k) -> B(k^{1/n})`.
    pub embedding: EmbeddingCertificate,
}

/// `k` equal balls filling `B^{2n}(k^{1/n})`: `k` unit balls fill
/// `E(1^{n-1}, k)`, which embeds into the ball.
pub fn build_pack(k: &BigInt, n: usize, budget: &PrecisionBudget) -> Result<PackCertificate> {
    if !k.is_positive() || n < 2 {
        return Err(Error::InvalidInput("need k >= 1 and n >= 2".into()));
    }
    let kk = big(k);
    let threshold = stability_threshold(n, budget)?;
    if compare(&kk, &threshold, budget)? == Ordering::Less {
        return Err(hypothesis(format!("k = {k} is below the threshold for n = {n}")));
    }
    let toric = match k.to_u64().filter(|&v| v <= EXPLICIT_TORIC_LIMIT) {
        Some(small) => ToricEvidence::Explicit(subdivide(small as usize, n)?),
        None => ToricEvidence::Family { k: k.clone(), n },
    };
    let embedding = build_olga4(&kk, n, budget)?;
    Ok(PackCertificate { k: k.clone(), n, toric, embedding })
}

/// `hull{e_1, ..., e_{n-1}, (j-1) e_n, j e_n}`.
fn slice(j: &BigInt, n: usize) -> LatticePolytope {
    let mut vertices = Vec::with_capacity(n + 1);
    for i in 0..n - 1 {
        let mut v = vec![BigRational::zero(); n];
        v[i] = BigRational::one();
        vertices.push(v);
    }
    for h in [j - 1, j.clone()] {
        let mut v = vec![BigRational::zero(); n];
        v[n - 1] = BigRational::from_integer(h);
        vertices.push(v);
    }
    LatticePolytope::new(vertices)
}

/// Inside `hull{0, e_1, ..., e_{n-1}, k e_n}`.
fn in_moment(v: &[BigRational], k: &BigInt) -> bool {
    let n = v.len();
    let level: BigRational = v[..n - 1].iter().sum::<BigRational>() + &v[n - 1] / BigRational::from_integer(k.clone());
    v.iter().all(|x| !x.is_negative()) && level <= BigRational::one()
}

/// `x_n - t (1 - x_1 - ... - x_{n-1})`.
fn slab(v: &[BigRational], t: &BigInt) -> BigRational {
    let n = v.len();
    let rest = BigRational::one() - v[..n - 1].iter().sum::<BigRational>();
    &v[n - 1] - BigRational::from_integer(t.clone()) * rest
}

fn family_check(k: &BigInt, n: usize) -> std::result::Result<(), String> {
    let shift: UnimodularAffineMap = theta(n);
    if shift.determinant() != BigInt::one() {
        return Err("shift map is not unimodular".into());
    }
    for j in [2, 3] {
        let (cur, prev) = (slice(&BigInt::from(j), n), slice(&BigInt::from(j - 1), n));
        if shift.apply_polytope(&cur).vertices != prev.vertices {
            return Err(format!("shift does not carry slice {j} to slice {}", j - 1));
        }
    }
    let first = slice(&BigInt::one(), n);
    if UnimodularAffineMap::to_standard(&first, &BigRational::one()).is_none() {
        return Err("the first slice is not a standard unit simplex".into());
    }
    for j in [BigInt::one(), k.clone()] {
        let s = slice(&j, n);
        if !s.vertices.iter().all(|v| in_moment(v, k)) {
            return Err(format!("slice {j} leaves the moment polytope"));
        }
        if !s.vertices.iter().all(|v| !slab(v, &(&j - 1)).is_negative() && !slab(v, &j).is_positive()) {
            return Err(format!("slice {j} leaves its slab"));
        }
    }
    let fact: BigInt = (1..=n as u64).map(BigInt::from).product();
    let whole = BigRational::new(k.clone(), fact.clone());
    if first.volume() * BigRational::from_integer(k.clone()) != whole {
        return Err("slice volumes do not add up to the moment polytope".into());
    }
    Ok(())
}

/// Re-checks both halves of a packing certificate.
pub fn verify_pack(c: &PackCertificate, budget: &PrecisionBudget) -> Result<Verdict> {
    let toric = match &c.toric {
        ToricEvidence::Explicit(sub) => {
            if BigInt::from(sub.parts.len()) != c.k || sub.theta.translation.len() != c.n {
                Err("subdivision has the wrong size".to_string())
            } else {
                let report = verify_tiling(&sub.decomposition());
                let chain_ok = sub
                    .parts
                    .iter()
                    .enumerate()
                    .all(|(j, part)| sub.theta.power(j).apply_polytope(part).vertices == sub.parts[0].vertices);
                match (report.valid, chain_ok) {
                    (true, true) => Ok(()),
                    (false, _) => Err(report.reason.unwrap_or_default()),
                    (true, false) => Err("shift powers do not return every slice to the first".into()),
                }
            }
        }
        ToricEvidence::Family { k, n } => {
            if k != &c.k || *n != c.n {
                Err("family parameters differ from the certificate".into())
            } else {
                family_check(k, *n)
            }
        }
    };
    if let Err(reason) = toric {
        return Ok(Verdict::Invalid { step: "toric".into(), reason });
    }
    let kk = big(&c.k);
    let source = thin(c.n, kk.clone());
    let target = vec![kk.pow(BigRational::new(BigInt::one(), BigInt::from(c.n))); c.n];
    let same = |x: &[RealExpr], y: &[RealExpr]| -> Result<bool> {
        if x.len() != y.len() {
            return Ok(false);
        }
        for (a, b) in x.iter().zip(y) {
            if compare(a, b, budget)? != Ordering::Equal {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if !same(&c.embedding.source, &source)? || !same(&c.embedding.target, &target)? {
        return Ok(Verdict::Invalid {
            step: "0".into(),
            reason: "embedding is not E(1, ..., 1, k) -> B(k^{1/n})".into(),
        });
    }
    verify_chain(&c.embedding, budget)
}
