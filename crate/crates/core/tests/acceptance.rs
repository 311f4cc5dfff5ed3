//! Runs every acceptance criterion, printing one line each, and exits
//! nonzero if any fails or overruns its time limit.

mod common;
mod gen;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::{ceil_div, diophantine_classes, gcd, int, oracle_feasible, rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use symcap::capacities::*;
use symcap::certify::*;
use symcap::exact::{compare, PrecisionBudget, RealExpr};
use symcap::packing::{feasible, packing_number};
use symcap::toric::*;
use symcap::weights::*;

type Outcome = Result<(), String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn budget() -> PrecisionBudget {
    PrecisionBudget::default()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn equal(a: &RealExpr, b: &RealExpr) -> Result<bool, String> {
    compare(a, b, &budget()).map(|o| o == Ordering::Equal).map_err(|e| e.to_string())
}

fn ball_formula() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..20 {
        let c = rat(rng.gen_range(1..1000), rng.gen_range(1..100));
        for n in 2..=5 {
            let ball = Ellipsoid::from_rationals(&vec![c.clone(); n]).map_err(|e| e.to_string())?;
            let caps = ek_capacities(&ball, 100, &budget()).map_err(|e| e.to_string())?;
            for k in 1..=100 {
                let want = RealExpr::from(&c * int(ceil_div(k, n) as i64));
                ensure(caps.get(k) == Some(&want), || format!("c_{k}(B^{}({c})) = {:?}", 2 * n, caps.get(k)))?;
            }
        }
    }
    Ok(())
}

fn weight_identities() -> Outcome {
    for e in 1..=200i64 {
        for f in e..=200 {
            let w = weight_expansion_int(e, f).map_err(|x| x.to_string())?;
            ensure(w.square_sum() == int(e * f), || format!("square sum of W({e}, {f})"))?;
            ensure(w.linear_sum() == int(e + f - gcd(e, f)), || format!("linear sum of W({e}, {f})"))?;
        }
    }
    Ok(())
}

fn packing_numbers() -> Outcome {
    let expected =
        [rat(1, 1), rat(1, 2), rat(3, 4), rat(1, 1), rat(4, 5), rat(24, 25), rat(63, 64), rat(288, 289), rat(1, 1)];
    for (i, want) in expected.iter().enumerate() {
        let got = packing_number(i + 1).map_err(|e| e.to_string())?;
        ensure(&got == want, || format!("p_{} = {got}, expected {want}", i + 1))?;
    }
    Ok(())
}

fn nonincreasing(len: usize, max: i64) -> Vec<Vec<i64>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=max {
        for mut rest in nonincreasing(len - 1, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn oracle_agreement() -> Outcome {
    let mut checked = 0;
    for m in 1..=6 {
        let classes = diophantine_classes(m, 6);
        for balls in nonincreasing(m, 8) {
            let balls: Vec<BigRational> = balls.into_iter().map(int).collect();
            for target in 1..=8 {
                let target = int(target);
                let p = BallPackingProblem::from_list(target.clone(), &balls).map_err(|e| e.to_string())?;
                let got = feasible(&p).map_err(|e| e.to_string())?.is_feasible();
                let want = oracle_feasible(&target, &balls, &classes);
                ensure(got == want, || format!("({target}; {balls:?}): reduction {got}, oracle {want}"))?;
                checked += 1;
            }
        }
    }
    ensure(checked == 8 * (1..=6).map(|m| nonincreasing(m, 8).len()).sum::<usize>(), || "incomplete sweep".into())
}

fn strip_instances() -> Outcome {
    for k in 1..=4i64 {
        for x in 1..=2u32 {
            let p = ellipsoid_to_ball_problem_int(1, k.pow(2 * x + 1), k.pow(x), k.pow(x + 1))
                .map_err(|e| e.to_string())?;
            let r = feasible(&p).map_err(|e| e.to_string())?;
            ensure(r.is_feasible(), || format!("k = {k}, x = {x} infeasible: {:?}", r.witness))?;
        }
    }
    Ok(())
}

fn thin_into_ball() -> Outcome {
    let b = budget();
    let c = build_olga3(&BigInt::from(2), 3).map_err(|e| e.to_string())?;
    let verdict = verify_certificate(&c, &b).map_err(|e| e.to_string())?;
    ensure(verdict.is_valid(), || verdict.to_string())?;
    let s = Ellipsoid::from_ints(&[1, 1, 8]).unwrap();
    let t = Ellipsoid::from_ints(&[2, 2, 2]).unwrap();
    ensure(c.source_ellipsoid(&b).unwrap() == s && c.target_ellipsoid(&b).unwrap() == t, || "wrong endpoints".into())?;
    ensure(ek_obstruction(&s, &t, 50, &b).unwrap().is_none(), || "capacity obstruction".into())?;
    ensure(equal(&s.axis_product(), &t.axis_product())?, || "volumes differ".into())
}

fn region_grid() -> Outcome {
    let b = budget();
    let mut points: Vec<(RealExpr, RealExpr, RealExpr)> = Vec::new();
    for i in 0..50i64 {
        // 1 <= a <= b <= 2: value b.
        let (x, y) = (RealExpr::ratio(50 + i, 50), RealExpr::ratio(150 + i, 100));
        points.push((x, y.clone(), y));
        // 2 <= a <= 3 with g(b) <= a: value a.
        let a = RealExpr::ratio(100 + i, 50);
        let bb = if i % 2 == 0 {
            RealExpr::ratio(150 + i, 50).max_of(a.clone())
        } else {
            RealExpr::ratio(289 * 49 + 35 * i, 36 * 49)
        };
        let a = if i % 2 == 0 { a } else { RealExpr::int(3) };
        points.push((a.clone(), bb, a));
        // a <= 2 <= b <= 4: value 2.
        points.push((RealExpr::ratio(50 + i, 50), RealExpr::ratio(101 + i, 50), RealExpr::int(2)));
        // a = 1 <= 4 <= b <= 8: value 2.
        points.push((RealExpr::one(), RealExpr::ratio(200 + 4 * i, 50), RealExpr::int(2)));
    }
    for (a, bb, value) in &points {
        let f = f_bounds(a, bb, 50, &b).map_err(|e| format!("f({a}, {bb}): {e}"))?;
        ensure(equal(&f.lower, &f.upper)? && equal(&f.upper, value)?, || {
            format!("f({a}, {bb}) bounds [{}, {}], expected {value}", f.lower, f.upper)
        })?;
        let verdict = verify_certificate(&f.certificate, &b).map_err(|e| e.to_string())?;
        ensure(verdict.is_valid(), || format!("f({a}, {bb}): {verdict}"))?;
    }
    ensure(points.len() == 200, || "grid size".into())
}

trait MaxOf {
    fn max_of(self, other: RealExpr) -> RealExpr;
}

impl MaxOf for RealExpr {
    fn max_of(self, other: RealExpr) -> RealExpr {
        if compare(&self, &other, &budget()).unwrap() == Ordering::Less {
            other
        } else {
            self
        }
    }
}

fn stability_constants() -> Outcome {
    let m2 = stability_threshold(2, &budget()).map_err(|e| e.to_string())?;
    ensure(m2.fold_rational() == Some(rat(289, 36)), || format!("M_2 = {m2}"))?;
    let s3 = stability_bounds(3, 64).map_err(|e| e.to_string())?;
    let beta = s3.beta.ok_or("missing beta_3")?;
    let (lo, hi) = (int(15) * int(10).pow(11), int(16) * int(10).pow(11));
    ensure(beta.lo > lo && beta.hi < hi, || format!("beta_3 in [{}, {}]", beta.lo, beta.hi))?;
    let bound = fullfill_hypothesis_bound(256).map_err(|e| e.to_string())?;
    let (lo, hi) = (int(140) * int(10).pow(99), int(142) * int(10).pow(99));
    ensure(bound.lo > lo && bound.hi < hi, || "fullfill bound outside (1.40e101, 1.42e101)".into())
}

fn volume_filling() -> Outcome {
    let b = budget();
    let ten = RealExpr::int(10);
    for (a, bb) in
        [(RealExpr::one(), ten.powi(52)), (RealExpr::int(9), ten.powi(30)), (RealExpr::ratio(289, 36), ten.powi(30))]
    {
        let c = build_fullfill2(&a, &bb, &b).map_err(|e| format!("({a}, {bb}): {e}"))?;
        let verdict = verify_certificate(&c, &b).map_err(|e| e.to_string())?;
        ensure(verdict.is_valid(), || format!("({a}, {bb}): {verdict}"))?;
        let radius = (&a * &bb).pow_ratio(1, 3);
        for axis in &c.target {
            ensure(equal(axis, &radius)?, || format!("({a}, {bb}) ends at {axis}"))?;
        }
        ensure(c.target.len() == 3, || "target is not a 6-ball".into())?;
    }
    ensure(build_fullfill2(&RealExpr::one(), &RealExpr::int(100), &b).is_err(), || "(1, 100) accepted".into())
}

fn toric_tilings() -> Outcome {
    for n in 2..=4 {
        for k in 1..=10 {
            let s = subdivide(k, n).map_err(|e| e.to_string())?;
            let report = verify_tiling(&s.decomposition());
            ensure(report.valid, || format!("subdivide({k}, {n}): {:?}", report.reason))?;
            for (j, part) in s.parts.iter().enumerate() {
                ensure(s.theta.power(j).apply_polytope(part).same_vertices(&s.parts[0]), || {
                    format!("shift^{j} misses slice 1 for k = {k}, n = {n}")
                })?;
            }
        }
    }
    for k in 2..=5u64 {
        for x in 1..=2u32 {
            let d = fig2_decomposition(k, x).map_err(|e| e.to_string())?;
            let report = verify_tiling(&d);
            ensure(report.valid, || format!("strip({k}, {x}): {:?}", report.reason))?;
            let s = (k as i64).pow(x);
            let mut want: BTreeMap<BigRational, BigInt> = BTreeMap::new();
            *want.entry(int(s * k as i64 - s)).or_default() += 1;
            *want.entry(int(s)).or_default() += BigInt::from(k - 1);
            *want.entry(int(1)).or_default() += BigInt::from((k as i64).pow(2 * x + 1));
            let want: Vec<_> = want.into_iter().rev().collect();
            let got = fig2_inventory(k, x).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("inventory({k}, {x}) = {got:?}"))?;
        }
    }
    Ok(())
}

fn certificate_soundness() -> Outcome {
    let g = gen::Generator::new();
    let mut rng = StdRng::seed_from_u64(99);
    for i in 0..500 {
        let c = g.certificate(&mut rng);
        let verdict = verify_certificate(&c, &g.budget).map_err(|e| e.to_string())?;
        ensure(verdict.is_valid(), || format!("sample {i}: {verdict}"))?;
        let (s, t) = (c.source_ellipsoid(&g.budget).unwrap(), c.target_ellipsoid(&g.budget).unwrap());
        ensure(volume_obstruction(&s, &t, &g.budget).unwrap() == VolumeCheck::Pass, || format!("sample {i}: volume"))?;
        ensure(ek_obstruction(&s, &t, 50, &g.budget).unwrap().is_none(), || format!("sample {i}: capacities"))?;
    }
    Ok(())
}

fn ball_packings() -> Outcome {
    let b = budget();
    let m3 = stability_threshold(3, &b).map_err(|e| e.to_string())?;
    let k3 = symcap::exact::floor_expr(&m3, &b).map_err(|e| e.to_string())? + 1;
    for (k, n) in [(BigInt::from(9), 2), (k3, 3)] {
        let c = build_pack(&k, n, &b).map_err(|e| format!("pack({k}, {n}): {e}"))?;
        let verdict = verify_pack(&c, &b).map_err(|e| e.to_string())?;
        ensure(verdict.is_valid(), || format!("pack({k}, {n}): {verdict}"))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("ball capacities follow the ceiling formula", 1, ball_formula),
        ("weight expansion identities up to 200", 5, weight_identities),
        ("packing numbers for 1 to 9 balls", 10, packing_numbers),
        ("reduction agrees with the class oracle", 60, oracle_agreement),
        ("strip packing instances are feasible", 60, strip_instances),
        ("E(1,1,8) embeds in B(2) with no obstruction", 1, thin_into_ball),
        ("known regions give matching bounds on 200 points", 30, region_grid),
        ("stability constants", 1, stability_constants),
        ("volume filling certificates", 5, volume_filling),
        ("toric tilings and strip inventory", 10, toric_tilings),
        ("500 random certificates respect obstructions", 60, certificate_soundness),
        ("full ball packings in dimensions 4 and 6", 5, ball_packings),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let late = took > Duration::from_secs(*limit);
        let status = if outcome.is_ok() && !late { "PASS" } else { "FAIL" };
        let mut line = format!("{status} [{:>2}] {name} ({:.2}s, limit {limit}s)", i + 1, took.as_secs_f64());
        if let Err(e) = &outcome {
            line.push_str(&format!(": {e}"));
        } else if late {
            line.push_str(": over time limit");
        }
        println!("{line}");
        if status == "FAIL" {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
