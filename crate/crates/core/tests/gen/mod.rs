//! Random valid certificates drawn from every builder family.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::Rng;
use symcap::certify::*;
use symcap::exact::{floor_expr, PrecisionBudget, RealExpr};

pub struct Generator {
    pub budget: PrecisionBudget,
    floor_m3: BigInt,
}

fn ratio(p: i64, q: i64) -> RealExpr {
    RealExpr::rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
}

impl Generator {
    pub fn new() -> Self {
        let budget = PrecisionBudget::default();
        let m3 = stability_threshold(3, &budget).unwrap();
        let floor_m3 = floor_expr(&m3, &budget).unwrap();
        Generator { budget, floor_m3 }
    }

    /// One of the builder families, picked by `family % 7`; `None` when the
    /// sampled parameters miss the builder's hypothesis.
    pub fn family(&self, family: usize, rng: &mut StdRng) -> Option<EmbeddingCertificate> {
        let b = &self.budget;
        match family % 7 {
            0 => build_olga2(&BigInt::from(rng.gen_range(1..=6)), rng.gen_range(1..=2)).ok(),
            1 => build_olga3(&BigInt::from(rng.gen_range(1..=6)), rng.gen_range(2..=5)).ok(),
            2 => {
                if rng.gen_bool(0.5) {
                    let q = rng.gen_range(1..=20);
                    let p = rng.gen_range((289 * q + 35) / 36..=400 * q);
                    build_olga4(&ratio(p, q), 2, b).ok()
                } else {
                    let k = &self.floor_m3 + BigInt::from(rng.gen_range(1u64..1_000_000_000_000));
                    build_olga4(&RealExpr::big_int(k), 3, b).ok()
                }
            }
            3 => {
                let (a, exp) = if rng.gen_bool(0.5) {
                    let q = rng.gen_range(1..=6);
                    (ratio(rng.gen_range((289 * q + 35) / 36..=40 * q), q), rng.gen_range(25..=40))
                } else {
                    (ratio(rng.gen_range(6..=48), 6), rng.gen_range(51..=60))
                };
                let scale = RealExpr::int(rng.gen_range(1..=9));
                build_fullfill2(&a, &(scale * RealExpr::int(10).powi(exp)), b).ok()
            }
            4 => {
                let u = rng.gen_range(1..=12);
                let v = rng.gen_range(u..=2 * u);
                let q = rng.gen_range(1..=4);
                let p = rng.gen_range(3 * q..=12 * q);
                build_lambdatrick(u, v, p, q).ok().map(|r| r.certificate)
            }
            5 => {
                let q = rng.gen_range(1..=6);
                let (a, bb) = match rng.gen_range(0..5) {
                    0 => {
                        let a = rng.gen_range(q..=2 * q);
                        (ratio(a, q), ratio(rng.gen_range(a..=2 * q), q))
                    }
                    1 => (ratio(rng.gen_range(2 * q..=3 * q), q), ratio(rng.gen_range(3 * q..=4 * q), q)),
                    2 => (ratio(rng.gen_range(q..=2 * q), q), ratio(rng.gen_range(2 * q..=4 * q), q)),
                    3 => (RealExpr::one(), ratio(rng.gen_range(q..=8 * q), q)),
                    _ => {
                        let a = ratio(rng.gen_range((17 * q + 5) / 6..=30 * q), q);
                        (a.clone(), a.powi(2))
                    }
                };
                f_known(&a, &bb, b).ok().flatten().map(|kv| kv.certificate)
            }
            _ => {
                let pack = if rng.gen_bool(0.5) {
                    build_pack(&BigInt::from(rng.gen_range(9..=80)), 2, b)
                } else {
                    build_pack(&(&self.floor_m3 + BigInt::from(rng.gen_range(1..=1000))), 3, b)
                };
                pack.ok().map(|p| p.embedding)
            }
        }
    }

    /// A random certificate, rescaled by a random rational or square root
    /// half of the time.
    pub fn certificate(&self, rng: &mut StdRng) -> EmbeddingCertificate {
        loop {
            let family = rng.gen_range(0..7);
            if let Some(c) = self.family(family, rng) {
                return match rng.gen_range(0..4) {
                    0 => c.scaled(&ratio(rng.gen_range(1..=50), rng.gen_range(1..=50))),
                    1 => c.scaled(&RealExpr::int(rng.gen_range(2..=30)).sqrt()),
                    _ => c,
                };
            }
        }
    }
}
