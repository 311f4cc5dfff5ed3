mod common;

use std::collections::BTreeSet;

use common::{diophantine_classes, int, oracle_feasible, rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use symcap::packing::*;
use symcap::weights::{ellipsoid_to_ball_problem_int, BallPackingProblem};

fn verdict(target: &BigRational, balls: &[BigRational]) -> FeasibilityResult {
    feasible(&BallPackingProblem::from_list(target.clone(), balls).unwrap()).unwrap()
}

/// Nonincreasing sequences of length `len` with entries in `1..=max`.
fn multisets(len: usize, max: i64) -> Vec<Vec<i64>> {
    fn go(len: usize, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for x in (1..=cap).rev() {
            cur.push(x);
            go(len, x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, max, &mut Vec::new(), &mut out);
    out
}

#[test]
fn enumeration_matches_diophantine_search() {
    for m in 1..=8 {
        let from_orbits: BTreeSet<(i64, Vec<i64>)> = enumerate_exceptional(m, 6)
            .unwrap()
            .into_iter()
            .filter(|c| c.degree >= 1)
            .map(|c| (c.degree, c.mults))
            .collect();
        let brute: BTreeSet<(i64, Vec<i64>)> = diophantine_classes(m, 6).into_iter().collect();
        assert_eq!(from_orbits, brute, "M = {m}");
    }
}

#[test]
fn reduction_agrees_with_class_criterion() {
    let mut checked = 0;
    for m in 1..=6usize {
        let classes = diophantine_classes(m, 6);
        for balls in multisets(m, 8) {
            let balls: Vec<BigRational> = balls.into_iter().map(int).collect();
            for target in 1..=8 {
                let target = int(target);
                let expected = oracle_feasible(&target, &balls, &classes);
                assert_eq!(verdict(&target, &balls).is_feasible(), expected, "({target}; {balls:?})");
                checked += 1;
            }
        }
    }
    assert!(checked > 20_000);
}

#[test]
fn packing_numbers_up_to_nine() {
    let expected =
        [rat(1, 1), rat(1, 2), rat(3, 4), rat(1, 1), rat(4, 5), rat(24, 25), rat(63, 64), rat(288, 289), rat(1, 1)];
    for (k, want) in expected.iter().enumerate() {
        assert_eq!(&packing_number(k + 1).unwrap(), want, "p_{}", k + 1);
    }
}

#[test]
fn strip_instances_are_feasible() {
    for k in 1..=4i64 {
        for x in 1..=2u32 {
            let p = ellipsoid_to_ball_problem_int(1, k.pow(2 * x + 1), k.pow(x), k.pow(x + 1)).unwrap();
            assert!(feasible(&p).unwrap().is_feasible(), "k = {k}, x = {x}");
        }
    }
}

#[test]
fn infeasible_problems_carry_checkable_witnesses() {
    let r = verdict(&rat(3, 2), &[int(1), int(1)]);
    match r.witness {
        Some(Witness::Class { class, pairing }) => {
            assert_eq!(class.to_string(), "(1;1,1)");
            assert_eq!(pairing, rat(-1, 2));
        }
        other => panic!("unexpected witness {other:?}"),
    }
    let r = verdict(&int(1), &[int(2)]);
    assert!(matches!(r.witness, Some(Witness::Volume { .. })));
}

fn ball_list() -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((1i64..30, 1i64..6).prop_map(|(p, q)| rat(p, q)), 1..9)
}

proptest! {
    #[test]
    fn cremona_moves_preserve_invariants(d in 0i64..20, mults in prop::collection::vec(-3i64..10, 3..8), seed in 0usize..1000) {
        let v = ClassVector::new(d, mults);
        let n = v.mults.len();
        let i = seed % n;
        let j = (i + 1 + seed / n % (n - 1)) % n;
        let k = (0..n).find(|&x| x != i && x != j).unwrap();
        let w = v.cremona(i, j, k);
        prop_assert_eq!(w.self_intersection(), v.self_intersection());
        prop_assert_eq!(w.anticanonical(), v.anticanonical());
        prop_assert_eq!(w.cremona(i, j, k), v);
    }

    #[test]
    fn feasibility_ignores_order_and_scale(balls in ball_list(), target in (1i64..40, 1i64..6), t in (1i64..20, 1i64..20), rot in 0usize..8) {
        let target = rat(target.0, target.1);
        let base = verdict(&target, &balls).is_feasible();
        let mut rotated = balls.clone();
        let len = rotated.len();
        rotated.rotate_left(rot % len);
        prop_assert_eq!(verdict(&target, &rotated).is_feasible(), base);
        let t = rat(t.0, t.1);
        let scaled: Vec<BigRational> = balls.iter().map(|b| b * &t).collect();
        prop_assert_eq!(verdict(&(&target * &t), &scaled).is_feasible(), base);
    }

    #[test]
    fn shrinking_keeps_feasibility(balls in ball_list(), target in 1i64..40, drop in 0usize..8) {
        let target = int(target);
        if verdict(&target, &balls).is_feasible() {
            let mut fewer = balls.clone();
            if fewer.len() > 1 {
                fewer.remove(drop % fewer.len());
            }
            let halves: Vec<BigRational> = fewer.iter().map(|b| b / int(2)).collect();
            prop_assert!(verdict(&target, &fewer).is_feasible());
            prop_assert!(verdict(&target, &halves).is_feasible());
        }
    }

    #[test]
    fn class_witnesses_are_exceptional_and_negative(balls in ball_list(), target in 1i64..40) {
        let target = int(target);
        let r = verdict(&target, &balls);
        if let Some(Witness::Class { class, pairing }) = r.witness {
            prop_assert!(is_exceptional(&class), "{}", class);
            let mut sorted = balls.clone();
            sorted.sort_by(|a, b| b.cmp(a));
            prop_assert_eq!(class.pairing(&target, &sorted), pairing.clone());
            prop_assert!(pairing < int(0));
        }
    }

    #[test]
    fn grouped_and_listed_problems_agree(w in 1i64..6, count in 1i64..40, target in 1i64..30) {
        let grouped = BallPackingProblem::new(int(target), vec![(int(w), BigInt::from(count))]).unwrap();
        let listed = vec![int(w); count as usize];
        prop_assert_eq!(feasible(&grouped).unwrap().is_feasible(), verdict(&int(target), &listed).is_feasible());
    }
}
