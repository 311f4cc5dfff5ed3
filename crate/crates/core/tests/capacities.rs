mod common;

use common::{brute_capacities, ceil_div, int, rat};
use num_rational::BigRational;
use proptest::prelude::*;
use symcap::capacities::*;
use symcap::exact::{compare, PrecisionBudget, RealExpr};

fn budget() -> PrecisionBudget {
    PrecisionBudget::default()
}

fn axes(max_len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((1i64..60, 1i64..12).prop_map(|(p, q)| rat(p, q)), 1..=max_len)
}

fn caps(axes: &[BigRational], count: usize) -> Vec<BigRational> {
    let e = Ellipsoid::from_rationals(axes).unwrap();
    ek_capacities(&e, count, &budget()).unwrap().values.iter().map(|v| v.fold_rational().unwrap()).collect()
}

proptest! {
    #[test]
    fn merge_matches_sorted_multiples(a in axes(5), count in 1usize..80) {
        prop_assert_eq!(caps(&a, count), brute_capacities(&a, count));
    }

    #[test]
    fn ball_formula(p in 1i64..100, q in 1i64..20, n in 2usize..6) {
        let c = rat(p, q);
        let got = caps(&vec![c.clone(); n], 60);
        for (i, v) in got.iter().enumerate() {
            prop_assert_eq!(v, &(&c * int(ceil_div(i + 1, n) as i64)));
        }
    }

    #[test]
    fn scaling_scales_capacities(a in axes(4), p in 1i64..20, q in 1i64..20) {
        let t = rat(p, q);
        let scaled: Vec<BigRational> = a.iter().map(|x| x * &t).collect();
        let base = caps(&a, 40);
        prop_assert_eq!(caps(&scaled, 40), base.iter().map(|x| x * &t).collect::<Vec<_>>());
    }

    #[test]
    fn capacities_grow_with_axes(a in axes(4), bumps in prop::collection::vec(0i64..5, 4)) {
        let bigger: Vec<BigRational> = a.iter().zip(&bumps).map(|(x, b)| x + int(*b)).collect();
        let (small, large) = (caps(&a, 40), caps(&bigger, 40));
        prop_assert!(small.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(small.iter().zip(&large).all(|(x, y)| x <= y));
        let (s, t) = (Ellipsoid::from_rationals(&a).unwrap(), Ellipsoid::from_rationals(&bigger).unwrap());
        prop_assert_eq!(ek_obstruction(&s, &t, 40, &budget()).unwrap(), None);
        prop_assert_eq!(volume_obstruction(&s, &t, &budget()).unwrap(), VolumeCheck::Pass);
    }

    #[test]
    fn lower_bound_dominates_volume_and_capacities(a in axes(4)) {
        let e = Ellipsoid::from_rationals(&a).unwrap();
        let n = a.len();
        let lb = ball_lower_bound(&e, 30, &budget()).unwrap();
        let vol = e.axis_product().root(n as u32);
        prop_assert!(compare(&lb, &vol, &budget()).unwrap().is_ge());
        for (i, c) in caps(&a, 30).iter().enumerate() {
            let layer = RealExpr::from(c / int(ceil_div(i + 1, n) as i64));
            prop_assert!(compare(&lb, &layer, &budget()).unwrap().is_ge());
        }
    }
}

#[test]
fn irrational_axes_merge_in_order() {
    let e = Ellipsoid::new(vec!["sqrt(2)".parse().unwrap(), "3/2".parse().unwrap()], &budget()).unwrap();
    let got: Vec<String> = ek_capacities(&e, 5, &budget()).unwrap().values.iter().map(|v| v.to_string()).collect();
    assert_eq!(got[0], "pow(2, 1/2)");
    assert_eq!(got[1], "3/2");
    assert_eq!(got[2], "(2 * pow(2, 1/2))");
    assert_eq!(got[3], "3");
}

#[test]
fn examples_from_small_ellipsoids() {
    let e = Ellipsoid::from_rationals(&[int(1), rat(3, 2), int(2)]).unwrap();
    let v = ek_capacities(&e, 3, &budget()).unwrap();
    assert_eq!(v.values, vec![RealExpr::int(1), RealExpr::ratio(3, 2), RealExpr::int(2)]);
    let src = Ellipsoid::from_ints(&[1, 1, 8]).unwrap();
    let ball = Ellipsoid::from_ints(&[2, 2, 2]).unwrap();
    assert_eq!(ek_obstruction(&src, &ball, 50, &budget()).unwrap(), None);
    let tight = Ellipsoid::from_ints(&[1, 3, 3]).unwrap();
    let small = Ellipsoid::from_ints(&[2, 2, 2]).unwrap();
    assert_eq!(ek_obstruction(&tight, &small, 50, &budget()).unwrap(), Some(3));
    assert!(Ellipsoid::from_ints(&[1, 0]).is_err());
    assert!(ek_capacities(&tight, 0, &budget()).is_err());
}
