use num_bigint::BigInt;
use num_complex::Complex64;
use partial_theta::numeric::{find_zero, theta_eval, Precision, ZeroFindParams};
use partial_theta::series::{euler_product, IntSeries};
use proptest::prelude::*;

fn series(max_order: usize) -> impl Strategy<Value = IntSeries> {
    prop::collection::vec(-1000i64..1000, 1..=max_order + 1)
        .prop_map(|v| IntSeries::from_i64s(&v).unwrap())
}

fn unit_series(max_order: usize) -> impl Strategy<Value = IntSeries> {
    (
        prop::bool::ANY,
        prop::collection::vec(-50i64..50, 0..=max_order),
    )
        .prop_map(|(neg, rest)| {
            let mut v = vec![if neg { -1 } else { 1 }];
            v.extend(rest);
            IntSeries::from_i64s(&v).unwrap()
        })
}

proptest! {
    #[test]
    fn ring_axioms(a in series(20), b in series(20), c in series(20)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        let n = a.order().min(b.order()).min(c.order());
        let lhs = (&a * &(&b + &c)).truncate(n).unwrap();
        let rhs = (&(&a * &b) + &(&a * &c)).truncate(n).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!((&a - &a).is_zero());
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn multiplication_truncates_to_shorter_order(a in series(30), b in series(10)) {
        prop_assert_eq!((&a * &b).order(), a.order().min(b.order()));
    }

    #[test]
    fn unit_inverse(a in unit_series(64)) {
        let inv = a.inverse().unwrap();
        prop_assert_eq!(&a * &inv, IntSeries::one(a.order()));
    }

    #[test]
    fn non_unit_has_no_inverse(c in 2i64..100, rest in prop::collection::vec(-5i64..5, 0..8)) {
        let mut v = vec![c];
        v.extend(rest);
        prop_assert!(IntSeries::from_i64s(&v).unwrap().inverse().is_err());
    }

    #[test]
    fn euler_product_matches_brute_force(n in 0usize..=30) {
        let mut p = IntSeries::one(n);
        for k in 1..=n {
            let mut factor = vec![BigInt::from(0); n + 1];
            factor[0] = BigInt::from(1);
            factor[k] = BigInt::from(-1);
            p = &p * &IntSeries::new(factor).unwrap();
        }
        prop_assert_eq!(euler_product(n), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tail_bound_is_sound(
        qr in 0.05f64..0.95, qa in 0.0f64..std::f64::consts::TAU,
        xr in 0.0f64..200.0, xa in 0.0f64..std::f64::consts::TAU,
    ) {
        let q = Complex64::from_polar(qr, qa);
        let x = Complex64::from_polar(xr, xa);
        let coarse = theta_eval(q, x, 1e-8, Precision::Auto).unwrap();
        let fine = theta_eval(q, x, 1e-14, Precision::Auto).unwrap();
        prop_assert!(coarse.tail_bound <= 1e-8);
        let gap = (coarse.value - fine.value).norm();
        let allowed = coarse.tail_bound + fine.tail_bound + coarse.rounding_bound + fine.rounding_bound;
        prop_assert!(gap <= allowed * (1.0 + 1e-6) + 1e-300, "gap {gap:e} > {allowed:e}");
    }
}

#[test]
fn zeros_are_ordered_by_modulus() {
    let q = Complex64::new(0.05, 0.0);
    let moduli: Vec<f64> = (1..=6)
        .map(|j| {
            find_zero(&ZeroFindParams::new(q, j, 10, 1e-10))
                .unwrap()
                .found
                .norm()
        })
        .collect();
    assert!(moduli.windows(2).all(|w| w[0] < w[1]), "{moduli:?}");
    // consecutive zeros separate by roughly a factor 1/q
    for w in moduli.windows(2) {
        let ratio = w[1] / w[0];
        assert!(ratio > 10.0 && ratio < 30.0, "{ratio}");
    }
}
