use northcott::heights::{mahler_measure, weil_height, AlgebraicNumber, Interval, Q};
use northcott::polycore::is_irreducible;
use northcott::IntPoly;
use num_bigint::BigInt;
use proptest::prelude::*;

fn tol() -> Q {
    Q::new(BigInt::from(1), BigInt::from(1_000_000_000i64))
}

fn close(a: &Interval, b: &Interval, slack: &Q) -> bool {
    a.lo <= &b.hi + slack && b.lo <= &a.hi + slack
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = IntPoly> {
    (1..=max_deg)
        .prop_flat_map(|d| proptest::collection::vec(-4i64..=4, d + 1))
        .prop_map(|c| IntPoly::from_i64s(&c))
        .prop_filter("nonconstant", |f| !f.is_constant())
}

fn irreducible(max_deg: usize) -> impl Strategy<Value = IntPoly> {
    small_poly(max_deg).prop_filter("irreducible", is_irreducible)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn height_of_power_scales(f in irreducible(3), n in 1u32..=5, pick in 0usize..3) {
        let a = AlgebraicNumber::new(&f, pick % f.deg()).unwrap();
        let h = weil_height(&a, &tol()).unwrap();
        let hn = weil_height(&a.pow(n).unwrap(), &tol()).unwrap();
        let scaled = h.scale(&Q::from_integer(n.into()));
        prop_assert!(close(&hn, &scaled, &(tol() * Q::from_integer(10.into()))), "{} vs {}", hn, scaled);
    }

    #[test]
    fn height_of_inverse(f in irreducible(3), pick in 0usize..3) {
        let a = AlgebraicNumber::new(&f, pick % f.deg()).unwrap();
        prop_assume!(!a.is_zero());
        let inv = a.inverse().unwrap();
        prop_assert_eq!(inv.minpoly(), &f.reverse().canonical());
        let h = weil_height(&a, &tol()).unwrap();
        let hi = weil_height(&inv, &tol()).unwrap();
        prop_assert!(close(&h, &hi, &tol()));
    }

    #[test]
    fn conjugates_share_height(f in irreducible(4)) {
        let all = AlgebraicNumber::conjugates(&f).unwrap();
        prop_assert_eq!(all.len(), f.deg());
        let h0 = all[0].height(&tol()).unwrap();
        for a in &all[1..] {
            prop_assert_eq!(&a.height(&tol()).unwrap(), &h0);
        }
    }

    #[test]
    fn mahler_is_multiplicative(f in small_poly(3), g in small_poly(3)) {
        let t = tol();
        let mf = mahler_measure(&f, &t).unwrap();
        let mg = mahler_measure(&g, &t).unwrap();
        let mfg = mahler_measure(&(&f * &g), &t).unwrap();
        let prod = &mf * &mg;
        prop_assert!(close(&mfg, &prod, &t), "{} vs {}", mfg, prod);
    }

    #[test]
    fn heights_are_nonnegative_and_zero_only_for_torsion(f in irreducible(4)) {
        let a = AlgebraicNumber::new(&f, 0).unwrap();
        let h = weil_height(&a, &tol()).unwrap();
        prop_assert!(h.lo >= Q::from_integer(0.into()));
        prop_assert_eq!(h.hi == Q::from_integer(0.into()), a.is_torsion_or_zero());
    }
}
