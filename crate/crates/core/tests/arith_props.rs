use lagrange_gap::arith::convergents;
use lagrange_gap::oracle::pell_convergents;
use lagrange_gap::{Quad, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-60i64..=60, 1i64..=12).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn surd() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 3, 5, 6, 7])
}

fn quad_in(d: u32) -> impl Strategy<Value = Quad> {
    (rational(), rational()).prop_map(move |(a, b)| Quad::new(a, b, d))
}

fn triple() -> impl Strategy<Value = (Quad, Quad, Quad)> {
    surd().prop_flat_map(|d| (quad_in(d), quad_in(d), quad_in(d)))
}

proptest! {
    #[test]
    fn field_axioms((x, y, z) in triple()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &Quad::zero(), x.clone());
        prop_assert_eq!(&x * &Quad::one(), x.clone());
        prop_assert_eq!(&x + &(-&x), Quad::zero());
        prop_assert_eq!(&(&x - &y) + &y, x.clone());
        if !x.is_zero() {
            prop_assert_eq!(&x * &x.recip().unwrap(), Quad::one());
            prop_assert_eq!(&(&y / &x) * &x, y.clone());
        } else {
            prop_assert!(x.recip().is_err());
        }
    }

    #[test]
    fn signs_and_order((x, y, _z) in triple()) {
        let f = x.to_f64();
        if f.abs() > 1e-9 {
            prop_assert_eq!(x.signum() as f64, f.signum());
        }
        prop_assert_eq!((&x * &y).signum(), x.signum() * y.signum());
        prop_assert_eq!(x < y, (&y - &x).is_positive());
        prop_assert_eq!(x.abs().signum() >= 0, true);
        prop_assert_eq!((-&x).signum(), -x.signum());
        prop_assert_eq!(x.norm(), (&x * &x.conjugate()).rational_part().clone());
    }

    #[test]
    fn floor_and_frac((x, _y, _z) in triple()) {
        let fl = Quad::from_bigint(x.floor());
        prop_assert!(fl <= x);
        prop_assert!(x < &fl + &Quad::one());
        let fr = x.frac();
        prop_assert_eq!(&fl + &fr, x.clone());
        prop_assert!(!fr.is_negative() && fr < Quad::one());
        prop_assert_eq!(Quad::from_bigint(x.ceil()), -Quad::from_bigint((-&x).floor()));
    }

    #[test]
    fn literal_round_trip((x, _y, _z) in triple()) {
        let s = format!("{x:#}");
        prop_assert_eq!(Quad::parse_with_surd(&s, x.surd()).unwrap(), x.clone());
    }
}

#[test]
fn pell_convergents_to_forty() {
    let pell = pell_convergents(40);
    let cf: Vec<(BigInt, BigInt)> = convergents(&Quad::sqrt_of(2)).take(40).collect();
    assert_eq!(pell, cf);
    for (k, (p, q)) in pell.iter().enumerate() {
        let n = p * p - BigInt::from(2) * q * q;
        let expected = if k % 2 == 0 { -BigInt::one() } else { BigInt::one() };
        assert_eq!(n, expected, "k = {k}");
        assert!(n.abs().is_one());
    }
    assert!((&pell[39].0 * &pell[39].0).bits() > 64);
}

#[test]
fn mixed_surds_are_rejected() {
    assert!(Quad::sqrt_of(2).try_add(&Quad::sqrt_of(3)).is_err());
    assert!(Quad::sqrt_of(2).try_mul(&Quad::from_int(5)).is_ok());
}
