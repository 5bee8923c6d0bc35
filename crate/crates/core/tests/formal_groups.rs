use num_rational::BigRational;
use num_traits::Zero;
use padic_hodge::formal_group::{dp_exp, dp_exp_terms, dp_log, FormalGroupLaw, Height, PowerSeries};
use padic_hodge::linalg::rat;
use padic_hodge::padic::{factorial_valuation, make_context, PadicScalar};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Q = BigRational;

fn curve(a: [i64; 5], order: usize) -> FormalGroupLaw<Q> {
    FormalGroupLaw::weierstrass(a.map(|x| rat(x, 1)), order)
}

/// a_p = p + 1 - #E(F_p) by brute force over the affine points.
fn trace_of_frobenius(a: [i64; 5], p: i64) -> i64 {
    let [a1, a2, a3, a4, a6] = a;
    let mut count = 1;
    for x in 0..p {
        for y in 0..p {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(p) == 0 {
                count += 1;
            }
        }
    }
    p + 1 - count
}

fn height_of(a: [i64; 5], p: u64, order: usize) -> Height {
    let ctx = make_context(p, 1, 4).unwrap();
    curve(a, order).to_padic(&ctx).unwrap().height().unwrap()
}

#[test]
fn elliptic_heights_match_point_counts() {
    // y^2 + y = x^3 at p = 2 and y^2 = x^3 + 1 at p = 5 are supersingular
    let ss2 = [0, 0, 1, 0, 0];
    assert_eq!(trace_of_frobenius(ss2, 2).rem_euclid(2), 0);
    assert_eq!(height_of(ss2, 2, 8), Height::Finite(2));
    let ss5 = [0, 0, 0, 0, 1];
    assert_eq!(trace_of_frobenius(ss5, 5).rem_euclid(5), 0);
    assert_eq!(height_of(ss5, 5, 25), Height::Finite(2));
    // y^2 = x^3 + 1 at p = 7 is ordinary
    assert_ne!(trace_of_frobenius(ss5, 7).rem_euclid(7), 0);
    assert_eq!(height_of(ss5, 7, 10), Height::Finite(1));
}

#[test]
fn elliptic_log_agrees_with_limit_definition() {
    // y^2 = x^3 - x + 1 has good reduction at 3
    let a = [0, 0, 0, -1, 1];
    let order = 9;
    let law = curve(a, order);
    assert!(law.check_axioms().holds());
    let log = law.log_series().unwrap();
    let n = 14;
    let ctx = make_context(3, 1, 6 + n + 6).unwrap();
    let lim = law.to_padic(&ctx).unwrap().limit_log(n).unwrap();
    for k in 1..=order {
        let want = PadicScalar::from_rational(&ctx, &log.coeff(k)).truncate(6);
        assert_eq!(lim.coeff(k).truncate(6), want, "coefficient {k}");
    }
}

#[test]
fn exp_inverts_log_and_mult_composes() {
    let law = curve([1, 0, 1, 2, 0], 10);
    let log = law.log_series().unwrap();
    let exp = law.exp_series().unwrap();
    let t = PowerSeries::variable(&(), 10);
    assert!(exp.compose(&log).unwrap().agrees_with(&t));
    let m2 = law.multiplication_by(2).unwrap();
    let m3 = law.multiplication_by(3).unwrap();
    let m6 = law.multiplication_by(6).unwrap();
    assert!(m2.compose(&m3).unwrap().agrees_with(&m6));
    // [m](t) = exp(m log t)
    assert!(exp.compose(&log.scale(&rat(3, 1))).unwrap().agrees_with(&m3));
}

#[test]
fn multiplicative_exp_is_exp_minus_one() {
    let law = FormalGroupLaw::<Q>::multiplicative(&(), 12);
    let exp = law.exp_series().unwrap();
    let mut fact = 1i64;
    for k in 1..=12 {
        fact *= k;
        assert_eq!(exp.coeff(k as usize), rat(1, fact));
    }
    assert!(exp.coeff(0).is_zero());
}

#[test]
fn divided_power_term_valuations() {
    for p in [3u64, 5] {
        let ctx = make_context(p, 1, 80).unwrap();
        let x = PadicScalar::from_int(&ctx, p as i64);
        let terms = dp_exp_terms(&x, 41).unwrap();
        for (n, t) in terms.iter().enumerate().skip(1) {
            let mut s = 0;
            let mut m = n as u64;
            while m > 0 {
                s += m % p;
                m /= p;
            }
            let legendre = (n as u64 - s) / (p - 1);
            assert_eq!(legendre, factorial_valuation(n as u64, p));
            assert_eq!(t.valuation(), Some(n as i64 - legendre as i64));
        }
    }
}

#[test]
fn divided_powers_invert_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [3u64, 5] {
        let ctx = make_context(p, 1, 12).unwrap();
        for _ in 0..20 {
            let x = &PadicScalar::p_power(&ctx, 1) * &PadicScalar::random_integral(&ctx, &mut rng);
            assert_eq!(dp_log(&dp_exp(&x).unwrap()).unwrap(), x);
        }
    }
}

fn law_strategy() -> impl Strategy<Value = [i64; 5]> {
    prop::array::uniform5(-3i64..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn log_is_a_homomorphism(a in law_strategy()) {
        let law = curve(a, 7);
        prop_assert!(law.check_axioms().holds());
        let log = law.log_series().unwrap();
        // L(phi(x, y)) = L(x) + L(y): compare along (t, 2t) and (t, t^2 - t)
        let t = PowerSeries::variable(&(), 7);
        for b in [t.scale(&rat(2, 1)), t.mul(&t).sub(&t)] {
            let lhs = log.compose(&law.combine(&t, &b).unwrap()).unwrap();
            let rhs = log.add(&log.compose(&b).unwrap());
            prop_assert!(lhs.agrees_with(&rhs));
        }
    }

    #[test]
    fn multiplication_composes(a in law_strategy(), m in 1u64..5, k in 1u64..5) {
        let law = curve(a, 6);
        let lhs = law.multiplication_by(m).unwrap().compose(&law.multiplication_by(k).unwrap()).unwrap();
        prop_assert!(lhs.agrees_with(&law.multiplication_by(m * k).unwrap()));
    }
}
