//! Runs the ten acceptance criteria and prints one line per criterion.
//!
//! Criterion 10 re-runs 1 to 9 with ten extra digits of precision and
//! compares the exact values they report.

mod common;

use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{all_digit_vectors, ghost_op, GhostOp};
use padic_hodge::filtered::{FilteredIsocrystal, Verdict};
use padic_hodge::fixtures::{
    katz, kummer_pattern, ordinary_elliptic, random_admissible, random_category, random_single_object, rank_one,
    scalar_endomorphism, unit_object,
};
use padic_hodge::formal_group::{dp_exp, dp_exp_terms, dp_log, FormalGroupLaw, PowerSeries};
use padic_hodge::isocrystal::{newton_polygon_of_poly, simple_isocrystal, Isocrystal, SlopeData};
use padic_hodge::linalg::rat;
use padic_hodge::motive::MotiveShape;
use padic_hodge::padic::{factorial_valuation, make_context, PadicScalar, Rational};
use padic_hodge::periods::PairingCategory;
use padic_hodge::witt::{witt_to_padic, WittVector};

/// Criteria whose stated value is known to be wrong; they must fail.
const EXPECTED_FAILURES: &[usize] = &[1];

#[derive(Default)]
struct Run {
    failures: Vec<String>,
    values: Vec<String>,
}

impl Run {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn value(&mut self, v: impl Display) {
        self.values.push(v.to_string());
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn poly(ctx: &padic_hodge::padic::Context, c: &[i64]) -> Vec<PadicScalar> {
    c.iter().map(|&x| PadicScalar::from_int(ctx, x)).collect()
}

fn c1_katz(extra: u32, r: &mut Run) {
    for p in [3u64, 7, 11] {
        let start = Instant::now();
        let n = katz(p, 20 + extra).unwrap();
        let slopes = n.slopes().unwrap();
        let cp = n.matrix().charpoly().unwrap();
        let np = newton_polygon_of_poly(&cp).unwrap();
        let elapsed = start.elapsed();
        let pi = p as i64;
        r.check(slopes == SlopeData::from_pairs([(q(0, 1), 1), (q(1, 1), 1)]), || {
            format!("p = {p}: slopes {}", slopes.render())
        });
        r.check(np.slopes() == SlopeData::from_pairs([(q(1, 2), 2)]), || {
            format!("p = {p}: char poly polygon {}", np.render())
        });
        // trace 0 and det -(p-1)^2 - ((p+1)i)^2 = 4p by hand
        let oracle = poly(n.context(), &[1, 0, 4 * pi]);
        r.check(cp == oracle, || format!("p = {p}: char poly differs from lambda^2 + {}", 4 * pi));
        r.check(cp == poly(n.context(), &[1, 0, -4 * pi]), || {
            format!("p = {p}: char poly is lambda^2 + {0}, not the stated lambda^2 - {0}", 4 * pi)
        });
        r.check(elapsed.as_secs_f64() < 1.0, || format!("p = {p}: took {elapsed:?}"));
        r.value(format!(
            "p={p} slopes={} charpoly=[{}] polygon={}",
            slopes.render(),
            cp.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
            np.render()
        ));
    }
}

fn c2_ordinary(extra: u32, r: &mut Run) {
    for p in [2u64, 3, 5, 7] {
        let ctx = make_context(p, 1, 10 + extra).unwrap();
        let np = ordinary_elliptic(&ctx).unwrap().newton_polygon().unwrap();
        r.check(np.render() == "(0,0),(1,0),(2,1)", || format!("p = {p}: {}", np.render()));
        r.value(np.render());
    }
}

fn c3_simple(extra: u32, r: &mut Run) {
    let ctx = make_context(5, 1, 20 + extra).unwrap();
    for rank in 1..=6usize {
        for d in -6i64..=6 {
            if num_integer::gcd(rank as i64, d) != 1 {
                continue;
            }
            let n = simple_isocrystal(&ctx, rank, d).unwrap();
            let s = n.slopes().unwrap();
            r.check(s == SlopeData::from_pairs([(q(d, rank as i64), rank)]), || {
                format!("N({rank},{d}): {}", s.render())
            });
            r.check(s.newton_number() == q(d, 1), || format!("N({rank},{d}): t_N = {}", s.newton_number()));
            r.value(format!("N({rank},{d}) {}", s.render()));
        }
    }
}

fn digits(x: &WittVector) -> Vec<u64> {
    x.coords().iter().map(|a| a.coeffs()[0]).collect()
}

fn c4_witt(extra: u32, r: &mut Run) {
    for p in [2u64, 3] {
        for m in 1..=3usize {
            let ctx = make_context(p, 1, m as u32 + extra).unwrap();
            let modulus = BigInt::from(p).pow(m as u32);
            let wv = |d: &[u64]| WittVector::from_digits(&ctx, d).unwrap();
            let image =
                |x: &WittVector| witt_to_padic(x, &ctx).unwrap().integral_coeffs().unwrap()[0].clone() % &modulus;
            let elems = all_digit_vectors(p, m);
            let images: Vec<BigInt> = elems.iter().map(|d| image(&wv(d))).collect();
            let mut sorted = images.clone();
            sorted.sort();
            sorted.dedup();
            r.check(sorted.len() == elems.len(), || format!("W_{m}(F_{p}) -> Z/{p}^{m} is not bijective"));
            r.check(image(&WittVector::one(&ctx, m)) == BigInt::from(1) % &modulus, || {
                format!("W_{m}(F_{p}): 1 not sent to 1")
            });
            for (i, x) in elems.iter().enumerate() {
                for (j, y) in elems.iter().enumerate() {
                    let (a, b) = (wv(x), wv(y));
                    let s = image(&a.add(&b).unwrap());
                    let t = image(&a.mul(&b).unwrap());
                    r.check(s == (&images[i] + &images[j]) % &modulus, || format!("W_{m}(F_{p}): {x:?} + {y:?}"));
                    r.check(t == (&images[i] * &images[j]) % &modulus, || format!("W_{m}(F_{p}): {x:?} * {y:?}"));
                }
            }
            r.value(format!("W_{m}(F_{p}) size {}", elems.len()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5177);
    let mut trials = 0;
    for _ in 0..1000 {
        let p = [2u64, 3, 5][rng.gen_range(0..3)];
        let m = rng.gen_range(1..=4usize);
        let ctx = make_context(p, 1, m as u32 + extra).unwrap();
        let mut draw = || -> Vec<u64> { (0..m).map(|_| rng.gen_range(0..p)).collect() };
        let (x, y, z) = (draw(), draw(), draw());
        let wv = |d: &[u64]| WittVector::from_digits(&ctx, d).unwrap();
        let (a, b, c) = (wv(&x), wv(&y), wv(&z));
        let mut ok = digits(&a.add(&b).unwrap()) == ghost_op(&x, &y, p, GhostOp::Add)
            && digits(&a.sub(&b).unwrap()) == ghost_op(&x, &y, p, GhostOp::Sub)
            && digits(&a.mul(&b).unwrap()) == ghost_op(&x, &y, p, GhostOp::Mul);
        let ab = a.add(&b).unwrap();
        ok &= ab.add(&c).unwrap() == a.add(&b.add(&c).unwrap()).unwrap();
        ok &= a.mul(&b).unwrap().mul(&c).unwrap() == a.mul(&b.mul(&c).unwrap()).unwrap();
        ok &= a.mul(&b.add(&c).unwrap()).unwrap() == a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        ok &= a.mul(&WittVector::one(&ctx, m)).unwrap() == a;
        ok &= a.add(&a.neg().unwrap()).unwrap().is_zero();
        r.check(ok, || format!("trial p = {p}, x = {x:?}, y = {y:?}, z = {z:?}"));
        trials += ok as usize;
    }
    r.value(format!("{trials}/1000 ghost trials"));
}

fn c5_multiplicative(extra: u32, r: &mut Run) {
    type Q = BigRational;
    let law = FormalGroupLaw::<Q>::multiplicative(&(), 30);
    let log = law.log_series().unwrap();
    for i in 1..=30i64 {
        let want = rat(if i % 2 == 1 { 1 } else { -1 }, i);
        r.check(log.coeff(i as usize) == want, || format!("log coefficient {i} is {}", log.coeff(i as usize)));
    }
    r.check(log.coeff(0).is_zero(), || "log has a constant term".into());
    let n = 14u32;
    let small = FormalGroupLaw::<Q>::multiplicative(&(), 12);
    let small_log = small.log_series().unwrap();
    for p in [2u64, 3, 5] {
        let ctx = make_context(p, 1, 6 + n + 6 + extra).unwrap();
        let lim = small.to_padic(&ctx).unwrap().limit_log(n).unwrap();
        for k in 1..=12 {
            let want = PadicScalar::from_rational(&ctx, &small_log.coeff(k)).truncate(6);
            let got = lim.coeff(k).truncate(6);
            r.check(got == want, || format!("p = {p}: limit coefficient {k} is {got}, log gives {want}"));
        }
        r.value(format!("p={p} limit agrees to p^6 on 12 coefficients"));
    }
    let law20 = FormalGroupLaw::<Q>::multiplicative(&(), 20);
    let id = law20.exp_series().unwrap().compose(&law20.log_series().unwrap()).unwrap();
    r.check(id.agrees_with(&PowerSeries::variable(&(), 20)), || "exp(log t) differs from t below order 20".into());
    r.value(format!("log = [{}]", (1..=30).map(|i| log.coeff(i).to_string()).collect::<Vec<_>>().join(",")));
}

fn c6_divided_powers(extra: u32, r: &mut Run) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1_7e);
    let mut inverse = 0;
    for i in 0..100 {
        let p = if i % 2 == 0 { 3u64 } else { 5 };
        let ctx = make_context(p, 1, 12 + extra).unwrap();
        let x = &PadicScalar::p_power(&ctx, 1) * &PadicScalar::random_integral(&ctx, &mut rng);
        let back = dp_log(&dp_exp(&x).unwrap()).unwrap();
        let round = dp_exp(&dp_log(&(&PadicScalar::one(&ctx) + &x)).unwrap()).unwrap();
        let ok = back == x && round == &PadicScalar::one(&ctx) + &x;
        r.check(ok, || format!("p = {p}: exp/log fail to invert at {x}"));
        inverse += ok as usize;
    }
    r.value(format!("{inverse}/100 points invert"));
    for p in [3u64, 5] {
        let ctx = make_context(p, 1, 80 + extra).unwrap();
        let terms = dp_exp_terms(&PadicScalar::from_int(&ctx, p as i64), 51).unwrap();
        let mut counted = 0u64;
        for n in 1..=50u64 {
            let mut j = n;
            while j % p == 0 {
                counted += 1;
                j /= p;
            }
            let (mut s, mut m) = (0, n);
            while m > 0 {
                s += m % p;
                m /= p;
            }
            let digit_formula = (n - s) / (p - 1);
            r.check(digit_formula == counted && factorial_valuation(n, p) == counted, || {
                format!("p = {p}, n = {n}: nu(n!) = {counted}, digit formula {digit_formula}")
            });
            let v = terms[n as usize].valuation();
            r.check(v == Some(n as i64 - counted as i64), || format!("p = {p}: nu(p^{n}/{n}!) = {v:?}"));
        }
        r.value(format!("p={p} nu(50!)={counted}"));
    }
}

fn verdict_label(f: &FilteredIsocrystal) -> String {
    f.weak_admissibility().unwrap().label().to_string()
}

fn c7_admissibility(extra: u32, r: &mut Run) {
    let ctx = make_context(5, 1, 16 + extra).unwrap();
    let unit = unit_object(&ctx).unwrap();
    r.check(unit.weak_admissibility().unwrap().is_admissible(), || "unit object".into());
    let et = rank_one(&ctx, 0, true).unwrap();
    match et.weak_admissibility().unwrap() {
        Verdict::NotAdmissible(w) => {
            // recheck: the witness is F-stable and t_N < t_H on it, from scratch
            let image = et.base().apply_columns(&w.basis).unwrap();
            let a = w.basis.solve(&image).unwrap();
            let t_n = a.map(|a| Isocrystal::new(a).unwrap().slopes().unwrap().newton_number());
            let fil1 = et.filtration().fil(1);
            let t_h = fil1.cols() + w.basis.cols() - fil1.hstack(&w.basis).unwrap().rank();
            r.check(t_n.is_some_and(|t| t < Rational::from_integer(t_h as i64)), || {
                format!("witness does not certify: t_N = {t_n:?}, t_H = {t_h}")
            });
        }
        v => r.check(false, || format!("(sigma, Fil^1 = N) gave {}", v.label())),
    }
    let mu = rank_one(&ctx, 1, true).unwrap();
    r.check(mu.weak_admissibility().unwrap().is_admissible(), || "(p sigma, Fil^1 = N)".into());
    r.value(format!("{} {} {}", verdict_label(&unit), verdict_label(&et), verdict_label(&mu)));
    let mut rng = ChaCha8Rng::seed_from_u64(0xadd);
    let batch = random_admissible(&ctx, &mut rng, 200, 4).unwrap();
    let spanning = batch.iter().filter(|f| f.frobenius_span_check().unwrap()).count();
    r.check(spanning == 200, || format!("span check holds on {spanning}/200"));
    let dims: Vec<String> = batch.iter().map(|f| format!("{}:{}", f.dim(), f.hodge_number())).collect();
    r.value(format!("{spanning}/200 span; {}", dims.join(" ")));
}

fn random_shape<R: Rng>(rng: &mut R) -> MotiveShape {
    let mut pairs = Vec::new();
    let mut g = 0;
    for _ in 0..rng.gen_range(0..4) {
        let (n, d) = [(0i64, 1i64), (1, 2), (1, 3), (2, 5)][rng.gen_range(0..4)];
        let a = q(n, d);
        if a == q(1, 2) {
            pairs.push((a, 2));
            g += 1;
        } else {
            pairs.push((a, d as usize));
            pairs.push((q(1, 1) - a, d as usize));
            g += d as usize;
        }
    }
    MotiveShape::new(rng.gen_range(0..6), rng.gen_range(0..6), g)
        .with_abelian_newton(SlopeData::from_pairs(pairs))
        .unwrap()
}

fn c8_motives(_extra: u32, r: &mut Run) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1707);
    for _ in 0..50 {
        let m = random_shape(&mut rng);
        let ht = m.hodge_tate_weights();
        let label = format!("({}, {}, {})", m.rank_l, m.dim_t, m.dim_a);
        r.check(m.tate_rank() == m.de_rham_dims().t_dr, || format!("{label}: tate rank"));
        r.check((ht.weight0, ht.weight1) == (m.rank_l + m.dim_a, m.dim_t + m.dim_a), || format!("{label}: weights"));
        r.check(ht.weight0 + ht.weight1 == m.tate_rank(), || format!("{label}: weights do not sum to the rank"));
        r.check(m.cartier_dual().cartier_dual().shape_eq(&m), || format!("{label}: dual is not an involution"));
        r.value(format!("{label} rank {} weights {}+{}", m.tate_rank(), ht.weight0, ht.weight1));
    }
    let k = MotiveShape::kummer();
    let s = k.crystalline_slopes().unwrap();
    r.check(s == SlopeData::from_pairs([(q(0, 1), 1), (q(1, 1), 1)]), || format!("Kummer slopes {}", s.render()));
    r.check(k.de_rham_dims().fil0 == 1, || "dim V(M) for Kummer".into());
    r.value(format!("kummer {} V(M)={}", s.render(), k.de_rham_dims().fil0));
}

fn dims(c: &PairingCategory<BigRational>, max: usize) -> Vec<usize> {
    std::iter::once(c.formal_period_space().dim).chain((1..=max).map(|i| c.depth_space(i).dim)).collect()
}

fn monotone(d: &[usize]) -> bool {
    d.windows(2).all(|w| w[1] <= w[0])
}

fn c9_periods(_extra: u32, r: &mut Run) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e41);
    for _ in 0..100 {
        let c = random_single_object(&mut rng, 4);
        let o = &c.objects()[0];
        let d = dims(&c, 2);
        r.check(d[0] <= o.dim_f.max(o.dim_g).pow(2), || format!("dims ({}, {}): {}", o.dim_f, o.dim_g, d[0]));
        r.check(monotone(&d), || format!("single object not monotone: {d:?}"));
        r.value(format!("{:?}", d));
    }
    let s = scalar_endomorphism(2, 2, 2, 3);
    r.check(s.formal_period_space().dim == 0, || "scalar endomorphism does not collapse".into());
    let k = kummer_pattern(true);
    let kd = dims(&k, 2);
    r.check(kd[1] > kd[2], || format!("Kummer depth dims {kd:?}"));
    let inj: Vec<bool> = (1..=3).map(|i| k.conjecture_at_depth(i).unwrap().injective).collect();
    r.check(inj == [false, true, true], || format!("Kummer injectivity by depth {inj:?}"));
    r.value(format!("kummer {kd:?} {inj:?}"));
    let mut fixtures = vec![s, k, kummer_pattern(false), scalar_endomorphism(3, 2, 1, 1)];
    fixtures.extend((0..20).map(|_| random_category(&mut rng, 3)));
    for c in &fixtures {
        let d = dims(c, 3);
        r.check(monotone(&d), || format!("not monotone: {d:?}"));
        r.value(format!("{d:?}"));
    }
}

type Criterion = fn(u32, &mut Run);

const CRITERIA: [(&str, Criterion); 9] = [
    ("Katz example: slopes {0,1}, single-basis char poly", c1_katz),
    ("ordinary elliptic Newton polygon", c2_ordinary),
    ("simple isocrystals N(r,d), r <= 6, |d| <= 6", c3_simple),
    ("Witt vectors: W_n(F_p) = Z/p^n and 1000 ghost trials", c4_witt),
    ("multiplicative formal group log, limit oracle, exp o log", c5_multiplicative),
    ("divided-power exp/log and nu(n!)", c6_divided_powers),
    ("weak admissibility verdicts and Frobenius span", c7_admissibility),
    ("1-motive shapes", c8_motives),
    ("formal period spaces", c9_periods),
];

fn run(f: Criterion, extra: u32) -> Run {
    match catch_unwind(AssertUnwindSafe(|| {
        let mut r = Run::default();
        f(extra, &mut r);
        r
    })) {
        Ok(r) => r,
        Err(e) => {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Run { failures: vec![format!("panicked: {}", msg.unwrap_or_default())], values: Vec::new() }
        }
    }
}

fn line(i: usize, name: &str, r: &Run, secs: f64) -> bool {
    let pass = r.failures.is_empty();
    let status = if pass { "PASS" } else { "FAIL" };
    let expected = EXPECTED_FAILURES.contains(&i);
    let note = match (pass, expected) {
        (false, true) => " (expected)",
        (true, true) => " (unexpected pass)",
        _ => "",
    };
    println!("criterion {i:>2} [{status}]{note} {name} ({secs:.2}s)");
    for f in r.failures.iter().take(5) {
        println!("    {f}");
    }
    if r.failures.len() > 5 {
        println!("    ... {} more", r.failures.len() - 5);
    }
    pass != expected
}

fn main() -> ExitCode {
    let mut ok = true;
    let mut base = Vec::new();
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let r = run(*f, 0);
        ok &= line(i + 1, name, &r, start.elapsed().as_secs_f64());
        base.push(r);
    }
    let start = Instant::now();
    let mut ten = Run::default();
    for (i, (_, f)) in CRITERIA.iter().enumerate() {
        let again = run(*f, 10);
        let same = again.values == base[i].values && again.failures == base[i].failures;
        ten.check(same, || format!("criterion {} reports different values at precision +10", i + 1));
    }
    ok &= line(10, "precision +10 reproduces criteria 1-9", &ten, start.elapsed().as_secs_f64());
    let passed = base.iter().filter(|r| r.failures.is_empty()).count() + ten.failures.is_empty() as usize;
    println!("{passed}/10 criteria pass");
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
