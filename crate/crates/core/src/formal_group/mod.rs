//! One-parameter commutative formal group laws over Q or Q_q, truncated at a
//! total degree.

mod divided_powers;
mod series;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Field;
use crate::padic::{Context, PadicScalar};

pub use divided_powers::{dp_exp, dp_exp_terms, dp_log, dp_valuation_floor};
pub use series::{Bivariate, PowerSeries};

#[derive(Debug, Clone)]
pub struct FormalGroupLaw<T: Field> {
    phi: Bivariate<T>,
}

/// Outcome of the axiom check; degrees are the lowest total degree of failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub unit: bool,
    pub commutative: Option<usize>,
    pub associative: Option<usize>,
}

impl AxiomReport {
    pub fn holds(&self) -> bool {
        self.unit && self.commutative.is_none() && self.associative.is_none()
    }
}

/// A law with exact rational coefficients.
pub type RationalLaw = FormalGroupLaw<BigRational>;

/// Height of the reduction of a law over Z_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Height {
    Finite(u32),
    /// [p](t) vanishes mod p through the truncation order.
    AtLeast(u32),
}

impl<T: Field> FormalGroupLaw<T> {
    pub fn from_bivariate(phi: Bivariate<T>) -> Self {
        FormalGroupLaw { phi }
    }

    pub fn additive(ctx: &T::Ctx, order: usize) -> Self {
        Self::from_bivariate(Bivariate::x(ctx, order).add(&Bivariate::y(ctx, order)))
    }

    pub fn multiplicative(ctx: &T::Ctx, order: usize) -> Self {
        let x = Bivariate::x(ctx, order);
        let y = Bivariate::y(ctx, order);
        Self::from_bivariate(x.add(&y).add(&x.mul(&y)))
    }

    pub fn phi(&self) -> &Bivariate<T> {
        &self.phi
    }

    pub fn order(&self) -> usize {
        self.phi.order()
    }

    pub fn ctx(&self) -> &T::Ctx {
        self.phi.ctx()
    }

    pub fn map<U: Field>(&self, ctx: &U::Ctx, f: impl Fn(&T) -> U) -> FormalGroupLaw<U> {
        FormalGroupLaw { phi: self.phi.map(ctx, f) }
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let n = self.order();
        let ctx = self.ctx().clone();
        let unit = (0..=n).all(|k| {
            let want = if k == 1 { T::one(&ctx) } else { T::zero(&ctx) };
            self.phi.get(k, 0).sub(&want).is_zero() && self.phi.get(0, k).sub(&want).is_zero()
        });
        let commutative = self.phi.sub(&self.phi.swap()).terms().iter().map(|((i, j), _)| i + j).min();
        AxiomReport { unit, commutative, associative: self.associativity_defect() }
    }

    /// Lowest total degree where phi(x, phi(y, z)) and phi(phi(x, y), z) differ.
    ///
    /// The coefficient of x^i y^j z^k on the left is sum_b c_{i,b} [y^j z^k] phi^b,
    /// on the right sum_a c_{a,k} [x^i y^j] phi^a, so only bivariate powers are needed.
    fn associativity_defect(&self) -> Option<usize> {
        let n = self.order();
        let ctx = self.ctx().clone();
        let mut powers = vec![Bivariate::constant(&ctx, n, T::one(&ctx))];
        for b in 1..=n {
            powers.push(powers[b - 1].mul(&self.phi));
        }
        for deg in 0..=n {
            for i in 0..=deg {
                for j in 0..=deg - i {
                    let k = deg - i - j;
                    let mut lhs = T::zero(&ctx);
                    let mut rhs = T::zero(&ctx);
                    for b in 0..=n - i {
                        let c = self.phi.get(i, b);
                        if !c.is_zero() {
                            lhs = lhs.add(&c.mul(&powers[b].get(j, k)));
                        }
                    }
                    for a in 0..=n - k {
                        let c = self.phi.get(a, k);
                        if !c.is_zero() {
                            rhs = rhs.add(&c.mul(&powers[a].get(i, j)));
                        }
                    }
                    if !lhs.sub(&rhs).is_zero() {
                        return Some(deg);
                    }
                }
            }
        }
        None
    }

    /// phi(a(t), b(t)).
    pub fn combine(&self, a: &PowerSeries<T>, b: &PowerSeries<T>) -> Result<PowerSeries<T>> {
        self.phi.eval(a, b)
    }

    /// [m](t) by double-and-add.
    pub fn multiplication_by(&self, m: u64) -> Result<PowerSeries<T>> {
        let ctx = self.ctx().clone();
        let n = self.order();
        let mut acc = PowerSeries::zero(&ctx, n);
        let mut base = PowerSeries::variable(&ctx, n);
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.combine(&acc, &base)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.combine(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Normalized invariant differential 1 / (d phi/dx)(0, t).
    pub fn invariant_differential(&self) -> Result<PowerSeries<T>> {
        let ctx = self.ctx().clone();
        let n = self.order();
        // (d/dx) phi at x = 0 is the x^1 slice
        let d = PowerSeries::new(&ctx, n - 1, self.phi.x_slice(1).coeffs().to_vec());
        d.inverse()
    }

    /// log(t) = integral of the invariant differential.
    pub fn log_series(&self) -> Result<PowerSeries<T>> {
        self.invariant_differential()?.integral()
    }

    pub fn exp_series(&self) -> Result<PowerSeries<T>> {
        self.log_series()?.reverse()
    }
}

impl FormalGroupLaw<BigRational> {
    /// The law over Q_q; coefficients must be p-integral.
    pub fn to_padic(&self, ctx: &Context) -> Result<FormalGroupLaw<PadicScalar>> {
        for ((i, j), c) in self.phi.terms() {
            let x = PadicScalar::from_rational(ctx, &c);
            if x.valuation().is_some_and(|v| v < 0) {
                return Err(Error::InvalidArgument(format!("coefficient of x^{i} y^{j} is not {}-integral", ctx.p())));
            }
        }
        Ok(self.map(ctx, |c| PadicScalar::from_rational(ctx, c)))
    }

    /// Formal group of y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 in z = -x/y.
    pub fn weierstrass(a: [BigRational; 5], order: usize) -> Self {
        FormalGroupLaw::from_bivariate(weierstrass_law(&(), &a, order))
    }
}

impl FormalGroupLaw<PadicScalar> {
    /// [p^n](t) / p^n, whose coefficients tend to those of the logarithm.
    pub fn limit_log(&self, n: u32) -> Result<PowerSeries<PadicScalar>> {
        let ctx = self.ctx().clone();
        let pn = ctx.p().checked_pow(n).ok_or_else(|| Error::InvalidArgument("p^n overflows".into()))?;
        let s = self.multiplication_by(pn)?;
        let inv = PadicScalar::p_power(&ctx, -(n as i64));
        Ok(s.scale(&inv))
    }

    /// Smallest h with [p](t) = c t^{p^h} + ... mod p, c a unit.
    pub fn height(&self) -> Result<Height> {
        let ctx = self.ctx().clone();
        let p = ctx.p();
        let n = self.order();
        if (n as u64) < p {
            return Err(Error::TruncationTooSmall { needed: p as usize });
        }
        for ((i, j), c) in self.phi.terms() {
            if c.valuation().is_some_and(|v| v < 0) {
                return Err(Error::InvalidArgument(format!("coefficient of x^{i} y^{j} is not integral")));
            }
        }
        let s = self.multiplication_by(p)?;
        let first = (1..=n).find(|&k| s.coeff(k).valuation() == Some(0));
        match first {
            Some(k) => {
                let mut h = 0;
                let mut pk = 1usize;
                while pk < k {
                    pk *= p as usize;
                    h += 1;
                }
                if pk != k {
                    return Err(Error::InvalidArgument(format!(
                        "leading term of [p] mod p has degree {k}, not a power of p"
                    )));
                }
                Ok(Height::Finite(h))
            }
            None => {
                let mut h = 0u32;
                let mut pk = 1usize;
                while pk <= n {
                    pk *= p as usize;
                    h += 1;
                }
                Ok(Height::AtLeast(h))
            }
        }
    }
}

/// w(z) = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3 by fixed-point iteration.
pub fn weierstrass_w<T: Field>(ctx: &T::Ctx, a: &[T; 5], order: usize) -> PowerSeries<T> {
    let [a1, a2, a3, a4, a6] = a;
    let z = PowerSeries::variable(ctx, order);
    let z2 = z.mul(&z);
    let z3 = z2.mul(&z);
    let mut w = z3.clone();
    for _ in 0..order {
        let w2 = w.mul(&w);
        w = z3
            .add(&z.mul(&w).scale(a1))
            .add(&z2.mul(&w).scale(a2))
            .add(&w2.scale(a3))
            .add(&z.mul(&w2).scale(a4))
            .add(&w2.mul(&w).scale(a6));
    }
    w
}

/// Group law in the parameter z = -x/y: the inverse of the third chord point.
pub fn weierstrass_law<T: Field>(ctx: &T::Ctx, a: &[T; 5], order: usize) -> Bivariate<T> {
    let [a1, a2, a3, a4, a6] = a;
    let n = order;
    let w = weierstrass_w(ctx, a, n + 2);
    let x = Bivariate::x(ctx, n);
    let y = Bivariate::y(ctx, n);
    // lambda = (w(z2) - w(z1)) / (z2 - z1)
    let mut terms = Vec::new();
    for m in 3..=n + 1 {
        let am = w.coeff(m);
        if am.is_zero() {
            continue;
        }
        for k in 0..m {
            terms.push(((k, m - 1 - k), am.clone()));
        }
    }
    let lambda = Bivariate::from_terms(ctx, n, terms);
    let w1 = x.substitute_into(&w).expect("x has no constant term");
    let nu = w1.sub(&lambda.mul(&x));
    let l2 = lambda.mul(&lambda);
    let two = T::from_i64(ctx, 2);
    let three = T::from_i64(ctx, 3);
    // the chord w = lambda z + nu meets the curve again at z3; sum of roots from the z^2 coefficient
    let num = lambda
        .scale(a1)
        .add(&l2.scale(a3))
        .add(&nu.scale(a2))
        .add(&lambda.mul(&nu).scale(&a4.mul(&two)))
        .add(&l2.mul(&nu).scale(&a6.mul(&three)));
    let den = Bivariate::constant(ctx, n, T::one(ctx))
        .add(&lambda.scale(a2))
        .add(&l2.scale(a4))
        .add(&l2.mul(&lambda).scale(a6));
    let z3 = x.add(&y).add(&num.mul(&den.inverse().expect("unit constant term"))).neg();
    // inverse point: i(z) = z / (a1 z + a3 w(z) - 1)
    let wz3 = z3.substitute_into(&w).expect("z3 has no constant term");
    let d = z3.scale(a1).add(&wz3.scale(a3)).sub(&Bivariate::constant(ctx, n, T::one(ctx)));
    z3.mul(&d.inverse().expect("unit constant term"))
}

/// JSON form: `{ "phi": { "i,j": "c" }, "order": N }`, or a named law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormalGroupSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BTreeMap<String, String>>,
    /// "additive" or "multiplicative".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub law: Option<String>,
    /// Weierstrass coefficients [a1, a2, a3, a4, a6].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weierstrass: Option<[String; 5]>,
    pub order: usize,
    /// Prime for height and limit checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b == BigInt::from(0) {
                None
            } else {
                Some(BigRational::new(a, b))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl FormalGroupSpec {
    pub fn build(&self, order_override: Option<usize>) -> Result<FormalGroupLaw<BigRational>> {
        let order = order_override.unwrap_or(self.order);
        if order < 1 {
            return Err(Error::validation("order", "order must be at least 1"));
        }
        let given = self.phi.is_some() as u8 + self.law.is_some() as u8 + self.weierstrass.is_some() as u8;
        if given != 1 {
            return Err(Error::validation("phi", "give exactly one of phi, law, weierstrass"));
        }
        if let Some(name) = &self.law {
            return match name.as_str() {
                "additive" => Ok(FormalGroupLaw::additive(&(), order)),
                "multiplicative" => Ok(FormalGroupLaw::multiplicative(&(), order)),
                _ => Err(Error::validation("law", "expected \"additive\" or \"multiplicative\"")),
            };
        }
        if let Some(a) = &self.weierstrass {
            let mut v = Vec::new();
            for (k, s) in a.iter().enumerate() {
                v.push(
                    parse_rational(s)
                        .ok_or_else(|| Error::validation(format!("weierstrass[{k}]"), "not a rational"))?,
                );
            }
            let arr: [BigRational; 5] = v.try_into().expect("five coefficients");
            return Ok(FormalGroupLaw::weierstrass(arr, order));
        }
        let map = self.phi.as_ref().expect("checked above");
        let mut terms = Vec::new();
        for (key, val) in map {
            let field = format!("phi.{key}");
            let (i, j) = key
                .split_once(',')
                .and_then(|(i, j)| Some((i.trim().parse::<usize>().ok()?, j.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| Error::validation(&field, "key must be \"i,j\""))?;
            let c = parse_rational(val).ok_or_else(|| Error::validation(&field, "not a rational"))?;
            terms.push(((i, j), c));
        }
        Ok(FormalGroupLaw::from_bivariate(Bivariate::from_terms(&(), order, terms)))
    }

    pub fn from_law(law: &FormalGroupLaw<BigRational>, p: Option<u64>) -> Self {
        let phi = law
            .phi()
            .terms()
            .into_iter()
            .map(|((i, j), c)| (format!("{i},{j}"), crate::linalg::fmt_rational(&c)))
            .collect();
        FormalGroupSpec { phi: Some(phi), law: None, weierstrass: None, order: law.order(), p }
    }
}
