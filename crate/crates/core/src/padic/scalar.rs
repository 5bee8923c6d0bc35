use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::context::Context;
use super::fq::FqElement;
use crate::error::{Error, Result};

/// An element p^v * u of Q_q known modulo p^abs.
///
/// The unit u is stored as a coefficient vector modulo p^(abs - v). Absolute
/// precision never exceeds the context precision N and the relative precision
/// abs - v never exceeds N either, so elements of negative valuation carry
/// fewer absolute digits.
#[derive(Clone)]
pub struct PadicScalar {
    ctx: Context,
    val: Option<i64>,
    unit: Vec<BigInt>,
    abs: i64,
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} [abs {}]", self.abs)
    }
}

impl PadicScalar {
    /// p^shift * (sum coeffs[j] g^j) known modulo p^abs.
    pub(crate) fn from_raw(ctx: &Context, mut coeffs: Vec<BigInt>, shift: i64, abs: i64) -> Self {
        let n_cap = ctx.precision();
        let abs = abs.min(n_cap);
        coeffs.resize(ctx.degree(), BigInt::zero());
        let budget = abs - shift;
        if budget <= 0 {
            return Self::zero_with_precision(ctx, abs);
        }
        ctx.reduce(&mut coeffs, budget);
        let vc = match ctx.vec_valuation(&coeffs) {
            None => return Self::zero_with_precision(ctx, abs),
            Some(v) => v,
        };
        let val = shift + vc;
        let mut abs = abs;
        if abs - val > n_cap {
            abs = val + n_cap;
        }
        let rel = abs - val;
        let scale = ctx.pow_p(vc);
        let mut unit: Vec<BigInt> = coeffs.into_iter().map(|c| c / &scale).collect();
        ctx.reduce(&mut unit, rel);
        PadicScalar { ctx: Arc::clone(ctx), val: Some(val), unit, abs }
    }

    pub fn zero(ctx: &Context) -> Self {
        Self::zero_with_precision(ctx, ctx.precision())
    }

    /// Zero known modulo p^abs, i.e. an element of valuation at least abs.
    pub fn zero_with_precision(ctx: &Context, abs: i64) -> Self {
        PadicScalar {
            ctx: Arc::clone(ctx),
            val: None,
            unit: vec![BigInt::zero(); ctx.degree()],
            abs: abs.min(ctx.precision()),
        }
    }

    pub fn one(ctx: &Context) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Context, a: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(a))
    }

    pub fn from_bigint(ctx: &Context, a: &BigInt) -> Self {
        let mut coeffs = vec![BigInt::zero(); ctx.degree()];
        coeffs[0] = a.clone();
        Self::from_raw(ctx, coeffs, 0, ctx.precision())
    }

    pub fn from_rational(ctx: &Context, q: &BigRational) -> Self {
        let num = Self::from_bigint(ctx, q.numer());
        let den = Self::from_bigint(ctx, q.denom());
        num.div(&den).expect("denominator of a rational is nonzero")
    }

    /// Exact element sum coeffs[j] g^j of Z_q at full precision.
    pub fn from_coeffs(ctx: &Context, coeffs: &[BigInt]) -> Result<Self> {
        if coeffs.len() > ctx.degree() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a degree {} field",
                coeffs.len(),
                ctx.degree()
            )));
        }
        Ok(Self::from_raw(ctx, coeffs.to_vec(), 0, ctx.precision()))
    }

    /// p^k.
    pub fn p_power(ctx: &Context, k: i64) -> Self {
        Self::from_raw(ctx, ctx.one_raw(), k, ctx.precision())
    }

    /// The generator g of Z_q over Z_p.
    pub fn generator(ctx: &Context) -> Self {
        let mut coeffs = vec![BigInt::zero(); ctx.degree()];
        if ctx.degree() == 1 {
            return Self::zero(ctx);
        }
        coeffs[1] = BigInt::one();
        Self::from_raw(ctx, coeffs, 0, ctx.precision())
    }

    /// Lift of a residue element with zero higher digits.
    pub fn lift(a: &FqElement) -> Self {
        let ctx = a.context();
        let coeffs = a.coeffs().iter().map(|&c| BigInt::from(c)).collect();
        Self::from_raw(ctx, coeffs, 0, ctx.precision())
    }

    /// Uniform element of Z_q at full precision whose reduction is nonzero.
    pub fn random_unit<R: Rng + ?Sized>(ctx: &Context, rng: &mut R) -> Self {
        loop {
            let x = Self::random_integral(ctx, rng);
            if x.valuation() == Some(0) {
                return x;
            }
        }
    }

    pub fn random_integral<R: Rng + ?Sized>(ctx: &Context, rng: &mut R) -> Self {
        let m = ctx.pow_p(ctx.precision());
        let coeffs = (0..ctx.degree())
            .map(|_| {
                let digits: Vec<u64> = (0..ctx.precision()).map(|_| rng.gen_range(0..ctx.p())).collect();
                let mut c = BigInt::zero();
                for d in digits.iter().rev() {
                    c = c * ctx.p() + d;
                }
                c.mod_floor(&m)
            })
            .collect();
        Self::from_raw(ctx, coeffs, 0, ctx.precision())
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    /// Valuation with nu(p) = 1; None when the element is zero to precision.
    pub fn valuation(&self) -> Option<i64> {
        self.val
    }

    /// Lower bound for the valuation (the absolute precision for zero).
    pub fn valuation_bound(&self) -> i64 {
        self.val.unwrap_or(self.abs)
    }

    /// Absolute precision: the element is known modulo p^precision().
    pub fn precision(&self) -> i64 {
        self.abs
    }

    pub fn relative_precision(&self) -> i64 {
        match self.val {
            Some(v) => self.abs - v,
            None => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.val.is_none()
    }

    pub fn unit_coeffs(&self) -> &[BigInt] {
        &self.unit
    }

    /// Coefficients of the element itself when it is integral, modulo p^abs.
    pub fn integral_coeffs(&self) -> Result<Vec<BigInt>> {
        match self.val {
            None => Ok(vec![BigInt::zero(); self.ctx.degree()]),
            Some(v) if v < 0 => Err(Error::InvalidArgument("element is not integral".into())),
            Some(v) => {
                let s = self.ctx.pow_p(v);
                Ok(self.unit.iter().map(|c| c * &s).collect())
            }
        }
    }

    /// Rational representative when the element lies in Q_p (n = 1 or a
    /// vector supported on the constant term).
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.val {
            None => Some(BigRational::zero()),
            Some(v) => {
                if self.unit.iter().skip(1).any(|c| !c.is_zero()) {
                    return None;
                }
                let u = BigRational::from_integer(self.unit[0].clone());
                let pv = BigRational::from_integer(self.ctx.pow_p(v.abs()));
                Some(if v >= 0 { u * pv } else { u / pv })
            }
        }
    }

    fn same_field(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx)
    }

    fn pick_ctx<'a>(&'a self, other: &'a Self) -> &'a Context {
        if other.ctx.precision() < self.ctx.precision() {
            &other.ctx
        } else {
            &self.ctx
        }
    }

    fn require_same(&self, other: &Self) -> Result<()> {
        if self.same_field(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.require_same(other)?;
        let ctx = self.pick_ctx(other);
        let abs = self.abs.min(other.abs);
        match (self.val, other.val) {
            (None, None) => Ok(Self::zero_with_precision(ctx, abs)),
            (None, Some(_)) => Ok(other.truncate_in(ctx, abs)),
            (Some(_), None) => Ok(self.truncate_in(ctx, abs)),
            (Some(vx), Some(vy)) => {
                let e = vx.min(vy);
                let sx = ctx.pow_p(vx - e);
                let sy = ctx.pow_p(vy - e);
                let coeffs = self.unit.iter().zip(&other.unit).map(|(a, b)| a * &sx + b * &sy).collect();
                Ok(Self::from_raw(ctx, coeffs, e, abs))
            }
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.require_same(other)?;
        let ctx = self.pick_ctx(other);
        let bx = self.valuation_bound();
        let by = other.valuation_bound();
        let abs = (self.abs + by).min(other.abs + bx);
        match (self.val, other.val) {
            (Some(vx), Some(vy)) => {
                let val = vx + vy;
                let rel = (abs.min(ctx.precision()) - val).max(0);
                let unit = ctx.mul_raw(&self.unit, &other.unit, rel);
                Ok(Self::from_raw(ctx, unit, val, abs))
            }
            _ => Ok(Self::zero_with_precision(ctx, abs)),
        }
    }

    pub fn neg(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => {
                let coeffs = self.unit.iter().map(|c| -c).collect();
                Self::from_raw(&self.ctx, coeffs, v, self.abs)
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let v = self.val.ok_or_else(|| Error::NotInvertible(format!("zero to precision O(p^{})", self.abs)))?;
        let rel = self.abs - v;
        let unit = self
            .ctx
            .inv_raw(&self.unit, rel)
            .ok_or_else(|| Error::NotInvertible("unit part is not invertible".into()))?;
        Ok(Self::from_raw(&self.ctx, unit, -v, -v + rel))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn pow_signed(&self, e: i64) -> Result<Self> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// The Frobenius automorphism sigma, acting on g by the precomputed lift.
    pub fn frobenius(&self) -> Self {
        match self.val {
            None => self.clone(),
            Some(v) => {
                let rel = self.abs - v;
                let unit = self.ctx.frobenius_raw(&self.unit, rel);
                Self::from_raw(&self.ctx, unit, v, self.abs)
            }
        }
    }

    /// sigma^k for k in Z (sigma^n = id).
    pub fn frobenius_power(&self, k: i64) -> Self {
        let e = k.rem_euclid(self.ctx.degree() as i64);
        let mut out = self.clone();
        for _ in 0..e {
            out = out.frobenius();
        }
        out
    }

    /// Forget digits beyond p^abs.
    pub fn truncate(&self, abs: i64) -> Self {
        self.truncate_in(&self.ctx, abs)
    }

    fn truncate_in(&self, ctx: &Context, abs: i64) -> Self {
        let abs = abs.min(self.abs);
        match self.val {
            None => Self::zero_with_precision(ctx, abs),
            Some(v) => Self::from_raw(ctx, self.unit.clone(), v, abs),
        }
    }

    /// Moves the element to another context of the same field. When the
    /// element carries the full precision of its context its representative
    /// is taken as exact, so the precision rises to the new cap.
    pub fn lift_to(&self, ctx: &Context) -> Result<Self> {
        if !self.ctx.same_field(ctx) {
            return Err(Error::ContextMismatch);
        }
        let full = self.abs >= self.ctx.precision() || self.relative_precision() >= self.ctx.precision();
        let abs = if full { i64::MAX / 4 } else { self.abs };
        Ok(match self.val {
            None => Self::zero_with_precision(ctx, abs),
            Some(v) => Self::from_raw(ctx, self.unit.clone(), v, abs),
        })
    }

    /// Reduction to the residue field; requires a nonnegative valuation.
    pub fn residue(&self) -> Result<FqElement> {
        match self.val {
            None if self.abs >= 1 => Ok(FqElement::zero(&self.ctx)),
            None => Err(Error::PrecisionInsufficient("residue of an element known mod p^0".into())),
            Some(v) if v < 0 => Err(Error::InvalidArgument("residue of a non-integral element".into())),
            Some(v) if v > 0 => Ok(FqElement::zero(&self.ctx)),
            Some(_) => {
                let coeffs: Vec<u64> =
                    self.unit.iter().map(|c| c.mod_floor(self.ctx.prime()).try_into().unwrap()).collect();
                FqElement::new(&self.ctx, &coeffs)
            }
        }
    }

    /// Coordinates over Q_p (in `prime`, a degree-1 context of the same p)
    /// with respect to the basis 1, g, ..., g^{n-1}.
    pub fn components(&self, prime: &Context) -> Result<Vec<PadicScalar>> {
        if prime.p() != self.ctx.p() || prime.degree() != 1 {
            return Err(Error::ContextMismatch);
        }
        Ok(match self.val {
            None => vec![Self::zero_with_precision(prime, self.abs); self.ctx.degree()],
            Some(v) => self.unit.iter().map(|c| Self::from_raw(prime, vec![c.clone()], v, self.abs)).collect(),
        })
    }

    /// Inverse of `components`.
    pub fn from_components(ctx: &Context, comps: &[PadicScalar]) -> Result<Self> {
        if comps.len() != ctx.degree() {
            return Err(Error::DimensionMismatch("component count differs from the degree".into()));
        }
        let mut acc = Self::zero(ctx);
        let mut gk = Self::one(ctx);
        let g = Self::generator(ctx);
        for c in comps {
            if c.ctx.p() != ctx.p() || c.ctx.degree() != 1 {
                return Err(Error::ContextMismatch);
            }
            let lifted = match c.val {
                None => Self::zero_with_precision(ctx, c.abs),
                Some(v) => Self::from_raw(ctx, vec![c.unit[0].clone()], v, c.abs),
            };
            acc = &acc + &(&lifted * &gk);
            gk = &gk * &g;
        }
        Ok(acc)
    }

    /// True when self - other vanishes to the common precision.
    pub fn eq_at_precision(&self, other: &Self) -> bool {
        self.same_field(other) && self.checked_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

/// Teichmuller representative: the unique (q-1)-st root of unity (or 0)
/// reducing to `a`, computed as lim x^{q^k} of any lift x.
pub fn teichmuller(a: &FqElement) -> PadicScalar {
    let ctx = a.context();
    if a.is_zero() {
        return PadicScalar::zero(ctx);
    }
    let q = ctx.residue_cardinality();
    let mut x = PadicScalar::lift(a);
    for _ in 1..ctx.precision() {
        let y = x.pow_u128(q);
        if y.eq_at_precision(&x) {
            break;
        }
        x = y;
    }
    x
}

impl PadicScalar {
    fn pow_u128(&self, mut e: u128) -> Self {
        let mut acc = Self::one(&self.ctx);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl PartialEq for PadicScalar {
    fn eq(&self, other: &Self) -> bool {
        self.eq_at_precision(other)
    }
}

impl<'a> Add<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    /// Panics when the operands belong to different fields.
    fn add(self, rhs: &'a PadicScalar) -> PadicScalar {
        self.checked_add(rhs).expect("p-adic operands from different fields")
    }
}

impl<'a> Sub<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &'a PadicScalar) -> PadicScalar {
        self.checked_sub(rhs).expect("p-adic operands from different fields")
    }
}

impl<'a> Mul<&'a PadicScalar> for &'a PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &'a PadicScalar) -> PadicScalar {
        self.checked_mul(rhs).expect("p-adic operands from different fields")
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::neg(self)
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.val {
            None if self.abs >= self.ctx.precision() => write!(f, "0"),
            None => write!(f, "O(p^{})", self.abs),
            Some(v) => {
                let terms: Vec<String> = self
                    .unit
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| match j {
                        0 => format!("{c}"),
                        1 => format!("{c}*g"),
                        _ => format!("{c}*g^{j}"),
                    })
                    .collect();
                write!(f, "p^{v} * ({})", terms.join(" + "))
            }
        }
    }
}
