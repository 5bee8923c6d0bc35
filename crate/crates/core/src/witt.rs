//! Truncated Witt vectors W_m(F_q).
//!
//! Ring operations go through the isomorphism W_m(F_q) -> Z_q / p^m,
//! (a_0, a_1, ...) -> sum p^i [a_i^(p^-i)], and back through Teichmuller
//! digit expansion. Contexts at precision m are cached per (p, n, m).

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{make_context, teichmuller, Context, FqElement, PadicScalar};

type CacheKey = (u64, usize, u32);

fn context_cache() -> &'static RwLock<HashMap<CacheKey, Context>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, Context>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn working_context(p: u64, n: usize, m: usize) -> Result<Context> {
    let key = (p, n, m as u32);
    if let Some(c) = context_cache().read().unwrap().get(&key) {
        return Ok(c.clone());
    }
    let ctx = make_context(p, n, m as u32)?;
    let mut w = context_cache().write().unwrap();
    Ok(w.entry(key).or_insert(ctx).clone())
}

#[derive(Clone)]
pub struct WittVector {
    ctx: Context,
    coords: Vec<FqElement>,
}

impl PartialEq for WittVector {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.coords == other.coords
    }
}

impl Eq for WittVector {}

impl fmt::Debug for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{:?}", self.coords)
    }
}

impl fmt::Display for WittVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Serialized Witt vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WittSpec {
    pub p: u64,
    pub n: usize,
    pub length: usize,
    pub coords: Vec<Vec<u64>>,
}

impl WittVector {
    pub fn new(ctx: &Context, coords: Vec<FqElement>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("Witt vectors need length at least 1".into()));
        }
        if coords.iter().any(|a| !a.context().same_field(ctx)) {
            return Err(Error::ContextMismatch);
        }
        let coords = coords.into_iter().map(|a| FqElement::new(ctx, a.coeffs())).collect::<Result<_>>()?;
        Ok(WittVector { ctx: ctx.clone(), coords })
    }

    /// Coordinates given as residue coefficient vectors.
    pub fn from_coeffs(ctx: &Context, coords: &[Vec<u64>]) -> Result<Self> {
        let c = coords.iter().map(|v| FqElement::new(ctx, v)).collect::<Result<Vec<_>>>()?;
        Self::new(ctx, c)
    }

    /// Prime-field coordinates.
    pub fn from_digits(ctx: &Context, digits: &[u64]) -> Result<Self> {
        Self::new(ctx, digits.iter().map(|&d| FqElement::from_u64(ctx, d)).collect())
    }

    pub fn zero(ctx: &Context, m: usize) -> Self {
        WittVector { ctx: ctx.clone(), coords: vec![FqElement::zero(ctx); m.max(1)] }
    }

    pub fn one(ctx: &Context, m: usize) -> Self {
        Self::teichmuller(&FqElement::one(ctx), m)
    }

    /// [a] = (a, 0, ..., 0).
    pub fn teichmuller(a: &FqElement, m: usize) -> Self {
        let ctx = a.context();
        let mut coords = vec![FqElement::zero(ctx); m.max(1)];
        coords[0] = a.clone();
        WittVector { ctx: ctx.clone(), coords }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[FqElement] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|a| a.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if !self.ctx.same_field(&other.ctx) {
            return Err(Error::ContextMismatch);
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!("Witt lengths {} and {}", self.len(), other.len())));
        }
        Ok(())
    }

    fn work(&self) -> Result<Context> {
        working_context(self.ctx.p(), self.ctx.degree(), self.len())
    }

    /// Image in Z_q / p^m, computed in the working context of precision m.
    fn to_zq(&self, work: &Context) -> Result<PadicScalar> {
        let mut acc = PadicScalar::zero(work);
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let a = FqElement::new(work, a.coeffs())?.frobenius_power(-(i as i64));
            let term = &PadicScalar::p_power(work, i as i64) * &teichmuller(&a);
            acc = &acc + &term;
        }
        Ok(acc)
    }

    fn from_zq(ctx: &Context, m: usize, z: &PadicScalar) -> Result<Self> {
        let work = z.context().clone();
        let p = PadicScalar::p_power(&work, 1);
        let mut rest = z.clone();
        let mut coords = Vec::with_capacity(m);
        for i in 0..m {
            let d = rest.residue()?;
            if i + 1 < m {
                rest = (&rest - &teichmuller(&d)).div(&p)?;
            }
            let a = d.frobenius_power(i as i64);
            coords.push(FqElement::new(ctx, a.coeffs())?);
        }
        Ok(WittVector { ctx: ctx.clone(), coords })
    }

    fn binop(&self, other: &Self, op: impl Fn(&PadicScalar, &PadicScalar) -> PadicScalar) -> Result<Self> {
        self.check(other)?;
        let work = self.work()?;
        let z = op(&self.to_zq(&work)?, &other.to_zq(&work)?);
        Self::from_zq(&self.ctx, self.len(), &z)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.binop(other, |a, b| a * b)
    }

    pub fn neg(&self) -> Result<Self> {
        let work = self.work()?;
        Self::from_zq(&self.ctx, self.len(), &self.to_zq(&work)?.neg())
    }

    /// The integer k embedded in W_m.
    pub fn from_int(ctx: &Context, m: usize, k: i64) -> Result<Self> {
        let work = working_context(ctx.p(), ctx.degree(), m.max(1))?;
        Self::from_zq(ctx, m.max(1), &PadicScalar::from_int(&work, k))
    }

    /// V: (a_0, ..., a_{m-1}) -> (0, a_0, ..., a_{m-2}).
    pub fn verschiebung(&self) -> Self {
        let mut coords = Vec::with_capacity(self.len());
        coords.push(FqElement::zero(&self.ctx));
        coords.extend(self.coords.iter().take(self.len() - 1).cloned());
        WittVector { ctx: self.ctx.clone(), coords }
    }

    /// F: coordinatewise p-th power.
    pub fn frobenius(&self) -> Self {
        WittVector { ctx: self.ctx.clone(), coords: self.coords.iter().map(|a| a.frobenius()).collect() }
    }

    pub fn to_spec(&self) -> WittSpec {
        WittSpec {
            p: self.ctx.p(),
            n: self.ctx.degree(),
            length: self.len(),
            coords: self.coords.iter().map(|a| a.coeffs().to_vec()).collect(),
        }
    }

    pub fn from_spec(spec: &WittSpec) -> Result<Self> {
        if spec.coords.len() != spec.length {
            return Err(Error::validation("coords", format!("expected {} coordinates", spec.length)));
        }
        let ctx = working_context(spec.p, spec.n, spec.length.max(1))?;
        for (i, c) in spec.coords.iter().enumerate() {
            if c.len() > spec.n {
                return Err(Error::validation(format!("coords[{i}]"), "too many residue coefficients"));
            }
            if c.iter().any(|&x| x >= spec.p) {
                return Err(Error::validation(format!("coords[{i}]"), "coefficient not reduced mod p"));
            }
        }
        Self::from_coeffs(&ctx, &spec.coords)
    }
}

/// Image of x in Z_q / p^m inside `ctx` (whose precision must be at least m).
pub fn witt_to_padic(x: &WittVector, ctx: &Context) -> Result<PadicScalar> {
    if !x.ctx.same_field(ctx) {
        return Err(Error::ContextMismatch);
    }
    let m = x.len() as i64;
    if m > ctx.precision() {
        return Err(Error::InvalidArgument(format!(
            "Witt length {m} exceeds the context precision {}",
            ctx.precision()
        )));
    }
    let work = x.work()?;
    let z = x.to_zq(&work)?;
    Ok(z.lift_to(ctx)?.truncate(m))
}

/// Inverse of `witt_to_padic` on integral elements, reading m digits.
pub fn padic_to_witt(z: &PadicScalar, m: usize) -> Result<WittVector> {
    let ctx = z.context();
    if (m as i64) > z.precision() {
        return Err(Error::PrecisionInsufficient(format!("need {m} digits, have {}", z.precision())));
    }
    let work = working_context(ctx.p(), ctx.degree(), m.max(1))?;
    let coeffs = z.integral_coeffs()?;
    let zw = PadicScalar::from_coeffs(&work, &coeffs)?;
    WittVector::from_zq(ctx, m.max(1), &zw)
}
