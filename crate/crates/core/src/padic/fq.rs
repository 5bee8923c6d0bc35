use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::context::Context;
use crate::error::{Error, Result};

/// Element of the residue field F_q, coefficients in the basis 1, g, ..., g^{n-1}.
#[derive(Clone)]
pub struct FqElement {
    ctx: Context,
    coeffs: Vec<u64>,
}

impl fmt::Debug for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq{:?}", self.coeffs)
    }
}

impl PartialEq for FqElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_field(&other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for FqElement {}

impl FqElement {
    pub fn new(ctx: &Context, coeffs: &[u64]) -> Result<Self> {
        if coeffs.len() > ctx.degree() {
            return Err(Error::DimensionMismatch(format!(
                "residue element has {} coefficients, field degree is {}",
                coeffs.len(),
                ctx.degree()
            )));
        }
        let p = ctx.p();
        let coeffs = ctx.fq_pad(coeffs.iter().map(|c| c % p).collect());
        Ok(FqElement { ctx: Arc::clone(ctx), coeffs })
    }

    pub fn zero(ctx: &Context) -> Self {
        FqElement { ctx: Arc::clone(ctx), coeffs: vec![0; ctx.degree()] }
    }

    pub fn one(ctx: &Context) -> Self {
        Self::from_u64(ctx, 1)
    }

    pub fn from_u64(ctx: &Context, a: u64) -> Self {
        let mut coeffs = vec![0; ctx.degree()];
        coeffs[0] = a % ctx.p();
        FqElement { ctx: Arc::clone(ctx), coeffs }
    }

    pub fn random<R: Rng + ?Sized>(ctx: &Context, rng: &mut R) -> Self {
        let p = ctx.p();
        let coeffs = (0..ctx.degree()).map(|_| rng.gen_range(0..p)).collect();
        FqElement { ctx: Arc::clone(ctx), coeffs }
    }

    /// All q elements, ordered by their coefficient vectors read as base-p integers.
    pub fn enumerate(ctx: &Context) -> Vec<FqElement> {
        let p = ctx.p();
        let n = ctx.degree();
        (0..ctx.residue_cardinality())
            .map(|mut k| {
                let coeffs = (0..n)
                    .map(|_| {
                        let c = (k % p as u128) as u64;
                        k /= p as u128;
                        c
                    })
                    .collect();
                FqElement { ctx: Arc::clone(ctx), coeffs }
            })
            .collect()
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx.same_field(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let p = self.ctx.p();
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % p).collect();
        Ok(FqElement { ctx: Arc::clone(&self.ctx), coeffs })
    }

    pub fn neg(&self) -> Self {
        let p = self.ctx.p();
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FqElement { ctx: Arc::clone(&self.ctx), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FqElement { ctx: Arc::clone(&self.ctx), coeffs: self.ctx.fq_mul(&self.coeffs, &other.coeffs) })
    }

    pub fn inv(&self) -> Result<Self> {
        let coeffs =
            self.ctx.fq_inv(&self.coeffs).ok_or_else(|| Error::NotInvertible("zero in the residue field".into()))?;
        Ok(FqElement { ctx: Arc::clone(&self.ctx), coeffs })
    }

    pub fn pow(&self, e: u128) -> Self {
        FqElement { ctx: Arc::clone(&self.ctx), coeffs: self.ctx.fq_pow(&self.coeffs, e) }
    }

    /// The absolute Frobenius a -> a^p.
    pub fn frobenius(&self) -> Self {
        self.pow(self.ctx.p() as u128)
    }

    /// a^{p^k} for any integer k; negative k inverts the Frobenius.
    pub fn frobenius_power(&self, k: i64) -> Self {
        let n = self.ctx.degree() as i64;
        let e = k.rem_euclid(n);
        let mut out = self.clone();
        for _ in 0..e {
            out = out.frobenius();
        }
        out
    }
}

impl fmt::Display for FqElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| match j {
                0 => format!("{c}"),
                1 => format!("{c}*g"),
                _ => format!("{c}*g^{j}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn multiplicative_group_order() {
        let ctx = make_context(3, 2, 4).unwrap();
        for a in FqElement::enumerate(&ctx) {
            if a.is_zero() {
                continue;
            }
            assert_eq!(a.pow(8), FqElement::one(&ctx));
            assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), FqElement::one(&ctx));
        }
    }

    #[test]
    fn frobenius_power_inverts() {
        let ctx = make_context(2, 3, 4).unwrap();
        for a in FqElement::enumerate(&ctx) {
            assert_eq!(a.frobenius_power(-1).frobenius(), a);
            assert_eq!(a.frobenius_power(3), a);
        }
    }
}
