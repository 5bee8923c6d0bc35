use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::fp_poly::{self, FpPoly};
use crate::error::{Error, Result};

/// Shared handle to an unramified context.
pub type Context = Arc<UnramifiedContext>;

/// Z_q / p^N presented as Z_p[g] / (f(g)) with f the lexicographically first
/// monic irreducible polynomial of degree n over F_p.
pub struct UnramifiedContext {
    p: u64,
    n: usize,
    precision: i64,
    prime: BigInt,
    modulus: FpPoly,
    frobenius_image: Vec<BigInt>,
    // column j holds sigma(g^j)
    frobenius_columns: Vec<Vec<BigInt>>,
    powers: Vec<BigInt>,
}

impl fmt::Debug for UnramifiedContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnramifiedContext")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("precision", &self.precision)
            .field("modulus", &self.modulus)
            .finish()
    }
}

/// Serialized form of a context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub p: u64,
    pub n: usize,
    pub precision: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

/// Builds the context for Q_q with q = p^n at absolute precision N.
pub fn make_context(p: u64, n: usize, precision: u32) -> Result<Context> {
    if !fp_poly::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("residue degree must be at least 1".into()));
    }
    if precision == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let modulus = fp_poly::first_irreducible(p, n)
        .ok_or_else(|| Error::InvalidArgument(format!("no irreducible polynomial of degree {n} found over F_{p}")))?;
    let prime = BigInt::from(p);
    let precision = precision as i64;
    let powers = (0..=(2 * precision + 2) as usize).map(|k| Pow::pow(&prime, k)).collect();
    let mut ctx = UnramifiedContext {
        p,
        n,
        precision,
        prime,
        modulus,
        frobenius_image: Vec::new(),
        frobenius_columns: Vec::new(),
        powers,
    };
    ctx.frobenius_image = ctx.lift_frobenius();
    ctx.frobenius_columns = ctx.frobenius_power_columns();
    Ok(Arc::new(ctx))
}

impl UnramifiedContext {
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Residue degree n.
    pub fn degree(&self) -> usize {
        self.n
    }

    /// Absolute precision N.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// q = p^n.
    pub fn residue_cardinality(&self) -> u128 {
        (self.p as u128).pow(self.n as u32)
    }

    pub fn prime(&self) -> &BigInt {
        &self.prime
    }

    /// Monic modulus, coefficients low degree first (length n + 1).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// sigma(g) as a coefficient vector modulo p^N.
    pub fn frobenius_image(&self) -> &[BigInt] {
        &self.frobenius_image
    }

    pub fn spec(&self) -> ContextSpec {
        ContextSpec { p: self.p, n: self.n, precision: self.precision as u32, modulus: Some(self.modulus.clone()) }
    }

    /// Same field at a different precision.
    pub fn with_precision(&self, precision: u32) -> Result<Context> {
        make_context(self.p, self.n, precision)
    }

    /// The degree-1 subfield Q_p at the same precision.
    pub fn prime_field(&self) -> Result<Context> {
        make_context(self.p, 1, self.precision as u32)
    }

    /// Two contexts describe the same field (precision may differ).
    pub fn same_field(&self, other: &UnramifiedContext) -> bool {
        self.p == other.p && self.n == other.n
    }

    pub(crate) fn pow_p(&self, k: i64) -> BigInt {
        debug_assert!(k >= 0);
        match self.powers.get(k as usize) {
            Some(x) => x.clone(),
            None => Pow::pow(&self.prime, k as u64),
        }
    }

    pub(crate) fn reduce(&self, v: &mut [BigInt], k: i64) {
        let m = self.pow_p(k.max(0));
        for c in v.iter_mut() {
            *c = c.mod_floor(&m);
        }
    }

    /// Smallest p-adic valuation of the coefficients; None if all vanish.
    pub(crate) fn vec_valuation(&self, v: &[BigInt]) -> Option<i64> {
        v.iter().filter(|c| !c.is_zero()).map(|c| self.int_valuation(c)).min()
    }

    pub(crate) fn int_valuation(&self, c: &BigInt) -> i64 {
        debug_assert!(!c.is_zero());
        let mut c = c.abs();
        let mut v = 0;
        loop {
            let (q, r) = c.div_rem(&self.prime);
            if !r.is_zero() {
                return v;
            }
            c = q;
            v += 1;
        }
    }

    /// Product in Z_q / p^k of coefficient vectors.
    pub(crate) fn mul_raw(&self, a: &[BigInt], b: &[BigInt], k: i64) -> Vec<BigInt> {
        let n = self.n;
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        self.reduce_poly(prod, k)
    }

    /// Reduces an arbitrary-length coefficient vector modulo (f, p^k).
    pub(crate) fn reduce_poly(&self, mut prod: Vec<BigInt>, k: i64) -> Vec<BigInt> {
        let n = self.n;
        let m = self.pow_p(k.max(0));
        for c in prod.iter_mut() {
            *c = c.mod_floor(&m);
        }
        for deg in (n..prod.len()).rev() {
            let c = std::mem::take(&mut prod[deg]);
            if c.is_zero() {
                continue;
            }
            for j in 0..n {
                let mj = self.modulus[j];
                if mj != 0 {
                    prod[deg - n + j] -= &c * mj;
                }
            }
        }
        prod.truncate(n);
        prod.resize(n, BigInt::zero());
        for c in prod.iter_mut() {
            *c = c.mod_floor(&m);
        }
        prod
    }

    /// Inverse of a unit of Z_q / p^k: invert mod p, then Newton-lift.
    pub(crate) fn inv_raw(&self, a: &[BigInt], k: i64) -> Option<Vec<BigInt>> {
        let residue: Vec<u64> = a.iter().map(|c| c.mod_floor(&self.prime).try_into().unwrap()).collect();
        let inv0 = self.fq_inv(&residue)?;
        let mut x: Vec<BigInt> = inv0.into_iter().map(BigInt::from).collect();
        let two = {
            let mut t = vec![BigInt::zero(); self.n];
            t[0] = BigInt::from(2);
            t
        };
        let mut prec = 1;
        while prec < k {
            prec = (2 * prec).min(k);
            let ax = self.mul_raw(a, &x, prec);
            let corr: Vec<BigInt> = two.iter().zip(&ax).map(|(t, y)| t - y).collect();
            x = self.mul_raw(&x, &corr, prec);
        }
        self.reduce(&mut x, k);
        Some(x)
    }

    pub(crate) fn pow_raw(&self, a: &[BigInt], mut e: u128, k: i64) -> Vec<BigInt> {
        let mut acc = self.one_raw();
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base, k);
            }
            base = self.mul_raw(&base, &base, k);
            e >>= 1;
        }
        self.reduce(&mut acc, k);
        acc
    }

    pub(crate) fn one_raw(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.n];
        v[0] = BigInt::one();
        v
    }

    /// sigma applied to a coefficient vector, modulo p^k (k <= N).
    pub(crate) fn frobenius_raw(&self, a: &[BigInt], k: i64) -> Vec<BigInt> {
        if self.n == 1 {
            let mut v = a.to_vec();
            self.reduce(&mut v, k);
            return v;
        }
        let mut out = vec![BigInt::zero(); self.n];
        for (j, aj) in a.iter().enumerate() {
            if aj.is_zero() {
                continue;
            }
            for (i, col) in self.frobenius_columns[j].iter().enumerate() {
                out[i] += aj * col;
            }
        }
        self.reduce(&mut out, k);
        out
    }

    // ----- residue field F_q = F_p[g]/(f) -----

    pub(crate) fn fq_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let prod = fp_poly::mul(a, b, self.p);
        self.fq_pad(fp_poly::rem(&prod, &self.modulus, self.p))
    }

    pub(crate) fn fq_inv(&self, a: &[u64]) -> Option<Vec<u64>> {
        let a = fp_poly::trim(a.to_vec());
        if a.is_empty() {
            return None;
        }
        let (g, s, _) = fp_poly::xgcd(&a, &self.modulus, self.p);
        if fp_poly::degree(&g) != Some(0) {
            return None;
        }
        Some(self.fq_pad(fp_poly::rem(&s, &self.modulus, self.p)))
    }

    pub(crate) fn fq_pow(&self, a: &[u64], e: u128) -> Vec<u64> {
        if self.n == 1 {
            let base = a.first().copied().unwrap_or(0);
            return vec![fp_poly::pow_mod_p(base, (e % (u64::MAX as u128)) as u64, self.p)];
        }
        self.fq_pad(fp_poly::pow_mod(a, e, &self.modulus, self.p))
    }

    pub(crate) fn fq_pad(&self, mut v: Vec<u64>) -> Vec<u64> {
        v.resize(self.n, 0);
        v
    }

    // ----- construction helpers -----

    fn lift_frobenius(&self) -> Vec<BigInt> {
        let k = self.precision;
        if self.n == 1 {
            return vec![BigInt::zero()];
        }
        // start from g^p and Newton-iterate s <- s - f(s)/f'(s)
        let mut g = vec![BigInt::zero(); self.n];
        g[1] = BigInt::one();
        let mut s = self.pow_raw(&g, self.p as u128, k);
        let full_f: Vec<BigInt> = self.modulus.iter().map(|&c| BigInt::from(c)).collect();
        let full_df: Vec<BigInt> =
            (1..self.modulus.len()).map(|i| BigInt::from(self.modulus[i]) * BigInt::from(i as u64)).collect();
        let mut prec = 1;
        loop {
            prec = (2 * prec).min(k);
            let fs = self.eval_poly_raw(&full_f, &s, prec);
            let dfs = self.eval_poly_raw(&full_df, &s, prec);
            let inv = self.inv_raw(&dfs, prec).expect("modulus is separable modulo p");
            let step = self.mul_raw(&fs, &inv, prec);
            for (si, di) in s.iter_mut().zip(step) {
                *si -= di;
            }
            self.reduce(&mut s, prec);
            if prec >= k {
                break;
            }
        }
        s
    }

    fn eval_poly_raw(&self, coeffs: &[BigInt], x: &[BigInt], k: i64) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.n];
        for c in coeffs.iter().rev() {
            acc = self.mul_raw(&acc, x, k);
            acc[0] += c;
        }
        self.reduce(&mut acc, k);
        acc
    }

    fn frobenius_power_columns(&self) -> Vec<Vec<BigInt>> {
        let k = self.precision;
        let mut cols = Vec::with_capacity(self.n);
        let mut cur = self.one_raw();
        for _ in 0..self.n {
            cols.push(cur.clone());
            cur = self.mul_raw(&cur, &self.frobenius_image, k);
        }
        cols
    }
}
