use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Field;

/// Univariate power series truncated above degree `order`.
#[derive(Debug, Clone)]
pub struct PowerSeries<T: Field> {
    ctx: T::Ctx,
    coeffs: Vec<T>,
}

impl<T: Field> PowerSeries<T> {
    /// Coefficients by degree from 0; entries beyond `order` are dropped, missing ones are 0.
    pub fn new(ctx: &T::Ctx, order: usize, mut coeffs: Vec<T>) -> Self {
        coeffs.resize(order + 1, T::zero(ctx));
        coeffs.truncate(order + 1);
        PowerSeries { ctx: ctx.clone(), coeffs }
    }

    pub fn zero(ctx: &T::Ctx, order: usize) -> Self {
        Self::new(ctx, order, Vec::new())
    }

    pub fn constant(ctx: &T::Ctx, order: usize, c: T) -> Self {
        Self::new(ctx, order, vec![c])
    }

    /// The series t.
    pub fn variable(ctx: &T::Ctx, order: usize) -> Self {
        Self::new(ctx, order, vec![T::zero(ctx), T::one(ctx)])
    }

    pub fn ctx(&self) -> &T::Ctx {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(|| T::zero(&self.ctx))
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::new(&self.ctx, order, self.coeffs.clone())
    }

    fn common(&self, o: &Self) -> usize {
        self.order().min(o.order())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.common(o);
        Self::new(&self.ctx, n, (0..=n).map(|k| self.coeffs[k].add(&o.coeffs[k])).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.common(o);
        Self::new(&self.ctx, n, (0..=n).map(|k| self.coeffs[k].sub(&o.coeffs[k])).collect())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(&self.ctx, self.order(), self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(&self.ctx, self.order(), self.coeffs.iter().map(|x| x.neg()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.common(o);
        let mut out = vec![T::zero(&self.ctx); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_zero() {
                    out[i + j] = out[i + j].add(&a.mul(b));
                }
            }
        }
        Self::new(&self.ctx, n, out)
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0].inv().ok_or_else(|| Error::NotInvertible("constant term of the series".into()))?;
        let n = self.order();
        let mut out: Vec<T> = Vec::with_capacity(n + 1);
        out.push(c0.clone());
        for k in 1..=n {
            let mut s = T::zero(&self.ctx);
            for j in 1..=k {
                s = s.add(&self.coeffs[j].mul(&out[k - j]));
            }
            out.push(s.neg().mul(&c0));
        }
        Ok(Self::new(&self.ctx, n, out))
    }

    /// self(inner), inner without constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("inner series must have no constant term".into()));
        }
        let n = self.common(inner);
        let inner = inner.truncate(n);
        let mut acc = Self::constant(&self.ctx, n, self.coeffs[n].clone());
        for k in (0..n).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].add(&self.coeffs[k]);
        }
        Ok(acc)
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let c: Vec<T> = (1..=n).map(|k| self.coeffs[k].mul(&T::from_i64(&self.ctx, k as i64))).collect();
        // the top coefficient is unknown after differentiation
        Self::new(&self.ctx, n.saturating_sub(1), c)
    }

    /// Antiderivative with zero constant term, one degree longer.
    pub fn integral(&self) -> Result<Self> {
        let n = self.order();
        let mut c = vec![T::zero(&self.ctx)];
        for k in 0..=n {
            let d = T::from_i64(&self.ctx, k as i64 + 1);
            c.push(
                self.coeffs[k]
                    .div(&d)
                    .ok_or_else(|| Error::NotInvertible(format!("{} in the coefficient ring", k + 1)))?,
            );
        }
        Ok(Self::new(&self.ctx, n + 1, c))
    }

    /// Compositional inverse of a series t*u + ..., u invertible.
    pub fn reverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::InvalidArgument("series to invert must have no constant term".into()));
        }
        let n = self.order();
        let u = self
            .coeffs
            .get(1)
            .and_then(|c| c.inv())
            .ok_or_else(|| Error::NotInvertible("linear coefficient of the series".into()))?;
        // Newton-free fixed point: g <- g - (f(g) - t) / f'(0), one degree per round
        let t = Self::variable(&self.ctx, n);
        let mut g = t.scale(&u);
        for _ in 1..n {
            let err = self.compose(&g)?.sub(&t);
            g = g.sub(&err.scale(&u));
        }
        Ok(g)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Equal to the common order.
    pub fn agrees_with(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    pub fn map<U: Field>(&self, ctx: &U::Ctx, f: impl Fn(&T) -> U) -> PowerSeries<U> {
        PowerSeries::new(ctx, self.order(), self.coeffs.iter().map(f).collect())
    }

    /// `{ "<degree>": "coefficient" }` for the nonzero coefficients.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k.to_string(), c.to_string()))
            .collect()
    }
}

/// Bivariate series, truncated above total degree `order`; c[i][j] is the
/// coefficient of x^i y^j.
#[derive(Debug, Clone)]
pub struct Bivariate<T: Field> {
    ctx: T::Ctx,
    order: usize,
    c: Vec<Vec<T>>,
}

impl<T: Field> Bivariate<T> {
    pub fn zero(ctx: &T::Ctx, order: usize) -> Self {
        let c = (0..=order).map(|i| vec![T::zero(ctx); order + 1 - i]).collect();
        Bivariate { ctx: ctx.clone(), order, c }
    }

    pub fn from_terms(ctx: &T::Ctx, order: usize, terms: impl IntoIterator<Item = ((usize, usize), T)>) -> Self {
        let mut b = Self::zero(ctx, order);
        for ((i, j), v) in terms {
            if i + j <= order {
                b.c[i][j] = b.c[i][j].add(&v);
            }
        }
        b
    }

    pub fn x(ctx: &T::Ctx, order: usize) -> Self {
        Self::from_terms(ctx, order, [((1, 0), T::one(ctx))])
    }

    pub fn y(ctx: &T::Ctx, order: usize) -> Self {
        Self::from_terms(ctx, order, [((0, 1), T::one(ctx))])
    }

    pub fn constant(ctx: &T::Ctx, order: usize, v: T) -> Self {
        Self::from_terms(ctx, order, [((0, 0), v)])
    }

    pub fn ctx(&self) -> &T::Ctx {
        &self.ctx
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i + j <= self.order {
            self.c[i][j].clone()
        } else {
            T::zero(&self.ctx)
        }
    }

    /// Nonzero terms ((i, j), c).
    pub fn terms(&self) -> Vec<((usize, usize), T)> {
        let mut out = Vec::new();
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    out.push(((i, j), v.clone()));
                }
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_terms(&self.ctx, order, self.terms())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        Self::from_terms(&self.ctx, n, self.terms().into_iter().chain(o.terms()))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&T::one(&self.ctx).neg())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_terms(&self.ctx, self.order, self.terms().into_iter().map(|(k, v)| (k, v.mul(s))))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order.min(o.order);
        let mut out = Self::zero(&self.ctx, n);
        let a = self.terms();
        let b = o.terms();
        for ((i1, j1), u) in &a {
            for ((i2, j2), v) in &b {
                let (i, j) = (i1 + i2, j1 + j2);
                if i + j <= n {
                    out.c[i][j] = out.c[i][j].add(&u.mul(v));
                }
            }
        }
        out
    }

    pub fn inverse(&self) -> Result<Self> {
        let c0 =
            self.c[0][0].inv().ok_or_else(|| Error::NotInvertible("constant term of the bivariate series".into()))?;
        // 1/(c0 (1 + h)) = c0^{-1} sum (-h)^k
        let h = self.scale(&c0).sub(&Self::constant(&self.ctx, self.order, T::one(&self.ctx)));
        let mh = h.neg();
        let mut acc = Self::constant(&self.ctx, self.order, T::one(&self.ctx));
        for _ in 0..self.order {
            acc = Self::constant(&self.ctx, self.order, T::one(&self.ctx)).add(&mh.mul(&acc));
        }
        Ok(acc.scale(&c0))
    }

    /// f(self) for a univariate f; self must have no constant term.
    pub fn substitute_into(&self, f: &PowerSeries<T>) -> Result<Self> {
        if !self.c[0][0].is_zero() {
            return Err(Error::InvalidArgument("inner series must have no constant term".into()));
        }
        let n = self.order.min(f.order());
        let inner = self.truncate(n);
        let mut acc = Self::constant(&self.ctx, n, f.coeff(n));
        for k in (0..n).rev() {
            acc = acc.mul(&inner);
            acc.c[0][0] = acc.c[0][0].add(&f.coeff(k));
        }
        Ok(acc)
    }

    /// Exchange x and y.
    pub fn swap(&self) -> Self {
        Self::from_terms(&self.ctx, self.order, self.terms().into_iter().map(|((i, j), v)| ((j, i), v)))
    }

    /// Coefficient series of x^i as a series in y.
    pub fn x_slice(&self, i: usize) -> PowerSeries<T> {
        let n = self.order.saturating_sub(i);
        PowerSeries::new(&self.ctx, n, (0..=n).map(|j| self.get(i, j)).collect())
    }

    /// self(a(t), b(t)).
    pub fn eval(&self, a: &PowerSeries<T>, b: &PowerSeries<T>) -> Result<PowerSeries<T>> {
        if !a.coeff(0).is_zero() || !b.coeff(0).is_zero() {
            return Err(Error::InvalidArgument("substituted series must have no constant term".into()));
        }
        let n = self.order.min(a.order()).min(b.order());
        let (a, b) = (a.truncate(n), b.truncate(n));
        // x^i slices padded to order n: the missing terms are hidden by a^i
        let slice = |i: usize| PowerSeries::new(&self.ctx, n, self.x_slice(i).coeffs().to_vec()).compose(&b);
        let mut acc = slice(n)?;
        for i in (0..n).rev() {
            acc = acc.mul(&a).add(&slice(i)?);
        }
        Ok(acc)
    }

    pub fn agrees_with(&self, o: &Self) -> bool {
        self.sub(o).terms().is_empty()
    }

    pub fn map<U: Field>(&self, ctx: &U::Ctx, f: impl Fn(&T) -> U) -> Bivariate<U> {
        Bivariate::from_terms(ctx, self.order, self.terms().into_iter().map(|(k, v)| (k, f(&v))))
    }
}
