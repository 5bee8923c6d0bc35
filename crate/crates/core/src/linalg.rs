//! Dense matrices over exact rationals or p-adic scalars.
//!
//! Elimination picks, within each column, the entry with the smallest
//! pivot score (p-adic valuation for p-adic entries, first nonzero for
//! rationals), breaking ties by the lowest row.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{Context, PadicScalar};

/// Field-like scalar usable in the generic linear algebra.
pub trait Field: Clone + fmt::Debug + fmt::Display + Send + Sync {
    type Ctx: Clone + fmt::Debug + Send + Sync;

    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    /// Smaller is a better pivot; None for zero.
    fn pivot_score(&self) -> Option<i64>;

    fn from_i64(ctx: &Self::Ctx, a: i64) -> Self {
        Self::from_rational(ctx, &BigRational::from_integer(BigInt::from(a)))
    }

    fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }
}

impl Field for BigRational {
    type Ctx = ();

    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn from_rational(_: &(), q: &BigRational) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pivot_score(&self) -> Option<i64> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(0)
        }
    }
}

impl Field for PadicScalar {
    type Ctx = Context;

    fn zero(ctx: &Context) -> Self {
        PadicScalar::zero(ctx)
    }
    fn one(ctx: &Context) -> Self {
        PadicScalar::one(ctx)
    }
    fn from_rational(ctx: &Context, q: &BigRational) -> Self {
        PadicScalar::from_rational(ctx, q)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        PadicScalar::neg(self)
    }
    fn inv(&self) -> Option<Self> {
        PadicScalar::inv(self).ok()
    }
    fn is_zero(&self) -> bool {
        PadicScalar::is_zero(self)
    }
    fn pivot_score(&self) -> Option<i64> {
        self.valuation()
    }
}

/// Row-major dense matrix carrying the scalar context.
#[derive(Clone)]
pub struct Matrix<T: Field> {
    ctx: T::Ctx,
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon<T: Field> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

impl<T: Field> Matrix<T> {
    pub fn from_rows(ctx: &T::Ctx, rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { ctx: ctx.clone(), rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix with the given shape; `rows` may be empty when the shape has a zero side.
    pub fn from_rows_shaped(ctx: &T::Ctx, nrows: usize, ncols: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.len() != nrows || rows.iter().any(|x| x.len() != ncols) {
            return Err(Error::DimensionMismatch(format!("expected a {nrows}x{ncols} matrix")));
        }
        Ok(Matrix { ctx: ctx.clone(), rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(ctx: &T::Ctx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { ctx: ctx.clone(), rows, cols, data }
    }

    pub fn zeros(ctx: &T::Ctx, rows: usize, cols: usize) -> Self {
        Self::from_fn(ctx, rows, cols, |_, _| T::zero(ctx))
    }

    pub fn identity(ctx: &T::Ctx, n: usize) -> Self {
        Self::from_fn(ctx, n, n, |i, j| if i == j { T::one(ctx) } else { T::zero(ctx) })
    }

    pub fn diagonal(ctx: &T::Ctx, diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(ctx, n, n, |i, j| if i == j { diag[i].clone() } else { T::zero(ctx) })
    }

    /// Matrix whose columns are the given vectors of length `n`.
    pub fn from_columns(ctx: &T::Ctx, n: usize, cols: &[Vec<T>]) -> Self {
        Self::from_fn(ctx, n, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn ctx(&self) -> &T::Ctx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Field>(&self, ctx: &U::Ctx, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { ctx: ctx.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn map_same(&self, f: impl Fn(&T) -> T) -> Self {
        Matrix { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.ctx, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(&self.ctx, self.rows, other.cols, |i, j| {
            let mut acc = T::zero(&self.ctx);
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix-vector length".into()));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(&self.ctx), |acc, (a, b)| acc.add(&a.mul(b))))
            .collect())
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("shapes differ".into()));
        }
        Ok(Matrix {
            ctx: self.ctx.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub(b))
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map_same(|a| a.mul(s))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(&self.ctx, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn kronecker(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(&self.ctx, self.rows * r2, self.cols * c2, |i, j| {
            self.get(i / r2, j / c2).mul(other.get(i % r2, j % c2))
        })
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let (r1, c1) = (self.rows, self.cols);
        Self::from_fn(&self.ctx, r1 + other.rows, c1 + other.cols, |i, j| {
            if i < r1 && j < c1 {
                self.get(i, j).clone()
            } else if i >= r1 && j >= c1 {
                other.get(i - r1, j - c1).clone()
            } else {
                T::zero(&self.ctx)
            }
        })
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let c1 = self.cols;
        Ok(Self::from_fn(&self.ctx, self.rows, c1 + other.cols, |i, j| {
            if j < c1 {
                self.get(i, j).clone()
            } else {
                other.get(i, j - c1).clone()
            }
        }))
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let r1 = self.rows;
        Ok(Self::from_fn(&self.ctx, r1 + other.rows, self.cols, |i, j| {
            if i < r1 {
                self.get(i, j).clone()
            } else {
                other.get(i - r1, j).clone()
            }
        }))
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.ctx, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.ctx, idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> Echelon<T> {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<(usize, i64)> = None;
            for i in r..m.rows {
                if let Some(s) = m.get(i, c).pivot_score() {
                    if best.is_none_or(|(_, bs)| s < bs) {
                        best = Some((i, s));
                    }
                }
            }
            let Some((pr, _)) = best else { continue };
            m.swap_rows(r, pr);
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            m.set(r, c, T::one(&m.ctx));
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    m.set(i, c, T::zero(&m.ctx));
                    continue;
                }
                for j in 0..m.cols {
                    let v = m.get(i, j).sub(&f.mul(m.get(r, j)));
                    m.set(i, j, v);
                }
                m.set(i, c, T::zero(&m.ctx));
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let ech = self.rref();
        let n = self.cols;
        let free: Vec<usize> = (0..n).filter(|c| !ech.pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(&self.ctx); n];
                v[f] = T::one(&self.ctx);
                for (row, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = ech.matrix.get(row, f).neg();
                }
                v
            })
            .collect()
    }

    /// Basis of the column space drawn from the original columns.
    pub fn column_basis(&self) -> Vec<usize> {
        self.rref().pivots
    }

    /// Some X with self * X = rhs, or None when inconsistent.
    pub fn solve(&self, rhs: &Self) -> Result<Option<Self>> {
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch("solve: row counts differ".into()));
        }
        let aug = self.hstack(rhs)?;
        let ech = aug.rref();
        if ech.pivots.iter().any(|&c| c >= self.cols) {
            return Ok(None);
        }
        let mut x = Self::zeros(&self.ctx, self.cols, rhs.cols);
        for (row, &pc) in ech.pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, ech.matrix.get(row, self.cols + j).clone());
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        match self.solve(&Self::identity(&self.ctx, n))? {
            Some(x) if self.rank() == n => Ok(x),
            _ => Err(Error::NotInvertible("singular matrix".into())),
        }
    }

    /// Determinant by elimination.
    pub fn det(&self) -> Result<T> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let n = m.rows;
        let mut det = T::one(&m.ctx);
        for c in 0..n {
            let mut best: Option<(usize, i64)> = None;
            for i in c..n {
                if let Some(s) = m.get(i, c).pivot_score() {
                    if best.is_none_or(|(_, bs)| s < bs) {
                        best = Some((i, s));
                    }
                }
            }
            let Some((pr, _)) = best else {
                return Ok(T::zero(&m.ctx));
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            let inv = piv.inv().expect("pivot is nonzero");
            for i in c + 1..n {
                let f = m.get(i, c).mul(&inv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        Ok(det)
    }

    /// Characteristic polynomial det(x I - M) by Berkowitz's division-free
    /// recursion; coefficients leading first, monic.
    pub fn charpoly(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("characteristic polynomial of a non-square matrix".into()));
        }
        let ctx = &self.ctx;
        let mut prev = vec![T::one(ctx)];
        for k in 0..self.rows {
            let a = self.get(k, k).clone();
            let col: Vec<T> = (0..k).map(|i| self.get(i, k).clone()).collect();
            let row: Vec<T> = (0..k).map(|j| self.get(k, j).clone()).collect();
            let mut t = vec![T::one(ctx), a.neg()];
            let mut v = col;
            for _ in 0..k {
                let rv = row.iter().zip(&v).fold(T::zero(ctx), |acc, (x, y)| acc.add(&x.mul(y)));
                t.push(rv.neg());
                v = (0..k).map(|i| (0..k).fold(T::zero(ctx), |acc, j| acc.add(&self.get(i, j).mul(&v[j])))).collect();
            }
            let next: Vec<T> = (0..k + 2)
                .map(|i| (0..=i.min(k)).fold(T::zero(ctx), |acc, j| acc.add(&t[i - j].mul(&prev[j]))))
                .collect();
            prev = next;
        }
        Ok(prev)
    }
}

/// Rational helpers.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_matrix(rows: &[Vec<i64>]) -> Matrix<BigRational> {
    let r: Vec<Vec<BigRational>> =
        rows.iter().map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let cols = r.first().map_or(0, |x| x.len());
    Matrix::from_rows_shaped(&(), r.len(), cols, r).expect("rectangular input")
}

/// Lowest-terms display for rationals, "a" or "a/b".
pub fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else if q.is_negative() {
        format!("-{}/{}", q.numer().abs(), q.denom())
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
