//! Isocrystals over K_0 = Q_q: a vector space with a bijective
//! sigma-semilinear Frobenius F(v) = A sigma(v).

mod hensel;
mod newton;

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::padic::{context_from_spec, parse_scalar, Context, ContextSpec, PadicScalar, Rational};

pub use newton::{dieudonne_dual_slopes, fmt_q, newton_polygon_of_poly, NewtonPolygon, SlopeData, SlopeTriples};

/// Largest supported dimension.
pub const MAX_DIM: usize = 64;

pub type PMatrix = Matrix<PadicScalar>;

#[derive(Clone)]
pub struct Isocrystal {
    ctx: Context,
    matrix: PMatrix,
}

impl fmt::Debug for Isocrystal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Isocrystal(dim {}) {:?}", self.dim(), self.matrix)
    }
}

/// JSON input for an isocrystal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsocrystalSpec {
    pub p: u64,
    pub n: usize,
    pub precision: u32,
    pub dim: usize,
    pub frobenius: Vec<Vec<String>>,
}

fn parse_frobenius(ctx: &Context, spec: &IsocrystalSpec) -> Result<Vec<Vec<PadicScalar>>> {
    let mut rows = Vec::with_capacity(spec.dim);
    for (i, r) in spec.frobenius.iter().enumerate() {
        if r.len() != spec.dim {
            return Err(Error::validation(format!("frobenius[{i}]"), format!("expected {} entries", spec.dim)));
        }
        let row = r
            .iter()
            .enumerate()
            .map(|(j, s)| {
                parse_scalar(ctx, s).map_err(|e| Error::validation(format!("frobenius[{i}][{j}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// One summand N(alpha) of the isoclinic decomposition.
#[derive(Debug, Clone)]
pub struct IsoclinicSummand {
    pub slope: Rational,
    /// Columns span N(alpha) inside the ambient space.
    pub basis: PMatrix,
    /// Frobenius of N(alpha) in that basis.
    pub isocrystal: Isocrystal,
}

fn ctx_of(m: &PMatrix) -> &Context {
    m.ctx()
}

/// Entrywise sigma.
pub fn sigma_matrix(m: &PMatrix) -> PMatrix {
    m.map_same(|x| x.frobenius())
}

pub fn sigma_power_matrix(m: &PMatrix, k: i64) -> PMatrix {
    m.map_same(|x| x.frobenius_power(k))
}

/// Lifts every entry into `ctx` (same field, representatives kept).
pub fn lift_matrix(m: &PMatrix, ctx: &Context) -> Result<PMatrix> {
    let rows = m
        .to_rows()
        .into_iter()
        .map(|r| r.iter().map(|x| x.lift_to(ctx)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows_shaped(ctx, m.rows(), m.cols(), rows)
}

fn max_abs_valuation(m: &PMatrix) -> i64 {
    m.to_rows().iter().flatten().filter_map(|x| x.valuation()).map(i64::abs).max().unwrap_or(0)
}

impl Isocrystal {
    /// Validates shape and invertibility of the Frobenius matrix.
    pub fn new(matrix: PMatrix) -> Result<Self> {
        let ctx = ctx_of(&matrix).clone();
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("Frobenius matrix must be square".into()));
        }
        if matrix.rows() > MAX_DIM {
            return Err(Error::validation("dim", format!("dimension above {MAX_DIM}")));
        }
        if matrix.rows() > 0 && matrix.det()?.is_zero() {
            return Err(Error::NotInvertible("Frobenius matrix has determinant zero to precision".into()));
        }
        Ok(Isocrystal { ctx, matrix })
    }

    pub fn from_rows(ctx: &Context, rows: Vec<Vec<PadicScalar>>) -> Result<Self> {
        let d = rows.len();
        Self::new(Matrix::from_rows_shaped(ctx, d, d, rows)?)
    }

    /// Diagonal Frobenius diag(p^k_1, ...)·sigma.
    pub fn diagonal_powers(ctx: &Context, exps: &[i64]) -> Result<Self> {
        let diag: Vec<PadicScalar> = exps.iter().map(|&k| PadicScalar::p_power(ctx, k)).collect();
        Self::new(Matrix::diagonal(ctx, &diag))
    }

    pub fn zero_dimensional(ctx: &Context) -> Self {
        Isocrystal { ctx: ctx.clone(), matrix: Matrix::zeros(ctx, 0, 0) }
    }

    pub fn from_spec(spec: &IsocrystalSpec) -> Result<Self> {
        let ctx = context_from_spec(&ContextSpec { p: spec.p, n: spec.n, precision: spec.precision, modulus: None })?;
        if spec.frobenius.len() != spec.dim {
            return Err(Error::validation("frobenius", format!("expected {} rows", spec.dim)));
        }
        match Self::from_rows(&ctx, parse_frobenius(&ctx, spec)?) {
            Err(Error::NotInvertible(_)) => {
                // entries are exact expressions: reread them more finely to tell
                // a singular matrix from one whose determinant is merely small
                let fine = ctx.with_precision(spec.precision.saturating_mul(4).max(64))?;
                let det = Matrix::from_rows_shaped(&fine, spec.dim, spec.dim, parse_frobenius(&fine, spec)?)?.det()?;
                if det.is_zero() {
                    Err(Error::validation("frobenius", "Frobenius matrix is singular"))
                } else {
                    Err(Error::PrecisionInsufficient(format!(
                        "determinant has valuation {} but precision is {}",
                        det.valuation_bound(),
                        spec.precision
                    )))
                }
            }
            other => other,
        }
    }

    pub fn to_spec(&self) -> IsocrystalSpec {
        IsocrystalSpec {
            p: self.ctx.p(),
            n: self.ctx.degree(),
            precision: self.ctx.precision() as u32,
            dim: self.dim(),
            frobenius: self.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        }
    }

    pub fn context(&self) -> &Context {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &PMatrix {
        &self.matrix
    }

    /// F(v) = A sigma(v).
    pub fn apply(&self, v: &[PadicScalar]) -> Result<Vec<PadicScalar>> {
        let sv: Vec<PadicScalar> = v.iter().map(|x| x.frobenius()).collect();
        self.matrix.mul_vec(&sv)
    }

    /// F applied to each column of `b`.
    pub fn apply_columns(&self, b: &PMatrix) -> Result<PMatrix> {
        self.matrix.mul(&sigma_matrix(b))
    }

    /// Matrix of F^n, which is K_0-linear: A sigma(A) ... sigma^{n-1}(A).
    pub fn linearize(&self) -> Result<PMatrix> {
        let n = self.ctx.degree();
        let mut phi = self.matrix.clone();
        let mut s = self.matrix.clone();
        for _ in 1..n {
            s = sigma_matrix(&s);
            phi = phi.mul(&s)?;
        }
        Ok(phi)
    }

    /// New basis given by the columns of P: matrix P^{-1} A sigma(P).
    pub fn change_basis(&self, p: &PMatrix) -> Result<Self> {
        let m = p.inverse()?.mul(&self.matrix)?.mul(&sigma_matrix(p))?;
        Self::new(m)
    }

    /// Same isocrystal at a higher precision, representatives kept.
    pub fn raised(&self, extra: i64) -> Result<Self> {
        let ctx = self.ctx.with_precision((self.ctx.precision() + extra.max(0)) as u32)?;
        Ok(Isocrystal { matrix: lift_matrix(&self.matrix, &ctx)?, ctx })
    }

    fn auto_raised(&self) -> Result<Self> {
        let d = self.dim() as i64;
        self.raised(d * (max_abs_valuation(&self.matrix) + 1))
    }

    /// Characteristic polynomial of F^n, leading coefficient first.
    pub fn charpoly(&self) -> Result<Vec<PadicScalar>> {
        self.linearize()?.charpoly()
    }

    pub fn slopes(&self) -> Result<SlopeData> {
        if self.dim() == 0 {
            return Ok(SlopeData::default());
        }
        let w = self.auto_raised()?;
        let np = newton_polygon_of_poly(&w.charpoly()?)?;
        let n = Rational::from_integer(self.ctx.degree() as i64);
        Ok(SlopeData::from_pairs(np.slopes().pairs().iter().map(|&(a, m)| (a / n, m))))
    }

    pub fn newton_polygon(&self) -> Result<NewtonPolygon> {
        Ok(NewtonPolygon::from_slopes(&self.slopes()?))
    }

    pub fn newton_number(&self) -> Result<Rational> {
        Ok(self.slopes()?.newton_number())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Isocrystal { ctx: self.ctx.clone(), matrix: self.matrix.block_diag(&other.matrix) })
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Isocrystal { ctx: self.ctx.clone(), matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Linear dual with F(f) = sigma o f o F^{-1}: matrix (A^{-1})^T.
    pub fn dual(&self) -> Result<Self> {
        if self.dim() == 0 {
            return Ok(self.clone());
        }
        Ok(Isocrystal { ctx: self.ctx.clone(), matrix: self.matrix.inverse()?.transpose() })
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ctx.same_field(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    /// Decomposition N = sum N(alpha) into isoclinic sub-isocrystals.
    pub fn isoclinic_decomposition(&self) -> Result<Vec<IsoclinicSummand>> {
        let slopes = self.slopes()?;
        let d = self.dim();
        if slopes.pairs().len() <= 1 {
            return Ok(slopes
                .pairs()
                .iter()
                .map(|&(a, _)| IsoclinicSummand {
                    slope: a,
                    basis: Matrix::identity(&self.ctx, d),
                    isocrystal: self.clone(),
                })
                .collect());
        }
        let n = self.ctx.degree() as i64;
        // Psi = Phi^b has integral root valuations w_j = b n alpha_j
        let b = slopes.pairs().iter().fold(1i64, |acc, (a, _)| acc.lcm((*a * Rational::from_integer(n)).denom()));
        let ws: Vec<i64> =
            slopes.pairs().iter().map(|(a, _)| (*a * Rational::from_integer(n * b)).to_integer()).collect();
        let span = ws.iter().map(|w| w.abs()).max().unwrap_or(0) + 1;
        let extra = (d as i64) * (max_abs_valuation(&self.matrix) + 1) * b * n + 2 * (d as i64) * span + 10;
        let work = self.raised(extra)?;
        let wctx = work.ctx.clone();
        let psi = work.linearize()?.pow(b as u64)?;
        let chi_lead_first = psi.charpoly()?;
        let chi: Vec<PadicScalar> = chi_lead_first.into_iter().rev().collect();

        let mut out = Vec::new();
        let mut all_cols: Vec<Vec<PadicScalar>> = Vec::new();
        for (j, &(alpha, m)) in slopes.pairs().iter().enumerate() {
            let w = ws[j];
            let scaled: Vec<PadicScalar> =
                chi.iter().enumerate().map(|(k, c)| c * &PadicScalar::p_power(&wctx, w * k as i64)).collect();
            let c = scaled.iter().map(|x| x.valuation_bound()).min().unwrap_or(0);
            let inv = PadicScalar::p_power(&wctx, -c);
            let h: Vec<PadicScalar> = scaled.iter().map(|x| x * &inv).collect();
            let g = hensel::unit_root_factor(&h)?;
            if g.len() != m + 1 {
                return Err(Error::SlopeFactorizationFailed(format!(
                    "unit-root factor for slope {} has degree {}, expected {m}",
                    fmt_q(alpha),
                    g.len().saturating_sub(1)
                )));
            }
            // G(y) = p^{w m} g(y / p^w), monic in y
            let gm: Vec<PadicScalar> = g
                .iter()
                .enumerate()
                .map(|(k, c)| c * &PadicScalar::p_power(&wctx, w * (m as i64 - k as i64)))
                .collect();
            let mut acc: PMatrix = Matrix::zeros(&wctx, d, d);
            for c in gm.iter().rev() {
                acc = acc.mul(&psi)?.add(&Matrix::identity(&wctx, d).scale(c))?;
            }
            let ker = acc.kernel();
            if ker.len() != m {
                return Err(Error::SlopeFactorizationFailed(format!(
                    "kernel for slope {} has dimension {}, expected {m}",
                    fmt_q(alpha),
                    ker.len()
                )));
            }
            let basis = Matrix::from_columns(&wctx, d, &ker);
            let image = work.apply_columns(&basis)?;
            let x = basis.solve(&image)?.ok_or_else(|| {
                Error::SlopeFactorizationFailed(format!("summand for slope {} is not F-stable", fmt_q(alpha)))
            })?;
            all_cols.extend(ker);
            let basis = lift_matrix(&basis, &self.ctx)?;
            let x = lift_matrix(&x, &self.ctx)?;
            out.push(IsoclinicSummand { slope: alpha, basis, isocrystal: Isocrystal::new(x)? });
        }
        let total = Matrix::from_columns(&wctx, d, &all_cols);
        if total.rank() != d {
            return Err(Error::SlopeFactorizationFailed("summands do not span".into()));
        }
        Ok(out)
    }
}

/// N_{r,d}: F(e_i) = e_{i+1} for i < r and F(e_r) = p^d e_1.
pub fn simple_isocrystal(ctx: &Context, r: usize, d: i64) -> Result<Isocrystal> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    if (r as i64).gcd(&d) != 1 {
        return Err(Error::InvalidArgument(format!("gcd({r}, {d}) != 1")));
    }
    let mut m = Matrix::zeros(ctx, r, r);
    for i in 0..r - 1 {
        m.set(i + 1, i, PadicScalar::one(ctx));
    }
    m.set(0, r - 1, PadicScalar::p_power(ctx, d));
    Isocrystal::new(m)
}
