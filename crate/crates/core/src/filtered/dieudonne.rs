use std::fmt;

use serde::Serialize;

use super::{FilteredIsocrystal, FilteredSpec, Filtration};
use crate::error::{Error, Result};
use crate::isocrystal::{Isocrystal, PMatrix};
use crate::linalg::Matrix;
use crate::padic::{Context, PadicScalar};

/// Valuations of the nonzero Smith invariants, increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementaryDivisors {
    pub rank: usize,
    pub valuations: Vec<i64>,
}

/// Smith reduction over the valuation ring. Pivot: an entry of least
/// valuation, ties to the lowest row, then the lowest column.
pub fn elementary_divisors(m: &PMatrix) -> ElementaryDivisors {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut vals = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        let mut best: Option<(i64, usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Some(v) = a.get(i, j).valuation() {
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        if pi != k {
            for j in 0..cols {
                let t = a.get(pi, j).clone();
                a.set(pi, j, a.get(k, j).clone());
                a.set(k, j, t);
            }
        }
        if pj != k {
            for i in 0..rows {
                let t = a.get(i, pj).clone();
                a.set(i, pj, a.get(i, k).clone());
                a.set(i, k, t);
            }
        }
        let piv = a.get(k, k).clone();
        for i in k + 1..rows {
            let f = a.get(i, k).div(&piv).expect("pivot is nonzero");
            if f.is_zero() {
                continue;
            }
            for j in k..cols {
                let nv = a.get(i, j) - &(&f * a.get(k, j));
                a.set(i, j, nv);
            }
        }
        for j in k + 1..cols {
            let f = a.get(k, j).div(&piv).expect("pivot is nonzero");
            if f.is_zero() {
                continue;
            }
            for i in k..rows {
                let nv = a.get(i, j) - &(&f * a.get(i, k));
                a.set(i, j, nv);
            }
        }
        vals.push(v);
        k += 1;
    }
    ElementaryDivisors { rank: vals.len(), valuations: vals }
}

/// A finitely generated Z_p-module: Z_p^free plus cyclic torsion Z/p^e.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Quotient {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl fmt::Display for Quotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(if self.free_rank == 1 { "Z_p".to_string() } else { format!("Z_p^{}", self.free_rank) });
        }
        for e in &self.torsion {
            parts.push(format!("Z/p^{e}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The map (D/D^0)[1/p] -> (D/(1-F)D^0)[1/p] induced by 1 - F, over Q_p.
#[derive(Debug, Clone)]
pub struct ExpD {
    pub source_dim: usize,
    pub target_dim: usize,
    /// target_dim x source_dim over Q_p in the chosen complement bases.
    pub matrix: PMatrix,
    pub rank: usize,
    pub kernel_dim: usize,
    pub surjective: bool,
}

/// Lattice D = W(k)^d with Frobenius and filtration by direct summands.
#[derive(Debug, Clone)]
pub struct FilteredDieudonneModule {
    inner: FilteredIsocrystal,
    prime: Context,
}

fn is_integral(x: &PadicScalar) -> bool {
    x.valuation().is_none_or(|v| v >= 0)
}

fn unit_divisors(m: &PMatrix) -> bool {
    let ed = elementary_divisors(m);
    ed.rank == m.cols() && ed.valuations.iter().all(|&v| v == 0)
}

impl FilteredDieudonneModule {
    pub fn new(base: Isocrystal, fil: Filtration) -> Result<Self> {
        for (i, row) in base.matrix().to_rows().iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !is_integral(x) {
                    return Err(Error::validation(format!("frobenius[{i}][{j}]"), "lattice entries must be integral"));
                }
            }
        }
        for (i, b) in fil.steps() {
            for (r, row) in b.to_rows().iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    if !is_integral(x) {
                        return Err(Error::validation(
                            format!("filtration.{i}[{c}][{r}]"),
                            "lattice entries must be integral",
                        ));
                    }
                }
            }
            if b.cols() > 0 && !unit_divisors(b) {
                return Err(Error::validation(format!("filtration.{i}"), "D^i is not a direct summand of D"));
            }
        }
        let prime = base.context().prime_field()?;
        Ok(FilteredDieudonneModule { inner: FilteredIsocrystal::new(base, fil)?, prime })
    }

    pub fn from_spec(spec: &FilteredSpec) -> Result<Self> {
        if !spec.lattice {
            return Err(Error::validation("lattice", "a Dieudonne module needs \"lattice\": true"));
        }
        let (base, fil) = spec.parse()?;
        Self::new(base, fil)
    }

    pub fn filtered_isocrystal(&self) -> &FilteredIsocrystal {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn degree(&self) -> usize {
        self.inner.base().context().degree()
    }

    /// Whether D = sum of F_i(D^i), F_i = p^{-i} F, over the nonnegative indices.
    pub fn strongly_divisible(&self) -> Result<bool> {
        let ctx = self.inner.base().context().clone();
        let d = self.dim();
        let (_, hi) = self.inner.filtration().range();
        let mut gens: PMatrix = Matrix::zeros(&ctx, d, 0);
        for i in 0..=hi.max(0) {
            let b = self.inner.filtration().fil(i);
            if b.cols() == 0 {
                continue;
            }
            let img = self.inner.base().apply_columns(&b)?.scale(&PadicScalar::p_power(&ctx, -i));
            if img.to_rows().iter().flatten().any(|x| !is_integral(x)) {
                return Ok(false);
            }
            gens = gens.hstack(&img)?;
        }
        if d == 0 {
            return Ok(true);
        }
        let ed = elementary_divisors(&gens);
        Ok(ed.rank == d && ed.valuations.iter().all(|&v| v == 0))
    }

    /// Jumps j, i of the filtration satisfy j - i < p.
    pub fn condition_star(&self) -> bool {
        let w = self.inner.filtration().weights();
        match (w.first(), w.last()) {
            (Some(a), Some(b)) => ((b - a) as u64) < self.prime.p(),
            _ => true,
        }
    }

    /// Q_p coordinates of a vector of D, blocks of n per entry.
    fn flatten(&self, v: &[PadicScalar]) -> Result<Vec<PadicScalar>> {
        let mut out = Vec::with_capacity(v.len() * self.degree());
        for x in v {
            out.extend(x.components(&self.prime)?);
        }
        Ok(out)
    }

    /// Z_p basis g^l b_c of the W-span of the columns of `b`, flattened.
    fn zp_basis(&self, b: &PMatrix) -> Result<Vec<(Vec<PadicScalar>, Vec<PadicScalar>)>> {
        let ctx = self.inner.base().context();
        let g = PadicScalar::generator(ctx);
        let mut out = Vec::new();
        for col in b.columns() {
            let mut gl = PadicScalar::one(ctx);
            for _ in 0..self.degree() {
                let v: Vec<PadicScalar> = col.iter().map(|x| x * &gl).collect();
                out.push((self.flatten(&v)?, v));
                gl = &gl * &g;
            }
        }
        Ok(out)
    }

    /// Matrix over Z_p of 1 - F on the Z_p-span of the W-columns of `b`.
    fn one_minus_f_on(&self, b: &PMatrix) -> Result<PMatrix> {
        let rows = self.dim() * self.degree();
        let mut cols = Vec::new();
        for (_, v) in self.zp_basis(b)? {
            let fv = self.inner.base().apply(&v)?;
            let diff: Vec<PadicScalar> = v.iter().zip(&fv).map(|(a, b)| a - b).collect();
            cols.push(self.flatten(&diff)?);
        }
        Ok(Matrix::from_columns(&self.prime, rows, &cols))
    }

    fn d0(&self) -> PMatrix {
        self.inner.filtration().fil(0)
    }

    fn identity(&self) -> PMatrix {
        Matrix::identity(self.inner.base().context(), self.dim())
    }

    /// h^0 = ker(1 - F : D^0 -> D).
    pub fn h0(&self) -> Result<Quotient> {
        let m = self.one_minus_f_on(&self.d0())?;
        let r = elementary_divisors(&m).rank;
        Ok(Quotient { free_rank: m.cols() - r, torsion: Vec::new() })
    }

    /// h^1 = coker(1 - F : D^0 -> D).
    pub fn h1(&self) -> Result<Quotient> {
        let m = self.one_minus_f_on(&self.d0())?;
        let ed = elementary_divisors(&m);
        Ok(Quotient { free_rank: m.rows() - ed.rank, torsion: ed.valuations.into_iter().filter(|&v| v > 0).collect() })
    }

    /// dim over Q_p of D^{F=1}[1/p].
    pub fn fixed_dim(&self) -> Result<usize> {
        let m = self.one_minus_f_on(&self.identity())?;
        Ok(m.cols() - m.rank())
    }

    pub fn exp_d(&self) -> Result<ExpD> {
        let nd = self.dim() * self.degree();
        let full = self.one_minus_f_on(&self.identity())?;
        let on_d0 = self.one_minus_f_on(&self.d0())?;
        let id = Matrix::identity(&self.prime, nd);
        // complement of D^0 among the standard Q_p basis
        let d0_flat: Vec<Vec<PadicScalar>> = self.zp_basis(&self.d0())?.into_iter().map(|(f, _)| f).collect();
        let d0m = Matrix::from_columns(&self.prime, nd, &d0_flat);
        let src_idx: Vec<usize> =
            d0m.hstack(&id)?.column_basis().into_iter().filter(|&c| c >= d0m.cols()).map(|c| c - d0m.cols()).collect();
        // complement of (1 - F) D^0
        let img = on_d0.select_columns(&on_d0.column_basis());
        let tgt_idx: Vec<usize> =
            img.hstack(&id)?.column_basis().into_iter().filter(|&c| c >= img.cols()).map(|c| c - img.cols()).collect();
        let src = full.select_columns(&src_idx);
        let basis = img.hstack(&id.select_columns(&tgt_idx))?;
        let coords = if nd == 0 {
            Matrix::zeros(&self.prime, 0, 0)
        } else {
            basis
                .solve(&src)?
                .ok_or_else(|| Error::PrecisionInsufficient("quotient coordinates not solvable".into()))?
        };
        let rows: Vec<usize> = (img.cols()..img.cols() + tgt_idx.len()).collect();
        let matrix = coords.select_rows(&rows);
        let rank = if matrix.rows() == 0 || matrix.cols() == 0 { 0 } else { matrix.rank() };
        Ok(ExpD {
            source_dim: src_idx.len(),
            target_dim: tgt_idx.len(),
            kernel_dim: src_idx.len() - rank,
            surjective: rank == tgt_idx.len(),
            matrix,
            rank,
        })
    }
}
