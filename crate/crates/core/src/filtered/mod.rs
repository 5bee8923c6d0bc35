//! Filtered isocrystals over K = K_0: Hodge data, weak admissibility and the
//! Frobenius-span check.

mod dieudonne;

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isocrystal::{Isocrystal, IsocrystalSpec, NewtonPolygon, PMatrix, SlopeData};
use crate::linalg::Matrix;
use crate::padic::{parse_scalar, Context, PadicScalar, Rational};

pub use dieudonne::{ElementaryDivisors, ExpD, FilteredDieudonneModule, Quotient};

/// Decreasing filtration given by bases at finitely many indices.
///
/// For an index i below every specified index Fil^i is the whole space;
/// between specified indices Fil^i equals the value at the smallest specified
/// index j >= i; above the largest specified index it is 0. With nothing
/// specified, Fil^0 is everything and Fil^1 = 0.
#[derive(Debug, Clone)]
pub struct Filtration {
    ctx: Context,
    dim: usize,
    steps: Vec<(i64, PMatrix)>,
}

impl Filtration {
    pub fn new(ctx: &Context, dim: usize, steps: Vec<(i64, PMatrix)>) -> Result<Self> {
        let mut steps = steps;
        steps.sort_by_key(|s| s.0);
        for w in steps.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::validation(format!("filtration.{}", w[0].0), "index given twice"));
            }
        }
        let mut reduced = Vec::with_capacity(steps.len());
        for (i, b) in steps {
            if b.rows() != dim && b.cols() > 0 {
                return Err(Error::validation(format!("filtration.{i}"), format!("vectors must have length {dim}")));
            }
            let b = if b.cols() == 0 { Matrix::zeros(ctx, dim, 0) } else { b };
            if b.rank() != b.cols() {
                return Err(Error::validation(format!("filtration.{i}"), "basis vectors are linearly dependent"));
            }
            reduced.push((i, b));
        }
        for w in reduced.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            if lo.1.hstack(&hi.1)?.rank() != lo.1.cols() {
                return Err(Error::validation(
                    format!("filtration.{}", hi.0),
                    format!("Fil^{} is not contained in Fil^{}", hi.0, lo.0),
                ));
            }
        }
        Ok(Filtration { ctx: ctx.clone(), dim, steps: reduced })
    }

    /// Fil^0 = everything, Fil^1 = span of `fil1`.
    pub fn two_step(ctx: &Context, dim: usize, fil1: PMatrix) -> Result<Self> {
        Self::new(ctx, dim, vec![(0, Matrix::identity(ctx, dim)), (1, fil1)])
    }

    pub fn trivial(ctx: &Context, dim: usize) -> Self {
        Filtration { ctx: ctx.clone(), dim, steps: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn steps(&self) -> &[(i64, PMatrix)] {
        &self.steps
    }

    fn bounds(&self) -> (i64, i64) {
        match (self.steps.first(), self.steps.last()) {
            (Some(a), Some(b)) => (a.0, b.0),
            _ => (0, 0),
        }
    }

    /// Basis of Fil^i.
    pub fn fil(&self, i: i64) -> PMatrix {
        if self.steps.is_empty() {
            return if i <= 0 { Matrix::identity(&self.ctx, self.dim) } else { Matrix::zeros(&self.ctx, self.dim, 0) };
        }
        let (lo, hi) = self.bounds();
        if i < lo {
            return Matrix::identity(&self.ctx, self.dim);
        }
        if i > hi {
            return Matrix::zeros(&self.ctx, self.dim, 0);
        }
        self.steps.iter().find(|s| s.0 >= i).map(|s| s.1.clone()).unwrap()
    }

    /// Indices outside which the filtration is constant: Fil^lo = N and Fil^{hi+1} = 0.
    pub fn range(&self) -> (i64, i64) {
        let (lo, hi) = self.bounds();
        if self.steps.is_empty() {
            (0, 0)
        } else {
            (lo - 1, hi)
        }
    }

    /// dim Fil^i.
    pub fn dim_at(&self, i: i64) -> usize {
        self.fil(i).cols()
    }

    /// dim(Fil^i cap W) for a subspace with independent columns `w`.
    pub fn dim_meet(&self, i: i64, w: &PMatrix) -> Result<usize> {
        let f = self.fil(i);
        if f.cols() == 0 || w.cols() == 0 {
            return Ok(0);
        }
        Ok(f.cols() + w.cols() - f.hstack(w)?.rank())
    }

    /// Hodge weights of the induced filtration on W, increasing, with multiplicity.
    pub fn weights_on(&self, w: &PMatrix) -> Result<Vec<i64>> {
        let (lo, hi) = self.range();
        let mut out = Vec::new();
        let mut prev = w.cols();
        for i in lo..=hi {
            let next = self.dim_meet(i + 1, w)?;
            for _ in next..prev {
                out.push(i);
            }
            prev = next;
        }
        Ok(out)
    }

    pub fn weights(&self) -> Vec<i64> {
        self.weights_on(&Matrix::identity(&self.ctx, self.dim)).expect("identity is a valid subspace")
    }

    /// t_H of the induced filtration on W.
    pub fn hodge_number_on(&self, w: &PMatrix) -> Result<i64> {
        Ok(self.weights_on(w)?.iter().sum())
    }

    /// Graded dimensions (i, dim gr^i) for the nonzero pieces.
    pub fn graded_dims(&self) -> Vec<(i64, usize)> {
        let mut out: Vec<(i64, usize)> = Vec::new();
        for w in self.weights() {
            match out.last_mut() {
                Some(last) if last.0 == w => last.1 += 1,
                _ => out.push((w, 1)),
            }
        }
        out
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let (l1, h1) = self.range();
        let (l2, h2) = other.range();
        let lo = l1.min(l2);
        let hi = h1.max(h2);
        let mut steps = Vec::new();
        for i in lo + 1..=hi {
            steps.push((i, self.fil(i).block_diag(&other.fil(i))));
        }
        if steps.is_empty() {
            return Ok(Filtration::trivial(&self.ctx, self.dim + other.dim));
        }
        Filtration::new(&self.ctx, self.dim + other.dim, steps)
    }
}

#[derive(Debug, Clone)]
pub struct FilteredIsocrystal {
    base: Isocrystal,
    fil: Filtration,
}

/// Input schema: isocrystal fields plus the filtration, keyed by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilteredSpec {
    pub p: u64,
    pub n: usize,
    pub precision: u32,
    pub dim: usize,
    pub frobenius: Vec<Vec<String>>,
    #[serde(default)]
    pub filtration: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    pub lattice: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramification: Option<u32>,
}

impl FilteredSpec {
    pub(crate) fn parse(&self) -> Result<(Isocrystal, Filtration)> {
        if let Some(e) = self.ramification {
            if e != 1 {
                return Err(Error::validation("ramification", "only K = K_0 (e = 1) is supported"));
            }
        }
        let base = Isocrystal::from_spec(&IsocrystalSpec {
            p: self.p,
            n: self.n,
            precision: self.precision,
            dim: self.dim,
            frobenius: self.frobenius.clone(),
        })?;
        let ctx = base.context().clone();
        let mut steps = Vec::new();
        for (key, vecs) in &self.filtration {
            let i: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::validation(format!("filtration.{key}"), "index must be an integer"))?;
            let mut cols = Vec::new();
            for (k, v) in vecs.iter().enumerate() {
                if v.len() != self.dim {
                    return Err(Error::validation(
                        format!("filtration.{key}[{k}]"),
                        format!("expected {} entries", self.dim),
                    ));
                }
                let col = v
                    .iter()
                    .enumerate()
                    .map(|(j, s)| {
                        parse_scalar(&ctx, s)
                            .map_err(|e| Error::validation(format!("filtration.{key}[{k}][{j}]"), e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                cols.push(col);
            }
            steps.push((i, Matrix::from_columns(&ctx, self.dim, &cols)));
        }
        let fil = Filtration::new(&ctx, self.dim, steps)?;
        Ok((base, fil))
    }

    pub fn from_parts(base: &Isocrystal, fil: &Filtration, lattice: bool) -> Self {
        let spec = base.to_spec();
        let filtration = fil
            .steps()
            .iter()
            .map(|(i, b)| {
                (i.to_string(), b.columns().iter().map(|c| c.iter().map(|x| x.to_string()).collect()).collect())
            })
            .collect();
        FilteredSpec {
            p: spec.p,
            n: spec.n,
            precision: spec.precision,
            dim: spec.dim,
            frobenius: spec.frobenius,
            filtration,
            lattice,
            ramification: None,
        }
    }
}

/// Why a sub-object was tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// t_N(N) differs from t_H(N).
    TotalMismatch,
    /// A proper F-stable subspace with t_N < t_H.
    Subobject,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub kind: WitnessKind,
    /// Columns span the sub-object.
    pub basis: PMatrix,
    pub newton_number: Rational,
    pub hodge_number: i64,
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Admissible,
    NotAdmissible(Witness),
    Undecided { reason: String },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Admissible => "admissible",
            Verdict::NotAdmissible(_) => "not_admissible",
            Verdict::Undecided { .. } => "undecided",
        }
    }

    pub fn is_admissible(&self) -> bool {
        matches!(self, Verdict::Admissible)
    }
}

/// Independent columns spanning the same space.
pub(crate) fn span(m: &PMatrix) -> PMatrix {
    if m.cols() == 0 {
        return m.clone();
    }
    m.select_columns(&m.column_basis())
}

impl FilteredIsocrystal {
    pub fn new(base: Isocrystal, fil: Filtration) -> Result<Self> {
        if fil.dim() != base.dim() {
            return Err(Error::DimensionMismatch("filtration and isocrystal dimensions differ".into()));
        }
        if !fil.ctx.same_field(base.context()) {
            return Err(Error::ContextMismatch);
        }
        Ok(FilteredIsocrystal { base, fil })
    }

    pub fn from_spec(spec: &FilteredSpec) -> Result<Self> {
        let (base, fil) = spec.parse()?;
        Self::new(base, fil)
    }

    pub fn base(&self) -> &Isocrystal {
        &self.base
    }

    pub fn filtration(&self) -> &Filtration {
        &self.fil
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn hodge_number(&self) -> i64 {
        self.fil.weights().iter().sum()
    }

    pub fn hodge_polygon(&self) -> NewtonPolygon {
        let s = SlopeData::from_pairs(self.fil.graded_dims().into_iter().map(|(i, m)| (Rational::from_integer(i), m)));
        NewtonPolygon::from_slopes(&s)
    }

    pub fn newton_number(&self) -> Result<Rational> {
        self.base.newton_number()
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Self::new(self.base.direct_sum(&other.base)?, self.fil.direct_sum(&other.fil)?)
    }

    /// Smallest F-stable subspace containing the columns of `w`.
    pub fn frobenius_span(&self, w: &PMatrix) -> Result<PMatrix> {
        let mut cur = span(w);
        loop {
            if cur.cols() == 0 || cur.cols() == self.dim() {
                return Ok(cur);
            }
            let next = span(&cur.hstack(&self.base.apply_columns(&cur)?)?);
            if next.cols() == cur.cols() {
                return Ok(cur);
            }
            cur = next;
        }
    }

    /// Frobenius of the F-stable subspace spanned by `w` in that basis.
    pub fn restrict(&self, w: &PMatrix) -> Result<PMatrix> {
        let image = self.base.apply_columns(w)?;
        w.solve(&image)?.ok_or_else(|| Error::InvalidArgument("subspace is not F-stable".into()))
    }

    /// t_N of an F-stable subspace: the valuation of the restricted determinant.
    pub fn subobject_newton_number(&self, w: &PMatrix) -> Result<Rational> {
        if w.cols() == 0 {
            return Ok(Rational::from_integer(0));
        }
        let det = self.restrict(w)?.det()?;
        det.valuation()
            .map(Rational::from_integer)
            .ok_or_else(|| Error::PrecisionInsufficient("restricted Frobenius determinant vanishes".into()))
    }

    pub fn subobject_hodge_number(&self, w: &PMatrix) -> Result<i64> {
        self.fil.hodge_number_on(w)
    }

    /// Weak admissibility over F-stable subspaces built from the isoclinic
    /// decomposition and the filtration.
    pub fn weak_admissibility(&self) -> Result<Verdict> {
        let d = self.dim();
        let ctx = self.base.context().clone();
        let t_n = self.newton_number()?;
        let t_h = self.hodge_number();
        if t_n != Rational::from_integer(t_h) {
            return Ok(Verdict::NotAdmissible(Witness {
                kind: WitnessKind::TotalMismatch,
                basis: Matrix::identity(&ctx, d),
                newton_number: t_n,
                hodge_number: t_h,
            }));
        }
        if d == 0 {
            return Ok(Verdict::Admissible);
        }
        let parts = self.base.isoclinic_decomposition()?;
        let k = parts.len();
        let mut worst: Option<(Rational, Witness)> = None;
        let mut consider = |w: PMatrix, t_n: Rational| -> Result<()> {
            if w.cols() == 0 || w.cols() == d {
                return Ok(());
            }
            let t_h = self.fil.hodge_number_on(&w)?;
            let gap = t_n - Rational::from_integer(t_h);
            if gap < Rational::from_integer(0) && worst.as_ref().is_none_or(|(g, _)| gap < *g) {
                worst = Some((
                    gap,
                    Witness { kind: WitnessKind::Subobject, basis: w, newton_number: t_n, hodge_number: t_h },
                ));
            }
            Ok(())
        };
        let join = |mask: usize| -> Result<(PMatrix, Rational)> {
            let mut m: PMatrix = Matrix::zeros(&ctx, d, 0);
            let mut t = Rational::from_integer(0);
            for (j, part) in parts.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    m = m.hstack(&part.basis)?;
                    t += part.slope * Rational::from_integer(part.basis.cols() as i64);
                }
            }
            Ok((m, t))
        };
        for mask in 1..(1usize << k) {
            let (w, t) = join(mask)?;
            consider(w, t)?;
        }
        // F-spans of Fil^i inside each isoclinic part, alone and with other parts
        let (lo, hi) = self.fil.range();
        for (j, part) in parts.iter().enumerate() {
            for i in lo + 1..=hi {
                let f = self.fil.fil(i);
                if f.cols() == 0 {
                    continue;
                }
                let meet = intersect(&f, &part.basis)?;
                if meet.cols() == 0 || meet.cols() == part.basis.cols() {
                    continue;
                }
                let fs = self.frobenius_span(&meet)?;
                let t_fs = part.slope * Rational::from_integer(fs.cols() as i64);
                for mask in 0..(1usize << k) {
                    if mask >> j & 1 == 1 {
                        continue;
                    }
                    let (w, t) = join(mask)?;
                    consider(w.hstack(&fs)?, t + t_fs)?;
                }
            }
        }
        if let Some((_, w)) = worst {
            return Ok(Verdict::NotAdmissible(w));
        }
        // every summand simple: the subsets above were all F-stable subspaces
        let simple = parts.iter().all(|p| p.basis.cols() as i64 == *p.slope.denom());
        if simple {
            return Ok(Verdict::Admissible);
        }
        // otherwise bound t_H of any F-stable W by the top Hodge weights of the parts it meets
        let choices: Vec<Vec<usize>> = parts
            .iter()
            .map(|p| {
                let r = *p.slope.denom() as usize;
                (0..=p.basis.cols()).filter(|e| e % r == 0).collect()
            })
            .collect();
        let mut idx = vec![0usize; k];
        loop {
            let es: Vec<usize> = idx.iter().enumerate().map(|(j, &c)| choices[j][c]).collect();
            let e: usize = es.iter().sum();
            let full_or_empty = es.iter().zip(&parts).all(|(&e, p)| e == 0 || e == p.basis.cols());
            if e > 0 && e < d && !full_or_empty {
                let mask = es.iter().enumerate().filter(|(_, &e)| e > 0).fold(0usize, |m, (j, _)| m | 1 << j);
                let (v, _) = join(mask)?;
                let weights = self.fil.weights_on(&v)?;
                let bound: i64 = weights.iter().rev().take(e).sum();
                let t: Rational = es.iter().zip(&parts).map(|(&e, p)| p.slope * Rational::from_integer(e as i64)).sum();
                if t < Rational::from_integer(bound) {
                    return Ok(Verdict::Undecided {
                        reason: format!(
                            "non-simple isoclinic parts admit sub-objects the enumeration does not cover (dims {:?})",
                            es
                        ),
                    });
                }
            }
            let mut pos = 0;
            loop {
                if pos == k {
                    return Ok(Verdict::Admissible);
                }
                idx[pos] += 1;
                if idx[pos] < choices[pos].len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// For a filtration with jumps in {0, 1}: does the F-orbit of Fil^1 span N?
    pub fn frobenius_span_check(&self) -> Result<bool> {
        let weights = self.fil.weights();
        if weights.iter().any(|&w| w != 0 && w != 1) {
            return Err(Error::InvalidArgument("filtration jumps must lie in {0, 1}".into()));
        }
        Ok(self.frobenius_span(&self.fil.fil(1))?.cols() == self.dim())
    }
}

/// Basis of the intersection of two column spaces.
pub fn intersect(a: &PMatrix, b: &PMatrix) -> Result<PMatrix> {
    let ctx = a.ctx().clone();
    if a.cols() == 0 || b.cols() == 0 {
        return Ok(Matrix::zeros(&ctx, a.rows(), 0));
    }
    let ker = a.hstack(b)?.kernel();
    let coeffs: Vec<Vec<PadicScalar>> = ker.iter().map(|v| v[..a.cols()].to_vec()).collect();
    if coeffs.is_empty() {
        return Ok(Matrix::zeros(&ctx, a.rows(), 0));
    }
    let c = Matrix::from_columns(&ctx, a.cols(), &coeffs);
    Ok(span(&a.mul(&c)?))
}

/// lcm helper for callers generating slope data.
pub fn slope_lcm(s: &SlopeData) -> i64 {
    s.pairs().iter().fold(1i64, |acc, (a, _)| acc.lcm(a.denom()))
}
