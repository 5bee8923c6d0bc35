//! Finitely presented pairing categories and their formal period spaces.
//!
//! An object X carries F(X) over Q and G(X) over U. The ambient space is
//! the direct sum of F(X) (x) G(X); coordinates are indexed by (X, i, k)
//! with i an F-basis index and k a G-basis index. Periods live in a
//! user-declared U-space V_B of dimension `vb_dim`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formal_group::parse_rational;
use crate::linalg::{fmt_rational, Field, Matrix};
use crate::padic::{make_context, parse_scalar, Context, PadicScalar};

/// Coefficient field U.
pub trait Coefficient: Field {
    fn parse(ctx: &Self::Ctx, s: &str) -> Result<Self>;
    /// Absolute precision to which a zero entry is known; None when exact.
    fn zero_precision(&self) -> Option<i64>;
    fn tag(ctx: &Self::Ctx) -> String;
}

impl Coefficient for BigRational {
    fn parse(_: &(), s: &str) -> Result<Self> {
        parse_rational(s).ok_or_else(|| Error::Parse(format!("not a rational: {s:?}")))
    }
    fn zero_precision(&self) -> Option<i64> {
        None
    }
    fn tag(_: &()) -> String {
        "Q".into()
    }
}

impl Coefficient for PadicScalar {
    fn parse(ctx: &Context, s: &str) -> Result<Self> {
        parse_scalar(ctx, s)
    }
    fn zero_precision(&self) -> Option<i64> {
        Some(self.precision())
    }
    fn tag(ctx: &Context) -> String {
        format!("Q_{}^{} (precision {})", ctx.p(), ctx.degree(), ctx.precision())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Object {
    pub name: String,
    pub dim_f: usize,
    pub dim_g: usize,
}

/// f: X -> Y with f_* = `f` (dim_F(Y) x dim_F(X)) and f^* = `g` (dim_G(X) x dim_G(Y)).
///
/// Column i of `f` is f_* of the i-th basis vector; column k of `g` is f^* of
/// the k-th basis vector of G(Y).
#[derive(Debug, Clone)]
pub struct Morphism<T: Field> {
    pub source: usize,
    pub target: usize,
    pub f: Matrix<BigRational>,
    pub g: Matrix<T>,
}

/// 0 -> X' -> X^m -> X'' -> 0 given componentwise.
///
/// `iota_f[j]`: F(X') -> F(X), `pi_f[j]`: F(X) -> F(X''),
/// `iota_g[j]`: G(X) -> G(X'), `pi_g[j]`: G(X'') -> G(X).
#[derive(Debug, Clone)]
pub struct ExactTriple<T: Field> {
    pub middle: usize,
    pub m: usize,
    pub sub_dims: (usize, usize),
    pub quotient_dims: (usize, usize),
    pub iota_f: Vec<Matrix<BigRational>>,
    pub pi_f: Vec<Matrix<BigRational>>,
    pub iota_g: Vec<Matrix<T>>,
    pub pi_g: Vec<Matrix<T>>,
}

#[derive(Debug, Clone)]
pub struct PairingCategory<T: Coefficient> {
    ctx: T::Ctx,
    objects: Vec<Object>,
    morphisms: Vec<Morphism<T>>,
    /// omega[X][i * dim_G + k] is the period of (i, k) in V_B.
    omega: Vec<Vec<Vec<T>>>,
    vb_dim: usize,
    triples: Vec<ExactTriple<T>>,
    closure_length: usize,
    /// Row-reduced functoriality relations, computed on first use.
    relations: OnceLock<Vec<Vec<T>>>,
}

pub const DEFAULT_CLOSURE_LENGTH: usize = 8;

/// Quotient of the ambient space by a set of relations.
#[derive(Debug, Clone)]
pub struct FormalPeriodSpace<T: Field> {
    pub ambient_dim: usize,
    pub relations: Matrix<T>,
    pub relation_rank: usize,
    pub dim: usize,
    /// Ambient coordinates whose classes form a basis of the quotient.
    pub basis: Vec<usize>,
}

/// A basis coordinate (object, F index, G index) with its coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<T> {
    pub object: String,
    pub f_index: usize,
    pub g_index: usize,
    pub coeff: T,
}

#[derive(Debug, Clone)]
pub struct DepthVerdict<T> {
    /// None for the formal space itself.
    pub depth: Option<usize>,
    pub space_dim: usize,
    pub evaluation_rank: usize,
    pub injective: bool,
    /// A nonzero class with period zero.
    pub counterexample: Option<Vec<Term<T>>>,
    /// Precision to which the rank deficiency is certified (p-adic U only).
    pub certified_to: Option<i64>,
}

fn matrix_of<T: Field>(ctx: &T::Ctx, rows: usize, cols: usize, v: &[Vec<T>]) -> Matrix<T> {
    if rows == 0 {
        return Matrix::zeros(ctx, 0, cols);
    }
    Matrix::from_rows_shaped(ctx, rows, cols, v.to_vec()).expect("rows built with the declared shape")
}

/// Rank by elimination; also the least precision of the residual zeros.
fn certified_rank<T: Coefficient>(m: &Matrix<T>) -> (usize, Option<i64>) {
    let mut rows = m.to_rows();
    let cols = m.cols();
    let mut rank = 0;
    for c in 0..cols {
        let best = (rank..rows.len()).filter_map(|i| rows[i][c].pivot_score().map(|s| (i, s))).min_by_key(|&(_, s)| s);
        let Some((pr, _)) = best else { continue };
        rows.swap(rank, pr);
        let inv = rows[rank][c].inv().expect("pivot is nonzero");
        let pivot_row = rows[rank].clone();
        for row in rows.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].mul(&inv);
            for j in c..cols {
                row[j] = row[j].sub(&f.mul(&pivot_row[j]));
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let residual = rows[rank.min(rows.len())..].iter().flat_map(|r| r.iter().filter_map(|x| x.zero_precision())).min();
    (rank, residual)
}

impl<T: Coefficient> PairingCategory<T> {
    /// Validates shapes, naturality of omega and exactness of every triple.
    pub fn new(
        ctx: &T::Ctx,
        objects: Vec<Object>,
        morphisms: Vec<Morphism<T>>,
        omega: Vec<Vec<Vec<T>>>,
        vb_dim: usize,
        triples: Vec<ExactTriple<T>>,
    ) -> Result<Self> {
        let c = PairingCategory {
            ctx: ctx.clone(),
            objects,
            morphisms,
            omega,
            vb_dim,
            triples,
            closure_length: DEFAULT_CLOSURE_LENGTH,
            relations: OnceLock::new(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_closure_length(mut self, len: usize) -> Self {
        self.closure_length = len.max(1);
        self.relations = OnceLock::new();
        self
    }

    pub fn ctx(&self) -> &T::Ctx {
        &self.ctx
    }
    pub fn objects(&self) -> &[Object] {
        &self.objects
    }
    pub fn morphisms(&self) -> &[Morphism<T>] {
        &self.morphisms
    }
    pub fn triples(&self) -> &[ExactTriple<T>] {
        &self.triples
    }
    pub fn vb_dim(&self) -> usize {
        self.vb_dim
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.objects.len() + 1);
        let mut acc = 0;
        for o in &self.objects {
            out.push(acc);
            acc += o.dim_f * o.dim_g;
        }
        out.push(acc);
        out
    }

    pub fn ambient_dim(&self) -> usize {
        self.objects.iter().map(|o| o.dim_f * o.dim_g).sum()
    }

    fn coord(&self, ambient: usize) -> (usize, usize, usize) {
        let off = self.offsets();
        let x = (0..self.objects.len()).find(|&x| ambient < off[x + 1]).expect("coordinate in range");
        let local = ambient - off[x];
        let b = self.objects[x].dim_g;
        (x, local / b, local % b)
    }

    fn validate(&self) -> Result<()> {
        let n = self.objects.len();
        for (x, o) in self.objects.iter().enumerate() {
            if self.objects[..x].iter().any(|p| p.name == o.name) {
                return Err(Error::validation(format!("objects[{x}]"), format!("duplicate name {:?}", o.name)));
            }
        }
        if self.omega.len() != n {
            return Err(Error::validation("omega", format!("{} tensors for {n} objects", self.omega.len())));
        }
        for (x, o) in self.objects.iter().enumerate() {
            let w = &self.omega[x];
            if w.len() != o.dim_f * o.dim_g || w.iter().any(|v| v.len() != self.vb_dim) {
                return Err(Error::validation(
                    format!("omega.{}", o.name),
                    format!("expected {}x{} vectors of length {}", o.dim_f, o.dim_g, self.vb_dim),
                ));
            }
        }
        for (idx, f) in self.morphisms.iter().enumerate() {
            let field = format!("morphisms[{idx}]");
            if f.source >= n || f.target >= n {
                return Err(Error::validation(field, "unknown object"));
            }
            let (s, t) = (&self.objects[f.source], &self.objects[f.target]);
            if (f.f.rows(), f.f.cols()) != (t.dim_f, s.dim_f) {
                return Err(Error::validation(format!("{field}.f"), format!("expected {}x{}", t.dim_f, s.dim_f)));
            }
            if (f.g.rows(), f.g.cols()) != (s.dim_g, t.dim_g) {
                return Err(Error::validation(format!("{field}.g"), format!("expected {}x{}", s.dim_g, t.dim_g)));
            }
            let rel = self.functoriality_rows(f);
            if let Some(r) = rel.iter().position(|r| !self.evaluate(r).iter().all(|v| v.is_zero())) {
                let (x, i, k) = (f.source, r / t.dim_g, r % t.dim_g);
                return Err(Error::validation(
                    field,
                    format!(
                        "omega is not natural: <f_* e{i}, e{k}> differs from <e{i}, f^* e{k}> on {}",
                        self.objects[x].name
                    ),
                ));
            }
        }
        for (idx, t) in self.triples.iter().enumerate() {
            self.validate_triple(idx, t)?;
        }
        Ok(())
    }

    fn validate_triple(&self, idx: usize, t: &ExactTriple<T>) -> Result<()> {
        let field = format!("exact_triples[{idx}]");
        if t.middle >= self.objects.len() {
            return Err(Error::validation(field, "unknown middle object"));
        }
        let x = &self.objects[t.middle];
        let (sf, sg) = t.sub_dims;
        let (qf, qg) = t.quotient_dims;
        if t.m == 0 || [t.iota_f.len(), t.pi_f.len(), t.iota_g.len(), t.pi_g.len()].iter().any(|&l| l != t.m) {
            return Err(Error::validation(field, format!("expected {} component maps of each kind", t.m)));
        }
        for j in 0..t.m {
            let shapes = [
                ("iota_f", (t.iota_f[j].rows(), t.iota_f[j].cols()), (x.dim_f, sf)),
                ("pi_f", (t.pi_f[j].rows(), t.pi_f[j].cols()), (qf, x.dim_f)),
                ("iota_g", (t.iota_g[j].rows(), t.iota_g[j].cols()), (sg, x.dim_g)),
                ("pi_g", (t.pi_g[j].rows(), t.pi_g[j].cols()), (x.dim_g, qg)),
            ];
            for (name, got, want) in shapes {
                if got != want {
                    return Err(Error::validation(
                        format!("{field}.{name}[{j}]"),
                        format!("expected {}x{}", want.0, want.1),
                    ));
                }
            }
        }
        // F side: iota stacked vertically, pi side by side.
        let iota_f = stack_rows(&(), &t.iota_f, sf);
        let pi_f = stack_cols(&(), &t.pi_f, qf);
        let g_ctx = &self.ctx;
        let iota_g = stack_cols(g_ctx, &t.iota_g, sg);
        let pi_g = stack_rows(g_ctx, &t.pi_g, qg);
        exact(&field, "F", &iota_f, &pi_f, t.m * x.dim_f)?;
        exact(&field, "G", &pi_g, &iota_g, t.m * x.dim_g)?;
        for r in self.triple_rows(t) {
            if !self.evaluate(&r).iter().all(|v| v.is_zero()) {
                return Err(Error::validation(field, "omega does not vanish on the relations of this triple"));
            }
        }
        Ok(())
    }

    /// Period of an ambient vector.
    pub fn evaluate(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(&self.ctx); self.vb_dim];
        let off = self.offsets();
        for (x, w) in self.omega.iter().enumerate() {
            for (local, period) in w.iter().enumerate() {
                let c = &v[off[x] + local];
                if c.is_zero() {
                    continue;
                }
                for (o, p) in out.iter_mut().zip(period) {
                    *o = o.add(&c.mul(p));
                }
            }
        }
        out
    }

    /// (f_* e_i) (x) e_k - e_i (x) (f^* e_k) for all i in F(X), k in G(Y).
    fn functoriality_rows(&self, f: &Morphism<T>) -> Vec<Vec<T>> {
        let off = self.offsets();
        let (s, t) = (&self.objects[f.source], &self.objects[f.target]);
        let mut out = Vec::with_capacity(s.dim_f * t.dim_g);
        for i in 0..s.dim_f {
            for k in 0..t.dim_g {
                let mut row = vec![T::zero(&self.ctx); self.ambient_dim()];
                for l in 0..t.dim_f {
                    let a = f.f.get(l, i);
                    if !num_traits::Zero::is_zero(a) {
                        let c = off[f.target] + l * t.dim_g + k;
                        row[c] = row[c].add(&T::from_rational(&self.ctx, a));
                    }
                }
                for m in 0..s.dim_g {
                    let b = f.g.get(m, k);
                    if !b.is_zero() {
                        let c = off[f.source] + i * s.dim_g + m;
                        row[c] = row[c].sub(b);
                    }
                }
                out.push(row);
            }
        }
        out
    }

    /// sum_j (iota_j)_* nu (x) (pi_j)^* gamma for basis nu of F(X'), gamma of G(X'').
    fn triple_rows(&self, t: &ExactTriple<T>) -> Vec<Vec<T>> {
        let off = self.offsets()[t.middle];
        let x = &self.objects[t.middle];
        let mut out = Vec::with_capacity(t.sub_dims.0 * t.quotient_dims.1);
        for nu in 0..t.sub_dims.0 {
            for gamma in 0..t.quotient_dims.1 {
                let mut row = vec![T::zero(&self.ctx); self.ambient_dim()];
                for j in 0..t.m {
                    for i in 0..x.dim_f {
                        let a = t.iota_f[j].get(i, nu);
                        if num_traits::Zero::is_zero(a) {
                            continue;
                        }
                        let a = T::from_rational(&self.ctx, a);
                        for k in 0..x.dim_g {
                            let b = t.pi_g[j].get(k, gamma);
                            if !b.is_zero() {
                                let c = off + i * x.dim_g + k;
                                row[c] = row[c].add(&a.mul(b));
                            }
                        }
                    }
                }
                out.push(row);
            }
        }
        out
    }

    fn compose(&self, first: &Morphism<T>, then: &Morphism<T>) -> Morphism<T> {
        Morphism {
            source: first.source,
            target: then.target,
            f: then.f.mul(&first.f).expect("composable"),
            g: first.g.mul(&then.g).expect("composable"),
        }
    }

    /// Relations from morphisms, closed under composition until the relation
    /// rank stops growing or the length bound is reached; returned as the
    /// nonzero rows of their reduced echelon form.
    pub fn functoriality_relations(&self) -> Vec<Vec<T>> {
        self.relations.get_or_init(|| self.close_under_composition()).clone()
    }

    fn close_under_composition(&self) -> Vec<Vec<T>> {
        let mut rows: Vec<Vec<T>> = self.morphisms.iter().flat_map(|f| self.functoriality_rows(f)).collect();
        let mut rank = certified_rank(&matrix_of(&self.ctx, rows.len(), self.ambient_dim(), &rows)).0;
        let mut frontier: Vec<Morphism<T>> = self.morphisms.clone();
        for _ in 1..self.closure_length {
            let next: Vec<Morphism<T>> = frontier
                .iter()
                .flat_map(|w| {
                    self.morphisms
                        .iter()
                        .filter(|g| g.source == w.target)
                        .map(|g| self.compose(w, g))
                        .collect::<Vec<_>>()
                })
                .collect();
            if next.is_empty() {
                break;
            }
            rows.extend(next.iter().flat_map(|f| self.functoriality_rows(f)));
            let r = certified_rank(&matrix_of(&self.ctx, rows.len(), self.ambient_dim(), &rows)).0;
            if r == rank {
                break;
            }
            rank = r;
            frontier = next;
        }
        let ech = matrix_of(&self.ctx, rows.len(), self.ambient_dim(), &rows).rref();
        (0..ech.pivots.len()).map(|i| ech.matrix.row(i).to_vec()).collect()
    }

    pub fn depth_relations(&self, depth: usize) -> Vec<Vec<T>> {
        self.triples.iter().filter(|t| t.m <= depth).flat_map(|t| self.triple_rows(t)).collect()
    }

    fn space(&self, rows: Vec<Vec<T>>) -> FormalPeriodSpace<T> {
        let n = self.ambient_dim();
        let relations = matrix_of(&self.ctx, rows.len(), n, &rows);
        let ech = relations.rref();
        let relation_rank = ech.pivots.len();
        let basis: Vec<usize> = (0..n).filter(|c| !ech.pivots.contains(c)).collect();
        FormalPeriodSpace { ambient_dim: n, dim: basis.len(), relations, relation_rank, basis }
    }

    pub fn formal_period_space(&self) -> FormalPeriodSpace<T> {
        self.space(self.functoriality_relations())
    }

    pub fn depth_space(&self, depth: usize) -> FormalPeriodSpace<T> {
        let mut rows = self.functoriality_relations();
        rows.extend(self.depth_relations(depth));
        self.space(rows)
    }

    /// vb_dim x dim matrix: column c is the period of the c-th basis class.
    pub fn evaluation_map(&self, space: &FormalPeriodSpace<T>) -> Matrix<T> {
        let cols: Vec<Vec<T>> = space
            .basis
            .iter()
            .map(|&c| {
                let (x, i, k) = self.coord(c);
                self.omega[x][i * self.objects[x].dim_g + k].clone()
            })
            .collect();
        Matrix::from_columns(&self.ctx, self.vb_dim, &cols)
    }

    fn verdict(&self, depth: Option<usize>, space: FormalPeriodSpace<T>) -> Result<DepthVerdict<T>> {
        let e = self.evaluation_map(&space);
        let (rank, residual) = certified_rank(&e);
        let injective = rank == space.dim;
        if !injective && matches!(residual, Some(p) if p <= 0) {
            return Err(Error::PrecisionInsufficient(format!(
                "evaluation rank {rank} < {} cannot be certified at the working precision",
                space.dim
            )));
        }
        let counterexample = if injective {
            None
        } else {
            let k = e.kernel().into_iter().next().expect("rank deficient map has a kernel");
            Some(
                space
                    .basis
                    .iter()
                    .zip(k)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(&amb, coeff)| {
                        let (x, i, g) = self.coord(amb);
                        Term { object: self.objects[x].name.clone(), f_index: i, g_index: g, coeff }
                    })
                    .collect(),
            )
        };
        Ok(DepthVerdict {
            depth,
            space_dim: space.dim,
            evaluation_rank: rank,
            injective,
            counterexample,
            certified_to: if injective { None } else { residual },
        })
    }

    pub fn conjecture_formal(&self) -> Result<DepthVerdict<T>> {
        self.verdict(None, self.formal_period_space())
    }

    pub fn conjecture_at_depth(&self, depth: usize) -> Result<DepthVerdict<T>> {
        self.verdict(Some(depth), self.depth_space(depth))
    }

    /// Disjoint union with no morphisms or triples between the two parts.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self> {
        if self.vb_dim != other.vb_dim {
            return Err(Error::DimensionMismatch("vb_dim differs".into()));
        }
        let shift = self.objects.len();
        let mut objects = self.objects.clone();
        objects.extend(other.objects.iter().map(|o| Object { name: format!("{}'", o.name), ..o.clone() }));
        let mut morphisms = self.morphisms.clone();
        morphisms.extend(other.morphisms.iter().map(|f| Morphism {
            source: f.source + shift,
            target: f.target + shift,
            ..f.clone()
        }));
        let mut omega = self.omega.clone();
        omega.extend(other.omega.iter().cloned());
        let mut triples = self.triples.clone();
        triples.extend(other.triples.iter().map(|t| ExactTriple { middle: t.middle + shift, ..t.clone() }));
        Ok(PairingCategory::new(&self.ctx, objects, morphisms, omega, self.vb_dim, triples)?
            .with_closure_length(self.closure_length.max(other.closure_length)))
    }

    /// Copy with one more morphism.
    pub fn with_morphism(&self, f: Morphism<T>) -> Result<Self> {
        let mut morphisms = self.morphisms.clone();
        morphisms.push(f);
        Ok(PairingCategory::new(
            &self.ctx,
            self.objects.clone(),
            morphisms,
            self.omega.clone(),
            self.vb_dim,
            self.triples.clone(),
        )?
        .with_closure_length(self.closure_length))
    }
}

fn stack_rows<T: Field>(ctx: &T::Ctx, parts: &[Matrix<T>], cols: usize) -> Matrix<T> {
    let rows: Vec<Vec<T>> = parts.iter().flat_map(|m| m.to_rows()).collect();
    matrix_of(ctx, rows.len(), cols, &rows)
}

fn stack_cols<T: Field>(ctx: &T::Ctx, parts: &[Matrix<T>], rows: usize) -> Matrix<T> {
    let cols: Vec<Vec<T>> = parts.iter().flat_map(|m| m.columns()).collect();
    Matrix::from_columns(ctx, rows, &cols)
}

/// 0 -> A --inj--> B --surj--> C -> 0 with dim B = `mid`.
fn exact<T: Field>(field: &str, side: &str, inj: &Matrix<T>, surj: &Matrix<T>, mid: usize) -> Result<()> {
    let err = |msg: &str| Err(Error::validation(field.to_string(), format!("{side} realization: {msg}")));
    if !surj.mul(inj)?.is_zero() {
        return err("projection after embedding is not zero");
    }
    let (ri, rs) = (inj.rank(), surj.rank());
    if ri != inj.cols() {
        return err("embedding is not injective");
    }
    if rs != surj.rows() {
        return err("projection is not surjective");
    }
    if ri + rs != mid {
        return err(&format!("ranks {ri} + {rs} differ from {mid}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON presentation

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub name: String,
    pub dim_f: usize,
    pub dim_g: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub source: String,
    pub target: String,
    pub f: Vec<Vec<String>>,
    pub g: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleSpec {
    pub middle: String,
    pub m: usize,
    /// Dimensions (dim_F, dim_G) of X' and X''.
    pub sub: (usize, usize),
    pub quotient: (usize, usize),
    pub iota_f: Vec<Vec<Vec<String>>>,
    pub pi_f: Vec<Vec<Vec<String>>>,
    pub iota_g: Vec<Vec<Vec<String>>>,
    pub pi_g: Vec<Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum USpec {
    Named(String),
    Padic { p: u64, n: usize, precision: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodSpec {
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub morphisms: Vec<MorphismSpec>,
    /// Per object: dim_F rows of dim_G vectors in V_B.
    pub omega: BTreeMap<String, Vec<Vec<Vec<String>>>>,
    #[serde(default)]
    pub exact_triples: Vec<TripleSpec>,
    #[serde(rename = "U")]
    pub u: USpec,
    pub vb_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closure_length: Option<usize>,
}

fn parse_q_matrix(field: &str, rows: usize, cols: usize, m: &[Vec<String>]) -> Result<Matrix<BigRational>> {
    let parsed = m
        .iter()
        .map(|r| r.iter().map(|s| BigRational::parse(&(), s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::validation(field, e.to_string()))?;
    Matrix::from_rows_shaped(&(), rows, cols, parsed).map_err(|e| Error::validation(field, e.to_string()))
}

fn parse_u_matrix<T: Coefficient>(
    ctx: &T::Ctx,
    field: &str,
    rows: usize,
    cols: usize,
    m: &[Vec<String>],
) -> Result<Matrix<T>> {
    let parsed = m
        .iter()
        .map(|r| r.iter().map(|s| T::parse(ctx, s)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::validation(field, e.to_string()))?;
    Matrix::from_rows_shaped(ctx, rows, cols, parsed).map_err(|e| Error::validation(field, e.to_string()))
}

impl PeriodSpec {
    fn build<T: Coefficient>(&self, ctx: &T::Ctx) -> Result<PairingCategory<T>> {
        let objects: Vec<Object> =
            self.objects.iter().map(|o| Object { name: o.name.clone(), dim_f: o.dim_f, dim_g: o.dim_g }).collect();
        let find = |field: String, name: &str| {
            objects
                .iter()
                .position(|o| o.name == name)
                .ok_or_else(|| Error::validation(field, format!("unknown object {name:?}")))
        };
        if let Some(name) = self.omega.keys().find(|k| !objects.iter().any(|o| &o.name == *k)) {
            return Err(Error::validation("omega", format!("unknown object {name:?}")));
        }
        let mut morphisms = Vec::new();
        for (idx, m) in self.morphisms.iter().enumerate() {
            let field = format!("morphisms[{idx}]");
            let s = find(format!("{field}.source"), &m.source)?;
            let t = find(format!("{field}.target"), &m.target)?;
            let f = parse_q_matrix(&format!("{field}.f"), objects[t].dim_f, objects[s].dim_f, &m.f)?;
            let g = parse_u_matrix(ctx, &format!("{field}.g"), objects[s].dim_g, objects[t].dim_g, &m.g)?;
            morphisms.push(Morphism { source: s, target: t, f, g });
        }
        let mut omega = Vec::new();
        for o in &objects {
            let field = format!("omega.{}", o.name);
            let w = self.omega.get(&o.name).ok_or_else(|| Error::validation(&field, "missing comparison tensor"))?;
            if w.len() != o.dim_f || w.iter().any(|r| r.len() != o.dim_g) {
                return Err(Error::validation(field, format!("expected {}x{} vectors", o.dim_f, o.dim_g)));
            }
            let mut flat = Vec::new();
            for row in w {
                for v in row {
                    if v.len() != self.vb_dim {
                        return Err(Error::validation(&field, format!("vectors must have length {}", self.vb_dim)));
                    }
                    flat.push(
                        v.iter()
                            .map(|s| T::parse(ctx, s))
                            .collect::<Result<Vec<_>>>()
                            .map_err(|e| Error::validation(&field, e.to_string()))?,
                    );
                }
            }
            omega.push(flat);
        }
        let mut triples = Vec::new();
        for (idx, t) in self.exact_triples.iter().enumerate() {
            let field = format!("exact_triples[{idx}]");
            let middle = find(format!("{field}.middle"), &t.middle)?;
            let x = &objects[middle];
            let lens = [t.iota_f.len(), t.pi_f.len(), t.iota_g.len(), t.pi_g.len()];
            if t.m == 0 || lens.iter().any(|&l| l != t.m) {
                return Err(Error::validation(field, format!("expected {} component maps of each kind", t.m)));
            }
            let (sf, sg) = t.sub;
            let (qf, qg) = t.quotient;
            let q = |name: &str, j: usize, r, c, m: &[Vec<String>]| {
                parse_q_matrix(&format!("{field}.{name}[{j}]"), r, c, m)
            };
            let u = |name: &str, j: usize, r, c, m: &[Vec<String>]| {
                parse_u_matrix::<T>(ctx, &format!("{field}.{name}[{j}]"), r, c, m)
            };
            triples.push(ExactTriple {
                middle,
                m: t.m,
                sub_dims: t.sub,
                quotient_dims: t.quotient,
                iota_f: (0..t.m).map(|j| q("iota_f", j, x.dim_f, sf, &t.iota_f[j])).collect::<Result<_>>()?,
                pi_f: (0..t.m).map(|j| q("pi_f", j, qf, x.dim_f, &t.pi_f[j])).collect::<Result<_>>()?,
                iota_g: (0..t.m).map(|j| u("iota_g", j, sg, x.dim_g, &t.iota_g[j])).collect::<Result<_>>()?,
                pi_g: (0..t.m).map(|j| u("pi_g", j, x.dim_g, qg, &t.pi_g[j])).collect::<Result<_>>()?,
            });
        }
        let c = PairingCategory::new(ctx, objects, morphisms, omega, self.vb_dim, triples)?;
        Ok(match self.closure_length {
            Some(l) => c.with_closure_length(l),
            None => c,
        })
    }

    pub fn load(&self) -> Result<AnyCategory> {
        match &self.u {
            USpec::Named(s) if s == "Q" => Ok(AnyCategory::Rational(self.build::<BigRational>(&())?)),
            USpec::Named(s) => Err(Error::validation("U", format!("expected \"Q\" or {{p, n, precision}}, got {s:?}"))),
            USpec::Padic { p, n, precision } => {
                let ctx = make_context(*p, *n, *precision).map_err(|e| Error::validation("U", e.to_string()))?;
                Ok(AnyCategory::Padic(self.build::<PadicScalar>(&ctx)?))
            }
        }
    }
}

/// A category over whichever U the presentation declared.
#[derive(Debug, Clone)]
pub enum AnyCategory {
    Rational(PairingCategory<BigRational>),
    Padic(PairingCategory<PadicScalar>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DepthRow {
    /// None for the formal space.
    pub depth: Option<usize>,
    pub dim: usize,
    pub evaluation_rank: usize,
    pub injective: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub coefficients: String,
    pub ambient_dim: usize,
    pub rows: Vec<DepthRow>,
}

fn row_of<T: Coefficient>(v: DepthVerdict<T>) -> DepthRow {
    DepthRow {
        depth: v.depth,
        dim: v.space_dim,
        evaluation_rank: v.evaluation_rank,
        injective: v.injective,
        counterexample: v.counterexample.map(|terms| {
            terms.iter().map(|t| format!("({}) {}[{}, {}]", t.coeff, t.object, t.f_index, t.g_index)).collect()
        }),
    }
}

impl<T: Coefficient> PairingCategory<T> {
    /// Formal space followed by depths 1..=max_depth.
    pub fn report(&self, max_depth: usize) -> Result<PeriodReport> {
        let mut rows = vec![row_of(self.conjecture_formal()?)];
        for i in 1..=max_depth {
            rows.push(row_of(self.conjecture_at_depth(i)?));
        }
        Ok(PeriodReport { coefficients: T::tag(&self.ctx), ambient_dim: self.ambient_dim(), rows })
    }

    pub fn max_triple_width(&self) -> usize {
        self.triples.iter().map(|t| t.m).max().unwrap_or(0)
    }
}

impl AnyCategory {
    pub fn report(&self, max_depth: Option<usize>) -> Result<PeriodReport> {
        match self {
            AnyCategory::Rational(c) => c.report(max_depth.unwrap_or(c.max_triple_width().max(1))),
            AnyCategory::Padic(c) => c.report(max_depth.unwrap_or(c.max_triple_width().max(1))),
        }
    }
}

impl fmt::Display for PeriodReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "U = {}, ambient dimension {}", self.coefficients, self.ambient_dim)?;
        for r in &self.rows {
            let label = match r.depth {
                None => "formal".to_string(),
                Some(i) => format!("depth {i}"),
            };
            write!(
                f,
                "{label:>8}: dim {}, evaluation rank {}, {}",
                r.dim,
                r.evaluation_rank,
                if r.injective { "injective" } else { "not injective" }
            )?;
            if let Some(c) = &r.counterexample {
                write!(f, ", kernel {}", c.join(" + "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Rational matrix entries as strings, for building presentations in code.
pub fn q_strings(m: &Matrix<BigRational>) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(fmt_rational).collect()).collect()
}
