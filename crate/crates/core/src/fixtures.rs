//! Worked examples and random instance generators shared by tests, benches
//! and the CLI.

use num_rational::BigRational;
use rand::Rng;

use crate::error::Result;
use crate::filtered::{FilteredIsocrystal, Filtration};
use crate::isocrystal::{simple_isocrystal, Isocrystal, PMatrix};
use crate::linalg::{rat, rational_matrix, Matrix};
use crate::padic::{make_context, Context, PadicScalar};
use crate::periods::{ExactTriple, Morphism, Object, PairingCategory};

type Q = BigRational;

/// [[p-1, (p+1)i], [(p+1)i, -(p-1)]] over Q_{p^2}, p = 3 mod 4, where g = i.
pub fn katz(p: u64, precision: u32) -> Result<Isocrystal> {
    let ctx = make_context(p, 2, precision)?;
    let i = PadicScalar::generator(&ctx);
    let a = PadicScalar::from_int(&ctx, p as i64 - 1);
    let b = &PadicScalar::from_int(&ctx, p as i64 + 1) * &i;
    Isocrystal::from_rows(&ctx, vec![vec![a.clone(), b.clone()], vec![b, a.neg()]])
}

/// sigma + p sigma.
pub fn ordinary_elliptic(ctx: &Context) -> Result<Isocrystal> {
    Isocrystal::diagonal_powers(ctx, &[0, 1])
}

fn column(ctx: &Context, entries: &[i64]) -> PMatrix {
    Matrix::from_fn(ctx, entries.len(), 1, |i, _| PadicScalar::from_int(ctx, entries[i]))
}

/// Rank one with F = p^k sigma and Fil^1 = N when `fil1` holds, else Fil^0 = N, Fil^1 = 0.
pub fn rank_one(ctx: &Context, k: i64, fil1: bool) -> Result<FilteredIsocrystal> {
    let base = Isocrystal::diagonal_powers(ctx, &[k])?;
    let fil = if fil1 { Filtration::two_step(ctx, 1, column(ctx, &[1]))? } else { Filtration::trivial(ctx, 1) };
    FilteredIsocrystal::new(base, fil)
}

/// 1_FD: F = sigma, Fil^0 = N, Fil^1 = 0.
pub fn unit_object(ctx: &Context) -> Result<FilteredIsocrystal> {
    rank_one(ctx, 0, false)
}

/// Simple summands with slopes in (0, 1] used by the admissible generator.
const POSITIVE_SIMPLES: [(usize, i64); 4] = [(1, 1), (2, 1), (3, 1), (3, 2)];

/// A filtered isocrystal with all slopes in (0, 1], jumps {0, 1} and
/// dim Fil^1 = t_N, Fil^1 spanned by random small-integer vectors.
/// Admissibility is not guaranteed; callers filter by verdict.
pub fn random_positive_candidate<R: Rng + ?Sized>(
    ctx: &Context,
    rng: &mut R,
    max_dim: usize,
) -> Result<FilteredIsocrystal> {
    let mut base = Isocrystal::zero_dimensional(ctx);
    let mut t_n = 0i64;
    loop {
        let (r, d) = POSITIVE_SIMPLES[rng.gen_range(0..POSITIVE_SIMPLES.len())];
        if base.dim() > 0 && base.dim() + r > max_dim {
            break;
        }
        base = base.direct_sum(&simple_isocrystal(ctx, r, d)?)?;
        t_n += d;
        if base.dim() >= max_dim || rng.gen_bool(0.4) {
            break;
        }
    }
    let dim = base.dim();
    loop {
        let fil1 = Matrix::from_fn(ctx, dim, t_n as usize, |_, _| PadicScalar::from_int(ctx, rng.gen_range(-4..=4)));
        if fil1.rank() == t_n as usize {
            return FilteredIsocrystal::new(base, Filtration::two_step(ctx, dim, fil1)?);
        }
    }
}

/// Draws candidates until `count` are certified weakly admissible.
pub fn random_admissible<R: Rng + ?Sized>(
    ctx: &Context,
    rng: &mut R,
    count: usize,
    max_dim: usize,
) -> Result<Vec<FilteredIsocrystal>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = random_positive_candidate(ctx, rng, max_dim)?;
        if c.weak_admissibility()?.is_admissible() {
            out.push(c);
        }
    }
    Ok(out)
}

fn obj(name: &str, dim_f: usize, dim_g: usize) -> Object {
    Object { name: name.into(), dim_f, dim_g }
}

fn vb(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| rat(x, 1)).collect()
}

/// Kummer-shaped toy category over U = Q with V_B = span(t, 1).
///
/// M has F-basis (x1, x2) and G-basis (w1, w2) with periods
/// <x1,w1> = t, <x2,w2> = 1 and the other two zero. T and L are the
/// torus and lattice parts with periods t and 1. The canonical sequence
/// 0 -> T -> M -> L -> 0 is a width-1 triple; a width-2 triple kills
/// x2 (x) w1. With `morphisms` the inclusion and projection are added.
pub fn kummer_pattern(morphisms: bool) -> PairingCategory<Q> {
    let objects = vec![obj("M", 2, 2), obj("T", 1, 1), obj("L", 1, 1)];
    let inc =
        Morphism { source: 1, target: 0, f: rational_matrix(&[vec![1], vec![0]]), g: rational_matrix(&[vec![1, 0]]) };
    let proj =
        Morphism { source: 0, target: 2, f: rational_matrix(&[vec![0, 1]]), g: rational_matrix(&[vec![0], vec![1]]) };
    let canonical = ExactTriple {
        middle: 0,
        m: 1,
        sub_dims: (1, 1),
        quotient_dims: (1, 1),
        iota_f: vec![inc.f.clone()],
        pi_f: vec![proj.f.clone()],
        iota_g: vec![inc.g.clone()],
        pi_g: vec![proj.g.clone()],
    };
    // X' = (1, 1) embedded as (x2, 0); X'' = (3, 3) with G(X'') = {(a w1, g2)}.
    let width_two = ExactTriple {
        middle: 0,
        m: 2,
        sub_dims: (1, 1),
        quotient_dims: (3, 3),
        iota_f: vec![rational_matrix(&[vec![0], vec![1]]), rational_matrix(&[vec![0], vec![0]])],
        pi_f: vec![
            rational_matrix(&[vec![1, 0], vec![0, 0], vec![0, 0]]),
            rational_matrix(&[vec![0, 0], vec![1, 0], vec![0, 1]]),
        ],
        iota_g: vec![rational_matrix(&[vec![0, 1]]), rational_matrix(&[vec![0, 0]])],
        pi_g: vec![rational_matrix(&[vec![1, 0, 0], vec![0, 0, 0]]), rational_matrix(&[vec![0, 1, 0], vec![0, 0, 1]])],
    };
    let omega = vec![vec![vb(&[1, 0]), vb(&[0, 0]), vb(&[0, 0]), vb(&[0, 1])], vec![vb(&[1, 0])], vec![vb(&[0, 1])]];
    let morphs = if morphisms { vec![inc, proj] } else { vec![] };
    PairingCategory::new(&(), objects, morphs, omega, 2, vec![canonical, width_two]).expect("fixture is valid")
}

/// One object with dims (a, b) and an endomorphism acting as lambda on F and mu on G.
pub fn scalar_endomorphism(a: usize, b: usize, lambda: i64, mu: i64) -> PairingCategory<Q> {
    let f = Morphism {
        source: 0,
        target: 0,
        f: Matrix::diagonal(&(), &vec![rat(lambda, 1); a]),
        g: Matrix::diagonal(&(), &vec![rat(mu, 1); b]),
    };
    let omega = vec![vec![vec![rat(0, 1)]; a * b]];
    PairingCategory::new(&(), vec![obj("X", a, b)], vec![f], omega, 1, vec![]).expect("fixture is valid")
}

fn random_q_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<Q> {
    Matrix::from_fn(&(), rows, cols, |_, _| rat(rng.gen_range(-3..=3), 1))
}

fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix<Q> {
    loop {
        let m = random_q_matrix(rng, n, n);
        if m.rank() == n {
            return m;
        }
    }
}

/// One object with random endomorphisms.
///
/// When dim_F = dim_G the periods form a random invertible matrix W and each
/// endomorphism is (A, W^-1 A^T W), which makes omega natural; otherwise
/// omega is zero and the endomorphisms are arbitrary.
pub fn random_single_object<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> PairingCategory<Q> {
    let a = rng.gen_range(1..=max_dim);
    let b = if rng.gen_bool(0.5) { a } else { rng.gen_range(1..=max_dim) };
    let count = rng.gen_range(0..=3);
    let (omega, morphisms) = if a == b {
        let w = random_invertible(rng, a);
        let w_inv = w.inverse().expect("invertible");
        let morphisms = (0..count)
            .map(|_| {
                let f = random_q_matrix(rng, a, a);
                let g = w_inv.mul(&f.transpose()).and_then(|m| m.mul(&w)).expect("square");
                Morphism { source: 0, target: 0, f, g }
            })
            .collect();
        let omega = (0..a * b).map(|idx| vec![w.get(idx / b, idx % b).clone()]).collect();
        (omega, morphisms)
    } else {
        let morphisms = (0..count)
            .map(|_| Morphism { source: 0, target: 0, f: random_q_matrix(rng, a, a), g: random_q_matrix(rng, b, b) })
            .collect();
        (vec![vec![rat(0, 1)]; a * b], morphisms)
    };
    PairingCategory::new(&(), vec![obj("X", a, b)], morphisms, vec![omega], 1, vec![])
        .expect("generated category is valid")
}

/// Split a stacked (m*rows) x cols matrix into m blocks.
fn split_rows(m: &Matrix<Q>, parts: usize) -> Vec<Matrix<Q>> {
    let h = m.rows() / parts;
    (0..parts).map(|j| m.select_rows(&(j * h..(j + 1) * h).collect::<Vec<_>>())).collect()
}

fn split_cols(m: &Matrix<Q>, parts: usize) -> Vec<Matrix<Q>> {
    let w = m.cols() / parts;
    (0..parts).map(|j| m.select_columns(&(j * w..(j + 1) * w).collect::<Vec<_>>())).collect()
}

/// Rows spanning the left kernel of `m` (as a matrix).
fn left_kernel(m: &Matrix<Q>) -> Matrix<Q> {
    let k = m.transpose().kernel();
    let cols = m.rows();
    Matrix::from_fn(&(), k.len(), cols, |i, j| k[i][j].clone())
}

fn random_full_column_rank<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix<Q> {
    loop {
        let m = random_q_matrix(rng, rows, cols);
        if m.rank() == cols {
            return m;
        }
    }
}

/// A random exact triple of width m around an object of dims (a, b).
fn random_triple<R: Rng + ?Sized>(rng: &mut R, middle: usize, a: usize, b: usize, m: usize) -> ExactTriple<Q> {
    let sf = rng.gen_range(0..=m * a);
    let qg = rng.gen_range(0..=m * b);
    let iota_f = random_full_column_rank(rng, m * a, sf);
    let pi_f = left_kernel(&iota_f);
    let pi_g = random_full_column_rank(rng, m * b, qg);
    let iota_g = left_kernel(&pi_g);
    ExactTriple {
        middle,
        m,
        sub_dims: (sf, iota_g.rows()),
        quotient_dims: (pi_f.rows(), qg),
        iota_f: split_rows(&iota_f, m),
        pi_f: split_cols(&pi_f, m),
        iota_g: split_cols(&iota_g, m),
        pi_g: split_rows(&pi_g, m),
    }
}

/// Up to three objects, random morphisms, random triples of width <= 3 and
/// a zero comparison tensor (so every relation is compatible with omega).
pub fn random_category<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> PairingCategory<Q> {
    let n = rng.gen_range(1..=3);
    let objects: Vec<Object> =
        (0..n).map(|x| obj(&format!("X{x}"), rng.gen_range(1..=max_dim), rng.gen_range(1..=max_dim))).collect();
    let morphisms = (0..rng.gen_range(0..=3))
        .map(|_| {
            let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
            Morphism {
                source: s,
                target: t,
                f: random_q_matrix(rng, objects[t].dim_f, objects[s].dim_f),
                g: random_q_matrix(rng, objects[s].dim_g, objects[t].dim_g),
            }
        })
        .collect();
    let triples = (0..rng.gen_range(0..=3))
        .map(|_| {
            let x = rng.gen_range(0..n);
            let m = rng.gen_range(1..=3);
            random_triple(rng, x, objects[x].dim_f, objects[x].dim_g, m)
        })
        .collect();
    let omega = objects.iter().map(|o| vec![vec![rat(0, 1)]; o.dim_f * o.dim_g]).collect();
    PairingCategory::new(&(), objects, morphisms, omega, 1, triples)
        .expect("generated category is valid")
        .with_closure_length(3)
}
