//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Ghost components w_k = sum_{j <= k} p^j a_j^(p^(k-j)) of integer lifts.
pub fn ghost(a: &[BigInt], p: u64) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    (0..a.len())
        .map(|k| (0..=k).fold(BigInt::zero(), |acc, j| acc + pb.pow(j as u32) * a[j].pow(p.pow((k - j) as u32) as u32)))
        .collect()
}

/// Integer Witt coordinates with the given ghost components.
pub fn unghost(w: &[BigInt], p: u64) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let mut s: Vec<BigInt> = Vec::with_capacity(w.len());
    for k in 0..w.len() {
        let partial =
            (0..k).fold(BigInt::zero(), |acc, j| acc + pb.pow(j as u32) * s[j].pow(p.pow((k - j) as u32) as u32));
        let (q, r) = (&w[k] - partial).div_rem(&pb.pow(k as u32));
        assert!(r.is_zero(), "ghost components are not in the image");
        s.push(q);
    }
    s
}

#[derive(Clone, Copy)]
pub enum GhostOp {
    Add,
    Sub,
    Mul,
}

/// Witt operation over F_p computed through ghost components over Z.
pub fn ghost_op(x: &[u64], y: &[u64], p: u64, op: GhostOp) -> Vec<u64> {
    let lift = |v: &[u64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
    let (gx, gy) = (ghost(&lift(x), p), ghost(&lift(y), p));
    let w: Vec<BigInt> = gx
        .iter()
        .zip(&gy)
        .map(|(a, b)| match op {
            GhostOp::Add => a + b,
            GhostOp::Sub => a - b,
            GhostOp::Mul => a * b,
        })
        .collect();
    let pb = BigInt::from(p);
    unghost(&w, p)
        .iter()
        .map(|c| {
            let r = c.mod_floor(&pb);
            u64::try_from(r).unwrap()
        })
        .collect()
}

/// Every digit vector of length m over {0, .., p-1}.
pub fn all_digit_vectors(p: u64, m: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..p).map(move |d| {
                    let mut w = v.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out
}

/// Legendre: nu_p(n!) = sum floor(n / p^k).
pub fn legendre(n: u64, p: u64) -> u64 {
    let mut s = 0;
    let mut q = p;
    while q <= n {
        s += n / q;
        q *= p;
    }
    s
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Rank of a rational matrix by plain Gaussian elimination.
pub fn rank_q(mut rows: Vec<Vec<num_rational::BigRational>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(pr) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(rank, pr);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && !row[c].is_zero() {
                let f = &row[c] / &pivot[c];
                for j in 0..cols {
                    row[j] = &row[j] - &f * &pivot[j];
                }
            }
        }
        rank += 1;
    }
    rank
}
