//! Polynomials over F_q and linear Hensel lifting of coprime factorizations
//! to Z_q. Polynomials are stored low degree first.

use crate::error::{Error, Result};
use crate::padic::{Context, FqElement, PadicScalar};

pub(crate) type ResPoly = Vec<FqElement>;
pub(crate) type ZqPoly = Vec<PadicScalar>;

fn trim(mut f: ResPoly) -> ResPoly {
    while f.last().is_some_and(|c| c.is_zero()) {
        f.pop();
    }
    f
}

fn deg(f: &[FqElement]) -> Option<usize> {
    f.iter().rposition(|c| !c.is_zero())
}

fn add(a: &[FqElement], b: &[FqElement], ctx: &Context) -> ResPoly {
    let n = a.len().max(b.len());
    let z = FqElement::zero(ctx);
    trim((0..n).map(|i| a.get(i).unwrap_or(&z).add(b.get(i).unwrap_or(&z)).unwrap()).collect())
}

fn sub(a: &[FqElement], b: &[FqElement], ctx: &Context) -> ResPoly {
    let nb: ResPoly = b.iter().map(|c| c.neg()).collect();
    add(a, &nb, ctx)
}

fn mul(a: &[FqElement], b: &[FqElement], ctx: &Context) -> ResPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![FqElement::zero(ctx); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y).unwrap()).unwrap();
        }
    }
    trim(out)
}

fn divrem(a: &[FqElement], b: &[FqElement], ctx: &Context) -> (ResPoly, ResPoly) {
    let db = deg(b).expect("nonzero divisor");
    let lead_inv = b[db].inv().unwrap();
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![FqElement::zero(ctx); r.len() - db];
    while let Some(dr) = deg(&r) {
        if dr < db {
            break;
        }
        let c = r[dr].mul(&lead_inv).unwrap();
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            r[shift + j] = r[shift + j].sub(&c.mul(bj).unwrap()).unwrap();
        }
        q[shift] = c;
        r = trim(r);
    }
    (trim(q), r)
}

/// (g, s, t) with s a + t b = g and g monic.
fn xgcd(a: &[FqElement], b: &[FqElement], ctx: &Context) -> (ResPoly, ResPoly, ResPoly) {
    let one = vec![FqElement::one(ctx)];
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1) = (one.clone(), Vec::new());
    let (mut t0, mut t1) = (Vec::new(), one);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, ctx);
        let s2 = sub(&s0, &mul(&q, &s1, ctx), ctx);
        let t2 = sub(&t0, &mul(&q, &t1, ctx), ctx);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    match deg(&r0) {
        Some(d) => {
            let inv = vec![r0[d].inv().unwrap()];
            (mul(&r0, &inv, ctx), mul(&s0, &inv, ctx), mul(&t0, &inv, ctx))
        }
        None => (r0, s0, t0),
    }
}

pub(crate) fn reduce(f: &[PadicScalar]) -> Result<ResPoly> {
    Ok(trim(f.iter().map(|c| c.residue()).collect::<Result<Vec<_>>>()?))
}

fn lift(f: &[FqElement], len: usize, ctx: &Context) -> ZqPoly {
    let mut out: ZqPoly = f.iter().map(PadicScalar::lift).collect();
    out.resize(len.max(f.len()), PadicScalar::zero(ctx));
    out
}

fn zq_mul(a: &[PadicScalar], b: &[PadicScalar], ctx: &Context) -> ZqPoly {
    let mut out = vec![PadicScalar::zero(ctx); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Splits an integral polynomial h with h = g0 k0 mod p, g0 monic and coprime
/// to k0 modulo p, into h = g k with g monic lifting g0. Lifting stops at
/// the precision carried by h (at most the context precision).
pub(crate) fn hensel_split(h: &[PadicScalar], g0: &[FqElement], k0: &[FqElement]) -> Result<(ZqPoly, ZqPoly)> {
    let ctx = h[0].context().clone();
    let dh = h.len() - 1;
    let dg = deg(g0).ok_or_else(|| Error::SlopeFactorizationFailed("empty factor".into()))?;
    if dg > dh {
        return Err(Error::SlopeFactorizationFailed("factor degree exceeds polynomial degree".into()));
    }
    let (gcd, s, t) = xgcd(g0, k0, &ctx);
    if deg(&gcd) != Some(0) {
        return Err(Error::SlopeFactorizationFailed("factors are not coprime modulo p".into()));
    }
    let mut g = lift(g0, dg + 1, &ctx);
    let mut k = lift(k0, dh - dg + 1, &ctx);
    if k.len() > dh - dg + 1 {
        return Err(Error::SlopeFactorizationFailed("cofactor degree too large".into()));
    }
    let target = h.iter().map(|c| c.precision()).min().unwrap_or(0).min(ctx.precision());
    for step in 1..target {
        let prod = zq_mul(&g, &k, &ctx);
        let pt = PadicScalar::p_power(&ctx, step);
        let mut a = Vec::with_capacity(dh + 1);
        for i in 0..=dh {
            let e = &h[i] - prod.get(i).unwrap_or(&PadicScalar::zero(&ctx));
            if e.valuation_bound() < step {
                return Err(Error::SlopeFactorizationFailed(format!("lifting residue has valuation below {step}")));
            }
            a.push(e.div(&pt)?.residue()?);
        }
        let a = trim(a);
        if a.is_empty() {
            continue;
        }
        let (q, dgp) = divrem(&mul(&t, &a, &ctx), g0, &ctx);
        let dkp = add(&mul(&s, &a, &ctx), &mul(&q, k0, &ctx), &ctx);
        if dkp.len() > k.len() {
            return Err(Error::SlopeFactorizationFailed("cofactor correction overflows its degree".into()));
        }
        for (i, c) in dgp.iter().enumerate() {
            g[i] = &g[i] + &(&pt * &PadicScalar::lift(c));
        }
        for (i, c) in dkp.iter().enumerate() {
            k[i] = &k[i] + &(&pt * &PadicScalar::lift(c));
        }
    }
    let g = g.iter().map(|c| c.truncate(target)).collect();
    let k = k.iter().map(|c| c.truncate(target)).collect();
    Ok((g, k))
}

/// Splits off the monic factor of h whose reduction is the y-free part of
/// `h mod p` (unit roots), returning it. `h` must be primitive.
pub(crate) fn unit_root_factor(h: &[PadicScalar]) -> Result<ZqPoly> {
    let ctx = h[0].context().clone();
    let hb = reduce(h)?;
    let d = deg(&hb).ok_or_else(|| Error::SlopeFactorizationFailed("polynomial vanishes mod p".into()))?;
    // first split: the constant leading part carrying roots of negative valuation
    let lead = hb[d].clone();
    let gbar = mul(&hb, &[lead.inv().unwrap()], &ctx);
    let (g, _) = hensel_split(h, &gbar, &[lead])?;
    // second split: y^m times a factor with nonzero constant term
    let low = gbar.iter().position(|c| !c.is_zero()).unwrap();
    if low == 0 {
        return Ok(g);
    }
    let ubar: ResPoly = gbar[low..].to_vec();
    let mut ym = vec![FqElement::zero(&ctx); low + 1];
    ym[low] = FqElement::one(&ctx);
    let (u, _) = hensel_split(&g, &ubar, &ym)?;
    Ok(u)
}
