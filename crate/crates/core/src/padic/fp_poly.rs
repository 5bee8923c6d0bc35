//! Dense polynomials over the prime field F_p, coefficients stored low degree first.
//!
//! Only what the context construction needs: products, division, gcd,
//! modular exponentiation and Rabin's irreducibility test.

pub(crate) type FpPoly = Vec<u64>;

#[inline]
pub(crate) fn mul_mod_p(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod_p(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_p(acc, base, p);
        }
        base = mul_mod_p(base, base, p);
        exp >>= 1;
    }
    acc
}

pub(crate) fn inv_mod_p(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        None
    } else {
        Some(pow_mod_p(a, p - 2, p))
    }
}

pub(crate) fn trim(mut f: FpPoly) -> FpPoly {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub(crate) fn degree(f: &[u64]) -> Option<usize> {
    f.iter().rposition(|&c| c != 0)
}

#[cfg(test)]
pub(crate) fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y % p) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod_p(x, y, p)) % p;
        }
    }
    trim(out)
}

/// Quotient and remainder; panics on a zero divisor.
pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let db = degree(b).expect("division by the zero polynomial");
    let lead_inv = inv_mod_p(b[db], p).expect("leading coefficient is a unit");
    let mut r = trim(a.to_vec());
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = mul_mod_p(r[dr], lead_inv, p);
        let shift = dr - db;
        q[shift] = c;
        for (j, &bj) in b.iter().enumerate().take(db + 1) {
            let t = mul_mod_p(c, bj, p);
            r[shift + j] = (r[shift + j] + p - t) % p;
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub(crate) fn rem(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    divrem(a, b, p).1
}

pub(crate) fn make_monic(f: &[u64], p: u64) -> FpPoly {
    match degree(f) {
        None => Vec::new(),
        Some(d) => {
            let inv = inv_mod_p(f[d], p).expect("nonzero leading coefficient");
            trim(f.iter().map(|&c| mul_mod_p(c, inv, p)).collect())
        }
    }
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    make_monic(&a, p)
}

/// Returns (g, s, t) with s*a + t*b = g, g monic.
pub(crate) fn xgcd(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly, FpPoly) {
    let (mut r0, mut r1) = (trim(a.to_vec()), trim(b.to_vec()));
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&q, &s1, p), p);
        let t2 = sub(&t0, &mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if let Some(d) = degree(&r0) {
        let inv = inv_mod_p(r0[d], p).unwrap();
        let scale = |v: &[u64]| trim(v.iter().map(|&c| mul_mod_p(c, inv, p)).collect());
        (scale(&r0), scale(&s0), scale(&t0))
    } else {
        (r0, s0, t0)
    }
}

/// base^exp mod (f, p) for a monic f.
pub(crate) fn pow_mod(base: &[u64], mut exp: u128, f: &[u64], p: u64) -> FpPoly {
    let mut acc = vec![1u64];
    let mut b = rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), f, p);
        }
        b = rem(&mul(&b, &b, p), f, p);
        exp >>= 1;
    }
    trim(acc)
}

/// Rabin's test: f of degree n is irreducible iff gcd(x^{p^i} - x, f) = 1 for 1 <= i <= n/2.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let n = match degree(f) {
        Some(0) | None => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let mut xp = x.clone();
    for _ in 1..=n / 2 {
        xp = pow_mod(&xp, p as u128, f, p);
        let h = sub(&xp, &x, p);
        if degree(&gcd(&h, f, p)) != Some(0) {
            return false;
        }
    }
    true
}

/// Lexicographically first monic irreducible polynomial of degree n over F_p.
///
/// Candidates x^n + c_{n-1}x^{n-1} + ... + c_0 are enumerated by the integer
/// c_0 + c_1 p + ... + c_{n-1} p^{n-1} in increasing order.
pub(crate) fn first_irreducible(p: u64, n: usize) -> Option<FpPoly> {
    let count = (p as u128).checked_pow(n as u32)?;
    for k in 0..count {
        let mut f = Vec::with_capacity(n + 1);
        let mut rest = k;
        for _ in 0..n {
            f.push((rest % p as u128) as u64);
            rest /= p as u128;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return Some(f);
        }
    }
    None
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}
