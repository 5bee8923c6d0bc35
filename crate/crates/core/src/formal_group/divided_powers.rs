use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic::PadicScalar;

/// Least valuation allowed in the divided-power domain: 1, or 2 when p = 2.
pub fn dp_valuation_floor(p: u64) -> i64 {
    if p == 2 {
        2
    } else {
        1
    }
}

fn check_domain(x: &PadicScalar, what: &str) -> Result<i64> {
    let p = x.context().p();
    let floor = dp_valuation_floor(p);
    match x.valuation() {
        None => Ok(i64::MAX),
        Some(v) if v >= floor => Ok(v),
        Some(v) => Err(Error::Divergent(format!("{what} has valuation {v}, need at least {floor}"))),
    }
}

/// x^k / k! for k = 0..count.
pub fn dp_exp_terms(x: &PadicScalar, count: usize) -> Result<Vec<PadicScalar>> {
    let ctx = x.context();
    let mut out = Vec::with_capacity(count);
    let mut power = PadicScalar::one(ctx);
    let mut fact = BigInt::from(1);
    for k in 0..count {
        if k > 0 {
            power = &power * x;
            fact *= k;
        }
        out.push(power.div(&PadicScalar::from_bigint(ctx, &fact))?);
    }
    Ok(out)
}

/// exp(x) = sum x^k / k! on the divided-power ideal.
pub fn dp_exp(x: &PadicScalar) -> Result<PadicScalar> {
    let v = check_domain(x, "exp argument")?;
    let ctx = x.context();
    if v == i64::MAX {
        return Ok(&PadicScalar::one(ctx) + x);
    }
    let p = ctx.p() as i64;
    let target = ctx.precision();
    // nu(x^k/k!) >= k v - (k - 1)/(p - 1)
    let mut count = 1usize;
    while (count as i64) * v - (count as i64 - 1) / (p - 1) <= target {
        count += 1;
    }
    let terms = dp_exp_terms(x, count + 1)?;
    Ok(terms.iter().fold(PadicScalar::zero(ctx), |acc, t| &acc + t))
}

/// log(y) = sum (-1)^{k-1} (y - 1)^k / k for y in 1 + (divided-power ideal).
pub fn dp_log(y: &PadicScalar) -> Result<PadicScalar> {
    let ctx = y.context();
    let z = y - &PadicScalar::one(ctx);
    let v = check_domain(&z, "log argument minus 1")?;
    if v == i64::MAX {
        return Ok(z);
    }
    let p = ctx.p();
    let target = ctx.precision();
    let mut acc = PadicScalar::zero(ctx);
    let mut power = PadicScalar::one(ctx);
    let mut k: u64 = 1;
    loop {
        power = &power * &z;
        let term = power.div(&PadicScalar::from_int(ctx, k as i64))?;
        acc = if k % 2 == 1 { &acc + &term } else { &acc - &term };
        // nu of later terms is at least j v - log_p j
        let j = k + 1;
        let mut logp = 0i64;
        let mut pk = 1u64;
        while pk * p <= j {
            pk *= p;
            logp += 1;
        }
        if (j as i64) * v - logp > target {
            return Ok(acc);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::make_context;

    #[test]
    fn exp_of_zero_and_inverse() {
        let ctx = make_context(5, 1, 12).unwrap();
        assert_eq!(dp_exp(&PadicScalar::zero(&ctx)).unwrap(), PadicScalar::one(&ctx));
        let x = PadicScalar::from_int(&ctx, 5 * 7);
        assert_eq!(dp_log(&dp_exp(&x).unwrap()).unwrap(), x);
    }

    #[test]
    fn domain() {
        let ctx = make_context(2, 1, 12).unwrap();
        assert!(dp_exp(&PadicScalar::from_int(&ctx, 2)).is_err());
        let x = PadicScalar::from_int(&ctx, 12);
        assert_eq!(dp_log(&dp_exp(&x).unwrap()).unwrap(), x);
    }
}
