//! Unramified p-adic fields Q_q at fixed absolute precision.

mod context;
pub(crate) mod fp_poly;
mod fq;
mod parse;
mod scalar;

pub use context::{make_context, Context, ContextSpec, UnramifiedContext};
pub use fq::FqElement;
pub use parse::parse_scalar;
pub use scalar::{teichmuller, PadicScalar};

/// Exact rational in lowest terms with positive denominator.
pub type Rational = num_rational::Ratio<i64>;

/// Builds a context from its serialized form, checking a supplied modulus.
pub fn context_from_spec(spec: &ContextSpec) -> crate::Result<Context> {
    let ctx = make_context(spec.p, spec.n, spec.precision)?;
    if let Some(m) = &spec.modulus {
        if m.as_slice() != ctx.modulus() {
            return Err(crate::Error::validation(
                "modulus",
                format!("expected the canonical modulus {:?}", ctx.modulus()),
            ));
        }
    }
    Ok(ctx)
}

/// nu(n!) by Legendre's formula.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    let mut v = 0;
    let mut pk = p;
    while pk <= n {
        v += n / pk;
        pk = match pk.checked_mul(p) {
            Some(x) => x,
            None => break,
        };
    }
    v
}
