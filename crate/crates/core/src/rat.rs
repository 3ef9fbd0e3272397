//! Exact rational scalars and small parsing/formatting helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Exact rational scalar used throughout the algebraic layers.
pub type Rat = BigRational;

/// `p/q` as an exact rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Integer `n` as an exact rational.
pub fn rint(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Parses the exact-rational string syntax `p/q` (or a bare integer `p`).
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational `{s}`"))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational `{s}`"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rat::new(p, q))
}

/// Lossy conversion to `f64` for the numerical layers.
pub fn to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of approximations for extreme operands.
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sum of squares of the entries, i.e. the squared euclidean norm in the
/// fixed orthonormal basis.
pub fn norm_sq(v: &[Rat]) -> Rat {
    v.iter().map(|x| x * x).fold(Rat::zero(), |a, b| a + b)
}

/// Exact dot product.
pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .fold(Rat::zero(), |acc, t| acc + t)
}

/// True when every coordinate is an integer.
pub fn all_integer(v: &[Rat]) -> bool {
    v.iter().all(|x| x.denom() == &BigInt::from(1))
}

/// Absolute value.
pub fn rabs(r: &Rat) -> Rat {
    r.abs()
}
