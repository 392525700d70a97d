//! Exact integer and rational combinatorics on top of `num-bigint`.
//!
//! All closed-form identities in this crate are tested as exact rational
//! equalities; floating point enters only for limits and Monte Carlo
//! estimates.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `k!` as a big integer.
pub fn factorial(k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for x in 2..=k {
        acc *= x;
    }
    acc
}

/// Double factorial `k!! = k (k-2) (k-4) ...` with `0!! = (-1)!! = 1`.
pub fn double_factorial(k: i64) -> BigInt {
    if k <= 0 {
        return BigInt::one();
    }
    let mut acc = BigInt::one();
    let mut x = k;
    while x > 1 {
        acc *= x;
        x -= 2;
    }
    acc
}

/// Falling factorial `[x]_m = x (x-1) ... (x-m+1)`.
pub fn falling(x: i64, m: u64) -> BigInt {
    let mut acc = BigInt::one();
    for s in 0..m as i64 {
        acc *= x - s;
    }
    acc
}

/// Binomial coefficient; zero outside `0 <= b <= a`.
pub fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for s in 0..b {
        num *= a - s;
        den *= s + 1;
    }
    num / den
}

/// Integer power with `i64` base.
pub fn int_pow(base: i64, exp: u64) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

/// Number of equitable colourings: `(cq)! / (q!)^c`.
pub fn equitable_colouring_count(colours: u64, q: u64) -> BigInt {
    factorial(colours * q) / factorial(q).pow(colours as u32)
}

/// Build a rational from big-int parts.
pub fn frac(numer: BigInt, denom: BigInt) -> BigRational {
    BigRational::new(numer, denom)
}

/// Rational from machine integers.
pub fn frac_i64(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Canonical `numer/denom` string (denominator always printed).
pub fn frac_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Natural log of a positive big integer, accurate to f64 precision.
pub fn big_ln(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "big_ln needs a positive argument");
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().ln();
    }
    // Keep the top 64 bits as mantissa and account for the shift.
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// `f64` value of a rational, via logs when the parts overflow f64.
pub fn frac_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64() {
        if v.is_finite() && v != 0.0 {
            return v;
        }
    }
    let sign = match r.numer().sign() {
        Sign::Minus => -1.0,
        _ => 1.0,
    };
    sign * (big_ln(&r.numer().abs()) - big_ln(r.denom())).exp()
}

/// Natural log of a positive rational.
pub fn frac_ln(r: &BigRational) -> f64 {
    assert!(r.is_positive(), "frac_ln needs a positive argument");
    big_ln(r.numer()) - big_ln(r.denom())
}
