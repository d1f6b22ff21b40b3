//! Exact rational scalars and small numeric helpers shared across modules.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the exact code paths.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses "p/q", "p", or a decimal like "-1.25" into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::InvalidInput("empty rational literal".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad numerator in {s:?}")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad denominator in {s:?}")))?;
        if den.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| Error::InvalidInput(format!("bad decimal in {s:?}")))?
        };
        let frac_digits = frac.trim();
        let frac_part: BigInt = if frac_digits.is_empty() {
            BigInt::zero()
        } else {
            frac_digits
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad decimal in {s:?}")))?
        };
        let scale = BigInt::from(10u32).pow(frac_digits.len() as u32);
        let mut val = Q::new(int_part.magnitude().clone().into(), BigInt::one())
            + Q::new(frac_part, scale);
        if neg {
            val = -val;
        }
        return Ok(val);
    }
    let num: BigInt = s
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad rational literal {s:?}")))?;
    Ok(Q::from_integer(num))
}

/// Renders a rational as "p" or "p/q".
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division for very large operands.
        let n = x.numer();
        let d = x.denom();
        let shift = (n.bits() as i64 - d.bits() as i64).max(0);
        let scaled = (n << 64u32) / d;
        scaled.to_f64().map(|v| v / 2f64.powi(64)).unwrap_or(if shift > 0 {
            f64::INFINITY * (if n.sign() == Sign::Minus { -1.0 } else { 1.0 })
        } else {
            0.0
        })
    })
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via the continued fraction expansion.
pub fn rationalize(x: f64, max_den: u64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut x = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (
        BigInt::zero(),
        BigInt::one(),
        BigInt::one(),
        BigInt::zero(),
    );
    for _ in 0..64 {
        let a = x.floor();
        if a > 1e18 {
            break;
        }
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if q2 > BigInt::from(max_den) {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = x - a;
        if frac < 1e-15 {
            break;
        }
        x = 1.0 / frac;
    }
    if q1.is_zero() {
        return None;
    }
    let mut r = Q::new(p1, q1);
    if neg {
        r = -r;
    }
    Some(r)
}

/// Floor of √n for a nonnegative integer.
fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// A rational upper bound for √x (x ≥ 0).
pub fn sqrt_upper(x: &Q) -> Q {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return Q::zero();
    }
    // √(p/q) = √(pq)/q ≤ (⌊√(pq)⌋+1)/q
    let pq = x.numer() * x.denom();
    Q::new(isqrt(&pq) + 1, x.denom().clone())
}

/// A rational lower bound for √x (x ≥ 0).
pub fn sqrt_lower(x: &Q) -> Q {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return Q::zero();
    }
    let pq = x.numer() * x.denom();
    Q::new(isqrt(&pq), x.denom().clone())
}

/// Exact test whether a nonnegative rational is the square of a rational,
/// returning the square root if so.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(Q::zero());
    }
    let ns = isqrt(x.numer());
    let ds = isqrt(x.denom());
    if &ns * &ns == *x.numer() && &ds * &ds == *x.denom() {
        Some(Q::new(ns, ds))
    } else {
        None
    }
}

/// Least common multiple of the denominators of a slice of rationals.
pub fn common_denominator(xs: &[Q]) -> BigInt {
    let mut l = BigInt::one();
    for x in xs {
        l = l.lcm(x.denom());
    }
    l
}

/// Volume of the d-dimensional unit ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}
