//! Checked `i64` helpers. Overflow is reported as [`Error::Overflow`] and
//! never wraps.

use crate::error::{Error, Result};

pub fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub fn sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// Product of several factors, failing on the first overflow.
pub fn product(factors: &[i64]) -> Result<i64> {
    factors.iter().try_fold(1i64, |acc, &f| mul(acc, f))
}

/// Exact division; `None` when `b` does not divide `a` (or `b = 0`).
pub fn exact_div(a: i64, b: i64) -> Option<i64> {
    if b == 0 || a % b != 0 {
        None
    } else {
        a.checked_div(b)
    }
}

pub fn gcd(a: i64, b: i64) -> u64 {
    num_integer::gcd(a.unsigned_abs(), b.unsigned_abs())
}

/// Largest odd divisor of `x`; `odd_part(0) = 0`.
pub fn odd_part(x: u64) -> u64 {
    if x == 0 {
        0
    } else {
        x >> x.trailing_zeros()
    }
}

pub fn to_i64(x: u64) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow)
}
