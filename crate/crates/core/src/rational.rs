//! Exact rationals and their `p/q` text form.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Reduced `p/q`, or `p` for integers.
pub fn fmt_q(v: &Q) -> String {
    v.to_string()
}

pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| Error::InvalidRational(s.into()))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| Error::InvalidRational(s.into()))?;
        if d.is_zero() {
            return Err(Error::InvalidRational(s.into()));
        }
        Ok(Q::new(n, d))
    } else {
        BigInt::from_str(t)
            .map(Q::from_integer)
            .map_err(|_| Error::InvalidRational(s.into()))
    }
}

pub fn is_zero_or_one(v: &Q) -> bool {
    v.is_zero() || v.is_one()
}
