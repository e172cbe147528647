//! Deterministic primality for 64-bit integers and the discretisation parameter.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Witness set that makes Miller-Rabin exact for every n < 2^64.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Exact for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= n`, or `None` past the largest 64-bit prime.
pub fn next_prime(n: u64) -> Option<u64> {
    (n.max(2)..=u64::MAX).find(|&k| is_prime(k))
}

/// The lattice resolution `p`: a prime greater than 12.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct DiscretisationParam(u64);

impl DiscretisationParam {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::ParamTooSmall);
        }
        if !is_prime(p) {
            return Err(Error::NotPrime);
        }
        if p <= 12 {
            return Err(Error::PrimeTooSmall);
        }
        Ok(Self(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl TryFrom<u64> for DiscretisationParam {
    type Error = Error;
    fn try_from(p: u64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<DiscretisationParam> for u64 {
    fn from(p: DiscretisationParam) -> u64 {
        p.0
    }
}

impl fmt::Display for DiscretisationParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}
