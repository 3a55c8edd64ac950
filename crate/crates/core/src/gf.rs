//! Prime-field arithmetic backing the finite-geometry generators.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime (prime powers are unsupported)")]
    NotPrime(u64),
    #[error("inverse of zero in F_{0}")]
    ZeroInverse(u64),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut k = 3u64;
    while k.saturating_mul(k) <= n {
        if n % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Exact arithmetic over F_q, q prime. Elements are canonical residues in `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GfArith {
    q: u64,
}

impl GfArith {
    pub fn new(q: u64) -> Result<Self, GfError> {
        if !is_prime(q) {
            return Err(GfError::NotPrime(q));
        }
        Ok(GfArith { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b % self.q) % self.q
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a % self.q) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        // q <= ~1e6 in practice, but stay safe with u128 intermediates.
        ((a as u128 * b as u128) % self.q as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64, GfError> {
        if a % self.q == 0 {
            return Err(GfError::ZeroInverse(self.q));
        }
        Ok(self.pow(a, self.q - 2))
    }
}
