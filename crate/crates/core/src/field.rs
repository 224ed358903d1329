//! Coefficient rings: the integers (characteristic zero) and prime fields.

use std::fmt;

use thiserror::Error;

/// Raised when a characteristic-zero computation leaves the 64-bit range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("integer coefficient overflow")]
pub struct Overflow;

/// Coefficient ring for Lie and enveloping-algebra elements.
///
/// `p == 0` means exact integers (with checked 64-bit arithmetic); otherwise
/// residues in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ring {
    p: u64,
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "Z")
        } else {
            write!(f, "F_{}", self.p)
        }
    }
}

impl Ring {
    pub const fn integers() -> Self {
        Ring { p: 0 }
    }

    /// Panics if `p` is not prime.
    pub fn modulo(p: u64) -> Self {
        assert!(is_prime(p), "{p} is not prime");
        Ring { p }
    }

    pub const fn characteristic(&self) -> u64 {
        self.p
    }

    pub const fn is_modular(&self) -> bool {
        self.p != 0
    }

    pub fn normalize(&self, a: i64) -> i64 {
        if self.p == 0 {
            a
        } else {
            a.rem_euclid(self.p as i64)
        }
    }

    pub fn add(&self, a: i64, b: i64) -> Result<i64, Overflow> {
        if self.p == 0 {
            a.checked_add(b).ok_or(Overflow)
        } else {
            Ok(((a as i128 + b as i128).rem_euclid(self.p as i128)) as i64)
        }
    }

    pub fn sub(&self, a: i64, b: i64) -> Result<i64, Overflow> {
        if self.p == 0 {
            a.checked_sub(b).ok_or(Overflow)
        } else {
            Ok(((a as i128 - b as i128).rem_euclid(self.p as i128)) as i64)
        }
    }

    pub fn mul(&self, a: i64, b: i64) -> Result<i64, Overflow> {
        if self.p == 0 {
            a.checked_mul(b).ok_or(Overflow)
        } else {
            Ok(((a as i128 * b as i128).rem_euclid(self.p as i128)) as i64)
        }
    }

    pub fn neg(&self, a: i64) -> Result<i64, Overflow> {
        self.sub(0, a)
    }

    /// Symmetric representative used for printing (`-(p-1)/2 ..= (p-1)/2`).
    pub fn balanced(&self, a: i64) -> i64 {
        if self.p == 0 {
            return a;
        }
        let p = self.p as i64;
        let r = a.rem_euclid(p);
        if r > p / 2 {
            r - p
        } else {
            r
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Reduce a signed integer into `[0, p)`.
#[inline]
pub fn residue(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn inverses_mod_seven() {
        for a in 1..7 {
            let b = inv_mod(a, 7).unwrap();
            assert_eq!(a * b % 7, 1);
        }
        assert_eq!(inv_mod(0, 7), None);
    }

    #[test]
    fn integer_overflow_is_reported() {
        let z = Ring::integers();
        assert_eq!(z.mul(i64::MAX, 2), Err(Overflow));
        assert_eq!(z.add(2, 3), Ok(5));
    }

    #[test]
    fn balanced_representatives() {
        let r = Ring::modulo(7);
        assert_eq!(r.balanced(6), -1);
        assert_eq!(r.balanced(3), 3);
        assert_eq!(r.balanced(4), -3);
    }
}
