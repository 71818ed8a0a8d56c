//! Coefficient rings: ℤ (default), ℚ, and ℤ/n, all in exact arithmetic.
//!
//! Coefficients are carried as `BigRational` everywhere; a [`Ring`] tag owns
//! normalization. For `Mod(n)` every value is reduced to a representative
//! `0..n` with denominator 1 (rational inputs are admitted when their
//! denominator is invertible mod n).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum Ring {
    Int,
    Rat,
    Mod(u64),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RingError {
    #[error("coefficient {0} is not an integer (ring Z)")]
    NotAnInteger(String),
    #[error("denominator {0} is not invertible mod {1}")]
    NotInvertible(String, u64),
    #[error("modulus must be >= 2")]
    BadModulus,
    #[error("ring lacks required inverses: {0}")]
    NoInverse(String),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Int => write!(f, "Z"),
            Ring::Rat => write!(f, "Q"),
            Ring::Mod(n) => write!(f, "Z/{n}"),
        }
    }
}

impl Ring {
    pub fn parse(s: &str) -> Option<Ring> {
        match s {
            "Z" => Some(Ring::Int),
            "Q" => Some(Ring::Rat),
            _ => s
                .strip_prefix("Z/")
                .and_then(|m| m.parse().ok())
                .map(Ring::Mod),
        }
    }

    /// Bring a raw rational into ring normal form.
    pub fn normalize(&self, c: BigRational) -> Result<BigRational, RingError> {
        match self {
            Ring::Rat => Ok(c),
            Ring::Int => {
                if c.denom().is_one() {
                    Ok(c)
                } else {
                    Err(RingError::NotAnInteger(c.to_string()))
                }
            }
            Ring::Mod(n) => {
                if *n < 2 {
                    return Err(RingError::BadModulus);
                }
                let m = BigInt::from(*n);
                let num = c.numer().mod_floor(&m);
                let den = c.denom().mod_floor(&m);
                let inv = mod_inverse(&den, &m)
                    .ok_or_else(|| RingError::NotInvertible(c.denom().to_string(), *n))?;
                Ok(BigRational::from((num * inv).mod_floor(&m)))
            }
        }
    }

    /// a + s*b, normalized.
    pub fn add_scaled(
        &self,
        a: &BigRational,
        b: &BigRational,
        s: &BigRational,
    ) -> Result<BigRational, RingError> {
        self.normalize(a + b * s)
    }

    pub fn is_q_algebra(&self) -> bool {
        matches!(self, Ring::Rat)
    }

    /// True iff 2x = 0 forces the ring to contain x as written (used by the
    /// repeated-odd-generator consistency check on symmetric tables).
    pub fn two_torsion_allows(&self, v: &BigRational) -> bool {
        match self {
            Ring::Int | Ring::Rat => v.is_zero(),
            Ring::Mod(n) => {
                let m = BigInt::from(*n);
                (v.numer() * BigInt::from(2)).mod_floor(&m).is_zero()
            }
        }
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Sparse vector over the module basis, generator index -> coefficient.
pub type SparseVec = BTreeMap<usize, BigRational>;

pub fn vec_add_scaled(
    ring: &Ring,
    acc: &mut SparseVec,
    v: &SparseVec,
    scale: &BigRational,
) -> Result<(), RingError> {
    if scale.is_zero() {
        return Ok(());
    }
    for (&g, c) in v {
        let cur = acc.remove(&g).unwrap_or_else(BigRational::zero);
        let next = ring.add_scaled(&cur, c, scale)?;
        if !next.is_zero() {
            acc.insert(g, next);
        }
    }
    Ok(())
}

pub fn vec_scale(ring: &Ring, v: &SparseVec, scale: &BigRational) -> Result<SparseVec, RingError> {
    let mut out = SparseVec::new();
    vec_add_scaled(ring, &mut out, v, scale)?;
    Ok(out)
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// Parse "p" or "p/q" with optional sign, decimal digits only.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Render without floats: "p" when integral, else "p/q".
pub fn show_rational(c: &BigRational) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn factorial(n: usize) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    f
}

pub fn sign_to_rat(exp_is_odd: bool) -> BigRational {
    if exp_is_odd {
        -BigRational::one()
    } else {
        BigRational::one()
    }
}

#[allow(unused)]
pub fn is_negative(c: &BigRational) -> bool {
    c.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_ring_normalizes_rationals_with_invertible_denominator() {
        let r = Ring::Mod(7);
        // 1/2 = 4 mod 7
        let c = r
            .normalize(BigRational::new(BigInt::from(1), BigInt::from(2)))
            .unwrap();
        assert_eq!(c, rat(4));
        // 1/7 has no inverse
        assert!(r
            .normalize(BigRational::new(BigInt::from(1), BigInt::from(7)))
            .is_err());
    }

    #[test]
    fn int_ring_rejects_fractions() {
        assert!(Ring::Int
            .normalize(BigRational::new(BigInt::from(1), BigInt::from(2)))
            .is_err());
        assert!(Ring::Int.normalize(rat(-3)).is_ok());
    }

    #[test]
    fn rational_parser_round_trips() {
        for s in ["0", "-7", "3/2", "-11/4"] {
            let c = parse_rational(s).unwrap();
            assert_eq!(show_rational(&c), s);
        }
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("1.5").is_none());
    }

    #[test]
    fn ring_parse_tags() {
        assert_eq!(Ring::parse("Z"), Some(Ring::Int));
        assert_eq!(Ring::parse("Q"), Some(Ring::Rat));
        assert_eq!(Ring::parse("Z/12"), Some(Ring::Mod(12)));
        assert_eq!(Ring::parse("R"), None);
    }
}
