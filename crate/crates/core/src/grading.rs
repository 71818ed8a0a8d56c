//! Grading data: the pair of maps ℤ → Y → ℤ₂ with Y = ℤ^r free, degrees as
//! elements of Y, and the induced parities.

use serde::Serialize;
use std::fmt;

/// The pair ℤ → Y → ℤ₂; `iota` is the image of 1, `parity` the functional
/// Y → ℤ₂ given by pairing mod 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GradingDatum {
    pub rank: usize,
    pub iota: Vec<i64>,
    pub parity: Vec<u8>,
}

/// An element of Y.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Degree(pub Vec<i64>);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GradingError {
    #[error("rank mismatch: expected {0}, got {1}")]
    RankMismatch(usize, usize),
    #[error("invalid grading datum: parity·iota = {0} mod 2, expected 1")]
    BadDatum(u8),
    #[error("rank must be >= 1")]
    ZeroRank,
}

impl GradingDatum {
    pub fn new(rank: usize, iota: Vec<i64>, parity: Vec<u8>) -> Result<Self, GradingError> {
        if rank == 0 {
            return Err(GradingError::ZeroRank);
        }
        if iota.len() != rank {
            return Err(GradingError::RankMismatch(rank, iota.len()));
        }
        if parity.len() != rank {
            return Err(GradingError::RankMismatch(rank, parity.len()));
        }
        let g = GradingDatum { rank, iota, parity };
        if !g.is_valid() {
            return Err(GradingError::BadDatum(g.pair_mod2(&g.iota)));
        }
        Ok(g)
    }

    /// The default datum: Y = ℤ, iota = (1), parity = reduction mod 2.
    pub fn standard() -> Self {
        GradingDatum {
            rank: 1,
            iota: vec![1],
            parity: vec![1],
        }
    }

    /// true iff the composition ℤ → Y → ℤ₂ is reduction mod 2.
    pub fn is_valid(&self) -> bool {
        self.pair_mod2(&self.iota) == 1
    }

    fn pair_mod2(&self, coords: &[i64]) -> u8 {
        let mut acc = 0i64;
        for (c, p) in coords.iter().zip(&self.parity) {
            acc += c * (*p as i64);
        }
        (acc.rem_euclid(2)) as u8
    }

    /// Parity of a degree via Y → ℤ₂.
    pub fn parity_of(&self, deg: &Degree) -> Result<u8, GradingError> {
        if deg.0.len() != self.rank {
            return Err(GradingError::RankMismatch(self.rank, deg.0.len()));
        }
        Ok(self.pair_mod2(&deg.0))
    }

    /// Image of an integer under ℤ → Y.
    pub fn int_degree(&self, n: i64) -> Degree {
        Degree(self.iota.iter().map(|&i| i * n).collect())
    }

    /// deg is an integer multiple of iota? Returns the multiplier when so.
    pub fn iota_multiple(&self, deg: &Degree) -> Option<i64> {
        let k = self.iota.iter().position(|&v| v != 0)?;
        if deg.0[k] % self.iota[k] != 0 {
            return None;
        }
        let m = deg.0[k] / self.iota[k];
        if self.int_degree(m) == *deg {
            Some(m)
        } else {
            None
        }
    }
}

impl Degree {
    pub fn zero(rank: usize) -> Self {
        Degree(vec![0; rank])
    }

    pub fn add(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Degree) -> Degree {
        Degree(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// check_grading_datum as a pure predicate.
pub fn check_grading_datum(rank: usize, iota: &[i64], parity: &[u8]) -> bool {
    match GradingDatum::new(rank, iota.to_vec(), parity.to_vec()) {
        Ok(_) => true,
        Err(GradingError::BadDatum(_)) => false,
        Err(_) => false,
    }
}

/// deg_out − Σ deg_in, the expected-index bookkeeping class.
pub fn expected_index(deg_out: &Degree, degs_in: &[Degree]) -> Result<Degree, GradingError> {
    let mut acc = deg_out.clone();
    for d in degs_in {
        if d.0.len() != acc.0.len() {
            return Err(GradingError::RankMismatch(acc.0.len(), d.0.len()));
        }
        acc = acc.sub(d);
    }
    Ok(acc)
}
