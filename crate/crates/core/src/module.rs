//! Finite-rank free graded modules with named basis generators.

use crate::grading::{Degree, GradingDatum, GradingError};
use crate::ring::Ring;
use num_rational::BigRational;
use std::collections::BTreeMap;

/// One basis generator. `action`, `level` and `t_power` are telescope /
/// filtration metadata; `hom` is the (source, target) object pair for
/// category hom generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: String,
    pub degree: Degree,
    pub action: Option<BigRational>,
    pub level: Option<u32>,
    pub t_power: u8,
    pub hom: Option<(usize, usize)>,
}

impl Generator {
    pub fn new(id: impl Into<String>, degree: Degree) -> Self {
        Generator {
            id: id.into(),
            degree,
            action: None,
            level: None,
            t_power: 0,
            hom: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradedModule {
    pub ring: Ring,
    pub datum: GradingDatum,
    gens: Vec<Generator>,
    parities: Vec<u8>,
    by_id: BTreeMap<String, usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ModuleError {
    #[error("duplicate generator id {0}")]
    DuplicateId(String),
    #[error("unknown generator id {0}")]
    UnknownId(String),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error("t_power must be 0 or 1, got {0} on {1}")]
    BadTPower(u8, String),
}

impl GradedModule {
    pub fn new(ring: Ring, datum: GradingDatum) -> Self {
        GradedModule {
            ring,
            datum,
            gens: Vec::new(),
            parities: Vec::new(),
            by_id: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, g: Generator) -> Result<usize, ModuleError> {
        if self.by_id.contains_key(&g.id) {
            return Err(ModuleError::DuplicateId(g.id));
        }
        if g.t_power > 1 {
            return Err(ModuleError::BadTPower(g.t_power, g.id));
        }
        let p = self.datum.parity_of(&g.degree)?;
        let idx = self.gens.len();
        self.by_id.insert(g.id.clone(), idx);
        self.gens.push(g);
        self.parities.push(p);
        Ok(idx)
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn gen(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    /// Parity precomputed at load; the sign engine never sees full degrees.
    pub fn parity(&self, i: usize) -> u8 {
        self.parities[i]
    }

    pub fn parities(&self, tuple: &[usize]) -> Vec<u8> {
        tuple.iter().map(|&g| self.parities[g]).collect()
    }

    pub fn index_of(&self, id: &str) -> Result<usize, ModuleError> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| ModuleError::UnknownId(id.to_string()))
    }

    pub fn degree(&self, i: usize) -> &Degree {
        &self.gens[i].degree
    }

    /// Index of the t-partner of a t-free generator, when present. Pairing is
    /// by id: the partner of `x` is named `t:x`.
    pub fn t_partner(&self, i: usize) -> Option<usize> {
        if self.gens[i].t_power != 0 {
            return None;
        }
        self.by_id.get(&format!("t:{}", self.gens[i].id)).copied()
    }

    /// For a t-generator, the index of its t-free base.
    pub fn t_base(&self, i: usize) -> Option<usize> {
        if self.gens[i].t_power != 1 {
            return None;
        }
        self.gens[i]
            .id
            .strip_prefix("t:")
            .and_then(|base| self.by_id.get(base))
            .copied()
    }
}
