//! Sparse structure-constant tables for one arity-d operation.
//!
//! Symmetric carriers store only canonical (sorted-by-generator-index)
//! representatives; evaluation on an arbitrary tuple applies the Koszul
//! substitution sign. Lada–Markl carriers do the same with the extra
//! signature factor.

use crate::grading::Degree;
use crate::module::GradedModule;
use crate::perm::{substitution_sign, Permutation};
use crate::ring::{Ring, SparseVec};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// Plain table; keys looked up verbatim (A∞ operations, κ, δ, …).
    None,
    /// Graded symmetric: value(x∘σ) = substitution_sign(σ)·value(x).
    Graded,
    /// Lada–Markl: value(x∘σ) = sgn(σ)·substitution_sign(σ)·value(x).
    LadaMarkl,
}

#[derive(Debug, Clone)]
pub struct MultilinearOp {
    pub arity: usize,
    pub shift: Degree,
    pub symmetry: Symmetry,
    table: BTreeMap<Vec<usize>, SparseVec>,
}

#[derive(Debug, thiserror::Error)]
pub enum OpError {
    #[error("arity mismatch: op has arity {0}, key {1:?}")]
    ArityMismatch(usize, Vec<usize>),
    #[error("duplicate table entry for key {0:?}")]
    DuplicateEntry(Vec<usize>),
    #[error("entry {key:?} -> gen {out} is not degree-homogeneous: got {got}, expected {want}")]
    NotHomogeneous {
        key: Vec<usize>,
        out: usize,
        got: Degree,
        want: Degree,
    },
    #[error("entry {0:?} has a repeated generator forcing 2v = 0; value {1} violates it")]
    TwoTorsionViolation(Vec<usize>, String),
    #[error(transparent)]
    Ring(#[from] crate::ring::RingError),
    #[error(transparent)]
    Perm(#[from] crate::perm::PermError),
}

impl MultilinearOp {
    pub fn new(arity: usize, shift: Degree, symmetry: Symmetry) -> Self {
        MultilinearOp {
            arity,
            shift,
            symmetry,
            table: BTreeMap::new(),
        }
    }

    pub fn zero_like(&self) -> Self {
        MultilinearOp::new(self.arity, self.shift.clone(), self.symmetry)
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        self.table.iter()
    }

    /// Insert a whole entry; the key must already be canonical for symmetric
    /// carriers. Duplicate keys are rejected (file-format contract).
    pub fn insert_entry(&mut self, key: Vec<usize>, value: SparseVec) -> Result<(), OpError> {
        if key.len() != self.arity {
            return Err(OpError::ArityMismatch(self.arity, key));
        }
        if self.symmetry != Symmetry::None {
            let mut sorted = key.clone();
            sorted.sort_unstable();
            if sorted != key {
                return Err(OpError::DuplicateEntry(key));
            }
        }
        if self.table.contains_key(&key) {
            return Err(OpError::DuplicateEntry(key));
        }
        if !value.is_empty() {
            self.table.insert(key, value);
        }
        Ok(())
    }

    /// Accumulate a single coefficient, canonicalizing the key for symmetric
    /// carriers.
    pub fn add(
        &mut self,
        module: &GradedModule,
        key: &[usize],
        out: usize,
        coeff: BigRational,
    ) -> Result<(), OpError> {
        if key.len() != self.arity {
            return Err(OpError::ArityMismatch(self.arity, key.to_vec()));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let (ckey, sign) = self.canonical(module, key)?;
        let signed = if sign < 0 { -coeff } else { coeff };
        let slot = self.table.entry(ckey.clone()).or_default();
        let cur = slot.remove(&out).unwrap_or_else(BigRational::zero);
        let next = module.ring.normalize(cur + signed)?;
        if !next.is_zero() {
            slot.insert(out, next);
        }
        if slot.is_empty() {
            self.table.remove(&ckey);
        }
        Ok(())
    }

    /// Canonical key and the sign relating value(key) = sign · value(canonical).
    fn canonical(&self, module: &GradedModule, key: &[usize]) -> Result<(Vec<usize>, i8), OpError> {
        if self.symmetry == Symmetry::None {
            return Ok((key.to_vec(), 1));
        }
        let d = key.len();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by_key(|&i| (key[i], i));
        let ckey: Vec<usize> = order.iter().map(|&i| key[i]).collect();
        // key = ckey ∘ σ with σ[order[r]] = r, i.e. σ = order⁻¹
        let sigma = Permutation::from_images(order)?.inverse();
        let pc = module.parities(&ckey);
        let mut sign = substitution_sign(&sigma, &pc)?;
        if self.symmetry == Symmetry::LadaMarkl {
            sign *= sigma.signature();
        }
        Ok((ckey, sign))
    }

    /// Evaluate on a basis tuple.
    pub fn eval(&self, module: &GradedModule, key: &[usize]) -> Result<SparseVec, OpError> {
        if key.len() != self.arity {
            return Err(OpError::ArityMismatch(self.arity, key.to_vec()));
        }
        let (ckey, sign) = self.canonical(module, key)?;
        match self.table.get(&ckey) {
            None => Ok(SparseVec::new()),
            Some(v) if sign > 0 => Ok(v.clone()),
            Some(v) => Ok(v.iter().map(|(&g, c)| (g, -c)).collect()),
        }
    }

    /// Multilinear evaluation on a tuple of vectors.
    pub fn eval_vectors(
        &self,
        module: &GradedModule,
        args: &[SparseVec],
    ) -> Result<SparseVec, OpError> {
        if args.len() != self.arity {
            return Err(OpError::ArityMismatch(self.arity, vec![]));
        }
        let mut out = SparseVec::new();
        let mut key = vec![0usize; self.arity];
        self.expand(
            module,
            args,
            0,
            BigRational::from_integer(1.into()),
            &mut key,
            &mut out,
        )?;
        Ok(out)
    }

    fn expand(
        &self,
        module: &GradedModule,
        args: &[SparseVec],
        slot: usize,
        coeff: BigRational,
        key: &mut Vec<usize>,
        out: &mut SparseVec,
    ) -> Result<(), OpError> {
        if slot == self.arity {
            let v = self.eval(module, key)?;
            crate::ring::vec_add_scaled(&module.ring, out, &v, &coeff)?;
            return Ok(());
        }
        for (&g, c) in &args[slot] {
            key[slot] = g;
            self.expand(module, args, slot + 1, &coeff * c, key, out)?;
        }
        Ok(())
    }

    pub fn negated(&self) -> Self {
        let mut t = self.clone();
        for v in t.table.values_mut() {
            for c in v.values_mut() {
                *c = -c.clone();
            }
        }
        t
    }

    pub fn scaled_entries(&self, f: impl Fn(&[usize], &SparseVec) -> SparseVec) -> Self {
        let mut t = self.zero_like();
        for (k, v) in &self.table {
            let nv = f(k, v);
            if !nv.is_empty() {
                t.table.insert(k.clone(), nv);
            }
        }
        t
    }

    /// Degree homogeneity: deg(out) = Σ deg(in) + shift for every entry.
    pub fn check_homogeneous(&self, module: &GradedModule) -> Result<(), OpError> {
        for (key, v) in &self.table {
            let mut want = self.shift.clone();
            for &g in key {
                want = want.add(module.degree(g));
            }
            for (&out, _) in v {
                if *module.degree(out) != want {
                    return Err(OpError::NotHomogeneous {
                        key: key.clone(),
                        out,
                        got: module.degree(out).clone(),
                        want,
                    });
                }
            }
        }
        Ok(())
    }

    /// Stabilizer consistency for symmetric carriers: a canonical key with a
    /// repeated generator whose law-sign under the fixing transposition is −1
    /// forces 2v = 0.
    pub fn check_stabilizer(&self, module: &GradedModule) -> Result<(), OpError> {
        if self.symmetry == Symmetry::None {
            return Ok(());
        }
        for (key, v) in &self.table {
            for i in 0..key.len().saturating_sub(1) {
                if key[i] != key[i + 1] {
                    continue;
                }
                let p = module.parity(key[i]);
                let sign = match self.symmetry {
                    Symmetry::Graded => {
                        if p == 1 {
                            -1
                        } else {
                            1
                        }
                    }
                    Symmetry::LadaMarkl => {
                        if p == 1 {
                            1
                        } else {
                            -1
                        }
                    }
                    Symmetry::None => unreachable!(),
                };
                if sign == -1 {
                    for (_, c) in v {
                        if !module.ring.two_torsion_allows(c) {
                            return Err(OpError::TwoTorsionViolation(
                                key.clone(),
                                crate::ring::show_rational(c),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self, module: &GradedModule) -> Result<(), OpError> {
        self.check_homogeneous(module)?;
        self.check_stabilizer(module)
    }

    pub fn ring_normalize(&mut self, ring: &Ring) -> Result<(), OpError> {
        let mut table = BTreeMap::new();
        for (k, v) in std::mem::take(&mut self.table) {
            let mut nv = SparseVec::new();
            for (g, c) in v {
                let c = ring.normalize(c)?;
                if !c.is_zero() {
                    nv.insert(g, c);
                }
            }
            if !nv.is_empty() {
                table.insert(k, nv);
            }
        }
        self.table = table;
        Ok(())
    }
}

/// Graded-symmetry check against the substitution law, on every stored tuple
/// and every permutation. Returns the first violation.
pub fn check_graded_symmetry(
    module: &GradedModule,
    op: &MultilinearOp,
) -> Result<Option<(Vec<usize>, Permutation)>, OpError> {
    let d = op.arity;
    let perms = crate::perm::all_permutations(d);
    let keys: Vec<Vec<usize>> = op.table.keys().cloned().collect();
    for key in &keys {
        let p = module.parities(key);
        let base = op.eval(module, key)?;
        for sigma in &perms {
            let permuted: Vec<usize> = sigma.substitute(key);
            let lhs = op.eval(module, &permuted)?;
            let sign = substitution_sign(sigma, &p)?;
            let mut rhs =
                crate::ring::vec_scale(&module.ring, &base, &crate::ring::sign_to_rat(sign < 0))?;
            // compare
            if lhs != std::mem::take(&mut rhs) {
                return Ok(Some((key.clone(), sigma.clone())));
            }
        }
    }
    Ok(None)
}

/// Same for raw tables: treats the table as the literal graph of the map and
/// verifies the law pointwise over all permutations of all stored keys.
pub fn check_graded_symmetry_raw(
    module: &GradedModule,
    op: &MultilinearOp,
) -> Result<Option<(Vec<usize>, Permutation)>, OpError> {
    let d = op.arity;
    let perms = crate::perm::all_permutations(d);
    let mut keys: Vec<Vec<usize>> = Vec::new();
    for k in op.table.keys() {
        for s in &perms {
            let kk = s.substitute(k);
            if !keys.contains(&kk) {
                keys.push(kk);
            }
        }
    }
    for key in &keys {
        let p = module.parities(key);
        let base = op.table.get(key).cloned().unwrap_or_default();
        for sigma in &perms {
            let permuted: Vec<usize> = sigma.substitute(key);
            let lhs = op.table.get(&permuted).cloned().unwrap_or_default();
            let sign = substitution_sign(sigma, &p)?;
            let rhs =
                crate::ring::vec_scale(&module.ring, &base, &crate::ring::sign_to_rat(sign < 0))?;
            if lhs != rhs {
                return Ok(Some((key.clone(), sigma.clone())));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::GradingDatum;
    use crate::module::Generator;
    use crate::ring::rat;

    fn module_with_parities(ps: &[i64]) -> GradedModule {
        let mut m = GradedModule::new(Ring::Int, GradingDatum::standard());
        for (i, &d) in ps.iter().enumerate() {
            m.push(Generator::new(format!("g{i}"), Degree(vec![d])))
                .unwrap();
        }
        m
    }

    #[test]
    fn symmetric_eval_applies_substitution_sign() {
        let m = module_with_parities(&[1, 1]);
        let mut op = MultilinearOp::new(2, Degree(vec![-1]), Symmetry::Graded);
        op.add(&m, &[0, 1], 0, rat(1)).unwrap();
        // swapping two odd generators flips the sign
        let v = op.eval(&m, &[1, 0]).unwrap();
        assert_eq!(v.get(&0), Some(&rat(-1)));
    }

    #[test]
    fn arity_one_is_trivially_symmetric() {
        let m = module_with_parities(&[1]);
        let mut op = MultilinearOp::new(1, Degree(vec![1]), Symmetry::Graded);
        op.add(&m, &[0], 0, rat(2)).unwrap();
        assert!(check_graded_symmetry(&m, &op).unwrap().is_none());
    }

    #[test]
    fn broken_koszul_closure_is_reported() {
        // raw table with only one orientation present
        let m = module_with_parities(&[1, 2]);
        let mut op = MultilinearOp::new(2, Degree(vec![0]), Symmetry::None);
        op.insert_entry(vec![0, 1], SparseVec::from([(1, rat(1))]))
            .unwrap();
        let bad = check_graded_symmetry_raw(&m, &op).unwrap();
        assert!(bad.is_some());
    }

    #[test]
    fn repeated_odd_generator_forces_zero_over_z() {
        let m = module_with_parities(&[1]);
        let mut op = MultilinearOp::new(2, Degree(vec![-1]), Symmetry::Graded);
        op.insert_entry(vec![0, 0], SparseVec::from([(0, rat(1))]))
            .unwrap();
        assert!(op.check_stabilizer(&m).is_err());
    }

    #[test]
    fn repeated_odd_generator_allowed_mod_2() {
        let mut m = GradedModule::new(Ring::Mod(2), GradingDatum::standard());
        m.push(Generator::new("x", Degree(vec![1]))).unwrap();
        let mut op = MultilinearOp::new(2, Degree(vec![-1]), Symmetry::Graded);
        op.insert_entry(vec![0, 0], SparseVec::from([(0, rat(1))]))
            .unwrap();
        assert!(op.check_stabilizer(&m).is_ok());
    }

    #[test]
    fn homogeneity_violation_detected() {
        let m = module_with_parities(&[0, 1]);
        let mut op = MultilinearOp::new(1, Degree(vec![1]), Symmetry::None);
        op.insert_entry(vec![0], SparseVec::from([(0, rat(1))]))
            .unwrap();
        assert!(op.check_homogeneous(&m).is_err());
        let mut op2 = MultilinearOp::new(1, Degree(vec![1]), Symmetry::None);
        op2.insert_entry(vec![0], SparseVec::from([(1, rat(1))]))
            .unwrap();
        assert!(op2.check_homogeneous(&m).is_ok());
    }
}
