//! L∞ structures: relation checking in the graded-commutative convention,
//! translation to the Lada–Markl convention, the dgLa adapter, L∞ morphisms,
//! Maurer–Cartan residuals and the codimension-1 boundary sign.

use crate::grading::Degree;
use crate::module::GradedModule;
use crate::multilinear::{MultilinearOp, OpError, Symmetry};
use crate::perm::{multi_unshuffles_lt, substitution_eps, unshuffles, PermError, Permutation};
use crate::ring::{factorial, show_rational, vec_add_scaled, Ring, RingError, SparseVec};
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// ℓ^d of degree 3−2d, graded-commutative, unshuffle relations.
    Ours,
    /// Shifted-grading convention with χ(σ) signs and the (−1)^{i(j−1)} factor.
    LadaMarkl,
}

#[derive(Debug, Clone)]
pub struct LInftyStructure {
    pub module: GradedModule,
    pub ops: BTreeMap<usize, MultilinearOp>,
    pub arity_cap: usize,
    pub convention: Convention,
}

/// First violating instance of a relation, with the exact residual vector.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub arity: usize,
    pub tuple: Vec<String>,
    pub residual: Vec<(String, String)>,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "arity {} tuple ({}) residual [{}]",
            self.arity,
            self.tuple.join(","),
            self.residual
                .iter()
                .map(|(g, c)| format!("{c}·{g}"))
                .collect::<Vec<_>>()
                .join(" + ")
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LinftyError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("dgLa axiom {axiom} fails on ({tuple}) with residual {residual}")]
    DglaAxiom {
        axiom: &'static str,
        tuple: String,
        residual: String,
    },
    #[error("operation arity {0} has symmetry mode {1:?}, expected {2:?}")]
    WrongSymmetry(usize, Symmetry, Symmetry),
    #[error("Maurer-Cartan element must be homogeneous of odd parity")]
    ParityMismatch,
    #[error("ring {0} lacks 1/{1}!; supply rational coefficients or a nilpotent element")]
    NoFactorialInverse(Ring, usize),
    #[error("sigma {0} is not an unshuffle for the split with |S-| = {1}")]
    NotAnUnshuffle(Permutation, usize),
    #[error("expected convention {0:?}")]
    WrongConvention(Convention),
}

impl LInftyStructure {
    pub fn new(module: GradedModule, arity_cap: usize, convention: Convention) -> Self {
        LInftyStructure {
            module,
            ops: BTreeMap::new(),
            arity_cap,
            convention,
        }
    }

    fn expected_symmetry(&self) -> Symmetry {
        match self.convention {
            Convention::Ours => Symmetry::Graded,
            Convention::LadaMarkl => Symmetry::LadaMarkl,
        }
    }

    /// Expected degree shift of the arity-d operation.
    pub fn expected_shift(&self, d: usize) -> Degree {
        match self.convention {
            Convention::Ours => self.module.datum.int_degree(3 - 2 * d as i64),
            Convention::LadaMarkl => self.module.datum.int_degree(2 - d as i64),
        }
    }

    pub fn insert_op(&mut self, op: MultilinearOp) -> Result<(), LinftyError> {
        let want = self.expected_symmetry();
        if op.symmetry != want {
            return Err(LinftyError::WrongSymmetry(op.arity, op.symmetry, want));
        }
        op.validate(&self.module)?;
        self.ops.insert(op.arity, op);
        Ok(())
    }

    pub fn op(&self, arity: usize) -> Option<&MultilinearOp> {
        self.ops.get(&arity)
    }

    fn eval_op(&self, arity: usize, key: &[usize]) -> Result<SparseVec, LinftyError> {
        match self.ops.get(&arity) {
            None => Ok(SparseVec::new()),
            Some(op) => Ok(op.eval(&self.module, key)?),
        }
    }

    fn describe(&self, tuple: &[usize], residual: &SparseVec) -> Counterexample {
        Counterexample {
            arity: tuple.len(),
            tuple: tuple
                .iter()
                .map(|&g| self.module.gen(g).id.clone())
                .collect(),
            residual: residual
                .iter()
                .map(|(&g, c)| (self.module.gen(g).id.clone(), show_rational(c)))
                .collect(),
        }
    }

    /// Residual of the relation of total arity n on one basis tuple.
    pub fn relation_residual(&self, x: &[usize]) -> Result<SparseVec, LinftyError> {
        let n = x.len();
        let p = self.module.parities(x);
        let ring = &self.module.ring;
        let mut total = SparseVec::new();
        for j in 1..=n {
            let outer_arity = n - j + 1;
            if !self.ops.contains_key(&j) || !self.ops.contains_key(&outer_arity) {
                continue;
            }
            for sigma in unshuffles(j, n)? {
                let eps = substitution_eps(&sigma, &p)?;
                let mut scale = crate::ring::sign_to_rat(eps == 1);
                if self.convention == Convention::LadaMarkl {
                    // χ(σ) = sgn(σ)·Koszul, plus (−1)^{i(j-1)} with i = j, j = outer_arity
                    if sigma.signature() < 0 {
                        scale = -scale;
                    }
                    if (j * (outer_arity - 1)) % 2 == 1 {
                        scale = -scale;
                    }
                }
                let xs: Vec<usize> = sigma.substitute(x);
                let inner = self.eval_op(j, &xs[..j])?;
                for (&g, c) in &inner {
                    let mut key = Vec::with_capacity(outer_arity);
                    key.push(g);
                    key.extend_from_slice(&xs[j..]);
                    let out = self.eval_op(outer_arity, &key)?;
                    vec_add_scaled(ring, &mut total, &out, &(&scale * c))?;
                }
            }
        }
        Ok(total)
    }

    /// Negated structure: all tables negated. Relations are quadratic in the
    /// operations, so the verdict is preserved.
    pub fn negate(&self) -> LInftyStructure {
        let mut out = self.clone();
        for op in out.ops.values_mut() {
            *op = op.negated();
        }
        out
    }
}

/// Exhaustive relation check over all basis tuples of total arity ≤ max_arity.
/// Deterministic first counterexample (lexicographically smallest tuple of the
/// smallest failing arity), even when run in parallel.
pub fn check_linfty_relations(
    l: &LInftyStructure,
    max_arity: usize,
) -> Result<Option<Counterexample>, LinftyError> {
    for op in l.ops.values() {
        op.validate(&l.module)?;
    }
    let rank = l.module.rank();
    for n in 1..=max_arity {
        let tuples = all_tuples(rank, n);
        let hit = tuples
            .par_iter()
            .enumerate()
            .map(|(i, t)| l.relation_residual(t).map(|r| (i, t, r)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|(_, _, r)| !r.is_empty())
            .min_by_key(|(i, _, _)| *i);
        if let Some((_, t, r)) = hit {
            return Ok(Some(l.describe(t, &r)));
        }
    }
    Ok(None)
}

pub fn all_tuples(rank: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    if rank == 0 {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < rank {
                break;
            }
            cur[k] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// convention translation
// ---------------------------------------------------------------------------

/// ℓ^d_LM(x_1,…,x_d) = (−1)^{Σ (d−i)|x_i|} ℓ^d(x_1,…,x_d) on the grading
/// shifted down by one iota step.
pub fn to_lada_markl(l: &LInftyStructure) -> Result<LInftyStructure, LinftyError> {
    if l.convention != Convention::Ours {
        return Err(LinftyError::WrongConvention(Convention::Ours));
    }
    translate(l, Convention::LadaMarkl)
}

/// Inverse translation; exact table round-trip.
pub fn from_lada_markl(l: &LInftyStructure) -> Result<LInftyStructure, LinftyError> {
    if l.convention != Convention::LadaMarkl {
        return Err(LinftyError::WrongConvention(Convention::LadaMarkl));
    }
    translate(l, Convention::Ours)
}

fn translate(l: &LInftyStructure, target: Convention) -> Result<LInftyStructure, LinftyError> {
    let shift_dir: i64 = match target {
        Convention::LadaMarkl => -1,
        Convention::Ours => 1,
    };
    let iota = l.module.datum.int_degree(1);
    let mut module = GradedModule::new(l.module.ring.clone(), l.module.datum.clone());
    for g in l.module.gens() {
        let mut ng = g.clone();
        ng.degree = if shift_dir < 0 {
            g.degree.sub(&iota)
        } else {
            g.degree.add(&iota)
        };
        module
            .push(ng)
            .map_err(|_| LinftyError::ParityMismatch)
            .unwrap();
    }
    // the twist uses the parities of the Ours-convention module
    let ours_parities: Vec<u8> = (0..module.rank())
        .map(|g| match target {
            Convention::LadaMarkl => l.module.parity(g),
            Convention::Ours => module.parity(g),
        })
        .collect();
    let ours_parity = |g: usize| -> u8 { ours_parities[g] };
    let mut out = LInftyStructure::new(module, l.arity_cap, target);
    let sym = out.expected_symmetry();
    for (&d, op) in &l.ops {
        let mut nop = MultilinearOp::new(d, out.expected_shift(d), sym);
        for (key, val) in op.entries() {
            let tw: u8 = key
                .iter()
                .enumerate()
                .map(|(i, &g)| (((d - (i + 1)) as u8) & 1) * ours_parity(g))
                .fold(0, |a, b| a ^ (b & 1));
            let nval: SparseVec = if tw == 1 {
                val.iter().map(|(&g, c)| (g, -c)).collect()
            } else {
                val.clone()
            };
            nop.insert_entry(key.clone(), nval)?;
        }
        nop.validate(&out.module)?;
        out.ops.insert(d, nop);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// dgLa adapter
// ---------------------------------------------------------------------------

/// Build the two-term L∞ structure of a differential graded Lie algebra.
/// Axioms are checked on the shifted complex (reduced parities). With
/// `negated` set this is ℓ¹ = −∂, ℓ²(x,y) = (−1)^{1+|x|}[x,y]; otherwise
/// ℓ¹ = ∂, ℓ²(x,y) = (−1)^{|x|}[x,y].
pub fn from_dgla(
    module: &GradedModule,
    differential: &MultilinearOp,
    bracket: &MultilinearOp,
    negated: bool,
) -> Result<LInftyStructure, LinftyError> {
    check_dgla_axioms(module, differential, bracket)?;
    let mut out = LInftyStructure::new(module.clone(), 2, Convention::Ours);
    let mut l1 = MultilinearOp::new(1, out.expected_shift(1), Symmetry::Graded);
    for g in 0..module.rank() {
        let dv = differential.eval(module, &[g])?;
        for (&h, c) in &dv {
            let coeff = if negated { -c.clone() } else { c.clone() };
            l1.add(module, &[g], h, coeff)?;
        }
    }
    let mut l2 = MultilinearOp::new(2, out.expected_shift(2), Symmetry::Graded);
    for i in 0..module.rank() {
        for j in i..module.rank() {
            let bv = bracket.eval(module, &[i, j])?;
            let p = module.parity(i);
            let exp = if negated { 1 + p } else { p };
            for (&h, c) in &bv {
                let coeff = if exp % 2 == 1 { -c.clone() } else { c.clone() };
                l2.add(module, &[i, j], h, coeff)?;
            }
        }
    }
    out.insert_op(l1)?;
    out.insert_op(l2)?;
    Ok(out)
}

fn check_dgla_axioms(
    module: &GradedModule,
    differential: &MultilinearOp,
    bracket: &MultilinearOp,
) -> Result<(), LinftyError> {
    let ring = &module.ring;
    let rank = module.rank();
    let red = |g: usize| (module.parity(g) + 1) % 2;
    // d² = 0
    for g in 0..rank {
        let d1 = differential.eval(module, &[g])?;
        let mut acc = SparseVec::new();
        for (&h, c) in &d1 {
            let d2 = differential.eval(module, &[h])?;
            vec_add_scaled(ring, &mut acc, &d2, c)?;
        }
        if !acc.is_empty() {
            return Err(LinftyError::DglaAxiom {
                axiom: "d²=0",
                tuple: module.gen(g).id.clone(),
                residual: render_vec(module, &acc),
            });
        }
    }
    // antisymmetry: [y,x] + (−1)^{|x|'|y|'} [x,y] = 0
    for x in 0..rank {
        for y in 0..rank {
            let mut acc = bracket.eval(module, &[y, x])?;
            let sgn = crate::ring::sign_to_rat(red(x) * red(y) == 1);
            let b = bracket.eval(module, &[x, y])?;
            vec_add_scaled(ring, &mut acc, &b, &sgn)?;
            if !acc.is_empty() {
                return Err(LinftyError::DglaAxiom {
                    axiom: "antisymmetry",
                    tuple: format!("{},{}", module.gen(x).id, module.gen(y).id),
                    residual: render_vec(module, &acc),
                });
            }
        }
    }
    // Leibniz: d[x,y] − [dx,y] − (−1)^{|x|'}[x,dy] = 0
    for x in 0..rank {
        for y in 0..rank {
            let mut acc = SparseVec::new();
            for (&h, c) in &bracket.eval(module, &[x, y])? {
                vec_add_scaled(ring, &mut acc, &differential.eval(module, &[h])?, c)?;
            }
            for (&h, c) in &differential.eval(module, &[x])? {
                vec_add_scaled(ring, &mut acc, &bracket.eval(module, &[h, y])?, &-c.clone())?;
            }
            let s = crate::ring::sign_to_rat(red(x) == 1);
            for (&h, c) in &differential.eval(module, &[y])? {
                vec_add_scaled(ring, &mut acc, &bracket.eval(module, &[x, h])?, &-(&s * c))?;
            }
            if !acc.is_empty() {
                return Err(LinftyError::DglaAxiom {
                    axiom: "Leibniz",
                    tuple: format!("{},{}", module.gen(x).id, module.gen(y).id),
                    residual: render_vec(module, &acc),
                });
            }
        }
    }
    // Jacobi: [x,[y,z]] − [[x,y],z] − (−1)^{|x|'|y|'}[y,[x,z]] = 0
    for x in 0..rank {
        for y in 0..rank {
            for z in 0..rank {
                let mut acc = SparseVec::new();
                for (&h, c) in &bracket.eval(module, &[y, z])? {
                    vec_add_scaled(ring, &mut acc, &bracket.eval(module, &[x, h])?, c)?;
                }
                for (&h, c) in &bracket.eval(module, &[x, y])? {
                    vec_add_scaled(ring, &mut acc, &bracket.eval(module, &[h, z])?, &-c.clone())?;
                }
                let s = crate::ring::sign_to_rat(red(x) * red(y) == 1);
                for (&h, c) in &bracket.eval(module, &[x, z])? {
                    vec_add_scaled(ring, &mut acc, &bracket.eval(module, &[y, h])?, &-(&s * c))?;
                }
                if !acc.is_empty() {
                    return Err(LinftyError::DglaAxiom {
                        axiom: "Jacobi",
                        tuple: format!(
                            "{},{},{}",
                            module.gen(x).id,
                            module.gen(y).id,
                            module.gen(z).id
                        ),
                        residual: render_vec(module, &acc),
                    });
                }
            }
        }
    }
    Ok(())
}

fn render_vec(module: &GradedModule, v: &SparseVec) -> String {
    v.iter()
        .map(|(&g, c)| format!("{}·{}", show_rational(c), module.gen(g).id))
        .collect::<Vec<_>>()
        .join(" + ")
}

// ---------------------------------------------------------------------------
// morphisms
// ---------------------------------------------------------------------------

/// Components F^d: source^{⊗d} → target of degree shift 2−2d, graded
/// symmetric in the source inputs. Tables are keyed by source generators and
/// valued in the target module.
#[derive(Debug, Clone)]
pub struct LInftyMorphism {
    pub source: LInftyStructure,
    pub target: LInftyStructure,
    pub maps: BTreeMap<usize, MultilinearOp>,
    pub arity_cap: usize,
}

impl LInftyMorphism {
    pub fn new(source: LInftyStructure, target: LInftyStructure, arity_cap: usize) -> Self {
        LInftyMorphism {
            source,
            target,
            maps: BTreeMap::new(),
            arity_cap,
        }
    }

    pub fn insert_map(&mut self, op: MultilinearOp) -> Result<(), LinftyError> {
        if op.symmetry != Symmetry::Graded {
            return Err(LinftyError::WrongSymmetry(
                op.arity,
                op.symmetry,
                Symmetry::Graded,
            ));
        }
        self.check_map_homogeneous(&op)?;
        self.maps.insert(op.arity, op);
        Ok(())
    }

    fn check_map_homogeneous(&self, op: &MultilinearOp) -> Result<(), LinftyError> {
        let shift = self.source.module.datum.int_degree(2 - 2 * op.arity as i64);
        for (key, val) in op.entries() {
            let mut want = shift.clone();
            for &g in key {
                want = want.add(self.source.module.degree(g));
            }
            for (&out, _) in val {
                if *self.target.module.degree(out) != want {
                    return Err(LinftyError::Op(OpError::NotHomogeneous {
                        key: key.clone(),
                        out,
                        got: self.target.module.degree(out).clone(),
                        want,
                    }));
                }
            }
        }
        Ok(())
    }

    fn eval_map(&self, arity: usize, key: &[usize]) -> Result<SparseVec, LinftyError> {
        match self.maps.get(&arity) {
            None => Ok(SparseVec::new()),
            Some(op) => Ok(op.eval(&self.source.module, key)?),
        }
    }

    /// Residual of the conventional morphism identity at one basis tuple:
    /// Σ_{j,σ∈Unsh} ε F^{n−j+1}(ℓ₀^j(…),…) − Σ_{j₁<…<j_m=n, σ∈Unsh^<} ε
    /// ℓ₁^m(F^{j₁}(…),…,F^{j_m−j_{m−1}}(…)).
    pub fn relation_residual(&self, x: &[usize]) -> Result<SparseVec, LinftyError> {
        let n = x.len();
        let p = self.source.module.parities(x);
        let ring = &self.target.module.ring;
        let mut total = SparseVec::new();
        for j in 1..=n {
            for sigma in unshuffles(j, n)? {
                let eps = substitution_eps(&sigma, &p)?;
                let xs: Vec<usize> = sigma.substitute(x);
                let inner = match self.source.op(j) {
                    None => continue,
                    Some(op) => op.eval(&self.source.module, &xs[..j])?,
                };
                for (&g, c) in &inner {
                    let mut key = Vec::with_capacity(n - j + 1);
                    key.push(g);
                    key.extend_from_slice(&xs[j..]);
                    let out = self.eval_map(n - j + 1, &key)?;
                    let scale = &crate::ring::sign_to_rat(eps == 1) * c;
                    vec_add_scaled(ring, &mut total, &out, &scale)?;
                }
            }
        }
        for ends in increasing_sequences(n) {
            let m = ends.len();
            if self.target.op(m).is_none() {
                continue;
            }
            for sigma in multi_unshuffles_lt(&ends)? {
                let eps = substitution_eps(&sigma, &p)?;
                let xs: Vec<usize> = sigma.substitute(x);
                let mut args: Vec<SparseVec> = Vec::with_capacity(m);
                let mut prev = 0usize;
                let mut vanished = false;
                for &e in &ends {
                    let fv = self.eval_map(e - prev, &xs[prev..e])?;
                    if fv.is_empty() {
                        vanished = true;
                        break;
                    }
                    args.push(fv);
                    prev = e;
                }
                if vanished {
                    continue;
                }
                let out = self
                    .target
                    .op(m)
                    .unwrap()
                    .eval_vectors(&self.target.module, &args)?;
                let scale = -crate::ring::sign_to_rat(eps == 1);
                vec_add_scaled(ring, &mut total, &out, &scale)?;
            }
        }
        Ok(total)
    }
}

/// Partitions 1 ≤ j₁ < j₂ < … < j_m = n.
fn increasing_sequences(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u64..(1 << (n - 1)) {
        let mut ends: Vec<usize> = (1..n).filter(|&i| mask >> (i - 1) & 1 == 1).collect();
        ends.push(n);
        out.push(ends);
    }
    out.sort();
    out
}

/// Exhaustive check of the morphism identity for arities ≤ max_arity.
pub fn check_linfty_morphism(
    f: &LInftyMorphism,
    max_arity: usize,
) -> Result<Option<Counterexample>, LinftyError> {
    let rank = f.source.module.rank();
    for n in 1..=max_arity {
        let tuples = all_tuples(rank, n);
        let hit = tuples
            .par_iter()
            .enumerate()
            .map(|(i, t)| f.relation_residual(t).map(|r| (i, t, r)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .filter(|(_, _, r)| !r.is_empty())
            .min_by_key(|(i, _, _)| *i);
        if let Some((_, t, r)) = hit {
            return Ok(Some(Counterexample {
                arity: n,
                tuple: t
                    .iter()
                    .map(|&g| f.source.module.gen(g).id.clone())
                    .collect(),
                residual: r
                    .iter()
                    .map(|(&g, c)| (f.target.module.gen(g).id.clone(), show_rational(c)))
                    .collect(),
            }));
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Maurer-Cartan
// ---------------------------------------------------------------------------

/// Σ_{d=1}^{D} (1/d!) ℓ^d(x,…,x), truncated at D. Over ℤ (or ℤ/n) the higher
/// terms must vanish identically; rescaling is refused. The element must be
/// odd in the shifted grading carrying the bracket (module parity even),
/// which is also what makes the sum degree-homogeneous.
pub fn mc_residual(
    l: &LInftyStructure,
    x: &SparseVec,
    max_arity: usize,
) -> Result<SparseVec, LinftyError> {
    for (&g, _) in x {
        if (l.module.parity(g) + 1) % 2 != 1 {
            return Err(LinftyError::ParityMismatch);
        }
    }
    let ring = &l.module.ring;
    let mut total = SparseVec::new();
    for d in 1..=max_arity {
        let op = match l.op(d) {
            None => continue,
            Some(op) => op,
        };
        let args: Vec<SparseVec> = (0..d).map(|_| x.clone()).collect();
        let term = op.eval_vectors(&l.module, &args)?;
        if term.is_empty() {
            continue;
        }
        if d >= 2 && !ring.is_q_algebra() {
            return Err(LinftyError::NoFactorialInverse(ring.clone(), d));
        }
        let inv = BigRational::new(BigInt::from(1), factorial(d));
        vec_add_scaled(ring, &mut total, &term, &inv)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// boundary sign
// ---------------------------------------------------------------------------

/// 𝕊 = 1 + ε for the unshuffle σ = (s⁻₁,…,s⁻_{d₋}, s⁺₁,…,s⁺_{d₊−1}); the sign
/// with which a codimension-1 boundary stratum contributes to the relations.
pub fn boundary_sign(
    sigma: &Permutation,
    d_minus: usize,
    parities: &[u8],
) -> Result<i8, LinftyError> {
    if !sigma.is_unshuffle(d_minus) {
        return Err(LinftyError::NotAnUnshuffle(sigma.clone(), d_minus));
    }
    let eps = substitution_eps(sigma, parities)?;
    Ok(if (1 + eps) % 2 == 1 { -1 } else { 1 })
}
