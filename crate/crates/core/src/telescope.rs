//! Telescope complexes over a directed system of chain complexes: the t-adjoined
//! generators and their differential, the ∂ₜ operator and unique ∂ₜ-equivariant
//! extensions, the modified unary operation, homology comparison with the
//! colimit, the shifted action filtration, and level truncation.

use crate::grading::Degree;
use crate::linalg::{
    homology, quotient_invariants, BoundedComplex, GroupInvariants, LinalgError, SparseIntMatrix,
};
use crate::module::{GradedModule, ModuleError};
use crate::multilinear::{MultilinearOp, OpError, Symmetry};
use crate::ring::{show_rational, vec_add_scaled, Ring, RingError, SparseVec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct DirectedSystem {
    /// t-free generators, each carrying a level 1..=levels.
    pub module: GradedModule,
    pub levels: u32,
    /// δ_n per level, degree +1.
    pub deltas: BTreeMap<u32, MultilinearOp>,
    /// κ_n: level n → level n+1, degree 0.
    pub kappas: BTreeMap<u32, MultilinearOp>,
}

#[derive(Debug, thiserror::Error)]
pub enum TelescopeError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("generator {0} must carry a level in 1..={1}")]
    BadLevel(String, u32),
    #[error("operation {op} maps {gen} across levels {from}->{to}, expected {want}")]
    WrongLevelJump {
        op: String,
        gen: String,
        from: u32,
        to: u32,
        want: u32,
    },
    #[error("delta_{0} does not square to zero on {1}")]
    DeltaSquare(u32, String),
    #[error("kappa_{0} is not a chain map: residual {1} on {2}")]
    NotChainMap(u32, String, String),
    #[error("partial data has t in output {0}; extension would produce t²")]
    TSquared(String),
    #[error("generator {0} is missing action metadata")]
    MissingAction(String),
    #[error("shift sequence must be positive and nonincreasing")]
    BadShifts,
    #[error("level {0} exceeds the maximum level {1}")]
    LevelOutOfRange(u32, u32),
    #[error("truncation not closed: entry on {key} outputs {out} of level {level} < {nu}")]
    NotClosed {
        key: String,
        out: String,
        level: u32,
        nu: u32,
    },
    #[error("homology needs ring Z or Q, got {0}")]
    BadRing(Ring),
}

impl DirectedSystem {
    pub fn validate(&self) -> Result<(), TelescopeError> {
        let m = &self.module;
        for g in m.gens() {
            match g.level {
                Some(l) if l >= 1 && l <= self.levels => {}
                _ => return Err(TelescopeError::BadLevel(g.id.clone(), self.levels)),
            }
            if g.t_power != 0 {
                return Err(TelescopeError::BadLevel(g.id.clone(), self.levels));
            }
        }
        let level_of = |g: usize| m.gen(g).level.unwrap();
        for (&n, d) in &self.deltas {
            d.check_homogeneous(m)?;
            for (key, v) in d.entries() {
                for &g in key.iter().chain(v.keys()) {
                    if level_of(g) != n {
                        return Err(TelescopeError::WrongLevelJump {
                            op: format!("delta_{n}"),
                            gen: m.gen(g).id.clone(),
                            from: level_of(key[0]),
                            to: level_of(g),
                            want: n,
                        });
                    }
                }
            }
        }
        for (&n, k) in &self.kappas {
            k.check_homogeneous(m)?;
            for (key, v) in k.entries() {
                if level_of(key[0]) != n {
                    return Err(TelescopeError::WrongLevelJump {
                        op: format!("kappa_{n}"),
                        gen: m.gen(key[0]).id.clone(),
                        from: level_of(key[0]),
                        to: n,
                        want: n,
                    });
                }
                for (&g, _) in v {
                    if level_of(g) != n + 1 {
                        return Err(TelescopeError::WrongLevelJump {
                            op: format!("kappa_{n}"),
                            gen: m.gen(g).id.clone(),
                            from: n,
                            to: level_of(g),
                            want: n + 1,
                        });
                    }
                }
            }
        }
        // δ² = 0 per level, κδ = δκ
        for g in 0..m.rank() {
            let n = level_of(g);
            let dv = self.apply_delta(g)?;
            let mut acc = SparseVec::new();
            for (&h, c) in &dv {
                vec_add_scaled(&m.ring, &mut acc, &self.apply_delta(h)?, c)?;
            }
            if !acc.is_empty() {
                return Err(TelescopeError::DeltaSquare(n, m.gen(g).id.clone()));
            }
            if n < self.levels {
                // κ∘δ − δ∘κ = 0
                let mut res = SparseVec::new();
                for (&h, c) in &dv {
                    vec_add_scaled(&m.ring, &mut res, &self.apply_kappa(h)?, c)?;
                }
                for (&h, c) in &self.apply_kappa(g)? {
                    vec_add_scaled(&m.ring, &mut res, &self.apply_delta(h)?, &-c.clone())?;
                }
                if !res.is_empty() {
                    return Err(TelescopeError::NotChainMap(
                        n,
                        render(m, &res),
                        m.gen(g).id.clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn apply_delta(&self, g: usize) -> Result<SparseVec, TelescopeError> {
        let n = self.module.gen(g).level.unwrap();
        match self.deltas.get(&n) {
            None => Ok(SparseVec::new()),
            Some(op) => Ok(op.eval(&self.module, &[g])?),
        }
    }

    fn apply_kappa(&self, g: usize) -> Result<SparseVec, TelescopeError> {
        let n = self.module.gen(g).level.unwrap();
        match self.kappas.get(&n) {
            None => Ok(SparseVec::new()),
            Some(op) => Ok(op.eval(&self.module, &[g])?),
        }
    }
}

fn render(m: &GradedModule, v: &SparseVec) -> String {
    v.iter()
        .map(|(&g, c)| format!("{}·{}", show_rational(c), m.gen(g).id))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// The telescope complex: one graded module whose generators are the level
/// generators plus t-adjoined copies, with the assembled differential.
#[derive(Debug, Clone)]
pub struct TelescopeComplex {
    pub module: GradedModule,
    pub diff: MultilinearOp,
    pub levels: u32,
    pub top_included: bool,
}

/// Build with the top level's t-generators excluded (the dangling-cone
/// truncation): homology then equals the homology of the terminal level.
pub fn build_telescope(s: &DirectedSystem) -> Result<TelescopeComplex, TelescopeError> {
    build(s, false)
}

/// Variant keeping every level's t-generators, with the missing top κ read as
/// zero; used by the ∂ₜ-equivariance machinery, which needs a total t-pairing.
pub fn build_telescope_with_top(s: &DirectedSystem) -> Result<TelescopeComplex, TelescopeError> {
    build(s, true)
}

fn build(s: &DirectedSystem, include_top: bool) -> Result<TelescopeComplex, TelescopeError> {
    s.validate()?;
    let iota = s.module.datum.int_degree(1);
    let mut module = GradedModule::new(s.module.ring.clone(), s.module.datum.clone());
    let mut plain_idx = Vec::new();
    for g in s.module.gens() {
        plain_idx.push(module.push(g.clone())?);
    }
    let mut t_idx: BTreeMap<usize, usize> = BTreeMap::new();
    for (old, g) in s.module.gens().iter().enumerate() {
        let level = g.level.unwrap();
        if level < s.levels || include_top {
            let mut tg = g.clone();
            tg.id = format!("t:{}", g.id);
            tg.degree = g.degree.sub(&iota);
            tg.t_power = 1;
            let idx = module.push(tg)?;
            t_idx.insert(old, idx);
        }
    }
    let mut diff = MultilinearOp::new(1, iota, Symmetry::None);
    for old in 0..s.module.rank() {
        // d(x) = δx
        let mut v = SparseVec::new();
        for (&h, c) in &s.apply_delta(old)? {
            v.insert(plain_idx[h], c.clone());
        }
        if !v.is_empty() {
            diff.insert_entry(vec![plain_idx[old]], v)?;
        }
        // d(tx') = −tδx' + κx' − x'
        if let Some(&ti) = t_idx.get(&old) {
            let mut v = SparseVec::new();
            for (&h, c) in &s.apply_delta(old)? {
                if let Some(&th) = t_idx.get(&h) {
                    v.insert(th, -c.clone());
                }
            }
            for (&h, c) in &s.apply_kappa(old)? {
                let e = v.entry(plain_idx[h]).or_insert_with(BigRational::zero);
                *e += c;
            }
            let e = v.entry(plain_idx[old]).or_insert_with(BigRational::zero);
            *e -= BigRational::from(BigInt::from(1));
            v.retain(|_, c| !c.is_zero());
            if !v.is_empty() {
                diff.insert_entry(vec![ti], v)?;
            }
        }
    }
    Ok(TelescopeComplex {
        module,
        diff,
        levels: s.levels,
        top_included: include_top,
    })
}

/// ∂ₜ as an arity-1 operation: t·x ↦ x, t-free ↦ 0; degree +1 along iota.
pub fn del_t_op(module: &GradedModule) -> Result<MultilinearOp, TelescopeError> {
    let mut op = MultilinearOp::new(1, module.datum.int_degree(1), Symmetry::None);
    for g in 0..module.rank() {
        if let Some(base) = module.t_base(g) {
            op.insert_entry(
                vec![g],
                SparseVec::from([(base, BigRational::from(BigInt::from(1)))]),
            )?;
        }
    }
    Ok(op)
}

pub fn del_t(module: &GradedModule, v: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (&g, c) in v {
        if let Some(base) = module.t_base(g) {
            out.insert(base, c.clone());
        }
    }
    out
}

/// t·v: send each t-free generator to its t-partner; generators without a
/// partner (a truncated top level) map to zero, t-generators would give t².
fn t_times(module: &GradedModule, v: &SparseVec) -> Result<SparseVec, TelescopeError> {
    let mut out = SparseVec::new();
    for (&g, c) in v {
        if module.gen(g).t_power == 1 {
            return Err(TelescopeError::TSquared(module.gen(g).id.clone()));
        }
        if let Some(t) = module.t_partner(g) {
            out.insert(t, c.clone());
        }
    }
    Ok(out)
}

/// The unique ∂ₜ-equivariant extension of partial data with t-free outputs.
/// Slots 0..closed_arity use the closed-sector sign 1+Σ_{l<j}|u_l|, the
/// remaining `open_arity` slots the reduced-parity variant
/// 1+Σ|closed|+Σ_{l<j}|y_l|′.
pub fn extend_delt_equivariant(
    module: &GradedModule,
    partial: &MultilinearOp,
    closed_arity: usize,
    open_arity: usize,
) -> Result<MultilinearOp, TelescopeError> {
    assert_eq!(partial.arity, closed_arity + open_arity);
    for (_, v) in partial.entries() {
        for (&g, _) in v {
            if module.gen(g).t_power == 1 {
                return Err(TelescopeError::TSquared(module.gen(g).id.clone()));
            }
        }
    }
    let mut ext = partial.clone();
    let one = BigRational::from(BigInt::from(1));
    for (key, val) in partial.entries() {
        for j in 0..key.len() {
            let g = key[j];
            let t = match module.t_partner(g) {
                Some(t) => t,
                None => continue,
            };
            let mut tkey = key.clone();
            tkey[j] = t;
            // sign exponent per sector
            let mut exp: u8 = 1;
            if j < closed_arity {
                for &u in &tkey[..j] {
                    exp ^= module.parity(u) & 1;
                }
            } else {
                for &u in &tkey[..closed_arity] {
                    exp ^= module.parity(u) & 1;
                }
                for &u in &tkey[closed_arity..j] {
                    exp ^= (module.parity(u) + 1) & 1;
                }
            }
            let tv = t_times(module, val)?;
            let scale = if exp % 2 == 1 { -&one } else { one.clone() };
            for (&h, c) in &tv {
                ext.add(module, &tkey, h, &scale * c)?;
            }
        }
    }
    Ok(ext)
}

/// Violation of the ∂ₜ-equivariance law at one basis tuple.
#[derive(Debug, Clone)]
pub struct EquivarianceViolation {
    pub tuple: Vec<String>,
    pub residual: Vec<(String, String)>,
}

/// Check the displayed equivariance law exactly on all basis tuples.
pub fn check_delt_equivariance(
    module: &GradedModule,
    op: &MultilinearOp,
    closed_arity: usize,
) -> Result<Option<EquivarianceViolation>, TelescopeError> {
    let arity = op.arity;
    let rank = module.rank();
    let ring = &module.ring;
    for key in crate::linfty::all_tuples(rank, arity) {
        // LHS: ∂ₜ op(u)
        let mut lhs = del_t(module, &op.eval(module, &key)?);
        // RHS: Σ_j ± op(u with ∂ₜ at slot j)
        for j in 0..arity {
            let base = match module.t_base(key[j]) {
                Some(b) => b,
                None => continue,
            };
            let mut k2 = key.clone();
            k2[j] = base;
            let mut exp: u8 = 1;
            if j < closed_arity {
                for &u in &key[..j] {
                    exp ^= module.parity(u) & 1;
                }
            } else {
                for &u in &key[..closed_arity] {
                    exp ^= module.parity(u) & 1;
                }
                for &u in &key[closed_arity..j] {
                    exp ^= (module.parity(u) + 1) & 1;
                }
            }
            let term = op.eval(module, &k2)?;
            let scale = crate::ring::sign_to_rat(exp % 2 == 1);
            vec_add_scaled(ring, &mut lhs, &term, &-scale)?;
        }
        if !lhs.is_empty() {
            return Ok(Some(EquivarianceViolation {
                tuple: key.iter().map(|&g| module.gen(g).id.clone()).collect(),
                residual: lhs
                    .iter()
                    .map(|(&g, c)| (module.gen(g).id.clone(), show_rational(c)))
                    .collect(),
            }));
        }
    }
    Ok(None)
}

/// op − ∂ₜ.
pub fn modify_unary(
    module: &GradedModule,
    op: &MultilinearOp,
) -> Result<MultilinearOp, TelescopeError> {
    let mut out = op.clone();
    let one = BigRational::from(BigInt::from(1));
    for g in 0..module.rank() {
        if let Some(base) = module.t_base(g) {
            out.add(module, &[g], base, -&one)?;
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// homology and the colimit comparison
// ---------------------------------------------------------------------------

fn degree_blocks(module: &GradedModule) -> BTreeMap<Degree, Vec<usize>> {
    let mut out: BTreeMap<Degree, Vec<usize>> = BTreeMap::new();
    for g in 0..module.rank() {
        out.entry(module.degree(g).clone()).or_default().push(g);
    }
    out
}

/// Assemble a unary degree-(+1) operation into a bounded complex; over ℚ the
/// matrices are scaled integral (ranks unaffected, torsion reported empty).
pub fn to_bounded_complex(
    module: &GradedModule,
    op: &MultilinearOp,
) -> Result<BoundedComplex, TelescopeError> {
    let rational = match module.ring {
        Ring::Int => false,
        Ring::Rat => true,
        ref r => return Err(TelescopeError::BadRing(r.clone())),
    };
    let blocks = degree_blocks(module);
    let iota = module.datum.int_degree(1);
    let mut denom = BigInt::from(1);
    for (_, v) in op.entries() {
        for c in v.values() {
            denom = num_integer::lcm(denom.clone(), c.denom().clone());
        }
    }
    let mut ranks = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for (deg, gens) in &blocks {
        ranks.insert(deg.clone(), gens.len());
    }
    for (deg, gens) in &blocks {
        let succ = deg.add(&iota);
        let target = blocks.get(&succ).cloned().unwrap_or_default();
        let pos: BTreeMap<usize, usize> = target.iter().enumerate().map(|(r, &g)| (g, r)).collect();
        let mut mat = SparseIntMatrix::new(target.len(), gens.len());
        for (j, &g) in gens.iter().enumerate() {
            for (&h, c) in &op.eval(module, &[g])? {
                let r = *pos
                    .get(&h)
                    .expect("unary operation must raise degree by one iota step");
                let scaled = c * BigRational::from(denom.clone());
                mat.set(r, j, scaled.numer().clone())?;
            }
        }
        if !mat.is_zero() || !gens.is_empty() {
            diffs.insert(deg.clone(), mat);
        }
    }
    // make sure successor ranks exist even when empty
    let keys: Vec<Degree> = ranks.keys().cloned().collect();
    for deg in keys {
        ranks.entry(deg.add(&iota)).or_insert(0);
    }
    Ok(BoundedComplex {
        rational,
        iota: iota.0,
        ranks,
        diffs,
    })
}

pub fn telescope_homology(
    t: &TelescopeComplex,
) -> Result<BTreeMap<Degree, GroupInvariants>, TelescopeError> {
    Ok(homology(&to_bounded_complex(&t.module, &t.diff)?)?)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ColimitDegreeReport {
    pub degree: Vec<i64>,
    pub telescope: GroupInvariants,
    pub colimit_image: GroupInvariants,
    pub equal: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ColimitReport {
    pub per_degree: Vec<ColimitDegreeReport>,
    pub all_equal: bool,
}

/// Compare telescope homology with the part of the terminal level's homology
/// reached by composing the continuation maps from the initial level.
pub fn compare_with_colimit(s: &DirectedSystem) -> Result<ColimitReport, TelescopeError> {
    let tel = build_telescope(s)?;
    let tel_h = telescope_homology(&tel)?;
    // terminal-level complex restricted from the system's module
    let level_of = |g: usize| s.module.gen(g).level.unwrap();
    let blocks = degree_blocks(&s.module);
    let iota = s.module.datum.int_degree(1);
    let mut per_degree = Vec::new();
    let mut degrees: Vec<Degree> = tel_h.keys().cloned().collect();
    for d in blocks.keys() {
        if !degrees.contains(d) {
            degrees.push(d.clone());
        }
    }
    degrees.sort();
    for deg in degrees {
        // C_N at this degree and the two adjacent ones
        let at = |n: u32, d: &Degree| -> Vec<usize> {
            blocks
                .get(d)
                .map(|gs| gs.iter().copied().filter(|&g| level_of(g) == n).collect())
                .unwrap_or_default()
        };
        let top = s.levels;
        let c_n: Vec<usize> = at(top, &deg);
        let c_n_next: Vec<usize> = at(top, &deg.add(&iota));
        let c_n_prev: Vec<usize> = at(top, &deg.sub(&iota));
        let c_1: Vec<usize> = at(1, &deg);
        // matrices of δ_N out of deg and into deg
        let m_out = op_matrix(s, &s.deltas, top, &c_n, &c_n_next)?;
        let m_in = op_matrix(s, &s.deltas, top, &c_n_prev, &c_n)?;
        // cycles of level 1 at deg, pushed through the composite κ
        let d1_out = op_matrix(s, &s.deltas, 1, &c_1, &at(1, &deg.add(&iota)))?;
        let cycles = crate::linalg::kernel_basis(&d1_out);
        let mut pushed: Vec<Vec<BigInt>> = Vec::new();
        for z in &cycles {
            // express as SparseVec on the system module, apply κ's
            let mut v = SparseVec::new();
            for (i, &g) in c_1.iter().enumerate() {
                if !z[i].is_zero() {
                    v.insert(g, BigRational::from(z[i].clone()));
                }
            }
            for _ in 1..top {
                let mut next = SparseVec::new();
                for (&g, c) in &v {
                    vec_add_scaled(&s.module.ring, &mut next, &s.apply_kappa(g)?, c)?;
                }
                v = next;
            }
            // clear the vector's denominators; a nonzero scaling of a
            // generator leaves its span over ℚ unchanged, and over ℤ the
            // system tables are integral so the scale is 1
            let scale = v
                .values()
                .fold(BigInt::from(1), |acc, c| num_integer::lcm(acc, c.denom().clone()));
            let mut col = vec![BigInt::zero(); c_n.len()];
            for (&g, c) in &v {
                let i = c_n
                    .iter()
                    .position(|&h| h == g)
                    .expect("kappa lands in level N");
                let scaled = c * BigRational::from(scale.clone());
                col[i] = scaled.numer().clone();
            }
            pushed.push(col);
        }
        let image_cols: Vec<Vec<BigInt>> = (0..m_in.cols)
            .map(|j| (0..m_in.rows).map(|i| m_in.get(i, j)).collect())
            .collect();
        let mut colimit_image = quotient_invariants(&pushed, &image_cols, c_n.len());
        // pushed classes must be cycles in C_N (κ chain maps preserve cycles)
        for z in &pushed {
            debug_assert!(m_out.apply(z).unwrap().iter().all(BigInt::is_zero));
        }
        if s.module.ring == Ring::Rat {
            colimit_image.torsion.clear();
        }
        let tele = tel_h
            .get(&deg)
            .cloned()
            .unwrap_or_else(GroupInvariants::trivial);
        let equal = tele == colimit_image;
        per_degree.push(ColimitDegreeReport {
            degree: deg.0.clone(),
            telescope: tele,
            colimit_image,
            equal,
        });
    }
    let all_equal = per_degree.iter().all(|d| d.equal);
    Ok(ColimitReport {
        per_degree,
        all_equal,
    })
}

fn op_matrix(
    s: &DirectedSystem,
    ops: &BTreeMap<u32, MultilinearOp>,
    level: u32,
    from: &[usize],
    to: &[usize],
) -> Result<SparseIntMatrix, TelescopeError> {
    let mut mat = SparseIntMatrix::new(to.len(), from.len());
    let op = ops.get(&level);
    let pos: BTreeMap<usize, usize> = to.iter().enumerate().map(|(r, &g)| (g, r)).collect();
    if let Some(op) = op {
        // over ℚ the matrix is cleared to integers by one global scale
        // (rank-safe; torsion is not reported over ℚ)
        let mut scale = BigInt::from(1);
        for (j, &g) in from.iter().enumerate() {
            let _ = j;
            for (_, c) in &op.eval(&s.module, &[g])? {
                scale = num_integer::lcm(scale, c.denom().clone());
            }
        }
        for (j, &g) in from.iter().enumerate() {
            for (&h, c) in &op.eval(&s.module, &[g])? {
                if let Some(&r) = pos.get(&h) {
                    let scaled = c * BigRational::from(scale.clone());
                    mat.set(r, j, scaled.numer().clone())?;
                }
            }
        }
    }
    Ok(mat)
}

// ---------------------------------------------------------------------------
// action filtration
// ---------------------------------------------------------------------------

/// A structure whose generators carry actions and levels, together with the
/// shift sequence δ_ν (positive, nonincreasing exact rationals).
#[derive(Debug, Clone)]
pub struct FilteredStructure {
    pub module: GradedModule,
    pub ops: BTreeMap<usize, MultilinearOp>,
    pub shifts: Vec<BigRational>,
}

#[derive(Debug, Clone)]
pub struct FiltrationViolation {
    pub arity: usize,
    pub key: Vec<String>,
    pub out: String,
    /// A(out) − δ − Σ(A(inᵢ) − δ), negative exactly when violated.
    pub slack: String,
}

impl FilteredStructure {
    pub fn validate_shifts(&self) -> Result<(), TelescopeError> {
        if self.shifts.is_empty()
            || self.shifts.iter().any(|d| !d.is_positive())
            || self.shifts.windows(2).any(|w| w[0] < w[1])
        {
            return Err(TelescopeError::BadShifts);
        }
        Ok(())
    }

    fn action(&self, g: usize) -> Result<&BigRational, TelescopeError> {
        self.module
            .gen(g)
            .action
            .as_ref()
            .ok_or_else(|| TelescopeError::MissingAction(self.module.gen(g).id.clone()))
    }
}

/// A(out) − δ_ν ≥ Σᵢ (A(inᵢ) − δ_ν) for every nonzero structure constant;
/// first violation reported.
pub fn check_filtration(
    f: &FilteredStructure,
    nu: u32,
) -> Result<Option<FiltrationViolation>, TelescopeError> {
    f.validate_shifts()?;
    let delta = f
        .shifts
        .get((nu as usize).saturating_sub(1))
        .ok_or(TelescopeError::LevelOutOfRange(nu, f.shifts.len() as u32))?;
    for g in f.module.gens() {
        match g.level {
            Some(l) if l >= nu => {}
            _ => return Err(TelescopeError::BadLevel(g.id.clone(), nu)),
        }
    }
    for (&arity, op) in &f.ops {
        for (key, v) in op.entries() {
            let mut in_sum = BigRational::zero();
            for &g in key {
                in_sum += f.action(g)?;
            }
            for (&out, _) in v {
                let a_out = f.action(out)?.clone();
                // A(out) − δ − Σ(A(in) − δ) = A(out) − ΣA(in) + (d−1)δ
                let slack =
                    &a_out - &in_sum + BigRational::from(BigInt::from(arity as i64 - 1)) * delta;
                if slack.is_negative() {
                    return Ok(Some(FiltrationViolation {
                        arity,
                        key: key.iter().map(|&g| f.module.gen(g).id.clone()).collect(),
                        out: f.module.gen(out).id.clone(),
                        slack: show_rational(&slack),
                    }));
                }
            }
        }
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// level truncation
// ---------------------------------------------------------------------------

/// Restrict to generators of level ≥ ν; fails when a stored operation maps
/// kept inputs to a dropped output.
pub fn truncate_to_level(
    module: &GradedModule,
    ops: &BTreeMap<usize, MultilinearOp>,
    nu: u32,
) -> Result<(GradedModule, BTreeMap<usize, MultilinearOp>), TelescopeError> {
    let max_level = module
        .gens()
        .iter()
        .filter_map(|g| g.level)
        .max()
        .unwrap_or(0);
    if nu > max_level {
        return Err(TelescopeError::LevelOutOfRange(nu, max_level));
    }
    let mut out = GradedModule::new(module.ring.clone(), module.datum.clone());
    let mut remap: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, g) in module.gens().iter().enumerate() {
        let level = g
            .level
            .ok_or_else(|| TelescopeError::BadLevel(g.id.clone(), nu))?;
        if level >= nu {
            remap.insert(i, out.push(g.clone())?);
        }
    }
    let mut new_ops = BTreeMap::new();
    for (&arity, op) in ops {
        let mut nop = MultilinearOp::new(arity, op.shift.clone(), op.symmetry);
        for (key, v) in op.entries() {
            if !key.iter().all(|g| remap.contains_key(g)) {
                continue;
            }
            let nkey: Vec<usize> = key.iter().map(|g| remap[g]).collect();
            let mut nv = SparseVec::new();
            for (&g, c) in v {
                match remap.get(&g) {
                    Some(&ng) => {
                        nv.insert(ng, c.clone());
                    }
                    None => {
                        return Err(TelescopeError::NotClosed {
                            key: key
                                .iter()
                                .map(|&k| module.gen(k).id.clone())
                                .collect::<Vec<_>>()
                                .join(","),
                            out: module.gen(g).id.clone(),
                            level: module.gen(g).level.unwrap_or(0),
                            nu,
                        })
                    }
                }
            }
            nop.insert_entry(nkey, nv)?;
        }
        new_ops.insert(arity, nop);
    }
    Ok((out, new_ops))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::GradingDatum;
    use crate::module::Generator;
    use crate::ring::rat;

    /// One free generator per level in degree 0 plus a degree-1 partner, with
    /// δ given by `d_coeff` and κ the identity-like map `k_coeff`.
    pub fn two_level_system(d1: i64, d2: i64, k0: i64, k1: i64) -> DirectedSystem {
        let mut m = GradedModule::new(Ring::Int, GradingDatum::standard());
        for n in 1..=2u32 {
            for (id, d) in [("a", 0i64), ("b", 1)] {
                let mut g = Generator::new(format!("{id}{n}"), Degree(vec![d]));
                g.level = Some(n);
                m.push(g).unwrap();
            }
        }
        // indices: a1=0, b1=1, a2=2, b2=3
        let mut deltas = BTreeMap::new();
        let mut d_1 = MultilinearOp::new(1, Degree(vec![1]), Symmetry::None);
        if d1 != 0 {
            d_1.insert_entry(vec![0], SparseVec::from([(1, rat(d1))]))
                .unwrap();
        }
        deltas.insert(1, d_1);
        let mut d_2 = MultilinearOp::new(1, Degree(vec![1]), Symmetry::None);
        if d2 != 0 {
            d_2.insert_entry(vec![2], SparseVec::from([(3, rat(d2))]))
                .unwrap();
        }
        deltas.insert(2, d_2);
        let mut kappas = BTreeMap::new();
        let mut k = MultilinearOp::new(1, Degree(vec![0]), Symmetry::None);
        if k0 != 0 {
            k.insert_entry(vec![0], SparseVec::from([(2, rat(k0))]))
                .unwrap();
        }
        if k1 != 0 {
            k.insert_entry(vec![1], SparseVec::from([(3, rat(k1))]))
                .unwrap();
        }
        kappas.insert(1, k);
        DirectedSystem {
            module: m,
            levels: 2,
            deltas,
            kappas,
        }
    }

    #[test]
    fn telescope_differential_squares_to_zero() {
        for (d1, d2, k0, k1) in [(0, 0, 1, 1), (2, 2, 1, 1), (0, 0, 0, 0), (3, 3, 2, 2)] {
            let s = two_level_system(d1, d2, k0, k1);
            // κ must be a chain map: δ2·k0 = k1·δ1
            if d2 * k0 != k1 * d1 {
                continue;
            }
            for tel in [
                build_telescope(&s).unwrap(),
                build_telescope_with_top(&s).unwrap(),
            ] {
                let c = to_bounded_complex(&tel.module, &tel.diff).unwrap();
                assert!(c.check_complex().is_ok());
            }
        }
    }

    #[test]
    fn non_chain_map_rejected() {
        let s = two_level_system(2, 2, 1, 2); // δκ = 2, κδ = 4
        assert!(matches!(s.validate(), Err(TelescopeError::NotChainMap(..))));
    }

    #[test]
    fn identity_kappa_telescope_has_level_homology() {
        let s = two_level_system(2, 2, 1, 1);
        let r = compare_with_colimit(&s).unwrap();
        assert!(r.all_equal);
        // H(level) = Z at degree 0? δ = ×2: H^0 = 0, H^1 = Z/2
        let tel = build_telescope(&s).unwrap();
        let h = telescope_homology(&tel).unwrap();
        assert_eq!(h[&Degree(vec![1])].torsion, vec!["2".to_string()]);
        assert_eq!(h[&Degree(vec![0])].free_rank, 0);
    }

    #[test]
    fn rational_system_with_fractional_kappa_compares_soundly() {
        // over ℚ: κ(a1) = (1/2)·a2 is an isomorphism on homology
        let mut m = GradedModule::new(Ring::Rat, GradingDatum::standard());
        for (id, lvl) in [("a1", 1u32), ("a2", 2)] {
            let mut g = Generator::new(id, Degree(vec![0]));
            g.level = Some(lvl);
            m.push(g).unwrap();
        }
        let mut k = MultilinearOp::new(1, Degree(vec![0]), Symmetry::None);
        k.insert_entry(
            vec![0],
            SparseVec::from([(1, BigRational::new(BigInt::from(1), BigInt::from(2)))]),
        )
        .unwrap();
        let s = DirectedSystem {
            module: m,
            levels: 2,
            deltas: BTreeMap::new(),
            kappas: BTreeMap::from([(1, k)]),
        };
        s.validate().unwrap();
        let r = compare_with_colimit(&s).unwrap();
        assert!(r.all_equal);
    }

    #[test]
    fn quasi_iso_that_is_not_an_iso_compares_equal() {
        // level 1 = Z·a ⊕ acyclic cone [u → v]; level 2 = Z·a'; κ collapses
        // the cone. κ is a quasi-isomorphism but not an isomorphism.
        let mut m = GradedModule::new(Ring::Int, GradingDatum::standard());
        for (id, deg, lvl) in [("a", 0i64, 1u32), ("u", 0, 1), ("v", 1, 1), ("a2", 0, 2)] {
            let mut g = Generator::new(id, Degree(vec![deg]));
            g.level = Some(lvl);
            m.push(g).unwrap();
        }
        let mut d1 = MultilinearOp::new(1, Degree(vec![1]), Symmetry::None);
        d1.insert_entry(vec![1], SparseVec::from([(2, rat(1))]))
            .unwrap();
        let mut k = MultilinearOp::new(1, Degree(vec![0]), Symmetry::None);
        k.insert_entry(vec![0], SparseVec::from([(3, rat(1))]))
            .unwrap();
        let s = DirectedSystem {
            module: m,
            levels: 2,
            deltas: BTreeMap::from([(1, d1)]),
            kappas: BTreeMap::from([(1, k)]),
        };
        s.validate().unwrap();
        let r = compare_with_colimit(&s).unwrap();
        assert!(r.all_equal);
    }

    #[test]
    fn zero_kappa_reports_inequality() {
        let s = two_level_system(0, 0, 0, 0);
        let r = compare_with_colimit(&s).unwrap();
        assert!(!r.all_equal);
    }

    #[test]
    fn del_t_squares_to_zero_and_has_degree_one() {
        let s = two_level_system(2, 2, 1, 1);
        let tel = build_telescope_with_top(&s).unwrap();
        let dt = del_t_op(&tel.module).unwrap();
        dt.check_homogeneous(&tel.module).unwrap();
        for g in 0..tel.module.rank() {
            let v = dt.eval(&tel.module, &[g]).unwrap();
            let mut acc = SparseVec::new();
            for (&h, c) in &v {
                vec_add_scaled(
                    &tel.module.ring,
                    &mut acc,
                    &dt.eval(&tel.module, &[h]).unwrap(),
                    c,
                )
                .unwrap();
            }
            assert!(acc.is_empty());
        }
    }

    #[test]
    fn extension_of_delta_matches_dsc_first_terms() {
        // partial: x ↦ δx only (no κ entries); extension must give
        // x + tx' ↦ δx − tδx'
        let s = two_level_system(2, 2, 1, 1);
        let tel = build_telescope_with_top(&s).unwrap();
        let m = &tel.module;
        let mut partial = MultilinearOp::new(1, m.datum.int_degree(1), Symmetry::None);
        // copy δ on the t-free generators
        for g in 0..m.rank() {
            if m.gen(g).t_power == 0 {
                let v = tel.diff.eval(m, &[g]).unwrap();
                if !v.is_empty() {
                    partial.insert_entry(vec![g], v).unwrap();
                }
            }
        }
        let ext = extend_delt_equivariant(m, &partial, 1, 0).unwrap();
        // on t-generators: −tδx' and nothing else
        for g in 0..m.rank() {
            if let Some(base) = m.t_base(g) {
                let got = ext.eval(m, &[g]).unwrap();
                let mut want = SparseVec::new();
                for (&h, c) in &partial.eval(m, &[base]).unwrap() {
                    if let Some(th) = m.t_partner(h) {
                        want.insert(th, -c.clone());
                    }
                }
                assert_eq!(got, want, "gen {}", m.gen(g).id);
            }
        }
        // restricting the extension to t-free inputs recovers the partial op
        for g in 0..m.rank() {
            if m.gen(g).t_power == 0 {
                assert_eq!(ext.eval(m, &[g]).unwrap(), partial.eval(m, &[g]).unwrap());
            }
        }
        assert!(check_delt_equivariance(m, &ext, 1).unwrap().is_none());
    }

    #[test]
    fn extension_with_kappa_then_modify_reproduces_dsc() {
        let s = two_level_system(2, 2, 1, 1);
        let tel = build_telescope_with_top(&s).unwrap();
        let m = &tel.module;
        // partial data: x ↦ δx and t·x' ↦ κx' (t-free outputs only)
        let mut partial = MultilinearOp::new(1, m.datum.int_degree(1), Symmetry::None);
        for g in 0..m.rank() {
            match m.t_base(g) {
                None => {
                    let v = tel.diff.eval(m, &[g]).unwrap();
                    if !v.is_empty() {
                        partial.insert_entry(vec![g], v).unwrap();
                    }
                }
                Some(base) => {
                    // κ part of dSC on the t-generator: drop t-outputs and the −x' term
                    let mut v = tel.diff.eval(m, &[g]).unwrap();
                    v.retain(|&h, _| m.gen(h).t_power == 0 && h != base);
                    if !v.is_empty() {
                        partial.insert_entry(vec![g], v).unwrap();
                    }
                }
            }
        }
        let ltilde = extend_delt_equivariant(m, &partial, 1, 0).unwrap();
        assert!(check_delt_equivariance(m, &ltilde, 1).unwrap().is_none());
        let l1 = modify_unary(m, &ltilde).unwrap();
        for g in 0..m.rank() {
            assert_eq!(
                l1.eval(m, &[g]).unwrap(),
                tel.diff.eval(m, &[g]).unwrap(),
                "dSC mismatch at {}",
                m.gen(g).id
            );
        }
        // square-zero survives the modification
        for g in 0..m.rank() {
            let mut acc = SparseVec::new();
            for (&h, c) in &l1.eval(m, &[g]).unwrap() {
                vec_add_scaled(&m.ring, &mut acc, &l1.eval(m, &[h]).unwrap(), c).unwrap();
            }
            assert!(acc.is_empty());
        }
    }

    #[test]
    fn modify_unary_of_zero_is_minus_del_t() {
        let s = two_level_system(0, 0, 1, 1);
        let tel = build_telescope_with_top(&s).unwrap();
        let zero = MultilinearOp::new(1, tel.module.datum.int_degree(1), Symmetry::None);
        let m1 = modify_unary(&tel.module, &zero).unwrap();
        let dt = del_t_op(&tel.module).unwrap();
        for g in 0..tel.module.rank() {
            let a = m1.eval(&tel.module, &[g]).unwrap();
            let b: SparseVec = dt
                .eval(&tel.module, &[g])
                .unwrap()
                .into_iter()
                .map(|(h, c)| (h, -c))
                .collect();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn filtration_checker_accept_and_reject() {
        let mut m = GradedModule::new(Ring::Int, GradingDatum::standard());
        for (id, deg, act) in [("u", 1i64, "3"), ("v", 1, "2"), ("w", 1, "9/2")] {
            let mut g = Generator::new(id, Degree(vec![deg]));
            g.level = Some(1);
            g.action = Some(crate::ring::parse_rational(act).unwrap());
            m.push(g).unwrap();
        }
        let shifts = vec![rat(1), BigRational::new(BigInt::from(1), BigInt::from(2))];
        // d=2 entry with A(out) = A1 + A2 − δ/2: slack = δ/2 ≥ 0
        let mut op = MultilinearOp::new(2, Degree(vec![-1]), Symmetry::Graded);
        op.insert_entry(vec![0, 1], SparseVec::from([(2, rat(1))]))
            .unwrap();
        let f = FilteredStructure {
            module: m.clone(),
            ops: BTreeMap::from([(2, op)]),
            shifts: shifts.clone(),
        };
        assert!(check_filtration(&f, 1).unwrap().is_none());
        // violation: demand A(out) < A1 + A2 − δ
        let mut bad = MultilinearOp::new(2, Degree(vec![-1]), Symmetry::Graded);
        bad.insert_entry(vec![1, 2], SparseVec::from([(0, rat(1))]))
            .unwrap();
        // A(out)=3, inputs 2 + 9/2 = 13/2, δ=1: slack = 3 − 13/2 + 1 = −5/2
        let f2 = FilteredStructure {
            module: m,
            ops: BTreeMap::from([(2, bad)]),
            shifts,
        };
        let v = check_filtration(&f2, 1).unwrap().unwrap();
        assert_eq!(v.slack, "-5/2");
    }

    #[test]
    fn d1_entries_pass_whenever_action_does_not_drop() {
        let mut m = GradedModule::new(Ring::Int, GradingDatum::standard());
        for (id, deg, act) in [("u", 0i64, "1"), ("v", 1, "1")] {
            let mut g = Generator::new(id, Degree(vec![deg]));
            g.level = Some(3);
            g.action = Some(crate::ring::parse_rational(act).unwrap());
            m.push(g).unwrap();
        }
        let mut op = MultilinearOp::new(1, Degree(vec![1]), Symmetry::None);
        op.insert_entry(vec![0], SparseVec::from([(1, rat(5))]))
            .unwrap();
        let f = FilteredStructure {
            module: m,
            ops: BTreeMap::from([(1, op)]),
            shifts: vec![rat(7), rat(5), rat(1)],
        };
        // d=1: A(out) ≥ A(in) regardless of δ
        assert!(check_filtration(&f, 3).unwrap().is_none());
    }

    #[test]
    fn truncation_identity_top_and_non_closure() {
        let s = two_level_system(2, 2, 1, 1);
        let tel = build_telescope(&s).unwrap();
        let ops = BTreeMap::from([(1usize, tel.diff.clone())]);
        // ν = 1 keeps everything
        let (m1, o1) = truncate_to_level(&tel.module, &ops, 1).unwrap();
        assert_eq!(m1.rank(), tel.module.rank());
        assert_eq!(o1[&1].entries().count(), tel.diff.entries().count());
        // ν = 2: the t-generators of level 1 are dropped along with their
        // entries; the level-2 part is closed
        let (m2, _) = truncate_to_level(&tel.module, &ops, 2).unwrap();
        assert!(m2.rank() < tel.module.rank());
        // non-closure: κ runs upward, so dropping level 2 from a κ entry fails
        let mut down = MultilinearOp::new(1, Degree(vec![0]), Symmetry::None);
        // build an op mapping a level-2 generator down to level 1
        let l2gen = (0..tel.module.rank())
            .find(|&g| tel.module.gen(g).level == Some(2))
            .unwrap();
        let l1gen = (0..tel.module.rank())
            .find(|&g| {
                tel.module.gen(g).level == Some(1)
                    && tel.module.degree(g) == tel.module.degree(l2gen)
            })
            .unwrap();
        down.insert_entry(vec![l2gen], SparseVec::from([(l1gen, rat(1))]))
            .unwrap();
        let bad = BTreeMap::from([(1usize, down)]);
        assert!(matches!(
            truncate_to_level(&tel.module, &bad, 2),
            Err(TelescopeError::NotClosed { .. })
        ));
    }
}
