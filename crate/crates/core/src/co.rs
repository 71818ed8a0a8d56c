//! Closed-open data: maps co_{d,k} taking d closed-sector inputs and a
//! length-k hom chain to a hom element, graded symmetric in the closed inputs,
//! their structural relations, and the assembly into an L∞ morphism landing in
//! the Hochschild cochain structure of the target category.

use crate::ainfty::{cc_as_linfty, AInftyCategory, AInftyError, CcBasis};
use crate::grading::Degree;
use crate::linfty::{
    check_linfty_morphism, Counterexample, LInftyMorphism, LInftyStructure, LinftyError,
};
use crate::multilinear::{MultilinearOp, OpError, Symmetry};
use crate::perm::{substitution_eps, substitution_sign, unshuffles, PermError, Permutation};
use crate::ring::{show_rational, vec_add_scaled, RingError, SparseVec};
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

/// One co_{d,k} table: keys are (canonically sorted closed tuple, ascending
/// open chain), values in the target hom module.
#[derive(Debug, Clone)]
pub struct CoOp {
    pub d: usize,
    pub k: usize,
    table: BTreeMap<(Vec<usize>, Vec<usize>), SparseVec>,
}

#[derive(Debug, thiserror::Error)]
pub enum CoError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    AInfty(#[from] AInftyError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error("duplicate co entry for {0:?}")]
    Duplicate(String),
    #[error("co_{{0,{0}}} must coincide with the structure map of the target")]
    MuMismatch(usize),
    #[error("co entry {key} is not degree-homogeneous: output {out} has {got}, expected {want}")]
    NotHomogeneous {
        key: String,
        out: String,
        got: Degree,
        want: Degree,
    },
    #[error("open chain in {0} is not composable")]
    NotComposable(String),
    #[error("graded symmetry fails at {key} under {sigma}")]
    SymmetryViolation { key: String, sigma: Permutation },
    #[error("window [{0},{1}] cannot host co data at open arity {2}")]
    WindowInsufficiency(usize, usize, usize),
    #[error("co relation fails at (d={d}, k={k}) on ({xs}; {ys}) with residual {residual}")]
    RelationViolation {
        d: usize,
        k: usize,
        xs: String,
        ys: String,
        residual: String,
    },
}

impl CoOp {
    pub fn new(d: usize, k: usize) -> Self {
        CoOp {
            d,
            k,
            table: BTreeMap::new(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Vec<usize>, Vec<usize>), &SparseVec)> {
        self.table.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn insert_entry(
        &mut self,
        xs: Vec<usize>,
        ys: Vec<usize>,
        value: SparseVec,
    ) -> Result<(), CoError> {
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        if sorted != xs || self.table.contains_key(&(xs.clone(), ys.clone())) {
            return Err(CoError::Duplicate(format!("({xs:?};{ys:?})")));
        }
        if !value.is_empty() {
            self.table.insert((xs, ys), value);
        }
        Ok(())
    }

    /// Evaluate, canonicalizing the closed inputs by the Koszul substitution
    /// sign of the source parities.
    pub fn eval(
        &self,
        source: &crate::module::GradedModule,
        xs: &[usize],
        ys: &[usize],
    ) -> Result<SparseVec, CoError> {
        let dlen = xs.len();
        let mut order: Vec<usize> = (0..dlen).collect();
        order.sort_by_key(|&i| (xs[i], i));
        let cxs: Vec<usize> = order.iter().map(|&i| xs[i]).collect();
        let sigma = Permutation::from_images(order)?.inverse();
        let pc = source.parities(&cxs);
        let sign = substitution_sign(&sigma, &pc)?;
        match self.table.get(&(cxs, ys.to_vec())) {
            None => Ok(SparseVec::new()),
            Some(v) if sign > 0 => Ok(v.clone()),
            Some(v) => Ok(v.iter().map(|(&g, c)| (g, -c)).collect()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClosedOpenData {
    pub source: LInftyStructure,
    pub target: AInftyCategory,
    pub co: BTreeMap<(usize, usize), CoOp>,
    pub d_cap: usize,
    pub k_cap: usize,
}

impl ClosedOpenData {
    /// Assemble, injecting co_{0,k} := μᵏ. Explicit (0,k) data must agree.
    pub fn new(
        source: LInftyStructure,
        target: AInftyCategory,
        mut co: BTreeMap<(usize, usize), CoOp>,
        d_cap: usize,
        k_cap: usize,
    ) -> Result<Self, CoError> {
        for (&k, op) in &target.mu {
            let mut injected = CoOp::new(0, k);
            for (key, v) in op.entries() {
                injected.insert_entry(vec![], key.clone(), v.clone())?;
            }
            if let Some(given) = co.get(&(0, k)) {
                if given.table != injected.table {
                    return Err(CoError::MuMismatch(k));
                }
            }
            co.insert((0, k), injected);
        }
        // reject explicit (0,k) blocks for arities without a μ table
        for (&(d, k), op) in &co {
            if d == 0 && !op.is_empty() && !target.mu.contains_key(&k) {
                return Err(CoError::MuMismatch(k));
            }
        }
        let data = ClosedOpenData {
            source,
            target,
            co,
            d_cap,
            k_cap,
        };
        data.validate()?;
        Ok(data)
    }

    fn validate(&self) -> Result<(), CoError> {
        for (&(d, k), op) in &self.co {
            for ((xs, ys), v) in op.entries() {
                if xs.len() != d || ys.len() != k {
                    return Err(CoError::Duplicate(format!("({xs:?};{ys:?})")));
                }
                if !self.target.is_composable(ys)? {
                    return Err(CoError::NotComposable(self.describe_key(xs, ys)));
                }
                let mut want = self
                    .source
                    .module
                    .datum
                    .int_degree(2 - 2 * d as i64 - k as i64);
                for &x in xs {
                    want = want.add(self.source.module.degree(x));
                }
                for &y in ys {
                    want = want.add(self.target.module.degree(y));
                }
                for (&out, _) in v {
                    if *self.target.module.degree(out) != want {
                        return Err(CoError::NotHomogeneous {
                            key: self.describe_key(xs, ys),
                            out: self.target.module.gen(out).id.clone(),
                            got: self.target.module.degree(out).clone(),
                            want,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn describe_key(&self, xs: &[usize], ys: &[usize]) -> String {
        format!(
            "({};{})",
            xs.iter()
                .map(|&g| self.source.module.gen(g).id.clone())
                .collect::<Vec<_>>()
                .join(","),
            ys.iter()
                .map(|&g| self.target.module.gen(g).id.clone())
                .collect::<Vec<_>>()
                .join(","),
        )
    }

    pub fn eval_co(
        &self,
        d: usize,
        k: usize,
        xs: &[usize],
        ys: &[usize],
    ) -> Result<SparseVec, CoError> {
        match self.co.get(&(d, k)) {
            None => Ok(SparseVec::new()),
            Some(op) => op.eval(&self.source.module, xs, ys),
        }
    }
}

/// Unshuffles including the empty first block (j = 0 → identity only).
fn unshuffles0(j: usize, d: usize) -> Result<Vec<Permutation>, PermError> {
    if j == 0 || d == 0 {
        return Ok(vec![Permutation::identity(d)]);
    }
    unshuffles(j, d)
}

/// Graded symmetry of every co_{d,k} in the closed inputs, exhaustively.
pub fn check_co_symmetry(c: &ClosedOpenData) -> Result<Option<(String, Permutation)>, CoError> {
    let src = &c.source.module;
    for op in c.co.values() {
        let keys: Vec<(Vec<usize>, Vec<usize>)> = op.table.keys().cloned().collect();
        for (xs, ys) in &keys {
            let p = src.parities(xs);
            let base = op.eval(src, xs, ys)?;
            for sigma in crate::perm::all_permutations(xs.len()) {
                let pxs: Vec<usize> = sigma.substitute(xs);
                let lhs = op.eval(src, &pxs, ys)?;
                let sign = substitution_sign(&sigma, &p)?;
                let rhs =
                    crate::ring::vec_scale(&src.ring, &base, &crate::ring::sign_to_rat(sign < 0))?;
                if lhs != rhs {
                    return Ok(Some((c.describe_key(xs, ys), sigma)));
                }
            }
        }
    }
    Ok(None)
}

/// Residual of the closed-open relation at (d, k) on one basis instance.
pub fn co_relation_residual(
    c: &ClosedOpenData,
    xs: &[usize],
    ys: &[usize],
) -> Result<SparseVec, CoError> {
    let d = xs.len();
    let k = ys.len();
    let src = &c.source.module;
    let ring = &c.target.module.ring;
    let px = src.parities(xs);
    let mut total = SparseVec::new();
    // term 1: source operations into the closed slots
    for j in 1..=d {
        for sigma in unshuffles(j, d)? {
            let eps = substitution_eps(&sigma, &px)?;
            let xsig: Vec<usize> = sigma.substitute(xs);
            let inner = match c.source.op(j) {
                None => continue,
                Some(op) => op.eval(src, &xsig[..j])?,
            };
            for (&g, coeff) in &inner {
                let mut key = Vec::with_capacity(d - j + 1);
                key.push(g);
                key.extend_from_slice(&xsig[j..]);
                let out = c.eval_co(d - j + 1, k, &key, ys)?;
                let scale = &crate::ring::sign_to_rat(eps == 1) * coeff;
                vec_add_scaled(ring, &mut total, &out, &scale)?;
            }
        }
    }
    // term 2: co-in-co insertions over the open chain
    for j in 0..=d {
        for sigma in unshuffles0(j, d)? {
            let eps = substitution_eps(&sigma, &px)?;
            let xsig: Vec<usize> = sigma.substitute(xs);
            let tail_par: u8 = xsig[j..]
                .iter()
                .map(|&g| src.parity(g))
                .fold(0, |a, b| a ^ (b & 1));
            let head_par: u8 = xsig[..j]
                .iter()
                .map(|&g| src.parity(g))
                .fold(0, |a, b| a ^ (b & 1));
            for k1 in 0..=k {
                let y_red: u8 = ys[..k1]
                    .iter()
                    .map(|&g| (c.target.module.parity(g) + 1) & 1)
                    .fold(0, |a, b| a ^ b);
                for k2 in k1..=k {
                    let dag = (eps + ((1 + tail_par) & 1) * y_red + head_par) % 2;
                    let inner = c.eval_co(d - j, k2 - k1, &xsig[j..], &ys[k1..k2])?;
                    if inner.is_empty() {
                        continue;
                    }
                    for (&g, coeff) in &inner {
                        let mut chain = Vec::with_capacity(k - (k2 - k1) + 1);
                        chain.extend_from_slice(&ys[..k1]);
                        chain.push(g);
                        chain.extend_from_slice(&ys[k2..]);
                        let out = c.eval_co(j, k - (k2 - k1) + 1, &xsig[..j], &chain)?;
                        let scale = &crate::ring::sign_to_rat(dag == 1) * coeff;
                        vec_add_scaled(ring, &mut total, &out, &scale)?;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Check the relations for all d ≤ d_cap, k ≤ k_cap on all basis instances.
pub fn check_co_relations(
    c: &ClosedOpenData,
    d_cap: usize,
    k_cap: usize,
) -> Result<Option<CoError>, CoError> {
    for d in 0..=d_cap {
        for xs in tuples_sorted(c.source.module.rank(), d) {
            for k in 0..=k_cap {
                for ys in c.target.chains(k)? {
                    let r = co_relation_residual(c, &xs, &ys)?;
                    if !r.is_empty() {
                        return Ok(Some(CoError::RelationViolation {
                            d,
                            k,
                            xs: xs
                                .iter()
                                .map(|&g| c.source.module.gen(g).id.clone())
                                .collect::<Vec<_>>()
                                .join(","),
                            ys: ys
                                .iter()
                                .map(|&g| c.target.module.gen(g).id.clone())
                                .collect::<Vec<_>>()
                                .join(","),
                            residual: r
                                .iter()
                                .map(|(&g, coeff)| {
                                    format!(
                                        "{}·{}",
                                        show_rational(coeff),
                                        c.target.module.gen(g).id
                                    )
                                })
                                .collect::<Vec<_>>()
                                .join(" + "),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// All weakly increasing tuples of the given length (residuals are
/// Koszul-equivariant in the closed inputs, so sorted instances suffice).
fn tuples_sorted(rank: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 {
        out.push(vec![]);
        return out;
    }
    if rank == 0 {
        return out;
    }
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        let mut k = len;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < rank {
                for i in k + 1..len {
                    cur[i] = cur[k];
                }
                break;
            }
            if k == 0 {
                return out;
            }
            cur[k] = 0;
        }
    }
}

/// Package CO^d into an L∞ morphism into the truncated Hochschild structure
/// and verify the conventional morphism identity there.
pub fn assemble_co(
    c: &ClosedOpenData,
    min_len: usize,
    max_len: usize,
) -> Result<(LInftyMorphism, CcBasis, Option<Counterexample>), CoError> {
    for (&(d, k), op) in &c.co {
        if d >= 1 && !op.is_empty() && (k < min_len || k > max_len) {
            return Err(CoError::WindowInsufficiency(min_len, max_len, k));
        }
    }
    let (cc, basis) = cc_as_linfty(&c.target, min_len, max_len)?;
    let mut morphism = LInftyMorphism::new(c.source.clone(), cc, c.d_cap.max(1));
    let mut by_d: BTreeMap<usize, BTreeMap<Vec<usize>, SparseVec>> = BTreeMap::new();
    for (&(d, k), op) in &c.co {
        if d == 0 {
            continue;
        }
        let _ = k;
        for ((xs, ys), v) in op.entries() {
            for (&out, coeff) in v {
                let idx = basis
                    .entries
                    .iter()
                    .position(|(chain, o)| chain == ys && *o == out)
                    .ok_or(CoError::WindowInsufficiency(min_len, max_len, ys.len()))?;
                let slot = by_d.entry(d).or_default().entry(xs.clone()).or_default();
                let cur = slot.remove(&idx).unwrap_or_else(BigRational::zero);
                let next = cur + coeff;
                if !next.is_zero() {
                    slot.insert(idx, next);
                }
            }
        }
    }
    for (d, table) in by_d {
        let shift = c.source.module.datum.int_degree(2 - 2 * d as i64);
        let mut f = MultilinearOp::new(d, shift, Symmetry::Graded);
        for (xs, v) in table {
            f.insert_entry(xs, v)?;
        }
        morphism.insert_map(f)?;
    }
    let verdict = check_linfty_morphism(&morphism, c.d_cap.max(1))?;
    Ok((morphism, basis, verdict))
}

// ---------------------------------------------------------------------------
// del-t equivariant extension of co data
// ---------------------------------------------------------------------------

/// Extend every co_{d,k} over t-decorated inputs by the equivariance law:
/// a t on closed slot j contributes (−1)^{1+Σ_{l<j}|x_l|}·t·(stripped value),
/// a t on open slot j contributes (−1)^{1+Σ|x_l|+Σ_{l<j}|y_l|′}·t·(stripped
/// value). Outputs without a t-partner (a truncated top level) map to zero.
/// The target's structure maps are extended the same way, so co_{0,k} = μ̃ᵏ
/// keeps holding on the extended data.
pub fn extend_co_data(c: &ClosedOpenData) -> Result<ClosedOpenData, CoError> {
    let src = &c.source.module;
    let tgt = &c.target.module;
    let mut target = c.target.clone();
    let mut mu = BTreeMap::new();
    for (&k, op) in &c.target.mu {
        mu.insert(
            k,
            crate::telescope::extend_delt_equivariant(tgt, op, 0, k)
                .map_err(|e| CoError::Duplicate(e.to_string()))?,
        );
    }
    target.mu = mu;
    let t_times = |v: &SparseVec| -> Result<SparseVec, CoError> {
        let mut out = SparseVec::new();
        for (&g, coeff) in v {
            if tgt.gen(g).t_power == 1 {
                return Err(CoError::Duplicate(format!(
                    "t² from output {}",
                    tgt.gen(g).id
                )));
            }
            if let Some(t) = tgt.t_partner(g) {
                out.insert(t, coeff.clone());
            }
        }
        Ok(out)
    };
    let mut co = BTreeMap::new();
    for (&(d, k), op) in &c.co {
        if d == 0 {
            continue; // re-injected from the extended μ̃
        }
        let mut ext = op.clone();
        for ((xs, ys), val) in op.entries() {
            // closed slots
            for j in 0..d {
                if let Some(t) = src.t_partner(xs[j]) {
                    let mut txs = xs.clone();
                    txs[j] = t;
                    let mut exp: u8 = 1;
                    for &g in &txs[..j] {
                        exp ^= src.parity(g) & 1;
                    }
                    let tv = t_times(val)?;
                    for (&g, coeff) in &tv {
                        let signed = if exp % 2 == 1 {
                            -coeff.clone()
                        } else {
                            coeff.clone()
                        };
                        add_co_term(&mut ext, src, &txs, ys, g, signed)?;
                    }
                }
            }
            // open slots
            for j in 0..k {
                if let Some(t) = tgt.t_partner(ys[j]) {
                    let mut tys = ys.clone();
                    tys[j] = t;
                    let mut exp: u8 = 1;
                    for &g in xs {
                        exp ^= src.parity(g) & 1;
                    }
                    for &g in &tys[..j] {
                        exp ^= (tgt.parity(g) + 1) & 1;
                    }
                    let tv = t_times(val)?;
                    for (&g, coeff) in &tv {
                        let signed = if exp % 2 == 1 {
                            -coeff.clone()
                        } else {
                            coeff.clone()
                        };
                        add_co_term(&mut ext, src, xs, &tys, g, signed)?;
                    }
                }
            }
        }
        co.insert((d, k), ext);
    }
    ClosedOpenData::new(c.source.clone(), target, co, c.d_cap, c.k_cap)
}

fn add_co_term(
    op: &mut CoOp,
    source: &crate::module::GradedModule,
    xs: &[usize],
    ys: &[usize],
    out: usize,
    coeff: BigRational,
) -> Result<(), CoError> {
    // canonicalize the closed part
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by_key(|&i| (xs[i], i));
    let cxs: Vec<usize> = order.iter().map(|&i| xs[i]).collect();
    let sigma = Permutation::from_images(order)?.inverse();
    let sign = substitution_sign(&sigma, &source.parities(&cxs))?;
    let signed = if sign < 0 { -coeff } else { coeff };
    let slot = op.table.entry((cxs, ys.to_vec())).or_default();
    let cur = slot.remove(&out).unwrap_or_else(BigRational::zero);
    let next = cur + signed;
    if !next.is_zero() {
        slot.insert(out, next);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

/// The derivation instance: 1-dimensional abelian source on an even generator
/// z, target the dual-numbers category, co_{1,1}(z; −) the derivation d/dx.
pub fn derivation_fixture() -> Result<ClosedOpenData, CoError> {
    use crate::grading::GradingDatum;
    use crate::linfty::Convention;
    use crate::module::{Generator, GradedModule};
    use crate::ring::{rat, Ring};
    let target = crate::ainfty::dual_numbers(Ring::Int)?;
    let mut sm = GradedModule::new(Ring::Int, GradingDatum::standard());
    sm.push(Generator::new("z", Degree(vec![0])))
        .map_err(AInftyError::from)?;
    let source = LInftyStructure::new(sm, 2, Convention::Ours);
    let mut co = BTreeMap::new();
    let mut d11 = CoOp::new(1, 1);
    // D(x) = e, D(e) = 0; generators: e = 0, x = 1 in the dual numbers module
    d11.insert_entry(vec![0], vec![1], SparseVec::from([(0, rat(1))]))?;
    co.insert((1, 1), d11);
    ClosedOpenData::new(source, target, co, 2, 3)
}

/// The same shape with a non-derivation entry; every checker must reject it.
/// The target is the dual numbers extended by a degree −1 generator w with
/// vanishing products, so the bad entry D(e) = w stays degree-homogeneous.
pub fn broken_derivation_fixture() -> Result<ClosedOpenData, CoError> {
    use crate::grading::GradingDatum;
    use crate::linfty::Convention;
    use crate::module::{Generator, GradedModule};
    use crate::ring::{rat, Ring};
    let mut tm = GradedModule::new(Ring::Int, GradingDatum::standard());
    for (id, deg) in [("e", 0i64), ("x", 1), ("w", -1)] {
        let mut g = Generator::new(id, Degree(vec![deg]));
        g.hom = Some((0, 0));
        tm.push(g).map_err(AInftyError::from)?;
    }
    let prod = |a: usize, b: usize| -> SparseVec {
        match (a, b) {
            (0, v) | (v, 0) if v != 2 => SparseVec::from([(v, rat(1))]),
            _ => SparseVec::new(),
        }
    };
    let mut target = AInftyCategory::new(vec!["L".into()], tm, 2);
    let mu2 = crate::ainfty::mu2_from_associative(&target.module, prod)?;
    target.insert_mu(mu2)?;
    let mut sm = GradedModule::new(Ring::Int, GradingDatum::standard());
    sm.push(Generator::new("z", Degree(vec![0])))
        .map_err(AInftyError::from)?;
    let source = LInftyStructure::new(sm, 2, Convention::Ours);
    let mut co = BTreeMap::new();
    let mut d11 = CoOp::new(1, 1);
    d11.insert_entry(vec![0], vec![1], SparseVec::from([(0, rat(1))]))?;
    // D(e) = w is not a derivation: D(e·e) = w but D(e)·e ± e·D(e) = 0
    d11.insert_entry(vec![0], vec![0], SparseVec::from([(2, rat(1))]))?;
    co.insert((1, 1), d11);
    ClosedOpenData::new(source, target, co, 2, 3)
}

/// Telescope-backed variant of the derivation instance: both sides carry
/// t-generators, the structure maps are given on t-free inputs only, and
/// [`extend_co_data`] fills in the rest.
pub fn telescope_derivation_fixture(broken: bool) -> Result<ClosedOpenData, CoError> {
    use crate::grading::GradingDatum;
    use crate::linfty::Convention;
    use crate::module::{Generator, GradedModule};
    use crate::ring::{rat, Ring};
    let mut tm = GradedModule::new(Ring::Int, GradingDatum::standard());
    let decls: &[(&str, i64, u8)] = &[
        ("e", 0, 0),
        ("x", 1, 0),
        ("w", -1, 0),
        ("t:e", -1, 1),
        ("t:x", 0, 1),
        ("t:w", -2, 1),
    ];
    for &(id, deg, t) in decls {
        let mut g = Generator::new(id, Degree(vec![deg]));
        g.hom = Some((0, 0));
        g.t_power = t;
        tm.push(g).map_err(AInftyError::from)?;
    }
    // t-free products: e unit on {e,x}, x² = 0, w annihilates everything
    let prod = |a: usize, b: usize| -> SparseVec {
        match (a, b) {
            (0, v) | (v, 0) if v < 2 => SparseVec::from([(v, rat(1))]),
            _ => SparseVec::new(),
        }
    };
    let mut target = AInftyCategory::new(vec!["L".into()], tm, 2);
    let mu2 = crate::ainfty::mu2_from_associative(&target.module, prod)?;
    target.insert_mu(mu2)?;
    let mut sm = GradedModule::new(Ring::Int, GradingDatum::standard());
    sm.push(Generator::new("z", Degree(vec![0])))
        .map_err(AInftyError::from)?;
    let mut tz = Generator::new("t:z", Degree(vec![-1]));
    tz.t_power = 1;
    sm.push(tz).map_err(AInftyError::from)?;
    let source = LInftyStructure::new(sm, 2, Convention::Ours);
    let mut co = BTreeMap::new();
    let mut d11 = CoOp::new(1, 1);
    d11.insert_entry(vec![0], vec![1], SparseVec::from([(0, rat(1))]))?;
    if broken {
        d11.insert_entry(vec![0], vec![0], SparseVec::from([(2, rat(1))]))?;
    }
    co.insert((1, 1), d11);
    ClosedOpenData::new(source, target, co, 2, 3)
}
