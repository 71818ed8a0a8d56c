//! Finite A∞ categories, the Hochschild cochain complex with its Gerstenhaber
//! product, bracket and differential, truncated cochain modules, Hochschild
//! cohomology with certified windows, and the dgLa → L∞ repackaging.
//!
//! Hom chains are stored ascending: slot i of a length-k key lies in
//! hom(L_{i−1}, L_i). Sign formulas use the reduced degree |a|' = |a| − 1 on
//! all chain inputs.

use crate::grading::{Degree, GradingDatum};
use crate::linalg::{homology, BoundedComplex, GroupInvariants, LinalgError, SparseIntMatrix};
use crate::linfty::{from_dgla, LInftyStructure, LinftyError};
use crate::module::{Generator, GradedModule, ModuleError};
use crate::multilinear::{MultilinearOp, OpError, Symmetry};
use crate::ring::{show_rational, vec_add_scaled, Ring, RingError, SparseVec};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct AInftyCategory {
    pub objects: Vec<String>,
    pub module: GradedModule,
    /// μᵏ tables, ascending chain keys; μ⁰ = 0 by unrepresentability.
    pub mu: BTreeMap<usize, MultilinearOp>,
    pub arity_cap: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum AInftyError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error("generator {0} carries no hom data")]
    MissingHom(String),
    #[error("entry {0:?} is not a composable chain")]
    NotComposable(Vec<String>),
    #[error("entry {0:?} output {1} has wrong source/target")]
    BadOutputHom(Vec<String>, String),
    #[error("A-infinity relation fails on chain ({chain}) with residual {residual}")]
    RelationViolation { chain: String, residual: String },
    #[error(
        "window not certified: d(phi) for {cochain} leaks to length {leak} outside the cap {cap}"
    )]
    WindowNotCertified {
        cochain: String,
        leak: usize,
        cap: usize,
    },
    #[error("homology needs ring Z or Q, got {0}")]
    BadRing(Ring),
    #[error("cochain degrees must be homogeneous for products")]
    Inhomogeneous,
}

impl AInftyCategory {
    pub fn new(objects: Vec<String>, module: GradedModule, arity_cap: usize) -> Self {
        AInftyCategory {
            objects,
            module,
            mu: BTreeMap::new(),
            arity_cap,
        }
    }

    pub fn hom_of(&self, g: usize) -> Result<(usize, usize), AInftyError> {
        self.module
            .gen(g)
            .hom
            .ok_or_else(|| AInftyError::MissingHom(self.module.gen(g).id.clone()))
    }

    fn ids(&self, chain: &[usize]) -> Vec<String> {
        chain
            .iter()
            .map(|&g| self.module.gen(g).id.clone())
            .collect()
    }

    pub fn insert_mu(&mut self, op: MultilinearOp) -> Result<(), AInftyError> {
        op.check_homogeneous(&self.module)?;
        for (key, val) in op.entries() {
            if !self.is_composable(key)? {
                return Err(AInftyError::NotComposable(self.ids(key)));
            }
            let src = self.hom_of(key[0])?.0;
            let tgt = self.hom_of(*key.last().unwrap())?.1;
            for (&out, _) in val {
                if self.hom_of(out)? != (src, tgt) {
                    return Err(AInftyError::BadOutputHom(
                        self.ids(key),
                        self.module.gen(out).id.clone(),
                    ));
                }
            }
        }
        self.mu.insert(op.arity, op);
        Ok(())
    }

    pub fn is_composable(&self, chain: &[usize]) -> Result<bool, AInftyError> {
        for w in chain.windows(2) {
            if self.hom_of(w[0])?.1 != self.hom_of(w[1])?.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn eval_mu(&self, chain: &[usize]) -> Result<SparseVec, AInftyError> {
        match self.mu.get(&chain.len()) {
            None => Ok(SparseVec::new()),
            Some(op) => Ok(op.eval(&self.module, chain)?),
        }
    }

    pub fn max_mu_arity(&self) -> usize {
        self.mu.keys().copied().max().unwrap_or(0)
    }

    pub fn reduced_parity(&self, g: usize) -> u8 {
        (self.module.parity(g) + 1) % 2
    }

    /// Composable basis chains of the given length.
    pub fn chains(&self, len: usize) -> Result<Vec<Vec<usize>>, AInftyError> {
        let rank = self.module.rank();
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for c in &out {
                for g in 0..rank {
                    if let Some(&last) = c.last() {
                        if self.hom_of(last)?.1 != self.hom_of(g)?.0 {
                            continue;
                        }
                    }
                    let mut nc = c.clone();
                    nc.push(g);
                    next.push(nc);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Gerstenhaber-square residual of μ on one chain.
    pub fn mu_square_residual(&self, chain: &[usize]) -> Result<SparseVec, AInftyError> {
        let k = chain.len();
        let ring = self.module.ring.clone();
        let mut total = SparseVec::new();
        for j in 1..=self.max_mu_arity().min(k) {
            for i in 0..=k - j {
                let prefix_red: u8 = chain[..i]
                    .iter()
                    .map(|&g| self.reduced_parity(g))
                    .fold(0, |a, b| a ^ b);
                let inner = self.eval_mu(&chain[i..i + j])?;
                for (&g, c) in &inner {
                    let mut key = Vec::with_capacity(k - j + 1);
                    key.extend_from_slice(&chain[..i]);
                    key.push(g);
                    key.extend_from_slice(&chain[i + j..]);
                    let out = self.eval_mu(&key)?;
                    let scale = &crate::ring::sign_to_rat(prefix_red == 1) * c;
                    vec_add_scaled(&ring, &mut total, &out, &scale)?;
                }
            }
        }
        Ok(total)
    }
}

/// μ∘μ = 0 on every composable basis chain of length ≤ len_cap.
pub fn check_ainfty(a: &AInftyCategory, len_cap: usize) -> Result<(), AInftyError> {
    for op in a.mu.values() {
        op.check_homogeneous(&a.module)?;
    }
    for k in 1..=len_cap {
        for chain in a.chains(k)? {
            let r = a.mu_square_residual(&chain)?;
            if !r.is_empty() {
                return Err(AInftyError::RelationViolation {
                    chain: a.ids(&chain).join(","),
                    residual: render(a, &r),
                });
            }
        }
    }
    Ok(())
}

fn render(a: &AInftyCategory, v: &SparseVec) -> String {
    v.iter()
        .map(|(&g, c)| format!("{}·{}", show_rational(c), a.module.gen(g).id))
        .collect::<Vec<_>>()
        .join(" + ")
}

// ---------------------------------------------------------------------------
// Hochschild cochains
// ---------------------------------------------------------------------------

/// A homogeneous Hochschild cochain: length-k components as sparse maps from
/// ascending chains to hom vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    pub degree: Degree,
    comps: BTreeMap<usize, BTreeMap<Vec<usize>, SparseVec>>,
}

impl Cochain {
    pub fn zero(degree: Degree) -> Self {
        Cochain {
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn add_term(
        &mut self,
        ring: &Ring,
        chain: &[usize],
        out: usize,
        c: BigRational,
    ) -> Result<(), RingError> {
        if c.is_zero() {
            return Ok(());
        }
        let slot = self
            .comps
            .entry(chain.len())
            .or_default()
            .entry(chain.to_vec())
            .or_default();
        let cur = slot.remove(&out).unwrap_or_else(BigRational::zero);
        let next = ring.normalize(cur + c)?;
        if !next.is_zero() {
            slot.insert(out, next);
        }
        self.prune(chain.len());
        Ok(())
    }

    fn prune(&mut self, len: usize) {
        if let Some(m) = self.comps.get_mut(&len) {
            m.retain(|_, v| !v.is_empty());
            if m.is_empty() {
                self.comps.remove(&len);
            }
        }
    }

    pub fn eval(&self, chain: &[usize]) -> SparseVec {
        self.comps
            .get(&chain.len())
            .and_then(|m| m.get(chain))
            .cloned()
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.comps.keys().copied().collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        self.comps.values().flat_map(|m| m.iter())
    }

    pub fn accumulate(
        &mut self,
        ring: &Ring,
        other: &Cochain,
        scale: &BigRational,
    ) -> Result<(), RingError> {
        for (chain, v) in other.terms() {
            for (&g, c) in v {
                self.add_term(ring, chain, g, scale * c)?;
            }
        }
        Ok(())
    }
}

/// (φ∘ψ) up to component length max_len, with the reduced-degree insertion
/// sign; deg(φ∘ψ) = deg φ + deg ψ − 1.
pub fn gerstenhaber_product(
    a: &AInftyCategory,
    phi: &Cochain,
    psi: &Cochain,
    max_len: usize,
) -> Result<Cochain, AInftyError> {
    let ring = a.module.ring.clone();
    let iota = a.module.datum.int_degree(1);
    let mut out = Cochain::zero(phi.degree.add(&psi.degree).sub(&iota));
    let psi_red = (a
        .module
        .datum
        .parity_of(&psi.degree)
        .map_err(|_| AInftyError::Inhomogeneous)?
        + 1)
        % 2;
    for k in 0..=max_len {
        for chain in a.chains(k)? {
            let mut acc = SparseVec::new();
            for j in 0..=k {
                for i in 0..=k - j {
                    let inner = psi.eval(&chain[i..i + j]);
                    if inner.is_empty() {
                        continue;
                    }
                    let prefix: u8 = chain[..i]
                        .iter()
                        .map(|&g| a.reduced_parity(g))
                        .fold(0, |x, y| x ^ y);
                    let sign = crate::ring::sign_to_rat((psi_red & prefix) == 1);
                    for (&g, c) in &inner {
                        let mut key = Vec::with_capacity(k - j + 1);
                        key.extend_from_slice(&chain[..i]);
                        key.push(g);
                        key.extend_from_slice(&chain[i + j..]);
                        let outer = phi.eval(&key);
                        vec_add_scaled(&ring, &mut acc, &outer, &(&sign * c))?;
                    }
                }
            }
            for (g, c) in acc {
                out.add_term(&ring, &chain, g, c)?;
            }
        }
    }
    Ok(out)
}

/// [φ,ψ] = φ∘ψ − (−1)^{(deg φ −1)(deg ψ −1)} ψ∘φ.
pub fn gerstenhaber_bracket(
    a: &AInftyCategory,
    phi: &Cochain,
    psi: &Cochain,
    max_len: usize,
) -> Result<Cochain, AInftyError> {
    let pf = (a
        .module
        .datum
        .parity_of(&phi.degree)
        .map_err(|_| AInftyError::Inhomogeneous)?
        + 1)
        % 2;
    let ps = (a
        .module
        .datum
        .parity_of(&psi.degree)
        .map_err(|_| AInftyError::Inhomogeneous)?
        + 1)
        % 2;
    let mut out = gerstenhaber_product(a, phi, psi, max_len)?;
    let swapped = gerstenhaber_product(a, psi, phi, max_len)?;
    let sign = -crate::ring::sign_to_rat((pf & ps) == 1);
    out.accumulate(&a.module.ring, &swapped, &sign)?;
    Ok(out)
}

/// The structure cochain μ ∈ CC², components = the μᵏ tables.
pub fn mu_cochain(a: &AInftyCategory) -> Result<Cochain, AInftyError> {
    let mut c = Cochain::zero(a.module.datum.int_degree(2));
    for op in a.mu.values() {
        for (key, val) in op.entries() {
            for (&g, coeff) in val {
                c.add_term(&a.module.ring, key, g, coeff.clone())?;
            }
        }
    }
    Ok(c)
}

/// ∂φ = [μ, φ], truncated at max_len.
pub fn hochschild_differential(
    a: &AInftyCategory,
    phi: &Cochain,
    max_len: usize,
) -> Result<Cochain, AInftyError> {
    let mu = mu_cochain(a)?;
    gerstenhaber_bracket(a, &mu, phi, max_len)
}

// ---------------------------------------------------------------------------
// truncated cochain modules
// ---------------------------------------------------------------------------

/// Basis of the length-truncated Hochschild module: elementary cochains
/// (chain, out), composable and hom-compatible.
#[derive(Debug, Clone)]
pub struct CcBasis {
    pub min_len: usize,
    pub max_len: usize,
    pub entries: Vec<(Vec<usize>, usize)>,
    index: BTreeMap<(Vec<usize>, usize), usize>,
}

impl CcBasis {
    pub fn build(a: &AInftyCategory, min_len: usize, max_len: usize) -> Result<Self, AInftyError> {
        let mut entries = Vec::new();
        for k in min_len..=max_len {
            for chain in a.chains(k)? {
                let (src, tgt) = if chain.is_empty() {
                    // length-0 components: one per object pair (L, L)
                    (usize::MAX, usize::MAX)
                } else {
                    (a.hom_of(chain[0])?.0, a.hom_of(*chain.last().unwrap())?.1)
                };
                for g in 0..a.module.rank() {
                    let (s, t) = a.hom_of(g)?;
                    let ok = if chain.is_empty() {
                        s == t
                    } else {
                        (s, t) == (src, tgt)
                    };
                    if ok {
                        entries.push((chain.clone(), g));
                    }
                }
            }
        }
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Ok(CcBasis {
            min_len,
            max_len,
            entries,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// CC-degree of a basis cochain: deg(out) − Σ deg(inᵢ) + k·iota.
    pub fn degree(&self, a: &AInftyCategory, i: usize) -> Degree {
        let (chain, out) = &self.entries[i];
        let mut d = a.module.degree(*out).clone();
        for &g in chain {
            d = d.sub(a.module.degree(g));
        }
        d.add(&a.module.datum.int_degree(chain.len() as i64))
    }

    pub fn elementary(&self, a: &AInftyCategory, i: usize) -> Cochain {
        let (chain, out) = &self.entries[i];
        let mut c = Cochain::zero(self.degree(a, i));
        c.add_term(
            &a.module.ring,
            chain,
            *out,
            BigRational::from(BigInt::from(1)),
        )
        .unwrap();
        c
    }

    /// Express a cochain in this basis; components outside the length window
    /// are reported as an error when `strict`, silently dropped otherwise.
    pub fn to_vec(&self, c: &Cochain, strict: bool) -> Result<SparseVec, AInftyError> {
        let mut out = SparseVec::new();
        for (chain, v) in c.terms() {
            for (&g, coeff) in v {
                match self.index.get(&(chain.clone(), g)) {
                    Some(&i) => {
                        out.insert(i, coeff.clone());
                    }
                    None if strict => {
                        return Err(AInftyError::WindowNotCertified {
                            cochain: format!("[{:?}->{}]", chain, g),
                            leak: chain.len(),
                            cap: self.max_len,
                        })
                    }
                    None => {}
                }
            }
        }
        Ok(out)
    }

    pub fn id_of(&self, a: &AInftyCategory, i: usize) -> String {
        let (chain, out) = &self.entries[i];
        let ins = chain
            .iter()
            .map(|&g| a.module.gen(g).id.clone())
            .collect::<Vec<_>>()
            .join(",");
        format!("c[{}=>{}]", ins, a.module.gen(*out).id)
    }

    /// Synthetic graded module on this basis.
    pub fn module(&self, a: &AInftyCategory) -> Result<GradedModule, AInftyError> {
        let mut m = GradedModule::new(a.module.ring.clone(), a.module.datum.clone());
        for i in 0..self.entries.len() {
            m.push(Generator::new(self.id_of(a, i), self.degree(a, i)))?;
        }
        Ok(m)
    }
}

// ---------------------------------------------------------------------------
// Hochschild cohomology with certified windows
// ---------------------------------------------------------------------------

/// Homology of the truncated CC* complex per integer degree (along iota).
/// The window is accepted only when every differential of a basis cochain in
/// degrees [lo−1, hi] stays inside the length cap.
pub fn hochschild_cohomology(
    a: &AInftyCategory,
    window: std::ops::RangeInclusive<i64>,
    length_cap: usize,
) -> Result<BTreeMap<i64, GroupInvariants>, AInftyError> {
    let rational = match a.module.ring {
        Ring::Int => false,
        Ring::Rat => true,
        ref r => return Err(AInftyError::BadRing(r.clone())),
    };
    check_ainfty(a, (2 * a.max_mu_arity()).saturating_sub(1).max(1))?;
    let basis = CcBasis::build(a, 0, length_cap)?;
    let datum = &a.module.datum;
    let (lo, hi) = (*window.start(), *window.end());
    // group basis entries by integer degree
    let mut by_degree: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for i in 0..basis.len() {
        if let Some(m) = datum.iota_multiple(&basis.degree(a, i)) {
            by_degree.entry(m).or_default().push(i);
        }
    }
    // certification + matrices
    let mut ranks = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for m in lo - 1..=hi + 1 {
        ranks.insert(Degree(vec![m]), by_degree.get(&m).map_or(0, Vec::len));
    }
    let mut denom = BigInt::from(1);
    let mut cols: BTreeMap<i64, Vec<SparseVec>> = BTreeMap::new();
    for m in lo - 1..=hi {
        let idxs = by_degree.get(&m).cloned().unwrap_or_default();
        let mut colvecs = Vec::new();
        for &i in &idxs {
            let phi = basis.elementary(a, i);
            // compute with headroom, then certify no leak beyond the cap
            let d = hochschild_differential(a, &phi, length_cap + a.max_mu_arity())?;
            for len in d.lengths() {
                if len > length_cap {
                    return Err(AInftyError::WindowNotCertified {
                        cochain: basis.id_of(a, i),
                        leak: len,
                        cap: length_cap,
                    });
                }
            }
            let v = basis.to_vec(&d, true)?;
            for c in v.values() {
                denom = num_integer::lcm(denom.clone(), c.denom().clone());
            }
            colvecs.push(v);
        }
        cols.insert(m, colvecs);
    }
    for m in lo - 1..=hi {
        let idxs = by_degree.get(&m).cloned().unwrap_or_default();
        let next = by_degree.get(&(m + 1)).cloned().unwrap_or_default();
        let pos: BTreeMap<usize, usize> = next.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let mut mat = SparseIntMatrix::new(next.len(), idxs.len());
        for (j, v) in cols[&m].iter().enumerate() {
            for (&bi, c) in v {
                // entries landing at non-integer degrees cannot occur: the
                // differential shifts by exactly one iota
                let r = *pos.get(&bi).expect("differential lands in the next degree");
                let scaled = c * BigRational::from(denom.clone());
                debug_assert!(scaled.denom() == &BigInt::from(1));
                mat.set(r, j, scaled.numer().clone())?;
            }
        }
        diffs.insert(Degree(vec![m]), mat);
    }
    let complex = BoundedComplex {
        rational,
        iota: vec![1],
        ranks,
        diffs,
    };
    let h = homology(&complex)?;
    let mut out = BTreeMap::new();
    for m in lo..=hi {
        out.insert(
            m,
            h.get(&Degree(vec![m]))
                .cloned()
                .unwrap_or_else(GroupInvariants::trivial),
        );
    }
    Ok(out)
}

/// The negated two-term L∞ structure on the truncated cochain module, built
/// through the dgLa adapter (which re-checks every axiom on the truncation).
/// `min_len` ≥ 1 keeps the truncation exactly closed under the bracket.
pub fn cc_as_linfty(
    a: &AInftyCategory,
    min_len: usize,
    max_len: usize,
) -> Result<(LInftyStructure, CcBasis), AInftyError> {
    check_ainfty(a, (2 * a.max_mu_arity()).saturating_sub(1).max(1))?;
    let basis = CcBasis::build(a, min_len, max_len)?;
    let module = basis.module(a)?;
    let iota = a.module.datum.int_degree(1);
    let mut diff = MultilinearOp::new(1, iota.clone(), Symmetry::None);
    for i in 0..basis.len() {
        let phi = basis.elementary(a, i);
        let d = hochschild_differential(a, &phi, max_len)?;
        let v = basis.to_vec(&d, false)?;
        if !v.is_empty() {
            diff.insert_entry(vec![i], v)?;
        }
    }
    let mut bracket = MultilinearOp::new(
        2,
        Degree(iota.0.iter().map(|x| -x).collect()),
        Symmetry::None,
    );
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let bi = basis.elementary(a, i);
            let bj = basis.elementary(a, j);
            let br = gerstenhaber_bracket(a, &bi, &bj, max_len)?;
            let v = basis.to_vec(&br, false)?;
            if !v.is_empty() {
                bracket.insert_entry(vec![i, j], v)?;
            }
        }
    }
    let l = from_dgla(&module, &diff, &bracket, true)?;
    Ok((l, basis))
}

// ---------------------------------------------------------------------------
// fixtures
// ---------------------------------------------------------------------------

/// Encode an associative graded algebra as an A∞ category with
/// μ²(a₁,a₂) = (−1)^{|a₁|}·(a₂·a₁) on ascending keys (the standard
/// dictionary making μ∘μ = 0 hold in the reduced-sign convention).
pub fn mu2_from_associative(
    module: &GradedModule,
    product: impl Fn(usize, usize) -> SparseVec,
) -> Result<MultilinearOp, AInftyError> {
    let mut op = MultilinearOp::new(2, module.datum.int_degree(0), Symmetry::None);
    for a1 in 0..module.rank() {
        for a2 in 0..module.rank() {
            let v = product(a2, a1);
            if v.is_empty() {
                continue;
            }
            let sgn = crate::ring::sign_to_rat(module.parity(a1) == 1);
            let sv: SparseVec = v.iter().map(|(&g, c)| (g, &sgn * c)).collect();
            op.insert_entry(vec![a1, a2], sv)?;
        }
    }
    Ok(op)
}

/// The two-object path category of the A2 quiver: objects L0, L1; identity
/// morphisms e0, e1 and one arrow f: L0 → L1, all in degree 0, composition
/// as μ².
pub fn path_category_a2(ring: Ring) -> Result<AInftyCategory, AInftyError> {
    let mut m = GradedModule::new(ring, GradingDatum::standard());
    let mut e0 = Generator::new("e0", Degree(vec![0]));
    e0.hom = Some((0, 0));
    let mut e1 = Generator::new("e1", Degree(vec![0]));
    e1.hom = Some((1, 1));
    let mut f = Generator::new("f", Degree(vec![0]));
    f.hom = Some((0, 1));
    m.push(e0)?;
    m.push(e1)?;
    m.push(f)?;
    let prod = |a: usize, b: usize| -> SparseVec {
        // composition a∘b when target(b) = source(a); identities act as units
        let table = [
            ((0usize, 0usize), 0usize), // e0 e0 = e0
            ((1, 1), 1),                // e1 e1 = e1
            ((2, 0), 2),                // f e0 = f
            ((1, 2), 2),                // e1 f = f
        ];
        table
            .iter()
            .find(|((x, y), _)| *x == a && *y == b)
            .map(|(_, z)| SparseVec::from([(*z, BigRational::from(BigInt::from(1)))]))
            .unwrap_or_default()
    };
    let mut cat = AInftyCategory::new(vec!["L0".into(), "L1".into()], m, 2);
    let mu2 = mu2_from_associative(&cat.module, prod)?;
    cat.insert_mu(mu2)?;
    Ok(cat)
}

/// Dual numbers on one object: hom = ⟨e (deg 0), x (deg 1)⟩, e the unit,
/// x² = 0.
pub fn dual_numbers(ring: Ring) -> Result<AInftyCategory, AInftyError> {
    let mut m = GradedModule::new(ring, GradingDatum::standard());
    let mut e = Generator::new("e", Degree(vec![0]));
    e.hom = Some((0, 0));
    let mut x = Generator::new("x", Degree(vec![1]));
    x.hom = Some((0, 0));
    m.push(e)?;
    m.push(x)?;
    let prod = |a: usize, b: usize| -> SparseVec {
        let one = BigRational::from(BigInt::from(1));
        match (a, b) {
            (0, v) | (v, 0) => SparseVec::from([(v, one)]),
            _ => SparseVec::new(),
        }
    };
    let mut cat = AInftyCategory::new(vec!["L".into()], m, 2);
    let mu2 = mu2_from_associative(&cat.module, prod)?;
    cat.insert_mu(mu2)?;
    Ok(cat)
}
