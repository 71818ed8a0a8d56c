//! Permutations, unshuffles and Koszul signs.
//!
//! Two sign conventions live side by side, and the distinction matters from
//! arity 3 on:
//!
//! * [`koszul_sign`] is the literal inversion-pair formula
//!   ε = Σ_{i<j, σ(i)>σ(j)} p_i p_j with slot-indexed weights. It satisfies
//!   the multiplicativity law
//!   `koszul_sign(σ∘τ, p) = koszul_sign(τ, p) · koszul_sign(σ, p∘τ⁻¹)`.
//! * [`substitution_sign`] is the sign of the Koszul isomorphism carrying
//!   x_1⊗…⊗x_d to x_{σ(1)}⊗…⊗x_{σ(d)}; it weights each inversion pair by the
//!   parities of the elements that actually cross, and equals
//!   `koszul_sign(σ⁻¹, p)`. Every relation checker in this crate attaches this
//!   sign to the written substitution u_i = x_{σ(i)}.

use std::fmt;

/// A permutation of {1..d}, stored 0-based: `images[i]` is σ(i+1)-1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PermError {
    #[error("images {0:?} are not a bijection of 0..{1}")]
    NotABijection(Vec<usize>, usize),
    #[error("length mismatch: permutation degree {0}, parity list {1}")]
    LengthMismatch(usize, usize),
    #[error("unshuffle block sizes out of range: j={0}, d={1}")]
    BadBlock(usize, usize),
    #[error("block sizes {0:?} are not strictly increasing positive integers")]
    BadMultiBlocks(Vec<usize>),
}

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation {
            images: (0..d).collect(),
        }
    }

    /// From 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &v in &images {
            if v >= d || seen[v] {
                return Err(PermError::NotABijection(images.clone(), d));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    /// From 1-based images as they appear in written one-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self, PermError> {
        if images.iter().any(|&v| v == 0) {
            return Err(PermError::NotABijection(images.to_vec(), images.len()));
        }
        Self::from_images(images.iter().map(|&v| v - 1).collect())
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    /// Permute a tuple by substitution: result[i] = tuple[σ(i)].
    pub fn substitute<T: Clone>(&self, tuple: &[T]) -> Vec<T> {
        self.images.iter().map(|&i| tuple[i].clone()).collect()
    }

    pub fn signature(&self) -> i8 {
        let mut inv = 0usize;
        let d = self.images.len();
        for i in 0..d {
            for j in i + 1..d {
                if self.images[i] > self.images[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Is σ a (j,d)-unshuffle: increasing on the first j slots and on the rest?
    pub fn is_unshuffle(&self, j: usize) -> bool {
        let d = self.images.len();
        if j > d {
            return false;
        }
        self.images[..j].windows(2).all(|w| w[0] < w[1])
            && self.images[j..].windows(2).all(|w| w[0] < w[1])
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, ")")
    }
}

/// ε = Σ_{i<j, σ(i)>σ(j)} p_i p_j mod 2 (slot-indexed, the literal abbreviation).
pub fn koszul_eps(sigma: &Permutation, parities: &[u8]) -> Result<u8, PermError> {
    let d = sigma.degree();
    if parities.len() != d {
        return Err(PermError::LengthMismatch(d, parities.len()));
    }
    let mut e = 0u8;
    for i in 0..d {
        for j in i + 1..d {
            if sigma.images[i] > sigma.images[j] {
                e ^= parities[i] & parities[j] & 1;
            }
        }
    }
    Ok(e)
}

/// (-1)^ε with ε the literal inversion-pair formula.
pub fn koszul_sign(sigma: &Permutation, parities: &[u8]) -> Result<i8, PermError> {
    Ok(if koszul_eps(sigma, parities)? == 1 {
        -1
    } else {
        1
    })
}

/// Exponent of the honest Koszul sign of x ↦ (x_{σ(1)},…,x_{σ(d)}):
/// Σ over inversion pairs of p_{σ(i)} p_{σ(j)}.
pub fn substitution_eps(sigma: &Permutation, parities: &[u8]) -> Result<u8, PermError> {
    let d = sigma.degree();
    if parities.len() != d {
        return Err(PermError::LengthMismatch(d, parities.len()));
    }
    let mut e = 0u8;
    for i in 0..d {
        for j in i + 1..d {
            if sigma.images[i] > sigma.images[j] {
                e ^= parities[sigma.images[i]] & parities[sigma.images[j]] & 1;
            }
        }
    }
    Ok(e)
}

pub fn substitution_sign(sigma: &Permutation, parities: &[u8]) -> Result<i8, PermError> {
    Ok(if substitution_eps(sigma, parities)? == 1 {
        -1
    } else {
        1
    })
}

/// All (j,d)-unshuffles: σ(1)<…<σ(j) and σ(j+1)<…<σ(d), in lexicographic
/// order of (σ(1),…,σ(j)). Count is C(d,j).
pub fn unshuffles(j: usize, d: usize) -> Result<Vec<Permutation>, PermError> {
    if j == 0 || j > d {
        return Err(PermError::BadBlock(j, d));
    }
    let mut out = Vec::new();
    let mut first: Vec<usize> = (0..j).collect();
    loop {
        let chosen: Vec<bool> = {
            let mut c = vec![false; d];
            for &v in &first {
                c[v] = true;
            }
            c
        };
        let mut images = first.clone();
        images.extend((0..d).filter(|&v| !chosen[v]));
        out.push(Permutation { images });
        // next j-combination of 0..d in lex order
        let mut i = j;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if first[i] != i + d - j {
                first[i] += 1;
                for k in i + 1..j {
                    first[k] = first[k - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Multi-unshuffles for strictly increasing block ends j_1 < … < j_k:
/// all σ ∈ 𝔖_{j_k} increasing on each block (j_{i−1}, j_i].
pub fn multi_unshuffles(ends: &[usize]) -> Result<Vec<Permutation>, PermError> {
    if ends.is_empty() || ends[0] == 0 || ends.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PermError::BadMultiBlocks(ends.to_vec()));
    }
    let n = *ends.last().unwrap();
    let mut sizes = Vec::with_capacity(ends.len());
    let mut prev = 0;
    for &e in ends {
        sizes.push(e - prev);
        prev = e;
    }
    let mut out = Vec::new();
    let mut acc: Vec<usize> = Vec::with_capacity(n);
    fn rec(sizes: &[usize], n: usize, acc: &mut Vec<usize>, out: &mut Vec<Permutation>) {
        match sizes.split_first() {
            None => out.push(Permutation {
                images: acc.clone(),
            }),
            Some((&b, rest)) => {
                let pool: Vec<usize> = (0..n).filter(|v| !acc.contains(v)).collect();
                combinations(&pool, b, &mut |comb| {
                    let len = acc.len();
                    acc.extend_from_slice(comb);
                    rec(rest, n, acc, out);
                    acc.truncate(len);
                });
            }
        }
    }
    rec(&sizes, n, &mut acc, &mut out);
    out.sort();
    Ok(out)
}

/// The Unsh^< subset: block leaders σ(1) < σ(j_1+1) < σ(j_2+1) < … increase.
pub fn multi_unshuffles_lt(ends: &[usize]) -> Result<Vec<Permutation>, PermError> {
    let all = multi_unshuffles(ends)?;
    Ok(all
        .into_iter()
        .filter(|s| {
            let mut leaders = vec![s.images[0]];
            for &e in &ends[..ends.len() - 1] {
                leaders.push(s.images[e]);
            }
            leaders.windows(2).all(|w| w[0] < w[1])
        })
        .collect())
}

fn combinations(pool: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > pool.len() {
        return;
    }
    if k == 0 {
        f(&[]);
        return;
    }
    loop {
        let comb: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
        f(&comb);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + pool.len() - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Enumerate all permutations of degree d (test helper and small exhaustive checks).
pub fn all_permutations(d: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    let mut images: Vec<usize> = (0..d).collect();
    heap_permute(&mut images, d, &mut out);
    out.sort();
    out
}

fn heap_permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Permutation>) {
    if k <= 1 {
        out.push(Permutation { images: v.clone() });
        return;
    }
    for i in 0..k {
        heap_permute(v, k - 1, out);
        if k % 2 == 0 {
            v.swap(i, k - 1);
        } else {
            v.swap(0, k - 1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(d: usize, j: usize) -> usize {
        (0..j).fold(1usize, |acc, i| acc * (d - i) / (i + 1))
    }

    #[test]
    fn unshuffle_counts_are_binomial() {
        for d in 1..=8 {
            for j in 1..=d {
                assert_eq!(unshuffles(j, d).unwrap().len(), binom(d, j), "j={j} d={d}");
            }
        }
    }

    #[test]
    fn unshuffle_order_is_lexicographic_on_first_block() {
        let us = unshuffles(2, 4).unwrap();
        let firsts: Vec<Vec<usize>> = us.iter().map(|s| s.images[..2].to_vec()).collect();
        let mut sorted = firsts.clone();
        sorted.sort();
        assert_eq!(firsts, sorted);
        assert_eq!(us.len(), 6);
    }

    #[test]
    fn trivial_unshuffles() {
        assert_eq!(unshuffles(1, 1).unwrap(), vec![Permutation::identity(1)]);
        assert_eq!(unshuffles(4, 4).unwrap(), vec![Permutation::identity(4)]);
    }

    #[test]
    fn multi_unshuffle_small_counts() {
        // single block: identity only
        assert_eq!(
            multi_unshuffles(&[2]).unwrap(),
            vec![Permutation::identity(2)]
        );
        // (1,2): C(2,1) = 2 total, Unsh^< keeps 1
        assert_eq!(multi_unshuffles(&[1, 2]).unwrap().len(), 2);
        assert_eq!(multi_unshuffles_lt(&[1, 2]).unwrap().len(), 1);
        // (2,4): Unsh^< = 2+2 set partitions ordered by minima = 3
        assert_eq!(multi_unshuffles_lt(&[2, 4]).unwrap().len(), 3);
        assert!(multi_unshuffles(&[3, 2]).is_err());
    }

    #[test]
    fn koszul_sign_examples() {
        // identity
        let id = Permutation::identity(3);
        assert_eq!(koszul_sign(&id, &[1, 1, 1]).unwrap(), 1);
        // swap of two odds
        let sw = Permutation::from_one_based(&[2, 1]).unwrap();
        assert_eq!(koszul_sign(&sw, &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&sw, &[1, 0]).unwrap(), 1);
        // d=3 cycle (2,3,1), all odd: two inversion pairs -> +1
        let c = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(koszul_sign(&c, &[1, 1, 1]).unwrap(), 1);
    }

    #[test]
    fn substitution_sign_is_literal_sign_of_inverse() {
        for sigma in all_permutations(4) {
            for bits in 0..16u8 {
                let p: Vec<u8> = (0..4).map(|i| (bits >> i) & 1).collect();
                assert_eq!(
                    substitution_sign(&sigma, &p).unwrap(),
                    koszul_sign(&sigma.inverse(), &p).unwrap()
                );
            }
        }
    }

    #[test]
    fn multiplicativity_of_the_literal_sign() {
        // koszul_sign(σ∘τ, p) = koszul_sign(τ, p) · koszul_sign(σ, p∘τ⁻¹)
        for d in 1..=4 {
            let perms = all_permutations(d);
            for s in &perms {
                for t in &perms {
                    for bits in 0..(1u16 << d) {
                        let p: Vec<u8> = (0..d).map(|i| ((bits >> i) & 1) as u8).collect();
                        let lhs = koszul_sign(&s.compose(t), &p).unwrap();
                        let tinv = t.inverse();
                        let p_tinv: Vec<u8> = (0..d).map(|i| p[tinv.apply(i)]).collect();
                        let rhs = koszul_sign(t, &p).unwrap() * koszul_sign(s, &p_tinv).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn every_permutation_factors_through_block_unshuffle() {
        // σ = unshuffle(first-block images sorted) ∘ (within-block permutation),
        // uniquely, for the (j,d) split.
        for d in 1..=6usize {
            for j in 1..=d {
                let perms = all_permutations(d);
                let us = unshuffles(j, d).unwrap();
                for sigma in &perms {
                    let mut count = 0;
                    for u in &us {
                        // look for within-block τ with σ = u ∘ τ; τ = u⁻¹ ∘ σ
                        let tau = u.inverse().compose(sigma);
                        let block_preserving = tau.images()[..j].iter().all(|&v| v < j)
                            && tau.images()[j..].iter().all(|&v| v >= j);
                        if block_preserving {
                            count += 1;
                        }
                    }
                    assert_eq!(count, 1, "σ={sigma} j={j} d={d}");
                }
            }
        }
    }
}
