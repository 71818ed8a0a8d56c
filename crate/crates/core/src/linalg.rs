//! Sparse exact integer linear algebra: Smith normal form with transforms,
//! kernels, linear solving, subquotient invariants, and homology of bounded
//! complexes. Arbitrary-precision integers throughout.

use crate::grading::Degree;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), BigInt>,
}

#[derive(Debug, thiserror::Error)]
pub enum LinalgError {
    #[error("index ({0},{1}) out of range for {2}x{3} matrix")]
    OutOfRange(usize, usize, usize, usize),
    #[error("dimension mismatch: {0}")]
    Dims(String),
    #[error("not a chain complex: d∘d != 0 at degree {degree}, entry ({row},{col}) = {value}")]
    NotAComplex {
        degree: Degree,
        row: usize,
        col: usize,
        value: BigInt,
    },
    #[error("malformed matrix file: {0}")]
    BadFile(String),
}

impl SparseIntMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.entries.insert((i, i), BigInt::one());
        }
        m
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) -> Result<(), LinalgError> {
        if r >= self.rows || c >= self.cols {
            return Err(LinalgError::OutOfRange(r, c, self.rows, self.cols));
        }
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &BigInt)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn from_dense(d: &[Vec<BigInt>]) -> Self {
        let rows = d.len();
        let cols = d.first().map_or(0, Vec::len);
        let mut m = Self::new(rows, cols);
        for (r, row) in d.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.entries.insert((r, c), v.clone());
                }
            }
        }
        m
    }

    pub fn mul(&self, other: &SparseIntMatrix) -> Result<SparseIntMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dims(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = SparseIntMatrix::new(self.rows, other.cols);
        // group rhs by row for sparse traversal
        let mut by_row: BTreeMap<usize, Vec<(usize, &BigInt)>> = BTreeMap::new();
        for (&(r, c), v) in &other.entries {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (&(r, k), a) in &self.entries {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    let e = acc.entry((r, c)).or_insert_with(BigInt::zero);
                    *e += a * b;
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        out.entries = acc;
        Ok(out)
    }

    pub fn apply(&self, v: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::Dims(format!(
                "vector len {} vs cols {}",
                v.len(),
                self.cols
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for (&(r, c), a) in &self.entries {
            if !v[c].is_zero() {
                out[r] += a * &v[c];
            }
        }
        Ok(out)
    }

    /// Coordinate exchange format: header "rows cols nnz", then one
    /// "row col value" triple per line (0-based indices).
    pub fn write_coord<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (&(r, c), v) in &self.entries {
            writeln!(w, "{r} {c} {v}")?;
        }
        Ok(())
    }

    pub fn read_coord<R: BufRead>(r: &mut R) -> Result<Self, LinalgError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| LinalgError::BadFile("empty file".into()))?
            .map_err(|e| LinalgError::BadFile(e.to_string()))?;
        let parts: Vec<usize> = header
            .split_whitespace()
            .map(|t| {
                t.parse()
                    .map_err(|_| LinalgError::BadFile(format!("bad header {header}")))
            })
            .collect::<Result<_, _>>()?;
        if parts.len() != 3 {
            return Err(LinalgError::BadFile(format!("bad header {header}")));
        }
        let mut m = SparseIntMatrix::new(parts[0], parts[1]);
        let mut count = 0usize;
        for line in lines {
            let line = line.map_err(|e| LinalgError::BadFile(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(LinalgError::BadFile(format!("bad triple: {line}")));
            }
            let r: usize = toks[0]
                .parse()
                .map_err(|_| LinalgError::BadFile(format!("bad row {line}")))?;
            let c: usize = toks[1]
                .parse()
                .map_err(|_| LinalgError::BadFile(format!("bad col {line}")))?;
            let v: BigInt = toks[2]
                .parse()
                .map_err(|_| LinalgError::BadFile(format!("bad value {line}")))?;
            m.set(r, c, v)?;
            count += 1;
        }
        if count != parts[2] {
            return Err(LinalgError::BadFile(format!(
                "nnz {} != header {}",
                count, parts[2]
            )));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotStrategy {
    MinMagnitude,
    FirstNonzero,
}

#[derive(Debug, Clone)]
pub struct Snf {
    /// Positive invariant factors d1 | d2 | …
    pub factors: Vec<BigInt>,
    /// U·M·V = diag(factors), U and V unimodular.
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub rank: usize,
}

pub fn smith_normal_form(m: &SparseIntMatrix, strategy: PivotStrategy) -> Snf {
    let mut a = m.to_dense();
    let rows = m.rows;
    let cols = m.cols;
    let mut u = dense_identity(rows);
    let mut v = dense_identity(cols);
    let steps = rows.min(cols);
    let mut t = 0usize;
    'outer: while t < steps {
        // pick a pivot in the trailing submatrix
        let pivot = match strategy {
            PivotStrategy::MinMagnitude => {
                let mut best: Option<(usize, usize)> = None;
                for r in t..rows {
                    for c in t..cols {
                        if !a[r][c].is_zero() {
                            let better = match &best {
                                None => true,
                                Some((br, bc)) => a[r][c].abs() < a[*br][*bc].abs(),
                            };
                            if better {
                                best = Some((r, c));
                            }
                        }
                    }
                }
                best
            }
            PivotStrategy::FirstNonzero => {
                let mut found = None;
                'scan: for r in t..rows {
                    for c in t..cols {
                        if !a[r][c].is_zero() {
                            found = Some((r, c));
                            break 'scan;
                        }
                    }
                }
                found
            }
        };
        let (pr, pc) = match pivot {
            None => break 'outer,
            Some(p) => p,
        };
        swap_rows(&mut a, &mut u, t, pr);
        swap_cols(&mut a, &mut v, t, pc);
        loop {
            // clear column t with one-shot Bezout row combinations
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                if (&a[r][t] % &a[t][t]).is_zero() {
                    let q = &a[r][t] / &a[t][t];
                    row_axpy(&mut a, &mut u, r, t, &q);
                } else {
                    bezout_rows(&mut a, &mut u, t, r);
                }
            }
            // clear row t; Bezout column steps may re-dirty the column
            let mut dirty = false;
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                if (&a[t][c] % &a[t][t]).is_zero() {
                    let q = &a[t][c] / &a[t][t];
                    col_axpy(&mut a, &mut v, c, t, &q);
                } else {
                    bezout_cols(&mut a, &mut v, t, c);
                    dirty = true;
                }
            }
            if dirty || (t + 1..rows).any(|r| !a[r][t].is_zero()) {
                continue;
            }
            // pivot divides the rest of the submatrix?
            let mut offender = None;
            'find: for r in t + 1..rows {
                for c in t + 1..cols {
                    if !(&a[r][c] % &a[t][t]).is_zero() {
                        offender = Some(r);
                        break 'find;
                    }
                }
            }
            match offender {
                Some(r) => {
                    // fold the offending row into row t and keep reducing
                    let negone = -BigInt::one();
                    row_axpy(&mut a, &mut u, t, r, &negone);
                    continue;
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            negate_row(&mut a, &mut u, t);
        }
        t += 1;
    }
    let mut factors = Vec::new();
    for i in 0..steps {
        if !a[i][i].is_zero() {
            factors.push(a[i][i].clone());
        }
    }
    let rank = factors.len();
    Snf {
        factors,
        u,
        v,
        rank,
    }
}

fn dense_identity(n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

fn swap_rows(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        a.swap(i, j);
        u.swap(i, j);
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i != j {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
    }
}

/// Unimodular 2-row combination putting gcd(a[t][t], a[r][t]) at (t,t) and
/// zero at (r,t): rows (t,r) ← (x·t + y·r, −(b/g)·t + (p/g)·r).
fn bezout_rows(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], t: usize, r: usize) {
    let p = a[t][t].clone();
    let b = a[r][t].clone();
    let e = p.extended_gcd(&b);
    let (g, x, y) = (e.gcd, e.x, e.y);
    let pg = &p / &g;
    let bg = &b / &g;
    for c in 0..a[t].len() {
        let new_t = &x * &a[t][c] + &y * &a[r][c];
        let new_r = -&bg * &a[t][c] + &pg * &a[r][c];
        a[t][c] = new_t;
        a[r][c] = new_r;
    }
    for c in 0..u[t].len() {
        let new_t = &x * &u[t][c] + &y * &u[r][c];
        let new_r = -&bg * &u[t][c] + &pg * &u[r][c];
        u[t][c] = new_t;
        u[r][c] = new_r;
    }
}

/// Column version of [`bezout_rows`].
fn bezout_cols(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], t: usize, c: usize) {
    let p = a[t][t].clone();
    let b = a[t][c].clone();
    let e = p.extended_gcd(&b);
    let (g, x, y) = (e.gcd, e.x, e.y);
    let pg = &p / &g;
    let bg = &b / &g;
    for row in a.iter_mut() {
        let new_t = &x * &row[t] + &y * &row[c];
        let new_c = -&bg * &row[t] + &pg * &row[c];
        row[t] = new_t;
        row[c] = new_c;
    }
    for row in v.iter_mut() {
        let new_t = &x * &row[t] + &y * &row[c];
        let new_c = -&bg * &row[t] + &pg * &row[c];
        row[t] = new_t;
        row[c] = new_c;
    }
}

/// row_i -= q * row_j  (and mirror on U)
fn row_axpy(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    for c in 0..a[i].len() {
        let d = q * &a[j][c];
        a[i][c] -= d;
    }
    for c in 0..u[i].len() {
        let d = q * &u[j][c];
        u[i][c] -= d;
    }
}

/// col_i -= q * col_j (and mirror on V)
fn col_axpy(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], i: usize, j: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let d = q * &row[j];
        row[i] -= d;
    }
    for row in v.iter_mut() {
        let d = q * &row[j];
        row[i] -= d;
    }
}

fn negate_row(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], i: usize) {
    for x in a[i].iter_mut() {
        *x = -&*x;
    }
    for x in u[i].iter_mut() {
        *x = -&*x;
    }
}

pub fn rank(m: &SparseIntMatrix) -> usize {
    smith_normal_form(m, PivotStrategy::MinMagnitude).rank
}

/// Basis of ker(M) over ℤ (columns), via SNF: the last cols−rank columns of V.
pub fn kernel_basis(m: &SparseIntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m, PivotStrategy::MinMagnitude);
    (snf.rank..m.cols)
        .map(|j| (0..m.cols).map(|i| snf.v[i][j].clone()).collect())
        .collect()
}

/// Solve M x = b over ℤ exactly; None when unsolvable.
pub fn solve(m: &SparseIntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    if b.len() != m.rows {
        return None;
    }
    let snf = smith_normal_form(m, PivotStrategy::MinMagnitude);
    // U M V = D, so D (V^{-1} x) = U b
    let ub: Vec<BigInt> = (0..m.rows)
        .map(|i| (0..m.rows).map(|j| &snf.u[i][j] * &b[j]).sum::<BigInt>())
        .collect();
    let mut z = vec![BigInt::zero(); m.cols];
    for i in 0..m.rows.min(m.cols) {
        if i < snf.rank {
            let (q, r) = ub[i].div_rem(&snf.factors[i]);
            if !r.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !ub[i].is_zero() {
            return None;
        }
    }
    for item in ub.iter().take(m.rows).skip(m.rows.min(m.cols)) {
        if !item.is_zero() {
            return None;
        }
    }
    let x: Vec<BigInt> = (0..m.cols)
        .map(|i| (0..m.cols).map(|j| &snf.v[i][j] * &z[j]).sum::<BigInt>())
        .collect();
    Some(x)
}

/// Invariants of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GroupInvariants {
    pub free_rank: usize,
    /// Invariant factors > 1, divisibility chain.
    pub torsion: Vec<String>,
}

impl GroupInvariants {
    fn from_parts(free_rank: usize, torsion: Vec<BigInt>) -> Self {
        GroupInvariants {
            free_rank,
            torsion: torsion.iter().map(BigInt::to_string).collect(),
        }
    }

    pub fn trivial() -> Self {
        GroupInvariants {
            free_rank: 0,
            torsion: vec![],
        }
    }
}

/// Invariants of span(gens ∪ rels) / span(rels), all vectors in ℤ^n.
/// Requires nothing beyond the spans (no saturation assumptions).
pub fn quotient_invariants(
    gens: &[Vec<BigInt>],
    rels: &[Vec<BigInt>],
    ambient_dim: usize,
) -> GroupInvariants {
    // basis of S = span(gens ∪ rels)
    let total: Vec<&Vec<BigInt>> = gens.iter().chain(rels.iter()).collect();
    if total.is_empty() {
        return GroupInvariants::trivial();
    }
    let mut a = SparseIntMatrix::new(ambient_dim, total.len());
    for (j, col) in total.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            if !v.is_zero() {
                a.set(i, j, v.clone()).unwrap();
            }
        }
    }
    let snf = smith_normal_form(&a, PivotStrategy::MinMagnitude);
    // lattice basis: columns U^{-1} * (d_i e_i). U^{-1} obtained by solving.
    // Cheaper: basis vectors b_i with coordinates from inverting U by SNF's own
    // transform: U is unimodular, invert by Gauss-Bareiss on dense.
    let uinv = invert_unimodular(&snf.u);
    let rank_s = snf.rank;
    let mut basis = SparseIntMatrix::new(ambient_dim, rank_s);
    for j in 0..rank_s {
        for i in 0..ambient_dim {
            let val = &uinv[i][j] * &snf.factors[j];
            if !val.is_zero() {
                basis.set(i, j, val).unwrap();
            }
        }
    }
    // express each rel in the S-basis
    let mut x = SparseIntMatrix::new(rank_s, rels.len());
    for (j, r) in rels.iter().enumerate() {
        let sol = solve(&basis, r).expect("relation must lie in the span");
        for (i, v) in sol.iter().enumerate() {
            if !v.is_zero() {
                x.set(i, j, v.clone()).unwrap();
            }
        }
    }
    let xs = smith_normal_form(&x, PivotStrategy::MinMagnitude);
    let free_rank = rank_s - xs.rank;
    let torsion: Vec<BigInt> = xs.factors.into_iter().filter(|f| !f.is_one()).collect();
    GroupInvariants::from_parts(free_rank, torsion)
}

fn invert_unimodular(u: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    // Gauss-Jordan over Q retaining exact integers: since det = ±1 the result
    // stays integral; use rational elimination on a BigRational copy.
    use num_rational::BigRational;
    let n = u.len();
    let mut a: Vec<Vec<BigRational>> = u
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::from(BigInt::one())
                    } else {
                        BigRational::from(BigInt::zero())
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("unimodular");
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= p.clone();
            inv[col][j] /= p.clone();
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let d = &f * &a[col][j];
                    a[r][j] -= d;
                    let d2 = &f * &inv[col][j];
                    inv[r][j] -= d2;
                }
            }
        }
    }
    inv.into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| {
                    debug_assert!(x.is_integer());
                    x.to_integer()
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// bounded complexes
// ---------------------------------------------------------------------------

/// Per-degree free modules with differentials of degree +1 (one iota step).
/// Degrees are Y-elements; the successor of g is g + iota.
#[derive(Debug, Clone)]
pub struct BoundedComplex {
    pub rational: bool,
    pub iota: Vec<i64>,
    pub ranks: BTreeMap<Degree, usize>,
    /// differential out of each degree: ranks[g+iota] x ranks[g]
    pub diffs: BTreeMap<Degree, SparseIntMatrix>,
}

impl BoundedComplex {
    pub fn successor(&self, g: &Degree) -> Degree {
        Degree(g.0.iter().zip(&self.iota).map(|(a, b)| a + b).collect())
    }

    pub fn predecessor(&self, g: &Degree) -> Degree {
        Degree(g.0.iter().zip(&self.iota).map(|(a, b)| a - b).collect())
    }

    pub fn rank_at(&self, g: &Degree) -> usize {
        self.ranks.get(g).copied().unwrap_or(0)
    }

    pub fn diff_at(&self, g: &Degree) -> SparseIntMatrix {
        match self.diffs.get(g) {
            Some(m) => m.clone(),
            None => SparseIntMatrix::new(self.rank_at(&self.successor(g)), self.rank_at(g)),
        }
    }

    pub fn check_complex(&self) -> Result<(), LinalgError> {
        for (g, d) in &self.diffs {
            let succ = self.successor(g);
            let d2 = self.diff_at(&succ).mul(d)?;
            let offender = d2.entries().next().map(|(&(r, c), v)| (r, c, v.clone()));
            if let Some((row, col, value)) = offender {
                return Err(LinalgError::NotAComplex {
                    degree: g.clone(),
                    row,
                    col,
                    value,
                });
            }
        }
        Ok(())
    }
}

pub fn is_chain_complex(c: &BoundedComplex) -> bool {
    c.check_complex().is_ok()
}

/// Kernel/image homology via SNF; torsion empty over ℚ.
pub fn homology(c: &BoundedComplex) -> Result<BTreeMap<Degree, GroupInvariants>, LinalgError> {
    c.check_complex()?;
    let mut out = BTreeMap::new();
    for (g, &n) in &c.ranks {
        if n == 0 {
            continue;
        }
        let d_out = c.diff_at(g);
        let pred = c.predecessor(g);
        let d_in = c.diff_at(&pred); // maps into degree g
        let kernel = kernel_basis(&d_out);
        let image: Vec<Vec<BigInt>> = (0..d_in.cols)
            .map(|j| (0..n).map(|i| d_in.get(i, j)).collect())
            .filter(|col: &Vec<BigInt>| col.iter().any(|v| !v.is_zero()))
            .collect();
        let mut inv = quotient_invariants(&kernel, &image, n);
        if c.rational {
            inv.torsion.clear();
        }
        out.insert(g.clone(), inv);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, data: &[(usize, usize, i64)]) -> SparseIntMatrix {
        let mut m = SparseIntMatrix::new(rows, cols);
        for &(r, c, v) in data {
            m.set(r, c, BigInt::from(v)).unwrap();
        }
        m
    }

    fn check_snf(m: &SparseIntMatrix, strategy: PivotStrategy) -> Snf {
        let snf = smith_normal_form(m, strategy);
        // U M V = D
        let u = SparseIntMatrix::from_dense(&snf.u);
        let v = SparseIntMatrix::from_dense(&snf.v);
        let umv = u.mul(m).unwrap().mul(&v).unwrap();
        for (&(r, c), val) in umv.entries() {
            assert_eq!(r, c, "off-diagonal in D");
            assert_eq!(val, &snf.factors[r]);
        }
        assert_eq!(umv.nnz(), snf.factors.len());
        // divisibility chain
        for w in snf.factors.windows(2) {
            assert!((&w[1] % &w[0]).is_zero(), "chain {:?}", snf.factors);
        }
        // unimodularity
        assert!(det(&snf.u).abs().is_one());
        assert!(det(&snf.v).abs().is_one());
        snf
    }

    fn det(m: &[Vec<BigInt>]) -> BigInt {
        // fraction-free Bareiss
        let n = m.len();
        let mut a: Vec<Vec<BigInt>> = m.to_vec();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = num / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * a[n - 1][n - 1].clone()
    }

    #[test]
    fn snf_basic_examples() {
        let snf = check_snf(&mat(1, 1, &[(0, 0, 2)]), PivotStrategy::MinMagnitude);
        assert_eq!(snf.factors, vec![BigInt::from(2)]);
        let snf = check_snf(
            &mat(2, 2, &[(0, 0, 2), (1, 1, 3)]),
            PivotStrategy::MinMagnitude,
        );
        assert_eq!(snf.factors, vec![BigInt::from(1), BigInt::from(6)]);
        let snf = check_snf(&mat(3, 2, &[]), PivotStrategy::FirstNonzero);
        assert!(snf.factors.is_empty());
    }

    #[test]
    fn solve_and_kernel() {
        let m = mat(2, 3, &[(0, 0, 2), (0, 1, 4), (1, 2, 3)]);
        let ks = kernel_basis(&m);
        assert_eq!(ks.len(), 1);
        for k in &ks {
            assert!(m.apply(k).unwrap().iter().all(BigInt::is_zero));
        }
        let b = vec![BigInt::from(6), BigInt::from(3)];
        let x = solve(&m, &b).unwrap();
        assert_eq!(m.apply(&x).unwrap(), b);
        assert!(solve(&m, &[BigInt::from(1), BigInt::from(1)]).is_none());
    }

    #[test]
    fn quotient_invariants_examples() {
        // Z^2 / <(2,0)> = Z/2 + Z
        let gens = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(1)],
        ];
        let rels = vec![vec![BigInt::from(2), BigInt::from(0)]];
        let q = quotient_invariants(&gens, &rels, 2);
        assert_eq!(q.free_rank, 1);
        assert_eq!(q.torsion, vec!["2"]);
        // subgroup generated by (2,4) mod relations (0,8): Z (free on (1,2))? no:
        // span{(2,4),(0,8)} / span{(0,8)}: basis (2,4),(0,8); rel (0,8) -> Z
        let q2 = quotient_invariants(
            &[vec![BigInt::from(2), BigInt::from(4)]],
            &[vec![BigInt::from(0), BigInt::from(8)]],
            2,
        );
        assert_eq!(q2.free_rank, 1);
        assert!(q2.torsion.is_empty());
    }

    #[test]
    fn homology_of_times_two() {
        // 0 -> Z --2--> Z -> 0 in degrees 0,1
        let mut ranks = BTreeMap::new();
        ranks.insert(Degree(vec![0]), 1);
        ranks.insert(Degree(vec![1]), 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(Degree(vec![0]), mat(1, 1, &[(0, 0, 2)]));
        let c = BoundedComplex {
            rational: false,
            iota: vec![1],
            ranks,
            diffs,
        };
        let h = homology(&c).unwrap();
        let h0 = &h[&Degree(vec![0])];
        assert_eq!((h0.free_rank, h0.torsion.clone()), (0, vec![]));
        let h1 = &h[&Degree(vec![1])];
        assert_eq!(
            (h1.free_rank, h1.torsion.clone()),
            (0, vec!["2".to_string()])
        );
    }

    #[test]
    fn identity_differential_is_acyclic_and_bad_complex_detected() {
        let mut ranks = BTreeMap::new();
        ranks.insert(Degree(vec![0]), 1);
        ranks.insert(Degree(vec![1]), 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(Degree(vec![0]), mat(1, 1, &[(0, 0, 1)]));
        let c = BoundedComplex {
            rational: false,
            iota: vec![1],
            ranks: ranks.clone(),
            diffs,
        };
        let h = homology(&c).unwrap();
        assert!(h.values().all(|g| g.free_rank == 0 && g.torsion.is_empty()));

        // x1 then x1 is not a complex
        let mut ranks2 = ranks;
        ranks2.insert(Degree(vec![2]), 1);
        let mut diffs2 = BTreeMap::new();
        diffs2.insert(Degree(vec![0]), mat(1, 1, &[(0, 0, 1)]));
        diffs2.insert(Degree(vec![1]), mat(1, 1, &[(0, 0, 1)]));
        let c2 = BoundedComplex {
            rational: false,
            iota: vec![1],
            ranks: ranks2,
            diffs: diffs2,
        };
        assert!(matches!(
            c2.check_complex(),
            Err(LinalgError::NotAComplex { .. })
        ));
    }

    #[test]
    fn homology_unchanged_under_basis_permutation() {
        // permuting the degree-1 basis of 0 -> Z^2 -> Z^2 -> 0
        let d = mat(2, 2, &[(0, 0, 2), (1, 0, 4), (1, 1, 6)]);
        let permuted = mat(2, 2, &[(1, 0, 2), (0, 0, 4), (0, 1, 6)]);
        for m in [d, permuted] {
            let mut ranks = BTreeMap::new();
            ranks.insert(Degree(vec![0]), 2);
            ranks.insert(Degree(vec![1]), 2);
            let mut diffs = BTreeMap::new();
            diffs.insert(Degree(vec![0]), m);
            let c = BoundedComplex {
                rational: false,
                iota: vec![1],
                ranks,
                diffs,
            };
            let h = homology(&c).unwrap();
            assert_eq!(h[&Degree(vec![0])].free_rank, 0);
            assert_eq!(
                h[&Degree(vec![1])].torsion,
                vec!["2".to_string(), "6".to_string()]
            );
        }
    }

    #[test]
    fn coord_round_trip() {
        let m = mat(3, 4, &[(0, 1, -7), (2, 3, 5)]);
        let mut buf = Vec::new();
        m.write_coord(&mut buf).unwrap();
        let back = SparseIntMatrix::read_coord(&mut &buf[..]).unwrap();
        assert_eq!(m, back);
    }
}
