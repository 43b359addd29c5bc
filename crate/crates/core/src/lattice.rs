//! Integer lattices: Smith normal form, saturation, quotients and indices.
//!
//! Matrices are row-major `Vec<Vec<BigInt>>`. A [`LatticeMap`] stores the images
//! of the source basis as columns.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Narrows a big vector to machine integers. Panics on overflow; cone data is
/// desk-sized and an overflow here means a caller fed absurd input.
pub fn small_vec(v: &[BigInt]) -> Vec<i64> {
    v.iter()
        .map(|x| x.to_i64().expect("lattice coordinate exceeds i64"))
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn transpose(m: &IntMatrix, rows: usize, cols: usize) -> IntMatrix {
    (0..cols)
        .map(|j| (0..rows).map(|i| m[i][j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize, cols: usize) -> IntMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    let s: i128 = a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum();
    i64::try_from(s).expect("pairing exceeds i64")
}

/// Divides out the content of a nonzero vector.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|&x| x / g).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeMap {
    pub source_rank: usize,
    pub target_rank: usize,
    /// target_rank rows, source_rank columns.
    pub matrix: Vec<Vec<i64>>,
}

impl LatticeMap {
    pub fn new(source_rank: usize, target_rank: usize, matrix: Vec<Vec<i64>>) -> Self {
        assert_eq!(
            matrix.len(),
            target_rank,
            "row count must equal target rank"
        );
        assert!(
            matrix.iter().all(|r| r.len() == source_rank),
            "column count must equal source rank"
        );
        LatticeMap {
            source_rank,
            target_rank,
            matrix,
        }
    }

    pub fn identity(n: usize) -> Self {
        let matrix = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        LatticeMap {
            source_rank: n,
            target_rank: n,
            matrix,
        }
    }

    /// Map whose columns are the given images.
    pub fn from_columns(target_rank: usize, cols: &[Vec<i64>]) -> Self {
        let matrix = (0..target_rank)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        LatticeMap {
            source_rank: cols.len(),
            target_rank,
            matrix,
        }
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.source_rank);
        self.matrix.iter().map(|row| dot(row, v)).collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LatticeMap) -> LatticeMap {
        assert_eq!(inner.target_rank, self.source_rank);
        let matrix = self
            .matrix
            .iter()
            .map(|row| {
                (0..inner.source_rank)
                    .map(|j| {
                        let col: Vec<i64> = inner.matrix.iter().map(|r| r[j]).collect();
                        dot(row, &col)
                    })
                    .collect()
            })
            .collect();
        LatticeMap {
            source_rank: inner.source_rank,
            target_rank: self.target_rank,
            matrix,
        }
    }

    pub fn transpose(&self) -> LatticeMap {
        let matrix = (0..self.source_rank)
            .map(|j| self.matrix.iter().map(|r| r[j]).collect())
            .collect();
        LatticeMap {
            source_rank: self.target_rank,
            target_rank: self.source_rank,
            matrix,
        }
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.matrix.iter().map(|r| r[j]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub left: IntMatrix,
    pub diag: Vec<BigInt>,
    pub right: IntMatrix,
    pub left_inv: IntMatrix,
    pub right_inv: IntMatrix,
    pub rows: usize,
    pub cols: usize,
}

impl SmithDecomposition {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

struct SmithState {
    a: IntMatrix,
    l: IntMatrix,
    linv: IntMatrix,
    r: IntMatrix,
    rinv: IntMatrix,
    rows: usize,
    cols: usize,
}

impl SmithState {
    // row_i += k * row_j
    fn row_add(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = &self.a[j][c] * k;
            self.a[i][c] += t;
        }
        for c in 0..self.rows {
            let t = &self.l[j][c] * k;
            self.l[i][c] += t;
        }
        for rr in 0..self.rows {
            let t = &self.linv[rr][i] * k;
            self.linv[rr][j] -= t;
        }
    }

    // col_i += k * col_j
    fn col_add(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for rr in 0..self.rows {
            let t = &self.a[rr][j] * k;
            self.a[rr][i] += t;
        }
        for rr in 0..self.cols {
            let t = &self.r[rr][j] * k;
            self.r[rr][i] += t;
        }
        for c in 0..self.cols {
            let t = &self.rinv[i][c] * k;
            self.rinv[j][c] -= t;
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            self.l.swap(i, j);
            for row in self.linv.iter_mut() {
                row.swap(i, j);
            }
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        if i != j {
            for row in self.a.iter_mut() {
                row.swap(i, j);
            }
            for row in self.r.iter_mut() {
                row.swap(i, j);
            }
            self.rinv.swap(i, j);
        }
    }

    fn row_negate(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.l[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.linv.iter_mut() {
            row[i] = -&row[i];
        }
    }
}

/// Smith normal form `left · m · right = diag`, with inverses of both
/// unimodular factors carried along.
pub fn smith_normal_form(m: &IntMatrix, rows: usize, cols: usize) -> SmithDecomposition {
    let mut s = SmithState {
        a: m.clone(),
        l: identity(rows),
        linv: identity(rows),
        r: identity(cols),
        rinv: identity(cols),
        rows,
        cols,
    };
    let k = rows.min(cols);
    for t in 0..k {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s.a[i][j].is_zero()
                        && best.map_or(true, |(bi, bj)| s.a[i][j].abs() < s.a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            s.row_swap(t, pi);
            s.col_swap(t, pj);
            let mut clean = true;
            for i in t + 1..rows {
                if !s.a[i][t].is_zero() {
                    let q = s.a[i][t].div_floor(&s.a[t][t]);
                    s.row_add(i, t, &-q);
                    if !s.a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..cols {
                if !s.a[t][j].is_zero() {
                    let q = s.a[t][j].div_floor(&s.a[t][t]);
                    s.col_add(j, t, &-q);
                    if !s.a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            let mut bad_row = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !s.a[i][j].is_multiple_of(&s.a[t][t]) {
                        bad_row = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad_row {
                Some(i) => s.row_add(t, i, &BigInt::one()),
                None => break,
            }
        }
        if s.a[t][t].is_negative() {
            s.row_negate(t);
        }
    }
    let diag = (0..k).map(|i| s.a[i][i].clone()).collect();
    SmithDecomposition {
        left: s.l,
        diag,
        right: s.r,
        left_inv: s.linv,
        right_inv: s.rinv,
        rows,
        cols,
    }
}

/// Matrix with the given vectors as columns.
fn columns_matrix(n: usize, vecs: &[Vec<i64>]) -> IntMatrix {
    (0..n)
        .map(|i| vecs.iter().map(|v| BigInt::from(v[i])).collect())
        .collect()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`: echelon,
/// positive pivots, entries above each pivot reduced into `[0, pivot)`.
/// Zero rows are dropped.
pub fn hermite_rows(rows: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let mut a: IntMatrix = to_big(rows);
    let mut out: IntMatrix = Vec::new();
    let mut col = 0;
    while col < n && !a.is_empty() {
        // gcd-reduce column `col` among remaining rows
        loop {
            let nz: Vec<usize> = (0..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = a[i][col].div_floor(&a[p][col]);
                    for c in 0..n {
                        let t = &a[p][c] * &q;
                        a[i][c] -= t;
                    }
                }
            }
        }
        if let Some(p) = (0..a.len()).find(|&i| !a[i][col].is_zero()) {
            let mut row = a.remove(p);
            if row[col].is_negative() {
                row.iter_mut().for_each(|x| *x = -&*x);
            }
            out.push(row);
        }
        a.retain(|r| r.iter().any(|x| !x.is_zero()));
        col += 1;
    }
    // reduce above pivots
    for i in 0..out.len() {
        let pc = out[i].iter().position(|x| !x.is_zero()).unwrap();
        for k in 0..i {
            let q = out[k][pc].div_floor(&out[i][pc]);
            if !q.is_zero() {
                for c in 0..n {
                    let t = &out[i][c] * &q;
                    out[k][c] -= t;
                }
            }
        }
    }
    out.iter().map(|r| small_vec(r)).collect()
}

/// Basis (in Hermite form) of `span_Q(gens) ∩ Z^n`.
pub fn saturate_sublattice(gens: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    if gens.is_empty() || gens.iter().all(|g| g.iter().all(|&x| x == 0)) {
        return Vec::new();
    }
    let m = columns_matrix(n, gens);
    let s = smith_normal_form(&m, n, gens.len());
    let rank = s.rank();
    let basis: Vec<Vec<i64>> = (0..rank)
        .map(|j| small_vec(&(0..n).map(|i| s.left_inv[i][j].clone()).collect::<Vec<_>>()))
        .collect();
    hermite_rows(&basis, n)
}

/// Basis (in Hermite form) of `{x ∈ Z^n : ⟨x, v⟩ = 0 for all v ∈ vecs}`.
pub fn orthogonal_lattice(vecs: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    if vecs.is_empty() {
        return hermite_rows(&identity_i64(n), n);
    }
    let m = to_big(vecs);
    let s = smith_normal_form(&m, vecs.len(), n);
    let rank = s.rank();
    let basis: Vec<Vec<i64>> = (rank..n)
        .map(|j| small_vec(&(0..n).map(|i| s.right[i][j].clone()).collect::<Vec<_>>()))
        .collect();
    hermite_rows(&basis, n)
}

pub fn identity_i64(n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect()
}

/// Rank of the span of integer vectors.
pub fn rank_of(vecs: &[Vec<i64>], n: usize) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    smith_normal_form(&to_big(vecs), vecs.len(), n).rank()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientData {
    /// Surjection `Z^n → Z^{n - rank}` onto the free part.
    pub free_projection: LatticeMap,
    /// Invariant factors `≥ 2` of the torsion part.
    pub torsion_invariants: Vec<u64>,
    /// Rows giving the torsion coordinates, read modulo the matching invariant.
    pub torsion_projection: Vec<Vec<i64>>,
    /// A splitting `Z^{n - rank} → Z^n` of the free projection.
    pub section: LatticeMap,
}

pub fn quotient_lattice(n: usize, sub_basis: &[Vec<i64>]) -> QuotientData {
    let (rank, l, linv, diag) = if sub_basis.is_empty() {
        (0, identity(n), identity(n), Vec::new())
    } else {
        let s = smith_normal_form(&columns_matrix(n, sub_basis), n, sub_basis.len());
        (s.rank(), s.left, s.left_inv, s.diag)
    };
    let free_rows: Vec<Vec<i64>> = (rank..n).map(|i| small_vec(&l[i])).collect();
    let free_projection = LatticeMap::new(n, n - rank, free_rows);
    let section_cols: Vec<Vec<i64>> = (rank..n)
        .map(|j| small_vec(&(0..n).map(|i| linv[i][j].clone()).collect::<Vec<_>>()))
        .collect();
    let section = LatticeMap::from_columns(n, &section_cols);
    let mut torsion_invariants = Vec::new();
    let mut torsion_projection = Vec::new();
    for (i, d) in diag.iter().enumerate().take(rank) {
        if d > &BigInt::one() {
            torsion_invariants.push(d.to_u64().expect("torsion invariant exceeds u64"));
            torsion_projection.push(small_vec(&l[i]));
        }
    }
    QuotientData {
        free_projection,
        torsion_invariants,
        torsion_projection,
        section,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Index {
    Finite(BigInt),
    Infinite,
}

/// Index of the image of `sub` in its target lattice.
pub fn lattice_index(sub: &LatticeMap) -> Index {
    if sub.source_rank != sub.target_rank {
        return Index::Infinite;
    }
    let n = sub.target_rank;
    let s = smith_normal_form(&to_big(&sub.matrix), n, n);
    if s.rank() < n {
        Index::Infinite
    } else {
        Index::Finite(s.diag.iter().fold(BigInt::one(), |acc, d| acc * d))
    }
}

/// Exact integer solution `x` of `basis · x = v` where the columns of `basis`
/// are linearly independent, if one exists.
pub fn solve_in_basis(basis_cols: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    let n = v.len();
    let k = basis_cols.len();
    if k == 0 {
        return v.iter().all(|&x| x == 0).then(Vec::new);
    }
    let s = smith_normal_form(&columns_matrix(n, basis_cols), n, k);
    // L B R = D, so B x = v  <=>  D (R^{-1} x) = L v
    let lv: Vec<BigInt> = s
        .left
        .iter()
        .map(|row| row.iter().zip(v).map(|(a, &b)| a * BigInt::from(b)).sum())
        .collect();
    let mut y = vec![BigInt::zero(); k];
    for i in 0..n {
        let d = if i < k {
            s.diag[i].clone()
        } else {
            BigInt::zero()
        };
        if d.is_zero() {
            if !lv[i].is_zero() {
                return None;
            }
        } else {
            let (q, r) = lv[i].div_rem(&d);
            if !r.is_zero() {
                return None;
            }
            y[i] = q;
        }
    }
    let x: Vec<BigInt> = s
        .right
        .iter()
        .map(|row| row.iter().zip(&y).map(|(a, b)| a * b).sum())
        .collect();
    Some(small_vec(&x))
}
