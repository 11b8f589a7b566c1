//! Sparse exact matrices and incremental row echelon forms.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Exact, Field, FieldKind, PrimeField, Rational, Rationals};

pub type SparseVec<E> = Vec<(usize, E)>;

/// Row-major sparse matrix over the rationals. A differential `C^n -> C^{n+1}`
/// has `dim C^{n+1}` rows and `dim C^n` columns; column `j` is the image of
/// basis vector `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec<Rational>>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Rational::one())]).collect();
        Self { nrows: n, ncols: n, rows }
    }

    /// Duplicate entries are summed; zeros are dropped.
    pub fn from_triplets<I>(nrows: usize, ncols: usize, entries: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, Rational)>,
    {
        let mut acc: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); nrows];
        for (i, j, x) in entries {
            assert!(i < nrows && j < ncols, "entry ({i},{j}) outside {nrows}x{ncols}");
            if x.is_zero() {
                continue;
            }
            let slot = acc[i].entry(j).or_insert_with(Rational::zero);
            *slot += x;
        }
        let rows = acc
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        Self { nrows, ncols, rows }
    }

    pub fn from_dense(nrows: usize, ncols: usize, data: &[Vec<Rational>]) -> Self {
        assert_eq!(data.len(), nrows);
        Self::from_triplets(
            nrows,
            ncols,
            data.iter().enumerate().flat_map(|(i, row)| {
                assert_eq!(row.len(), ncols);
                row.iter().enumerate().map(move |(j, x)| (i, j, x.clone()))
            }),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[SparseVec<Rational>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.rows[i]
            .binary_search_by_key(&j, |(c, _)| *c)
            .map(|k| self.rows[i][k].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, x)| (i, *j, x)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.ncols]; self.nrows];
        for (i, j, x) in self.triplets() {
            out[i][j] = x.clone();
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_triplets(self.ncols, self.nrows, self.triplets().map(|(i, j, x)| (j, i, x.clone())))
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        if c.is_zero() {
            return Matrix::zeros(self.nrows, self.ncols);
        }
        let rows = self.rows.iter().map(|r| r.iter().map(|(j, x)| (*j, x * c)).collect()).collect();
        Matrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn neg(&self) -> Matrix {
        self.scale(&-Rational::one())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "shape mismatch in add");
        Matrix::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().chain(other.triplets()).map(|(i, j, x)| (i, j, x.clone())),
        )
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    /// `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in product");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, a) in r {
                    for (j, b) in &other.rows[*k] {
                        *acc.entry(*j).or_insert_with(Rational::zero) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
            })
            .collect();
        Matrix { nrows: self.nrows, ncols: other.ncols, rows }
    }

    pub fn apply(&self, v: &[(usize, Rational)]) -> SparseVec<Rational> {
        let mut dense: BTreeMap<usize, Rational> = BTreeMap::new();
        let lookup: BTreeMap<usize, &Rational> = v.iter().map(|(j, x)| (*j, x)).collect();
        for (i, r) in self.rows.iter().enumerate() {
            let mut s = Rational::zero();
            for (j, a) in r {
                if let Some(x) = lookup.get(j) {
                    s += a * *x;
                }
            }
            if !s.is_zero() {
                dense.insert(i, s);
            }
        }
        dense.into_iter().collect()
    }

    /// Column `j` as a sparse vector.
    pub fn column(&self, j: usize) -> SparseVec<Rational> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                r.binary_search_by_key(&j, |(c, _)| *c).ok().map(|k| (i, r[k].1.clone()))
            })
            .collect()
    }

    pub fn columns(&self) -> Vec<SparseVec<Rational>> {
        let mut cols: Vec<SparseVec<Rational>> = vec![Vec::new(); self.ncols];
        for (i, j, x) in self.triplets() {
            cols[j].push((i, x.clone()));
        }
        cols
    }

    pub fn block_diag(blocks: &[&Matrix]) -> Matrix {
        let nrows = blocks.iter().map(|b| b.nrows).sum();
        let ncols = blocks.iter().map(|b| b.ncols).sum();
        let mut entries = Vec::new();
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            entries.extend(b.triplets().map(|(i, j, x)| (i + r0, j + c0, x.clone())));
            r0 += b.nrows;
            c0 += b.ncols;
        }
        Matrix::from_triplets(nrows, ncols, entries)
    }

    /// Place `blocks[r][c]` in a block grid; row heights and column widths are given.
    pub fn from_blocks(heights: &[usize], widths: &[usize], blocks: &[(usize, usize, &Matrix)]) -> Matrix {
        let row_off: Vec<usize> = offsets(heights);
        let col_off: Vec<usize> = offsets(widths);
        let mut entries = Vec::new();
        for (br, bc, m) in blocks {
            assert_eq!(m.nrows, heights[*br], "block row height");
            assert_eq!(m.ncols, widths[*bc], "block column width");
            entries.extend(m.triplets().map(|(i, j, x)| (i + row_off[*br], j + col_off[*bc], x.clone())));
        }
        Matrix::from_triplets(heights.iter().sum(), widths.iter().sum(), entries)
    }

    /// `P_rows * self * P_cols^{-1}` where `row_perm[old] = new`, `col_perm[old] = new`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Matrix {
        Matrix::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().map(|(i, j, x)| (row_perm[i], col_perm[j], x.clone())),
        )
    }

    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        let mut entries = Vec::new();
        for (i, j, a) in self.triplets() {
            for (k, l, b) in other.triplets() {
                entries.push((i * other.nrows + k, j * other.ncols + l, a * b));
            }
        }
        Matrix::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, entries)
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }
}

pub(crate) fn offsets(sizes: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(sizes.len());
    let mut acc = 0;
    for s in sizes {
        out.push(acc);
        acc += s;
    }
    out
}

/// Incremental echelon form. Rows are stored with leading coefficient one and
/// are fully reduced against the pivots present when they were inserted.
///
/// With tracking enabled every stored row remembers its expression in terms of
/// the inserted vectors, which makes [`Echelon::express`] available.
pub struct Echelon<'a, F: Field> {
    field: &'a F,
    width: usize,
    rows: Vec<SparseVec<F::Elem>>,
    pivot_row: BTreeMap<usize, usize>,
    combos: Option<Vec<SparseVec<F::Elem>>>,
    inserted: usize,
}

impl<'a, F: Field> Echelon<'a, F> {
    pub fn new(field: &'a F, width: usize) -> Self {
        Self { field, width, rows: Vec::new(), pivot_row: BTreeMap::new(), combos: None, inserted: 0 }
    }

    pub fn with_tracking(field: &'a F, width: usize) -> Self {
        Self { combos: Some(Vec::new()), ..Self::new(field, width) }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    pub fn rows(&self) -> &[SparseVec<F::Elem>] {
        &self.rows
    }

    /// Reduces `v` against every stored pivot. Returns the residual (no entry
    /// in a pivot column) and, if tracking, the combination of inserted
    /// vectors that was subtracted.
    pub fn reduce(&self, v: &[(usize, F::Elem)]) -> (SparseVec<F::Elem>, SparseVec<F::Elem>) {
        let f = self.field;
        let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
        for (j, x) in v {
            debug_assert!(*j < self.width, "column {j} outside width {}", self.width);
            if !f.is_zero(x) {
                let slot = acc.entry(*j).or_insert_with(|| f.zero());
                *slot = f.add(slot, x);
            }
        }
        acc.retain(|_, x| !f.is_zero(x));
        let mut used: BTreeMap<usize, F::Elem> = BTreeMap::new();
        let mut cursor = 0usize;
        loop {
            let next = acc
                .range(cursor..)
                .map(|(c, _)| *c)
                .find(|c| self.pivot_row.contains_key(c));
            let Some(c) = next else { break };
            let coef = acc.remove(&c).expect("present");
            let r = self.pivot_row[&c];
            for (j, x) in &self.rows[r][1..] {
                let slot = acc.entry(*j).or_insert_with(|| f.zero());
                *slot = f.sub(slot, &f.mul(&coef, x));
                if f.is_zero(slot) {
                    acc.remove(j);
                }
            }
            if let Some(combos) = &self.combos {
                for (t, y) in &combos[r] {
                    let slot = used.entry(*t).or_insert_with(|| f.zero());
                    *slot = f.add(slot, &f.mul(&coef, y));
                    if f.is_zero(slot) {
                        used.remove(t);
                    }
                }
            }
            cursor = c + 1;
        }
        (acc.into_iter().collect(), used.into_iter().collect())
    }

    /// Inserts `v`; returns whether it was independent of the stored rows.
    pub fn insert(&mut self, v: &[(usize, F::Elem)]) -> bool {
        let f = self.field;
        let t = self.inserted;
        self.inserted += 1;
        let (res, used) = self.reduce(v);
        if res.is_empty() {
            return false;
        }
        let lead_inv = f.inv(&res[0].1);
        let row: SparseVec<F::Elem> = res.iter().map(|(j, x)| (*j, f.mul(x, &lead_inv))).collect();
        if let Some(combos) = &mut self.combos {
            // row = (v - sum used) / lead
            let mut c: BTreeMap<usize, F::Elem> = BTreeMap::new();
            c.insert(t, lead_inv.clone());
            for (s, y) in used {
                let slot = c.entry(s).or_insert_with(|| f.zero());
                *slot = f.sub(slot, &f.mul(&y, &lead_inv));
            }
            combos.push(c.into_iter().filter(|(_, x)| !f.is_zero(x)).collect());
        }
        self.pivot_row.insert(row[0].0, self.rows.len());
        self.rows.push(row);
        true
    }

    pub fn contains(&self, v: &[(usize, F::Elem)]) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Coordinates of `v` in terms of the inserted vectors (including dependent
    /// ones, which never receive weight). Requires tracking.
    pub fn express(&self, v: &[(usize, F::Elem)]) -> Option<SparseVec<F::Elem>> {
        assert!(self.combos.is_some(), "express needs a tracking echelon");
        let (res, used) = self.reduce(v);
        res.is_empty().then_some(used)
    }

    /// Reduced row echelon form: rows sorted by pivot, each pivot column zero
    /// outside its own row.
    pub fn rref(&self) -> Vec<SparseVec<F::Elem>> {
        let f = self.field;
        let mut order: Vec<usize> = self.pivot_row.values().copied().collect();
        order.sort_by_key(|&r| self.rows[r][0].0);
        let mut out: Vec<SparseVec<F::Elem>> = order.iter().map(|&r| self.rows[r].clone()).collect();
        let pivot_cols: Vec<usize> = out.iter().map(|r| r[0].0).collect();
        let pivot_index: BTreeMap<usize, usize> =
            pivot_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        // Back substitution from the last pivot up.
        for i in (0..out.len()).rev() {
            let mut acc: BTreeMap<usize, F::Elem> = out[i].iter().cloned().collect();
            let mut cursor = pivot_cols[i] + 1;
            loop {
                let next = acc.range(cursor..).map(|(c, _)| *c).find(|c| pivot_index.contains_key(c));
                let Some(c) = next else { break };
                let coef = acc.remove(&c).expect("present");
                for (j, x) in &out[pivot_index[&c]][1..] {
                    let slot = acc.entry(*j).or_insert_with(|| f.zero());
                    *slot = f.sub(slot, &f.mul(&coef, x));
                    if f.is_zero(slot) {
                        acc.remove(j);
                    }
                }
                cursor = c + 1;
            }
            out[i] = acc.into_iter().collect();
        }
        out
    }
}

pub(crate) fn convert_vec<F: Field>(f: &F, v: &[(usize, Rational)]) -> Result<SparseVec<F::Elem>> {
    v.iter()
        .map(|(j, x)| Ok((*j, f.from_rational(x)?)))
        .filter(|r| r.as_ref().map(|(_, x)| !f.is_zero(x)).unwrap_or(true))
        .collect()
}

pub(crate) fn lift_vec<F: Field>(f: &F, v: &[(usize, F::Elem)]) -> SparseVec<Rational> {
    v.iter().map(|(j, x)| (*j, f.to_rational(x))).collect()
}

fn rank_generic<F: Field>(f: &F, m: &Matrix) -> Result<usize> {
    // Eliminate along the shorter side.
    let (vecs, width) = if m.nrows <= m.ncols { (m.rows.clone(), m.ncols) } else { (m.columns(), m.nrows) };
    let mut ech = Echelon::new(f, width);
    for v in vecs {
        ech.insert(&convert_vec(f, &v)?);
    }
    Ok(ech.rank())
}

pub fn rank(exact: &Exact, m: &Matrix) -> Result<usize> {
    match exact.field {
        FieldKind::Rational => rank_generic(&Rationals, m),
        FieldKind::Prime(p) => rank_generic(&PrimeField::new(p)?, m),
    }
}

/// Kernel basis of a rational matrix over the rationals, one vector per free
/// column of the reduced row echelon form.
pub fn kernel(m: &Matrix) -> Vec<SparseVec<Rational>> {
    kernel_generic(&Rationals, m).expect("rational conversion is infallible")
}

fn kernel_generic<F: Field>(f: &F, m: &Matrix) -> Result<Vec<SparseVec<F::Elem>>> {
    let mut ech = Echelon::new(f, m.ncols);
    for r in &m.rows {
        ech.insert(&convert_vec(f, r)?);
    }
    let rref = ech.rref();
    let pivots: BTreeMap<usize, usize> = rref.iter().enumerate().map(|(i, r)| (r[0].0, i)).collect();
    let mut out = Vec::new();
    for free in 0..m.ncols {
        if pivots.contains_key(&free) {
            continue;
        }
        let mut v: SparseVec<F::Elem> = vec![(free, f.one())];
        for row in &rref {
            if let Ok(k) = row.binary_search_by_key(&free, |(c, _)| *c) {
                v.push((row[0].0, f.neg(&row[k].1)));
            }
        }
        v.sort_by_key(|(c, _)| *c);
        out.push(v);
    }
    Ok(out)
}

/// Kernel basis computed over the configured field, lifted back to rationals.
pub fn kernel_over(exact: &Exact, m: &Matrix) -> Result<Vec<SparseVec<Rational>>> {
    match exact.field {
        FieldKind::Rational => Ok(kernel(m)),
        FieldKind::Prime(p) => {
            let f = PrimeField::new(p)?;
            Ok(kernel_generic(&f, m)?.iter().map(|v| lift_vec(&f, v)).collect())
        }
    }
}

/// Exact determinant by fraction-producing Gaussian elimination.
pub fn determinant(m: &Matrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("determinant of {}x{} matrix", m.nrows, m.ncols)));
    }
    let n = m.nrows;
    let mut a = m.to_dense();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let pivot = a[col][col].clone();
        det *= &pivot;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pivot;
            for c in col..n {
                let delta = &factor * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    Ok(det)
}

/// Solves `x * basis = v` for a row vector `x`, i.e. expresses `v` in the span
/// of the given vectors. Returns `None` if `v` is outside the span.
pub fn express_in_span(basis: &[SparseVec<Rational>], width: usize, v: &[(usize, Rational)]) -> Option<SparseVec<Rational>> {
    let f = Rationals;
    let mut ech = Echelon::with_tracking(&f, width);
    for b in basis {
        ech.insert(b);
    }
    ech.express(v)
}

/// Whether `m` is a permutation matrix.
pub fn is_permutation_matrix(m: &Matrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let mut seen = vec![false; m.ncols];
    for r in &m.rows {
        if r.len() != 1 || !r[0].1.is_one() || seen[r[0].0] {
            return false;
        }
        seen[r[0].0] = true;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn m(rows: &[&[i64]]) -> Matrix {
        let data: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        Matrix::from_dense(rows.len(), rows[0].len(), &data)
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 1]]);
        assert_eq!(rank(&Exact::rational(), &a).unwrap(), 1);
        let k = kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(a.apply(&k[0]).is_empty());
    }

    #[test]
    fn rank_mod_p_can_drop() {
        let a = m(&[&[2, 0], &[0, 3]]);
        assert_eq!(rank(&Exact::rational(), &a).unwrap(), 2);
        assert_eq!(rank(&Exact::prime(3).unwrap(), &a).unwrap(), 1);
    }

    #[test]
    fn determinant_matches_cofactor() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        // 2(12-1) - 1(4-0) = 18
        assert_eq!(determinant(&a).unwrap(), q(18));
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])).unwrap(), q(-1));
    }

    #[test]
    fn echelon_express_tracks_combinations() {
        let f = Rationals;
        let mut e = Echelon::with_tracking(&f, 3);
        e.insert(&[(0, q(1)), (1, q(1))]);
        e.insert(&[(1, q(1)), (2, q(1))]);
        let c = e.express(&[(0, q(1)), (2, q(-1))]).unwrap();
        // (1,0,-1) = v0 - v1
        assert_eq!(c, vec![(0, q(1)), (1, q(-1))]);
        assert!(e.express(&[(2, q(1))]).is_none());
    }

    #[test]
    fn rref_is_reduced() {
        let f = Rationals;
        let mut e = Echelon::new(&f, 3);
        e.insert(&[(0, q(1)), (1, q(2)), (2, q(3))]);
        e.insert(&[(1, q(1)), (2, q(1))]);
        let r = e.rref();
        assert_eq!(r[0], vec![(0, q(1)), (2, q(1))]);
        assert_eq!(r[1], vec![(1, q(1)), (2, q(1))]);
    }

    #[test]
    fn product_and_transpose() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let b = m(&[&[1, 0], &[3, 1]]);
        assert_eq!(a.mul(&b), m(&[&[7, 2], &[3, 1]]));
        assert_eq!(a.transpose(), m(&[&[1, 0], &[2, 1]]));
        assert!(is_permutation_matrix(&m(&[&[0, 1], &[1, 0]])));
        assert!(!is_permutation_matrix(&a));
    }
}
