//! Exact rational linear algebra.
//!
//! Everything here works over `BigRational`: sparse vectors and matrices, a
//! canonical reduced row-echelon form, subspaces kept in that form, truncated
//! power series with matrix coefficients, and Jordan-type recovery for
//! nilpotent operators.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactLinError {
    #[error("constant term of the power series is singular")]
    SingularConstantTerm,
    #[error("operator is not nilpotent (rank sequence stalls at {rank})")]
    NotNilpotent { rank: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-3/2"` or `"+7"` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q, ExactLinError> {
    let t = s.trim();
    let t = t.strip_prefix('+').unwrap_or(t);
    let bad = || ExactLinError::BadRational(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Sparse vector with strictly increasing indices and no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Q::one())] }
    }

    /// Builds from arbitrary `(index, value)` pairs, summing duplicates.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Q)>>(pairs: I) -> Self {
        let mut map: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, v) in pairs {
            if v.is_zero() {
                continue;
            }
            let slot = map.entry(i).or_insert_with(Q::zero);
            *slot += v;
        }
        Self {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn first(&self) -> Option<(usize, &Q)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    fn get_ref(&self, i: usize) -> Option<&Q> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn scale(&mut self, c: &Q) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in &mut self.entries {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: &Q, other: &SparseVec) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        let mut merged = Vec::with_capacity(self.entries.len() + other.entries.len());
        let mut a = std::mem::take(&mut self.entries).into_iter().peekable();
        let mut b = other.entries.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (Some((ia, _)), Some((ib, _))) => {
                    if ia < ib {
                        merged.push(a.next().unwrap());
                    } else if ib < ia {
                        let (i, v) = b.next().unwrap();
                        merged.push((*i, c * v));
                    } else {
                        let (i, va) = a.next().unwrap();
                        let (_, vb) = b.next().unwrap();
                        let s = va + c * vb;
                        if !s.is_zero() {
                            merged.push((i, s));
                        }
                    }
                }
                (Some(_), None) => merged.push(a.next().unwrap()),
                (None, Some(_)) => {
                    let (i, v) = b.next().unwrap();
                    merged.push((*i, c * v));
                }
                (None, None) => break,
            }
        }
        self.entries = merged;
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&Q::one(), other);
        out
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.axpy(&-Q::one(), other);
        out
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let (small, large) = if self.nnz() <= other.nnz() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Q::zero();
        for (i, v) in small.iter() {
            if let Some(w) = large.get_ref(i) {
                acc += v * w;
            }
        }
        acc
    }

    pub fn dot_dense(&self, dense: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (i, v) in self.iter() {
            acc += v * &dense[i];
        }
        acc
    }

    /// Applies an index map; entries mapped to `None` are dropped.
    pub fn remap<F: Fn(usize) -> Option<usize>>(&self, f: F) -> SparseVec {
        SparseVec::from_pairs(
            self.entries
                .iter()
                .filter_map(|(i, v)| f(*i).map(|j| (j, v.clone()))),
        )
    }
}

/// Sparse rational matrix stored as a list of sparse rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(SparseVec::unit).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        debug_assert!(rows.iter().all(|r| r.max_index().is_none_or(|m| m < cols)));
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Self::zeros(columns.len(), rows);
        m.data = columns.to_vec();
        m.transpose()
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| SparseVec::from_dense(&r.iter().map(|&x| q(x)).collect::<Vec<_>>()))
                .collect(),
        )
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| SparseVec::from_dense(r)).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.data[r]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &SparseVec> {
        self.data.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        let row = &mut self.data[r];
        let mut pairs: Vec<(usize, Q)> = row.iter().filter(|(i, _)| *i != c).map(|(i, x)| (i, x.clone())).collect();
        pairs.push((c, v));
        *row = SparseVec::from_pairs(pairs);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVec::is_zero)
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        self.data.iter().map(|r| r.to_dense(self.cols)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row.iter() {
                cols[c].push((r, v.clone()));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data: cols.into_iter().map(|e| SparseVec { entries: e }).collect(),
        }
    }

    /// Matrix-vector product `self * v`.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            self.data
                .iter()
                .enumerate()
                .map(|(r, row)| (r, row.dot(v)))
                .filter(|(_, x)| !x.is_zero()),
        )
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, ExactLinError> {
        if self.cols != other.rows {
            return Err(ExactLinError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = SparseVec::new();
                for (k, v) in row.iter() {
                    acc.axpy(v, &other.data[k]);
                }
                acc
            })
            .collect();
        Ok(RationalMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn pow(&self, k: usize) -> RationalMatrix {
        assert_eq!(self.rows, self.cols, "pow of a non-square matrix");
        let mut acc = RationalMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self).expect("square");
        }
        acc
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.cols);
        for row in &self.data {
            ech.insert(row.clone());
        }
        ech.rank()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|c| fmt_q(&self.get(r, c))).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Incrementally maintained reduced row-echelon form.
///
/// Rows are kept fully reduced: each stored row has leading coefficient 1 at
/// its pivot and zeros in every other pivot column. The pivot of a row is its
/// lowest column index, so column order is pivot priority.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
            pivot_row: vec![None; cols],
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivot_row[c].is_some()
    }

    pub fn pivot_row(&self, c: usize) -> Option<&SparseVec> {
        self.pivot_row[c].map(|r| &self.rows[r])
    }

    /// Reduces `v` modulo the stored row space.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut out = v.clone();
        for (c, val) in v.iter() {
            if let Some(r) = self.pivot_row[c] {
                out.axpy(&-val.clone(), &self.rows[r]);
            }
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the row space. Returns `true` when the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let mut w = self.reduce(&v);
        let Some((pc, lead)) = w.first().map(|(c, x)| (c, x.clone())) else {
            return false;
        };
        debug_assert!(pc < self.cols);
        w.scale(&lead.recip());
        for row in self.rows.iter_mut() {
            let x = row.get(pc);
            if !x.is_zero() {
                row.axpy(&-x, &w);
            }
        }
        self.pivot_row[pc] = Some(self.rows.len());
        self.rows.push(w);
        true
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.cols).filter(|&c| self.pivot_row[c].is_none()).collect()
    }

    /// Rows of the RREF sorted by pivot column.
    pub fn basis(&self) -> Vec<SparseVec> {
        self.pivots()
            .into_iter()
            .map(|c| self.rows[self.pivot_row[c].unwrap()].clone())
            .collect()
    }

    /// Basis of `{x : r . x = 0 for every stored row r}`, one vector per free
    /// column.
    pub fn nullspace(&self) -> Vec<SparseVec> {
        let pivots = self.pivots();
        let free = self.free_columns();
        let mut out = Vec::with_capacity(free.len());
        for &f in &free {
            let mut pairs = vec![(f, Q::one())];
            for &p in &pivots {
                let row = &self.rows[self.pivot_row[p].unwrap()];
                let x = row.get(f);
                if !x.is_zero() {
                    pairs.push((p, -x));
                }
            }
            out.push(SparseVec::from_pairs(pairs));
        }
        out
    }
}

/// Result of [`rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    /// Nonzero rows of the reduced row-echelon form, ordered by pivot.
    pub row_basis: Vec<SparseVec>,
    pub nullspace: Vec<SparseVec>,
}

/// Exact reduced row-echelon form.
///
/// Pivots are chosen at the lowest available column; the result depends only
/// on the row space, never on the order of the input rows.
pub fn rref(m: &RationalMatrix) -> Rref {
    let mut ech = Echelon::new(m.ncols());
    for row in m.rows_iter() {
        ech.insert(row.clone());
    }
    let nullspace = ech.nullspace();
    debug_assert!(nullspace.iter().all(|v| m.apply(v).is_zero()));
    Rref {
        rank: ech.rank(),
        pivots: ech.pivots(),
        row_basis: ech.basis(),
        nullspace,
    }
}

/// One solution of `m x = b`, or `None` when the system is inconsistent.
pub fn solve(m: &RationalMatrix, b: &SparseVec) -> Option<SparseVec> {
    let n = m.ncols();
    let mut ech = Echelon::new(n + 1);
    for (r, row) in m.rows_iter().enumerate() {
        let mut aug = row.clone();
        let rhs = b.get(r);
        if !rhs.is_zero() {
            aug.axpy(&rhs, &SparseVec::unit(n));
        }
        ech.insert(aug);
    }
    if ech.is_pivot(n) {
        return None;
    }
    Some(SparseVec::from_pairs(
        ech.pivots().into_iter().map(|c| (c, ech.pivot_row(c).unwrap().get(n))),
    ))
}

/// A linear subspace of `Q^n`, stored in canonical RREF.
#[derive(Clone, Debug)]
pub struct Subspace {
    ech: Echelon,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Self {
            ech: Echelon::new(ambient),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, (0..ambient).map(SparseVec::unit))
    }

    pub fn span<I: IntoIterator<Item = SparseVec>>(ambient: usize, vectors: I) -> Self {
        let mut ech = Echelon::new(ambient);
        for v in vectors {
            ech.insert(v);
        }
        Self { ech }
    }

    pub fn ambient(&self) -> usize {
        self.ech.cols()
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.ech.contains(v)
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.ech.reduce(v)
    }

    pub fn insert(&mut self, v: SparseVec) -> bool {
        self.ech.insert(v)
    }

    pub fn basis(&self) -> Vec<SparseVec> {
        self.ech.basis()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.ech.pivots()
    }

    /// Coordinates that are not pivots; their unit vectors span a complement.
    pub fn complement_coordinates(&self) -> Vec<usize> {
        self.ech.free_columns()
    }

    /// Orthogonal complement with respect to the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        Subspace::span(self.ambient(), self.ech.nullspace())
    }

    /// Coordinates of `v` (assumed to lie in the subspace) in the RREF basis.
    pub fn coordinates(&self, v: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(self.pivots().into_iter().enumerate().map(|(k, p)| (k, v.get(p))))
    }

    /// Coordinates of the class of `v` in the quotient, read at the
    /// complement coordinates.
    pub fn quotient_coordinates(&self, v: &SparseVec) -> SparseVec {
        let r = self.reduce(v);
        SparseVec::from_pairs(
            self.complement_coordinates()
                .into_iter()
                .enumerate()
                .map(|(k, c)| (k, r.get(c))),
        )
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        // (U ∩ W)^⊥ = U^⊥ + W^⊥
        let mut sum = self.annihilator();
        for v in other.annihilator().basis() {
            sum.insert(v);
        }
        sum.annihilator()
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient() == other.ambient() && self.pivots() == other.pivots() && self.basis() == other.basis()
    }
}

impl Eq for Subspace {}

/// Dense square matrix of polynomials in `t`, truncated at degree `trunc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    n: usize,
    trunc: usize,
    /// `coeffs[k]` is the dense coefficient matrix of `t^k`.
    coeffs: Vec<Vec<Vec<Q>>>,
}

impl PolyMatrix {
    pub fn zero(n: usize, trunc: usize) -> Self {
        Self {
            n,
            trunc,
            coeffs: vec![vec![vec![Q::zero(); n]; n]; trunc + 1],
        }
    }

    pub fn identity(n: usize, trunc: usize) -> Self {
        let mut p = Self::zero(n, trunc);
        for i in 0..n {
            p.coeffs[0][i][i] = Q::one();
        }
        p
    }

    /// `sum_k t^k * coeff_k`, dropping terms above `trunc`.
    pub fn from_coefficients(trunc: usize, coeffs: Vec<RationalMatrix>) -> Self {
        let n = coeffs.first().map_or(0, |m| m.nrows());
        let mut p = Self::zero(n, trunc);
        for (k, m) in coeffs.into_iter().enumerate().take(trunc + 1) {
            assert!(m.nrows() == n && m.ncols() == n, "coefficient shape");
            p.coeffs[k] = m.to_dense();
        }
        p
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, k: usize, i: usize, j: usize) -> &Q {
        &self.coeffs[k][i][j]
    }

    pub fn coeff_matrix(&self, k: usize) -> RationalMatrix {
        RationalMatrix::from_dense(&self.coeffs[k])
    }

    /// Coefficients of the `(i, j)` entry, lowest degree first.
    pub fn entry(&self, i: usize, j: usize) -> Vec<Q> {
        (0..=self.trunc).map(|k| self.coeffs[k][i][j].clone()).collect()
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.n, other.n);
        let trunc = self.trunc.min(other.trunc);
        let mut out = PolyMatrix::zero(self.n, trunc);
        for a in 0..=trunc {
            for b in 0..=(trunc - a) {
                for i in 0..self.n {
                    for k in 0..self.n {
                        let x = &self.coeffs[a][i][k];
                        if x.is_zero() {
                            continue;
                        }
                        for j in 0..self.n {
                            let y = &other.coeffs[b][k][j];
                            if !y.is_zero() {
                                out.coeffs[a + b][i][j] += x * y;
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiplies every entry by the scalar polynomial `poly`.
    pub fn mul_scalar_poly(&self, poly: &[Q]) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.n, self.trunc);
        for (a, c) in poly.iter().enumerate().take(self.trunc + 1) {
            if c.is_zero() {
                continue;
            }
            for b in 0..=(self.trunc - a) {
                for i in 0..self.n {
                    for j in 0..self.n {
                        let y = &self.coeffs[b][i][j];
                        if !y.is_zero() {
                            out.coeffs[a + b][i][j] += c * y;
                        }
                    }
                }
            }
        }
        out
    }

    /// Trace as a polynomial.
    pub fn trace(&self) -> Vec<Q> {
        (0..=self.trunc)
            .map(|k| (0..self.n).fold(Q::zero(), |acc, i| acc + &self.coeffs[k][i][i]))
            .collect()
    }

    pub fn is_identity_mod_trunc(&self) -> bool {
        *self == PolyMatrix::identity(self.n, self.trunc)
    }
}

fn dense_inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(pivot_row.iter()) {
                    *x -= &f * p;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Inverse of a matrix power series modulo `t^(trunc+1)`.
pub fn series_inverse(p: &PolyMatrix, trunc: usize) -> Result<PolyMatrix, ExactLinError> {
    let n = p.n;
    let trunc = trunc.min(p.trunc);
    let c0_inv = dense_inverse(&p.coeffs[0]).ok_or(ExactLinError::SingularConstantTerm)?;
    let mut out = PolyMatrix::zero(n, trunc);
    out.coeffs[0] = c0_inv.clone();
    // p0 X_k = -sum_{j=1..k} p_j X_{k-j}
    for k in 1..=trunc {
        let mut acc = vec![vec![Q::zero(); n]; n];
        for j in 1..=k {
            let pj = &p.coeffs[j];
            let xk = &out.coeffs[k - j];
            for i in 0..n {
                for l in 0..n {
                    if pj[i][l].is_zero() {
                        continue;
                    }
                    for m in 0..n {
                        if !xk[l][m].is_zero() {
                            acc[i][m] -= &pj[i][l] * &xk[l][m];
                        }
                    }
                }
            }
        }
        let mut xk = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for l in 0..n {
                if c0_inv[i][l].is_zero() {
                    continue;
                }
                for m in 0..n {
                    if !acc[l][m].is_zero() {
                        xk[i][m] += &c0_inv[i][l] * &acc[l][m];
                    }
                }
            }
        }
        out.coeffs[k] = xk;
    }
    Ok(out)
}

/// Jordan block sizes of a nilpotent operator, ascending.
///
/// Uses the rank sequence `r_k = rank(op^k)`: the number of blocks of size at
/// least `k` is `r_{k-1} - r_k`.
pub fn nilpotent_block_sizes(op: &RationalMatrix) -> Result<Vec<usize>, ExactLinError> {
    let n = op.nrows();
    if op.ncols() != n {
        return Err(ExactLinError::DimensionMismatch {
            expected: n,
            got: op.ncols(),
        });
    }
    let mut ranks = vec![n];
    let mut power = RationalMatrix::identity(n);
    loop {
        power = power.mul(op)?;
        let r = power.rank();
        let prev = *ranks.last().unwrap();
        ranks.push(r);
        if r == 0 {
            break;
        }
        if r == prev {
            return Err(ExactLinError::NotNilpotent { rank: r });
        }
    }
    let at_least = |k: usize| -> usize {
        if k >= ranks.len() {
            0
        } else {
            ranks[k - 1] - ranks[k]
        }
    };
    let mut sizes = Vec::new();
    for k in 1..ranks.len() {
        let exact = at_least(k) - at_least(k + 1);
        sizes.extend(std::iter::repeat_n(k, exact));
    }
    debug_assert_eq!(sizes.iter().sum::<usize>(), n);
    Ok(sizes)
}

/// Truncated polynomial arithmetic helpers on coefficient vectors.
pub mod poly {
    use super::Q;
    use num_traits::Zero;

    pub fn trim(mut p: Vec<Q>) -> Vec<Q> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| a.get(i).cloned().unwrap_or_else(Q::zero) + b.get(i).cloned().unwrap_or_else(Q::zero))
                .collect(),
        )
    }

    pub fn mul(a: &[Q], b: &[Q]) -> Vec<Q> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Q::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    pub fn eval(p: &[Q], x: &Q) -> Q {
        p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}
