//! Exact linear algebra: dense elimination over a generic field and sparse
//! column-major matrices over `F_p`.

use std::collections::HashMap;
use std::fmt;

use num_rational::Ratio;

use crate::field::{inv_mod, mul_mod};

pub trait Field {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, a: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.p
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        (a + self.p - b) % self.p
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        inv_mod(*a, self.p)
    }
}

/// The rationals with 128-bit numerators; ample for the small systems solved
/// over `Q` here (coroot expansions, closure tests in characteristic zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = Ratio<i128>;

    fn zero(&self) -> Self::Elem {
        Ratio::from_integer(0)
    }
    fn one(&self) -> Self::Elem {
        Ratio::from_integer(1)
    }
    fn from_i64(&self, a: i64) -> Self::Elem {
        Ratio::from_integer(a as i128)
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a + b
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a - b
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a * b
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if *a.numer() == 0 {
            None
        } else {
            Some(a.recip())
        }
    }
}

/// Incrementally built row-echelon basis of a subspace of `F^n`.
///
/// Rows are kept reduced against all earlier pivots, so reducing a vector by
/// the rows in insertion order clears every pivot column.
pub struct Echelon<F: Field> {
    field: F,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> Echelon<F> {
    pub fn new(field: F) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            if f.is_zero(&v[piv]) {
                continue;
            }
            let a = v[piv].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !f.is_zero(r) {
                    *x = f.sub(x, &f.mul(&a, r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    /// Returns `true` if `v` enlarged the span.
    pub fn insert(&mut self, v: &[F::Elem]) -> bool {
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|x| !self.field.is_zero(x)) else {
            return false;
        };
        let inv = self.field.inv(&r[piv]).expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = self.field.mul(x, &inv);
        }
        self.rows.push(r);
        self.pivots.push(piv);
        true
    }
}

pub fn rank<F: Field + Clone>(field: &F, rows: &[Vec<F::Elem>]) -> usize {
    let mut ech = Echelon::new(field.clone());
    for r in rows {
        ech.insert(r);
    }
    ech.rank()
}

/// Linear dependencies among `vectors`: a basis of
/// `{ c : sum_k c_k vectors[k] = 0 }`, in a canonical (reduced) form.
pub fn dependencies<F: Field + Clone>(field: &F, vectors: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    let k = vectors.len();
    if k == 0 {
        return Vec::new();
    }
    let n = vectors[0].len();
    // augmented rows [v_i | e_i]; eliminate on the first n columns
    let mut rows: Vec<Vec<F::Elem>> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut r = v.clone();
            r.extend((0..k).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    let mut lead = 0;
    for col in 0..n {
        let Some(sel) = (lead..k).find(|&i| !field.is_zero(&rows[i][col])) else {
            continue;
        };
        rows.swap(lead, sel);
        let inv = field.inv(&rows[lead][col]).unwrap();
        for x in rows[lead].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = rows[lead].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != lead && !field.is_zero(&row[col]) {
                let a = row[col].clone();
                for (x, pr) in row.iter_mut().zip(&pivot_row) {
                    *x = field.sub(x, &field.mul(&a, pr));
                }
            }
        }
        lead += 1;
        if lead == k {
            break;
        }
    }
    let kernel: Vec<Vec<F::Elem>> = rows[lead..].iter().map(|r| r[n..].to_vec()).collect();
    // canonical basis of the kernel: reduced row echelon form
    rref(field, kernel)
}

/// Reduced row echelon form with zero rows dropped.
pub fn rref<F: Field>(field: &F, mut rows: Vec<Vec<F::Elem>>) -> Vec<Vec<F::Elem>> {
    if rows.is_empty() {
        return rows;
    }
    let n = rows[0].len();
    let mut lead = 0;
    for col in 0..n {
        let Some(sel) = (lead..rows.len()).find(|&i| !field.is_zero(&rows[i][col])) else {
            continue;
        };
        rows.swap(lead, sel);
        let inv = field.inv(&rows[lead][col]).unwrap();
        for x in rows[lead].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = rows[lead].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != lead && !field.is_zero(&row[col]) {
                let a = row[col].clone();
                for (x, pr) in row.iter_mut().zip(&pivot_row) {
                    *x = field.sub(x, &field.mul(&a, pr));
                }
            }
        }
        lead += 1;
        if lead == rows.len() {
            break;
        }
    }
    rows.truncate(lead);
    rows
}

/// Null space `{ x : A x = 0 }` of a dense matrix given by rows.
pub fn nullspace<F: Field + Clone>(field: &F, rows: &[Vec<F::Elem>], ncols: usize) -> Vec<Vec<F::Elem>> {
    let red = rref(field, rows.to_vec());
    let mut pivot_cols = Vec::new();
    for r in &red {
        pivot_cols.push(r.iter().position(|x| !field.is_zero(x)).unwrap());
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut x = vec![field.zero(); ncols];
        x[free] = field.one();
        for (r, &pc) in red.iter().zip(&pivot_cols) {
            x[pc] = field.sub(&field.zero(), &r[free]);
        }
        basis.push(x);
    }
    basis
}

// ---------------------------------------------------------------------------
// sparse, mod p

/// Sparse vector over `F_p`: `(index, value)` pairs, sorted, no zero values.
pub type SparseVec = Vec<(u32, u32)>;

/// `y + a*x` for sparse vectors.
pub fn axpy(p: u64, a: u64, x: &[(u32, u32)], y: &[(u32, u32)]) -> SparseVec {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i].0 < y[j].0) {
            let v = mul_mod(a, x[i].1 as u64, p);
            if v != 0 {
                out.push((x[i].0, v as u32));
            }
            i += 1;
        } else if i == x.len() || y[j].0 < x[i].0 {
            out.push(y[j]);
            j += 1;
        } else {
            let v = (mul_mod(a, x[i].1 as u64, p) + y[j].1 as u64) % p;
            if v != 0 {
                out.push((x[i].0, v as u32));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sparse_scale(p: u64, a: u64, x: &[(u32, u32)]) -> SparseVec {
    let a = a % p;
    if a == 0 {
        return Vec::new();
    }
    x.iter().map(|&(i, v)| (i, mul_mod(a, v as u64, p) as u32)).collect()
}

/// Incremental echelon basis for sparse vectors over `F_p`, keyed by leading index.
pub struct SparseEchelon {
    p: u64,
    rows: Vec<SparseVec>,
    pivot_of: HashMap<u32, usize>,
}

impl SparseEchelon {
    pub fn new(p: u64) -> Self {
        SparseEchelon {
            p,
            rows: Vec::new(),
            pivot_of: HashMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn reduce(&self, v: &[(u32, u32)]) -> SparseVec {
        let mut v: SparseVec = v.to_vec();
        // eliminating the leading entry strictly increases the leading index
        let mut start = 0;
        while start < v.len() {
            let (lead, a) = v[start];
            match self.pivot_of.get(&lead) {
                Some(&r) => {
                    let neg = (self.p - a as u64) % self.p;
                    v = axpy(self.p, neg, &self.rows[r], &v);
                    start = v.partition_point(|&(i, _)| i <= lead);
                }
                None => start += 1,
            }
        }
        v
    }

    fn reduce_leading(&self, v: &[(u32, u32)]) -> SparseVec {
        let mut v: SparseVec = v.to_vec();
        while let Some(&(lead, a)) = v.first() {
            match self.pivot_of.get(&lead) {
                Some(&r) => {
                    let neg = (self.p - a as u64) % self.p;
                    v = axpy(self.p, neg, &self.rows[r], &v);
                }
                None => break,
            }
        }
        v
    }

    pub fn contains(&self, v: &[(u32, u32)]) -> bool {
        self.reduce(v).is_empty()
    }

    /// Returns `true` if `v` enlarged the span.
    pub fn insert(&mut self, v: &[(u32, u32)]) -> bool {
        let r = self.reduce_leading(v);
        let Some(&(lead, a)) = r.first() else {
            return false;
        };
        let inv = inv_mod(a as u64, self.p).unwrap();
        let r = sparse_scale(self.p, inv, &r);
        self.pivot_of.insert(lead, self.rows.len());
        self.rows.push(r);
        true
    }
}

/// Column-major sparse matrix over `F_p`.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    p: u64,
    cols: Vec<SparseVec>,
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "SparseMatrix({}x{} over F_{}, nnz={})",
            self.nrows,
            self.cols.len(),
            self.p,
            self.nnz()
        )
    }
}

impl SparseMatrix {
    pub fn zero(nrows: usize, ncols: usize, p: u64) -> Self {
        SparseMatrix {
            nrows,
            p,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn identity(n: usize, p: u64) -> Self {
        Self::scalar(n, p, 1)
    }

    pub fn scalar(n: usize, p: u64, c: u64) -> Self {
        let c = c % p;
        let cols = (0..n)
            .map(|i| if c == 0 { Vec::new() } else { vec![(i as u32, c as u32)] })
            .collect();
        SparseMatrix { nrows: n, p, cols }
    }

    /// Columns must be sorted sparse vectors with values in `[1, p)`.
    pub fn from_columns(nrows: usize, p: u64, cols: Vec<SparseVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.windows(2).all(|w| w[0].0 < w[1].0)));
        SparseMatrix { nrows, p, cols }
    }

    pub fn from_dense(p: u64, rows: &[Vec<u64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        let cols = (0..ncols)
            .map(|j| {
                (0..nrows)
                    .filter_map(|i| {
                        let v = rows[i][j] % p;
                        (v != 0).then_some((i as u32, v as u32))
                    })
                    .collect()
            })
            .collect();
        SparseMatrix { nrows, p, cols }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn column(&self, j: usize) -> &[(u32, u32)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        let col = &self.cols[j];
        match col.binary_search_by_key(&(i as u32), |e| e.0) {
            Ok(k) => col[k].1 as u64,
            Err(_) => 0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![0; self.ncols()]; self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                out[i as usize][j] = v as u64;
            }
        }
        out
    }

    /// `self * v` for a sparse column vector.
    pub fn apply(&self, v: &[(u32, u32)]) -> SparseVec {
        let mut acc = Accumulator::new(self.nrows, self.p);
        for &(k, b) in v {
            acc.add_scaled(b as u64, &self.cols[k as usize]);
        }
        acc.drain()
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols(), other.nrows, "dimension mismatch");
        assert_eq!(self.p, other.p);
        let mut acc = Accumulator::new(self.nrows, self.p);
        let cols = other
            .cols
            .iter()
            .map(|bcol| {
                for &(k, b) in bcol {
                    acc.add_scaled(b as u64, &self.cols[k as usize]);
                }
                acc.drain()
            })
            .collect();
        SparseMatrix {
            nrows: self.nrows,
            p: self.p,
            cols,
        }
    }

    /// `self + a * other`
    pub fn add_scaled(&self, a: u64, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols(), other.ncols());
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(x, y)| axpy(self.p, a % self.p, y, x))
            .collect();
        SparseMatrix {
            nrows: self.nrows,
            p: self.p,
            cols,
        }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(1, other)
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add_scaled(self.p - 1, other)
    }

    pub fn scale(&self, a: u64) -> SparseMatrix {
        let cols = self.cols.iter().map(|c| sparse_scale(self.p, a, c)).collect();
        SparseMatrix {
            nrows: self.nrows,
            p: self.p,
            cols,
        }
    }

    /// `self * other - other * self`
    pub fn commutator(&self, other: &SparseMatrix) -> SparseMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn pow(&self, mut e: u64) -> SparseMatrix {
        assert_eq!(self.nrows, self.ncols());
        let mut acc = SparseMatrix::identity(self.nrows, self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols = vec![Vec::new(); self.nrows];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                cols[i as usize].push((j as u32, v));
            }
        }
        SparseMatrix {
            nrows: self.ncols(),
            p: self.p,
            cols,
        }
    }

    /// `Some(c)` when the matrix equals `c * I`.
    pub fn scalar_value(&self) -> Option<u64> {
        if self.nrows != self.ncols() {
            return None;
        }
        let mut c = None;
        for (j, col) in self.cols.iter().enumerate() {
            let v = match col.as_slice() {
                [] => 0,
                [(i, v)] if *i as usize == j => *v as u64,
                _ => return None,
            };
            match c {
                None => c = Some(v),
                Some(prev) if prev != v => return None,
                _ => {}
            }
        }
        Some(c.unwrap_or(0))
    }

    /// Exact rank by sparse elimination on the columns.
    pub fn rank(&self) -> usize {
        let mut ech = SparseEchelon::new(self.p);
        for c in &self.cols {
            ech.insert(c);
        }
        ech.rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.nrows == self.ncols() && self.rank() == self.nrows
    }

    /// Basis of `{ x : self * x = 0 }` as sparse vectors.
    pub fn kernel(&self) -> Vec<SparseVec> {
        // Column elimination while tracking combinations: column j carries
        // the unit vector e_j; dependent columns yield kernel vectors.
        let p = self.p;
        let mut pivots: HashMap<u32, (SparseVec, SparseVec)> = HashMap::new();
        let mut kernel = Vec::new();
        for (j, col) in self.cols.iter().enumerate() {
            let mut v = col.clone();
            let mut comb: SparseVec = vec![(j as u32, 1)];
            while let Some(&(lead, a)) = v.first() {
                match pivots.get(&lead) {
                    Some((pv, pc)) => {
                        let neg = (p - a as u64) % p;
                        v = axpy(p, neg, pv, &v);
                        comb = axpy(p, neg, pc, &comb);
                    }
                    None => break,
                }
            }
            match v.first() {
                None => kernel.push(comb),
                Some(&(lead, a)) => {
                    let inv = inv_mod(a as u64, p).unwrap();
                    pivots.insert(lead, (sparse_scale(p, inv, &v), sparse_scale(p, inv, &comb)));
                }
            }
        }
        kernel
    }
}

/// Dense scratch accumulator for building sparse columns.
pub struct Accumulator {
    p: u64,
    vals: Vec<u64>,
    touched: Vec<u32>,
    mark: Vec<bool>,
}

impl Accumulator {
    pub fn new(n: usize, p: u64) -> Self {
        Accumulator {
            p,
            vals: vec![0; n],
            touched: Vec::new(),
            mark: vec![false; n],
        }
    }

    pub fn add(&mut self, i: u32, a: u64) {
        let iu = i as usize;
        if !self.mark[iu] {
            self.mark[iu] = true;
            self.touched.push(i);
        }
        self.vals[iu] = (self.vals[iu] + a) % self.p;
    }

    pub fn add_scaled(&mut self, a: u64, v: &[(u32, u32)]) {
        if a.is_multiple_of(self.p) {
            return;
        }
        for &(i, x) in v {
            self.add(i, mul_mod(a, x as u64, self.p));
        }
    }

    pub fn drain(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            let iu = i as usize;
            if self.vals[iu] != 0 {
                out.push((i, self.vals[iu] as u32));
            }
            self.vals[iu] = 0;
            self.mark[iu] = false;
        }
        self.touched.clear();
        out
    }
}
