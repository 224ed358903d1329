//! Chevalley bases of the classical Lie algebras with exact structure
//! constants, the restricted `[p]`-map on basis elements, and subalgebra
//! closure checks.
//!
//! Structure constants are normalised by extraspecial pairs: every positive
//! non-simple root `ξ` gets the pair `(α, ξ−α)` with `α` the first simple root
//! (canonical order) such that `ξ−α` is a root, and `N_{α,ξ−α} = +(q+1)`.
//! Negative root vectors follow from the Chevalley involution. The constants
//! are read off a faithful matrix realisation (`sl`, `so`, `sp`), so the
//! resulting table is the one fixed by those extraspecial signs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{is_prime, Overflow, Ring};
use crate::linalg::{Echelon, Field, PrimeField, Rationals};
use crate::roots::{cartan_integer, Family, Root, RootSystem, RootsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChevalleyError {
    #[error("characteristic {0} is not allowed (need 0 or a prime >= 7; smaller odd primes need the override)")]
    BadCharacteristic(u64),
    #[error("elements belong to different algebras")]
    MixedAlgebras,
    #[error("element has a nonzero root-vector component and is not in the Cartan subalgebra")]
    NotCartanElement,
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Overflow(#[from] Overflow),
}

/// Identity of a constructed algebra; elements remember where they came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgId(u64);

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisKind {
    RootVector(Root),
    /// `h_{α_i}` for the `i`-th simple root (0-based).
    SimpleCoroot(usize),
}

/// Element of `L` as a sparse coefficient map over basis positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieElement {
    alg: AlgId,
    terms: BTreeMap<usize, i64>,
}

impl LieElement {
    pub fn algebra(&self) -> AlgId {
        self.alg
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn coefficient(&self, idx: usize) -> i64 {
        self.terms.get(&idx).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> Vec<usize> {
        self.terms.keys().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closure {
    Closed,
    /// `[span[i], span[j]]` leaves the span.
    NotClosed {
        left: usize,
        right: usize,
        bracket: LieElement,
    },
}

type Rat = Ratio<i64>;
type Mat = Vec<Vec<Rat>>;

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    id: AlgId,
    rs: RootSystem,
    ring: Ring,
    small_characteristic: bool,
    basis: Vec<BasisKind>,
    /// Integer structure constants: `table[a][b] = [b_a, b_b]`.
    int_table: Vec<Vec<Vec<(usize, i64)>>>,
    /// Same table reduced into `ring`.
    table: Vec<Vec<Vec<(usize, i64)>>>,
    realization: Vec<Mat>,
}

impl LieAlgebra {
    /// Build the Chevalley basis over `Z` (`p = 0`) or `F_p` (`p >= 7`).
    pub fn build(rs: &RootSystem, p: u64) -> Result<Self, ChevalleyError> {
        Self::build_with_override(rs, p, false)
    }

    /// As [`LieAlgebra::build`]; `allow_small_p` admits odd primes below 7
    /// (flagged on the algebra) for sl₂ experiments.
    pub fn build_with_override(rs: &RootSystem, p: u64, allow_small_p: bool) -> Result<Self, ChevalleyError> {
        let small = p != 0 && p < 7;
        if p != 0 && (!is_prime(p) || p == 2 || (small && !allow_small_p)) {
            return Err(ChevalleyError::BadCharacteristic(p));
        }
        let ring = if p == 0 { Ring::integers() } else { Ring::modulo(p) };

        let l = rs.rank();
        let mut basis = Vec::new();
        for r in rs.negative_roots() {
            basis.push(BasisKind::RootVector(r.clone()));
        }
        for i in 0..l {
            basis.push(BasisKind::SimpleCoroot(i));
        }
        for r in rs.positive_roots() {
            basis.push(BasisKind::RootVector(r.clone()));
        }

        let realization = realize(rs);
        let int_table = structure_table(rs, &basis, &realization);
        let table = int_table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|entry| {
                        entry
                            .iter()
                            .map(|&(k, c)| (k, ring.normalize(c)))
                            .filter(|&(_, c)| c != 0)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(LieAlgebra {
            id: AlgId(NEXT_ID.fetch_add(1, Ordering::Relaxed)),
            rs: rs.clone(),
            ring,
            small_characteristic: small,
            basis,
            int_table,
            table,
            realization,
        })
    }

    pub fn id(&self) -> AlgId {
        self.id
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn characteristic(&self) -> u64 {
        self.ring.characteristic()
    }

    /// Set when an odd prime below 7 was admitted by override.
    pub fn small_characteristic(&self) -> bool {
        self.small_characteristic
    }

    /// `n = 2m + l`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn rank(&self) -> usize {
        self.rs.rank()
    }

    pub fn num_positive(&self) -> usize {
        self.rs.num_positive()
    }

    pub fn basis(&self) -> &[BasisKind] {
        &self.basis
    }

    pub fn kind(&self, idx: usize) -> &BasisKind {
        &self.basis[idx]
    }

    /// Position of the first simple coroot.
    pub fn coroot_offset(&self) -> usize {
        self.rs.num_positive()
    }

    pub fn coroot_index(&self, i: usize) -> usize {
        self.coroot_offset() + i
    }

    pub fn is_coroot(&self, idx: usize) -> bool {
        matches!(self.basis[idx], BasisKind::SimpleCoroot(_))
    }

    pub fn is_negative(&self, idx: usize) -> bool {
        idx < self.coroot_offset()
    }

    pub fn is_positive(&self, idx: usize) -> bool {
        idx >= self.coroot_offset() + self.rank()
    }

    pub fn root_vector_index(&self, r: &Root) -> Result<usize, ChevalleyError> {
        let pos = self
            .rs
            .index_of(r)
            .ok_or_else(|| RootsError::RootNotInSystem(r.clone()))?;
        let m = self.rs.num_positive();
        Ok(if pos < m { pos } else { pos + self.rank() })
    }

    /// Root of a root-vector index, `None` for coroots.
    pub fn root_of(&self, idx: usize) -> Option<&Root> {
        match &self.basis[idx] {
            BasisKind::RootVector(r) => Some(r),
            BasisKind::SimpleCoroot(_) => None,
        }
    }

    /// Weight of a basis element (zero for coroots).
    pub fn weight_of(&self, idx: usize) -> Root {
        match &self.basis[idx] {
            BasisKind::RootVector(r) => r.clone(),
            BasisKind::SimpleCoroot(_) => Root::zero(self.rs.ambient_dim()),
        }
    }

    /// Printable label: `x(+e1-e2)` or `h(e1-e2)`.
    pub fn label(&self, idx: usize) -> String {
        match &self.basis[idx] {
            BasisKind::RootVector(r) => format!("x({})", r.label()),
            BasisKind::SimpleCoroot(i) => {
                let lab = self.rs.base()[*i].label();
                format!("h({})", lab.strip_prefix('+').unwrap_or(&lab))
            }
        }
    }

    /// `α(h_i) = ⟨α, α_i∨⟩`: eigenvalue of `ad h_i` on the weight `α`.
    pub fn coroot_pairing(&self, weight: &Root, i: usize) -> i64 {
        cartan_integer(weight, &self.rs.base()[i])
    }

    // -- elements ---------------------------------------------------------

    pub fn zero(&self) -> LieElement {
        LieElement {
            alg: self.id,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis_element(&self, idx: usize) -> LieElement {
        assert!(idx < self.dim());
        self.element(&[(idx, 1)])
    }

    pub fn element(&self, terms: &[(usize, i64)]) -> LieElement {
        let mut e = self.zero();
        for &(k, c) in terms {
            assert!(k < self.dim());
            let cur = e.terms.get(&k).copied().unwrap_or(0);
            let v = self
                .ring
                .add(cur, self.ring.normalize(c))
                .expect("coefficient overflow");
            if v == 0 {
                e.terms.remove(&k);
            } else {
                e.terms.insert(k, v);
            }
        }
        e
    }

    pub fn root_vector(&self, r: &Root) -> Result<LieElement, ChevalleyError> {
        Ok(self.basis_element(self.root_vector_index(r)?))
    }

    fn same(&self, u: &LieElement) -> Result<(), ChevalleyError> {
        if u.alg == self.id {
            Ok(())
        } else {
            Err(ChevalleyError::MixedAlgebras)
        }
    }

    pub fn add(&self, u: &LieElement, v: &LieElement) -> Result<LieElement, ChevalleyError> {
        self.combine(1, u, 1, v)
    }

    pub fn sub(&self, u: &LieElement, v: &LieElement) -> Result<LieElement, ChevalleyError> {
        self.combine(1, u, -1, v)
    }

    pub fn scale(&self, c: i64, u: &LieElement) -> Result<LieElement, ChevalleyError> {
        self.combine(c, u, 0, &self.zero())
    }

    /// `a*u + b*v`
    pub fn combine(&self, a: i64, u: &LieElement, b: i64, v: &LieElement) -> Result<LieElement, ChevalleyError> {
        self.same(u)?;
        self.same(v)?;
        let r = self.ring;
        let mut out = self.zero();
        for (k, c) in u.terms() {
            acc(&mut out.terms, k, r.mul(r.normalize(a), c)?, r)?;
        }
        for (k, c) in v.terms() {
            acc(&mut out.terms, k, r.mul(r.normalize(b), c)?, r)?;
        }
        Ok(out)
    }

    /// Bilinear extension of the bracket table.
    pub fn bracket(&self, u: &LieElement, v: &LieElement) -> Result<LieElement, ChevalleyError> {
        self.same(u)?;
        self.same(v)?;
        let r = self.ring;
        let mut out = self.zero();
        for (a, ca) in u.terms() {
            for (b, cb) in v.terms() {
                let c = r.mul(ca, cb)?;
                for &(k, t) in &self.table[a][b] {
                    acc(&mut out.terms, k, r.mul(c, t)?, r)?;
                }
            }
        }
        Ok(out)
    }

    /// `[b_a, b_b]` for basis positions, reduced into the ring.
    pub fn bracket_basis(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a][b]
    }

    /// Integer structure constants before reduction.
    pub fn integer_bracket_basis(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.int_table[a][b]
    }

    /// `h_α` as a combination of simple coroots, read from `[x_α, x_{−α}]`.
    pub fn coroot_expand(&self, alpha: &Root) -> Result<LieElement, ChevalleyError> {
        let a = self.root_vector_index(alpha)?;
        let b = self.root_vector_index(&alpha.neg())?;
        let mut e = self.zero();
        for &(k, c) in &self.table[a][b] {
            e.terms.insert(k, c);
        }
        Ok(e)
    }

    /// Restricted `[p]`-map on the basis: `x_α ↦ 0`, `h ↦ h`.
    pub fn p_map(&self, idx: usize) -> LieElement {
        if self.is_coroot(idx) {
            self.basis_element(idx)
        } else {
            self.zero()
        }
    }

    /// Matrix of `ad(b_idx)` on `L` in the ring, `m[row][col]`.
    pub fn ad_matrix(&self, idx: usize) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut m = vec![vec![0; n]; n];
        for (col, row_entries) in self.table[idx].iter().enumerate() {
            for &(k, c) in row_entries {
                m[k][col] = c;
            }
        }
        m
    }

    /// Matrices of the basis elements in the defining (matrix) realisation.
    pub fn natural_matrices(&self) -> &[Vec<Vec<Ratio<i64>>>] {
        &self.realization
    }

    /// Linear-span closure test under the bracket.
    pub fn check_subalgebra(&self, span: &[LieElement]) -> Result<Closure, ChevalleyError> {
        for u in span {
            self.same(u)?;
        }
        if self.ring.is_modular() {
            self.closure_in(
                PrimeField {
                    p: self.characteristic(),
                },
                span,
            )
        } else {
            self.closure_in(Rationals, span)
        }
    }

    fn closure_in<F: Field + Clone>(&self, field: F, span: &[LieElement]) -> Result<Closure, ChevalleyError> {
        let n = self.dim();
        let to_vec = |u: &LieElement| {
            let mut v = vec![field.zero(); n];
            for (k, c) in u.terms() {
                v[k] = field.from_i64(c);
            }
            v
        };
        let mut ech = Echelon::new(field.clone());
        for u in span {
            ech.insert(&to_vec(u));
        }
        for i in 0..span.len() {
            for j in (i + 1)..span.len() {
                let br = self.bracket(&span[i], &span[j])?;
                if !ech.contains(&to_vec(&br)) {
                    return Ok(Closure::NotClosed {
                        left: i,
                        right: j,
                        bracket: br,
                    });
                }
            }
        }
        Ok(Closure::Closed)
    }

    /// The span `L_sub + F·h_extra` and its closure verdict.
    pub fn extend_by_cartan(
        &self,
        sub: &[LieElement],
        h_extra: &LieElement,
    ) -> Result<(Vec<LieElement>, Closure), ChevalleyError> {
        self.same(h_extra)?;
        if h_extra.terms().any(|(k, _)| !self.is_coroot(k)) {
            return Err(ChevalleyError::NotCartanElement);
        }
        let mut span = sub.to_vec();
        span.push(h_extra.clone());
        let verdict = self.check_subalgebra(&span)?;
        Ok((span, verdict))
    }

    /// Deterministic text table of all nonzero `[b_a, b_b]`, `a < b`, with
    /// integer (characteristic-zero) constants.
    pub fn structure_table_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# {}{} structure constants over Z, dim {}",
            self.rs.family(),
            self.rank(),
            self.dim()
        );
        for a in 0..self.dim() {
            for b in (a + 1)..self.dim() {
                let entry = &self.int_table[a][b];
                if entry.is_empty() {
                    continue;
                }
                let rhs: Vec<String> = entry.iter().map(|&(k, c)| format!("{} {}", c, self.label(k))).collect();
                let _ = writeln!(s, "[{}, {}] = {}", self.label(a), self.label(b), rhs.join(" + "));
            }
        }
        s
    }
}

fn acc(terms: &mut BTreeMap<usize, i64>, k: usize, c: i64, r: Ring) -> Result<(), Overflow> {
    if c == 0 {
        return Ok(());
    }
    let cur = terms.get(&k).copied().unwrap_or(0);
    let v = r.add(cur, c)?;
    if v == 0 {
        terms.remove(&k);
    } else {
        terms.insert(k, v);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// matrix realisation

fn mat_zero(n: usize) -> Mat {
    vec![vec![Rat::from_integer(0); n]; n]
}

fn unit(n: usize, i: usize, j: usize, c: i64) -> Mat {
    let mut m = mat_zero(n);
    m[i - 1][j - 1] = Rat::from_integer(c);
    m
}

fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn mat_scale(a: &Mat, c: Rat) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = mat_zero(n);
    for i in 0..n {
        for k in 0..n {
            if *a[i][k].numer() == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

fn mat_bracket(a: &Mat, b: &Mat) -> Mat {
    mat_add(&mat_mul(a, b), &mat_scale(&mat_mul(b, a), Rat::from_integer(-1)))
}

fn mat_is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|x| *x.numer() == 0))
}

/// Chevalley generators `(e_i, f_i)` in the defining representation.
fn generators(family: Family, l: usize) -> Vec<(Mat, Mat)> {
    let mut out = Vec::new();
    match family {
        Family::A => {
            let n = l + 1;
            for i in 1..=l {
                out.push((unit(n, i, i + 1, 1), unit(n, i + 1, i, 1)));
            }
        }
        Family::B | Family::C | Family::D => {
            let n = if family == Family::B { 2 * l + 1 } else { 2 * l };
            for i in 1..l {
                let e = mat_add(&unit(n, i, i + 1, 1), &unit(n, l + i + 1, l + i, -1));
                let f = mat_add(&unit(n, i + 1, i, 1), &unit(n, l + i, l + i + 1, -1));
                out.push((e, f));
            }
            let last = match family {
                // ε_l: rows 1..l carry ε_i, rows l+1..2l carry −ε_i, row 2l+1 weight 0
                Family::B => (
                    mat_add(&unit(n, l, n, 2), &unit(n, n, 2 * l, -2)),
                    mat_add(&unit(n, n, l, 1), &unit(n, 2 * l, n, -1)),
                ),
                Family::C => (unit(n, l, 2 * l, 1), unit(n, 2 * l, l, 1)),
                _ => (
                    mat_add(&unit(n, l - 1, 2 * l, 1), &unit(n, l, 2 * l - 1, -1)),
                    mat_add(&unit(n, 2 * l, l - 1, 1), &unit(n, 2 * l - 1, l, -1)),
                ),
            };
            out.push(last);
        }
    }
    out
}

/// Matrices for every basis element, in basis order.
fn realize(rs: &RootSystem) -> Vec<Mat> {
    let l = rs.rank();
    let gens = generators(rs.family(), l);
    let mut pos: BTreeMap<Root, Mat> = BTreeMap::new();
    let mut neg: BTreeMap<Root, Mat> = BTreeMap::new();
    for (i, (e, f)) in gens.iter().enumerate() {
        pos.insert(rs.base()[i].clone(), e.clone());
        neg.insert(rs.base()[i].clone(), f.clone());
    }
    // positive roots in canonical (height-increasing) order
    for xi in rs.positive_roots() {
        if pos.contains_key(xi) {
            continue;
        }
        let mut simples: Vec<&Root> = rs.base().iter().collect();
        simples.sort_by_key(|r| rs.index_of(r));
        let alpha = simples
            .into_iter()
            .find(|a| rs.contains(&xi.minus(a)))
            .expect("non-simple positive root has a simple predecessor");
        let beta = xi.minus(alpha);
        let (q, _) = rs.root_string(&beta, alpha);
        let k = Rat::from_integer(q as i64 + 1);
        let xp = mat_scale(&mat_bracket(&pos[alpha], &pos[&beta]), k.recip());
        let xn = mat_scale(&mat_bracket(&neg[alpha], &neg[&beta]), -k.recip());
        assert!(!mat_is_zero(&xp) && !mat_is_zero(&xn), "degenerate realisation at {xi}");
        pos.insert(xi.clone(), xp);
        neg.insert(xi.clone(), xn);
    }
    let mut out = Vec::new();
    for r in rs.negative_roots() {
        out.push(neg[&r.neg()].clone());
    }
    for (e, f) in &gens {
        out.push(mat_bracket(e, f));
    }
    for r in rs.positive_roots() {
        out.push(pos[r].clone());
    }
    out
}

fn structure_table(rs: &RootSystem, basis: &[BasisKind], mats: &[Mat]) -> Vec<Vec<Vec<(usize, i64)>>> {
    let n = basis.len();
    let l = rs.rank();
    let m = rs.num_positive();
    let weight = |k: usize| match &basis[k] {
        BasisKind::RootVector(r) => r.clone(),
        BasisKind::SimpleCoroot(_) => Root::zero(rs.ambient_dim()),
    };
    let index_of_root = |r: &Root| {
        let pos = rs.index_of(r).unwrap();
        if pos < m {
            pos
        } else {
            pos + l
        }
    };
    let mut table = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let br = mat_bracket(&mats[a], &mats[b]);
            if mat_is_zero(&br) {
                continue;
            }
            let w = weight(a).plus(&weight(b));
            let entry = if w.is_zero() {
                decompose_cartan(&br, &mats[m..m + l])
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| *c != 0)
                    .map(|(i, c)| (m + i, c))
                    .collect()
            } else {
                assert!(rs.contains(&w), "bracket of weight {w} is not a root");
                let k = index_of_root(&w);
                let c = proportionality(&br, &mats[k]);
                assert!(c.is_integer(), "non-integral structure constant");
                vec![(k, c.to_integer())]
            };
            table[a][b] = entry;
        }
    }
    table
}

fn proportionality(m: &Mat, x: &Mat) -> Rat {
    let n = m.len();
    let (i, j) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| *x[i][j].numer() != 0)
        .unwrap();
    let c = m[i][j] / x[i][j];
    assert_eq!(&mat_scale(x, c), m, "bracket is not a multiple of the root vector");
    c
}

/// Solve `m = Σ c_i h_i` over `Q` using the diagonal entries.
fn decompose_cartan(m: &Mat, hs: &[Mat]) -> Vec<i64> {
    let n = m.len();
    let l = hs.len();
    // columns h_i, target m: augmented rows over the diagonal coordinates
    let q = Rationals;
    let rows: Vec<Vec<Rat128>> = (0..n)
        .map(|d| {
            let mut row: Vec<Rat128> = hs.iter().map(|h| to128(h[d][d])).collect();
            row.push(to128(m[d][d]));
            row
        })
        .collect();
    let red = crate::linalg::rref(&q, rows);
    let mut sol = vec![0i64; l];
    for r in &red {
        let piv = r.iter().position(|x| *x.numer() != 0).unwrap();
        assert!(piv < l, "inconsistent Cartan decomposition");
        let v = r[l];
        assert!(v.is_integer());
        sol[piv] = *v.numer() as i64;
    }
    let mut check = mat_zero(n);
    for (c, h) in sol.iter().zip(hs) {
        check = mat_add(&check, &mat_scale(h, Rat::from_integer(*c)));
    }
    assert_eq!(&check, m, "bracket is not in the Cartan subalgebra");
    sol
}

type Rat128 = Ratio<i128>;

fn to128(x: Rat) -> Rat128 {
    Rat128::new(*x.numer() as i128, *x.denom() as i128)
}
