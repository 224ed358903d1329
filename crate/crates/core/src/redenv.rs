//! Reduced enveloping algebras `U_χ(L)` and their explicit modules over `F_p`.
//!
//! The baby Verma module `Z_χ(λ) = U_χ(L) ⊗_{U_χ(b)} F_λ` has the restricted
//! monomials `x_{−β_1}^{a_1} ⋯ x_{−β_m}^{a_m} v`, `0 ≤ a_i < p`, as basis.
//! Generator matrices are built column by column: a basis element acting on
//! a basis monomial is straightened inside the module,
//!
//! ```text
//! g · x_k M' v = x_k (g · M' v) + [g, x_k] · M' v
//! ```
//!
//! with `x_k^p ↦ χ(x_k)^p`, positive root vectors killing `v` and coroots
//! acting on `v` by `λ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chevalley::{AlgId, LieAlgebra};
use crate::field::{inv_mod, mul_mod, pow_mod, residue};
use crate::linalg::{axpy, sparse_scale, Echelon, PrimeField, SparseEchelon, SparseMatrix, SparseVec};
use crate::pbw::{Enveloping, Monomial, UEElement};

/// Largest module dimension the baby Verma builder accepts.
pub const MAX_VERMA_DIM: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RedEnvError {
    #[error("element is not over F_p (characteristic-zero or different modulus)")]
    NotModP,
    #[error("character is not in standard form: nonzero on positive root vector {0}")]
    NonStandardCharacter(String),
    #[error("weight is incompatible with the character at coroot {label}: λ^p − λ ≠ χ(h)^p")]
    IncompatibleWeight { coroot: usize, label: String },
    #[error("elements belong to different algebras")]
    MixedAlgebras,
    #[error("module dimension {0} exceeds the supported maximum")]
    TooLarge(u128),
    #[error("character has {got} values, algebra has dimension {want}")]
    ArityMismatch { got: usize, want: usize },
}

/// A linear functional `χ` on `L`, given on the Chevalley basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Character {
    p: u64,
    values: Vec<u64>,
}

impl Character {
    pub fn zero(alg: &LieAlgebra) -> Self {
        Character {
            p: alg.characteristic(),
            values: vec![0; alg.dim()],
        }
    }

    /// `χ(b_idx) = value` for the listed basis positions, zero elsewhere.
    pub fn from_pairs(alg: &LieAlgebra, pairs: &[(usize, i64)]) -> Self {
        let mut c = Self::zero(alg);
        for &(i, v) in pairs {
            c.values[i] = residue(v, c.p);
        }
        c
    }

    pub fn value(&self, idx: usize) -> u64 {
        self.values[idx]
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// `χ(x_α) = 0` for every positive root `α`.
    pub fn is_standard(&self, alg: &LieAlgebra) -> bool {
        (0..alg.dim()).all(|i| !alg.is_positive(i) || self.values[i] == 0)
    }
}

/// Element of `U_χ(L)` with every exponent below `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedElement(UEElement);

impl ReducedElement {
    pub fn as_element(&self) -> &UEElement {
        &self.0
    }

    pub fn into_element(self) -> UEElement {
        self.0
    }
}

/// Rewrite `x^p ↦ x^{[p]} + χ(x)^p` on every basis factor until all exponents
/// are below `p`. The rewritten factors are central, so the result stays in
/// normal form.
pub fn reduce(env: &Enveloping<'_>, u: &UEElement, chi: &Character) -> Result<ReducedElement, RedEnvError> {
    let alg = env.algebra();
    let p = alg.characteristic();
    if p == 0 || u.ring().characteristic() != p || chi.p != p {
        return Err(RedEnvError::NotModP);
    }
    if u.algebra() != alg.id() {
        return Err(RedEnvError::MixedAlgebras);
    }
    let mut out = env.zero();
    for (m, c) in u.terms() {
        let mut partial: Vec<(Monomial, u64)> = vec![(m.clone(), residue(c, p))];
        for (idx, e) in m.factors() {
            if (e as u64) < p {
                continue;
            }
            let chip = pow_mod(chi.value(idx), p, p);
            let poly = if alg.is_coroot(idx) {
                reduce_toral_power(e as u64, chip, p)
            } else {
                // x^{[p]} = 0: x^e = χ(x)^{p⌊e/p⌋} x^{e mod p}
                let q = e as u64 / p;
                vec![((e as u64 % p) as u32, pow_mod(chip, q, p))]
            };
            let mut next = Vec::new();
            for (mon, cc) in &partial {
                for &(e2, c2) in &poly {
                    if c2 != 0 {
                        next.push((mon.with_exponent(idx, e2), mul_mod(*cc, c2, p)));
                    }
                }
            }
            partial = next;
        }
        for (mon, cc) in partial {
            out = env
                .add(&out, &env.monomial(mon, cc as i64))
                .map_err(|_| RedEnvError::MixedAlgebras)?;
        }
    }
    Ok(ReducedElement(out))
}

/// `h^e` modulo `h^p − h − s` as `(exponent, coefficient)` pairs, exponents `< p`.
fn reduce_toral_power(e: u64, s: u64, p: u64) -> Vec<(u32, u64)> {
    let mut coeffs: BTreeMap<u64, u64> = BTreeMap::new();
    coeffs.insert(e, 1);
    while let Some((&top, &c)) = coeffs.iter().next_back() {
        if top < p {
            break;
        }
        coeffs.remove(&top);
        *coeffs.entry(top - p + 1).or_default() += c;
        *coeffs.entry(top - p).or_default() += mul_mod(c, s, p);
        for v in coeffs.values_mut() {
            *v %= p;
        }
    }
    coeffs
        .into_iter()
        .filter(|&(_, c)| c != 0)
        .map(|(k, c)| (k as u32, c))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepKind {
    BabyVerma,
    Adjoint,
    Natural,
}

/// Explicit representation `ρ: L → gl(V)` over `F_p`.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    alg: AlgId,
    kind: RepKind,
    p: u64,
    dim: usize,
    generators: Vec<SparseMatrix>,
    chi: Character,
    lambda: Option<Vec<u64>>,
}

impl MatrixRep {
    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn algebra(&self) -> AlgId {
        self.alg
    }

    pub fn generator(&self, idx: usize) -> &SparseMatrix {
        &self.generators[idx]
    }

    pub fn generators(&self) -> &[SparseMatrix] {
        &self.generators
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    pub fn lambda(&self) -> Option<&[u64]> {
        self.lambda.as_deref()
    }

    /// Adjoint representation (`χ = 0`).
    pub fn adjoint(alg: &LieAlgebra) -> Result<Self, RedEnvError> {
        let p = alg.characteristic();
        if p == 0 {
            return Err(RedEnvError::NotModP);
        }
        let generators = (0..alg.dim())
            .map(|i| {
                let m: Vec<Vec<u64>> = alg
                    .ad_matrix(i)
                    .into_iter()
                    .map(|r| r.into_iter().map(|c| residue(c, p)).collect())
                    .collect();
                SparseMatrix::from_dense(p, &m)
            })
            .collect();
        Ok(MatrixRep {
            alg: alg.id(),
            kind: RepKind::Adjoint,
            p,
            dim: alg.dim(),
            generators,
            chi: Character::zero(alg),
            lambda: None,
        })
    }

    /// Defining matrix representation (`χ = 0`).
    pub fn natural(alg: &LieAlgebra) -> Result<Self, RedEnvError> {
        let p = alg.characteristic();
        if p == 0 {
            return Err(RedEnvError::NotModP);
        }
        let mats = alg.natural_matrices();
        let dim = mats[0].len();
        let generators = mats
            .iter()
            .map(|m| {
                let dense: Vec<Vec<u64>> = m
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|x| {
                                let num = residue(*x.numer(), p);
                                let den = inv_mod(residue(*x.denom(), p), p).expect("denominator prime to p");
                                mul_mod(num, den, p)
                            })
                            .collect()
                    })
                    .collect();
                SparseMatrix::from_dense(p, &dense)
            })
            .collect();
        Ok(MatrixRep {
            alg: alg.id(),
            kind: RepKind::Natural,
            p,
            dim,
            generators,
            chi: Character::zero(alg),
            lambda: None,
        })
    }

    /// Plain-text export: header `dim p`, then `label row col value` lines.
    pub fn export_text(&self, alg: &LieAlgebra) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.dim, self.p);
        for (g, m) in self.generators.iter().enumerate() {
            for (col, entries) in m.columns().iter().enumerate() {
                for &(row, v) in entries {
                    let _ = writeln!(s, "{} {} {} {}", alg.label(g), row, col, v);
                }
            }
        }
        s
    }

    /// Basis pairs `(a, b)` with `ρ([b_a,b_b]) ≠ [ρ(b_a), ρ(b_b)]`.
    pub fn bracket_failures(&self, alg: &LieAlgebra) -> Vec<(usize, usize)> {
        let n = alg.dim();
        let mut bad = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                let lhs = self.generators[a].commutator(&self.generators[b]);
                let mut rhs = SparseMatrix::zero(self.dim, self.dim, self.p);
                for &(k, c) in alg.bracket_basis(a, b) {
                    rhs = rhs.add_scaled(residue(c, self.p), &self.generators[k]);
                }
                if lhs != rhs {
                    bad.push((a, b));
                }
            }
        }
        bad
    }

    /// Basis elements violating `ρ(x)^p − ρ(x^{[p]}) = χ(x)^p · I`.
    pub fn restrictedness_failures(&self, alg: &LieAlgebra) -> Vec<usize> {
        let p = self.p;
        (0..alg.dim())
            .filter(|&i| {
                let pw = self.generators[i].pow(p);
                let mut rhs = SparseMatrix::scalar(self.dim, p, pow_mod(self.chi.value(i), p, p));
                for (k, c) in alg.p_map(i).terms() {
                    rhs = rhs.add_scaled(residue(c, p), &self.generators[k]);
                }
                pw != rhs
            })
            .collect()
    }
}

/// Solutions `λ ∈ F_p` of `λ^p − λ = χ(h_i)^p` for every simple coroot.
pub fn compatible_weights(alg: &LieAlgebra, chi: &Character) -> Vec<Vec<u64>> {
    let p = alg.characteristic();
    (0..alg.rank())
        .map(|i| {
            let target = pow_mod(chi.value(alg.coroot_index(i)), p, p);
            (0..p)
                .filter(|&lam| (pow_mod(lam, p, p) + p - lam) % p == target)
                .collect()
        })
        .collect()
}

/// Induce the one-dimensional `U_χ(b)`-module `F_λ` to `U_χ(L)`.
pub fn baby_verma(alg: &LieAlgebra, chi: &Character, lambda: &[u64]) -> Result<MatrixRep, RedEnvError> {
    let p = alg.characteristic();
    if p == 0 || chi.p != p {
        return Err(RedEnvError::NotModP);
    }
    if chi.values.len() != alg.dim() {
        return Err(RedEnvError::ArityMismatch {
            got: chi.values.len(),
            want: alg.dim(),
        });
    }
    if lambda.len() != alg.rank() {
        return Err(RedEnvError::ArityMismatch {
            got: lambda.len(),
            want: alg.rank(),
        });
    }
    if let Some(i) = (0..alg.dim()).find(|&i| alg.is_positive(i) && chi.value(i) != 0) {
        return Err(RedEnvError::NonStandardCharacter(alg.label(i)));
    }
    for (i, &lam) in lambda.iter().enumerate() {
        let h = alg.coroot_index(i);
        let lhs = (pow_mod(lam % p, p, p) + p - lam % p) % p;
        if lhs != pow_mod(chi.value(h), p, p) {
            return Err(RedEnvError::IncompatibleWeight {
                coroot: i,
                label: alg.label(h),
            });
        }
    }
    let m = alg.num_positive();
    let dim = (p as u128).pow(m as u32);
    if dim > MAX_VERMA_DIM as u128 {
        return Err(RedEnvError::TooLarge(dim));
    }
    let mut builder = VermaBuilder::new(alg, chi, lambda, dim as usize);
    let generators = (0..alg.dim())
        .map(|g| {
            let cols = (0..builder.dim).map(|idx| builder.act(g, idx)).collect();
            SparseMatrix::from_columns(builder.dim, p, cols)
        })
        .collect();
    Ok(MatrixRep {
        alg: alg.id(),
        kind: RepKind::BabyVerma,
        p,
        dim: dim as usize,
        generators,
        chi: chi.clone(),
        lambda: Some(lambda.iter().map(|&l| l % p).collect()),
    })
}

/// Exponent vector of the `idx`-th baby Verma basis monomial (most
/// significant digit first, matching the PBW order of negative roots).
pub fn verma_exponents(p: u64, m: usize, mut idx: usize) -> Vec<u32> {
    let mut out = vec![0; m];
    for k in (0..m).rev() {
        out[k] = (idx as u64 % p) as u32;
        idx /= p as usize;
    }
    out
}

struct VermaBuilder<'a> {
    alg: &'a LieAlgebra,
    p: u64,
    m: usize,
    dim: usize,
    chi: &'a Character,
    lambda: &'a [u64],
    /// `place[k] = p^{m-1-k}`
    place: Vec<usize>,
    memo: Vec<Vec<Option<SparseVec>>>,
}

impl<'a> VermaBuilder<'a> {
    fn new(alg: &'a LieAlgebra, chi: &'a Character, lambda: &'a [u64], dim: usize) -> Self {
        let p = alg.characteristic();
        let m = alg.num_positive();
        let place = (0..m).map(|k| (p as usize).pow((m - 1 - k) as u32)).collect();
        VermaBuilder {
            alg,
            p,
            m,
            dim,
            chi,
            lambda,
            place,
            memo: vec![vec![None; dim]; alg.dim()],
        }
    }

    fn digit(&self, idx: usize, k: usize) -> u64 {
        ((idx / self.place[k]) % self.p as usize) as u64
    }

    /// `b_g` applied to basis vector `idx`.
    fn act(&mut self, g: usize, idx: usize) -> SparseVec {
        if let Some(v) = &self.memo[g][idx] {
            return v.clone();
        }
        let v = self.compute(g, idx);
        self.memo[g][idx] = Some(v.clone());
        v
    }

    fn compute(&mut self, g: usize, idx: usize) -> SparseVec {
        let p = self.p;
        let alg = self.alg;
        if alg.is_coroot(g) {
            let i = g - alg.coroot_offset();
            let mut s = self.lambda[i] as i64;
            for k in 0..self.m {
                let a = self.digit(idx, k) as i64;
                if a != 0 {
                    s += a * alg.coroot_pairing(&alg.weight_of(k), i);
                }
            }
            let s = residue(s, p);
            return if s == 0 {
                Vec::new()
            } else {
                vec![(idx as u32, s as u32)]
            };
        }
        let first = (0..self.m).find(|&k| self.digit(idx, k) != 0);
        let Some(k) = first else {
            // highest weight vector
            return if alg.is_negative(g) {
                vec![(self.place[g] as u32, 1)]
            } else {
                Vec::new()
            };
        };
        if alg.is_negative(g) && g <= k {
            let a = self.digit(idx, g);
            if a + 1 < p {
                return vec![((idx + self.place[g]) as u32, 1)];
            }
            // x_g^p = χ(x_g)^p
            let c = pow_mod(self.chi.value(g), p, p);
            let j = idx - (a as usize) * self.place[g];
            return if c == 0 { Vec::new() } else { vec![(j as u32, c as u32)] };
        }
        let rest = idx - self.place[k];
        let mut out: SparseVec = Vec::new();
        let inner = self.act(g, rest);
        for (j, c) in inner {
            let w = self.act(k, j as usize);
            out = axpy(p, c as u64, &w, &out);
        }
        let bracket: Vec<(usize, i64)> = alg.bracket_basis(g, k).to_vec();
        for (t, c) in bracket {
            let w = self.act(t, rest);
            out = axpy(p, residue(c, p), &w, &out);
        }
        out
    }
}

/// Image of `u` under the algebra homomorphism `U(L) → End(V)`.
pub fn evaluate(u: &UEElement, rep: &MatrixRep) -> Result<SparseMatrix, RedEnvError> {
    if u.algebra() != rep.alg {
        return Err(RedEnvError::MixedAlgebras);
    }
    if u.ring().characteristic() != rep.p {
        return Err(RedEnvError::NotModP);
    }
    let p = rep.p;
    let mut powers: HashMap<(usize, u32), SparseMatrix> = HashMap::new();
    let mut out = SparseMatrix::zero(rep.dim, rep.dim, p);
    for (m, c) in u.terms() {
        let mut acc: Option<SparseMatrix> = None;
        for (i, e) in m.factors() {
            let pw = powers
                .entry((i, e))
                .or_insert_with(|| rep.generators[i].pow(e as u64))
                .clone();
            acc = Some(match acc {
                None => pw,
                Some(a) => a.mul(&pw),
            });
        }
        let term = acc.unwrap_or_else(|| SparseMatrix::identity(rep.dim, p));
        out = out.add_scaled(residue(c, p), &term);
    }
    Ok(out)
}

/// Full rank of `evaluate(u)`.
pub fn invertible_in_rep(u: &UEElement, rep: &MatrixRep) -> Result<bool, RedEnvError> {
    Ok(evaluate(u, rep)?.is_invertible())
}

/// Values `c ∈ F_p` for which `c + u` acts singularly.
pub fn singular_shifts(u: &UEElement, rep: &MatrixRep) -> Result<Vec<u64>, RedEnvError> {
    let base = evaluate(u, rep)?;
    let p = rep.p;
    Ok((0..p)
        .filter(|&c| !base.add(&SparseMatrix::scalar(rep.dim, p, c)).is_invertible())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Irreducibility {
    Irreducible,
    /// Basis of a proper nonzero invariant subspace.
    Submodule(Vec<SparseVec>),
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IrreducibilityOptions {
    /// Up to this dimension the Burnside span test decides.
    pub burnside_max_dim: usize,
    /// Randomised submodule-search trials above that dimension.
    pub trials: usize,
    pub seed: u64,
}

impl Default for IrreducibilityOptions {
    fn default() -> Self {
        IrreducibilityOptions {
            burnside_max_dim: 64,
            trials: 50,
            seed: 0,
        }
    }
}

/// Smallest invariant subspace containing `v`, as an echelon basis.
pub fn spin(rep: &MatrixRep, v: &[(u32, u32)]) -> Vec<SparseVec> {
    let mut ech = SparseEchelon::new(rep.p);
    let mut queue = vec![v.to_vec()];
    if !ech.insert(v) {
        return Vec::new();
    }
    while let Some(w) = queue.pop() {
        for g in &rep.generators {
            let gw = g.apply(&w);
            if ech.insert(&gw) {
                queue.push(gw);
            }
            if ech.rank() == rep.dim {
                return ech.rows().to_vec();
            }
        }
    }
    ech.rows().to_vec()
}

/// Every generator maps the span of `basis` into itself.
pub fn is_invariant(rep: &MatrixRep, basis: &[SparseVec]) -> bool {
    let mut ech = SparseEchelon::new(rep.p);
    for b in basis {
        ech.insert(b);
    }
    basis
        .iter()
        .all(|b| rep.generators.iter().all(|g| ech.contains(&g.apply(b))))
}

pub fn is_irreducible(rep: &MatrixRep, opts: &IrreducibilityOptions) -> Irreducibility {
    let d = rep.dim;
    if d <= 1 {
        return Irreducibility::Irreducible;
    }
    if d <= opts.burnside_max_dim {
        if burnside_span(rep) == d * d {
            return Irreducibility::Irreducible;
        }
        // not absolutely irreducible: look for an explicit submodule
        for i in 0..d {
            let s = spin(rep, &[(i as u32, 1)]);
            if s.len() < d {
                return Irreducibility::Submodule(s);
            }
        }
        return match random_search(rep, opts) {
            Some(s) => Irreducibility::Submodule(s),
            None => Irreducibility::Inconclusive,
        };
    }
    match random_search(rep, opts) {
        Some(s) => Irreducibility::Submodule(s),
        None => Irreducibility::Inconclusive,
    }
}

/// Dimension of the associative algebra generated by the representation.
pub fn burnside_span(rep: &MatrixRep) -> usize {
    let d = rep.dim;
    let field = PrimeField { p: rep.p };
    let flat = |m: &SparseMatrix| {
        let mut v = vec![0u64; d * d];
        for (j, col) in m.columns().iter().enumerate() {
            for &(i, x) in col {
                v[i as usize * d + j] = x as u64;
            }
        }
        v
    };
    let mut ech = Echelon::new(field);
    let id = SparseMatrix::identity(d, rep.p);
    ech.insert(&flat(&id));
    let mut queue = vec![id];
    while let Some(m) = queue.pop() {
        for g in &rep.generators {
            let gm = g.mul(&m);
            if ech.insert(&flat(&gm)) {
                if ech.rank() == d * d {
                    return d * d;
                }
                queue.push(gm);
            }
        }
    }
    ech.rank()
}

fn random_search(rep: &MatrixRep, opts: &IrreducibilityOptions) -> Option<Vec<SparseVec>> {
    let d = rep.dim;
    let p = rep.p;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.trials {
        // spin a random vector
        let v: SparseVec = (0..d)
            .filter_map(|i| {
                let x = rng.gen_range(0..p);
                (x != 0).then_some((i as u32, x as u32))
            })
            .collect();
        if !v.is_empty() {
            let s = spin(rep, &v);
            if s.len() < d {
                return Some(s);
            }
        }
        // probe the kernel of a random element of the generated algebra
        let mut theta = SparseMatrix::zero(d, d, p);
        for g in &rep.generators {
            theta = theta.add_scaled(rng.gen_range(0..p), g);
        }
        let a = rng.gen_range(0..rep.generators.len());
        let b = rng.gen_range(0..rep.generators.len());
        theta = theta.add_scaled(rng.gen_range(1..p), &rep.generators[a].mul(&rep.generators[b]));
        for k in theta.kernel().into_iter().take(2) {
            let s = spin(rep, &k);
            if !s.is_empty() && s.len() < d {
                return Some(s);
            }
        }
    }
    None
}

/// `true` when `m` is `c · I` for some `c`.
pub fn acts_as_scalar(m: &SparseMatrix) -> Option<u64> {
    m.scalar_value()
}

/// Combine two sparse vectors with coefficients (convenience for callers).
pub fn combine_vectors(p: u64, a: u64, x: &[(u32, u32)], b: u64, y: &[(u32, u32)]) -> SparseVec {
    axpy(p, a, x, &sparse_scale(p, b, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{Family, RootSystem};

    fn sl2(p: u64) -> LieAlgebra {
        LieAlgebra::build_with_override(&RootSystem::build(Family::A, 1).unwrap(), p, true).unwrap()
    }

    #[test]
    fn a1_nonzero_character_baby_verma() {
        let a = sl2(5);
        let chi = Character::from_pairs(&a, &[(0, 1)]);
        let rep = baby_verma(&a, &chi, &[0]).unwrap();
        assert_eq!(rep.dim(), 5);
        assert_eq!(rep.generator(0).pow(5), SparseMatrix::identity(5, 5));
        assert!(rep.bracket_failures(&a).is_empty());
        assert!(rep.restrictedness_failures(&a).is_empty());
        assert_eq!(
            is_irreducible(&rep, &IrreducibilityOptions::default()),
            Irreducibility::Irreducible
        );
    }

    #[test]
    fn a1_trivial_character_is_reducible() {
        let a = sl2(5);
        let rep = baby_verma(&a, &Character::zero(&a), &[0]).unwrap();
        assert_eq!(rep.dim(), 5);
        assert!(rep.generator(0).pow(5).is_zero());
        assert!(rep.generator(2).pow(5).is_zero());
        match is_irreducible(&rep, &IrreducibilityOptions::default()) {
            Irreducibility::Submodule(basis) => {
                assert!(!basis.is_empty() && basis.len() < 5);
                assert!(is_invariant(&rep, &basis));
            }
            other => panic!("expected a submodule, got {other:?}"),
        }
    }

    #[test]
    fn character_errors() {
        let a = sl2(5);
        let bad = Character::from_pairs(&a, &[(2, 1)]);
        assert!(matches!(
            baby_verma(&a, &bad, &[0]),
            Err(RedEnvError::NonStandardCharacter(_))
        ));
        let toral = Character::from_pairs(&a, &[(1, 1)]);
        assert!(matches!(
            baby_verma(&a, &toral, &[0]),
            Err(RedEnvError::IncompatibleWeight { coroot: 0, .. })
        ));
        assert!(compatible_weights(&a, &toral)[0].is_empty());
        assert_eq!(compatible_weights(&a, &Character::zero(&a))[0].len(), 5);
    }

    #[test]
    fn reduce_examples() {
        let a = sl2(5);
        let env = Enveloping::new(&a);
        let chi = Character::from_pairs(&a, &[(0, 3)]);
        // x_{-α}^5 with χ = 3 → 3^5 = 3
        let f5 = env.pow(&env.generator(0), 5).unwrap();
        assert_eq!(reduce(&env, &f5, &chi).unwrap().into_element(), env.scalar(3));
        // h^5 with χ(h) = 0 → h
        let h5 = env.pow(&env.generator(1), 5).unwrap();
        assert_eq!(reduce(&env, &h5, &chi).unwrap().into_element(), env.generator(1));
        let small = env.word(&[0, 0, 1, 2]).unwrap();
        assert_eq!(reduce(&env, &small, &chi).unwrap().into_element(), small);
    }

    #[test]
    fn toral_power_reduction() {
        // h^6 = h^2 + s h with h^5 = h + s (p = 5)
        assert_eq!(reduce_toral_power(6, 2, 5), vec![(1, 2), (2, 1)]);
        assert_eq!(reduce_toral_power(3, 2, 5), vec![(3, 1)]);
    }

    #[test]
    fn reduce_requires_mod_p() {
        let a = LieAlgebra::build(&RootSystem::build(Family::A, 1).unwrap(), 0).unwrap();
        let env = Enveloping::new(&a);
        let chi = Character {
            p: 7,
            values: vec![0; 3],
        };
        assert_eq!(reduce(&env, &env.one(), &chi).unwrap_err(), RedEnvError::NotModP);
    }

    #[test]
    fn adjoint_and_natural_reps() {
        let a = LieAlgebra::build(&RootSystem::build(Family::B, 2).unwrap(), 7).unwrap();
        for rep in [MatrixRep::adjoint(&a).unwrap(), MatrixRep::natural(&a).unwrap()] {
            assert!(rep.bracket_failures(&a).is_empty(), "{:?}", rep.kind());
            assert!(rep.restrictedness_failures(&a).is_empty(), "{:?}", rep.kind());
        }
        assert_eq!(MatrixRep::natural(&a).unwrap().dim(), 5);
    }

    #[test]
    fn evaluate_unit_and_monomial() {
        let a = sl2(7);
        let chi = Character::from_pairs(&a, &[(0, 1)]);
        let rep = baby_verma(&a, &chi, &[3]).unwrap();
        let env = Enveloping::new(&a);
        assert_eq!(evaluate(&env.one(), &rep).unwrap(), SparseMatrix::identity(7, 7));
        let fe = env.word(&[0, 2]).unwrap();
        assert_eq!(evaluate(&fe, &rep).unwrap(), rep.generator(0).mul(rep.generator(2)));
    }

    #[test]
    fn export_header() {
        let a = sl2(5);
        let rep = baby_verma(&a, &Character::from_pairs(&a, &[(0, 1)]), &[0]).unwrap();
        let text = rep.export_text(&a);
        assert!(text.starts_with("5 5\n"));
        assert!(text.lines().skip(1).all(|l| l.split(' ').count() == 4));
    }
}
