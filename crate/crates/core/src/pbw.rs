//! Exact arithmetic in the universal enveloping algebra `U(L)`.
//!
//! Elements are kept in PBW normal form over the canonical basis order
//! (negative root vectors, simple coroots, positive root vectors). Products
//! are straightened by pushing a single generator leftwards through a normal
//! monomial:
//!
//! ```text
//! g · x_k M' = x_k (g · M') + [g, x_k] · M'      (g after x_k in the order)
//! ```
//!
//! Every call either lowers the degree or starts from a word with fewer
//! inversions, which bounds the recursion. Rewrites are memoised per
//! [`Enveloping`] context, keyed by `(generator, monomial)`.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::chevalley::{AlgId, LieAlgebra, LieElement};
use crate::field::{Overflow, Ring};
use crate::roots::Root;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PbwError {
    #[error("elements belong to different algebras")]
    MixedAlgebras,
    #[error("coefficient overflow in characteristic zero")]
    CoefficientOverflow,
}

impl From<Overflow> for PbwError {
    fn from(_: Overflow) -> Self {
        PbwError::CoefficientOverflow
    }
}

/// Ordered PBW monomial: `(basis index, exponent)` pairs, indices increasing,
/// exponents positive.
///
/// Monomials order by total degree (higher first), then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u16, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn generator(idx: usize) -> Self {
        Monomial(vec![(idx as u16, 1)])
    }

    /// Builds a normal monomial from `(index, exponent)` pairs in any order;
    /// repeated indices are merged and zero exponents dropped. This is a
    /// commutative constructor: it does not straighten.
    pub fn from_exponents(pairs: &[(usize, u32)]) -> Self {
        let mut m: BTreeMap<u16, u32> = BTreeMap::new();
        for &(i, e) in pairs {
            *m.entry(i as u16).or_default() += e;
        }
        Monomial(m.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, idx: usize) -> u32 {
        self.0.iter().find(|&&(i, _)| i as usize == idx).map_or(0, |&(_, e)| e)
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0.iter().map(|&(i, e)| (i as usize, e))
    }

    /// The monomial as a word of generator indices.
    pub fn word(&self) -> Vec<usize> {
        self.0
            .iter()
            .flat_map(|&(i, e)| std::iter::repeat_n(i as usize, e as usize))
            .collect()
    }

    fn first(&self) -> Option<(u16, u32)> {
        self.0.first().copied()
    }

    fn prepend(&self, g: u16) -> Monomial {
        let mut v = self.0.clone();
        match v.first_mut() {
            Some((i, e)) if *i == g => *e += 1,
            _ => v.insert(0, (g, 1)),
        }
        Monomial(v)
    }

    fn drop_first_once(&self) -> Monomial {
        let mut v = self.0.clone();
        if v[0].1 == 1 {
            v.remove(0);
        } else {
            v[0].1 -= 1;
        }
        Monomial(v)
    }

    /// Replace the exponent of `idx` (removing the factor when zero).
    pub fn with_exponent(&self, idx: usize, e: u32) -> Monomial {
        let mut pairs: Vec<(usize, u32)> = self.factors().filter(|&(i, _)| i != idx).collect();
        pairs.push((idx, e));
        Monomial::from_exponents(&pairs)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Element of `U(L)` in normal form: no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UEElement {
    alg: AlgId,
    ring: Ring,
    terms: BTreeMap<Monomial, i64>,
}

impl UEElement {
    pub fn algebra(&self) -> AlgId {
        self.alg
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    /// Total degree (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Constant term.
    pub fn constant(&self) -> i64 {
        self.coefficient(&Monomial::one())
    }

    fn add_term(&mut self, m: Monomial, c: i64) -> Result<(), Overflow> {
        let c = self.ring.normalize(c);
        if c == 0 {
            return Ok(());
        }
        match self.terms.get_mut(&m) {
            Some(cur) => {
                let v = self.ring.add(*cur, c)?;
                if v == 0 {
                    self.terms.remove(&m);
                } else {
                    *cur = v;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
        Ok(())
    }
}

/// Weight of an element of `U(L)` under the root grading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Weight {
    Homogeneous(Root),
    NonHomogeneous,
    /// The zero element has every weight.
    Zero,
}

type Terms = Rc<Vec<(Monomial, i64)>>;

/// Arithmetic context for `U(L)`; owns the straightening memo.
///
/// Not `Sync`: create one context per thread.
pub struct Enveloping<'a> {
    alg: &'a LieAlgebra,
    memo: RefCell<HashMap<(u16, Monomial), Terms>>,
}

impl<'a> Enveloping<'a> {
    pub fn new(alg: &'a LieAlgebra) -> Self {
        Enveloping {
            alg,
            memo: RefCell::new(HashMap::new()),
        }
    }

    pub fn algebra(&self) -> &'a LieAlgebra {
        self.alg
    }

    pub fn ring(&self) -> Ring {
        self.alg.ring()
    }

    pub fn memo_size(&self) -> usize {
        self.memo.borrow().len()
    }

    fn check(&self, u: &UEElement) -> Result<(), PbwError> {
        if u.alg == self.alg.id() {
            Ok(())
        } else {
            Err(PbwError::MixedAlgebras)
        }
    }

    // -- constructors -----------------------------------------------------

    pub fn zero(&self) -> UEElement {
        UEElement {
            alg: self.alg.id(),
            ring: self.ring(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(&self, c: i64) -> UEElement {
        self.monomial(Monomial::one(), c)
    }

    pub fn one(&self) -> UEElement {
        self.scalar(1)
    }

    pub fn monomial(&self, m: Monomial, c: i64) -> UEElement {
        let mut u = self.zero();
        u.add_term(m, self.ring().normalize(c)).expect("normalised coefficient");
        u
    }

    /// The basis element `b_idx` as a degree-one element.
    pub fn generator(&self, idx: usize) -> UEElement {
        assert!(idx < self.alg.dim());
        self.monomial(Monomial::generator(idx), 1)
    }

    pub fn root_vector(&self, r: &Root) -> Result<UEElement, crate::ChevalleyError> {
        Ok(self.generator(self.alg.root_vector_index(r)?))
    }

    pub fn from_lie(&self, x: &LieElement) -> Result<UEElement, PbwError> {
        if x.algebra() != self.alg.id() {
            return Err(PbwError::MixedAlgebras);
        }
        let mut u = self.zero();
        for (k, c) in x.terms() {
            u.add_term(Monomial::generator(k), c)?;
        }
        Ok(u)
    }

    /// Degree-one part of `u` as an element of `L`, if `u` lies in `L`.
    pub fn to_lie(&self, u: &UEElement) -> Option<LieElement> {
        let mut pairs = Vec::new();
        for (m, c) in u.terms() {
            if m.degree() != 1 {
                return None;
            }
            pairs.push((m.word()[0], c));
        }
        Some(self.alg.element(&pairs))
    }

    /// Normal form of the ordered product of generators in `word`.
    pub fn word(&self, word: &[usize]) -> Result<UEElement, PbwError> {
        let mut cur = self.one();
        for &g in word.iter().rev() {
            cur = self.left_mul_generator(g, &cur)?;
        }
        Ok(cur)
    }

    // -- linear structure -------------------------------------------------

    /// `a*u + b*v`
    pub fn combine(&self, a: i64, u: &UEElement, b: i64, v: &UEElement) -> Result<UEElement, PbwError> {
        self.check(u)?;
        self.check(v)?;
        let r = self.ring();
        let (a, b) = (r.normalize(a), r.normalize(b));
        let mut out = self.zero();
        if a != 0 {
            for (m, c) in u.terms() {
                out.add_term(m.clone(), r.mul(a, c)?)?;
            }
        }
        if b != 0 {
            for (m, c) in v.terms() {
                out.add_term(m.clone(), r.mul(b, c)?)?;
            }
        }
        Ok(out)
    }

    pub fn add(&self, u: &UEElement, v: &UEElement) -> Result<UEElement, PbwError> {
        self.combine(1, u, 1, v)
    }

    pub fn sub(&self, u: &UEElement, v: &UEElement) -> Result<UEElement, PbwError> {
        self.combine(1, u, -1, v)
    }

    pub fn scale(&self, c: i64, u: &UEElement) -> Result<UEElement, PbwError> {
        self.combine(c, u, 0, &self.zero())
    }

    pub fn add_scalar(&self, u: &UEElement, c: i64) -> Result<UEElement, PbwError> {
        self.add(u, &self.scalar(c))
    }

    // -- multiplication ---------------------------------------------------

    /// Normal form of `b_g · M`.
    fn left_mul_monomial(&self, g: u16, m: &Monomial) -> Result<Terms, PbwError> {
        match m.first() {
            None => return Ok(Rc::new(vec![(Monomial::generator(g as usize), 1)])),
            Some((k, _)) if g <= k => return Ok(Rc::new(vec![(m.prepend(g), 1)])),
            _ => {}
        }
        let key = (g, m.clone());
        if let Some(t) = self.memo.borrow().get(&key) {
            return Ok(Rc::clone(t));
        }
        let r = self.ring();
        let (k, _) = m.first().unwrap();
        let rest = m.drop_first_once();
        let mut acc = self.zero();
        // x_k (g · rest)
        for (n, c) in self.left_mul_monomial(g, &rest)?.iter() {
            for (n2, c2) in self.left_mul_monomial(k, n)?.iter() {
                acc.add_term(n2.clone(), r.mul(*c, *c2)?)?;
            }
        }
        // [g, x_k] · rest
        for &(j, cj) in self.alg.bracket_basis(g as usize, k as usize) {
            for (n, c) in self.left_mul_monomial(j as u16, &rest)?.iter() {
                acc.add_term(n.clone(), r.mul(cj, *c)?)?;
            }
        }
        let out: Terms = Rc::new(acc.terms.into_iter().collect());
        self.memo.borrow_mut().insert(key, Rc::clone(&out));
        Ok(out)
    }

    /// `b_g · u`
    pub fn left_mul_generator(&self, g: usize, u: &UEElement) -> Result<UEElement, PbwError> {
        self.check(u)?;
        let r = self.ring();
        let mut out = self.zero();
        for (m, c) in u.terms() {
            for (n, c2) in self.left_mul_monomial(g as u16, m)?.iter() {
                out.add_term(n.clone(), r.mul(c, *c2)?)?;
            }
        }
        Ok(out)
    }

    pub fn multiply(&self, u: &UEElement, v: &UEElement) -> Result<UEElement, PbwError> {
        self.check(u)?;
        self.check(v)?;
        let r = self.ring();
        let mut out = self.zero();
        for (m, c) in u.terms() {
            let mut cur = v.clone();
            for g in m.word().into_iter().rev() {
                cur = self.left_mul_generator(g, &cur)?;
            }
            for (n, c2) in cur.terms() {
                out.add_term(n.clone(), r.mul(c, c2)?)?;
            }
        }
        Ok(out)
    }

    /// Product of several factors, left to right.
    pub fn product(&self, factors: &[&UEElement]) -> Result<UEElement, PbwError> {
        let mut cur = self.one();
        for f in factors.iter().rev() {
            cur = self.multiply(f, &cur)?;
        }
        Ok(cur)
    }

    pub fn pow(&self, u: &UEElement, k: u32) -> Result<UEElement, PbwError> {
        let mut cur = self.one();
        for _ in 0..k {
            cur = self.multiply(u, &cur)?;
        }
        Ok(cur)
    }

    /// `uv − vu`
    pub fn commutator(&self, u: &UEElement, v: &UEElement) -> Result<UEElement, PbwError> {
        let uv = self.multiply(u, v)?;
        let vu = self.multiply(v, u)?;
        self.sub(&uv, &vu)
    }

    /// First basis generator not commuting with `u`, with the commutator.
    pub fn centrality_witness(&self, u: &UEElement) -> Result<Option<(usize, UEElement)>, PbwError> {
        for g in 0..self.alg.dim() {
            let c = self.commutator(&self.generator(g), u)?;
            if !c.is_zero() {
                return Ok(Some((g, c)));
            }
        }
        Ok(None)
    }

    /// `u` is central iff it commutes with every basis generator of `L`.
    pub fn is_central(&self, u: &UEElement) -> Result<bool, PbwError> {
        Ok(self.centrality_witness(u)?.is_none())
    }

    // -- grading ----------------------------------------------------------

    pub fn monomial_weight(&self, m: &Monomial) -> Root {
        let mut w = Root::zero(self.alg.root_system().ambient_dim());
        for (i, e) in m.factors() {
            if let Some(r) = self.alg.root_of(i) {
                w = w.plus(&r.scaled(e as i32));
            }
        }
        w
    }

    pub fn weight(&self, u: &UEElement) -> Weight {
        let mut found: Option<Root> = None;
        for (m, _) in u.terms() {
            let w = self.monomial_weight(m);
            match &found {
                None => found = Some(w),
                Some(prev) if *prev != w => return Weight::NonHomogeneous,
                _ => {}
            }
        }
        found.map_or(Weight::Zero, Weight::Homogeneous)
    }

    // -- text -------------------------------------------------------------

    pub fn format_monomial(&self, m: &Monomial) -> String {
        m.factors()
            .map(|(i, e)| {
                let lab = self.alg.label(i);
                if e == 1 {
                    lab
                } else {
                    format!("{lab}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Deterministic text form, e.g. `x(-e1) x(+e1) + h(e1)`.
    pub fn format(&self, u: &UEElement) -> String {
        if u.is_zero() {
            return "0".to_string();
        }
        let r = self.ring();
        let mut s = String::new();
        for (k, (m, c)) in u.terms().enumerate() {
            let c = r.balanced(c);
            let neg = c < 0;
            let a = c.unsigned_abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&a.to_string());
            } else {
                if a != 1 {
                    s.push_str(&a.to_string());
                    s.push(' ');
                }
                s.push_str(&self.format_monomial(m));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{Family, RootSystem};

    fn b2(p: u64) -> LieAlgebra {
        LieAlgebra::build(&RootSystem::build(Family::B, 2).unwrap(), p).unwrap()
    }

    #[test]
    fn single_straightening_step() {
        let a = b2(7);
        let u = Enveloping::new(&a);
        let e1 = Root::new(vec![1, 0]);
        let x = u.root_vector(&e1).unwrap();
        let y = u.root_vector(&e1.neg()).unwrap();
        let xy = u.multiply(&x, &y).unwrap();
        let yx = u.multiply(&y, &x).unwrap();
        let h = u.from_lie(&a.coroot_expand(&e1).unwrap()).unwrap();
        assert_eq!(xy, u.add(&yx, &h).unwrap());
        assert_eq!(yx.len(), 1);
    }

    #[test]
    fn unit_law() {
        let a = b2(7);
        let u = Enveloping::new(&a);
        let x = u.word(&[9, 0, 4]).unwrap();
        assert_eq!(u.multiply(&u.one(), &x).unwrap(), x);
        assert_eq!(u.multiply(&x, &u.one()).unwrap(), x);
    }

    #[test]
    fn root_vector_past_coroot() {
        // x_α h = h x_α − α(h) x_α
        let a = b2(0);
        let u = Enveloping::new(&a);
        for i in 0..2 {
            let hi = a.coroot_index(i);
            for r in a.root_system().positive_roots() {
                let xi = a.root_vector_index(r).unwrap();
                let lhs = u.word(&[xi, hi]).unwrap();
                let hx = u.monomial(Monomial::from_exponents(&[(hi, 1), (xi, 1)]), 1);
                let rhs = u.combine(1, &hx, -a.coroot_pairing(r, i), &u.generator(xi)).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn casimir_is_central_in_sl2() {
        let rs = RootSystem::build(Family::A, 1).unwrap();
        let a = LieAlgebra::build(&rs, 0).unwrap();
        let u = Enveloping::new(&a);
        let (f, h, e) = (u.generator(0), u.generator(1), u.generator(2));
        let h1 = u.add_scalar(&h, 1).unwrap();
        let w = u
            .add(
                &u.multiply(&h1, &h1).unwrap(),
                &u.scale(4, &u.multiply(&f, &e).unwrap()).unwrap(),
            )
            .unwrap();
        assert!(u.is_central(&w).unwrap());
        assert!(!u.is_central(&e).unwrap());
        assert_eq!(u.format(&w), "4 x(-e1) x(+e1) + h(e1)^2 + 2 h(e1) + 1");
    }

    #[test]
    fn p_th_power_of_root_vector_is_central_mod_p() {
        let a = b2(7);
        let u = Enveloping::new(&a);
        let idx = a.root_vector_index(&Root::new(vec![1, 0])).unwrap();
        let xp = u.pow(&u.generator(idx), 7).unwrap();
        assert!(u.is_central(&xp).unwrap());
        let x6 = u.pow(&u.generator(idx), 6).unwrap();
        assert!(!u.is_central(&x6).unwrap());
    }

    #[test]
    fn weights() {
        let a = b2(7);
        let u = Enveloping::new(&a);
        let e1 = Root::new(vec![1, 0]);
        let x = u.root_vector(&e1).unwrap();
        let y = u.root_vector(&e1.neg()).unwrap();
        assert_eq!(u.weight(&x), Weight::Homogeneous(e1.clone()));
        assert_eq!(
            u.weight(&u.multiply(&y, &x).unwrap()),
            Weight::Homogeneous(Root::zero(2))
        );
        assert_eq!(u.weight(&u.add(&x, &y).unwrap()), Weight::NonHomogeneous);
        assert_eq!(u.weight(&u.zero()), Weight::Zero);
    }

    #[test]
    fn mixed_algebras() {
        let a = b2(7);
        let b = b2(7);
        let ua = Enveloping::new(&a);
        let ub = Enveloping::new(&b);
        assert_eq!(ua.multiply(&ua.one(), &ub.one()).unwrap_err(), PbwError::MixedAlgebras);
    }

    #[test]
    fn format_examples() {
        let rs = RootSystem::build(Family::A, 1).unwrap();
        let a = LieAlgebra::build(&rs, 0).unwrap();
        let u = Enveloping::new(&a);
        let ef = u.word(&[2, 0]).unwrap();
        assert_eq!(u.format(&ef), "x(-e1) x(+e1) + h(e1)");
        assert_eq!(u.format(&u.zero()), "0");
        assert_eq!(
            u.format(&u.scale(-3, &u.word(&[0, 0]).unwrap()).unwrap()),
            "-3 x(-e1)^2"
        );
    }
}
