//! Root systems of the classical families in exact ε-coordinates.
//!
//! Roots of `B_l`, `C_l`, `D_l` live in `Z^l`; `A_l` (l ≥ 2) uses the usual
//! `Z^{l+1}` coordinates `ε_i − ε_j`. `A_1` is stored as `±ε_1` in `Z^1` so
//! that the sl₂ root reads the same as the short roots of the other families.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(c)
    }
}

impl FromStr for Family {
    type Err = RootsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(RootsError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootsError {
    #[error("rank {rank} is not supported for family {family} (minimum {min})")]
    UnsupportedRank { family: Family, rank: usize, min: usize },
    #[error("{0} is not a root of the system")]
    RootNotInSystem(Root),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
}

/// A vector of the root lattice in ε-coordinates.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Root(Vec<i32>);

impl Root {
    pub fn new(coords: Vec<i32>) -> Self {
        Root(coords)
    }

    /// `ε_i` (1-based) in `Z^dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut c = vec![0; dim];
        c[i - 1] = 1;
        Root(c)
    }

    /// `a ε_i + b ε_j` (1-based) in `Z^dim`.
    pub fn pair(dim: usize, a: i32, i: usize, b: i32, j: usize) -> Self {
        let mut c = vec![0; dim];
        c[i - 1] += a;
        c[j - 1] += b;
        Root(c)
    }

    pub fn zero(dim: usize) -> Self {
        Root(vec![0; dim])
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn norm2(&self) -> i64 {
        self.dot(self)
    }

    pub fn dot(&self, other: &Root) -> i64 {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a as i64 * b as i64).sum()
    }

    pub fn scaled(&self, k: i32) -> Root {
        Root(self.0.iter().map(|&c| c * k).collect())
    }

    pub fn plus(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn minus(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Root {
        self.scaled(-1)
    }

    /// Text label such as `+e1-e2`, `-e1`, `+2e3`.
    pub fn label(&self) -> String {
        let mut s = String::new();
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            s.push(if c > 0 { '+' } else { '-' });
            if c.abs() != 1 {
                s.push_str(&c.abs().to_string());
            }
            s.push('e');
            s.push_str(&(i + 1).to_string());
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `⟨β, α∨⟩ = 2(β,α)/(α,α)`. Integral whenever both arguments are roots of
/// one system; for other inputs the quotient is truncated.
pub fn cartan_integer(beta: &Root, alpha: &Root) -> i64 {
    let a2 = alpha.norm2();
    assert!(a2 != 0, "cartan_integer against the zero vector");
    2 * beta.dot(alpha) / a2
}

/// The reflection `s_α(β) = β − ⟨β,α∨⟩α`.
pub fn reflect(beta: &Root, alpha: &Root) -> Root {
    let k = cartan_integer(beta, alpha) as i32;
    beta.minus(&alpha.scaled(k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystem {
    family: Family,
    rank: usize,
    /// Canonical order: by height, then lexicographically by coordinates.
    roots: Vec<Root>,
    base: Vec<Root>,
}

impl RootSystem {
    pub fn build(family: Family, rank: usize) -> Result<Self, RootsError> {
        let min = family.min_rank();
        if rank < min {
            return Err(RootsError::UnsupportedRank { family, rank, min });
        }
        let l = rank;
        let dim = ambient_dim(family, l);
        let mut roots = Vec::new();
        let mut base = Vec::new();
        match family {
            Family::A if l == 1 => {
                roots.push(Root::unit(1, 1));
                roots.push(Root::unit(1, 1).neg());
                base.push(Root::unit(1, 1));
            }
            Family::A => {
                for i in 1..=dim {
                    for j in 1..=dim {
                        if i != j {
                            roots.push(Root::pair(dim, 1, i, -1, j));
                        }
                    }
                }
                for i in 1..=l {
                    base.push(Root::pair(dim, 1, i, -1, i + 1));
                }
            }
            Family::B | Family::C | Family::D => {
                for i in 1..=l {
                    for j in (i + 1)..=l {
                        for a in [1, -1] {
                            for b in [1, -1] {
                                roots.push(Root::pair(dim, a, i, b, j));
                            }
                        }
                    }
                    match family {
                        Family::B => {
                            roots.push(Root::unit(dim, i));
                            roots.push(Root::unit(dim, i).neg());
                        }
                        Family::C => {
                            roots.push(Root::unit(dim, i).scaled(2));
                            roots.push(Root::unit(dim, i).scaled(-2));
                        }
                        _ => {}
                    }
                }
                for i in 1..l {
                    base.push(Root::pair(dim, 1, i, -1, i + 1));
                }
                base.push(match family {
                    Family::B => Root::unit(dim, l),
                    Family::C => Root::unit(dim, l).scaled(2),
                    _ => Root::pair(dim, 1, l - 1, 1, l),
                });
            }
        }
        let mut rs = RootSystem {
            family,
            rank,
            roots,
            base,
        };
        let mut keyed: Vec<(i64, Root)> = rs.roots.iter().map(|r| (rs.height(r), r.clone())).collect();
        keyed.sort();
        rs.roots = keyed.into_iter().map(|(_, r)| r).collect();
        Ok(rs)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ambient_dim(&self) -> usize {
        ambient_dim(self.family, self.rank)
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn base(&self) -> &[Root] {
        &self.base
    }

    /// Number of positive roots `m`.
    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[self.roots.len() / 2..]
    }

    pub fn negative_roots(&self) -> &[Root] {
        &self.roots[..self.roots.len() / 2]
    }

    pub fn contains(&self, r: &Root) -> bool {
        r.dim() == self.ambient_dim() && self.index_of(r).is_some()
    }

    /// Position in the canonical order.
    pub fn index_of(&self, r: &Root) -> Option<usize> {
        if r.dim() != self.ambient_dim() {
            return None;
        }
        self.roots.iter().position(|x| x == r)
    }

    /// 0-based index of `r` in the base, if simple.
    pub fn simple_index(&self, r: &Root) -> Option<usize> {
        self.base.iter().position(|x| x == r)
    }

    /// Coefficients of a lattice vector over the base.
    pub fn base_coefficients(&self, r: &Root) -> Vec<i64> {
        let l = self.rank;
        let c = r.coords();
        let partial: Vec<i64> = c
            .iter()
            .scan(0i64, |s, &x| {
                *s += x as i64;
                Some(*s)
            })
            .collect();
        match self.family {
            Family::A if l == 1 => vec![c[0] as i64],
            Family::A | Family::B => partial[..l].to_vec(),
            Family::C => {
                let mut out = partial[..l].to_vec();
                out[l - 1] /= 2;
                out
            }
            Family::D => {
                let mut out = partial[..l].to_vec();
                let last = partial[l - 1] / 2;
                out[l - 2] = partial[l - 2] - last;
                out[l - 1] = last;
                out
            }
        }
    }

    pub fn height(&self, r: &Root) -> i64 {
        self.base_coefficients(r).iter().sum()
    }

    pub fn is_positive(&self, r: &Root) -> bool {
        self.height(r) > 0
    }

    /// Closure of `{β}` under the simple reflections.
    pub fn weyl_orbit(&self, beta: &Root) -> Result<BTreeSet<Root>, RootsError> {
        if !self.contains(beta) {
            return Err(RootsError::RootNotInSystem(beta.clone()));
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(beta.clone());
        queue.push_back(beta.clone());
        while let Some(r) = queue.pop_front() {
            for a in &self.base {
                let s = reflect(&r, a);
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        Ok(seen)
    }

    /// `(q_down, q_up)`: the α-string through β runs from `β − q_down α` to `β + q_up α`.
    pub fn root_string(&self, beta: &Root, alpha: &Root) -> (u32, u32) {
        let mut down = 0;
        while self.contains(&beta.minus(&alpha.scaled(down as i32 + 1))) {
            down += 1;
        }
        let mut up = 0;
        while self.contains(&beta.plus(&alpha.scaled(up as i32 + 1))) {
            up += 1;
        }
        (down, up)
    }
}

fn ambient_dim(family: Family, rank: usize) -> usize {
    match family {
        Family::A if rank == 1 => 1,
        Family::A => rank + 1,
        _ => rank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(dim: usize, i: usize) -> Root {
        Root::unit(dim, i)
    }

    #[test]
    fn b2_roots_and_base() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        assert_eq!(rs.roots().len(), 8);
        assert_eq!(rs.base(), &[Root::new(vec![1, -1]), Root::new(vec![0, 1])]);
        let labels: Vec<String> = rs.roots().iter().map(Root::label).collect();
        assert_eq!(
            labels,
            ["-e1-e2", "-e1", "-e1+e2", "-e2", "+e2", "+e1-e2", "+e1", "+e1+e2"]
        );
    }

    #[test]
    fn a1_is_smallest() {
        let rs = RootSystem::build(Family::A, 1).unwrap();
        assert_eq!(rs.roots(), &[Root::new(vec![-1]), Root::new(vec![1])]);
    }

    #[test]
    fn b3_count_matches_enumeration() {
        // brute force: all vectors in {-1,0,1}^3 of squared length 1 or 2
        let mut brute = 0;
        for a in -1..=1 {
            for b in -1..=1 {
                for c in -1..=1 {
                    let n: i32 = a * a + b * b + c * c;
                    if n == 1 || n == 2 {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(brute, 18);
        assert_eq!(RootSystem::build(Family::B, 3).unwrap().roots().len(), brute);
    }

    #[test]
    fn unsupported_rank() {
        assert!(matches!(
            RootSystem::build(Family::B, 1),
            Err(RootsError::UnsupportedRank { .. })
        ));
        assert!(matches!(
            RootSystem::build(Family::D, 2),
            Err(RootsError::UnsupportedRank { .. })
        ));
    }

    #[test]
    fn cartan_integers() {
        assert_eq!(cartan_integer(&e(2, 1), &e(2, 1)), 2);
        assert_eq!(cartan_integer(&Root::new(vec![1, -1]), &e(2, 2)), -2);
        assert_eq!(cartan_integer(&e(2, 2), &Root::new(vec![1, -1])), -1);
    }

    #[test]
    fn reflections() {
        let a = Root::new(vec![1, -1]);
        assert_eq!(reflect(&a, &a), a.neg());
        assert_eq!(reflect(&a, &e(2, 2)), Root::new(vec![1, 1]));
        assert_eq!(reflect(&e(2, 1), &a), e(2, 2));
    }

    #[test]
    fn b2_orbits() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        let short = rs.weyl_orbit(&e(2, 1)).unwrap();
        let expect: BTreeSet<Root> = [e(2, 1), e(2, 1).neg(), e(2, 2), e(2, 2).neg()].into_iter().collect();
        assert_eq!(short, expect);
        let long = rs.weyl_orbit(&Root::new(vec![1, -1])).unwrap();
        assert_eq!(long.len(), 4);
        assert!(long.iter().all(|r| r.norm2() == 2));
        let a1 = RootSystem::build(Family::A, 1).unwrap();
        assert_eq!(a1.weyl_orbit(&Root::new(vec![1])).unwrap().len(), 2);
        assert!(rs.weyl_orbit(&Root::new(vec![2, 0])).is_err());
    }

    #[test]
    fn root_strings() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        assert_eq!(rs.root_string(&e(2, 2), &Root::new(vec![1, -1])), (0, 1));
        assert_eq!(rs.root_string(&Root::new(vec![1, -1]), &e(2, 2)), (0, 2));
        assert_eq!(rs.root_string(&Root::new(vec![1, 1]), &Root::new(vec![1, -1])), (0, 0));
    }

    #[test]
    fn base_expansions_are_sign_coherent() {
        for (fam, ranks) in [
            (Family::A, 1..=4),
            (Family::B, 2..=4),
            (Family::C, 2..=4),
            (Family::D, 3..=4),
        ] {
            for l in ranks {
                let rs = RootSystem::build(fam, l).unwrap();
                for r in rs.roots() {
                    let c = rs.base_coefficients(r);
                    assert!(c.iter().all(|&x| x >= 0) || c.iter().all(|&x| x <= 0), "{fam}{l} {r}");
                    // the expansion reproduces the root
                    let mut v = Root::zero(rs.ambient_dim());
                    for (k, b) in c.iter().zip(rs.base()) {
                        v = v.plus(&b.scaled(*k as i32));
                    }
                    assert_eq!(&v, r);
                }
            }
        }
    }

    #[test]
    fn labels() {
        assert_eq!(Root::new(vec![1, -1, 0]).label(), "+e1-e2");
        assert_eq!(Root::new(vec![0, 0, -2]).label(), "-2e3");
    }
}
