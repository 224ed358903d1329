//! Coordinate embeddings `L_sub ⊂ L` and closure checks for `L_sub + H'`.
//!
//! The roots of `L` supported on a set of ε-coordinates form a closed
//! subsystem of the same family. Its Chevalley span is every `x_β` with
//! `β` in the subsystem together with the coroots `h_β`; `H'` is spanned by
//! the simple coroots of `L`.

use modlie::linalg::{Echelon, Field, PrimeField, Rationals};
use modlie::{ChevalleyError, Closure, LieAlgebra, LieElement, Root};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureCheck {
    pub span: String,
    pub span_dim: usize,
    pub closed: bool,
    /// Dimension of the subalgebra generated by the span, by iterated brackets.
    pub fixpoint_dim: usize,
    pub agrees: bool,
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub coordinates: Vec<usize>,
    pub sub_roots: usize,
    pub checks: Vec<ClosureCheck>,
}

/// Roots of `alg` supported on the 1-based coordinates `coords`.
pub fn supported_roots(alg: &LieAlgebra, coords: &[usize]) -> Vec<Root> {
    alg.root_system()
        .roots()
        .iter()
        .filter(|r| {
            r.coords()
                .iter()
                .enumerate()
                .all(|(i, &c)| c == 0 || coords.contains(&(i + 1)))
        })
        .cloned()
        .collect()
}

/// Chevalley span of the subsystem on `coords`.
pub fn sub_span(alg: &LieAlgebra, coords: &[usize]) -> Result<Vec<LieElement>, ChevalleyError> {
    let roots = supported_roots(alg, coords);
    let rs = alg.root_system();
    let mut span = Vec::new();
    for r in &roots {
        span.push(alg.root_vector(r)?);
    }
    for r in roots.iter().filter(|r| rs.is_positive(r)) {
        span.push(alg.coroot_expand(r)?);
    }
    Ok(span)
}

fn generated_dim<F: Field + Clone>(
    alg: &LieAlgebra,
    field: F,
    span: &[LieElement],
) -> Result<(usize, usize), ChevalleyError> {
    let n = alg.dim();
    let to_vec = |u: &LieElement| {
        let mut v = vec![field.zero(); n];
        for (k, c) in u.terms() {
            v[k] = field.from_i64(c);
        }
        v
    };
    let mut ech = Echelon::new(field.clone());
    let mut basis: Vec<LieElement> = Vec::new();
    for u in span {
        if ech.insert(&to_vec(u)) {
            basis.push(u.clone());
        }
    }
    let span_dim = basis.len();
    let mut i = 0;
    while i < basis.len() {
        for j in 0..i {
            let b = alg.bracket(&basis[j], &basis[i])?;
            if ech.insert(&to_vec(&b)) {
                basis.push(b);
            }
        }
        i += 1;
    }
    Ok((span_dim, basis.len()))
}

/// `(dim span, dim of the generated subalgebra)`.
pub fn fixpoint(alg: &LieAlgebra, span: &[LieElement]) -> Result<(usize, usize), ChevalleyError> {
    match alg.characteristic() {
        0 => generated_dim(alg, Rationals, span),
        p => generated_dim(alg, PrimeField { p }, span),
    }
}

fn check(
    alg: &LieAlgebra,
    name: String,
    span: &[LieElement],
    verdict: Closure,
) -> Result<ClosureCheck, ChevalleyError> {
    let (span_dim, fixpoint_dim) = fixpoint(alg, span)?;
    let closed = verdict == Closure::Closed;
    let witness = match verdict {
        Closure::Closed => None,
        Closure::NotClosed { left, right, bracket } => Some(format!(
            "[{}, {}] = {} leaves the span",
            describe(alg, &span[left]),
            describe(alg, &span[right]),
            describe(alg, &bracket)
        )),
    };
    Ok(ClosureCheck {
        span: name,
        span_dim,
        closed,
        fixpoint_dim,
        agrees: closed == (fixpoint_dim == span_dim),
        witness,
    })
}

fn describe(alg: &LieAlgebra, u: &LieElement) -> String {
    let parts: Vec<String> = u.terms().map(|(k, c)| format!("{c} {}", alg.label(k))).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// The sub span alone, with each simple coroot of `alg` adjoined, and with all of `H'`.
pub fn check_embedding(alg: &LieAlgebra, coords: &[usize]) -> Result<EmbeddingReport, ChevalleyError> {
    let sub = sub_span(alg, coords)?;
    let mut checks = vec![check(alg, "L_sub".into(), &sub, alg.check_subalgebra(&sub)?)?];
    for i in 0..alg.rank() {
        let h = alg.basis_element(alg.coroot_index(i));
        let (span, verdict) = alg.extend_by_cartan(&sub, &h)?;
        checks.push(check(
            alg,
            format!("L_sub + F {}", alg.label(alg.coroot_index(i))),
            &span,
            verdict,
        )?);
    }
    let mut full = sub.clone();
    full.extend((0..alg.rank()).map(|i| alg.basis_element(alg.coroot_index(i))));
    let verdict = alg.check_subalgebra(&full)?;
    checks.push(check(alg, "L_sub + H'".into(), &full, verdict)?);
    Ok(EmbeddingReport {
        coordinates: coords.to_vec(),
        sub_roots: supported_roots(alg, coords).len(),
        checks,
    })
}

/// The leading and trailing coordinate embeddings of rank `sub_rank`.
pub fn standard_embeddings(alg: &LieAlgebra, sub_rank: usize) -> Vec<Vec<usize>> {
    let d = alg.root_system().ambient_dim();
    let width = d - (alg.rank() - sub_rank);
    let lead: Vec<usize> = (1..=width).collect();
    let trail: Vec<usize> = (d - width + 1..=d).collect();
    if lead == trail {
        vec![lead]
    } else {
        vec![lead, trail]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use modlie::{Family, RootSystem};

    #[test]
    fn b2_in_b3() {
        let rs = RootSystem::build(Family::B, 3).unwrap();
        let alg = LieAlgebra::build(&rs, 0).unwrap();
        let embs = standard_embeddings(&alg, 2);
        assert_eq!(embs, vec![vec![1, 2], vec![2, 3]]);
        for c in embs {
            let r = check_embedding(&alg, &c).unwrap();
            assert_eq!(r.sub_roots, 8);
            assert_eq!(r.checks[0].span_dim, 10);
            assert!(r.checks.iter().all(|k| k.closed && k.agrees));
            assert_eq!(r.checks.last().unwrap().span_dim, 11);
        }
    }

    #[test]
    fn fixpoint_grows_on_non_subalgebra() {
        let rs = RootSystem::build(Family::B, 2).unwrap();
        let alg = LieAlgebra::build(&rs, 7).unwrap();
        let a = alg.root_vector(&Root::new(vec![1, -1])).unwrap();
        let b = alg.root_vector(&Root::new(vec![0, 1])).unwrap();
        let span = [a, b];
        assert!(matches!(
            alg.check_subalgebra(&span).unwrap(),
            Closure::NotClosed { .. }
        ));
        let (s, f) = fixpoint(&alg, &span).unwrap();
        assert_eq!((s, f), (2, 4));
    }
}
