//! Product-form basis candidates `(B_1 + A_1)^{i_1} ⋯ (B_{2m} + A_{2m})^{i_{2m}}`
//! for `U(L)/𝔐_χ` in type `B_l`, and the machinery that checks them.
//!
//! Every `A_β` comes from a template: an optional prefactor (a product of
//! root-vector powers) times a body that is either `1`, the sl₂ Casimir
//! `c + (h_γ+1)² + 4x_{−γ}x_γ`, or a parenthesis `c + Σ ±x_μ x_ν` whose
//! signs are unknowns. The signs are fixed by requiring `[x_α, A_β] = 0`
//! in `U(L)`; nothing here guesses them.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chevalley::{ChevalleyError, LieAlgebra};
use crate::field::{pow_mod, residue};
use crate::linalg::{rank, PrimeField, SparseEchelon, SparseVec};
use crate::pbw::{Enveloping, PbwError, UEElement, Weight};
use crate::redenv::{
    evaluate, invertible_in_rep, is_irreducible, singular_shifts, Irreducibility, IrreducibilityOptions, MatrixRep,
    RedEnvError,
};
use crate::roots::{cartan_integer, Family, Root};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LeeError {
    #[error("construction needs type B of rank at least 2, got {family}{rank}")]
    UnsupportedSystem { family: Family, rank: usize },
    #[error("no admissible B_i family of size {need} over F_{p} (found {found})")]
    ExhaustedField { need: usize, found: usize, p: u64 },
    #[error("{specs} specs but {vectors} B_i vectors")]
    ArityMismatch { specs: usize, vectors: usize },
    #[error("spec for {0} has no commuting sign assignment")]
    UnsolvedSpec(String),
    #[error("spec for {0} has no usable template")]
    NoTemplate(String),
    #[error("characteristic-zero algebra where F_p is required")]
    NeedsModular,
    #[error(transparent)]
    Chevalley(#[from] ChevalleyError),
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error(transparent)]
    RedEnv(#[from] RedEnvError),
}

/// Case (I): `α = ε₁` short; case (II): `α = ε₁ − ε₂` long.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    I,
    II,
}

impl Case {
    pub fn alpha(self, rank: usize) -> Root {
        match self {
            Case::I => Root::unit(rank, 1),
            Case::II => Root::pair(rank, 1, 1, -1, 2),
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "I",
            Case::II => "II",
        })
    }
}

impl FromStr for Case {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "I" | "i" | "1" => Ok(Case::I),
            "II" | "ii" | "2" => Ok(Case::II),
            _ => Err(format!("unknown case {s:?} (expected I or II)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    /// Unknown sign, numbered within its template.
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParenTerm {
    pub sign: Sign,
    pub factors: Vec<Root>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Body {
    Unit,
    /// `c + (h_γ + 1)² + 4 x_{−γ} x_γ`
    Casimir(Root),
    /// `c + Σ ± Π x`
    Paren(Vec<ParenTerm>),
}

impl Body {
    pub fn has_constant(&self) -> bool {
        !matches!(self, Body::Unit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Template {
    pub prefactor: Vec<(Root, u32)>,
    pub body: Body,
}

impl Template {
    fn unit(r: Root, k: u32) -> Self {
        Template {
            prefactor: vec![(r, k)],
            body: Body::Unit,
        }
    }

    pub fn num_slots(&self) -> usize {
        match &self.body {
            Body::Paren(terms) => terms
                .iter()
                .filter_map(|t| if let Sign::Slot(s) = t.sign { Some(s + 1) } else { None })
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Weight of the prefactor; the body has weight zero.
    pub fn weight(&self, dim: usize) -> Root {
        self.prefactor
            .iter()
            .fold(Root::zero(dim), |acc, (r, k)| acc.plus(&r.scaled(*k as i32)))
    }

    /// Machine form in the expression grammar, `±1`, `±2`, … for sign slots.
    pub fn render(&self) -> String {
        let x = |r: &Root| format!("x({})", r.label());
        let mut s = String::new();
        for (r, k) in &self.prefactor {
            s.push_str(&x(r));
            if *k > 1 {
                s.push_str(&format!("^{k}"));
            }
            s.push(' ');
        }
        match &self.body {
            Body::Unit => {
                if s.is_empty() {
                    s.push('1');
                }
            }
            Body::Casimir(g) => {
                let lab = g.label();
                let h = lab.strip_prefix('+').unwrap_or(&lab).to_string();
                s.push_str(&format!("(c + (h({h}) + 1)^2 + 4 {} {})", x(&g.neg()), x(g)));
            }
            Body::Paren(terms) => {
                s.push_str("(c");
                for t in terms {
                    match t.sign {
                        Sign::Plus => s.push_str(" + "),
                        Sign::Slot(k) => s.push_str(&format!(" ±{} ", k + 1)),
                    }
                    s.push_str(&t.factors.iter().map(x).collect::<Vec<_>>().join(" "));
                }
                s.push(')');
            }
        }
        s.trim_end().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fallback {
    Square,
    Cube,
    /// `x_γ^power` attached to the parenthesis borrowed from `from`.
    Attached {
        gamma: Root,
        power: u32,
        from: Root,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variant {
    pub printed: String,
    pub template: Template,
}

/// One `A_β` of the candidate basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ABSpec {
    pub case: Case,
    pub alpha: Root,
    pub target: Root,
    /// Position in the candidate; `None` for templates whose target is not a
    /// root at this rank.
    pub slot: Option<usize>,
    /// The formula as written for this target (empty for fallback-only roots).
    pub printed: String,
    pub template: Option<Template>,
    pub fallback: Option<Fallback>,
    /// Why the printed formula cannot be formed at this rank.
    pub impossible: Option<String>,
    pub variants: Vec<Variant>,
}

impl ABSpec {
    pub fn is_impossible(&self) -> bool {
        self.impossible.is_some()
    }
}

// ---------------------------------------------------------------------------
// templates

/// `Σ c_i ε_{k_i}` in `Z^l`; `None` if an index exceeds `l`.
fn eps(l: usize, terms: &[(i32, usize)]) -> Option<Root> {
    let mut c = vec![0; l];
    for &(a, i) in terms {
        if i == 0 || i > l {
            return None;
        }
        c[i - 1] += a;
    }
    Some(Root::new(c))
}

fn sgn(s: i32) -> &'static str {
    if s > 0 {
        "+"
    } else {
        "-"
    }
}

/// A printed formula before it is placed in a slot.
struct Printed {
    target: Option<Root>,
    target_text: String,
    printed: String,
    prefactor: Result<Vec<(Root, u32)>, String>,
    body: Body,
    variants: Vec<Variant>,
}

fn paren(terms: Vec<(Sign, Vec<Root>)>) -> Body {
    Body::Paren(
        terms
            .into_iter()
            .map(|(sign, factors)| ParenTerm { sign, factors })
            .collect(),
    )
}

/// Quadratic term `x_μ x_{−μ}`.
fn quad(m: &Root) -> Vec<Root> {
    vec![m.clone(), m.neg()]
}

fn missing(l: usize) -> String {
    format!("needs e{} but rank is {l}", l + 1)
}

fn case_one_printed(l: usize) -> Vec<Printed> {
    let e = |t: &[(i32, usize)]| eps(l, t).expect("index within rank");
    let mut out = Vec::new();
    out.push(Printed {
        target: Some(e(&[(1, 1)])),
        target_text: "e1".into(),
        printed: "A_{e1} = x_{e1}".into(),
        prefactor: Ok(vec![(e(&[(1, 1)]), 1)]),
        body: Body::Unit,
        variants: vec![],
    });
    out.push(Printed {
        target: Some(e(&[(-1, 1)])),
        target_text: "-e1".into(),
        printed: "A_{-e1} = c_{-e1} + (h_{e1} + 1)^2 + 4 x_{-e1} x_{e1}".into(),
        prefactor: Ok(vec![]),
        body: Body::Casimir(e(&[(1, 1)])),
        variants: vec![],
    });
    if l < 2 {
        return out;
    }
    for s in [1, -1] {
        let t = sgn(s);
        out.push(Printed {
            target: Some(e(&[(-1, 1), (s, 2)])),
            target_text: format!("-e1{t}e2"),
            printed: format!(
                "A_{{-e1{t}e2}} = x_{{e1{t}e2}}(c_{{-e1{t}e2}} + x_{{-e1{t}e2}} x_{{-(-e1{t}e2)}} ± x_{{{t}e2}} x_{{-({t}e2)}} ± x_{{e1{t}e2}} x_{{-(e1{t}e2)}})"
            ),
            prefactor: Ok(vec![(e(&[(1, 1), (s, 2)]), 1)]),
            body: paren(vec![
                (Sign::Plus, quad(&e(&[(-1, 1), (s, 2)]))),
                (Sign::Slot(0), quad(&e(&[(s, 2)]))),
                (Sign::Slot(1), quad(&e(&[(1, 1), (s, 2)]))),
            ]),
            variants: vec![],
        });
    }
    for j in 3..=l {
        for s in [1, -1] {
            let t = sgn(s);
            let body = paren(vec![
                (Sign::Plus, quad(&e(&[(s, j), (-1, 1)]))),
                (Sign::Slot(0), quad(&e(&[(s, j)]))),
                (Sign::Slot(1), quad(&e(&[(1, 1), (s, j)]))),
            ]);
            let variant = |a: i32, i: usize| {
                let pre = e(&[(a, i), (s, j)]);
                Variant {
                    printed: format!("prefactor x_{{{}e{i}{t}e{j}}}", sgn(a)),
                    template: Template {
                        prefactor: vec![(pre, 1)],
                        body: body.clone(),
                    },
                }
            };
            out.push(Printed {
                target: Some(e(&[(-1, 1), (s, j)])),
                target_text: format!("-e1{t}e{j}"),
                printed: format!(
                    "A_{{-e1{t}e{j}}} = x_{{-e2{t}e{j}}}(c_{{e1{t}e{j}}} + x_{{({t}e{j}-e1)}} x_{{-({t}e{j}-e1)}} ± x_{{{t}e{j}}} x_{{-({t}e{j})}} ± x_{{e1{t}e{j}}} x_{{-(e1{t}e{j})}})"
                ),
                prefactor: Ok(vec![(e(&[(-1, 2), (s, j)]), 1)]),
                body: body.clone(),
                variants: vec![variant(1, 2), variant(1, 1), variant(-1, 1)],
            });
        }
    }
    for s in [1, -1] {
        let t = sgn(s);
        out.push(Printed {
            target: Some(e(&[(s, 2)])),
            target_text: format!("{t}e2"),
            printed: format!(
                "A_{{{t}e2}} = x_{{e3{t}e2}}^2 (c_{{{t}e2}} + x_{{e2}} x_{{-e2}} ± x_{{e1+e2}} x_{{-(e1+e2)}} ± x_{{e2-e1}} x_{{e1-e2}})"
            ),
            prefactor: eps(l, &[(1, 3), (s, 2)]).map(|r| vec![(r, 2)]).ok_or_else(|| missing(l)),
            body: paren(vec![
                (Sign::Plus, quad(&e(&[(1, 2)]))),
                (Sign::Slot(0), quad(&e(&[(1, 1), (1, 2)]))),
                (Sign::Slot(1), quad(&e(&[(1, 2), (-1, 1)]))),
            ]),
            variants: vec![],
        });
    }
    for j in 3..=l {
        out.push(Printed {
            target: Some(e(&[(1, j)])),
            target_text: format!("e{j}"),
            printed: format!(
                "A_{{e{j}}} = x_{{e2+e{j}}}(c_{{e{j}}} + x_{{e{j}}} x_{{-e{j}}} ± x_{{e1+e{j}}} x_{{-(e1+e{j})}} ± x_{{e{j}-e1}} x_{{e1-e{j}}})"
            ),
            prefactor: Ok(vec![(e(&[(1, 2), (1, j)]), 1)]),
            body: paren(vec![
                (Sign::Plus, quad(&e(&[(1, j)]))),
                (Sign::Slot(0), quad(&e(&[(1, 1), (1, j)]))),
                (Sign::Slot(1), quad(&e(&[(1, j), (-1, 1)]))),
            ]),
            variants: vec![],
        });
        out.push(Printed {
            target: Some(e(&[(-1, j)])),
            target_text: format!("-e{j}"),
            printed: format!(
                "A_{{-e{j}}} = x_{{e2-e{j}}}(c_{{-e{j}}} + x_{{-e{j}}} x_{{e{j}}} ± x_{{e1-e{j}}} x_{{-(e1-e{j})}} ± x_{{-e{j}-e1}} x_{{e1+e{j}}})"
            ),
            prefactor: Ok(vec![(e(&[(1, 2), (-1, j)]), 1)]),
            body: paren(vec![
                (Sign::Plus, quad(&e(&[(-1, j)]))),
                (Sign::Slot(0), quad(&e(&[(1, 1), (-1, j)]))),
                (Sign::Slot(1), quad(&e(&[(-1, j), (-1, 1)]))),
            ]),
            variants: vec![],
        });
    }
    out
}

fn case_two_printed(l: usize) -> Vec<Printed> {
    let e = |t: &[(i32, usize)]| eps(l, t);
    let ee = |t: &[(i32, usize)]| eps(l, t).expect("index within rank");
    let mut out = Vec::new();
    out.push(Printed {
        target: Some(ee(&[(1, 1), (-1, 2)])),
        target_text: "e1-e2".into(),
        printed: "A_{e1-e2} = x_{e1-e2}".into(),
        prefactor: Ok(vec![(ee(&[(1, 1), (-1, 2)]), 1)]),
        body: Body::Unit,
        variants: vec![],
    });
    out.push(Printed {
        target: Some(ee(&[(1, 2), (-1, 1)])),
        target_text: "e2-e1".into(),
        printed: "A_{e2-e1} = c_{e2-e1} + (h_{e1-e2} + 1)^2 + 4 x_{e2-e1} x_{e1-e2}".into(),
        prefactor: Ok(vec![]),
        body: Body::Casimir(ee(&[(1, 1), (-1, 2)])),
        variants: vec![],
    });
    // parenthesis shared by the e2±ek and -(e1±ek) families
    let pair_paren = |s: i32, k: usize| -> Option<Body> {
        Some(paren(vec![
            (Sign::Plus, quad(&e(&[(1, 2), (s, k)])?)),
            (Sign::Slot(0), quad(&e(&[(1, 1), (s, k)])?)),
        ]))
    };
    for s in [1, -1] {
        let t = sgn(s);
        let body = pair_paren(s, 3);
        out.push(Printed {
            target: e(&[(1, 2), (s, 3)]),
            target_text: format!("e2{t}e3"),
            printed: format!(
                "A_{{e2{t}e3}} = x_{{{t}e3}}(c_{{e2{t}e3}} + x_{{e2{t}e3}} x_{{-(e2{t}e3)}} ± x_{{e1{t}e3}} x_{{-(e1{t}e3)}})"
            ),
            prefactor: e(&[(s, 3)]).map(|r| vec![(r, 1)]).ok_or_else(|| missing(l)),
            body: body.clone().unwrap_or(Body::Unit),
            variants: vec![],
        });
        out.push(Printed {
            target: e(&[(-1, 1), (-s, 3)]),
            target_text: format!("-(e1{t}e3)"),
            printed: format!(
                "A_{{-(e1{t}e3)}} = x_{{-({t}e3)}}(c_{{-(e1{t}e3)}} + x_{{e2{t}e3}} x_{{-(e2{t}e3)}} ± x_{{e1{t}e3}} x_{{-(e1{t}e3)}})"
            ),
            prefactor: e(&[(-s, 3)]).map(|r| vec![(r, 1)]).ok_or_else(|| missing(l)),
            body: body.unwrap_or(Body::Unit),
            variants: vec![],
        });
    }
    for k in 4..=l {
        for s in [1, -1] {
            let t = sgn(s);
            let body = pair_paren(s, k).expect("index within rank");
            out.push(Printed {
                target: Some(ee(&[(1, 2), (s, k)])),
                target_text: format!("e2{t}e{k}"),
                printed: format!(
                    "A_{{e2{t}e{k}}} = x_{{e3{t}e{k}}}(c_{{e2{t}e{k}}} + x_{{e2{t}e{k}}} x_{{-(e2{t}e{k})}} ± x_{{e1{t}e{k}}} x_{{-(e1{t}e{k})}})"
                ),
                prefactor: Ok(vec![(ee(&[(1, 3), (s, k)]), 1)]),
                body: body.clone(),
                variants: vec![],
            });
            out.push(Printed {
                target: Some(ee(&[(-1, 1), (-s, k)])),
                target_text: format!("-(e1{t}e{k})"),
                printed: format!(
                    "A_{{-(e1{t}e{k})}} = x_{{-(e3{t}e{k})}}(c_{{-(e1{t}e{k})}} + x_{{e2{t}e{k}}} x_{{-(e2{t}e{k})}} ± x_{{e1{t}e{k}}} x_{{-(e1{t}e{k})}})"
                ),
                prefactor: Ok(vec![(ee(&[(-1, 3), (-s, k)]), 1)]),
                body,
                variants: vec![],
            });
        }
    }
    let a_e2 = Printed {
        target: Some(ee(&[(1, 2)])),
        target_text: "e2".into(),
        printed: "A_{e2} = x_{e1}(c_{e2} + x_{e2} x_{-e2} ± x_{e1} x_{-e1})".into(),
        prefactor: Ok(vec![(ee(&[(1, 1)]), 1)]),
        body: paren(vec![
            (Sign::Plus, quad(&ee(&[(1, 2)]))),
            (Sign::Slot(0), quad(&ee(&[(1, 1)]))),
        ]),
        variants: vec![],
    };
    let mut last_pos = Printed {
        target: Some(ee(&[(1, l)])),
        target_text: format!("e{l}"),
        printed: format!("A_{{e{l}}} = x_{{e{l}}}^2"),
        prefactor: Ok(vec![(ee(&[(1, l)]), 2)]),
        body: Body::Unit,
        variants: vec![],
    };
    if l == 2 {
        // both formulas name ε₂; the square wins, the other is kept for comparison
        last_pos.variants.push(Variant {
            printed: a_e2.printed.clone(),
            template: Template {
                prefactor: a_e2.prefactor.clone().unwrap(),
                body: a_e2.body.clone(),
            },
        });
    } else {
        out.push(a_e2);
    }
    out.push(Printed {
        target: Some(ee(&[(-1, 1)])),
        target_text: "-e1".into(),
        printed: "A_{-e1} = x_{-e2}(c_{-e1} + x_{-e1} x_{e1} ± x_{-e2} x_{e2})".into(),
        prefactor: Ok(vec![(ee(&[(-1, 2)]), 1)]),
        body: paren(vec![
            (Sign::Plus, quad(&ee(&[(-1, 1)]))),
            (Sign::Slot(0), quad(&ee(&[(-1, 2)]))),
        ]),
        variants: vec![],
    });
    out.push(last_pos);
    out.push(Printed {
        target: Some(ee(&[(-1, l)])),
        target_text: format!("-e{l}"),
        printed: format!("A_{{-e{l}}} = x_{{-e{l}}}^2"),
        prefactor: Ok(vec![(ee(&[(-1, l)]), 2)]),
        body: Body::Unit,
        variants: vec![],
    });
    out
}

/// Slot targets: the explicitly listed roots, then the rest in canonical order.
fn slot_targets(alg: &LieAlgebra, case: Case) -> Vec<Root> {
    let rs = alg.root_system();
    let l = rs.rank();
    let mut explicit = Vec::new();
    if case == Case::I {
        explicit.push(Root::unit(l, 1));
        explicit.push(Root::unit(l, 1).neg());
    }
    for i in 1..l {
        let a = Root::pair(l, 1, i, -1, i + 1);
        explicit.push(a.clone());
        explicit.push(a.neg());
    }
    explicit.push(Root::unit(l, l));
    explicit.push(Root::unit(l, l).neg());
    let mut out = Vec::new();
    for r in explicit {
        if !out.contains(&r) {
            out.push(r);
        }
    }
    for r in rs.roots() {
        if !out.contains(r) {
            out.push(r.clone());
        }
    }
    out
}

fn commutes(env: &Enveloping<'_>, a: &UEElement, b: &UEElement) -> Result<bool, LeeError> {
    Ok(env.commutator(a, b)?.is_zero())
}

/// Build the `A_β` list for `α = ε₁`.
pub fn build_case_i(alg: &LieAlgebra) -> Result<Vec<ABSpec>, LeeError> {
    build_case(alg, Case::I)
}

/// Build the `A_β` list for `α = ε₁ − ε₂`.
pub fn build_case_ii(alg: &LieAlgebra) -> Result<Vec<ABSpec>, LeeError> {
    build_case(alg, Case::II)
}

pub fn build_case(alg: &LieAlgebra, case: Case) -> Result<Vec<ABSpec>, LeeError> {
    let rs = alg.root_system();
    let l = rs.rank();
    if rs.family() != Family::B || l < 2 {
        return Err(LeeError::UnsupportedSystem {
            family: rs.family(),
            rank: l,
        });
    }
    let printed = match case {
        Case::I => case_one_printed(l),
        Case::II => case_two_printed(l),
    };
    assemble_specs(alg, case, case.alpha(l), printed, slot_targets(alg, case))
}

/// The two-element sl₂ analogue (`A_{ε₁} = x_{ε₁}`, `A_{−ε₁}` Casimir), used
/// as the rank-one cross-check of the whole pipeline.
pub fn build_sl2(alg: &LieAlgebra) -> Result<Vec<ABSpec>, LeeError> {
    let rs = alg.root_system();
    if rs.family() != Family::A || rs.rank() != 1 {
        return Err(LeeError::UnsupportedSystem {
            family: rs.family(),
            rank: rs.rank(),
        });
    }
    let printed = case_one_printed(1);
    let e1 = Root::unit(1, 1);
    assemble_specs(alg, Case::I, e1.clone(), printed, vec![e1.clone(), e1.neg()])
}

fn assemble_specs(
    alg: &LieAlgebra,
    case: Case,
    alpha: Root,
    printed: Vec<Printed>,
    targets: Vec<Root>,
) -> Result<Vec<ABSpec>, LeeError> {
    let env = Enveloping::new(alg);
    let rs = alg.root_system();
    let xa = env.root_vector(&alpha)?;
    let gamma = rs
        .positive_roots()
        .iter()
        .find(|g| {
            **g != alpha && {
                let a = alg.root_vector_index(&alpha).unwrap();
                let b = alg.root_vector_index(g).unwrap();
                alg.bracket_basis(a, b).is_empty()
            }
        })
        .cloned();
    let find = |r: &Root| printed.iter().find(|p| p.target.as_ref() == Some(r));

    let mut specs = Vec::new();
    for (slot, target) in targets.iter().enumerate() {
        let mut spec = ABSpec {
            case,
            alpha: alpha.clone(),
            target: target.clone(),
            slot: Some(slot),
            printed: String::new(),
            template: None,
            fallback: None,
            impossible: None,
            variants: vec![],
        };
        if let Some(p) = find(target) {
            spec.printed = p.printed.clone();
            spec.variants = p.variants.clone();
            match &p.prefactor {
                Ok(pre) => {
                    spec.template = Some(Template {
                        prefactor: pre.clone(),
                        body: p.body.clone(),
                    })
                }
                Err(why) => {
                    spec.impossible = Some(why.clone());
                    if let Some(g) = &gamma {
                        spec.fallback = Some(Fallback::Attached {
                            gamma: g.clone(),
                            power: 2,
                            from: target.clone(),
                        });
                        spec.template = Some(Template {
                            prefactor: vec![(g.clone(), 2)],
                            body: p.body.clone(),
                        });
                    }
                }
            }
        } else {
            let x = env.root_vector(target)?;
            if commutes(&env, &xa, &env.pow(&x, 2)?)? {
                spec.fallback = Some(Fallback::Square);
                spec.template = Some(Template::unit(target.clone(), 2));
            } else if commutes(&env, &xa, &env.pow(&x, 3)?)? {
                spec.fallback = Some(Fallback::Cube);
                spec.template = Some(Template::unit(target.clone(), 3));
            } else if let (Some(p), Some(g)) = (find(&target.neg()), &gamma) {
                if p.body.has_constant() {
                    spec.fallback = Some(Fallback::Attached {
                        gamma: g.clone(),
                        power: 2,
                        from: target.neg(),
                    });
                    spec.template = Some(Template {
                        prefactor: vec![(g.clone(), 2)],
                        body: p.body.clone(),
                    });
                }
            }
        }
        specs.push(spec);
    }
    // printed formulas whose target is not a root here
    for p in &printed {
        if p.target.as_ref().is_none_or(|t| !rs.contains(t)) {
            specs.push(ABSpec {
                case,
                alpha: alpha.clone(),
                target: p.target.clone().unwrap_or_else(|| Root::zero(rs.ambient_dim())),
                slot: None,
                printed: p.printed.clone(),
                template: None,
                fallback: None,
                impossible: Some(format!("target {} {}", p.target_text, missing(rs.rank()))),
                variants: vec![],
            });
        }
    }
    Ok(specs)
}

// ---------------------------------------------------------------------------
// expansion and sign solving

/// `A = prefactor · body` with the given signs (`true` = `+`) and constant.
pub fn expand(env: &Enveloping<'_>, t: &Template, signs: &[bool], c: i64) -> Result<UEElement, LeeError> {
    let mut pre = env.one();
    for (r, k) in &t.prefactor {
        let x = env.root_vector(r)?;
        pre = env.multiply(&pre, &env.pow(&x, *k)?)?;
    }
    let body = body_element(env, &t.body, signs, c)?;
    Ok(env.multiply(&pre, &body)?)
}

/// The invertible part: the Casimir or parenthesis including its constant.
pub fn body_element(env: &Enveloping<'_>, body: &Body, signs: &[bool], c: i64) -> Result<UEElement, LeeError> {
    let alg = env.algebra();
    Ok(match body {
        Body::Unit => env.one(),
        Body::Casimir(g) => {
            let h = env.from_lie(&alg.coroot_expand(g)?)?;
            let h1 = env.add_scalar(&h, 1)?;
            let fe = env.multiply(&env.root_vector(&g.neg())?, &env.root_vector(g)?)?;
            let s = env.combine(1, &env.multiply(&h1, &h1)?, 4, &fe)?;
            env.add_scalar(&s, c)?
        }
        Body::Paren(terms) => {
            let mut s = env.scalar(c);
            for t in terms {
                let sign = match t.sign {
                    Sign::Plus => 1,
                    Sign::Slot(k) => {
                        if signs[k] {
                            1
                        } else {
                            -1
                        }
                    }
                };
                let mut m = env.one();
                for r in &t.factors {
                    m = env.multiply(&m, &env.root_vector(r)?)?;
                }
                s = env.combine(1, &s, sign, &m)?;
            }
            s
        }
    })
}

/// All `2^k` sign assignments, `+` first.
pub fn assignments(k: usize) -> Vec<Vec<bool>> {
    (0..1usize << k)
        .map(|mask| (0..k).map(|i| mask >> (k - 1 - i) & 1 == 0).collect())
        .collect()
}

pub fn format_signs(signs: &[bool]) -> String {
    signs.iter().map(|&s| if s { '+' } else { '-' }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignVerdict {
    /// Every assignment whose commutator with `x_α` vanishes; `element` uses
    /// the first of them and `c = 0`.
    Solved {
        assignments: Vec<Vec<bool>>,
        element: UEElement,
    },
    /// The nonzero commutator `[x_α, A]` for each assignment.
    NoSolution { residues: Vec<(Vec<bool>, UEElement)> },
}

impl SignVerdict {
    pub fn is_solved(&self) -> bool {
        matches!(self, SignVerdict::Solved { .. })
    }

    pub fn solved_assignments(&self) -> &[Vec<bool>] {
        match self {
            SignVerdict::Solved { assignments, .. } => assignments,
            SignVerdict::NoSolution { .. } => &[],
        }
    }

    /// Solutions admitted when all signs of a formula are one shared sign.
    pub fn correlated_assignments(&self) -> Vec<Vec<bool>> {
        self.solved_assignments()
            .iter()
            .filter(|a| a.windows(2).all(|w| w[0] == w[1]))
            .cloned()
            .collect()
    }
}

/// Enumerate sign assignments of a template against `x_α`, at constant `c`.
pub fn solve_template(env: &Enveloping<'_>, alpha: &Root, t: &Template, c: i64) -> Result<SignVerdict, LeeError> {
    let xa = env.root_vector(alpha)?;
    let mut solved = Vec::new();
    let mut residues = Vec::new();
    let mut first = None;
    for signs in assignments(t.num_slots()) {
        let a = expand(env, t, &signs, c)?;
        let r = env.commutator(&xa, &a)?;
        if r.is_zero() {
            if first.is_none() {
                first = Some(a);
            }
            solved.push(signs);
        } else {
            residues.push((signs, r));
        }
    }
    Ok(match first {
        Some(element) => SignVerdict::Solved {
            assignments: solved,
            element,
        },
        None => SignVerdict::NoSolution { residues },
    })
}

/// Signs for a spec, with `c_β = 0`.
pub fn solve_signs(env: &Enveloping<'_>, spec: &ABSpec) -> Result<SignVerdict, LeeError> {
    let t = spec
        .template
        .as_ref()
        .ok_or_else(|| LeeError::NoTemplate(spec.target.label()))?;
    solve_template(env, &spec.alpha, t, 0)
}

// ---------------------------------------------------------------------------
// the B_i family

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BiMethod {
    /// Points `(1, t, …, t^{l−1})` at the listed parameters.
    MomentCurve {
        params: Vec<u64>,
    },
    RandomSearch {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiFamily {
    pub alpha: Root,
    pub p: u64,
    /// Coefficients on `h_{α_1}, …, h_{α_l}`.
    pub vectors: Vec<Vec<u64>>,
    pub method: BiMethod,
}

/// `α(B) = Σ_j b_j ⟨α, α_j∨⟩` in `F_p`.
pub fn alpha_value(alg: &LieAlgebra, alpha: &Root, b: &[u64]) -> u64 {
    let p = alg.characteristic();
    let base = alg.root_system().base();
    let s: i64 = b
        .iter()
        .zip(base)
        .map(|(&bj, aj)| bj as i64 * cartan_integer(alpha, aj))
        .sum();
    residue(s, p)
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == k {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            if !rec(i + 1, n, k, cur, f) {
                return false;
            }
            cur.pop();
        }
        true
    }
    rec(0, n, k, &mut Vec::new(), f)
}

fn independent(p: u64, vs: &[&Vec<u64>]) -> bool {
    let rows: Vec<Vec<u64>> = vs.iter().map(|v| (*v).clone()).collect();
    rank(&PrimeField { p }, &rows) == rows.len()
}

/// `2m` coefficient vectors with every `l`-subset independent and `α(B_i) ≠ 0`.
pub fn gen_bi(alg: &LieAlgebra, alpha: &Root, seed: u64) -> Result<BiFamily, LeeError> {
    gen_bi_sized(alg, alpha, 2 * alg.num_positive(), seed)
}

/// As [`gen_bi`] with `need` vectors, for candidates restricted to fewer slots.
pub fn gen_bi_sized(alg: &LieAlgebra, alpha: &Root, need: usize, seed: u64) -> Result<BiFamily, LeeError> {
    let p = alg.characteristic();
    if p == 0 {
        return Err(LeeError::NeedsModular);
    }
    let l = alg.rank();
    let point = |t: u64| -> Vec<u64> {
        if l == 1 {
            vec![t]
        } else {
            (0..l as u64).map(|k| pow_mod(t, k, p)).collect()
        }
    };
    let params: Vec<u64> = (if l == 1 { 1 } else { 0 }..p)
        .filter(|&t| alpha_value(alg, alpha, &point(t)) != 0)
        .take(need)
        .collect();
    let fam = if params.len() == need {
        BiFamily {
            alpha: alpha.clone(),
            p,
            vectors: params.iter().map(|&t| point(t)).collect(),
            method: BiMethod::MomentCurve { params },
        }
    } else {
        random_family(alg, alpha, need, seed)?
    };
    let check = check_bi(alg, &fam);
    assert!(check.all_pass(), "generated B_i family failed its own check");
    Ok(fam)
}

fn random_family(alg: &LieAlgebra, alpha: &Root, need: usize, seed: u64) -> Result<BiFamily, LeeError> {
    let p = alg.characteristic();
    let l = alg.rank();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen: Vec<Vec<u64>> = Vec::new();
    let mut attempts = 0;
    while chosen.len() < need && attempts < 20_000 {
        attempts += 1;
        let v: Vec<u64> = (0..l).map(|_| rng.gen_range(0..p)).collect();
        if alpha_value(alg, alpha, &v) == 0 {
            continue;
        }
        let k = l.saturating_sub(1).min(chosen.len());
        let ok = for_each_subset(chosen.len(), k, &mut |s| {
            let mut vs: Vec<&Vec<u64>> = s.iter().map(|&i| &chosen[i]).collect();
            vs.push(&v);
            independent(p, &vs)
        });
        if ok {
            chosen.push(v);
        }
    }
    if chosen.len() < need {
        return Err(LeeError::ExhaustedField {
            need,
            found: chosen.len(),
            p,
        });
    }
    Ok(BiFamily {
        alpha: alpha.clone(),
        p,
        vectors: chosen,
        method: BiMethod::RandomSearch { seed },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiCheck {
    pub subset_size: usize,
    pub subsets_checked: usize,
    pub subsets_independent: usize,
    pub alpha_values: Vec<u64>,
    pub alpha_nonzero: usize,
}

impl BiCheck {
    pub fn all_pass(&self) -> bool {
        self.subsets_checked == self.subsets_independent && self.alpha_nonzero == self.alpha_values.len()
    }
}

/// Exhaustive check of both conditions.
pub fn check_bi(alg: &LieAlgebra, fam: &BiFamily) -> BiCheck {
    let k = alg.rank().min(fam.vectors.len());
    let mut checked = 0;
    let mut good = 0;
    for_each_subset(fam.vectors.len(), k, &mut |s| {
        checked += 1;
        let vs: Vec<&Vec<u64>> = s.iter().map(|&i| &fam.vectors[i]).collect();
        if independent(fam.p, &vs) {
            good += 1;
        }
        true
    });
    let alpha_values: Vec<u64> = fam.vectors.iter().map(|v| alpha_value(alg, &fam.alpha, v)).collect();
    let alpha_nonzero = alpha_values.iter().filter(|&&a| a != 0).count();
    BiCheck {
        subset_size: k,
        subsets_checked: checked,
        subsets_independent: good,
        alpha_values,
        alpha_nonzero,
    }
}

/// `B = Σ b_j h_{α_j}` in `U(L)`.
pub fn bi_element(env: &Enveloping<'_>, b: &[u64]) -> Result<UEElement, LeeError> {
    let alg = env.algebra();
    let terms: Vec<(usize, i64)> = b
        .iter()
        .enumerate()
        .map(|(j, &v)| (alg.coroot_index(j), v as i64))
        .collect();
    Ok(env.from_lie(&alg.element(&terms))?)
}

// ---------------------------------------------------------------------------
// candidates

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidatePair {
    pub slot: usize,
    pub target: Root,
    pub b: Vec<u64>,
    pub signs: Vec<bool>,
    pub c: i64,
    /// Whether the chosen `c` makes the body invertible in the reference rep
    /// (`None` without a rep or without a body constant).
    pub c_invertible: Option<bool>,
    pub a: UEElement,
    /// `B_i + A_i`
    pub factor: UEElement,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeeCandidate {
    pub case: Case,
    pub p: u64,
    pub pairs: Vec<CandidatePair>,
}

impl LeeCandidate {
    /// Number of exponent tuples, `p^{|pairs|}`.
    pub fn size(&self) -> u128 {
        (self.p as u128).pow(self.pairs.len() as u32)
    }
}

/// Pair every slot spec with its `B_i`. All specs must be solved.
pub fn assemble(
    env: &Enveloping<'_>,
    specs: &[ABSpec],
    verdicts: &[SignVerdict],
    bi: &BiFamily,
    rep: Option<&MatrixRep>,
) -> Result<LeeCandidate, LeeError> {
    if specs.len() != bi.vectors.len() {
        return Err(LeeError::ArityMismatch {
            specs: specs.len(),
            vectors: bi.vectors.len(),
        });
    }
    let slots: Vec<usize> = (0..specs.len()).collect();
    assemble_subset(env, specs, verdicts, bi, rep, &slots)
}

/// As [`assemble`], restricted to the listed slot positions; `bi` carries
/// one vector per kept slot, in order. Only those specs need to be solved.
pub fn assemble_subset(
    env: &Enveloping<'_>,
    specs: &[ABSpec],
    verdicts: &[SignVerdict],
    bi: &BiFamily,
    rep: Option<&MatrixRep>,
    keep: &[usize],
) -> Result<LeeCandidate, LeeError> {
    if keep.len() != bi.vectors.len() || verdicts.len() != specs.len() {
        return Err(LeeError::ArityMismatch {
            specs: keep.len(),
            vectors: bi.vectors.len(),
        });
    }
    let p = env.algebra().characteristic();
    if p == 0 {
        return Err(LeeError::NeedsModular);
    }
    let mut pairs = Vec::new();
    for (pos, &i) in keep.iter().enumerate() {
        let spec = &specs[i];
        let t = spec
            .template
            .as_ref()
            .ok_or_else(|| LeeError::NoTemplate(spec.target.label()))?;
        let signs = match &verdicts[i] {
            SignVerdict::Solved { assignments, .. } => assignments[0].clone(),
            SignVerdict::NoSolution { .. } => return Err(LeeError::UnsolvedSpec(spec.target.label())),
        };
        let (c, c_invertible) = match (t.body.has_constant(), rep) {
            (true, Some(rep)) => {
                let mut found = None;
                for c in 0..p as i64 {
                    if invertible_in_rep(&body_element(env, &t.body, &signs, c)?, rep)? {
                        found = Some(c);
                        break;
                    }
                }
                (found.unwrap_or(0), Some(found.is_some()))
            }
            _ => (0, None),
        };
        let a = expand(env, t, &signs, c)?;
        let factor = env.add(&bi_element(env, &bi.vectors[pos])?, &a)?;
        pairs.push(CandidatePair {
            slot: i,
            target: spec.target.clone(),
            b: bi.vectors[pos].clone(),
            signs,
            c,
            c_invertible,
            a,
            factor,
        });
    }
    Ok(LeeCandidate {
        case: specs.first().map_or(Case::I, |s| s.case),
        p,
        pairs,
    })
}

/// Keep the listed pair positions.
pub fn restrict(cand: &LeeCandidate, keep: &[usize]) -> LeeCandidate {
    LeeCandidate {
        case: cand.case,
        p: cand.p,
        pairs: keep.iter().map(|&i| cand.pairs[i].clone()).collect(),
    }
}

/// Exponent tuples of length `n` with entries `< p` and total at most
/// `bound`, by total degree and then lexicographically descending.
pub fn exponent_tuples(n: usize, bound: u32, p: u64) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for d in 0..=bound {
        let mut level = Vec::new();
        fn rec(i: usize, left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if i + 1 == cur.len() {
                if left <= max {
                    cur[i] = left;
                    out.push(cur.clone());
                }
                return;
            }
            for e in (0..=left.min(max)).rev() {
                cur[i] = e;
                rec(i + 1, left - e, max, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            if d == 0 {
                out.push(Vec::new());
            }
            continue;
        }
        rec(0, d, (p - 1) as u32, &mut vec![0; n], &mut level);
        out.extend(level);
    }
    out
}

/// `Π_j (B_j + A_j)^{e_j}` in slot order.
pub fn candidate_element(env: &Enveloping<'_>, cand: &LeeCandidate, exps: &[u32]) -> Result<UEElement, LeeError> {
    let mut u = env.one();
    for (pair, &e) in cand.pairs.iter().zip(exps) {
        if e > 0 {
            u = env.multiply(&u, &env.pow(&pair.factor, e)?)?;
        }
    }
    Ok(u)
}

/// `u · v` for a vector `v` of the representation space.
pub fn apply_element(u: &UEElement, rep: &MatrixRep, v: &[(u32, u32)]) -> SparseVec {
    let p = rep.modulus();
    let mut out: SparseVec = Vec::new();
    for (m, c) in u.terms() {
        let mut w: SparseVec = v.to_vec();
        for g in m.word().into_iter().rev() {
            w = rep.generator(g).apply(&w);
            if w.is_empty() {
                break;
            }
        }
        out = crate::linalg::axpy(p, residue(c, p), &w, &out);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub bound: u32,
    pub count: usize,
    pub rank: usize,
    pub permuted_rank: usize,
    pub distinct_normal_forms: bool,
    pub duplicate_pairs: Vec<(usize, usize)>,
    /// `probe` when random probe vectors already certify full rank, `full`
    /// when every column of every image was used.
    pub method: String,
    /// Linear relations among the images: `(exponent tuple, coefficient)`.
    pub kernel: Vec<Vec<(Vec<u32>, u64)>>,
}

impl IndependenceReport {
    pub fn full_rank(&self) -> bool {
        self.rank == self.count
    }
}

/// Rank of the candidate elements with `Σ i_j ≤ bound` inside `End(V)`.
pub fn verify_independence_truncated(
    alg: &LieAlgebra,
    cand: &LeeCandidate,
    rep: &MatrixRep,
    bound: u32,
    seed: u64,
) -> Result<IndependenceReport, LeeError> {
    if rep.algebra() != alg.id() {
        return Err(RedEnvError::MixedAlgebras.into());
    }
    let tuples = exponent_tuples(cand.pairs.len(), bound, cand.p);
    let elements: Vec<UEElement> = tuples
        .par_iter()
        .map_init(|| Enveloping::new(alg), |env, t| candidate_element(env, cand, t))
        .collect::<Result<_, _>>()?;

    let mut duplicate_pairs = Vec::new();
    for i in 0..elements.len() {
        for j in (i + 1)..elements.len() {
            if elements[i] == elements[j] {
                duplicate_pairs.push((i, j));
            }
        }
    }

    let dim = rep.dim();
    let p = rep.modulus();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes: Vec<SparseVec> = (0..4)
        .map(|_| {
            (0..dim)
                .filter_map(|i| {
                    let x = rng.gen_range(0..p);
                    (x != 0).then_some((i as u32, x as u32))
                })
                .collect()
        })
        .collect();
    let probe_images: Vec<SparseVec> = elements
        .par_iter()
        .map(|u| {
            let mut v = Vec::new();
            for (k, pr) in probes.iter().enumerate() {
                v.extend(
                    apply_element(u, rep, pr)
                        .into_iter()
                        .map(|(i, x)| (i + (k * dim) as u32, x)),
                );
            }
            v
        })
        .collect();
    let (rank0, _) = tagged_rank(p, &probe_images, (probes.len() * dim) as u32);

    let (method, images) = if rank0 == elements.len() {
        ("probe".to_string(), probe_images)
    } else {
        let full: Vec<SparseVec> = elements
            .par_iter()
            .map(|u| -> Result<SparseVec, LeeError> {
                let m = evaluate(u, rep)?;
                let mut v = Vec::new();
                for (j, col) in m.columns().iter().enumerate() {
                    v.extend(col.iter().map(|&(i, x)| ((j * dim) as u32 + i, x)));
                }
                Ok(v)
            })
            .collect::<Result<_, _>>()?;
        ("full".to_string(), full)
    };
    let offset = if method == "probe" {
        probes.len() * dim
    } else {
        dim * dim
    } as u32;
    let (rank, relations) = tagged_rank(p, &images, offset);

    let mut order: Vec<usize> = (0..images.len()).collect();
    order.shuffle(&mut rng);
    let permuted: Vec<SparseVec> = order.iter().map(|&i| images[i].clone()).collect();
    let (permuted_rank, _) = tagged_rank(p, &permuted, offset);

    let kernel = relations
        .into_iter()
        .map(|rel| rel.into_iter().map(|(i, c)| (tuples[i].clone(), c)).collect())
        .collect();
    Ok(IndependenceReport {
        bound,
        count: elements.len(),
        rank,
        permuted_rank,
        distinct_normal_forms: duplicate_pairs.is_empty(),
        duplicate_pairs,
        method,
        kernel,
    })
}

/// Rank of the vectors plus the linear relations found among them. Each
/// vector is tagged with a unit coordinate beyond `offset` so dependent
/// ones reduce to pure tags.
fn tagged_rank(p: u64, vectors: &[SparseVec], offset: u32) -> (usize, Vec<Vec<(usize, u64)>>) {
    let mut ech = SparseEchelon::new(p);
    let mut relations = Vec::new();
    let mut rank = 0;
    for (i, v) in vectors.iter().enumerate() {
        let mut tagged = v.clone();
        tagged.push((offset + i as u32, 1));
        let r = ech.reduce(&tagged);
        match r.first() {
            Some(&(lead, _)) if lead < offset => rank += 1,
            Some(_) => relations.push(r.iter().map(|&(j, c)| ((j - offset) as usize, c as u64)).collect()),
            None => {}
        }
        ech.insert(&tagged);
    }
    (rank, relations)
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvertibilityEntry {
    pub target: String,
    pub part: String,
    /// Every `c ∈ F_p` for which the part is singular in the rep.
    pub singular_c: Vec<u64>,
    pub p: u64,
}

/// Singular constants of the body of `spec` (signs from its verdict).
pub fn invertibility_scan(
    env: &Enveloping<'_>,
    spec: &ABSpec,
    signs: &[bool],
    rep: &MatrixRep,
) -> Result<Option<InvertibilityEntry>, LeeError> {
    let Some(t) = &spec.template else { return Ok(None) };
    if !t.body.has_constant() {
        return Ok(None);
    }
    let body = body_element(env, &t.body, signs, 0)?;
    let singular_c = singular_shifts(&body, rep)?;
    let part = Template {
        prefactor: vec![],
        body: t.body.clone(),
    }
    .render();
    Ok(Some(InvertibilityEntry {
        target: spec.target.label(),
        part,
        singular_c,
        p: rep.modulus(),
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeeConditions {
    pub rep_dim: usize,
    pub expected_dim: u128,
    pub dim_matches: bool,
    /// `p^{2m}`: dimension of `End(V)` when `V` is irreducible.
    pub algebra_dim: u128,
    pub irreducibility: String,
    pub condition_i_established: bool,
    pub independence: IndependenceReport,
    pub invertibility: Vec<InvertibilityEntry>,
}

/// Checks of both defining conditions that are feasible on one rep.
pub fn check_lee_conditions(
    alg: &LieAlgebra,
    specs: &[ABSpec],
    cand: &LeeCandidate,
    rep: &MatrixRep,
    bound: u32,
    irr: &IrreducibilityOptions,
) -> Result<LeeConditions, LeeError> {
    let env = Enveloping::new(alg);
    let p = alg.characteristic() as u128;
    let m = alg.num_positive() as u32;
    let expected_dim = p.pow(m);
    let seed = irr.seed;
    let verdict = is_irreducible(rep, irr);
    let irreducibility = match &verdict {
        Irreducibility::Irreducible => "irreducible".to_string(),
        Irreducibility::Submodule(b) => format!("submodule of dimension {}", b.len()),
        Irreducibility::Inconclusive => "inconclusive".to_string(),
    };
    let dim_matches = rep.dim() as u128 == expected_dim;
    let independence = verify_independence_truncated(alg, cand, rep, bound, seed)?;
    let mut invertibility = Vec::new();
    for pair in &cand.pairs {
        if let Some(e) = invertibility_scan(&env, &specs[pair.slot], &pair.signs, rep)? {
            invertibility.push(e);
        }
    }
    Ok(LeeConditions {
        rep_dim: rep.dim(),
        expected_dim,
        dim_matches,
        algebra_dim: expected_dim * expected_dim,
        condition_i_established: dim_matches && verdict == Irreducibility::Irreducible,
        irreducibility,
        independence,
        invertibility,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueReport {
    pub signs: String,
    pub normal_form: String,
    pub weight: String,
    /// `α + weight(A)`, which a nonzero residue must carry.
    pub expected_weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub rep: String,
    pub rep_dim: usize,
    /// Symbolic and matrix verdicts agree for this spec.
    pub consistent: bool,
    /// Assignments whose commutator matrix is nonzero.
    pub nonzero_in_rep: Vec<String>,
    /// Assignments whose symbolic residue vanishes but whose matrix does not.
    pub contradictions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantReport {
    pub printed: String,
    pub machine: String,
    pub solved_signs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecReport {
    pub slot: Option<usize>,
    pub target: String,
    pub printed: String,
    pub machine: Option<String>,
    pub status: String,
    pub fallback: Option<String>,
    pub impossible: Option<String>,
    pub weight: Option<String>,
    pub independent_solutions: Vec<String>,
    pub correlated_solutions: Vec<String>,
    /// Verdict unchanged when the constant is 1 instead of 0.
    pub stable_under_c: Option<bool>,
    pub residues: Vec<ResidueReport>,
    pub oracle: Option<OracleReport>,
    pub variants: Vec<VariantReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiReport {
    pub general_position: String,
    pub family: Option<BiFamily>,
    pub check: Option<BiCheck>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub specs: usize,
    pub slots: usize,
    pub solved: usize,
    pub no_solution: usize,
    pub impossible_for_rank: usize,
    pub uncovered: usize,
    pub solvable_independent: usize,
    pub solvable_correlated: usize,
    pub oracle_consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeeReport {
    pub schema: u32,
    pub family: String,
    pub rank: usize,
    pub p: u64,
    pub case: Case,
    pub alpha: String,
    pub seed: u64,
    pub specs: Vec<SpecReport>,
    pub bi: BiReport,
    pub summary: Summary,
}

pub const GENERAL_POSITION_READING: &str =
    "every l-subset of the B_i coefficient vectors is linearly independent in F_p^l";

fn describe_fallback(f: &Fallback) -> String {
    match f {
        Fallback::Square => "x_beta^2".into(),
        Fallback::Cube => "x_beta^3".into(),
        Fallback::Attached { gamma, power, from } => {
            format!(
                "x({})^{power} attached to the parenthesis of A_{}",
                gamma.label(),
                from.label()
            )
        }
    }
}

fn weight_text(env: &Enveloping<'_>, u: &UEElement) -> String {
    match env.weight(u) {
        Weight::Homogeneous(r) => r.label(),
        Weight::NonHomogeneous => "inhomogeneous".into(),
        Weight::Zero => "zero".into(),
    }
}

/// Symbolic verdict versus the commutator of the matrices in `rep`.
fn oracle(env: &Enveloping<'_>, spec: &ABSpec, t: &Template, rep: &MatrixRep) -> Result<OracleReport, LeeError> {
    let xa = env.root_vector(&spec.alpha)?;
    let rx = evaluate(&xa, rep)?;
    let mut nonzero = Vec::new();
    let mut contradictions = Vec::new();
    for signs in assignments(t.num_slots()) {
        let a = expand(env, t, &signs, 0)?;
        let ra = evaluate(&a, rep)?;
        let matrix_zero = rx.commutator(&ra).is_zero();
        let symbolic_zero = env.commutator(&xa, &a)?.is_zero();
        if !matrix_zero {
            nonzero.push(format_signs(&signs));
        }
        if symbolic_zero && !matrix_zero {
            contradictions.push(format_signs(&signs));
        }
    }
    Ok(OracleReport {
        rep: format!("{:?}", rep.kind()).to_lowercase(),
        rep_dim: rep.dim(),
        consistent: contradictions.is_empty(),
        nonzero_in_rep: nonzero,
        contradictions,
    })
}

fn spec_report(env: &Enveloping<'_>, spec: &ABSpec, rep: Option<&MatrixRep>) -> Result<SpecReport, LeeError> {
    let dim = env.algebra().root_system().ambient_dim();
    let mut r = SpecReport {
        slot: spec.slot,
        target: spec.target.label(),
        printed: spec.printed.clone(),
        machine: spec.template.as_ref().map(Template::render),
        status: String::new(),
        fallback: spec.fallback.as_ref().map(describe_fallback),
        impossible: spec.impossible.clone(),
        weight: spec.template.as_ref().map(|t| t.weight(dim).label()),
        independent_solutions: vec![],
        correlated_solutions: vec![],
        stable_under_c: None,
        residues: vec![],
        oracle: None,
        variants: vec![],
    };
    for v in &spec.variants {
        let verdict = solve_template(env, &spec.alpha, &v.template, 0)?;
        r.variants.push(VariantReport {
            printed: v.printed.clone(),
            machine: v.template.render(),
            solved_signs: verdict.solved_assignments().iter().map(|s| format_signs(s)).collect(),
        });
    }
    let Some(t) = &spec.template else {
        r.status = if spec.is_impossible() {
            "impossible_for_rank"
        } else {
            "uncovered"
        }
        .into();
        return Ok(r);
    };
    let verdict = solve_signs(env, spec)?;
    let at_one = solve_template(env, &spec.alpha, t, 1)?;
    r.stable_under_c = Some(verdict.solved_assignments() == at_one.solved_assignments());
    r.independent_solutions = verdict.solved_assignments().iter().map(|s| format_signs(s)).collect();
    r.correlated_solutions = verdict
        .correlated_assignments()
        .iter()
        .map(|s| format_signs(s))
        .collect();
    if let SignVerdict::NoSolution { residues } = &verdict {
        r.residues = residues
            .iter()
            .map(|(s, u)| ResidueReport {
                signs: format_signs(s),
                normal_form: env.format(u),
                weight: weight_text(env, u),
                expected_weight: spec.alpha.plus(&t.weight(dim)).label(),
            })
            .collect();
    }
    r.status = if spec.is_impossible() {
        "impossible_for_rank"
    } else if verdict.is_solved() {
        "solved"
    } else {
        "no_solution"
    }
    .into();
    if let Some(rep) = rep {
        r.oracle = Some(oracle(env, spec, t, rep)?);
    }
    Ok(r)
}

/// Build, solve and cross-check every spec for one case.
pub fn verify_lee(alg: &LieAlgebra, case: Case, seed: u64, rep: Option<&MatrixRep>) -> Result<LeeReport, LeeError> {
    let specs = build_case(alg, case)?;
    let reports: Vec<SpecReport> = specs
        .par_iter()
        .map_init(|| Enveloping::new(alg), |env, s| spec_report(env, s, rep))
        .collect::<Result<_, _>>()?;
    let rs = alg.root_system();
    let alpha = case.alpha(rs.rank());
    let bi = match gen_bi(alg, &alpha, seed) {
        Ok(f) => BiReport {
            general_position: GENERAL_POSITION_READING.into(),
            check: Some(check_bi(alg, &f)),
            family: Some(f),
            error: None,
        },
        Err(e) => BiReport {
            general_position: GENERAL_POSITION_READING.into(),
            family: None,
            check: None,
            error: Some(e.to_string()),
        },
    };
    let count = |s: &str| reports.iter().filter(|r| r.status == s).count();
    let summary = Summary {
        specs: reports.len(),
        slots: reports.iter().filter(|r| r.slot.is_some()).count(),
        solved: count("solved"),
        no_solution: count("no_solution"),
        impossible_for_rank: count("impossible_for_rank"),
        uncovered: count("uncovered"),
        solvable_independent: reports.iter().filter(|r| !r.independent_solutions.is_empty()).count(),
        solvable_correlated: reports.iter().filter(|r| !r.correlated_solutions.is_empty()).count(),
        oracle_consistent: reports.iter().all(|r| r.oracle.as_ref().is_none_or(|o| o.consistent)),
    };
    Ok(LeeReport {
        schema: 1,
        family: rs.family().to_string(),
        rank: rs.rank(),
        p: alg.characteristic(),
        case,
        alpha: alpha.label(),
        seed,
        specs: reports,
        bi,
        summary,
    })
}

/// Slot positions usable for a truncated candidate: solved and formed as printed.
pub fn usable_slots(specs: &[ABSpec], verdicts: &[SignVerdict]) -> Vec<usize> {
    specs
        .iter()
        .zip(verdicts)
        .enumerate()
        .filter(|(_, (s, v))| s.slot.is_some() && !s.is_impossible() && v.is_solved())
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::RootSystem;

    fn b(l: usize, p: u64) -> LieAlgebra {
        LieAlgebra::build(&RootSystem::build(Family::B, l).unwrap(), p).unwrap()
    }

    fn by_target<'a>(specs: &'a [ABSpec], r: &Root) -> &'a ABSpec {
        specs.iter().find(|s| &s.target == r && s.slot.is_some()).unwrap()
    }

    #[test]
    fn slot_counts() {
        for l in [2, 3] {
            let a = b(l, 7);
            for case in [Case::I, Case::II] {
                let specs = build_case(&a, case).unwrap();
                assert_eq!(specs.iter().filter(|s| s.slot.is_some()).count(), 2 * a.num_positive());
            }
        }
    }

    #[test]
    fn case_one_leading_specs() {
        let a = b(2, 7);
        let env = Enveloping::new(&a);
        let specs = build_case_i(&a).unwrap();
        assert_eq!(specs[0].target, Root::new(vec![1, 0]));
        assert_eq!(specs[0].template.as_ref().unwrap().render(), "x(+e1)");
        assert!(solve_signs(&env, &specs[0]).unwrap().is_solved());
        assert_eq!(
            specs[1].template.as_ref().unwrap().body,
            Body::Casimir(Root::new(vec![1, 0]))
        );
        let v = solve_signs(&env, &specs[1]).unwrap();
        assert_eq!(v.solved_assignments(), &[Vec::<bool>::new()]);
    }

    #[test]
    fn rank_two_markers() {
        let a = b(2, 7);
        let one = build_case_i(&a).unwrap();
        assert!(by_target(&one, &Root::new(vec![0, 1])).is_impossible());
        assert!(by_target(&one, &Root::new(vec![0, -1])).is_impossible());
        let two = build_case_ii(&a).unwrap();
        assert_eq!(two.iter().filter(|s| s.slot.is_none()).count(), 4);
        let el = by_target(&two, &Root::new(vec![0, 1]));
        assert_eq!(el.template.as_ref().unwrap().render(), "x(+e2)^2");
        assert_eq!(el.variants.len(), 1);
    }

    #[test]
    fn case_one_rank_three_templates() {
        let a = b(3, 7);
        let specs = build_case_i(&a).unwrap();
        assert!(specs.iter().all(|s| !s.is_impossible()));
        let e3 = by_target(&specs, &Root::new(vec![0, 0, 1]));
        let t = e3.template.as_ref().unwrap();
        assert_eq!(t.prefactor, vec![(Root::new(vec![0, 1, 1]), 1)]);
        assert_eq!(t.num_slots(), 2);
        let m = by_target(&specs, &Root::new(vec![-1, 0, 1]));
        assert_eq!(m.variants.len(), 3);
    }

    #[test]
    fn expanded_templates_are_homogeneous() {
        let a = b(3, 7);
        let env = Enveloping::new(&a);
        for case in [Case::I, Case::II] {
            for s in build_case(&a, case).unwrap() {
                let Some(t) = &s.template else { continue };
                for signs in assignments(t.num_slots()) {
                    let u = expand(&env, t, &signs, 0).unwrap();
                    assert_eq!(env.weight(&u), Weight::Homogeneous(t.weight(3)), "{}", t.render());
                }
            }
        }
    }

    #[test]
    fn bi_family_conditions() {
        let a = b(2, 11);
        for alpha in [Root::new(vec![1, 0]), Root::new(vec![1, -1])] {
            let f = gen_bi(&a, &alpha, 0).unwrap();
            assert_eq!(f.vectors.len(), 8);
            let c = check_bi(&a, &f);
            assert_eq!(c.subsets_checked, 28);
            assert!(c.all_pass());
        }
    }

    #[test]
    fn bi_family_exhausted() {
        // 18 vectors in general position in F_11^3 would exceed the arc bound
        let a = b(3, 11);
        assert!(matches!(
            gen_bi(&a, &Root::new(vec![1, 0, 0]), 1),
            Err(LeeError::ExhaustedField { .. })
        ));
    }

    #[test]
    fn tuples_enumeration() {
        let t = exponent_tuples(3, 2, 7);
        assert_eq!(t.len(), 10);
        assert_eq!(t[0], vec![0, 0, 0]);
        assert_eq!(t[1], vec![1, 0, 0]);
        assert_eq!(exponent_tuples(8, 2, 7).len(), 45);
    }

    #[test]
    fn tagged_rank_finds_relation() {
        let v = vec![vec![(0, 1)], vec![(1, 1)], vec![(0, 2), (1, 3)]];
        let (r, rel) = tagged_rank(7, &v, 10);
        assert_eq!(r, 2);
        assert_eq!(rel.len(), 1);
        assert_eq!(rel[0].len(), 3);
    }

    #[test]
    fn sign_assignment_order() {
        assert_eq!(
            assignments(2).iter().map(|s| format_signs(s)).collect::<Vec<_>>(),
            ["++", "+-", "-+", "--"]
        );
        assert_eq!(assignments(0), vec![Vec::<bool>::new()]);
    }
}
