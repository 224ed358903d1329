//! Classical modular Lie algebras over prime fields: root systems, Chevalley
//! bases, PBW arithmetic in the universal enveloping algebra, reduced
//! enveloping algebras with baby Verma modules, and a verification harness
//! for product-form bases of `U(L)/𝔐_χ` in type `B_l`.

pub mod chevalley;
pub mod field;
pub mod leebasis;
pub mod linalg;
pub mod pbw;
pub mod redenv;
pub mod roots;

pub use chevalley::{BasisKind, ChevalleyError, Closure, LieAlgebra, LieElement};
pub use field::Ring;
pub use pbw::{Enveloping, Monomial, PbwError, UEElement, Weight};
pub use redenv::{
    baby_verma, evaluate, invertible_in_rep, is_irreducible, reduce, Character, Irreducibility, MatrixRep, RedEnvError,
};
pub use roots::{cartan_integer, reflect, Family, Root, RootSystem, RootsError};
