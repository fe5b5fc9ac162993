//! The quadratic space `(T, q)` of a cyclic tuple of Lagrangians and the
//! constructions around it.

pub mod bar;
pub mod chain;
pub mod complex;
pub mod dihedral;
pub mod dual;
pub mod forms;
pub mod kashiwara;
pub mod kspace;
pub mod quasi;
pub mod subquotient;

pub use bar::{bar_space, expected_bar_dim, BarSpace};
pub use chain::{chain_split, ChainSplit};
pub use complex::{build_complex, Complex3, MaslovComplex};
pub use dihedral::{reindex, reverse, Identification};
pub use dual::{dual_form, epsilon_functional, pulled_back_inverse_gram, EsSpace};
pub use forms::{BilinearSpace, QuadraticSpace, QuotientChart};
pub use kashiwara::{kashiwara_compare, kashiwara_form, KashiwaraCertificate};
pub use kspace::{
    antiderivative, compute_k, compute_t, expected_dim_t, q_alternate, q_with_antiderivative,
    KSpace, TSpace,
};
pub use quasi::{
    check_chain_map, check_factorization, check_induces_q, explicit_quasi_iso, factor_maslov,
    factor_quasi_iso, Factorization, QuasiIso,
};
pub use subquotient::{quadratic_subquotient, HyperbolicSplitting, Subquotient};
