//! Exact 1/N expansion of the cumulants of the quartically perturbed
//! Gaussian tensor measure, computed by summing over decorated plane trees,
//! together with brute-force oracles for every identity it relies on.

pub mod algebra;
pub mod error;
pub mod exec;
pub mod expansion;
pub mod graphs;
pub mod lemma;
pub mod oracle;
pub mod perm;
pub mod trees;
pub mod weingarten;

pub use algebra::{Poly, Rational, RationalFunctionN};
pub use error::{Error, Result};
pub use exec::Exec;
pub use perm::{PermTuple, Permutation};
