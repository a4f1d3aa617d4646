//! Exact computation of the v-function of the wild McKay correspondence for
//! the natural representation of `G ≅ (Z/p)² ⊂ SL₂(F_q)` over
//! `K = F_q((t))`, together with the ramification filtrations of the
//! corresponding `G`-extensions.
//!
//! Every quantity is computed exactly: coefficients live in a finite field,
//! series are Laurent polynomials, and linear algebra is fraction-free.

pub mod exact_linalg;
pub mod extension_algebra;
pub mod finite_field;
pub mod laurent;
pub mod ramification;
pub mod sample;
pub mod vfunction;

use thiserror::Error;

pub use exact_linalg::{LaurentMatrix, LinalgError};
pub use extension_algebra::{validate_pair, ExtensionError, ExtensionPair, GroupElement, LElement};
pub use finite_field::{FieldError, FieldParams, FqElem, GaloisField};
pub use laurent::{JReduction, LaurentError, LaurentPoly, Valuation};
pub use ramification::{Filtration, HerbrandFn, Line, Numbering, RamificationError, Subgroup};
pub use vfunction::{Route, ThetaBasis, VFunctionError, VResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    VFunction(#[from] VFunctionError),
    #[error(transparent)]
    Ramification(#[from] RamificationError),
}
