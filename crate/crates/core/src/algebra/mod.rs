//! Matrix realizations of the algebras and their presentations.

pub mod cyclotomic;
pub mod induced;
pub mod isotypic;
pub mod presentation;
pub mod regular;
pub mod rep;

pub use induced::{induced_rep_nu_zero, semidirect_cyclotomic};
pub use isotypic::{
    exact_isotypic_subspace, exact_restrict, isotypic_projector, isotypic_subspace, restrict_matrix, restricted_operator, t_matrix,
    ExactSubspace, IsotypicSpec, Subspace,
};
pub use presentation::{NcPoly, Presentation};
pub use regular::degenerate_regular_rep;
pub use rep::{MatrixRep, ResidualReport};
