//! Deligne-Simpson problems: prescribed classes, numerical solutions,
//! certification of smoothness and irreducibility, and continuation of
//! `B_n`-modules in `ν`.

pub mod certify;
pub mod continuation;
pub mod solver;
pub mod specs;

use serde::{Deserialize, Serialize};

use crate::linalg::CMat;
use crate::spectrum::ConjugacyClassSpec;

pub use certify::{centralizer_dimension, irreducibility_check, tangent_dimension, TangentReport};
pub use continuation::{continue_bn_representation, ContinuationReport};
pub use solver::{solve_additive_ds, solve_multiplicative_ds, SolverConfig};
pub use specs::{additive_class_specs, multiplicative_class_specs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DsKind {
    Additive,
    Multiplicative,
}

/// A tuple of matrices in prescribed classes with vanishing sum (additive)
/// or unit product (multiplicative).
#[derive(Debug, Clone, Serialize)]
pub struct DSSolution {
    pub kind: DsKind,
    #[serde(with = "crate::io::cmats")]
    pub matrices: Vec<CMat>,
    pub specs: Vec<ConjugacyClassSpec>,
    /// Frobenius norm of `Σ x_k` or `X_1 ⋯ X_m - Id`.
    pub residual: f64,
    pub tangent_dim: Option<usize>,
    pub irreducible: Option<bool>,
    pub gauge: String,
    pub seed: u64,
    /// Index of the random start that converged.
    pub start: usize,
    pub iterations: usize,
}

impl DSSolution {
    pub fn size(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }

    /// Recomputes the defining residual from the matrices.
    pub fn defect(&self) -> f64 {
        defect(self.kind, &self.matrices)
    }

    /// Same solution conjugated by `g`: every matrix becomes `g M g^{-1}`.
    pub fn conjugated(&self, g: &CMat) -> Option<Self> {
        let gi = crate::linalg::inverse(g)?;
        let mut out = self.clone();
        out.matrices = self.matrices.iter().map(|m| g * m * &gi).collect();
        out.residual = out.defect();
        Some(out)
    }
}

pub(crate) fn defect(kind: DsKind, mats: &[CMat]) -> f64 {
    let n = mats[0].nrows();
    let r = match kind {
        DsKind::Additive => mats.iter().skip(1).fold(mats[0].clone(), |a, b| a + b),
        DsKind::Multiplicative => mats.iter().skip(1).fold(mats[0].clone(), |a, b| a * b) - CMat::identity(n, n),
    };
    crate::linalg::frobenius(&r)
}
