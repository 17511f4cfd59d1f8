use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("star graph with legs {0:?} is a finite Dynkin diagram or degenerate")]
    FiniteDynkin(Vec<usize>),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("graph is not affine")]
    NotAffine,
    #[error("parameter {0} must be nonzero")]
    ZeroParameter(&'static str),
    #[error("non-generic parameters: {0}")]
    NonGenericParameters(String),
    #[error("module spectrum disagrees with parameters: {0}")]
    SpecMismatch(String),
    #[error("isotypic subspace is empty")]
    EmptySubspace,
    #[error("operator does not preserve the subspace (leakage {0:e})")]
    NotInvariant(f64),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("hbar = {0:e} is nonzero; traces cannot cancel")]
    NonZeroHbar(f64),
    #[error("determinant obstruction: defect {0:e}")]
    DetObstruction(f64),
    #[error("trace obstruction: eigenvalue sum {0:e}")]
    TraceObstruction(f64),
    #[error("no convergence: best residual {best:e} after {iterations} iterations")]
    NoConvergence { best: f64, iterations: usize },
    #[error("rank decision ambiguous: singular value {0:e} near threshold {1:e}")]
    RankAmbiguous(f64, f64),
    #[error("punctures and base points must satisfy alpha_1 < ... < alpha_m < z_1 < ... < z_n")]
    BadOrdering,
    #[error("detour scale {delta} exceeds a third of the minimal gap {gap}")]
    DeltaTooLarge { delta: f64, gap: f64 },
    #[error("integrator step underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("transport tolerance not met: refinement changed result by {0:e}")]
    ToleranceNotMet(f64),
    #[error("representation violates relations: residual {0:e}")]
    RelationResidualTooLarge(f64),
    #[error("residues do not sum to zero: {0:e}")]
    SumNotZero(f64),
    #[error("operation requires the D4 affine diagram")]
    NotD4,
    #[error("isotypic subspace has dimension {found}, expected {expected}")]
    WrongIsotypicDimension { found: usize, expected: usize },
    #[error("continuation stalled at step {step} (kappa = {kappa})")]
    ContinuationStall { step: usize, kappa: String },
    #[error("path too coarse: {0}")]
    PathTooCoarse(String),
    #[error("the two routes around the diagram disagree: residual {0:e}")]
    DiagramMismatch(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Convergence,
    Certification,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            FiniteDynkin(_) | ShapeMismatch(_) | NotAffine | ZeroParameter(_) | NonGenericParameters(_)
            | SizeMismatch(_) | NonZeroHbar(_) | DetObstruction(_) | TraceObstruction(_) | BadOrdering
            | DeltaTooLarge { .. } | NotD4 | SumNotZero(_) | Parse(_) | PathTooCoarse(_) => ErrorClass::Validation,
            NoConvergence { .. } | StepUnderflow(_) | ToleranceNotMet(_) | ContinuationStall { .. } | RankAmbiguous(..) => {
                ErrorClass::Convergence
            }
            SpecMismatch(_) | EmptySubspace | NotInvariant(_) | RelationResidualTooLarge(_)
            | WrongIsotypicDimension { .. } | DiagramMismatch(_) => ErrorClass::Certification,
            Io(_) | Json(_) => ErrorClass::Io,
        }
    }
}
