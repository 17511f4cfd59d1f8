//! Maps from algebra modules to Deligne-Simpson tuples, the Riemann-Hilbert
//! map, and the isomonodromic flow in the cross-ratio.

pub mod flow;
pub mod invariants;
pub mod map;
pub mod phi;

pub use flow::{arc_path, cross_ratio, painleve_flow, painleve_flow_partial, FlowConfig, FlowGeometry, FlowTrajectory};
pub use invariants::{conjugation_invariants, invariant_words, match_up_to_conjugacy, ConjugacyMatch};
pub use map::{diagram_check, rh_map, DiagramReport, RhResult};
pub use phi::{phi_degenerate, phi_nondegenerate, PhiReport};
