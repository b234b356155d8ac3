//! Exact cone calculus and directional constraint-qualification checks for
//! systems `P(x) ∈ Λ`, plus a floating-point error-bound verifier.
//!
//! The crate is layered bottom-up:
//!
//! - [`ratgeom`]: exact polyhedral cones (double description, polarity,
//!   faces, hyperplane-arrangement cells).
//! - [`cones`]: tangent, regular normal, limiting normal and directional
//!   limiting normal cones of structured sets.
//! - [`system`]: the map `P`, constraint sets, the complementarity and KKT
//!   encodings, and the problem-file schema.
//! - [`cq`]: three-valued checkers for NNAMCQ, FOSCMS, SOSCMS and
//!   directional quasi-/pseudo-normality, plus the implication-chain report.
//! - [`verify`]: residuals, distance estimates, empirical subregularity
//!   moduli and the numeric sequence falsifier.

pub mod cones;
pub mod cq;
pub mod error;
pub mod ratgeom;
pub mod rational;
pub mod system;
pub mod verify;

pub use cones::{ConeUnion, Factor, Polyhedron, SetPoint, StructuredSet};
pub use cq::{
    chain_consistency, check_cs_directional, check_dir_pseudo, check_dir_quasi, check_foscms,
    check_kkt_directional, check_nnamcq, check_soscms, report_chain, report_cs, verify_cs_witness,
    verify_witness, CheckConfig, Conclusion, Mode, Report, Route, SequenceTerm, Status, Verdict,
    Witness,
};
pub use error::{CheckError, ConeError, GeomError, ModelError, NumericError};
pub use ratgeom::{HCone, VCone};
pub use rational::{QMat, QVec, Rational};
pub use system::schema::{CheckKind, Problem, ProblemFile};
pub use system::{CsInstance, FunctionAtom, KktInstance, MapStack, ProblemInstance, SmoothOracle};
pub use verify::{ModulusTable, SamplingConfig};

#[cfg(test)]
mod testkit;
