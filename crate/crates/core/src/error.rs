use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no relative interior direction: the cone is {{0}}")]
    TrivialCone,
    #[error("enumeration cap of {cap} exceeded")]
    CapExceeded { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("point is not in the set: {0}")]
    InfeasiblePoint(String),
    #[error("malformed set: {0}")]
    MalformedSet(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("anchor is infeasible: {0}")]
    InfeasibleAnchor(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("direction is not in the linearized cone")]
    DirectionInfeasible,
    #[error("invalid model: {0}")]
    Invalid(String),
}

impl From<GeomError> for ModelError {
    fn from(e: GeomError) -> Self {
        ModelError::Cone(ConeError::Geom(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("internal inconsistency in the implication chain: {0}")]
    Inconsistent(String),
}

impl From<ConeError> for CheckError {
    fn from(e: ConeError) -> Self {
        CheckError::Model(ModelError::Cone(e))
    }
}

impl From<GeomError> for CheckError {
    fn from(e: GeomError) -> Self {
        CheckError::Model(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("projection did not converge after {iterations} iterations (violation {violation:e})")]
    ProjectionNonConvergence { iterations: usize, violation: f64 },
    #[error("invalid sampling configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
