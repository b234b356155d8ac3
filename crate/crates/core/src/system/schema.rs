//! Problem files, version 1.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "kind": "general",
//!   "atoms": [{"affine": {"a": [["1"]], "c": ["0"]}},
//!             {"quadratic": {"q": [[["-2"]]], "a": [["0"]], "c": ["0"]}}],
//!   "set": [{"poly_union": {"dim": 2, "pieces": [
//!       {"rows": [["0", "1"]], "rhs": ["0"]},
//!       {"rows": [["-1", "1"]], "rhs": ["0"]}]}}],
//!   "anchor": ["0"]
//! }
//! ```
//!
//! Rationals are written as strings `"p/q"`, integers or decimal literals;
//! decimals are converted exactly. Unknown fields are rejected.

use serde::{Deserialize, Serialize};

use super::cs::{cs_to_general, kkt_to_general, CsInstance, KktInstance};
use super::{FunctionAtom, MapStack, ProblemInstance};
use crate::cones::{Factor, Orientation, Polyhedron, StructuredSet};
use crate::error::ModelError;
use crate::rational::{qserde, QMat, QVec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AtomSpec {
    Affine {
        #[serde(with = "qserde::mat")]
        a: QMat,
        #[serde(with = "qserde::vec")]
        c: QVec,
    },
    Quadratic {
        #[serde(with = "qserde::mats")]
        q: Vec<QMat>,
        #[serde(with = "qserde::mat")]
        a: QMat,
        #[serde(with = "qserde::vec")]
        c: QVec,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    #[serde(with = "qserde::mat")]
    pub rows: QMat,
    #[serde(with = "qserde::vec")]
    pub rhs: QVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FactorSpec {
    Zero { dim: usize },
    Orthant { dim: usize, sign: Orientation },
    PolyUnion { dim: usize, pieces: Vec<PieceSpec> },
    Compl,
}

/// Conditions a file can request; the exit status of `check` keys on these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Nnamcq,
    Foscms,
    Soscms,
    DirPseudo,
    DirQuasi,
}

impl CheckKind {
    pub const ALL: [CheckKind; 5] = [
        CheckKind::Nnamcq,
        CheckKind::Foscms,
        CheckKind::Soscms,
        CheckKind::DirPseudo,
        CheckKind::DirQuasi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Nnamcq => "NNAMCQ",
            CheckKind::Foscms => "FOSCMS",
            CheckKind::Soscms => "SOSCMS",
            CheckKind::DirPseudo => "dir-pseudo",
            CheckKind::DirQuasi => "dir-quasi",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemFile {
    /// `P(x) ∈ Λ`; `atoms` are stacked in order, `set` lists the factors of `Λ`.
    General {
        schema: u32,
        atoms: Vec<AtomSpec>,
        set: Vec<FactorSpec>,
        #[serde(with = "qserde::vec")]
        anchor: QVec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        checks: Option<Vec<CheckKind>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sampling: Option<SamplingSpec>,
    },
    /// `H(x) = 0, 0 ≤ Φ(x) ⊥ Ψ(x) ≥ 0`.
    Cs {
        schema: u32,
        #[serde(default)]
        h: Vec<AtomSpec>,
        phi: Vec<AtomSpec>,
        psi: Vec<AtomSpec>,
        #[serde(with = "qserde::vec")]
        anchor: QVec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        checks: Option<Vec<CheckKind>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sampling: Option<SamplingSpec>,
    },
    /// KKT system of `min f(x) s.t. g(x) ≤ 0, h(x) = 0` at `(x, mu, lambda)`.
    Kkt {
        schema: u32,
        f: Vec<AtomSpec>,
        #[serde(default)]
        g: Vec<AtomSpec>,
        #[serde(default)]
        h: Vec<AtomSpec>,
        #[serde(with = "qserde::vec")]
        anchor: QVec,
        #[serde(with = "qserde::vec", default)]
        mu: QVec,
        #[serde(with = "qserde::vec", default)]
        lambda: QVec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        checks: Option<Vec<CheckKind>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sampling: Option<SamplingSpec>,
    },
}

/// A validated problem.
#[derive(Clone, Debug)]
pub enum Problem {
    General(ProblemInstance),
    Cs(CsInstance),
    Kkt(KktInstance),
}

impl Problem {
    /// The general form `P(x) ∈ Λ` of any problem kind.
    pub fn to_general(&self) -> Result<ProblemInstance, ModelError> {
        match self {
            Problem::General(p) => Ok(p.clone()),
            Problem::Cs(cs) => cs_to_general(cs),
            Problem::Kkt(k) => kkt_to_general(k),
        }
    }
}

fn stack(n: usize, atoms: &[AtomSpec]) -> Result<MapStack, ModelError> {
    let atoms = atoms
        .iter()
        .map(|a| match a {
            AtomSpec::Affine { a, c } => FunctionAtom::affine(a.clone(), c.clone()),
            AtomSpec::Quadratic { q, a, c } => FunctionAtom::quadratic(q.clone(), a.clone(), c.clone()),
        })
        .collect();
    MapStack::new(n, atoms)
}

fn factor(f: &FactorSpec) -> Result<Factor, ModelError> {
    Ok(match f {
        FactorSpec::Zero { dim } => Factor::Zero { dim: *dim },
        FactorSpec::Orthant { dim, sign } => Factor::Orthant {
            dim: *dim,
            orientation: *sign,
        },
        FactorSpec::PolyUnion { dim, pieces } => Factor::PolyUnion {
            dim: *dim,
            pieces: pieces
                .iter()
                .map(|p| Polyhedron::new(*dim, p.rows.clone(), p.rhs.clone()))
                .collect::<Result<_, _>>()?,
        },
        FactorSpec::Compl => Factor::Compl,
    })
}

/// The tagged top level is buffered before dispatch, so serde reports no
/// position for errors inside it; point at the first mention of the field.
fn locate(e: &serde_json::Error, text: &str) -> String {
    if e.line() > 0 {
        return String::new();
    }
    let msg = e.to_string();
    let Some(name) = msg.split('`').nth(1) else {
        return String::new();
    };
    let needle = format!("\"{name}\"");
    match text.lines().position(|l| l.contains(&needle)) {
        Some(i) => format!(" (field \"{name}\" at line {})", i + 1),
        None => String::new(),
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| {
            ModelError::Invalid(format!("problem file: {e}{}", locate(&e, text)))
        })?;
        if file.schema() != SCHEMA_VERSION {
            return Err(ModelError::Invalid(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.schema()
            )));
        }
        Ok(file)
    }

    pub fn schema(&self) -> u32 {
        match self {
            ProblemFile::General { schema, .. }
            | ProblemFile::Cs { schema, .. }
            | ProblemFile::Kkt { schema, .. } => *schema,
        }
    }

    pub fn checks(&self) -> Vec<CheckKind> {
        let c = match self {
            ProblemFile::General { checks, .. }
            | ProblemFile::Cs { checks, .. }
            | ProblemFile::Kkt { checks, .. } => checks,
        };
        c.clone().unwrap_or_else(|| CheckKind::ALL.to_vec())
    }

    pub fn sampling(&self) -> SamplingSpec {
        match self {
            ProblemFile::General { sampling, .. }
            | ProblemFile::Cs { sampling, .. }
            | ProblemFile::Kkt { sampling, .. } => sampling.clone().unwrap_or_default(),
        }
    }

    /// Validates dimensions and anchor feasibility.
    pub fn build(&self) -> Result<Problem, ModelError> {
        match self {
            ProblemFile::General {
                atoms, set, anchor, ..
            } => {
                let map = stack(anchor.len(), atoms)?;
                let factors = set.iter().map(factor).collect::<Result<_, _>>()?;
                let lambda = StructuredSet::new(factors)?;
                Ok(Problem::General(ProblemInstance::new(map, lambda, anchor.clone())?))
            }
            ProblemFile::Cs {
                h, phi, psi, anchor, ..
            } => {
                let n = anchor.len();
                Ok(Problem::Cs(CsInstance::new(
                    stack(n, h)?,
                    stack(n, phi)?,
                    stack(n, psi)?,
                    anchor.clone(),
                )?))
            }
            ProblemFile::Kkt {
                f,
                g,
                h,
                anchor,
                mu,
                lambda,
                ..
            } => {
                let n = anchor.len();
                Ok(Problem::Kkt(KktInstance::new(
                    stack(n, f)?,
                    stack(n, g)?,
                    stack(n, h)?,
                    anchor.clone(),
                    mu.clone(),
                    lambda.clone(),
                )?))
            }
        }
    }

    /// Canonical JSON: every rational as a reduced `"p/q"` string.
    pub fn to_normalized_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }
}
