//! Tangent, regular normal, limiting normal and directional limiting normal
//! cones of structured sets `Λ = Λ₁ × … × Λ_p`.

mod calculus;
mod omega;
mod union;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::ConeError;
use crate::rational::{dot, qserde, unit, DisplayVec, QMat, QVec, Rational};

pub use calculus::{
    directional_normal_cone, directional_pieces, limiting_normal_cone, limiting_pieces,
    regular_normal_cone, sensitive_rows, tangent_cone, union_limiting_pieces,
};
pub use union::{CellSpec, ConeUnion, Piece};

/// `{y : ⟨λ_j, y⟩ ≤ b_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polyhedron {
    #[serde(with = "qserde::mat")]
    rows: QMat,
    #[serde(with = "qserde::vec")]
    rhs: QVec,
}

impl Polyhedron {
    pub fn new(dim: usize, rows: QMat, rhs: QVec) -> Result<Self, ConeError> {
        if rows.len() != rhs.len() {
            return Err(ConeError::MalformedSet(format!(
                "{} rows but {} right-hand sides",
                rows.len(),
                rhs.len()
            )));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != dim) {
            return Err(ConeError::MalformedSet(format!(
                "row of length {} in a polyhedron of dimension {}",
                r.len(),
                dim
            )));
        }
        Ok(Polyhedron { rows, rhs })
    }

    /// `{y : ⟨a, y⟩ ≤ 0}` for each row, i.e. a polyhedral cone.
    pub fn cone(dim: usize, rows: QMat) -> Result<Self, ConeError> {
        let rhs = vec![Rational::zero(); rows.len()];
        Polyhedron::new(dim, rows, rhs)
    }

    pub fn rows(&self) -> &[QVec] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        self.rows
            .iter()
            .zip(&self.rhs)
            .all(|(a, b)| dot(a, y) <= *b)
    }

    pub fn active(&self, y: &[Rational]) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&j| dot(&self.rows[j], y) == self.rhs[j])
            .collect()
    }

    fn check_dim(&self, dim: usize) -> bool {
        self.rows.iter().all(|r| r.len() == dim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Nonneg,
    Nonpos,
}

/// One factor of a structured set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `{0}^dim`.
    Zero { dim: usize },
    /// `R^dim_+` or `R^dim_-`.
    Orthant { dim: usize, orientation: Orientation },
    /// A finite union of convex polyhedra.
    PolyUnion { dim: usize, pieces: Vec<Polyhedron> },
    /// `Ω_EC = {(a, b) ∈ R₊ × R₊ : ab = 0}`.
    Compl,
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Zero { dim } | Factor::Orthant { dim, .. } | Factor::PolyUnion { dim, .. } => {
                *dim
            }
            Factor::Compl => 2,
        }
    }

    /// The factor as a union of convex polyhedra.
    pub fn polyhedra(&self) -> Vec<Polyhedron> {
        let d = self.dim();
        match self {
            Factor::Zero { dim } => {
                let rows = (0..*dim)
                    .flat_map(|i| {
                        let e = unit(d, i);
                        let m = crate::rational::neg(&e);
                        [e, m]
                    })
                    .collect();
                vec![Polyhedron::cone(d, rows).expect("consistent")]
            }
            Factor::Orthant { dim, orientation } => {
                let rows = (0..*dim)
                    .map(|i| match orientation {
                        Orientation::Nonneg => crate::rational::neg(&unit(d, i)),
                        Orientation::Nonpos => unit(d, i),
                    })
                    .collect();
                vec![Polyhedron::cone(d, rows).expect("consistent")]
            }
            Factor::PolyUnion { pieces, .. } => pieces.clone(),
            Factor::Compl => omega::polyhedra(),
        }
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        match self {
            Factor::Compl => omega::contains(y),
            _ => self.polyhedra().iter().any(|p| p.contains(y)),
        }
    }
}

/// `Λ` as a Cartesian product of factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredSet {
    factors: Vec<Factor>,
}

impl StructuredSet {
    pub fn new(factors: Vec<Factor>) -> Result<Self, ConeError> {
        for (i, f) in factors.iter().enumerate() {
            if let Factor::PolyUnion { dim, pieces } = f {
                if pieces.is_empty() {
                    return Err(ConeError::MalformedSet(format!(
                        "factor {i}: a polyhedral union needs at least one piece"
                    )));
                }
                if let Some(k) = pieces.iter().position(|p| !p.check_dim(*dim)) {
                    return Err(ConeError::MalformedSet(format!(
                        "factor {i}, piece {k}: rows do not have dimension {dim}"
                    )));
                }
            }
        }
        Ok(StructuredSet { factors })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().map(Factor::dim).sum()
    }

    /// Start offset of each factor in the ambient vector.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.factors.len());
        let mut o = 0;
        for f in &self.factors {
            out.push(o);
            o += f.dim();
        }
        out
    }

    pub fn split<'a>(&self, y: &'a [Rational]) -> Vec<&'a [Rational]> {
        self.offsets()
            .iter()
            .zip(&self.factors)
            .map(|(&o, f)| &y[o..o + f.dim()])
            .collect()
    }

    pub fn contains(&self, y: &[Rational]) -> bool {
        y.len() == self.dim()
            && self
                .split(y)
                .iter()
                .zip(&self.factors)
                .all(|(part, f)| f.contains(part))
    }

    /// Every factor is a finite union of convex polyhedra.
    pub fn is_polyhedral(&self) -> bool {
        true
    }

    /// Validates membership and builds the activity certificate.
    pub fn point(&self, y: &[Rational]) -> Result<SetPoint, ConeError> {
        if y.len() != self.dim() {
            return Err(ConeError::MalformedSet(format!(
                "point has length {}, set has dimension {}",
                y.len(),
                self.dim()
            )));
        }
        let mut certificate = Vec::new();
        for (i, (part, f)) in self.split(y).iter().zip(&self.factors).enumerate() {
            let cert = match f {
                Factor::Zero { .. } => {
                    if part.iter().all(Zero::is_zero) {
                        Some(FactorCert::Zero)
                    } else {
                        None
                    }
                }
                Factor::Orthant { orientation, .. } => {
                    let ok = part.iter().all(|x| match orientation {
                        Orientation::Nonneg => !x.is_negative(),
                        Orientation::Nonpos => !x.is_positive(),
                    });
                    ok.then(|| FactorCert::Orthant {
                        active: (0..part.len()).filter(|&j| part[j].is_zero()).collect(),
                    })
                }
                Factor::PolyUnion { pieces, .. } => {
                    let containing: Vec<usize> =
                        (0..pieces.len()).filter(|&k| pieces[k].contains(part)).collect();
                    (!containing.is_empty()).then(|| FactorCert::PolyUnion {
                        active: containing.iter().map(|&k| pieces[k].active(part)).collect(),
                        containing,
                    })
                }
                Factor::Compl => omega::branch(part).map(FactorCert::Compl),
            };
            match cert {
                Some(c) => certificate.push(c),
                None => {
                    return Err(ConeError::InfeasiblePoint(format!(
                        "factor {i} does not contain {}",
                        DisplayVec(part)
                    )))
                }
            }
        }
        Ok(SetPoint {
            coords: y.to_vec(),
            certificate,
        })
    }
}

/// Activity of `Ω_EC` at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplBranch {
    /// `0 = a < b`
    Lower,
    /// `a = b = 0`
    Biactive,
    /// `a > b = 0`
    Upper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorCert {
    Zero,
    Orthant { active: Vec<usize> },
    /// `containing` is `p(s)`, the pieces holding the point; `active[k]` lists
    /// the rows of piece `containing[k]` that hold with equality.
    PolyUnion {
        containing: Vec<usize>,
        active: Vec<Vec<usize>>,
    },
    Compl(ComplBranch),
}

/// A point of a structured set with its per-factor activity certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPoint {
    coords: QVec,
    certificate: Vec<FactorCert>,
}

impl SetPoint {
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn certificate(&self) -> &[FactorCert] {
        &self.certificate
    }
}

#[cfg(test)]
mod tests;
