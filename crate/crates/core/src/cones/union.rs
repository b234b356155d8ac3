use std::fmt;

use crate::error::GeomError;
use crate::ratgeom::{arrangement_cells, HCone, Sign, VCone};
use crate::rational::{lex_cmp, primitive_unsigned, zeros, QMat, QVec, Rational};

/// A relatively open polyhedral cone `{w ∈ closure : ⟨a,w⟩ < 0 for a in strict}`
/// together with one of its points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSpec {
    pub closure: HCone,
    pub strict: QMat,
    pub point: QVec,
}

impl CellSpec {
    pub fn origin(dim: usize) -> Self {
        CellSpec {
            closure: HCone::origin(dim),
            strict: Vec::new(),
            point: zeros(dim),
        }
    }

    pub fn contains(&self, w: &[Rational]) -> bool {
        use num_traits::Signed;
        self.closure.contains(w)
            && self
                .strict
                .iter()
                .all(|a| crate::rational::dot(a, w).is_negative())
    }

    pub fn product(&self, other: &CellSpec) -> CellSpec {
        let (d1, d2) = (self.closure.dim(), other.closure.dim());
        let strict = self
            .strict
            .iter()
            .map(|a| embed(a, 0, d1 + d2))
            .chain(other.strict.iter().map(|a| embed(a, d1, d1 + d2)))
            .collect();
        let mut point = self.point.clone();
        point.extend(other.point.iter().cloned());
        CellSpec {
            closure: self.closure.product(&other.closure),
            strict,
            point,
        }
    }
}

pub(crate) fn embed(v: &[Rational], offset: usize, dim: usize) -> QVec {
    let mut out = zeros(dim);
    for (i, x) in v.iter().enumerate() {
        out[offset + i] = x.clone();
    }
    out
}

/// One convex piece of a cone union. `tag` holds one provenance label per
/// factor of the structured set; `cell`, when present, is a cell of the local
/// tangent cone on which the regular normal cone equals `cone`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub cone: HCone,
    pub tag: Vec<String>,
    pub cell: Option<CellSpec>,
}

impl Piece {
    pub fn new(cone: HCone, tag: impl Into<String>) -> Self {
        Piece {
            cone,
            tag: vec![tag.into()],
            cell: None,
        }
    }

    pub fn with_cell(mut self, cell: CellSpec) -> Self {
        self.cell = Some(cell);
        self
    }

    pub fn product(&self, other: &Piece) -> Piece {
        let mut tag = self.tag.clone();
        tag.extend(other.tag.iter().cloned());
        let cell = match (&self.cell, &other.cell) {
            (Some(a), Some(b)) => Some(a.product(b)),
            _ => None,
        };
        Piece {
            cone: self.cone.product(&other.cone),
            tag,
            cell,
        }
    }
}

/// A finite union of convex polyhedral cones. The empty list is the empty
/// set, not `{0}`.
#[derive(Clone)]
pub struct ConeUnion {
    dim: usize,
    pieces: Vec<Piece>,
}

impl ConeUnion {
    pub fn empty(dim: usize) -> Self {
        ConeUnion {
            dim,
            pieces: Vec::new(),
        }
    }

    pub fn from_pieces(dim: usize, pieces: Vec<Piece>) -> Result<Self, GeomError> {
        for p in &pieces {
            if p.cone.dim() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    found: p.cone.dim(),
                });
            }
        }
        Ok(ConeUnion { dim, pieces }.canonical())
    }

    pub fn from_cones(dim: usize, cones: Vec<HCone>) -> Result<Self, GeomError> {
        Self::from_pieces(dim, cones.into_iter().map(|c| Piece::new(c, "")).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn cones(&self) -> impl Iterator<Item = &HCone> {
        self.pieces.iter().map(|p| &p.cone)
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.pieces.iter().any(|p| p.cone.contains(v))
    }

    /// Sorts pieces by canonical generators, drops duplicates and pieces
    /// contained in another piece. Among equal pieces the first is kept.
    fn canonical(self) -> Self {
        let mut keyed: Vec<(VCone, Piece)> = self
            .pieces
            .into_iter()
            .map(|p| (p.cone.generators(), p))
            .collect();
        keyed.sort_by(|a, b| gen_cmp(&a.0, &b.0));
        keyed.dedup_by(|b, a| a.0 == b.0);
        let n = keyed.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && keep[j] && keyed[j].1.cone.contains_cone(&keyed[i].0) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let pieces = keyed
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|((_, p), _)| p)
            .collect();
        ConeUnion {
            dim: self.dim,
            pieces,
        }
    }

    /// Cartesian product.
    pub fn product(&self, other: &ConeUnion) -> ConeUnion {
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                pieces.push(a.product(b));
            }
        }
        ConeUnion {
            dim: self.dim + other.dim,
            pieces,
        }
        .canonical()
    }

    /// Whether the convex cone `k` lies inside the union, decided exactly on
    /// the cells of the arrangement of all piece rows inside `k`.
    pub fn covers(&self, k: &HCone) -> Result<bool, GeomError> {
        if self.pieces.iter().any(|p| p.cone.contains_cone(&k.generators())) {
            return Ok(true);
        }
        if self.pieces.is_empty() {
            return Ok(false);
        }
        let mut rows: QMat = Vec::new();
        for p in &self.pieces {
            for a in p.cone.ineq().iter().chain(p.cone.eq()) {
                rows.push(primitive_unsigned(a));
            }
        }
        rows.sort_by(|a, b| lex_cmp(a, b));
        rows.dedup();
        let cells = arrangement_cells(k, &rows, usize::MAX, |_: &[Sign]| false)?;
        Ok(cells.iter().all(|c| self.contains(&c.point)))
    }

    /// Set inclusion `self ⊆ other`.
    pub fn subset_of(&self, other: &ConeUnion) -> Result<bool, GeomError> {
        for p in &self.pieces {
            if !other.covers(&p.cone)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn same_set(&self, other: &ConeUnion) -> Result<bool, GeomError> {
        Ok(self.dim == other.dim && self.subset_of(other)? && other.subset_of(self)?)
    }

    /// Polar of the union: the intersection of the piece polars.
    pub fn polar(&self) -> HCone {
        let mut ineq = Vec::new();
        let mut eq = Vec::new();
        for p in &self.pieces {
            let g = p.cone.generators();
            ineq.extend(g.rays().iter().cloned());
            eq.extend(g.lines().iter().cloned());
        }
        HCone::new(self.dim, ineq, eq).expect("generators have the ambient dimension")
    }

    pub fn generators(&self) -> Vec<VCone> {
        self.pieces.iter().map(|p| p.cone.generators()).collect()
    }
}

fn gen_cmp(a: &VCone, b: &VCone) -> std::cmp::Ordering {
    let key = |c: &VCone| (c.lines().len(), c.rays().len());
    key(a)
        .cmp(&key(b))
        .then_with(|| {
            for (x, y) in a.lines().iter().zip(b.lines()) {
                let o = lex_cmp(x, y);
                if o.is_ne() {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
        .then_with(|| {
            for (x, y) in a.rays().iter().zip(b.rays()) {
                let o = lex_cmp(x, y);
                if o.is_ne() {
                    return o;
                }
            }
            std::cmp::Ordering::Equal
        })
}

impl fmt::Debug for ConeUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .pieces
            .iter()
            .map(|p| format!("{:?}", p.cone.generators()))
            .collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}
