//! Exact polyhedral cones in H-form and V-form.

mod cells;
mod dd;
mod faces;

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::GeomError;
use crate::rational::{
    add, dot, is_zero_vec, lex_cmp, mat_vec, neg, primitive, primitive_unsigned, project_out,
    rref, zeros, DisplayVec, QMat, QVec, Rational,
};

pub use cells::{arrangement_cells, Cell, Sign};
pub use faces::{faces, Face, DEFAULT_FACE_CAP};

/// `{y : ⟨a,y⟩ ≤ 0 for a in ineq, ⟨b,y⟩ = 0 for b in eq}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HCone {
    dim: usize,
    ineq: QMat,
    eq: QMat,
}

/// `{Σ cᵢ rᵢ + Σ dⱼ lⱼ : c ≥ 0}` in canonical form: lines are the reduced
/// row echelon basis of the lineality space, rays are the primitive integer
/// extreme rays of the pointed part orthogonal to it, sorted. Two `VCone`s
/// represent the same set iff they compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VCone {
    dim: usize,
    rays: QMat,
    lines: QMat,
}

fn check_rows(dim: usize, rows: &[QVec]) -> Result<(), GeomError> {
    for r in rows {
        if r.len() != dim {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                found: r.len(),
            });
        }
    }
    Ok(())
}

fn canonical_rows(rows: QMat, unsigned: bool) -> QMat {
    let mut out: QMat = rows
        .into_iter()
        .filter(|r| !is_zero_vec(r))
        .map(|r| if unsigned { primitive_unsigned(&r) } else { primitive(&r) })
        .collect();
    out.sort_by(|a, b| lex_cmp(a, b));
    out.dedup();
    out
}

impl HCone {
    pub fn new(dim: usize, ineq: QMat, eq: QMat) -> Result<Self, GeomError> {
        check_rows(dim, &ineq)?;
        check_rows(dim, &eq)?;
        Ok(HCone {
            dim,
            ineq: canonical_rows(ineq, false),
            eq: canonical_rows(eq, true),
        })
    }

    pub fn full(dim: usize) -> Self {
        HCone {
            dim,
            ineq: Vec::new(),
            eq: Vec::new(),
        }
    }

    /// The trivial cone `{0}`.
    pub fn origin(dim: usize) -> Self {
        let eq = (0..dim).map(|i| crate::rational::unit(dim, i)).collect();
        HCone {
            dim,
            ineq: Vec::new(),
            eq,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineq(&self) -> &[QVec] {
        &self.ineq
    }

    pub fn eq(&self) -> &[QVec] {
        &self.eq
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        v.len() == self.dim
            && self.ineq.iter().all(|a| !dot(a, v).is_positive())
            && self.eq.iter().all(|b| dot(b, v).is_zero())
    }

    pub fn with_rows(&self, ineq: &[QVec], eq: &[QVec]) -> Result<Self, GeomError> {
        let mut i = self.ineq.clone();
        i.extend_from_slice(ineq);
        let mut e = self.eq.clone();
        e.extend_from_slice(eq);
        HCone::new(self.dim, i, e)
    }

    pub fn generators(&self) -> VCone {
        let g = dd::h_to_v(self.dim, &self.ineq, &self.eq);
        VCone::canonical(self.dim, g.rays, g.lines)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators().is_trivial()
    }

    /// Set equality, decided on canonical generators.
    pub fn same_set(&self, other: &HCone) -> bool {
        self.dim == other.dim && self.generators() == other.generators()
    }

    pub fn contains_cone(&self, other: &VCone) -> bool {
        other.dim == self.dim
            && other.rays.iter().all(|r| self.contains(r))
            && other
                .lines
                .iter()
                .all(|l| self.contains(l) && self.contains(&neg(l)))
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &HCone) -> HCone {
        let dim = self.dim + other.dim;
        let left = |r: &QVec| {
            let mut v = r.clone();
            v.extend(zeros(other.dim));
            v
        };
        let right = |r: &QVec| {
            let mut v = zeros(self.dim);
            v.extend(r.iter().cloned());
            v
        };
        let ineq = self.ineq.iter().map(left).chain(other.ineq.iter().map(right)).collect();
        let eq = self.eq.iter().map(left).chain(other.eq.iter().map(right)).collect();
        HCone::new(dim, ineq, eq).expect("product rows have consistent dimension")
    }
}

impl fmt::Debug for HCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HCone[{}]{{", self.dim)?;
        for a in &self.ineq {
            write!(f, " {}·y≤0", DisplayVec(a))?;
        }
        for b in &self.eq {
            write!(f, " {}·y=0", DisplayVec(b))?;
        }
        write!(f, " }}")
    }
}

impl VCone {
    fn canonical(dim: usize, rays: QMat, lines: QMat) -> Self {
        let (basis, _) = rref(&lines, dim);
        let lines: QMat = basis.iter().map(|l| primitive_unsigned(l)).collect();
        let mut rays: QMat = rays
            .iter()
            .map(|r| primitive(&project_out(r, &lines)))
            .filter(|r| !is_zero_vec(r))
            .collect();
        rays.sort_by(|a, b| lex_cmp(a, b));
        rays.dedup();
        VCone { dim, rays, lines }
    }

    /// Builds the cone generated by arbitrary (possibly redundant) generators.
    pub fn from_generators(dim: usize, rays: QMat, lines: QMat) -> Result<Self, GeomError> {
        check_rows(dim, &rays)?;
        check_rows(dim, &lines)?;
        let raw = VCone { dim, rays, lines };
        Ok(dd_v_to_h(&raw).generators())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[QVec] {
        &self.rays
    }

    pub fn lines(&self) -> &[QVec] {
        &self.lines
    }

    pub fn is_trivial(&self) -> bool {
        self.rays.is_empty() && self.lines.is_empty()
    }

    /// Dimension of the linear span.
    pub fn span_dim(&self) -> usize {
        self.lines.len() + crate::rational::rank(&self.rays, self.dim)
    }

    pub fn is_pointed(&self) -> bool {
        self.lines.is_empty()
    }

    /// Sum of the extreme rays plus the sum of the lineality basis.
    pub fn relint_point(&self) -> Result<QVec, GeomError> {
        if self.is_trivial() {
            return Err(GeomError::TrivialCone);
        }
        let mut p = zeros(self.dim);
        for g in self.rays.iter().chain(&self.lines) {
            p = add(&p, g);
        }
        Ok(p)
    }

    /// Any nonzero generator, preferring rays.
    pub fn some_nonzero(&self) -> Option<QVec> {
        self.rays.first().or(self.lines.first()).cloned()
    }
}

impl fmt::Debug for VCone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VCone[{}]{{", self.dim)?;
        for r in &self.rays {
            write!(f, " ray{}", DisplayVec(r))?;
        }
        for l in &self.lines {
            write!(f, " line{}", DisplayVec(l))?;
        }
        write!(f, " }}")
    }
}

pub fn dd_h_to_v(c: &HCone) -> VCone {
    c.generators()
}

/// H-form of a V-cone through the polar: the generators of `c°` are the
/// constraint rows of `c`.
pub fn dd_v_to_h(c: &VCone) -> HCone {
    let polar = HCone::new(c.dim, c.rays.clone(), c.lines.clone())
        .expect("generators have the ambient dimension");
    let g = polar.generators();
    HCone::new(c.dim, g.rays, g.lines).expect("generators have the ambient dimension")
}

/// `{v : ⟨v,w⟩ ≤ 0 for all w ∈ c}` for an H-cone: generated by its rows.
pub fn polar_h(c: &HCone) -> HCone {
    let raw = VCone {
        dim: c.dim,
        rays: c.ineq.clone(),
        lines: c.eq.clone(),
    };
    dd_v_to_h(&raw)
}

/// Polar of a V-cone: each ray becomes an inequality row, each line an
/// equality row.
pub fn polar_v(c: &VCone) -> HCone {
    HCone::new(c.dim, c.rays.clone(), c.lines.clone()).expect("consistent dimension")
}

fn check_matrix(m: &[QVec], cols: usize) -> Result<(), GeomError> {
    check_rows(cols, m)
}

/// `{M y : y ∈ c}`; `m` is `out × c.dim()`.
pub fn linear_image(m: &[QVec], c: &VCone) -> Result<VCone, GeomError> {
    check_matrix(m, c.dim)?;
    let out = m.len();
    let rays = c.rays.iter().map(|r| mat_vec(m, r)).collect();
    let lines = c.lines.iter().map(|l| mat_vec(m, l)).collect();
    VCone::from_generators(out, rays, lines)
}

/// `{x : M x ∈ c}`; `m` is `c.dim() × n`.
pub fn linear_preimage(m: &[QVec], c: &HCone, n: usize) -> Result<HCone, GeomError> {
    check_matrix(m, n)?;
    if m.len() != c.dim {
        return Err(GeomError::DimensionMismatch {
            expected: c.dim,
            found: m.len(),
        });
    }
    let pull = |a: &QVec| crate::rational::mat_t_vec(m, a, n);
    HCone::new(
        n,
        c.ineq.iter().map(pull).collect(),
        c.eq.iter().map(pull).collect(),
    )
}

pub fn intersect(a: &HCone, b: &HCone) -> Result<HCone, GeomError> {
    if a.dim != b.dim {
        return Err(GeomError::DimensionMismatch {
            expected: a.dim,
            found: b.dim,
        });
    }
    a.with_rows(&b.ineq, &b.eq)
}

#[cfg(test)]
mod tests;
