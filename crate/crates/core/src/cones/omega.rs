//! Closed forms for `Ω_EC = {(a, b) ∈ R₊ × R₊ : ab = 0}`.
//!
//! Normals are written as `ζ = −(γ, ν)`.

use num_traits::{Signed, Zero};

use super::union::{CellSpec, Piece};
use super::{ComplBranch, Polyhedron};
use crate::ratgeom::HCone;
use crate::rational::{qvec, QMat, Rational};

fn h(ineq: &[&[i64]], eq: &[&[i64]]) -> HCone {
    HCone::new(
        2,
        ineq.iter().map(|r| qvec(r)).collect(),
        eq.iter().map(|r| qvec(r)).collect(),
    )
    .expect("2D rows")
}

/// `R₊ × {0}` and `{0} × R₊`.
pub(super) fn polyhedra() -> Vec<Polyhedron> {
    vec![
        Polyhedron::cone(2, vec![qvec(&[-1, 0]), qvec(&[0, 1]), qvec(&[0, -1])]).unwrap(),
        Polyhedron::cone(2, vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[0, -1])]).unwrap(),
    ]
}

pub(super) fn contains(y: &[Rational]) -> bool {
    branch(y).is_some()
}

pub(super) fn branch(y: &[Rational]) -> Option<ComplBranch> {
    let (a, b) = (&y[0], &y[1]);
    if a.is_negative() || b.is_negative() {
        return None;
    }
    match (a.is_zero(), b.is_zero()) {
        (true, true) => Some(ComplBranch::Biactive),
        (true, false) => Some(ComplBranch::Lower),
        (false, true) => Some(ComplBranch::Upper),
        (false, false) => None,
    }
}

pub(super) fn tangent(br: ComplBranch) -> Vec<Piece> {
    match br {
        ComplBranch::Lower => vec![Piece::new(h(&[], &[&[1, 0]]), "d1=0")],
        ComplBranch::Upper => vec![Piece::new(h(&[], &[&[0, 1]]), "d2=0")],
        ComplBranch::Biactive => vec![
            Piece::new(h(&[&[-1, 0]], &[&[0, 1]]), "d1>=0,d2=0"),
            Piece::new(h(&[&[0, -1]], &[&[1, 0]]), "d1=0,d2>=0"),
        ],
    }
}

pub(super) fn regular(br: ComplBranch) -> HCone {
    match br {
        // ν = 0
        ComplBranch::Lower => h(&[], &[&[0, 1]]),
        // γ = 0
        ComplBranch::Upper => h(&[], &[&[1, 0]]),
        // γ ≥ 0, ν ≥ 0
        ComplBranch::Biactive => h(&[&[1, 0], &[0, 1]], &[]),
    }
}

fn gamma_zero() -> HCone {
    h(&[], &[&[1, 0]])
}

fn nu_zero() -> HCone {
    h(&[], &[&[0, 1]])
}

fn origin_cell() -> CellSpec {
    CellSpec::origin(2)
}

fn ray_cell(dir: [i64; 2]) -> CellSpec {
    let other = [dir[1], dir[0]];
    CellSpec {
        closure: h(&[&[-dir[0], -dir[1]]], &[&other]),
        strict: vec![qvec(&[-dir[0], -dir[1]])],
        point: qvec(&dir),
    }
}

/// Limiting normal cone at `(0, 0)`: `{γ = 0} ∪ {ν = 0} ∪ {γ ≥ 0, ν ≥ 0}`,
/// each piece with a cell of `Ω_EC` on which the regular normal cone equals it.
fn limiting_biactive() -> Vec<Piece> {
    vec![
        Piece::new(gamma_zero(), "gamma=0").with_cell(ray_cell([1, 0])),
        Piece::new(nu_zero(), "nu=0").with_cell(ray_cell([0, 1])),
        Piece::new(regular(ComplBranch::Biactive), "gamma>=0,nu>=0").with_cell(origin_cell()),
    ]
}

/// Directional limiting normal cone; `None` when `d` is not tangent.
pub(super) fn directional(br: ComplBranch, d: &[Rational]) -> Option<Vec<Piece>> {
    let (d1, d2) = (&d[0], &d[1]);
    match br {
        ComplBranch::Lower => d1
            .is_zero()
            .then(|| vec![Piece::new(nu_zero(), "nu=0").with_cell(origin_cell())]),
        ComplBranch::Upper => d2
            .is_zero()
            .then(|| vec![Piece::new(gamma_zero(), "gamma=0").with_cell(origin_cell())]),
        ComplBranch::Biactive => match branch(d)? {
            ComplBranch::Biactive => Some(limiting_biactive()),
            ComplBranch::Upper => Some(vec![
                Piece::new(gamma_zero(), "gamma=0").with_cell(origin_cell())
            ]),
            ComplBranch::Lower => Some(vec![Piece::new(nu_zero(), "nu=0").with_cell(origin_cell())]),
        },
    }
}

pub(super) fn sensitive(br: ComplBranch) -> QMat {
    match br {
        ComplBranch::Lower => vec![qvec(&[1, 0])],
        ComplBranch::Upper => vec![qvec(&[0, 1])],
        ComplBranch::Biactive => vec![qvec(&[1, 0]), qvec(&[0, 1])],
    }
}
