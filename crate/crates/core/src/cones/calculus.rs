use num_traits::{Signed, Zero};

use super::omega;
use super::union::{embed, CellSpec, ConeUnion, Piece};
use super::{Factor, FactorCert, SetPoint, StructuredSet};
use crate::error::{ConeError, GeomError};
use crate::ratgeom::{arrangement_cells, polar_h, HCone, Sign, DEFAULT_FACE_CAP};
use crate::rational::{dot, lex_cmp, neg, primitive_unsigned, QMat, QVec, Rational};

/// Tangent pieces of a polyhedral factor at its point: one cone per
/// containing piece, cut out by that piece's active rows.
fn poly_tangent(f: &Factor, cert: &FactorCert) -> Vec<(usize, HCone)> {
    let polys = f.polyhedra();
    let d = f.dim();
    let (containing, active): (Vec<usize>, Vec<Vec<usize>>) = match cert {
        FactorCert::PolyUnion { containing, active } => (containing.clone(), active.clone()),
        FactorCert::Zero => (vec![0], vec![(0..polys[0].rows().len()).collect()]),
        FactorCert::Orthant { active } => (vec![0], vec![active.clone()]),
        FactorCert::Compl(_) => unreachable!("handled in closed form"),
    };
    containing
        .iter()
        .zip(active)
        .map(|(&k, act)| {
            let rows = act.iter().map(|&j| polys[k].rows()[j].clone()).collect();
            (k, HCone::new(d, rows, Vec::new()).expect("factor rows"))
        })
        .collect()
}

fn factor_tangent(f: &Factor, cert: &FactorCert) -> Vec<Piece> {
    match cert {
        FactorCert::Compl(br) => omega::tangent(*br),
        _ => poly_tangent(f, cert)
            .into_iter()
            .map(|(k, c)| Piece::new(c, format!("piece {k}")))
            .collect(),
    }
}

fn factor_regular(f: &Factor, cert: &FactorCert) -> HCone {
    match cert {
        FactorCert::Compl(br) => omega::regular(*br),
        _ => {
            // Intersection of the regular normal cones of the containing pieces.
            let mut acc = HCone::full(f.dim());
            for (_, t) in poly_tangent(f, cert) {
                let n = polar_h(&t);
                acc = acc.with_rows(n.ineq(), n.eq()).expect("same dimension");
            }
            acc
        }
    }
}

fn factor_sensitive(f: &Factor, cert: &FactorCert) -> QMat {
    match cert {
        FactorCert::Compl(br) => omega::sensitive(*br),
        _ => {
            let mut rows: QMat = poly_tangent(f, cert)
                .iter()
                .flat_map(|(_, t)| t.ineq().to_vec())
                .map(|r| primitive_unsigned(&r))
                .collect();
            rows.sort_by(|a, b| lex_cmp(a, b));
            rows.dedup();
            rows
        }
    }
}

fn sign_char(s: Sign) -> char {
    match s {
        Sign::Neg => '-',
        Sign::Zero => '0',
        Sign::Pos => '+',
    }
}

/// Limiting normal cone at the origin of a union of polyhedral cones, as the
/// union over the arrangement cells `C ⊆ T` of the regular normal cone
/// `N̂_T(w)`, `w ∈ C`. Each returned piece carries its cell. Pieces with equal
/// cones are merged (the first cell in sign-lexicographic order is kept).
pub fn union_limiting_pieces(
    dim: usize,
    cones: &[HCone],
    cap: usize,
) -> Result<Vec<Piece>, GeomError> {
    let mut hyper: QMat = Vec::new();
    let mut cone_rows: Vec<Vec<(QVec, usize, bool)>> = Vec::new();
    for c in cones {
        let mut rows: Vec<QVec> = c.ineq().to_vec();
        for e in c.eq() {
            rows.push(e.clone());
            rows.push(neg(e));
        }
        let mut entry = Vec::new();
        for a in rows {
            let h = primitive_unsigned(&a);
            let idx = match hyper.iter().position(|x| *x == h) {
                Some(i) => i,
                None => {
                    hyper.push(h.clone());
                    hyper.len() - 1
                }
            };
            let positive = dot(&a, &h).is_positive();
            entry.push((a, idx, positive));
        }
        cone_rows.push(entry);
    }

    let alive = |signs: &[Sign], j: usize| {
        cone_rows[j].iter().all(|(_, idx, positive)| match signs.get(*idx) {
            None => true,
            Some(Sign::Zero) => true,
            Some(Sign::Pos) => !positive,
            Some(Sign::Neg) => *positive,
        })
    };

    let base = HCone::full(dim);
    let cells = arrangement_cells(&base, &hyper, cap, |signs| {
        !(0..cones.len()).any(|j| alive(signs, j))
    })?;

    let mut out: Vec<Piece> = Vec::new();
    for cell in cells {
        let mut ineq = Vec::new();
        let mut eq = Vec::new();
        for j in (0..cones.len()).filter(|&j| alive(&cell.signs, j)) {
            let act: QMat = cone_rows[j]
                .iter()
                .filter(|(_, idx, _)| cell.signs[*idx] == Sign::Zero)
                .map(|(a, _, _)| a.clone())
                .collect();
            let g = HCone::new(dim, act, Vec::new())?.generators();
            ineq.extend(g.rays().iter().cloned());
            eq.extend(g.lines().iter().cloned());
        }
        let normal = HCone::new(dim, ineq, eq)?;
        if out.iter().any(|p| p.cone.same_set(&normal)) {
            continue;
        }
        let strict = hyper
            .iter()
            .zip(&cell.signs)
            .filter_map(|(h, s)| match s {
                Sign::Neg => Some(h.clone()),
                Sign::Pos => Some(neg(h)),
                Sign::Zero => None,
            })
            .collect();
        let label: String = cell.signs.iter().map(|s| sign_char(*s)).collect();
        out.push(
            Piece::new(normal, format!("cell[{label}]")).with_cell(CellSpec {
                closure: cell.closure,
                strict,
                point: cell.point,
            }),
        );
    }
    Ok(out)
}

fn factor_directional(
    f: &Factor,
    cert: &FactorCert,
    d: &[Rational],
    cap: usize,
) -> Result<Option<Vec<Piece>>, GeomError> {
    if let FactorCert::Compl(br) = cert {
        return Ok(omega::directional(*br, d));
    }
    let tangent = poly_tangent(f, cert);
    let local: Vec<HCone> = tangent
        .iter()
        .filter(|(_, t)| t.contains(d))
        .map(|(_, t)| {
            let rows = t
                .ineq()
                .iter()
                .filter(|a| dot(a, d).is_zero())
                .cloned()
                .collect();
            HCone::new(f.dim(), rows, Vec::new()).expect("factor rows")
        })
        .collect();
    if local.is_empty() {
        return Ok(None);
    }
    union_limiting_pieces(f.dim(), &local, cap).map(Some)
}

fn product_pieces(parts: Vec<Vec<Piece>>) -> Vec<Piece> {
    let mut acc: Vec<Piece> = vec![Piece {
        cone: HCone::full(0),
        tag: Vec::new(),
        cell: Some(CellSpec::origin(0)),
    }];
    for part in parts {
        let mut next = Vec::with_capacity(acc.len() * part.len());
        for a in &acc {
            for b in &part {
                next.push(a.product(b));
            }
        }
        acc = next;
    }
    acc
}

fn check_dim(s: &StructuredSet, v: &[Rational]) -> Result<(), ConeError> {
    if v.len() != s.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: s.dim(),
            found: v.len(),
        }
        .into());
    }
    Ok(())
}

pub fn tangent_cone(s: &StructuredSet, p: &SetPoint) -> Result<ConeUnion, ConeError> {
    check_dim(s, p.coords())?;
    let parts = s
        .factors()
        .iter()
        .zip(p.certificate())
        .map(|(f, c)| factor_tangent(f, c))
        .collect();
    Ok(ConeUnion::from_pieces(s.dim(), product_pieces(parts))?)
}

pub fn regular_normal_cone(s: &StructuredSet, p: &SetPoint) -> Result<HCone, ConeError> {
    check_dim(s, p.coords())?;
    let mut acc = HCone::full(0);
    for (f, c) in s.factors().iter().zip(p.certificate()) {
        acc = acc.product(&factor_regular(f, c));
    }
    Ok(acc)
}

/// Raw pieces of `N_S(s; d)` with cells in the local tangent cone, in
/// deterministic order; `None` when `d ∉ T_S(s)`.
pub fn directional_pieces(
    s: &StructuredSet,
    p: &SetPoint,
    d: &[Rational],
    cap: usize,
) -> Result<Option<Vec<Piece>>, ConeError> {
    check_dim(s, p.coords())?;
    check_dim(s, d)?;
    let mut parts = Vec::new();
    for ((f, c), df) in s.factors().iter().zip(p.certificate()).zip(s.split(d)) {
        match factor_directional(f, c, df, cap)? {
            Some(ps) => parts.push(ps),
            None => return Ok(None),
        }
    }
    Ok(Some(product_pieces(parts)))
}

pub fn limiting_pieces(
    s: &StructuredSet,
    p: &SetPoint,
    cap: usize,
) -> Result<Vec<Piece>, ConeError> {
    let zero = vec![Rational::zero(); s.dim()];
    Ok(directional_pieces(s, p, &zero, cap)?.expect("0 is always tangent"))
}

pub fn limiting_normal_cone(s: &StructuredSet, p: &SetPoint) -> Result<ConeUnion, ConeError> {
    let pieces = limiting_pieces(s, p, DEFAULT_FACE_CAP)?;
    Ok(ConeUnion::from_pieces(s.dim(), pieces)?)
}

pub fn directional_normal_cone(
    s: &StructuredSet,
    p: &SetPoint,
    d: &[Rational],
) -> Result<ConeUnion, ConeError> {
    match directional_pieces(s, p, d, DEFAULT_FACE_CAP)? {
        Some(pieces) => Ok(ConeUnion::from_pieces(s.dim(), pieces)?),
        None => Ok(ConeUnion::empty(s.dim())),
    }
}

/// Rows whose sign pattern at a direction `d` determines `N_S(s; d)` and
/// whether `d ∈ T_S(s)`, embedded in the ambient space.
pub fn sensitive_rows(s: &StructuredSet, p: &SetPoint) -> QMat {
    let dim = s.dim();
    let mut out = Vec::new();
    for ((f, c), off) in s.factors().iter().zip(p.certificate()).zip(s.offsets()) {
        for r in factor_sensitive(f, c) {
            out.push(embed(&r, off, dim));
        }
    }
    out
}
