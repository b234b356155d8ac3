//! Projections onto `Λ` in floating point, and exact snapping of a numeric
//! projection onto a polyhedron.

use num_traits::Signed;

use crate::cones::{Factor, Orientation, Polyhedron, StructuredSet};
use crate::error::NumericError;
use crate::rational::{axpy, dot, from_f64, rank, rref, sub, to_f64, QMat, QVec, Rational};

const DYKSTRA_MAX_ITER: usize = 20_000;

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn halfspace(a: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    let viol = a.iter().zip(y).map(|(p, q)| p * q).sum::<f64>() - b;
    let nn: f64 = a.iter().map(|p| p * p).sum();
    if viol <= 0.0 || nn == 0.0 {
        return y.to_vec();
    }
    y.iter().zip(a).map(|(q, p)| q - viol / nn * p).collect()
}

/// Dykstra's alternating projections onto `{y : Ay ≤ b}`.
pub fn project_polyhedron(p: &Polyhedron, y: &[f64], tol: f64) -> Result<Vec<f64>, NumericError> {
    let rows: Vec<Vec<f64>> = p.rows().iter().map(|r| r.iter().map(to_f64).collect()).collect();
    let rhs: Vec<f64> = p.rhs().iter().map(to_f64).collect();
    if rows.is_empty() {
        return Ok(y.to_vec());
    }
    let mut x = y.to_vec();
    let mut corr = vec![vec![0.0; y.len()]; rows.len()];
    let violation = |x: &[f64]| {
        rows.iter()
            .zip(&rhs)
            .map(|(a, b)| a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - b)
            .fold(0.0_f64, f64::max)
    };
    for _ in 0..DYKSTRA_MAX_ITER {
        let prev = x.clone();
        for (i, (a, b)) in rows.iter().zip(&rhs).enumerate() {
            let z: Vec<f64> = x.iter().zip(&corr[i]).map(|(p, q)| p + q).collect();
            let nx = halfspace(a, *b, &z);
            corr[i] = z.iter().zip(&nx).map(|(p, q)| p - q).collect();
            x = nx;
        }
        if dist2(&x, &prev).sqrt() <= tol * 1e-3 && violation(&x) <= tol {
            return Ok(x);
        }
    }
    let v = violation(&x);
    if v <= tol {
        Ok(x)
    } else {
        Err(NumericError::ProjectionNonConvergence {
            iterations: DYKSTRA_MAX_ITER,
            violation: v,
        })
    }
}

/// The convex pieces of one factor.
pub(crate) fn factor_pieces(f: &Factor) -> Vec<Polyhedron> {
    f.polyhedra()
}

/// Nearest point of one factor, and its distance.
pub fn project_factor(f: &Factor, y: &[f64], tol: f64) -> Result<Vec<f64>, NumericError> {
    match f {
        Factor::Zero { .. } => Ok(vec![0.0; y.len()]),
        Factor::Orthant { orientation, .. } => Ok(y
            .iter()
            .map(|v| match orientation {
                Orientation::Nonneg => v.max(0.0),
                Orientation::Nonpos => v.min(0.0),
            })
            .collect()),
        Factor::Compl => {
            let a = vec![y[0].max(0.0), 0.0];
            let b = vec![0.0, y[1].max(0.0)];
            Ok(if dist2(&a, y) <= dist2(&b, y) { a } else { b })
        }
        Factor::PolyUnion { pieces, .. } => {
            let mut best: Option<Vec<f64>> = None;
            for p in pieces {
                let q = project_polyhedron(p, y, tol)?;
                if best.as_ref().is_none_or(|b| dist2(&q, y) < dist2(b, y)) {
                    best = Some(q);
                }
            }
            Ok(best.unwrap_or_else(|| y.to_vec()))
        }
    }
}

/// Nearest point of `Λ` (product of per-factor projections).
pub fn project(set: &StructuredSet, y: &[f64], tol: f64) -> Result<Vec<f64>, NumericError> {
    let mut out = Vec::with_capacity(y.len());
    for (f, off) in set.factors().iter().zip(set.offsets()) {
        out.extend(project_factor(f, &y[off..off + f.dim()], tol)?);
    }
    Ok(out)
}

/// `d(y, Λ)`.
pub fn distance_to_set(set: &StructuredSet, y: &[f64], tol: f64) -> Result<f64, NumericError> {
    Ok(dist2(&project(set, y, tol)?, y).sqrt())
}

/// Exact projection of `y` onto `{s : ⟨a_i, s⟩ = b_i, i ∈ active}` where the
/// active set is read off the numeric projection `approx`; `None` if the
/// result is not in the polyhedron.
pub(crate) fn snap(p: &Polyhedron, y: &[Rational], approx: &[f64], tol: f64) -> Option<QVec> {
    let dim = y.len();
    let mut rows: QMat = Vec::new();
    let mut rhs: Vec<Rational> = Vec::new();
    for (a, b) in p.rows().iter().zip(p.rhs()) {
        let af: Vec<f64> = a.iter().map(to_f64).collect();
        let slack = af.iter().zip(approx).map(|(x, z)| x * z).sum::<f64>() - to_f64(b);
        if slack.abs() > tol.sqrt().max(1e-7) {
            continue;
        }
        let mut trial = rows.clone();
        trial.push(a.clone());
        if rank(&trial, dim) > rows.len() {
            rows = trial;
            rhs.push(b.clone());
        }
    }
    let k = rows.len();
    let s = if k == 0 {
        y.to_vec()
    } else {
        let aug: QMat = (0..k)
            .map(|i| {
                let mut r: QVec = (0..k).map(|j| dot(&rows[i], &rows[j])).collect();
                r.push(dot(&rows[i], y) - &rhs[i]);
                r
            })
            .collect();
        let (red, _) = rref(&aug, k + 1);
        let mut s = y.to_vec();
        for (i, r) in red.iter().enumerate() {
            s = axpy(&s, &-r[k].clone(), &rows[i]);
        }
        s
    };
    p.contains(&s).then_some(s)
}

/// Exact nearest-point candidates of `y` in each convex piece of each
/// factor. `None` entries mark pieces where snapping failed.
pub(crate) fn exact_candidates(
    set: &StructuredSet,
    y: &[Rational],
    tol: f64,
) -> Vec<Vec<QVec>> {
    let mut out = Vec::new();
    for (f, off) in set.factors().iter().zip(set.offsets()) {
        let part = &y[off..off + f.dim()];
        let partf: Vec<f64> = part.iter().map(to_f64).collect();
        let zero = Rational::from_integer(0.into());
        let cands: Vec<QVec> = match f {
            Factor::Zero { dim } => vec![vec![zero; *dim]],
            Factor::Orthant { orientation, .. } => vec![part
                .iter()
                .map(|v| match orientation {
                    Orientation::Nonneg if v.is_negative() => zero.clone(),
                    Orientation::Nonpos if v.is_positive() => zero.clone(),
                    _ => v.clone(),
                })
                .collect()],
            Factor::Compl => {
                let clamp = |v: &Rational| if v.is_negative() { zero.clone() } else { v.clone() };
                vec![
                    vec![clamp(&part[0]), zero.clone()],
                    vec![zero.clone(), clamp(&part[1])],
                ]
            }
            Factor::PolyUnion { .. } => factor_pieces(f)
                .iter()
                .filter_map(|p| {
                    let approx = project_polyhedron(p, &partf, tol).ok()?;
                    snap(p, part, &approx, tol)
                })
                .collect(),
        };
        let mut cands = cands;
        cands.sort_by(|a, b| {
            let da = crate::rational::norm_sq(&sub(a, part));
            let db = crate::rational::norm_sq(&sub(b, part));
            da.cmp(&db)
        });
        out.push(cands);
    }
    out
}

pub(crate) fn rational_of(x: f64) -> Rational {
    from_f64(x).unwrap_or_else(|| Rational::from_integer(0.into()))
}
