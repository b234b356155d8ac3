//! Second-order test: is there `u` in a stratum and `ζ` in a multiplier cone
//! with `⟨ζ, D²P(x̄)(u)⟩ > 0`?

use num_traits::{Signed, Zero};

use super::strata::{Stratum, ZPiece};
use crate::ratgeom::VCone;
use crate::rational::{add, bilinear, int, is_neg_semidefinite, neg, scale, zeros, QMat, QVec};

/// `Σ_r g_r Q_r`.
pub(crate) fn weighted_hessian(hess: &[QMat], g: &[crate::Rational], n: usize) -> QMat {
    let mut m = vec![zeros(n); n];
    for (q, w) in hess.iter().zip(g) {
        if w.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                if !q[i][j].is_zero() {
                    m[i][j] += w * &q[i][j];
                }
            }
        }
    }
    m
}

/// Signed generators of a multiplier cone: every ray, and both signs of
/// every line.
pub(crate) fn signed_generators(z: &VCone) -> Vec<QVec> {
    let mut out: Vec<QVec> = z.rays().to_vec();
    for l in z.lines() {
        out.push(l.clone());
        out.push(neg(l));
    }
    out
}

/// Deterministic relative-interior points of a stratum: the base point `p`
/// and `p + λ·r` for generators and pairs of rays, `λ ∈ {4, 16}`.
pub(crate) fn samples(p: &QVec, closure: &VCone) -> Vec<QVec> {
    let mut out = vec![p.clone()];
    let dirs = signed_generators(closure);
    let rays = closure.rays();
    let mut pairs = Vec::new();
    for i in 0..rays.len() {
        for j in i + 1..rays.len() {
            pairs.push(add(&rays[i], &rays[j]));
        }
    }
    for w in [int(4), int(16)] {
        for d in dirs.iter().chain(&pairs) {
            out.push(add(p, &scale(d, &w)));
        }
    }
    out
}

pub(crate) enum Outcome {
    /// `⟨ζ, l⟩ ≤ 0` on the whole stratum for every `ζ`.
    Pass,
    /// `(u, ζ)` with `⟨ζ, D²P(x̄)(u)⟩ > 0`.
    Fail(Vec<(QVec, QVec)>),
    Undecided,
}

/// Decides one (stratum, multiplier piece) pair.
pub(crate) fn decide(s: &Stratum, z: &ZPiece, hess: &[QMat], n: usize) -> Outcome {
    let span = s.closure.span_dim();
    let basis: QMat = s.closure.rays().iter().chain(s.closure.lines()).cloned().collect();
    let pts = samples(&s.u, &s.closure);
    let mut found = Vec::new();
    let mut undecided = false;
    for g in signed_generators(&z.gens) {
        let m = weighted_hessian(hess, &g, n);
        if m.iter().all(|r| r.iter().all(Zero::is_zero)) {
            continue;
        }
        if span <= 1 {
            if bilinear(&m, &s.u, &s.u).is_positive() {
                found.push((s.u.clone(), g));
            }
            continue;
        }
        let k = basis.len();
        let gram: QMat = (0..k)
            .map(|i| (0..k).map(|j| bilinear(&m, &basis[i], &basis[j])).collect())
            .collect();
        if is_neg_semidefinite(&gram) {
            continue;
        }
        if s.closure.is_pointed() && gram.iter().all(|r| r.iter().all(|x| !x.is_positive())) {
            continue;
        }
        match pts.iter().find(|u| bilinear(&m, u, u).is_positive()) {
            Some(u) => found.push((u.clone(), g)),
            None => undecided = true,
        }
    }
    if !found.is_empty() {
        Outcome::Fail(found)
    } else if undecided {
        Outcome::Undecided
    } else {
        Outcome::Pass
    }
}

/// Does some `ζ ∈ Z` have `⟨ζ, D²P(x̄)(u)⟩ ≥ 0` with `ζ ≠ 0`, given the
/// values on generators? Used to skip hopeless certificate searches.
pub(crate) fn max_sign(z: &VCone, hess: &[QMat], u: &QVec, n: usize) -> std::cmp::Ordering {
    let mut best = std::cmp::Ordering::Less;
    for g in signed_generators(z) {
        let v = bilinear(&weighted_hessian(hess, &g, n), u, u);
        let o = crate::rational::sign(&v);
        if o > best {
            best = o;
        }
    }
    best
}
