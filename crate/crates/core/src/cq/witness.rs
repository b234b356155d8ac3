//! Exact re-verification of witnesses against the definitions.

use num_traits::{Signed, Zero};

use super::{Mode, SequenceTerm, Witness};
use crate::cones::{directional_normal_cone, limiting_normal_cone, regular_normal_cone, tangent_cone};
use crate::rational::{
    add, dot, is_zero_vec, mat_t_vec, mat_vec, norm_sq, scale, sub, DisplayVec, QVec, Rational,
};
use crate::system::schema::CheckKind;
use crate::system::{index_sets, CsInstance, ProblemInstance};

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn point_along(x: &[Rational], t: &Rational, u: &[Rational]) -> QVec {
    add(x, &scale(u, t))
}

/// Sign condition of one sequence term in the general form.
pub(crate) fn general_term(
    inst: &ProblemInstance,
    zeta: &[Rational],
    mode: Mode,
    term: &SequenceTerm,
) -> Result<(), String> {
    let s = term.s.as_ref().ok_or("sequence term without s^k")?;
    let zk = term.zeta.as_ref().ok_or("sequence term without ζ^k")?;
    if term.u.len() != inst.n() || s.len() != inst.m() || zk.len() != inst.m() {
        return Err("sequence term has wrong dimensions".into());
    }
    let sp = inst
        .lambda()
        .point(s)
        .map_err(|_| format!("s^k = {} is not in Λ", DisplayVec(s)))?;
    let normal = regular_normal_cone(inst.lambda(), &sp).map_err(err)?;
    if !normal.contains(zk) {
        return Err(format!("ζ^k is not a regular normal at s^k = {}", DisplayVec(s)));
    }
    let y = inst
        .map()
        .eval(&point_along(inst.anchor(), &term.t, &term.u))
        .map_err(err)?;
    let diff = sub(&y, s);
    sign_condition(zeta, &diff, mode)
}

fn sign_condition(zeta: &[Rational], diff: &[Rational], mode: Mode) -> Result<(), String> {
    match mode {
        Mode::Pseudo => {
            if dot(zeta, diff).is_positive() {
                Ok(())
            } else {
                Err("⟨ζ, P(x̄ + t_k u^k) − s^k⟩ ≤ 0".into())
            }
        }
        Mode::Quasi => {
            for (i, (z, d)) in zeta.iter().zip(diff).enumerate() {
                if !z.is_zero() && !(z * d).is_positive() {
                    return Err(format!("ζ_{i}·(P_{i}(x̄ + t_k u^k) − s^k_{i}) ≤ 0"));
                }
            }
            Ok(())
        }
    }
}

fn nonincreasing(vals: &[Rational]) -> bool {
    vals.windows(2).all(|w| w[1] <= w[0])
}

/// `t_k > 0` strictly decreasing, and `u^k`, `s^k`, `ζ^k` not moving away
/// from their limits along the prefix.
fn sequence_shape(
    seq: &[SequenceTerm],
    u: &[Rational],
    s: Option<&[Rational]>,
    zeta: &[Rational],
) -> Result<(), String> {
    if seq.is_empty() {
        return Err("empty sequence prefix".into());
    }
    if !seq[0].t.is_positive() || seq.windows(2).any(|w| w[1].t >= w[0].t) {
        return Err("t_k must be positive and strictly decreasing".into());
    }
    let du: Vec<Rational> = seq.iter().map(|k| norm_sq(&sub(&k.u, u))).collect();
    if !nonincreasing(&du) {
        return Err("u^k does not approach u".into());
    }
    if let Some(s) = s {
        let ds: Vec<Rational> = seq
            .iter()
            .filter_map(|k| k.s.as_ref().map(|sk| norm_sq(&sub(sk, s))))
            .collect();
        if !nonincreasing(&ds) {
            return Err("s^k does not approach P(x̄)".into());
        }
        let dz: Vec<Rational> = seq
            .iter()
            .filter_map(|k| k.zeta.as_ref().map(|zk| norm_sq(&sub(zk, zeta))))
            .collect();
        if !nonincreasing(&dz) {
            return Err("ζ^k does not approach ζ".into());
        }
    }
    Ok(())
}

/// Re-checks a `FAILS` witness of `kind` with exact arithmetic.
pub fn verify_witness(inst: &ProblemInstance, kind: CheckKind, w: &Witness) -> Result<(), String> {
    inst.require_exact().map_err(err)?;
    let (n, m) = (inst.n(), inst.m());
    let j = inst.jacobian().map_err(err)?;
    let zeta = &w.zeta;
    if zeta.len() != m || is_zero_vec(zeta) {
        return Err("ζ must be a nonzero vector of the output dimension".into());
    }
    if !is_zero_vec(&mat_t_vec(&j, zeta, n)) {
        return Err("∇P(x̄)*ζ ≠ 0".into());
    }
    let point = inst.anchor_point();
    if kind == CheckKind::Nnamcq {
        let nc = limiting_normal_cone(inst.lambda(), point).map_err(err)?;
        return if nc.contains(zeta) {
            Ok(())
        } else {
            Err("ζ is not a limiting normal".into())
        };
    }
    let u = w.u.as_ref().ok_or("witness has no direction")?;
    if u.len() != n || is_zero_vec(u) {
        return Err("u must be a nonzero direction".into());
    }
    let xi = mat_vec(&j, u);
    let t = tangent_cone(inst.lambda(), point).map_err(err)?;
    if !t.contains(&xi) {
        return Err("∇P(x̄)u is not tangent".into());
    }
    let nd = directional_normal_cone(inst.lambda(), point, &xi).map_err(err)?;
    if !nd.contains(zeta) {
        return Err("ζ is not in the directional limiting normal cone".into());
    }
    match kind {
        CheckKind::Nnamcq | CheckKind::Foscms => Ok(()),
        CheckKind::Soscms => {
            let l = inst.second_derivative(u).map_err(err)?;
            if let Some(wl) = &w.l {
                if *wl != l {
                    return Err("recorded l differs from D²P(x̄)(u)".into());
                }
            }
            if dot(zeta, &l).is_positive() {
                Ok(())
            } else {
                Err("⟨ζ, D²P(x̄)(u)⟩ ≤ 0".into())
            }
        }
        CheckKind::DirPseudo | CheckKind::DirQuasi => {
            let mode = if kind == CheckKind::DirPseudo {
                Mode::Pseudo
            } else {
                Mode::Quasi
            };
            sequence_shape(&w.sequence, u, Some(point.coords()), zeta)?;
            for term in &w.sequence {
                general_term(inst, zeta, mode, term)?;
            }
            Ok(())
        }
    }
}

/// Splits `ζ = (η, −γ₁, −ν₁, …)` into `(η, γ, ν)`.
pub(crate) fn split_cs(cs: &CsInstance, zeta: &[Rational]) -> (QVec, QVec, QVec) {
    let d = cs.d();
    let eta = zeta[..d].to_vec();
    let gamma = (0..cs.m()).map(|i| -&zeta[d + 2 * i]).collect();
    let nu = (0..cs.m()).map(|i| -&zeta[d + 2 * i + 1]).collect();
    (eta, gamma, nu)
}

/// Condition (iii) at one term of the complementarity form.
pub(crate) fn cs_term(
    cs: &CsInstance,
    zeta: &[Rational],
    mode: Mode,
    term: &SequenceTerm,
) -> Result<(), String> {
    let (eta, gamma, nu) = split_cs(cs, zeta);
    if term.u.len() != cs.n() {
        return Err("sequence term has wrong dimensions".into());
    }
    let x = point_along(cs.anchor(), &term.t, &term.u);
    let h = cs.h().eval(&x).map_err(err)?;
    let phi = cs.phi().eval(&x).map_err(err)?;
    let psi = cs.psi().eval(&x).map_err(err)?;
    match mode {
        Mode::Pseudo => {
            let v = dot(&eta, &h) - dot(&gamma, &phi) - dot(&nu, &psi);
            if v.is_positive() {
                Ok(())
            } else {
                Err("ηᵀH − γᵀΦ − νᵀΨ ≤ 0".into())
            }
        }
        Mode::Quasi => {
            for (i, (e, hv)) in eta.iter().zip(&h).enumerate() {
                if !e.is_zero() && !(e * hv).is_positive() {
                    return Err(format!("η_{i} H_{i} ≤ 0"));
                }
            }
            for (i, (g, p)) in gamma.iter().zip(&phi).enumerate() {
                if !g.is_zero() && !(g * p).is_negative() {
                    return Err(format!("γ_{i} Φ_{i} ≥ 0"));
                }
            }
            for (i, (v, p)) in nu.iter().zip(&psi).enumerate() {
                if !v.is_zero() && !(v * p).is_negative() {
                    return Err(format!("ν_{i} Ψ_{i} ≥ 0"));
                }
            }
            Ok(())
        }
    }
}

/// Re-checks the multiplier sign and orthogonality conditions of the
/// complementarity form for a witness with `ζ = (η, −γ₁, −ν₁, …)`.
pub fn verify_cs_witness(cs: &CsInstance, mode: Mode, w: &Witness) -> Result<(), String> {
    if !cs.is_exact() {
        return Err("exact re-verification needs affine or quadratic atoms".into());
    }
    let (d, m, n) = (cs.d(), cs.m(), cs.n());
    if w.zeta.len() != d + 2 * m || is_zero_vec(&w.zeta) {
        return Err("(η, γ, ν) must be nonzero with the right dimension".into());
    }
    let u = w.u.as_ref().ok_or("witness has no direction")?;
    if u.len() != n || is_zero_vec(u) {
        return Err("u must be a nonzero direction".into());
    }
    let sets = index_sets(cs, Some(u)).map_err(err)?;
    let (a00, a0p, ap0) = sets.directional.clone().expect("direction given");
    let (eta, gamma, nu) = split_cs(cs, &w.zeta);
    let (jh, jphi, jpsi) = cs.jacobians().map_err(err)?;
    let r = sub(
        &sub(&mat_t_vec(&jh, &eta, n), &mat_t_vec(&jphi, &gamma, n)),
        &mat_t_vec(&jpsi, &nu, n),
    );
    if !is_zero_vec(&r) {
        return Err("(i) fails: ∇Hᵀη − ∇Φᵀγ − ∇Ψᵀν ≠ 0".into());
    }
    for &i in sets.ip0.iter().chain(&ap0) {
        if !gamma[i].is_zero() {
            return Err(format!("(ii) fails: γ_{} ≠ 0", i + 1));
        }
    }
    for &i in sets.i0p.iter().chain(&a0p) {
        if !nu[i].is_zero() {
            return Err(format!("(ii) fails: ν_{} ≠ 0", i + 1));
        }
    }
    for &i in &a00 {
        let both_pos = gamma[i].is_positive() && nu[i].is_positive();
        if !both_pos && !(&gamma[i] * &nu[i]).is_zero() {
            return Err(format!("(ii) fails at biactive index {}", i + 1));
        }
    }
    sequence_shape(&w.sequence, u, None, &w.zeta)?;
    for term in &w.sequence {
        cs_term(cs, &w.zeta, mode, term)?;
    }
    Ok(())
}
