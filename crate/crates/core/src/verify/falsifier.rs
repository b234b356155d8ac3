use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::project::{exact_candidates, rational_of};
use super::SamplingConfig;
use crate::cones::regular_normal_cone;
use crate::cq::{Mode, SequenceTerm, Witness};
use crate::error::NumericError;
use crate::rational::{add, dot, is_zero_vec, norm_sq, scale, sub, QVec, Rational};
use crate::system::ProblemInstance;

const COMBO_CAP: usize = 64;

fn sign_ok(zeta: &[Rational], diff: &[Rational], mode: Mode) -> bool {
    match mode {
        Mode::Pseudo => dot(zeta, diff).is_positive(),
        Mode::Quasi => zeta
            .iter()
            .zip(diff)
            .all(|(z, d)| z.is_zero() || (z * d).is_positive()),
    }
}

/// Cartesian product of per-factor candidates, nearest first, capped.
fn combos(parts: &[Vec<QVec>]) -> Vec<QVec> {
    let mut acc: Vec<QVec> = vec![Vec::new()];
    for p in parts {
        let mut next = Vec::new();
        'outer: for a in &acc {
            for c in p {
                let mut v = a.clone();
                v.extend(c.iter().cloned());
                next.push(v);
                if next.len() >= COMBO_CAP {
                    break 'outer;
                }
            }
        }
        acc = next;
    }
    acc
}

/// Quantizes a float to a multiple of `2^-10`.
fn coarse(x: f64) -> Rational {
    rational_of((x * 1024.0).round() / 1024.0)
}

fn perturbation(cfg: &SamplingConfig, idx: usize, n: usize) -> QVec {
    if idx == 0 {
        return vec![Rational::zero(); n];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1 << 32 | idx as u64);
    (0..n).map(|_| coarse(rng.sample::<f64, _>(StandardNormal))).collect()
}

/// One term: `s^k` is the nearest exact candidate in `Λ` at which `ζ` is a
/// regular normal and the sign condition holds.
fn term(
    inst: &ProblemInstance,
    u: &[Rational],
    zeta: &[Rational],
    mode: Mode,
    t: Rational,
    delta: &[Rational],
    tol: f64,
) -> Result<Option<SequenceTerm>, NumericError> {
    let uk = add(u, &scale(delta, &t));
    let x = add(inst.anchor(), &scale(&uk, &t));
    let y = inst.map().eval(&x)?;
    let parts = exact_candidates(inst.lambda(), &y, tol);
    if parts.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut cands = combos(&parts);
    cands.sort_by_key(|s| norm_sq(&sub(s, &y)));
    for s in cands {
        let Ok(sp) = inst.lambda().point(&s) else { continue };
        let Ok(normal) = regular_normal_cone(inst.lambda(), &sp) else { continue };
        if normal.contains(zeta) && sign_ok(zeta, &sub(&y, &s), mode) {
            return Ok(Some(SequenceTerm {
                t,
                u: uk,
                s: Some(s),
                zeta: Some(zeta.to_vec()),
            }));
        }
    }
    Ok(None)
}

fn approaches(seq: &[SequenceTerm], u: &[Rational], s: &[Rational]) -> bool {
    let du: Vec<Rational> = seq.iter().map(|k| norm_sq(&sub(&k.u, u))).collect();
    let ds: Vec<Rational> = seq
        .iter()
        .map(|k| norm_sq(&sub(k.s.as_ref().expect("set"), s)))
        .collect();
    du.windows(2).all(|w| w[1] <= w[0]) && ds.windows(2).all(|w| w[1] <= w[0])
}

/// Searches `t_k = t₀σ^k`, `k ≤ K`, `u^k = u + t_k δ` for a few fixed
/// perturbations `δ`, with `s^k` a projection of `P(x̄ + t_k u^k)` onto a
/// piece of `Λ` and `ζ^k = ζ`. Every term of the returned prefix satisfies
/// the mode's sign condition in exact arithmetic. `None` says nothing about
/// whether the condition holds.
pub fn sequence_falsifier(
    inst: &ProblemInstance,
    u: &QVec,
    zeta: &QVec,
    mode: Mode,
    cfg: &SamplingConfig,
) -> Result<Option<Witness>, NumericError> {
    cfg.validate()?;
    inst.require_exact()?;
    if u.len() != inst.n() || zeta.len() != inst.m() {
        return Err(NumericError::Config("direction or multiplier has the wrong dimension".into()));
    }
    if is_zero_vec(zeta) || is_zero_vec(u) {
        return Ok(None);
    }
    let t0 = rational_of(cfg.t0);
    let shrink = rational_of(cfg.shrink);
    let sbar = inst.anchor_point().coords().to_vec();
    'delta: for idx in 0..cfg.perturbations.max(1) {
        let delta = perturbation(cfg, idx, inst.n());
        let mut seq = Vec::new();
        let mut t = t0.clone();
        for _ in 0..=cfg.max_depth {
            match term(inst, u, zeta, mode, t.clone(), &delta, cfg.projection_tol)? {
                Some(k) => seq.push(k),
                None => continue 'delta,
            }
            t = &t * &shrink;
        }
        if approaches(&seq, u, &sbar) {
            return Ok(Some(Witness {
                u: Some(u.clone()),
                zeta: zeta.clone(),
                stratum: "falsifier".into(),
                l: None,
                sequence: seq,
            }));
        }
    }
    Ok(None)
}
