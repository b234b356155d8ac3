use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::project::project;
use super::SamplingConfig;
use crate::error::NumericError;
use crate::rational::vec_to_f64;
use crate::system::ProblemInstance;

const GN_MAX_ITER: usize = 60;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn residual_vec(inst: &ProblemInstance, x: &[f64], tol: f64) -> Result<Vec<f64>, NumericError> {
    let y = inst.map().eval_f64(x);
    let p = project(inst.lambda(), &y, tol)?;
    Ok(y.iter().zip(&p).map(|(a, b)| a - b).collect())
}

/// `d(P(x), Λ)`.
pub fn residual(inst: &ProblemInstance, x: &[f64], tol: f64) -> Result<f64, NumericError> {
    Ok(norm(&residual_vec(inst, x, tol)?))
}

/// `max{‖∇ₓL‖, ‖h‖, ‖min{μ, −g}‖}` for KKT instances, read off the
/// embedded map; `None` for other instances.
pub fn kkt_residual(inst: &ProblemInstance, x: &[f64]) -> Option<f64> {
    let k = inst.kkt_layout()?;
    let y = inst.map().eval_f64(x);
    let grad = norm(&y[..k.p]);
    let h = norm(&y[k.p..k.p + k.n_eq]);
    let off = k.p + k.n_eq;
    let comp: Vec<f64> = (0..k.m).map(|i| y[off + 2 * i].min(y[off + 2 * i + 1])).collect();
    Some(grad.max(h).max(norm(&comp)))
}

/// Gauss–Newton with backtracking on `‖P(x) − Π_Λ(P(x))‖`; returns the last
/// iterate and its residual.
fn descend(inst: &ProblemInstance, start: &[f64], tol: f64, target: f64) -> Result<(Vec<f64>, f64), NumericError> {
    let n = start.len();
    let mut x = start.to_vec();
    let mut r = residual_vec(inst, &x, tol)?;
    let mut rn = norm(&r);
    for _ in 0..GN_MAX_ITER {
        if rn <= target {
            break;
        }
        let jac = inst.map().jacobian_f64(&x);
        let m = jac.len();
        let jm = DMatrix::from_fn(m, n, |i, j| jac[i][j]);
        let Ok(pinv) = jm.pseudo_inverse(1e-12) else { break };
        let step = -(pinv * DVector::from_column_slice(&r));
        let mut lam = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + lam * d).collect();
            let rc = residual_vec(inst, &cand, tol)?;
            let rcn = norm(&rc);
            if rcn < rn {
                x = cand;
                r = rc;
                rn = rcn;
                improved = true;
                break;
            }
            lam *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((x, rn))
}

/// Upper estimate of `d(x, G⁻¹(0))`: local descent from `x`, from points
/// between `x` and `x̄`, and `‖x − x̄‖` itself.
pub fn distance_to_solutions(inst: &ProblemInstance, x: &[f64], cfg: &SamplingConfig) -> Result<f64, NumericError> {
    let anchor = vec_to_f64(inst.anchor());
    let mut best = dist(x, &anchor);
    let res0 = residual(inst, x, cfg.projection_tol)?;
    if res0 == 0.0 {
        return Ok(0.0);
    }
    let noise = 1e-14 * (1.0 + norm(&inst.map().eval_f64(x)));
    let target = (1e-3 * cfg.projection_tol).min(1e-8 * res0).max(noise);
    let starts = cfg.multistart.max(1);
    for k in 0..starts {
        let a = k as f64 / starts as f64;
        let s: Vec<f64> = x.iter().zip(&anchor).map(|(p, q)| p + a * (q - p)).collect();
        let (z, rz) = descend(inst, &s, cfg.projection_tol, target)?;
        if rz <= target {
            best = best.min(dist(x, &z));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusRow {
    pub radius: f64,
    pub samples: usize,
    /// Samples whose residual exceeded the floor.
    pub infeasible: usize,
    /// Max of `d(x, S) / d(P(x), Λ)`; `None` when every sample was feasible.
    pub max_ratio: Option<f64>,
    /// Same with the KKT residual in the denominator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kkt_max_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusTable {
    pub config: SamplingConfig,
    pub rows: Vec<ModulusRow>,
    /// Max ratio at the smallest radius is within a factor 2 of the one
    /// before; `None` if either is undefined.
    pub bounded: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kkt_bounded: Option<bool>,
}

fn trend(vals: &[Option<f64>]) -> Option<bool> {
    match vals {
        [.., Some(a), Some(b)] => Some(*b <= 2.0 * a),
        _ => None,
    }
}

fn direction(seed: u64, i: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    loop {
        let d: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let l = norm(&d);
        if l > 1e-12 {
            return d.into_iter().map(|v| v / l).collect();
        }
    }
}

/// Samples `x̄ + r·d` for unit directions `d` shared across radii, and
/// records the largest ratio per radius.
pub fn empirical_modulus(inst: &ProblemInstance, cfg: &SamplingConfig) -> Result<ModulusTable, NumericError> {
    cfg.validate()?;
    let n = inst.n();
    let anchor = vec_to_f64(inst.anchor());
    let dirs: Vec<Vec<f64>> = (0..cfg.samples_per_radius).map(|i| direction(cfg.seed, i, n)).collect();
    let mut rows = Vec::new();
    for &r in &cfg.radii {
        let per: Vec<Option<(f64, Option<f64>)>> = dirs
            .par_iter()
            .map(|d| -> Result<_, NumericError> {
                let x: Vec<f64> = anchor.iter().zip(d).map(|(a, v)| a + r * v).collect();
                let res = residual(inst, &x, cfg.projection_tol)?;
                if res <= cfg.residual_floor {
                    return Ok(None);
                }
                let dx = distance_to_solutions(inst, &x, cfg)?;
                let kkt = kkt_residual(inst, &x).filter(|k| *k > cfg.residual_floor).map(|k| dx / k);
                Ok(Some((dx / res, kkt)))
            })
            .collect::<Result<_, _>>()?;
        let hits: Vec<(f64, Option<f64>)> = per.into_iter().flatten().collect();
        let max_ratio = hits.iter().map(|h| h.0).reduce(f64::max);
        let kkt_max_ratio = if inst.kkt_layout().is_some() {
            hits.iter().filter_map(|h| h.1).reduce(f64::max)
        } else {
            None
        };
        rows.push(ModulusRow {
            radius: r,
            samples: dirs.len(),
            infeasible: hits.len(),
            max_ratio,
            kkt_max_ratio,
        });
    }
    let bounded = trend(&rows.iter().map(|r| r.max_ratio).collect::<Vec<_>>());
    let kkt_bounded = inst
        .kkt_layout()
        .and_then(|_| trend(&rows.iter().map(|r| r.kkt_max_ratio).collect::<Vec<_>>()));
    Ok(ModulusTable {
        config: cfg.clone(),
        rows,
        bounded,
        kkt_bounded,
    })
}
