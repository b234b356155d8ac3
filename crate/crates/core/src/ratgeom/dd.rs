//! Incremental double description for `{y : A y ≤ 0, B y = 0}`.
//!
//! Lines are kept orthogonal to every processed row, so the lineality space
//! of the current cone is exactly their span. Rays carry the set of processed
//! rows they are tight on; two rays are adjacent when the rows tight on both
//! have rank `dim - #lines - 2`.

use num_traits::{Signed, Zero};

use crate::rational::{axpy, dot, neg, primitive, rank, QMat, QVec, Rational};

struct Ray {
    v: QVec,
    tight: Vec<bool>,
}

pub(crate) struct Generators {
    pub rays: QMat,
    pub lines: QMat,
}

pub(crate) fn h_to_v(dim: usize, ineq: &[QVec], eq: &[QVec]) -> Generators {
    let mut lines: QMat = (0..dim).map(|i| crate::rational::unit(dim, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();
    let mut processed: QMat = Vec::new();

    for row in eq {
        add_row(dim, row, true, &mut lines, &mut rays, &mut processed);
    }
    for row in ineq {
        add_row(dim, row, false, &mut lines, &mut rays, &mut processed);
    }
    Generators {
        rays: rays.into_iter().map(|r| r.v).collect(),
        lines,
    }
}

fn add_row(
    dim: usize,
    row: &[Rational],
    equality: bool,
    lines: &mut QMat,
    rays: &mut Vec<Ray>,
    processed: &mut QMat,
) {
    if row.iter().all(Zero::is_zero) {
        return;
    }
    if let Some(pivot) = lines.iter().position(|l| !dot(row, l).is_zero()) {
        let l = lines.swap_remove(pivot);
        let al = dot(row, &l);
        for other in lines.iter_mut() {
            let a = dot(row, other);
            if !a.is_zero() {
                *other = axpy(other, &(-(a / &al)), &l);
            }
        }
        for r in rays.iter_mut() {
            let a = dot(row, &r.v);
            if !a.is_zero() {
                r.v = primitive(&axpy(&r.v, &(-(a / &al)), &l));
            }
            r.tight.push(true);
        }
        if !equality {
            // Orient the eliminated line into the open halfspace.
            let ray = if al.is_positive() { neg(&l) } else { l };
            let mut tight = vec![true; processed.len()];
            tight.push(false);
            rays.push(Ray {
                v: primitive(&ray),
                tight,
            });
        }
        processed.push(row.to_vec());
        return;
    }

    let vals: Vec<Rational> = rays.iter().map(|r| dot(row, &r.v)).collect();
    let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
    let negs: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
    if pos.is_empty() && (negs.is_empty() || !equality) {
        for (r, v) in rays.iter_mut().zip(&vals) {
            r.tight.push(v.is_zero());
        }
        processed.push(row.to_vec());
        return;
    }

    let target_rank = dim.saturating_sub(lines.len() + 2);
    let mut created: Vec<Ray> = Vec::new();
    for &p in &pos {
        for &n in &negs {
            let common: Vec<usize> = (0..processed.len())
                .filter(|&k| rays[p].tight[k] && rays[n].tight[k])
                .collect();
            if common.len() < target_rank {
                continue;
            }
            let sub: QMat = common.iter().map(|&k| processed[k].clone()).collect();
            if rank(&sub, dim) != target_rank {
                continue;
            }
            // ⟨a,p⟩·n − ⟨a,n⟩·p lies on the hyperplane.
            let v: QVec = rays[n]
                .v
                .iter()
                .zip(&rays[p].v)
                .map(|(nv, pv)| &vals[p] * nv - &vals[n] * pv)
                .collect();
            let mut tight: Vec<bool> = (0..processed.len())
                .map(|k| rays[p].tight[k] && rays[n].tight[k])
                .collect();
            tight.push(true);
            created.push(Ray {
                v: primitive(&v),
                tight,
            });
        }
    }

    let old = std::mem::take(rays);
    for (mut r, v) in old.into_iter().zip(vals) {
        let keep = if equality { v.is_zero() } else { !v.is_positive() };
        if keep {
            r.tight.push(v.is_zero());
            rays.push(r);
        }
    }
    rays.extend(created);
    processed.push(row.to_vec());
}
