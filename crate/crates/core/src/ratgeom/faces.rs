use std::collections::{BTreeSet, VecDeque};

use num_traits::Zero;

use super::{HCone, VCone};
use crate::error::GeomError;
use crate::rational::{dot, QVec};

pub const DEFAULT_FACE_CAP: usize = 100_000;

/// A face of a parent `HCone`: the parent with the rows in `active_set`
/// turned into equalities. `active_set` indexes `parent.ineq()` and is closed,
/// i.e. it lists every row that vanishes on the whole face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub active_set: Vec<usize>,
    pub as_cone: HCone,
}

impl Face {
    pub fn generators(&self) -> VCone {
        self.as_cone.generators()
    }
}

fn tight_rows(rows: &[QVec], rays: &[QVec], subset: &[usize]) -> Vec<usize> {
    (0..rows.len())
        .filter(|&i| subset.iter().all(|&r| dot(&rows[i], &rays[r]).is_zero()))
        .collect()
}

/// Full face lattice, from the cone itself down to its lineality space.
/// Faces are listed in breadth-first order of increasing active set.
pub fn faces(c: &HCone, cap: usize) -> Result<Vec<Face>, GeomError> {
    let gens = c.generators();
    let rows = c.ineq();
    let rays = gens.rays();
    let ray_tight: Vec<Vec<usize>> = rays
        .iter()
        .map(|r| (0..rows.len()).filter(|&i| dot(&rows[i], r).is_zero()).collect())
        .collect();

    let all: Vec<usize> = (0..rays.len()).collect();
    let top = tight_rows(rows, rays, &all);

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
    let mut out = Vec::new();
    seen.insert(top.clone());
    queue.push_back(top);

    while let Some(active) = queue.pop_front() {
        if out.len() >= cap {
            return Err(GeomError::CapExceeded { cap });
        }
        let on_face: Vec<usize> = (0..rays.len())
            .filter(|&r| active.iter().all(|i| ray_tight[r].binary_search(i).is_ok()))
            .collect();
        for i in 0..rows.len() {
            if active.binary_search(&i).is_ok() {
                continue;
            }
            let sub: Vec<usize> = on_face
                .iter()
                .copied()
                .filter(|&r| ray_tight[r].binary_search(&i).is_ok())
                .collect();
            let closed = tight_rows(rows, rays, &sub);
            if seen.insert(closed.clone()) {
                queue.push_back(closed);
            }
        }
        let eq: Vec<QVec> = active.iter().map(|&i| rows[i].clone()).collect();
        let as_cone = c.with_rows(&[], &eq)?;
        out.push(Face {
            active_set: active,
            as_cone,
        });
    }
    Ok(out)
}
