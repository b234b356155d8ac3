//! Fixed instances shared by the benchmarks.

use subreg_core::rational::{qvec, QMat};
use subreg_core::{Factor, FunctionAtom, MapStack, Polyhedron, ProblemInstance, StructuredSet};

fn mat(rows: &[&[i64]]) -> QMat {
    rows.iter().map(|r| qvec(r)).collect()
}

/// `(x, -x²)` in the union of the half-planes `y₂ ≤ 0` and `y₂ ≤ y₁`.
pub fn parabola_wedge() -> ProblemInstance {
    let map = MapStack::new(
        1,
        vec![
            FunctionAtom::affine(mat(&[&[1]]), qvec(&[0])),
            FunctionAtom::quadratic(vec![mat(&[&[-2]])], mat(&[&[0]]), qvec(&[0])),
        ],
    )
    .unwrap();
    let lambda = StructuredSet::new(vec![Factor::PolyUnion {
        dim: 2,
        pieces: vec![
            Polyhedron::cone(2, mat(&[&[0, 1]])).unwrap(),
            Polyhedron::cone(2, mat(&[&[-1, 1]])).unwrap(),
        ],
    }])
    .unwrap();
    ProblemInstance::new(map, lambda, qvec(&[0])).unwrap()
}

/// `x² = 0`.
pub fn square_zero() -> ProblemInstance {
    let map = MapStack::new(
        1,
        vec![FunctionAtom::quadratic(vec![mat(&[&[2]])], mat(&[&[0]]), qvec(&[0]))],
    )
    .unwrap();
    let lambda = StructuredSet::new(vec![Factor::Zero { dim: 1 }]).unwrap();
    ProblemInstance::new(map, lambda, qvec(&[0])).unwrap()
}

/// `k` complementarity pairs, all biactive.
pub fn compl_product(k: usize) -> StructuredSet {
    StructuredSet::new(vec![Factor::Compl; k]).unwrap()
}
