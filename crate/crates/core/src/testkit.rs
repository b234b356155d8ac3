//! Small instances shared by unit tests.

use crate::cones::{Factor, Orientation, Polyhedron, StructuredSet};
use crate::rational::{qvec, QMat};
use crate::system::{FunctionAtom, MapStack, ProblemInstance};

pub fn mat(rows: &[&[i64]]) -> QMat {
    rows.iter().map(|r| qvec(r)).collect()
}

/// `P(x) = (x, −x²)`, `Λ = {y₂ ≤ 0} ∪ {y₂ ≤ y₁}`, `x̄ = 0`.
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

/// `P(x) = x²`, `Λ = {0}`, `x̄ = 0`.
pub fn square_zero() -> ProblemInstance {
    let map = MapStack::new(
        1,
        vec![FunctionAtom::quadratic(vec![mat(&[&[2]])], mat(&[&[0]]), qvec(&[0]))],
    )
    .unwrap();
    let lambda = StructuredSet::new(vec![Factor::Zero { dim: 1 }]).unwrap();
    ProblemInstance::new(map, lambda, qvec(&[0])).unwrap()
}

/// `P(x) = x`, `Λ = R₋`, `x̄ = 0`.
pub fn identity_nonpos() -> ProblemInstance {
    let map = MapStack::new(1, vec![FunctionAtom::affine(mat(&[&[1]]), qvec(&[0]))]).unwrap();
    let lambda = StructuredSet::new(vec![Factor::Orthant {
        dim: 1,
        orientation: Orientation::Nonpos,
    }])
    .unwrap();
    ProblemInstance::new(map, lambda, qvec(&[0])).unwrap()
}

/// `min x²/2 s.t. x ≤ 0` at `(x̄, μ̄) = (0, 0)`.
pub fn kkt_quad() -> crate::system::KktInstance {
    let f = MapStack::new(1, vec![FunctionAtom::quadratic(vec![mat(&[&[1]])], mat(&[&[0]]), qvec(&[0]))]).unwrap();
    let g = MapStack::new(1, vec![FunctionAtom::affine(mat(&[&[1]]), qvec(&[0]))]).unwrap();
    let h = MapStack::new(1, vec![]).unwrap();
    crate::system::KktInstance::new(f, g, h, qvec(&[0]), qvec(&[0]), qvec(&[])).unwrap()
}

use proptest::prelude::*;

use crate::rational::{int, QVec};
use crate::system::CsInstance;

/// Output rows `½xᵀQ_r x + a_rᵀx` from raw integers; `Q_r = M + Mᵀ`.
fn atom(n: usize, d: usize, a: &[i64], m: &[i64], quad: bool) -> FunctionAtom {
    let a: QMat = (0..d).map(|r| qvec(&a[r * n..(r + 1) * n])).collect();
    let c = vec![int(0); d];
    if !quad {
        return FunctionAtom::affine(a, c);
    }
    let q = (0..d)
        .map(|r| {
            let at = |i: usize, j: usize| m[r * n * n + i * n + j];
            (0..n)
                .map(|i| (0..n).map(|j| int(at(i, j) + at(j, i))).collect())
                .collect()
        })
        .collect();
    FunctionAtom::quadratic(q, a, c)
}

type FactorRaw = (u8, Vec<Vec<Vec<i64>>>, Vec<i64>, Vec<i64>, bool);

fn factor_raw(n: usize) -> impl Strategy<Value = FactorRaw> {
    let row = prop::collection::vec(-2i64..=2, 2);
    let piece = prop::collection::vec(row, 1..3);
    (
        0u8..5,
        prop::collection::vec(piece, 1..3),
        prop::collection::vec(-2i64..=2, 2 * n),
        prop::collection::vec(-1i64..=1, 2 * n * n),
        any::<bool>(),
    )
}

/// Small instances with `P(0) = 0` and conic factors, so `x̄ = 0` is feasible.
pub fn arb_instance() -> impl Strategy<Value = ProblemInstance> {
    (1usize..=2).prop_flat_map(|n| {
        prop::collection::vec(factor_raw(n), 1..=2).prop_map(move |raw| {
            let mut atoms = Vec::new();
            let mut factors = Vec::new();
            for (kind, pieces, a, m, quad) in raw {
                let (f, d) = match kind {
                    0 => (Factor::Zero { dim: 1 }, 1),
                    1 => (Factor::Orthant { dim: 1, orientation: Orientation::Nonpos }, 1),
                    2 => (Factor::Orthant { dim: 1, orientation: Orientation::Nonneg }, 1),
                    3 => (Factor::Compl, 2),
                    _ => (
                        Factor::PolyUnion {
                            dim: 2,
                            pieces: pieces
                                .iter()
                                .map(|rows| Polyhedron::cone(2, rows.iter().map(|r| qvec(r)).collect()).unwrap())
                                .collect(),
                        },
                        2,
                    ),
                };
                atoms.push(atom(n, d, &a, &m, quad));
                factors.push(f);
            }
            let map = MapStack::new(n, atoms).unwrap();
            let lambda = StructuredSet::new(factors).unwrap();
            ProblemInstance::new(map, lambda, vec![int(0); n]).unwrap()
        })
    })
}

fn constant(atom: FunctionAtom, c: QVec) -> FunctionAtom {
    match atom {
        FunctionAtom::Affine { a, .. } => FunctionAtom::Affine { a, c },
        FunctionAtom::Quadratic { q, a, .. } => FunctionAtom::Quadratic { q, a, c },
        o => o,
    }
}

/// Complementarity systems at `x̄ = 0`; each pair `(Φ_i(0), Ψ_i(0))` is
/// `(0, 0)`, `(1, 0)` or `(0, 1)`.
pub fn arb_cs() -> impl Strategy<Value = CsInstance> {
    (1usize..=2, 1usize..=3, 0usize..=1).prop_flat_map(|(n, m, d)| {
        (
            prop::collection::vec(-2i64..=2, n * (d + 2 * m)),
            prop::collection::vec(-1i64..=1, n * n * (d + 2 * m)),
            prop::collection::vec(0u8..3, m),
            prop::collection::vec(any::<bool>(), 3),
        )
            .prop_map(move |(a, q, pat, quad)| {
                let part = |off: usize, rows: usize, quad: bool| {
                    atom(n, rows, &a[off * n..(off + rows) * n], &q[off * n * n..(off + rows) * n * n], quad)
                };
                let pc: QVec = pat.iter().map(|p| int((*p == 1) as i64)).collect();
                let sc: QVec = pat.iter().map(|p| int((*p == 2) as i64)).collect();
                let h = MapStack::new(n, if d > 0 { vec![part(0, d, quad[0])] } else { vec![] }).unwrap();
                let phi = MapStack::new(n, vec![constant(part(d, m, quad[1]), pc)]).unwrap();
                let psi = MapStack::new(n, vec![constant(part(d + m, m, quad[2]), sc)]).unwrap();
                CsInstance::new(h, phi, psi, vec![int(0); n]).unwrap()
            })
    })
}
