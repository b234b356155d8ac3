use super::*;
use crate::ratgeom::{HCone, VCone};
use crate::rational::{frac, int, qvec, zeros};
use proptest::prelude::*;

fn h(dim: usize, ineq: &[&[i64]], eq: &[&[i64]]) -> HCone {
    HCone::new(
        dim,
        ineq.iter().map(|r| qvec(r)).collect(),
        eq.iter().map(|r| qvec(r)).collect(),
    )
    .unwrap()
}

fn union(dim: usize, cones: Vec<HCone>) -> ConeUnion {
    ConeUnion::from_cones(dim, cones).unwrap()
}

fn ray(dim: usize, r: &[i64]) -> HCone {
    crate::ratgeom::dd_v_to_h(&VCone::from_generators(dim, vec![qvec(r)], vec![]).unwrap())
}

fn compl() -> StructuredSet {
    StructuredSet::new(vec![Factor::Compl]).unwrap()
}

/// Ω_EC written as a plain polyhedral union, so the generic route runs.
fn compl_generic() -> StructuredSet {
    StructuredSet::new(vec![Factor::PolyUnion {
        dim: 2,
        pieces: vec![
            Polyhedron::cone(2, vec![qvec(&[-1, 0]), qvec(&[0, 1]), qvec(&[0, -1])]).unwrap(),
            Polyhedron::cone(2, vec![qvec(&[1, 0]), qvec(&[-1, 0]), qvec(&[0, -1])]).unwrap(),
        ],
    }])
    .unwrap()
}

fn parabola_wedge() -> StructuredSet {
    StructuredSet::new(vec![Factor::PolyUnion {
        dim: 2,
        pieces: vec![
            Polyhedron::cone(2, vec![qvec(&[0, 1])]).unwrap(),
            Polyhedron::cone(2, vec![qvec(&[-1, 1])]).unwrap(),
        ],
    }])
    .unwrap()
}

fn same(a: &ConeUnion, b: &ConeUnion) -> bool {
    a.same_set(b).unwrap()
}

#[test]
fn point_certificates() {
    let s = compl();
    assert_eq!(
        s.point(&qvec(&[0, 1])).unwrap().certificate(),
        &[FactorCert::Compl(ComplBranch::Lower)]
    );
    assert!(matches!(
        s.point(&qvec(&[1, 1])),
        Err(ConeError::InfeasiblePoint(_))
    ));
    let e = parabola_wedge();
    let p = e.point(&qvec(&[0, 0])).unwrap();
    assert_eq!(
        p.certificate(),
        &[FactorCert::PolyUnion {
            containing: vec![0, 1],
            active: vec![vec![0], vec![0]]
        }]
    );
}

#[test]
fn malformed_sets_rejected() {
    assert!(StructuredSet::new(vec![Factor::PolyUnion {
        dim: 2,
        pieces: vec![]
    }])
    .is_err());
    assert!(Polyhedron::new(2, vec![qvec(&[1, 0])], vec![]).is_err());
}

/// The twelve cells of the closed-form table, each compared against frozen
/// expected cones and against the generic polyhedral route.
#[test]
fn omega_table() {
    let r = union;
    let gamma0 = h(2, &[], &[&[1, 0]]);
    let nu0 = h(2, &[], &[&[0, 1]]);
    let neg_quad = h(2, &[&[1, 0], &[0, 1]], &[]);
    let cases: Vec<(Vec<i64>, HCone, ConeUnion, ConeUnion)> = vec![
        // 0 = a < b
        (
            vec![0, 1],
            nu0.clone(),
            r(2, vec![nu0.clone()]),
            r(2, vec![h(2, &[], &[&[1, 0]])]),
        ),
        // a = b = 0
        (
            vec![0, 0],
            neg_quad.clone(),
            r(2, vec![gamma0.clone(), nu0.clone(), neg_quad.clone()]),
            r(2, vec![h(2, &[&[-1, 0]], &[&[0, 1]]), h(2, &[&[0, -1]], &[&[1, 0]])]),
        ),
        // a > b = 0
        (
            vec![2, 0],
            gamma0.clone(),
            r(2, vec![gamma0.clone()]),
            r(2, vec![h(2, &[], &[&[0, 1]])]),
        ),
    ];
    for s in [compl(), compl_generic()] {
        for (pt, reg, lim, tan) in &cases {
            let p = s.point(&qvec(pt)).unwrap();
            assert!(regular_normal_cone(&s, &p).unwrap().same_set(reg), "N̂ at {pt:?}");
            assert!(same(&limiting_normal_cone(&s, &p).unwrap(), lim), "N at {pt:?}");
            assert!(same(&tangent_cone(&s, &p).unwrap(), tan), "T at {pt:?}");
        }
        let p = s.point(&qvec(&[0, 0])).unwrap();
        let dirs: Vec<(Vec<i64>, ConeUnion)> = vec![
            (vec![1, 0], r(2, vec![gamma0.clone()])),
            (vec![0, 1], r(2, vec![nu0.clone()])),
            (vec![0, 0], cases[1].2.clone()),
        ];
        for (d, expected) in &dirs {
            let got = directional_normal_cone(&s, &p, &qvec(d)).unwrap();
            assert!(same(&got, expected), "N(0;{d:?}) = {got:?}");
        }
        assert!(directional_normal_cone(&s, &p, &qvec(&[1, 1]))
            .unwrap()
            .is_empty());
    }
}

#[test]
fn limiting_at_biactive_has_three_pieces() {
    let s = compl();
    let p = s.point(&qvec(&[0, 0])).unwrap();
    assert_eq!(limiting_normal_cone(&s, &p).unwrap().pieces().len(), 3);
    let g = compl_generic();
    let p = g.point(&qvec(&[0, 0])).unwrap();
    assert_eq!(limiting_normal_cone(&g, &p).unwrap().pieces().len(), 3);
}

#[test]
fn parabola_wedge_cones() {
    let s = parabola_wedge();
    let p = s.point(&qvec(&[0, 0])).unwrap();
    let t = tangent_cone(&s, &p).unwrap();
    assert!(same(&t, &union(2, vec![h(2, &[&[0, 1]], &[]), h(2, &[&[-1, 1]], &[])])));
    let n = limiting_normal_cone(&s, &p).unwrap();
    assert!(same(&n, &union(2, vec![ray(2, &[0, 1]), ray(2, &[-1, 1])])));
    assert!(regular_normal_cone(&s, &p).unwrap().is_trivial());

    let left = directional_normal_cone(&s, &p, &qvec(&[-1, 0])).unwrap();
    assert!(same(&left, &union(2, vec![ray(2, &[0, 1])])));
    let right = directional_normal_cone(&s, &p, &qvec(&[1, 0])).unwrap();
    assert!(same(&right, &union(2, vec![HCone::origin(2)])));
}

/// Def 2.2 sampled directly: regular normals at s + t·d' for small t and
/// d' near d must land in the computed directional cone, and every piece's
/// relint point must show up among them.
#[test]
fn parabola_wedge_directional_against_sampling() {
    let s = parabola_wedge();
    let p = s.point(&qvec(&[0, 0])).unwrap();
    for d in [qvec(&[-1, 0]), qvec(&[1, 0]), qvec(&[-1, -1]), qvec(&[1, 1])] {
        let cone = directional_normal_cone(&s, &p, &d).unwrap();
        let mut seen: Vec<HCone> = Vec::new();
        for k in [64i64, 128, 256] {
            for e1 in -2..=2 {
                for e2 in -2..=2 {
                    let t = frac(1, k);
                    let dp = vec![&d[0] + frac(e1, k), &d[1] + frac(e2, k)];
                    let y: QVec = dp.iter().map(|x| x * &t).collect();
                    if let Ok(q) = s.point(&y) {
                        let n = regular_normal_cone(&s, &q).unwrap();
                        assert!(cone.covers(&n).unwrap(), "d={d:?} y={y:?}");
                        seen.push(n);
                    }
                }
            }
        }
        for piece in cone.pieces() {
            if let Ok(w) = piece.cone.generators().relint_point() {
                assert!(seen.iter().any(|n| n.contains(&w)));
            }
        }
    }
}

#[test]
fn interior_point_has_trivial_regular_normal() {
    let s = StructuredSet::new(vec![Factor::PolyUnion {
        dim: 2,
        pieces: vec![Polyhedron::new(2, vec![qvec(&[1, 0])], vec![int(1)]).unwrap()],
    }])
    .unwrap();
    let p = s.point(&zeros(2)).unwrap();
    assert!(regular_normal_cone(&s, &p).unwrap().is_trivial());
    assert!(same(
        &tangent_cone(&s, &p).unwrap(),
        &union(2, vec![HCone::full(2)])
    ));
}

#[test]
fn convex_limiting_equals_regular() {
    let s = StructuredSet::new(vec![Factor::Orthant {
        dim: 2,
        orientation: Orientation::Nonneg,
    }])
    .unwrap();
    let p = s.point(&zeros(2)).unwrap();
    let n = limiting_normal_cone(&s, &p).unwrap();
    let r = regular_normal_cone(&s, &p).unwrap();
    assert!(same(&n, &union(2, vec![r])));
}

#[test]
fn zero_factor_normal_is_everything() {
    let s = StructuredSet::new(vec![Factor::Zero { dim: 2 }]).unwrap();
    let p = s.point(&zeros(2)).unwrap();
    assert!(same(
        &limiting_normal_cone(&s, &p).unwrap(),
        &union(2, vec![HCone::full(2)])
    ));
    assert!(directional_normal_cone(&s, &p, &qvec(&[1, 0]))
        .unwrap()
        .is_empty());
}

#[test]
fn product_rule() {
    let s = StructuredSet::new(vec![Factor::Compl, Factor::Zero { dim: 1 }, Factor::Compl]).unwrap();
    let p = s.point(&qvec(&[0, 0, 0, 0, 3])).unwrap();
    let n = limiting_normal_cone(&s, &p).unwrap();
    let c = compl();
    let n1 = limiting_normal_cone(&c, &c.point(&qvec(&[0, 0])).unwrap()).unwrap();
    let n3 = limiting_normal_cone(&c, &c.point(&qvec(&[0, 3])).unwrap()).unwrap();
    let expected = n1.product(&union(1, vec![HCone::full(1)])).product(&n3);
    assert!(same(&n, &expected));

    let d = qvec(&[1, 0, 0, 0, 5]);
    let nd = directional_normal_cone(&s, &p, &d).unwrap();
    let e1 = directional_normal_cone(&c, &c.point(&qvec(&[0, 0])).unwrap(), &qvec(&[1, 0]))
        .unwrap();
    let e3 = directional_normal_cone(&c, &c.point(&qvec(&[0, 3])).unwrap(), &qvec(&[0, 5]))
        .unwrap();
    let expected = e1.product(&union(1, vec![HCone::full(1)])).product(&e3);
    assert!(same(&nd, &expected));
}

#[test]
fn cells_certify_their_normals() {
    // For every raw piece, the regular normal cone at s + t·d + t²·w equals
    // the piece once t is small.
    let s = parabola_wedge();
    let p = s.point(&qvec(&[0, 0])).unwrap();
    for d in [qvec(&[0, 0]), qvec(&[-1, 0]), qvec(&[-1, -1])] {
        let pieces = directional_pieces(&s, &p, &d, 1000).unwrap().unwrap();
        for piece in pieces {
            let cell = piece.cell.unwrap();
            let t = frac(1, 1024);
            let y: QVec = d
                .iter()
                .zip(&cell.point)
                .map(|(a, w)| a * &t + w * &t * &t)
                .collect();
            let q = s.point(&y).unwrap();
            assert!(regular_normal_cone(&s, &q).unwrap().same_set(&piece.cone));
        }
    }
}

fn poly_union_2d() -> impl Strategy<Value = StructuredSet> {
    let row = prop::collection::vec(-2i64..=2, 2);
    let piece = prop::collection::vec(row, 1..4);
    prop::collection::vec(piece, 1..4).prop_map(|pieces| {
        let pieces = pieces
            .into_iter()
            .map(|rows| Polyhedron::cone(2, rows.iter().map(|r| qvec(r)).collect()).unwrap())
            .collect();
        StructuredSet::new(vec![Factor::PolyUnion { dim: 2, pieces }]).unwrap()
    })
}

fn directions() -> Vec<QVec> {
    let mut out = Vec::new();
    for a in -2..=2 {
        for b in -2..=2 {
            out.push(qvec(&[a, b]));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polarity(s in poly_union_2d()) {
        let p = s.point(&zeros(2)).unwrap();
        let t = tangent_cone(&s, &p).unwrap();
        prop_assert!(regular_normal_cone(&s, &p).unwrap().same_set(&t.polar()));
    }

    #[test]
    fn directional_inside_limiting(s in poly_union_2d()) {
        let p = s.point(&zeros(2)).unwrap();
        let n = limiting_normal_cone(&s, &p).unwrap();
        for d in directions() {
            let nd = directional_normal_cone(&s, &p, &d).unwrap();
            prop_assert!(nd.subset_of(&n).unwrap());
            let t = tangent_cone(&s, &p).unwrap();
            prop_assert_eq!(nd.is_empty(), !t.contains(&d));
        }
        let n0 = directional_normal_cone(&s, &p, &zeros(2)).unwrap();
        prop_assert!(n0.same_set(&n).unwrap());
    }

    #[test]
    fn limiting_matches_grid_sampling(s in poly_union_2d()) {
        let p = s.point(&zeros(2)).unwrap();
        let n = limiting_normal_cone(&s, &p).unwrap();
        let mut seen = Vec::new();
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                let y = qvec(&[a, b]);
                if let Ok(q) = s.point(&y) {
                    let r = regular_normal_cone(&s, &q).unwrap();
                    prop_assert!(n.covers(&r).unwrap());
                    seen.push(r);
                }
            }
        }
        for piece in n.pieces() {
            if let Ok(w) = piece.cone.generators().relint_point() {
                prop_assert!(seen.iter().any(|r| r.contains(&w)));
            }
        }
    }

    #[test]
    fn union_equality_is_order_free(s in poly_union_2d()) {
        let p = s.point(&zeros(2)).unwrap();
        let t = tangent_cone(&s, &p).unwrap();
        let mut cones: Vec<HCone> = t.cones().cloned().collect();
        cones.reverse();
        let again = union(2, cones);
        prop_assert!(same(&t, &again));
    }
}
