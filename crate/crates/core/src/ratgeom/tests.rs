use super::*;
use crate::rational::qvec;
use proptest::prelude::*;

fn h(dim: usize, ineq: &[&[i64]], eq: &[&[i64]]) -> HCone {
    HCone::new(
        dim,
        ineq.iter().map(|r| qvec(r)).collect(),
        eq.iter().map(|r| qvec(r)).collect(),
    )
    .unwrap()
}

fn v(dim: usize, rays: &[&[i64]], lines: &[&[i64]]) -> VCone {
    VCone::from_generators(
        dim,
        rays.iter().map(|r| qvec(r)).collect(),
        lines.iter().map(|r| qvec(r)).collect(),
    )
    .unwrap()
}

fn grid(dim: usize, k: i64) -> Vec<QVec> {
    let mut pts = vec![vec![]];
    for _ in 0..dim {
        let mut next = Vec::new();
        for p in &pts {
            for x in -k..=k {
                let mut q: Vec<i64> = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        pts = next;
    }
    pts.iter().map(|p| qvec(p)).collect()
}

// Membership in the conic hull of generators, tested through the H-form of
// the hull computed independently of `VCone`: for 2D pointed cones with two
// rays, y ∈ cone(r1, r2) iff the coefficients solving [r1 r2] c = y are ≥ 0.
fn in_cone2(r1: &[Rational], r2: &[Rational], y: &[Rational]) -> bool {
    let det = &r1[0] * &r2[1] - &r1[1] * &r2[0];
    let c1 = (&y[0] * &r2[1] - &y[1] * &r2[0]) / &det;
    let c2 = (&r1[0] * &y[1] - &r1[1] * &y[0]) / &det;
    !c1.is_negative() && !c2.is_negative()
}

#[test]
fn orthant_generators() {
    let c = h(2, &[&[-1, 0], &[0, -1]], &[]).generators();
    assert_eq!(c.rays(), &[qvec(&[0, 1]), qvec(&[1, 0])]);
    assert!(c.lines().is_empty());
}

#[test]
fn axis_is_lineality() {
    let c = h(2, &[], &[&[0, 1]]).generators();
    assert!(c.rays().is_empty());
    assert_eq!(c.lines(), &[qvec(&[1, 0])]);
}

#[test]
fn wedge_generators() {
    let hc = h(2, &[&[1, 1], &[1, -1]], &[]);
    let c = hc.generators();
    let mut expected = vec![qvec(&[-1, 1]), qvec(&[-1, -1])];
    expected.sort_by(|a, b| lex_cmp(a, b));
    assert_eq!(c.rays(), expected.as_slice());
    for r in c.rays() {
        assert!(hc.contains(r));
    }
    let back = dd_v_to_h(&c);
    for p in grid(2, 3) {
        assert_eq!(back.contains(&p), hc.contains(&p), "{:?}", p);
        assert_eq!(in_cone2(&expected[0], &expected[1], &p), hc.contains(&p));
    }
}

#[test]
fn v_to_h_orthant() {
    let c = v(2, &[&[1, 0], &[0, 1]], &[]);
    let hc = dd_v_to_h(&c);
    assert!(hc.eq().is_empty());
    let mut rows = hc.ineq().to_vec();
    rows.sort_by(|a, b| lex_cmp(a, b));
    assert_eq!(rows, vec![qvec(&[-1, 0]), qvec(&[0, -1])]);
}

#[test]
fn v_to_h_trivial() {
    let c = v(2, &[], &[]);
    let hc = dd_v_to_h(&c);
    assert!(hc.ineq().is_empty());
    assert_eq!(crate::rational::rank(hc.eq(), 2), 2);
    assert!(hc.is_trivial());
}

#[test]
fn v_to_h_single_ray() {
    let c = v(2, &[&[1, 1]], &[]);
    let hc = dd_v_to_h(&c);
    for p in grid(2, 4) {
        let on_ray = p[0] == p[1] && !p[0].is_negative();
        assert_eq!(hc.contains(&p), on_ray, "{:?}", p);
    }
}

#[test]
fn polar_examples() {
    let q = h(2, &[&[-1, 0], &[0, -1]], &[]);
    let p = polar_h(&q);
    assert!(p.same_set(&h(2, &[&[1, 0], &[0, 1]], &[])));

    assert!(polar_h(&HCone::origin(3)).same_set(&HCone::full(3)));

    let ray = v(2, &[&[1, 1]], &[]);
    let p = polar_v(&ray);
    assert!(p.same_set(&h(2, &[&[1, 1]], &[])));
    for g in p.generators().rays().iter().chain(p.generators().lines()) {
        assert!(!dot(g, &qvec(&[1, 1])).is_positive());
    }
}

#[test]
fn faces_of_quadrant() {
    let q = h(2, &[&[-1, 0], &[0, -1]], &[]);
    let f = faces(&q, DEFAULT_FACE_CAP).unwrap();
    assert_eq!(f.len(), 4);
    let gens: Vec<VCone> = f.iter().map(|x| x.generators()).collect();
    assert!(gens.contains(&v(2, &[&[1, 0]], &[])));
    assert!(gens.contains(&v(2, &[&[0, 1]], &[])));
    assert!(gens.iter().any(|g| g.is_trivial()));
}

#[test]
fn faces_of_line() {
    let c = h(2, &[], &[&[0, 1]]);
    let f = faces(&c, DEFAULT_FACE_CAP).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].generators().lines().len(), 1);
}

#[test]
fn faces_of_simplicial_3d() {
    let c = h(3, &[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]], &[]);
    let f = faces(&c, DEFAULT_FACE_CAP).unwrap();
    // Oracle: every subset of rows promoted to equalities, deduplicated by
    // cone equality.
    let mut distinct: Vec<VCone> = Vec::new();
    for mask in 0u32..8 {
        let eq: Vec<QVec> = (0..3)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| c.ineq()[i].clone())
            .collect();
        let g = c.with_rows(&[], &eq).unwrap().generators();
        if !distinct.contains(&g) {
            distinct.push(g);
        }
    }
    assert_eq!(distinct.len(), 8);
    assert_eq!(f.len(), 8);
    for face in &f {
        assert!(distinct.contains(&face.generators()));
    }
}

#[test]
fn face_cap_reported() {
    let c = h(3, &[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]], &[]);
    assert_eq!(faces(&c, 3), Err(GeomError::CapExceeded { cap: 3 }));
}

#[test]
fn relint_examples() {
    assert_eq!(v(2, &[&[1, 0]], &[]).relint_point().unwrap(), qvec(&[1, 0]));
    assert_eq!(v(2, &[&[1, 0], &[0, 1]], &[]).relint_point().unwrap(), qvec(&[1, 1]));
    let w = h(2, &[&[1, 1], &[1, -1]], &[]);
    let p = w.generators().relint_point().unwrap();
    assert_eq!(p, qvec(&[-2, 0]));
    for a in w.ineq() {
        assert!(dot(a, &p).is_negative());
    }
    assert_eq!(
        v(2, &[], &[]).relint_point(),
        Err(GeomError::TrivialCone)
    );
}

#[test]
fn triviality_image_preimage_intersection() {
    assert!(h(1, &[&[1], &[-1]], &[]).is_trivial());
    assert!(!h(1, &[&[1]], &[]).is_trivial());

    let pre = linear_preimage(&[qvec(&[1, 0])], &h(1, &[&[1]], &[]), 2).unwrap();
    assert!(pre.same_set(&h(2, &[&[1, 0]], &[])));

    let i = intersect(&h(2, &[&[1, 0]], &[]), &h(2, &[&[-1, 0]], &[])).unwrap();
    assert!(i.same_set(&h(2, &[], &[&[1, 0]])));

    let img = linear_image(&[qvec(&[1, 1])], &v(2, &[&[1, 0], &[0, 1]], &[])).unwrap();
    assert_eq!(img, v(1, &[&[1]], &[]));
    let img = linear_image(&[qvec(&[1, -1])], &v(2, &[&[1, 0], &[0, 1]], &[])).unwrap();
    assert_eq!(img.lines().len(), 1);

    assert!(matches!(
        intersect(&HCone::full(2), &HCone::full(3)),
        Err(GeomError::DimensionMismatch { .. })
    ));
}

#[test]
fn canonical_equality_ignores_redundancy() {
    let a = v(2, &[&[1, 0], &[0, 1], &[1, 1], &[2, 0]], &[]);
    let b = v(2, &[&[0, 3], &[5, 0]], &[]);
    assert_eq!(a, b);
    let c = v(2, &[&[1, 0], &[-1, 0], &[0, 1]], &[]);
    let d = v(2, &[&[0, 1]], &[&[3, 0]]);
    assert_eq!(c, d);
}

#[test]
fn arrangement_of_two_lines() {
    let hs = vec![qvec(&[1, 0]), qvec(&[0, 1])];
    let cells = arrangement_cells(&HCone::full(2), &hs, 1000, |_| false).unwrap();
    assert_eq!(cells.len(), 9);
    for c in &cells {
        for (h, s) in hs.iter().zip(&c.signs) {
            assert_eq!(Sign::of(&dot(h, &c.point)), *s);
        }
    }
    let inside =
        arrangement_cells(&h(2, &[&[-1, 0], &[0, -1]], &[]), &hs, 1000, |_| false).unwrap();
    assert_eq!(inside.len(), 4);
}

#[test]
fn arrangement_prune() {
    let hs = vec![qvec(&[1, 0]), qvec(&[0, 1])];
    let cells =
        arrangement_cells(&HCone::full(2), &hs, 1000, |s| s.first() == Some(&Sign::Pos)).unwrap();
    assert_eq!(cells.len(), 6);
}

fn small_row(dim: usize) -> impl Strategy<Value = QVec> {
    prop::collection::vec(-2i64..=2, dim).prop_map(|r| qvec(&r))
}

fn small_hcone(dim: usize) -> impl Strategy<Value = HCone> {
    (
        prop::collection::vec(small_row(dim), 0..5),
        prop::collection::vec(small_row(dim), 0..2),
    )
        .prop_map(move |(i, e)| HCone::new(dim, i, e).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_membership(c in small_hcone(3)) {
        let g = c.generators();
        let back = dd_v_to_h(&g);
        for p in grid(3, 2) {
            prop_assert_eq!(c.contains(&p), back.contains(&p));
        }
        for r in g.rays() {
            prop_assert!(c.contains(r));
        }
        for l in g.lines() {
            prop_assert!(c.contains(l) && c.contains(&neg(l)));
        }
    }

    #[test]
    fn polar_involution(c in small_hcone(3)) {
        prop_assert!(polar_h(&polar_h(&c)).same_set(&c));
    }

    #[test]
    fn triviality_matches_generators(c in small_hcone(3)) {
        let g = c.generators();
        prop_assert_eq!(c.is_trivial(), g.rays().is_empty() && g.lines().is_empty());
        // A nontrivial cone has a nonzero grid point.
        let has_point = grid(3, 2).iter().any(|p| !is_zero_vec(p) && c.contains(p));
        if has_point {
            prop_assert!(!c.is_trivial());
        }
    }

    #[test]
    fn face_lattice_closed(c in small_hcone(3)) {
        let fs = faces(&c, DEFAULT_FACE_CAP).unwrap();
        let gens: Vec<VCone> = fs.iter().map(|f| f.generators()).collect();
        for f in &fs {
            let sub = faces(&f.as_cone, DEFAULT_FACE_CAP).unwrap();
            for g in sub {
                prop_assert!(gens.contains(&g.generators()));
            }
            // The relint point of the face has exactly the face's active set.
            let fg = f.generators();
            let p = match fg.relint_point() {
                Ok(p) => p,
                Err(_) => crate::rational::zeros(3),
            };
            let active: Vec<usize> = (0..c.ineq().len())
                .filter(|&i| dot(&c.ineq()[i], &p).is_zero())
                .collect();
            prop_assert_eq!(&active, &f.active_set);
        }
    }

    #[test]
    fn cells_partition_grid(rows in prop::collection::vec(small_row(2), 1..4)) {
        let cells = arrangement_cells(&HCone::full(2), &rows, 1000, |_| false).unwrap();
        for p in grid(2, 3) {
            let signs: Vec<Sign> = rows.iter().map(|h| Sign::of(&dot(h, &p))).collect();
            let n = cells.iter().filter(|c| c.signs == signs).count();
            prop_assert_eq!(n, 1);
            let cell = cells.iter().find(|c| c.signs == signs).unwrap();
            prop_assert!(cell.closure.contains(&p));
        }
    }
}
