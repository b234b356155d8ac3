use num_traits::{Signed, Zero};
use proptest::prelude::*;

use super::schema::{Problem, ProblemFile};
use super::*;
use crate::cones::{tangent_cone, ComplBranch, Factor, FactorCert, Orientation, StructuredSet};
use crate::rational::{frac, int, qvec, unit, QVec};
use crate::testkit::{parabola_wedge, identity_nonpos, mat, square_zero};

fn affine(a: &[&[i64]], c: &[i64]) -> FunctionAtom {
    FunctionAtom::affine(mat(a), qvec(c))
}

#[test]
fn parabola_wedge_derivatives_and_linearized_cone() {
    let inst = parabola_wedge();
    assert_eq!(inst.jacobian().unwrap(), mat(&[&[1], &[0]]));
    assert_eq!(inst.second_derivative(&qvec(&[-1])).unwrap(), qvec(&[0, -2]));
    let l = linearized_cone(&inst).unwrap();
    for u in [-3, -1, 0, 1, 5] {
        assert!(l.contains(&qvec(&[u])), "u = {u}");
    }
}

#[test]
fn nonpos_identity_linearized_cone() {
    let l = linearized_cone(&identity_nonpos()).unwrap();
    assert!(l.contains(&qvec(&[-1])));
    assert!(l.contains(&qvec(&[0])));
    assert!(!l.contains(&qvec(&[1])));
}

#[test]
fn square_zero_second_derivative() {
    let inst = square_zero();
    assert_eq!(inst.jacobian().unwrap(), mat(&[&[0]]));
    assert_eq!(inst.second_derivative(&qvec(&[3])).unwrap(), qvec(&[18]));
    assert_eq!(inst.map().eval(&qvec(&[3])).unwrap(), qvec(&[9]));
}

#[test]
fn dimension_and_feasibility_errors() {
    let lambda = StructuredSet::new(vec![Factor::Zero { dim: 2 }]).unwrap();
    let map = MapStack::new(1, vec![affine(&[&[1]], &[0])]).unwrap();
    assert!(matches!(
        ProblemInstance::new(map.clone(), lambda, qvec(&[0])),
        Err(ModelError::Dimension { .. })
    ));
    let lambda = StructuredSet::new(vec![Factor::Zero { dim: 1 }]).unwrap();
    assert!(matches!(
        ProblemInstance::new(map.clone(), lambda.clone(), qvec(&[1])),
        Err(ModelError::InfeasibleAnchor(_))
    ));
    assert!(matches!(
        ProblemInstance::new(map, lambda, qvec(&[0, 0])),
        Err(ModelError::Dimension { .. })
    ));
    assert!(MapStack::new(2, vec![affine(&[&[1]], &[0])]).is_err());
    let skew = FunctionAtom::quadratic(vec![mat(&[&[0, 1], &[0, 0]])], mat(&[&[0, 0]]), qvec(&[0]));
    assert!(matches!(MapStack::new(2, vec![skew]), Err(ModelError::Invalid(_))));
}

#[test]
fn scaling_keeps_anchor_feasible() {
    let inst = parabola_wedge();
    let s = inst.scaled(&frac(3, 2)).unwrap();
    assert_eq!(s.map().eval(&qvec(&[2])).unwrap(), qvec(&[3, -6]));
    assert_eq!(s.anchor(), inst.anchor());
}

fn cs_three() -> CsInstance {
    // Φ(x) = (x₁, x₂, 1), Ψ(x) = (x₁, 2, x₂), x̄ = 0.
    let phi = MapStack::new(2, vec![affine(&[&[1, 0], &[0, 1], &[0, 0]], &[0, 0, 1])]).unwrap();
    let psi = MapStack::new(2, vec![affine(&[&[1, 0], &[0, 0], &[0, 1]], &[0, 2, 0])]).unwrap();
    let h = MapStack::new(2, vec![]).unwrap();
    CsInstance::new(h, phi, psi, qvec(&[0, 0])).unwrap()
}

#[test]
fn index_sets_read_off_signs() {
    let cs = cs_three();
    let s = index_sets(&cs, None).unwrap();
    assert_eq!((s.i00, s.i0p, s.ip0), (vec![0], vec![1], vec![2]));
}

#[test]
fn directional_index_sets() {
    // Biactive index with ∇Φ u = 0 < ∇Ψ u moves to I_0+(u).
    let phi = MapStack::new(2, vec![affine(&[&[1, 0]], &[0])]).unwrap();
    let psi = MapStack::new(2, vec![affine(&[&[0, 1]], &[0])]).unwrap();
    let cs = CsInstance::new(MapStack::new(2, vec![]).unwrap(), phi, psi, qvec(&[0, 0])).unwrap();
    let s = index_sets(&cs, Some(&qvec(&[0, 1]))).unwrap();
    assert_eq!(s.directional, Some((vec![], vec![0], vec![])));
    let s = index_sets(&cs, Some(&qvec(&[0, 0]))).unwrap();
    assert_eq!(s.directional, Some((vec![0], vec![], vec![])));
    assert_eq!(
        index_sets(&cs, Some(&qvec(&[1, 1]))),
        Err(ModelError::DirectionInfeasible)
    );
    assert_eq!(
        index_sets(&cs, Some(&qvec(&[-1, 0]))),
        Err(ModelError::DirectionInfeasible)
    );
}

#[test]
fn cs_embedding_dimensions() {
    let h = MapStack::new(2, vec![affine(&[&[1, -1]], &[0])]).unwrap();
    let phi = MapStack::new(2, vec![affine(&[&[1, 0]], &[0])]).unwrap();
    let psi = MapStack::new(2, vec![affine(&[&[0, 1]], &[0])]).unwrap();
    let cs = CsInstance::new(h, phi, psi, qvec(&[0, 0])).unwrap();
    let g = cs_to_general(&cs).unwrap();
    assert_eq!(g.m(), 3);
    assert_eq!(g.lambda().factors(), &[Factor::Zero { dim: 1 }, Factor::Compl]);
}

#[test]
fn embedding_commutes_with_index_sets() {
    let cs = cs_three();
    let g = cs_to_general(&cs).unwrap();
    let sets = index_sets(&cs, None).unwrap();
    for (i, cert) in g.anchor_point().certificate().iter().enumerate() {
        let expected = if sets.i00.contains(&i) {
            ComplBranch::Biactive
        } else if sets.i0p.contains(&i) {
            ComplBranch::Lower
        } else {
            ComplBranch::Upper
        };
        assert_eq!(cert, &FactorCert::Compl(expected));
    }
}

#[test]
fn cs_infeasible_anchor() {
    let phi = MapStack::new(1, vec![affine(&[&[1]], &[1])]).unwrap();
    let psi = MapStack::new(1, vec![affine(&[&[1]], &[1])]).unwrap();
    let r = CsInstance::new(MapStack::new(1, vec![]).unwrap(), phi, psi, qvec(&[0]));
    assert!(matches!(r, Err(ModelError::InfeasibleAnchor(_))));
}

/// `min c·x²/2 s.t. x ≤ 0` at `x̄ = 0, μ̄ = 0`.
fn kkt_1d(c: i64) -> KktInstance {
    let f = MapStack::new(1, vec![FunctionAtom::quadratic(vec![mat(&[&[c]])], mat(&[&[0]]), qvec(&[0]))]).unwrap();
    let g = MapStack::new(1, vec![affine(&[&[1]], &[0])]).unwrap();
    let h = MapStack::new(1, vec![]).unwrap();
    KktInstance::new(f, g, h, qvec(&[0]), qvec(&[0]), qvec(&[])).unwrap()
}

#[test]
fn kkt_psi_selects_multipliers() {
    let cs = kkt_to_cs(&kkt_1d(1)).unwrap();
    let (_, _, jpsi) = cs.jacobians().unwrap();
    assert_eq!(jpsi, mat(&[&[0, 1]]));
    let (jh, jphi, _) = cs.jacobians().unwrap();
    assert_eq!(jh, mat(&[&[1, 1]]));
    assert_eq!(jphi, mat(&[&[-1, 0]]));
}

#[test]
fn kkt_linearized_cone_matches_hand_expansion() {
    for c in [0, 1, -1] {
        let g = kkt_to_general(&kkt_1d(c)).unwrap();
        let l = linearized_cone(&g).unwrap();
        // (u, v) with c·u + v = 0, u ≤ 0, v ≥ 0, u·v = 0.
        for u in -2..=2 {
            for v in -2..=2 {
                let expected = c * u + v == 0 && u <= 0 && v >= 0 && u * v == 0;
                assert_eq!(l.contains(&qvec(&[u, v])), expected, "c={c} u={u} v={v}");
            }
        }
    }
}

#[test]
fn kkt_with_bilinear_terms() {
    // min x₁ + x₂²/2 s.t. x₁²/2 − x₂ ≤ 0 at x̄ = 0, μ̄ = 1: ∇ₓL = (1 + μx₁, x₂ − μ).
    let f = MapStack::new(
        2,
        vec![FunctionAtom::quadratic(
            vec![mat(&[&[0, 0], &[0, 1]])],
            mat(&[&[1, 0]]),
            qvec(&[0]),
        )],
    )
    .unwrap();
    let g = MapStack::new(
        2,
        vec![FunctionAtom::quadratic(vec![mat(&[&[1, 0], &[0, 0]])], mat(&[&[0, -1]]), qvec(&[0]))],
    )
    .unwrap();
    let r = KktInstance::new(f.clone(), g.clone(), MapStack::new(2, vec![]).unwrap(), qvec(&[0, 0]), qvec(&[1]), qvec(&[]));
    assert!(matches!(r, Err(ModelError::InfeasibleAnchor(_))));
    // f = −x₂ + x₂²/2 instead, so ∇ₓL(0) = (0, −1 + 1) = 0.
    let f = MapStack::new(
        2,
        vec![FunctionAtom::quadratic(vec![mat(&[&[0, 0], &[0, 1]])], mat(&[&[0, 1]]), qvec(&[0]))],
    )
    .unwrap();
    let k = KktInstance::new(f, g, MapStack::new(2, vec![]).unwrap(), qvec(&[0, 0]), qvec(&[1]), qvec(&[])).unwrap();
    let cs = kkt_to_cs(&k).unwrap();
    let z = qvec(&[2, 3, 5]);
    // ∇ₓL = (μx₁, 1 + x₂ − μ) at (x₁, x₂, μ).
    assert_eq!(cs.h().eval(&z).unwrap(), qvec(&[10, -1]));
    assert_eq!(cs.phi().eval(&z).unwrap(), qvec(&[1]));
    assert_eq!(cs.psi().eval(&z).unwrap(), qvec(&[5]));
}

#[test]
fn kkt_rejects_bad_multipliers() {
    let f = MapStack::new(1, vec![affine(&[&[0]], &[0])]).unwrap();
    let g = MapStack::new(1, vec![affine(&[&[1]], &[-1])]).unwrap();
    let h = MapStack::new(1, vec![]).unwrap();
    let r = KktInstance::new(f, g, h, qvec(&[0]), qvec(&[1]), qvec(&[]));
    assert!(r.is_err());
}

const EX41: &str = r#"{
  "schema": 1,
  "kind": "general",
  "atoms": [{"affine": {"a": [[1]], "c": [0]}},
            {"quadratic": {"q": [[["-2"]]], "a": [["0"]], "c": ["0"]}}],
  "set": [{"poly_union": {"dim": 2, "pieces": [
      {"rows": [["0", "1"]], "rhs": ["0"]},
      {"rows": [["-1", "1"]], "rhs": ["0"]}]}}],
  "anchor": ["0.0"],
  "checks": ["dir_pseudo"]
}"#;

#[test]
fn schema_parses_parabola_wedge() {
    let file = ProblemFile::parse(EX41).unwrap();
    let Problem::General(p) = file.build().unwrap() else {
        panic!("general kind")
    };
    let e = parabola_wedge();
    assert_eq!(p.map().atoms(), e.map().atoms());
    assert_eq!(p.lambda(), e.lambda());
    let t = tangent_cone(p.lambda(), p.anchor_point()).unwrap();
    assert!(t.contains(&qvec(&[1, 1])));
}

#[test]
fn schema_round_trip_is_exact() {
    let text = r#"{"schema":1,"kind":"cs","phi":[{"affine":{"a":[["0.25"]],"c":["0"]}}],
        "psi":[{"affine":{"a":[["-1/3"]],"c":["2/6"]}}],"anchor":["0"]}"#;
    let file = ProblemFile::parse(text).unwrap();
    let dumped = file.to_normalized_json();
    assert!(dumped.contains("\"1/4\"") && dumped.contains("\"1/3\""));
    let again = ProblemFile::parse(&dumped).unwrap();
    assert_eq!(file, again);
    assert_eq!(again.to_normalized_json(), dumped);
}

#[test]
fn schema_rejects_bad_input() {
    let unknown = EX41.replace("\"checks\"", "\"chekcs\"");
    assert!(ProblemFile::parse(&unknown).is_err());
    let version = EX41.replace("\"schema\": 1", "\"schema\": 2");
    assert!(ProblemFile::parse(&version).is_err());
    let bad_dim = EX41.replace("\"anchor\": [\"0.0\"]", "\"anchor\": [\"0\", \"1\"]");
    let f = ProblemFile::parse(&bad_dim).unwrap();
    assert!(matches!(f.build(), Err(ModelError::Dimension { .. })));
    let bad_rat = EX41.replace("\"-2\"", "\"x/2\"");
    assert!(ProblemFile::parse(&bad_rat).is_err());
}

#[test]
fn schema_kkt_kind() {
    let text = r#"{"schema":1,"kind":"kkt",
        "f":[{"quadratic":{"q":[[[1]]],"a":[[0]],"c":[0]}}],
        "g":[{"affine":{"a":[[1]],"c":[0]}}],
        "anchor":[0],"mu":[0]}"#;
    let f = ProblemFile::parse(text).unwrap();
    let p = f.build().unwrap();
    let g = p.to_general().unwrap();
    assert_eq!(g.n(), 2);
    assert!(g.kkt_layout().is_some());
}

fn small() -> impl Strategy<Value = i64> {
    -2i64..=2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Strata of the linearized cone cover exactly the directions whose image
    /// lies in the tangent cone.
    #[test]
    fn linearized_strata_cover(
        a in proptest::collection::vec(small(), 4),
        u in proptest::collection::vec(small(), 2),
    ) {
        let map = MapStack::new(2, vec![FunctionAtom::affine(
            vec![qvec(&a[0..2]), qvec(&a[2..4])], qvec(&[0, 0]))]).unwrap();
        let lambda = StructuredSet::new(vec![Factor::Compl]).unwrap();
        let inst = ProblemInstance::new(map, lambda, qvec(&[0, 0])).unwrap();
        let l = linearized_cone(&inst).unwrap();
        let t = tangent_cone(inst.lambda(), inst.anchor_point()).unwrap();
        let u = qvec(&u);
        let image = crate::rational::mat_vec(&inst.jacobian().unwrap(), &u);
        prop_assert_eq!(l.contains(&u), t.contains(&image));
    }

    /// Anchor feasibility and the scaled instance agree on every factor kind.
    #[test]
    fn scaling_preserves_membership(s in 1i64..5, y in proptest::collection::vec(small(), 2)) {
        let lambda = StructuredSet::new(vec![
            Factor::Orthant { dim: 1, orientation: Orientation::Nonneg },
            Factor::Zero { dim: 1 },
        ]).unwrap();
        let map = MapStack::new(2, vec![FunctionAtom::affine(vec![unit(2, 0), unit(2, 1)], qvec(&[0, 0]))]).unwrap();
        let y = qvec(&y);
        let feasible = !y[0].is_negative() && y[1].is_zero();
        let built = ProblemInstance::new(map, lambda, y.clone());
        prop_assert_eq!(built.is_ok(), feasible);
        if let Ok(inst) = built {
            let sc = inst.scaled(&int(s)).unwrap();
            let v: QVec = sc.map().eval(&y).unwrap();
            prop_assert!(sc.lambda().contains(&v));
        }
    }
}
