use proptest::prelude::*;

use super::*;
use crate::cones::{Factor, StructuredSet};
use crate::cq::{verify_witness, Mode};
use crate::rational::qvec;
use crate::system::kkt_to_general;
use crate::system::schema::CheckKind;
use crate::testkit::{parabola_wedge, identity_nonpos, kkt_quad, square_zero};

fn cfg() -> SamplingConfig {
    SamplingConfig {
        samples_per_radius: 40,
        ..SamplingConfig::default()
    }
}

#[test]
fn residual_of_identity_on_nonpos() {
    let r = residual(&identity_nonpos(), &[0.5], 1e-9).unwrap();
    assert_eq!(r, 0.5);
    assert_eq!(residual(&identity_nonpos(), &[-3.0], 1e-9).unwrap(), 0.0);
}

#[test]
fn compl_distance_against_grid() {
    let set = StructuredSet::new(vec![Factor::Compl]).unwrap();
    let d = distance_to_set(&set, &[1.0, 1.0], 1e-9).unwrap();
    let mut grid = f64::INFINITY;
    for i in 0..=400 {
        let s = i as f64 * 0.01;
        for p in [[s, 0.0], [0.0, s]] {
            grid = grid.min(((p[0] - 1.0f64).powi(2) + (p[1] - 1.0f64).powi(2)).sqrt());
        }
    }
    assert!((d - 1.0).abs() < 1e-12);
    assert!((d - grid).abs() < 1e-12);
}

#[test]
fn parabola_wedge_is_everywhere_feasible() {
    let inst = parabola_wedge();
    for x in [-2.0, -0.3, 0.0, 0.7, 5.0] {
        assert_eq!(residual(&inst, &[x], 1e-9).unwrap(), 0.0);
    }
}

#[test]
fn distances_on_small_instances() {
    let c = cfg();
    let d = distance_to_solutions(&identity_nonpos(), &[0.5], &c).unwrap();
    assert!((d - 0.5).abs() < 1e-9, "{d}");
    let d = distance_to_solutions(&square_zero(), &[0.1], &c).unwrap();
    assert!((d - 0.1).abs() < 1e-5, "{d}");
}

#[test]
fn kkt_distance_at_perturbed_anchor() {
    let inst = kkt_to_general(&kkt_quad()).unwrap();
    let x = [0.01, 0.02];
    let d = distance_to_solutions(&inst, &x, &cfg()).unwrap();
    assert!(d <= (0.01f64.powi(2) + 0.02f64.powi(2)).sqrt() + 1e-12);
}

#[test]
fn identity_modulus_is_one() {
    let t = empirical_modulus(&identity_nonpos(), &cfg()).unwrap();
    for row in &t.rows {
        let k = row.max_ratio.expect("half the sphere is infeasible");
        assert!((k - 1.0).abs() < 1e-6, "{k}");
    }
    assert_eq!(t.bounded, Some(true));
}

#[test]
fn square_modulus_grows_like_inverse_radius() {
    let t = empirical_modulus(&square_zero(), &cfg()).unwrap();
    for row in &t.rows {
        let k = row.max_ratio.unwrap();
        assert!((k * row.radius - 1.0).abs() < 0.1, "r = {}, κ = {k}", row.radius);
    }
    assert_eq!(t.bounded, Some(false));
}

#[test]
fn feasible_everywhere_gives_no_ratio() {
    let t = empirical_modulus(&parabola_wedge(), &cfg()).unwrap();
    assert!(t.rows.iter().all(|r| r.max_ratio.is_none() && r.infeasible == 0));
    assert_eq!(t.bounded, None);
}

#[test]
fn kkt_modulus_reports_both_residuals() {
    let inst = kkt_to_general(&kkt_quad()).unwrap();
    let t = empirical_modulus(&inst, &cfg()).unwrap();
    assert_eq!(t.bounded, Some(true));
    assert_eq!(t.kkt_bounded, Some(true));
    assert!(t.rows.iter().all(|r| r.kkt_max_ratio.is_some()));
}

#[test]
fn modulus_is_reproducible() {
    let inst = parabola_wedge();
    let a = empirical_modulus(&square_zero(), &cfg()).unwrap();
    let b = empirical_modulus(&square_zero(), &cfg()).unwrap();
    assert_eq!(a, b);
    let _ = inst;
    let json = serde_json::to_string(&a).unwrap();
    let back: ModulusTable = serde_json::from_str(&json).unwrap();
    assert_eq!(back.config, a.config);
}

#[test]
fn config_validation() {
    assert!(SamplingConfig::default().validate().is_ok());
    let bad = [
        SamplingConfig { radii: vec![1e-2, 1e-1], ..SamplingConfig::default() },
        SamplingConfig { radii: vec![0.1, 0.0], ..SamplingConfig::default() },
        SamplingConfig { shrink: 1.0, ..SamplingConfig::default() },
        SamplingConfig { shrink: 0.0, ..SamplingConfig::default() },
    ];
    for c in bad {
        assert!(c.validate().is_err());
    }
}

#[test]
fn falsifier_finds_square_witness() {
    let inst = square_zero();
    for mode in [Mode::Quasi, Mode::Pseudo] {
        let w = sequence_falsifier(&inst, &qvec(&[1]), &qvec(&[1]), mode, &cfg())
            .unwrap()
            .expect("ζ·t² > 0");
        assert_eq!(w.sequence.len(), cfg().max_depth + 1);
        verify_witness(&inst, mode.kind(), &w).unwrap();
    }
}

#[test]
fn falsifier_finds_nothing_on_parabola_wedge() {
    let inst = parabola_wedge();
    for mode in [Mode::Quasi, Mode::Pseudo] {
        let w = sequence_falsifier(&inst, &qvec(&[-1]), &qvec(&[0, 1]), mode, &cfg()).unwrap();
        assert!(w.is_none());
    }
}

#[test]
fn zero_multiplier_is_vacuous() {
    let w = sequence_falsifier(&square_zero(), &qvec(&[1]), &qvec(&[0]), Mode::Quasi, &cfg()).unwrap();
    assert!(w.is_none());
}

#[test]
fn falsifier_rejects_bad_config() {
    let c = SamplingConfig { shrink: 2.0, ..cfg() };
    assert!(sequence_falsifier(&square_zero(), &qvec(&[1]), &qvec(&[1]), Mode::Quasi, &c).is_err());
    let _ = CheckKind::DirQuasi;
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_zero_iff_feasible(x in -3.0f64..3.0) {
        let inst = identity_nonpos();
        let r = residual(&inst, &[x], 1e-9).unwrap();
        prop_assert!(r >= 0.0);
        prop_assert_eq!(r == 0.0, x <= 0.0);
    }

    #[test]
    fn distance_is_bounded_by_anchor_distance(x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let inst = kkt_to_general(&kkt_quad()).unwrap();
        let d = distance_to_solutions(&inst, &[x, y], &cfg()).unwrap();
        prop_assert!(d >= 0.0);
        prop_assert!(d <= (x * x + y * y).sqrt() + 1e-12);
    }
}
