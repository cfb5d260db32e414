use super::*;
use crate::GOLDEN;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn grid(lo: f64, hi: f64) -> GridSpec {
    GridSpec::new(32, 16, Interval::new(lo, hi).unwrap()).unwrap()
}

fn small_gen(g: GridSpec, amp: f64) -> VectorFunction {
    VectorFunction::fit(g, |x, y| {
        let s = (2.0 * PI * x).sin();
        let c = (2.0 * PI * x).cos();
        (amp * (s + 0.3 * y * c), amp * (0.5 * c - 0.2 * y * s))
    })
    .unwrap()
}

#[test]
fn standard_family_examples() {
    let g = grid(0.0, 1.0);
    let s0 = standard_family(0.0, 3, 2, g).unwrap();
    assert!(s0.pert.as_ref().unwrap().is_zero());
    let s = standard_family(0.1, 3, 2, g).unwrap();
    let amp = s.pert.as_ref().unwrap().c1.evaluate(1.0 / 12.0, 0.5).unwrap();
    assert!((amp - 0.1 / (6.0 * PI).powi(2)).abs() < 1e-15);
    assert!((amp - 2.8145e-4).abs() < 1e-8);
    let t = CylinderMap::translation(1.0 / 3.0);
    let mut worst: f64 = 0.0;
    for (x, y) in off_node_points(&g, Interval::new(0.1, 0.9).unwrap()) {
        let (a, b) = t.apply(x, y).unwrap();
        let st = s.apply(a, b).unwrap();
        let (c, d) = s.apply(x, y).unwrap();
        let ts = t.apply(c, d).unwrap();
        worst = worst.max((st.0 - ts.0).abs()).max((st.1 - ts.1).abs());
    }
    assert!(worst <= 1e-12, "{worst}");
}

#[test]
fn compose_examples() {
    let g = grid(0.0, 1.0);
    let target = Interval::new(0.2, 0.8).unwrap();
    let f = standard_family(0.05, 1, 1, g).unwrap();
    let c = compose(&CylinderMap::identity(), &f, g, target).unwrap();
    assert_eq!(c.base, Base::Twist);
    for (x, y) in [(0.1, 0.3), (0.77, 0.5)] {
        let (a, b) = c.apply(x, y).unwrap();
        let (p, q) = f.apply(x, y).unwrap();
        assert!((a - p).abs() < 1e-12 && (b - q).abs() < 1e-12);
    }
    let tt = compose(&CylinderMap::translation(0.2), &CylinderMap::translation(0.3), g, target).unwrap();
    assert_eq!(tt, CylinderMap::translation(0.5));

    let uu = compose(&CylinderMap::twist(), &CylinderMap::twist(), g, target).unwrap();
    assert_eq!(uu.base, Base::Twist);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (x, y) = (rng.gen::<f64>(), rng.gen_range(0.2..0.8));
        let (a, b) = uu.apply(x, y).unwrap();
        assert!((a - (x + 2.0 * y)).abs() <= 1e-10 && (b - y).abs() <= 1e-10);
    }
}

#[test]
fn compose_reports_escape() {
    let g = grid(0.0, 1.0);
    let lift = CylinderMap::new(Base::Translation(0.0), Some(VectorFunction::fit(g, |_, _| (0.0, 0.5)).unwrap()));
    let narrow = standard_family(0.01, 1, 1, grid(0.0, 1.0)).unwrap();
    let err = compose(&narrow, &lift, g, Interval::new(0.0, 1.0).unwrap()).unwrap_err();
    assert!(matches!(err, Error::Range { .. }), "{err}");
}

#[test]
fn compose_is_associative() {
    let g = grid(-0.5, 1.5);
    let a = standard_family(0.02, 1, 1, g).unwrap();
    let b = CylinderMap::translation(GOLDEN).with_pert(small_gen(g, 1e-3));
    let c = standard_family(-0.03, 2, 1, g).unwrap();
    let mid = Interval::new(-0.3, 1.3).unwrap();
    let inner = Interval::new(0.0, 1.0).unwrap();
    let left = compose(&compose(&a, &b, g, mid).unwrap(), &c, g, inner).unwrap();
    let right = compose(&a, &compose(&b, &c, g, mid).unwrap(), g, inner).unwrap();
    for (x, y) in off_node_points(&g, inner) {
        let (p, q) = left.apply(x, y).unwrap();
        let (r, s) = right.apply(x, y).unwrap();
        assert!((p - r).abs() <= 1e-9 && (q - s).abs() <= 1e-9);
    }
}

#[test]
fn inversion_examples() {
    let g = grid(0.0, 1.0);
    let target = Interval::new(0.25, 0.75).unwrap();
    let id = Conjugacy::identity(g);
    let inv = invert_near_identity(&id, g, target).unwrap();
    assert!(inv.gen.is_zero());

    let shift = Conjugacy::new(VectorFunction::fit(g, |_, _| (0.1, 0.0)).unwrap()).unwrap();
    let inv = invert_near_identity(&shift, g, target).unwrap();
    let (a, b) = inv.gen.evaluate(0.3, 0.5).unwrap();
    assert!((a + 0.1).abs() < 1e-14 && b.abs() < 1e-14);

    // ‖h‖_1 = 0.1 trig generator
    let raw = small_gen(g, 1.0);
    let scale = 0.1 / raw.holder_norm(1.0).unwrap();
    let h = Conjugacy::new(raw.scale(scale)).unwrap();
    assert!((h.c1_norm - 0.1).abs() < 1e-6);
    let inv = invert_near_identity(&h, GridSpec::new(64, 32, target).unwrap(), target).unwrap();
    assert!(composite_residual(&h, &inv, target).unwrap() <= 1e-10);
}

#[test]
fn inversion_contract() {
    let g = grid(0.0, 1.0);
    let raw = small_gen(g, 1.0);
    let h = Conjugacy::new(raw.scale(0.2 / raw.holder_norm(1.0).unwrap())).unwrap();
    assert!(matches!(invert_near_identity(&h, g, Interval::new(0.1, 0.9).unwrap()), Err(Error::Contract(_))));
}

#[test]
fn inverse_round_trips_and_norm_bound() {
    let g = GridSpec::new(32, 20, Interval::new(0.0, 1.0).unwrap()).unwrap();
    let h = Conjugacy::new(small_gen(g, 3e-3)).unwrap();
    let target = Interval::new(0.1, 0.9).unwrap();
    let inv = invert_near_identity(&h, g, target).unwrap();
    let inner = Interval::new(0.2, 0.8).unwrap();
    assert!(composite_residual(&h, &inv, inner).unwrap() <= 1e-10);
    assert!(composite_residual(&inv, &h, inner).unwrap() <= 1e-10);
    assert!(inv.gen.sup_norm() <= h.gen.sup_norm() * (1.0 + 1e-9));
}

#[test]
fn conjugation_examples() {
    let g = grid(0.0, 1.0);
    let target = Interval::new(0.2, 0.8).unwrap();
    let f = standard_family(0.05, 2, 1, g).unwrap();
    let same = conjugate(&f, &Conjugacy::identity(g), g, target).unwrap();
    for (x, y) in off_node_points(&g, target).into_iter().step_by(17) {
        let (a, b) = same.apply(x, y).unwrap();
        let (p, q) = f.apply(x, y).unwrap();
        assert!((a - p).abs() <= 1e-12 && (b - q).abs() <= 1e-12);
    }

    // generator depending only on y: T_alpha stays T_alpha in the vertical
    let h = Conjugacy::new(VectorFunction::fit(g, |_, y| (0.01 * y * y, 0.02 * y)).unwrap()).unwrap();
    let t = conjugate(&CylinderMap::translation(GOLDEN), &h, g, target).unwrap();
    assert_eq!(t.base, Base::Translation(GOLDEN));
    assert!(t.pert.as_ref().unwrap().c2.max_abs_coeff() < 1e-14);
}

#[test]
fn conjugation_names_failing_link() {
    let g = grid(0.0, 1.0);
    let h = Conjugacy::new(VectorFunction::fit(g, |_, _| (0.0, 0.05)).unwrap()).unwrap();
    let f = standard_family(0.01, 1, 1, grid(0.0, 0.5)).unwrap();
    let err = conjugate(&f, &h, g, Interval::new(0.1, 0.48).unwrap()).unwrap_err().to_string();
    assert!(err.contains("dom F"), "{err}");
}

#[test]
fn reduction_examples() {
    let g = grid(0.0, 1.0);
    let pert = small_gen(g, 1e-3);
    let k = CylinderMap::translation(GOLDEN).with_pert(small_gen(g, 2e-3));

    let id = CylinderMap::new(Base::FrequencyTwist(Frequency::parse("y").unwrap()), Some(pert.clone()));
    let (f2, k2) = reduce_by_frequency(&id, &k, g).unwrap();
    assert_eq!(f2.base, Base::Twist);
    let diff = f2.pert.as_ref().unwrap().sub(&pert).unwrap();
    assert!(diff.sup_norm() <= 1e-12);
    assert!(k2.pert.unwrap().sub(k.pert.as_ref().unwrap()).unwrap().sup_norm() <= 1e-12);

    let two = CylinderMap::new(Base::FrequencyTwist(Frequency::parse("2*y").unwrap()), None);
    let (z, _) = reduce_by_frequency(&two, &k, g).unwrap();
    assert!(z.pert.as_ref().unwrap().sup_norm() <= 1e-14);
    assert_eq!(z.domain(), Some(Interval::new(0.0, 2.0).unwrap()));

    let f2only = VectorFunction::fit(g, |x, y| (0.0, 1e-3 * (2.0 * PI * x).cos() * (1.0 + y))).unwrap();
    let m = CylinderMap::new(Base::FrequencyTwist(Frequency::parse("2*y").unwrap()), Some(f2only.clone()));
    let (r, _) = reduce_by_frequency(&m, &k, g).unwrap();
    let rp = r.pert.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let (x, y) = (rng.gen::<f64>(), rng.gen_range(0.0..2.0));
        let want = 2.0 * f2only.c2.evaluate(x, y / 2.0).unwrap();
        assert!((rp.c2.evaluate(x, y).unwrap() - want).abs() <= 1e-10);
    }
}

#[test]
fn reduction_rejects_non_monotone() {
    let g = grid(-1.0, 1.0);
    let m = CylinderMap::new(Base::FrequencyTwist(Frequency::parse("y^2").unwrap()), None);
    assert!(reduce_by_frequency(&m, &CylinderMap::translation(GOLDEN), g).is_err());
}

#[test]
fn manufactured_identity_pair() {
    let g = grid(-0.1, 1.1);
    let p = manufacture_commuting_pair(&VectorFunction::zeros(g), GOLDEN, g, Interval::new(0.0, 1.0).unwrap()).unwrap();
    assert!(p.f.pert.unwrap().is_zero());
    assert!(p.k.pert.unwrap().is_zero());
    assert!(p.h_true.gen.is_zero());
}

#[test]
fn manufactured_pair_guard() {
    let g = grid(-0.1, 1.1);
    let big = small_gen(g, 0.2);
    assert!(manufacture_commuting_pair(&big, GOLDEN, g, Interval::new(0.0, 1.0).unwrap()).is_err());
}

#[test]
fn map_json_round_trip() {
    let g = grid(0.0, 1.0);
    let f = standard_family(0.1, 3, 2, g).unwrap();
    let text = serde_json::to_string(&f).unwrap();
    let back: CylinderMap = serde_json::from_str(&text).unwrap();
    assert_eq!(back, f);
    let w = CylinderMap::new(Base::FrequencyTwist(Frequency::parse("y + 0.1*y^3").unwrap()), None);
    let back: CylinderMap = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
    assert_eq!(back, w);
}
