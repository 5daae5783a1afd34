use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sasaki_core::manifold::{space_form_chart, ChartedMetric, SpaceFormSpec, TangentVec};
use sasaki_core::sampling::{random_vector, sample_sb_point};
use sasaki_core::sphere_bundle::{SBPoint, SbLiftKind, SphereBundleAt};
use sasaki_core::tangent_bundle::{
    almost_complex_j, horizontal_lift, lift_bracket, project, sasaki_metric, to_induced_coords, vertical_lift, LiftKind,
    TMPoint, TMVec, VectorFieldOnM,
};

fn dv(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[test]
fn lifts_in_induced_coordinates() {
    let m = space_form_chart(SpaceFormSpec::new(2, 0, 1.0));
    let x = dv(&[0.2, -0.1]);
    let at = TMPoint::new(x.clone(), dv(&[0.4, 0.7]));
    let gamma = m.christoffel_at(&x).unwrap();
    let xv = TangentVec::new(x.clone(), dv(&[1.0, 2.0]));

    let h = horizontal_lift(&at, &xv).unwrap();
    assert_eq!(project(&h), (xv.comps.clone(), DVector::zeros(2)));
    let coords = to_induced_coords(&gamma, &at, &h);
    for i in 0..2 {
        let mut expected = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                expected -= at.u[b] * xv.comps[a] * gamma.get(i, a, b);
            }
        }
        assert_eq!(coords[i], xv.comps[i]);
        assert!((coords[2 + i] - expected).abs() < 1e-15);
    }

    let v = vertical_lift(&at, &xv).unwrap();
    assert_eq!(project(&v), (DVector::zeros(2), xv.comps.clone()));
    assert_eq!(to_induced_coords(&gamma, &at, &v), dv(&[0.0, 0.0, 1.0, 2.0]));

    assert_eq!(project(&TMVec::zeros(2)), (DVector::zeros(2), DVector::zeros(2)));
    let mixed = TMVec::new(dv(&[1.0, 0.0]), dv(&[0.0, 3.0]));
    assert_eq!(project(&mixed), (dv(&[1.0, 0.0]), dv(&[0.0, 3.0])));

    let elsewhere = TangentVec::new(dv(&[0.0, 0.0]), dv(&[1.0, 0.0]));
    assert!(horizontal_lift(&at, &elsewhere).is_err());
}

#[test]
fn sasaki_metric_and_j() {
    let g = space_form_chart(SpaceFormSpec::new(3, 1, 0.5)).metric_at(&dv(&[0.1, 0.2, 0.0])).unwrap();
    let x = dv(&[0.3, -1.0, 2.0]);
    assert_eq!(sasaki_metric(&g, &TMVec::horizontal(x.clone()), &TMVec::vertical(x.clone())), 0.0);
    let jh = almost_complex_j(&TMVec::horizontal(x.clone()));
    assert_eq!(jh, TMVec::vertical(x));
}

#[test]
fn lift_brackets_on_flat_base() {
    let flat = ChartedMetric::flat(2, 0);
    let at = TMPoint::new(dv(&[0.1, 0.2]), dv(&[0.5, -0.5]));
    let geom = sasaki_core::manifold::LocalGeometry::new(&flat, &at.x).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = sasaki_core::sampling::random_polynomial_field(2, &mut rng);
    let b = sasaki_core::sampling::random_polynomial_field(2, &mut rng);
    assert_eq!(lift_bracket(&geom, &at, &a, &b, LiftKind::Vertical, LiftKind::Vertical).max_abs(), 0.0);
    let (e0, e1) = (VectorFieldOnM::coordinate(2, 0), VectorFieldOnM::coordinate(2, 1));
    assert!(lift_bracket(&geom, &at, &e0, &e1, LiftKind::Horizontal, LiftKind::Horizontal).max_abs() < 1e-12);
    assert!(lift_bracket(&geom, &at, &e0, &e1, LiftKind::Vertical, LiftKind::Horizontal).max_abs() < 1e-12);
}

#[test]
fn normal_and_tangential_lift() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, nu, eps) in [(2, 0, 1.0), (3, 1, -1.0), (3, 1, 1.0)] {
        let m = space_form_chart(SpaceFormSpec::new(n, nu, 0.6));
        let sb = SphereBundleAt::new(&m, sample_sb_point(&m, eps, &mut rng).unwrap()).unwrap();
        let g = &sb.geom.g;
        let normal = sb.normal();
        assert!((sasaki_metric(g, &normal, &normal) - eps).abs() < 1e-12);
        let x = random_vector(n, &mut rng);
        assert!(sasaki_metric(g, &normal, &TMVec::horizontal(x.clone())).abs() < 1e-12);
        assert!(sasaki_metric(g, &normal, &sb.tangential_lift(&x).to_tm()).abs() < 1e-12);

        assert!(sb.tangential_lift(sb.u()).max_abs() < 1e-12);
        let perp = sb.project(&x);
        assert!((sb.tangential_lift(&perp).t - &perp).amax() < 1e-12);

        let xi = sb.geodesic_flow();
        assert!((sb.induced_metric(&xi, &xi) - eps).abs() < 1e-12);
        let y = random_vector(n, &mut rng);
        assert_eq!(sb.induced_metric(&sb.horizontal_lift(&x), &sb.tangential_lift(&y)), 0.0);

        let frame = sb.frame(0).unwrap();
        let signs = frame.signs(eps);
        for (i, a) in frame.vectors.iter().enumerate() {
            for (j, b) in frame.vectors.iter().enumerate() {
                let want = if i == j { signs[i] } else { 0.0 };
                assert!((sb.induced_metric(a, b) - want).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn frame_on_flat_plane() {
    let flat = ChartedMetric::flat(2, 0);
    let p = SBPoint::new(&flat, dv(&[0.0, 0.0]), dv(&[1.0, 0.0]), 1.0).unwrap();
    let sb = SphereBundleAt::new(&flat, p).unwrap();
    let frame = sb.frame(0).unwrap();
    assert_eq!(frame.vectors.len(), 3);
    let e = frame.base[0].clone();
    assert!((e[0]).abs() < 1e-15 && (e[1].abs() - 1.0).abs() < 1e-15);
    assert_eq!(frame.vectors[0].t, e);
    assert_eq!(frame.vectors[1].h, e);
    assert_eq!(frame.vectors[2].h, dv(&[1.0, 0.0]));
}

#[test]
fn points_off_the_fiber_are_rejected() {
    let flat = ChartedMetric::flat(2, 0);
    assert!(SBPoint::new(&flat, dv(&[0.0, 0.0]), dv(&[1.0, 1.0]), 1.0).is_err());
    assert!(SBPoint::normalized(&flat, dv(&[0.0, 0.0]), dv(&[1.0, 1.0]), -1.0).is_err());
}

#[test]
fn sphere_bundle_brackets_and_connection_on_flat_base() {
    let flat = ChartedMetric::flat(3, 0);
    let p = SBPoint::normalized(&flat, dv(&[0.1, 0.0, 0.2]), dv(&[1.0, 2.0, 2.0]), 1.0).unwrap();
    let sb = SphereBundleAt::new(&flat, p).unwrap();
    let u = sb.u().clone();
    let x = VectorFieldOnM::constant(sb.project(&dv(&[1.0, 0.0, 0.0])));
    let y = VectorFieldOnM::constant(sb.project(&dv(&[0.0, 1.0, -1.0])));
    assert!((u.dot(&x.eval(&sb.p.x))).abs() < 1e-15);

    use SbLiftKind::{Horizontal as H, Tangential as T};
    assert!(sb.bracket(&x, &y, T, T).max_abs() < 1e-15);
    assert!(sb.bracket(&x, &y, H, T).max_abs() < 1e-12);
    assert!(sb.nabla(&x.eval(&sb.p.x), &y, T, T).max_abs() < 1e-15);
    assert_eq!(sb.nabla(&x.eval(&sb.p.x), &y, T, H).max_abs(), 0.0);
    let (xv, yv) = (x.eval(&sb.p.x), y.eval(&sb.p.x));
    let r = sb.curvature(&sb.horizontal_lift(&xv), &sb.tangential_lift(&yv), &sb.horizontal_lift(&xv));
    assert_eq!(r.max_abs(), 0.0);
}
