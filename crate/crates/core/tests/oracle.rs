use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sasaki_core::contact::ContactData;
use sasaki_core::manifold::{space_form_chart, ChartedMetric, SpaceFormSpec};
use sasaki_core::oracle::{
    fd_exterior_derivative, fd_lie_bracket, fd_lie_derivative_metric, fd_nijenhuis, fd_riemann, fd_sasaki_metric,
    hypersurface_pullback, koszul_sb_nabla, ChartContactFields, FieldLift, GaussOracle, NestedSteps, FD_STEP,
};
use sasaki_core::sampling::{random_polynomial_field, random_vector, sample_sb_point};
use sasaki_core::sphere_bundle::{SBPoint, SbLiftKind, SphereBundleAt};
use sasaki_core::tangent_bundle::{sasaki_metric_induced, TMPoint};

fn dv(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[test]
fn fd_riemann_matches_closed_form() {
    let flat = ChartedMetric::flat(2, 0);
    let fl = flat.clone();
    let r = fd_riemann(&move |x| fl.christoffel_at(x), &dv(&[0.1, 0.2]), FD_STEP).unwrap();
    assert!(r.max_abs() < 1e-10);

    let m = space_form_chart(SpaceFormSpec::new(3, 1, -0.7));
    let x = dv(&[0.1, -0.15, 0.2]);
    let mc = m.clone();
    let r = fd_riemann(&move |y| mc.christoffel_at(y), &x, FD_STEP).unwrap();
    assert!(r.max_abs_diff(&m.riemann_at(&x).unwrap()) < 1e-6);
}

#[test]
fn sasaki_metric_in_induced_coordinates() {
    let flat = ChartedMetric::flat(2, 0);
    let xu = dv(&[0.1, 0.2, 0.6, -0.8]);
    assert!((fd_sasaki_metric(&flat, &xu, FD_STEP).unwrap() - DMatrix::identity(4, 4)).amax() < 1e-12);

    let m = space_form_chart(SpaceFormSpec::new(2, 1, 0.5));
    let at = TMPoint::new(dv(&[0.1, 0.2]), dv(&[0.6, -0.8]));
    let fd = fd_sasaki_metric(&m, &dv(&[0.1, 0.2, 0.6, -0.8]), FD_STEP).unwrap();
    assert!((fd - sasaki_metric_induced(&m, &at).unwrap()).amax() < 1e-8);
}

#[test]
fn pullback_metric_agrees_with_induced_metric() {
    let flat = ChartedMetric::flat(2, 0);
    let t: f64 = 0.4;
    let p = SBPoint::new(&flat, dv(&[0.0, 0.0]), dv(&[t.cos(), t.sin()]), 1.0).unwrap();
    let (_, g) = hypersurface_pullback(&flat, &p, FD_STEP).unwrap();
    assert!((g[(0, 1)]).abs() < 1e-9 && (g[(0, 2)]).abs() < 1e-9 && (g[(1, 2)]).abs() < 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (n, nu, eps) in [(2, 0, 1.0), (3, 1, -1.0)] {
        let m = space_form_chart(SpaceFormSpec::new(n, nu, 0.9));
        for _ in 0..20 {
            let p = sample_sb_point(&m, eps, &mut rng).unwrap();
            let (chart, g) = hypersurface_pullback(&m, &p, FD_STEP).unwrap();
            let sb = SphereBundleAt::new(&m, p).unwrap();
            let origin = chart.origin.clone();
            let a = sb.vec(&random_vector(n, &mut rng), &random_vector(n, &mut rng));
            let b = sb.vec(&random_vector(n, &mut rng), &random_vector(n, &mut rng));
            let ca = chart.sb_to_chart(&origin, &a, FD_STEP).unwrap();
            let cb = chart.sb_to_chart(&origin, &b, FD_STEP).unwrap();
            let lhs = (ca.transpose() * &g * cb)[0];
            assert!((lhs - sb.induced_metric(&a, &b)).abs() < 1e-8);
        }
    }
}

#[test]
fn gauss_oracle_reproduces_closed_form_cases() {
    use SbLiftKind::{Horizontal as H, Tangential as T};
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, nu, c, eps, kinds) in [
        (3, 0, 0.0, 1.0, [T, T, T]),
        (3, 0, 1.0, 1.0, [H, T, H]),
        (2, 1, -1.0, -1.0, [H, H, H]),
    ] {
        let m = space_form_chart(SpaceFormSpec::new(n, nu, c));
        let p = sample_sb_point(&m, eps, &mut rng).unwrap();
        let sb = SphereBundleAt::new(&m, p.clone()).unwrap();
        let lift = |k: SbLiftKind, v: &DVector<f64>| match k {
            H => sb.horizontal_lift(v),
            T => sb.tangential_lift(v),
        };
        let vs: Vec<_> = (0..3).map(|i| lift(kinds[i], &random_vector(n, &mut rng))).collect();
        let oracle = GaussOracle::new(&m, &p, NestedSteps::default()).unwrap();
        let fd = oracle.curvature(&vs[0], &vs[1], &vs[2]).unwrap();
        let closed = sb.curvature(&vs[0], &vs[1], &vs[2]);
        assert!((fd - closed).max_abs() < 1e-5, "{kinds:?}");
    }
}

#[test]
fn koszul_connection_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let m = space_form_chart(SpaceFormSpec::new(2, 1, 0.8));
    let p = sample_sb_point(&m, -1.0, &mut rng).unwrap();
    let sb = SphereBundleAt::new(&m, p.clone()).unwrap();
    let field = random_polynomial_field(2, &mut rng);
    let a = sb.vec(&random_vector(2, &mut rng), &random_vector(2, &mut rng));
    for (lift, kind) in [(FieldLift::Horizontal, SbLiftKind::Horizontal), (FieldLift::Tangential, SbLiftKind::Tangential)] {
        let fd = koszul_sb_nabla(&m, &p, &a, &field, lift, NestedSteps::default()).unwrap();
        assert!((fd - sb.nabla_vec(&a, &field, kind)).max_abs() < 1e-5);
    }
}

#[test]
fn lie_bracket_and_derivative() {
    let e0 = |_: &DVector<f64>| dv(&[1.0, 0.0]);
    let e1 = |_: &DVector<f64>| dv(&[0.0, 1.0]);
    let y = dv(&[0.3, -0.2]);
    assert_eq!(fd_lie_bracket(&e0, &e1, &y, FD_STEP).amax(), 0.0);

    let rotation = |p: &DVector<f64>| dv(&[-p[1], p[0]]);
    let euclid = |_: &DVector<f64>| DMatrix::<f64>::identity(2, 2);
    assert!(fd_lie_derivative_metric(&rotation, &euclid, &y, FD_STEP).amax() < 1e-8);

    let grad = |p: &DVector<f64>| dv(&[2.0 * p[0] * p[1], p[0] * p[0] + 3.0 * p[1] * p[1]]);
    assert!(fd_exterior_derivative(&grad, &y, FD_STEP).amax() < 1e-8);

    let constant_phi = |_: &DVector<f64>| DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    assert!(fd_nijenhuis(&constant_phi, &y, &dv(&[1.0, 0.0]), &dv(&[0.0, 1.0]), FD_STEP).amax() < 1e-12);
}

#[test]
fn contact_fields_on_a_chart() {
    let residuals = |c: f64| {
        let m = space_form_chart(SpaceFormSpec::new(2, 0, c));
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let p = sample_sb_point(&m, 1.0, &mut rng).unwrap();
        let (chart, _) = hypersurface_pullback(&m, &p, FD_STEP).unwrap();
        let fields = ContactFieldsProbe::new(&chart);
        (fields.killing(), fields.nijenhuis())
    };
    let (killing, nij) = residuals(1.0);
    assert!(killing < 1e-5 && nij < 1e-5, "{killing} {nij}");
    let (killing, _) = residuals(2.0);
    assert!(killing > 1e-2, "{killing}");
    let (_, nij) = residuals(0.0);
    assert!(nij > 0.1, "{nij}");
}

struct ContactFieldsProbe<'a> {
    fields: ChartContactFields<'a>,
    y0: DVector<f64>,
}

impl<'a> ContactFieldsProbe<'a> {
    fn new(chart: &'a sasaki_core::oracle::HypersurfaceChart) -> Self {
        Self { fields: ChartContactFields::new(chart, FD_STEP), y0: chart.origin.clone() }
    }

    fn killing(&self) -> f64 {
        let chart = self.fields.chart;
        let metric = |y: &DVector<f64>| chart.pullback_metric(y, FD_STEP).unwrap() * 0.25;
        fd_lie_derivative_metric(&|y| self.fields.xi(y), &metric, &self.y0, 1e-4).amax()
    }

    fn nijenhuis(&self) -> f64 {
        let dim = self.y0.len();
        let d_eta = fd_exterior_derivative(&|y| self.fields.eta(y), &self.y0, 1e-4) * 0.5;
        let xi = self.fields.xi(&self.y0);
        let phi = |y: &DVector<f64>| self.fields.phi(y);
        let mut worst: f64 = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                let ea = DVector::from_fn(dim, |i, _| if i == a { 1.0 } else { 0.0 });
                let eb = DVector::from_fn(dim, |i, _| if i == b { 1.0 } else { 0.0 });
                let n = fd_nijenhuis(&phi, &self.y0, &ea, &eb, 1e-4) + &xi * (2.0 * d_eta[(a, b)]);
                worst = worst.max(n.amax());
            }
        }
        worst
    }
}

#[test]
fn contact_data_agrees_with_chart_fields() {
    let m = space_form_chart(SpaceFormSpec::new(2, 0, 1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let p = sample_sb_point(&m, 1.0, &mut rng).unwrap();
    let (chart, _) = hypersurface_pullback(&m, &p, FD_STEP).unwrap();
    let fields = ChartContactFields::new(&chart, FD_STEP);
    let cd = ContactData::new(&m, p).unwrap();
    let y0 = chart.origin.clone();
    let xi = chart.sb_to_chart(&y0, &cd.xi, FD_STEP).unwrap();
    assert!((fields.xi(&y0) - xi).amax() < 1e-8);
}
