use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sasaki_core::contact::{
    common_psi_root, kappa_mu_for_space_form, psi_quadratic_values, psi_quadratics, ContactData, KappaMu,
};
use sasaki_core::manifold::{space_form_chart, ChartedMetric, SpaceFormSpec};
use sasaki_core::sampling::{random_vector, sample_sb_point};
use sasaki_core::sphere_bundle::SBPoint;

fn sample(n: usize, nu: usize, c: f64, eps: f64, seed: u64) -> (ContactData, ChaCha8Rng) {
    let m = space_form_chart(SpaceFormSpec::new(n, nu, c));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = sample_sb_point(&m, eps, &mut rng).unwrap();
    (ContactData::new(&m, p).unwrap(), rng)
}

#[test]
fn structure_tensors() {
    for (nu, eps) in [(0, 1.0), (1, -1.0)] {
        let (cd, mut rng) = sample(3, nu, 0.7, eps, 11);
        assert!((cd.eta(&cd.xi) - 1.0).abs() < 1e-12);
        assert!((cd.metric(&cd.xi, &cd.xi) - eps).abs() < 1e-12);
        let x = cd.bundle.project(&random_vector(3, &mut rng));
        let phi_h = cd.phi(&cd.bundle.horizontal_lift(&x));
        assert!((phi_h - cd.bundle.tangential_lift(&x)).max_abs() < 1e-12);
    }
}

#[test]
fn geodesic_flow_is_geodesic() {
    let (cd, _) = sample(2, 1, -0.4, -1.0, 2);
    assert!(cd.nabla_xi(&cd.xi).max_abs() < 1e-12);

    let flat = ChartedMetric::flat(2, 0);
    let p = SBPoint::normalized(&flat, DVector::zeros(2), DVector::from_vec(vec![3.0, 4.0]), 1.0).unwrap();
    let cd = ContactData::new(&flat, p).unwrap();
    let a = cd.bundle.horizontal_lift(&DVector::from_vec(vec![0.2, -1.0]));
    assert!(cd.nabla_xi(&a).max_abs() < 1e-15);
}

#[test]
fn h_spectrum() {
    let eig = |c: f64, eps: f64| {
        let (cd, _) = sample(3, if eps < 0.0 { 1 } else { 0 }, c, eps, 5);
        cd.h_operator(&cd.bundle.frame(0).unwrap()).eigenvalues().unwrap()
    };
    assert!(eig(1.0, 1.0).iter().all(|v| v.abs() < 1e-9));
    for (v, w) in eig(0.0, 1.0).iter().zip([-1.0, -1.0, 0.0, 1.0, 1.0]) {
        assert!((v - w).abs() < 1e-9);
    }
    for (v, w) in eig(0.0, -1.0).iter().zip([0.0, 1.0, 1.0, 3.0, 3.0]) {
        assert!((v - w).abs() < 1e-9);
    }
}

#[test]
fn kappa_mu_values() {
    let km = kappa_mu_for_space_form(1.0, 1.0);
    assert_eq!((km.kappa, km.mu), (1.0, -2.0));
    let km = kappa_mu_for_space_form(0.0, 1.0);
    assert_eq!((km.kappa, km.mu), (0.0, 0.0));
    let km = kappa_mu_for_space_form(-3.0 + 2.0 * 2f64.sqrt(), -1.0);
    assert!((km.kappa + 1.0).abs() < 1e-12);
    let km = kappa_mu_for_space_form(-1.0, -1.0);
    assert_eq!((km.kappa, km.mu), (-5.0, 2.0));
}

#[test]
fn kappa_mu_nullity_on_space_forms() {
    for (nu, c, eps, km) in [
        (0, 1.0, 1.0, KappaMu::new(1.0, -2.0)),
        (0, 0.0, 1.0, KappaMu::new(0.0, 0.0)),
        (1, 0.0, -1.0, KappaMu::new(0.0, 0.0)),
        (1, -1.0, -1.0, KappaMu::new(-5.0, 2.0)),
    ] {
        let (cd, mut rng) = sample(3, nu, c, eps, 8);
        for _ in 0..10 {
            let a = cd.bundle.vec(&random_vector(3, &mut rng), &random_vector(3, &mut rng));
            let b = cd.bundle.vec(&random_vector(3, &mut rng), &random_vector(3, &mut rng));
            assert!(cd.kappa_mu_defect(&a, &b, km).max_abs() < 1e-8);
        }
    }
}

#[test]
fn psi_quadratics_and_common_root() {
    let (cd, _) = sample(3, 0, 1.0, 1.0, 4);
    let psi = cd.psi_u(&cd.bundle.frame(0).unwrap());
    assert!((&psi - DMatrix::identity(2, 2)).amax() < 1e-9);
    let (q1, q2) = psi_quadratics(&psi, kappa_mu_for_space_form(1.0, 1.0), 1.0);
    assert!(q1.amax() < 1e-8 && q2.amax() < 1e-8);

    let (q1, q2) = psi_quadratic_values(0.0, KappaMu::new(0.0, 0.0), -1.0);
    assert_eq!((q1, q2), (0.0, 0.0));

    let km = kappa_mu_for_space_form(2.0, -1.0);
    let (q1, q2) = psi_quadratic_values(-2.0, km, -1.0);
    assert!(q1.abs() < 1e-10 && q2.abs() < 1e-10);
    assert!((common_psi_root(km, -1.0).unwrap() + 2.0).abs() < 1e-9);
}

#[test]
fn k_contact_plane_gap() {
    let (cd, mut rng) = sample(2, 0, 2.0, 1.0, 6);
    let x = cd.bundle.project(&random_vector(2, &mut rng));
    let k = cd.sectional(&cd.xi, &cd.bundle.horizontal_lift(&x)).unwrap();
    assert!((k + 4.0).abs() < 1e-9, "{k}");

    for (nu, c, eps) in [(0, 1.0, 1.0), (1, -1.0, -1.0)] {
        let (cd, mut rng) = sample(3, nu, c, eps, 6);
        for _ in 0..5 {
            let a = cd.bundle.vec(&random_vector(3, &mut rng), &random_vector(3, &mut rng));
            let b = cd.bundle.vec(&random_vector(3, &mut rng), &random_vector(3, &mut rng));
            assert!(cd.killing_defect(&a, &b).abs() < 1e-10);
        }
    }
}

#[test]
fn phi_sectional_values() {
    let c = 2.0 + 5f64.sqrt();
    let (cd, mut rng) = sample(3, 0, c, 1.0, 12);
    let a = cd.bundle.vec(&random_vector(3, &mut rng), &random_vector(3, &mut rng));
    assert!((cd.phi_sectional(&a).unwrap() - (9.0 + 4.0 * 5f64.sqrt())).abs() < 1e-9);

    let (cd, _) = sample(3, 0, 0.0, 1.0, 12);
    let frame = cd.bundle.frame(0).unwrap();
    let (x, y) = (frame.base[0].clone(), frame.base[1].clone());
    let at = |theta: f64, t: &DVector<f64>| {
        let a = cd.bundle.vec(&(&x * theta.cos()), &(t * theta.sin()));
        cd.phi_sectional(&a).unwrap()
    };
    // With the same vector in both slots the plane does not depend on theta.
    assert!((at(0.0, &x) - at(0.7, &x)).abs() < 1e-12);
    assert!((at(0.0, &y) - at(0.7, &y)).abs() > 0.1);
}

#[test]
fn sasakian_defect_distinguishes_c() {
    let worst = |c: f64| {
        let (cd, mut rng) = sample(2, 0, c, 1.0, 13);
        (0..10)
            .map(|_| {
                let a = cd.bundle.vec(&random_vector(2, &mut rng), &random_vector(2, &mut rng));
                let b = cd.bundle.vec(&random_vector(2, &mut rng), &random_vector(2, &mut rng));
                cd.sasakian_defect(&a, &b).max_abs()
            })
            .fold(0.0, f64::max)
    };
    assert!(worst(1.0) < 1e-10);
    assert!(worst(0.0) > 0.1);
}
