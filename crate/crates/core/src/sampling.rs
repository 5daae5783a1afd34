//! Seeded random sampling of base points, fiber vectors, charts and fields.
//!
//! Every sample stream is derived from `(seed, stream)` so that parallel and
//! serial evaluation draw identical values.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeometryError, Result};
use crate::manifold::{coordinate_signs, quadratic_chart, ChartedMetric};
use crate::sphere_bundle::SBPoint;
use crate::tangent_bundle::VectorFieldOnM;

/// Half-width of the coordinate box base points are drawn from.
pub const SAMPLE_BOX: f64 = 0.3;
/// Fiber candidates with `|g(u,u)|` below this are rejected before scaling.
pub const FIBER_REJECT: f64 = 0.1;

const MAX_ATTEMPTS: usize = 10_000;

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_symmetric<R: Rng>(n: usize, scale: f64, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..scale));
    (&a + a.transpose()) * 0.5
}

/// Uniform point of the sample box that lies in the chart domain.
pub fn sample_base_point<R: Rng>(m: &ChartedMetric, rng: &mut R) -> Result<DVector<f64>> {
    for _ in 0..MAX_ATTEMPTS {
        let x = random_vector(m.dim(), rng) * SAMPLE_BOX;
        if m.in_domain(&x) {
            return Ok(x);
        }
    }
    Err(GeometryError::OutOfDomain(vec![]))
}

/// A fiber vector with `g(u,u) = eps`: candidates with `|g(u,u)| < 0.1` or
/// the wrong sign are rejected, the survivor is rescaled.
pub fn sample_fiber_vector<R: Rng>(g: &DMatrix<f64>, eps: f64, rng: &mut R) -> Result<DVector<f64>> {
    let n = g.nrows();
    for _ in 0..MAX_ATTEMPTS {
        let u = random_vector(n, rng);
        let q = u.dot(&(g * &u));
        if q.abs() < FIBER_REJECT || q.signum() != eps.signum() {
            continue;
        }
        return Ok(u / q.abs().sqrt());
    }
    Err(GeometryError::EmptyFiber)
}

/// A random point of `T_eps M` over a random base point.
pub fn sample_sb_point<R: Rng>(m: &ChartedMetric, eps: f64, rng: &mut R) -> Result<SBPoint> {
    if eps < 0.0 && m.index() == 0 {
        return Err(GeometryError::EmptyFiber);
    }
    let x = sample_base_point(m, rng)?;
    let g = m.metric_at(&x)?;
    let u = sample_fiber_vector(&g, eps, rng)?;
    SBPoint::new(m, x, u, eps)
}

/// A quadratic metric near `diag(ε_k)` with random first and second order
/// terms of size `scale`. Stays nondegenerate on the sample box for small
/// scales.
pub fn random_quadratic_chart<R: Rng>(n: usize, index: usize, scale: f64, rng: &mut R) -> ChartedMetric {
    let signs = coordinate_signs(n, index);
    let constant = DMatrix::from_diagonal(&DVector::from_vec(signs)) + random_symmetric(n, 0.1, rng);
    let linear = (0..n).map(|_| random_symmetric(n, scale, rng)).collect();
    let mut quadratic = vec![DMatrix::zeros(n, n); n * n];
    for k in 0..n {
        for l in k..n {
            let c = random_symmetric(n, scale, rng);
            quadratic[k * n + l] = c.clone();
            quadratic[l * n + k] = c;
        }
    }
    quadratic_chart(constant, linear, quadratic)
}

/// A random polynomial vector field of degree two.
pub fn random_polynomial_field<R: Rng>(n: usize, rng: &mut R) -> VectorFieldOnM {
    let a = random_vector(n, rng);
    let b = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = (0..n).map(|_| random_symmetric(n, 1.0, rng)).collect();
    VectorFieldOnM::polynomial(a, b, q)
}
