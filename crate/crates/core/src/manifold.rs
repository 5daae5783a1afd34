//! Base pseudo-Riemannian manifold `(M, g)` presented in a single chart.
//!
//! A [`ChartedMetric`] carries the metric components as a closure together with
//! optional analytic first and second partial derivatives. When the derivatives
//! are missing, central differences are used instead and
//! [`ChartedMetric::uses_finite_differences`] reports it.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GeometryError, Result};
use crate::tensor::{Christoffel, NablaRiemann, RiemannTensor};

/// Step for first derivatives of metric components in finite-difference mode.
pub const FIRST_DIFF_STEP: f64 = 1e-5;
/// Step for second derivatives of metric components in finite-difference mode.
pub const SECOND_DIFF_STEP: f64 = 1e-4;
/// Planes with `|g(X,X)g(Y,Y) - g(X,Y)^2|` at or below this are degenerate.
pub const PLANE_DEGENERACY: f64 = 1e-8;
/// Space-form charts are restricted to `F(x)` above this cutoff.
pub const SPACE_FORM_DOMAIN_CUTOFF: f64 = 0.05;

pub type MetricFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
/// First partials: entry `k` holds `∂_k g_ij`.
pub type Deriv1Fn = Arc<dyn Fn(&DVector<f64>) -> Vec<DMatrix<f64>> + Send + Sync>;
/// Second partials: entry `k * n + l` holds `∂_k ∂_l g_ij`.
pub type Deriv2Fn = Arc<dyn Fn(&DVector<f64>) -> Vec<DMatrix<f64>> + Send + Sync>;
pub type DomainFn = Arc<dyn Fn(&DVector<f64>) -> bool + Send + Sync>;

/// A tangent vector `X ∈ T_xM` in chart components.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVec {
    pub base: DVector<f64>,
    pub comps: DVector<f64>,
}

impl TangentVec {
    pub fn new(base: DVector<f64>, comps: DVector<f64>) -> Self {
        Self { base, comps }
    }
}

/// Parameters of a constant-curvature model: dimension, index and curvature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceFormSpec {
    pub dim: usize,
    pub index: usize,
    pub curvature: f64,
}

impl SpaceFormSpec {
    pub fn new(dim: usize, index: usize, curvature: f64) -> Self {
        Self { dim, index, curvature }
    }
}

/// A metric `g_ij(x)` on an open chart domain.
#[derive(Clone)]
pub struct ChartedMetric {
    dim: usize,
    index: usize,
    metric: MetricFn,
    deriv1: Option<Deriv1Fn>,
    deriv2: Option<Deriv2Fn>,
    domain: DomainFn,
    locally_symmetric: bool,
    space_form: Option<SpaceFormSpec>,
}

impl fmt::Debug for ChartedMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartedMetric")
            .field("dim", &self.dim)
            .field("index", &self.index)
            .field("analytic_derivatives", &!self.uses_finite_differences())
            .field("locally_symmetric", &self.locally_symmetric)
            .field("space_form", &self.space_form)
            .finish()
    }
}

impl ChartedMetric {
    /// A chart with no analytic derivatives and an unrestricted domain.
    pub fn new(dim: usize, index: usize, metric: MetricFn) -> Self {
        assert!(dim >= 1 && index <= dim, "invalid dimension/index pair");
        Self {
            dim,
            index,
            metric,
            deriv1: None,
            deriv2: None,
            domain: Arc::new(|_| true),
            locally_symmetric: false,
            space_form: None,
        }
    }

    /// Constant pseudo-Euclidean metric with the first `index` directions timelike.
    pub fn flat(dim: usize, index: usize) -> Self {
        space_form_chart(SpaceFormSpec::new(dim, index, 0.0))
    }

    pub fn with_derivatives(mut self, deriv1: Deriv1Fn, deriv2: Deriv2Fn) -> Self {
        self.deriv1 = Some(deriv1);
        self.deriv2 = Some(deriv2);
        self
    }

    pub fn with_domain(mut self, domain: DomainFn) -> Self {
        self.domain = domain;
        self
    }

    /// Marks the chart as having `∇R = 0`, so curvature derivatives are skipped.
    pub fn with_locally_symmetric(mut self, flag: bool) -> Self {
        self.locally_symmetric = flag;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_locally_symmetric(&self) -> bool {
        self.locally_symmetric
    }

    /// The model parameters when this chart came from [`space_form_chart`].
    pub fn space_form(&self) -> Option<SpaceFormSpec> {
        self.space_form
    }

    pub fn uses_finite_differences(&self) -> bool {
        self.deriv1.is_none() || self.deriv2.is_none()
    }

    pub fn in_domain(&self, x: &DVector<f64>) -> bool {
        x.len() == self.dim && x.iter().all(|v| v.is_finite()) && (self.domain)(x)
    }

    fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(GeometryError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if !self.in_domain(x) {
            return Err(GeometryError::OutOfDomain(x.iter().copied().collect()));
        }
        Ok(())
    }

    /// Raw metric components, no domain check.
    pub fn raw_metric(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.metric)(x)
    }

    /// The raw metric closure, for consumers that differentiate it themselves.
    pub fn metric_fn(&self) -> MetricFn {
        Arc::clone(&self.metric)
    }

    pub fn metric_at(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        Ok((self.metric)(x))
    }

    fn inverse_metric(&self, x: &DVector<f64>, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let scale = g.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        let det = g.determinant();
        if !det.is_finite() || det.abs() <= 1e-14 * scale.powi(self.dim as i32) {
            return Err(GeometryError::DegenerateMetric(x.iter().copied().collect()));
        }
        g.clone()
            .try_inverse()
            .ok_or_else(|| GeometryError::DegenerateMetric(x.iter().copied().collect()))
    }

    /// `∂_k g_ij` for every `k`, analytic when available.
    pub fn metric_derivs(&self, x: &DVector<f64>) -> Result<Vec<DMatrix<f64>>> {
        self.check_point(x)?;
        if let Some(d1) = &self.deriv1 {
            return Ok(d1(x));
        }
        let h = FIRST_DIFF_STEP;
        Ok((0..self.dim)
            .map(|k| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                ((self.metric)(&xp) - (self.metric)(&xm)) / (2.0 * h)
            })
            .collect())
    }

    /// `∂_k ∂_l g_ij` stored at `k * n + l`, analytic when available.
    pub fn metric_second_derivs(&self, x: &DVector<f64>) -> Result<Vec<DMatrix<f64>>> {
        self.check_point(x)?;
        if let Some(d2) = &self.deriv2 {
            return Ok(d2(x));
        }
        let h = SECOND_DIFF_STEP;
        let n = self.dim;
        let eval = |dk: f64, k: usize, dl: f64, l: usize| {
            let mut y = x.clone();
            y[k] += dk;
            y[l] += dl;
            (self.metric)(&y)
        };
        let mut out = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                let d = (eval(h, k, h, l) - eval(h, k, -h, l) - eval(-h, k, h, l)
                    + eval(-h, k, -h, l))
                    / (4.0 * h * h);
                out.push(d);
            }
        }
        Ok(out)
    }

    pub fn christoffel_at(&self, x: &DVector<f64>) -> Result<Christoffel> {
        let g = self.metric_at(x)?;
        let ginv = self.inverse_metric(x, &g)?;
        let dg = self.metric_derivs(x)?;
        Ok(christoffel_from_jet(&ginv, &dg))
    }

    /// `R^i_jkl` from `Γ` and its analytic (or finite-difference) derivatives.
    pub fn riemann_at(&self, x: &DVector<f64>) -> Result<RiemannTensor> {
        let n = self.dim;
        let g = self.metric_at(x)?;
        let ginv = self.inverse_metric(x, &g)?;
        let dg = self.metric_derivs(x)?;
        let ddg = self.metric_second_derivs(x)?;
        let gamma = christoffel_from_jet(&ginv, &dg);

        // dgamma[m] holds ∂_m Γ.
        let dginv: Vec<DMatrix<f64>> = dg.iter().map(|d| -(&ginv * d * &ginv)).collect();
        let mut dgamma = vec![Christoffel::zeros(n); n];
        for (m, dgm) in dgamma.iter_mut().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    for k in j..n {
                        let mut acc = 0.0;
                        for l in 0..n {
                            let s = dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)];
                            let ds = ddg[m * n + j][(l, k)] + ddg[m * n + k][(l, j)]
                                - ddg[m * n + l][(j, k)];
                            acc += dginv[m][(i, l)] * s + ginv[(i, l)] * ds;
                        }
                        dgm.set_symmetric(i, j, k, 0.5 * acc);
                    }
                }
            }
        }

        let mut r = RiemannTensor::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut v = dgamma[k].get(i, l, j) - dgamma[l].get(i, k, j);
                        for p in 0..n {
                            v += gamma.get(i, k, p) * gamma.get(p, l, j)
                                - gamma.get(i, l, p) * gamma.get(p, k, j);
                        }
                        r.set(i, j, k, l, v);
                    }
                }
            }
        }
        Ok(r)
    }

    /// `(∇_m R)^i_jkl` for all `m`: central differences of [`Self::riemann_at`]
    /// plus the connection correction on every slot. Zero for charts tagged
    /// locally symmetric.
    pub fn nabla_riemann_at(&self, x: &DVector<f64>) -> Result<NablaRiemann> {
        let n = self.dim;
        self.check_point(x)?;
        if self.locally_symmetric {
            return Ok(NablaRiemann::zeros(n));
        }
        let gamma = self.christoffel_at(x)?;
        let r = self.riemann_at(x)?;
        let h = if self.uses_finite_differences() { 1e-3 } else { 1e-4 };
        let mut slices = Vec::with_capacity(n);
        for m in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[m] += h;
            xm[m] -= h;
            let rp = self.riemann_at(&xp)?;
            let rm = self.riemann_at(&xm)?;
            let mut s = RiemannTensor::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let mut v = (rp.get(i, j, k, l) - rm.get(i, j, k, l)) / (2.0 * h);
                            for p in 0..n {
                                v += gamma.get(i, m, p) * r.get(p, j, k, l)
                                    - gamma.get(p, m, j) * r.get(i, p, k, l)
                                    - gamma.get(p, m, k) * r.get(i, j, p, l)
                                    - gamma.get(p, m, l) * r.get(i, j, k, p);
                            }
                            s.set(i, j, k, l, v);
                        }
                    }
                }
            }
            slices.push(s);
        }
        Ok(NablaRiemann::from_slices(slices))
    }

    /// `K(X,Y) = g(R(X,Y)Y, X) / (g(X,X) g(Y,Y) - g(X,Y)^2)`.
    pub fn sectional_curvature(&self, x_vec: &TangentVec, y_vec: &TangentVec) -> Result<f64> {
        if x_vec.base != y_vec.base {
            return Err(GeometryError::BasePointMismatch);
        }
        let x = &x_vec.base;
        let g = self.metric_at(x)?;
        let r = self.riemann_at(x)?;
        sectional_from(&g, &r, &x_vec.comps, &y_vec.comps)
    }

    /// `(positive, negative)` eigenvalue counts of `g` at `x`.
    pub fn signature_at(&self, x: &DVector<f64>) -> Result<(usize, usize)> {
        let g = self.metric_at(x)?;
        signature_of(&g).ok_or_else(|| GeometryError::DegenerateMetric(x.iter().copied().collect()))
    }
}

/// Sectional curvature from precomputed metric and curvature components.
pub fn sectional_from(
    g: &DMatrix<f64>,
    r: &RiemannTensor,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let gxx = x.dot(&(g * x));
    let gyy = y.dot(&(g * y));
    let gxy = x.dot(&(g * y));
    let denom = gxx * gyy - gxy * gxy;
    if denom.abs() <= PLANE_DEGENERACY {
        return Err(GeometryError::DegeneratePlane(denom));
    }
    let num = r.apply(x, y, y).dot(&(g * x));
    Ok(num / denom)
}

/// Counts positive and negative eigenvalues of a symmetric matrix, or `None`
/// if it is numerically singular.
pub fn signature_of(g: &DMatrix<f64>) -> Option<(usize, usize)> {
    let eig = SymmetricEigen::new(g.clone());
    let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * scale.max(1e-300);
    let mut pos = 0;
    let mut neg = 0;
    for &v in eig.eigenvalues.iter() {
        if v.abs() <= floor {
            return None;
        }
        if v > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    Some((pos, neg))
}

/// `Γ^i_jk = ½ g^il (∂_j g_lk + ∂_k g_lj - ∂_l g_jk)`.
fn christoffel_from_jet(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let n = ginv.nrows();
    let mut gamma = Christoffel::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in j..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += ginv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                }
                gamma.set_symmetric(i, j, k, 0.5 * acc);
            }
        }
    }
    gamma
}

/// Signs `ε_k` of the model: `-1` for the first `index` coordinates.
pub fn coordinate_signs(dim: usize, index: usize) -> Vec<f64> {
    (0..dim).map(|k| if k < index { -1.0 } else { 1.0 }).collect()
}

/// Conformal model of the space form with curvature `c`:
/// `g_ij = ε_i δ_ij / F(x)^2` with `F(x) = 1 + (c/4) Σ ε_k (x^k)^2`,
/// restricted to `F > 0.05`. Analytic first and second derivatives are attached.
pub fn space_form_chart(spec: SpaceFormSpec) -> ChartedMetric {
    let SpaceFormSpec { dim: n, index, curvature: c } = spec;
    let signs = Arc::new(coordinate_signs(n, index));

    let conformal = {
        let signs = Arc::clone(&signs);
        move |x: &DVector<f64>| {
            let s: f64 = (0..n).map(|k| signs[k] * x[k] * x[k]).sum();
            1.0 + 0.25 * c * s
        }
    };
    let grad = {
        let signs = Arc::clone(&signs);
        move |x: &DVector<f64>| DVector::from_fn(n, |k, _| 0.5 * c * signs[k] * x[k])
    };

    let metric: MetricFn = {
        let signs = Arc::clone(&signs);
        let conformal = conformal.clone();
        Arc::new(move |x: &DVector<f64>| {
            let f = conformal(x);
            DMatrix::from_fn(n, n, |i, j| if i == j { signs[i] / (f * f) } else { 0.0 })
        })
    };
    let deriv1: Deriv1Fn = {
        let signs = Arc::clone(&signs);
        let conformal = conformal.clone();
        let grad = grad.clone();
        Arc::new(move |x: &DVector<f64>| {
            let f = conformal(x);
            let df = grad(x);
            (0..n)
                .map(|k| {
                    DMatrix::from_fn(n, n, |i, j| {
                        if i == j {
                            -2.0 * signs[i] * df[k] / (f * f * f)
                        } else {
                            0.0
                        }
                    })
                })
                .collect()
        })
    };
    let deriv2: Deriv2Fn = {
        let signs = Arc::clone(&signs);
        let conformal = conformal.clone();
        Arc::new(move |x: &DVector<f64>| {
            let f = conformal(x);
            let df = grad(x);
            let mut out = Vec::with_capacity(n * n);
            for k in 0..n {
                for l in 0..n {
                    let ddf = if k == l { 0.5 * c * signs[k] } else { 0.0 };
                    let common = 6.0 * df[k] * df[l] / f.powi(4) - 2.0 * ddf / f.powi(3);
                    out.push(DMatrix::from_fn(n, n, |i, j| {
                        if i == j {
                            signs[i] * common
                        } else {
                            0.0
                        }
                    }));
                }
            }
            out
        })
    };
    let domain: DomainFn = Arc::new(move |x: &DVector<f64>| conformal(x) > SPACE_FORM_DOMAIN_CUTOFF);

    let mut chart = ChartedMetric::new(n, index, metric)
        .with_derivatives(deriv1, deriv2)
        .with_domain(domain)
        .with_locally_symmetric(true);
    chart.space_form = Some(spec);
    chart
}

/// Metric with quadratic components
/// `g(x) = A + Σ_k B_k x^k + ½ Σ_kl C_kl x^k x^l`
/// and exact derivatives. `linear[k] = B_k`, `quadratic[k*n+l] = C_kl`
/// (with `C_kl = C_lk`). The domain is where `g` keeps the index of `A`.
pub fn quadratic_chart(
    constant: DMatrix<f64>,
    linear: Vec<DMatrix<f64>>,
    quadratic: Vec<DMatrix<f64>>,
) -> ChartedMetric {
    let n = constant.nrows();
    assert_eq!(linear.len(), n);
    assert_eq!(quadratic.len(), n * n);
    let (_, index) = signature_of(&constant).expect("constant part must be nondegenerate");
    let a = Arc::new(constant);
    let b = Arc::new(linear);
    let q = Arc::new(quadratic);

    let metric: MetricFn = {
        let (a, b, q) = (Arc::clone(&a), Arc::clone(&b), Arc::clone(&q));
        Arc::new(move |x: &DVector<f64>| {
            let mut g = (*a).clone();
            for k in 0..n {
                g += &b[k] * x[k];
                for l in 0..n {
                    g += &q[k * n + l] * (0.5 * x[k] * x[l]);
                }
            }
            g
        })
    };
    let deriv1: Deriv1Fn = {
        let (b, q) = (Arc::clone(&b), Arc::clone(&q));
        Arc::new(move |x: &DVector<f64>| {
            (0..n)
                .map(|k| {
                    let mut d = b[k].clone();
                    for l in 0..n {
                        d += &q[k * n + l] * x[l];
                    }
                    d
                })
                .collect()
        })
    };
    let deriv2: Deriv2Fn = {
        let q = Arc::clone(&q);
        Arc::new(move |_x: &DVector<f64>| (*q).clone())
    };
    let domain: DomainFn = {
        let metric = Arc::clone(&metric);
        Arc::new(move |x: &DVector<f64>| {
            matches!(signature_of(&metric(x)), Some((_, neg)) if neg == index)
        })
    };
    ChartedMetric::new(n, index, metric)
        .with_derivatives(deriv1, deriv2)
        .with_domain(domain)
}

/// Everything the bundle formulas need at one base point, evaluated once.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub chart: ChartedMetric,
    pub x: DVector<f64>,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    pub gamma: Christoffel,
    pub riemann: RiemannTensor,
    pub nabla_riemann: NablaRiemann,
}

impl LocalGeometry {
    pub fn new(chart: &ChartedMetric, x: &DVector<f64>) -> Result<Self> {
        let g = chart.metric_at(x)?;
        let ginv = chart.inverse_metric(x, &g)?;
        Ok(Self {
            chart: chart.clone(),
            x: x.clone(),
            gamma: chart.christoffel_at(x)?,
            riemann: chart.riemann_at(x)?,
            nabla_riemann: chart.nabla_riemann_at(x)?,
            g,
            ginv,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// `g(a, b)` at the base point.
    #[inline]
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.g * b))
    }

    /// `R(x, y) z`.
    #[inline]
    pub fn curvature(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.riemann.apply(x, y, z)
    }

    /// `(∇_w R)(x, y) z`.
    pub fn nabla_curvature(
        &self,
        w: &DVector<f64>,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
    ) -> DVector<f64> {
        if self.chart.is_locally_symmetric() {
            return DVector::zeros(self.dim());
        }
        self.nabla_riemann.along(w).apply(x, y, z)
    }

    /// Residual of `∇g = 0`: `∂_k g_ij - Γ^l_ki g_lj - Γ^l_kj g_il`.
    pub fn metric_compatibility_residual(&self) -> Result<f64> {
        let n = self.dim();
        let dg = self.chart.metric_derivs(&self.x)?;
        let mut worst: f64 = 0.0;
        for (k, dgk) in dg.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let mut v = dgk[(i, j)];
                    for l in 0..n {
                        v -= self.gamma.get(l, k, i) * self.g[(l, j)]
                            + self.gamma.get(l, k, j) * self.g[(i, l)];
                    }
                    worst = worst.max(v.abs());
                }
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn flat_metric_is_constant() {
        let m = ChartedMetric::flat(2, 0);
        assert_eq!(m.metric_at(&v(&[0.3, 0.7])).unwrap(), DMatrix::identity(2, 2));
        assert!(m.christoffel_at(&v(&[0.3, 0.7])).unwrap().max_abs() == 0.0);
        assert!(m.riemann_at(&v(&[0.3, 0.7])).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn space_form_values_at_reference_points() {
        let lorentz = space_form_chart(SpaceFormSpec::new(2, 1, 1.0));
        let g0 = lorentz.metric_at(&v(&[0.0, 0.0])).unwrap();
        assert_eq!(g0, DMatrix::from_diagonal(&v(&[-1.0, 1.0])));

        // F = 1 + 0.25 * 0.04 = 1.01, g_11 = 1 / 1.0201
        let sphere = space_form_chart(SpaceFormSpec::new(2, 0, 1.0));
        let g = sphere.metric_at(&v(&[0.2, 0.0])).unwrap();
        assert!((g[(0, 0)] - 0.980_296_049_406_920_9).abs() < 1e-15);
        assert_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn space_form_christoffel_vanishes_at_origin() {
        for (n, nu, c) in [(2, 0, 1.0), (3, 1, -1.0), (3, 2, 2.5)] {
            let m = space_form_chart(SpaceFormSpec::new(n, nu, c));
            assert_eq!(m.christoffel_at(&DVector::zeros(n)).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn domain_cutoff_is_enforced() {
        let m = space_form_chart(SpaceFormSpec::new(2, 0, -4.0));
        // F = 1 - |x|^2 vanishes on the unit circle.
        let err = m.metric_at(&v(&[0.99, 0.0])).unwrap_err();
        assert!(matches!(err, GeometryError::OutOfDomain(_)));
        assert!(m.metric_at(&v(&[0.5, 0.0])).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let m = ChartedMetric::flat(3, 0);
        assert!(matches!(
            m.metric_at(&v(&[0.0, 0.0])),
            Err(GeometryError::DimensionMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn degenerate_plane_is_rejected() {
        let m = ChartedMetric::flat(2, 0);
        let x = v(&[0.1, 0.1]);
        let a = TangentVec::new(x.clone(), v(&[1.0, 2.0]));
        let b = TangentVec::new(x.clone(), v(&[2.0, 4.0]));
        assert!(matches!(m.sectional_curvature(&a, &b), Err(GeometryError::DegeneratePlane(_))));
        let c = TangentVec::new(v(&[0.0, 0.1]), v(&[0.0, 1.0]));
        assert_eq!(m.sectional_curvature(&a, &c), Err(GeometryError::BasePointMismatch));
    }

    #[test]
    fn null_plane_in_lorentzian_plane_is_degenerate() {
        let m = ChartedMetric::flat(2, 1);
        let x = v(&[0.0, 0.0]);
        let a = TangentVec::new(x.clone(), v(&[1.0, 1.0]));
        let b = TangentVec::new(x.clone(), v(&[1.0, 0.0]));
        // g(a,a) = 0, g(a,b) = -1: Gram determinant -1, nondegenerate.
        assert!(m.sectional_curvature(&a, &b).is_ok());
    }

    #[test]
    fn signature_of_space_forms() {
        assert_eq!(ChartedMetric::flat(3, 0).signature_at(&DVector::zeros(3)).unwrap(), (3, 0));
        let m = space_form_chart(SpaceFormSpec::new(3, 1, 0.7));
        assert_eq!(m.signature_at(&v(&[0.2, -0.1, 0.3])).unwrap(), (2, 1));
    }

    #[test]
    fn degenerate_metric_is_reported() {
        let m = ChartedMetric::new(
            2,
            0,
            Arc::new(|x: &DVector<f64>| DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, x[0]]))),
        );
        assert!(matches!(
            m.christoffel_at(&v(&[0.0, 0.0])),
            Err(GeometryError::DegenerateMetric(_))
        ));
        assert!(m.signature_at(&v(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn finite_difference_mode_is_flagged_and_close() {
        let exact = space_form_chart(SpaceFormSpec::new(2, 0, 1.0));
        let fd = ChartedMetric::new(2, 0, exact.metric_fn());
        assert!(fd.uses_finite_differences());
        assert!(!exact.uses_finite_differences());
        let x = v(&[0.2, 0.1]);
        let d = exact.christoffel_at(&x).unwrap().max_abs_diff(&fd.christoffel_at(&x).unwrap());
        assert!(d < 1e-9, "{d}");
        let d = exact.riemann_at(&x).unwrap().max_abs_diff(&fd.riemann_at(&x).unwrap());
        assert!(d < 1e-5, "{d}");
    }
}
