//! Finite-difference ground truth built from raw metric components only.
//!
//! Nothing here reads Christoffel symbols or curvature from the analytic
//! path of [`crate::manifold`]; the only shared ingredient is the metric
//! function of the chart. Coordinates on `TM` are the natural `(x, u)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::manifold::ChartedMetric;
use crate::sphere_bundle::{SBPoint, SBVec};
use crate::tangent_bundle::{from_induced_coords, to_induced_coords, TMPoint, TMVec, VectorFieldOnM};
use crate::tensor::{Christoffel, RiemannTensor};

/// Default first-derivative step.
pub const FD_STEP: f64 = 1e-5;

/// Steps for the nested differences in the ambient `TM` oracles: one
/// level for the base Christoffel symbols, one for the Christoffel symbols
/// of `Tg` and one more for its curvature.
///
/// With `extrapolate` set, results from `h` and `h/2` are combined as
/// `(4 f(h/2) - f(h)) / 3`, which cancels the common `h²` error term of
/// the whole stack.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedSteps {
    pub base: f64,
    pub ambient: f64,
    pub curvature: f64,
    pub extrapolate: bool,
}

impl Default for NestedSteps {
    fn default() -> Self {
        Self { base: 3e-3, ambient: 3e-3, curvature: 3e-3, extrapolate: true }
    }
}

impl NestedSteps {
    /// Plain central differences with one step everywhere.
    pub fn plain(step: f64) -> Self {
        Self { base: step, ambient: step, curvature: step, extrapolate: false }
    }

    pub fn halved(&self) -> Self {
        Self {
            base: self.base / 2.0,
            ambient: self.ambient / 2.0,
            curvature: self.curvature / 2.0,
            extrapolate: false,
        }
    }

    fn run<F>(&self, f: F) -> Result<SBVec>
    where
        F: Fn(NestedSteps) -> Result<SBVec>,
    {
        let coarse = f(Self { extrapolate: false, ..*self })?;
        if !self.extrapolate {
            return Ok(coarse);
        }
        let fine = f(self.halved())?;
        Ok(fine * (4.0 / 3.0) - coarse * (1.0 / 3.0))
    }
}

fn bump(x: &DVector<f64>, k: usize, h: f64) -> DVector<f64> {
    let mut y = x.clone();
    y[k] += h;
    y
}

fn inverse(g: &DMatrix<f64>, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    g.clone().try_inverse().ok_or_else(|| GeometryError::DegenerateMetric(x.iter().copied().collect()))
}

/// Koszul formula with central differences of the metric.
pub fn fd_christoffel(metric: &dyn Fn(&DVector<f64>) -> DMatrix<f64>, x: &DVector<f64>, step: f64) -> Result<Christoffel> {
    fd_christoffel_with_steps(metric, x, &vec![step; x.len()])
}

/// [`fd_christoffel`] with one step per coordinate direction.
pub fn fd_christoffel_with_steps(
    metric: &dyn Fn(&DVector<f64>) -> DMatrix<f64>,
    x: &DVector<f64>,
    steps: &[f64],
) -> Result<Christoffel> {
    let n = x.len();
    let g = metric(x);
    let ginv = inverse(&g, x)?;
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|k| (metric(&bump(x, k, steps[k])) - metric(&bump(x, k, -steps[k]))) / (2.0 * steps[k]))
        .collect();
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
    Ok(gamma)
}

/// Curvature from central differences of a Christoffel field:
/// `R^i_jkl = ∂_k Γ^i_lj - ∂_l Γ^i_kj + Γ^i_kp Γ^p_lj - Γ^i_lp Γ^p_kj`.
pub fn fd_riemann(
    christoffel: &dyn Fn(&DVector<f64>) -> Result<Christoffel>,
    x: &DVector<f64>,
    step: f64,
) -> Result<RiemannTensor> {
    let n = x.len();
    let gamma = christoffel(x)?;
    let mut dgamma = Vec::with_capacity(n);
    for k in 0..n {
        let plus = christoffel(&bump(x, k, step))?;
        let minus = christoffel(&bump(x, k, -step))?;
        dgamma.push((plus, minus));
    }
    let d = |k: usize, i: usize, j: usize, l: usize| {
        (dgamma[k].0.get(i, j, l) - dgamma[k].1.get(i, j, l)) / (2.0 * step)
    };
    let mut r = RiemannTensor::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let mut v = d(k, i, l, j) - d(l, i, k, j);
                    for p in 0..n {
                        v += gamma.get(i, k, p) * gamma.get(p, l, j) - gamma.get(i, l, p) * gamma.get(p, k, j);
                    }
                    r.set(i, j, k, l, v);
                }
            }
        }
    }
    Ok(r)
}

/// The Sasaki metric of `TM` in `(x, u)` coordinates, with Christoffel
/// symbols of the base taken by finite differences.
pub fn fd_sasaki_metric(m: &ChartedMetric, xu: &DVector<f64>, base_step: f64) -> Result<DMatrix<f64>> {
    let n = xu.len() / 2;
    let x = xu.rows(0, n).into_owned();
    let u = xu.rows(n, n).into_owned();
    let metric = m.metric_fn();
    let g = metric(&x);
    let a = fd_christoffel(&*metric, &x, base_step)?.along(&u);
    let ga = &g * &a;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&(&g + a.transpose() * &ga));
    out.view_mut((0, n), (n, n)).copy_from(&ga.transpose());
    out.view_mut((n, 0), (n, n)).copy_from(&ga);
    out.view_mut((n, n), (n, n)).copy_from(&g);
    Ok(out)
}

/// Levi-Civita connection and curvature of `(TM, Tg)` at one point, all by
/// nested finite differences.
#[derive(Debug, Clone)]
pub struct AmbientGeometry {
    pub xu: DVector<f64>,
    pub metric: DMatrix<f64>,
    pub gamma: Christoffel,
    pub base_gamma: Christoffel,
    pub steps: NestedSteps,
}

impl AmbientGeometry {
    pub fn new(m: &ChartedMetric, x: &DVector<f64>, u: &DVector<f64>, steps: NestedSteps) -> Result<Self> {
        let xu = concat(x, u);
        let metric = fd_sasaki_metric(m, &xu, steps.base)?;
        let gamma = ambient_christoffel(m, &xu, steps)?;
        let base_gamma = fd_christoffel(&*m.metric_fn(), x, steps.base)?;
        Ok(Self { xu, metric, gamma, base_gamma, steps })
    }

    pub fn dim(&self) -> usize {
        self.xu.len() / 2
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.metric * b))
    }

    pub fn tm_point(&self) -> TMPoint {
        let n = self.dim();
        TMPoint::new(self.xu.rows(0, n).into_owned(), self.xu.rows(n, n).into_owned())
    }

    /// `(x, u)`-coordinates of a lift pair.
    pub fn coords_of(&self, v: &TMVec) -> DVector<f64> {
        to_induced_coords(&self.base_gamma, &self.tm_point(), v)
    }

    /// Lift pair of a coordinate vector.
    pub fn lifts_of(&self, w: &DVector<f64>) -> TMVec {
        from_induced_coords(&self.base_gamma, &self.tm_point(), w)
    }

    /// `Tg`-curvature by differencing the ambient Christoffel symbols.
    pub fn riemann(&self, m: &ChartedMetric) -> Result<RiemannTensor> {
        let steps = self.steps;
        fd_riemann(&|xu: &DVector<f64>| ambient_christoffel(m, xu, steps), &self.xu, steps.curvature)
    }
}

fn concat(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Christoffel symbols of `Tg` in `(x, u)` coordinates.
pub fn ambient_christoffel(m: &ChartedMetric, xu: &DVector<f64>, steps: NestedSteps) -> Result<Christoffel> {
    let metric = |p: &DVector<f64>| fd_sasaki_metric(m, p, steps.base).unwrap_or_else(|_| DMatrix::zeros(p.len(), p.len()));
    fd_christoffel(&metric, xu, steps.ambient)
}

/// Second fundamental form of `T_εM ⊂ TM` with respect to `N = u^v`:
/// `II(A,B) = ε Tg(S A, B)` where `S A = -∇̃_A N`.
#[derive(Debug, Clone)]
pub struct SecondFundamentalForm {
    pub eps: f64,
    pub normal: DVector<f64>,
    pub shape: DMatrix<f64>,
    metric: DMatrix<f64>,
}

impl SecondFundamentalForm {
    pub fn new(amb: &AmbientGeometry, eps: f64) -> Self {
        let n = amb.dim();
        let normal = concat(&DVector::zeros(n), &amb.xu.rows(n, n).into_owned());
        // ∇̃_A N = A^v-part + Γ̃(A, N): the fiber coordinates of N are u itself.
        let two_n = 2 * n;
        let mut nabla_n = DMatrix::zeros(two_n, two_n);
        for a in 0..two_n {
            let e = DVector::from_fn(two_n, |i, _| if i == a { 1.0 } else { 0.0 });
            let mut col = amb.gamma.contract(&e, &normal);
            if a >= n {
                col[a] += 1.0;
            }
            nabla_n.set_column(a, &col);
        }
        Self { eps, normal, shape: -nabla_n, metric: amb.metric.clone() }
    }

    pub fn shape_operator(&self, a: &DVector<f64>) -> DVector<f64> {
        &self.shape * a
    }

    pub fn value(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.eps * self.shape_operator(a).dot(&(&self.metric * b))
    }

    /// `v - ε Tg(v, N) N`.
    pub fn tangential(&self, v: &DVector<f64>) -> DVector<f64> {
        let c = self.eps * v.dot(&(&self.metric * &self.normal));
        v - &self.normal * c
    }
}

fn sb_to_coords(amb: &AmbientGeometry, v: &SBVec) -> DVector<f64> {
    amb.coords_of(&v.to_tm())
}

fn coords_to_sb(amb: &AmbientGeometry, g: &DMatrix<f64>, u: &DVector<f64>, eps: f64, w: &DVector<f64>) -> SBVec {
    let lifts = amb.lifts_of(w);
    let t = &lifts.v - u * (eps * lifts.v.dot(&(g * u)));
    SBVec { h: lifts.h, t }
}

/// Curvature of `T_εM` from the Gauss equation
/// `R̄(A,B)C = tan R̃(A,B)C + II(B,C) SA - II(A,C) SB`.
pub fn gauss_curvature_oracle(
    m: &ChartedMetric,
    p: &SBPoint,
    a: &SBVec,
    b: &SBVec,
    c: &SBVec,
    steps: NestedSteps,
) -> Result<SBVec> {
    GaussOracle::new(m, p, steps)?.curvature(a, b, c)
}

/// Ambient data for repeated Gauss-equation evaluations at one point.
#[derive(Debug, Clone)]
pub struct GaussOracle {
    p: SBPoint,
    levels: Vec<(AmbientGeometry, RiemannTensor, f64)>,
}

impl GaussOracle {
    pub fn new(m: &ChartedMetric, p: &SBPoint, steps: NestedSteps) -> Result<Self> {
        let level = |s: NestedSteps, w: f64| -> Result<(AmbientGeometry, RiemannTensor, f64)> {
            let amb = AmbientGeometry::new(m, &p.x, &p.u, s)?;
            let riemann = amb.riemann(m)?;
            Ok((amb, riemann, w))
        };
        let levels = if steps.extrapolate {
            vec![level(NestedSteps { extrapolate: false, ..steps }, -1.0 / 3.0)?, level(steps.halved(), 4.0 / 3.0)?]
        } else {
            vec![level(steps, 1.0)?]
        };
        Ok(Self { p: p.clone(), levels })
    }

    pub fn curvature(&self, a: &SBVec, b: &SBVec, c: &SBVec) -> Result<SBVec> {
        let mut out = SBVec::zeros(self.p.dim());
        for (amb, riemann, w) in &self.levels {
            out = out + gauss_with(amb, riemann, &self.p, a, b, c)? * *w;
        }
        Ok(out)
    }

    /// `II(a,b) - II(b,a)`.
    pub fn second_fundamental_form_asymmetry(&self, a: &SBVec, b: &SBVec) -> f64 {
        self.levels
            .iter()
            .map(|(amb, _, w)| {
                let ii = SecondFundamentalForm::new(amb, self.p.eps);
                let (ca, cb) = (sb_to_coords(amb, a), sb_to_coords(amb, b));
                w * (ii.value(&ca, &cb) - ii.value(&cb, &ca))
            })
            .sum()
    }
}

/// [`gauss_curvature_oracle`] with a precomputed ambient curvature.
pub fn gauss_with(
    amb: &AmbientGeometry,
    riemann: &RiemannTensor,
    p: &SBPoint,
    a: &SBVec,
    b: &SBVec,
    c: &SBVec,
) -> Result<SBVec> {
    let ii = SecondFundamentalForm::new(amb, p.eps);
    let (ca, cb, cc) = (sb_to_coords(amb, a), sb_to_coords(amb, b), sb_to_coords(amb, c));
    let ambient = riemann.apply(&ca, &cb, &cc);
    let out = ii.tangential(&ambient) + ii.shape_operator(&ca) * ii.value(&cb, &cc)
        - ii.shape_operator(&cb) * ii.value(&ca, &cc);
    let g = m_at(amb);
    Ok(coords_to_sb(amb, &g, &p.u, p.eps, &out))
}

fn m_at(amb: &AmbientGeometry) -> DMatrix<f64> {
    let n = amb.dim();
    amb.metric.view((n, n), (n, n)).into_owned()
}

/// Lift of a base field as a field on `TM` in `(x, u)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldLift {
    Horizontal,
    Vertical,
    /// `Y^v - ε g(Y,u) u^v`.
    Tangential,
}

/// `(x, u)`-components of a lifted field at `xu`.
pub fn lifted_field_coords(
    m: &ChartedMetric,
    field: &VectorFieldOnM,
    kind: FieldLift,
    eps: f64,
    xu: &DVector<f64>,
    base_step: f64,
) -> Result<DVector<f64>> {
    let n = xu.len() / 2;
    let x = xu.rows(0, n).into_owned();
    let u = xu.rows(n, n).into_owned();
    let y = field.eval(&x);
    Ok(match kind {
        FieldLift::Horizontal => {
            let gamma = fd_christoffel(&*m.metric_fn(), &x, base_step)?;
            concat(&y, &-gamma.contract(&y, &u))
        }
        FieldLift::Vertical => concat(&DVector::zeros(n), &y),
        FieldLift::Tangential => {
            let g = m.raw_metric(&x);
            concat(&DVector::zeros(n), &(&y - &u * (eps * y.dot(&(&g * &u)))))
        }
    })
}

/// `∇̄_A B = tan(∇̃_A B)` with `∇̃` from the Koszul formula for `Tg`.
pub fn koszul_sb_nabla(
    m: &ChartedMetric,
    p: &SBPoint,
    a: &SBVec,
    field: &VectorFieldOnM,
    kind: FieldLift,
    steps: NestedSteps,
) -> Result<SBVec> {
    steps.run(|s| koszul_sb_nabla_plain(m, p, a, field, kind, s))
}

fn koszul_sb_nabla_plain(
    m: &ChartedMetric,
    p: &SBPoint,
    a: &SBVec,
    field: &VectorFieldOnM,
    kind: FieldLift,
    steps: NestedSteps,
) -> Result<SBVec> {
    let amb = AmbientGeometry::new(m, &p.x, &p.u, steps)?;
    let nabla = koszul_nabla_coords(m, &amb, &sb_to_coords(&amb, a), field, kind, p.eps)?;
    let ii = SecondFundamentalForm::new(&amb, p.eps);
    Ok(coords_to_sb(&amb, &m_at(&amb), &p.u, p.eps, &ii.tangential(&nabla)))
}

fn koszul_nabla_coords(
    m: &ChartedMetric,
    amb: &AmbientGeometry,
    ca: &DVector<f64>,
    field: &VectorFieldOnM,
    kind: FieldLift,
    eps: f64,
) -> Result<DVector<f64>> {
    let steps = amb.steps;
    let h = steps.ambient;
    let plus = lifted_field_coords(m, field, kind, eps, &(&amb.xu + ca * h), steps.base)?;
    let minus = lifted_field_coords(m, field, kind, eps, &(&amb.xu - ca * h), steps.base)?;
    let b = lifted_field_coords(m, field, kind, eps, &amb.xu, steps.base)?;
    Ok((plus - minus) / (2.0 * h) + amb.gamma.contract(ca, &b))
}

/// `∇̃_a Y^kind` on `TM` from the Koszul formula for `Tg`, as a lift pair.
pub fn koszul_tm_nabla(
    m: &ChartedMetric,
    at: &TMPoint,
    a: &TMVec,
    field: &VectorFieldOnM,
    kind: FieldLift,
    steps: NestedSteps,
) -> Result<TMVec> {
    let plain = |s: NestedSteps| -> Result<TMVec> {
        let amb = AmbientGeometry::new(m, &at.x, &at.u, s)?;
        let w = koszul_nabla_coords(m, &amb, &amb.coords_of(a), field, kind, 1.0)?;
        Ok(amb.lifts_of(&w))
    };
    let coarse = plain(NestedSteps { extrapolate: false, ..steps })?;
    if !steps.extrapolate {
        return Ok(coarse);
    }
    Ok(plain(steps.halved())? * (4.0 / 3.0) - coarse * (1.0 / 3.0))
}

/// `[A, B]` of two lifted fields on `TM` by central differences of their
/// `(x, u)`-components, returned as a lift pair at `at`.
#[allow(clippy::too_many_arguments)]
pub fn fd_lift_bracket(
    m: &ChartedMetric,
    at: &TMPoint,
    a: (&VectorFieldOnM, FieldLift),
    b: (&VectorFieldOnM, FieldLift),
    eps: f64,
    step: f64,
    base_step: f64,
) -> Result<TMVec> {
    let xu = concat(&at.x, &at.u);
    let nan = |len: usize| DVector::from_element(len, f64::NAN);
    let fa = |p: &DVector<f64>| lifted_field_coords(m, a.0, a.1, eps, p, base_step).unwrap_or_else(|_| nan(p.len()));
    let fb = |p: &DVector<f64>| lifted_field_coords(m, b.0, b.1, eps, p, base_step).unwrap_or_else(|_| nan(p.len()));
    let w = fd_lie_bracket(&fa, &fb, &xu, step);
    let gamma = fd_christoffel(&*m.metric_fn(), &at.x, base_step)?;
    Ok(from_induced_coords(&gamma, at, &w))
}

/// A chart of `T_εM` obtained by solving `g_x(u,u) = ε` for one fiber
/// coordinate. Chart coordinates are `(x, u)` with `u_j` removed.
#[derive(Clone)]
pub struct HypersurfaceChart {
    chart: ChartedMetric,
    pub solved_index: usize,
    pub eps: f64,
    /// Value of the eliminated coordinate at the reference point, used to
    /// pick the branch of the quadratic.
    reference: f64,
    pub origin: DVector<f64>,
}

impl std::fmt::Debug for HypersurfaceChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HypersurfaceChart")
            .field("solved_index", &self.solved_index)
            .field("eps", &self.eps)
            .field("origin", &self.origin)
            .finish()
    }
}

/// Smallest admissible `|∂_{u_j} g(u,u)|` for the eliminated coordinate.
pub const MIN_CONSTRAINT_GRADIENT: f64 = 1e-6;

impl HypersurfaceChart {
    pub fn new(m: &ChartedMetric, p: &SBPoint) -> Result<Self> {
        let n = p.dim();
        let g = m.metric_at(&p.x)?;
        let grad = &g * &p.u * 2.0;
        let (j, best) = grad
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.abs()))
            .fold((0, 0.0), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
        if best < MIN_CONSTRAINT_GRADIENT {
            return Err(GeometryError::NoSolvableCoordinate);
        }
        let origin = DVector::from_iterator(
            2 * n - 1,
            p.x.iter().copied().chain(p.u.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v)),
        );
        Ok(Self { chart: m.clone(), solved_index: j, eps: p.eps, reference: p.u[j], origin })
    }

    pub fn base_dim(&self) -> usize {
        self.origin.len().div_ceil(2)
    }

    /// Chart coordinates to `(x, u)`.
    pub fn param(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.base_dim();
        let j = self.solved_index;
        let x = y.rows(0, n).into_owned();
        let g = self.chart.raw_metric(&x);
        let mut u = DVector::zeros(n);
        let mut k2 = 0;
        for k in 0..n {
            if k != j {
                u[k] = y[n + k2];
                k2 += 1;
            }
        }
        // g_jj s² + 2 b s + (q - ε) = 0
        let a = g[(j, j)];
        let b: f64 = (0..n).filter(|k| *k != j).map(|k| g[(j, k)] * u[k]).sum();
        let q = u.dot(&(&g * &u));
        let c0 = q - self.eps;
        let s = if a.abs() < 1e-14 {
            if b.abs() < 1e-14 {
                return Err(GeometryError::NoSolvableCoordinate);
            }
            -c0 / (2.0 * b)
        } else {
            let disc = b * b - a * c0;
            if disc < 0.0 {
                return Err(GeometryError::NoSolvableCoordinate);
            }
            let r = disc.sqrt();
            let roots = [(-b - r) / a, (-b + r) / a];
            if (roots[0] - self.reference).abs() < (roots[1] - self.reference).abs() {
                roots[0]
            } else {
                roots[1]
            }
        };
        u[j] = s;
        Ok(concat(&x, &u))
    }

    /// `|g(u,u) - ε|` at a chart point.
    pub fn constraint_residual(&self, y: &DVector<f64>) -> Result<f64> {
        let xu = self.param(y)?;
        let n = self.base_dim();
        let x = xu.rows(0, n).into_owned();
        let u = xu.rows(n, n).into_owned();
        Ok((u.dot(&(self.chart.raw_metric(&x) * &u)) - self.eps).abs())
    }

    /// `∂(x,u)/∂y` by central differences, `2n × (2n-1)`.
    pub fn jacobian(&self, y: &DVector<f64>, step: f64) -> Result<DMatrix<f64>> {
        let dim = y.len();
        let mut jac = DMatrix::zeros(dim + 1, dim);
        for k in 0..dim {
            let col = (self.param(&bump(y, k, step))? - self.param(&bump(y, k, -step))?) / (2.0 * step);
            jac.set_column(k, &col);
        }
        Ok(jac)
    }

    /// Chart components of a coordinate vector tangent to the hypersurface.
    pub fn to_chart(&self, w: &DVector<f64>) -> DVector<f64> {
        let n = self.base_dim();
        let skip = n + self.solved_index;
        DVector::from_iterator(w.len() - 1, w.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, v)| *v))
    }

    /// Pullback of `Tg` to the chart.
    pub fn pullback_metric(&self, y: &DVector<f64>, step: f64) -> Result<DMatrix<f64>> {
        let xu = self.param(y)?;
        let big = fd_sasaki_metric(&self.chart, &xu, step)?;
        let jac = self.jacobian(y, step)?;
        Ok(jac.transpose() * big * jac)
    }

    /// Base point and fiber vector at a chart point.
    pub fn point(&self, y: &DVector<f64>) -> Result<(DVector<f64>, DVector<f64>)> {
        let xu = self.param(y)?;
        let n = self.base_dim();
        Ok((xu.rows(0, n).into_owned(), xu.rows(n, n).into_owned()))
    }

    /// An `SBVec` at chart point `y` expressed in chart components.
    pub fn sb_to_chart(&self, y: &DVector<f64>, v: &SBVec, base_step: f64) -> Result<DVector<f64>> {
        let (x, u) = self.point(y)?;
        let gamma = fd_christoffel(&*self.chart.metric_fn(), &x, base_step)?;
        Ok(self.to_chart(&to_induced_coords(&gamma, &TMPoint::new(x, u), &v.to_tm())))
    }

    /// Chart components at `y` to an `SBVec`.
    pub fn chart_to_sb(&self, y: &DVector<f64>, w: &DVector<f64>, base_step: f64) -> Result<SBVec> {
        let (x, u) = self.point(y)?;
        let gamma = fd_christoffel(&*self.chart.metric_fn(), &x, base_step)?;
        let jac = self.jacobian(y, base_step)?;
        let lifts = from_induced_coords(&gamma, &TMPoint::new(x.clone(), u.clone()), &(jac * w));
        let g = self.chart.raw_metric(&x);
        let t = &lifts.v - &u * (self.eps * lifts.v.dot(&(&g * &u)));
        Ok(SBVec { h: lifts.h, t })
    }

    /// A field on `T_εM` given pointwise as a map on `SBVec`s, in chart components.
    pub fn vector_field(
        &self,
        y: &DVector<f64>,
        base_step: f64,
        f: &dyn Fn(&DVector<f64>, &DVector<f64>) -> SBVec,
    ) -> Result<DVector<f64>> {
        let (x, u) = self.point(y)?;
        self.sb_to_chart(y, &f(&x, &u), base_step)
    }
}

/// Chart and the pullback metric at its origin.
pub fn hypersurface_pullback(m: &ChartedMetric, p: &SBPoint, step: f64) -> Result<(HypersurfaceChart, DMatrix<f64>)> {
    let chart = HypersurfaceChart::new(m, p)?;
    let g = chart.pullback_metric(&chart.origin, step)?;
    Ok((chart, g))
}

/// `[A,B]^i = A^j ∂_j B^i - B^j ∂_j A^i`.
pub fn fd_lie_bracket(
    a: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    b: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    y: &DVector<f64>,
    step: f64,
) -> DVector<f64> {
    let av = a(y);
    let bv = b(y);
    let db = (b(&(y + &av * step)) - b(&(y - &av * step))) / (2.0 * step);
    let da = (a(&(y + &bv * step)) - a(&(y - &bv * step))) / (2.0 * step);
    db - da
}

/// `(L_V g)_ij = V^k ∂_k g_ij + g_kj ∂_i V^k + g_ik ∂_j V^k`.
pub fn fd_lie_derivative_metric(
    v: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    metric: &dyn Fn(&DVector<f64>) -> DMatrix<f64>,
    y: &DVector<f64>,
    step: f64,
) -> DMatrix<f64> {
    let dim = y.len();
    let vv = v(y);
    let g = metric(y);
    let dg_along = (metric(&(y + &vv * step)) - metric(&(y - &vv * step))) / (2.0 * step);
    // dv[(k, i)] = ∂_i V^k
    let mut dv = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let col = (v(&bump(y, i, step)) - v(&bump(y, i, -step))) / (2.0 * step);
        dv.set_column(i, &col);
    }
    dg_along + dv.transpose() * &g + &g * dv
}

/// `(dω)_ij = ∂_i ω_j - ∂_j ω_i`.
pub fn fd_exterior_derivative(
    omega: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    y: &DVector<f64>,
    step: f64,
) -> DMatrix<f64> {
    let dim = y.len();
    // d[(i, j)] = ∂_i ω_j
    let mut d = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let row = (omega(&bump(y, i, step)) - omega(&bump(y, i, -step))) / (2.0 * step);
        d.set_row(i, &row.transpose());
    }
    &d - d.transpose()
}

/// `N_φ(X,Y) = φ²[X,Y] + [φX,φY] - φ[φX,Y] - φ[X,φY]` for the constant
/// coordinate fields `X`, `Y`.
pub fn fd_nijenhuis(
    phi: &dyn Fn(&DVector<f64>) -> DMatrix<f64>,
    y: &DVector<f64>,
    x_vec: &DVector<f64>,
    y_vec: &DVector<f64>,
    step: f64,
) -> DVector<f64> {
    let xf = |_: &DVector<f64>| x_vec.clone();
    let yf = |_: &DVector<f64>| y_vec.clone();
    let phi_x = |p: &DVector<f64>| phi(p) * x_vec;
    let phi_y = |p: &DVector<f64>| phi(p) * y_vec;
    let f = phi(y);
    let xy = fd_lie_bracket(&xf, &yf, y, step);
    &f * &f * xy + fd_lie_bracket(&phi_x, &phi_y, y, step)
        - &f * fd_lie_bracket(&phi_x, &yf, y, step)
        - &f * fd_lie_bracket(&xf, &phi_y, y, step)
}

/// The contact tensors of `T_εM` as fields on a hypersurface chart, built
/// from the raw metric and finite-difference Christoffel symbols.
pub struct ChartContactFields<'a> {
    pub chart: &'a HypersurfaceChart,
    pub base_step: f64,
}

impl<'a> ChartContactFields<'a> {
    pub fn new(chart: &'a HypersurfaceChart, base_step: f64) -> Self {
        Self { chart, base_step }
    }

    fn g(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.chart.chart.raw_metric(x)
    }

    /// `ξ = 2u^h` in chart components.
    pub fn xi(&self, y: &DVector<f64>) -> DVector<f64> {
        self.chart
            .vector_field(y, self.base_step, &|_, u| SBVec { h: u * 2.0, t: DVector::zeros(u.len()) })
            .unwrap_or_else(|_| DVector::from_element(y.len(), f64::NAN))
    }

    /// `η` as chart components `η(∂_a)`.
    pub fn eta_scaled(&self, y: &DVector<f64>, scale: f64) -> DVector<f64> {
        let eps = self.chart.eps;
        let run = || -> Result<DVector<f64>> {
            let (x, u) = self.chart.point(y)?;
            let g = self.g(&x);
            let dim = y.len();
            let mut out = DVector::zeros(dim);
            for a in 0..dim {
                let e = DVector::from_fn(dim, |i, _| if i == a { 1.0 } else { 0.0 });
                let v = self.chart.chart_to_sb(y, &e, self.base_step)?;
                out[a] = scale * eps * v.h.dot(&(&g * &u));
            }
            Ok(out)
        };
        run().unwrap_or_else(|_| DVector::from_element(y.len(), f64::NAN))
    }

    pub fn eta(&self, y: &DVector<f64>) -> DVector<f64> {
        self.eta_scaled(y, 0.5)
    }

    /// `φ` as a matrix acting on chart components.
    pub fn phi(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let eps = self.chart.eps;
        let run = || -> Result<DMatrix<f64>> {
            let (x, u) = self.chart.point(y)?;
            let g = self.g(&x);
            let dim = y.len();
            let mut out = DMatrix::zeros(dim, dim);
            for a in 0..dim {
                let e = DVector::from_fn(dim, |i, _| if i == a { 1.0 } else { 0.0 });
                let v = self.chart.chart_to_sb(y, &e, self.base_step)?;
                let image = SBVec {
                    h: -&v.t + &u * (eps * v.t.dot(&(&g * &u))),
                    t: &v.h - &u * (eps * v.h.dot(&(&g * &u))),
                };
                out.set_column(a, &self.chart.sb_to_chart(y, &image, self.base_step)?);
            }
            Ok(out)
        };
        run().unwrap_or_else(|_| DMatrix::from_element(y.len(), y.len(), f64::NAN))
    }
}
