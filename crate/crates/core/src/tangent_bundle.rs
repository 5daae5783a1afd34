//! The tangent bundle `TM` with its Sasaki pseudo-metric.
//!
//! Tangent vectors of `TM` are stored as a pair of base vectors: the part
//! that is a horizontal lift and the part that is a vertical lift. Induced
//! coordinates `(x̄^i, u^i)` are only used when a quantity has to be
//! differentiated numerically.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeometryError, Result};
use crate::manifold::{ChartedMetric, LocalGeometry, TangentVec};
use crate::tensor::Christoffel;

/// Step used when differentiating vector-field components or scalar
/// functions along a direction.
pub const FIELD_DIFF_STEP: f64 = 1e-5;

/// A point `(x, u)` of `TM`.
#[derive(Debug, Clone, PartialEq)]
pub struct TMPoint {
    pub x: DVector<f64>,
    pub u: DVector<f64>,
}

impl TMPoint {
    pub fn new(x: DVector<f64>, u: DVector<f64>) -> Self {
        assert_eq!(x.len(), u.len(), "base point and fiber vector differ in dimension");
        Self { x, u }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }
}

/// A tangent vector `X^h + Y^v` of `TM`, stored as `(X, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TMVec {
    pub h: DVector<f64>,
    pub v: DVector<f64>,
}

impl TMVec {
    pub fn new(h: DVector<f64>, v: DVector<f64>) -> Self {
        Self { h, v }
    }

    pub fn zeros(n: usize) -> Self {
        Self { h: DVector::zeros(n), v: DVector::zeros(n) }
    }

    pub fn horizontal(x: DVector<f64>) -> Self {
        let n = x.len();
        Self { h: x, v: DVector::zeros(n) }
    }

    pub fn vertical(x: DVector<f64>) -> Self {
        let n = x.len();
        Self { h: DVector::zeros(n), v: x }
    }

    pub fn max_abs(&self) -> f64 {
        self.h.amax().max(self.v.amax())
    }
}

impl Add for TMVec {
    type Output = TMVec;
    fn add(self, rhs: TMVec) -> TMVec {
        TMVec { h: self.h + rhs.h, v: self.v + rhs.v }
    }
}

impl Sub for TMVec {
    type Output = TMVec;
    fn sub(self, rhs: TMVec) -> TMVec {
        TMVec { h: self.h - rhs.h, v: self.v - rhs.v }
    }
}

impl Neg for TMVec {
    type Output = TMVec;
    fn neg(self) -> TMVec {
        TMVec { h: -self.h, v: -self.v }
    }
}

impl Mul<f64> for TMVec {
    type Output = TMVec;
    fn mul(self, s: f64) -> TMVec {
        TMVec { h: self.h * s, v: self.v * s }
    }
}

/// Which lift of a base vector field is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    Horizontal,
    Vertical,
}

pub type FieldFn = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// A vector field on `M` given by its chart components.
#[derive(Clone)]
pub struct VectorFieldOnM {
    comps: FieldFn,
}

impl std::fmt::Debug for VectorFieldOnM {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("VectorFieldOnM")
    }
}

impl VectorFieldOnM {
    pub fn new(comps: FieldFn) -> Self {
        Self { comps }
    }

    /// The field with the same chart components everywhere.
    pub fn constant(v: DVector<f64>) -> Self {
        Self { comps: Arc::new(move |_| v.clone()) }
    }

    /// Coordinate field `∂_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        Self::constant(DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }))
    }

    /// `a + B x + ½ (x^T Q_i x)_i`, a convenient non-parallel test field.
    pub fn polynomial(a: DVector<f64>, b: DMatrix<f64>, q: Vec<DMatrix<f64>>) -> Self {
        Self {
            comps: Arc::new(move |x: &DVector<f64>| {
                let mut out = &a + &b * x;
                for (i, qi) in q.iter().enumerate() {
                    out[i] += 0.5 * x.dot(&(qi * x));
                }
                out
            }),
        }
    }

    pub fn eval(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.comps)(x)
    }

    /// Directional derivative of the components, `X^j ∂_j Y^i`, by central
    /// differences.
    pub fn derivative_along(&self, x: &DVector<f64>, dir: &DVector<f64>) -> DVector<f64> {
        let h = FIELD_DIFF_STEP;
        (self.eval(&(x + dir * h)) - self.eval(&(x - dir * h))) / (2.0 * h)
    }

    /// `∇_X Y` at the geometry's base point, for `X` a vector there.
    pub fn covariant_derivative(&self, geom: &LocalGeometry, x_vec: &DVector<f64>) -> DVector<f64> {
        self.derivative_along(&geom.x, x_vec) + geom.gamma.contract(x_vec, &self.eval(&geom.x))
    }
}

/// `[X, Y]` of two fields on `M` at `x`.
pub fn base_bracket(x: &DVector<f64>, a: &VectorFieldOnM, b: &VectorFieldOnM) -> DVector<f64> {
    b.derivative_along(x, &a.eval(x)) - a.derivative_along(x, &b.eval(x))
}

fn check_base(at: &TMPoint, v: &TangentVec) -> Result<()> {
    if v.base.len() != at.dim() || v.comps.len() != at.dim() {
        return Err(GeometryError::DimensionMismatch { expected: at.dim(), got: v.comps.len() });
    }
    if v.base != at.x {
        return Err(GeometryError::BasePointMismatch);
    }
    Ok(())
}

/// `X^h` at `(x, u)`.
pub fn horizontal_lift(at: &TMPoint, x_vec: &TangentVec) -> Result<TMVec> {
    check_base(at, x_vec)?;
    Ok(TMVec::horizontal(x_vec.comps.clone()))
}

/// `X^v` at `(x, u)`.
pub fn vertical_lift(at: &TMPoint, x_vec: &TangentVec) -> Result<TMVec> {
    check_base(at, x_vec)?;
    Ok(TMVec::vertical(x_vec.comps.clone()))
}

/// Components in the induced frame `(∂/∂x̄^i, ∂/∂u^i)`:
/// `X^h + Y^v ↦ (X^i ; Y^i - u^b X^a Γ^i_ab)`.
pub fn to_induced_coords(gamma: &Christoffel, at: &TMPoint, v: &TMVec) -> DVector<f64> {
    let n = at.dim();
    let a = gamma.along(&at.u);
    let fiber = &v.v - &a * &v.h;
    DVector::from_fn(2 * n, |i, _| if i < n { v.h[i] } else { fiber[i - n] })
}

/// Inverse of [`to_induced_coords`], using
/// `∂/∂x̄^j = (∂_j)^h + u^b Γ^i_jb (∂_i)^v`.
pub fn from_induced_coords(gamma: &Christoffel, at: &TMPoint, coords: &DVector<f64>) -> TMVec {
    let n = at.dim();
    let h = coords.rows(0, n).into_owned();
    let a = gamma.along(&at.u);
    let v = coords.rows(n, n).into_owned() + &a * &h;
    TMVec { h, v }
}

/// `(π_* v, 𝒦 v)`.
pub fn project(v: &TMVec) -> (DVector<f64>, DVector<f64>) {
    (v.h.clone(), v.v.clone())
}

/// `Tg(a, b) = g(a_h, b_h) + g(a_v, b_v)` for the metric `g` at the base point.
pub fn sasaki_metric(g: &DMatrix<f64>, a: &TMVec, b: &TMVec) -> f64 {
    a.h.dot(&(g * &b.h)) + a.v.dot(&(g * &b.v))
}

/// `Tg(a, b)` at `at`, evaluating `g` from the chart.
pub fn sasaki_metric_at(m: &ChartedMetric, at: &TMPoint, a: &TMVec, b: &TMVec) -> Result<f64> {
    let n = at.dim();
    for w in [&a.h, &a.v, &b.h, &b.v] {
        if w.len() != n {
            return Err(GeometryError::DimensionMismatch { expected: n, got: w.len() });
        }
    }
    Ok(sasaki_metric(&m.metric_at(&at.x)?, a, b))
}

/// `J X^h = X^v`, `J X^v = -X^h`.
pub fn almost_complex_j(v: &TMVec) -> TMVec {
    TMVec { h: -&v.v, v: v.h.clone() }
}

/// Levi-Civita connection of `Tg` on lifts:
///
/// * `∇̃_{X^v} Y^v = 0`
/// * `∇̃_{X^v} Y^h = ½ h{R(u,X)Y}`
/// * `∇̃_{X^h} Y^v = (∇_X Y)^v + ½ h{R(u,Y)X}`
/// * `∇̃_{X^h} Y^h = (∇_X Y)^h - ½ v{R(X,Y)u}`
///
/// `x_vec` is the value of the differentiating field at the base point; only
/// `y_field` is differentiated.
pub fn tm_nabla(
    geom: &LocalGeometry,
    at: &TMPoint,
    x_vec: &DVector<f64>,
    y_field: &VectorFieldOnM,
    x_kind: LiftKind,
    y_kind: LiftKind,
) -> TMVec {
    let u = &at.u;
    let y = y_field.eval(&at.x);
    match (x_kind, y_kind) {
        (LiftKind::Vertical, LiftKind::Vertical) => TMVec::zeros(at.dim()),
        (LiftKind::Vertical, LiftKind::Horizontal) => {
            TMVec::horizontal(geom.curvature(u, x_vec, &y) * 0.5)
        }
        (LiftKind::Horizontal, LiftKind::Vertical) => TMVec::new(
            geom.curvature(u, &y, x_vec) * 0.5,
            y_field.covariant_derivative(geom, x_vec),
        ),
        (LiftKind::Horizontal, LiftKind::Horizontal) => TMVec::new(
            y_field.covariant_derivative(geom, x_vec),
            geom.curvature(x_vec, &y, u) * -0.5,
        ),
    }
}

/// Brackets of lifted fields:
/// `[X^h,Y^h] = [X,Y]^h - v{R(X,Y)u}`, `[X^h,Y^v] = (∇_X Y)^v`, `[X^v,Y^v] = 0`.
pub fn lift_bracket(
    geom: &LocalGeometry,
    at: &TMPoint,
    x_field: &VectorFieldOnM,
    y_field: &VectorFieldOnM,
    x_kind: LiftKind,
    y_kind: LiftKind,
) -> TMVec {
    let x = x_field.eval(&at.x);
    let y = y_field.eval(&at.x);
    match (x_kind, y_kind) {
        (LiftKind::Vertical, LiftKind::Vertical) => TMVec::zeros(at.dim()),
        (LiftKind::Horizontal, LiftKind::Vertical) => {
            TMVec::vertical(y_field.covariant_derivative(geom, &x))
        }
        (LiftKind::Vertical, LiftKind::Horizontal) => {
            TMVec::vertical(-x_field.covariant_derivative(geom, &y))
        }
        (LiftKind::Horizontal, LiftKind::Horizontal) => TMVec::new(
            base_bracket(&at.x, x_field, y_field),
            -geom.curvature(&x, &y, &at.u),
        ),
    }
}

/// Value of a lifted field at an arbitrary point of `TM`.
pub fn lift_value(x_field: &VectorFieldOnM, kind: LiftKind, x: &DVector<f64>) -> TMVec {
    match kind {
        LiftKind::Horizontal => TMVec::horizontal(x_field.eval(x)),
        LiftKind::Vertical => TMVec::vertical(x_field.eval(x)),
    }
}

/// The Sasaki metric in the induced coordinate frame, with the chart's
/// Christoffel symbols.
pub fn sasaki_metric_induced(m: &ChartedMetric, at: &TMPoint) -> Result<DMatrix<f64>> {
    let n = at.dim();
    let g = m.metric_at(&at.x)?;
    let a = m.christoffel_at(&at.x)?.along(&at.u);
    let ga = &g * &a;
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(&(&g + a.transpose() * &ga));
    out.view_mut((0, n), (n, n)).copy_from(&ga.transpose());
    out.view_mut((n, 0), (n, n)).copy_from(&ga);
    out.view_mut((n, n), (n, n)).copy_from(&g);
    Ok(out)
}

/// Step of [`directional_derivative_tm`].
pub const SCALAR_DIFF_STEP: f64 = 1e-3;

/// Directional derivative of a scalar function on `TM` along `a` at `at`:
/// central differences in induced coordinates at steps `h` and `h/2`,
/// combined as `(4 D(h/2) - D(h)) / 3`.
pub fn directional_derivative_tm(
    gamma: &Christoffel,
    at: &TMPoint,
    a: &TMVec,
    f: &dyn Fn(&DVector<f64>, &DVector<f64>) -> f64,
) -> f64 {
    let n = at.dim();
    let d = to_induced_coords(gamma, at, a);
    let dx = d.rows(0, n).into_owned();
    let du = d.rows(n, n).into_owned();
    let central = |h: f64| {
        (f(&(&at.x + &dx * h), &(&at.u + &du * h)) - f(&(&at.x - &dx * h), &(&at.u - &du * h))) / (2.0 * h)
    };
    let h = SCALAR_DIFF_STEP;
    (4.0 * central(h / 2.0) - central(h)) / 3.0
}

pub type ScalarFieldOnTM = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> f64 + Send + Sync>;

/// A vector field on `TM` written as `Σ f_k(x,u) · (Z_k)^{kind_k}`.
///
/// Used to differentiate fields that are not plain lifts, such as tangential
/// lifts or the canonical vertical field, through the Leibniz rule.
#[derive(Clone, Default)]
pub struct LiftCombination {
    terms: Vec<(ScalarFieldOnTM, VectorFieldOnM, LiftKind)>,
}

impl LiftCombination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lift(field: VectorFieldOnM, kind: LiftKind) -> Self {
        Self::new().with_term(Arc::new(|_, _| 1.0), field, kind)
    }

    pub fn with_term(mut self, coeff: ScalarFieldOnTM, field: VectorFieldOnM, kind: LiftKind) -> Self {
        self.terms.push((coeff, field, kind));
        self
    }

    /// The canonical vertical field `u^i (∂_i)^v`, scaled by `scale`.
    pub fn canonical_vertical(n: usize, scale: ScalarFieldOnTM) -> Self {
        let mut out = Self::new();
        for i in 0..n {
            let scale = Arc::clone(&scale);
            out = out.with_term(
                Arc::new(move |x, u| scale(x, u) * u[i]),
                VectorFieldOnM::coordinate(n, i),
                LiftKind::Vertical,
            );
        }
        out
    }

    pub fn extend(mut self, other: LiftCombination) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn value(&self, x: &DVector<f64>, u: &DVector<f64>) -> TMVec {
        let mut out = TMVec::zeros(x.len());
        for (f, z, kind) in &self.terms {
            out = out + lift_value(z, *kind, x) * f(x, u);
        }
        out
    }

    /// `∇̃_a B` for a tangent vector `a` at `at`, via
    /// `∇̃_a (f Z) = a(f) Z + f ∇̃_a Z` and [`tm_nabla`] on the lifts.
    pub fn nabla(&self, geom: &LocalGeometry, at: &TMPoint, a: &TMVec) -> TMVec {
        let mut out = TMVec::zeros(at.dim());
        for (f, z, kind) in &self.terms {
            let df = directional_derivative_tm(&geom.gamma, at, a, &|x, u| f(x, u));
            let coeff = f(&at.x, &at.u);
            let along_h = tm_nabla(geom, at, &a.h, z, LiftKind::Horizontal, *kind);
            let along_v = tm_nabla(geom, at, &a.v, z, LiftKind::Vertical, *kind);
            out = out + lift_value(z, *kind, &at.x) * df + (along_h + along_v) * coeff;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{space_form_chart, SpaceFormSpec};

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    #[test]
    fn lifts_reject_foreign_base_points() {
        let at = TMPoint::new(v(&[0.1, 0.2]), v(&[1.0, 0.0]));
        let x = TangentVec::new(v(&[0.0, 0.2]), v(&[1.0, 1.0]));
        assert_eq!(horizontal_lift(&at, &x), Err(GeometryError::BasePointMismatch));
        assert_eq!(vertical_lift(&at, &x), Err(GeometryError::BasePointMismatch));
    }

    #[test]
    fn lifts_project_to_their_arguments() {
        let at = TMPoint::new(v(&[0.1, 0.2]), v(&[1.0, 0.5]));
        let x = TangentVec::new(at.x.clone(), v(&[0.3, -0.7]));
        let h = horizontal_lift(&at, &x).unwrap();
        let vl = vertical_lift(&at, &x).unwrap();
        assert_eq!(project(&h), (x.comps.clone(), DVector::zeros(2)));
        assert_eq!(project(&vl), (DVector::zeros(2), x.comps.clone()));
        assert_eq!(project(&TMVec::zeros(2)), (DVector::zeros(2), DVector::zeros(2)));
        let mixed = h.clone() + TMVec::vertical(v(&[2.0, 3.0]));
        assert_eq!(project(&mixed), (x.comps.clone(), v(&[2.0, 3.0])));
        assert_eq!(almost_complex_j(&vl), -h.clone());
        assert_eq!(almost_complex_j(&h), vl);
    }

    #[test]
    fn induced_coordinates_follow_the_lift_formulas() {
        let m = space_form_chart(SpaceFormSpec::new(2, 0, 1.0));
        let at = TMPoint::new(v(&[0.2, 0.1]), v(&[0.4, -0.9]));
        let gamma = m.christoffel_at(&at.x).unwrap();
        let x = v(&[0.3, 0.5]);
        let coords = to_induced_coords(&gamma, &at, &TMVec::horizontal(x.clone()));
        for i in 0..2 {
            let mut expect = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    expect -= at.u[b] * x[a] * gamma.get(i, a, b);
                }
            }
            assert_eq!(coords[i], x[i]);
            assert!((coords[2 + i] - expect).abs() < 1e-15);
        }
        let coords = to_induced_coords(&gamma, &at, &TMVec::vertical(x.clone()));
        assert_eq!(coords, v(&[0.0, 0.0, 0.3, 0.5]));
    }

    #[test]
    fn flat_base_induced_coordinates_are_verbatim() {
        let m = ChartedMetric::flat(3, 1);
        let at = TMPoint::new(v(&[0.1, 0.0, 0.2]), v(&[1.0, 0.5, 0.0]));
        let gamma = m.christoffel_at(&at.x).unwrap();
        let w = TMVec::new(v(&[1.0, 2.0, 3.0]), v(&[4.0, 5.0, 6.0]));
        assert_eq!(to_induced_coords(&gamma, &at, &w), v(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
    }

    #[test]
    fn sasaki_metric_blocks() {
        let m = space_form_chart(SpaceFormSpec::new(2, 1, 1.0));
        let at = TMPoint::new(v(&[0.1, 0.2]), v(&[0.3, 1.0]));
        let x = v(&[0.7, 0.2]);
        let val = sasaki_metric_at(&m, &at, &TMVec::horizontal(x.clone()), &TMVec::vertical(x.clone()));
        assert_eq!(val.unwrap(), 0.0);
        let bad = TMVec::horizontal(v(&[1.0]));
        assert!(sasaki_metric_at(&m, &at, &bad, &bad).is_err());
    }

    #[test]
    fn flat_base_connection_vanishes_on_vertical_horizontal() {
        let m = ChartedMetric::flat(2, 0);
        let at = TMPoint::new(v(&[0.1, 0.2]), v(&[0.6, 0.8]));
        let geom = LocalGeometry::new(&m, &at.x).unwrap();
        let y = VectorFieldOnM::constant(v(&[0.3, 0.4]));
        let r = tm_nabla(&geom, &at, &v(&[1.0, 2.0]), &y, LiftKind::Vertical, LiftKind::Horizontal);
        assert_eq!(r.max_abs(), 0.0);
        let a = VectorFieldOnM::coordinate(2, 0);
        let b = VectorFieldOnM::coordinate(2, 1);
        let br = lift_bracket(&geom, &at, &a, &b, LiftKind::Horizontal, LiftKind::Horizontal);
        assert_eq!(br.max_abs(), 0.0);
    }

    #[test]
    fn constant_curvature_hh_vertical_part() {
        // R(X,Y)u = c (g(Y,u) X - g(X,u) Y): zero when X, Y, u are mutually orthogonal.
        let m = space_form_chart(SpaceFormSpec::new(3, 0, 1.0));
        let at = TMPoint::new(DVector::zeros(3), v(&[0.0, 0.0, 1.0]));
        let geom = LocalGeometry::new(&m, &at.x).unwrap();
        let y = VectorFieldOnM::constant(v(&[0.0, 1.0, 0.0]));
        let r = tm_nabla(&geom, &at, &v(&[1.0, 0.0, 0.0]), &y, LiftKind::Horizontal, LiftKind::Horizontal);
        assert!(r.v.amax() < 1e-15);
        // With X = Y' parallel to u-free and Y = u: -½ c (g(u,u) X - g(X,u) u) = -½ X.
        let y = VectorFieldOnM::constant(v(&[0.0, 0.0, 1.0]));
        let r = tm_nabla(&geom, &at, &v(&[1.0, 0.0, 0.0]), &y, LiftKind::Horizontal, LiftKind::Horizontal);
        assert!((r.v - v(&[-0.5, 0.0, 0.0])).amax() < 1e-14);
    }
}
