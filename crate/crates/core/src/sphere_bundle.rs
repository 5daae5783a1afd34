//! The tangent (pseudo-)sphere bundle `T_εM = {(x,u) : g_x(u,u) = ε}`.
//!
//! Tangent vectors are pairs `(X, Y)` standing for `X^h + Y^t`, where the
//! tangential part is always stored orthogonal to `u`. Since `u^t = 0`, this
//! picks one representative out of each coset and makes equality testable.
//!
//! The induced metric `ḡ`, the connection `∇̄` and the curvature `R̄` are
//! evaluated from closed forms in terms of the base curvature; the
//! independent finite-difference route lives in [`crate::oracle`].

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use nalgebra::DVector;

use crate::error::{GeometryError, Result};
use crate::manifold::{ChartedMetric, LocalGeometry};
use crate::sampling::{random_vector, rng_for};
use crate::tangent_bundle::{
    base_bracket, sasaki_metric, LiftCombination, LiftKind, TMPoint, TMVec, VectorFieldOnM,
};

/// Tolerance on `|g(u,u) - ε|` for a valid point.
pub const FIBER_TOLERANCE: f64 = 1e-10;
/// Gram–Schmidt candidates with `|g(w,w)|` below this after projection are skipped.
pub const FRAME_PIVOT_FLOOR: f64 = 1e-6;

/// A point of `T_εM`.
#[derive(Debug, Clone, PartialEq)]
pub struct SBPoint {
    pub x: DVector<f64>,
    pub u: DVector<f64>,
    pub eps: f64,
}

impl SBPoint {
    pub fn new(m: &ChartedMetric, x: DVector<f64>, u: DVector<f64>, eps: f64) -> Result<Self> {
        if eps != 1.0 && eps != -1.0 {
            return Err(GeometryError::InvalidEps(eps));
        }
        if eps < 0.0 && m.index() == 0 {
            return Err(GeometryError::EmptyFiber);
        }
        if u.len() != m.dim() {
            return Err(GeometryError::DimensionMismatch { expected: m.dim(), got: u.len() });
        }
        let g = m.metric_at(&x)?;
        let value = u.dot(&(&g * &u));
        if (value - eps).abs() >= FIBER_TOLERANCE {
            return Err(GeometryError::NotOnSphereBundle { value, eps });
        }
        Ok(Self { x, u, eps })
    }

    /// Rescales `u` onto `T_εM`; fails when `g(u,u)` has the wrong sign.
    pub fn normalized(m: &ChartedMetric, x: DVector<f64>, u: DVector<f64>, eps: f64) -> Result<Self> {
        let g = m.metric_at(&x)?;
        let q = u.dot(&(&g * &u));
        if q == 0.0 || q.signum() != eps.signum() {
            return Err(GeometryError::NotOnSphereBundle { value: q, eps });
        }
        let u = u / q.abs().sqrt();
        Self::new(m, x, u, eps)
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn tm_point(&self) -> TMPoint {
        TMPoint::new(self.x.clone(), self.u.clone())
    }
}

/// A tangent vector `X^h + Y^t` of `T_εM`, stored as `(X, Y)` with `g(Y,u) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SBVec {
    pub h: DVector<f64>,
    pub t: DVector<f64>,
}

impl SBVec {
    pub fn zeros(n: usize) -> Self {
        Self { h: DVector::zeros(n), t: DVector::zeros(n) }
    }

    pub fn max_abs(&self) -> f64 {
        self.h.amax().max(self.t.amax())
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn to_tm(&self) -> TMVec {
        TMVec::new(self.h.clone(), self.t.clone())
    }
}

impl Add for SBVec {
    type Output = SBVec;
    fn add(self, rhs: SBVec) -> SBVec {
        SBVec { h: self.h + rhs.h, t: self.t + rhs.t }
    }
}

impl Sub for SBVec {
    type Output = SBVec;
    fn sub(self, rhs: SBVec) -> SBVec {
        SBVec { h: self.h - rhs.h, t: self.t - rhs.t }
    }
}

impl Neg for SBVec {
    type Output = SBVec;
    fn neg(self) -> SBVec {
        SBVec { h: -self.h, t: -self.t }
    }
}

impl Mul<f64> for SBVec {
    type Output = SBVec;
    fn mul(self, s: f64) -> SBVec {
        SBVec { h: self.h * s, t: self.t * s }
    }
}

/// Horizontal or tangential lift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbLiftKind {
    Horizontal,
    Tangential,
}

/// Pseudo-orthonormal frame `{e_i^t, e_i^h, ξ' = u^h}` of `T_{(x,u)}T_εM`,
/// built from a `g`-orthonormal basis `{e_1..e_{n-1}, u}`.
#[derive(Debug, Clone)]
pub struct SBFrame {
    /// `e_1 .. e_{n-1}`, orthonormal and orthogonal to `u`.
    pub base: Vec<DVector<f64>>,
    /// `g(e_i, e_i) = ±1`.
    pub base_signs: Vec<f64>,
    /// Tangential lifts, then horizontal lifts, then `u^h`.
    pub vectors: Vec<SBVec>,
}

impl SBFrame {
    /// `ḡ(v, v)` for each frame vector.
    pub fn signs(&self, eps: f64) -> Vec<f64> {
        let mut s = self.base_signs.clone();
        s.extend(self.base_signs.iter().copied());
        s.push(eps);
        s
    }
}

/// Closed-form geometry of `T_εM` at one point.
#[derive(Debug, Clone)]
pub struct SphereBundleAt {
    pub geom: LocalGeometry,
    pub p: SBPoint,
}

impl SphereBundleAt {
    pub fn new(m: &ChartedMetric, p: SBPoint) -> Result<Self> {
        let geom = LocalGeometry::new(m, &p.x)?;
        Ok(Self { geom, p })
    }

    pub fn eps(&self) -> f64 {
        self.p.eps
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.p.u
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// `g(a, b)` on the base.
    pub fn g(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        self.geom.inner(a, b)
    }

    /// `X - ε g(X,u) u`, the component of `X` orthogonal to `u`.
    pub fn project(&self, x: &DVector<f64>) -> DVector<f64> {
        x - self.u() * (self.eps() * self.g(x, self.u()))
    }

    /// `N = u^v`.
    pub fn normal(&self) -> TMVec {
        TMVec::vertical(self.u().clone())
    }

    /// `X^t = X^v - ε g(X,u) N`.
    pub fn tangential_lift(&self, x: &DVector<f64>) -> SBVec {
        SBVec { h: DVector::zeros(self.dim()), t: self.project(x) }
    }

    pub fn horizontal_lift(&self, x: &DVector<f64>) -> SBVec {
        SBVec { h: x.clone(), t: DVector::zeros(self.dim()) }
    }

    /// `X^h + Y^t`.
    pub fn vec(&self, h: &DVector<f64>, t: &DVector<f64>) -> SBVec {
        SBVec { h: h.clone(), t: self.project(t) }
    }

    /// `ξ' = u^h`, the geodesic flow.
    pub fn geodesic_flow(&self) -> SBVec {
        self.horizontal_lift(self.u())
    }

    /// Tangential part of a tangent vector of `TM`: `v - ε Tg(v,N) N`.
    pub fn restrict(&self, v: &TMVec) -> SBVec {
        SBVec { h: v.h.clone(), t: self.project(&v.v) }
    }

    /// `ḡ(a, b)`.
    pub fn induced_metric(&self, a: &SBVec, b: &SBVec) -> f64 {
        sasaki_metric(&self.geom.g, &a.to_tm(), &b.to_tm())
    }

    /// `ḡ(X^t, Y^t) = g(X,Y) - ε g(X,u) g(Y,u)`.
    fn tangential_inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.g(x, y) - self.eps() * self.g(x, self.u()) * self.g(y, self.u())
    }

    /// Signature-aware Gram–Schmidt completion of `u`. Standard basis vectors
    /// are tried first, then seeded random candidates.
    pub fn frame(&self, seed: u64) -> Result<SBFrame> {
        let n = self.dim();
        let mut basis = vec![self.u().clone()];
        let mut signs = vec![self.eps()];
        let mut rng = rng_for(seed, 0x5eed);
        let mut candidates: Vec<DVector<f64>> =
            (0..n).map(|i| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 })).collect();
        let mut attempts = 0;
        while basis.len() < n {
            let mut w = if let Some(c) = candidates.pop() {
                c
            } else {
                attempts += 1;
                if attempts > 256 {
                    return Err(GeometryError::FrameConstructionFailure);
                }
                random_vector(n, &mut rng)
            };
            for (b, s) in basis.iter().zip(&signs) {
                w -= b * (s * self.g(&w, b));
            }
            let q = self.g(&w, &w);
            if q.abs() < FRAME_PIVOT_FLOOR {
                continue;
            }
            basis.push(w / q.abs().sqrt());
            signs.push(q.signum());
        }
        let base: Vec<_> = basis.into_iter().skip(1).collect();
        let base_signs: Vec<_> = signs.into_iter().skip(1).collect();
        let mut vectors: Vec<SBVec> = base.iter().map(|e| self.tangential_lift(e)).collect();
        vectors.extend(base.iter().map(|e| self.horizontal_lift(e)));
        vectors.push(self.geodesic_flow());
        Ok(SBFrame { base, base_signs, vectors })
    }

    /// Brackets of lifted fields restricted to `T_εM`:
    /// `[X^h,Y^t] = (∇_X Y)^t`, `[X^t,Y^t] = ε g(X,u) Y^t - ε g(Y,u) X^t`,
    /// `[X^h,Y^h] = [X,Y]^h - t{R(X,Y)u}`.
    pub fn bracket(
        &self,
        x_field: &VectorFieldOnM,
        y_field: &VectorFieldOnM,
        x_kind: SbLiftKind,
        y_kind: SbLiftKind,
    ) -> SBVec {
        let x0 = &self.p.x;
        let u = self.u();
        let eps = self.eps();
        let x = x_field.eval(x0);
        let y = y_field.eval(x0);
        match (x_kind, y_kind) {
            (SbLiftKind::Tangential, SbLiftKind::Tangential) => {
                self.tangential_lift(&(&y * (eps * self.g(&x, u)) - &x * (eps * self.g(&y, u))))
            }
            (SbLiftKind::Horizontal, SbLiftKind::Tangential) => {
                self.tangential_lift(&y_field.covariant_derivative(&self.geom, &x))
            }
            (SbLiftKind::Tangential, SbLiftKind::Horizontal) => {
                self.tangential_lift(&-x_field.covariant_derivative(&self.geom, &y))
            }
            (SbLiftKind::Horizontal, SbLiftKind::Horizontal) => SBVec {
                h: base_bracket(x0, x_field, y_field),
                t: self.project(&-self.geom.curvature(&x, &y, u)),
            },
        }
    }

    /// Levi-Civita connection of `ḡ`:
    ///
    /// * `∇̄_{X^t} Y^t = -ε g(Y,u) X^t`
    /// * `∇̄_{X^t} Y^h = ½ h{R(u,X)Y}`
    /// * `∇̄_{X^h} Y^t = (∇_X Y)^t + ½ h{R(u,Y)X}`
    /// * `∇̄_{X^h} Y^h = (∇_X Y)^h - ½ t{R(X,Y)u}`
    pub fn nabla(
        &self,
        x_vec: &DVector<f64>,
        y_field: &VectorFieldOnM,
        x_kind: SbLiftKind,
        y_kind: SbLiftKind,
    ) -> SBVec {
        let u = self.u();
        let eps = self.eps();
        let y = y_field.eval(&self.p.x);
        match (x_kind, y_kind) {
            (SbLiftKind::Tangential, SbLiftKind::Tangential) => {
                self.tangential_lift(x_vec) * (-eps * self.g(&y, u))
            }
            (SbLiftKind::Tangential, SbLiftKind::Horizontal) => {
                self.horizontal_lift(&(self.geom.curvature(u, x_vec, &y) * 0.5))
            }
            (SbLiftKind::Horizontal, SbLiftKind::Tangential) => SBVec {
                h: self.geom.curvature(u, &y, x_vec) * 0.5,
                t: self.project(&y_field.covariant_derivative(&self.geom, x_vec)),
            },
            (SbLiftKind::Horizontal, SbLiftKind::Horizontal) => SBVec {
                h: y_field.covariant_derivative(&self.geom, x_vec),
                t: self.project(&(self.geom.curvature(x_vec, &y, u) * -0.5)),
            },
        }
    }

    /// `∇̄_a (Y^kind)` for an arbitrary tangent vector `a`.
    pub fn nabla_vec(&self, a: &SBVec, y_field: &VectorFieldOnM, y_kind: SbLiftKind) -> SBVec {
        self.nabla(&a.h, y_field, SbLiftKind::Horizontal, y_kind)
            + self.nabla(&a.t, y_field, SbLiftKind::Tangential, y_kind)
    }

    /// The extension to `TM` of a lifted field, as a combination of lifts
    /// (the tangential lift becomes `Y^v - ε g(Y,u) N`).
    pub fn field_extension(&self, y_field: &VectorFieldOnM, kind: SbLiftKind) -> LiftCombination {
        match kind {
            SbLiftKind::Horizontal => LiftCombination::lift(y_field.clone(), LiftKind::Horizontal),
            SbLiftKind::Tangential => {
                let eps = self.eps();
                let metric = self.geom.chart.metric_fn();
                let y = y_field.clone();
                let coeff = Arc::new(move |x: &DVector<f64>, u: &DVector<f64>| {
                    -eps * y.eval(x).dot(&(metric(x) * u))
                });
                LiftCombination::lift(y_field.clone(), LiftKind::Vertical)
                    .extend(LiftCombination::canonical_vertical(self.dim(), coeff))
            }
        }
    }

    /// `R̄(a, b) c`, expanded trilinearly over horizontal and tangential parts.
    pub fn curvature(&self, a: &SBVec, b: &SBVec, c: &SBVec) -> SBVec {
        use SbLiftKind::{Horizontal as H, Tangential as T};
        let part = |v: &SBVec, k: SbLiftKind| match k {
            H => v.h.clone(),
            T => v.t.clone(),
        };
        let mut out = SBVec::zeros(self.dim());
        for ka in [H, T] {
            let x = part(a, ka);
            if x.amax() == 0.0 {
                continue;
            }
            for kb in [H, T] {
                let y = part(b, kb);
                if y.amax() == 0.0 {
                    continue;
                }
                for kc in [H, T] {
                    let z = part(c, kc);
                    if z.amax() == 0.0 {
                        continue;
                    }
                    out = out + self.curvature_lifts(&x, &y, &z, ka, kb, kc);
                }
            }
        }
        out
    }

    /// `R̄` on three lifts.
    pub fn curvature_lifts(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        kx: SbLiftKind,
        ky: SbLiftKind,
        kz: SbLiftKind,
    ) -> SBVec {
        use SbLiftKind::{Horizontal as H, Tangential as T};
        match (kx, ky, kz) {
            (T, T, T) => self.r_ttt(x, y, z),
            (T, T, H) => self.r_tth(x, y, z),
            (H, T, T) => self.r_htt(x, y, z),
            (H, T, H) => self.r_hth(x, y, z),
            (H, H, T) => self.r_hht(x, y, z),
            (H, H, H) => self.r_hhh(x, y, z),
            (T, H, T) => -self.r_htt(y, x, z),
            (T, H, H) => -self.r_hth(y, x, z),
        }
    }

    fn r(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.geom.curvature(x, y, z)
    }

    fn nr(&self, w: &DVector<f64>, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        self.geom.nabla_curvature(w, x, y, z)
    }

    fn with_h(&self, h: DVector<f64>) -> SBVec {
        SBVec { t: DVector::zeros(h.len()), h }
    }

    // R̄(X^t,Y^t)Z^t = ε{-ḡ(X^t,Z^t) Y^t + ḡ(Z^t,Y^t) X^t}
    fn r_ttt(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> SBVec {
        let eps = self.eps();
        let v = y * (-self.tangential_inner(x, z)) + x * self.tangential_inner(z, y);
        self.tangential_lift(&(v * eps))
    }

    // R̄(X^t,Y^t)Z^h = (R(X,Y)Z)^h - ε{g(Y,u) h(R(X,u)Z) + g(X,u) h(R(u,Y)Z)}
    //                 + ¼ h{[R(u,X), R(u,Y)] Z}
    fn r_tth(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> SBVec {
        let u = self.u();
        let eps = self.eps();
        let comm = self.r(u, x, &self.r(u, y, z)) - self.r(u, y, &self.r(u, x, z));
        let h = self.r(x, y, z)
            - (self.r(x, u, z) * self.g(y, u) + self.r(u, y, z) * self.g(x, u)) * eps
            + comm * 0.25;
        self.with_h(h)
    }

    // R̄(X^h,Y^t)Z^t = -½ (R(Y,Z)X)^h + ε/2 {g(Y,u) h(R(u,Z)X) + g(Z,u) h(R(Y,u)X)}
    //                 - ¼ h{R(u,Y) R(u,Z) X}
    fn r_htt(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> SBVec {
        let u = self.u();
        let eps = self.eps();
        let h = self.r(y, z, x) * -0.5
            + (self.r(u, z, x) * self.g(y, u) + self.r(y, u, x) * self.g(z, u)) * (0.5 * eps)
            - self.r(u, y, &self.r(u, z, x)) * 0.25;
        self.with_h(h)
    }

    // R̄(X^h,Y^t)Z^h = ½ (R(X,Z)Y)^t - ε/2 g(Y,u) t{R(X,Z)u}
    //                 - ¼ t{R(X, R(u,Y)Z) u} + ½ h{(∇_X R)(u,Y)Z}
    fn r_hth(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> SBVec {
        let u = self.u();
        let eps = self.eps();
        let t = self.r(x, z, y) * 0.5 - self.r(x, z, u) * (0.5 * eps * self.g(y, u))
            - self.r(x, &self.r(u, y, z), u) * 0.25;
        SBVec { h: self.nr(x, u, y, z) * 0.5, t: self.project(&t) }
    }

    // R̄(X^h,Y^h)Z^t = (R(X,Y)Z)^t - ε g(Z,u) t{R(X,Y)u}
    //                 + ¼ t{R(Y, R(u,Z)X) u - R(X, R(u,Z)Y) u}
    //                 + ½ h{(∇_X R)(u,Z)Y - (∇_Y R)(u,Z)X}
    fn r_hht(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> SBVec {
        let u = self.u();
        let eps = self.eps();
        let t = self.r(x, y, z) - self.r(x, y, u) * (eps * self.g(z, u))
            + (self.r(y, &self.r(u, z, x), u) - self.r(x, &self.r(u, z, y), u)) * 0.25;
        let h = (self.nr(x, u, z, y) - self.nr(y, u, z, x)) * 0.5;
        SBVec { h, t: self.project(&t) }
    }

    // R̄(X^h,Y^h)Z^h = (R(X,Y)Z)^h + ½ h{R(u, R(X,Y)u) Z}
    //                 - ¼ h{R(u, R(Y,Z)u) X - R(u, R(X,Z)u) Y}
    //                 + ½ t{(∇_Z R)(X,Y)u}
    fn r_hhh(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> SBVec {
        let u = self.u();
        let h = self.r(x, y, z) + self.r(u, &self.r(x, y, u), z) * 0.5
            - (self.r(u, &self.r(y, z, u), x) - self.r(u, &self.r(x, z, u), y)) * 0.25;
        let t = self.nr(z, x, y, u) * 0.5;
        SBVec { h, t: self.project(&t) }
    }

    /// `ḡ(R̄(a,b)c, d)`.
    pub fn curvature_lowered(&self, a: &SBVec, b: &SBVec, c: &SBVec, d: &SBVec) -> f64 {
        self.induced_metric(&self.curvature(a, b, c), d)
    }

    /// Sectional curvature of `span{a, b}` for the metric `scale · ḡ`.
    pub fn sectional(&self, a: &SBVec, b: &SBVec, scale: f64) -> Result<f64> {
        let gaa = scale * self.induced_metric(a, a);
        let gbb = scale * self.induced_metric(b, b);
        let gab = scale * self.induced_metric(a, b);
        let denom = gaa * gbb - gab * gab;
        if denom.abs() <= crate::manifold::PLANE_DEGENERACY {
            return Err(GeometryError::DegeneratePlane(denom));
        }
        Ok(scale * self.curvature_lowered(a, b, b, a) / denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{space_form_chart, SpaceFormSpec};

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_row_slice(xs)
    }

    fn flat_point() -> SphereBundleAt {
        let m = ChartedMetric::flat(2, 0);
        let p = SBPoint::new(&m, v(&[0.0, 0.0]), v(&[1.0, 0.0]), 1.0).unwrap();
        SphereBundleAt::new(&m, p).unwrap()
    }

    #[test]
    fn point_validation() {
        let m = ChartedMetric::flat(2, 0);
        assert_eq!(
            SBPoint::new(&m, v(&[0.0, 0.0]), v(&[1.0, 0.0]), -1.0),
            Err(GeometryError::EmptyFiber)
        );
        assert_eq!(
            SBPoint::new(&m, v(&[0.0, 0.0]), v(&[1.0, 0.0]), 0.5),
            Err(GeometryError::InvalidEps(0.5))
        );
        assert!(matches!(
            SBPoint::new(&m, v(&[0.0, 0.0]), v(&[2.0, 0.0]), 1.0),
            Err(GeometryError::NotOnSphereBundle { .. })
        ));
        let m = ChartedMetric::flat(2, 1);
        assert!(SBPoint::normalized(&m, v(&[0.0, 0.0]), v(&[3.0, 1.0]), -1.0).is_ok());
        assert!(SBPoint::normalized(&m, v(&[0.0, 0.0]), v(&[1.0, 3.0]), -1.0).is_err());
    }

    #[test]
    fn tangential_lift_of_u_vanishes() {
        let sb = flat_point();
        assert_eq!(sb.tangential_lift(&v(&[2.0, 0.0])).max_abs(), 0.0);
        assert_eq!(sb.tangential_lift(&v(&[0.0, 3.0])).t, v(&[0.0, 3.0]));
    }

    #[test]
    fn flat_frame_is_the_expected_one() {
        let sb = flat_point();
        let f = sb.frame(1).unwrap();
        assert_eq!(f.vectors.len(), 3);
        assert_eq!(f.vectors[0], SBVec { h: v(&[0.0, 0.0]), t: v(&[0.0, 1.0]) });
        assert_eq!(f.vectors[1], SBVec { h: v(&[0.0, 1.0]), t: v(&[0.0, 0.0]) });
        assert_eq!(f.vectors[2], SBVec { h: v(&[1.0, 0.0]), t: v(&[0.0, 0.0]) });
    }

    #[test]
    fn geodesic_flow_has_norm_eps() {
        let m = space_form_chart(SpaceFormSpec::new(3, 1, -1.0));
        let p = SBPoint::normalized(&m, v(&[0.1, 0.0, 0.2]), v(&[1.0, 0.2, 0.1]), -1.0).unwrap();
        let sb = SphereBundleAt::new(&m, p).unwrap();
        let xi = sb.geodesic_flow();
        assert!((sb.induced_metric(&xi, &xi) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_base_tt_curvature_is_the_fiber_curvature() {
        let sb = flat_point();
        let y = v(&[0.0, 1.0]);
        // 1-dimensional fiber: R̄(Y^t,Y^t)Y^t = 0.
        assert!(sb.curvature_lifts(&y, &y, &y, SbLiftKind::Tangential, SbLiftKind::Tangential, SbLiftKind::Tangential).max_abs() < 1e-15);
        // Mixed h,t,h on a flat base vanishes.
        let r = sb.curvature_lifts(&y, &y, &y, SbLiftKind::Horizontal, SbLiftKind::Tangential, SbLiftKind::Horizontal);
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn zero_argument_gives_zero_curvature() {
        let sb = flat_point();
        let z = SBVec::zeros(2);
        let a = sb.vec(&v(&[1.0, 2.0]), &v(&[0.0, 1.0]));
        assert_eq!(sb.curvature(&a, &z, &a).max_abs(), 0.0);
    }
}
