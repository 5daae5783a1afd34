//! The standard contact pseudo-metric structure on `T_εM`:
//! `ξ = 2u^h`, `η(X^h) = ½ε g(X,u)`, `η(X^t) = 0`, `φ(X^h) = X^t`,
//! `φ(X^t) = -X^h + ε g(X,u) u^h` and `g_cm = ¼ ḡ`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{GeometryError, Result};
use crate::manifold::{ChartedMetric, SpaceFormSpec};
use crate::sphere_bundle::{SBFrame, SBPoint, SBVec, SbLiftKind, SphereBundleAt};
use crate::tangent_bundle::VectorFieldOnM;

/// Scale of the contact metric relative to the induced metric.
pub const CONTACT_METRIC_SCALE: f64 = 0.25;

/// `(κ, μ)` pair of a nullity condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaMu {
    pub kappa: f64,
    pub mu: f64,
}

impl KappaMu {
    pub fn new(kappa: f64, mu: f64) -> Self {
        Self { kappa, mu }
    }
}

/// `κ = c(4 - ε(c+2))`, `μ = -2c` for a base of constant curvature `c`.
pub fn kappa_mu_for_space_form(c: f64, eps: f64) -> KappaMu {
    KappaMu { kappa: c * (4.0 - eps * (c + 2.0)) + 0.0, mu: -2.0 * c + 0.0 }
}

/// Same as [`kappa_mu_for_space_form`] but from a chart specification.
pub fn kappa_mu_for_spec(spec: &SpaceFormSpec, eps: f64) -> KappaMu {
    kappa_mu_for_space_form(spec.curvature, eps)
}

/// Contact tensors at one point of `T_εM`.
#[derive(Debug, Clone)]
pub struct ContactData {
    pub bundle: SphereBundleAt,
    pub xi: SBVec,
}

impl ContactData {
    pub fn new(m: &ChartedMetric, p: SBPoint) -> Result<Self> {
        Ok(Self::from_bundle(SphereBundleAt::new(m, p)?))
    }

    pub fn from_bundle(bundle: SphereBundleAt) -> Self {
        let xi = bundle.geodesic_flow() * 2.0;
        Self { bundle, xi }
    }

    pub fn eps(&self) -> f64 {
        self.bundle.eps()
    }

    pub fn u(&self) -> &DVector<f64> {
        self.bundle.u()
    }

    pub fn dim(&self) -> usize {
        self.bundle.dim()
    }

    pub fn eta(&self, a: &SBVec) -> f64 {
        0.5 * self.eps() * self.bundle.g(&a.h, self.u())
    }

    pub fn phi(&self, a: &SBVec) -> SBVec {
        let eps = self.eps();
        let u = self.u();
        SBVec {
            h: -&a.t + u * (eps * self.bundle.g(&a.t, u)),
            t: self.bundle.project(&a.h),
        }
    }

    /// `g_cm(a, b) = ¼ ḡ(a, b)`.
    pub fn metric(&self, a: &SBVec, b: &SBVec) -> f64 {
        CONTACT_METRIC_SCALE * self.bundle.induced_metric(a, b)
    }

    /// `a - η(a) ξ`, the component in `ker η`.
    pub fn kernel_part(&self, a: &SBVec) -> SBVec {
        a.clone() - self.xi.clone() * self.eta(a)
    }

    /// The operator `h` on `ker η`, extended by `h(ξ) = 0`:
    /// `hV = (2-ε)V - t{R(V,u)u}` and `hX = -ε X^h + h{R(X,u)u}`.
    pub fn h(&self, a: &SBVec) -> SBVec {
        let eps = self.eps();
        let u = self.u();
        let x = self.bundle.project(&a.h);
        let v = &a.t;
        let geom = &self.bundle.geom;
        SBVec {
            h: &x * -eps + geom.curvature(&x, u, u),
            t: self.bundle.project(&(v * (2.0 - eps) - geom.curvature(v, u, u))),
        }
    }

    /// `∇̄_a ξ` from `∇̄_{X^h}ξ = -t{R(X,u)u}` and `∇̄_{X^t}ξ = -2φX^t - h{R(X,u)u}`.
    pub fn nabla_xi(&self, a: &SBVec) -> SBVec {
        let u = self.u();
        let geom = &self.bundle.geom;
        let along_h = self.bundle.tangential_lift(&-geom.curvature(&a.h, u, u));
        let xt = self.bundle.tangential_lift(&a.t);
        let along_t = self.phi(&xt) * -2.0 - self.bundle.horizontal_lift(&geom.curvature(&a.t, u, u));
        along_h + along_t
    }

    /// `-εφa - φ(ha)`; agrees with [`Self::nabla_xi`] when `h` is right.
    pub fn nabla_xi_from_h(&self, a: &SBVec) -> SBVec {
        self.phi(a) * -self.eps() - self.phi(&self.h(a))
    }

    /// Closed forms of `(∇̄_{X^a} φ) Y^b` on lifts:
    ///
    /// * `(h,h)`: `½ h{R(u,X)Y}`
    /// * `(h,t)`: `½ t{R(X,u)Y}`
    /// * `(t,h)`: `½ t{R(X,u)Y} - ε g(Y,u) X^t`
    /// * `(t,t)`: `½ h{R(X,u)Y} + 2ε g_cm(X^t,Y^t) ξ`
    pub fn nabla_phi(&self, x: &DVector<f64>, y: &DVector<f64>, kx: SbLiftKind, ky: SbLiftKind) -> SBVec {
        use SbLiftKind::{Horizontal as H, Tangential as T};
        let u = self.u();
        let eps = self.eps();
        let sb = &self.bundle;
        let geom = &sb.geom;
        let x = if kx == T { sb.project(x) } else { x.clone() };
        let y = if ky == T { sb.project(y) } else { y.clone() };
        match (kx, ky) {
            (H, H) => sb.horizontal_lift(&(geom.curvature(u, &x, &y) * 0.5)),
            (H, T) => sb.tangential_lift(&(geom.curvature(&x, u, &y) * 0.5)),
            (T, H) => {
                sb.tangential_lift(&(geom.curvature(&x, u, &y) * 0.5 - &x * (eps * sb.g(&y, u))))
            }
            (T, T) => {
                let xt = sb.tangential_lift(&x);
                let yt = sb.tangential_lift(&y);
                sb.horizontal_lift(&(geom.curvature(&x, u, &y) * 0.5))
                    + self.xi.clone() * (2.0 * eps * self.metric(&xt, &yt))
            }
        }
    }

    /// `(∇̄_a φ) b` by bilinear expansion of [`Self::nabla_phi`].
    pub fn nabla_phi_vec(&self, a: &SBVec, b: &SBVec) -> SBVec {
        use SbLiftKind::{Horizontal as H, Tangential as T};
        let mut out = SBVec::zeros(self.dim());
        for (x, kx) in [(&a.h, H), (&a.t, T)] {
            for (y, ky) in [(&b.h, H), (&b.t, T)] {
                out = out + self.nabla_phi(x, y, kx, ky);
            }
        }
        out
    }

    /// `(∇̄_{X^kx} φ) Y^ky = ∇̄_{X}(φY) - φ(∇̄_X Y)` from the connection of `ḡ`.
    pub fn nabla_phi_by_definition(
        &self,
        x: &DVector<f64>,
        y_field: &VectorFieldOnM,
        kx: SbLiftKind,
        ky: SbLiftKind,
    ) -> SBVec {
        let sb = &self.bundle;
        let a = match kx {
            SbLiftKind::Horizontal => sb.horizontal_lift(x),
            SbLiftKind::Tangential => sb.tangential_lift(x),
        };
        let nabla_y = sb.nabla_vec(&a, y_field, ky);
        let nabla_phi_y = match ky {
            SbLiftKind::Horizontal => sb.nabla_vec(&a, y_field, SbLiftKind::Tangential),
            SbLiftKind::Tangential => {
                // φY^t = -Y^h + f u^h with f = ε g(Y,u).
                let eps = self.eps();
                let u = self.u();
                let y = y_field.eval(&sb.p.x);
                let f = eps * sb.g(&y, u);
                // X^h(g(Y,u)) = g(∇_X Y, u); V^t(g(Y,u)) = g(Y, V - εg(V,u)u).
                let df = eps
                    * (sb.g(&y_field.covariant_derivative(&sb.geom, &a.h), u) + sb.g(&y, &a.t));
                -sb.nabla_vec(&a, y_field, SbLiftKind::Horizontal)
                    + sb.geodesic_flow() * df
                    + self.nabla_xi(&a) * (0.5 * f)
            }
        };
        nabla_phi_y - self.phi(&nabla_y)
    }

    /// Matrix of `h` in `frame` (column `j` holds the coefficients of `h e_j`).
    pub fn h_operator(&self, frame: &SBFrame) -> HOperator {
        let signs = frame.signs(self.eps());
        let k = frame.vectors.len();
        let images: Vec<SBVec> = frame.vectors.iter().map(|e| self.h(e)).collect();
        let matrix = DMatrix::from_fn(k, k, |i, j| {
            signs[i] * self.bundle.induced_metric(&images[j], &frame.vectors[i])
        });
        HOperator { matrix, tangential: frame.base.len(), image_of_xi: images[k - 1].max_abs() }
    }

    /// `R̄(a,b)ξ - εκ(η(b)a - η(a)b) - εμ(η(b)ha - η(a)hb)`.
    pub fn kappa_mu_defect(&self, a: &SBVec, b: &SBVec, km: KappaMu) -> SBVec {
        let eps = self.eps();
        let lhs = self.bundle.curvature(a, b, &self.xi);
        let (ea, eb) = (self.eta(a), self.eta(b));
        let plain = a.clone() * eb - b.clone() * ea;
        let twisted = self.h(a) * eb - self.h(b) * ea;
        lhs - plain * (eps * km.kappa) - twisted * (eps * km.mu)
    }

    /// Matrix of `ψ_u X = R(X,u)u` on `u^⊥` in the base part of `frame`.
    pub fn psi_u(&self, frame: &SBFrame) -> DMatrix<f64> {
        let u = self.u();
        let k = frame.base.len();
        DMatrix::from_fn(k, k, |i, j| {
            let image = self.bundle.geom.curvature(&frame.base[j], u, u);
            frame.base_signs[i] * self.bundle.g(&image, &frame.base[i])
        })
    }

    /// Sectional curvature of `span{a, b}` for `g_cm`.
    pub fn sectional(&self, a: &SBVec, b: &SBVec) -> Result<f64> {
        self.bundle.sectional(a, b, CONTACT_METRIC_SCALE)
    }

    /// `K(a, φa)` for `a` in `ker η`.
    pub fn phi_sectional(&self, a: &SBVec) -> Result<f64> {
        let a = self.kernel_part(a);
        self.sectional(&a, &self.phi(&a))
    }

    /// `(∇̄_a φ) b - g_cm(a,b) ξ + ε η(b) a`.
    pub fn sasakian_defect(&self, a: &SBVec, b: &SBVec) -> SBVec {
        self.nabla_phi_vec(a, b) - self.xi.clone() * self.metric(a, b) + a.clone() * (self.eps() * self.eta(b))
    }

    /// `g_cm(∇̄_a ξ, b) + g_cm(a, ∇̄_b ξ)`, the Lie derivative of `g_cm` along `ξ`.
    pub fn killing_defect(&self, a: &SBVec, b: &SBVec) -> f64 {
        self.metric(&self.nabla_xi(a), b) + self.metric(a, &self.nabla_xi(b))
    }
}

/// Matrix of `h` in an adapted frame.
#[derive(Debug, Clone)]
pub struct HOperator {
    pub matrix: DMatrix<f64>,
    /// Number of tangential frame vectors (`n-1`).
    pub tangential: usize,
    /// `max|h(ξ')|`.
    pub image_of_xi: f64,
}

impl HOperator {
    /// Eigenvalues sorted ascending; fails when the spectrum is not real.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let ev = self.matrix.complex_eigenvalues();
        let scale = self.matrix.amax().max(1.0);
        let mut out = Vec::with_capacity(ev.len());
        for z in ev.iter() {
            if z.im.abs() > 1e-9 * scale {
                return Err(GeometryError::InvalidConfig(format!("complex eigenvalue {z}")));
            }
            out.push(z.re);
        }
        out.sort_by(f64::total_cmp);
        Ok(out)
    }

    /// Block of `h` acting on the tangential lifts.
    pub fn tangential_block(&self) -> DMatrix<f64> {
        self.matrix.view((0, 0), (self.tangential, self.tangential)).into_owned()
    }

    /// Block of `h` acting on the horizontal lifts orthogonal to `ξ`.
    pub fn horizontal_block(&self) -> DMatrix<f64> {
        let k = self.tangential;
        self.matrix.view((k, k), (k, k)).into_owned()
    }

    /// `g_cm(hA,B) - g_cm(A,hB)` in the frame, as a matrix.
    pub fn self_adjointness_defect(&self, signs: &[f64]) -> DMatrix<f64> {
        let s = DMatrix::from_diagonal(&DVector::from_column_slice(signs));
        let lowered = &s * &self.matrix;
        &lowered - lowered.transpose()
    }
}

/// `(tangential, horizontal)` eigenvalues of `h` over a space form.
pub fn space_form_h_eigenvalues(c: f64, eps: f64) -> (f64, f64) {
    (2.0 - eps * (1.0 + c), eps * (c - 1.0))
}

/// The two quadratics satisfied by `ψ_u` under a `(κ,μ)` condition,
/// `ψ² + εμψ - ε(κ + (2-ε)μ)I` and `3ψ² + (εμ-4)ψ + (εκ-μ)I`.
pub fn psi_quadratics(psi: &DMatrix<f64>, km: KappaMu, eps: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let id = DMatrix::identity(psi.nrows(), psi.ncols());
    let sq = psi * psi;
    let q1 = &sq + psi * (eps * km.mu) - &id * (eps * (km.kappa + (2.0 - eps) * km.mu));
    let q2 = &sq * 3.0 + psi * (eps * km.mu - 4.0) + &id * (eps * km.kappa - km.mu);
    (q1, q2)
}

/// Scalar versions of [`psi_quadratics`] evaluated at an eigenvalue `a`.
pub fn psi_quadratic_values(a: f64, km: KappaMu, eps: f64) -> (f64, f64) {
    let q1 = a * a + eps * km.mu * a - (eps * km.kappa + (2.0 * eps - 1.0) * km.mu);
    let q2 = a * a + (eps * km.mu - 4.0) / 3.0 * a + (eps * km.kappa - km.mu) / 3.0;
    (q1, q2)
}

fn real_roots(b: f64, c: f64) -> Vec<f64> {
    // x² + b x + c; a tiny negative discriminant is a rounded double root.
    let disc = b * b - 4.0 * c;
    if disc < -1e-12 * (b * b + c.abs()).max(1.0) {
        return vec![];
    }
    let s = disc.max(0.0).sqrt();
    vec![(-b - s) / 2.0, (-b + s) / 2.0]
}

/// The root shared by both scalar quadratics, if any (closest pair of roots).
pub fn common_psi_root(km: KappaMu, eps: f64) -> Option<f64> {
    let r1 = real_roots(eps * km.mu, -(eps * km.kappa + (2.0 * eps - 1.0) * km.mu));
    let r2 = real_roots((eps * km.mu - 4.0) / 3.0, (eps * km.kappa - km.mu) / 3.0);
    let mut best: Option<(f64, f64)> = None;
    for a in &r1 {
        for b in &r2 {
            let d = (a - b).abs();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, 0.5 * (a + b)));
            }
        }
    }
    best.filter(|(d, _)| *d < 1e-6).map(|(_, r)| r)
}

/// Least-squares `(κ, μ)` from `R̄(a, ξ)ξ = εκ a + εμ h a` for `a ∈ ker η`.
/// Diagnostic only.
pub fn fit_kappa_mu(samples: &[(ContactData, SBVec)]) -> Option<KappaMu> {
    let mut rows: Vec<[f64; 3]> = Vec::new();
    for (cd, a) in samples {
        let a = cd.kernel_part(a);
        let eps = cd.eps();
        let lhs = cd.bundle.curvature(&a, &cd.xi, &cd.xi);
        let ha = cd.h(&a);
        for (l, (p, q)) in lhs
            .h
            .iter()
            .chain(lhs.t.iter())
            .zip(a.h.iter().chain(a.t.iter()).zip(ha.h.iter().chain(ha.t.iter())))
        {
            rows.push([eps * p, eps * q, *l]);
        }
    }
    if rows.is_empty() {
        return None;
    }
    let a = DMatrix::from_fn(rows.len(), 2, |i, j| rows[i][j]);
    let b = DVector::from_fn(rows.len(), |i, _| rows[i][2]);
    let sol = a.svd(true, true).solve(&b, 1e-12).ok()?;
    Some(KappaMu::new(sol[0], sol[1]))
}
