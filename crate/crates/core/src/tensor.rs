//! Dense component storage for the connection and curvature tensors of a chart.
//!
//! Index conventions:
//!
//! * `Christoffel::get(i, j, k)` is `Γ^i_jk`, with `∇_{∂j} ∂k = Γ^i_jk ∂i`.
//! * `RiemannTensor::get(i, j, k, l)` is `R^i_jkl`, the `i`-component of
//!   `R(∂k, ∂l) ∂j` where `R(X,Y) = ∇_X ∇_Y - ∇_Y ∇_X - ∇_[X,Y]`.
//! * `NablaRiemann::get(m, i, j, k, l)` is `(∇_m R)^i_jkl`.

use nalgebra::{DMatrix, DVector};

/// Levi-Civita connection symbols `Γ^i_jk`, symmetric in the lower pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.n + j) * self.n + k]
    }

    /// Writes `Γ^i_jk` and `Γ^i_kj` together so the lower symmetry holds exactly.
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let n = self.n;
        self.data[(i * n + j) * n + k] = value;
        self.data[(i * n + k) * n + j] = value;
    }

    /// `Γ(x, y)^i = Γ^i_jk x^j y^k`.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |i, _| {
            let mut acc = 0.0;
            for j in 0..n {
                if x[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    acc += self.get(i, j, k) * x[j] * y[k];
                }
            }
            acc
        })
    }

    /// The matrix `A^i_j = Γ^i_jb u^b`.
    pub fn along(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| (0..n).map(|b| self.get(i, j, b) * u[b]).sum())
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Riemann curvature components `R^i_jkl`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor {
    n: usize,
    data: Vec<f64>,
}

impl RiemannTensor {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let o = self.offset(i, j, k, l);
        self.data[o] = value;
    }

    /// `R(x, y) z`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        let mut out = DVector::zeros(n);
        for k in 0..n {
            if x[k] == 0.0 {
                continue;
            }
            for l in 0..n {
                let xy = x[k] * y[l];
                if xy == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let w = xy * z[j];
                    if w == 0.0 {
                        continue;
                    }
                    for i in 0..n {
                        out[i] += self.get(i, j, k, l) * w;
                    }
                }
            }
        }
        out
    }

    /// Lowered components `R_ijkl = g_im R^m_jkl`.
    pub fn lower(&self, g: &DMatrix<f64>) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        out[((i * n + j) * n + k) * n + l] =
                            (0..n).map(|m| g[(i, m)] * self.get(m, j, k, l)).sum();
                    }
                }
            }
        }
        out
    }

    /// Largest violation of the four algebraic curvature symmetries after
    /// lowering with `g`: antisymmetry in `(k,l)`, antisymmetry in `(i,j)`,
    /// pair symmetry and the first Bianchi identity.
    pub fn symmetry_residual(&self, g: &DMatrix<f64>) -> f64 {
        let n = self.n;
        let low = self.lower(g);
        let at = |i: usize, j: usize, k: usize, l: usize| low[((i * n + j) * n + k) * n + l];
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = at(i, j, k, l);
                        worst = worst
                            .max((r + at(i, j, l, k)).abs())
                            .max((r + at(j, i, k, l)).abs())
                            .max((r - at(k, l, i, j)).abs())
                            .max((r + at(i, k, l, j) + at(i, l, j, k)).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &RiemannTensor) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Covariant derivative of the curvature tensor, `(∇_m R)^i_jkl`.
#[derive(Debug, Clone, PartialEq)]
pub struct NablaRiemann {
    n: usize,
    slices: Vec<RiemannTensor>,
}

impl NablaRiemann {
    pub fn zeros(n: usize) -> Self {
        Self { n, slices: vec![RiemannTensor::zeros(n); n] }
    }

    pub(crate) fn from_slices(slices: Vec<RiemannTensor>) -> Self {
        Self { n: slices.len(), slices }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, m: usize, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.slices[m].get(i, j, k, l)
    }

    /// `∇_X R` as a curvature-shaped tensor.
    pub fn along(&self, x: &DVector<f64>) -> RiemannTensor {
        let mut out = RiemannTensor::zeros(self.n);
        for (m, slice) in self.slices.iter().enumerate() {
            if x[m] == 0.0 {
                continue;
            }
            for (o, v) in out.data_mut().iter_mut().zip(slice.data()) {
                *o += x[m] * v;
            }
        }
        out
    }

    /// Residual of the second Bianchi identity
    /// `(∇_m R)^i_jkl + (∇_k R)^i_jlm + (∇_l R)^i_jmk = 0`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            let s = self.get(m, i, j, k, l)
                                + self.get(k, i, j, l, m)
                                + self.get(l, i, j, m, k);
                            worst = worst.max(s.abs());
                        }
                    }
                }
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.slices.iter().fold(0.0, |m, s| m.max(s.max_abs()))
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "tensor dimensions differ");
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
