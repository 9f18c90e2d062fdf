use std::ops::{Add, Mul, Sub};

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flattens a 2x2 matrix into coordinates on the ordered basis
/// `(e1⊗e1, e1⊗e2, e2⊗e1, e2⊗e2)`.
#[inline]
pub fn coords(m: &Matrix2<f64>) -> Vector4<f64> {
    Vector4::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

#[inline]
pub fn from_coords(v: &Vector4<f64>) -> Matrix2<f64> {
    Matrix2::new(v[0], v[1], v[2], v[3])
}

/// Position of the component `(i, j)` (zero based) in [`coords`].
#[inline]
pub const fn slot(i: usize, j: usize) -> usize {
    2 * i + j
}

/// Cofactor matrix: `cof([[a, b], [c, d]]) = [[d, -c], [-b, a]]`.
pub fn cof(m: &Matrix2<f64>) -> Matrix2<f64> {
    Matrix2::new(m[(1, 1)], -m[(1, 0)], -m[(0, 1)], m[(0, 0)])
}

/// The matrix of `M ↦ cof(M)` in coordinates. Satisfies `M·cof(M) = 2 det M`.
pub fn cof_matrix() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.0, -1.0, 0.0, //
        0.0, -1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0,
    )
}

/// A linear map on 2x2 matrices stored as a 4x4 matrix acting on [`coords`].
///
/// Entry `L_ijkh` sits at row `2i+j`, column `2k+h`, so `(L M)_ij = L_ijkh M_kh`
/// and the quadratic form is `L M·M = coords(M)ᵀ m coords(M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor4 {
    m: Matrix4<f64>,
}

impl Tensor4 {
    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        Tensor4 { m }
    }

    pub fn zero() -> Self {
        Tensor4 {
            m: Matrix4::zeros(),
        }
    }

    pub fn identity() -> Self {
        Tensor4 {
            m: Matrix4::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.m
    }

    /// Component `L_ijkh` with one-based indices as written in the literature
    /// (`entry(1, 1, 2, 2)` is `L1122`).
    pub fn entry(&self, i: usize, j: usize, k: usize, h: usize) -> f64 {
        debug_assert!([i, j, k, h].iter().all(|&x| x == 1 || x == 2));
        self.m[(slot(i - 1, j - 1), slot(k - 1, h - 1))]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, k: usize, h: usize, value: f64) {
        self.m[(slot(i - 1, j - 1), slot(k - 1, h - 1))] = value;
    }

    pub fn apply(&self, m: &Matrix2<f64>) -> Matrix2<f64> {
        from_coords(&(self.m * coords(m)))
    }

    /// Bilinear form `L M·N`.
    pub fn form(&self, m: &Matrix2<f64>, n: &Matrix2<f64>) -> f64 {
        coords(n).dot(&(self.m * coords(m)))
    }

    pub fn quadratic(&self, m: &Matrix2<f64>) -> f64 {
        self.form(m, m)
    }

    /// Largest asymmetry `|L_ijkh - L_khij|`.
    pub fn major_asymmetry(&self) -> f64 {
        (self.m - self.m.transpose()).amax()
    }

    pub fn is_major_symmetric(&self, tol: f64) -> bool {
        self.major_asymmetry() <= tol
    }

    /// Largest violation of `L_ijkh = L_jikh = L_ijhk`.
    pub fn minor_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 1..=2 {
            for j in 1..=2 {
                for k in 1..=2 {
                    for h in 1..=2 {
                        let v = self.entry(i, j, k, h);
                        worst = worst
                            .max((v - self.entry(j, i, k, h)).abs())
                            .max((v - self.entry(i, j, h, k)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Acoustic tensor `A(k)_ik = L_ijkh k_j k_h` (no normalization of `k`).
    pub fn acoustic(&self, k: &Vector2<f64>) -> Matrix2<f64> {
        let mut a = Matrix2::zeros();
        for i in 0..2 {
            for kk in 0..2 {
                let mut s = 0.0;
                for j in 0..2 {
                    for h in 0..2 {
                        s += self.m[(slot(i, j), slot(kk, h))] * k[j] * k[h];
                    }
                }
                a[(i, kk)] = s;
            }
        }
        a
    }

    /// Symmetrizes the stored matrix. Used after numerical assembly.
    pub fn symmetrized(&self) -> Self {
        Tensor4 {
            m: (self.m + self.m.transpose()) * 0.5,
        }
    }
}

impl Add for Tensor4 {
    type Output = Tensor4;
    fn add(self, rhs: Tensor4) -> Tensor4 {
        Tensor4 { m: self.m + rhs.m }
    }
}

impl Sub for Tensor4 {
    type Output = Tensor4;
    fn sub(self, rhs: Tensor4) -> Tensor4 {
        Tensor4 { m: self.m - rhs.m }
    }
}

impl Mul<f64> for Tensor4 {
    type Output = Tensor4;
    fn mul(self, rhs: f64) -> Tensor4 {
        Tensor4 { m: self.m * rhs }
    }
}

fn default_rho() -> f64 {
    1.0
}

/// Lamé pair plus mass density of one isotropic phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotropicPhase {
    pub lambda: f64,
    pub mu: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
}

impl IsotropicPhase {
    /// Builds a phase, enforcing `mu > 0`, `lambda + 2 mu > 0` and `rho > 0`.
    pub fn new(lambda: f64, mu: f64, rho: f64) -> Result<Self> {
        let p = IsotropicPhase { lambda, mu, rho };
        p.validate()?;
        Ok(p)
    }

    /// Builds a phase without checking strong ellipticity. Only meant for
    /// experiments outside the admissible parameter range.
    pub fn unchecked(lambda: f64, mu: f64, rho: f64) -> Self {
        IsotropicPhase { lambda, mu, rho }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.mu.is_finite() && self.rho.is_finite()) {
            return Err(Error::config("phase", "non-finite Lamé parameter"));
        }
        if self.mu <= 0.0 {
            return Err(Error::config("phase.mu", format!("mu = {} must be > 0", self.mu)));
        }
        if self.lambda + 2.0 * self.mu <= 0.0 {
            return Err(Error::config(
                "phase.lambda",
                format!(
                    "lambda + 2 mu = {} must be > 0 (strong ellipticity)",
                    self.lambda + 2.0 * self.mu
                ),
            ));
        }
        if self.rho <= 0.0 {
            return Err(Error::config("phase.rho", format!("rho = {} must be > 0", self.rho)));
        }
        Ok(())
    }

    /// P-wave modulus `lambda + 2 mu`.
    pub fn p_modulus(&self) -> f64 {
        self.lambda + 2.0 * self.mu
    }
}

/// Isotropic elasticity `M ↦ λ tr(M) I + μ (M + Mᵀ)` on all 2x2 matrices.
///
/// Antisymmetric matrices are mapped to zero, so the result has both minor
/// symmetries.
pub fn iso_tensor(phase: &IsotropicPhase) -> Tensor4 {
    let (l, mu) = (phase.lambda, phase.mu);
    let mut t = Tensor4::zero();
    for i in 1..=2 {
        for j in 1..=2 {
            for k in 1..=2 {
                for h in 1..=2 {
                    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                    let v = l * d(i, j) * d(k, h) + mu * (d(i, k) * d(j, h) + d(i, h) * d(j, k));
                    t.set_entry(i, j, k, h, v);
                }
            }
        }
    }
    t
}

/// Null-Lagrangian shift `M ↦ L M + 2 mu1 cof(M)`.
///
/// `K M·M = L M·M + 4 mu1 det M`, and on fields vanishing on the boundary (or
/// periodic fields) the two energies integrate to the same value.
pub fn k_transform(l: &Tensor4, mu1: f64) -> Tensor4 {
    Tensor4::from_matrix(l.matrix() + cof_matrix() * (2.0 * mu1))
}

/// Eigen-structure of `K = L + 2 mu1 cof` for an isotropic phase.
#[derive(Debug, Clone, Copy)]
pub struct KSpectrum {
    /// `2(λ+μ+μ1)` on `I`.
    pub dilatation: f64,
    /// `2 μ1` on the rotation `R⊥`.
    pub rotation: f64,
    /// `2(μ−μ1)` on the two-dimensional span of `G = diag(1,-1)` and the
    /// symmetric off-diagonal `H`.
    pub shear: f64,
}

impl KSpectrum {
    /// Unit-Frobenius eigenbasis `[I, R⊥, G, H]`, matching
    /// `[dilatation, rotation, shear, shear]`.
    pub fn basis() -> [Matrix2<f64>; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [
            Matrix2::new(s, 0.0, 0.0, s),
            Matrix2::new(0.0, -s, s, 0.0),
            Matrix2::new(s, 0.0, 0.0, -s),
            Matrix2::new(0.0, s, s, 0.0),
        ]
    }

    /// Eigenvalues in the order of [`KSpectrum::basis`].
    pub fn values(&self) -> [f64; 4] {
        [self.dilatation, self.rotation, self.shear, self.shear]
    }
}

pub fn k_spectrum(phase: &IsotropicPhase, mu1: f64) -> KSpectrum {
    KSpectrum {
        dilatation: 2.0 * (phase.lambda + phase.mu + mu1),
        rotation: 2.0 * mu1,
        shear: 2.0 * (phase.mu - mu1),
    }
}
