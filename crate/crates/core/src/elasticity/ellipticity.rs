//! Ellipticity constants of a single tensor.
//!
//! Both constants use the raw quadratic form `L M·M` on unit-Frobenius
//! arguments. For an isotropic tensor this gives `2 min{μ, λ+μ}` for the very
//! strong constant and `min{μ, λ+2μ}` for the strong (rank-one) constant.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{Matrix3, SymmetricEigen, Vector2, Vector4};

use super::tensor::Tensor4;

/// Angular samples per axis in the coarse search of [`se_constant`].
pub const SE_GRID: usize = 720;
/// Angle tolerance of the golden-section refinement.
pub const SE_TOL: f64 = 1e-10;

/// Restriction of `L` to symmetric matrices in the orthonormal basis
/// `(e1⊗e1, e2⊗e2, (e1⊗e2+e2⊗e1)/√2)`.
pub fn symmetric_restriction(l: &Tensor4) -> Matrix3<f64> {
    let s = FRAC_1_SQRT_2;
    let basis = [
        Vector4::new(1.0, 0.0, 0.0, 0.0),
        Vector4::new(0.0, 0.0, 0.0, 1.0),
        Vector4::new(0.0, s, s, 0.0),
    ];
    let m = l.matrix();
    Matrix3::from_fn(|r, c| basis[r].dot(&(m * basis[c])))
}

/// Very-strong-ellipticity constant: `min { L M·M : M symmetric, |M| = 1 }`.
pub fn vse_constant(l: &Tensor4) -> f64 {
    let r = symmetric_restriction(l);
    let r = (r + r.transpose()) * 0.5;
    SymmetricEigen::new(r).eigenvalues.min()
}

/// `vse_constant` divided by two, i.e. on the scale of `min{μ, λ+μ}`.
pub fn vse_constant_normalized(l: &Tensor4) -> f64 {
    0.5 * vse_constant(l)
}

/// Minimizer of the rank-one form.
#[derive(Debug, Clone, Copy)]
pub struct RankOneMin {
    pub value: f64,
    pub a: Vector2<f64>,
    pub b: Vector2<f64>,
}

fn unit(angle: f64) -> Vector2<f64> {
    Vector2::new(angle.cos(), angle.sin())
}

fn rank_one_form(l: &Tensor4, alpha: f64, beta: f64) -> f64 {
    let a = unit(alpha);
    let b = unit(beta);
    let v = Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
    v.dot(&(l.matrix() * v))
}

fn golden_section(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > SE_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Strong-ellipticity constant `min { L(a⊗b)·(a⊗b) : |a| = |b| = 1 }`, with
/// the minimizing pair.
///
/// Uniform search over both angles on `[0, π)²` (the form is even in `a` and
/// `b`), then alternating golden-section refinement around the best sample.
pub fn se_constant_argmin(l: &Tensor4) -> RankOneMin {
    let step = PI / SE_GRID as f64;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..SE_GRID {
        let alpha = i as f64 * step;
        for j in 0..SE_GRID {
            let beta = j as f64 * step;
            let v = rank_one_form(l, alpha, beta);
            if v < best.0 {
                best = (v, alpha, beta);
            }
        }
    }
    let (mut value, mut alpha, mut beta) = best;
    for _ in 0..50 {
        let (na, va) = golden_section(alpha - step, alpha + step, |x| rank_one_form(l, x, beta));
        let (nb, vb) = golden_section(beta - step, beta + step, |y| rank_one_form(l, na, y));
        let improved = value - vb.min(va);
        if va < value {
            alpha = na;
            value = va;
        }
        if vb < value {
            beta = nb;
            value = vb;
        }
        if improved.abs() <= 1e-15 * value.abs().max(1.0) {
            break;
        }
    }
    RankOneMin {
        value,
        a: unit(alpha),
        b: unit(beta),
    }
}

pub fn se_constant(l: &Tensor4) -> f64 {
    se_constant_argmin(l).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::tensor::{iso_tensor, IsotropicPhase};
    use nalgebra::{DMatrix, Matrix2};
    use proptest::prelude::*;

    fn iso(l: f64, m: f64) -> Tensor4 {
        iso_tensor(&IsotropicPhase::unchecked(l, m, 1.0))
    }

    /// Brute-force minimum of `L M·M` over random unit symmetric matrices.
    fn sampled_vse(l: &Tensor4, samples: usize) -> f64 {
        let mut best = f64::INFINITY;
        for s in 0..samples {
            // quasi-uniform points on the unit 2-sphere of (a, d, √2 b)
            let z = 1.0 - 2.0 * (s as f64 + 0.5) / samples as f64;
            let phi = s as f64 * PI * (3.0 - 5f64.sqrt());
            let r = (1.0 - z * z).sqrt();
            let (x, y) = (r * phi.cos(), r * phi.sin());
            let m = Matrix2::new(x, z * FRAC_1_SQRT_2, z * FRAC_1_SQRT_2, y);
            best = best.min(l.quadratic(&m));
        }
        best
    }

    #[test]
    fn vse_isotropic_closed_form() {
        assert!((vse_constant(&iso(1.0, 1.0)) - 2.0).abs() < 1e-12);
        assert!((vse_constant(&iso(-3.0, 2.0)) + 2.0).abs() < 1e-12);
        assert!((vse_constant(&Tensor4::identity()) - 1.0).abs() < 1e-12);
        // brute-force cross check
        for (l, m) in [(1.0, 1.0), (-3.0, 2.0), (0.3, 0.7)] {
            let t = iso(l, m);
            let s = sampled_vse(&t, 200_000);
            assert!(s >= vse_constant(&t) - 1e-12);
            assert!(s - vse_constant(&t) < 1e-3);
        }
    }

    #[test]
    fn vse_matches_dense_eigen_of_projected_map() {
        let t = iso(0.4, 1.3);
        // P L P with P the projector on symmetric matrices, dense 4x4 eigen-solve
        let mut p = DMatrix::<f64>::identity(4, 4);
        p[(1, 1)] = 0.5;
        p[(2, 2)] = 0.5;
        p[(1, 2)] = 0.5;
        p[(2, 1)] = 0.5;
        let lm = DMatrix::from_fn(4, 4, |r, c| t.matrix()[(r, c)]);
        let pl = &p * lm * &p;
        let ev = pl.symmetric_eigen().eigenvalues;
        // one zero eigenvalue from the antisymmetric direction; the rest are the vse spectrum
        let mut v: Vec<f64> = ev.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let min_nonzero = v.iter().copied().filter(|x| x.abs() > 1e-9).fold(f64::INFINITY, f64::min);
        assert!((min_nonzero - vse_constant(&t)).abs() < 1e-12);
    }

    #[test]
    fn se_isotropic_matches_remark() {
        // min{μ, λ+2μ}
        assert!((se_constant(&iso(-3.0, 2.0)) - 1.0).abs() < 1e-10);
        assert!((se_constant(&iso(1.0, 1.0)) - 1.0).abs() < 1e-10);
        assert!((se_constant(&iso(0.0, 0.5)) - 0.5).abs() < 1e-10);
    }

    /// Independent route: min over `b` of the smallest eigenvalue of the
    /// acoustic tensor `A(b)`.
    fn acoustic_route(l: &Tensor4) -> f64 {
        let n = 200_000;
        (0..n)
            .map(|i| {
                let beta = PI * i as f64 / n as f64;
                let a = l.acoustic(&unit(beta));
                let (p, q, r) = (a[(0, 0)], a[(0, 1)], a[(1, 1)]);
                0.5 * (p + r) - (0.25 * (p - r) * (p - r) + q * q).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn se_agrees_with_acoustic_route_on_anisotropic_tensor() {
        let mut m = *iso(0.5, 1.0).matrix();
        m[(0, 3)] += 0.3;
        m[(3, 0)] += 0.3;
        m[(0, 1)] += 0.2;
        m[(1, 0)] += 0.2;
        let t = Tensor4::from_matrix(m);
        let se = se_constant(&t);
        let oracle = acoustic_route(&t);
        assert!(se <= oracle + 1e-12, "{se} vs {oracle}");
        assert!(oracle - se < 1e-9, "{se} vs {oracle}");
    }

    proptest! {
        #[test]
        fn normalized_vse_below_se_for_isotropic(l in -5.0f64..5.0, m in 0.1f64..5.0) {
            prop_assume!(l + 2.0 * m > 0.05);
            let t = iso(l, m);
            prop_assert!(vse_constant_normalized(&t) <= se_constant(&t) + 1e-12);
        }
    }
}
