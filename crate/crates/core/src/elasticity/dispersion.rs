use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::gutierrez::GutierrezModuli;
use crate::error::{Error, Result};

/// Tolerance on `|k| = 1`.
pub const UNIT_TOL: f64 = 1e-12;
/// Relative threshold (against `‖A(k)‖`) for zero and negative modes.
pub const ZERO_MODE_REL: f64 = 1e-12;

/// Acoustic matrix for an arbitrary (not necessarily unit) wavevector.
pub(crate) fn acoustic_raw(g: &GutierrezModuli, k: &Vector2<f64>) -> Matrix2<f64> {
    let (k1, k2) = (k[0], k[1]);
    let off = (g.lbar + g.mbar2) * k1 * k2;
    Matrix2::new(
        (g.lbar + 2.0 * g.mbar1) * k1 * k1 + g.mbar2 * k2 * k2,
        off,
        off,
        (g.lbar + 2.0 * g.mbar3) * k2 * k2 + g.mbar2 * k1 * k1,
    )
}

/// `A(k)` whose eigenvalues are the `ρ̄ω²` of plane waves `e^{i(k·x−ωt)} η`.
pub fn acoustic_tensor(g: &GutierrezModuli, k: &Vector2<f64>) -> Result<Matrix2<f64>> {
    if (k.norm() - 1.0).abs() > UNIT_TOL {
        return Err(Error::config("k", format!("wavevector must be a unit vector, |k| = {}", k.norm())));
    }
    Ok(acoustic_raw(g, k))
}

/// Eigenpairs of a symmetric 2x2 matrix, ascending. Eigenvectors are unit
/// length with their largest component positive.
pub fn sym_eigen2(a: &Matrix2<f64>) -> [(f64, Vector2<f64>); 2] {
    let (p, q, r) = (a[(0, 0)], 0.5 * (a[(0, 1)] + a[(1, 0)]), a[(1, 1)]);
    let mean = 0.5 * (p + r);
    let rad = (0.5 * (p - r)).hypot(q);
    let lo = mean - rad;
    let hi = mean + rad;
    let vec_for = |lam: f64| -> Vector2<f64> {
        // rows of (A - lam I); pick the longer candidate for stability
        let c1 = Vector2::new(q, lam - p);
        let c2 = Vector2::new(lam - r, q);
        let v = if c1.norm() >= c2.norm() { c1 } else { c2 };
        let n = v.norm();
        let v = if n == 0.0 {
            // A = lam I: any basis works
            if lam == lo {
                Vector2::new(1.0, 0.0)
            } else {
                Vector2::new(0.0, 1.0)
            }
        } else {
            v / n
        };
        let big = if v[0].abs() >= v[1].abs() { v[0] } else { v[1] };
        if big < 0.0 {
            -v
        } else {
            v
        }
    };
    let mut v_lo = vec_for(lo);
    let v_hi = vec_for(hi);
    if rad == 0.0 {
        v_lo = Vector2::new(1.0, 0.0);
        return [(lo, v_lo), (hi, Vector2::new(0.0, 1.0))];
    }
    [(lo, v_lo), (hi, v_hi)]
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Mode {
    /// Eigenvalue `ρ̄ω²` of `A(k)`.
    pub eigenvalue: f64,
    /// `sqrt(max(eigenvalue, 0) / ρ̄)`.
    pub omega: f64,
    /// Polarization.
    pub eta: [f64; 2],
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Dispersion {
    pub k: [f64; 2],
    /// Sorted by `omega` ascending.
    pub modes: [Mode; 2],
    /// The smaller eigenvalue is below `1e-12 ‖A(k)‖`.
    pub zero_mode: bool,
    /// An eigenvalue is below `-1e-12 ‖A(k)‖`: the nonnegativity condition on
    /// the moduli fails for this direction.
    pub negative_mode: bool,
}

pub fn dispersion(g: &GutierrezModuli, rho_bar: f64, k: &Vector2<f64>) -> Result<Dispersion> {
    if !(rho_bar > 0.0) {
        return Err(Error::config("rho_bar", format!("must be > 0, got {rho_bar}")));
    }
    let a = acoustic_tensor(g, k)?;
    let norm = a.norm();
    let pairs = sym_eigen2(&a);
    let modes = pairs.map(|(ev, eta)| Mode {
        eigenvalue: ev,
        omega: (ev.max(0.0) / rho_bar).sqrt(),
        eta: [eta[0], eta[1]],
    });
    Ok(Dispersion {
        k: [k[0], k[1]],
        zero_mode: modes[0].eigenvalue.abs() < ZERO_MODE_REL * norm,
        negative_mode: modes[0].eigenvalue < -ZERO_MODE_REL * norm,
        modes,
    })
}
