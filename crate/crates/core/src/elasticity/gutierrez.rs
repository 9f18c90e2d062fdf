//! The degenerate θ = 1/2 laminate and its parameter constraints.

use serde::Serialize;

use super::tensor::{IsotropicPhase, Tensor4};
use crate::error::{Error, Result};

/// Absolute tolerance on the equality `-λ2 - μ2 = μ1`.
pub const EQUALITY_TOL: f64 = 1e-12;

/// One line of a parameter check.
#[derive(Debug, Clone, Serialize)]
pub struct Condition {
    pub name: &'static str,
    pub passed: bool,
    /// Signed slack; positive (or zero for the equality) means satisfied.
    pub residual: f64,
}

/// Outcome of checking `0 < -λ2-μ2 = μ1 < μ2` and `λ1+μ1 > 0`.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub conditions: Vec<Condition>,
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.passed)
    }
}

pub fn check_hypothesis(p1: &IsotropicPhase, p2: &IsotropicPhase) -> HypothesisReport {
    let eq = -p2.lambda - p2.mu - p1.mu;
    let conditions = vec![
        Condition {
            name: "0 < mu1",
            passed: p1.mu > 0.0,
            residual: p1.mu,
        },
        Condition {
            name: "-lambda2 - mu2 = mu1",
            passed: eq.abs() <= EQUALITY_TOL,
            residual: eq,
        },
        Condition {
            name: "mu1 < mu2",
            passed: p1.mu < p2.mu,
            residual: p2.mu - p1.mu,
        },
        Condition {
            name: "lambda1 + mu1 > 0",
            passed: p1.lambda + p1.mu > 0.0,
            residual: p1.lambda + p1.mu,
        },
    ];
    HypothesisReport { conditions }
}

/// Resets `λ2 := -μ1 - μ2` so the equality holds exactly.
pub fn project_onto_constraint(p1: &IsotropicPhase, p2: &IsotropicPhase) -> IsotropicPhase {
    IsotropicPhase {
        lambda: -p1.mu - p2.mu,
        ..*p2
    }
}

/// Moduli of an orthorhombic 2D material written as
/// `σ11 = λ̄ div u + 2μ̄1 e11`, `σ12 = 2μ̄2 e12`, `σ22 = λ̄ div u + 2μ̄3 e22`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GutierrezModuli {
    pub lbar: f64,
    pub mbar1: f64,
    pub mbar2: f64,
    pub mbar3: f64,
}

impl GutierrezModuli {
    /// Reads the moduli off an orthorhombic tensor.
    pub fn from_tensor(l: &Tensor4) -> Self {
        let lbar = l.entry(1, 1, 2, 2);
        GutierrezModuli {
            lbar,
            mbar1: 0.5 * (l.entry(1, 1, 1, 1) - lbar),
            mbar2: l.entry(1, 2, 1, 2),
            mbar3: 0.5 * (l.entry(2, 2, 2, 2) - lbar),
        }
    }

    /// The orthorhombic tensor with these moduli.
    pub fn tensor(&self) -> Tensor4 {
        let mut t = Tensor4::zero();
        t.set_entry(1, 1, 1, 1, self.lbar + 2.0 * self.mbar1);
        t.set_entry(2, 2, 2, 2, self.lbar + 2.0 * self.mbar3);
        t.set_entry(1, 1, 2, 2, self.lbar);
        t.set_entry(2, 2, 1, 1, self.lbar);
        for (i, j, k, h) in [(1, 2, 1, 2), (1, 2, 2, 1), (2, 1, 1, 2), (2, 1, 2, 1)] {
            t.set_entry(i, j, k, h, self.mbar2);
        }
        t
    }

    /// `(λ̄+2μ̄1)(λ̄+2μ̄3) − λ̄(λ̄+2μ̄2)`; nonnegative values keep both acoustic
    /// eigenvalues nonnegative.
    pub fn nonnegativity_condition(&self) -> f64 {
        let l = self.lbar;
        (l + 2.0 * self.mbar1) * (l + 2.0 * self.mbar3) - l * (l + 2.0 * self.mbar2)
    }
}

/// Closed-form homogenized tensor of the θ = 1/2 laminate (layers normal to
/// `e1`) built from phases on the degenerate constraint manifold.
pub fn gutierrez_tensor(p1: &IsotropicPhase, p2: &IsotropicPhase) -> Result<(Tensor4, GutierrezModuli)> {
    let report = check_hypothesis(p1, p2);
    if let Some(c) = report.first_failure() {
        return Err(Error::config(
            "phases",
            format!("violates `{}` (residual {:.3e})", c.name, c.residual),
        ));
    }
    let l1111 = 2.0 / (1.0 / p1.p_modulus() + 1.0 / p2.p_modulus());
    let mbar2 = 2.0 * p1.mu * p2.mu / (p1.mu + p2.mu);
    let lbar = -2.0 * p1.mu;
    let moduli = GutierrezModuli {
        lbar,
        mbar1: 0.5 * (l1111 - lbar),
        mbar2,
        mbar3: p1.mu,
    };
    let mut t = Tensor4::zero();
    t.set_entry(1, 1, 1, 1, l1111);
    t.set_entry(1, 1, 2, 2, lbar);
    t.set_entry(2, 2, 1, 1, lbar);
    for (i, j, k, h) in [(1, 2, 1, 2), (1, 2, 2, 1), (2, 1, 1, 2), (2, 1, 2, 1)] {
        t.set_entry(i, j, k, h, mbar2);
    }
    Ok((t, moduli))
}

/// The reference phase pair `(λ1, μ1; λ2, μ2) = (1, 1; −3, 2)`, unit densities.
pub fn reference_phases() -> (IsotropicPhase, IsotropicPhase) {
    (
        IsotropicPhase::unchecked(1.0, 1.0, 1.0),
        IsotropicPhase::unchecked(-3.0, 2.0, 1.0),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::ellipticity::{se_constant, se_constant_argmin, vse_constant_normalized};

    #[test]
    fn reference_values() {
        let (p1, p2) = reference_phases();
        let (t, g) = gutierrez_tensor(&p1, &p2).unwrap();
        assert!((t.entry(1, 1, 1, 1) - 1.5).abs() < 1e-15);
        assert!((t.entry(1, 2, 1, 2) - 4.0 / 3.0).abs() < 1e-15);
        assert!((t.entry(2, 1, 1, 2) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.entry(1, 1, 2, 2), -2.0);
        assert_eq!(t.entry(2, 2, 2, 2), 0.0);
        assert_eq!(t.entry(1, 1, 1, 2), 0.0);
        assert_eq!(g.lbar + 2.0 * g.mbar3, 0.0);
        assert!((g.mbar1 - 1.75).abs() < 1e-15);
        assert_eq!(t.major_asymmetry(), 0.0);
        assert_eq!(t.minor_asymmetry(), 0.0);
        assert!(g.mbar1 > 0.0 && g.mbar2 > 0.0 && g.mbar3 > 0.0);
        assert!(g.lbar + 2.0 * g.mbar1 > 0.0 && g.lbar + 2.0 * g.mbar2 > 0.0 && g.lbar < 0.0);
        assert!((g.nonnegativity_condition() - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(GutierrezModuli::from_tensor(&t), g);
        assert_eq!(g.tensor(), t);
    }

    #[test]
    fn se_of_degenerate_tensor_vanishes_along_e2() {
        let (p1, p2) = reference_phases();
        let (t, _) = gutierrez_tensor(&p1, &p2).unwrap();
        let m = se_constant_argmin(&t);
        assert!(m.value.abs() < 1e-10, "{}", m.value);
        assert!(m.a[1].abs() > 1.0 - 1e-6 && m.b[1].abs() > 1.0 - 1e-6);
        assert!(vse_constant_normalized(&t) <= se_constant(&t));
    }

    #[test]
    fn rejects_each_violated_condition() {
        let p1 = IsotropicPhase::unchecked(1.0, 1.0, 1.0);
        let err = gutierrez_tensor(&p1, &IsotropicPhase::unchecked(-2.9, 2.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("-lambda2 - mu2 = mu1"), "{err}");
        let err = gutierrez_tensor(&p1, &IsotropicPhase::unchecked(-2.0, 1.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("mu1 < mu2"), "{err}");
        let p1 = IsotropicPhase::unchecked(-1.5, 1.0, 1.0);
        let err = gutierrez_tensor(&p1, &IsotropicPhase::unchecked(-3.0, 2.0, 1.0)).unwrap_err();
        assert!(err.to_string().contains("lambda1 + mu1 > 0"), "{err}");
    }

    #[test]
    fn projection_restores_equality() {
        let p1 = IsotropicPhase::unchecked(2.0, 0.7, 1.0);
        let p2 = IsotropicPhase::unchecked(-2.0, 1.9, 1.0);
        assert!(!check_hypothesis(&p1, &p2).all_passed());
        let p2 = project_onto_constraint(&p1, &p2);
        assert!(check_hypothesis(&p1, &p2).all_passed());
        let (t, g) = gutierrez_tensor(&p1, &p2).unwrap();
        assert_eq!(t.entry(2, 2, 2, 2), 0.0);
        assert_eq!(g.lbar + 2.0 * g.mbar3, 0.0);
        // the general mixing formula for L1122 collapses to -2 mu1 on the manifold
        let (a, b) = (p1.p_modulus(), p2.p_modulus());
        let l1122 = (p1.lambda / a + p2.lambda / b) / (1.0 / a + 1.0 / b);
        assert!((l1122 - t.entry(1, 1, 2, 2)).abs() < 1e-12);
    }
}
