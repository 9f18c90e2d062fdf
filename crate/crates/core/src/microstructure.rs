//! Periodic two-phase unit cells on `Y = [0, 1)²`.

use std::f64::consts::PI;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::elasticity::{
    check_hypothesis, iso_tensor, se_constant, vse_constant, HypothesisReport, IsotropicPhase, Tensor4,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    One,
    Two,
}

/// Cell geometry. Phase 1 is the layer `(0, θ)` along the normal axis, or the
/// open disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Geometry {
    Layers {
        theta: f64,
        /// 1 or 2.
        #[serde(default = "default_normal")]
        normal: u8,
    },
    Disk {
        #[serde(default = "default_center")]
        center: [f64; 2],
        radius: f64,
    },
}

fn default_normal() -> u8 {
    1
}

fn default_center() -> [f64; 2] {
    [0.5, 0.5]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitCell {
    pub geometry: Geometry,
    pub phase1: IsotropicPhase,
    pub phase2: IsotropicPhase,
}

impl UnitCell {
    /// Validates the geometry. Phases are checked separately (see
    /// [`validate_gutierrez`]) since experiments outside the admissible range
    /// are allowed.
    pub fn new(geometry: Geometry, phase1: IsotropicPhase, phase2: IsotropicPhase) -> Result<Self> {
        match geometry {
            Geometry::Layers { theta, normal } => {
                if !(theta > 0.0 && theta < 1.0) {
                    return Err(Error::config("cell.theta", format!("must lie in (0, 1), got {theta}")));
                }
                if normal != 1 && normal != 2 {
                    return Err(Error::config("cell.normal", format!("must be 1 or 2, got {normal}")));
                }
            }
            Geometry::Disk { center, radius } => {
                if !(radius > 0.0) {
                    return Err(Error::config("cell.radius", format!("must be > 0, got {radius}")));
                }
                let inside = center
                    .iter()
                    .all(|&c| c - radius > 0.0 && c + radius < 1.0);
                if !inside {
                    return Err(Error::config(
                        "cell.radius",
                        "closed disk must lie inside the open unit cell",
                    ));
                }
            }
        }
        Ok(UnitCell {
            geometry,
            phase1,
            phase2,
        })
    }

    /// Straight layers normal to `e1` with the same phase on both sides.
    pub fn homogeneous(phase: IsotropicPhase) -> Self {
        UnitCell {
            geometry: Geometry::Layers { theta: 0.5, normal: 1 },
            phase1: phase,
            phase2: phase,
        }
    }

    pub fn phase(&self, p: Phase) -> &IsotropicPhase {
        match p {
            Phase::One => &self.phase1,
            Phase::Two => &self.phase2,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.phase1 == self.phase2
    }
}

/// Reduction to `[0, 1)`.
#[inline]
fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Phase label at `y`, reduced modulo 1. Points on an interface belong to
/// phase 2.
pub fn phase_at(cell: &UnitCell, y: &Vector2<f64>) -> Phase {
    let (y1, y2) = (frac(y[0]), frac(y[1]));
    let inside = match cell.geometry {
        Geometry::Layers { theta, normal } => {
            let s = if normal == 1 { y1 } else { y2 };
            s > 0.0 && s < theta
        }
        Geometry::Disk { center, radius } => {
            let d = Vector2::new(y1 - center[0], y2 - center[1]);
            d.norm_squared() < radius * radius
        }
    };
    if inside {
        Phase::One
    } else {
        Phase::Two
    }
}

/// Area of phase 1 in the unit cell.
pub fn volume_fraction(cell: &UnitCell) -> f64 {
    match cell.geometry {
        Geometry::Layers { theta, .. } => theta,
        Geometry::Disk { radius, .. } => PI * radius * radius,
    }
}

/// Elasticity tensor and density at the physical point `x` for period `eps`.
pub fn coefficient_at(cell: &UnitCell, eps: f64, x: &Vector2<f64>) -> (Tensor4, f64) {
    let p = cell.phase(phase_at(cell, &(x / eps)));
    (iso_tensor(p), p.rho)
}

/// Per-phase ellipticity constants.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseConstants {
    pub vse: f64,
    pub vse_normalized: f64,
    pub se: f64,
}

impl PhaseConstants {
    pub fn of(phase: &IsotropicPhase) -> Self {
        let t = iso_tensor(phase);
        let vse = vse_constant(&t);
        PhaseConstants {
            vse,
            vse_normalized: 0.5 * vse,
            se: se_constant(&t),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub hypothesis: HypothesisReport,
    pub phase1: PhaseConstants,
    pub phase2: PhaseConstants,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.hypothesis.all_passed()
    }
}

pub fn validate_gutierrez(cell: &UnitCell) -> ValidationReport {
    ValidationReport {
        hypothesis: check_hypothesis(&cell.phase1, &cell.phase2),
        phase1: PhaseConstants::of(&cell.phase1),
        phase2: PhaseConstants::of(&cell.phase2),
    }
}
