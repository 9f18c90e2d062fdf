//! Explicit elastodynamics `ρ ∂²u/∂t² = div(L∇u)` with lumped mass, for a
//! fixed-ε composite or a homogenized medium.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector2};
use serde::{Deserialize, Serialize};

use crate::elasticity::{iso_tensor, k_transform, sym_eigen2, Tensor4};
use crate::elliptic::{build_system, hom_tensor, BcMode, FieldGrid, RectDomain, Term};
use crate::error::{Error, Result};
use crate::fem::{dot, CsrMatrix, DofMap, Grid};
use crate::microstructure::{phase_at, Phase, UnitCell};

pub const CFL_SAFETY: f64 = 0.5;
/// Directions sampled when bounding the homogenized wave speed.
pub const SPEED_DIRECTIONS: usize = 64;
/// Relative growth of the conserved energy that aborts a run.
pub const GROWTH_LIMIT: f64 = 0.1;

#[derive(Debug, Clone)]
pub enum Medium {
    FixedEps { cell: UnitCell, eps: f64 },
    Homogenized { l0: Tensor4, rho_bar: f64 },
}

impl Medium {
    /// Upper bound on the wave speed used by the CFL rule.
    pub fn c_max(&self, bc: BcMode) -> Result<f64> {
        match self {
            Medium::FixedEps { cell, .. } => {
                let p = [cell.phase1, cell.phase2];
                let stiff = p.iter().map(|q| q.p_modulus().max(q.mu)).fold(f64::MIN, f64::max);
                let rho = p.iter().map(|q| q.rho).fold(f64::MAX, f64::min);
                Ok((stiff / rho).sqrt())
            }
            Medium::Homogenized { l0, rho_bar } => {
                let c = hom_tensor(l0, bc)?;
                let top = (0..SPEED_DIRECTIONS)
                    .map(|i| {
                        let a = 2.0 * PI * i as f64 / SPEED_DIRECTIONS as f64;
                        let k = Vector2::new(a.cos(), a.sin());
                        sym_eigen2(&c.acoustic(&k))[1].0
                    })
                    .fold(f64::MIN, f64::max);
                Ok((top.max(0.0) / rho_bar).sqrt())
            }
        }
    }
}

/// Vector field given by closed-form terms per component.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorField {
    #[serde(default)]
    pub u1: Vec<Term>,
    #[serde(default)]
    pub u2: Vec<Term>,
}

impl VectorField {
    pub fn eval(&self, x: &Vector2<f64>) -> Vector2<f64> {
        Vector2::new(
            self.u1.iter().map(|t| t.eval(x)).sum(),
            self.u2.iter().map(|t| t.eval(x)).sum(),
        )
    }

    pub fn sample(&self, grid: Grid) -> FieldGrid {
        FieldGrid::from_fn(grid, |x| self.eval(x))
    }
}

/// Zeroes the constrained dofs of a nodal field.
pub fn clamp(field: &FieldGrid, dofs: &DofMap) -> FieldGrid {
    FieldGrid {
        grid: field.grid,
        values: dofs.expand(&dofs.restrict(&field.values)),
    }
}

/// Largest value a field takes on constrained dofs.
pub fn constraint_violation(field: &FieldGrid, dofs: &DofMap) -> f64 {
    (0..field.grid.n_nodes())
        .flat_map(|n| (0..2).map(move |c| (n, c)))
        .filter(|&(n, c)| !dofs.is_free(n, c))
        .map(|(n, c)| field.values[2 * n + c].abs())
        .fold(0.0, f64::max)
}

/// Stiffness and lumped mass over the free dofs.
pub struct Stepper {
    pub grid: Grid,
    pub dofs: DofMap,
    pub stiffness: CsrMatrix,
    pub mass: Vec<f64>,
    inv_mass: Vec<f64>,
    pub dt: f64,
}

/// Displacement and velocity on the free dofs at `t = step·dt`.
#[derive(Debug, Clone)]
pub struct DynState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
    pub step: usize,
    pub dt: f64,
    accel: Vec<f64>,
}

impl DynState {
    pub fn displacement(&self, dofs: &DofMap, grid: Grid) -> FieldGrid {
        FieldGrid {
            grid,
            values: dofs.expand(&self.u),
        }
    }

    pub fn velocity(&self, dofs: &DofMap, grid: Grid) -> FieldGrid {
        FieldGrid {
            grid,
            values: dofs.expand(&self.v),
        }
    }

    /// Reverses the direction of time.
    pub fn reverse(&mut self) {
        self.v.iter_mut().for_each(|x| *x = -*x);
    }
}

impl Stepper {
    pub fn new(domain: &RectDomain, medium: &Medium, bc: BcMode, dt: f64) -> Result<Self> {
        domain.validate()?;
        let grid = domain.grid();
        let dofs = bc.dofs(&grid);
        let sys = match medium {
            Medium::FixedEps { cell, eps } => {
                if bc != BcMode::FullDirichlet {
                    return Err(Error::config("bc", "fixed-eps media take full-dirichlet conditions"));
                }
                if !(*eps > 0.0 && *eps <= 1.0) {
                    return Err(Error::config("eps", format!("must lie in (0, 1], got {eps}")));
                }
                if !cell.is_homogeneous() && grid.h > eps / 8.0 * (1.0 + 1e-12) {
                    return Err(Error::config(
                        "domain.m",
                        format!("element size {:.4e} exceeds eps/8 = {:.4e}", grid.h, eps / 8.0),
                    ));
                }
                let mu1 = cell.phase1.mu;
                let k = |p| *k_transform(&iso_tensor(p), mu1).matrix();
                let (k1, k2): (Matrix4<f64>, Matrix4<f64>) = (k(&cell.phase1), k(&cell.phase2));
                let phase = |x: &Vector2<f64>| phase_at(cell, &(x / *eps));
                build_system(
                    grid,
                    dofs,
                    |x| match phase(x) {
                        Phase::One => k1,
                        Phase::Two => k2,
                    },
                    |x| cell.phase(phase(x)).rho,
                    |_| Vector2::zeros(),
                )
            }
            Medium::Homogenized { l0, rho_bar } => {
                if !(*rho_bar > 0.0) {
                    return Err(Error::config("rho_bar", format!("must be positive, got {rho_bar}")));
                }
                let c = *hom_tensor(l0, bc)?.matrix();
                build_system(grid, dofs, |_| c, |_| *rho_bar, |_| Vector2::zeros())
            }
        };
        let mass = sys.mass.row_sums();
        if let Some(bad) = mass.iter().find(|m| !(**m > 0.0)) {
            return Err(Error::config("rho", format!("non-positive lumped mass {bad}")));
        }
        let inv_mass = mass.iter().map(|m| 1.0 / m).collect();
        Ok(Stepper {
            grid,
            dofs: sys.dofs,
            stiffness: sys.stiffness,
            mass,
            inv_mass,
            dt,
        })
    }

    fn accel_into(&self, u: &[f64], out: &mut [f64]) {
        self.stiffness.matvec_into(u, out);
        for (a, im) in out.iter_mut().zip(&self.inv_mass) {
            *a = -*a * im;
        }
    }

    pub fn init(&self, u0: &FieldGrid, v0: &FieldGrid) -> Result<DynState> {
        for (name, f) in [("initial displacement", u0), ("initial velocity", v0)] {
            let viol = constraint_violation(f, &self.dofs);
            let scale = f.values.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
            if viol > 1e-12 * scale {
                return Err(Error::config(
                    "initial",
                    format!("{name} does not satisfy the boundary condition (max {viol:.3e} on constrained nodes)"),
                ));
            }
        }
        let u = self.dofs.restrict(&u0.values);
        let v = self.dofs.restrict(&v0.values);
        let mut accel = vec![0.0; u.len()];
        self.accel_into(&u, &mut accel);
        Ok(DynState {
            u,
            v,
            t: 0.0,
            step: 0,
            dt: self.dt,
            accel,
        })
    }

    /// One leapfrog step in velocity-Verlet form.
    pub fn step(&self, s: &mut DynState) {
        let h = 0.5 * self.dt;
        for ((v, a), u) in s.v.iter_mut().zip(&s.accel).zip(s.u.iter_mut()) {
            *v += h * a;
            *u += self.dt * *v;
        }
        self.accel_into(&s.u, &mut s.accel);
        for (v, a) in s.v.iter_mut().zip(&s.accel) {
            *v += h * a;
        }
        s.step += 1;
        s.t = s.step as f64 * self.dt;
    }

    /// `(½ v·Mv, ½ u·Au)`.
    pub fn energy(&self, s: &DynState) -> (f64, f64) {
        let kin = 0.5 * s.v.iter().zip(&self.mass).map(|(v, m)| m * v * v).sum::<f64>();
        let strain = 0.5 * self.stiffness.quadratic(&s.u);
        (kin, strain)
    }

    /// `½ v_{n+½}·M v_{n-½} + ½ u·Au`, exactly conserved by the scheme.
    fn shadow_energy(&self, s: &DynState) -> f64 {
        let h = 0.5 * self.dt;
        let kin = 0.5
            * s.v
                .iter()
                .zip(&s.accel)
                .zip(&self.mass)
                .map(|((v, a), m)| m * (v + h * a) * (v - h * a))
                .sum::<f64>();
        kin + 0.5 * dot(&s.u, &self.stiffness.matvec(&s.u))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DynOptions {
    /// Explicit time step; must not exceed the CFL bound.
    pub dt: Option<f64>,
    /// Number of equally spaced snapshots after `t = 0`.
    pub samples: usize,
}

impl Default for DynOptions {
    fn default() -> Self {
        DynOptions { dt: None, samples: 8 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyRow {
    pub t: f64,
    pub kinetic: f64,
    pub strain: f64,
    pub total: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub u: FieldGrid,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dt: f64,
    pub steps: usize,
    pub c_max: f64,
    /// Snapshots including `t = 0`.
    pub snapshots: Vec<Snapshot>,
    /// One row per step including `t = 0`.
    pub energy: Vec<EnergyRow>,
}

/// Largest stable step `CFL_SAFETY · h / c_max`.
pub fn cfl_dt(domain: &RectDomain, medium: &Medium, bc: BcMode) -> Result<f64> {
    let c = medium.c_max(bc)?;
    if !(c > 0.0) {
        return Err(Error::config("medium", "wave speed bound is zero"));
    }
    Ok(CFL_SAFETY * domain.h() / c)
}

pub fn simulate(
    domain: &RectDomain,
    medium: &Medium,
    bc: BcMode,
    f: &FieldGrid,
    g: &FieldGrid,
    t_final: f64,
    opts: DynOptions,
) -> Result<Trajectory> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::config("t_final", format!("must be positive, got {t_final}")));
    }
    let samples = opts.samples.max(1);
    let bound = cfl_dt(domain, medium, bc)?;
    let target = match opts.dt {
        Some(dt) if !(dt > 0.0) => return Err(Error::config("dt", format!("must be positive, got {dt}"))),
        Some(dt) if dt > bound * (1.0 + 1e-12) => {
            return Err(Error::config("dt", format!("{dt:.4e} violates the CFL bound {bound:.4e}")));
        }
        Some(dt) => dt,
        None => bound,
    };
    // whole number of steps per sample interval, landing exactly on t_final
    let per = (t_final / samples as f64 / target * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let steps = per * samples;
    let dt = t_final / steps as f64;
    let stepper = Stepper::new(domain, medium, bc, dt)?;
    let mut s = stepper.init(f, g)?;
    let grid = stepper.grid;
    let record = |s: &DynState| {
        let (kinetic, strain) = stepper.energy(s);
        EnergyRow {
            t: s.t,
            kinetic,
            strain,
            total: kinetic + strain,
        }
    };
    let mut energy = Vec::with_capacity(steps + 1);
    energy.push(record(&s));
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        u: s.displacement(&stepper.dofs, grid),
    }];
    let e0 = stepper.shadow_energy(&s).abs();
    for _ in 0..steps {
        stepper.step(&mut s);
        energy.push(record(&s));
        let e = stepper.shadow_energy(&s);
        if !e.is_finite() || (e0 > 0.0 && (e - e0).abs() > GROWTH_LIMIT * e0) || (e0 == 0.0 && e != 0.0) {
            return Err(Error::Unstable {
                step: s.step,
                growth: if e0 > 0.0 { e / e0 } else { f64::INFINITY },
            });
        }
        if s.step % per == 0 {
            snapshots.push(Snapshot {
                t: s.t,
                u: s.displacement(&stepper.dofs, grid),
            });
        }
    }
    Ok(Trajectory {
        dt,
        steps,
        c_max: medium.c_max(bc)?,
        snapshots,
        energy,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergySeries {
    pub rows: Vec<EnergyRow>,
    /// `(max - min) / initial` of the total; zero for a zero initial energy.
    pub drift: f64,
}

impl EnergySeries {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,kinetic,strain,total\n");
        for r in &self.rows {
            s.push_str(&format!("{:.12e},{:.12e},{:.12e},{:.12e}\n", r.t, r.kinetic, r.strain, r.total));
        }
        s
    }
}

pub fn energy_series(traj: &Trajectory) -> EnergySeries {
    let rows = traj.energy.clone();
    let e0 = rows.first().map(|r| r.total).unwrap_or(0.0);
    let (lo, hi) = rows
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.total), hi.max(r.total)));
    let drift = if e0 > 0.0 { (hi - lo) / e0 } else { 0.0 };
    EnergySeries { rows, drift }
}

/// Wave speed `sqrt(L⁰₁₂₁₂ / ρ̄)` of the transverse plane wave.
pub fn transverse_speed(l0: &Tensor4, rho_bar: f64) -> f64 {
    (l0.entry(1, 2, 1, 2) / rho_bar).sqrt()
}

/// `u₂(t, x) = sin(ct + x₁) - sin(ct - x₁)`.
pub fn plane_wave(c: f64, t: f64, x: &Vector2<f64>) -> f64 {
    (c * t + x[0]).sin() - (c * t - x[0]).sin()
}

/// Benchmark initial displacement `(0, 2 sin x₁)`.
pub fn benchmark_initial() -> VectorField {
    VectorField {
        u1: vec![],
        u2: vec![Term::Trig {
            amp: 2.0,
            x: crate::elliptic::TrigFn::Sin,
            j: 1.0,
            y: crate::elliptic::TrigFn::One,
            k: 1.0,
        }],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkSample {
    pub t: f64,
    /// `‖u₂ - exact‖ / ‖u₂(0)‖`.
    pub rel_error: f64,
    pub u1_norm: f64,
    pub u2_norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub m: usize,
    pub c: f64,
    pub t_final: f64,
    pub dt: f64,
    pub steps: usize,
    pub samples: Vec<BenchmarkSample>,
    pub max_rel_error: f64,
    pub energy_drift: f64,
    /// Largest `‖u₁‖ / ‖u₂‖` over samples with non-negligible `u₂`.
    pub u1_ratio: f64,
}

/// Homogenized Gutiérrez medium on `(0, π)²` with the mixed condition, run
/// over one period `2π/c`.
pub fn wave_benchmark(m: usize) -> Result<BenchmarkReport> {
    let (p1, p2) = crate::elasticity::reference_phases();
    let (l0, _) = crate::elasticity::gutierrez_tensor(&p1, &p2)?;
    wave_benchmark_with(m, &l0, 1.0, DynOptions::default())
}

pub fn wave_benchmark_with(m: usize, l0: &Tensor4, rho_bar: f64, opts: DynOptions) -> Result<BenchmarkReport> {
    let domain = RectDomain::square_pi(m);
    domain.validate()?;
    let medium = Medium::Homogenized { l0: *l0, rho_bar };
    let bc = BcMode::GutierrezMixed;
    let c = transverse_speed(l0, rho_bar);
    let t_final = 2.0 * PI / c;
    let grid = domain.grid();
    let f = benchmark_initial().sample(grid);
    let g = FieldGrid::zeros(grid);
    let traj = simulate(&domain, &medium, bc, &f, &g, t_final, opts)?;
    let norm0 = f.component_l2()[1];
    let samples: Vec<BenchmarkSample> = traj
        .snapshots
        .iter()
        .map(|s| {
            let e2 = s.u.component_l2_error(1, |x| plane_wave(c, s.t, x));
            let [u1, u2] = s.u.component_l2();
            BenchmarkSample {
                t: s.t,
                rel_error: e2 / norm0,
                u1_norm: u1,
                u2_norm: u2,
            }
        })
        .collect();
    let max_rel_error = samples.iter().map(|s| s.rel_error).fold(0.0, f64::max);
    let u1_ratio = samples
        .iter()
        .filter(|s| s.u2_norm > 1e-6 * norm0)
        .map(|s| s.u1_norm / s.u2_norm)
        .fold(0.0, f64::max);
    Ok(BenchmarkReport {
        m,
        c,
        t_final,
        dt: traj.dt,
        steps: traj.steps,
        max_rel_error,
        energy_drift: energy_series(&traj).drift,
        u1_ratio,
        samples,
    })
}

/// Observed orders `log₂(e_i / e_{i+1})` for resolutions doubling each time.
pub fn observed_orders(reports: &[BenchmarkReport]) -> Vec<f64> {
    reports
        .windows(2)
        .map(|w| (w[0].max_rel_error / w[1].max_rel_error).ln() / (w[1].m as f64 / w[0].m as f64).ln())
        .collect()
}

/// `|⟨u, φ⟩| / (‖u‖ ‖φ‖)` with `φ = (0, sin x₁)`; `None` when `u` vanishes.
pub fn profile_correlation(u: &FieldGrid, floor: f64) -> Option<f64> {
    let nu = u.l2();
    if nu <= floor {
        return None;
    }
    let a = u.grid.nx as f64 * u.grid.h;
    let b = u.grid.ny as f64 * u.grid.h;
    let phi = |x: &Vector2<f64>| Vector2::new(0.0, (PI * x[0] / a).sin());
    let nphi = (a * b / 2.0).sqrt();
    Some(u.integrate_against(phi).abs() / (nu * nphi))
}

/// Largest `|u₂|` on the horizontal sides.
pub fn horizontal_trace(u: &FieldGrid) -> f64 {
    let (nx, ny) = (u.grid.nx, u.grid.ny);
    (0..=nx)
        .flat_map(|i| [u.at(i, 0)[1].abs(), u.at(i, ny)[1].abs()])
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::{gutierrez_tensor, reference_phases};

    fn gutierrez() -> Tensor4 {
        gutierrez_tensor(&reference_phases().0, &reference_phases().1).unwrap().0
    }

    #[test]
    fn zero_data_zero_trajectory() {
        let d = RectDomain::square_pi(16);
        let g = FieldGrid::zeros(d.grid());
        let medium = Medium::Homogenized { l0: gutierrez(), rho_bar: 1.0 };
        let t = simulate(&d, &medium, BcMode::GutierrezMixed, &g, &g, 1.0, DynOptions::default()).unwrap();
        assert!(t.snapshots.iter().all(|s| s.u.values.iter().all(|v| *v == 0.0)));
        let e = energy_series(&t);
        assert!(e.rows.iter().all(|r| r.total == 0.0));
        assert_eq!(e.drift, 0.0);
    }

    #[test]
    fn exact_solution_at_zero() {
        let c = (4.0f64 / 3.0).sqrt();
        for x1 in [0.1, 1.0, 2.5] {
            let x = Vector2::new(x1, 0.3);
            assert!((plane_wave(c, 0.0, &x) - 2.0 * x1.sin()).abs() < 1e-15);
        }
        assert!((transverse_speed(&gutierrez(), 1.0) - 1.154_700_538_379_251_5).abs() < 1e-15);
    }

    #[test]
    fn steps_land_on_final_time() {
        let d = RectDomain::square_pi(16);
        let medium = Medium::Homogenized { l0: gutierrez(), rho_bar: 1.0 };
        let f = benchmark_initial().sample(d.grid());
        let g = FieldGrid::zeros(d.grid());
        let t = simulate(&d, &medium, BcMode::GutierrezMixed, &f, &g, 3.0, DynOptions::default()).unwrap();
        assert_eq!(t.steps % 8, 0);
        assert_eq!(t.snapshots.len(), 9);
        assert!((t.snapshots.last().unwrap().t - 3.0).abs() < 1e-12);
        assert!(t.dt <= cfl_dt(&d, &medium, BcMode::GutierrezMixed).unwrap());
    }

    #[test]
    fn rejects_cfl_violation_and_nonconforming_data() {
        let d = RectDomain::square_pi(16);
        let medium = Medium::Homogenized { l0: gutierrez(), rho_bar: 1.0 };
        let f = benchmark_initial().sample(d.grid());
        let g = FieldGrid::zeros(d.grid());
        let bound = cfl_dt(&d, &medium, BcMode::GutierrezMixed).unwrap();
        let opts = DynOptions { dt: Some(2.0 * bound), samples: 8 };
        assert!(simulate(&d, &medium, BcMode::GutierrezMixed, &f, &g, 1.0, opts).unwrap_err().is_config());
        let l = crate::cell::laminate_analytic(&reference_phases().0, &reference_phases().1, 0.3, 1).unwrap();
        let medium = Medium::Homogenized { l0: l, rho_bar: 1.0 };
        let e = simulate(&d, &medium, BcMode::FullDirichlet, &f, &g, 1.0, DynOptions::default()).unwrap_err();
        assert!(e.is_config());
        let clamped = clamp(&f, &BcMode::FullDirichlet.dofs(&d.grid()));
        assert!(simulate(&d, &medium, BcMode::FullDirichlet, &clamped, &g, 1.0, DynOptions::default()).is_ok());
    }

    #[test]
    fn time_reversible() {
        let d = RectDomain::square_pi(16);
        let medium = Medium::Homogenized { l0: gutierrez(), rho_bar: 1.0 };
        let bc = BcMode::GutierrezMixed;
        let st = Stepper::new(&d, &medium, bc, cfl_dt(&d, &medium, bc).unwrap()).unwrap();
        let f = VectorField {
            u1: vec![Term::sin_sin(0.5, 1.0, 2.0)],
            u2: vec![Term::Trig { amp: 1.0, x: crate::elliptic::TrigFn::Sin, j: 2.0, y: crate::elliptic::TrigFn::Cos, k: 1.0 }],
        }
        .sample(d.grid());
        let mut s = st.init(&f, &FieldGrid::zeros(d.grid())).unwrap();
        let u0 = s.u.clone();
        for _ in 0..500 {
            st.step(&mut s);
        }
        s.reverse();
        for _ in 0..500 {
            st.step(&mut s);
        }
        let err = s.u.iter().zip(&u0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn benchmark_decouples_and_conserves() {
        let r = wave_benchmark(32).unwrap();
        assert!(r.u1_ratio <= 1e-8, "{}", r.u1_ratio);
        assert!(r.energy_drift <= 1e-3, "{}", r.energy_drift);
        assert!(r.max_rel_error < 5e-2, "{}", r.max_rel_error);
        assert_eq!(r.samples.len(), 9);
    }

    #[test]
    fn halving_dt_quarters_drift() {
        let l0 = gutierrez();
        let d = RectDomain::square_pi(32);
        let bound = cfl_dt(&d, &Medium::Homogenized { l0, rho_bar: 1.0 }, BcMode::GutierrezMixed).unwrap();
        let a = wave_benchmark_with(32, &l0, 1.0, DynOptions { dt: Some(bound), samples: 8 }).unwrap();
        let b = wave_benchmark_with(32, &l0, 1.0, DynOptions { dt: Some(bound / 2.0), samples: 8 }).unwrap();
        let ratio = a.energy_drift / b.energy_drift;
        assert!((ratio - 4.0).abs() < 0.6, "{ratio}");
    }

    #[test]
    fn energy_csv_header() {
        let s = EnergySeries { rows: vec![], drift: 0.0 };
        assert_eq!(s.to_csv(), "t,kinetic,strain,total\n");
    }
}
