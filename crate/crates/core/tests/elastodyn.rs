use std::f64::consts::PI;
use std::sync::OnceLock;

use aether_lab::cell::{homogenized_tensor, CellGrid};
use aether_lab::elasticity::{gutierrez_tensor, reference_phases};
use aether_lab::elastodyn::*;
use aether_lab::elliptic::{BcMode, RectDomain};
use aether_lab::microstructure::{Geometry, UnitCell};

fn gutierrez_cell() -> UnitCell {
    let (p1, p2) = reference_phases();
    UnitCell::new(Geometry::Layers { theta: 0.5, normal: 1 }, p1, p2).unwrap()
}

/// Fixed-ε Gutiérrez run: ε = 1/8 on (0, π)², benchmark data, T = 2π.
fn fixed_eps_run() -> &'static (Trajectory, EnergySeries) {
    static RUN: OnceLock<(Trajectory, EnergySeries)> = OnceLock::new();
    RUN.get_or_init(|| {
        let d = RectDomain::square_pi(204);
        let medium = Medium::FixedEps {
            cell: gutierrez_cell(),
            eps: 0.125,
        };
        let grid = d.grid();
        let dofs = BcMode::FullDirichlet.dofs(&grid);
        let u0 = clamp(&benchmark_initial().sample(grid), &dofs);
        let v0 = u0.sub(&u0);
        let traj = simulate(&d, &medium, BcMode::FullDirichlet, &u0, &v0, 2.0 * PI, DynOptions::default()).unwrap();
        let es = energy_series(&traj);
        (traj, es)
    })
}

#[test]
fn fixed_eps_horizontal_trace_stays_zero() {
    let (traj, es) = fixed_eps_run();
    for s in &traj.snapshots {
        assert_eq!(horizontal_trace(&s.u), 0.0, "t = {}", s.t);
    }
    assert!(es.rows.iter().all(|r| r.total.is_finite()));
}

#[test]
fn fixed_eps_energy_conserved() {
    let (_, es) = fixed_eps_run();
    assert!(es.drift <= 1e-3, "relative energy drift {:.3e} over T = 2π", es.drift);
}

#[test]
fn mixed_benchmark_has_nonzero_horizontal_trace() {
    let (p1, p2) = reference_phases();
    let (l0, _) = gutierrez_tensor(&p1, &p2).unwrap();
    let d = RectDomain::square_pi(32);
    let grid = d.grid();
    let u0 = benchmark_initial().sample(grid);
    let v0 = u0.sub(&u0);
    let m = Medium::Homogenized { l0, rho_bar: 1.0 };
    let traj = simulate(&d, &m, BcMode::GutierrezMixed, &u0, &v0, PI, DynOptions::default()).unwrap();
    let trace = horizontal_trace(&traj.snapshots[0].u);
    assert!((trace - 2.0).abs() < 1e-12, "{trace}");
    assert!(traj.snapshots.iter().skip(1).any(|s| horizontal_trace(&s.u) > 0.1));
}

#[test]
fn full_dirichlet_rules_out_the_plane_wave() {
    let (p1, p2) = reference_phases();
    let cell = UnitCell::new(Geometry::Disk { center: [0.5, 0.5], radius: 0.3 }, p1, p2).unwrap();
    let l0 = homogenized_tensor(&cell, &CellGrid::new(&cell, 64).unwrap()).unwrap();
    assert!(l0.entry(2, 2, 2, 2) > 1e-3);
    let c = transverse_speed(&l0, 1.0);
    let d = RectDomain::square_pi(48);
    let grid = d.grid();
    let dofs = BcMode::FullDirichlet.dofs(&grid);
    let u0 = clamp(&benchmark_initial().sample(grid), &dofs);
    let v0 = u0.sub(&u0);
    let opts = DynOptions { dt: None, samples: 64 };
    let m = Medium::Homogenized { l0, rho_bar: 1.0 };
    let traj = simulate(&d, &m, BcMode::FullDirichlet, &u0, &v0, PI / c, opts).unwrap();
    let corr: Vec<f64> = traj
        .snapshots
        .iter()
        .filter_map(|s| profile_correlation(&s.u, 1e-8))
        .collect();
    assert!(corr[0] > 0.99);
    let min = corr.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min < 0.9, "min correlation {min}");
}

#[test]
fn mixed_benchmark_stays_on_profile() {
    let (p1, p2) = reference_phases();
    let (l0, _) = gutierrez_tensor(&p1, &p2).unwrap();
    let c = transverse_speed(&l0, 1.0);
    let d = RectDomain::square_pi(32);
    let grid = d.grid();
    let u0 = benchmark_initial().sample(grid);
    let v0 = u0.sub(&u0);
    let opts = DynOptions { dt: None, samples: 16 };
    let m = Medium::Homogenized { l0, rho_bar: 1.0 };
    let traj = simulate(&d, &m, BcMode::GutierrezMixed, &u0, &v0, 0.9 * PI / c, opts).unwrap();
    for s in &traj.snapshots {
        if let Some(r) = profile_correlation(&s.u, 1e-8) {
            assert!(r > 0.999, "t = {}: {r}", s.t);
        }
    }
}

#[test]
fn benchmark_converges_at_second_order() {
    let reps: Vec<_> = [32, 64, 128].iter().map(|&m| wave_benchmark(m).unwrap()).collect();
    assert!(reps[2].max_rel_error <= 1e-2);
    let orders = observed_orders(&reps);
    let overall = (reps[0].max_rel_error / reps[2].max_rel_error).log2() / 2.0;
    assert!((overall - 2.0).abs() <= 0.3, "{orders:?} {overall}");
    for r in &reps {
        assert!(r.energy_drift <= 1e-3);
        assert!(r.u1_ratio <= 1e-8);
    }
}
