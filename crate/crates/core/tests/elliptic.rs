use std::f64::consts::PI;

use aether_lab::elasticity::reference_phases;
use aether_lab::elliptic::*;
use aether_lab::microstructure::{Geometry, UnitCell};

fn load() -> LoadSpec {
    let t = Term::sin_sin(1.0, PI, PI);
    LoadSpec::new(vec![t.clone()], vec![t])
}

fn cell(g: Geometry) -> UnitCell {
    let (p1, p2) = reference_phases();
    UnitCell::new(g, p1, p2).unwrap()
}

#[test]
fn gutierrez_layers_weak_gap_shrinks() {
    let c = cell(Geometry::Layers { theta: 0.5, normal: 1 });
    let d = RectDomain::new(1.0, 1.0, 32).unwrap();
    let t = convergence_study(&d, &c, &load(), &[0.25, 0.125, 0.0625], 64).unwrap();
    assert_eq!(t.bc, BcMode::GutierrezMixed);
    let dw: Vec<f64> = t.rows.iter().map(|r| r.d_weak).collect();
    assert!(dw.windows(2).all(|w| w[1] < w[0]), "{dw:?}");
    assert!(dw[2] <= 0.5 * dw[0], "{dw:?}");
}

#[test]
fn inclusion_weak_gap_shrinks() {
    let c = cell(Geometry::Disk { center: [0.5, 0.5], radius: 0.3 });
    let d = RectDomain::new(1.0, 1.0, 32).unwrap();
    let t = convergence_study(&d, &c, &load(), &[0.25, 0.125, 0.0625], 64).unwrap();
    assert_eq!(t.bc, BcMode::FullDirichlet);
    let dw: Vec<f64> = t.rows.iter().map(|r| r.d_weak).collect();
    assert!(dw.windows(2).all(|w| w[1] < w[0]), "{dw:?}");
    assert!(t.orders.iter().all(|o| *o > 0.0));
}

#[test]
fn gutierrez_fixed_eps_solve() {
    let c = cell(Geometry::Layers { theta: 0.5, normal: 1 });
    let e = resolve_m(&RectDomain::square_pi(8), &c, 0.125).unwrap_err();
    assert!(e.to_string().contains("domain.m"), "{e}");
    let d = RectDomain::new(1.0, 1.0, 8).unwrap();
    let m = resolve_m(&d, &c, 0.125).unwrap();
    let d = d.with_m(m);
    assert!(d.h() <= 0.125 / 8.0 + 1e-15);
    let s = solve_eps(&d, &c, 0.125, &load()).unwrap();
    assert!(s.energy < 0.0);
    assert!(s.field.l2() > 0.0 && s.field.l2().is_finite());
    let csv = s.field.to_csv();
    assert!(csv.starts_with("x,y,u1,u2\n"));
    assert_eq!(csv.lines().count(), 1 + (m + 1) * (m + 1));
}

#[test]
fn mixed_homogenized_solution_is_smooth_in_x1_only() {
    let (p1, p2) = reference_phases();
    let (l0, _) = aether_lab::elasticity::gutierrez_tensor(&p1, &p2).unwrap();
    let f = load();
    let coarse = solve_hom(&RectDomain::new(1.0, 1.0, 32).unwrap(), &l0, 1.0, 1.0, &f, BcMode::GutierrezMixed).unwrap();
    let fine = solve_hom(&RectDomain::new(1.0, 1.0, 64).unwrap(), &l0, 1.0, 1.0, &f, BcMode::GutierrezMixed).unwrap();
    assert!(fine.energy <= coarse.energy + 1e-12);
    assert!((fine.energy - coarse.energy).abs() < 1e-2 * fine.energy.abs());
    assert!(solve_hom(&RectDomain::new(1.0, 1.0, 32).unwrap(), &l0, 1.0, 1.0, &f, BcMode::FullDirichlet).is_ok());
}
