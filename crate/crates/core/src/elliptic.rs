//! Dirichlet problems `-div(L(x/ε)∇u) + a(x/ε)u = b(x/ε)f` on rectangles, their
//! homogenized limits, and the weak-convergence study.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize};

use crate::cell::{homogenized_tensor, laminate_analytic, CellGrid};
use crate::elasticity::{iso_tensor, k_transform, Tensor4};
use crate::error::{Error, Result};
use crate::fem::mesh::{ElemMat, ElemVec};
use crate::fem::{
    assemble, assemble_vector, dot, element_load, element_mass, element_stiffness, solve, CgOptions, CsrMatrix,
    DofMap, Grid,
};
use crate::microstructure::{phase_at, volume_fraction, Geometry, Phase, UnitCell};

pub const CG_TOL: f64 = 1e-10;
/// Largest `|L⁰₂₂₂₂|` accepted by the mixed boundary condition.
pub const MIXED_TOL: f64 = 1e-10;

/// Accepts a number or one of `"pi"`, `"2pi"`, `"pi/2"`.
pub fn de_length<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Len {
        Num(f64),
        Text(String),
    }
    match Len::deserialize(d)? {
        Len::Num(v) => Ok(v),
        Len::Text(s) => parse_length(&s).ok_or_else(|| serde::de::Error::custom(format!("unrecognized length `{s}`"))),
    }
}

fn parse_length(s: &str) -> Option<f64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().ok()?),
        None => (t.clone(), 1.0),
    };
    let coef = num.strip_suffix("pi")?.trim_end_matches('*');
    let c = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().ok()? };
    Some(c * PI / den)
}

/// `Ω = (0, a) x (0, b)` meshed with `m` square elements along `x₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectDomain {
    #[serde(deserialize_with = "de_length")]
    pub a: f64,
    #[serde(deserialize_with = "de_length")]
    pub b: f64,
    pub m: usize,
}

impl RectDomain {
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        let d = RectDomain { a, b, m };
        d.validate()?;
        Ok(d)
    }

    pub fn square_pi(m: usize) -> Self {
        RectDomain { a: PI, b: PI, m }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::config("domain", format!("side lengths must be positive, got ({}, {})", self.a, self.b)));
        }
        if self.m < 8 {
            return Err(Error::config("domain.m", format!("must be at least 8, got {}", self.m)));
        }
        let my = self.m as f64 * self.b / self.a;
        if (my - my.round()).abs() > 1e-9 || my.round() < 1.0 {
            return Err(Error::config(
                "domain.m",
                format!("m * b / a = {my} is not an integer; elements must be square"),
            ));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        self.a / self.m as f64
    }

    pub fn my(&self) -> usize {
        (self.m as f64 * self.b / self.a).round() as usize
    }

    pub fn grid(&self) -> Grid {
        Grid::rect(self.m, self.my(), self.h())
    }

    pub fn with_m(&self, m: usize) -> Self {
        RectDomain { m, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BcMode {
    /// `u = 0` on the whole boundary.
    FullDirichlet,
    /// `u₁ = 0` on the boundary, `u₂ = 0` on the vertical sides only.
    GutierrezMixed,
}

impl BcMode {
    pub fn dofs(&self, grid: &Grid) -> DofMap {
        let (nx, ny) = (grid.nx, grid.ny);
        DofMap::with_constraints(grid.n_nodes(), |node, comp| {
            let (i, j) = grid.node_ij(node);
            let vertical = i == 0 || i == nx;
            let horizontal = j == 0 || j == ny;
            match (self, comp) {
                (BcMode::FullDirichlet, _) | (BcMode::GutierrezMixed, 0) => vertical || horizontal,
                _ => vertical,
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrigFn {
    Sin,
    Cos,
    One,
}

impl TrigFn {
    fn eval(self, x: f64) -> f64 {
        match self {
            TrigFn::Sin => x.sin(),
            TrigFn::Cos => x.cos(),
            TrigFn::One => 1.0,
        }
    }
}

fn one() -> f64 {
    1.0
}

/// A closed-form scalar term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Term {
    Constant {
        value: f64,
    },
    /// `amp · x(j x₁) · y(k x₂)`.
    Trig {
        #[serde(default = "one")]
        amp: f64,
        x: TrigFn,
        #[serde(default = "one")]
        j: f64,
        y: TrigFn,
        #[serde(default = "one")]
        k: f64,
    },
    /// `amp · exp(-|x - center|² / (2 width²))`.
    Gaussian {
        #[serde(default = "one")]
        amp: f64,
        center: [f64; 2],
        width: f64,
    },
}

impl Term {
    pub fn sin_sin(amp: f64, j: f64, k: f64) -> Self {
        Term::Trig {
            amp,
            x: TrigFn::Sin,
            j,
            y: TrigFn::Sin,
            k,
        }
    }

    pub fn eval(&self, x: &Vector2<f64>) -> f64 {
        match *self {
            Term::Constant { value } => value,
            Term::Trig { amp, x: fx, j, y: fy, k } => amp * fx.eval(j * x[0]) * fy.eval(k * x[1]),
            Term::Gaussian { amp, center, width } => {
                let d2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                amp * (-d2 / (2.0 * width * width)).exp()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = match *self {
            Term::Constant { value } => value.is_finite(),
            Term::Trig { amp, j, k, .. } => amp.is_finite() && j.is_finite() && k.is_finite(),
            Term::Gaussian { amp, center, width } => {
                if !(width > 0.0) {
                    return Err(Error::config("load.width", format!("must be positive, got {width}")));
                }
                amp.is_finite() && center.iter().all(|c| c.is_finite())
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::config("load", "non-finite term parameter"))
        }
    }
}

/// Per-phase constant weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseWeights {
    pub phase1: f64,
    pub phase2: f64,
}

impl Default for PhaseWeights {
    fn default() -> Self {
        PhaseWeights {
            phase1: 1.0,
            phase2: 1.0,
        }
    }
}

impl PhaseWeights {
    pub fn get(&self, p: Phase) -> f64 {
        match p {
            Phase::One => self.phase1,
            Phase::Two => self.phase2,
        }
    }

    /// Volume average over the cell.
    pub fn mean(&self, cell: &UnitCell) -> f64 {
        let t = volume_fraction(cell);
        t * self.phase1 + (1.0 - t) * self.phase2
    }
}

/// Body force `f = (f1, f2)` as sums of terms, with zeroth-order weight `a`
/// and load weight `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    #[serde(default)]
    pub f1: Vec<Term>,
    #[serde(default)]
    pub f2: Vec<Term>,
    #[serde(default)]
    pub a: PhaseWeights,
    #[serde(default)]
    pub b: PhaseWeights,
    /// Declared lower bound of `a`; defaults to its smaller phase value.
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl LoadSpec {
    pub fn new(f1: Vec<Term>, f2: Vec<Term>) -> Self {
        LoadSpec {
            f1,
            f2,
            a: PhaseWeights::default(),
            b: PhaseWeights::default(),
            alpha: None,
        }
    }

    pub fn zero() -> Self {
        LoadSpec::new(vec![], vec![])
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(self.a.phase1.min(self.a.phase2))
    }

    pub fn validate(&self) -> Result<()> {
        let alpha = self.alpha();
        if !(alpha > 0.0) {
            return Err(Error::config("load.alpha", format!("must be positive, got {alpha}")));
        }
        if self.a.phase1 < alpha || self.a.phase2 < alpha {
            return Err(Error::config(
                "load.a",
                format!("phase values ({}, {}) fall below alpha = {alpha}", self.a.phase1, self.a.phase2),
            ));
        }
        if !(self.b.phase1.is_finite() && self.b.phase2.is_finite()) {
            return Err(Error::config("load.b", "non-finite weight"));
        }
        self.f1.iter().chain(&self.f2).try_for_each(Term::validate)
    }

    pub fn force(&self, x: &Vector2<f64>) -> Vector2<f64> {
        Vector2::new(
            self.f1.iter().map(|t| t.eval(x)).sum(),
            self.f2.iter().map(|t| t.eval(x)).sum(),
        )
    }
}

/// Nodal displacement field on a rectangular grid, interleaved `(u1, u2)`,
/// zeros on constrained dofs.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl FieldGrid {
    pub fn zeros(grid: Grid) -> Self {
        FieldGrid {
            values: vec![0.0; 2 * grid.n_nodes()],
            grid,
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&Vector2<f64>) -> Vector2<f64>) -> Self {
        let mut values = vec![0.0; 2 * grid.n_nodes()];
        for n in 0..grid.n_nodes() {
            let v = f(&grid.node_coords(n));
            values[2 * n] = v[0];
            values[2 * n + 1] = v[1];
        }
        FieldGrid { grid, values }
    }

    pub fn at(&self, i: usize, j: usize) -> Vector2<f64> {
        let n = self.grid.node(i, j);
        Vector2::new(self.values[2 * n], self.values[2 * n + 1])
    }

    /// `∫ u·g` by Gauss quadrature.
    pub fn integrate_against(&self, g: impl Fn(&Vector2<f64>) -> Vector2<f64> + Sync) -> f64 {
        let w = self.grid.quad_weight();
        (0..self.grid.n_elements())
            .into_par_iter()
            .map(|e| {
                let vals = self.grid.element_values(e, &self.values);
                let pts = self.grid.quad_points(e);
                (0..4).map(|q| vals[q].dot(&g(&pts[q]))).sum::<f64>()
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum::<f64>()
            * w
    }

    /// Per-component `L²` norms.
    pub fn component_l2(&self) -> [f64; 2] {
        let w = self.grid.quad_weight();
        let mut s = [0.0; 2];
        for e in 0..self.grid.n_elements() {
            for v in self.grid.element_values(e, &self.values) {
                s[0] += v[0] * v[0];
                s[1] += v[1] * v[1];
            }
        }
        [(s[0] * w).sqrt(), (s[1] * w).sqrt()]
    }

    pub fn l2(&self) -> f64 {
        let [a, b] = self.component_l2();
        a.hypot(b)
    }

    /// `‖u - exact‖_{L²}` by Gauss quadrature.
    pub fn l2_error(&self, exact: impl Fn(&Vector2<f64>) -> Vector2<f64>) -> f64 {
        let w = self.grid.quad_weight();
        let mut s = 0.0;
        for e in 0..self.grid.n_elements() {
            let vals = self.grid.element_values(e, &self.values);
            let pts = self.grid.quad_points(e);
            for q in 0..4 {
                s += (vals[q] - exact(&pts[q])).norm_squared();
            }
        }
        (s * w).sqrt()
    }

    /// `‖u_c - exact‖_{L²}` for one component.
    pub fn component_l2_error(&self, comp: usize, exact: impl Fn(&Vector2<f64>) -> f64) -> f64 {
        let w = self.grid.quad_weight();
        let mut s = 0.0;
        for e in 0..self.grid.n_elements() {
            let vals = self.grid.element_values(e, &self.values);
            let pts = self.grid.quad_points(e);
            for q in 0..4 {
                s += (vals[q][comp] - exact(&pts[q])).powi(2);
            }
        }
        (s * w).sqrt()
    }

    /// `‖∂u₂/∂x₂‖_{L²}`.
    pub fn dx2_u2_l2(&self) -> f64 {
        let w = self.grid.quad_weight();
        let mut s = 0.0;
        for e in 0..self.grid.n_elements() {
            for g in self.grid.element_gradients(e, &self.values) {
                s += g[(1, 1)] * g[(1, 1)];
            }
        }
        (s * w).sqrt()
    }

    pub fn sub(&self, other: &FieldGrid) -> FieldGrid {
        assert_eq!(self.grid, other.grid);
        FieldGrid {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y,u1,u2\n");
        for n in 0..self.grid.n_nodes() {
            let x = self.grid.node_coords(n);
            s.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                x[0],
                x[1],
                self.values[2 * n],
                self.values[2 * n + 1]
            ));
        }
        s
    }
}

/// Assembled linear system `(A + M_a) u = F` over the free dofs.
pub struct System {
    pub grid: Grid,
    pub dofs: DofMap,
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub load: Vec<f64>,
}

impl System {
    pub fn operator(&self) -> CsrMatrix {
        self.stiffness.add_scaled(1.0, &self.mass)
    }

    fn solve(&self) -> Result<Solution> {
        let op = self.operator();
        let mut x = vec![0.0; self.dofs.n_free()];
        let max_iter = (20 * self.dofs.n_free()).max(1000);
        let rep = solve(&op, &self.load, &mut x, CgOptions::new(CG_TOL, max_iter))?;
        let ax = op.matvec(&x);
        let energy = dot(&x, &ax) - 2.0 * dot(&self.load, &x);
        Ok(Solution {
            field: FieldGrid {
                grid: self.grid,
                values: self.dofs.expand(&x),
            },
            energy,
            iterations: rep.iterations,
            dofs: self.dofs.n_free(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: FieldGrid,
    /// `∫ L∇u·∇u + a|u|² - 2b f·u`.
    pub energy: f64,
    pub iterations: usize,
    pub dofs: usize,
}

pub(crate) fn build_system(
    grid: Grid,
    dofs: DofMap,
    tensor_at: impl Fn(&Vector2<f64>) -> Matrix4<f64> + Sync,
    a_at: impl Fn(&Vector2<f64>) -> f64 + Sync,
    bf_at: impl Fn(&Vector2<f64>) -> Vector2<f64> + Sync,
) -> System {
    let h = grid.h;
    let elems: Vec<(ElemMat, ElemMat, ElemVec)> = (0..grid.n_elements())
        .into_par_iter()
        .map(|e| {
            let pts = grid.quad_points(e);
            (
                element_stiffness(&pts.map(|x| tensor_at(&x)), h),
                element_mass(&pts.map(|x| a_at(&x)), h),
                element_load(&pts.map(|x| bf_at(&x)), h),
            )
        })
        .collect();
    let stiffness = assemble(&grid, &dofs, |e| elems[e].0);
    let mass = assemble(&grid, &dofs, |e| elems[e].1);
    let load = assemble_vector(&grid, &dofs, |e| elems[e].2);
    System {
        grid,
        dofs,
        stiffness,
        mass,
        load,
    }
}

pub(crate) fn is_integral(x: f64) -> bool {
    (x - x.round()).abs() <= 1e-9 * x.abs().max(1.0)
}

/// Checks `h ≤ ε/8` for two-phase cells and, for layers, that interfaces fall on element edges.
pub fn check_resolution(domain: &RectDomain, cell: &UnitCell, eps: f64) -> Result<()> {
    domain.validate()?;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::config("eps", format!("must lie in (0, 1], got {eps}")));
    }
    let h = domain.h();
    if !cell.is_homogeneous() && h > eps / 8.0 * (1.0 + 1e-12) {
        return Err(Error::config(
            "domain.m",
            format!("element size {h:.4e} exceeds eps/8 = {:.4e}", eps / 8.0),
        ));
    }
    if let Geometry::Layers { theta, .. } = cell.geometry {
        if !cell.is_homogeneous() && !(is_integral(eps / h) && is_integral(eps * theta / h)) {
            return Err(Error::config(
                "domain.m",
                format!("layer interfaces at eps = {eps} do not align with the grid (eps/h = {})", eps / h),
            ));
        }
    }
    Ok(())
}

/// Assembles the fixed-ε system with `K(x/ε) = L + 2μ₁ cof` under full
/// Dirichlet conditions.
pub fn eps_system(domain: &RectDomain, cell: &UnitCell, eps: f64, load: &LoadSpec) -> Result<System> {
    check_resolution(domain, cell, eps)?;
    load.validate()?;
    let mu1 = cell.phase1.mu;
    let k1 = *k_transform(&iso_tensor(&cell.phase1), mu1).matrix();
    let k2 = *k_transform(&iso_tensor(&cell.phase2), mu1).matrix();
    let grid = domain.grid();
    let dofs = BcMode::FullDirichlet.dofs(&grid);
    let phase = |x: &Vector2<f64>| phase_at(cell, &(x / eps));
    Ok(build_system(
        grid,
        dofs,
        |x| match phase(x) {
            Phase::One => k1,
            Phase::Two => k2,
        },
        |x| load.a.get(phase(x)),
        |x| load.force(x) * load.b.get(phase(x)),
    ))
}

/// Stiffness of the same fixed-ε problem assembled with `L` itself.
pub fn eps_l_stiffness(domain: &RectDomain, cell: &UnitCell, eps: f64) -> Result<CsrMatrix> {
    check_resolution(domain, cell, eps)?;
    let l1 = *iso_tensor(&cell.phase1).matrix();
    let l2 = *iso_tensor(&cell.phase2).matrix();
    let grid = domain.grid();
    let dofs = BcMode::FullDirichlet.dofs(&grid);
    let sys = build_system(
        grid,
        dofs,
        |x| match phase_at(cell, &(x / eps)) {
            Phase::One => l1,
            Phase::Two => l2,
        },
        |_| 0.0,
        |_| Vector2::zeros(),
    );
    Ok(sys.stiffness)
}

pub fn solve_eps(domain: &RectDomain, cell: &UnitCell, eps: f64, load: &LoadSpec) -> Result<Solution> {
    eps_system(domain, cell, eps, load)?.solve()
}

/// Stiffness tensor used by the homogenized solve: `L⁰` itself, or in mixed
/// mode `L⁰ - L⁰₁₁₂₂ cof`, which trades the `∂₁u₁ ∂₂u₂` pairing for
/// `∂₂u₁ ∂₁u₂`.
pub fn hom_tensor(l0: &Tensor4, bc: BcMode) -> Result<Tensor4> {
    match bc {
        BcMode::FullDirichlet => Ok(*l0),
        BcMode::GutierrezMixed => {
            let l2222 = l0.entry(2, 2, 2, 2);
            if l2222.abs() > MIXED_TOL {
                return Err(Error::config(
                    "bc",
                    format!("gutierrez-mixed requires L2222 = 0, got {l2222:.3e}"),
                ));
            }
            Ok(k_transform(l0, -0.5 * l0.entry(1, 1, 2, 2)))
        }
    }
}

pub fn hom_system(domain: &RectDomain, l0: &Tensor4, abar: f64, bbar: f64, f: &LoadSpec, bc: BcMode) -> Result<System> {
    domain.validate()?;
    f.validate()?;
    if !(abar > 0.0) {
        return Err(Error::config("abar", format!("must be positive, got {abar}")));
    }
    let c = *hom_tensor(l0, bc)?.matrix();
    let grid = domain.grid();
    let dofs = bc.dofs(&grid);
    Ok(build_system(grid, dofs, |_| c, |_| abar, |x| f.force(x) * bbar))
}

/// Minimizer of `∫ L⁰∇v·∇v + ā|v|² - 2b̄ f·v`; only the force terms of `f`
/// are used.
pub fn solve_hom(domain: &RectDomain, l0: &Tensor4, abar: f64, bbar: f64, f: &LoadSpec, bc: BcMode) -> Result<Solution> {
    hom_system(domain, l0, abar, bbar, f, bc)?.solve()
}

/// Homogenized tensor of a cell: the closed form for layers, a cell solve at
/// resolution `n_cell` otherwise.
pub fn cell_tensor(cell: &UnitCell, n_cell: usize) -> Result<Tensor4> {
    match cell.geometry {
        Geometry::Layers { theta, normal } => laminate_analytic(&cell.phase1, &cell.phase2, theta, normal),
        Geometry::Disk { .. } => homogenized_tensor(cell, &CellGrid::new(cell, n_cell)?),
    }
}

/// Unit test directions `sin(jπx₁/a) sin(kπx₂/b) e_i`, `j, k, i ∈ {1, 2}`.
pub fn test_battery() -> Vec<(usize, usize, usize)> {
    let mut v = Vec::with_capacity(8);
    for j in 1..=2 {
        for k in 1..=2 {
            for i in 0..2 {
                v.push((j, k, i));
            }
        }
    }
    v
}

/// `max_φ |∫ w·φ| / ‖φ‖` over the test battery.
pub fn weak_distance(domain: &RectDomain, w: &FieldGrid) -> f64 {
    let norm = (domain.a * domain.b).sqrt() / 2.0;
    test_battery()
        .into_iter()
        .map(|(j, k, i)| {
            let (a, b) = (domain.a, domain.b);
            let v = w.integrate_against(|x| {
                let s = (j as f64 * PI * x[0] / a).sin() * (k as f64 * PI * x[1] / b).sin();
                let mut out = Vector2::zeros();
                out[i] = s;
                out
            });
            v.abs() / norm
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub m: usize,
    pub dofs: usize,
    pub d_weak: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub bc: BcMode,
    /// `log(d_i/d_{i+1}) / log(ε_i/ε_{i+1})` for consecutive rows.
    pub orders: Vec<f64>,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,dofs,d_weak,energy\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{:.12e},{:.12e}\n", r.eps, r.dofs, r.d_weak, r.energy));
        }
        s
    }
}

/// Smallest `m ≥ domain.m` satisfying the resolution rules at `eps`, with a
/// whole number of elements per period when one exists.
pub fn resolve_m(domain: &RectDomain, cell: &UnitCell, eps: f64) -> Result<usize> {
    let start = domain.m.max((8.0 * domain.a / eps).ceil() as usize);
    let end = start.saturating_mul(64).max(start + 1);
    let ok = |m: usize| {
        let d = domain.with_m(m);
        d.validate().is_ok() && check_resolution(&d, cell, eps).is_ok()
    };
    (start..end)
        .find(|&m| ok(m) && is_integral(eps * m as f64 / domain.a))
        .or_else(|| (start..end).find(|&m| ok(m)))
        .ok_or_else(|| Error::config("domain.m", format!("no admissible resolution found for eps = {eps}")))
}

/// Homogenized tensor seen by a fixed-ε grid: for inclusions it is computed on
/// the cell grid that the ε-periods are sampled on, when the periods align.
fn tensor_for(cell: &UnitCell, eps: f64, h: f64, n_cell: usize) -> Result<Tensor4> {
    if let Geometry::Disk { .. } = cell.geometry {
        let per = eps / h;
        let k = per.round() as usize;
        if is_integral(per) && k >= 8 && k.is_multiple_of(2) {
            return cell_tensor(cell, k);
        }
    }
    cell_tensor(cell, n_cell)
}

/// Weak distance between `u^ε` and the homogenized solution for each ε. The
/// mixed condition is used when `L⁰₂₂₂₂` vanishes.
pub fn convergence_study(
    domain: &RectDomain,
    cell: &UnitCell,
    load: &LoadSpec,
    eps_list: &[f64],
    n_cell: usize,
) -> Result<ConvergenceTable> {
    if eps_list.is_empty() {
        return Err(Error::config("eps", "empty list"));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::config("eps", "must be strictly decreasing"));
    }
    let ms = eps_list
        .iter()
        .map(|&e| resolve_m(domain, cell, e))
        .collect::<Result<Vec<_>>>()?;
    load.validate()?;
    let (abar, bbar) = (load.a.mean(cell), load.b.mean(cell));
    let rows = eps_list
        .par_iter()
        .zip(&ms)
        .map(|(&eps, &m)| {
            let d = domain.with_m(m);
            let l0 = tensor_for(cell, eps, d.h(), n_cell)?;
            let bc = if l0.entry(2, 2, 2, 2).abs() <= MIXED_TOL {
                BcMode::GutierrezMixed
            } else {
                BcMode::FullDirichlet
            };
            let ue = solve_eps(&d, cell, eps, load)?;
            let u0 = solve_hom(&d, &l0, abar, bbar, load, bc)?;
            Ok((
                ConvergenceRow {
                    eps,
                    m,
                    dofs: ue.dofs,
                    d_weak: weak_distance(&d, &ue.field.sub(&u0.field)),
                    energy: ue.energy,
                },
                bc,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let bc = rows[0].1;
    let rows: Vec<ConvergenceRow> = rows.into_iter().map(|r| r.0).collect();
    let orders = rows
        .windows(2)
        .map(|w| (w[0].d_weak / w[1].d_weak).ln() / (w[0].eps / w[1].eps).ln())
        .collect();
    Ok(ConvergenceTable { rows, bc, orders })
}
