//! Periodic cell problems on `Y = [0, 1)²`: correctors, the homogenized tensor,
//! the layered closed form, and the periodic coercivity constant `Λ_per`.

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::elasticity::tensor::coords;
use crate::elasticity::{iso_tensor, k_transform, se_constant, IsotropicPhase, Tensor4};
use crate::error::{Error, Result};
use crate::fem::mesh::ElemMat;
use crate::fem::{
    assemble, assemble_vector, dot, element_macro_load, element_stiffness, solve, CgOptions, CsrMatrix, DofMap,
    Grid,
};
use crate::microstructure::{phase_at, Geometry, Phase, UnitCell};

pub const CG_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-8;
/// Zero-mean tolerance for correctors.
pub const MEAN_TOL: f64 = 1e-12;

/// Periodic `n x n` grid on the unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGrid {
    pub n: usize,
    pub grid: Grid,
}

impl CellGrid {
    /// For layered cells `θ·n` must be an integer so interfaces sit on
    /// element edges.
    pub fn new(cell: &UnitCell, n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::config("grid.n", format!("must be even and at least 8, got {n}")));
        }
        if let Geometry::Layers { theta, .. } = cell.geometry {
            let k = theta * n as f64;
            if (k - k.round()).abs() > 1e-9 {
                return Err(Error::config(
                    "grid.n",
                    format!("theta * n = {k} is not an integer; layer interfaces would cut elements"),
                ));
            }
        }
        Ok(CellGrid {
            n,
            grid: Grid::periodic_unit(n),
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.grid.n_nodes()
    }
}

/// Removes the mean of each displacement component.
pub fn project_zero_mean(v: &mut [f64]) {
    let half = v.len() / 2;
    if half == 0 {
        return;
    }
    for c in 0..2 {
        let mean = v.iter().skip(c).step_by(2).sum::<f64>() / half as f64;
        v.iter_mut().skip(c).step_by(2).for_each(|x| *x -= mean);
    }
}

/// Periodic fluctuation `v` for the macroscopic gradient `m`, stored as
/// interleaved nodal values `(v1, v2)`.
#[derive(Debug, Clone)]
pub struct CorrectorField {
    pub grid: CellGrid,
    pub m: Matrix2<f64>,
    pub values: Vec<f64>,
    pub iterations: usize,
}

impl CorrectorField {
    /// Largest absolute component mean.
    pub fn mean_error(&self) -> f64 {
        let half = (self.values.len() / 2) as f64;
        (0..2)
            .map(|c| (self.values.iter().skip(c).step_by(2).sum::<f64>() / half).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Largest `|∂v/∂y₂|` over all quadrature points.
    pub fn max_dy2(&self) -> f64 {
        let g = &self.grid.grid;
        (0..g.n_elements())
            .flat_map(|e| g.element_gradients(e, &self.values))
            .map(|gr| gr[(0, 1)].abs().max(gr[(1, 1)].abs()))
            .fold(0.0, f64::max)
    }

    /// Nodal value at lattice point `(i, j)`.
    pub fn at(&self, i: usize, j: usize) -> Vector2<f64> {
        let k = self.grid.grid.node(i, j);
        Vector2::new(self.values[2 * k], self.values[2 * k + 1])
    }
}

/// Discretized cell problem with the stiffness matrix assembled once.
pub struct CellProblem {
    pub cell: UnitCell,
    pub grid: CellGrid,
    coeffs: Vec<[Matrix4<f64>; 4]>,
    dofs: DofMap,
    stiffness: CsrMatrix,
}

fn sample_coefficients(cell: &UnitCell, grid: &Grid, tensor: impl Fn(&IsotropicPhase) -> Tensor4 + Sync) -> Vec<[Matrix4<f64>; 4]> {
    let t1 = *tensor(&cell.phase1).matrix();
    let t2 = *tensor(&cell.phase2).matrix();
    (0..grid.n_elements())
        .into_par_iter()
        .map(|e| {
            grid.quad_points(e).map(|y| match phase_at(cell, &y) {
                Phase::One => t1,
                Phase::Two => t2,
            })
        })
        .collect()
}

fn assemble_stiffness(grid: &Grid, dofs: &DofMap, coeffs: &[[Matrix4<f64>; 4]]) -> CsrMatrix {
    let h = grid.h;
    let kes: Vec<ElemMat> = coeffs.par_iter().map(|c| element_stiffness(c, h)).collect();
    assemble(grid, dofs, |e| kes[e])
}

impl CellProblem {
    pub fn new(cell: &UnitCell, grid: CellGrid) -> Self {
        let coeffs = sample_coefficients(cell, &grid.grid, iso_tensor);
        let dofs = DofMap::all_free(grid.n_nodes());
        let stiffness = assemble_stiffness(&grid.grid, &dofs, &coeffs);
        CellProblem {
            cell: *cell,
            grid,
            coeffs,
            dofs,
            stiffness,
        }
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Stiffness assembled from `K = L + 2μ₁ cof` instead of `L`.
    pub fn k_stiffness(&self) -> CsrMatrix {
        let mu1 = self.cell.phase1.mu;
        let coeffs = sample_coefficients(&self.cell, &self.grid.grid, |p| k_transform(&iso_tensor(p), mu1));
        assemble_stiffness(&self.grid.grid, &self.dofs, &coeffs)
    }

    /// Gram matrix of `∫ ∇u·∇v`.
    pub fn gradient_gram(&self) -> CsrMatrix {
        let id = Matrix4::identity();
        let ke = element_stiffness(&[id; 4], self.grid.grid.h);
        assemble(&self.grid.grid, &self.dofs, |_| ke)
    }

    pub fn load(&self, m: &Matrix2<f64>) -> Vec<f64> {
        let h = self.grid.grid.h;
        assemble_vector(&self.grid.grid, &self.dofs, |e| element_macro_load(&self.coeffs[e], m, h))
    }

    pub fn max_iterations(&self) -> usize {
        20 * self.grid.n * self.grid.n
    }

    pub fn solve(&self, m: &Matrix2<f64>) -> Result<CorrectorField> {
        self.solve_from(m, vec![0.0; self.dofs.n_free()])
    }

    /// Corrector from an explicit CG start vector.
    pub fn solve_from(&self, m: &Matrix2<f64>, start: Vec<f64>) -> Result<CorrectorField> {
        let b = self.load(m);
        let mut x = start;
        let opts = CgOptions::new(CG_TOL, self.max_iterations()).with_projector(&project_zero_mean);
        let rep = solve(&self.stiffness, &b, &mut x, opts)?;
        project_zero_mean(&mut x);
        Ok(CorrectorField {
            grid: self.grid,
            m: *m,
            values: x,
            iterations: rep.iterations,
        })
    }

    /// `∫ C (M + ∇v)·(N + ∇w)` with `C` sampled per element.
    fn form_with(&self, coeffs: &[[Matrix4<f64>; 4]], a: &CorrectorField, b: &CorrectorField) -> f64 {
        let g = &self.grid.grid;
        let w = g.quad_weight();
        (0..g.n_elements())
            .map(|e| {
                let ga = g.element_gradients(e, &a.values);
                let gb = g.element_gradients(e, &b.values);
                (0..4)
                    .map(|q| {
                        let va = coords(&(a.m + ga[q]));
                        let vb = coords(&(b.m + gb[q]));
                        vb.dot(&(coeffs[e][q] * va))
                    })
                    .sum::<f64>()
                    * w
            })
            .sum()
    }

    /// `∫ L (M + ∇v_M)·(M' + ∇v_M')`.
    pub fn polarized_energy(&self, a: &CorrectorField, b: &CorrectorField) -> f64 {
        self.form_with(&self.coeffs, a, b)
    }

    pub fn energy(&self, f: &CorrectorField) -> f64 {
        self.polarized_energy(f, f)
    }

    /// `∫ K (M + ∇v)·(M + ∇v)` with `K = L + 2μ₁ cof`.
    pub fn k_energy(&self, f: &CorrectorField) -> f64 {
        let mu1 = self.cell.phase1.mu;
        let coeffs = sample_coefficients(&self.cell, &self.grid.grid, |p| k_transform(&iso_tensor(p), mu1));
        self.form_with(&coeffs, f, f)
    }

    pub fn homogenized_tensor(&self) -> Result<Tensor4> {
        let loads = symmetric_loads();
        let fields = loads
            .par_iter()
            .map(|m| self.solve(m))
            .collect::<Result<Vec<_>>>()?;
        let mut s = Matrix3::zeros();
        for a in 0..3 {
            for b in a..3 {
                let v = self.polarized_energy(&fields[a], &fields[b]);
                s[(a, b)] = v;
                s[(b, a)] = v;
            }
        }
        Ok(complete_from_symmetric(&s).symmetrized())
    }
}

/// `e₁⊗e₁`, `e₂⊗e₂`, `e₁⊗e₂ + e₂⊗e₁`.
pub fn symmetric_loads() -> [Matrix2<f64>; 3] {
    [
        Matrix2::new(1.0, 0.0, 0.0, 0.0),
        Matrix2::new(0.0, 0.0, 0.0, 1.0),
        Matrix2::new(0.0, 1.0, 1.0, 0.0),
    ]
}

/// Builds the minor-symmetric tensor whose form on the symmetric loads is `s`.
fn complete_from_symmetric(s: &Matrix3<f64>) -> Tensor4 {
    // sym(M) = M11 e11 + M22 e22 + (M12 + M21)/2 (e12 + e21)
    let p = nalgebra::Matrix3x4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        0.0, 0.5, 0.5, 0.0,
    );
    Tensor4::from_matrix(p.transpose() * s * p)
}

pub fn solve_corrector(cell: &UnitCell, grid: &CellGrid, m: &Matrix2<f64>) -> Result<CorrectorField> {
    CellProblem::new(cell, *grid).solve(m)
}

pub fn homogenized_tensor(cell: &UnitCell, grid: &CellGrid) -> Result<Tensor4> {
    CellProblem::new(cell, *grid).homogenized_tensor()
}

/// Rank-one laminate: phase 1 fills `0 < y_n < θ` with normal `e_n`,
/// `n ∈ {1, 2}`. Each layer carries a constant corrector gradient `ξ_p ⊗ e_n`.
pub fn laminate_analytic(p1: &IsotropicPhase, p2: &IsotropicPhase, theta: f64, normal: u8) -> Result<Tensor4> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::config("theta", format!("must lie in (0, 1), got {theta}")));
    }
    if normal != 1 && normal != 2 {
        return Err(Error::config("normal", format!("must be 1 or 2, got {normal}")));
    }
    let l1 = iso_tensor(p1);
    let l2 = iso_tensor(p2);
    let nv = if normal == 1 { Vector2::x() } else { Vector2::y() };
    let sys = l1.acoustic(&nv) * (1.0 - theta) + l2.acoustic(&nv) * theta;
    let det = sys.determinant();
    let scale = sys.amax().max(1.0);
    if det.abs() <= 1e-14 * scale * scale {
        return Err(Error::SingularLaminate { determinant: det });
    }
    let inv = sys.try_inverse().ok_or(Error::SingularLaminate { determinant: det })?;
    let mut out = Matrix4::zeros();
    for col in 0..4 {
        let mut m = Matrix2::zeros();
        m[(col / 2, col % 2)] = 1.0;
        let jump = (l2.apply(&m) - l1.apply(&m)) * nv;
        let s = inv * jump;
        let xi1 = s * (1.0 - theta);
        let xi2 = -s * theta;
        let stress = l1.apply(&(m + xi1 * nv.transpose())) * theta
            + l2.apply(&(m + xi2 * nv.transpose())) * (1.0 - theta);
        out.set_column(col, &coords(&stress));
    }
    Ok(Tensor4::from_matrix(out))
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaReport {
    pub value: f64,
    pub iterations: usize,
    pub shift: f64,
    /// Ritz values of the final block, ascending.
    pub ritz: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct LambdaOptions {
    pub block: usize,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for LambdaOptions {
    fn default() -> Self {
        LambdaOptions {
            block: 4,
            rel_tol: EIGEN_TOL,
            max_iter: 1000,
            seed: 7,
        }
    }
}

pub fn lambda_per_estimate(cell: &UnitCell, grid: &CellGrid) -> Result<f64> {
    lambda_per_report(cell, grid, LambdaOptions::default()).map(|r| r.value)
}

/// Smallest eigenvalue of `A x = Λ G x` on zero-mean periodic fields.
///
/// Block inverse iteration on `A - σG` with Rayleigh-Ritz. The shift lies
/// below the smallest eigenvalue of every phase tensor, which bounds `Λ_per`
/// from below, so the shifted operator is positive definite.
pub fn lambda_per_report(cell: &UnitCell, grid: &CellGrid, opts: LambdaOptions) -> Result<LambdaReport> {
    let prob = CellProblem::new(cell, *grid);
    let a = prob.stiffness();
    let g = prob.gradient_gram();
    let pointwise = |p: &IsotropicPhase| {
        let t = iso_tensor(p);
        let e = t.matrix().symmetric_eigen().eigenvalues;
        (e.min(), e.max())
    };
    let (lo1, hi1) = pointwise(&cell.phase1);
    let (lo2, hi2) = pointwise(&cell.phase2);
    let lo = lo1.min(lo2);
    let scale = hi1.max(hi2).abs().max(lo.abs()).max(1e-300);
    let shift = lo - 1e-2 * scale;
    let shifted = a.add_scaled(-shift, &g);

    let n = a.n();
    let b = opts.block.max(1).min(n.saturating_sub(2).max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = (0..b)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            project_zero_mean(&mut v);
            v
        })
        .collect();

    let max_inner = prob.max_iterations();
    let mut prev = f64::NAN;
    let mut last = f64::NAN;
    for it in 0..opts.max_iter {
        let ys = x
            .par_iter()
            .map(|xi| {
                let rhs = g.matvec(xi);
                let mut y = xi.clone();
                let copts = CgOptions::new(CG_TOL, max_inner).with_projector(&project_zero_mean);
                solve(&shifted, &rhs, &mut y, copts)?;
                Ok(y)
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = g_orthonormalize(ys, &g);
        let k = basis.len();
        let ab: Vec<Vec<f64>> = basis.iter().map(|v| a.matvec(v)).collect();
        let proj = DMatrix::from_fn(k, k, |r, c| 0.5 * (dot(&basis[r], &ab[c]) + dot(&basis[c], &ab[r])));
        let eig = proj.symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let ritz: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        x = order
            .iter()
            .map(|&i| {
                let mut v = vec![0.0; n];
                for (r, br) in basis.iter().enumerate() {
                    crate::fem::axpy(eig.eigenvectors[(r, i)], br, &mut v);
                }
                v
            })
            .collect();
        prev = last;
        last = ritz[0];
        if it > 0 && (last - prev).abs() <= opts.rel_tol * last.abs().max(1e-300) {
            return Ok(LambdaReport {
                value: last,
                iterations: it + 1,
                shift,
                ritz,
            });
        }
    }
    Err(Error::EigenStagnation {
        iterations: opts.max_iter,
        previous: prev,
        last,
    })
}

/// Modified Gram-Schmidt in the `G` inner product; drops dependent vectors.
fn g_orthonormalize(mut vs: Vec<Vec<f64>>, g: &CsrMatrix) -> Vec<Vec<f64>> {
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(vs.len());
    for v in vs.iter_mut() {
        for _ in 0..2 {
            for (q, gq) in &out {
                let c = dot(v, gq);
                crate::fem::axpy(-c, q, v);
            }
        }
        let gv = g.matvec(v);
        let nrm = dot(v, &gv);
        if nrm > 1e-28 {
            let s = 1.0 / nrm.sqrt();
            let q: Vec<f64> = v.iter().map(|x| x * s).collect();
            let gq: Vec<f64> = gv.iter().map(|x| x * s).collect();
            out.push((q, gq));
        }
    }
    out.into_iter().map(|(q, _)| q).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub l1111: f64,
    pub l1122: f64,
    pub l1212: f64,
    pub l2222: f64,
    pub se_constant: f64,
    /// `|L2222| ≤ 1e-10`.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaSweep {
    pub rows: Vec<SweepRow>,
    /// Row index with the smallest `L2222`.
    pub argmin: usize,
}

impl ThetaSweep {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,L1111,L1122,L1212,L2222,se_constant\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                r.theta, r.l1111, r.l1122, r.l1212, r.l2222, r.se_constant
            ));
        }
        s
    }
}

pub const DEGENERATE_TOL: f64 = 1e-10;

/// Layered laminates (normal `e₁`) over a list of volume fractions.
pub fn theta_sweep(p1: &IsotropicPhase, p2: &IsotropicPhase, thetas: &[f64]) -> Result<ThetaSweep> {
    if thetas.is_empty() {
        return Err(Error::config("thetas", "empty list"));
    }
    let rows = thetas
        .iter()
        .map(|&theta| {
            let l = laminate_analytic(p1, p2, theta, 1)?;
            let l2222 = l.entry(2, 2, 2, 2);
            Ok(SweepRow {
                theta,
                l1111: l.entry(1, 1, 1, 1),
                l1122: l.entry(1, 1, 2, 2),
                l1212: l.entry(1, 2, 1, 2),
                l2222,
                se_constant: se_constant(&l),
                degenerate: l2222.abs() <= DEGENERATE_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let argmin = rows
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.l2222.total_cmp(&b.1.l2222))
        .map(|(i, _)| i)
        .unwrap_or(0);
    Ok(ThetaSweep { rows, argmin })
}

/// `L⁰` as a JSON object keyed by `"ijkh"`.
pub fn tensor_json(l: &Tensor4) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for i in 1..=2 {
        for j in 1..=2 {
            for k in 1..=2 {
                for h in 1..=2 {
                    map.insert(format!("{i}{j}{k}{h}"), serde_json::json!(l.entry(i, j, k, h)));
                }
            }
        }
    }
    serde_json::Value::Object(map)
}

pub fn tensor_csv(l: &Tensor4) -> String {
    let m = l.matrix();
    (0..4)
        .map(|r| {
            (0..4)
                .map(|c| format!("{:.17e}", m[(r, c)]))
                .collect::<Vec<_>>()
                .join(",")
                + "\n"
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elasticity::{gutierrez_tensor, reference_phases};

    fn layers(theta: f64) -> UnitCell {
        let (p1, p2) = reference_phases();
        UnitCell::new(Geometry::Layers { theta, normal: 1 }, p1, p2).unwrap()
    }

    /// Harmonic/arithmetic averages for a laminate with normal `e₁`.
    fn laminate_oracle(p1: &IsotropicPhase, p2: &IsotropicPhase, theta: f64) -> [f64; 4] {
        let avg = |f: &dyn Fn(&IsotropicPhase) -> f64| theta * f(p1) + (1.0 - theta) * f(p2);
        let p = |q: &IsotropicPhase| q.lambda + 2.0 * q.mu;
        let l1111 = 1.0 / avg(&|q| 1.0 / p(q));
        let lp = avg(&|q| q.lambda / p(q));
        let l1122 = l1111 * lp;
        let l2222 = avg(&|q| p(q) - q.lambda * q.lambda / p(q)) + lp * lp * l1111;
        let l1212 = 1.0 / avg(&|q| 1.0 / q.mu);
        [l1111, l1122, l1212, l2222]
    }

    #[test]
    fn grid_alignment() {
        assert!(CellGrid::new(&layers(0.3), 10).is_ok());
        assert!(CellGrid::new(&layers(0.3), 16).unwrap_err().is_config());
        assert!(CellGrid::new(&layers(0.5), 7).is_err());
        assert!(CellGrid::new(&layers(0.5), 6).is_err());
    }

    #[test]
    fn laminate_matches_averaging_formulas() {
        let (p1, p2) = reference_phases();
        for theta in [0.25, 0.3, 1.0 / 3.0, 0.4, 0.45, 0.5, 0.7] {
            let l = laminate_analytic(&p1, &p2, theta, 1).unwrap();
            let o = laminate_oracle(&p1, &p2, theta);
            let got = [l.entry(1, 1, 1, 1), l.entry(1, 1, 2, 2), l.entry(1, 2, 1, 2), l.entry(2, 2, 2, 2)];
            for (g, e) in got.iter().zip(&o) {
                assert!((g - e).abs() < 1e-12, "θ={theta}: {got:?} vs {o:?}");
            }
            assert!(l.major_asymmetry() < 1e-12);
            assert!(l.minor_asymmetry() < 1e-12);
        }
    }

    #[test]
    fn laminate_frozen_values() {
        let (p1, p2) = reference_phases();
        let l = laminate_analytic(&p1, &p2, 0.3, 1).unwrap();
        assert!((l.entry(2, 2, 2, 2) - 0.2).abs() < 1e-12);
        assert!((l.entry(1, 1, 1, 1) - 1.25).abs() < 1e-12);
        assert!((l.entry(1, 1, 2, 2) + 2.5).abs() < 1e-12);
        assert!((l.entry(1, 2, 1, 2) - 20.0 / 13.0).abs() < 1e-12);
        let l = laminate_analytic(&p1, &p2, 0.4, 1).unwrap();
        assert!((l.entry(2, 2, 2, 2) - 0.6 / 11.0).abs() < 1e-12);
        let l = laminate_analytic(&p1, &p2, 0.45, 1).unwrap();
        assert!((l.entry(2, 2, 2, 2) - 1.0 / 70.0).abs() < 1e-12);
    }

    #[test]
    fn laminate_half_is_gutierrez() {
        let (p1, p2) = reference_phases();
        let l = laminate_analytic(&p1, &p2, 0.5, 1).unwrap();
        let (g, _) = gutierrez_tensor(&p1, &p2).unwrap();
        assert!((l - g).matrix().amax() < 1e-12);
    }

    #[test]
    fn laminate_normal_two_is_rotated() {
        let (p1, p2) = reference_phases();
        let a = laminate_analytic(&p1, &p2, 0.3, 1).unwrap();
        let b = laminate_analytic(&p1, &p2, 0.3, 2).unwrap();
        assert!((a.entry(1, 1, 1, 1) - b.entry(2, 2, 2, 2)).abs() < 1e-12);
        assert!((a.entry(2, 2, 2, 2) - b.entry(1, 1, 1, 1)).abs() < 1e-12);
        assert!((a.entry(1, 1, 2, 2) - b.entry(1, 1, 2, 2)).abs() < 1e-12);
    }

    #[test]
    fn laminate_equal_phases() {
        let p = IsotropicPhase::unchecked(0.4, 1.1, 1.0);
        let l = laminate_analytic(&p, &p, 0.37, 1).unwrap();
        assert!((l - iso_tensor(&p)).matrix().amax() < 1e-12);
    }

    #[test]
    fn laminate_singular_system() {
        // λ + 2μ = 0 and μ = 0 in both phases makes the layer system vanish
        let p = IsotropicPhase::unchecked(0.0, 0.0, 1.0);
        assert!(matches!(laminate_analytic(&p, &p, 0.5, 1), Err(Error::SingularLaminate { .. })));
    }

    #[test]
    fn homogeneous_cell() {
        let p = IsotropicPhase::unchecked(1.0, 1.0, 1.0);
        let cell = UnitCell::homogeneous(p);
        let grid = CellGrid::new(&cell, 8).unwrap();
        let prob = CellProblem::new(&cell, grid);
        let f = prob.solve(&Matrix2::new(0.3, 1.0, -0.2, 0.7)).unwrap();
        assert!(f.max_abs() < 1e-12);
        let l0 = prob.homogenized_tensor().unwrap();
        assert!((l0 - iso_tensor(&p)).matrix().amax() < 1e-12);
    }

    #[test]
    fn zero_load_gives_zero_corrector() {
        let cell = layers(0.5);
        let f = solve_corrector(&cell, &CellGrid::new(&cell, 8).unwrap(), &Matrix2::zeros()).unwrap();
        assert_eq!(f.max_abs(), 0.0);
    }

    #[test]
    fn shear_corrector_is_one_dimensional() {
        let cell = layers(0.5);
        let f = solve_corrector(&cell, &CellGrid::new(&cell, 16).unwrap(), &Matrix2::new(0.0, 1.0, 1.0, 0.0)).unwrap();
        assert!(f.max_dy2() <= 1e-8, "{}", f.max_dy2());
        assert!(f.mean_error() <= MEAN_TOL);
        assert!(f.max_abs() > 1e-3);
    }

    #[test]
    fn layered_cells_match_analytic() {
        let (p1, p2) = reference_phases();
        for (theta, n) in [(0.25, 16), (1.0 / 3.0, 24), (0.5, 16)] {
            let cell = layers(theta);
            let l0 = homogenized_tensor(&cell, &CellGrid::new(&cell, n).unwrap()).unwrap();
            let la = laminate_analytic(&p1, &p2, theta, 1).unwrap();
            let err = (l0 - la).matrix().amax();
            assert!(err <= 1e-8, "θ={theta}: {err}");
            assert!(l0.major_asymmetry() <= 1e-12);
        }
    }

    #[test]
    fn energy_identity_with_k() {
        let cell = UnitCell::new(
            Geometry::Disk {
                center: [0.5, 0.5],
                radius: 0.3,
            },
            reference_phases().0,
            reference_phases().1,
        )
        .unwrap();
        let prob = CellProblem::new(&cell, CellGrid::new(&cell, 16).unwrap());
        let m = Matrix2::new(0.4, -0.7, 0.2, 1.1);
        let f = prob.solve(&m).unwrap();
        let lhs = prob.energy(&f);
        let rhs = prob.k_energy(&f) - 4.0 * cell.phase1.mu * m.determinant();
        assert!((lhs - rhs).abs() <= 1e-10, "{lhs} vs {rhs}");
        // the cofactor part of the K stiffness vanishes on periodic fields
        let diff = prob.k_stiffness().add_scaled(-1.0, prob.stiffness());
        let v: Vec<f64> = (0..diff.n()).map(|i| ((i * 37 % 101) as f64).sin()).collect();
        assert!(diff.quadratic(&v).abs() < 1e-10);
    }

    #[test]
    fn corrector_unique_from_different_starts() {
        let cell = UnitCell::new(Geometry::Disk { center: [0.4, 0.5], radius: 0.25 }, reference_phases().0, reference_phases().1).unwrap();
        let prob = CellProblem::new(&cell, CellGrid::new(&cell, 16).unwrap());
        let m = Matrix2::new(1.0, 0.0, 0.0, 0.0);
        let a = prob.solve(&m).unwrap();
        let start: Vec<f64> = (0..prob.stiffness().n()).map(|i| (i as f64 * 0.77).cos()).collect();
        let b = prob.solve_from(&m, start).unwrap();
        let d: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
        let en = prob.stiffness().quadratic(&d).abs().sqrt();
        assert!(en <= 1e-8, "{en}");
    }

    #[test]
    fn energy_monotone_under_refinement() {
        let cell = UnitCell::new(Geometry::Disk { center: [0.5, 0.5], radius: 0.3 }, reference_phases().0, reference_phases().1).unwrap();
        let m = Matrix2::new(0.0, 0.0, 0.0, 1.0);
        let energies: Vec<f64> = [8usize, 16, 32]
            .iter()
            .map(|&n| {
                let prob = CellProblem::new(&cell, CellGrid::new(&cell, n).unwrap());
                prob.energy(&prob.solve(&m).unwrap())
            })
            .collect();
        for w in energies.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{energies:?}");
        }
    }

    #[test]
    fn lambda_per_homogeneous_matches_dense() {
        let p = IsotropicPhase::unchecked(1.0, 1.0, 1.0);
        let cell = UnitCell::homogeneous(p);
        let grid = CellGrid::new(&cell, 8).unwrap();
        let est = lambda_per_estimate(&cell, &grid).unwrap();
        let prob = CellProblem::new(&cell, grid);
        let dense = dense_lambda(prob.stiffness(), &prob.gradient_gram());
        assert!((dense - 1.0).abs() < 1e-10, "{dense}");
        assert!((est - dense).abs() <= 0.05 * dense, "{est} vs {dense}");
    }

    #[test]
    fn lambda_per_gutierrez_positive() {
        let cell = layers(0.5);
        let v = lambda_per_estimate(&cell, &CellGrid::new(&cell, 16).unwrap()).unwrap();
        assert!(v > 0.0, "{v}");
    }

    /// Dense generalized eigenproblem on the complement of constant fields.
    fn dense_lambda(a: &CsrMatrix, g: &CsrMatrix) -> f64 {
        let n = a.n();
        let ad = DMatrix::from_fn(n, n, |r, c| a.to_dense()[r][c]);
        let gd = DMatrix::from_fn(n, n, |r, c| g.to_dense()[r][c]);
        // basis of zero-mean fields: e_k - e_{k+2} per component
        let q = DMatrix::from_fn(n, n - 2, |r, c| {
            if r == c {
                1.0
            } else if r == c + 2 {
                -1.0
            } else {
                0.0
            }
        });
        let ar = q.transpose() * ad * &q;
        let gr = q.transpose() * gd * &q;
        let l = gr.cholesky().unwrap().l();
        let li = l.clone().try_inverse().unwrap();
        let c = &li * ar * li.transpose();
        let c = (&c + c.transpose()) * 0.5;
        c.symmetric_eigen().eigenvalues.min()
    }

    #[test]
    fn sweep_flags_half() {
        let (p1, p2) = reference_phases();
        let s = theta_sweep(&p1, &p2, &[0.3, 0.4, 0.5]).unwrap();
        assert!(s.rows[0].l2222 > 0.0 && s.rows[1].l2222 > 0.0);
        assert!(s.rows[2].degenerate);
        assert_eq!(s.argmin, 2);
        assert!(s.to_csv().starts_with("theta,L1111,L1122,L1212,L2222,se_constant\n"));
    }

    #[test]
    fn tensor_outputs() {
        let (g, _) = gutierrez_tensor(&reference_phases().0, &reference_phases().1).unwrap();
        let j = tensor_json(&g);
        assert_eq!(j["1111"].as_f64().unwrap(), 1.5);
        assert_eq!(j["1122"].as_f64().unwrap(), -2.0);
        assert_eq!(tensor_csv(&g).lines().count(), 4);
    }
}
