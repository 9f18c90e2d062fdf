//! Uniform grids of square bilinear (Q1) elements, degree-of-freedom maps and
//! element-level assembly with 2x2 Gauss quadrature.

use nalgebra::{Matrix2, Matrix4, SMatrix, SVector, Vector2};

use super::sparse::CsrMatrix;

/// Gauss abscissae on `[0, 1]`.
const GAUSS: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

/// Reference coordinates of the four quadrature points, ordered like the
/// element nodes.
pub const QUAD_POINTS: [(f64, f64); 4] = [
    (GAUSS[0], GAUSS[0]),
    (GAUSS[1], GAUSS[0]),
    (GAUSS[1], GAUSS[1]),
    (GAUSS[0], GAUSS[1]),
];

/// Local node offsets `(di, dj)`, counter-clockwise from the lower-left.
const LOCAL: [(usize, usize); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

pub type ElemMat = SMatrix<f64, 8, 8>;
pub type ElemVec = SVector<f64, 8>;

/// Bilinear shape values at reference point `(s, t)`.
#[inline]
pub fn shape(s: f64, t: f64) -> [f64; 4] {
    [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t]
}

/// Physical gradients of the shape functions for element size `h`.
#[inline]
pub fn shape_grad(s: f64, t: f64, h: f64) -> [[f64; 2]; 4] {
    [
        [-(1.0 - t) / h, -(1.0 - s) / h],
        [(1.0 - t) / h, -s / h],
        [t / h, s / h],
        [-t / h, (1.0 - s) / h],
    ]
}

/// Gradient operator: row `2i+j` of the result gives `∂u_i/∂x_j` from the
/// eight element dofs `(node, component)` at index `2*node + component`.
pub fn b_matrix(s: f64, t: f64, h: f64) -> SMatrix<f64, 4, 8> {
    let g = shape_grad(s, t, h);
    let mut b = SMatrix::<f64, 4, 8>::zeros();
    for (a, ga) in g.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                b[(2 * i + j, 2 * a + i)] = ga[j];
            }
        }
    }
    b
}

/// `∫ C ∇u·∇v` on one element, `C` given at each quadrature point.
pub fn element_stiffness(c: &[Matrix4<f64>; 4], h: f64) -> ElemMat {
    let w = 0.25 * h * h;
    let mut k = ElemMat::zeros();
    for (q, &(s, t)) in QUAD_POINTS.iter().enumerate() {
        let b = b_matrix(s, t, h);
        k += b.transpose() * c[q] * b * w;
    }
    k
}

/// `∫ a u·v` on one element, `a` given at each quadrature point.
pub fn element_mass(a: &[f64; 4], h: f64) -> ElemMat {
    let w = 0.25 * h * h;
    let mut m = ElemMat::zeros();
    for (q, &(s, t)) in QUAD_POINTS.iter().enumerate() {
        let n = shape(s, t);
        for p in 0..4 {
            for r in 0..4 {
                let v = w * a[q] * n[p] * n[r];
                m[(2 * p, 2 * r)] += v;
                m[(2 * p + 1, 2 * r + 1)] += v;
            }
        }
    }
    m
}

/// Uniform `nx x ny` grid of square elements of size `h`.
///
/// Periodic grids identify node `(nx, j)` with `(0, j)` and `(i, ny)` with
/// `(i, 0)`; otherwise there are `(nx+1)(ny+1)` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub periodic: bool,
}

impl Grid {
    pub fn periodic_unit(n: usize) -> Self {
        Grid {
            nx: n,
            ny: n,
            h: 1.0 / n as f64,
            periodic: true,
        }
    }

    pub fn rect(nx: usize, ny: usize, h: f64) -> Self {
        Grid {
            nx,
            ny,
            h,
            periodic: false,
        }
    }

    pub fn nodes_x(&self) -> usize {
        if self.periodic {
            self.nx
        } else {
            self.nx + 1
        }
    }

    pub fn nodes_y(&self) -> usize {
        if self.periodic {
            self.ny
        } else {
            self.ny + 1
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes_x() * self.nodes_y()
    }

    pub fn n_elements(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        if self.periodic {
            (i % self.nx) + self.nx * (j % self.ny)
        } else {
            i + (self.nx + 1) * j
        }
    }

    /// Lattice indices of a node.
    #[inline]
    pub fn node_ij(&self, node: usize) -> (usize, usize) {
        let w = self.nodes_x();
        (node % w, node / w)
    }

    pub fn node_coords(&self, node: usize) -> Vector2<f64> {
        let (i, j) = self.node_ij(node);
        Vector2::new(i as f64 * self.h, j as f64 * self.h)
    }

    #[inline]
    pub fn element_nodes(&self, e: usize) -> [usize; 4] {
        let (ei, ej) = (e % self.nx, e / self.nx);
        LOCAL.map(|(di, dj)| self.node(ei + di, ej + dj))
    }

    /// Physical quadrature points of element `e`.
    pub fn quad_points(&self, e: usize) -> [Vector2<f64>; 4] {
        let (ei, ej) = (e % self.nx, e / self.nx);
        QUAD_POINTS.map(|(s, t)| Vector2::new((ei as f64 + s) * self.h, (ej as f64 + t) * self.h))
    }

    pub fn element_center(&self, e: usize) -> Vector2<f64> {
        let (ei, ej) = (e % self.nx, e / self.nx);
        Vector2::new((ei as f64 + 0.5) * self.h, (ej as f64 + 0.5) * self.h)
    }

    /// Displacement gradients of a nodal field (interleaved `u1, u2`) at the
    /// quadrature points of element `e`.
    pub fn element_gradients(&self, e: usize, u: &[f64]) -> [Matrix2<f64>; 4] {
        let nodes = self.element_nodes(e);
        let mut ue = ElemVec::zeros();
        for (a, &n) in nodes.iter().enumerate() {
            ue[2 * a] = u[2 * n];
            ue[2 * a + 1] = u[2 * n + 1];
        }
        QUAD_POINTS.map(|(s, t)| {
            let g = b_matrix(s, t, self.h) * ue;
            Matrix2::new(g[0], g[1], g[2], g[3])
        })
    }

    /// Field values at the quadrature points of element `e`.
    pub fn element_values(&self, e: usize, u: &[f64]) -> [Vector2<f64>; 4] {
        let nodes = self.element_nodes(e);
        QUAD_POINTS.map(|(s, t)| {
            let n = shape(s, t);
            let mut v = Vector2::zeros();
            for (a, &node) in nodes.iter().enumerate() {
                v += Vector2::new(u[2 * node], u[2 * node + 1]) * n[a];
            }
            v
        })
    }

    /// Weight of each quadrature point.
    pub fn quad_weight(&self) -> f64 {
        0.25 * self.h * self.h
    }
}

/// Map from `(node, component)` to unknown index; `None` marks a homogeneous
/// Dirichlet constraint.
#[derive(Debug, Clone)]
pub struct DofMap {
    map: Vec<Option<usize>>,
    n_free: usize,
}

impl DofMap {
    pub fn all_free(n_nodes: usize) -> Self {
        DofMap {
            map: (0..2 * n_nodes).map(Some).collect(),
            n_free: 2 * n_nodes,
        }
    }

    /// `constrained(node, component)` returns true for fixed dofs.
    pub fn with_constraints(n_nodes: usize, constrained: impl Fn(usize, usize) -> bool) -> Self {
        let mut n_free = 0;
        let map = (0..2 * n_nodes)
            .map(|d| {
                if constrained(d / 2, d % 2) {
                    None
                } else {
                    n_free += 1;
                    Some(n_free - 1)
                }
            })
            .collect();
        DofMap { map, n_free }
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn n_total(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn get(&self, node: usize, comp: usize) -> Option<usize> {
        self.map[2 * node + comp]
    }

    pub fn is_free(&self, node: usize, comp: usize) -> bool {
        self.get(node, comp).is_some()
    }

    /// Scatter free values into a full interleaved nodal vector (zeros on
    /// constrained dofs).
    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        self.map
            .iter()
            .map(|m| m.map(|k| free[k]).unwrap_or(0.0))
            .collect()
    }

    /// Gather the free entries of a full nodal vector.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_free];
        for (d, m) in self.map.iter().enumerate() {
            if let Some(k) = m {
                out[*k] = full[d];
            }
        }
        out
    }

    fn element_dofs(&self, nodes: &[usize; 4]) -> [Option<usize>; 8] {
        let mut d = [None; 8];
        for (a, &n) in nodes.iter().enumerate() {
            d[2 * a] = self.get(n, 0);
            d[2 * a + 1] = self.get(n, 1);
        }
        d
    }
}

/// Assembles `Σ_e P_eᵀ K_e P_e` over the free dofs. The element matrix callback
/// receives the element index.
pub fn assemble(grid: &Grid, dofs: &DofMap, element: impl Fn(usize) -> ElemMat) -> CsrMatrix {
    let mut triplets = Vec::with_capacity(grid.n_elements() * 64);
    for e in 0..grid.n_elements() {
        let ke = element(e);
        let ed = dofs.element_dofs(&grid.element_nodes(e));
        for p in 0..8 {
            let Some(r) = ed[p] else { continue };
            for q in 0..8 {
                if let Some(c) = ed[q] {
                    triplets.push((r, c, ke[(p, q)]));
                }
            }
        }
    }
    CsrMatrix::from_triplets(dofs.n_free(), triplets)
}

/// Assembles a load vector over the free dofs.
pub fn assemble_vector(grid: &Grid, dofs: &DofMap, element: impl Fn(usize) -> ElemVec) -> Vec<f64> {
    let mut out = vec![0.0; dofs.n_free()];
    for e in 0..grid.n_elements() {
        let fe = element(e);
        let ed = dofs.element_dofs(&grid.element_nodes(e));
        for p in 0..8 {
            if let Some(r) = ed[p] {
                out[r] += fe[p];
            }
        }
    }
    out
}

/// Load vector `∫ w f·φ` for a body force sampled at quadrature points.
pub fn element_load(f_at_qp: &[Vector2<f64>; 4], h: f64) -> ElemVec {
    let w = 0.25 * h * h;
    let mut out = ElemVec::zeros();
    for (q, &(s, t)) in QUAD_POINTS.iter().enumerate() {
        let n = shape(s, t);
        for a in 0..4 {
            out[2 * a] += w * f_at_qp[q][0] * n[a];
            out[2 * a + 1] += w * f_at_qp[q][1] * n[a];
        }
    }
    out
}

/// `-∫ C M·∇φ` for a constant macroscopic gradient `M` (cell-problem load).
pub fn element_macro_load(c: &[Matrix4<f64>; 4], m: &Matrix2<f64>, h: f64) -> ElemVec {
    let w = 0.25 * h * h;
    let mv = crate::elasticity::tensor::coords(m);
    let mut out = ElemVec::zeros();
    for (q, &(s, t)) in QUAD_POINTS.iter().enumerate() {
        let b = b_matrix(s, t, h);
        out -= b.transpose() * (c[q] * mv) * w;
    }
    out
}
