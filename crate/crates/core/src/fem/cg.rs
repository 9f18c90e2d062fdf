//! Jacobi-preconditioned conjugate gradients with an optional projector onto
//! a subspace (used to remove the rigid translations of periodic problems).

use super::sparse::{axpy, dot, norm, CsrMatrix};
use crate::error::{Error, Result};

pub type Projector<'a> = &'a (dyn Fn(&mut [f64]) + Sync);

#[derive(Clone, Copy)]
pub struct CgOptions<'a> {
    pub rel_tol: f64,
    pub max_iter: usize,
    pub projector: Option<Projector<'a>>,
}

impl<'a> CgOptions<'a> {
    pub fn new(rel_tol: f64, max_iter: usize) -> Self {
        CgOptions {
            rel_tol,
            max_iter,
            projector: None,
        }
    }

    pub fn with_projector(mut self, p: Projector<'a>) -> Self {
        self.projector = Some(p);
        self
    }
}

#[derive(Debug, Clone)]
pub struct CgReport {
    pub iterations: usize,
    pub rel_residual: f64,
    pub history: Vec<f64>,
}

/// Solves `A x = b` starting from the contents of `x`.
pub fn solve(a: &CsrMatrix, b: &[f64], x: &mut [f64], opts: CgOptions<'_>) -> Result<CgReport> {
    let n = a.n();
    let project = |v: &mut [f64]| {
        if let Some(p) = opts.projector {
            p(v)
        }
    };
    let mut rhs = b.to_vec();
    project(&mut rhs);
    project(x);
    let bnorm = norm(&rhs);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgReport {
            iterations: 0,
            rel_residual: 0.0,
            history: vec![0.0],
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();

    let mut r = a.matvec(x);
    for (ri, bi) in r.iter_mut().zip(&rhs) {
        *ri = bi - *ri;
    }
    project(&mut r);
    let precondition = |r: &[f64], z: &mut Vec<f64>| {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&inv_diag) {
            *zi = ri * di;
        }
        project(z);
    };
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let mut history = vec![norm(&r) / bnorm];

    for it in 0..opts.max_iter {
        let rel = *history.last().unwrap();
        if rel <= opts.rel_tol {
            return Ok(CgReport {
                iterations: it,
                rel_residual: rel,
                history,
            });
        }
        a.matvec_into(&p, &mut ap);
        project(&mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::Indefinite {
                iteration: it,
                curvature: pap,
            });
        }
        let alpha = rz / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            *pi = zi + beta * *pi;
        }
        history.push(norm(&r) / bnorm);
    }
    let rel = *history.last().unwrap();
    if rel <= opts.rel_tol {
        return Ok(CgReport {
            iterations: opts.max_iter,
            rel_residual: rel,
            history,
        });
    }
    Err(Error::CgNotConverged {
        iterations: opts.max_iter,
        final_residual: rel,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn solves_spd_system() {
        let a = laplace_1d(50);
        let exact: Vec<f64> = (0..50).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.matvec(&exact);
        let mut x = vec![0.0; 50];
        let rep = solve(&a, &b, &mut x, CgOptions::new(1e-12, 500)).unwrap();
        assert!(rep.iterations <= 50);
        for (xi, ei) in x.iter().zip(&exact) {
            assert!((xi - ei).abs() < 1e-9);
        }
    }

    #[test]
    fn singular_periodic_system_with_projection() {
        let n = 40;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            t.push((i, (i + 1) % n, -1.0));
            t.push((i, (i + n - 1) % n, -1.0));
        }
        let a = CsrMatrix::from_triplets(n, t);
        let exact: Vec<f64> = (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
            .collect();
        let b = a.matvec(&exact);
        let proj = |v: &mut [f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter_mut().for_each(|x| *x -= m);
        };
        let mut x = vec![1.0; n];
        solve(&a, &b, &mut x, CgOptions::new(1e-12, 500).with_projector(&proj)).unwrap();
        for (xi, ei) in x.iter().zip(&exact) {
            assert!((xi - ei).abs() < 1e-9);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let a = laplace_1d(200);
        let b = vec![1.0; 200];
        let mut x = vec![0.0; 200];
        match solve(&a, &b, &mut x, CgOptions::new(1e-14, 5)) {
            Err(Error::CgNotConverged { history, .. }) => assert_eq!(history.len(), 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn detects_indefinite() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 1, -1.0)]);
        let mut x = vec![0.0; 2];
        assert!(matches!(
            solve(&a, &[0.0, 1.0], &mut x, CgOptions::new(1e-12, 10)),
            Err(Error::Indefinite { .. })
        ));
    }
}
