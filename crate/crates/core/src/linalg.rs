//! Small dense eigensolvers.
//!
//! Every matrix in this crate is tiny (at most a few dozen rows), so a cyclic
//! Jacobi sweep is both accurate and fast enough. Complex Hermitian matrices
//! are handled through their real symmetric embedding
//! `[[Re H, -Im H], [Im H, Re H]]`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const MAX_SWEEPS: usize = 64;

/// Eigenpairs of a real symmetric matrix, eigenvectors stored as columns.
///
/// The order is whatever the sweep produced; callers sort as they need.
#[derive(Debug, Clone)]
pub struct JacobiEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

fn off_diagonal_norm2(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut off = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            off += a[(p, q)] * a[(p, q)];
        }
    }
    off
}

/// Cyclic Jacobi diagonalization of a real symmetric matrix.
pub fn jacobi_eigen(matrix: &DMatrix<f64>) -> JacobiEigen {
    assert!(matrix.is_square(), "jacobi_eigen needs a square matrix");
    let n = matrix.nrows();
    let mut a = matrix.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = matrix.norm_squared();

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm2(&a);
        if off == 0.0 || off <= 1e-36 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    JacobiEigen {
        values: (0..n).map(|i| a[(i, i)]).collect(),
        vectors: v,
    }
}

/// Real symmetric embedding of a complex Hermitian matrix.
pub fn real_embedding(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// `exp(-i 2 pi H t)` for a time-independent Hermitian `H` in MHz and `t` in
/// microseconds.
///
/// With `M` the real embedding of `H` and `J` the embedded imaginary unit,
/// `exp(-i theta H)` embeds as `cos(theta M) - J sin(theta M)` because `J`
/// commutes with `M` and squares to minus one. Both trigonometric functions
/// come from one Jacobi decomposition of `M`.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    dim: usize,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralPropagator {
    pub fn new(h: &DMatrix<Complex64>) -> Self {
        let eig = jacobi_eigen(&real_embedding(h));
        Self {
            dim: h.nrows(),
            values: eig.values,
            vectors: eig.vectors,
        }
    }

    /// Eigenvalues of `H` in ascending order (each appears once).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut vals = self.values.clone();
        vals.sort_by(f64::total_cmp);
        vals.into_iter().step_by(2).collect()
    }

    /// `exp(-i 2 pi H t) psi`; `t = 0` returns `psi` unchanged.
    pub fn evolve(&self, psi: &DVector<Complex64>, t_us: f64) -> DVector<Complex64> {
        let n = self.dim;
        assert_eq!(psi.len(), n, "state dimension mismatch");
        if t_us == 0.0 {
            return psi.clone();
        }
        let w = DVector::from_fn(2 * n, |i, _| if i < n { psi[i].re } else { psi[i - n].im });
        let proj = self.vectors.tr_mul(&w);
        let theta = 2.0 * PI * t_us;
        let cos_part = &self.vectors * DVector::from_fn(2 * n, |i, _| (theta * self.values[i]).cos() * proj[i]);
        let sin_part = &self.vectors * DVector::from_fn(2 * n, |i, _| (theta * self.values[i]).sin() * proj[i]);
        DVector::from_fn(n, |i, _| {
            Complex64::new(cos_part[i] + sin_part[i + n], cos_part[i + n] - sin_part[i])
        })
    }
}
