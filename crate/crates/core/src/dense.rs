//! Thin adapter between `ndarray` storage and `faer` dense kernels.
//!
//! Everything in the crate stores matrices as `Array2`; LU factorisations,
//! inverses and large products are delegated to faer.

use faer::complex_native::c64;
use faer::prelude::{SolverCore, SpSolverLstsq};
use faer::Mat;
use ndarray::Array2;
use num_complex::Complex64;

pub type CMatrix = Array2<Complex64>;

fn to_faer(a: &CMatrix) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        let z = a[[i, j]];
        c64::new(z.re, z.im)
    })
}

fn from_faer(m: &Mat<c64>) -> CMatrix {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| {
        let z = m.read(i, j);
        Complex64::new(z.re, z.im)
    })
}

fn to_faer_real(a: &Array2<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

fn from_faer_real(m: &Mat<f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m.read(i, j))
}

/// Determinant in polar form, `phase * exp(ln_abs)`; a zero determinant has
/// `ln_abs == -inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet {
    pub phase: Complex64,
    pub ln_abs: f64,
}

impl LogDet {
    pub const ONE: LogDet = LogDet {
        phase: Complex64 { re: 1.0, im: 0.0 },
        ln_abs: 0.0,
    };
    pub const ZERO: LogDet = LogDet {
        phase: Complex64 { re: 1.0, im: 0.0 },
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.ln_abs.exp()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ln_abs == f64::NEG_INFINITY
    }
}

/// log|det A| and phase via partial-pivoting LU.
pub fn log_det(a: &CMatrix) -> LogDet {
    assert_eq!(a.nrows(), a.ncols(), "log_det needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return LogDet::ONE;
    }
    let lu = to_faer(a).partial_piv_lu();
    let u = lu.compute_u();
    let mut phase = if lu.transposition_count() % 2 == 1 {
        Complex64::new(-1.0, 0.0)
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut ln_abs = 0.0;
    for i in 0..n {
        let d = u.read(i, i);
        let d = Complex64::new(d.re, d.im);
        let r = d.norm();
        if r == 0.0 || !r.is_finite() {
            return LogDet::ZERO;
        }
        ln_abs += r.ln();
        phase *= d / r;
    }
    LogDet {
        phase: phase / phase.norm(),
        ln_abs,
    }
}

/// Real counterpart of [`log_det`]; returns `(sign, ln|det|)` with sign 0 for
/// a singular matrix.
pub fn log_det_real(a: &Array2<f64>) -> (f64, f64) {
    assert_eq!(a.nrows(), a.ncols(), "log_det needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return (1.0, 0.0);
    }
    let lu = to_faer_real(a).partial_piv_lu();
    let u = lu.compute_u();
    let mut sign = if lu.transposition_count() % 2 == 1 { -1.0 } else { 1.0 };
    let mut ln_abs = 0.0;
    for i in 0..n {
        let d = u.read(i, i);
        if d == 0.0 || !d.is_finite() {
            return (0.0, f64::NEG_INFINITY);
        }
        ln_abs += d.abs().ln();
        if d < 0.0 {
            sign = -sign;
        }
    }
    (sign, ln_abs)
}

pub fn det(a: &CMatrix) -> Complex64 {
    log_det(a).value()
}

fn norm1(a: &CMatrix) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm1_real(a: &Array2<f64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Inverse together with its 1-norm condition number `‖A‖₁‖A⁻¹‖₁`
/// (infinite when the factorisation breaks down).
pub fn inverse(a: &CMatrix) -> (CMatrix, f64) {
    let n = a.nrows();
    if n == 0 {
        return (Array2::zeros((0, 0)), 1.0);
    }
    let inv = from_faer(&to_faer(a).partial_piv_lu().inverse());
    let cond = if inv.iter().all(|z| z.is_finite()) {
        norm1(a) * norm1(&inv)
    } else {
        f64::INFINITY
    };
    (inv, if cond.is_finite() { cond } else { f64::INFINITY })
}

pub fn inverse_real(a: &Array2<f64>) -> (Array2<f64>, f64) {
    let n = a.nrows();
    if n == 0 {
        return (Array2::zeros((0, 0)), 1.0);
    }
    let inv = from_faer_real(&to_faer_real(a).partial_piv_lu().inverse());
    let cond = if inv.iter().all(|z| z.is_finite()) {
        norm1_real(a) * norm1_real(&inv)
    } else {
        f64::INFINITY
    };
    (inv, if cond.is_finite() { cond } else { f64::INFINITY })
}

/// Least-squares solution of `x β ≈ y` via Householder QR (x tall, full rank).
pub fn lstsq_real(x: &Array2<f64>, y: &[f64]) -> Vec<f64> {
    assert_eq!(x.nrows(), y.len(), "lstsq shape mismatch");
    let rhs = Mat::from_fn(y.len(), 1, |i, _| y[i]);
    let sol = to_faer_real(x).qr().solve_lstsq(&rhs);
    (0..x.ncols()).map(|i| sol.read(i, 0)).collect()
}

/// Singular values, descending.
pub fn singular_values_real(x: &Array2<f64>) -> Vec<f64> {
    let mut sv = to_faer_real(x).singular_values();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    from_faer(&(to_faer(a) * to_faer(b)))
}

pub fn matmul_real(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    from_faer_real(&(to_faer_real(a) * to_faer_real(b)))
}

/// `a^† a`, used for the normalisations det(I + R†R).
pub fn gram(a: &CMatrix) -> CMatrix {
    let ah = a.t().mapv(|z| z.conj());
    matmul(&ah, a)
}

pub fn identity(n: usize) -> CMatrix {
    Array2::eye(n)
}

pub fn to_complex(a: &Array2<f64>) -> CMatrix {
    a.mapv(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues and eigenvectors (as columns) of a real symmetric matrix, in
/// ascending order.
pub fn symmetric_eigh(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let evd = to_faer_real(a).selfadjoint_eigendecomposition(faer::Side::Lower);
    let s = evd.s().column_vector();
    let vals = (0..a.nrows()).map(|i| s.read(i)).collect();
    let u = evd.u();
    let vecs = Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| u.read(i, j));
    (vals, vecs)
}

/// All eigenvalues of a general complex matrix (unordered).
pub fn eigenvalues(a: &CMatrix) -> Vec<Complex64> {
    to_faer(a)
        .eigenvalues::<c64>()
        .into_iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn log_det_matches_small_closed_form() {
        let a = array![
            [Complex64::new(1.0, 1.0), Complex64::new(2.0, 0.0)],
            [Complex64::new(0.5, 0.0), Complex64::new(0.0, -3.0)]
        ];
        let expect = a[[0, 0]] * a[[1, 1]] - a[[0, 1]] * a[[1, 0]];
        assert!((det(&a) - expect).norm() < 1e-14);
        let (s, l) = log_det_real(&array![[0.0, 2.0], [3.0, 1.0]]);
        assert_eq!(s, -1.0);
        assert!((l - 6f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_has_zero_det_and_infinite_condition() {
        let a = array![
            [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
            [Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)]
        ];
        assert!(log_det(&a).is_zero() || det(&a).norm() < 1e-15);
        let (_, cond) = inverse(&a);
        assert!(cond > 1e15);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Array2::from_shape_fn((5, 5), |(i, j)| {
            Complex64::new(1.0 / (1.0 + i as f64 + j as f64), (i as f64 - j as f64) * 0.1)
        }) + identity(5);
        let (inv, cond) = inverse(&a);
        assert!(cond.is_finite());
        let p = matmul(&a, &inv);
        assert!((p - identity(5)).iter().all(|z| z.norm() < 1e-12));
    }
}
