//! Skew-symmetric matrices, Pfaffians and "pfaffinhos" (Pfaffians of
//! principal submatrices).

pub mod spectral;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dense::{CMatrix, LogDet};
use crate::error::{Error, Result};

/// Relative tolerance accepted by [`AntisymmetricMatrix::new`].
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Pivots at or below this modulus are treated as exact zeros.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// Complex L×L matrix with `A^T = -A` held exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct AntisymmetricMatrix {
    a: CMatrix,
}

impl AntisymmetricMatrix {
    /// Validates antisymmetry to [`ANTISYMMETRY_TOL`] (relative to the largest
    /// entry, floored at 1) and stores the exact projection `(A - A^T)/2`.
    pub fn new(a: CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = max_asymmetry(&a);
        if dev > ANTISYMMETRY_TOL * scale {
            return Err(Error::NotAntisymmetric(dev));
        }
        Ok(Self::antisymmetrize(&a))
    }

    /// `(A - A^T)/2` without validation; used on outputs of inversions.
    pub fn antisymmetrize(a: &CMatrix) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "antisymmetrize needs a square matrix");
        let a = (a - &a.t()).mapv(|z| z * 0.5);
        AntisymmetricMatrix { a }
    }

    pub fn from_real(a: &Array2<f64>) -> Result<Self> {
        Self::new(crate::dense::to_complex(a))
    }

    /// Build from the strict upper triangle `f(i, j)`, `i < j` (0-based).
    pub fn from_upper(l: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut a = Array2::zeros((l, l));
        for i in 0..l {
            for j in i + 1..l {
                let z = f(i, j);
                a[[i, j]] = z;
                a[[j, i]] = -z;
            }
        }
        AntisymmetricMatrix { a }
    }

    pub fn zeros(l: usize) -> Self {
        AntisymmetricMatrix {
            a: Array2::zeros((l, l)),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[[i, j]]
    }

    pub fn as_array(&self) -> &CMatrix {
        &self.a
    }

    pub fn into_array(self) -> CMatrix {
        self.a
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        AntisymmetricMatrix {
            a: self.a.mapv(|x| x * z),
        }
    }

    pub fn conj(&self) -> Self {
        AntisymmetricMatrix {
            a: self.a.mapv(|x| x.conj()),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.a.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Principal submatrix on `keep`.
    pub fn submatrix(&self, keep: &IndexSet) -> CMatrix {
        let p = keep.positions();
        Array2::from_shape_fn((p.len(), p.len()), |(i, j)| self.a[[p[i], p[j]]])
    }

    /// Simultaneous row/column permutation: `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let l = self.dim();
        assert_eq!(perm.len(), l, "permutation length");
        AntisymmetricMatrix {
            a: Array2::from_shape_fn((l, l), |(i, j)| self.a[[perm[i], perm[j]]]),
        }
    }
}

pub(crate) fn max_asymmetry(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[[i, j]] + a[[j, i]]).norm());
        }
    }
    dev
}

/// Strictly increasing set of sites, stored 0-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IndexSet {
    idx: Vec<usize>,
}

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet { idx: Vec::new() }
    }

    pub fn full(l: usize) -> Self {
        IndexSet {
            idx: (0..l).collect(),
        }
    }

    /// From 1-based site labels, as written in the formulas (`{1,2,4,6}`).
    pub fn from_sites(sites: &[usize], l: usize) -> Result<Self> {
        if sites.iter().any(|&s| s == 0) {
            return Err(Error::InvalidConfiguration(
                "site labels are 1-based".to_string(),
            ));
        }
        Self::from_positions(sites.iter().map(|s| s - 1).collect(), l)
    }

    /// From 0-based positions; sorted and checked for duplicates and range.
    pub fn from_positions(mut pos: Vec<usize>, l: usize) -> Result<Self> {
        pos.sort_unstable();
        if pos.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfiguration(
                "duplicate index in index set".to_string(),
            ));
        }
        if let Some(&last) = pos.last() {
            if last >= l {
                return Err(Error::InvalidConfiguration(format!(
                    "index {} out of range for L = {l}",
                    last + 1
                )));
            }
        }
        Ok(IndexSet { idx: pos })
    }

    pub(crate) fn from_sorted_unchecked(idx: Vec<usize>) -> Self {
        debug_assert!(idx.windows(2).all(|w| w[0] < w[1]));
        IndexSet { idx }
    }

    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn positions(&self) -> &[usize] {
        &self.idx
    }

    /// 1-based labels.
    pub fn sites(&self) -> Vec<usize> {
        self.idx.iter().map(|i| i + 1).collect()
    }
}

/// Skew-symmetric LTL^T elimination with partial pivoting (Parlett-Reid).
/// Consumes a row-major n×n buffer; returns the Pfaffian in polar form.
fn pfaffian_ltl(mut a: Vec<Complex64>, n: usize) -> LogDet {
    if n == 0 {
        return LogDet::ONE;
    }
    if n % 2 == 1 {
        return LogDet::ZERO;
    }
    let mut phase = Complex64::new(1.0, 0.0);
    let mut ln_abs = 0.0;
    let mut tau = vec![Complex64::new(0.0, 0.0); n];
    let mut col = vec![Complex64::new(0.0, 0.0); n];

    for k in (0..n - 1).step_by(2) {
        // pivot: largest entry below the diagonal in column k
        let mut kp = k + 1;
        let mut amax = a[(k + 1) * n + k].norm();
        for i in k + 2..n {
            let v = a[i * n + k].norm();
            if v > amax {
                amax = v;
                kp = i;
            }
        }
        if amax <= PIVOT_FLOOR {
            return LogDet::ZERO;
        }
        if kp != k + 1 {
            for j in 0..n {
                a.swap((k + 1) * n + j, kp * n + j);
            }
            for i in 0..n {
                a.swap(i * n + k + 1, i * n + kp);
            }
            phase = -phase;
        }
        let p = a[k * n + k + 1];
        let r = p.norm();
        ln_abs += r.ln();
        phase *= p / r;

        if k + 2 < n {
            for i in k + 2..n {
                tau[i] = a[k * n + i] / p;
                col[i] = a[i * n + k + 1];
            }
            for i in k + 2..n {
                let ti = tau[i];
                let ci = col[i];
                let row = &mut a[i * n..(i + 1) * n];
                for j in k + 2..n {
                    row[j] += ti * col[j] - ci * tau[j];
                }
            }
        }
    }
    LogDet {
        phase: phase / phase.norm(),
        ln_abs,
    }
}

fn row_major(a: &CMatrix) -> Vec<Complex64> {
    a.iter().copied().collect()
}

/// pf(A); 1 for the empty matrix and 0 for odd dimension.
pub fn pfaffian(a: &AntisymmetricMatrix) -> Complex64 {
    log_pfaffian(a).value()
}

/// pf(A) as `phase * exp(ln_abs)`, safe against overflow for large L.
pub fn log_pfaffian(a: &AntisymmetricMatrix) -> LogDet {
    pfaffian_ltl(row_major(&a.a), a.dim())
}

/// Pfaffian of a raw square buffer assumed antisymmetric (no checks).
/// Pfaffian of the principal submatrix kept by `keep`.
pub fn pfaffinho(a: &AntisymmetricMatrix, keep: &IndexSet) -> Complex64 {
    log_pfaffinho(a, keep).value()
}

pub fn log_pfaffinho(a: &AntisymmetricMatrix, keep: &IndexSet) -> LogDet {
    if keep.is_empty() {
        return LogDet::ONE;
    }
    if keep.len() % 2 == 1 {
        return LogDet::ZERO;
    }
    let p = keep.positions();
    let m = p.len();
    let mut buf = Vec::with_capacity(m * m);
    for &i in p {
        for &j in p {
            buf.push(a.a[[i, j]]);
        }
    }
    pfaffian_ltl(buf, m)
}

/// Many pfaffinhos of the same matrix, evaluated in parallel; output order
/// follows `sets`.
pub fn pfaffinho_batch(a: &AntisymmetricMatrix, sets: &[IndexSet]) -> Vec<Complex64> {
    sets.par_iter().map(|s| pfaffinho(a, s)).collect()
}
