//! Spectral fast path for antisymmetric skew-circulant matrices (periodic
//! chains).
//!
//! A skew-circulant matrix with first row `(c_0, …, c_{L-1})` is diagonalised
//! by the half-integer Fourier modes `y^(m)_j = e^{-2πi j (m+1/2)/L}/√L` with
//! eigenvalues `Λ_m = Σ_k c_k e^{-2πi k (m+1/2)/L}`.  For antisymmetric input
//! the modes pair up as `(m, L-1-m)` with `Λ_{L-1-m} = -Λ_m`, giving the
//! block form `A = V Σ V^T` where `V = e^{-iπ/4} U K^†` does not depend on the
//! matrix and `Σ` carries `iΛ_k` in its k-th 2×2 block.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use itertools::Itertools;
use ndarray::Array2;
use num_complex::Complex64;

use super::{AntisymmetricMatrix, IndexSet};
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};

/// Relative tolerance for the skew-circulant structure checks.
pub const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralForm {
    l: usize,
    /// Λ_m indexed by the natural mode label m = 0..L-1.
    lambda: Vec<Complex64>,
}

/// e^{-iπ j / L}, j = 0..2L-1; all mode phases are entries of this table.
fn phase_table(l: usize) -> Vec<Complex64> {
    (0..2 * l)
        .map(|j| Complex64::from_polar(1.0, -PI * j as f64 / l as f64))
        .collect()
}

/// Column order of U: (0, L-1, 1, L-2, …).
pub fn pairing_order(l: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(l);
    for k in 0..l / 2 {
        order.push(k);
        order.push(l - 1 - k);
    }
    if l % 2 == 1 {
        order.push((l - 1) / 2);
    }
    order
}

/// Dense skew-circulant matrix from its first row.
pub fn skew_circulant_matrix(first_row: &[Complex64]) -> CMatrix {
    let l = first_row.len();
    Array2::from_shape_fn((l, l), |(i, j)| {
        if j >= i {
            first_row[j - i]
        } else {
            -first_row[l + j - i]
        }
    })
}

/// Λ_m = Σ_k c_k e^{-2πi k (m+1/2)/L}, m = 0..L-1, for any skew-circulant
/// matrix (no antisymmetry required).
pub fn skew_circulant_eigenvalues(first_row: &[Complex64]) -> Vec<Complex64> {
    let l = first_row.len();
    let w = phase_table(l);
    (0..l)
        .map(|m| {
            (0..l)
                .map(|k| first_row[k] * w[(k * (2 * m + 1)) % (2 * l)])
                .sum::<Complex64>()
        })
        .collect()
}

/// Spectrum of the antisymmetric skew-circulant matrix with this first row.
pub fn skew_circulant_spectrum(first_row: &[Complex64]) -> Result<SpectralForm> {
    SpectralForm::from_first_row(first_row)
}

impl SpectralForm {
    pub fn from_first_row(c: &[Complex64]) -> Result<Self> {
        let l = c.len();
        let scale = c.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut dev = c.first().map_or(0.0, |z| z.norm());
        for k in 1..l {
            dev = dev.max((c[k] - c[l - k]).norm());
        }
        if dev > STRUCTURE_TOL * scale {
            return Err(Error::NotSkewCirculant(dev));
        }
        Ok(SpectralForm {
            l,
            lambda: skew_circulant_eigenvalues(c),
        })
    }

    /// Checks the full matrix for skew-circulant structure before
    /// transforming its first row.
    pub fn from_matrix(a: &AntisymmetricMatrix) -> Result<Self> {
        let l = a.dim();
        if l == 0 {
            return Ok(SpectralForm { l, lambda: vec![] });
        }
        let row: Vec<Complex64> = (0..l).map(|j| a.get(0, j)).collect();
        let expect = skew_circulant_matrix(&row);
        let dev = (a.as_array() - &expect)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if dev > STRUCTURE_TOL * a.max_abs().max(1.0) {
            return Err(Error::NotSkewCirculant(dev));
        }
        Self::from_first_row(&row)
    }

    /// From eigenvalues Λ_m in natural order m = 0..L-1.
    pub fn from_eigenvalues(lambda: Vec<Complex64>) -> Self {
        SpectralForm {
            l: lambda.len(),
            lambda,
        }
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    /// Λ_m, natural order.
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.lambda
    }

    /// Eigenvalues in the column order of U (0, L-1, 1, L-2, …).
    pub fn paired_eigenvalues(&self) -> Vec<Complex64> {
        pairing_order(self.l).into_iter().map(|m| self.lambda[m]).collect()
    }

    /// Λ̃_k = Λ_k for each 2×2 block, plus the unpaired mode for odd L.
    pub fn block_lambdas(&self) -> Vec<Complex64> {
        (0..(self.l + 1) / 2).map(|k| self.lambda[k]).collect()
    }

    /// Unitary U with columns y^(m) in pairing order.
    pub fn u(&self) -> CMatrix {
        let l = self.l;
        let w = phase_table(l);
        let order = pairing_order(l);
        let norm = 1.0 / (l as f64).sqrt();
        Array2::from_shape_fn((l, l), |(j, col)| {
            w[(j * (2 * order[col] + 1)) % (2 * l)] * norm
        })
    }

    /// V = e^{-iπ/4} U K^†, a function of L only.
    pub fn v(&self) -> CMatrix {
        let l = self.l;
        let u = self.u();
        let pre = Complex64::from_polar(1.0, -PI / 4.0);
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let hi = Complex64::new(0.0, -FRAC_1_SQRT_2);
        let mut v = Array2::zeros((l, l));
        for j in 0..l {
            for b in 0..l / 2 {
                let (c0, c1) = (2 * b, 2 * b + 1);
                // K^† block = (1/√2) [[1, -i], [-i, 1]]
                v[[j, c0]] = pre * (u[[j, c0]] * h + u[[j, c1]] * hi);
                v[[j, c1]] = pre * (u[[j, c0]] * hi + u[[j, c1]] * h);
            }
            if l % 2 == 1 {
                v[[j, l - 1]] = pre * u[[j, l - 1]];
            }
        }
        v
    }

    /// Block matrix Σ with iΛ̃_k above the diagonal of block k.
    pub fn sigma(&self) -> CMatrix {
        let l = self.l;
        let mut s = Array2::zeros((l, l));
        for b in 0..l / 2 {
            let z = Complex64::i() * self.lambda[b];
            s[[2 * b, 2 * b + 1]] = z;
            s[[2 * b + 1, 2 * b]] = -z;
        }
        s
    }

    /// V Σ V^T.
    pub fn reconstruct(&self) -> CMatrix {
        let v = self.v();
        let vs = dense::matmul(&v, &self.sigma());
        dense::matmul(&vs, &v.t().to_owned())
    }

    /// First row c_k = (1/L) Σ_m Λ_m e^{+2πi k (m+1/2)/L}.
    pub fn first_row(&self) -> Vec<Complex64> {
        let l = self.l;
        let w = phase_table(l);
        let inv = 1.0 / l as f64;
        (0..l)
            .map(|k| {
                (0..l)
                    .map(|m| self.lambda[m] * w[(k * (2 * m + 1)) % (2 * l)].conj())
                    .sum::<Complex64>()
                    * inv
            })
            .collect()
    }

    /// Dense antisymmetric matrix with this spectrum.
    pub fn to_matrix(&self) -> AntisymmetricMatrix {
        AntisymmetricMatrix::antisymmetrize(&skew_circulant_matrix(&self.first_row()))
    }

    /// ln det(I + A^† A)^{1/4} = (1/4) Σ_m ln(1 + |Λ_m|²).
    pub fn log_norm(&self) -> f64 {
        0.25 * self.lambda.iter().map(|z| z.norm_sqr().ln_1p()).sum::<f64>()
    }
}

/// pf A_I = Σ_J det V_IJ pf Σ_JJ.  Only J assembled from whole 2×2 blocks of
/// Σ contribute, so the sum runs over C(⌊L/2⌋, |I|/2) block subsets.
pub fn spectral_pfaffinho(s: &SpectralForm, keep: &IndexSet) -> Complex64 {
    if keep.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    if keep.len() % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let v = s.v();
    let rows = keep.positions();
    let r = rows.len() / 2;
    let nb = s.len() / 2;
    let mut total = Complex64::new(0.0, 0.0);
    for blocks in (0..nb).combinations(r) {
        let weight: Complex64 = blocks
            .iter()
            .map(|&b| Complex64::i() * s.lambda[b])
            .product();
        if weight == Complex64::new(0.0, 0.0) {
            continue;
        }
        let cols: Vec<usize> = blocks.iter().flat_map(|&b| [2 * b, 2 * b + 1]).collect();
        let sub = Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| v[[rows[i], cols[j]]]);
        total += dense::det(&sub) * weight;
    }
    total
}

/// Amplitude of the all-`+` configuration of a periodic state whose dual
/// matrix has this spectrum: (1/√2) Π_m (1 + |Λ_m|²)^{-1/4}.
pub fn all_plus_amplitude(s: &SpectralForm) -> f64 {
    FRAC_1_SQRT_2 * (-s.log_norm()).exp()
}

/// ln of the all-`+` probability, ln(1/2) - (1/2) Σ_m ln(1 + |Λ_m|²).
pub fn ln_all_plus_probability(s: &SpectralForm) -> f64 {
    -std::f64::consts::LN_2 - 2.0 * s.log_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfaffian::pfaffinho;
    use crate::testing::{random_skew_circulant_row, rng};

    fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn two_site_eigenvalues() {
        let c = Complex64::new(0.7, 0.2);
        let s = skew_circulant_spectrum(&[Complex64::new(0.0, 0.0), c]).unwrap();
        for m in 0..2 {
            let expect = c * Complex64::from_polar(1.0, -2.0 * PI * (m as f64 + 0.5) / 2.0);
            assert!((s.eigenvalues()[m] - expect).norm() < 1e-14);
        }
        let u = s.u();
        let lam = Array2::from_diag(&ndarray::Array1::from(s.paired_eigenvalues()));
        let back = dense::matmul(&dense::matmul(&u, &lam), &u.t().mapv(|z| z.conj()));
        let a = skew_circulant_matrix(&[Complex64::new(0.0, 0.0), c]);
        assert!(max_dev(&back, &a) < 1e-12);
    }

    #[test]
    fn rejects_non_antisymmetric_rows() {
        let row = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        assert!(matches!(skew_circulant_spectrum(&row), Err(Error::NotSkewCirculant(_))));
        let row = vec![Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)];
        assert!(skew_circulant_spectrum(&row).is_err());
    }

    #[test]
    fn from_matrix_rejects_generic_antisymmetric() {
        let a = crate::testing::random_antisymmetric(&mut rng(4), 5, 1.0);
        assert!(SpectralForm::from_matrix(&a).is_err());
    }

    #[test]
    fn block_form_reconstructs_and_inverts() {
        let mut r = rng(5);
        for l in [2, 3, 4, 7, 8] {
            let row = random_skew_circulant_row(&mut r, l);
            let s = skew_circulant_spectrum(&row).unwrap();
            let a = skew_circulant_matrix(&row);
            assert!(max_dev(&s.reconstruct(), &a) < 1e-12, "L = {l}");
            let back = s.first_row();
            for k in 0..l {
                assert!((back[k] - row[k]).norm() < 1e-12);
            }
            if l % 2 == 1 {
                assert!(s.eigenvalues()[(l - 1) / 2].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn spectral_pfaffinho_matches_dense() {
        let mut r = rng(6);
        for l in [4, 5, 6] {
            let row = random_skew_circulant_row(&mut r, l);
            let s = skew_circulant_spectrum(&row).unwrap();
            let a = s.to_matrix();
            for idx in 0..(1usize << l) {
                let keep = crate::config::BitString::from_index(idx, l).support();
                let d = pfaffinho(&a, &keep);
                let p = spectral_pfaffinho(&s, &keep);
                assert!((d - p).norm() < 1e-10, "L = {l}, keep = {:?}", keep.sites());
            }
        }
    }

    #[test]
    fn all_plus_trivial_products() {
        let s = SpectralForm::from_eigenvalues(vec![Complex64::new(0.0, 0.0); 6]);
        assert!((all_plus_amplitude(&s) - FRAC_1_SQRT_2).abs() < 1e-15);
        let s = SpectralForm::from_eigenvalues(vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ]);
        assert!((all_plus_amplitude(&s) - 2f64.powf(-1.5)).abs() < 1e-15);
    }
}
