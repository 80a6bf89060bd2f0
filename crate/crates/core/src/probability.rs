//! Configuration probabilities in the σ^z and rotated bases.
//!
//! Besides |amplitude|² there are determinant forms:
//! * σ^z, real R:  P_I = det[(I - I_I G)/2]
//! * rotated:      P_S = |det[((I - I_S) R̃^φ + I + I_S)/2]| / (2 N_R̃²)
//! * σ^x, σ^y, real R, base 0…0 (no inversion at all):
//!   P^x_S = ½ det[(I - I_S G P)/2],  P^y_S = ½ det[(P - G I_S)/2]
//! * any φ, real R, base 0…0:
//!   P_S = |det(A + J P^T B)| / 2^{L+1},  A = cos φ G + i sin φ I,
//!   B = cos φ I + i sin φ G, J = −I_S.  For real R the Cayley transform
//!   (R − I)(R + I)⁻¹ is G itself and G is orthogonal, so N_R̃ and both
//!   inversions of the dual construction cancel; φ = 0, π/2 give back the
//!   two forms above.
//!
//! where I_I / I_S are diagonal ±1 matrices with -1 on occupied sites /
//! selected domain walls.  Everything is evaluated in the log domain so the
//! same code serves L ~ 10³.

use std::f64::consts::LN_2;

use ndarray::Array2;
use num_complex::Complex64;

use crate::basis::{domain_wall, times_shift, BasisSpec, RotatedView};
use crate::config::{check_len, BitString, SignSequence};
use crate::correlators::correlations;
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::pfaffian::{AntisymmetricMatrix, IndexSet};
use crate::state::GaussianState;

/// Imaginary parts above this count as a complex R.
pub const REAL_TOL: f64 = 1e-12;

/// Diagonal ±1 matrix: -1 where the configuration has a fermion / wall.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalSignMatrix {
    signs: Vec<f64>,
}

impl DiagonalSignMatrix {
    pub fn from_bits(b: &BitString) -> Self {
        DiagonalSignMatrix {
            signs: b.bits().iter().map(|&n| if n == 1 { -1.0 } else { 1.0 }).collect(),
        }
    }

    pub fn from_set(set: &IndexSet, l: usize) -> Self {
        let mut signs = vec![1.0; l];
        for &p in set.positions() {
            signs[p] = -1.0;
        }
        DiagonalSignMatrix { signs }
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn to_matrix(&self) -> Array2<f64> {
        Array2::from_diag(&ndarray::Array1::from(self.signs.clone()))
    }
}

fn require_real(r: &AntisymmetricMatrix) -> Result<()> {
    let im = r.max_imag();
    if im > REAL_TOL {
        return Err(Error::NotRealMatrix(im));
    }
    Ok(())
}

/// Real G of a real-R state (imaginary parts are round-off only).
pub fn real_g(r: &AntisymmetricMatrix) -> Result<Array2<f64>> {
    require_real(r)?;
    Ok(correlations(r)?.g.mapv(|z| z.re))
}

fn ln_abs_det_real(a: &Array2<f64>) -> f64 {
    dense::log_det_real(a).1
}

/// |pf R_{C⊕I}|² / N_R².
pub fn prob_z(state: &GaussianState, i: &BitString) -> Result<f64> {
    Ok(state.ln_prob_z(i)?.exp())
}

/// ln det[(I - I_I G)/2] for a base-0 state with real correlator G.
pub fn ln_prob_z_from_g(g: &Array2<f64>, i: &BitString) -> Result<f64> {
    check_len(g.nrows(), i.len())?;
    let d = DiagonalSignMatrix::from_bits(i);
    let m = Array2::from_shape_fn(g.dim(), |(r, c)| {
        ((r == c) as u8 as f64 - d.signs[r] * g[[r, c]]) * 0.5
    });
    Ok(ln_abs_det_real(&m))
}

/// Determinant form for real R.  For a base C ≠ 0 the sign matrix is built
/// from I ⊕ C, the pfaffinho actually probed.
pub fn prob_z_real(state: &GaussianState, i: &BitString) -> Result<f64> {
    let g = real_g(state.r())?;
    let probe = state.base().difference(i)?;
    let bits = BitString::new(
        (0..i.len())
            .map(|k| probe.positions().contains(&k) as u8)
            .collect(),
    )?;
    Ok(ln_prob_z_from_g(&g, &bits)?.exp())
}

/// ln|det[((I - D) R̃ + I + D)/2]| - ln 2 - 2 ln N_R̃ with D = -1 on `keep`.
pub fn ln_prob_masked(rtilde: &CMatrix, log_norm_tilde: f64, keep: &IndexSet) -> f64 {
    let l = rtilde.nrows();
    let d = DiagonalSignMatrix::from_set(keep, l);
    let m = Array2::from_shape_fn((l, l), |(r, c)| {
        if d.signs[r] < 0.0 {
            rtilde[[r, c]]
        } else if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    dense::log_det(&m).ln_abs - LN_2 - 2.0 * log_norm_tilde
}

/// Masked-determinant form of the rotated-basis probability.
pub fn prob_phi_view(view: &RotatedView, s: &SignSequence) -> Result<f64> {
    let keep = view.walls(s)?;
    let d = view.dual();
    Ok(ln_prob_masked(d.rtilde.as_array(), d.log_norm_tilde, &keep).exp())
}

pub fn prob_phi(state: &GaussianState, s: &SignSequence, phi: f64) -> Result<f64> {
    prob_phi_view(&RotatedView::new(state, BasisSpec::new(phi, 0.0))?, s)
}

fn require_vacuum_base(state: &GaussianState) -> Result<()> {
    if state.base().count_ones() != 0 {
        return Err(Error::InvalidConfiguration(
            "the σ^x/σ^y determinant forms need base configuration 0…0".to_string(),
        ));
    }
    Ok(())
}

/// ln ½det[(I - I_S G P)/2].
pub fn ln_prob_x_from_g(g: &Array2<f64>, s: &SignSequence) -> Result<f64> {
    check_len(g.nrows(), s.len())?;
    let d = DiagonalSignMatrix::from_bits(&domain_wall(s));
    let gp = times_shift(g);
    let m = Array2::from_shape_fn(g.dim(), |(r, c)| {
        ((r == c) as u8 as f64 - d.signs[r] * gp[[r, c]]) * 0.5
    });
    Ok(ln_abs_det_real(&m) - LN_2)
}

/// ln ½det[(P - G I_S)/2].
pub fn ln_prob_y_from_g(g: &Array2<f64>, s: &SignSequence) -> Result<f64> {
    let l = g.nrows();
    check_len(l, s.len())?;
    let d = DiagonalSignMatrix::from_bits(&domain_wall(s));
    let m = Array2::from_shape_fn(g.dim(), |(r, c)| {
        let p = if r == 0 && c == l - 1 {
            1.0
        } else if c + 1 == r {
            -1.0
        } else {
            0.0
        };
        (p - g[[r, c]] * d.signs[c]) * 0.5
    });
    Ok(ln_abs_det_real(&m) - LN_2)
}

/// ln |det(A + J P^T B)| − (L + 1) ln 2 for a real-R, base-0 state with
/// (orthogonal) correlator G.
pub fn ln_prob_phi_from_g(g: &Array2<f64>, s: &SignSequence, phi: f64) -> Result<f64> {
    let l = g.nrows();
    check_len(l, s.len())?;
    let walls = domain_wall(s);
    let (sn, cs) = phi.sin_cos();
    let b = |r: usize, c: usize| {
        Complex64::new(if r == c { cs } else { 0.0 }, sn * g[[r, c]])
    };
    // (P^T B)_rc = -B_{r+1,c} for r < L-1, B_{0,c} for r = L-1
    let m = Array2::from_shape_fn((l, l), |(r, c)| {
        let a = Complex64::new(cs * g[[r, c]], if r == c { sn } else { 0.0 });
        let ptb = if r + 1 < l { -b(r + 1, c) } else { b(0, c) };
        let j = if walls.get(r) == 1 { 1.0 } else { -1.0 };
        a + ptb * j
    });
    Ok(dense::log_det(&m).ln_abs - (l as f64 + 1.0) * LN_2)
}

/// Rotated-basis probability of a real-R, base-0 state with a single
/// determinant; see the module notes.
pub fn prob_phi_real(state: &GaussianState, s: &SignSequence, phi: f64) -> Result<f64> {
    require_vacuum_base(state)?;
    Ok(ln_prob_phi_from_g(&real_g(state.r())?, s, phi)?.exp())
}

pub fn prob_x(state: &GaussianState, s: &SignSequence) -> Result<f64> {
    require_vacuum_base(state)?;
    Ok(ln_prob_x_from_g(&real_g(state.r())?, s)?.exp())
}

pub fn prob_y(state: &GaussianState, s: &SignSequence) -> Result<f64> {
    require_vacuum_base(state)?;
    Ok(ln_prob_y_from_g(&real_g(state.r())?, s)?.exp())
}

/// Alternative construction of R̃^φ for a real base-0 state,
/// (−H − i cotφ HP + P + i cotφ I)⁻¹ (H − i cotφ HP + P − i cotφ I);
/// only defined for sin φ ≠ 0.
pub fn rtilde_phi_cot(r: &AntisymmetricMatrix, phi: f64) -> Result<AntisymmetricMatrix> {
    if phi.sin().abs() < 1e-12 {
        return Err(Error::InvalidModel("cot φ is undefined for φ ≡ 0 (mod π)".to_string()));
    }
    let l = r.dim();
    let id = dense::identity(l);
    let (rp_inv, cond) = dense::inverse(&(r.as_array() + &id));
    if cond > crate::basis::CAYLEY_MAX_COND {
        return Err(Error::SingularCayley(cond));
    }
    let h = dense::matmul(&(r.as_array() - &id), &rp_inv);
    let hp = times_shift(&h);
    let p = dense::to_complex(&crate::basis::shift_matrix(l));
    let ic = Complex64::new(0.0, 1.0 / phi.tan());
    let num = &h - &(&hp * ic) + &p - &(&id * ic);
    let den = -&h - &(&hp * ic) + &p + &(&id * ic);
    let (den_inv, cond) = dense::inverse(&den);
    if cond > crate::basis::CAYLEY_MAX_COND {
        return Err(Error::SingularCayley(cond));
    }
    Ok(AntisymmetricMatrix::antisymmetrize(&dense::matmul(&den_inv, &num)))
}
