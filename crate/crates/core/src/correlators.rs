//! Quadratic correlators of |R, 0⟩ and Kramers-Wannier consistency checks.
//!
//! C_jk = ⟨c_j† c_k⟩, G_jk = ⟨(c_j† - c_j)(c_k† + c_k)⟩,
//! K_jk = ⟨(c_j† + c_j)(c_k† + c_k)⟩, K̄_jk = -⟨(c_j† - c_j)(c_k† - c_k)⟩.

use num_complex::Complex64;

use crate::basis::{dual_matrix, phi_twist};
use crate::config::BitString;
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::pfaffian::AntisymmetricMatrix;

pub const Q_MAX_COND: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct CorrelationSet {
    /// Q = (I - R*R)⁻¹.
    pub q: CMatrix,
    pub c: CMatrix,
    pub g: CMatrix,
    pub k: CMatrix,
    pub kbar: CMatrix,
}

pub fn correlations(r: &AntisymmetricMatrix) -> Result<CorrelationSet> {
    let l = r.dim();
    let id = dense::identity(l);
    let rs = r.as_array().mapv(|z| z.conj());
    let ra = r.as_array();
    let (q, cond) = dense::inverse(&(&id - &dense::matmul(&rs, ra)));
    if cond > Q_MAX_COND {
        return Err(Error::SingularQ(cond));
    }
    let qt = q.t().to_owned();
    let half = &id * Complex64::new(0.5, 0.0);

    let c = &id - &q;
    let g = &id + &dense::matmul(&qt, &(ra - &id)) + dense::matmul(&rs, &qt) - &q;
    let k = dense::matmul(&(&half + &rs), &qt) + dense::matmul(&qt, &(&half - ra)) - &q + &id;
    let kbar = dense::matmul(&(&half - &rs), &qt) + dense::matmul(&qt, &(&half + ra)) - &q + &id;
    Ok(CorrelationSet { q, c, g, k, kbar })
}

/// Largest violation of the two duality relations
/// G_{j,j+1}(R) = 1 - 2C_jj(R̃), G_{L,1}(R) = 2C_LL(R̃) - 1 and the mirrored
/// ones with R and R̃ exchanged (C evaluated on site j+1 / site 1).
pub fn kw_residuals(r: &AntisymmetricMatrix, rtilde: &AntisymmetricMatrix) -> Result<f64> {
    let l = r.dim();
    let a = correlations(r)?;
    let b = correlations(rtilde)?;
    let one = Complex64::new(1.0, 0.0);
    let mut res: f64 = 0.0;
    for j in 0..l.saturating_sub(1) {
        res = res.max((a.g[[j, j + 1]] - one + b.c[[j, j]] * 2.0).norm());
        res = res.max((b.g[[j, j + 1]] - one + a.c[[j + 1, j + 1]] * 2.0).norm());
    }
    if l > 0 {
        res = res.max((a.g[[l - 1, 0]] - b.c[[l - 1, l - 1]] * 2.0 + one).norm());
        res = res.max((b.g[[l - 1, 0]] - a.c[[0, 0]] * 2.0 + one).norm());
    }
    Ok(res)
}

/// Residual of the φ-rotated duality relation
/// cos²φ G_{j,j+1} + i sinφ cosφ (K̄ - K)_{j,j+1} + sin²φ G_{j+1,j} = 1 - 2C_jj(R̃^φ)
/// (sign of the right side reversed on the closing bond), for a base-0 state.
pub fn kw_phi_residuals(r: &AntisymmetricMatrix, phi: f64) -> Result<f64> {
    let l = r.dim();
    let a = correlations(r)?;
    let twisted = phi_twist(r, &BitString::zeros(l), phi)?;
    let b = correlations(&dual_matrix(&twisted)?.rtilde)?;
    let (s, c) = phi.sin_cos();
    let i = Complex64::i();
    let mut res: f64 = 0.0;
    for j in 0..l {
        let k = (j + 1) % l;
        let lhs = a.g[[j, k]] * c * c + i * s * c * (a.kbar[[j, k]] - a.k[[j, k]]) + a.g[[k, j]] * s * s;
        let occ = b.c[[j, j]] * 2.0;
        let rhs = if j + 1 < l {
            Complex64::new(1.0, 0.0) - occ
        } else {
            occ - 1.0
        };
        res = res.max((lhs - rhs).norm());
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::dual_matrix;
    use crate::sampling::{seeded, well_conditioned};

    #[test]
    fn vacuum_correlators() {
        let cs = correlations(&AntisymmetricMatrix::zeros(4)).unwrap();
        assert!(cs.c.iter().all(|z| z.norm() < 1e-15));
        // G_jj = -⟨c_j c_j†⟩ = -1 in the vacuum
        assert!((cs.g + dense::identity(4)).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn two_site_occupation() {
        let r12 = 0.7;
        let r = AntisymmetricMatrix::from_upper(2, |_, _| Complex64::new(r12, 0.0));
        let cs = correlations(&r).unwrap();
        assert!((cs.c[[0, 0]].re - r12 * r12 / (1.0 + r12 * r12)).abs() < 1e-14);
    }

    #[test]
    fn duals_satisfy_kw_and_perturbations_do_not() {
        let mut rng = seeded(21);
        for l in [3, 8] {
            let r = well_conditioned(&mut rng, l, false);
            let d = dual_matrix(&r).unwrap();
            assert!(kw_residuals(&r, &d.rtilde).unwrap() < 1e-9);
            let bumped = AntisymmetricMatrix::from_upper(l, |i, j| {
                d.rtilde.get(i, j) + Complex64::new(1e-3 * (1.0 + (i + 2 * j) as f64 / l as f64), 0.0)
            });
            assert!(kw_residuals(&r, &bumped).unwrap() >= 1e-4);
        }
    }

    #[test]
    fn phi_relation_holds_for_real_states() {
        let r = well_conditioned(&mut seeded(22), 6, false);
        for phi in [0.0, 0.3, 1.1] {
            assert!(kw_phi_residuals(&r, phi).unwrap() < 1e-9);
        }
    }

    #[test]
    fn hermitian_occupations_in_unit_interval() {
        let r = well_conditioned(&mut seeded(23), 7, true);
        let cs = correlations(&r).unwrap();
        for i in 0..7 {
            assert!(cs.c[[i, i]].re > -1e-10 && cs.c[[i, i]].re < 1.0 + 1e-10);
            for j in 0..7 {
                assert!((cs.c[[i, j]] - cs.c[[j, i]].conj()).norm() < 1e-10);
            }
        }
    }
}
