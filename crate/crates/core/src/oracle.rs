//! Brute-force references in the 2^L-dimensional Fock space.
//!
//! Nothing here goes through pfaffinhos or dual matrices: states are built by
//! applying exp(½ Σ r_ij a_i a_j) to |C⟩ as a (terminating) power series with
//! explicit Jordan-Wigner fermion operators, rotated site by site, and the
//! TFI ground state comes from exact diagonalisation of the spin chain.
//!
//! Basis index convention: site 1 is the most significant bit, bit 1 =
//! occupied (σ^z = +1); in rotated bases bit 1 = '−'.

use ndarray::Array2;
use num_complex::Complex64;

use crate::basis::BasisSpec;
use crate::config::{check_len, BitString, SignSequence};
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::pfaffian::AntisymmetricMatrix;
use crate::state::GenericGaussianExponent;

/// Largest L for the power-series construction.
pub const MAX_SERIES_L: usize = 10;
/// Largest L for exact diagonalisation.
pub const MAX_ED_L: usize = 16;
/// Dense eigensolver below this Hilbert-space dimension, Lanczos above.
pub const DENSE_ED_DIM: usize = 1024;
pub const MIN_GAP: f64 = 1e-8;

fn check_size(l: usize, max: usize) -> Result<()> {
    if l > max {
        return Err(Error::SizeLimit { l, max });
    }
    Ok(())
}

#[inline]
fn bit(l: usize, site: usize) -> usize {
    1 << (l - 1 - site)
}

/// c_j|idx⟩ = (−1)^{Σ_{k<j} n_k} |idx − e_j⟩.
pub fn annihilate(l: usize, site: usize, idx: usize) -> Option<(usize, f64)> {
    let b = bit(l, site);
    if idx & b == 0 {
        return None;
    }
    let before = (idx >> (l - site)).count_ones();
    Some((idx ^ b, if before % 2 == 0 { 1.0 } else { -1.0 }))
}

pub fn create(l: usize, site: usize, idx: usize) -> Option<(usize, f64)> {
    let b = bit(l, site);
    if idx & b != 0 {
        return None;
    }
    let before = (idx >> (l - site)).count_ones();
    Some((idx ^ b, if before % 2 == 0 { 1.0 } else { -1.0 }))
}

/// A single fermion operator: c_j (dagger = false) or c_j†.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Op {
    pub site: usize,
    pub dagger: bool,
}

impl Op {
    pub fn c(site: usize) -> Self {
        Op { site, dagger: false }
    }

    pub fn cdag(site: usize) -> Self {
        Op { site, dagger: true }
    }

    fn act(self, l: usize, idx: usize) -> Option<(usize, f64)> {
        if self.dagger {
            create(l, self.site, idx)
        } else {
            annihilate(l, self.site, idx)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    l: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn new(l: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_len(1 << l, amps.len())?;
        Ok(DenseState { l, amps })
    }

    pub fn basis_state(c: &BitString) -> Self {
        let l = c.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << l];
        amps[c.to_index()] = Complex64::new(1.0, 0.0);
        DenseState { l, amps }
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, idx: usize) -> Complex64 {
        self.amps[idx]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        DenseState {
            l: self.l,
            amps: self.amps.iter().map(|z| z / n).collect(),
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.norm_sqr();
        self.amps.iter().map(|z| z.norm_sqr() / n).collect()
    }

    /// Applies a product of fermion operators, rightmost first.
    pub fn apply(&self, ops: &[Op]) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut cur = Some((idx, 1.0));
            for op in ops.iter().rev() {
                cur = cur.and_then(|(i, s)| op.act(self.l, i).map(|(j, t)| (j, s * t)));
            }
            if let Some((j, s)) = cur {
                out[j] += a * s;
            }
        }
        DenseState { l: self.l, amps: out }
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// ⟨ψ| ops |ψ⟩ / ⟨ψ|ψ⟩.
    pub fn expectation(&self, ops: &[Op]) -> Complex64 {
        self.inner(&self.apply(ops)) / self.norm_sqr()
    }

    /// Amplitudes ⟨S|ψ⟩ in the rotated basis, indexed like
    /// [`SignSequence::from_index`] (bit 1 = '−').
    pub fn rotate(&self, basis: BasisSpec) -> Self {
        let (phi, alpha) = (basis.phi, basis.alpha);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e_phi = Complex64::from_polar(h, -phi);
        let e_alpha = Complex64::from_polar(h, -alpha);
        // rows: output '+' / '−'; columns: input bit 0 / 1
        let u = [
            [e_phi, Complex64::new(h, 0.0)],
            [-Complex64::from_polar(h, -(alpha + phi)), e_alpha],
        ];
        self.local_transform(u)
    }

    /// Inverse of [`rotate`](Self::rotate): back to occupation amplitudes.
    pub fn rotate_inverse(&self, basis: BasisSpec) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (phi, alpha) = (basis.phi, basis.alpha);
        let u = [
            [Complex64::from_polar(h, -phi), Complex64::new(h, 0.0)],
            [-Complex64::from_polar(h, -(alpha + phi)), Complex64::from_polar(h, -alpha)],
        ];
        // U is unitary, so the inverse is U^†
        let uh = [
            [u[0][0].conj(), u[1][0].conj()],
            [u[0][1].conj(), u[1][1].conj()],
        ];
        self.local_transform(uh)
    }

    fn local_transform(&self, u: [[Complex64; 2]; 2]) -> Self {
        let mut amps = self.amps.clone();
        for site in 0..self.l {
            let b = bit(self.l, site);
            for idx in 0..amps.len() {
                if idx & b != 0 {
                    continue;
                }
                let (a0, a1) = (amps[idx], amps[idx | b]);
                amps[idx] = u[0][0] * a0 + u[0][1] * a1;
                amps[idx | b] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        DenseState { l: self.l, amps }
    }

    /// max_i |a_i − e^{iθ} b_i| over normalised vectors, with the phase θ
    /// chosen from the overlap.
    pub fn distance_up_to_phase(&self, other: &DenseState) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        let ov = b.inner(&a);
        let phase = if ov.norm() > 0.0 {
            ov / ov.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        a.amps
            .iter()
            .zip(&b.amps)
            .map(|(x, y)| (x - y * phase).norm())
            .fold(0.0, f64::max)
    }
}

/// Pfaffian by expansion along the first row; O(n!!), for tiny matrices only.
pub fn pfaffian_expansion(a: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let idx: Vec<usize> = (0..n).collect();
    pf_rec(a, &idx)
}

fn pf_rec(a: &CMatrix, idx: &[usize]) -> Complex64 {
    match idx.len() {
        0 => Complex64::new(1.0, 0.0),
        n if n % 2 == 1 => Complex64::new(0.0, 0.0),
        _ => {
            let mut total = Complex64::new(0.0, 0.0);
            for k in 1..idx.len() {
                let rest: Vec<usize> = idx[1..]
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p + 1 != k)
                    .map(|(_, &x)| x)
                    .collect();
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                total += a[[idx[0], idx[k]]] * sign * pf_rec(a, &rest);
            }
            total
        }
    }
}

/// exp(½ Σ r_ij a_i a_j)|C⟩ (unnormalised) by summing the power series of the
/// pair operator, a_j = c_j on occupied and c_j† on empty sites of C.
pub fn series_state(r: &AntisymmetricMatrix, base: &BitString) -> Result<DenseState> {
    let l = base.len();
    check_len(r.dim(), l)?;
    check_size(l, MAX_SERIES_L)?;
    let a = |j: usize| {
        if base.get(j) == 1 {
            Op::c(j)
        } else {
            Op::cdag(j)
        }
    };
    let pair = |v: &DenseState| {
        let mut out = vec![Complex64::new(0.0, 0.0); v.amps.len()];
        for i in 0..l {
            for j in i + 1..l {
                let rij = r.get(i, j);
                if rij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = v.apply(&[a(i), a(j)]);
                for (o, x) in out.iter_mut().zip(&w.amps) {
                    *o += x * rij;
                }
            }
        }
        DenseState { l, amps: out }
    };
    let mut term = DenseState::basis_state(base);
    let mut total = term.clone();
    // the pair operator is nilpotent of order ⌊L/2⌋ + 1
    for k in 1..=l / 2 {
        term = pair(&term);
        for z in term.amps.iter_mut() {
            *z /= k as f64;
        }
        for (t, x) in total.amps.iter_mut().zip(&term.amps) {
            *t += x;
        }
    }
    Ok(total)
}

/// Normalised |R, C⟩.
pub fn dense_state(r: &AntisymmetricMatrix, base: &BitString) -> Result<DenseState> {
    Ok(series_state(r, base)?.normalized())
}

/// Dense correlators C, G, K, K̄ of a state (see the correlators module for
/// the definitions).
pub struct DenseCorrelators {
    pub c: CMatrix,
    pub g: CMatrix,
    pub k: CMatrix,
    pub kbar: CMatrix,
}

pub fn dense_correlators(psi: &DenseState) -> DenseCorrelators {
    let l = psi.l;
    let zero = || Array2::<Complex64>::zeros((l, l));
    let (mut c, mut g, mut k, mut kbar) = (zero(), zero(), zero(), zero());
    for i in 0..l {
        for j in 0..l {
            let e = |a: Op, b: Op| psi.expectation(&[a, b]);
            let (ci, cdi, cj, cdj) = (Op::c(i), Op::cdag(i), Op::c(j), Op::cdag(j));
            c[[i, j]] = e(cdi, cj);
            // (c_i† − c_i)(c_j† + c_j)
            g[[i, j]] = e(cdi, cdj) + e(cdi, cj) - e(ci, cdj) - e(ci, cj);
            k[[i, j]] = e(cdi, cdj) + e(cdi, cj) + e(ci, cdj) + e(ci, cj);
            kbar[[i, j]] = -(e(cdi, cdj) - e(cdi, cj) - e(ci, cdj) + e(ci, cj));
        }
    }
    DenseCorrelators { c, g, k, kbar }
}

/// exp(½ Σ_ab M_ab α_a β_b)|C⟩ with α = (c†, c), β = (c, c†), via a scaled
/// Taylor series on the state vector.
pub fn generic_state(g: &GenericGaussianExponent) -> Result<DenseState> {
    let l = g.len();
    check_size(l, MAX_SERIES_L)?;
    let m = g.m();
    let alpha = |a: usize| if a < l { Op::cdag(a) } else { Op::c(a - l) };
    let beta = |b: usize| if b < l { Op::c(b) } else { Op::cdag(b - l) };
    let apply_op = |v: &DenseState| {
        let mut out = vec![Complex64::new(0.0, 0.0); v.amps.len()];
        for a in 0..2 * l {
            for b in 0..2 * l {
                let mab = m[[a, b]];
                if mab == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let w = v.apply(&[alpha(a), beta(b)]);
                for (o, x) in out.iter_mut().zip(&w.amps) {
                    *o += x * mab * 0.5;
                }
            }
        }
        out
    };
    let scale = m.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
    let steps = scale.ceil() as usize;
    let mut v = DenseState::basis_state(g.base());
    for _ in 0..steps {
        let mut term = v.clone();
        let mut total = v.amps.clone();
        for k in 1..60 {
            let next = apply_op(&term);
            term.amps = next.into_iter().map(|z| z / (k as f64 * steps as f64)).collect();
            let size: f64 = term.amps.iter().map(|z| z.norm()).sum();
            for (t, x) in total.iter_mut().zip(&term.amps) {
                *t += x;
            }
            if size < 1e-18 {
                break;
            }
        }
        v.amps = total;
    }
    Ok(v)
}

/// Ground state of H = −½ Σ σ^x_j σ^x_{j+1} − (h/2) Σ σ^z_j (σ^z = +1 on
/// occupied sites), with or without the closing bond.
#[derive(Clone, Debug)]
pub struct ExactGroundState {
    pub state: DenseState,
    pub energy: f64,
    pub gap: f64,
}

fn tfi_apply(l: usize, periodic: bool, h: f64, v: &[f64], out: &mut [f64]) {
    let bonds = if periodic { l } else { l - 1 };
    for (idx, o) in out.iter_mut().enumerate() {
        let up = idx.count_ones() as f64;
        *o = -0.5 * h * (2.0 * up - l as f64) * v[idx];
    }
    for (idx, &x) in v.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for j in 0..bonds {
            let k = (j + 1) % l;
            out[idx ^ bit(l, j) ^ bit(l, k)] -= 0.5 * x;
        }
    }
}

fn tfi_dense(l: usize, periodic: bool, h: f64) -> Array2<f64> {
    let dim = 1 << l;
    let mut m = Array2::<f64>::zeros((dim, dim));
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for j in 0..dim {
        e[j] = 1.0;
        tfi_apply(l, periodic, h, &e, &mut col);
        m.column_mut(j).assign(&ndarray::ArrayView1::from(&col[..]));
        e[j] = 0.0;
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lanczos with full reorthogonalisation; returns the two lowest Ritz values
/// and the ground-state Ritz vector.
fn lanczos(l: usize, periodic: bool, h: f64) -> (f64, f64, Vec<f64>) {
    let dim = 1 << l;
    let max_iter = dim.min(400);
    // deterministic start vector with overlap on every basis state
    let mut q: Vec<f64> = (0..dim).map(|i| 1.0 + ((i * 7919) % 113) as f64 / 113.0).collect();
    let n0 = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= n0);
    let mut basis = vec![q];
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut w = vec![0.0; dim];
    let mut last = (f64::NAN, f64::NAN, Vec::new());
    for it in 0..max_iter {
        tfi_apply(l, periodic, h, &basis[it], &mut w);
        let a = dot(&w, &basis[it]);
        alphas.push(a);
        // two passes of Gram-Schmidt against the full Krylov basis
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = dot(&w, &w).sqrt();
        let m = alphas.len();
        let t = Array2::from_shape_fn((m, m), |(i, j)| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let (vals, vecs) = dense::symmetric_eigh(&t);
        // residual of the lowest Ritz pair is β |last component|
        let resid = beta * vecs[[m - 1, 0]].abs();
        last = (
            vals[0],
            vals.get(1).copied().unwrap_or(f64::INFINITY),
            (0..dim)
                .map(|i| (0..m).map(|k| vecs[[k, 0]] * basis[k][i]).sum())
                .collect(),
        );
        let resid1 = if m > 1 { beta * vecs[[m - 1, 1]].abs() } else { f64::INFINITY };
        if beta < 1e-12 || (resid < 1e-11 && resid1 < 1e-9) {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    last
}

pub fn tfi_exact_ground_state(l: usize, periodic: bool, h: f64) -> Result<ExactGroundState> {
    check_size(l, MAX_ED_L)?;
    if l < 2 {
        return Err(Error::InvalidModel("exact diagonalisation needs L ≥ 2".to_string()));
    }
    let dim = 1 << l;
    let (e0, e1, v) = if dim <= DENSE_ED_DIM {
        let (vals, vecs) = dense::symmetric_eigh(&tfi_dense(l, periodic, h));
        (vals[0], vals[1], vecs.column(0).to_vec())
    } else {
        lanczos(l, periodic, h)
    };
    let gap = e1 - e0;
    if gap <= MIN_GAP {
        return Err(Error::DegenerateGroundState(gap));
    }
    let big = v
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    let sign = if big < 0.0 { -1.0 } else { 1.0 };
    let amps = v.iter().map(|x| Complex64::new(sign * x, 0.0)).collect();
    Ok(ExactGroundState {
        state: DenseState::new(l, amps)?.normalized(),
        energy: e0,
        gap,
    })
}

/// σ^z-basis probability of `i` in a dense state.
pub fn dense_prob_z(psi: &DenseState, i: &BitString) -> f64 {
    psi.amps[i.to_index()].norm_sqr() / psi.norm_sqr()
}

/// Rotated-basis probability of `s` in a dense state.
pub fn dense_prob_rotated(psi: &DenseState, s: &SignSequence, basis: BasisSpec) -> f64 {
    let rot = psi.rotate(basis);
    rot.amps[s.to_index()].norm_sqr() / rot.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_antisymmetric, seeded};

    #[test]
    fn anticommutation() {
        let l = 4;
        let mut rng = seeded(5);
        let psi = DenseState::new(
            l,
            (0..1 << l)
                .map(|_| Complex64::new(rand::Rng::gen::<f64>(&mut rng), rand::Rng::gen::<f64>(&mut rng)))
                .collect(),
        )
        .unwrap();
        for i in 0..l {
            for j in 0..l {
                let a = psi.apply(&[Op::c(i), Op::cdag(j)]);
                let b = psi.apply(&[Op::cdag(j), Op::c(i)]);
                let delta = if i == j { 1.0 } else { 0.0 };
                for k in 0..1 << l {
                    assert!((a.amps[k] + b.amps[k] - psi.amps[k] * delta).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn expansion_matches_ltl() {
        let a = random_antisymmetric(&mut seeded(6), 6, 1.0);
        let p = pfaffian_expansion(a.as_array());
        assert!((p - crate::pfaffian::pfaffian(&a)).norm() < 1e-12);
    }

    #[test]
    fn rotation_round_trip() {
        let r = random_antisymmetric(&mut seeded(7), 4, 0.5);
        let psi = dense_state(&r, &"0110".parse().unwrap()).unwrap();
        let b = BasisSpec::new(0.7, 0.3);
        let back = psi.rotate(b).rotate_inverse(b);
        assert!(psi.distance_up_to_phase(&back) < 1e-14);
        assert!((psi.rotate(b).norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ed_small_chain() {
        // L = 2 open chain: H = -½ σxσx - ½(σz1 + σz2), E0 = -√(1/4 + 1)
        let gs = tfi_exact_ground_state(2, false, 1.0).unwrap();
        assert!((gs.energy + (1.25f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let (e0, e1, v) = lanczos(8, true, 1.0);
        let (vals, vecs) = dense::symmetric_eigh(&tfi_dense(8, true, 1.0));
        assert!((e0 - vals[0]).abs() < 1e-10);
        assert!((e1 - vals[1]).abs() < 1e-8);
        let ov: f64 = v.iter().zip(vecs.column(0)).map(|(a, b)| a * b).sum();
        assert!((ov.abs() - 1.0).abs() < 1e-10);
    }
}
