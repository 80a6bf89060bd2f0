//! Gaussian pure states |R, C⟩ = N_R⁻¹ exp(½ Σ r_ij a_i a_j)|C⟩ with
//! a_j = c_j on occupied and c_j† on empty sites of the base C.

use ndarray::{s, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{check_len, BitString};
use crate::dense::{self, CMatrix};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::pfaffian::{log_pfaffinho, pfaffinho, AntisymmetricMatrix};

/// T22 blocks with a larger condition number are rejected by [`from_generic`].
pub const BLOCK_MAX_COND: f64 = 1e12;

/// Relative threshold (to the median two-flip pfaffinho) below which a
/// rebase target counts as a zero-amplitude configuration.
pub const REBASE_ZERO_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    r: AntisymmetricMatrix,
    base: BitString,
    log_norm: f64,
}

/// ln N_R = ¼ ln det(I + R†R).
pub fn log_norm_of(r: &AntisymmetricMatrix) -> f64 {
    let m = dense::identity(r.dim()) + dense::gram(r.as_array());
    0.25 * dense::log_det(&m).ln_abs
}

impl GaussianState {
    pub fn new(r: AntisymmetricMatrix, base: BitString) -> Result<Self> {
        check_len(r.dim(), base.len())?;
        let log_norm = log_norm_of(&r);
        Ok(GaussianState { r, base, log_norm })
    }

    /// |R, 0…0⟩.
    pub fn from_vacuum(r: AntisymmetricMatrix) -> Self {
        let base = BitString::zeros(r.dim());
        let log_norm = log_norm_of(&r);
        GaussianState { r, base, log_norm }
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn r(&self) -> &AntisymmetricMatrix {
        &self.r
    }

    pub fn base(&self) -> &BitString {
        &self.base
    }

    /// N_R = det(I + R†R)^{1/4}.
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    pub fn amplitude_z(&self, i: &BitString) -> Result<Complex64> {
        amplitude_z(self, i)
    }

    /// ln|⟨I|R, C⟩|², finite-precision safe for large L.
    pub fn ln_prob_z(&self, i: &BitString) -> Result<f64> {
        let keep = self.base.difference(i)?;
        let pf = log_pfaffinho(&self.r, &keep);
        Ok(2.0 * pf.ln_abs - 2.0 * self.log_norm)
    }

    pub fn rebase(&self, c_prime: &BitString) -> Result<GaussianState> {
        rebase(self, c_prime)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&StateJson::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(text)?;
        raw.try_into()
    }
}

/// On-disk form: `{"L": 2, "base": "00", "R": [[[re, im], …], …]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    #[serde(rename = "L")]
    l: usize,
    base: String,
    #[serde(rename = "R")]
    r: Vec<Vec<[f64; 2]>>,
}

impl From<&GaussianState> for StateJson {
    fn from(s: &GaussianState) -> Self {
        let a = s.r.as_array();
        StateJson {
            l: s.len(),
            base: s.base.to_string(),
            r: a.rows()
                .into_iter()
                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<StateJson> for GaussianState {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        let base: BitString = raw.base.parse()?;
        check_len(raw.l, base.len())?;
        check_len(raw.l, raw.r.len())?;
        let mut a = Array2::zeros((raw.l, raw.l));
        for (i, row) in raw.r.iter().enumerate() {
            check_len(raw.l, row.len())?;
            for (j, z) in row.iter().enumerate() {
                a[[i, j]] = Complex64::new(z[0], z[1]);
            }
        }
        GaussianState::new(AntisymmetricMatrix::new(a)?, base)
    }
}

/// sgn(C, I) = Π_{i≥2} (-1)^{|n_i - m_i| · Σ_{j<i} n_j}.
pub fn sign_cfg(c: &BitString, i: &BitString) -> Result<i32> {
    check_len(c.len(), i.len())?;
    let mut sign = 1;
    let mut occupied_before = 0usize;
    for k in 0..c.len() {
        if c.get(k) != i.get(k) && occupied_before % 2 == 1 {
            sign = -sign;
        }
        occupied_before += c.get(k) as usize;
    }
    Ok(sign)
}

/// ⟨I|R, C⟩ = sgn(C, I) pf R_{C⊕I} / N_R.
pub fn amplitude_z(state: &GaussianState, i: &BitString) -> Result<Complex64> {
    let keep = state.base.difference(i)?;
    let sign = sign_cfg(&state.base, i)? as f64;
    Ok(pfaffinho(&state.r, &keep) * sign / state.norm())
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Re-expresses |R, C⟩ on a new base C′ with non-vanishing amplitude:
/// r′_ij = sgn(C,C′) sgn(C,I′) sgn(C′,I′) pf R_{C⊕I′} / pf R_{C⊕C′}, where
/// I′ is C′ with sites i and j flipped.  The result equals the input up to
/// the global phase of its C′ amplitude.
pub fn rebase(state: &GaussianState, c_prime: &BitString) -> Result<GaussianState> {
    let c = &state.base;
    let l = state.len();
    check_len(l, c_prime.len())?;

    let pf_cc = pfaffinho(&state.r, &c.difference(c_prime)?);
    let mut entries = Array2::<Complex64>::zeros((l, l));
    let mut mags = Vec::with_capacity(l * l.saturating_sub(1) / 2);
    for i in 0..l {
        for j in i + 1..l {
            let ip = c_prime.flipped(i).flipped(j);
            let pf = pfaffinho(&state.r, &c.difference(&ip)?);
            let sign = sign_cfg(c, c_prime)? * sign_cfg(c, &ip)? * sign_cfg(c_prime, &ip)?;
            entries[[i, j]] = pf * sign as f64;
            mags.push(pf.norm());
        }
    }
    let scale = match median(mags.into_iter().filter(|m| *m > 0.0).collect()) {
        m if m > 0.0 => m,
        _ => 1.0,
    };
    if pf_cc.norm() <= REBASE_ZERO_TOL * scale {
        return Err(Error::ZeroAmplitudeBase(pf_cc.norm()));
    }
    let r = AntisymmetricMatrix::from_upper(l, |i, j| entries[[i, j]] / pf_cc);
    GaussianState::new(r, c_prime.clone())
}

/// exp(½ (c†, c) M (c; c†)) |C⟩ with J·M antisymmetric, J = [[0, I], [I, 0]].
#[derive(Clone, Debug, PartialEq)]
pub struct GenericGaussianExponent {
    m: CMatrix,
    base: BitString,
}

impl GenericGaussianExponent {
    pub fn new(m: CMatrix, base: BitString) -> Result<Self> {
        let l = base.len();
        check_len(2 * l, m.nrows())?;
        check_len(2 * l, m.ncols())?;
        let jm = Array2::from_shape_fn((2 * l, 2 * l), |(a, b)| m[[(a + l) % (2 * l), b]]);
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = crate::pfaffian::max_asymmetry(&jm);
        if dev > crate::pfaffian::ANTISYMMETRY_TOL * scale {
            return Err(Error::NotAntisymmetric(dev));
        }
        Ok(GenericGaussianExponent { m, base })
    }

    pub fn m(&self) -> &CMatrix {
        &self.m
    }

    pub fn base(&self) -> &BitString {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// Standard form via Balian-Brezin: swap c_j ⇄ c_j† on occupied sites
/// (M̄ = Π M Π), T̄ = exp(M̄), R = T̄₁₂ T̄₂₂⁻¹.  Equal to the input state up
/// to normalisation and phase.
pub fn from_generic(g: &GenericGaussianExponent) -> Result<GaussianState> {
    let l = g.len();
    let perm: Vec<usize> = (0..2 * l)
        .map(|a| {
            let site = a % l;
            if g.base.get(site) == 1 {
                (a + l) % (2 * l)
            } else {
                a
            }
        })
        .collect();
    let m_bar = Array2::from_shape_fn((2 * l, 2 * l), |(a, b)| g.m[[perm[a], perm[b]]]);
    let t = expm(&m_bar);
    let t12 = t.slice(s![0..l, l..2 * l]).to_owned();
    let t22 = t.slice(s![l..2 * l, l..2 * l]).to_owned();
    let (t22_inv, cond) = dense::inverse(&t22);
    if cond > BLOCK_MAX_COND {
        return Err(Error::SingularBlock(cond));
    }
    let r = AntisymmetricMatrix::antisymmetrize(&dense::matmul(&t12, &t22_inv));
    GaussianState::new(r, g.base.clone())
}
