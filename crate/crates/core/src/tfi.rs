//! Critical transverse-field Ising chain, H = -½ Σ σ^x_j σ^x_{j+1} - ½ Σ σ^z_j,
//! and formation-probability scans over crystalline configurations.
//!
//! The ground state is |R, 0…0⟩ with R = (I + G)(I - G)⁻¹ and G the
//! closed-form correlator of the critical chain.  G is also the correlator
//! ⟨(c†−c)(c†+c)⟩ of that state, so the σ^z, σ^x and σ^y determinant forms can
//! use it directly without any inversion.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{dual_from_h, BasisSpec, DualMatrices, CAYLEY_MAX_COND};
use crate::config::{BitString, SignSequence};
use crate::dense;
use crate::error::{Error, Result};
use crate::pfaffian::spectral::{ln_all_plus_probability, skew_circulant_eigenvalues, SpectralForm};
use crate::pfaffian::AntisymmetricMatrix;
use crate::probability::{
    ln_prob_masked, ln_prob_phi_from_g, ln_prob_x_from_g, ln_prob_y_from_g, ln_prob_z_from_g,
};
use crate::state::GaussianState;

/// Condition-number limit for I - G.
pub const G_MAX_COND: f64 = 1e12;
/// φ within this distance of 0 or π/2 (mod π) uses the σ^x / σ^y fast paths.
pub const BASIS_SNAP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[serde(alias = "pbc")]
    Periodic,
    #[serde(alias = "obc")]
    Open,
}

impl FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            "open" | "obc" => Ok(Boundary::Open),
            _ => Err(Error::InvalidModel(format!("unknown boundary {s:?}"))),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TfiModel {
    l: usize,
    boundary: Boundary,
    h: f64,
}

impl TfiModel {
    /// Critical chain (h = 1) of even length L ≥ 2.
    pub fn critical(l: usize, boundary: Boundary) -> Result<Self> {
        if l < 2 || l % 2 == 1 {
            return Err(Error::InvalidModel(format!("L must be even and ≥ 2, got {l}")));
        }
        Ok(TfiModel { l, boundary, h: 1.0 })
    }

    pub fn len(&self) -> usize {
        self.l
    }

    pub fn is_empty(&self) -> bool {
        self.l == 0
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn field(&self) -> f64 {
        self.h
    }
}

/// Closed-form G of the critical chain (sites 1-based in the formulas):
/// PBC  G_nm = (−1)^{n−m} / (L sin(π(n−m+½)/L)),
/// OBC  G_nm = (−1)^{n−m}/(2L+1) [1/sin(π(n−m+½)/(2L+1)) + 1/sin(π(n+m−½)/(2L+1))].
pub fn tfi_g(l: usize, boundary: Boundary) -> Result<Array2<f64>> {
    TfiModel::critical(l, boundary)?;
    let lf = l as f64;
    Ok(Array2::from_shape_fn((l, l), |(i, j)| {
        let (n, m) = (i as f64 + 1.0, j as f64 + 1.0);
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        match boundary {
            Boundary::Periodic => sign / (lf * (PI * (n - m + 0.5) / lf).sin()),
            Boundary::Open => {
                let d = 2.0 * lf + 1.0;
                sign / d * (1.0 / (PI * (n - m + 0.5) / d).sin() + 1.0 / (PI * (n + m - 0.5) / d).sin())
            }
        }
    }))
}

/// R = (I + G)(I - G)⁻¹, antisymmetrised.
pub fn tfi_r(model: &TfiModel) -> Result<AntisymmetricMatrix> {
    let g = tfi_g(model.l, model.boundary)?;
    let id = Array2::<f64>::eye(model.l);
    let (inv, cond) = dense::inverse_real(&(&id - &g));
    if cond > G_MAX_COND {
        return Err(Error::SingularG(cond));
    }
    let r = dense::matmul_real(&(&id + &g), &inv);
    Ok(AntisymmetricMatrix::antisymmetrize(&dense::to_complex(&r)))
}

pub fn tfi_state(model: &TfiModel) -> Result<GaussianState> {
    Ok(GaussianState::from_vacuum(tfi_r(model)?))
}

/// Eigenvalues of the skew-circulant G^pbc, Λ^G_m, natural order.
pub fn pbc_g_eigenvalues(l: usize) -> Result<Vec<Complex64>> {
    let g = tfi_g(l, Boundary::Periodic)?;
    let row: Vec<Complex64> = g.row(0).iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Ok(skew_circulant_eigenvalues(&row))
}

/// Spectrum of R^pbc: Λ^R = (1 + Λ^G)/(1 − Λ^G).
pub fn pbc_r_spectrum(l: usize) -> Result<SpectralForm> {
    let one = Complex64::new(1.0, 0.0);
    let lam = pbc_g_eigenvalues(l)?
        .into_iter()
        .map(|g| (one + g) / (one - g))
        .collect();
    Ok(SpectralForm::from_eigenvalues(lam))
}

/// Spectrum of the dual matrix R̃^φ of the periodic ground state.  All of
/// R e^{2iφ}, H, P and R̃ are skew-circulant, so the Cayley transforms act
/// mode by mode:
/// Λ̃ = (Λ^R Λ^P + Λ^R − Λ^P + 1)/(Λ^R Λ^P − Λ^R − Λ^P − 1),
/// with Λ^P_m = e^{−2πi(L−1)(m+½)/L}.
pub fn pbc_dual_spectrum(l: usize, phi: f64) -> Result<SpectralForm> {
    let twist = Complex64::from_polar(1.0, 2.0 * phi);
    let lf = l as f64;
    let one = Complex64::new(1.0, 0.0);
    let lam = pbc_r_spectrum(l)?
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(m, &lr)| {
            let r = lr * twist;
            let p = Complex64::from_polar(1.0, -2.0 * PI * (lf - 1.0) * (m as f64 + 0.5) / lf);
            (r * p + r - p + one) / (r * p - r - p - one)
        })
        .collect();
    Ok(SpectralForm::from_eigenvalues(lam))
}

/// Dual matrices of the ground state in the (φ, π/2) basis.  With
/// R = (I + G)(I − G)⁻¹ the Cayley transform of R e^{2iφ} is
/// H = (cos φ G + i sin φ I)(cos φ I + i sin φ G)⁻¹, so R itself is never formed.
pub fn tfi_dual(model: &TfiModel, phi: f64) -> Result<DualMatrices> {
    let g = dense::to_complex(&tfi_g(model.l, model.boundary)?);
    let id = dense::identity(model.l);
    let (s, c) = phi.sin_cos();
    let i_s = Complex64::new(0.0, s);
    let (b_inv, cond) = dense::inverse(&(&id * c + &g * i_s));
    if cond > CAYLEY_MAX_COND {
        return Err(Error::SingularCayley(cond));
    }
    dual_from_h(dense::matmul(&(&g * c + &id * i_s), &b_inv))
}

/// A base pattern over {0,1} (σ^z) or {+,−} (rotated bases).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CrystalPattern {
    Bits(BitString),
    Signs(SignSequence),
}

impl CrystalPattern {
    pub fn len(&self) -> usize {
        match self {
            CrystalPattern::Bits(b) => b.len(),
            CrystalPattern::Signs(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of `1`s, or of `+`s.
    pub fn up_count(&self) -> usize {
        match self {
            CrystalPattern::Bits(b) => b.count_ones(),
            CrystalPattern::Signs(s) => s.count_plus(),
        }
    }

    /// Smallest step of the sizes L at which the crystal can be observed:
    /// L even, p | L, and for occupation patterns an even number of
    /// particles (the ground state has even fermion parity).
    pub fn size_step(&self) -> usize {
        let p = self.len();
        let base = p * 2 / gcd(p, 2);
        match self {
            CrystalPattern::Bits(b) if b.count_ones() % 2 == 1 => 2 * p,
            _ => base,
        }
    }
}

impl FromStr for CrystalPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::InvalidConfiguration("empty base pattern".to_string()));
        }
        if t.chars().all(|c| c == '0' || c == '1') {
            Ok(CrystalPattern::Bits(t.parse()?))
        } else {
            Ok(CrystalPattern::Signs(t.parse()?))
        }
    }
}

impl fmt::Display for CrystalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrystalPattern::Bits(b) => b.fmt(f),
            CrystalPattern::Signs(s) => s.fmt(f),
        }
    }
}

/// A base pattern of length p with u up entries, repeated n times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrystalConfig {
    pattern: CrystalPattern,
    n: usize,
}

impl CrystalConfig {
    pub fn new(pattern: CrystalPattern, n: usize) -> Result<Self> {
        if pattern.is_empty() || n == 0 {
            return Err(Error::InvalidConfiguration("empty crystal".to_string()));
        }
        Ok(CrystalConfig { pattern, n })
    }

    /// The crystal of total length L, if p divides L.
    pub fn with_length(pattern: CrystalPattern, l: usize) -> Result<Self> {
        let p = pattern.len();
        if p == 0 || l % p != 0 {
            return Err(Error::InvalidConfiguration(format!(
                "pattern length {p} does not divide L = {l}"
            )));
        }
        Self::new(pattern, l / p)
    }

    pub fn p(&self) -> usize {
        self.pattern.len()
    }

    pub fn u(&self) -> usize {
        self.pattern.up_count()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.p() * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pattern(&self) -> &CrystalPattern {
        &self.pattern
    }

    pub fn bits(&self) -> Option<BitString> {
        match &self.pattern {
            CrystalPattern::Bits(b) => Some(BitString::repeat(b, self.n)),
            CrystalPattern::Signs(_) => None,
        }
    }

    pub fn signs(&self) -> Option<SignSequence> {
        match &self.pattern {
            CrystalPattern::Signs(s) => Some(SignSequence::repeat(s, self.n)),
            CrystalPattern::Bits(_) => None,
        }
    }
}

/// Measurement basis of a scan: occupation (σ^z) or a rotated (φ, π/2, α)
/// basis.  In JSON: `"z"`, `"x"`, `"y"` or `{"phi": …, "alpha": …}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormationBasis {
    Z,
    Rotated(BasisSpec),
}

impl FormationBasis {
    pub fn label(&self) -> String {
        match self {
            FormationBasis::Z => "z".to_string(),
            FormationBasis::Rotated(b) => format!("phi={},alpha={}", b.phi, b.alpha),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BasisRepr {
    Name(String),
    Spec(BasisSpec),
}

impl Serialize for FormationBasis {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FormationBasis::Z => BasisRepr::Name("z".to_string()),
            FormationBasis::Rotated(b) => BasisRepr::Spec(*b),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FormationBasis {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        match BasisRepr::deserialize(de)? {
            BasisRepr::Spec(b) => Ok(FormationBasis::Rotated(b)),
            BasisRepr::Name(n) => match n.to_ascii_lowercase().as_str() {
                "z" => Ok(FormationBasis::Z),
                "x" => Ok(FormationBasis::Rotated(BasisSpec::sigma_x())),
                "y" => Ok(FormationBasis::Rotated(BasisSpec::sigma_y())),
                other => Err(serde::de::Error::custom(format!(
                    "unknown basis {other:?}; expected \"z\", \"x\", \"y\" or {{\"phi\": …, \"alpha\": …}}"
                ))),
            },
        }
    }
}

/// Which evaluation route produced a scan point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanPath {
    /// Product over the modes of R̃^φ (periodic, all `+`).
    Spectral,
    DetZ,
    DetX,
    DetY,
    /// Periodic rotated basis: R̃^φ assembled from its spectrum, one determinant.
    SpectralDet,
    /// Single determinant built from G, any φ (real R).
    DetPhi,
    /// Dense dual construction.
    General,
}

impl ScanPath {
    pub fn label(&self) -> &'static str {
        match self {
            ScanPath::Spectral => "spectral",
            ScanPath::DetZ => "det-z",
            ScanPath::DetX => "det-x",
            ScanPath::DetY => "det-y",
            ScanPath::SpectralDet => "spectral-det",
            ScanPath::DetPhi => "det-phi",
            ScanPath::General => "general",
        }
    }
}

impl fmt::Display for ScanPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn mismatch(pattern: &CrystalPattern, basis: &FormationBasis) -> Error {
    Error::InvalidConfiguration(format!(
        "pattern {pattern} does not fit basis {}: use 0/1 for z and +/- for rotated bases",
        basis.label()
    ))
}

/// Cheapest valid route for a scan point.
pub fn preferred_path(boundary: Boundary, pattern: &CrystalPattern, basis: FormationBasis) -> ScanPath {
    match (basis, pattern) {
        (FormationBasis::Z, _) => ScanPath::DetZ,
        (FormationBasis::Rotated(b), p) => {
            let all_plus = matches!(p, CrystalPattern::Signs(s) if s.count_minus() == 0);
            if boundary == Boundary::Periodic && all_plus {
                ScanPath::Spectral
            } else if b.is_x_like(BASIS_SNAP_TOL) {
                ScanPath::DetX
            } else if b.is_y_like(BASIS_SNAP_TOL) {
                ScanPath::DetY
            } else {
                ScanPath::DetPhi
            }
        }
    }
}

/// −ln P of the crystal with this pattern at size L, by the cheapest valid
/// route.
pub fn formation_minus_log_p(
    l: usize,
    boundary: Boundary,
    pattern: &CrystalPattern,
    basis: FormationBasis,
) -> Result<(f64, ScanPath)> {
    let path = preferred_path(boundary, pattern, basis);
    Ok((formation_minus_log_p_via(l, boundary, pattern, basis, path)?, path))
}

/// −ln P along a chosen route; routes that do not apply (σ^x form for a
/// generic φ, spectral forms on open chains, …) are rejected.
pub fn formation_minus_log_p_via(
    l: usize,
    boundary: Boundary,
    pattern: &CrystalPattern,
    basis: FormationBasis,
    path: ScanPath,
) -> Result<f64> {
    let model = TfiModel::critical(l, boundary)?;
    let crystal = CrystalConfig::with_length(pattern.clone(), l)?;
    let unsupported = || {
        Error::InvalidModel(format!(
            "path {path} does not apply to {boundary} chains in basis {}",
            basis.label()
        ))
    };
    let ln_p = match basis {
        FormationBasis::Z => {
            let bits = crystal.bits().ok_or_else(|| mismatch(pattern, &basis))?;
            if bits.count_ones() % 2 == 1 {
                return Err(Error::InvalidConfiguration(format!(
                    "odd particle number at L = {l}: the probability vanishes in the even-parity ground state"
                )));
            }
            match path {
                ScanPath::DetZ => ln_prob_z_from_g(&tfi_g(l, boundary)?, &bits)?,
                ScanPath::General => tfi_state(&model)?.ln_prob_z(&bits)?,
                _ => return Err(unsupported()),
            }
        }
        FormationBasis::Rotated(b) => {
            let s = crystal.signs().ok_or_else(|| mismatch(pattern, &basis))?;
            let periodic = boundary == Boundary::Periodic;
            match path {
                ScanPath::Spectral if periodic && s.count_minus() == 0 => {
                    ln_all_plus_probability(&pbc_dual_spectrum(l, b.phi)?)
                }
                ScanPath::DetX if b.is_x_like(BASIS_SNAP_TOL) => ln_prob_x_from_g(&tfi_g(l, boundary)?, &s)?,
                ScanPath::DetY if b.is_y_like(BASIS_SNAP_TOL) => ln_prob_y_from_g(&tfi_g(l, boundary)?, &s)?,
                ScanPath::DetPhi => ln_prob_phi_from_g(&tfi_g(l, boundary)?, &s, b.phi)?,
                ScanPath::SpectralDet if periodic => {
                    let spec = pbc_dual_spectrum(l, b.phi)?;
                    let keep = crate::basis::domain_wall(&s).support();
                    ln_prob_masked(spec.to_matrix().as_array(), spec.log_norm(), &keep)
                }
                ScanPath::General => {
                    let d = tfi_dual(&model, b.phi)?;
                    let keep = crate::basis::domain_wall(&s).support();
                    ln_prob_masked(d.rtilde.as_array(), d.log_norm_tilde, &keep)
                }
                _ => return Err(unsupported()),
            }
        }
    };
    if !ln_p.is_finite() {
        return Err(Error::InvalidConfiguration(format!(
            "configuration has vanishing probability at L = {l}"
        )));
    }
    Ok(-ln_p)
}

/// One scan row; failures are kept as gaps.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub l: usize,
    pub result: std::result::Result<(f64, ScanPath), String>,
}

impl ScanRow {
    pub fn point(&self) -> Option<(f64, f64)> {
        self.result.as_ref().ok().map(|&(y, _)| (self.l as f64, y))
    }
}

/// Evaluates every L in parallel; rows come back in input order.
pub fn scan_formation(
    ls: &[usize],
    boundary: Boundary,
    pattern: &CrystalPattern,
    basis: FormationBasis,
) -> Vec<ScanRow> {
    ls.par_iter()
        .map(|&l| ScanRow {
            l,
            result: formation_minus_log_p(l, boundary, pattern, basis).map_err(|e| e.to_string()),
        })
        .collect()
}

/// Scan campaign file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub boundary: Boundary,
    pub basis: FormationBasis,
    pub base_pattern: String,
    #[serde(rename = "L_min")]
    pub l_min: usize,
    #[serde(rename = "L_max")]
    pub l_max: usize,
    pub stride: usize,
}

impl ScanConfig {
    pub fn pattern(&self) -> Result<CrystalPattern> {
        let pattern: CrystalPattern = self.base_pattern.parse()?;
        match (&pattern, &self.basis) {
            (CrystalPattern::Bits(_), FormationBasis::Z) | (CrystalPattern::Signs(_), FormationBasis::Rotated(_)) => {
                Ok(pattern)
            }
            _ => Err(mismatch(&pattern, &self.basis)),
        }
    }

    /// L_min, L_min + stride, …, ≤ L_max; every size must be even and a
    /// multiple of the pattern length.
    pub fn grid(&self) -> Result<Vec<usize>> {
        let p = self.pattern()?.len();
        if self.stride == 0 {
            return Err(Error::InvalidModel("stride must be positive".to_string()));
        }
        if self.l_min < 2 || self.l_min > self.l_max {
            return Err(Error::InvalidModel(format!(
                "empty size range [{}, {}]",
                self.l_min, self.l_max
            )));
        }
        let ls: Vec<usize> = (self.l_min..=self.l_max).step_by(self.stride).collect();
        if let Some(bad) = ls.iter().find(|&&l| l % 2 == 1 || l % p != 0) {
            return Err(Error::InvalidModel(format!(
                "L = {bad} is not an even multiple of the pattern length {p}"
            )));
        }
        Ok(ls)
    }

    pub fn run(&self) -> Result<Vec<ScanRow>> {
        let ls = self.grid()?;
        Ok(scan_formation(&ls, self.boundary, &self.pattern()?, self.basis))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multiples of `step` in [lo, hi] on the coarsest stride (itself a multiple
/// of `step`) that still leaves at least `min_points` of them.
pub fn fit_grid(step: usize, lo: usize, hi: usize, min_points: usize) -> Vec<usize> {
    let base = step;
    let on_stride = |s: usize| -> Vec<usize> { (lo..=hi).filter(|l| l % s == 0).collect() };
    let mut stride = base;
    while on_stride(stride + base).len() >= min_points {
        stride += base;
    }
    on_stride(stride)
}

/// Grid used for the universal-constant fits: [400, 1000], ≥ 30 points.
pub fn default_fit_grid(pattern: &CrystalPattern) -> Vec<usize> {
    fit_grid(pattern.size_step(), 400, 1000, 30)
}

/// Sizes in `ls` with L ≡ r (mod 6).
pub fn residue_grid(ls: &[usize], r: usize) -> Vec<usize> {
    ls.iter().copied().filter(|l| l % 6 == r).collect()
}

/// CSV with columns L, minus_log_P, path_used; failed sizes keep an empty
/// value and `failed: …` as path.
pub fn write_scan_csv<W: std::io::Write>(rows: &[ScanRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["L", "minus_log_P", "path_used"])?;
    for row in rows {
        match &row.result {
            Ok((y, path)) => out.write_record([row.l.to_string(), y.to_string(), path.to_string()])?,
            Err(e) => out.write_record([row.l.to_string(), String::new(), format!("failed: {e}")])?,
        }
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads (L, −ln P) points back from a scan CSV, skipping gaps.
pub fn read_scan_csv<R: std::io::Read>(r: R) -> Result<Vec<(f64, f64)>> {
    let mut rd = csv::Reader::from_reader(r);
    let mut points = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<Option<f64>> {
            let field = rec.get(i).unwrap_or("").trim();
            if field.is_empty() {
                return Ok(None);
            }
            field
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::InvalidConfiguration(format!("bad number {field:?} in scan CSV")))
        };
        if let (Some(l), Some(y)) = (parse(0)?, parse(1)?) {
            points.push((l, y));
        }
    }
    Ok(points)
}
