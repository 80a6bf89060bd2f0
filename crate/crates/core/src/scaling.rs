//! Finite-size scaling of formation probabilities.
//!
//! Periodic chains: −ln P = Γ L − 2s + c₁/L (the 1/L correction is fitted
//! explicitly).  Open chains: −ln P = Γ L + a ln L + c₀.

use std::f64::consts::LN_2;
use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dense;
use crate::error::{Error, Result};
use crate::tfi::Boundary;

pub const MIN_POINTS: usize = 10;
/// Raw design matrices with a larger 2-norm condition number are rejected.
pub const MAX_DESIGN_COND: f64 = 1e10;
/// Class windows: |s − candidate| < 0.01 ln 2 (periodic), |a − candidate| < 0.02 (open).
pub const PBC_CLASS_TOL: f64 = 0.01 * LN_2;
pub const OBC_CLASS_TOL: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingModel {
    Pbc,
    Obc,
}

impl From<Boundary> for ScalingModel {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Periodic => ScalingModel::Pbc,
            Boundary::Open => ScalingModel::Obc,
        }
    }
}

impl std::str::FromStr for ScalingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pbc" | "periodic" => Ok(ScalingModel::Pbc),
            "obc" | "open" => Ok(ScalingModel::Obc),
            _ => Err(Error::InvalidModel(format!("unknown fit model {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub model: ScalingModel,
    pub gamma: f64,
    /// c₀: −2s for periodic chains, the O(1) term for open ones.
    pub constant_term: f64,
    /// s (periodic) or a (open).
    pub s_or_a: f64,
    /// c₁ of the periodic model.
    pub inverse_l: Option<f64>,
    /// Standard errors in the order of the regressors:
    /// [Γ, c₀, c₁] (periodic) or [Γ, a, c₀] (open).
    pub stderr: Vec<f64>,
    pub s_or_a_stderr: f64,
    pub residual_rms: f64,
    pub n_points: usize,
    pub window: (f64, f64),
    pub design_cond: f64,
}

fn design(model: ScalingModel, l: f64) -> [f64; 3] {
    match model {
        ScalingModel::Pbc => [l, 1.0, 1.0 / l],
        ScalingModel::Obc => [l, l.ln(), 1.0],
    }
}

/// Ordinary least squares on the model's three regressors.  The raw design
/// condition number is checked, then columns are equilibrated before the QR
/// solve.
pub fn fit(points: &[(f64, f64)], model: ScalingModel) -> Result<ScalingFit> {
    let n = points.len();
    if n < MIN_POINTS {
        return Err(Error::InsufficientData {
            needed: MIN_POINTS,
            found: n,
        });
    }
    let mut ls: Vec<f64> = points.iter().map(|p| p.0).collect();
    ls.sort_by(|a, b| a.total_cmp(b));
    if ls.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidConfiguration("fit points must have distinct L".to_string()));
    }
    if ls[0] <= 0.0 || points.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::InvalidConfiguration("fit points need L > 0 and finite values".to_string()));
    }

    let x = Array2::from_shape_fn((n, 3), |(i, j)| design(model, points[i].0)[j]);
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let sv = dense::singular_values_real(&x);
    let cond = sv[0] / sv[2];
    if !(cond <= MAX_DESIGN_COND) {
        return Err(Error::IllConditionedFit(cond));
    }

    let scale: Vec<f64> = (0..3)
        .map(|j| x.column(j).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let xs = Array2::from_shape_fn((n, 3), |(i, j)| x[[i, j]] / scale[j]);
    let beta_s = dense::lstsq_real(&xs, &y);
    let beta: Vec<f64> = (0..3).map(|j| beta_s[j] / scale[j]).collect();

    let resid: Vec<f64> = (0..n)
        .map(|i| y[i] - (0..3).map(|j| x[[i, j]] * beta[j]).sum::<f64>())
        .collect();
    let rss: f64 = resid.iter().map(|r| r * r).sum();
    let sigma2 = rss / (n - 3) as f64;
    let (cov_s, _) = dense::inverse_real(&dense::matmul_real(&xs.t().to_owned(), &xs));
    let stderr: Vec<f64> = (0..3)
        .map(|j| (sigma2 * cov_s[[j, j]]).max(0.0).sqrt() / scale[j])
        .collect();

    let (s_or_a, s_or_a_stderr, constant_term, inverse_l) = match model {
        ScalingModel::Pbc => (-beta[1] / 2.0, stderr[1] / 2.0, beta[1], Some(beta[2])),
        ScalingModel::Obc => (beta[1], stderr[1], beta[2], None),
    };
    Ok(ScalingFit {
        model,
        gamma: beta[0],
        constant_term,
        s_or_a,
        inverse_l,
        stderr,
        s_or_a_stderr,
        residual_rms: (rss / n as f64).sqrt(),
        n_points: n,
        window: (ls[0], ls[n - 1]),
        design_cond: cond,
    })
}

pub fn fit_pbc(points: &[(f64, f64)]) -> Result<ScalingFit> {
    fit(points, ScalingModel::Pbc)
}

pub fn fit_obc(points: &[(f64, f64)]) -> Result<ScalingFit> {
    fit(points, ScalingModel::Obc)
}

/// Conformal boundary condition read off from s or a.  Fixed and mixed
/// share a = 3/8 on open chains and cannot be told apart there.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryClass {
    #[serde(rename = "fixed")]
    Fixed,
    #[serde(rename = "free")]
    Free,
    #[serde(rename = "mixed")]
    Mixed,
    #[serde(rename = "3/8-class")]
    FixedOrMixed,
    #[serde(rename = "unresolved")]
    Unresolved,
}

impl BoundaryClass {
    pub fn label(&self) -> &'static str {
        match self {
            BoundaryClass::Fixed => "fixed",
            BoundaryClass::Free => "free",
            BoundaryClass::Mixed => "mixed",
            BoundaryClass::FixedOrMixed => "3/8-class",
            BoundaryClass::Unresolved => "unresolved",
        }
    }

    /// Candidate values of s (periodic) or a (open).
    pub fn candidates(model: ScalingModel) -> Vec<(f64, BoundaryClass)> {
        match model {
            ScalingModel::Pbc => vec![
                (-LN_2 / 2.0, BoundaryClass::Fixed),
                (0.0, BoundaryClass::Free),
                (LN_2 / 2.0, BoundaryClass::Mixed),
            ],
            ScalingModel::Obc => vec![(-0.125, BoundaryClass::Free), (0.375, BoundaryClass::FixedOrMixed)],
        }
    }
}

impl fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Nearest candidate inside the tolerance window; none or several → unresolved.
pub fn classify_value(value: f64, model: ScalingModel) -> BoundaryClass {
    let tol = match model {
        ScalingModel::Pbc => PBC_CLASS_TOL,
        ScalingModel::Obc => OBC_CLASS_TOL,
    };
    let hits: Vec<BoundaryClass> = BoundaryClass::candidates(model)
        .into_iter()
        .filter(|(c, _)| (value - c).abs() < tol)
        .map(|(_, k)| k)
        .collect();
    match hits.as_slice() {
        [one] => *one,
        _ => BoundaryClass::Unresolved,
    }
}

pub fn classify(fit: &ScalingFit) -> BoundaryClass {
    classify_value(fit.s_or_a, fit.model)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitStderr {
    pub gamma: f64,
    pub s_or_a: f64,
}

/// Report written by the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub model: ScalingModel,
    pub gamma: f64,
    pub s_or_a: f64,
    pub stderr: FitStderr,
    pub class: BoundaryClass,
    pub n_points: usize,
    pub window: [f64; 2],
    pub residual_rms: f64,
}

impl From<&ScalingFit> for FitReport {
    fn from(f: &ScalingFit) -> Self {
        FitReport {
            model: f.model,
            gamma: f.gamma,
            s_or_a: f.s_or_a,
            stderr: FitStderr {
                gamma: f.stderr[0],
                s_or_a: f.s_or_a_stderr,
            },
            class: classify(f),
            n_points: f.n_points,
            window: [f.window.0, f.window.1],
            residual_rms: f.residual_rms,
        }
    }
}
