//! Random test ensembles (seeded, reproducible).
//!
//! Antisymmetric matrices have i.i.d. complex Gaussian entries scaled by
//! `scale`; the "well-conditioned" ensemble uses scale 1/√L and rejects
//! draws with cond(I - R*R) ≥ 1e6.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::{BitString, Sign, SignSequence};
use crate::dense;
use crate::pfaffian::AntisymmetricMatrix;

pub const WELL_CONDITIONED_MAX_COND: f64 = 1e6;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_antisymmetric<R: Rng>(rng: &mut R, l: usize, scale: f64) -> AntisymmetricMatrix {
    AntisymmetricMatrix::from_upper(l, |_, _| {
        Complex64::new(normal(rng), normal(rng)) * scale
    })
}

pub fn random_real_antisymmetric<R: Rng>(rng: &mut R, l: usize, scale: f64) -> AntisymmetricMatrix {
    AntisymmetricMatrix::from_upper(l, |_, _| Complex64::new(normal(rng) * scale, 0.0))
}

/// First row of a random antisymmetric skew-circulant matrix (c_0 = 0,
/// c_{L-k} = c_k).
pub fn random_skew_circulant_row<R: Rng>(rng: &mut R, l: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); l];
    for k in 1..=l / 2 {
        let z = Complex64::new(normal(rng), normal(rng));
        c[k] = z;
        c[l - k] = z;
    }
    c
}

/// Entries ~ N(0,1)/√L (complex or real), redrawn until cond(I - R*R) < 1e6.
pub fn well_conditioned<R: Rng>(rng: &mut R, l: usize, complex: bool) -> AntisymmetricMatrix {
    let scale = 1.0 / (l.max(1) as f64).sqrt();
    loop {
        let r = if complex {
            random_antisymmetric(rng, l, scale)
        } else {
            random_real_antisymmetric(rng, l, scale)
        };
        let rc = r.as_array().mapv(|z| z.conj());
        let m = dense::identity(l) - dense::matmul(&rc, r.as_array());
        let (_, cond) = dense::inverse(&m);
        if cond < WELL_CONDITIONED_MAX_COND {
            return r;
        }
    }
}

pub fn random_bits<R: Rng>(rng: &mut R, l: usize) -> BitString {
    BitString::new((0..l).map(|_| rng.gen_range(0..2u8)).collect()).expect("binary")
}

pub fn random_signs<R: Rng>(rng: &mut R, l: usize) -> SignSequence {
    SignSequence::new(
        (0..l)
            .map(|_| if rng.gen_bool(0.5) { Sign::Minus } else { Sign::Plus })
            .collect(),
    )
}

/// Random M = [[A, B], [D, −Aᵀ]] with B, D antisymmetric, entries ~ N(0,1)·scale,
/// i.e. a valid exponent for [`crate::state::GenericGaussianExponent`].
pub fn random_generic_exponent<R: Rng>(rng: &mut R, l: usize, scale: f64) -> dense::CMatrix {
    let a: Vec<Complex64> = (0..l * l)
        .map(|_| Complex64::new(normal(rng), normal(rng)) * scale)
        .collect();
    let b = random_antisymmetric(rng, l, scale);
    let d = random_antisymmetric(rng, l, scale);
    ndarray::Array2::from_shape_fn((2 * l, 2 * l), |(i, j)| match (i < l, j < l) {
        (true, true) => a[i * l + j],
        (true, false) => b.get(i, j - l),
        (false, true) => d.get(i - l, j),
        (false, false) => -a[(j - l) * l + (i - l)],
    })
}
