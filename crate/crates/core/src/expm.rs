//! Matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant (Higham 2005).

use ndarray::Array2;
use num_complex::Complex64;

use crate::dense::{self, CMatrix};

const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn norm1(a: &CMatrix) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Array2::zeros((0, 0));
    }
    let nrm = norm1(a);
    let s = if nrm > THETA13 {
        (nrm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.mapv(|z| z / 2f64.powi(s));
    let id = dense::identity(n);
    let a2 = dense::matmul(&a, &a);
    let a4 = dense::matmul(&a2, &a2);
    let a6 = dense::matmul(&a4, &a2);
    let b = |k: usize| Complex64::new(B13[k], 0.0);

    let inner_u = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u = dense::matmul(&a6, &inner_u) + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &id * b(1);
    let u = dense::matmul(&a, &u);
    let inner_v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = dense::matmul(&a6, &inner_v) + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &id * b(0);

    let (q_inv, _) = dense::inverse(&(&v - &u));
    let mut r = dense::matmul(&q_inv, &(&v + &u));
    for _ in 0..s {
        r = dense::matmul(&r, &r);
    }
    r
}
