use fermigauss::oracle::{dense_prob_rotated, dense_prob_z, dense_state, tfi_exact_ground_state, DenseState};
use fermigauss::probability::{ln_prob_phi_from_g, ln_prob_x_from_g, ln_prob_y_from_g, ln_prob_z_from_g};
use fermigauss::sampling::{random_bits, random_signs, seeded, well_conditioned};
use fermigauss::tfi::{tfi_g, tfi_state};
use fermigauss::{BasisSpec, BitString, Boundary, GaussianState, RotatedView, SignSequence, TfiModel};

fn rotated_vector(state: &GaussianState, basis: BasisSpec) -> DenseState {
    let l = state.len();
    let view = RotatedView::new(state, basis).unwrap();
    let amps = (0..1 << l)
        .map(|k| view.amplitude(&SignSequence::from_index(k, l)).unwrap())
        .collect();
    DenseState::new(l, amps).unwrap()
}

#[test]
fn rotated_amplitudes_match_dense_rotation() {
    let mut rng = seeded(201);
    for l in [3, 4, 6] {
        let r = well_conditioned(&mut rng, l, true);
        let c = random_bits(&mut rng, l);
        let st = GaussianState::new(r, c).unwrap();
        let dense = dense_state(st.r(), st.base()).unwrap();
        for basis in [BasisSpec::sigma_x(), BasisSpec::sigma_y(), BasisSpec::new(0.7, 0.3)] {
            let ours = rotated_vector(&st, basis);
            let theirs = dense.rotate(basis);
            for k in 0..1 << l {
                assert!((ours.amplitude(k).norm() - theirs.amplitude(k).norm()).abs() < 1e-12);
            }
            assert!(ours.distance_up_to_phase(&theirs) < 1e-12, "L = {l}, {basis:?}");
        }
    }
}

#[test]
fn occupation_amplitudes_match_series() {
    let mut rng = seeded(202);
    for l in [2, 5, 8] {
        let st = GaussianState::new(well_conditioned(&mut rng, l, true), random_bits(&mut rng, l)).unwrap();
        let dense = dense_state(st.r(), st.base()).unwrap().normalized();
        for k in 0..1 << l {
            let a = st.amplitude_z(&BitString::from_index(k, l)).unwrap();
            assert!((a - dense.amplitude(k)).norm() < 1e-12);
        }
    }
}

#[test]
fn tfi_probabilities_match_exact_diagonalisation() {
    let mut rng = seeded(203);
    for boundary in [Boundary::Periodic, Boundary::Open] {
        let l = 6;
        let ed = tfi_exact_ground_state(l, boundary == Boundary::Periodic, 1.0).unwrap();
        let st = tfi_state(&TfiModel::critical(l, boundary).unwrap()).unwrap();
        let g = tfi_g(l, boundary).unwrap();
        for _ in 0..8 {
            let b = random_bits(&mut rng, l);
            let p = dense_prob_z(&ed.state, &b);
            assert!((st.ln_prob_z(&b).unwrap().exp() - p).abs() < 1e-10);
            assert!((ln_prob_z_from_g(&g, &b).unwrap().exp() - p).abs() < 1e-10);

            let s = random_signs(&mut rng, l);
            let px = dense_prob_rotated(&ed.state, &s, BasisSpec::sigma_x());
            let py = dense_prob_rotated(&ed.state, &s, BasisSpec::sigma_y());
            let pphi = dense_prob_rotated(&ed.state, &s, BasisSpec::new(0.4, 0.0));
            assert!((ln_prob_x_from_g(&g, &s).unwrap().exp() - px).abs() < 1e-10);
            assert!((ln_prob_y_from_g(&g, &s).unwrap().exp() - py).abs() < 1e-10);
            assert!((ln_prob_phi_from_g(&g, &s, 0.4).unwrap().exp() - pphi).abs() < 1e-10);
            let view = RotatedView::new(&st, BasisSpec::new(0.4, 0.0)).unwrap();
            assert!((view.probability(&s).unwrap() - pphi).abs() < 1e-10);
        }
    }
}
