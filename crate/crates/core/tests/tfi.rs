use std::f64::consts::LN_2;

use fermigauss::tfi::{
    formation_minus_log_p, formation_minus_log_p_via, pbc_r_spectrum, read_scan_csv, tfi_g, tfi_state,
    write_scan_csv, ScanPath,
};
use fermigauss::{BasisSpec, Boundary, CrystalPattern, FormationBasis, ScanConfig, TfiModel};

fn pattern(s: &str) -> CrystalPattern {
    s.parse().unwrap()
}

#[test]
fn periodic_correlator_is_orthogonal_and_skew_circulant() {
    let g = tfi_g(12, Boundary::Periodic).unwrap();
    let gtg = g.t().dot(&g);
    for i in 0..12 {
        for j in 0..12 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((gtg[[i, j]] - want).abs() < 1e-12);
            // antiperiodic fermions in the even-parity sector: wrapping flips the sign
            let wraps = (i == 11) != (j == 11);
            let shifted = g[[(i + 1) % 12, (j + 1) % 12]] * if wraps { -1.0 } else { 1.0 };
            assert!((g[[i, j]] - shifted).abs() < 1e-12);
        }
    }
}

#[test]
fn periodic_state_is_skew_circulant() {
    let st = tfi_state(&TfiModel::critical(10, Boundary::Periodic).unwrap()).unwrap();
    let spec = pbc_r_spectrum(10).unwrap();
    let dense = spec.to_matrix();
    for i in 0..10 {
        for j in 0..10 {
            assert!((st.r().get(i, j) - dense.get(i, j)).norm() < 1e-10);
        }
    }
}

#[test]
fn routes_agree_at_moderate_size() {
    let l = 36;
    for bc in [Boundary::Periodic, Boundary::Open] {
        let phi = FormationBasis::Rotated(BasisSpec::new(0.5, 0.0));
        let x = FormationBasis::Rotated(BasisSpec::sigma_x());
        for (pat, basis, paths) in [
            ("+-", phi, vec![ScanPath::DetPhi, ScanPath::General]),
            ("++-", x, vec![ScanPath::DetX, ScanPath::DetPhi, ScanPath::General]),
            ("001", FormationBasis::Z, vec![ScanPath::DetZ, ScanPath::General]),
        ] {
            let vals: Vec<f64> = paths
                .iter()
                .map(|&p| formation_minus_log_p_via(l, bc, &pattern(pat), basis, p).unwrap())
                .collect();
            for v in &vals {
                assert!((v - vals[0]).abs() < 1e-8 * vals[0].abs().max(1.0), "{bc} {pat}: {vals:?}");
            }
        }
    }
}

#[test]
fn periodic_translation_invariance() {
    let l = 24;
    let basis = FormationBasis::Rotated(BasisSpec::new(0.3, 0.0));
    let a = formation_minus_log_p(l, Boundary::Periodic, &pattern("++-"), basis).unwrap().0;
    let b = formation_minus_log_p(l, Boundary::Periodic, &pattern("+-+"), basis).unwrap().0;
    let c = formation_minus_log_p(l, Boundary::Periodic, &pattern("-++"), basis).unwrap().0;
    assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
}

#[test]
fn all_plus_probability_is_order_one_per_site() {
    // −ln P grows linearly with a positive slope below ln 2 per site
    let basis = FormationBasis::Rotated(BasisSpec::sigma_x());
    let p = |l| formation_minus_log_p(l, Boundary::Periodic, &pattern("+"), basis).unwrap();
    let ((a, path), (b, _)) = (p(100), p(200));
    assert_eq!(path, ScanPath::Spectral);
    let slope = (b - a) / 100.0;
    assert!(slope > 0.0 && slope < LN_2);
}

#[test]
fn scan_csv_roundtrip() {
    let cfg: ScanConfig = serde_json::from_str(
        r#"{"boundary": "obc", "basis": {"phi": 0.2}, "base_pattern": "+-", "L_min": 10, "L_max": 30, "stride": 4}"#,
    )
    .unwrap();
    let rows = cfg.run().unwrap();
    let mut buf = Vec::new();
    write_scan_csv(&rows, &mut buf).unwrap();
    let back = read_scan_csv(buf.as_slice()).unwrap();
    let points: Vec<_> = rows.iter().filter_map(|r| r.point()).collect();
    assert_eq!(back, points);
    assert_eq!(back.len(), 6);
}

#[test]
fn odd_sizes_and_mismatched_patterns_are_rejected() {
    assert!(TfiModel::critical(7, Boundary::Open).is_err());
    let bad: ScanConfig = serde_json::from_str(
        r#"{"boundary": "pbc", "basis": "y", "base_pattern": "0101", "L_min": 8, "L_max": 16, "stride": 4}"#,
    )
    .unwrap();
    assert!(bad.run().is_err());
    let unknown = serde_json::from_str::<ScanConfig>(
        r#"{"boundary": "pbc", "basis": "y", "base_pattern": "+", "L_min": 8, "L_max": 16, "stride": 4, "x": 1}"#,
    );
    assert!(unknown.is_err());
}
