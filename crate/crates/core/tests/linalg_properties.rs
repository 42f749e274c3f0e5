use hedmd_core::linalg::{
    cast_real, eigenvalues, matrix_exp, matrix_exp_real, matrix_log, pinv, spectrum_distance,
    Complex64, RealMatrix, Spectrum,
};
use proptest::prelude::*;

fn matrix(max_dim: usize) -> impl Strategy<Value = RealMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        proptest::collection::vec(-1.0f64..1.0, m * n)
            .prop_map(move |v| RealMatrix::from_vec(m, n, v))
    })
}

fn square(max_dim: usize) -> impl Strategy<Value = RealMatrix> {
    (1..=max_dim).prop_flat_map(|n| {
        proptest::collection::vec(-1.0f64..1.0, n * n)
            .prop_map(move |v| RealMatrix::from_vec(n, n, v))
    })
}

fn rel(a: &RealMatrix, b: &RealMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moore_penrose_axioms(a in matrix(50)) {
        let p = pinv(&a, None).unwrap();
        prop_assert!(rel(&(&a * &p * &a), &a) <= 1e-8);
        prop_assert!(rel(&(&p * &a * &p), &p) <= 1e-8);
        let ap = &a * &p;
        let pa = &p * &a;
        prop_assert!((&ap - ap.transpose()).norm() <= 1e-8);
        prop_assert!((&pa - pa.transpose()).norm() <= 1e-8);
    }

    #[test]
    fn exp_log_roundtrip_shifted(m in square(12), shift in 0.05f64..3.0) {
        // Gershgorin: every eigenvalue has real part > 0
        let n = m.nrows();
        let radius = (0..n).map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
        let k = &m + RealMatrix::identity(n, n) * (radius + shift);
        let l = matrix_log(&k).unwrap();
        prop_assert!(!l.negative_real_axis);
        let back = cast_real(&matrix_exp(&l.value).unwrap());
        prop_assert!(rel(&back.value, &k) <= 1e-8);
        prop_assert!(cast_real(&l.value).max_imag <= 1e-8);
    }

    #[test]
    fn exp_log_roundtrip_rotational(a in square(10), scale in 0.1f64..2.5) {
        // K = exp(A) with spectral radius of A below pi keeps K off the negative axis
        let a = &a * (scale / a.norm().max(1.0));
        let k = matrix_exp_real(&a).unwrap();
        let l = matrix_log(&k).unwrap();
        let back = cast_real(&matrix_exp(&l.value).unwrap());
        prop_assert!(rel(&back.value, &k) <= 1e-8);
        // principal log of exp(A) is A itself here
        prop_assert!(rel(&cast_real(&l.value).value, &a) <= 1e-8);
    }

    #[test]
    fn real_spectra_come_in_conjugate_pairs(a in square(20)) {
        let s = eigenvalues(&a).unwrap();
        prop_assert_eq!(s.len(), a.nrows());
        prop_assert!(s.is_conjugate_closed(1e-10));
    }

    #[test]
    fn spectrum_distance_is_a_matching_metric(
        pts in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..9),
        other in proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 9),
        rot in 0usize..9,
    ) {
        let a: Vec<Complex64> = pts.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let b: Vec<Complex64> = other[..a.len()].iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        let mut permuted = a.clone();
        permuted.rotate_left(rot % a.len());
        permuted.reverse();
        let (sa, sb, sp) = (Spectrum::new(a), Spectrum::new(b), Spectrum::new(permuted));
        prop_assert!(spectrum_distance(&sa, &sa).unwrap().abs() <= 1e-12);
        prop_assert!(spectrum_distance(&sa, &sp).unwrap().abs() <= 1e-12);
        let ab = spectrum_distance(&sa, &sb).unwrap();
        prop_assert!((ab - spectrum_distance(&sb, &sa).unwrap()).abs() <= 1e-12);
        prop_assert!((ab - spectrum_distance(&sp, &sb).unwrap()).abs() <= 1e-12);
        if sa.sorted() != sb.sorted() {
            prop_assert!(ab > 0.0);
        }
    }
}

#[test]
fn rotation_log_and_realness() {
    let th = std::f64::consts::PI / 6.0;
    let k = RealMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
    let l = cast_real(&matrix_log(&k).unwrap().value);
    assert!(l.max_imag <= 1e-12);
    assert!((&l.value - RealMatrix::from_row_slice(2, 2, &[0.0, -th, th, 0.0])).amax() <= 1e-10);

    let neg = cast_real(
        &matrix_log(&RealMatrix::from_element(1, 1, -1.0))
            .unwrap()
            .value,
    );
    assert!((neg.max_imag - std::f64::consts::PI).abs() < 1e-15);
}
