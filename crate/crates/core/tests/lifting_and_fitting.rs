use hedmd_core::dynamics::{
    sample_ensemble, ComponentSeries, EnsembleConfig, FnField, LinearField, SamplingSchedule,
};
use hedmd_core::edmd::{build_edmd_matrices, fit_koopman, predict, Rollout, StatePairEnsemble};
use hedmd_core::hankel::{build_hankel_matrices, estimate_component_at, fit_component_operator};
use hedmd_core::linalg::{matrix_exp_real, RealMatrix};
use hedmd_core::observables::{monomial_dictionary, Dictionary};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn monomials_multiply(x in proptest::collection::vec(-2.0f64..2.0, 3)) {
        let d = monomial_dictionary(3, 4, true).unwrap();
        let v = d.evaluate(&x);
        let ex = d.exponents();
        for (i, a) in ex.iter().enumerate() {
            for (j, b) in ex.iter().enumerate() {
                let sum: Vec<u32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                if let Some(k) = d.index_of(&sum) {
                    prop_assert!((v[k] - v[i] * v[j]).abs() <= 1e-12 * v[k].abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn readout_inverts_lifting(x in proptest::collection::vec(-5.0f64..5.0, 4), deg in 1u32..4, constant: bool) {
        let d = monomial_dictionary(4, deg, constant).unwrap();
        let c = d.coordinate_readout().unwrap();
        let back = c * nalgebra::DVector::from_vec(d.evaluate(&x));
        prop_assert_eq!(back.as_slice(), &x[..]);
    }

    #[test]
    fn fit_ignores_pair_order(seed in 0u64..1000) {
        let d = monomial_dictionary(2, 2, true).unwrap();
        let x = RealMatrix::from_fn(2, 25, |i, k| ((i as f64 + 1.0) * 3.7 + k as f64 * (1.3 + i as f64 * 0.77 + seed as f64 * 1e-3)).sin());
        let y = RealMatrix::from_row_slice(2, 2, &[0.9, 0.1, -0.1, 0.9]) * &x;
        let perm: Vec<usize> = (0..25).map(|k| (k * 7 + seed as usize) % 25).collect();
        let xp = RealMatrix::from_fn(2, 25, |i, k| x[(i, perm[k])]);
        let yp = RealMatrix::from_fn(2, 25, |i, k| y[(i, perm[k])]);
        let fit = |x: RealMatrix, y: RealMatrix| {
            let ens = StatePairEnsemble::measured(x, y, 0.1).unwrap();
            let (px, py) = build_edmd_matrices(&ens, &d).unwrap();
            fit_koopman(&d, &px, &py, 0.1).unwrap()
        };
        let (a, b) = (fit(x, y), fit(xp, yp));
        prop_assert!((&a.koopman - &b.koopman).amax() <= 1e-9);
    }
}

fn linear_pairs(a: &RealMatrix, ts: f64, k: usize) -> StatePairEnsemble {
    let prop = matrix_exp_real(&(a * ts)).unwrap();
    let n = a.nrows();
    let x = RealMatrix::from_fn(n, k, |i, j| {
        ((i as f64 + 2.0) * 1.618 + j as f64 * 2.9).sin()
    });
    let y = &prop * &x;
    StatePairEnsemble::measured(x, y, ts).unwrap()
}

#[test]
fn linear_generators_are_recovered() {
    for a in [
        RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]),
        RealMatrix::from_row_slice(2, 2, &[-0.5, 0.0, 0.0, -1.0]),
    ] {
        let ens = linear_pairs(&a, 0.1, 50);
        let d = Dictionary::coordinates(2).unwrap();
        let (px, py) = build_edmd_matrices(&ens, &d).unwrap();
        let model = fit_koopman(&d, &px, &py, 0.1).unwrap();
        assert!((&model.generator - &a).norm() <= 1e-6);
    }
}

#[test]
fn constant_observable_decouples_for_linear_systems() {
    let a = RealMatrix::from_row_slice(2, 2, &[-0.2, 1.0, -1.0, -0.3]);
    let ens = linear_pairs(&a, 0.1, 40);
    let plain = Dictionary::coordinates(2).unwrap();
    let affine = monomial_dictionary(2, 1, true).unwrap();
    let model = |d: &Dictionary| {
        let (px, py) = build_edmd_matrices(&ens, d).unwrap();
        fit_koopman(d, &px, &py, 0.1).unwrap()
    };
    let (m1, m2) = (model(&plain), model(&affine));
    assert!((m2.koopman[(0, 0)] - 1.0).abs() < 1e-12);
    let x0 = [0.4, -0.9];
    let p1 = predict(&m1, &x0, 30, Rollout::Lifted).unwrap();
    let p2 = predict(&m2, &x0, 30, Rollout::Lifted).unwrap();
    for (s1, s2) in p1.states.iter().zip(&p2.states) {
        assert!((s1[0] - s2[0]).abs() < 1e-10 && (s1[1] - s2[1]).abs() < 1e-10);
    }
}

#[test]
fn scalar_linear_system_estimates_follow_the_flow() {
    let rate = -0.7;
    let field = FnField::new(1, move |x: &[f64], dx: &mut [f64]| dx[0] = rate * x[0]);
    let sched = SamplingSchedule::new(0, 0.2, 0.3, 1).unwrap();
    let cfg = EnsembleConfig::new(vec![sched], 20, vec![(-1.0, 1.0)], 11, 0.1);
    let recs = sample_ensemble(&field, &cfg).unwrap();
    let refs: Vec<&ComponentSeries> = recs.iter().map(|r| r.component(0).unwrap()).collect();
    let h = build_hankel_matrices(&refs, &sched).unwrap();
    let op = fit_component_operator(&h).unwrap();
    for t in [0.0, 0.1, 0.25, 0.55, 0.9, 1.4] {
        let est = estimate_component_at(&op, &h, t).unwrap();
        for (v, r) in est.values.iter().zip(&recs) {
            let want = r.initial[0] * (rate * t).exp();
            assert!((v - want).abs() <= 1e-6, "t={t}: {v} vs {want}");
        }
    }
    let first = estimate_component_at(&op, &h, 0.2).unwrap();
    for (v, r) in first.values.iter().zip(&recs) {
        assert!((v - r.component(0).unwrap().samples[0].1).abs() <= 1e-12);
    }
}

#[test]
fn rotation_fit_from_rk4_data() {
    let w = 1.5;
    let a = RealMatrix::from_row_slice(2, 2, &[0.0, -w, w, 0.0]);
    let sched: Vec<SamplingSchedule> = (0..2)
        .map(|i| SamplingSchedule::new(i, 0.0, 0.1, 1).unwrap())
        .collect();
    let cfg = EnsembleConfig::new(sched, 30, vec![(-1.0, 1.0); 2], 3, 0.1);
    let recs = sample_ensemble(&LinearField::new(a.clone()), &cfg).unwrap();
    let x = RealMatrix::from_fn(2, 30, |i, k| recs[k].series[i].samples[0].1);
    let y = RealMatrix::from_fn(2, 30, |i, k| recs[k].series[i].samples[1].1);
    let ens = StatePairEnsemble::measured(x, y, 0.1).unwrap();
    let d = Dictionary::coordinates(2).unwrap();
    let (px, py) = build_edmd_matrices(&ens, &d).unwrap();
    let model = fit_koopman(&d, &px, &py, 0.1).unwrap();
    assert!((&model.generator - &a).amax() <= 1e-6);
}
