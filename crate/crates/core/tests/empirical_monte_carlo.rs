//! Seeded Monte Carlo checks of moment estimation and fitting. Tolerances
//! are five standard errors, from population moments or, where noted, from
//! simulation.

use gramcharlier::empirical::{fit_prestandardized, standard_reference};
use gramcharlier::{fit_expansion, ggc_density, sample_moments, standardize, SampleMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

fn normal_sample(n: usize, d: usize, seed: u64) -> SampleMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n * d).map(|_| StandardNormal.sample(&mut rng)).collect();
    SampleMatrix::new(d, data).unwrap()
}

fn exponential_sample(n: usize, seed: u64) -> SampleMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
    SampleMatrix::new(1, data).unwrap()
}

#[test]
fn isserlis_fourth_moment() {
    let n = 100_000;
    let m = sample_moments(&normal_sample(n, 2, 1), 4).unwrap();
    let m4 = m.get(4).unwrap();
    // E[x^4] = 3 with Var[x^4] = 105 - 9; E[x^2 y^2] = 1 with Var = 9 - 1
    let se_pure = (96.0 / n as f64).sqrt();
    let se_mixed = (8.0 / n as f64).sqrt();
    assert!((m4.at(&[0, 0, 0, 0]) - 3.0).abs() < 5.0 * se_pure);
    assert!((m4.at(&[1, 1, 1, 1]) - 3.0).abs() < 5.0 * se_pure);
    assert!((m4.at(&[0, 0, 1, 1]) - 1.0).abs() < 5.0 * se_mixed);
    assert!((m4.at(&[0, 1, 0, 1]) - m4.at(&[1, 1, 0, 0])).abs() == 0.0);
}

#[test]
fn sample_moments_are_exactly_symmetric() {
    let m = sample_moments(&normal_sample(500, 3, 2), 4).unwrap();
    for k in 1..=4 {
        let v = m.get(k).unwrap();
        assert_eq!(&v.symmetrize(), v);
    }
}

#[test]
fn seeded_runs_are_bit_identical() {
    let a = sample_moments(&normal_sample(2_000, 2, 3), 5).unwrap();
    let b = sample_moments(&normal_sample(2_000, 2, 3), 5).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn standardization_invariants() {
    let raw = normal_sample(1_000, 2, 4);
    let skewed = SampleMatrix::from_rows(
        &raw.rows().map(|r| vec![2.0 * r[0] + 1.0, 0.5 * r[0] - 0.3 * r[1] - 4.0]).collect::<Vec<_>>(),
    )
    .unwrap();
    let (working, _) = standardize(&skewed).unwrap();
    let mean = working.mean().unwrap();
    let cov = working.covariance().unwrap();
    assert!(mean.iter().all(|m| m.abs() < 1e-10));
    assert!((cov - nalgebra::DMatrix::identity(2, 2)).abs().max() < 1e-8);
}

#[test]
fn already_standard_sample_gives_near_identity_map() {
    let (_, t) = standardize(&normal_sample(50_000, 2, 5)).unwrap();
    assert!((t.matrix() - nalgebra::DMatrix::identity(2, 2)).abs().max() < 0.05);
    assert!(t.offset().iter().all(|b| b.abs() < 0.05));
}

#[test]
fn gaussian_sample_gives_small_higher_coefficients() {
    let n = 100_000;
    let model = fit_expansion(&normal_sample(n, 2, 6), 4, &standard_reference(2)).unwrap();
    // normal-theory standard errors of skewness and excess kurtosis: sqrt(6/n), sqrt(24/n)
    assert!(model.coefficients().get(3).unwrap().max_abs() < 5.0 * (6.0 / n as f64).sqrt());
    assert!(model.coefficients().get(4).unwrap().max_abs() < 5.0 * (24.0 / n as f64).sqrt());
}

#[test]
fn exponential_sample_recovers_cumulants() {
    let n = 200_000;
    let model = fit_expansion(&exponential_sample(n, 7), 4, &standard_reference(1)).unwrap();
    let delta = model.delta().unwrap();
    // sqrt(n) times the standard error of the sample skewness and excess
    // kurtosis of Exponential(1), measured by simulation: about 8.3 and 83
    let c3 = delta.get(3).unwrap().data()[0];
    let c4 = delta.get(4).unwrap().data()[0];
    assert!((c3 - 2.0).abs() < 5.0 * 8.3 / (n as f64).sqrt(), "c3 = {c3}");
    assert!((c4 - 6.0).abs() < 5.0 * 83.0 / (n as f64).sqrt(), "c4 = {c4}");
}

#[test]
fn fit_in_raw_coordinates_matches_prestandardized_fit() {
    let raw = exponential_sample(5_000, 8);
    let two_d = SampleMatrix::from_rows(
        &raw.rows()
            .zip(normal_sample(5_000, 1, 9).rows())
            .map(|(a, b)| vec![a[0], 0.3 * a[0] + b[0]])
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let model = fit_expansion(&two_d, 4, &standard_reference(2)).unwrap();
    let (working, t) = standardize(&two_d).unwrap();
    let pre = fit_prestandardized(&working, 4, &standard_reference(2)).unwrap();
    for x in [[0.5, 0.2], [1.5, 1.0], [3.0, -0.5]] {
        let raw_value = ggc_density(&model, &x).unwrap();
        let w = t.apply(&x).unwrap();
        let working_value = ggc_density(&pre, &w).unwrap() * t.log_abs_det().exp();
        assert!((raw_value - working_value).abs() <= 1e-10 * raw_value.abs(), "{raw_value} vs {working_value}");
    }
}

#[test]
fn too_few_samples_is_an_input_error() {
    let s = SampleMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 0.0, 1.0]]).unwrap();
    assert!(matches!(
        fit_expansion(&s, 4, &standard_reference(3)),
        Err(gramcharlier::Error::InvalidInput(_))
    ));
}
