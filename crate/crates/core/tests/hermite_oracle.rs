//! Hermite polynomials and Gaussian derivatives against finite differences.
//!
//! The oracle nests a fourth-order central stencil
//! `(f(x-2h) - 8f(x-h) + 8f(x+h) - f(x+2h)) / 12h` once per derivative order,
//! with `h = h0 · max(1, |x_j|)` along coordinate `j`.

use gramcharlier::gauss::{gaussian_derivatives, hermite_scalars};
use gramcharlier::series::reference_derivative;
use gramcharlier::{
    gaussian_derivative, gaussian_pdf, hermite_general, hermite_identity, GaussianParams, KronVector,
    ReferenceDensity,
};
use nalgebra::DMatrix;

fn partial(f: &dyn Fn(&[f64]) -> f64, x: &mut [f64], axes: &[usize], h0: f64) -> f64 {
    let Some((&j, rest)) = axes.split_first() else {
        return f(x);
    };
    let h = h0 * x[j].abs().max(1.0);
    let x0 = x[j];
    let mut total = 0.0;
    for (offset, weight) in [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)] {
        x[j] = x0 + offset * h;
        total += weight * partial(f, x, rest, h0);
    }
    x[j] = x0;
    total / (12.0 * h)
}

fn fd_kron(f: &dyn Fn(&[f64]) -> f64, x: &[f64], k: usize, h0: f64) -> KronVector {
    let mut scratch = x.to_vec();
    KronVector::from_fn(x.len(), k, |idx| partial(f, &mut scratch, idx, h0)).unwrap()
}

/// Step balancing `h^4` truncation against `eps / h^k` roundoff.
fn step(k: usize) -> f64 {
    f64::EPSILON.powf(1.0 / (k as f64 + 4.0))
}

fn rel(got: &KronVector, want: &KronVector) -> f64 {
    got.sub(want).unwrap().max_abs() / want.max_abs()
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[test]
fn scalar_hermite_examples() {
    assert_eq!(hermite_identity(&[2.0], 3).unwrap().data(), &[2.0]);
    let h2 = hermite_identity(&[0.0, 0.0, 0.0], 2).unwrap();
    let id = gramcharlier::gauss::vec_identity(3).unwrap();
    assert_eq!(h2, id.scaled(-1.0));
    assert_eq!(hermite_identity(&[0.3, -0.8], 1).unwrap().data(), &[0.3, -0.8]);
}

#[test]
fn identity_hermite_matches_rodrigues() {
    let g = GaussianParams::standard(2);
    let f = |p: &[f64]| gaussian_pdf(p, &g).unwrap();
    for x in [[0.4, -0.9], [1.3, 0.2], [-0.5, -1.6]] {
        let g0 = f(&x);
        for k in 0..=3 {
            let fd = fd_kron(&f, &x, k, step(k)).scaled(sign(k) / g0);
            assert!(rel(&fd, &hermite_identity(&x, k).unwrap()) < 1e-6, "x={x:?} k={k}");
        }
    }
}

#[test]
fn scalar_variance_hermite() {
    let s2 = 2.3;
    let g = GaussianParams::new(vec![0.0], DMatrix::from_element(1, 1, s2)).unwrap();
    for x in [-1.7, 0.4, 2.2] {
        assert!((hermite_general(&[x], 1, &g).unwrap().data()[0] - x).abs() < 1e-14);
        assert!((hermite_general(&[x], 2, &g).unwrap().data()[0] - (x * x - s2)).abs() < 1e-12);
    }
}

#[test]
fn general_hermite_matches_rodrigues_with_covariance() {
    let cov = DMatrix::from_row_slice(2, 2, &[1.8, -0.6, -0.6, 0.9]);
    let g = GaussianParams::new(vec![0.0, 0.0], cov.clone()).unwrap();
    let f = |p: &[f64]| gaussian_pdf(p, &g).unwrap();
    for x in [[0.5, 0.5], [-1.2, 0.3], [0.9, -1.4]] {
        let g0 = f(&x);
        for k in 0..=3 {
            // (-1)^k G^{-1} (C D)^{⊗k} G
            let fd = fd_kron(&f, &x, k, step(k)).apply_mode_matrix(&cov).unwrap().scaled(sign(k) / g0);
            let got = hermite_general(&x, k, &g).unwrap();
            assert!(rel(&fd, &got) < 1e-6, "x={x:?} k={k}: {}", rel(&fd, &got));
        }
    }
}

#[test]
fn general_equals_identity_for_unit_covariance() {
    let g = GaussianParams::standard(2);
    for x in [[0.1, 2.0], [-0.7, -0.3]] {
        for k in 0..=4 {
            assert_eq!(hermite_general(&x, k, &g).unwrap(), hermite_identity(&x, k).unwrap());
        }
    }
}

#[test]
fn scalar_recurrence_and_orthogonality_weights() {
    for x in [-3.1, -0.2, 0.0, 1.7] {
        let he = hermite_scalars(x, 9);
        for k in 1..=8 {
            let want = x * he[k] - k as f64 * he[k - 1];
            assert!((he[k + 1] - want).abs() <= 1e-12 * want.abs().max(1.0));
        }
    }
}

#[test]
fn gaussian_derivative_matches_finite_differences() {
    let cases = [
        GaussianParams::standard(1),
        GaussianParams::new(vec![0.4], DMatrix::from_element(1, 1, 0.6)).unwrap(),
        GaussianParams::new(vec![0.2, -0.3], DMatrix::from_row_slice(2, 2, &[1.2, 0.4, 0.4, 0.7])).unwrap(),
    ];
    for g in &cases {
        let f = |p: &[f64]| gaussian_pdf(p, g).unwrap();
        let x: Vec<f64> = g.mean().iter().map(|m| m + 0.7).collect();
        for k in 0..=4 {
            let want = fd_kron(&f, &x, k, step(k));
            let got = gaussian_derivative(&x, k, g).unwrap();
            assert!(rel(&got, &want) < 1e-6, "d={} k={k}: {}", g.dim(), rel(&got, &want));
        }
    }
}

#[test]
fn gaussian_derivative_examples() {
    let g = GaussianParams::standard(1);
    let x = 0.8;
    let d1 = gaussian_derivative(&[x], 1, &g).unwrap().data()[0];
    assert!((d1 + x * gaussian_pdf(&[x], &g).unwrap()).abs() < 1e-16);
    let g2 = GaussianParams::standard(2);
    let d2 = gaussian_derivative(&[0.0, 0.0], 2, &g2).unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;
    for (got, want) in d2.data().iter().zip([-1.0, 0.0, 0.0, -1.0]) {
        assert!((got - want / two_pi).abs() < 1e-16);
    }
}

#[test]
fn derivative_times_covariance_gives_hermite() {
    let cov = DMatrix::from_row_slice(2, 2, &[0.8, 0.3, 0.3, 1.5]);
    let mean = vec![0.5, -1.0];
    let g = GaussianParams::new(mean.clone(), cov.clone()).unwrap();
    let centered = GaussianParams::new(vec![0.0, 0.0], cov.clone()).unwrap();
    let x = [1.1, -0.2];
    let shifted = [x[0] - mean[0], x[1] - mean[1]];
    let ders = gaussian_derivatives(&x, 4, &g).unwrap();
    let g0 = gaussian_pdf(&x, &g).unwrap();
    for (k, der) in ders.iter().enumerate() {
        let got = der.apply_mode_matrix(&cov).unwrap().scaled(sign(k) / g0);
        assert!(rel(&got, &hermite_general(&shifted, k, &centered).unwrap()) < 1e-9);
    }
}

#[test]
fn mixture_derivative_matches_finite_differences() {
    let reference = ReferenceDensity::mixture(vec![
        (0.3, GaussianParams::new(vec![-1.0], DMatrix::from_element(1, 1, 0.5)).unwrap()),
        (0.7, GaussianParams::new(vec![0.8], DMatrix::from_element(1, 1, 1.4)).unwrap()),
    ])
    .unwrap();
    let f = |p: &[f64]| reference.pdf(p).unwrap();
    for x in [-1.5, 0.1, 1.9] {
        for k in 0..=3 {
            let want = fd_kron(&f, &[x], k, step(k));
            let got = reference_derivative(&reference, &[x], k).unwrap();
            assert!(rel(&got, &want) < 1e-6, "x={x} k={k}");
        }
    }
}
