use gramcharlier::gauss::hermite_scalars;
use gramcharlier::quadrature::{
    gaussian_derivative_quadrature, hermite_integral_quadrature, integrate_interval, pdf_from_cumulants_half_domain,
    pdf_from_cumulants_quadrature, QuadratureGrid, QuadratureRule,
};
use gramcharlier::{gaussian_derivative, gaussian_pdf, hermite_identity, CumulantSet, GaussianParams, KronVector};
use nalgebra::DMatrix;

fn rel(got: &KronVector, want: &KronVector) -> f64 {
    got.sub(want).unwrap().max_abs() / want.max_abs()
}

#[test]
fn hermite_orthogonality() {
    let grid = QuadratureGrid::default_for(1, 12.0).unwrap();
    let g = GaussianParams::standard(1);
    for j in 0..=5 {
        for k in 0..=5 {
            let got = integrate_interval(
                |x| {
                    let he = hermite_scalars(x, 5);
                    he[j] * he[k] * gaussian_pdf(&[x], &g).unwrap()
                },
                -12.0,
                12.0,
                &grid,
            )
            .unwrap();
            let want = if j == k { (1..=k).product::<usize>() as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-8, "j={j} k={k}: {got}");
        }
    }
}

#[test]
fn half_domain_matches_full_domain_in_one_dimension() {
    let c = CumulantSet::gaussian(&[0.4], &DMatrix::from_element(1, 1, 1.7), 2).unwrap();
    for x in [-2.0, 0.0, 0.4, 3.1] {
        let full = pdf_from_cumulants_quadrature(&c, &[x], None).unwrap();
        let half = pdf_from_cumulants_half_domain(&c, &[x], None).unwrap();
        assert!((full - half).abs() < 1e-8);
    }
}

#[test]
fn skewed_cumulants_integrate_to_one() {
    // odd cumulants only shift the phase, so the integrand stays damped
    let vectors = vec![
        KronVector::new(1, 1, vec![0.0]).unwrap(),
        KronVector::new(1, 2, vec![1.0]).unwrap(),
        KronVector::new(1, 3, vec![0.3]).unwrap(),
    ];
    let c = CumulantSet::new(1, vectors).unwrap();
    let grid = QuadratureGrid::new(1, 12.0, 128, QuadratureRule::GaussLegendre).unwrap();
    let mass = integrate_interval(
        |x| pdf_from_cumulants_quadrature(&c, &[x], None).unwrap(),
        -12.0,
        12.0,
        &grid.with_tolerance(1e-7),
    )
    .unwrap();
    assert!((mass - 1.0).abs() < 1e-6, "{mass}");
}

#[test]
fn gaussian_derivatives_by_quadrature() {
    let cases = [
        GaussianParams::new(vec![0.3], DMatrix::from_element(1, 1, 0.8)).unwrap(),
        GaussianParams::new(vec![0.1, -0.4], DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.6])).unwrap(),
    ];
    for g in &cases {
        let x: Vec<f64> = g.mean().iter().map(|m| m + 0.6).collect();
        for k in 0..=4 {
            let got = gaussian_derivative_quadrature(&x, k, g, None).unwrap();
            let want = gaussian_derivative(&x, k, g).unwrap();
            assert!(rel(&got, &want) < 1e-5, "d={} k={k}", g.dim());
        }
    }
}

#[test]
fn hermite_integral_form() {
    for x in [vec![0.0], vec![2.0], vec![-1.3], vec![0.5, -0.25], vec![1.5, 1.0]] {
        for k in 0..=4 {
            let got = hermite_integral_quadrature(&x, k, None).unwrap();
            let want = hermite_identity(&x, k).unwrap();
            // H_k(0) vanishes for odd k
            let err = got.sub(&want).unwrap().max_abs() / want.max_abs().max(1.0);
            assert!(err < 1e-5, "x={x:?} k={k}: {err}");
        }
    }
}

#[test]
fn trapezoid_rule_also_converges() {
    let grid = QuadratureGrid::new(1, 10.0, 128, QuadratureRule::Trapezoid).unwrap();
    let c = CumulantSet::gaussian(&[0.0], &DMatrix::identity(1, 1), 2).unwrap();
    let got = pdf_from_cumulants_quadrature(&c, &[0.5], Some(&grid)).unwrap();
    assert!((got - gaussian_pdf(&[0.5], &GaussianParams::standard(1)).unwrap()).abs() < 1e-10);
}
