//! Moment/cumulant conversions against closed forms for independent
//! Gamma-distributed coordinates.

use gramcharlier::cumulants::{alpha_from_delta, cumulant_delta, delta_from_alpha};
use gramcharlier::moment_table::MomentTable;
use gramcharlier::{cumulants_from_moments, moments_from_cumulants, CumulantSet, KronVector, MomentSet};

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `E[X^r]` for `X ~ Gamma(shape, 1)`: `shape (shape+1) ... (shape+r-1)`.
fn gamma_moment(shape: f64, r: u32) -> f64 {
    (0..r).map(|i| shape + f64::from(i)).product()
}

/// Joint moments of independent Gamma coordinates with the given shapes.
fn independent_gamma_moments(shapes: &[f64], max_order: usize) -> MomentSet {
    let d = shapes.len();
    let higher = (1..=max_order)
        .map(|k| {
            KronVector::from_fn(d, k, |idx| {
                shapes
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| gamma_moment(a, idx.iter().filter(|&&i| i == j).count() as u32))
                    .product()
            })
            .unwrap()
        })
        .collect();
    MomentSet::new(d, higher).unwrap()
}

#[test]
fn exponential_scalar_moments_and_cumulants() {
    let m = independent_gamma_moments(&[1.0], 6);
    let c = cumulants_from_moments(&m).unwrap();
    for k in 1..=6u32 {
        let got = c.get(k as usize).unwrap().data()[0];
        assert!((got - factorial(k - 1)).abs() <= 1e-12 * factorial(k - 1), "c_{k} = {got}");
        assert_eq!(m.get(k as usize).unwrap().data()[0], factorial(k));
    }
}

#[test]
fn independent_coordinates_have_no_mixed_cumulants() {
    let shapes = [1.0, 2.5, 0.5];
    let c = cumulants_from_moments(&independent_gamma_moments(&shapes, 5)).unwrap();
    for k in 1..=5 {
        let v = c.get(k).unwrap();
        let scale = v.max_abs();
        for (pos, &value) in v.data().iter().enumerate() {
            let idx = gramcharlier::MultiIndex::decode(3, k, pos).unwrap();
            let first = idx.indices()[0];
            let pure = idx.indices().iter().all(|&i| i == first);
            // Gamma(a) cumulants: (k-1)! a
            let want = if pure { factorial(k as u32 - 1) * shapes[first] } else { 0.0 };
            assert!((value - want).abs() <= 1e-11 * scale, "order {k} entry {pos}: {value} vs {want}");
        }
    }
}

#[test]
fn table_and_recursion_agree_on_gamma_moments() {
    let m = independent_gamma_moments(&[1.5, 0.7], 6);
    let c = cumulants_from_moments(&m).unwrap();
    let table = MomentTable::embedded();
    for k in 1..=6 {
        let got = table.evaluate(&c, k).unwrap();
        let want = m.get(k).unwrap();
        assert!(got.sub(want).unwrap().max_abs() <= 1e-10 * want.max_abs());
    }
}

#[test]
fn gaussian_cumulants_give_isserlis_moments() {
    let cov = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
    let m = moments_from_cumulants(&CumulantSet::gaussian(&[0.0, 0.0], &cov, 4).unwrap()).unwrap();
    let m4 = m.get(4).unwrap();
    // E[x_i x_j x_k x_l] = C_ij C_kl + C_ik C_jl + C_il C_jk
    for (pos, &v) in m4.data().iter().enumerate() {
        let idx = gramcharlier::MultiIndex::decode(2, 4, pos).unwrap();
        let [i, j, k, l] = idx.indices() else { unreachable!() };
        let want = cov[(*i, *j)] * cov[(*k, *l)] + cov[(*i, *k)] * cov[(*j, *l)] + cov[(*i, *l)] * cov[(*j, *k)];
        assert!((v - want).abs() < 1e-14);
    }
    assert!(m.get(3).unwrap().max_abs() == 0.0);
}

#[test]
fn alpha_delta_inverse_pair() {
    let c = cumulants_from_moments(&independent_gamma_moments(&[1.0, 3.0], 6)).unwrap();
    let reference = CumulantSet::gaussian(&[1.0, 3.0], &nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]), 6)
        .unwrap();
    let delta = cumulant_delta(&c, &reference).unwrap();
    // matched mean and covariance
    assert!(delta.get(1).unwrap().max_abs() < 1e-12);
    assert!(delta.get(2).unwrap().max_abs() < 1e-12);
    let back = delta_from_alpha(&alpha_from_delta(&delta).unwrap()).unwrap();
    for k in 3..=6 {
        let want = delta.get(k).unwrap();
        assert!(back.get(k).unwrap().sub(want).unwrap().max_abs() <= 1e-10 * want.max_abs());
    }
}
