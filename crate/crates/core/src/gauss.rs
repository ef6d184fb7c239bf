//! Multivariate Gaussian density, its Kronecker derivatives, and vector
//! Hermite polynomials (probabilists' normalization).
//!
//! The identity-covariance Hermite vector has the closed form
//! `H_k(x)[(i_1..i_k)] = Π_j He_{r_j}(x_j)`, with `r_j` the number of times
//! coordinate `j` occurs in the multi-index. General covariance `C = L Lᵀ`
//! is handled by transport: substituting `x = L z` gives `C D_x = L D_z`, so
//!
//! ```text
//! H_k(x; 0, C) = L^{⊗k} H_k(L⁻¹x; 0, I)
//! D^{⊗k} G(x)  = (-1)^k G(x) (L⁻ᵀ)^{⊗k} H_k(L⁻¹(x - μ); 0, I)
//! ```

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cumulants::CumulantSet;
use crate::error::{Error, Result};
use crate::kron::KronVector;

/// Relative asymmetry tolerated in a covariance matrix.
pub const COVARIANCE_SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Mean and covariance of a multivariate normal, with its Cholesky factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGaussian", into = "RawGaussian")]
pub struct GaussianParams {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
    chol_inv: DMatrix<f64>,
    log_sqrt_det: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGaussian {
    mean: Vec<f64>,
    covariance: Vec<Vec<f64>>,
}

impl TryFrom<RawGaussian> for GaussianParams {
    type Error = Error;

    fn try_from(raw: RawGaussian) -> Result<Self> {
        let d = raw.mean.len();
        if raw.covariance.len() != d || raw.covariance.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput(format!("covariance must be {d}x{d}")));
        }
        let cov = DMatrix::from_fn(d, d, |i, j| raw.covariance[i][j]);
        GaussianParams::new(raw.mean, cov)
    }
}

impl From<GaussianParams> for RawGaussian {
    fn from(g: GaussianParams) -> Self {
        let d = g.dim();
        RawGaussian {
            mean: g.mean.iter().copied().collect(),
            covariance: (0..d).map(|i| (0..d).map(|j| g.cov[(i, j)]).collect()).collect(),
        }
    }
}

impl GaussianParams {
    pub fn new(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: cov.nrows(),
            });
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("mean and covariance must be finite".into()));
        }
        let scale = cov.amax();
        let asym = (&cov - cov.transpose()).amax();
        if asym > COVARIANCE_SYMMETRY_TOLERANCE * scale {
            return Err(Error::InvalidInput(format!(
                "covariance is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        let chol = Cholesky::new(cov.clone())
            .ok_or_else(|| Error::NotPositiveDefinite("covariance has no Cholesky factor".into()))?
            .l();
        if chol.diagonal().iter().any(|&v| v <= 0.0 || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite("covariance is singular".into()));
        }
        let chol_inv = chol
            .clone()
            .solve_lower_triangular(&DMatrix::identity(d, d))
            .ok_or_else(|| Error::NotPositiveDefinite("singular Cholesky factor".into()))?;
        let log_sqrt_det = chol.diagonal().iter().map(|v| v.ln()).sum();
        Ok(Self {
            mean: DVector::from_vec(mean),
            cov,
            chol,
            chol_inv,
            log_sqrt_det,
        })
    }

    /// `N(0, I_d)`.
    pub fn standard(dim: usize) -> Self {
        Self::new(vec![0.0; dim], DMatrix::identity(dim, dim)).expect("identity is positive definite")
    }

    /// Gaussian matching the first two cumulants.
    pub fn from_cumulants(c: &CumulantSet) -> Result<Self> {
        Self::new(c.get(1)?.data().to_vec(), c.covariance()?)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Lower-triangular `L` with `C = L Lᵀ`.
    pub fn cholesky(&self) -> &DMatrix<f64> {
        &self.chol
    }

    pub fn cholesky_inverse(&self) -> &DMatrix<f64> {
        &self.chol_inv
    }

    /// `ln |C|^{1/2} = Σ ln L_ii`.
    pub fn log_sqrt_det(&self) -> f64 {
        self.log_sqrt_det
    }

    pub fn precision(&self) -> DMatrix<f64> {
        self.chol_inv.transpose() * &self.chol_inv
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `L⁻¹ (x - μ)`.
    pub fn whiten(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let centered = DVector::from_iterator(x.len(), x.iter().zip(self.mean.iter()).map(|(a, m)| a - m));
        Ok((&self.chol_inv * centered).iter().copied().collect())
    }

    fn pdf_from_whitened(&self, z: &[f64]) -> f64 {
        let d = self.dim() as f64;
        let q: f64 = z.iter().map(|v| v * v).sum();
        (-0.5 * q - 0.5 * d * (2.0 * PI).ln() - self.log_sqrt_det).exp()
    }
}

/// `He_0(x) .. He_n(x)` from the three-term recurrence `He_{k+1} = x He_k - k He_{k-1}`.
pub fn hermite_scalars(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        out.push(x * out[k] - k as f64 * out[k - 1]);
    }
    out
}

/// Density of `N(μ, C)` at `x`.
pub fn gaussian_pdf(x: &[f64], g: &GaussianParams) -> Result<f64> {
    let z = g.whiten(x)?;
    Ok(g.pdf_from_whitened(&z))
}

/// `H_k(x; 0, I)`.
pub fn hermite_identity(x: &[f64], k: usize) -> Result<KronVector> {
    let d = x.len();
    let tables: Vec<Vec<f64>> = x.iter().map(|&xi| hermite_scalars(xi, k)).collect();
    let mut counts = vec![0usize; d];
    KronVector::from_fn(d, k, |idx| {
        counts.iter_mut().for_each(|c| *c = 0);
        for &i in idx {
            counts[i] += 1;
        }
        counts.iter().zip(&tables).fold(1.0, |acc, (&r, t)| acc * t[r])
    })
}

/// `H_k(x; 0, C)` for a zero-mean Gaussian.
pub fn hermite_general(x: &[f64], k: usize, g: &GaussianParams) -> Result<KronVector> {
    if g.mean().iter().any(|&m| m != 0.0) {
        return Err(Error::InvalidInput(
            "Hermite polynomials are defined for a zero-mean Gaussian".into(),
        ));
    }
    let z = g.whiten(x)?;
    hermite_identity(&z, k)?.apply_mode_matrix(g.cholesky())
}

/// `D^{⊗k} G(x; μ, C)`.
pub fn gaussian_derivative(x: &[f64], k: usize, g: &GaussianParams) -> Result<KronVector> {
    let z = g.whiten(x)?;
    derivative_from_whitened(&z, k, g)
}

fn derivative_from_whitened(z: &[f64], k: usize, g: &GaussianParams) -> Result<KronVector> {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let h = hermite_identity(z, k)?;
    let inv_t = g.cholesky_inverse().transpose();
    Ok(h.apply_mode_matrix(&inv_t)?.scaled(sign * g.pdf_from_whitened(z)))
}

/// `D^{⊗k} G(x)` for every `k` in `0..=max_order`.
pub fn gaussian_derivatives(x: &[f64], max_order: usize, g: &GaussianParams) -> Result<Vec<KronVector>> {
    let z = g.whiten(x)?;
    (0..=max_order).map(|k| derivative_from_whitened(&z, k, g)).collect()
}

#[cfg(test)]
pub(crate) fn assert_symmetric(v: &KronVector, tol: f64) {
    assert!(v.symmetry_residual() <= tol, "residual {}", v.symmetry_residual());
}

/// `Vec(I_d)` as an order-2 Kronecker vector.
pub fn vec_identity(dim: usize) -> Result<KronVector> {
    KronVector::from_fn(dim, 2, |i| if i[0] == i[1] { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_examples() {
        let g = GaussianParams::standard(2);
        assert!((gaussian_pdf(&[0.0, 0.0], &g).unwrap() - 0.159_154_943_091_895_35).abs() < 1e-15);
        let g = GaussianParams::new(vec![0.0], DMatrix::from_element(1, 1, 4.0)).unwrap();
        assert!((gaussian_pdf(&[0.0], &g).unwrap() - 0.199_471_140_200_716_35).abs() < 1e-15);
        let g = GaussianParams::standard(1);
        let want = (-0.5f64).exp() / (2.0 * PI).sqrt();
        assert!((gaussian_pdf(&[1.0], &g).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_covariance() {
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            GaussianParams::new(vec![0.0, 0.0], c),
            Err(Error::NotPositiveDefinite(_))
        ));
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(GaussianParams::new(vec![0.0, 0.0], c), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn hermite_examples() {
        assert!((hermite_identity(&[2.0], 3).unwrap().data()[0] - 2.0).abs() < 1e-15);
        let h2 = hermite_identity(&[0.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(h2, vec_identity(3).unwrap().scaled(-1.0));
        let x = [0.4, -1.3];
        assert_eq!(hermite_identity(&x, 1).unwrap().data(), &x);
        assert_eq!(hermite_identity(&x, 0).unwrap().data(), &[1.0]);
    }

    #[test]
    fn scalar_recurrence() {
        for &x in &[-2.5, -0.3, 0.0, 1.1, 3.7] {
            let he = hermite_scalars(x, 9);
            for (k, &hk) in he.iter().enumerate().take(8).skip(1) {
                let h = |n| hermite_identity(&[x], n).unwrap().data()[0];
                let rhs = x * h(k) - k as f64 * h(k - 1);
                assert!((h(k + 1) - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
                assert_eq!(h(k), hk);
            }
        }
    }

    #[test]
    fn general_hermite_with_scalar_variance() {
        let s2 = 2.5;
        let g = GaussianParams::new(vec![0.0], DMatrix::from_element(1, 1, s2)).unwrap();
        let x = 1.7;
        assert!((hermite_general(&[x], 1, &g).unwrap().data()[0] - x).abs() < 1e-14);
        assert!((hermite_general(&[x], 2, &g).unwrap().data()[0] - (x * x - s2)).abs() < 1e-13);
    }

    #[test]
    fn general_equals_identity_at_unit_covariance() {
        let g = GaussianParams::standard(3);
        let x = [0.3, -1.2, 0.8];
        for k in 0..=4 {
            assert_eq!(hermite_general(&x, k, &g).unwrap(), hermite_identity(&x, k).unwrap());
        }
    }

    #[test]
    fn general_hermite_rejects_nonzero_mean() {
        let g = GaussianParams::new(vec![1.0], DMatrix::identity(1, 1)).unwrap();
        assert!(hermite_general(&[0.0], 2, &g).is_err());
    }

    #[test]
    fn derivative_examples() {
        let g = GaussianParams::standard(1);
        let x = 0.8;
        let g0 = gaussian_pdf(&[x], &g).unwrap();
        assert_eq!(gaussian_derivative(&[x], 0, &g).unwrap().data(), &[g0]);
        assert!((gaussian_derivative(&[x], 1, &g).unwrap().data()[0] + x * g0).abs() < 1e-16);
        let g2 = GaussianParams::standard(2);
        let d2 = gaussian_derivative(&[0.0, 0.0], 2, &g2).unwrap();
        let want = vec_identity(2).unwrap().scaled(-1.0 / (2.0 * PI));
        for (a, b) in d2.data().iter().zip(want.data()) {
            assert!((a - b).abs() < 1e-16);
        }
    }

    #[test]
    fn outputs_are_symmetric() {
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
        let g = GaussianParams::new(vec![0.0, 0.0], c).unwrap();
        for k in 0..=4 {
            assert_symmetric(&hermite_identity(&[0.3, -0.9], k).unwrap(), 0.0);
            assert_symmetric(&hermite_general(&[0.3, -0.9], k, &g).unwrap(), 1e-14);
        }
    }

    #[test]
    fn json_roundtrip() {
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
        let g = GaussianParams::new(vec![1.0, -1.0], c).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"mean":[1.0,-1.0],"covariance":[[2.0,0.6],[0.6,1.0]]}"#);
        assert_eq!(serde_json::from_str::<GaussianParams>(&s).unwrap(), g);
    }
}
