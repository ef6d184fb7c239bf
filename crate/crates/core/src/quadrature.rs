//! Numerical checks of the integral representations at `d <= 2`.
//!
//! Every integral is evaluated on a tensor grid over `[-L, L]^d` and then
//! again with twice as many points per axis; if the two disagree by more
//! than ten times the grid tolerance the call fails with
//! [`Error::Accuracy`] instead of returning a value.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::cumulants::{factorial, CumulantSet};
use crate::error::{Error, Result};
use crate::gauss::GaussianParams;
use crate::kron::{checked_len, KronVector};

pub const MIN_POINTS: usize = 32;
pub const MAX_DIM: usize = 2;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Half-width for the Hermite integral in `u`, where the weight is `e^{-uᵀu}`.
pub const HERMITE_HALF_WIDTH: f64 = 6.0;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    Trapezoid,
    GaussLegendre,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    dim: usize,
    half_width: f64,
    points: usize,
    rule: QuadratureRule,
    tolerance: f64,
}

impl QuadratureGrid {
    pub fn new(dim: usize, half_width: f64, points: usize, rule: QuadratureRule) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Unsupported(format!("quadrature supports d = 1 or 2, got {dim}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidInput(format!("half-width must be positive, got {half_width}")));
        }
        if points < MIN_POINTS {
            return Err(Error::InvalidInput(format!("need at least {MIN_POINTS} points per axis")));
        }
        // the doubled grid is evaluated too
        checked_len(2 * points, dim)?;
        Ok(Self {
            dim,
            half_width,
            points,
            rule,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Gauss-Legendre with 256 points per axis at `d = 1` and 128 at `d = 2`.
    pub fn default_for(dim: usize, half_width: f64) -> Result<Self> {
        let points = if dim == 1 { 256 } else { 128 };
        Self::new(dim, half_width, points, QuadratureRule::GaussLegendre)
    }

    /// Frequency-domain grid for an integrand damped by `exp(-½ λᵀCλ)`.
    pub fn spectral(cov: &DMatrix<f64>) -> Result<Self> {
        let precision = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("covariance has no Cholesky factor".into()))?
            .inverse();
        let scale = (0..cov.nrows()).map(|i| precision[(i, i)].sqrt()).fold(0.0, f64::max);
        Self::default_for(cov.nrows(), 8.0 * scale)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn rule(&self) -> QuadratureRule {
        self.rule
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn axis(&self, lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        match self.rule {
            QuadratureRule::GaussLegendre => {
                let (x, w) = gauss_legendre(n);
                (
                    x.iter().map(|t| mid + half * t).collect(),
                    w.iter().map(|w| half * w).collect(),
                )
            }
            QuadratureRule::Trapezoid => {
                let h = (hi - lo) / (n - 1) as f64;
                let x = (0..n).map(|i| lo + h * i as f64).collect();
                let w = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h }).collect();
                (x, w)
            }
        }
    }

    /// Tensor-product sum of `f` over the box, with `n` points per axis.
    fn sum(
        &self,
        bounds: &[(f64, f64)],
        n: usize,
        len: usize,
        f: &impl Fn(&[f64], &mut [f64]) -> Result<()>,
    ) -> Result<Vec<f64>> {
        let axes: Vec<_> = bounds.iter().map(|&(lo, hi)| self.axis(lo, hi, n)).collect();
        let mut total = vec![0.0; len];
        let mut scratch = vec![0.0; len];
        let mut point = vec![0.0; self.dim];
        let mut idx = vec![0usize; self.dim];
        loop {
            let mut w = 1.0;
            for (j, &i) in idx.iter().enumerate() {
                point[j] = axes[j].0[i];
                w *= axes[j].1[i];
            }
            f(&point, &mut scratch)?;
            for (t, s) in total.iter_mut().zip(&scratch) {
                *t += w * s;
            }
            let mut j = self.dim;
            loop {
                if j == 0 {
                    return Ok(total);
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < n {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Integrate a vector-valued `f` over the box and self-check by doubling.
    fn integrate(
        &self,
        bounds: &[(f64, f64)],
        len: usize,
        f: impl Fn(&[f64], &mut [f64]) -> Result<()>,
    ) -> Result<Vec<f64>> {
        let coarse = self.sum(bounds, self.points, len, &f)?;
        let fine = self.sum(bounds, 2 * self.points, len, &f)?;
        let scale = fine.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let change = coarse.iter().zip(&fine).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let limit = 10.0 * self.tolerance * scale;
        if change > limit {
            return Err(Error::Accuracy { change, limit });
        }
        Ok(fine)
    }

    fn full_box(&self) -> Vec<(f64, f64)> {
        vec![(-self.half_width, self.half_width); self.dim]
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Log-CF pieces `(real, imaginary)` of `Σ_k ⟨c(k), (iλ)^{⊗k}⟩ / k!`, after
/// checking that no even order above two is present.
fn cumulant_integrand(c: &CumulantSet) -> Result<impl Fn(&[f64]) -> Result<(f64, f64)> + '_> {
    for k in (4..=c.max_order()).step_by(2) {
        if c.get(k)?.data().iter().any(|&v| v != 0.0) {
            return Err(Error::Unsupported(format!(
                "cumulant of even order {k} is nonzero; the integrand is not damped"
            )));
        }
    }
    Ok(move |lambda: &[f64]| {
        let (mut re, mut im) = (0.0, 0.0);
        for k in 1..=c.max_order() {
            if k >= 4 && k % 2 == 0 {
                continue;
            }
            let v = c.get(k)?.dot(&KronVector::kron_power(lambda, k)?)? / factorial(k);
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                re += sign * v;
            } else {
                im += sign * v;
            }
        }
        Ok((re, im))
    })
}

fn spectral_grid_for(c: &CumulantSet) -> Result<QuadratureGrid> {
    QuadratureGrid::spectral(&c.covariance()?)
}

/// Density at `x` from cumulants whose even orders above two vanish:
/// `(2π)^{-d} ∫ exp(-½⟨c(2), λ^{⊗2}⟩) cos(xᵀλ - Σ_{odd k} ...) dλ`.
pub fn pdf_from_cumulants_quadrature(c: &CumulantSet, x: &[f64], grid: Option<&QuadratureGrid>) -> Result<f64> {
    let grid = match grid {
        Some(g) => g.clone(),
        None => spectral_grid_for(c)?,
    };
    grid.check_dim(c.dim())?;
    grid.check_dim(x.len())?;
    let log_cf = cumulant_integrand(c)?;
    let out = grid.integrate(&grid.full_box(), 1, |l, out| {
        let (re, im) = log_cf(l)?;
        out[0] = re.exp() * (im - dot(x, l)).cos();
        Ok(())
    })?;
    Ok(out[0] / (2.0 * PI).powi(grid.dim as i32))
}

/// The same density using evenness of the integrand: twice the integral
/// over the half-space `λ_1 >= 0`.
pub fn pdf_from_cumulants_half_domain(c: &CumulantSet, x: &[f64], grid: Option<&QuadratureGrid>) -> Result<f64> {
    let grid = match grid {
        Some(g) => g.clone(),
        None => spectral_grid_for(c)?,
    };
    grid.check_dim(c.dim())?;
    grid.check_dim(x.len())?;
    let log_cf = cumulant_integrand(c)?;
    let mut bounds = grid.full_box();
    bounds[0].0 = 0.0;
    let out = grid.integrate(&bounds, 1, |l, out| {
        let (re, im) = log_cf(l)?;
        out[0] = re.exp() * (im - dot(x, l)).cos();
        Ok(())
    })?;
    Ok(2.0 * out[0] / (2.0 * PI).powi(grid.dim as i32))
}

/// `G^{(k)}(x) = (2π)^{-d} ∫ λ^{⊗k} exp(-½λᵀCλ) cos((x-μ)ᵀλ + kπ/2) dλ`.
pub fn gaussian_derivative_quadrature(
    x: &[f64],
    k: usize,
    g: &GaussianParams,
    grid: Option<&QuadratureGrid>,
) -> Result<KronVector> {
    if k > 4 {
        return Err(Error::Unsupported(format!("derivative quadrature supports k <= 4, got {k}")));
    }
    let grid = match grid {
        Some(q) => q.clone(),
        None => QuadratureGrid::spectral(g.covariance())?,
    };
    grid.check_dim(g.dim())?;
    grid.check_dim(x.len())?;
    let shifted: Vec<f64> = x.iter().zip(g.mean()).map(|(a, m)| a - m).collect();
    let cov = g.covariance();
    let d = g.dim();
    let len = checked_len(d, k)?;
    let data = grid.integrate(&grid.full_box(), len, |l, out| {
        let mut quad = 0.0;
        for i in 0..d {
            for j in 0..d {
                quad += l[i] * cov[(i, j)] * l[j];
            }
        }
        let scale = (-0.5 * quad).exp() * (dot(&shifted, l) + k as f64 * FRAC_PI_2).cos();
        out.copy_from_slice(KronVector::kron_power(l, k)?.data());
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    })?;
    let norm = (2.0 * PI).powi(d as i32);
    KronVector::new(d, k, data.into_iter().map(|v| v / norm).collect())
}

/// `H_k(x; 0, I) = 2^{k/2} π^{-d/2} e^{½xᵀx} ∫ u^{⊗k} e^{-uᵀu} cos(√2 xᵀu - kπ/2) du`.
pub fn hermite_integral_quadrature(x: &[f64], k: usize, grid: Option<&QuadratureGrid>) -> Result<KronVector> {
    if k > 4 {
        return Err(Error::Unsupported(format!("Hermite quadrature supports k <= 4, got {k}")));
    }
    let grid = match grid {
        Some(q) => q.clone(),
        None => QuadratureGrid::default_for(x.len(), HERMITE_HALF_WIDTH)?,
    };
    grid.check_dim(x.len())?;
    let d = x.len();
    let len = checked_len(d, k)?;
    let data = grid.integrate(&grid.full_box(), len, |u, out| {
        let scale = (-dot(u, u)).exp() * (SQRT_2 * dot(x, u) - k as f64 * FRAC_PI_2).cos();
        out.copy_from_slice(KronVector::kron_power(u, k)?.data());
        out.iter_mut().for_each(|v| *v *= scale);
        Ok(())
    })?;
    let prefactor = 2f64.powf(k as f64 / 2.0) * PI.powf(-(d as f64) / 2.0) * (0.5 * dot(x, x)).exp();
    KronVector::new(d, k, data.into_iter().map(|v| v * prefactor).collect())
}

/// Inverse Fourier transform `(2π)^{-d} ∫ Re[e^{-iλᵀx} F(λ)] dλ`.
pub fn density_from_char_fn(
    cf: impl Fn(&[f64]) -> Result<Complex64>,
    x: &[f64],
    grid: &QuadratureGrid,
) -> Result<f64> {
    grid.check_dim(x.len())?;
    let out = grid.integrate(&grid.full_box(), 1, |l, out| {
        out[0] = (Complex64::from_polar(1.0, -dot(x, l)) * cf(l)?).re;
        Ok(())
    })?;
    Ok(out[0] / (2.0 * PI).powi(grid.dim as i32))
}

/// One-dimensional integral of `f` over `[lo, hi]` with the grid's rule
/// and doubling check.
pub fn integrate_interval(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: &QuadratureGrid) -> Result<f64> {
    grid.check_dim(1)?;
    Ok(grid.integrate(&[(lo, hi)], 1, |x, out| {
        out[0] = f(x[0]);
        Ok(())
    })?[0])
}
