//! Truncated Gram-Charlier A and generalized Gram-Charlier density
//! expansions, and the matching characteristic functions.
//!
//! A model evaluates
//!
//! ```text
//! f(x) = |det A| Σ_{k=0}^{K} (-1)^k / k! ⟨α(k), ψ^{(k)}(A x + b)⟩
//! ```
//!
//! where `ψ` is the reference density in working coordinates and `(A, b)`
//! is the standardizing map from raw coordinates. Truncated series can go
//! negative; values are returned as computed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cumulants::{
    alpha_from_delta, check_order, cumulant_delta, cumulants_from_moments, delta_from_alpha, factorial,
    moments_from_cumulants, CumulantDelta, CumulantSet, ExpansionCoefficients, MomentSet,
};
use crate::error::{Error, Result};
use crate::gauss::{gaussian_derivatives, gaussian_pdf, hermite_general, hermite_identity, GaussianParams};
use crate::kron::KronVector;

/// Tolerance on mixture weights summing to one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Reference density `ψ` with analytic derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReferenceDensity {
    Gaussian(GaussianParams),
    GaussianMixture { components: Vec<MixtureComponent> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    #[serde(flatten)]
    pub params: GaussianParams,
}

impl ReferenceDensity {
    pub fn gaussian(params: GaussianParams) -> Self {
        Self::Gaussian(params)
    }

    pub fn mixture(components: Vec<(f64, GaussianParams)>) -> Result<Self> {
        let out = Self::GaussianMixture {
            components: components
                .into_iter()
                .map(|(weight, params)| MixtureComponent { weight, params })
                .collect(),
        };
        out.validate()?;
        Ok(out)
    }

    /// Check weights and component dimensions.
    pub fn validate(&self) -> Result<()> {
        if let Self::GaussianMixture { components } = self {
            let Some(first) = components.first() else {
                return Err(Error::InvalidInput("mixture needs at least one component".into()));
            };
            if components.iter().any(|c| c.weight.is_nan() || c.weight <= 0.0) {
                return Err(Error::InvalidInput("mixture weights must be positive".into()));
            }
            let total: f64 = components.iter().map(|c| c.weight).sum();
            if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(Error::InvalidInput(format!("mixture weights sum to {total}, not 1")));
            }
            if let Some(c) = components.iter().find(|c| c.params.dim() != first.params.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: first.params.dim(),
                    found: c.params.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian(g) => g.dim(),
            Self::GaussianMixture { components } => components[0].params.dim(),
        }
    }

    pub fn pdf(&self, x: &[f64]) -> Result<f64> {
        match self {
            Self::Gaussian(g) => gaussian_pdf(x, g),
            Self::GaussianMixture { components } => components
                .iter()
                .map(|c| Ok(c.weight * gaussian_pdf(x, &c.params)?))
                .sum(),
        }
    }

    /// `ψ^{(k)}(x)` for every `k` in `0..=max_order`.
    pub fn derivatives(&self, x: &[f64], max_order: usize) -> Result<Vec<KronVector>> {
        match self {
            Self::Gaussian(g) => gaussian_derivatives(x, max_order, g),
            Self::GaussianMixture { components } => {
                let mut acc: Option<Vec<KronVector>> = None;
                for c in components {
                    let ders = gaussian_derivatives(x, max_order, &c.params)?;
                    match acc.as_mut() {
                        None => acc = Some(ders.iter().map(|v| v.scaled(c.weight)).collect()),
                        Some(acc) => {
                            for (a, v) in acc.iter_mut().zip(&ders) {
                                a.add_scaled(c.weight, v)?;
                            }
                        }
                    }
                }
                Ok(acc.expect("validated mixture is non-empty"))
            }
        }
    }

    /// Characteristic function `E[exp(i λᵀx)]`.
    pub fn char_fn(&self, lambda: &[f64]) -> Result<Complex64> {
        let gaussian_cf = |g: &GaussianParams| -> Result<Complex64> {
            if lambda.len() != g.dim() {
                return Err(Error::DimensionMismatch {
                    expected: g.dim(),
                    found: lambda.len(),
                });
            }
            let l = DVector::from_column_slice(lambda);
            let phase: f64 = g.mean().iter().zip(lambda).map(|(m, t)| m * t).sum();
            let quad = (l.transpose() * g.covariance() * &l)[(0, 0)];
            Ok(Complex64::from_polar((-0.5 * quad).exp(), phase))
        };
        match self {
            Self::Gaussian(g) => gaussian_cf(g),
            Self::GaussianMixture { components } => components
                .iter()
                .map(|c| Ok(gaussian_cf(&c.params)? * c.weight))
                .sum(),
        }
    }

    /// Moments up to `max_order`.
    pub fn moments(&self, max_order: usize) -> Result<MomentSet> {
        match self {
            Self::Gaussian(g) => {
                moments_from_cumulants(&CumulantSet::gaussian(g.mean(), g.covariance(), max_order)?)
            }
            Self::GaussianMixture { components } => {
                let dim = self.dim();
                let mut higher: Vec<KronVector> =
                    (1..=max_order).map(|k| KronVector::zeros(dim, k)).collect::<Result<_>>()?;
                for c in components {
                    let m = moments_from_cumulants(&CumulantSet::gaussian(
                        c.params.mean(),
                        c.params.covariance(),
                        max_order,
                    )?)?;
                    for (acc, v) in higher.iter_mut().zip(&m.vectors()[1..]) {
                        acc.add_scaled(c.weight, v)?;
                    }
                }
                MomentSet::new(dim, higher)
            }
        }
    }

    /// Cumulants up to `max_order`.
    pub fn cumulants(&self, max_order: usize) -> Result<CumulantSet> {
        match self {
            Self::Gaussian(g) => CumulantSet::gaussian(g.mean(), g.covariance(), max_order),
            Self::GaussianMixture { .. } => cumulants_from_moments(&self.moments(max_order)?),
        }
    }
}

/// `ψ^{(k)}(x)`.
pub fn reference_derivative(reference: &ReferenceDensity, x: &[f64], k: usize) -> Result<KronVector> {
    Ok(reference.derivatives(x, k)?.pop().expect("k + 1 orders"))
}

/// Affine map `x ↦ A x + b` from raw to working coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAffine", into = "RawAffine")]
pub struct AffineStandardizer {
    matrix: DMatrix<f64>,
    offset: DVector<f64>,
    inverse: DMatrix<f64>,
    log_abs_det: f64,
}

#[derive(Serialize, Deserialize)]
struct RawAffine {
    matrix: Vec<Vec<f64>>,
    offset: Vec<f64>,
    log_abs_det: f64,
}

impl TryFrom<RawAffine> for AffineStandardizer {
    type Error = Error;

    fn try_from(raw: RawAffine) -> Result<Self> {
        let d = raw.offset.len();
        if raw.matrix.len() != d || raw.matrix.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput(format!("transform matrix must be {d}x{d}")));
        }
        let a = DMatrix::from_fn(d, d, |i, j| raw.matrix[i][j]);
        let out = AffineStandardizer::new(a, raw.offset)?;
        if (out.log_abs_det - raw.log_abs_det).abs() > 1e-8 * out.log_abs_det.abs().max(1.0) {
            return Err(Error::InvalidInput(format!(
                "log_abs_det {} does not match the matrix ({})",
                raw.log_abs_det, out.log_abs_det
            )));
        }
        Ok(out)
    }
}

impl From<AffineStandardizer> for RawAffine {
    fn from(t: AffineStandardizer) -> Self {
        let d = t.dim();
        RawAffine {
            matrix: (0..d).map(|i| (0..d).map(|j| t.matrix[(i, j)]).collect()).collect(),
            offset: t.offset.iter().copied().collect(),
            log_abs_det: t.log_abs_det,
        }
    }
}

impl AffineStandardizer {
    pub fn new(matrix: DMatrix<f64>, offset: Vec<f64>) -> Result<Self> {
        let d = offset.len();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows(),
            });
        }
        let lu = matrix.clone().lu();
        let det = lu.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::NotPositiveDefinite("standardizing matrix is singular".into()));
        }
        let inverse = lu
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite("standardizing matrix is singular".into()))?;
        Ok(Self {
            matrix,
            offset: DVector::from_vec(offset),
            inverse,
            log_abs_det: det.abs().ln(),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
            offset: DVector::zeros(dim),
            inverse: DMatrix::identity(dim, dim),
            log_abs_det: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.offset.len()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &[f64] {
        self.offset.as_slice()
    }

    pub fn log_abs_det(&self) -> f64 {
        self.log_abs_det
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let y = &self.matrix * DVector::from_column_slice(x) + &self.offset;
        Ok(y.iter().copied().collect())
    }

    /// Characteristic-function argument and phase for raw coordinates:
    /// `E[e^{iλᵀx}] = e^{-iλᵀA⁻¹b} · E[e^{i(A⁻ᵀλ)ᵀw}]`.
    fn pull_back_frequency(&self, lambda: &[f64]) -> (Vec<f64>, f64) {
        let l = DVector::from_column_slice(lambda);
        let working = self.inverse.transpose() * &l;
        let phase = -(l.transpose() * (&self.inverse * &self.offset))[(0, 0)];
        (working.iter().copied().collect(), phase)
    }
}

/// A truncated GGC expansion ready for evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel", into = "RawModel")]
pub struct ExpansionModel {
    coefficients: ExpansionCoefficients,
    reference: ReferenceDensity,
    transform: AffineStandardizer,
}

#[derive(Serialize, Deserialize)]
struct RawModel {
    dim: usize,
    max_order: usize,
    coefficients: ExpansionCoefficients,
    reference: ReferenceDensity,
    transform: AffineStandardizer,
}

impl TryFrom<RawModel> for ExpansionModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        let model = ExpansionModel::new(raw.coefficients, raw.reference, raw.transform)?;
        if model.dim() != raw.dim || model.max_order() != raw.max_order {
            return Err(Error::InvalidInput(format!(
                "header says dim {} / order {}, coefficients have dim {} / order {}",
                raw.dim,
                raw.max_order,
                model.dim(),
                model.max_order()
            )));
        }
        Ok(model)
    }
}

impl From<ExpansionModel> for RawModel {
    fn from(m: ExpansionModel) -> Self {
        RawModel {
            dim: m.dim(),
            max_order: m.max_order(),
            coefficients: m.coefficients,
            reference: m.reference,
            transform: m.transform,
        }
    }
}

impl ExpansionModel {
    pub fn new(
        coefficients: ExpansionCoefficients,
        reference: ReferenceDensity,
        transform: AffineStandardizer,
    ) -> Result<Self> {
        reference.validate()?;
        check_order(coefficients.max_order())?;
        let d = coefficients.dim();
        for found in [reference.dim(), transform.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        Ok(Self {
            coefficients,
            reference,
            transform,
        })
    }

    /// Model from cumulant differences against `reference`.
    pub fn from_delta(
        delta: &CumulantDelta,
        reference: ReferenceDensity,
        transform: AffineStandardizer,
    ) -> Result<Self> {
        Self::new(alpha_from_delta(delta)?, reference, transform)
    }

    pub fn dim(&self) -> usize {
        self.coefficients.dim()
    }

    pub fn max_order(&self) -> usize {
        self.coefficients.max_order()
    }

    pub fn coefficients(&self) -> &ExpansionCoefficients {
        &self.coefficients
    }

    pub fn reference(&self) -> &ReferenceDensity {
        &self.reference
    }

    pub fn transform(&self) -> &AffineStandardizer {
        &self.transform
    }

    pub fn delta(&self) -> Result<CumulantDelta> {
        delta_from_alpha(&self.coefficients)
    }

    /// Characteristic function of the raw-coordinate density implied by
    /// the full cumulant differences.
    pub fn char_fn(&self, lambda: &[f64]) -> Result<Complex64> {
        if lambda.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: lambda.len(),
            });
        }
        let (working, phase) = self.transform.pull_back_frequency(lambda);
        let delta = self.delta()?;
        let cf = char_fn_ggc(&delta, |l| self.reference.char_fn(l), &working)?;
        Ok(cf * Complex64::from_polar(1.0, phase))
    }
}

/// GGC density of `model` at raw point `x`.
pub fn ggc_density(model: &ExpansionModel, x: &[f64]) -> Result<f64> {
    let w = model.transform.apply(x)?;
    let ders = model.reference.derivatives(&w, model.max_order())?;
    let mut total = 0.0;
    for (k, (alpha, der)) in model.coefficients.vectors().iter().zip(&ders).enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        total += sign / factorial(k) * alpha.dot(der)?;
    }
    Ok(total * model.transform.log_abs_det.exp())
}

/// Gaussian-reference model matching `c(1)`, `c(2)`, with `δ(k) = c(k)` for
/// `k >= 3`, truncated at order `max_order`.
pub fn gca_model(cumulants: &CumulantSet, max_order: usize) -> Result<ExpansionModel> {
    check_order(max_order)?;
    let order = max_order.max(2);
    let target = cumulants.truncated(order)?;
    let g = GaussianParams::from_cumulants(cumulants)?;
    let reference = CumulantSet::gaussian(g.mean(), g.covariance(), order)?;
    let delta = cumulant_delta(&target, &reference)?;
    let mut alpha = alpha_from_delta(&delta)?;
    if max_order < order {
        alpha = ExpansionCoefficients::new(g.dim(), alpha.vectors()[1..=max_order].to_vec())?;
    }
    ExpansionModel::new(alpha, ReferenceDensity::Gaussian(g.clone()), AffineStandardizer::identity(g.dim()))
}

/// Gram-Charlier A density at `x`, truncated at order `max_order`.
pub fn gca_density(cumulants: &CumulantSet, x: &[f64], max_order: usize) -> Result<f64> {
    ggc_density(&gca_model(cumulants, max_order)?, x)
}

/// The same series through the Hermite form
/// `G(x) Σ_k ⟨α(k), (C⁻¹)^{⊗k} H_k(x - μ; 0, C)⟩ / k!`.
pub fn gca_density_hermite(cumulants: &CumulantSet, x: &[f64], max_order: usize) -> Result<f64> {
    let model = gca_model(cumulants, max_order)?;
    let ReferenceDensity::Gaussian(g) = model.reference() else {
        unreachable!("gca_model builds a Gaussian reference")
    };
    let centered = GaussianParams::new(vec![0.0; g.dim()], g.covariance().clone())?;
    let shifted: Vec<f64> = x.iter().zip(g.mean()).map(|(a, m)| a - m).collect();
    let precision = g.precision();
    let mut total = 0.0;
    for (k, alpha) in model.coefficients().vectors().iter().enumerate() {
        let h = hermite_general(&shifted, k, &centered)?.apply_mode_matrix(&precision)?;
        total += alpha.dot(&h)? / factorial(k);
    }
    Ok(gaussian_pdf(x, g)? * total)
}

/// Hermite form for standardized cumulants (`c(1) = 0`, `c(2) = I`):
/// `G(x) Σ_k ⟨α(k), H_k(x; 0, I)⟩ / k!`.
pub fn gca_density_standard(cumulants: &CumulantSet, x: &[f64], max_order: usize) -> Result<f64> {
    let d = cumulants.dim();
    let c1_zero = cumulants.get(1)?.data().iter().all(|&v| v == 0.0);
    let c2_identity = cumulants.covariance()? == DMatrix::identity(d, d);
    if !(c1_zero && c2_identity) {
        return Err(Error::InvalidInput(
            "standard Hermite form needs c(1) = 0 and c(2) = I".into(),
        ));
    }
    let model = gca_model(cumulants, max_order)?;
    let mut total = 0.0;
    for (k, alpha) in model.coefficients().vectors().iter().enumerate() {
        total += alpha.dot(&hermite_identity(x, k)?)? / factorial(k);
    }
    Ok(gaussian_pdf(x, &GaussianParams::standard(d))? * total)
}

/// `Σ_k ⟨t(k), λ^{⊗k}⟩ i^k / k!` over the given orders.
fn complex_series(vectors: &[KronVector], first_order: usize, lambda: &[f64]) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for (i, v) in vectors.iter().enumerate() {
        let k = i + first_order;
        let real = v.dot(&KronVector::kron_power(lambda, k)?)? / factorial(k);
        let unit = match k % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        total += unit * real;
    }
    Ok(total)
}

fn check_frequency(dim: usize, lambda: &[f64]) -> Result<()> {
    if lambda.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: lambda.len(),
        });
    }
    Ok(())
}

/// `Σ_k ⟨m(k), (iλ)^{⊗k}⟩ / k!`.
pub fn char_fn_series(m: &MomentSet, lambda: &[f64]) -> Result<Complex64> {
    check_frequency(m.dim(), lambda)?;
    complex_series(m.vectors(), 0, lambda)
}

/// `exp(Σ_k ⟨δ(k), (iλ)^{⊗k}⟩ / k!) · ref_cf(λ)`.
pub fn char_fn_ggc(
    delta: &CumulantDelta,
    ref_cf: impl Fn(&[f64]) -> Result<Complex64>,
    lambda: &[f64],
) -> Result<Complex64> {
    check_frequency(delta.dim(), lambda)?;
    Ok(complex_series(delta.vectors(), 1, lambda)?.exp() * ref_cf(lambda)?)
}

/// `[Σ_k ⟨α(k), (iλ)^{⊗k}⟩ / k!] · ref_cf(λ)`: the transform of the
/// truncated series itself.
pub fn char_fn_truncated(
    alpha: &ExpansionCoefficients,
    ref_cf: impl Fn(&[f64]) -> Result<Complex64>,
    lambda: &[f64],
) -> Result<Complex64> {
    check_frequency(alpha.dim(), lambda)?;
    Ok(complex_series(alpha.vectors(), 0, lambda)? * ref_cf(lambda)?)
}

/// Rectangular evaluation grid, one `(min, max, n)` triple per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGrid {
    axes: Vec<(f64, f64, usize)>,
}

impl PointGrid {
    pub fn new(axes: Vec<(f64, f64, usize)>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one axis".into()));
        }
        for &(lo, hi, n) in &axes {
            if !(lo.is_finite() && hi.is_finite()) || n == 0 || (n > 1 && hi <= lo) {
                return Err(Error::InvalidInput(format!("bad grid axis {lo}:{hi}:{n}")));
            }
        }
        Ok(Self { axes })
    }

    /// Parse `"min:max:n[,min:max:n...]"`. A single axis is repeated to
    /// `dim` axes.
    pub fn parse(spec: &str, dim: usize) -> Result<Self> {
        let axes = spec
            .split(',')
            .map(|part| {
                let fields: Vec<&str> = part.trim().split(':').collect();
                let [lo, hi, n] = fields[..] else {
                    return Err(Error::InvalidInput(format!("grid axis {part:?} is not min:max:n")));
                };
                let num = |s: &str| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidInput(format!("bad number {s:?} in grid")))
                };
                let n = n
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad point count {n:?} in grid")))?;
                Ok((num(lo)?, num(hi)?, n))
            })
            .collect::<Result<Vec<_>>>()?;
        let axes = match axes.len() {
            1 => vec![axes[0]; dim],
            n if n == dim => axes,
            n => {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: n,
                })
            }
        };
        Self::new(axes)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.2).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points in row-major order (first axis slowest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let coords: Vec<Vec<f64>> = self
            .axes
            .iter()
            .map(|&(lo, hi, n)| {
                if n == 1 {
                    vec![lo]
                } else {
                    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
                }
            })
            .collect();
        let mut out = vec![Vec::with_capacity(self.dim())];
        for axis in &coords {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Share of the absolute density mass on the grid that is negative.
pub fn negative_mass_fraction(model: &ExpansionModel, grid: &PointGrid) -> Result<f64> {
    let (mut neg, mut abs) = (0.0, 0.0);
    for p in grid.points() {
        let f = ggc_density(model, &p)?;
        abs += f.abs();
        if f < 0.0 {
            neg -= f;
        }
    }
    Ok(if abs > 0.0 { neg / abs } else { 0.0 })
}
