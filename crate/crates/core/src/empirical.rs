//! Sample ingestion, moment estimation, standardization and fitting.

use std::io::Read;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::cumulants::{
    alpha_from_delta, check_order, cumulant_delta, cumulants_from_moments, CumulantSet, MomentSet,
};
use crate::error::{Error, Result};
use crate::gauss::GaussianParams;
use crate::kron::KronVector;
use crate::series::{negative_mass_fraction, AffineStandardizer, ExpansionModel, PointGrid, ReferenceDensity};

/// `n` samples of dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("samples need at least one column".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidInput(format!(
                "{} values do not fill rows of width {dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse {
                row: pos / dim + 1,
                column: pos % dim + 1,
                value: data[pos].to_string(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::InvalidInput(format!(
                "row {} has {} columns, expected {dim}",
                i + 1,
                rows[i].len()
            )));
        }
        Self::new(dim, rows.concat())
    }

    /// Read CSV; `has_header` skips the first record. Row and column numbers
    /// in errors are 1-based and count data rows only.
    pub fn from_csv(reader: impl Read, has_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(has_header)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut dim = None;
        let mut data = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record?;
            let row = i + 1;
            let width = *dim.get_or_insert(record.len());
            if record.len() != width {
                return Err(Error::InvalidInput(format!(
                    "row {row} has {} columns, expected {width}",
                    record.len()
                )));
            }
            for (j, cell) in record.iter().enumerate() {
                let v = cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Parse {
                    row,
                    column: j + 1,
                    value: cell.to_string(),
                })?;
                data.push(v);
            }
        }
        match dim {
            None => Err(Error::InvalidInput("no samples in input".into())),
            Some(d) => Self::new(d, data),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn mean(&self) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(Error::InvalidInput("empty sample".into()));
        }
        let mut mean = vec![0.0; self.dim];
        for r in self.rows() {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        let n = self.len() as f64;
        Ok(mean.into_iter().map(|m| m / n).collect())
    }

    /// Plain-average (biased) covariance.
    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        let d = self.dim;
        if self.len() < d + 1 {
            return Err(Error::InvalidInput(format!(
                "{} samples cannot estimate a {d}-dimensional covariance (need at least {})",
                self.len(),
                d + 1
            )));
        }
        let mean = self.mean()?;
        let mut cov = DMatrix::zeros(d, d);
        for r in self.rows() {
            let c = DVector::from_iterator(d, r.iter().zip(&mean).map(|(v, m)| v - m));
            cov += &c * c.transpose();
        }
        Ok(cov / self.len() as f64)
    }

    /// Apply `x ↦ A x + b` to every row.
    pub fn transformed(&self, t: &AffineStandardizer) -> Result<Self> {
        let mut data = Vec::with_capacity(self.data.len());
        for r in self.rows() {
            data.extend(t.apply(r)?);
        }
        Self::new(self.dim, data)
    }
}

/// `m(k) = (1/n) Σ_i x_i^{⊗k}` for `k <= max_order`, summed in row order.
pub fn sample_moments(samples: &SampleMatrix, max_order: usize) -> Result<MomentSet> {
    check_order(max_order)?;
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let d = samples.dim();
    let mut sums: Vec<KronVector> = (1..=max_order).map(|k| KronVector::zeros(d, k)).collect::<Result<_>>()?;
    for r in samples.rows() {
        // build x^{⊗k} incrementally from x^{⊗(k-1)}
        let x = KronVector::from_vector(r)?;
        let mut power = KronVector::scalar(d, 1.0);
        for acc in sums.iter_mut() {
            power = power.kron(&x)?;
            acc.add_scaled(1.0, &power)?;
        }
    }
    let n = samples.len() as f64;
    let higher = sums.into_iter().map(|s| s.scaled(1.0 / n).symmetrize()).collect();
    MomentSet::new(d, higher)
}

/// Standardize to zero mean and identity covariance with `A = L⁻¹`, `b = -A x̄`.
pub fn standardize(samples: &SampleMatrix) -> Result<(SampleMatrix, AffineStandardizer)> {
    let cov = samples.covariance()?;
    let mean = samples.mean()?;
    let chol = cov
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("sample covariance is singular".into()))?;
    let a = chol
        .l()
        .try_inverse()
        .ok_or_else(|| Error::NotPositiveDefinite("sample covariance is singular".into()))?;
    let b = -(&a * DVector::from_vec(mean));
    let t = AffineStandardizer::new(a, b.iter().copied().collect())?;
    Ok((samples.transformed(&t)?, t))
}

/// Fit in standardized coordinates and keep the standardizer in the model.
pub fn fit_expansion(samples: &SampleMatrix, max_order: usize, reference: &ReferenceDensity) -> Result<ExpansionModel> {
    let (working, t) = standardize(samples)?;
    fit_with_transform(&working, max_order, reference, t)
}

/// Fit treating the samples as already in working coordinates.
pub fn fit_prestandardized(
    samples: &SampleMatrix,
    max_order: usize,
    reference: &ReferenceDensity,
) -> Result<ExpansionModel> {
    fit_with_transform(samples, max_order, reference, AffineStandardizer::identity(samples.dim()))
}

fn fit_with_transform(
    working: &SampleMatrix,
    max_order: usize,
    reference: &ReferenceDensity,
    transform: AffineStandardizer,
) -> Result<ExpansionModel> {
    check_order(max_order)?;
    if reference.dim() != working.dim() {
        return Err(Error::DimensionMismatch {
            expected: working.dim(),
            found: reference.dim(),
        });
    }
    let target = cumulants_from_moments(&sample_moments(working, max_order)?)?;
    let reference_cumulants = reference.cumulants(max_order)?;
    let delta = cumulant_delta(&target, &reference_cumulants)?;
    ExpansionModel::new(alpha_from_delta(&delta)?, reference.clone(), transform)
}

/// Standard normal reference in working coordinates.
pub fn standard_reference(dim: usize) -> ReferenceDensity {
    ReferenceDensity::Gaussian(GaussianParams::standard(dim))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderNorms {
    pub order: usize,
    pub delta: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitDiagnostics {
    pub samples: usize,
    pub dim: usize,
    pub max_order: usize,
    /// Absent above three dimensions.
    pub negative_mass_fraction: Option<f64>,
    pub orders: Vec<OrderNorms>,
}

/// Per-order `‖δ(k)‖` and `‖α(k)‖`, plus the negative share of the density
/// on a grid over `[-4, 4]^d` in working coordinates.
pub fn fit_diagnostics(model: &ExpansionModel, samples: usize) -> Result<FitDiagnostics> {
    let d = model.dim();
    let delta = model.delta()?;
    let orders = (1..=model.max_order())
        .map(|k| {
            Ok(OrderNorms {
                order: k,
                delta: delta.get(k)?.norm(),
                alpha: model.coefficients().get(k)?.norm(),
            })
        })
        .collect::<Result<_>>()?;
    let negative_mass_fraction = if d <= 3 {
        let points = [201, 61, 25][d - 1];
        let working = ExpansionModel::new(
            model.coefficients().clone(),
            model.reference().clone(),
            AffineStandardizer::identity(d),
        )?;
        Some(negative_mass_fraction(&working, &PointGrid::new(vec![(-4.0, 4.0, points); d])?)?)
    } else {
        None
    };
    Ok(FitDiagnostics {
        samples,
        dim: d,
        max_order: model.max_order(),
        negative_mass_fraction,
        orders,
    })
}

/// Cumulants of the standardized sample.
pub fn standardized_cumulants(samples: &SampleMatrix, max_order: usize) -> Result<CumulantSet> {
    let (working, _) = standardize(samples)?;
    cumulants_from_moments(&sample_moments(&working, max_order)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_sample_moments_are_powers() {
        let s = SampleMatrix::from_rows(&[vec![1.5, -0.5]]).unwrap();
        let m = sample_moments(&s, 3).unwrap();
        assert_eq!(m.get(3).unwrap(), &KronVector::kron_power(&[1.5, -0.5], 3).unwrap());
    }

    #[test]
    fn symmetric_pair_has_no_odd_moments() {
        let s = SampleMatrix::from_rows(&[vec![2.0], vec![-2.0]]).unwrap();
        let m = sample_moments(&s, 4).unwrap();
        assert_eq!(m.get(1).unwrap().data(), &[0.0]);
        assert_eq!(m.get(3).unwrap().data(), &[0.0]);
        assert_eq!(m.get(2).unwrap().data(), &[4.0]);
    }

    #[test]
    fn scaled_sample_standardizes_with_inverse_scale() {
        let base = [-1.0, 0.0, 1.0, 2.0, -2.0];
        let sd = (base.iter().map(|v| v * v).sum::<f64>() / 5.0).sqrt();
        let s = SampleMatrix::from_rows(&base.iter().map(|v| vec![3.0 * v / sd]).collect::<Vec<_>>()).unwrap();
        let (_, t) = standardize(&s).unwrap();
        assert!((t.matrix()[(0, 0)] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn too_few_samples_rejected() {
        let s = SampleMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(standardize(&s), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn csv_errors_point_at_cell() {
        let err = SampleMatrix::from_csv("x,y\n1,2\n3,abc\n".as_bytes(), true).unwrap_err();
        match err {
            Error::Parse { row, column, value } => assert_eq!((row, column, value.as_str()), (2, 2, "abc")),
            e => panic!("unexpected {e:?}"),
        }
        assert!(SampleMatrix::from_csv("1,2\n3\n".as_bytes(), false).is_err());
        assert!(SampleMatrix::from_csv("1,NaN\n".as_bytes(), false).is_err());
        let s = SampleMatrix::from_csv("1, 2\n3,4.5\n".as_bytes(), false).unwrap();
        assert_eq!(s.row(1), &[3.0, 4.5]);
    }
}
