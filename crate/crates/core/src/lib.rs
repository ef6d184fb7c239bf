//! Multivariate Gram-Charlier and generalized Gram-Charlier density
//! expansions with moments, cumulants and Hermite polynomials stored as
//! flat Kronecker-layout vectors.

pub mod cumulants;
pub mod empirical;
pub mod error;
pub mod gauss;
pub mod kron;
pub mod moment_table;
pub mod quadrature;
pub mod series;
pub mod validation;

pub use cumulants::{
    alpha_from_delta, cumulant_delta, cumulants_from_moments, delta_from_alpha, moments_from_cumulants,
    CumulantDelta, CumulantSet, ExpansionCoefficients, MomentSet, DEFAULT_ORDER, MAX_ORDER,
};
pub use empirical::{fit_expansion, sample_moments, standardize, SampleMatrix};
pub use error::{Error, Result};
pub use gauss::{gaussian_derivative, gaussian_pdf, hermite_general, hermite_identity, GaussianParams};
pub use kron::{KronVector, ModePermutation, MultiIndex};
pub use series::{
    char_fn_ggc, char_fn_series, gca_density, ggc_density, AffineStandardizer, ExpansionModel, PointGrid,
    ReferenceDensity,
};
