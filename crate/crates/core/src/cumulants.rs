//! Moment/cumulant conversion and generalized Gram-Charlier coefficient
//! algebra on sequences of Kronecker vectors.
//!
//! Both directions use the recursion
//!
//! ```text
//! m(k) = Σ_{p=0}^{k-1} C(k-1, p) · Sym(c(k-p) ⊗ m(p))
//! ```
//!
//! where `Sym` averages over all mode permutations. Moment and cumulant
//! tensors are symmetric, so symmetrizing each product term is the
//! permutation that realigns the Kronecker factors; it also reproduces the
//! integer coefficients of the explicit tables (`3·Sym(c2 ⊗ c1)` is the sum
//! over the three placements of the second-order block).
//!
//! The same recursion maps cumulant differences `δ` to expansion
//! coefficients `α`, because `Σ α(k)'λ^{⊗k}/k! = exp(Σ δ(k)'λ^{⊗k}/k!)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kron::KronVector;

/// Truncation order used when none is given.
pub const DEFAULT_ORDER: usize = 6;
/// Largest supported truncation order.
pub const MAX_ORDER: usize = 10;
/// Symmetry residual above which ingested tensors trigger a warning.
pub const SYMMETRY_WARN_TOLERANCE: f64 = 1e-8;

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order,
            cap: MAX_ORDER,
        });
    }
    Ok(())
}

/// Validate orders `1..=K` and symmetrize them.
fn ingest(dim: usize, vectors: Vec<KronVector>, what: &str) -> Result<Vec<KronVector>> {
    check_order(vectors.len())?;
    vectors
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let k = i + 1;
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            if v.order() != k {
                return Err(Error::OrderMismatch {
                    expected: k,
                    found: v.order(),
                });
            }
            let residual = v.symmetry_residual();
            if residual > SYMMETRY_WARN_TOLERANCE {
                log::warn!("{what} of order {k} is not symmetric (residual {residual:.3e}); symmetrizing");
            }
            Ok(v.symmetrize())
        })
        .collect()
}

/// `out(k) = Σ_{p=0}^{k-1} C(k-1,p) Sym(gen(k-p) ⊗ out(p))`, `out(0) = 1`.
fn exp_recursion(dim: usize, generators: &[KronVector]) -> Result<Vec<KronVector>> {
    let max = generators.len();
    let mut out = Vec::with_capacity(max + 1);
    out.push(KronVector::scalar(dim, 1.0));
    for k in 1..=max {
        let mut acc = KronVector::zeros(dim, k)?;
        for p in 0..k {
            let term = generators[k - p - 1].kron(&out[p])?;
            acc.add_scaled(binomial(k - 1, p), &term)?;
        }
        out.push(acc.symmetrize());
    }
    Ok(out)
}

/// Inverse of [`exp_recursion`]: recover generators from `out(1..=K)`.
fn log_recursion(series: &[KronVector]) -> Result<Vec<KronVector>> {
    // series[0] holds order 0
    let max = series.len() - 1;
    let mut gens: Vec<KronVector> = Vec::with_capacity(max);
    for k in 1..=max {
        let mut acc = series[k].clone();
        for p in 1..k {
            let term = gens[k - p - 1].kron(&series[p])?;
            acc.add_scaled(-binomial(k - 1, p), &term)?;
        }
        gens.push(acc.symmetrize());
    }
    Ok(gens)
}

fn serialize_orders<S: Serializer>(
    s: S,
    dim: usize,
    max_order: usize,
    vectors: &[KronVector],
    first: usize,
) -> std::result::Result<S::Ok, S::Error> {
    struct Orders<'a>(&'a [KronVector], usize);
    impl Serialize for Orders<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut map = s.serialize_map(Some(self.0.len()))?;
            for (i, v) in self.0.iter().enumerate() {
                map.serialize_entry(&(i + self.1).to_string(), v.data())?;
            }
            map.end()
        }
    }
    let mut map = s.serialize_map(Some(3))?;
    map.serialize_entry("dim", &dim)?;
    map.serialize_entry("max_order", &max_order)?;
    map.serialize_entry("vectors", &Orders(vectors, first))?;
    map.end()
}

#[derive(Deserialize)]
struct RawSet {
    dim: usize,
    max_order: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl RawSet {
    /// Orders `1..=max_order` as Kronecker vectors, plus the optional order 0.
    fn into_orders(self) -> Result<(usize, Option<Vec<f64>>, Vec<KronVector>)> {
        let mut by_order: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (key, data) in self.vectors {
            let k: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("order key {key:?} is not an integer")))?;
            if k > self.max_order {
                return Err(Error::InvalidInput(format!(
                    "order {k} exceeds max_order {}",
                    self.max_order
                )));
            }
            by_order.insert(k, data);
        }
        let zero = by_order.remove(&0);
        let vectors = (1..=self.max_order)
            .map(|k| {
                let data = by_order.remove(&k).ok_or(Error::MissingOrder(k))?;
                KronVector::new(self.dim, k, data)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((self.dim, zero, vectors))
    }
}

macro_rules! cumulant_like {
    ($name:ident, $what:literal) => {
        /// Orders `1..=K` of a symmetric tensor sequence.
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            dim: usize,
            vectors: Vec<KronVector>,
        }

        impl $name {
            /// Build from orders `1..=K`; inputs are symmetrized.
            pub fn new(dim: usize, vectors: Vec<KronVector>) -> Result<Self> {
                let vectors = ingest(dim, vectors, $what)?;
                Ok(Self { dim, vectors })
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn max_order(&self) -> usize {
                self.vectors.len()
            }

            /// Order `k` tensor, `1 <= k <= K`.
            pub fn get(&self, k: usize) -> Result<&KronVector> {
                if k == 0 {
                    return Err(Error::MissingOrder(0));
                }
                self.vectors.get(k - 1).ok_or(Error::MissingOrder(k))
            }

            /// Orders `1..=K`.
            pub fn vectors(&self) -> &[KronVector] {
                &self.vectors
            }

            /// Keep orders `1..=k`, padding with zeros when `k > K`.
            pub fn truncated(&self, k: usize) -> Result<Self> {
                check_order(k)?;
                let mut vectors: Vec<_> = self.vectors.iter().take(k).cloned().collect();
                for order in vectors.len() + 1..=k {
                    vectors.push(KronVector::zeros(self.dim, order)?);
                }
                Ok(Self { dim: self.dim, vectors })
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_orders(s, self.dim, self.max_order(), &self.vectors, 1)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let (dim, zero, vectors) = RawSet::deserialize(d)?
                    .into_orders()
                    .map_err(D::Error::custom)?;
                if let Some(z) = zero {
                    if z.iter().any(|&v| v != 0.0) {
                        return Err(D::Error::custom(concat!($what, " of order 0 must be zero")));
                    }
                }
                Self::new(dim, vectors).map_err(D::Error::custom)
            }
        }
    };
}

macro_rules! moment_like {
    ($name:ident, $what:literal) => {
        /// Orders `0..=K` of a symmetric tensor sequence with order 0 fixed at `[1]`.
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            dim: usize,
            vectors: Vec<KronVector>,
        }

        impl $name {
            /// Build from orders `1..=K`; order 0 is `[1]`. Inputs are symmetrized.
            pub fn new(dim: usize, higher: Vec<KronVector>) -> Result<Self> {
                let mut vectors = vec![KronVector::scalar(dim, 1.0)];
                vectors.extend(ingest(dim, higher, $what)?);
                Ok(Self { dim, vectors })
            }

            pub(crate) fn from_full(dim: usize, vectors: Vec<KronVector>) -> Self {
                debug_assert_eq!(vectors[0].data(), &[1.0]);
                Self { dim, vectors }
            }

            pub fn dim(&self) -> usize {
                self.dim
            }

            pub fn max_order(&self) -> usize {
                self.vectors.len() - 1
            }

            /// Order `k` tensor, `0 <= k <= K`.
            pub fn get(&self, k: usize) -> Result<&KronVector> {
                self.vectors.get(k).ok_or(Error::MissingOrder(k))
            }

            /// Orders `0..=K`.
            pub fn vectors(&self) -> &[KronVector] {
                &self.vectors
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_orders(s, self.dim, self.max_order(), &self.vectors[1..], 1)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let (dim, zero, vectors) = RawSet::deserialize(d)?
                    .into_orders()
                    .map_err(D::Error::custom)?;
                if let Some(z) = zero {
                    if z != [1.0] {
                        return Err(D::Error::custom(concat!($what, " of order 0 must be [1]")));
                    }
                }
                Self::new(dim, vectors).map_err(D::Error::custom)
            }
        }
    };
}

cumulant_like!(CumulantSet, "cumulant");
cumulant_like!(CumulantDelta, "cumulant difference");
moment_like!(MomentSet, "moment");
moment_like!(ExpansionCoefficients, "expansion coefficient");

impl CumulantSet {
    /// Cumulants of `N(mean, cov)` up to order `max_order`.
    pub fn gaussian(mean: &[f64], cov: &DMatrix<f64>, max_order: usize) -> Result<Self> {
        let dim = mean.len();
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cov.nrows(),
            });
        }
        check_order(max_order)?;
        let mut vectors = Vec::with_capacity(max_order);
        for k in 1..=max_order {
            vectors.push(match k {
                1 => KronVector::from_vector(mean)?,
                2 => KronVector::from_matrix(cov)?,
                _ => KronVector::zeros(dim, k)?,
            });
        }
        Self::new(dim, vectors)
    }

    /// Covariance block `c(2)` reshaped to `d × d`.
    pub fn covariance(&self) -> Result<DMatrix<f64>> {
        self.get(2)?.to_matrix()
    }
}

impl ExpansionCoefficients {
    /// `α(0) = 1`, all higher orders zero.
    pub fn identity(dim: usize, max_order: usize) -> Result<Self> {
        check_order(max_order)?;
        let higher = (1..=max_order)
            .map(|k| KronVector::zeros(dim, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, higher)
    }
}

/// `m(k) = Σ_{p=0}^{k-1} C(k-1,p) Sym(c(k-p) ⊗ m(p))`.
pub fn moments_from_cumulants(c: &CumulantSet) -> Result<MomentSet> {
    Ok(MomentSet::from_full(c.dim(), exp_recursion(c.dim(), c.vectors())?))
}

/// `c(k) = m(k) - Σ_{p=1}^{k-1} C(k-1,p) Sym(c(k-p) ⊗ m(p))`.
pub fn cumulants_from_moments(m: &MomentSet) -> Result<CumulantSet> {
    let vectors = log_recursion(m.vectors())?;
    Ok(CumulantSet {
        dim: m.dim(),
        vectors,
    })
}

/// Orderwise difference `δ(k) = c(k) - c_ref(k)`.
pub fn cumulant_delta(c: &CumulantSet, c_ref: &CumulantSet) -> Result<CumulantDelta> {
    if c.dim() != c_ref.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: c_ref.dim(),
        });
    }
    if c.max_order() != c_ref.max_order() {
        return Err(Error::OrderMismatch {
            expected: c.max_order(),
            found: c_ref.max_order(),
        });
    }
    let vectors = c
        .vectors()
        .iter()
        .zip(c_ref.vectors())
        .map(|(a, b)| a.sub(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(CumulantDelta {
        dim: c.dim(),
        vectors,
    })
}

/// Expansion coefficients from cumulant differences; same recursion as
/// [`moments_from_cumulants`] with `(δ, α)` in place of `(c, m)`.
pub fn alpha_from_delta(delta: &CumulantDelta) -> Result<ExpansionCoefficients> {
    Ok(ExpansionCoefficients::from_full(
        delta.dim(),
        exp_recursion(delta.dim(), delta.vectors())?,
    ))
}

/// Inverse of [`alpha_from_delta`].
pub fn delta_from_alpha(alpha: &ExpansionCoefficients) -> Result<CumulantDelta> {
    let vectors = log_recursion(alpha.vectors())?;
    Ok(CumulantDelta {
        dim: alpha.dim(),
        vectors,
    })
}

impl From<CumulantSet> for CumulantDelta {
    fn from(c: CumulantSet) -> Self {
        Self {
            dim: c.dim,
            vectors: c.vectors,
        }
    }
}
