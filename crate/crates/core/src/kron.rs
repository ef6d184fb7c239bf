//! Flat-vector Kronecker tensor algebra.
//!
//! An order-`k` tensor over dimension `d` is stored as a flat array of
//! length `d^k`. The layout is row-major over the multi-index
//! `(i_1, ..., i_k)`: position `p = Σ_j i_j · d^(k-j)`, so the left factor of
//! a Kronecker product varies slowest. This is the block layout of
//! `A ⊗ B` for column vectors and is the layout used by every file format in
//! this crate.
//!
//! Commutation matrices are never built. Reordering Kronecker factors is a
//! [`ModePermutation`] acting on multi-indices.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default maximum number of entries any single tensor may hold.
pub const DEFAULT_ENTRY_BUDGET: usize = 10_000_000;

static ENTRY_BUDGET: AtomicUsize = AtomicUsize::new(DEFAULT_ENTRY_BUDGET);

/// Current per-tensor entry budget.
pub fn entry_budget() -> usize {
    ENTRY_BUDGET.load(Ordering::Relaxed)
}

/// Override the per-tensor entry budget for the whole process.
pub fn set_entry_budget(entries: usize) {
    ENTRY_BUDGET.store(entries.max(1), Ordering::Relaxed);
}

/// `d^k`, refusing anything above the entry budget.
pub fn checked_len(dim: usize, order: usize) -> Result<usize> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let budget = entry_budget();
    let mut len: u128 = 1;
    for _ in 0..order {
        len *= dim as u128;
        if len > budget as u128 {
            return Err(Error::BudgetExceeded {
                entries: (dim as u128).saturating_pow(order as u32),
                budget,
            });
        }
    }
    Ok(len as usize)
}

/// Visit every multi-index of `(dim, order)` in flat-position order.
pub(crate) fn for_each_index(dim: usize, order: usize, mut f: impl FnMut(usize, &[usize])) {
    let len = dim.pow(order as u32);
    let mut idx = vec![0usize; order];
    for pos in 0..len {
        f(pos, &idx);
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < dim {
                break;
            }
            *slot = 0;
        }
    }
}

fn encode_indices(dim: usize, indices: &[usize]) -> usize {
    indices.iter().fold(0, |acc, &i| acc * dim + i)
}

/// Coordinate address of one entry of an order-`k` tensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    dim: usize,
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(dim: usize, indices: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        Ok(Self { dim, indices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Flat position in the row-major Kronecker layout.
    pub fn encode(&self) -> usize {
        encode_indices(self.dim, &self.indices)
    }

    pub fn decode(dim: usize, order: usize, pos: usize) -> Result<Self> {
        let len = checked_len(dim, order)?;
        if pos >= len {
            return Err(Error::IndexOutOfRange { index: pos, dim: len });
        }
        let mut indices = vec![0; order];
        let mut rest = pos;
        for slot in indices.iter_mut().rev() {
            *slot = rest % dim;
            rest /= dim;
        }
        Ok(Self { dim, indices })
    }
}

/// A permutation of the `k` modes (Kronecker factors) of an order-`k` tensor.
///
/// Stored zero-based: `perm[j]` is the source mode read into output mode `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModePermutation {
    perm: Vec<usize>,
}

impl ModePermutation {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let k = perm.len();
        let mut seen = vec![false; k];
        for &p in &perm {
            if p >= k || seen[p] {
                return Err(Error::InvalidInput(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    /// Build from the one-based notation `(1, 3, 2)`.
    pub fn from_one_based(perm: &[usize]) -> Result<Self> {
        if perm.contains(&0) {
            return Err(Error::InvalidInput("one-based permutation contains 0".into()));
        }
        Self::new(perm.iter().map(|p| p - 1).collect())
    }

    pub fn identity(order: usize) -> Self {
        Self {
            perm: (0..order).collect(),
        }
    }

    /// Transposition of modes `a` and `b` (zero-based).
    pub fn swap(order: usize, a: usize, b: usize) -> Result<Self> {
        if a >= order || b >= order {
            return Err(Error::IndexOutOfRange {
                index: a.max(b),
                dim: order,
            });
        }
        let mut perm: Vec<usize> = (0..order).collect();
        perm.swap(a, b);
        Ok(Self { perm })
    }

    pub fn order(&self) -> usize {
        self.perm.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    /// `self ∘ other`, i.e. `j ↦ self(other(j))`.
    ///
    /// With this convention `permute(v, p ∘ q) == permute(permute(v, q), p)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                expected: self.order(),
                found: other.order(),
            });
        }
        Ok(Self {
            perm: other.perm.iter().map(|&j| self.perm[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (j, &p) in self.perm.iter().enumerate() {
            inv[p] = j;
        }
        Self { perm: inv }
    }

    /// All `k!` permutations in lexicographic order.
    pub fn all(order: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..order).collect();
        loop {
            out.push(Self {
                perm: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..order).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..order).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

/// An order-`k` tensor over dimension `d`, flattened to `d^k` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKronVector")]
pub struct KronVector {
    dim: usize,
    order: usize,
    data: Vec<f64>,
}

#[derive(Deserialize)]
struct RawKronVector {
    dim: usize,
    order: usize,
    data: Vec<f64>,
}

impl TryFrom<RawKronVector> for KronVector {
    type Error = Error;

    fn try_from(raw: RawKronVector) -> Result<Self> {
        KronVector::new(raw.dim, raw.order, raw.data)
    }
}

impl KronVector {
    pub fn new(dim: usize, order: usize, data: Vec<f64>) -> Result<Self> {
        let len = checked_len(dim, order)?;
        if data.len() != len {
            return Err(Error::InvalidInput(format!(
                "order-{order} tensor over dimension {dim} needs {len} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("tensor entries must be finite".into()));
        }
        Ok(Self { dim, order, data })
    }

    pub fn zeros(dim: usize, order: usize) -> Result<Self> {
        let len = checked_len(dim, order)?;
        Ok(Self {
            dim,
            order,
            data: vec![0.0; len],
        })
    }

    /// The order-0 tensor `[value]`.
    pub fn scalar(dim: usize, value: f64) -> Self {
        Self {
            dim,
            order: 0,
            data: vec![value],
        }
    }

    /// Order-1 tensor holding `x`.
    pub fn from_vector(x: &[f64]) -> Result<Self> {
        Self::new(x.len(), 1, x.to_vec())
    }

    /// Build entrywise from a function of the multi-index.
    pub fn from_fn(dim: usize, order: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let mut out = Self::zeros(dim, order)?;
        for_each_index(dim, order, |pos, idx| out.data[pos] = f(idx));
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, idx: &MultiIndex) -> Result<f64> {
        if idx.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: idx.dim(),
            });
        }
        if idx.order() != self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                found: idx.order(),
            });
        }
        Ok(self.data[idx.encode()])
    }

    /// Entry at raw indices; panics when they are out of range.
    pub fn at(&self, indices: &[usize]) -> f64 {
        assert_eq!(indices.len(), self.order);
        assert!(indices.iter().all(|&i| i < self.dim));
        self.data[encode_indices(self.dim, indices)]
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.check_same_dim(other)?;
        if self.order != other.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                found: other.order,
            });
        }
        Ok(())
    }

    /// `self ⊗ other`: `out[(I, J)] = self[I] · other[J]`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let len = checked_len(self.dim, self.order + other.order)?;
        let mut data = Vec::with_capacity(len);
        for &a in &self.data {
            data.extend(other.data.iter().map(|&b| a * b));
        }
        Ok(Self {
            dim: self.dim,
            order: self.order + other.order,
            data,
        })
    }

    /// `x^{⊗k}`. Each entry is the product of its factors taken in sorted
    /// coordinate order, so entries on the same permutation orbit are
    /// bitwise identical.
    pub fn kron_power(x: &[f64], order: usize) -> Result<Self> {
        let dim = x.len();
        let mut out = Self::zeros(dim, order)?;
        let mut sorted = vec![0usize; order];
        for_each_index(dim, order, |pos, idx| {
            sorted.copy_from_slice(idx);
            sorted.sort_unstable();
            out.data[pos] = sorted.iter().fold(1.0, |acc, &i| acc * x[i]);
        });
        Ok(out)
    }

    /// Inner product `⟨self, other⟩`.
    pub fn dot(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            order: self.order,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// `self += factor · other`.
    pub fn add_scaled(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Average over all mode permutations:
    /// `out[(i_1..i_k)] = (1/k!) Σ_σ self[(i_σ(1)..i_σ(k))]`.
    ///
    /// Every permutation of a multi-index lands on the same orbit, and each
    /// orbit member is hit equally often, so the permutation average equals
    /// the mean over the orbit. Orbits whose entries are already identical
    /// are left untouched, which makes the operation exactly idempotent.
    pub fn symmetrize(&self) -> Self {
        let (dim, order) = (self.dim, self.order);
        if order < 2 {
            return self.clone();
        }
        let len = self.data.len();
        let mut key = vec![0usize; len];
        let mut sum = vec![0.0f64; len];
        let mut count = vec![0usize; len];
        let mut uniform = vec![true; len];
        let mut first = vec![0.0f64; len];
        let mut sorted = vec![0usize; order];
        for_each_index(dim, order, |pos, idx| {
            sorted.copy_from_slice(idx);
            sorted.sort_unstable();
            let k = encode_indices(dim, &sorted);
            key[pos] = k;
            let v = self.data[pos];
            if count[k] == 0 {
                first[k] = v;
            } else if v.to_bits() != first[k].to_bits() {
                uniform[k] = false;
            }
            sum[k] += v;
            count[k] += 1;
        });
        let data = (0..len)
            .map(|pos| {
                let k = key[pos];
                if uniform[k] {
                    first[k]
                } else {
                    sum[k] / count[k] as f64
                }
            })
            .collect();
        Self { dim, order, data }
    }

    /// Largest deviation from symmetry, relative to the largest entry.
    pub fn symmetry_residual(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let sym = self.symmetrize();
        let diff = self
            .data
            .iter()
            .zip(&sym.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        diff / scale
    }

    /// `out[(i_1..i_k)] = self[(i_p(1)..i_p(k))]`.
    pub fn permute_modes(&self, p: &ModePermutation) -> Result<Self> {
        if p.order() != self.order {
            return Err(Error::OrderMismatch {
                expected: self.order,
                found: p.order(),
            });
        }
        let dim = self.dim;
        let mut src = vec![0usize; self.order];
        let mut out = vec![0.0; self.data.len()];
        for_each_index(dim, self.order, |pos, idx| {
            for (slot, &m) in src.iter_mut().zip(p.as_slice()) {
                *slot = idx[m];
            }
            out[pos] = self.data[encode_indices(dim, &src)];
        });
        Ok(Self {
            dim,
            order: self.order,
            data: out,
        })
    }

    /// Apply `M^{⊗k}` as `k` successive mode-wise products, without
    /// materializing the `d^k × d^k` matrix.
    pub fn apply_mode_matrix(&self, m: &DMatrix<f64>) -> Result<Self> {
        let d = self.dim;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows().max(m.ncols()),
            });
        }
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        for mode in 0..self.order {
            let post = d.pow((self.order - 1 - mode) as u32);
            let pre = cur.len() / (d * post);
            next.iter_mut().for_each(|v| *v = 0.0);
            for p in 0..pre {
                let base = p * d * post;
                for i in 0..d {
                    let out_row = base + i * post;
                    for j in 0..d {
                        let w = m[(i, j)];
                        if w == 0.0 {
                            continue;
                        }
                        let in_row = base + j * post;
                        for q in 0..post {
                            next[out_row + q] += w * cur[in_row + q];
                        }
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(Self {
            dim: d,
            order: self.order,
            data: cur,
        })
    }

    /// View an order-2 tensor as a `d × d` matrix (row index = first mode).
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.order != 2 {
            return Err(Error::OrderMismatch {
                expected: 2,
                found: self.order,
            });
        }
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &self.data))
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        let d = m.nrows();
        let data = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]);
        Self::new(d, 2, data.collect())
    }
}
