//! Explicit moment-in-terms-of-cumulants tables.
//!
//! Row `k` lists the terms of `m(k)` as `coefficient · c(p_1) ⊗ ... ⊗ c(p_r)`
//! with the parts in decreasing order. Each product is symmetrized when the
//! table is evaluated. The committed table in `data/` was produced by
//! [`MomentTable::enumerate`], which counts set partitions of `{1..k}` by
//! their block-size profile.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cumulants::{check_order, CumulantSet};
use crate::error::{Error, Result};
use crate::kron::KronVector;

const EMBEDDED: &str = include_str!("../data/moment_cumulant_table.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableTerm {
    pub coefficient: u64,
    /// Cumulant orders, largest first.
    pub parts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub order: usize,
    pub terms: Vec<TableTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentTable {
    pub rows: Vec<TableRow>,
}

impl MomentTable {
    /// The committed table (orders 1 to 6).
    pub fn embedded() -> Self {
        serde_json::from_str(EMBEDDED).expect("embedded moment table is valid JSON")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: Self = serde_json::from_str(text)?;
        for row in &table.rows {
            for term in &row.terms {
                if term.parts.iter().sum::<usize>() != row.order {
                    return Err(Error::InvalidInput(format!(
                        "term {:?} in row {} has parts summing to {}",
                        term.parts,
                        row.order,
                        term.parts.iter().sum::<usize>()
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn max_order(&self) -> usize {
        self.rows.iter().map(|r| r.order).max().unwrap_or(0)
    }

    pub fn row(&self, order: usize) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.order == order)
    }

    /// Build the table by enumerating every set partition of `{1..k}`.
    pub fn enumerate(max_order: usize) -> Result<Self> {
        check_order(max_order)?;
        let rows = (1..=max_order)
            .map(|k| {
                let mut counts: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
                // restricted growth strings enumerate set partitions
                let mut rgs = vec![0usize; k];
                loop {
                    let blocks = rgs.iter().max().map_or(0, |m| m + 1);
                    let mut sizes = vec![0usize; blocks];
                    for &b in &rgs {
                        sizes[b] += 1;
                    }
                    sizes.sort_unstable_by(|a, b| b.cmp(a));
                    *counts.entry(sizes).or_default() += 1;
                    if !next_rgs(&mut rgs) {
                        break;
                    }
                }
                let mut terms: Vec<TableTerm> = counts
                    .into_iter()
                    .map(|(parts, coefficient)| TableTerm { coefficient, parts })
                    .collect();
                // largest leading part first, then lexicographically descending
                terms.sort_by(|a, b| b.parts.cmp(&a.parts));
                TableRow { order: k, terms }
            })
            .collect();
        Ok(Self { rows })
    }

    /// Evaluate row `order` on a cumulant set.
    pub fn evaluate(&self, c: &CumulantSet, order: usize) -> Result<KronVector> {
        let row = self
            .row(order)
            .ok_or_else(|| Error::InvalidInput(format!("table has no row for order {order}")))?;
        let mut acc = KronVector::zeros(c.dim(), order)?;
        for term in &row.terms {
            let mut prod = KronVector::scalar(c.dim(), 1.0);
            for &p in &term.parts {
                prod = prod.kron(c.get(p)?)?;
            }
            if prod.order() != order {
                return Err(Error::OrderMismatch {
                    expected: order,
                    found: prod.order(),
                });
            }
            acc.add_scaled(term.coefficient as f64, &prod.symmetrize())?;
        }
        Ok(acc)
    }
}

fn next_rgs(rgs: &mut [usize]) -> bool {
    let n = rgs.len();
    for i in (1..n).rev() {
        let prefix_max = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= prefix_max {
            rgs[i] += 1;
            for slot in &mut rgs[i + 1..] {
                *slot = 0;
            }
            return true;
        }
    }
    false
}
