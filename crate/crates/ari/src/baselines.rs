//! Comparison scorers: chi-square, mutual information and ReliefF.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CategoricalDataset, FeatureId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodId {
    Ari,
    Chi2,
    Mi,
    Relief,
}

impl MethodId {
    pub const ALL: [MethodId; 4] = [MethodId::Ari, MethodId::Chi2, MethodId::Mi, MethodId::Relief];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::Ari => "ari",
            MethodId::Chi2 => "chi2",
            MethodId::Mi => "mi",
            MethodId::Relief => "relief",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ari" => Ok(MethodId::Ari),
            "chi2" | "chi-square" | "chisq" => Ok(MethodId::Chi2),
            "mi" | "mutual-information" => Ok(MethodId::Mi),
            "relief" | "relieff" => Ok(MethodId::Relief),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Feature value x label counts.
fn contingency(ds: &CategoricalDataset, feature: FeatureId) -> (Vec<f64>, usize, usize) {
    let rows = ds.feature_domain(feature).len();
    let cols = ds.n_labels();
    let mut table = vec![0.0; rows * cols];
    for (v, &y) in ds.column(feature).zip(ds.labels()) {
        table[v as usize * cols + y as usize] += 1.0;
    }
    (table, rows, cols)
}

fn marginals(table: &[f64], rows: usize, cols: usize) -> (Vec<f64>, Vec<f64>) {
    let mut row_sums = vec![0.0; rows];
    let mut col_sums = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            row_sums[r] += table[r * cols + c];
            col_sums[c] += table[r * cols + c];
        }
    }
    (row_sums, col_sums)
}

/// Pearson chi-square statistic of the feature x label table, one per feature.
pub fn chi2_scores(ds: &CategoricalDataset) -> Vec<f64> {
    let total = ds.n_rows() as f64;
    ds.feature_ids()
        .map(|f| {
            let (table, rows, cols) = contingency(ds, f);
            let (row_sums, col_sums) = marginals(&table, rows, cols);
            let mut stat = 0.0;
            for r in 0..rows {
                for c in 0..cols {
                    let expected = row_sums[r] * col_sums[c] / total;
                    if expected > 0.0 {
                        let d = table[r * cols + c] - expected;
                        stat += d * d / expected;
                    }
                }
            }
            stat
        })
        .collect()
}

/// Empirical mutual information between each feature and the label, in nats.
pub fn mi_scores(ds: &CategoricalDataset) -> Vec<f64> {
    let total = ds.n_rows() as f64;
    ds.feature_ids()
        .map(|f| {
            let (table, rows, cols) = contingency(ds, f);
            let (row_sums, col_sums) = marginals(&table, rows, cols);
            let mut mi = 0.0;
            for r in 0..rows {
                for c in 0..cols {
                    let joint = table[r * cols + c];
                    if joint > 0.0 {
                        mi += joint / total * (joint * total / (row_sums[r] * col_sums[c])).ln();
                    }
                }
            }
            // rounding can leave a tiny negative for independent columns
            mi.max(0.0)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliefConfig {
    pub k_neighbors: usize,
}

impl Default for ReliefConfig {
    fn default() -> Self {
        Self { k_neighbors: 10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReliefOutcome {
    pub weights: Vec<f64>,
    /// Number of anchors for which fewer than `k` hits or misses existed.
    pub clamped_anchors: usize,
}

/// Multi-class ReliefF over all instances with the Hamming metric.
///
/// Each anchor pulls `k` nearest hits and, for every other class, `k` nearest
/// misses weighted by that class's prior renormalised over the non-anchor
/// classes. Ties in distance go to the lower row index. When a class has fewer
/// than `k` candidates all of them are used and the anchor is counted in
/// `clamped_anchors`.
pub fn relief_scores(ds: &CategoricalDataset, config: &ReliefConfig) -> Result<ReliefOutcome> {
    let m = ds.n_rows();
    let n = ds.n_features();
    if m < 2 {
        return Err(Error::InvalidConfig(format!("ReliefF needs at least 2 rows, got {m}")));
    }
    if config.k_neighbors == 0 {
        return Err(Error::InvalidConfig("k_neighbors must be at least 1".into()));
    }
    let k = config.k_neighbors;
    let n_classes = ds.n_labels();
    let mut prior = vec![0.0; n_classes];
    for &y in ds.labels() {
        prior[y as usize] += 1.0 / m as f64;
    }

    let contributions: Vec<(Vec<f64>, bool)> = (0..m)
        .into_par_iter()
        .map(|anchor| {
            let row = ds.row(anchor);
            let own = ds.label(anchor) as usize;
            let mut by_class: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_classes];
            for other in (0..m).filter(|&o| o != anchor) {
                let d = crate::relevance::hamming(row, ds.row(other));
                by_class[ds.label(other) as usize].push((d, other));
            }
            let mut delta = vec![0.0; n];
            let mut clamped = false;
            let miss_mass = 1.0 - prior[own];
            for (class, candidates) in by_class.iter_mut().enumerate() {
                if candidates.is_empty() {
                    if class == own {
                        clamped = true;
                    }
                    continue;
                }
                let take = k.min(candidates.len());
                if take < k {
                    clamped = true;
                }
                candidates.select_nth_unstable(take - 1);
                candidates[..take].sort_unstable();
                let sign_weight = if class == own {
                    -1.0
                } else if miss_mass > 0.0 {
                    prior[class] / miss_mass
                } else {
                    0.0
                };
                let scale = sign_weight / (m as f64 * take as f64);
                for &(_, other) in &candidates[..take] {
                    for (f, d) in delta.iter_mut().enumerate() {
                        if row[f] != ds.cell(other, FeatureId(f)) {
                            *d += scale;
                        }
                    }
                }
            }
            (delta, clamped)
        })
        .collect();

    let mut weights = vec![0.0; n];
    let mut clamped_anchors = 0;
    for (delta, clamped) in contributions {
        for (w, d) in weights.iter_mut().zip(delta) {
            *w += d;
        }
        clamped_anchors += clamped as usize;
    }
    if clamped_anchors > 0 {
        log::warn!(
            "ReliefF: {clamped_anchors} of {m} anchors had fewer than k={k} hits or misses; used all available"
        );
    }
    Ok(ReliefOutcome {
        weights,
        clamped_anchors,
    })
}
