//! Agreement sets, Hamming-1 pair mining and the analogical relevance index.
//!
//! For a feature `i`, `Dif(i)` is the set of instance pairs that disagree on
//! `i` and nowhere else. The index is the fraction of those pairs whose labels
//! differ. Two situations leave `Dif(i)` empty: the feature is constant on the
//! sample, or every change of `i` comes with a change of some other feature.
//! The second case is reported as a redundancy sentinel rather than a number.
//!
//! Pairs are found by hashing each row on all of its columns except `i`: two
//! rows land in the same bucket exactly when they agree everywhere but `i`, so
//! `Dif(i)` is the set of cross-value pairs inside each bucket. This is linear
//! in the number of rows per feature. A quadratic reference enumeration lives
//! in [`naive`].

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CategoricalDataset, FeatureId};
use crate::error::{Error, Result};

/// Partition of the feature indices of two instances into agreeing and
/// disagreeing positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSets {
    pub agreement: Vec<FeatureId>,
    pub disagreement: Vec<FeatureId>,
}

impl PairSets {
    pub fn hamming(&self) -> usize {
        self.disagreement.len()
    }
}

pub fn pair_sets(a: &[u32], b: &[u32]) -> Result<PairSets> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let (agreement, disagreement) = (0..a.len())
        .map(FeatureId)
        .partition(|f| a[f.0] == b[f.0]);
    Ok(PairSets {
        agreement,
        disagreement,
    })
}

pub fn hamming(a: &[u32], b: &[u32]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// All unordered row pairs at Hamming distance 1 that differ on `feature`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifIndex {
    pub feature: FeatureId,
    /// `(a, b)` with `a < b`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub label_equal_count: usize,
}

impl DifIndex {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn label_differ_count(&self) -> usize {
        self.pairs.len() - self.label_equal_count
    }
}

/// A row viewed without one of its columns.
#[derive(Clone, Copy)]
struct MaskedRow<'a> {
    row: &'a [u32],
    skip: usize,
}

impl MaskedRow<'_> {
    fn head(&self) -> &[u32] {
        &self.row[..self.skip]
    }

    fn tail(&self) -> &[u32] {
        &self.row[self.skip + 1..]
    }
}

impl PartialEq for MaskedRow<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.head() == other.head() && self.tail() == other.tail()
    }
}

impl Eq for MaskedRow<'_> {}

impl Hash for MaskedRow<'_> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.head().hash(state);
        self.tail().hash(state);
    }
}

/// Groups rows into buckets of rows that agree on every column except
/// `feature`. Buckets are returned in first-seen order; singletons are dropped.
fn masked_buckets(ds: &CategoricalDataset, feature: FeatureId) -> Vec<Vec<usize>> {
    let mut slot: HashMap<MaskedRow<'_>, usize> = HashMap::with_capacity(ds.n_rows());
    let mut buckets: Vec<Vec<usize>> = Vec::new();
    for r in 0..ds.n_rows() {
        let key = MaskedRow {
            row: ds.row(r),
            skip: feature.0,
        };
        let next = buckets.len();
        let b = *slot.entry(key).or_insert(next);
        if b == next {
            buckets.push(Vec::new());
        }
        buckets[b].push(r);
    }
    buckets.retain(|b| b.len() > 1);
    buckets
}

pub fn dif_index(ds: &CategoricalDataset, feature: FeatureId) -> Result<DifIndex> {
    ds.check_feature(feature)?;
    let mut pairs = Vec::new();
    let mut label_equal_count = 0;
    for bucket in masked_buckets(ds, feature) {
        for (k, &a) in bucket.iter().enumerate() {
            for &b in &bucket[k + 1..] {
                if ds.cell(a, feature) != ds.cell(b, feature) {
                    pairs.push((a, b));
                    if ds.label(a) == ds.label(b) {
                        label_equal_count += 1;
                    }
                }
            }
        }
    }
    pairs.sort_unstable();
    Ok(DifIndex {
        feature,
        pairs,
        label_equal_count,
    })
}

/// `(|Dif(i)|, |Dif_Eq(i)|)` without materialising the pairs.
pub fn dif_counts(ds: &CategoricalDataset, feature: FeatureId) -> Result<(u64, u64)> {
    ds.check_feature(feature)?;
    let pairs_of = |c: u64| c * c.saturating_sub(1) / 2;
    let mut dif = 0u64;
    let mut dif_eq = 0u64;
    let mut keyed: Vec<(u32, u32)> = Vec::new();
    for bucket in masked_buckets(ds, feature) {
        // (value, label) sorted so equal values and equal (value, label) runs are contiguous
        keyed.clear();
        keyed.extend(bucket.iter().map(|&r| (ds.cell(r, feature), ds.label(r))));
        keyed.sort_unstable();
        let total = keyed.len() as u64;
        let mut same_value = 0u64;
        let mut same_value_label = 0u64;
        let mut per_label: HashMap<u32, u64> = HashMap::new();
        for run in keyed.chunk_by(|x, y| x.0 == y.0) {
            same_value += pairs_of(run.len() as u64);
            for sub in run.chunk_by(|x, y| x.1 == y.1) {
                same_value_label += pairs_of(sub.len() as u64);
                *per_label.entry(sub[0].1).or_default() += sub.len() as u64;
            }
        }
        let same_label: u64 = per_label.values().map(|&c| pairs_of(c)).sum();
        dif += pairs_of(total) - same_value;
        dif_eq += same_label - same_value_label;
    }
    Ok((dif, dif_eq))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Ratio,
    ZeroVariance,
    Redundant,
}

/// Value the index takes on the redundancy branch.
pub const REDUNDANT_SENTINEL: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AriScore {
    pub kind: ScoreKind,
    /// Fraction of label-changing pairs. Only meaningful for [`ScoreKind::Ratio`];
    /// 0 on the other branches.
    pub ratio: f64,
    pub dif_pairs: u64,
    pub dif_eq_pairs: u64,
}

impl AriScore {
    pub fn zero_variance() -> Self {
        Self {
            kind: ScoreKind::ZeroVariance,
            ratio: 0.0,
            dif_pairs: 0,
            dif_eq_pairs: 0,
        }
    }

    pub fn from_counts(dif_pairs: u64, dif_eq_pairs: u64) -> Self {
        if dif_pairs == 0 {
            Self {
                kind: ScoreKind::Redundant,
                ratio: 0.0,
                dif_pairs,
                dif_eq_pairs,
            }
        } else {
            Self {
                kind: ScoreKind::Ratio,
                ratio: (dif_pairs - dif_eq_pairs) as f64 / dif_pairs as f64,
                dif_pairs,
                dif_eq_pairs,
            }
        }
    }

    /// The reported number: 0, the sentinel 2, or the ratio.
    pub fn value(&self) -> f64 {
        match self.kind {
            ScoreKind::Ratio => self.ratio,
            ScoreKind::ZeroVariance => 0.0,
            ScoreKind::Redundant => REDUNDANT_SENTINEL,
        }
    }

    pub fn is_ratio(&self) -> bool {
        self.kind == ScoreKind::Ratio
    }
}

pub fn ari_score(ds: &CategoricalDataset, feature: FeatureId) -> Result<AriScore> {
    ds.check_feature(feature)?;
    if ds.is_zero_variance(feature) {
        return Ok(AriScore::zero_variance());
    }
    let (dif, dif_eq) = dif_counts(ds, feature)?;
    Ok(AriScore::from_counts(dif, dif_eq))
}

pub fn ari_all(ds: &CategoricalDataset) -> Vec<AriScore> {
    (0..ds.n_features())
        .into_par_iter()
        .map(|i| ari_score(ds, FeatureId(i)).expect("feature index in range"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relevance {
    Relevant,
    Irrelevant,
    /// `Dif(i)` is empty, so neither notion applies.
    Undetermined,
}

pub fn classify_relevance(ds: &CategoricalDataset, feature: FeatureId) -> Result<Relevance> {
    let (dif, dif_eq) = dif_counts(ds, feature)?;
    Ok(if dif == 0 {
        Relevance::Undetermined
    } else if dif_eq < dif {
        Relevance::Relevant
    } else {
        Relevance::Irrelevant
    })
}

/// Quadratic reference enumeration, kept as an oracle for the hashed path.
pub mod naive {
    use super::*;

    pub fn dif_index(ds: &CategoricalDataset, feature: FeatureId) -> Result<DifIndex> {
        ds.check_feature(feature)?;
        let mut pairs = Vec::new();
        let mut label_equal_count = 0;
        for a in 0..ds.n_rows() {
            for b in a + 1..ds.n_rows() {
                let sets = pair_sets(ds.row(a), ds.row(b))?;
                if sets.disagreement == [feature] {
                    pairs.push((a, b));
                    if ds.label(a) == ds.label(b) {
                        label_equal_count += 1;
                    }
                }
            }
        }
        Ok(DifIndex {
            feature,
            pairs,
            label_equal_count,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{read_csv, CsvOptions};

    fn cube(n: usize, label: impl Fn(&[u32]) -> u32) -> CategoricalDataset {
        let rows: Vec<Vec<u32>> = (0..1u32 << n)
            .map(|v| (0..n).map(|b| (v >> (n - 1 - b)) & 1).collect())
            .collect();
        let labels: Vec<u32> = rows.iter().map(|r| label(r)).collect();
        CategoricalDataset::from_integer_rows(&rows, &labels, 2, 2).unwrap()
    }

    #[test]
    fn worked_example_pair_sets() {
        let ds = read_csv(
            "a,b,c,d,e,y\nA,yellow,45,male,0,p\nA,red,51,female,0,q\n".as_bytes(),
            &CsvOptions::default(),
        )
        .unwrap();
        let sets = pair_sets(ds.row(0), ds.row(1)).unwrap();
        let one_based = |v: &[FeatureId]| v.iter().map(|f| f.0 + 1).collect::<Vec<_>>();
        assert_eq!(one_based(&sets.agreement), [1, 5]);
        assert_eq!(one_based(&sets.disagreement), [2, 3, 4]);
        assert_eq!(sets.hamming(), 3);
    }

    #[test]
    fn pair_sets_extremes() {
        let s = pair_sets(&[1, 2, 3], &[1, 2, 3]).unwrap();
        assert_eq!(s.agreement.len(), 3);
        assert_eq!(s.hamming(), 0);
        let s = pair_sets(&[1, 2, 3], &[0, 0, 0]).unwrap();
        assert_eq!(s.hamming(), 3);
        assert!(matches!(
            pair_sets(&[1], &[1, 2]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn cube_has_half_the_rows_as_pairs() {
        for n in 1..=10 {
            let ds = cube(n, |_| 0);
            for f in ds.feature_ids() {
                let idx = dif_index(&ds, f).unwrap();
                assert_eq!(idx.len(), 1 << (n - 1));
                assert_eq!(idx.label_equal_count, idx.len());
            }
        }
    }

    #[test]
    fn cube_pairs_match_naive_enumeration() {
        let ds = cube(6, |r| r[0] ^ r[2]);
        for f in ds.feature_ids() {
            assert_eq!(dif_index(&ds, f).unwrap(), naive::dif_index(&ds, f).unwrap());
        }
    }

    #[test]
    fn single_row_has_no_pairs() {
        let ds = CategoricalDataset::from_integer_rows(&[vec![0, 1]], &[0], 2, 2).unwrap();
        assert!(dif_index(&ds, FeatureId(0)).unwrap().is_empty());
        assert_eq!(
            classify_relevance(&ds, FeatureId(1)).unwrap(),
            Relevance::Undetermined
        );
    }

    #[test]
    fn xor_scores_on_full_cube() {
        let ds = cube(10, |r| (r[0] != r[1]) as u32);
        let scores = ari_all(&ds);
        assert_eq!(scores.len(), 10);
        assert_eq!(scores[0].value(), 1.0);
        assert_eq!(scores[1].value(), 1.0);
        assert!(scores[2..].iter().all(|s| s.is_ratio() && s.value() == 0.0));
        assert_eq!(classify_relevance(&ds, FeatureId(0)).unwrap(), Relevance::Relevant);
        assert_eq!(classify_relevance(&ds, FeatureId(2)).unwrap(), Relevance::Irrelevant);
    }

    #[test]
    fn constant_column_is_zero_variance() {
        let ds = CategoricalDataset::from_integer_rows(
            &[vec![1, 0], vec![1, 1], vec![1, 0]],
            &[0, 1, 0],
            2,
            2,
        )
        .unwrap();
        let s = ari_score(&ds, FeatureId(0)).unwrap();
        assert_eq!(s.kind, ScoreKind::ZeroVariance);
        assert_eq!(s.value(), 0.0);
        assert_eq!(ari_score(&ds, FeatureId(1)).unwrap().value(), 1.0);
    }

    #[test]
    fn duplicated_column_is_redundant() {
        let rows = vec![vec![0, 0, 1], vec![1, 1, 1], vec![0, 0, 0], vec![1, 1, 0]];
        let ds = CategoricalDataset::from_integer_rows(&rows, &[0, 1, 0, 1], 2, 2).unwrap();
        for f in [FeatureId(0), FeatureId(1)] {
            assert!(dif_index(&ds, f).unwrap().is_empty());
            let s = ari_score(&ds, f).unwrap();
            assert_eq!(s.kind, ScoreKind::Redundant);
            assert_eq!(s.value(), REDUNDANT_SENTINEL);
        }
        assert_eq!(ari_score(&ds, FeatureId(2)).unwrap().kind, ScoreKind::Ratio);
    }

    #[test]
    fn multi_value_bucket_counts_every_cross_pair() {
        // one bucket (second column constant), values 0,1,2,2 at the first column
        let rows = vec![vec![0, 0], vec![1, 0], vec![2, 0], vec![2, 0]];
        let ds = CategoricalDataset::from_integer_rows(&rows, &[0, 0, 1, 0], 3, 2).unwrap();
        let idx = dif_index(&ds, FeatureId(0)).unwrap();
        // 4*3/2 pairs minus the single same-value pair
        assert_eq!(idx.len(), 5);
        assert_eq!(idx, naive::dif_index(&ds, FeatureId(0)).unwrap());
        let (dif, dif_eq) = dif_counts(&ds, FeatureId(0)).unwrap();
        assert_eq!(dif as usize, idx.len());
        assert_eq!(dif_eq as usize, idx.label_equal_count);
    }
}
