//! Downstream check of a feature selection: k-fold cross-validated accuracy
//! of a softmax regression trained on one-hot encodings of the selected
//! features.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{CategoricalDataset, FeatureId};
use crate::error::{Error, Result};
use crate::protocol::ScoreReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub l2_strength: f64,
    pub learning_rate: f64,
    pub max_iterations: usize,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            l2_strength: 1e-3,
            learning_rate: 0.1,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub k: usize,
    pub folds: usize,
    pub stratified: bool,
    pub classifier: LogisticConfig,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            k: 4,
            folds: 10,
            stratified: true,
            classifier: LogisticConfig::default(),
            seed: 0,
        }
    }
}

/// Up to `k` features with the largest scores, ties to the lower index.
///
/// Redundant-flagged features are dropped before ranking. After truncating to
/// `k`, features whose score is exactly zero are removed, so the result may be
/// shorter than `k`.
pub fn top_k_features(report: &ScoreReport, k: usize) -> Result<Vec<FeatureId>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be at least 1".into()));
    }
    let mut ranked: Vec<(FeatureId, f64)> = report
        .features
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.flags.redundant)
        .filter_map(|(i, f)| f.ranking_score().map(|s| (FeatureId(i), s)))
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let chosen: Vec<FeatureId> = ranked
        .into_iter()
        .take(k)
        .filter(|&(_, s)| s != 0.0)
        .map(|(f, _)| f)
        .collect();
    if chosen.is_empty() {
        return Err(Error::EmptySelection);
    }
    Ok(chosen)
}

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<f64>,
}

impl Design {
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.n_cols..(r + 1) * self.n_cols]
    }

    pub fn select_rows(&self, rows: &[usize]) -> Design {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Design {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            data,
        }
    }
}

/// One indicator column per (feature, value) pair of the selected features.
pub fn one_hot(ds: &CategoricalDataset, features: &[FeatureId]) -> Result<Design> {
    let mut offsets = Vec::with_capacity(features.len());
    let mut width = 0;
    for &f in features {
        ds.check_feature(f)?;
        offsets.push(width);
        width += ds.feature_domain(f).len();
    }
    let mut data = vec![0.0; ds.n_rows() * width];
    for r in 0..ds.n_rows() {
        for (&f, &off) in features.iter().zip(&offsets) {
            data[r * width + off + ds.cell(r, f) as usize] = 1.0;
        }
    }
    Ok(Design {
        n_rows: ds.n_rows(),
        n_cols: width,
        data,
    })
}

/// Multinomial logistic regression. Weights are `n_inputs x n_classes`,
/// row-major, followed by one bias per class in the flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxRegression {
    n_inputs: usize,
    n_classes: usize,
    params: Vec<f64>,
}

impl SoftmaxRegression {
    pub fn zeros(n_inputs: usize, n_classes: usize) -> Self {
        Self {
            n_inputs,
            n_classes,
            params: vec![0.0; (n_inputs + 1) * n_classes],
        }
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn weight(&self, input: usize, class: usize) -> f64 {
        self.params[input * self.n_classes + class]
    }

    fn bias(&self, class: usize) -> f64 {
        self.params[self.n_inputs * self.n_classes + class]
    }

    fn probabilities(&self, x: &[f64], out: &mut [f64]) {
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.bias(c)
                + x.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(i, &v)| v * self.weight(i, c))
                    .sum::<f64>();
        }
        let max = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for o in out.iter_mut() {
            *o = (*o - max).exp();
            z += *o;
        }
        for o in out.iter_mut() {
            *o /= z;
        }
    }

    /// Mean cross-entropy plus `l2 / 2 * |W|^2` (biases unpenalised), and its
    /// gradient with respect to [`Self::params`].
    pub fn loss_and_gradient(&self, x: &Design, y: &[u32], l2: f64) -> (f64, Vec<f64>) {
        let k = self.n_classes;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        let mut p = vec![0.0; k];
        let scale = 1.0 / x.n_rows as f64;
        for r in 0..x.n_rows {
            let row = x.row(r);
            self.probabilities(row, &mut p);
            let target = y[r] as usize;
            loss -= p[target].max(f64::MIN_POSITIVE).ln() * scale;
            p[target] -= 1.0;
            for (i, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    for c in 0..k {
                        grad[i * k + c] += v * p[c] * scale;
                    }
                }
            }
            for c in 0..k {
                grad[self.n_inputs * k + c] += p[c] * scale;
            }
        }
        let n_weights = self.n_inputs * k;
        for (g, w) in grad[..n_weights].iter_mut().zip(&self.params[..n_weights]) {
            *g += l2 * w;
        }
        loss += 0.5 * l2 * self.params[..n_weights].iter().map(|w| w * w).sum::<f64>();
        (loss, grad)
    }

    /// Full-batch gradient descent from the current parameters. Returns the
    /// loss before each step.
    pub fn fit(&mut self, x: &Design, y: &[u32], config: &LogisticConfig) -> Vec<f64> {
        let mut history = Vec::with_capacity(config.max_iterations);
        for _ in 0..config.max_iterations {
            let (loss, grad) = self.loss_and_gradient(x, y, config.l2_strength);
            history.push(loss);
            for (w, g) in self.params.iter_mut().zip(&grad) {
                *w -= config.learning_rate * g;
            }
        }
        history
    }

    pub fn predict(&self, x: &[f64]) -> u32 {
        let mut p = vec![0.0; self.n_classes];
        self.probabilities(x, &mut p);
        p.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (c, &v)| if v > best.1 { (c, v) } else { best })
            .0 as u32
    }
}

/// Fold index for every row. Stratified assignment shuffles each class and
/// deals it round-robin; it falls back to a plain shuffled deal (with a
/// warning) when some class has fewer members than there are folds.
pub fn fold_assignments(labels: &[u32], folds: usize, stratified: bool, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = labels.iter().map(|&y| y as usize + 1).max().unwrap_or(0);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (r, &y) in labels.iter().enumerate() {
        by_class[y as usize].push(r);
    }
    let stratify = stratified
        && by_class
            .iter()
            .all(|members| members.is_empty() || members.len() >= folds);
    if stratified && !stratify {
        log::warn!("a label class has fewer than {folds} members; using non-stratified folds");
    }
    let order: Vec<usize> = if stratify {
        by_class
            .into_iter()
            .flat_map(|mut members| {
                members.shuffle(&mut rng);
                members
            })
            .collect()
    } else {
        let mut all: Vec<usize> = (0..labels.len()).collect();
        all.shuffle(&mut rng);
        all
    };
    let mut assignment = vec![0; labels.len()];
    for (pos, r) in order.into_iter().enumerate() {
        assignment[r] = pos % folds;
    }
    assignment
}

/// Mean held-out accuracy over `config.folds` folds.
pub fn cv_accuracy(ds: &CategoricalDataset, features: &[FeatureId], config: &EvalConfig) -> Result<f64> {
    if features.is_empty() {
        return Err(Error::EmptySelection);
    }
    if config.folds < 2 || config.folds > ds.n_rows() {
        return Err(Error::InvalidConfig(format!(
            "folds must lie in 2..={}, got {}",
            ds.n_rows(),
            config.folds
        )));
    }
    let design = one_hot(ds, features)?;
    let labels = ds.labels();
    let assignment = fold_assignments(labels, config.folds, config.stratified, config.seed);
    let accuracies: Vec<f64> = (0..config.folds)
        .into_par_iter()
        .map(|fold| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..ds.n_rows()).partition(|&r| assignment[r] == fold);
            let x_train = design.select_rows(&train);
            let y_train: Vec<u32> = train.iter().map(|&r| labels[r]).collect();
            let mut model = SoftmaxRegression::zeros(design.n_cols, ds.n_labels());
            model.fit(&x_train, &y_train, &config.classifier);
            let correct = test
                .iter()
                .filter(|&&r| model.predict(design.row(r)) == labels[r])
                .count();
            correct as f64 / test.len() as f64
        })
        .collect();
    Ok(accuracies.iter().sum::<f64>() / accuracies.len() as f64)
}
