//! Repeated-subsampling experiment loop.
//!
//! Each repetition `t = 1..=repetitions` scores a fresh sample drawn with
//! seed `seed + t`. Scores are averaged over repetitions first and
//! sum-normalised once afterwards.
//!
//! ARI sentinels never enter the arithmetic. A feature that is redundant or
//! constant in any repetition is flagged in the report; its mean is taken over
//! the repetitions where it produced a ratio, and it is left out of the
//! normalisation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{chi2_scores, mi_scores, relief_scores, MethodId, ReliefConfig};
use crate::dataset::CategoricalDataset;
use crate::error::{Error, Result};
use crate::relevance::{ari_all, ScoreKind, REDUNDANT_SENTINEL};
use crate::synthetic::{SamplingMode, SyntheticSpec};

/// One feature's score from a single scoring pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub value: f64,
    pub kind: ScoreKind,
}

impl FeatureScore {
    pub fn plain(value: f64) -> Self {
        Self {
            value,
            kind: ScoreKind::Ratio,
        }
    }
}

/// Scores every feature of `ds` with one method. Baseline scores are always
/// of kind [`ScoreKind::Ratio`].
pub fn score_features(
    ds: &CategoricalDataset,
    method: MethodId,
    relief: &ReliefConfig,
) -> Result<Vec<FeatureScore>> {
    Ok(match method {
        MethodId::Ari => ari_all(ds)
            .into_iter()
            .map(|s| FeatureScore {
                value: s.value(),
                kind: s.kind,
            })
            .collect(),
        MethodId::Chi2 => chi2_scores(ds).into_iter().map(FeatureScore::plain).collect(),
        MethodId::Mi => mi_scores(ds).into_iter().map(FeatureScore::plain).collect(),
        MethodId::Relief => relief_scores(ds, relief)?
            .weights
            .into_iter()
            .map(FeatureScore::plain)
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSize {
    Fraction(f64),
    Absolute(usize),
}

impl SampleSize {
    /// Rows to draw from a dataset of `available` rows. Fractions round to the
    /// nearest row, with a floor of one.
    pub fn resolve(self, available: usize) -> Result<usize> {
        match self {
            SampleSize::Fraction(f) if f > 0.0 && f <= 1.0 => {
                Ok(((f * available as f64).round() as usize).clamp(1, available))
            }
            SampleSize::Fraction(f) => Err(Error::InvalidConfig(format!(
                "sample fraction {f} outside (0, 1]"
            ))),
            SampleSize::Absolute(k) if k >= 1 && k <= available => Ok(k),
            SampleSize::Absolute(k) => Err(Error::SizeOutOfRange {
                size: k,
                available,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub repetitions: usize,
    pub sample: SampleSize,
    pub seed: u64,
    pub normalize: bool,
    pub relief: ReliefConfig,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            repetitions: 10,
            sample: SampleSize::Fraction(1.0 / 3.0),
            seed: 0,
            normalize: true,
            relief: ReliefConfig::default(),
        }
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    pub fn repetition_seed(&self, t: usize) -> u64 {
        self.seed.wrapping_add(t as u64)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub zero_variance: bool,
    pub redundant: bool,
}

impl Flags {
    pub fn any(&self) -> bool {
        self.zero_variance || self.redundant
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSummary {
    /// Mean over repetitions that produced a plain score; `None` if none did.
    pub raw_mean: Option<f64>,
    /// Sum-normalised mean; `None` for flagged features or when
    /// normalisation is off.
    pub normalized: Option<f64>,
    pub flags: Flags,
    /// Fraction of repetitions in which the feature was redundant.
    pub redundant_frequency: f64,
    /// Fraction of repetitions in which the feature was constant.
    pub zero_variance_frequency: f64,
}

impl FeatureSummary {
    /// The number to display: the mean if one exists, otherwise the value of
    /// the sentinel branch that fired.
    pub fn reported_value(&self) -> f64 {
        match self.raw_mean {
            Some(v) => v,
            None if self.flags.redundant => REDUNDANT_SENTINEL,
            None => 0.0,
        }
    }

    /// Normalised score if present, else the raw mean.
    pub fn ranking_score(&self) -> Option<f64> {
        self.normalized.or(self.raw_mean)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub method: MethodId,
    pub sample_size: usize,
    pub config: ProtocolConfig,
    pub features: Vec<FeatureSummary>,
}

impl ScoreReport {
    pub fn n_flagged_redundant(&self) -> usize {
        self.features.iter().filter(|f| f.flags.redundant).count()
    }

    pub fn normalized(&self) -> Vec<Option<f64>> {
        self.features.iter().map(|f| f.normalized).collect()
    }

    pub fn raw_means(&self) -> Vec<Option<f64>> {
        self.features.iter().map(|f| f.raw_mean).collect()
    }
}

/// Combines per-repetition scores into a report. Does not reject reports in
/// which every feature is flagged.
pub fn aggregate(
    method: MethodId,
    sample_size: usize,
    config: &ProtocolConfig,
    repetitions: &[Vec<FeatureScore>],
) -> ScoreReport {
    let n_reps = repetitions.len();
    let n_features = repetitions.first().map_or(0, Vec::len);
    let mut features: Vec<FeatureSummary> = (0..n_features)
        .map(|f| {
            let mut sum = 0.0;
            let mut plain = 0usize;
            let mut redundant = 0usize;
            let mut constant = 0usize;
            for rep in repetitions {
                let s = rep[f];
                match s.kind {
                    ScoreKind::Ratio => {
                        sum += s.value;
                        plain += 1;
                    }
                    ScoreKind::Redundant => redundant += 1,
                    ScoreKind::ZeroVariance => constant += 1,
                }
            }
            FeatureSummary {
                raw_mean: (plain > 0).then(|| sum / plain as f64),
                normalized: None,
                flags: Flags {
                    zero_variance: constant > 0,
                    redundant: redundant > 0,
                },
                redundant_frequency: redundant as f64 / n_reps as f64,
                zero_variance_frequency: constant as f64 / n_reps as f64,
            }
        })
        .collect();

    if config.normalize {
        normalize(&mut features);
    }
    ScoreReport {
        method,
        sample_size,
        config: *config,
        features,
    }
}

/// Sum-normalisation over unflagged features. Negative means (possible for
/// ReliefF) count as zero so every normalised value lies in `[0, 1]`.
fn normalize(features: &mut [FeatureSummary]) {
    let mass = |f: &FeatureSummary| f.raw_mean.unwrap_or(0.0).max(0.0);
    let total: f64 = features
        .iter()
        .filter(|f| !f.flags.any())
        .map(mass)
        .sum();
    for f in features.iter_mut().filter(|f| !f.flags.any()) {
        f.normalized = Some(if total > 0.0 { mass(f) / total } else { 0.0 });
    }
}

pub fn run_protocol(
    ds: &CategoricalDataset,
    method: MethodId,
    config: &ProtocolConfig,
) -> Result<ScoreReport> {
    config.validate()?;
    let size = config.sample.resolve(ds.n_rows())?;
    let repetitions = (1..=config.repetitions)
        .into_par_iter()
        .map(|t| {
            let sample = ds.subsample(size, config.repetition_seed(t))?;
            score_features(&sample, method, &config.relief)
        })
        .collect::<Result<Vec<_>>>()?;
    let report = aggregate(method, size, config, &repetitions);
    if report.features.iter().all(|f| f.flags.any()) {
        return Err(Error::NoScorableFeature);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub spec: SyntheticSpec,
    pub universe_size: u128,
    pub sample_size: usize,
    /// `100 * sample_size / universe_size`
    pub coverage_percent: f64,
    /// Fraction of features flagged redundant in at least one repetition.
    pub redundant_fraction: f64,
    pub report: ScoreReport,
}

/// Scores samples of each requested size drawn from a synthetic universe.
///
/// With a [`SamplingMode::FullEnumeration`] template the universe is
/// materialised once and each repetition subsamples it without replacement.
/// Otherwise each repetition draws `size` rows i.i.d. with replacement. The
/// template's own seed is ignored in favour of `config.seed + t`.
pub fn dimensionality_sweep(
    template: &SyntheticSpec,
    sizes: &[usize],
    method: MethodId,
    config: &ProtocolConfig,
) -> Result<Vec<SweepEntry>> {
    if sizes.is_empty() {
        return Err(Error::InvalidConfig("no sample sizes given".into()));
    }
    config.validate()?;
    template.validate()?;
    let universe = match template.mode {
        SamplingMode::FullEnumeration => Some(template.generate()?),
        SamplingMode::Sample { .. } => None,
    };
    let universe_size = template.universe_size();

    sizes
        .iter()
        .map(|&size| {
            let repetitions = (1..=config.repetitions)
                .into_par_iter()
                .map(|t| {
                    let seed = config.repetition_seed(t);
                    let sample = match &universe {
                        Some(all) => all.subsample(size, seed)?,
                        None => template
                            .with_mode(SamplingMode::Sample { size, seed })
                            .generate()?,
                    };
                    score_features(&sample, method, &config.relief)
                })
                .collect::<Result<Vec<_>>>()?;
            let report = aggregate(method, size, config, &repetitions);
            let n = report.features.len().max(1);
            Ok(SweepEntry {
                spec: *template,
                universe_size,
                sample_size: size,
                coverage_percent: 100.0 * size as f64 / universe_size as f64,
                redundant_fraction: report.n_flagged_redundant() as f64 / n as f64,
                report,
            })
        })
        .collect()
}
