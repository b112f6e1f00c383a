//! Filter-based feature selection for categorical data.
//!
//! The core scorer is the analogical relevance index (ARI): for each feature,
//! look at every pair of observations that differ on that feature alone and
//! measure how often the label changes with it. Three classical filters
//! (chi-square, mutual information, ReliefF) are provided for comparison,
//! together with labelled synthetic benchmarks, the repeated-subsampling
//! experiment loop and a cross-validated accuracy check.
//!
//! ```
//! use ari::synthetic::{SyntheticFunction, SyntheticSpec};
//! use ari::relevance::ari_all;
//!
//! // label = x1 xor x2 over the full binary cube of dimension 10
//! let ds = SyntheticSpec::new(SyntheticFunction::G2).generate()?;
//! let scores: Vec<f64> = ari_all(&ds).iter().map(|s| s.value()).collect();
//! assert_eq!(&scores[..3], &[1.0, 1.0, 0.0]);
//! # Ok::<(), ari::Error>(())
//! ```

pub mod baselines;
pub mod dataset;
mod error;
pub mod evaluation;
pub mod protocol;
pub mod relevance;
pub mod synthetic;

pub use baselines::MethodId;
pub use dataset::{load_csv, read_csv, CategoricalDataset, CsvOptions, FeatureId};
pub use error::{Error, Result};
pub use protocol::{run_protocol, ProtocolConfig, SampleSize, ScoreReport};
pub use relevance::{ari_all, ari_score, AriScore, ScoreKind};
pub use synthetic::{SamplingMode, SyntheticFunction, SyntheticSpec};
