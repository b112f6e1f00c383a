//! Labelled synthetic datasets with known relevant features.
//!
//! Formulas are written 1-based (`x1` is column 0). Over a range larger than
//! two, the literal `!= 0` and `= 0` tests are kept and sums use the integer
//! category values.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticFunction {
    /// `x1 != 0 and (x2 != 0 or x3 != 0)`
    G1,
    /// `x1 != x2`
    G2,
    /// `(x1 != x2) != x3`
    G3,
    /// `sum(x1..xn) == 3`
    G4,
    /// `(x1 != 0 or x2 != 0 or x3 != 0) and (x4 != 0 or x5 == 0 or x6 != 0)`
    G5,
    /// `x1 != 0 and (x2 != 0 or x3 == 0)`
    G6,
    /// `x1 + x2 + x3 == 2`
    G7,
    /// the bit string `x1..xn`, most significant bit first, is a prime number
    G8,
}

impl SyntheticFunction {
    pub const ALL: [SyntheticFunction; 8] = [
        Self::G1,
        Self::G2,
        Self::G3,
        Self::G4,
        Self::G5,
        Self::G6,
        Self::G7,
        Self::G8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::G1 => "g1",
            Self::G2 => "g2",
            Self::G3 => "g3",
            Self::G4 => "g4",
            Self::G5 => "g5",
            Self::G6 => "g6",
            Self::G7 => "g7",
            Self::G8 => "g8",
        }
    }

    pub fn min_dimension(self) -> usize {
        match self {
            Self::G2 => 2,
            Self::G1 | Self::G3 | Self::G6 | Self::G7 => 3,
            Self::G5 => 6,
            Self::G4 | Self::G8 => 1,
        }
    }

    /// 0-based columns the label reads, when they are a strict subset.
    pub fn support(self, dimension: usize) -> Vec<usize> {
        match self {
            Self::G2 => vec![0, 1],
            Self::G1 | Self::G3 | Self::G6 | Self::G7 => vec![0, 1, 2],
            Self::G5 => (0..6).collect(),
            Self::G4 | Self::G8 => (0..dimension).collect(),
        }
    }

    fn eval(self, x: &[u32]) -> bool {
        let nz = |i: usize| x[i] != 0;
        match self {
            Self::G1 => nz(0) && (nz(1) || nz(2)),
            Self::G2 => x[0] != x[1],
            Self::G3 => (x[0] != x[1]) != (x[2] != 0),
            Self::G4 => x.iter().map(|&v| v as u64).sum::<u64>() == 3,
            Self::G5 => (nz(0) || nz(1) || nz(2)) && (nz(3) || x[4] == 0 || nz(5)),
            Self::G6 => nz(0) && (nz(1) || x[2] == 0),
            Self::G7 => x[..3].iter().map(|&v| v as u64).sum::<u64>() == 2,
            Self::G8 => is_prime(x.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)),
        }
    }
}

impl fmt::Display for SyntheticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown synthetic function `{s}`")))
    }
}

fn is_prime(v: u64) -> bool {
    if v < 2 {
        return false;
    }
    if v.is_multiple_of(2) {
        return v == 2;
    }
    let mut d = 3;
    while d * d <= v {
        if v.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    FullEnumeration,
    /// `size` i.i.d. uniform draws from the universe, with replacement.
    Sample { size: usize, seed: u64 },
}

pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub function: SyntheticFunction,
    pub dimension: usize,
    pub range: u32,
    pub mode: SamplingMode,
    pub enumeration_cap: u128,
}

impl SyntheticSpec {
    /// Binary, dimension 10, full enumeration.
    pub fn new(function: SyntheticFunction) -> Self {
        Self {
            function,
            dimension: 10,
            range: 2,
            mode: SamplingMode::FullEnumeration,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    pub fn with_dimension(mut self, dimension: usize) -> Self {
        self.dimension = dimension;
        self
    }

    pub fn with_range(mut self, range: u32) -> Self {
        self.range = range;
        self
    }

    pub fn with_mode(mut self, mode: SamplingMode) -> Self {
        self.mode = mode;
        self
    }

    /// `range ^ dimension`, saturating at `u128::MAX`.
    pub fn universe_size(&self) -> u128 {
        (0..self.dimension).fold(1u128, |acc, _| acc.saturating_mul(self.range as u128))
    }

    pub fn validate(&self) -> Result<()> {
        let function = self.function.name();
        if self.range < 2 {
            return Err(Error::RangeUnsupported {
                function,
                range: self.range,
            });
        }
        if self.dimension < self.function.min_dimension() {
            return Err(Error::DimensionTooSmall {
                function,
                required: self.function.min_dimension(),
                dimension: self.dimension,
            });
        }
        if self.function == SyntheticFunction::G8 {
            if self.range != 2 {
                return Err(Error::RangeUnsupported {
                    function,
                    range: self.range,
                });
            }
            if self.dimension > 63 {
                return Err(Error::InvalidConfig("g8 supports at most 63 bits".into()));
            }
        }
        match self.mode {
            SamplingMode::FullEnumeration if self.universe_size() > self.enumeration_cap => {
                Err(Error::EnumerationTooLarge {
                    size: self.universe_size(),
                    cap: self.enumeration_cap,
                })
            }
            SamplingMode::Sample { size: 0, .. } => {
                Err(Error::InvalidConfig("sample size must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn label(&self, x: &[u32]) -> Result<u32> {
        self.validate_function()?;
        if x.len() != self.dimension {
            return Err(Error::LengthMismatch {
                left: self.dimension,
                right: x.len(),
            });
        }
        if let Some(&bad) = x.iter().find(|&&v| v >= self.range) {
            return Err(Error::InvalidConfig(format!(
                "value {bad} outside range {}",
                self.range
            )));
        }
        Ok(self.function.eval(x) as u32)
    }

    fn validate_function(&self) -> Result<()> {
        let mut probe = *self;
        probe.mode = SamplingMode::Sample { size: 1, seed: 0 };
        probe.validate()
    }

    pub fn generate(&self) -> Result<CategoricalDataset> {
        self.validate()?;
        let rows: Vec<Vec<u32>> = match self.mode {
            SamplingMode::FullEnumeration => {
                let total = self.universe_size() as usize;
                let mut rows = Vec::with_capacity(total);
                let mut x = vec![0u32; self.dimension];
                for _ in 0..total {
                    rows.push(x.clone());
                    // odometer increment, last column fastest
                    for digit in x.iter_mut().rev() {
                        *digit += 1;
                        if *digit < self.range {
                            break;
                        }
                        *digit = 0;
                    }
                }
                rows
            }
            SamplingMode::Sample { size, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..size)
                    .map(|_| {
                        (0..self.dimension)
                            .map(|_| rng.random_range(0..self.range))
                            .collect()
                    })
                    .collect()
            }
        };
        let labels: Vec<u32> = rows.iter().map(|r| self.function.eval(r) as u32).collect();
        CategoricalDataset::from_integer_rows(&rows, &labels, self.range, 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_labels() {
        let spec = SyntheticSpec::new(SyntheticFunction::G2);
        let mut x = vec![0; 10];
        x[1] = 1;
        assert_eq!(spec.label(&x).unwrap(), 1);
        x[0] = 1;
        assert_eq!(spec.label(&x).unwrap(), 0);
    }

    #[test]
    fn g8_uses_last_column_as_lsb() {
        let spec = SyntheticSpec::new(SyntheticFunction::G8);
        let bits = |v: u32| (0..10).rev().map(|b| (v >> b) & 1).collect::<Vec<_>>();
        assert_eq!(spec.label(&bits(2)).unwrap(), 1);
        assert_eq!(spec.label(&bits(1)).unwrap(), 0);
        assert_eq!(spec.label(&bits(0)).unwrap(), 0);
        assert_eq!(spec.label(&bits(1021)).unwrap(), 1);
        for v in (4..1024).step_by(2) {
            assert_eq!(spec.label(&bits(v)).unwrap(), 0, "{v}");
        }
    }

    #[test]
    fn invalid_specs() {
        let g8 = SyntheticSpec::new(SyntheticFunction::G8).with_range(3);
        assert!(matches!(g8.generate(), Err(Error::RangeUnsupported { range: 3, .. })));
        let g5 = SyntheticSpec::new(SyntheticFunction::G5).with_dimension(5);
        assert!(matches!(g5.generate(), Err(Error::DimensionTooSmall { required: 6, .. })));
        let g6 = SyntheticSpec::new(SyntheticFunction::G6).with_dimension(2);
        assert!(matches!(g6.label(&[0, 1]), Err(Error::DimensionTooSmall { .. })));
        let big = SyntheticSpec::new(SyntheticFunction::G1).with_dimension(15).with_range(3);
        assert!(matches!(big.generate(), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn universe_sizes() {
        let s = SyntheticSpec::new(SyntheticFunction::G1);
        assert_eq!(s.universe_size(), 1024);
        assert_eq!(s.with_dimension(15).with_range(3).universe_size(), 14_348_907);
        assert_eq!(s.with_dimension(10).with_range(3).universe_size(), 59_049);
    }

    #[test]
    fn full_enumeration_row_count() {
        let ds = SyntheticSpec::new(SyntheticFunction::G2).generate().unwrap();
        assert_eq!(ds.n_rows(), 1024);
        assert_eq!(ds.n_features(), 10);
        assert_eq!(ds.labels().iter().filter(|&&y| y == 1).count(), 512);
        let ternary = SyntheticSpec::new(SyntheticFunction::G7)
            .with_dimension(4)
            .with_range(3)
            .generate()
            .unwrap();
        assert_eq!(ternary.n_rows(), 81);
    }

    #[test]
    fn sampling_is_seeded() {
        let spec = SyntheticSpec::new(SyntheticFunction::G1)
            .with_dimension(15)
            .with_range(3)
            .with_mode(SamplingMode::Sample { size: 500, seed: 7 });
        let a = spec.generate().unwrap();
        assert_eq!(a.n_rows(), 500);
        assert_eq!(a, spec.generate().unwrap());
        let other = spec.with_mode(SamplingMode::Sample { size: 500, seed: 8 });
        assert_ne!(a, other.generate().unwrap());
    }
}
