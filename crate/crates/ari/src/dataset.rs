//! Categorical datasets.
//!
//! Every cell is stored as a dense per-column code. Codes are assigned in
//! first-appearance order while reading and are only ever compared for
//! equality: arithmetic on them carries no meaning.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Index of a feature column, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureId(pub usize);

impl FeatureId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for FeatureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An immutable table of categorical observations with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalDataset {
    n_rows: usize,
    n_features: usize,
    // row-major, n_rows * n_features
    cells: Vec<u32>,
    labels: Vec<u32>,
    feature_names: Vec<String>,
    label_name: String,
    feature_domains: Vec<Vec<String>>,
    label_domain: Vec<String>,
}

impl CategoricalDataset {
    /// Builds a dataset from already-encoded cells.
    ///
    /// `cells` is row-major. Every code must index into its column's domain
    /// and every label must index into `label_domain`.
    pub fn from_codes(
        cells: Vec<u32>,
        labels: Vec<u32>,
        feature_names: Vec<String>,
        label_name: String,
        feature_domains: Vec<Vec<String>>,
        label_domain: Vec<String>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        let n_rows = labels.len();
        if n_features == 0 {
            return Err(Error::Shape("no feature columns".into()));
        }
        if n_rows == 0 {
            return Err(Error::EmptyFile);
        }
        if cells.len() != n_rows * n_features {
            return Err(Error::Shape(format!(
                "{} cells for {} rows x {} features",
                cells.len(),
                n_rows,
                n_features
            )));
        }
        if feature_domains.len() != n_features {
            return Err(Error::Shape(format!(
                "{} domains for {} features",
                feature_domains.len(),
                n_features
            )));
        }
        for (pos, &code) in cells.iter().enumerate() {
            let col = pos % n_features;
            if code as usize >= feature_domains[col].len() {
                return Err(Error::Shape(format!(
                    "row {} column {}: code {} outside domain of size {}",
                    pos / n_features,
                    col,
                    code,
                    feature_domains[col].len()
                )));
            }
        }
        if let Some(bad) = labels.iter().find(|&&l| l as usize >= label_domain.len()) {
            return Err(Error::Shape(format!(
                "label code {} outside domain of size {}",
                bad,
                label_domain.len()
            )));
        }
        Ok(Self {
            n_rows,
            n_features,
            cells,
            labels,
            feature_names,
            label_name,
            feature_domains,
            label_domain,
        })
    }

    /// Builds a dataset from integer-valued rows whose values are their own
    /// codes, e.g. synthetic data over `{0, .., range-1}`.
    pub fn from_integer_rows(
        rows: &[Vec<u32>],
        labels: &[u32],
        range: u32,
        n_labels: u32,
    ) -> Result<Self> {
        let n_features = rows.first().map(Vec::len).ok_or(Error::EmptyFile)?;
        if rows.len() != labels.len() {
            return Err(Error::Shape(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let mut cells = Vec::with_capacity(rows.len() * n_features);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::LengthMismatch {
                    left: n_features,
                    right: row.len(),
                });
            }
            if row.iter().any(|&v| v >= range) {
                return Err(Error::Shape(format!("row {r} has a value >= {range}")));
            }
            cells.extend_from_slice(row);
        }
        let domain: Vec<String> = (0..range).map(|v| v.to_string()).collect();
        Self::from_codes(
            cells,
            labels.to_vec(),
            (1..=n_features).map(|i| format!("x{i}")).collect(),
            "class".into(),
            vec![domain; n_features],
            (0..n_labels).map(|v| v.to_string()).collect(),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn feature_ids(&self) -> impl Iterator<Item = FeatureId> {
        (0..self.n_features).map(FeatureId)
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.cells[r * self.n_features..(r + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.cells.chunks_exact(self.n_features)
    }

    pub fn cell(&self, r: usize, feature: FeatureId) -> u32 {
        self.cells[r * self.n_features + feature.0]
    }

    pub fn column(&self, feature: FeatureId) -> impl Iterator<Item = u32> + '_ {
        self.cells
            .iter()
            .skip(feature.0)
            .step_by(self.n_features)
            .copied()
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, r: usize) -> u32 {
        self.labels[r]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_name(&self, feature: FeatureId) -> &str {
        &self.feature_names[feature.0]
    }

    pub fn label_name(&self) -> &str {
        &self.label_name
    }

    pub fn feature_domain(&self, feature: FeatureId) -> &[String] {
        &self.feature_domains[feature.0]
    }

    pub fn label_domain(&self) -> &[String] {
        &self.label_domain
    }

    pub fn n_labels(&self) -> usize {
        self.label_domain.len()
    }

    /// Raw value of a cell, i.e. `decode(code)`.
    pub fn raw_value(&self, r: usize, feature: FeatureId) -> &str {
        &self.feature_domains[feature.0][self.cell(r, feature) as usize]
    }

    pub fn raw_label(&self, r: usize) -> &str {
        &self.label_domain[self.labels[r] as usize]
    }

    pub fn check_feature(&self, feature: FeatureId) -> Result<()> {
        if feature.0 < self.n_features {
            Ok(())
        } else {
            Err(Error::FeatureOutOfRange {
                index: feature.0,
                n_features: self.n_features,
            })
        }
    }

    /// Distinct codes taken by `feature` on this dataset. Never empty.
    pub fn val_set(&self, feature: FeatureId) -> Result<BTreeSet<u32>> {
        self.check_feature(feature)?;
        Ok(self.column(feature).collect())
    }

    pub fn is_zero_variance(&self, feature: FeatureId) -> bool {
        let mut col = self.column(feature);
        let first = col.next();
        col.all(|v| Some(v) == first)
    }

    /// A new dataset holding the given rows, in the given order. Domains are
    /// inherited so codes remain comparable with the parent.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::SizeOutOfRange {
                size: 0,
                available: self.n_rows,
            });
        }
        let mut cells = Vec::with_capacity(indices.len() * self.n_features);
        let mut labels = Vec::with_capacity(indices.len());
        for &r in indices {
            if r >= self.n_rows {
                return Err(Error::Shape(format!(
                    "row index {r} out of range for {} rows",
                    self.n_rows
                )));
            }
            cells.extend_from_slice(self.row(r));
            labels.push(self.labels[r]);
        }
        Ok(Self {
            n_rows: indices.len(),
            n_features: self.n_features,
            cells,
            labels,
            feature_names: self.feature_names.clone(),
            label_name: self.label_name.clone(),
            feature_domains: self.feature_domains.clone(),
            label_domain: self.label_domain.clone(),
        })
    }

    /// A new dataset keeping only the given feature columns, in the given order.
    pub fn select_features(&self, features: &[FeatureId]) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Shape("no features selected".into()));
        }
        for &f in features {
            self.check_feature(f)?;
        }
        let mut cells = Vec::with_capacity(self.n_rows * features.len());
        for r in 0..self.n_rows {
            cells.extend(features.iter().map(|&f| self.cell(r, f)));
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_features: features.len(),
            cells,
            labels: self.labels.clone(),
            feature_names: features
                .iter()
                .map(|&f| self.feature_names[f.0].clone())
                .collect(),
            label_name: self.label_name.clone(),
            feature_domains: features
                .iter()
                .map(|&f| self.feature_domains[f.0].clone())
                .collect(),
            label_domain: self.label_domain.clone(),
        })
    }

    /// Row indices of a uniform sample without replacement, deterministic in
    /// `seed`.
    pub fn subsample_indices(&self, size: usize, seed: u64) -> Result<Vec<usize>> {
        if size == 0 || size > self.n_rows {
            return Err(Error::SizeOutOfRange {
                size,
                available: self.n_rows,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(rand::seq::index::sample(&mut rng, self.n_rows, size).into_vec())
    }

    pub fn subsample(&self, size: usize, seed: u64) -> Result<Self> {
        self.select_rows(&self.subsample_indices(size, seed)?)
    }

    /// Writes the dataset as CSV: header row, then one row per instance with
    /// the label in the last column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(
            self.feature_names
                .iter()
                .map(String::as_str)
                .chain(std::iter::once(self.label_name.as_str())),
        )?;
        for r in 0..self.n_rows {
            out.write_record(
                self.feature_ids()
                    .map(|f| self.raw_value(r, f))
                    .chain(std::iter::once(self.raw_label(r))),
            )?;
        }
        out.flush().map_err(|source| Error::Io {
            path: "<csv writer>".into(),
            source,
        })?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

#[derive(Debug, Clone)]
pub struct CsvOptions {
    pub delimiter: u8,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self { delimiter: b',' }
    }
}

/// Interns raw strings into dense codes in first-appearance order.
#[derive(Default)]
struct Interner {
    codes: HashMap<String, u32>,
    values: Vec<String>,
}

impl Interner {
    fn code(&mut self, raw: &str) -> u32 {
        if let Some(&c) = self.codes.get(raw) {
            return c;
        }
        let c = self.values.len() as u32;
        self.codes.insert(raw.to_owned(), c);
        self.values.push(raw.to_owned());
        c
    }
}

/// Reads a header-first CSV whose last column is the label.
pub fn read_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<CategoricalDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .delimiter(options.delimiter)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyFile);
    }
    let width = header.len();
    if width < 2 {
        return Err(Error::TooFewColumns(width));
    }
    let n_features = width - 1;
    let mut feature_interners: Vec<Interner> = (0..n_features).map(|_| Interner::default()).collect();
    let mut label_interner = Interner::default();
    let mut cells = Vec::new();
    let mut labels = Vec::new();

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(Error::RaggedRow {
                line,
                expected: width,
                found: record.len(),
            });
        }
        for (col, raw) in record.iter().enumerate() {
            if raw.is_empty() {
                return Err(Error::MissingValue {
                    line,
                    column: header[col].to_owned(),
                });
            }
            if col < n_features {
                cells.push(feature_interners[col].code(raw));
            } else {
                labels.push(label_interner.code(raw));
            }
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyFile);
    }
    CategoricalDataset::from_codes(
        cells,
        labels,
        header.iter().take(n_features).map(str::to_owned).collect(),
        header[n_features].to_owned(),
        feature_interners.into_iter().map(|i| i.values).collect(),
        label_interner.values,
    )
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<CategoricalDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(std::io::BufReader::new(file), options)
}
