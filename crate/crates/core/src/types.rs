//! Domain types shared by every certification routine.
//!
//! Scores and predictions follow one convention throughout the crate: the
//! predicted class is the smallest index attaining the maximum score. A
//! target class "wins" against the incumbent when it strictly exceeds the
//! incumbent's score if it has the larger index, and when it ties or exceeds
//! it if it has the smaller index.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CertError, Result};

/// A count of label flips, possibly unbounded.
///
/// `Infinite` marks a target that no number of flips can reach. It orders
/// after every finite count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flips {
    Finite(u64),
    Infinite,
}

impl Flips {
    pub const ZERO: Flips = Flips::Finite(0);

    pub fn finite(self) -> Option<u64> {
        match self {
            Flips::Finite(k) => Some(k),
            Flips::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Flips::Infinite)
    }

    /// One less than `self`, floored at zero. Turns a minimum attack size
    /// into a certified radius.
    pub fn radius_from_attack(self) -> Flips {
        match self {
            Flips::Finite(k) => Flips::Finite(k.saturating_sub(1)),
            Flips::Infinite => Flips::Infinite,
        }
    }

    pub fn saturating_add(self, other: Flips) -> Flips {
        match (self, other) {
            (Flips::Finite(a), Flips::Finite(b)) => Flips::Finite(a.saturating_add(b)),
            _ => Flips::Infinite,
        }
    }

    /// Whether a certificate of this size covers an adversary with `budget` flips.
    pub fn covers(self, budget: u64) -> bool {
        match self {
            Flips::Finite(k) => k >= budget,
            Flips::Infinite => true,
        }
    }
}

impl From<u64> for Flips {
    fn from(k: u64) -> Self {
        Flips::Finite(k)
    }
}

impl fmt::Display for Flips {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flips::Finite(k) => write!(f, "{k}"),
            Flips::Infinite => f.write_str("inf"),
        }
    }
}

// Serialized as a JSON integer, or the string "inf".
impl Serialize for Flips {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Flips::Finite(k) => serializer.serialize_u64(*k),
            Flips::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Flips {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Count(u64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Count(k) => Ok(Flips::Finite(k)),
            Repr::Text(s) if s == "inf" => Ok(Flips::Infinite),
            Repr::Text(s) => Err(serde::de::Error::custom(format!(
                "expected integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Training or test data: a row-major feature matrix with integer labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    n: usize,
    d: usize,
    num_classes: usize,
}

impl Dataset {
    pub fn new(features: Vec<f64>, n: usize, d: usize, labels: Vec<i64>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(CertError::TooFewClasses(num_classes));
        }
        if n == 0 || d == 0 {
            return Err(CertError::InvalidConfig(format!(
                "dataset needs n >= 1 and d >= 1 (got n={n}, d={d})"
            )));
        }
        if features.len() != n * d {
            return Err(CertError::SizeMismatch {
                what: "features",
                expected: n * d,
                found: features.len(),
            });
        }
        if labels.len() != n {
            return Err(CertError::SizeMismatch {
                what: "labels",
                expected: n,
                found: labels.len(),
            });
        }
        if features.iter().any(|x| !x.is_finite()) {
            return Err(CertError::NonFinite("features"));
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(index, label)| {
                if label < 0 || label as usize >= num_classes {
                    Err(CertError::LabelOutOfRange {
                        index,
                        label,
                        num_classes,
                    })
                } else {
                    Ok(label as usize)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Dataset {
            features,
            labels,
            n,
            d,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d..(i + 1) * self.d]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Copy of the dataset with the given labels swapped in.
    pub fn with_labels(&self, labels: Vec<usize>) -> Result<Self> {
        Dataset::new(
            self.features.clone(),
            self.n,
            self.d,
            labels.into_iter().map(|l| l as i64).collect(),
            self.num_classes,
        )
    }
}

/// One-hot training labels, stored as one class index per sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneHotLabels {
    classes: Vec<usize>,
    num_classes: usize,
}

impl OneHotLabels {
    pub fn from_classes(classes: Vec<usize>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(CertError::TooFewClasses(num_classes));
        }
        if let Some((index, &label)) = classes.iter().enumerate().find(|(_, &c)| c >= num_classes) {
            return Err(CertError::LabelOutOfRange {
                index,
                label: label as i64,
                num_classes,
            });
        }
        Ok(OneHotLabels { classes, num_classes })
    }

    /// Builds labels from explicit 0/1 rows; every row must sum to exactly one.
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let num_classes = rows.first().map_or(0, Vec::len);
        let mut classes = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != num_classes {
                return Err(CertError::SizeMismatch {
                    what: "one-hot row",
                    expected: num_classes,
                    found: row.len(),
                });
            }
            let ones: Vec<usize> = row
                .iter()
                .enumerate()
                .filter(|(_, &v)| v == 1)
                .map(|(c, _)| c)
                .collect();
            if ones.len() != 1 || row.iter().any(|&v| v > 1) {
                return Err(CertError::InvalidConfig(format!(
                    "one-hot row {i} does not sum to exactly one"
                )));
            }
            classes.push(ones[0]);
        }
        OneHotLabels::from_classes(classes, num_classes)
    }

    pub fn to_matrix(&self) -> Vec<Vec<u8>> {
        self.classes
            .iter()
            .map(|&c| {
                let mut row = vec![0u8; self.num_classes];
                row[c] = 1;
                row
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_of(&self, i: usize) -> usize {
        self.classes[i]
    }
}

/// Binary labels in {-1, +1}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedLabels(Vec<i8>);

impl SignedLabels {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|&v| v != 1 && v != -1) {
            return Err(CertError::InvalidConfig(format!(
                "signed label at {pos} is {}, expected +1 or -1",
                values[pos]
            )));
        }
        Ok(SignedLabels(values))
    }

    /// Encodes class 0 as +1 and class 1 as -1.
    pub fn from_binary_classes(labels: &OneHotLabels) -> Result<Self> {
        if labels.num_classes() != 2 {
            return Err(CertError::InvalidConfig(
                "signed encoding needs exactly two classes".into(),
            ));
        }
        Ok(SignedLabels(
            labels.classes().iter().map(|&c| if c == 0 { 1 } else { -1 }).collect(),
        ))
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Symmetric positive semidefinite kernel over one partition's training samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainKernel {
    m: usize,
    values: Vec<f64>,
}

impl TrainKernel {
    /// Validates symmetry (relative tolerance 1e-9) and positive semidefiniteness.
    pub fn new(m: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != m * m {
            return Err(CertError::SizeMismatch {
                what: "train kernel",
                expected: m * m,
                found: values.len(),
            });
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(CertError::NonFinite("train kernel"));
        }
        for i in 0..m {
            for j in (i + 1)..m {
                let (a, b) = (values[i * m + j], values[j * m + i]);
                if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1.0) {
                    return Err(CertError::NotSymmetric { row: i, col: j });
                }
            }
        }
        let kernel = TrainKernel { m, values };
        if !crate::kernels::is_psd(&kernel) {
            return Err(CertError::NotPsd);
        }
        Ok(kernel)
    }

    /// Wraps a matrix that is PSD by construction (a Gram matrix or a
    /// principal submatrix of a validated kernel).
    pub(crate) fn from_trusted(m: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), m * m);
        TrainKernel { m, values }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.m + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Principal submatrix on `indices`.
    pub fn submatrix(&self, indices: &[usize]) -> TrainKernel {
        let k = indices.len();
        let mut values = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                values.push(self.get(i, j));
            }
        }
        TrainKernel::from_trusted(k, values)
    }
}

/// Kernel values between one test sample and a partition's training samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TestKernelRow {
    values: Vec<f64>,
    effective: bool,
}

impl TestKernelRow {
    pub fn raw(values: Vec<f64>) -> Result<Self> {
        Self::build(values, false)
    }

    /// A row already transformed by the ridge-regression solve.
    pub fn effective(values: Vec<f64>) -> Result<Self> {
        Self::build(values, true)
    }

    fn build(values: Vec<f64>, effective: bool) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(CertError::NonFinite("test kernel row"));
        }
        Ok(TestKernelRow { values, effective })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_effective(&self) -> bool {
        self.effective
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::build(self.values.iter().map(|v| v * factor).collect(), self.effective)
    }
}

/// Per-class scores `p_c = sum_i y_i^c q_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassScores(pub Vec<f64>);

impl ClassScores {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn num_classes(&self) -> usize {
        self.0.len()
    }
}

/// Sums the test kernel row per training class.
pub fn class_scores(labels: &OneHotLabels, q: &TestKernelRow) -> Result<ClassScores> {
    if labels.len() != q.len() {
        return Err(CertError::SizeMismatch {
            what: "kernel row vs labels",
            expected: labels.len(),
            found: q.len(),
        });
    }
    let mut scores = vec![0.0; labels.num_classes()];
    for (&c, &v) in labels.classes().iter().zip(q.values()) {
        scores[c] += v;
    }
    Ok(ClassScores(scores))
}

/// Smallest index attaining the maximum score.
pub fn predict(scores: &ClassScores) -> Result<usize> {
    let s = scores.values();
    if s.len() < 2 {
        return Err(CertError::TooFewClasses(s.len()));
    }
    if s.iter().any(|x| !x.is_finite()) {
        return Err(CertError::NonFinite("class scores"));
    }
    Ok(argmax_smallest(s))
}

pub(crate) fn argmax_smallest(s: &[f64]) -> usize {
    let mut best = 0;
    for (c, &v) in s.iter().enumerate().skip(1) {
        if v > s[best] {
            best = c;
        }
    }
    best
}

/// Whether `challenger` displaces `incumbent` under the smaller-index tie rule.
pub fn displaces(challenger: usize, challenger_score: f64, incumbent: usize, incumbent_score: f64) -> bool {
    match challenger.cmp(&incumbent) {
        Ordering::Less => challenger_score >= incumbent_score,
        Ordering::Greater => challenger_score > incumbent_score,
        Ordering::Equal => true,
    }
}

/// Votes of the base classifiers of an ensemble with per-class counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VoteConfig {
    votes: Vec<usize>,
    counts: Vec<usize>,
}

impl VoteConfig {
    pub fn new(votes: Vec<usize>, num_classes: usize) -> Result<Self> {
        if votes.is_empty() {
            return Err(CertError::InvalidConfig("empty vote vector".into()));
        }
        if num_classes < 2 {
            return Err(CertError::TooFewClasses(num_classes));
        }
        let mut counts = vec![0usize; num_classes];
        for (i, &v) in votes.iter().enumerate() {
            if v >= num_classes {
                return Err(CertError::LabelOutOfRange {
                    index: i,
                    label: v as i64,
                    num_classes,
                });
            }
            counts[v] += 1;
        }
        Ok(VoteConfig { votes, counts })
    }

    pub fn votes(&self) -> &[usize] {
        &self.votes
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_classifiers(&self) -> usize {
        self.votes.len()
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    /// Majority class, smaller index on ties.
    pub fn majority(&self) -> usize {
        majority_of(&self.counts)
    }
}

pub(crate) fn majority_of(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &n) in counts.iter().enumerate().skip(1) {
        if n > counts[best] {
            best = c;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Exact,
    Lower,
    Upper,
}

/// Minimum flips retargeting each base classifier to each class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipCostMatrix {
    num_classes: usize,
    costs: Vec<Flips>,
    kind: BoundKind,
}

impl FlipCostMatrix {
    pub fn new(rows: Vec<Vec<Flips>>, kind: BoundKind) -> Result<Self> {
        let num_classes = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(CertError::InvalidConfig("empty flip-cost matrix".into()));
        }
        let mut costs = Vec::with_capacity(rows.len() * num_classes);
        for row in rows {
            if row.len() != num_classes {
                return Err(CertError::SizeMismatch {
                    what: "flip-cost row",
                    expected: num_classes,
                    found: row.len(),
                });
            }
            costs.extend(row);
        }
        Ok(FlipCostMatrix {
            num_classes,
            costs,
            kind,
        })
    }

    /// Convenience constructor from plain integers, `None` meaning unreachable.
    pub fn from_options(rows: &[Vec<Option<u64>>], kind: BoundKind) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|c| c.map_or(Flips::Infinite, Flips::Finite)).collect())
            .collect();
        Self::new(rows, kind)
    }

    pub fn num_classifiers(&self) -> usize {
        self.costs.len() / self.num_classes.max(1)
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn kind(&self) -> BoundKind {
        self.kind
    }

    pub fn get(&self, classifier: usize, class: usize) -> Flips {
        self.costs[classifier * self.num_classes + class]
    }

    pub fn set(&mut self, classifier: usize, class: usize, value: Flips) {
        self.costs[classifier * self.num_classes + class] = value;
    }

    pub fn row(&self, classifier: usize) -> &[Flips] {
        &self.costs[classifier * self.num_classes..(classifier + 1) * self.num_classes]
    }

    /// Checks the zero-at-current-vote invariant against `votes`.
    pub fn check_against(&self, votes: &VoteConfig) -> Result<()> {
        if votes.num_classifiers() != self.num_classifiers() || votes.num_classes() != self.num_classes {
            return Err(CertError::SizeMismatch {
                what: "flip-cost matrix vs votes",
                expected: votes.num_classifiers() * votes.num_classes(),
                found: self.costs.len(),
            });
        }
        for (i, &v) in votes.votes().iter().enumerate() {
            if self.get(i, v) != Flips::ZERO {
                return Err(CertError::MalformedCosts(i));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Svm,
    Regression,
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Svm => "svm",
            LossKind::Regression => "regression",
        })
    }
}

impl std::str::FromStr for LossKind {
    type Err = CertError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" => Ok(LossKind::Svm),
            "regression" => Ok(LossKind::Regression),
            other => Err(CertError::InvalidConfig(format!("unknown loss {other:?}"))),
        }
    }
}

/// Regularization and comparison settings for certification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertConfig {
    pub c: f64,
    pub lambda: f64,
    pub loss: LossKind,
    /// Slack subtracted from every score gap before comparison. Zero keeps
    /// comparisons exact; a positive value makes certificates more
    /// conservative on noisy ingested kernels.
    pub tolerance: f64,
}

impl CertConfig {
    pub fn new(c: f64, lambda: f64, loss: LossKind) -> Result<Self> {
        let config = CertConfig {
            c,
            lambda,
            loss,
            tolerance: 0.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(CertError::InvalidConfig(format!("C must be positive, got {}", self.c)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(CertError::InvalidConfig(format!(
                "lambda must be non-negative, got {}",
                self.lambda
            )));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return Err(CertError::InvalidConfig(format!(
                "tolerance must be non-negative, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Certified outcome for one test sample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateOutcome {
    pub index: usize,
    pub predicted: usize,
    pub correct: bool,
    #[serde(rename = "radius_lb")]
    pub radius_lower: Flips,
    #[serde(rename = "radius_ub")]
    pub radius_upper: Flips,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blackbox_radius: Option<u64>,
}

impl CertificateOutcome {
    pub fn exact(index: usize, predicted: usize, radius: Flips) -> Self {
        CertificateOutcome {
            index,
            predicted,
            correct: false,
            radius_lower: radius,
            radius_upper: radius,
            blackbox_radius: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(values: &[f64]) -> TestKernelRow {
        TestKernelRow::raw(values.to_vec()).unwrap()
    }

    #[test]
    fn scores_sum_per_class() {
        let labels = OneHotLabels::from_classes(vec![0, 1, 0], 2).unwrap();
        let p = class_scores(&labels, &row(&[0.5, 0.4, 0.2])).unwrap();
        assert!((p.values()[0] - 0.7).abs() < 1e-15);
        assert_eq!(p.values()[1], 0.4);

        let p = class_scores(&labels, &row(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(p.values(), &[0.0, 0.0]);

        let labels = OneHotLabels::from_classes(vec![0, 1, 2], 3).unwrap();
        let p = class_scores(&labels, &row(&[0.5, 0.4, 0.2])).unwrap();
        assert_eq!(p.values(), &[0.5, 0.4, 0.2]);
    }

    #[test]
    fn scores_reject_length_mismatch() {
        let labels = OneHotLabels::from_classes(vec![0, 1], 2).unwrap();
        assert!(matches!(
            class_scores(&labels, &row(&[1.0])),
            Err(CertError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn predict_breaks_ties_to_smaller_index() {
        assert_eq!(predict(&ClassScores(vec![0.5, 0.5, 0.2])).unwrap(), 0);
        assert_eq!(predict(&ClassScores(vec![-1.0, 3.0])).unwrap(), 1);
        assert_eq!(predict(&ClassScores(vec![0.0, 0.0])).unwrap(), 0);
        assert!(predict(&ClassScores(vec![f64::NAN, 0.0])).is_err());
    }

    #[test]
    fn one_hot_rows_must_sum_to_one() {
        assert!(OneHotLabels::from_matrix(&[vec![1, 0], vec![0, 1]]).is_ok());
        assert!(OneHotLabels::from_matrix(&[vec![1, 1]]).is_err());
        assert!(OneHotLabels::from_matrix(&[vec![0, 0]]).is_err());
        let labels = OneHotLabels::from_classes(vec![2, 0], 3).unwrap();
        assert_eq!(OneHotLabels::from_matrix(&labels.to_matrix()).unwrap(), labels);
    }

    #[test]
    fn signed_labels_are_plus_minus_one() {
        assert!(SignedLabels::new(vec![1, -1, 1]).is_ok());
        assert!(SignedLabels::new(vec![1, 0]).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert_eq!(Dataset::new(vec![0.0; 6], 3, 2, vec![0, 1, 0], 2).unwrap().len(), 3);
        assert!(matches!(
            Dataset::new(vec![0.0; 6], 3, 2, vec![0, 5, 0], 2),
            Err(CertError::LabelOutOfRange { label: 5, .. })
        ));
        assert!(matches!(
            Dataset::new(vec![0.0; 5], 3, 2, vec![0, 1, 0], 2),
            Err(CertError::SizeMismatch { .. })
        ));
        assert!(matches!(
            Dataset::new(vec![0.0; 6], 3, 2, vec![0, 1, 0], 1),
            Err(CertError::TooFewClasses(1))
        ));
        assert!(matches!(
            Dataset::new(vec![0.0, f64::INFINITY], 1, 2, vec![0], 2),
            Err(CertError::NonFinite(_))
        ));
    }

    #[test]
    fn train_kernel_validation() {
        assert!(TrainKernel::new(2, vec![2.0, 1.0, 1.0, 2.0]).is_ok());
        assert!(matches!(
            TrainKernel::new(2, vec![2.0, 1.0, 0.5, 2.0]),
            Err(CertError::NotSymmetric { .. })
        ));
        assert!(matches!(
            TrainKernel::new(2, vec![1.0, 2.0, 2.0, 1.0]),
            Err(CertError::NotPsd)
        ));
        // Rank-deficient PSD matrices are accepted.
        assert!(TrainKernel::new(2, vec![1.0, 1.0, 1.0, 1.0]).is_ok());
    }

    #[test]
    fn flips_ordering_and_radius() {
        assert!(Flips::Finite(u64::MAX) < Flips::Infinite);
        assert_eq!(Flips::Finite(3).radius_from_attack(), Flips::Finite(2));
        assert_eq!(Flips::Finite(0).radius_from_attack(), Flips::Finite(0));
        assert_eq!(Flips::Infinite.radius_from_attack(), Flips::Infinite);
        assert_eq!(serde_json::to_string(&Flips::Infinite).unwrap(), "\"inf\"");
        assert_eq!(serde_json::from_str::<Flips>("7").unwrap(), Flips::Finite(7));
        assert_eq!(serde_json::from_str::<Flips>("\"inf\"").unwrap(), Flips::Infinite);
    }

    #[test]
    fn vote_counts() {
        let v = VoteConfig::new(vec![2, 0, 2, 1], 3).unwrap();
        assert_eq!(v.counts(), &[1, 1, 2]);
        assert_eq!(v.majority(), 2);
        assert_eq!(VoteConfig::new(vec![0, 1], 2).unwrap().majority(), 0);
        assert!(VoteConfig::new(vec![], 2).is_err());
    }
}
