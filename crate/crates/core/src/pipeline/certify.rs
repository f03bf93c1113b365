use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::RobustnessReport;
use super::partition::{partition_data, Partitioning};
use crate::ensemble::{ensemble_radius, ssdpa_radius};
use crate::error::{CertError, Result};
use crate::io::PrecomputedKernel;
use crate::kernels::{linear_ntk_row, linear_ntk_train, max_row_abs_sum, EffectiveKernel};
use crate::scalabel::{flip_cost_bounds_with, standalone_radius_with, GreedyWorkspace};
use crate::types::{
    class_scores, predict, BoundKind, CertConfig, CertificateOutcome, Dataset, Flips, LossKind, OneHotLabels,
    TestKernelRow, TrainKernel, VoteConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Lower and upper ensemble radii from white-box flip costs.
    Whitebox,
    /// Vote-count certificate only.
    Blackbox,
    /// White-box radii plus the black-box baseline.
    Both,
    /// Exact certificate of a single classifier (one partition).
    Standalone,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Whitebox => "whitebox",
            Mode::Blackbox => "blackbox",
            Mode::Both => "both",
            Mode::Standalone => "standalone",
        })
    }
}

impl FromStr for Mode {
    type Err = CertError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whitebox" => Ok(Mode::Whitebox),
            "blackbox" => Ok(Mode::Blackbox),
            "both" => Ok(Mode::Both),
            "standalone" => Ok(Mode::Standalone),
            other => Err(CertError::InvalidConfig(format!("unknown mode {other:?}"))),
        }
    }
}

/// Certifies one test sample given its kernel row against every partition.
///
/// Rows must be raw for the SVM loss and effective for regression. The
/// returned outcome carries index 0 and `correct = false`; callers fill those.
pub fn certify_sample(
    rows: &[TestKernelRow],
    partition_labels: &[OneHotLabels],
    config: &CertConfig,
    mode: Mode,
) -> Result<CertificateOutcome> {
    config.validate()?;
    if rows.len() != partition_labels.len() || rows.is_empty() {
        return Err(CertError::SizeMismatch {
            what: "kernel rows vs partitions",
            expected: partition_labels.len(),
            found: rows.len(),
        });
    }
    let want_effective = config.loss == LossKind::Regression;
    if rows.iter().any(|r| r.is_effective() != want_effective) {
        return Err(CertError::InvalidConfig(format!(
            "{} loss needs {} kernel rows",
            config.loss,
            if want_effective { "effective" } else { "raw" }
        )));
    }
    let np = rows.len();
    match mode {
        Mode::Standalone => {
            if np != 1 {
                return Err(CertError::InvalidConfig(format!(
                    "standalone mode needs exactly one partition, got {np}"
                )));
            }
            standalone_radius_with(
                &partition_labels[0],
                &rows[0],
                config.tolerance,
                &mut GreedyWorkspace::new(),
            )
        }
        Mode::Blackbox => {
            let votes = vote_config(partition_labels, rows)?;
            let radius = ssdpa_radius(&votes);
            let mut outcome = CertificateOutcome::exact(0, votes.majority(), Flips::Finite(radius));
            outcome.blackbox_radius = Some(radius);
            Ok(outcome)
        }
        Mode::Whitebox | Mode::Both => {
            let bounds = flip_cost_bounds_with(partition_labels, rows, config.tolerance, BoundKind::Exact)?;
            let lower = ensemble_radius(&bounds.lower, &bounds.votes)?;
            let upper = ensemble_radius(&bounds.upper, &bounds.votes)?;
            // With one partition the lower-bound certificate is already exact.
            let radius_upper = if np == 1 { lower.radius } else { upper.radius };
            if lower.radius > radius_upper {
                return Err(CertError::Consistency(format!(
                    "lower radius {} exceeds upper radius {}",
                    lower.radius, radius_upper
                )));
            }
            Ok(CertificateOutcome {
                index: 0,
                predicted: lower.predicted,
                correct: false,
                radius_lower: lower.radius,
                radius_upper,
                blackbox_radius: (mode == Mode::Both).then(|| ssdpa_radius(&bounds.votes)),
            })
        }
    }
}

fn vote_config(partition_labels: &[OneHotLabels], rows: &[TestKernelRow]) -> Result<VoteConfig> {
    let votes = partition_labels
        .iter()
        .zip(rows)
        .map(|(l, q)| predict(&class_scores(l, q)?))
        .collect::<Result<Vec<_>>>()?;
    VoteConfig::new(votes, partition_labels[0].num_classes())
}

/// Where kernel values come from.
#[derive(Clone, Debug)]
pub enum KernelSource {
    LinearNtk,
    Precomputed(PrecomputedKernel),
}

#[derive(Clone, Debug)]
struct PreparedPartition {
    members: Vec<usize>,
    labels: OneHotLabels,
    features: Vec<f64>,
    solver: Option<EffectiveKernel>,
}

/// Partitioned training set with kernels and factorizations prepared once.
#[derive(Clone, Debug)]
pub struct Ensemble {
    partitioning: Partitioning,
    partitions: Vec<PreparedPartition>,
    config: CertConfig,
    dim: usize,
    source: KernelSource,
}

impl Ensemble {
    pub fn prepare(train: &Dataset, np: usize, config: CertConfig, source: KernelSource) -> Result<Self> {
        config.validate()?;
        if let KernelSource::Precomputed(k) = &source {
            if k.train.size() != train.len() {
                return Err(CertError::SizeMismatch {
                    what: "precomputed train kernel",
                    expected: train.len(),
                    found: k.train.size(),
                });
            }
        }
        let partitioning = partition_data(train, np)?;
        let partitions = (0..np)
            .map(|p| {
                let members = partitioning.members(p);
                let labels = OneHotLabels::from_classes(
                    members.iter().map(|&i| train.labels()[i]).collect(),
                    train.num_classes(),
                )?;
                let features: Vec<f64> = members.iter().flat_map(|&i| train.row(i).iter().copied()).collect();
                let kernel: TrainKernel = match &source {
                    KernelSource::LinearNtk => linear_ntk_train(&features, train.dim())?,
                    KernelSource::Precomputed(k) => k.train.submatrix(&members),
                };
                let solver = match config.loss {
                    LossKind::Svm => {
                        let row_sum = max_row_abs_sum(&kernel);
                        if row_sum > 1.0 / config.c {
                            return Err(CertError::SmallCViolation {
                                partition: p,
                                row_sum,
                                bound: 1.0 / config.c,
                            });
                        }
                        None
                    }
                    LossKind::Regression => Some(EffectiveKernel::new(&kernel, config.lambda)?),
                };
                Ok(PreparedPartition {
                    members,
                    labels,
                    features,
                    solver,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble {
            partitioning,
            partitions,
            config,
            dim: train.dim(),
            source,
        })
    }

    pub fn partitioning(&self) -> &Partitioning {
        &self.partitioning
    }

    pub fn num_partitions(&self) -> usize {
        self.partitions.len()
    }

    pub fn partition_labels(&self) -> Vec<OneHotLabels> {
        self.partitions.iter().map(|p| p.labels.clone()).collect()
    }

    /// Per-partition kernel rows for test sample `index` with features `test`,
    /// already transformed for the configured loss.
    pub fn rows_for(&self, index: usize, test: &[f64]) -> Result<Vec<TestKernelRow>> {
        self.partitions
            .iter()
            .map(|p| {
                let raw = match &self.source {
                    KernelSource::LinearNtk => linear_ntk_row(&p.features, self.dim, test)?,
                    KernelSource::Precomputed(k) => {
                        if index >= k.num_test() {
                            return Err(CertError::SizeMismatch {
                                what: "precomputed test rows",
                                expected: index + 1,
                                found: k.num_test(),
                            });
                        }
                        let row = k.test_row(index);
                        TestKernelRow::raw(p.members.iter().map(|&i| row[i]).collect())?
                    }
                };
                match &p.solver {
                    Some(solver) => solver.solve(&raw),
                    None => Ok(raw),
                }
            })
            .collect()
    }

    pub fn certify(&self, index: usize, test: &[f64], label: usize, mode: Mode) -> Result<CertificateOutcome> {
        let rows = self.rows_for(index, test)?;
        let labels: Vec<OneHotLabels> = self.partitions.iter().map(|p| p.labels.clone()).collect();
        let mut outcome = certify_sample(&rows, &labels, &self.config, mode)?;
        outcome.index = index;
        outcome.correct = outcome.predicted == label;
        Ok(outcome)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub partitions: usize,
    pub config: CertConfig,
    pub mode: Mode,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Certify only the first `limit` test samples.
    pub limit: Option<usize>,
}

/// Certifies every test sample and aggregates the robustness report.
pub fn evaluate(
    train: &Dataset,
    test: &Dataset,
    source: KernelSource,
    options: &EvalOptions,
) -> Result<RobustnessReport> {
    if test.dim() != train.dim() {
        return Err(CertError::SizeMismatch {
            what: "test feature dimension",
            expected: train.dim(),
            found: test.dim(),
        });
    }
    if test.num_classes() != train.num_classes() {
        return Err(CertError::SizeMismatch {
            what: "test class count",
            expected: train.num_classes(),
            found: test.num_classes(),
        });
    }
    if options.mode == Mode::Standalone && options.partitions != 1 {
        return Err(CertError::InvalidConfig(format!(
            "standalone mode needs exactly one partition, got {}",
            options.partitions
        )));
    }
    let ensemble = Ensemble::prepare(train, options.partitions, options.config, source)?;
    let count = options.limit.map_or(test.len(), |l| l.min(test.len()));
    let run = || {
        (0..count)
            .into_par_iter()
            .map(|t| ensemble.certify(t, test.row(t), test.labels()[t], options.mode))
            .collect::<Result<Vec<_>>>()
    };
    let outcomes = match options.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CertError::InvalidConfig(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(RobustnessReport::from_outcomes(outcomes))
}
