//! End-to-end certification: partition the training set, prepare each
//! partition's kernel once, certify every test sample, aggregate metrics.

mod certify;
mod metrics;
mod partition;
mod results;

pub use certify::{certify_sample, evaluate, Ensemble, EvalOptions, KernelSource, Mode};
pub use metrics::{certified_accuracy, median_certified_robustness, CurveRow, Method, RobustnessReport, Summary};
pub use partition::{partition_data, Partitioning};
pub use results::{read_results, write_results, ResultsHeader};
