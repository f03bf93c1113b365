//! Certified robustness against training-label flipping.
//!
//! Kernel classifiers whose class scores are linear in the training labels
//! (small-C SVMs and kernel ridge regression, e.g. on a neural tangent
//! kernel) admit fast white-box certificates: how many training labels an
//! adversary must flip to change one test prediction. Partition-aggregation
//! ensembles of such classifiers combine the per-partition flip costs with a
//! multiple-choice knapsack, improving on the vote-count certificate.

pub mod ensemble;
pub mod error;
pub mod io;
pub mod kernels;
pub mod oracle;
pub mod pipeline;
pub mod scalabel;
pub mod selfcheck;
pub mod synthetic;
pub mod types;

pub use ensemble::{
    ensemble_radius, mckp_p2, rs_targeted_radius, ssdpa_radius, EnsembleRadius, MckpInstance, RsRadius,
};
pub use error::{CertError, Result};
pub use kernels::{check_small_c, effective_kernel, linear_ntk_row, linear_ntk_train, EffectiveKernel, KernelSpec};
pub use scalabel::{
    binary_exact_min_flips, flip_cost_bounds, flip_cost_matrix, standalone_exact_radius, targeted_flips_lower,
    targeted_flips_upper, FlipCostBounds,
};
pub use types::{
    class_scores, predict, BoundKind, CertConfig, CertificateOutcome, ClassScores, Dataset, FlipCostMatrix, Flips,
    LossKind, OneHotLabels, SignedLabels, TestKernelRow, TrainKernel, VoteConfig,
};
