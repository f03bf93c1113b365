//! White-box certificates for a single kernel classifier whose class scores are
//! linear in the training labels (small-C SVM or kernel ridge regression on
//! effective rows).
//!
//! * [`binary_exact_min_flips`]: exact minimum flips for a ±1 classifier.
//! * [`targeted_flips_lower`]: minimum flips for `c'` to overtake only the
//!   current prediction. A lower bound on the targeted problem, and exact
//!   once minimised over targets.
//! * [`targeted_flips_upper`]: flips performed by a greedy feasible attack.
//! * [`flip_cost_matrix`]: per-partition, per-class bounds for ensembles.

use std::cmp::Ordering;

use crate::error::{CertError, Result};
use crate::types::{
    argmax_smallest, class_scores, predict, BoundKind, CertificateOutcome, FlipCostMatrix, Flips, OneHotLabels,
    SignedLabels, TestKernelRow, VoteConfig,
};

/// Reusable buffers for the sort-and-prefix-sum greedy.
#[derive(Clone, Debug, Default)]
pub struct GreedyWorkspace {
    gains: Vec<(f64, usize)>,
    prefix: Vec<f64>,
}

impl GreedyWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Smallest `k` such that the `k` largest positive gains sum to at least
    /// `threshold` (`inclusive`) or strictly more than it. Equal gains are
    /// taken in index order.
    pub fn min_prefix_reaching(
        &mut self,
        gains: impl IntoIterator<Item = f64>,
        threshold: f64,
        inclusive: bool,
    ) -> Flips {
        let reached = |total: f64| {
            if inclusive {
                total >= threshold
            } else {
                total > threshold
            }
        };
        if reached(0.0) {
            return Flips::ZERO;
        }
        self.gains.clear();
        self.gains.extend(
            gains
                .into_iter()
                .enumerate()
                .filter(|(_, g)| *g > 0.0)
                .map(|(i, g)| (g, i)),
        );
        self.gains
            .sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        self.prefix.clear();
        let mut total = 0.0;
        for &(g, _) in &self.gains {
            total += g;
            self.prefix.push(total);
        }
        match self.prefix.iter().position(|&p| reached(p)) {
            Some(k) => Flips::Finite(k as u64 + 1),
            None => Flips::Infinite,
        }
    }

    /// Prefix sums `P_k` from the last call, over gains sorted descending.
    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix
    }
}

/// Minimum flips that change the sign of `sum_i y_i q_i`.
///
/// With margin `S` and contributions `a_i = sign(S) y_i q_i`, flipping a set
/// `F` leaves `S - 2 sum_F a_i`, so the answer is the shortest prefix of the
/// descending contributions reaching `S/2`. Reaching `S/2` exactly counts as
/// a change.
pub fn binary_exact_min_flips(y: &SignedLabels, q: &TestKernelRow) -> Result<Flips> {
    binary_min_flips_with(y, q, 0.0, &mut GreedyWorkspace::new())
}

pub(crate) fn binary_min_flips_with(
    y: &SignedLabels,
    q: &TestKernelRow,
    tolerance: f64,
    ws: &mut GreedyWorkspace,
) -> Result<Flips> {
    if y.len() != q.len() {
        return Err(CertError::SizeMismatch {
            what: "kernel row vs labels",
            expected: y.len(),
            found: q.len(),
        });
    }
    let margin: f64 = y
        .values()
        .iter()
        .zip(q.values())
        .map(|(&yi, &qi)| f64::from(yi) * qi)
        .sum();
    if margin == 0.0 {
        return Err(CertError::AmbiguousPrediction);
    }
    let sign = margin.signum();
    let contributions = y
        .values()
        .iter()
        .zip(q.values())
        .map(|(&yi, &qi)| sign * f64::from(yi) * qi);
    Ok(ws.min_prefix_reaching(contributions, margin.abs() / 2.0 - tolerance, true))
}

/// Per-sample best reduction of the gap `p_{c*} - p_{c'}` from one flip.
fn optimal_reduction(label: usize, qi: f64, predicted: usize, target: usize) -> f64 {
    if label == predicted {
        (2.0 * qi).max(0.0)
    } else if label == target {
        (-2.0 * qi).max(0.0)
    } else {
        qi.abs()
    }
}

fn check_target(labels: &OneHotLabels, target: usize) -> Result<()> {
    if target >= labels.num_classes() {
        return Err(CertError::InvalidClass {
            target,
            num_classes: labels.num_classes(),
        });
    }
    Ok(())
}

/// Minimum flips for `target` to overtake the current prediction's score.
pub fn targeted_flips_lower(labels: &OneHotLabels, q: &TestKernelRow, target: usize) -> Result<Flips> {
    check_target(labels, target)?;
    let scores = class_scores(labels, q)?;
    let predicted = predict(&scores)?;
    Ok(lower_from_scores(
        labels,
        q,
        scores.values(),
        predicted,
        target,
        0.0,
        &mut GreedyWorkspace::new(),
    ))
}

fn lower_from_scores(
    labels: &OneHotLabels,
    q: &TestKernelRow,
    scores: &[f64],
    predicted: usize,
    target: usize,
    tolerance: f64,
    ws: &mut GreedyWorkspace,
) -> Flips {
    if target == predicted {
        return Flips::ZERO;
    }
    let gap = scores[predicted] - scores[target];
    let gains = labels
        .classes()
        .iter()
        .zip(q.values())
        .map(|(&label, &qi)| optimal_reduction(label, qi, predicted, target));
    // A real change of prediction always costs at least one flip, whatever the slack.
    ws.min_prefix_reaching(gains, gap - tolerance, target < predicted)
        .max(Flips::Finite(1))
}

/// Flips performed by the greedy feasible attack towards `target`.
///
/// Each round re-scores, finds the current prediction `c*` and runner-up
/// score, assigns every sample its damage to the `c*`/`target` gap and flips
/// the most damaging one (towards `target`, or towards `c*` for a
/// target-labelled sample with negative kernel value). Gives up with
/// `Infinite` when no sample has positive damage or after `n` rounds.
pub fn targeted_flips_upper(labels: &OneHotLabels, q: &TestKernelRow, target: usize) -> Result<Flips> {
    check_target(labels, target)?;
    let scores = class_scores(labels, q)?;
    predict(&scores)?;
    Ok(upper_from_scores(labels, q, scores.0, target))
}

fn upper_from_scores(labels: &OneHotLabels, q: &TestKernelRow, mut scores: Vec<f64>, target: usize) -> Flips {
    let qv = q.values();
    let mut current: Vec<usize> = labels.classes().to_vec();
    let mut predicted = argmax_smallest(&scores);
    let mut rounds = 0usize;
    while predicted != target {
        if rounds == current.len() {
            return Flips::Infinite;
        }
        let runner_up = scores
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != predicted)
            .map(|(_, &s)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        let lead = scores[predicted] - runner_up;

        let mut best: Option<(usize, f64)> = None;
        for (i, (&label, &qi)) in current.iter().zip(qv).enumerate() {
            let damage = if label == predicted && qi > 0.0 {
                (2.0 * qi).min(qi + lead)
            } else if label == target && qi < 0.0 {
                (2.0 * qi.abs()).min(qi.abs() + lead)
            } else if label != predicted && label != target && qi > 0.0 {
                qi
            } else {
                0.0
            };
            if damage > best.map_or(0.0, |b| b.1) {
                best = Some((i, damage));
            }
        }
        let Some((i, _)) = best else {
            return Flips::Infinite;
        };
        current[i] = if current[i] == target { predicted } else { target };
        // Full re-score so the stopping test sees the same sums as any re-check.
        scores.iter_mut().for_each(|s| *s = 0.0);
        for (&label, &qi) in current.iter().zip(qv) {
            scores[label] += qi;
        }
        predicted = argmax_smallest(&scores);
        rounds += 1;
    }
    let changed = current.iter().zip(labels.classes()).filter(|(a, b)| a != b).count();
    Flips::Finite(changed as u64)
}

/// Exact stand-alone radius: one less than the cheapest target over all classes.
pub fn standalone_exact_radius(labels: &OneHotLabels, q: &TestKernelRow) -> Result<CertificateOutcome> {
    standalone_radius_with(labels, q, 0.0, &mut GreedyWorkspace::new())
}

pub(crate) fn standalone_radius_with(
    labels: &OneHotLabels,
    q: &TestKernelRow,
    tolerance: f64,
    ws: &mut GreedyWorkspace,
) -> Result<CertificateOutcome> {
    let scores = class_scores(labels, q)?;
    let predicted = predict(&scores)?;
    let cheapest = (0..labels.num_classes())
        .filter(|&c| c != predicted)
        .map(|c| lower_from_scores(labels, q, scores.values(), predicted, c, tolerance, ws))
        .min()
        .unwrap_or(Flips::Infinite);
    let mut outcome = CertificateOutcome::exact(0, predicted, cheapest.radius_from_attack());
    outcome.radius_upper = outcome.radius_lower;
    Ok(outcome)
}

/// Votes plus lower- and upper-kind flip-cost matrices for one test sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipCostBounds {
    pub votes: VoteConfig,
    pub lower: FlipCostMatrix,
    pub upper: FlipCostMatrix,
}

/// Flip-cost matrix of the requested kind, one row per partition.
pub fn flip_cost_matrix(
    partition_labels: &[OneHotLabels],
    rows: &[TestKernelRow],
    kind: BoundKind,
) -> Result<(VoteConfig, FlipCostMatrix)> {
    let bounds = flip_cost_bounds_with(partition_labels, rows, 0.0, kind)?;
    Ok(match kind {
        BoundKind::Upper => (bounds.votes, bounds.upper),
        _ => (bounds.votes, bounds.lower),
    })
}

/// Both bound kinds at once, sharing the per-partition scores.
pub fn flip_cost_bounds(partition_labels: &[OneHotLabels], rows: &[TestKernelRow]) -> Result<FlipCostBounds> {
    flip_cost_bounds_with(partition_labels, rows, 0.0, BoundKind::Exact)
}

/// `only` selects which matrix to fill (`Exact` fills both).
pub(crate) fn flip_cost_bounds_with(
    partition_labels: &[OneHotLabels],
    rows: &[TestKernelRow],
    tolerance: f64,
    only: BoundKind,
) -> Result<FlipCostBounds> {
    if partition_labels.len() != rows.len() {
        return Err(CertError::SizeMismatch {
            what: "kernel rows vs partitions",
            expected: partition_labels.len(),
            found: rows.len(),
        });
    }
    let num_classes = partition_labels.first().map_or(0, OneHotLabels::num_classes);
    let mut ws = GreedyWorkspace::new();
    let mut votes = Vec::with_capacity(rows.len());
    let mut lower = Vec::with_capacity(rows.len());
    let mut upper = Vec::with_capacity(rows.len());
    for (labels, q) in partition_labels.iter().zip(rows) {
        if labels.num_classes() != num_classes {
            return Err(CertError::InvalidConfig(
                "partitions disagree on the number of classes".into(),
            ));
        }
        let scores = class_scores(labels, q)?;
        let vote = predict(&scores)?;
        votes.push(vote);
        let fill_lower = only != BoundKind::Upper;
        let fill_upper = only != BoundKind::Lower;
        let mut lo = vec![Flips::ZERO; num_classes];
        let mut up = vec![Flips::ZERO; num_classes];
        for c in (0..num_classes).filter(|&c| c != vote) {
            if fill_lower {
                lo[c] = lower_from_scores(labels, q, scores.values(), vote, c, tolerance, &mut ws);
            }
            if fill_upper {
                up[c] = upper_from_scores(labels, q, scores.0.clone(), c);
            }
        }
        lower.push(lo);
        upper.push(up);
    }
    Ok(FlipCostBounds {
        votes: VoteConfig::new(votes, num_classes)?,
        lower: FlipCostMatrix::new(lower, BoundKind::Lower)?,
        upper: FlipCostMatrix::new(upper, BoundKind::Upper)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(classes: &[usize], k: usize) -> OneHotLabels {
        OneHotLabels::from_classes(classes.to_vec(), k).unwrap()
    }

    fn row(values: &[f64]) -> TestKernelRow {
        TestKernelRow::raw(values.to_vec()).unwrap()
    }

    #[test]
    fn binary_examples() {
        let y = SignedLabels::new(vec![1, 1, -1]).unwrap();
        assert_eq!(
            binary_exact_min_flips(&y, &row(&[0.5, 0.3, 0.1])).unwrap(),
            Flips::Finite(1)
        );
        let y = SignedLabels::new(vec![1]).unwrap();
        assert_eq!(binary_exact_min_flips(&y, &row(&[1.0])).unwrap(), Flips::Finite(1));
        let y = SignedLabels::new(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(
            binary_exact_min_flips(&y, &row(&[0.4, 0.3, 0.2, 0.1])).unwrap(),
            Flips::Finite(2)
        );
    }

    #[test]
    fn binary_errors() {
        let y = SignedLabels::new(vec![1, -1]).unwrap();
        assert!(matches!(
            binary_exact_min_flips(&y, &row(&[0.5, 0.5])),
            Err(CertError::AmbiguousPrediction)
        ));
        assert!(binary_exact_min_flips(&y, &row(&[0.5])).is_err());
    }

    #[test]
    fn binary_exact_half_margin_counts_as_change() {
        // S = 1.0, the largest contribution is exactly S/2.
        let y = SignedLabels::new(vec![1, 1]).unwrap();
        assert_eq!(binary_exact_min_flips(&y, &row(&[0.5, 0.5])).unwrap(), Flips::Finite(1));
    }

    #[test]
    fn lower_examples() {
        let l = labels(&[0, 1, 2], 3);
        let q = row(&[0.5, 0.4, 0.2]);
        assert_eq!(targeted_flips_lower(&l, &q, 1).unwrap(), Flips::Finite(1));
        assert_eq!(targeted_flips_lower(&l, &q, 0).unwrap(), Flips::ZERO);
        let l = labels(&[0, 0], 2);
        assert_eq!(
            targeted_flips_lower(&l, &row(&[0.3, 0.2]), 1).unwrap(),
            Flips::Finite(1)
        );
        assert!(matches!(
            targeted_flips_lower(&l, &row(&[0.3, 0.2]), 2),
            Err(CertError::InvalidClass { .. })
        ));
    }

    #[test]
    fn lower_tie_rule_depends_on_index_order() {
        // Class 1 predicted with 1.0 vs 0.0; flipping sample 1 (q=0.5) to class 0
        // gives 0.5 vs 0.5, and class 0 wins the tie.
        let l = labels(&[1, 1], 2);
        assert_eq!(
            targeted_flips_lower(&l, &row(&[0.5, 0.5]), 0).unwrap(),
            Flips::Finite(1)
        );
        // Mirror: class 0 at 1.0; a tie at 0.5 keeps class 0, so both must flip.
        let l = labels(&[0, 0], 2);
        assert_eq!(
            targeted_flips_lower(&l, &row(&[0.5, 0.5]), 1).unwrap(),
            Flips::Finite(2)
        );
        let l = labels(&[0, 0, 1], 2);
        // gap 0.5 - 0.0 = 0.5 with q = [0.25, 0.25, 0.0]: one flip gives reduction 0.5,
        // reaching a tie that class 0 still wins.
        assert_eq!(
            targeted_flips_lower(&l, &row(&[0.25, 0.25, 0.0]), 1).unwrap(),
            Flips::Finite(2)
        );
    }

    #[test]
    fn lower_unreachable_is_infinite() {
        let l = labels(&[0, 0], 3);
        assert_eq!(targeted_flips_lower(&l, &row(&[0.0, 0.0]), 1).unwrap(), Flips::Infinite);
    }

    #[test]
    fn upper_examples() {
        let l = labels(&[0, 1, 2], 3);
        let q = row(&[0.5, 0.4, 0.2]);
        assert_eq!(targeted_flips_upper(&l, &q, 1).unwrap(), Flips::Finite(1));
        assert_eq!(targeted_flips_upper(&l, &q, 0).unwrap(), Flips::ZERO);
        let l = labels(&[0, 0, 0], 2);
        assert_eq!(
            targeted_flips_upper(&l, &row(&[1.0, 1.0, 1.0]), 1).unwrap(),
            Flips::Finite(2)
        );
    }

    #[test]
    fn upper_result_is_feasible() {
        // Re-score after the flip reported for [A,B,C] -> B.
        let after = labels(&[1, 1, 2], 3);
        let scores = class_scores(&after, &row(&[0.5, 0.4, 0.2])).unwrap();
        assert_eq!(predict(&scores).unwrap(), 1);
        assert!((scores.values()[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn upper_gives_up_without_positive_damage() {
        let l = labels(&[0, 0], 3);
        assert_eq!(targeted_flips_upper(&l, &row(&[0.0, 0.0]), 2).unwrap(), Flips::Infinite);
    }

    #[test]
    fn standalone_examples() {
        let r = standalone_exact_radius(&labels(&[0, 1, 2], 3), &row(&[0.5, 0.4, 0.2])).unwrap();
        assert_eq!(
            (r.predicted, r.radius_lower, r.radius_upper),
            (0, Flips::ZERO, Flips::ZERO)
        );
        let r = standalone_exact_radius(&labels(&[0], 2), &row(&[1.0])).unwrap();
        assert_eq!(r.radius_lower, Flips::ZERO);
        let r = standalone_exact_radius(&labels(&[0, 0, 0], 2), &row(&[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(r.radius_lower, Flips::Finite(1));
    }

    #[test]
    fn cost_matrix_single_partition_and_zero_rows() {
        let l = labels(&[0, 1, 2], 3);
        let q = row(&[0.5, 0.4, 0.2]);
        let (votes, rho) =
            flip_cost_matrix(std::slice::from_ref(&l), std::slice::from_ref(&q), BoundKind::Lower).unwrap();
        assert_eq!(votes.votes(), &[0]);
        assert_eq!(rho.kind(), BoundKind::Lower);
        for c in 0..3 {
            assert_eq!(rho.get(0, c), targeted_flips_lower(&l, &q, c).unwrap());
        }
        let (_, rho) = flip_cost_matrix(&[labels(&[0, 0], 2)], &[row(&[0.0, 0.0])], BoundKind::Upper).unwrap();
        assert_eq!(rho.row(0), &[Flips::ZERO, Flips::Infinite]);
    }

    #[test]
    fn tolerance_only_shrinks_lower_bounds() {
        let l = labels(&[0, 0, 1], 2);
        let q = row(&[0.25, 0.25, 0.0]);
        let mut ws = GreedyWorkspace::new();
        let strict = standalone_radius_with(&l, &q, 0.0, &mut ws).unwrap();
        let loose = standalone_radius_with(&l, &q, 0.01, &mut ws).unwrap();
        assert!(loose.radius_lower <= strict.radius_lower);
    }

    #[test]
    fn workspace_prefix_sums_are_sorted() {
        let mut ws = GreedyWorkspace::new();
        ws.min_prefix_reaching([0.1, 0.4, -0.3, 0.2], 10.0, true);
        assert_eq!(ws.prefix_sums().len(), 3);
        assert!(ws.prefix_sums().windows(2).all(|w| w[0] <= w[1]));
    }
}
