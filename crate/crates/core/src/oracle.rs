//! Exhaustive reference solvers for tiny instances.
//!
//! These share nothing with the fast paths beyond scoring and the tie rule,
//! and refuse inputs beyond their size caps instead of running for hours.

use crate::error::{CertError, Result};
use crate::types::{
    class_scores, majority_of, predict, FlipCostMatrix, Flips, OneHotLabels, SignedLabels, TestKernelRow, TrainKernel,
    VoteConfig,
};

pub const MAX_ORACLE_SAMPLES: usize = 12;
pub const MAX_ORACLE_CLASSES: usize = 4;
pub const MAX_ENSEMBLE_CONFIGS: u64 = 5_000_000;
pub const MAX_SVM_SAMPLES: usize = 200;

/// Calls `visit` with every `k`-subset of `0..n` in lexicographic order until it returns true.
fn any_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
    if k > n {
        return false;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx) {
            return true;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return false;
            }
            pos -= 1;
            if idx[pos] < n - k + pos {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Minimum Hamming distance to a relabeling whose prediction is `target`,
/// searched distance by distance. `Infinite` past `max_budget`.
pub fn oracle_targeted_min_flips(
    labels: &OneHotLabels,
    q: &TestKernelRow,
    target: usize,
    max_budget: usize,
) -> Result<Flips> {
    let n = labels.len();
    let k = labels.num_classes();
    if n > MAX_ORACLE_SAMPLES || k > MAX_ORACLE_CLASSES {
        return Err(CertError::InstanceTooLarge(format!(
            "targeted oracle takes n <= {MAX_ORACLE_SAMPLES}, K <= {MAX_ORACLE_CLASSES} (got n={n}, K={k})"
        )));
    }
    if target >= k {
        return Err(CertError::InvalidClass { target, num_classes: k });
    }
    if predict(&class_scores(labels, q)?)? == target {
        return Ok(Flips::ZERO);
    }
    let original = labels.classes();
    for dist in 1..=max_budget.min(n) {
        let hit = any_subset(n, dist, |subset| {
            // Each chosen sample takes one of the K-1 other classes.
            let mut choice = vec![0usize; dist];
            loop {
                let mut relabeled = original.to_vec();
                for (&i, &c) in subset.iter().zip(&choice) {
                    relabeled[i] = if c >= original[i] { c + 1 } else { c };
                }
                let perturbed = OneHotLabels::from_classes(relabeled, k).expect("classes in range");
                let scores = class_scores(&perturbed, q).expect("lengths match");
                if predict(&scores).expect("finite scores") == target {
                    return true;
                }
                let mut j = 0;
                while j < dist {
                    choice[j] += 1;
                    if choice[j] < k - 1 {
                        break;
                    }
                    choice[j] = 0;
                    j += 1;
                }
                if j == dist {
                    return false;
                }
            }
        });
        if hit {
            return Ok(Flips::Finite(dist as u64));
        }
    }
    Ok(Flips::Infinite)
}

/// Minimum flips of ±1 labels after which `sign(p) * sum_i y~_i q_i <= 0`.
pub fn oracle_binary_min_flips(y: &SignedLabels, q: &TestKernelRow) -> Result<Flips> {
    let n = y.len();
    if n > MAX_ORACLE_SAMPLES {
        return Err(CertError::InstanceTooLarge(format!(
            "binary oracle takes n <= {MAX_ORACLE_SAMPLES} (got {n})"
        )));
    }
    if q.len() != n {
        return Err(CertError::SizeMismatch {
            what: "kernel row vs labels",
            expected: n,
            found: q.len(),
        });
    }
    let contrib: Vec<f64> = y
        .values()
        .iter()
        .zip(q.values())
        .map(|(&a, &b)| f64::from(a) * b)
        .collect();
    let margin: f64 = contrib.iter().sum();
    if margin == 0.0 {
        return Err(CertError::AmbiguousPrediction);
    }
    for dist in 1..=n {
        let hit = any_subset(n, dist, |subset| {
            let mut flipped = contrib.clone();
            for &i in subset {
                flipped[i] = -flipped[i];
            }
            margin.signum() * flipped.iter().sum::<f64>() <= 0.0
        });
        if hit {
            return Ok(Flips::Finite(dist as u64));
        }
    }
    Ok(Flips::Infinite)
}

/// Minimum total cost over all vote configurations in which `target` is the
/// majority (smaller index on ties).
pub fn oracle_ensemble_p1(rho: &FlipCostMatrix, votes: &VoteConfig, target: usize) -> Result<Flips> {
    rho.check_against(votes)?;
    let np = votes.num_classifiers();
    let k = votes.num_classes();
    if target >= k {
        return Err(CertError::InvalidClass { target, num_classes: k });
    }
    let configs = (k as u64).checked_pow(np as u32).unwrap_or(u64::MAX);
    if configs > MAX_ENSEMBLE_CONFIGS {
        return Err(CertError::InstanceTooLarge(format!(
            "{configs} vote configurations exceed {MAX_ENSEMBLE_CONFIGS}"
        )));
    }
    let mut best = Flips::Infinite;
    let mut config = vec![0usize; np];
    let mut counts = vec![0usize; k];
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        config.iter().for_each(|&c| counts[c] += 1);
        if majority_of(&counts) == target {
            let cost = config
                .iter()
                .enumerate()
                .fold(Flips::ZERO, |acc, (i, &c)| acc.saturating_add(rho.get(i, c)));
            best = best.min(cost);
        }
        let mut i = 0;
        while i < np {
            config[i] += 1;
            if config[i] < k {
                break;
            }
            config[i] = 0;
            i += 1;
        }
        if i == np {
            break;
        }
    }
    Ok(best)
}

/// Soft-margin SVM dual `min -sum a + 1/2 sum y_i y_j a_i a_j Q_ij` over `[0, C]^n`
/// by cyclic projected coordinate descent from zero, to a projected-gradient
/// norm of 1e-10.
pub fn oracle_svm_dual(q: &TrainKernel, y: &SignedLabels, c: f64) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-10;
    const MAX_SWEEPS: usize = 200_000;
    let n = q.size();
    if n > MAX_SVM_SAMPLES {
        return Err(CertError::InstanceTooLarge(format!(
            "svm oracle takes n <= {MAX_SVM_SAMPLES} (got {n})"
        )));
    }
    if y.len() != n {
        return Err(CertError::SizeMismatch {
            what: "labels vs kernel",
            expected: n,
            found: y.len(),
        });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(CertError::InvalidConfig(format!("C must be positive, got {c}")));
    }
    let yv: Vec<f64> = y.values().iter().map(|&v| f64::from(v)).collect();
    let mut alpha = vec![0.0; n];
    let gradient = |alpha: &[f64], i: usize| -> f64 {
        let row = q.row(i);
        yv[i] * (0..n).map(|j| yv[j] * alpha[j] * row[j]).sum::<f64>() - 1.0
    };
    for _ in 0..MAX_SWEEPS {
        for i in 0..n {
            let g = gradient(&alpha, i);
            let qii = q.get(i, i);
            alpha[i] = if qii > 0.0 {
                (alpha[i] - g / qii).clamp(0.0, c)
            } else if g < 0.0 {
                c
            } else if g > 0.0 {
                0.0
            } else {
                alpha[i]
            };
        }
        let worst = (0..n)
            .map(|i| {
                let g = gradient(&alpha, i);
                if alpha[i] <= 0.0 {
                    g.min(0.0).abs()
                } else if alpha[i] >= c {
                    g.max(0.0)
                } else {
                    g.abs()
                }
            })
            .fold(0.0, f64::max);
        if worst <= TOL {
            return Ok(alpha);
        }
    }
    Err(CertError::NonConvergence(MAX_SWEEPS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::BoundKind;

    fn labels(classes: &[usize], k: usize) -> OneHotLabels {
        OneHotLabels::from_classes(classes.to_vec(), k).unwrap()
    }

    fn row(values: &[f64]) -> TestKernelRow {
        TestKernelRow::raw(values.to_vec()).unwrap()
    }

    #[test]
    fn subsets_are_enumerated_once() {
        let mut seen = Vec::new();
        any_subset(5, 3, |s| {
            seen.push(s.to_vec());
            false
        });
        assert_eq!(seen.len(), 10);
        seen.dedup();
        assert_eq!(seen.len(), 10);
    }

    #[test]
    fn targeted_oracle_examples() {
        let l = labels(&[0, 1, 2], 3);
        let q = row(&[0.5, 0.4, 0.2]);
        assert_eq!(oracle_targeted_min_flips(&l, &q, 1, 3).unwrap(), Flips::Finite(1));
        assert_eq!(oracle_targeted_min_flips(&l, &q, 0, 3).unwrap(), Flips::ZERO);
        let zero = row(&[0.0, 0.0, 0.0]);
        assert_eq!(oracle_targeted_min_flips(&l, &zero, 2, 3).unwrap(), Flips::Infinite);
        let big = labels(&[0; 13], 2);
        assert!(matches!(
            oracle_targeted_min_flips(&big, &row(&[1.0; 13]), 1, 13),
            Err(CertError::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn targeted_oracle_respects_budget() {
        let l = labels(&[0, 0, 0], 2);
        let q = row(&[1.0, 1.0, 1.0]);
        assert_eq!(oracle_targeted_min_flips(&l, &q, 1, 3).unwrap(), Flips::Finite(2));
        assert_eq!(oracle_targeted_min_flips(&l, &q, 1, 1).unwrap(), Flips::Infinite);
    }

    #[test]
    fn binary_oracle_examples() {
        let y = SignedLabels::new(vec![1, 1, -1]).unwrap();
        assert_eq!(
            oracle_binary_min_flips(&y, &row(&[0.5, 0.3, 0.1])).unwrap(),
            Flips::Finite(1)
        );
        let y = SignedLabels::new(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(
            oracle_binary_min_flips(&y, &row(&[0.4, 0.3, 0.2, 0.1])).unwrap(),
            Flips::Finite(2)
        );
    }

    #[test]
    fn ensemble_oracle_examples() {
        let v = VoteConfig::new(vec![0, 0, 1], 2).unwrap();
        let r = FlipCostMatrix::from_options(
            &[vec![Some(0), Some(2)], vec![Some(0), Some(5)], vec![Some(3), Some(0)]],
            BoundKind::Lower,
        )
        .unwrap();
        assert_eq!(oracle_ensemble_p1(&r, &v, 1).unwrap(), Flips::Finite(2));

        let r = FlipCostMatrix::from_options(
            &[vec![Some(0), None], vec![Some(0), None], vec![None, Some(0)]],
            BoundKind::Lower,
        )
        .unwrap();
        assert_eq!(oracle_ensemble_p1(&r, &v, 1).unwrap(), Flips::Infinite);

        let v = VoteConfig::new(vec![2], 3).unwrap();
        let r = FlipCostMatrix::from_options(&[vec![Some(4), Some(1), Some(0)]], BoundKind::Lower).unwrap();
        assert_eq!(oracle_ensemble_p1(&r, &v, 0).unwrap(), Flips::Finite(4));
        assert_eq!(oracle_ensemble_p1(&r, &v, 1).unwrap(), Flips::Finite(1));
    }

    #[test]
    fn svm_dual_examples() {
        let zero = TrainKernel::new(2, vec![0.0; 4]).unwrap();
        let y = SignedLabels::new(vec![1, -1]).unwrap();
        assert_eq!(oracle_svm_dual(&zero, &y, 0.1).unwrap(), vec![0.1, 0.1]);

        let q = TrainKernel::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let alpha = oracle_svm_dual(&q, &y, 0.3).unwrap();
        assert!(alpha.iter().all(|a| (a - 0.3).abs() <= 1e-12));

        // Condition fails at C = 1: the optimum is interior at 1/3.
        let y = SignedLabels::new(vec![1, 1]).unwrap();
        let alpha = oracle_svm_dual(&q, &y, 1.0).unwrap();
        assert!(alpha.iter().all(|a| (a - 1.0 / 3.0).abs() <= 1e-9));
    }
}
