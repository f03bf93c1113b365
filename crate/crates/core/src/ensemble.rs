//! Ensemble certificates for partition-aggregation majority votes.
//!
//! The black-box certificate assumes every base classifier flips with a single
//! label flip. The white-box certificate uses the per-classifier flip costs:
//! for each target `c'` it solves the relaxed problem "make `c'` overtake the
//! current majority `c*`" as a multiple-choice knapsack, and the minimum of
//! those over targets equals the minimum of the unrelaxed problem.

use crate::error::{CertError, Result};
use crate::types::{BoundKind, FlipCostMatrix, Flips, VoteConfig};

/// Black-box radius `floor((n_{c*} - max_{c != c*}(n_c + [c < c*])) / 2)`, floored at zero.
pub fn ssdpa_radius(votes: &VoteConfig) -> u64 {
    let counts = votes.counts();
    let top = votes.majority();
    let runner_up = counts
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != top)
        .map(|(c, &n)| n as i64 + i64::from(c < top))
        .max()
        .unwrap_or(0);
    let margin = counts[top] as i64 - runner_up;
    if margin <= 0 {
        0
    } else {
        (margin / 2) as u64
    }
}

/// One choice for a base classifier: pay `cost` flips to cut the vote gap by `reduction`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McOption {
    pub cost: u64,
    pub reduction: u8,
}

/// Largest per-option reduction (moving a majority vote onto the target).
pub const MAX_REDUCTION: u8 = 2;

/// Multiple-choice knapsack instance for one target class: pick exactly one
/// option per group, reach `threshold` total reduction at minimum cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MckpInstance {
    pub groups: Vec<Vec<McOption>>,
    pub threshold: usize,
}

/// The same instance as a maximisation knapsack with non-negative profits
/// `rho_max - cost` and weights `r_max - reduction` under a capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxKnapsackForm {
    /// `(profit, weight)` per option, grouped like the source instance.
    pub groups: Vec<Vec<(u64, u8)>>,
    pub capacity: i64,
    pub cost_ceiling: u64,
}

impl MckpInstance {
    /// Option lists for making `target` overtake the current majority.
    pub fn build(rho: &FlipCostMatrix, votes: &VoteConfig, target: usize) -> Result<Self> {
        rho.check_against(votes)?;
        let k = votes.num_classes();
        if target >= k {
            return Err(CertError::InvalidClass { target, num_classes: k });
        }
        let top = votes.majority();
        if target == top {
            return Err(CertError::InvalidConfig(format!(
                "target {target} is already the majority class"
            )));
        }
        let counts = votes.counts();
        let needed = counts[top] as i64 - counts[target] as i64 + i64::from(top < target);
        if needed <= 0 {
            return Err(CertError::Consistency(format!(
                "target {target} already overtakes the majority"
            )));
        }
        let stay = McOption { cost: 0, reduction: 0 };
        let groups = votes
            .votes()
            .iter()
            .enumerate()
            .map(|(i, &vote)| {
                let mut options = vec![stay];
                let mut push = |cost: Flips, reduction: u8| {
                    if let Flips::Finite(cost) = cost {
                        options.push(McOption { cost, reduction });
                    }
                };
                if vote == top {
                    push(rho.get(i, target), 2);
                    let cheapest = (0..k)
                        .filter(|&c| c != top)
                        .min_by_key(|&c| (rho.get(i, c), c))
                        .expect("at least two classes");
                    if cheapest != target {
                        push(rho.get(i, cheapest), 1);
                    }
                } else if vote != target {
                    push(rho.get(i, target), 1);
                }
                options
            })
            .collect();
        Ok(MckpInstance {
            groups,
            threshold: needed as usize,
        })
    }

    /// Minimum cost reaching the threshold, by dynamic programming over the
    /// capped total reduction. `O(groups * threshold)` time, threshold <= Np + 1.
    pub fn solve(&self) -> Flips {
        const UNREACHED: u64 = u64::MAX;
        let cap = self.threshold;
        let mut best = vec![UNREACHED; cap + 1];
        best[0] = 0;
        let mut next = vec![UNREACHED; cap + 1];
        for options in &self.groups {
            next.iter_mut().for_each(|v| *v = UNREACHED);
            for (reached, &cost) in best.iter().enumerate() {
                if cost == UNREACHED {
                    continue;
                }
                for opt in options {
                    let to = (reached + opt.reduction as usize).min(cap);
                    let total = cost.saturating_add(opt.cost);
                    if total < next[to] {
                        next[to] = total;
                    }
                }
            }
            std::mem::swap(&mut best, &mut next);
        }
        match best[cap] {
            UNREACHED => Flips::Infinite,
            c => Flips::Finite(c),
        }
    }

    pub fn as_max_knapsack(&self) -> MaxKnapsackForm {
        let cost_ceiling = self.groups.iter().flatten().map(|o| o.cost).max().unwrap_or(0);
        let groups = self
            .groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|o| (cost_ceiling - o.cost, MAX_REDUCTION - o.reduction))
                    .collect()
            })
            .collect();
        MaxKnapsackForm {
            groups,
            capacity: self.groups.len() as i64 * i64::from(MAX_REDUCTION) - self.threshold as i64,
            cost_ceiling,
        }
    }
}

/// Minimum total flips for `target` to overtake the current majority vote.
pub fn mckp_p2(rho: &FlipCostMatrix, votes: &VoteConfig, target: usize) -> Result<Flips> {
    Ok(MckpInstance::build(rho, votes, target)?.solve())
}

/// Ensemble certificate derived from one flip-cost matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleRadius {
    pub predicted: usize,
    pub radius: Flips,
    /// Lower-kind costs give a sound certificate, upper-kind costs an upper bound on it.
    pub kind: BoundKind,
}

/// `min_{c' != c*} P2(c') - 1`, floored at zero.
pub fn ensemble_radius(rho: &FlipCostMatrix, votes: &VoteConfig) -> Result<EnsembleRadius> {
    rho.check_against(votes)?;
    let top = votes.majority();
    let mut cheapest = Flips::Infinite;
    for target in (0..votes.num_classes()).filter(|&c| c != top) {
        let cost = mckp_p2(rho, votes, target)?;
        if cost == Flips::ZERO {
            return Err(CertError::Consistency(format!(
                "zero-cost attack towards class {target}"
            )));
        }
        cheapest = cheapest.min(cost);
    }
    Ok(EnsembleRadius {
        predicted: top,
        radius: cheapest.radius_from_attack(),
        kind: rho.kind(),
    })
}

/// Randomized-smoothing radius against one target class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RsRadius {
    pub value: f64,
    pub certified: u64,
}

/// `log(4p(1-p)) / (2(1-2q) log(q/(1-q)))` for switching bound `p` and label-noise rate `q`.
pub fn rs_targeted_radius(p: f64, q_noise: f64) -> Result<RsRadius> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CertError::Domain(format!(
            "switching bound must lie in (0, 1), got {p}"
        )));
    }
    if !(q_noise > 0.0 && q_noise < 0.5) {
        return Err(CertError::Domain(format!(
            "label-noise rate must lie in (0, 0.5), got {q_noise}"
        )));
    }
    // `+ 0.0` turns the -0 at p = 1/2 into +0.
    let value = (4.0 * p * (1.0 - p)).ln() / (2.0 * (1.0 - 2.0 * q_noise) * (q_noise / (1.0 - q_noise)).ln()) + 0.0;
    let certified = if value > 0.0 { value.floor() as u64 } else { 0 };
    Ok(RsRadius { value, certified })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn votes(v: &[usize], k: usize) -> VoteConfig {
        VoteConfig::new(v.to_vec(), k).unwrap()
    }

    fn rho(rows: &[Vec<Option<u64>>], kind: BoundKind) -> FlipCostMatrix {
        FlipCostMatrix::from_options(rows, kind).unwrap()
    }

    fn split(maj: usize, min: usize) -> VoteConfig {
        let mut v = vec![0; maj];
        v.extend(std::iter::repeat_n(1, min));
        votes(&v, 2)
    }

    fn off_vote(v: &VoteConfig, cost: u64) -> FlipCostMatrix {
        let rows: Vec<Vec<Option<u64>>> = v
            .votes()
            .iter()
            .map(|&vote| {
                (0..v.num_classes())
                    .map(|c| Some(if c == vote { 0 } else { cost }))
                    .collect()
            })
            .collect();
        rho(&rows, BoundKind::Lower)
    }

    #[test]
    fn ssdpa_examples() {
        assert_eq!(ssdpa_radius(&split(7, 3)), 2);
        assert_eq!(ssdpa_radius(&split(5, 5)), 0);
        assert_eq!(ssdpa_radius(&votes(&[2, 2, 2], 3)), 1);
    }

    #[test]
    fn mckp_examples() {
        let v = votes(&[0, 0, 1], 2);
        let r = rho(
            &[vec![Some(0), Some(2)], vec![Some(0), Some(5)], vec![Some(3), Some(0)]],
            BoundKind::Lower,
        );
        assert_eq!(mckp_p2(&r, &v, 1).unwrap(), Flips::Finite(2));

        let v = split(7, 3);
        assert_eq!(mckp_p2(&off_vote(&v, 1), &v, 1).unwrap(), Flips::Finite(3));

        let v = votes(&[0], 2);
        let r = rho(&[vec![Some(0), Some(4)]], BoundKind::Lower);
        assert_eq!(mckp_p2(&r, &v, 1).unwrap(), Flips::Finite(4));
    }

    #[test]
    fn mckp_rejects_malformed_costs() {
        let v = votes(&[0, 1], 2);
        let r = rho(&[vec![Some(1), Some(2)], vec![Some(3), Some(0)]], BoundKind::Lower);
        assert!(matches!(mckp_p2(&r, &v, 1), Err(CertError::MalformedCosts(0))));
    }

    #[test]
    fn ensemble_radius_examples() {
        let v = split(7, 3);
        let out = ensemble_radius(&off_vote(&v, 1), &v).unwrap();
        assert_eq!((out.predicted, out.radius), (0, Flips::Finite(2)));
        assert_eq!(out.radius, Flips::Finite(ssdpa_radius(&v)));
        assert_eq!(ensemble_radius(&off_vote(&v, 5), &v).unwrap().radius, Flips::Finite(14));

        let v = votes(&[1], 3);
        let r = rho(&[vec![Some(6), Some(0), Some(4)]], BoundKind::Upper);
        let out = ensemble_radius(&r, &v).unwrap();
        assert_eq!(out.radius, Flips::Finite(3));
        assert_eq!(out.kind, BoundKind::Upper);
    }

    #[test]
    fn unreachable_targets_give_infinite_radius() {
        let v = split(3, 1);
        let r = rho(
            &[
                vec![Some(0), None],
                vec![Some(0), None],
                vec![Some(0), None],
                vec![Some(2), Some(0)],
            ],
            BoundKind::Lower,
        );
        assert_eq!(ensemble_radius(&r, &v).unwrap().radius, Flips::Infinite);
    }

    #[test]
    fn cheapest_alternative_option_is_used() {
        // Moving majority votes to class 2 is cheap and closes the gap to
        // target 1 by one each; two such moves beat one expensive move to 1.
        let v = votes(&[0, 0, 1], 3);
        let r = rho(
            &[
                vec![Some(0), Some(9), Some(1)],
                vec![Some(0), Some(9), Some(1)],
                vec![Some(9), Some(0), Some(9)],
            ],
            BoundKind::Lower,
        );
        let inst = MckpInstance::build(&r, &v, 1).unwrap();
        assert_eq!(inst.threshold, 2);
        assert_eq!(inst.groups[0].len(), 3);
        assert_eq!(inst.groups[2], vec![McOption { cost: 0, reduction: 0 }]);
        assert_eq!(inst.solve(), Flips::Finite(2));
    }

    #[test]
    fn max_knapsack_form_matches_min_form() {
        let v = votes(&[0, 0, 0, 1, 2], 3);
        let r = rho(
            &[
                vec![Some(0), Some(3), Some(1)],
                vec![Some(0), Some(2), None],
                vec![Some(0), Some(4), Some(4)],
                vec![Some(1), Some(0), Some(2)],
                vec![Some(3), Some(1), Some(0)],
            ],
            BoundKind::Lower,
        );
        let inst = MckpInstance::build(&r, &v, 1).unwrap();
        let form = inst.as_max_knapsack();
        // Enumerate every choice in the max form: maximise profit under capacity.
        let mut best: Option<u64> = None;
        let mut pick = vec![0usize; form.groups.len()];
        loop {
            let (profit, weight) = pick
                .iter()
                .zip(&form.groups)
                .fold((0u64, 0i64), |(p, w), (&j, g)| (p + g[j].0, w + i64::from(g[j].1)));
            if weight <= form.capacity {
                best = Some(best.map_or(profit, |b| b.max(profit)));
            }
            let mut g = 0;
            while g < pick.len() {
                pick[g] += 1;
                if pick[g] < form.groups[g].len() {
                    break;
                }
                pick[g] = 0;
                g += 1;
            }
            if g == pick.len() {
                break;
            }
        }
        let via_max = form.groups.len() as u64 * form.cost_ceiling - best.unwrap();
        assert_eq!(inst.solve(), Flips::Finite(via_max));
    }

    #[test]
    fn rs_radius_values() {
        let r = rs_targeted_radius(0.5, 0.1).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.certified, 0);
        let r = rs_targeted_radius(1e-6, 0.1).unwrap();
        assert!((r.value - 3.535_487_827_760_335_8).abs() < 1e-9);
        assert_eq!(r.certified, 3);
        let r = rs_targeted_radius(0.9, 0.1).unwrap();
        assert!((r.value - 0.290_608_450_448_704_5).abs() < 1e-9);
        assert_eq!(r.certified, 0);
        assert!(rs_targeted_radius(0.0, 0.1).is_err());
        assert!(rs_targeted_radius(0.3, 0.5).is_err());
    }
}
