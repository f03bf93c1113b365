//! Randomised cross-checks of the fast certificates against the exhaustive
//! oracles. Each check draws its instances from its own seeded stream, so a
//! failing `(seed, trials)` pair always reproduces.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ensemble::{ensemble_radius, mckp_p2, rs_targeted_radius, ssdpa_radius};
use crate::kernels::{check_small_c, effective_kernel, max_row_abs_sum};
use crate::oracle::{oracle_binary_min_flips, oracle_ensemble_p1, oracle_svm_dual, oracle_targeted_min_flips};
use crate::pipeline::{Ensemble, KernelSource, Mode};
use crate::scalabel::{binary_exact_min_flips, standalone_exact_radius, targeted_flips_lower, targeted_flips_upper};
use crate::synthetic::two_gaussians;
use crate::types::{
    class_scores, predict, BoundKind, CertConfig, FlipCostMatrix, Flips, LossKind, OneHotLabels, SignedLabels,
    TestKernelRow, TrainKernel, VoteConfig,
};

/// Outcome of one randomised check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub elapsed: Duration,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            trials: 0,
            failures: 0,
            first_failure: None,
            elapsed: Duration::ZERO,
        }
    }

    fn fail(&mut self, message: impl FnOnce() -> String) {
        self.failures += 1;
        if self.first_failure.is_none() {
            self.first_failure = Some(message());
        }
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.fail(message);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} trials={:<6} failures={:<4} {:.2}s",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.trials,
            self.failures,
            self.elapsed.as_secs_f64()
        )?;
        if let Some(msg) = &self.first_failure {
            write!(f, "  first failure: {msg}")?;
        }
        Ok(())
    }
}

fn timed(name: &'static str, body: impl FnOnce(&mut CheckReport)) -> CheckReport {
    let start = Instant::now();
    let mut report = CheckReport::new(name);
    body(&mut report);
    report.elapsed = start.elapsed();
    report
}

fn stream(seed: u64, check: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(check);
    rng
}

/// Kernel row with entries uniform in `[-1, 1]`.
pub fn random_row(rng: &mut impl Rng, n: usize) -> TestKernelRow {
    TestKernelRow::raw((0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()).expect("finite values")
}

pub fn random_labels(rng: &mut impl Rng, n: usize, k: usize) -> OneHotLabels {
    OneHotLabels::from_classes((0..n).map(|_| rng.random_range(0..k)).collect(), k).expect("labels in range")
}

/// `A Aᵀ` for an `m × rank` matrix with entries uniform in `[-1, 1] / sqrt(rank)`.
pub fn random_psd(rng: &mut impl Rng, m: usize, rank: usize) -> TrainKernel {
    let scale = 1.0 / (rank.max(1) as f64).sqrt();
    let a: Vec<f64> = (0..m * rank).map(|_| rng.random_range(-1.0..=1.0) * scale).collect();
    let mut q = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let v: f64 = (0..rank).map(|r| a[i * rank + r] * a[j * rank + r]).sum();
            q[i * m + j] = v;
            q[j * m + i] = v;
        }
    }
    TrainKernel::new(m, q).expect("Gram matrices are PSD")
}

fn random_votes(rng: &mut impl Rng, np: usize, k: usize) -> VoteConfig {
    VoteConfig::new((0..np).map(|_| rng.random_range(0..k)).collect(), k).expect("votes in range")
}

/// Costs with zeros at the votes and off-vote entries drawn by `draw`.
fn costs_with(votes: &VoteConfig, mut draw: impl FnMut() -> Flips) -> FlipCostMatrix {
    let k = votes.num_classes();
    let rows = votes
        .votes()
        .iter()
        .map(|&v| (0..k).map(|c| if c == v { Flips::ZERO } else { draw() }).collect())
        .collect();
    FlipCostMatrix::new(rows, BoundKind::Exact).expect("well-formed costs")
}

/// Exact binary certificate against Hamming-ball search (n ≤ 12).
pub fn binary_exactness(seed: u64, trials: usize) -> CheckReport {
    timed("binary exactness", |rep| {
        let mut rng = stream(seed, 1);
        while rep.trials < trials {
            let n = rng.random_range(1..=12);
            let y = SignedLabels::new((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
                .expect("±1 labels");
            let q = random_row(&mut rng, n);
            let fast = match binary_exact_min_flips(&y, &q) {
                Ok(f) => f,
                Err(_) => continue, // zero margin, redraw
            };
            rep.trials += 1;
            match oracle_binary_min_flips(&y, &q) {
                Ok(slow) => rep.check(fast == slow, || format!("n={n}: greedy {fast} vs oracle {slow}")),
                Err(e) => rep.fail(|| format!("oracle error: {e}")),
            }
        }
    })
}

/// `lower ≤ oracle ≤ upper` per target, and equality of the minima over targets.
pub fn targeted_sandwich(seed: u64, trials: usize) -> CheckReport {
    timed("targeted sandwich", |rep| {
        let mut rng = stream(seed, 2);
        for _ in 0..trials {
            rep.trials += 1;
            let n = rng.random_range(1..=8);
            let k = rng.random_range(2..=3);
            let labels = random_labels(&mut rng, n, k);
            let q = random_row(&mut rng, n);
            let predicted = match class_scores(&labels, &q).and_then(|s| predict(&s)) {
                Ok(p) => p,
                Err(e) => {
                    rep.fail(|| format!("scoring failed: {e}"));
                    continue;
                }
            };
            let mut min_lower = Flips::Infinite;
            let mut min_oracle = Flips::Infinite;
            for target in (0..k).filter(|&c| c != predicted) {
                let bounds = targeted_flips_lower(&labels, &q, target).and_then(|lo| {
                    let up = targeted_flips_upper(&labels, &q, target)?;
                    let exact = oracle_targeted_min_flips(&labels, &q, target, n)?;
                    Ok((lo, exact, up))
                });
                match bounds {
                    Ok((lo, exact, up)) => {
                        rep.check(lo <= exact && exact <= up, || {
                            format!("n={n} K={k} target={target}: {lo} <= {exact} <= {up} violated")
                        });
                        min_lower = min_lower.min(lo);
                        min_oracle = min_oracle.min(exact);
                    }
                    Err(e) => rep.fail(|| format!("error: {e}")),
                }
            }
            rep.check(min_lower == min_oracle, || {
                format!("n={n} K={k}: min lower {min_lower} vs min oracle {min_oracle}")
            });
        }
    })
}

/// Knapsack relaxation against full enumeration of vote configurations.
pub fn knapsack_equivalence(seed: u64, trials: usize) -> CheckReport {
    timed("knapsack equivalence", |rep| {
        let mut rng = stream(seed, 3);
        for _ in 0..trials {
            rep.trials += 1;
            let np = rng.random_range(1..=6);
            let k = rng.random_range(2..=4);
            let votes = random_votes(&mut rng, np, k);
            let rho = costs_with(&votes, || match rng.random_range(0..5) {
                4 => Flips::Infinite,
                v => Flips::Finite(v),
            });
            let top = votes.majority();
            let mut min_p1 = Flips::Infinite;
            let mut min_p2 = Flips::Infinite;
            for target in (0..k).filter(|&c| c != top) {
                match (oracle_ensemble_p1(&rho, &votes, target), mckp_p2(&rho, &votes, target)) {
                    (Ok(p1), Ok(p2)) => {
                        rep.check(p2 <= p1, || format!("target {target}: P2 {p2} > P1 {p1} for {rho:?}"));
                        min_p1 = min_p1.min(p1);
                        min_p2 = min_p2.min(p2);
                    }
                    (Err(e), _) | (_, Err(e)) => rep.fail(|| format!("error: {e}")),
                }
            }
            rep.check(min_p1 == min_p2, || {
                format!("votes {:?}: min P1 {min_p1} vs min P2 {min_p2}", votes.votes())
            });
        }
    })
}

/// All-ones costs reproduce the vote-count radius; costs ≥ 1 never do worse.
pub fn blackbox_consistency(seed: u64, trials: usize) -> CheckReport {
    timed("black-box consistency", |rep| {
        let mut rng = stream(seed, 4);
        for _ in 0..trials {
            rep.trials += 1;
            let np = rng.random_range(1..=50);
            let k = rng.random_range(2..=10);
            let votes = random_votes(&mut rng, np, k);
            let baseline = Flips::Finite(ssdpa_radius(&votes));
            let ones = costs_with(&votes, || Flips::Finite(1));
            match ensemble_radius(&ones, &votes) {
                Ok(r) => rep.check(r.radius == baseline, || {
                    format!("all-ones radius {} vs vote-count {baseline}", r.radius)
                }),
                Err(e) => rep.fail(|| format!("error: {e}")),
            }
            let random = costs_with(&votes, || match rng.random_range(1..=6) {
                6 => Flips::Infinite,
                v => Flips::Finite(v),
            });
            match ensemble_radius(&random, &votes) {
                Ok(r) => rep.check(r.radius >= baseline, || {
                    format!("radius {} below vote-count {baseline}", r.radius)
                }),
                Err(e) => rep.fail(|| format!("error: {e}")),
            }
        }
    })
}

/// Under the small-C condition the SVM dual sits at `alpha = C`; some
/// instance outside it must show a different solution.
pub fn small_c_collapse(seed: u64, trials: usize) -> CheckReport {
    const FACTORS: [f64; 6] = [0.1, 0.5, 0.9, 1.0, 2.0, 5.0];
    timed("small-C dual collapse", |rep| {
        let mut rng = stream(seed, 5);
        let mut witnessed_violation = false;
        for _ in 0..trials {
            rep.trials += 1;
            let n = rng.random_range(2..=50);
            let q = random_psd(&mut rng, n, 2 * n);
            let y = SignedLabels::new((0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect())
                .expect("±1 labels");
            let c = FACTORS[rng.random_range(0..FACTORS.len())] / max_row_abs_sum(&q);
            let holds = check_small_c(&q, c);
            match oracle_svm_dual(&q, &y, c) {
                Ok(alpha) => {
                    let dev = alpha.iter().map(|a| (a - c).abs()).fold(0.0, f64::max);
                    if holds {
                        rep.check(dev <= 1e-8, || format!("n={n} C={c:e}: |alpha - C| = {dev:e}"));
                    } else if dev > 1e-8 {
                        witnessed_violation = true;
                    }
                }
                Err(e) => rep.fail(|| format!("n={n} C={c:e}: {e}")),
            }
        }
        rep.check(witnessed_violation, || {
            "no instance outside the small-C regime moved alpha away from C".into()
        });
    })
}

/// Multiply-back residual of the regression effective kernel.
pub fn effective_kernel_residual(seed: u64, trials: usize) -> CheckReport {
    const LAMBDAS: [f64; 4] = [1e-3, 0.1, 1.0, 100.0];
    timed("effective-kernel residual", |rep| {
        let mut rng = stream(seed, 6);
        for _ in 0..trials {
            rep.trials += 1;
            let m = rng.random_range(1..=100);
            let rank = rng.random_range(1..=m);
            let q = random_psd(&mut rng, m, rank);
            let lambda = LAMBDAS[rng.random_range(0..LAMBDAS.len())];
            let row = random_row(&mut rng, m);
            match effective_kernel(&q, &row, lambda) {
                Ok(z) => {
                    let b = row.values();
                    let z = z.values();
                    let residual = (0..m)
                        .map(|i| {
                            let qz: f64 = (0..m).map(|j| q.get(i, j) * z[j]).sum();
                            (qz + lambda * z[i] - b[i]).abs()
                        })
                        .fold(0.0, f64::max);
                    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
                    rep.check(residual <= 1e-10 * scale, || {
                        format!("m={m} rank={rank} lambda={lambda}: residual {residual:e}")
                    });
                }
                Err(e) => rep.fail(|| format!("m={m} rank={rank} lambda={lambda}: {e}")),
            }
        }
    })
}

/// Spot values of the randomized-smoothing radius, evaluated independently in
/// high precision.
pub fn smoothing_spot_values() -> CheckReport {
    const CASES: [(f64, f64, f64); 3] = [
        (1e-6, 0.1, 3.535_487_827_760_335_8),
        (0.9, 0.1, 0.290_608_450_448_704_5),
        (0.01, 0.2, 1.940_981_566_445_766_6),
    ];
    timed("smoothing spot values", |rep| {
        rep.trials += 1;
        match rs_targeted_radius(0.5, 0.1) {
            Ok(r) => rep.check(r.value == 0.0 && r.certified == 0, || format!("p=0.5 gave {}", r.value)),
            Err(e) => rep.fail(|| e.to_string()),
        }
        for (p, q, want) in CASES {
            rep.trials += 1;
            match rs_targeted_radius(p, q) {
                Ok(r) => rep.check((r.value - want).abs() <= 1e-6, || {
                    format!("p={p} q={q}: {} vs {want}", r.value)
                }),
                Err(e) => rep.fail(|| e.to_string()),
            }
        }
    })
}

/// Exact radius is unchanged by positive (power-of-two) kernel scaling and by
/// appending a training sample with zero kernel value.
pub fn invariances(seed: u64, trials: usize) -> CheckReport {
    timed("scaling and padding", |rep| {
        let mut rng = stream(seed, 8);
        for _ in 0..trials {
            rep.trials += 1;
            let n = rng.random_range(1..=10);
            let k = rng.random_range(2..=3);
            let labels = random_labels(&mut rng, n, k);
            let q = random_row(&mut rng, n);
            let factor = 2f64.powi(rng.random_range(-4..=4));
            let mut padded_classes = labels.classes().to_vec();
            padded_classes.push(rng.random_range(0..k));
            let padded_labels = OneHotLabels::from_classes(padded_classes, k).expect("labels in range");
            let mut padded_row = q.values().to_vec();
            padded_row.push(0.0);
            let padded_row = TestKernelRow::raw(padded_row).expect("finite");
            let result = q.scaled(factor).and_then(|scaled| {
                let base = standalone_exact_radius(&labels, &q)?;
                let scaled = standalone_exact_radius(&labels, &scaled)?;
                let padded = standalone_exact_radius(&padded_labels, &padded_row)?;
                Ok((base, scaled, padded))
            });
            match result {
                Ok((base, scaled, padded)) => {
                    rep.check(base == scaled, || {
                        format!("scaling by {factor} changed {base:?} to {scaled:?}")
                    });
                    rep.check(base == padded, || {
                        format!("zero padding changed {base:?} to {padded:?}")
                    });
                }
                Err(e) => rep.fail(|| e.to_string()),
            }
        }
    })
}

/// On synthetic regression ensembles, white-box radii bracket correctly and
/// dominate the vote-count radius.
pub fn ensemble_dominance(seed: u64, trials: usize) -> CheckReport {
    timed("ensemble dominance", |rep| {
        let mut rng = stream(seed, 9);
        let train = match two_gaussians(90, 3, 2.0, seed) {
            Ok(d) => d,
            Err(e) => {
                rep.fail(|| e.to_string());
                return;
            }
        };
        let config = CertConfig::new(1.0, 1.0, LossKind::Regression).expect("valid config");
        let ensembles: Vec<_> = (1..=6)
            .map(|np| Ensemble::prepare(&train, np, config, KernelSource::LinearNtk))
            .collect();
        for _ in 0..trials {
            rep.trials += 1;
            let test: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..=3.0)).collect();
            let np = rng.random_range(1..=6);
            let outcome = ensembles[np - 1]
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|ens| ens.certify(0, &test, 0, Mode::Both).map_err(|e| e.to_string()));
            match outcome {
                Ok(o) => {
                    let bb = Flips::Finite(o.blackbox_radius.unwrap_or(u64::MAX));
                    rep.check(o.radius_lower <= o.radius_upper && o.radius_lower >= bb, || {
                        format!(
                            "Np={np}: lower {} upper {} black-box {bb}",
                            o.radius_lower, o.radius_upper
                        )
                    });
                }
                Err(e) => rep.fail(|| e),
            }
        }
    })
}

/// Every check with `trials` instances each (the SVM check uses a fifth).
pub fn run_all(seed: u64, trials: usize) -> Vec<CheckReport> {
    vec![
        binary_exactness(seed, trials),
        targeted_sandwich(seed, trials),
        knapsack_equivalence(seed, trials),
        blackbox_consistency(seed, trials),
        small_c_collapse(seed, (trials / 5).max(20)),
        effective_kernel_residual(seed, trials),
        smoothing_spot_values(),
        invariances(seed, trials),
        ensemble_dominance(seed, trials),
    ]
}
