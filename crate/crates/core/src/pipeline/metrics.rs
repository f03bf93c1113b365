use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::types::{CertificateOutcome, Flips};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Lower,
    Upper,
    Blackbox,
}

fn radius_of(outcome: &CertificateOutcome, method: Method) -> Option<Flips> {
    match method {
        Method::Lower => Some(outcome.radius_lower),
        Method::Upper => Some(outcome.radius_upper),
        Method::Blackbox => outcome.blackbox_radius.map(Flips::Finite),
    }
}

/// Fraction of samples that are correct and certified for at least `r` flips.
pub fn certified_accuracy(outcomes: &[CertificateOutcome], method: Method, r: u64) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    let hits = outcomes
        .iter()
        .filter(|o| o.correct && radius_of(o, method).is_some_and(|rad| rad.covers(r)))
        .count();
    hits as f64 / outcomes.len() as f64
}

/// Lower median of the radii; `None` for an empty set. Infinite radii sort
/// last, so the result is infinite exactly when more than half are.
pub fn median_certified_robustness(radii: impl IntoIterator<Item = Flips>) -> Option<Flips> {
    let mut radii: Vec<Flips> = radii.into_iter().collect();
    if radii.is_empty() {
        return None;
    }
    radii.sort_unstable();
    Some(radii[(radii.len() - 1) / 2])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub r: u64,
    pub cert_acc_lb: f64,
    pub cert_acc_ub: f64,
    pub cert_acc_blackbox: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub num_samples: usize,
    pub num_correct: usize,
    pub clean_accuracy: f64,
    pub mcr_lb: Option<Flips>,
    pub mcr_ub: Option<Flips>,
    pub mcr_blackbox: Option<Flips>,
    pub blackbox_available: bool,
}

/// Per-sample outcomes with certified-accuracy curves and median radii.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessReport {
    pub outcomes: Vec<CertificateOutcome>,
    pub curve: Vec<CurveRow>,
    pub summary: Summary,
}

impl RobustnessReport {
    pub fn from_outcomes(outcomes: Vec<CertificateOutcome>) -> Self {
        let blackbox_available = !outcomes.is_empty() && outcomes.iter().all(|o| o.blackbox_radius.is_some());
        let mut methods = vec![Method::Lower, Method::Upper];
        if blackbox_available {
            methods.push(Method::Blackbox);
        }
        let max_r = outcomes
            .iter()
            .flat_map(|o| methods.iter().filter_map(move |&m| radius_of(o, m)))
            .filter_map(Flips::finite)
            .max()
            .unwrap_or(0);
        let curve = (0..=max_r)
            .map(|r| CurveRow {
                r,
                cert_acc_lb: certified_accuracy(&outcomes, Method::Lower, r),
                cert_acc_ub: certified_accuracy(&outcomes, Method::Upper, r),
                cert_acc_blackbox: blackbox_available.then(|| certified_accuracy(&outcomes, Method::Blackbox, r)),
            })
            .collect();
        let mcr = |m: Method| {
            median_certified_robustness(outcomes.iter().filter(|o| o.correct).filter_map(|o| radius_of(o, m)))
        };
        let num_correct = outcomes.iter().filter(|o| o.correct).count();
        let summary = Summary {
            num_samples: outcomes.len(),
            num_correct,
            clean_accuracy: if outcomes.is_empty() {
                0.0
            } else {
                num_correct as f64 / outcomes.len() as f64
            },
            mcr_lb: mcr(Method::Lower),
            mcr_ub: mcr(Method::Upper),
            mcr_blackbox: if blackbox_available {
                mcr(Method::Blackbox)
            } else {
                None
            },
            blackbox_available,
        };
        RobustnessReport {
            outcomes,
            curve,
            summary,
        }
    }

    pub fn curve_csv(&self) -> String {
        let mut out = String::from("r,cert_acc_lb,cert_acc_ub,cert_acc_blackbox\n");
        for row in &self.curve {
            let bb = row.cert_acc_blackbox.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{}", row.r, row.cert_acc_lb, row.cert_acc_ub, bb).expect("write to string");
        }
        out
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes") + "\n"
    }
}
