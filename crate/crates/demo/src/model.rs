//! Plain computations behind the browser exports; testable natively.

use flipcert::pipeline::{Ensemble, KernelSource, Mode, RobustnessReport};
use flipcert::synthetic::two_gaussians;
use flipcert::{rs_targeted_radius, CertConfig, Dataset, Flips, LossKind, Result};

/// Half-width of the square shown by the page.
pub const EXTENT: f64 = 4.0;

pub fn dataset(n: usize, separation: f64, seed: u64) -> Result<Dataset> {
    two_gaussians(n, 2, separation, seed)
}

fn radius_value(f: Flips) -> f64 {
    f.finite().map_or(f64::INFINITY, |r| r as f64)
}

/// `[x, y, label]` per training point.
pub fn points(n: usize, separation: f64, seed: u64) -> Result<Vec<f64>> {
    let data = dataset(n, separation, seed)?;
    Ok((0..data.len())
        .flat_map(|i| [data.row(i)[0], data.row(i)[1], data.labels()[i] as f64])
        .collect())
}

/// Exact single-classifier certificate over a `grid × grid` lattice covering
/// `[-EXTENT, EXTENT]²`, row by row from the top. Returns `[predicted, radius]`
/// per cell, with an unbounded radius as `inf`.
pub fn radius_field(n: usize, separation: f64, seed: u64, lambda: f64, grid: usize) -> Result<Vec<f64>> {
    let data = dataset(n, separation, seed)?;
    let config = CertConfig::new(1.0, lambda, LossKind::Regression)?;
    let ensemble = Ensemble::prepare(&data, 1, config, KernelSource::LinearNtk)?;
    let step = 2.0 * EXTENT / grid.max(1) as f64;
    let mut out = Vec::with_capacity(grid * grid * 2);
    for row in 0..grid {
        let y = EXTENT - (row as f64 + 0.5) * step;
        for col in 0..grid {
            let x = -EXTENT + (col as f64 + 0.5) * step;
            let o = ensemble.certify(0, &[x, y], 0, Mode::Standalone)?;
            out.push(o.predicted as f64);
            out.push(radius_value(o.radius_lower));
        }
    }
    Ok(out)
}

/// Certified accuracy of a partitioned ensemble against `r`: rows of
/// `[r, white-box lower, white-box upper, black-box]` plus a final row
/// `[-1, mcr_lb, mcr_ub, mcr_blackbox]`.
pub fn ensemble_curves(
    n: usize,
    separation: f64,
    seed: u64,
    lambda: f64,
    partitions: usize,
    n_test: usize,
) -> Result<Vec<f64>> {
    let train = dataset(n, separation, seed)?;
    let test = dataset(n_test, separation, seed.wrapping_add(1))?;
    let config = CertConfig::new(1.0, lambda, LossKind::Regression)?;
    let ensemble = Ensemble::prepare(&train, partitions, config, KernelSource::LinearNtk)?;
    let outcomes = (0..test.len())
        .map(|t| ensemble.certify(t, test.row(t), test.labels()[t], Mode::Both))
        .collect::<Result<Vec<_>>>()?;
    let report = RobustnessReport::from_outcomes(outcomes);
    let mut out = Vec::with_capacity(report.curve.len() * 4 + 4);
    for row in &report.curve {
        out.extend([
            row.r as f64,
            row.cert_acc_lb,
            row.cert_acc_ub,
            row.cert_acc_blackbox.unwrap_or(f64::NAN),
        ]);
    }
    let s = &report.summary;
    let mcr = |v: Option<Flips>| v.map_or(f64::NAN, radius_value);
    out.extend([-1.0, mcr(s.mcr_lb), mcr(s.mcr_ub), mcr(s.mcr_blackbox)]);
    Ok(out)
}

/// `[p, radius]` for `points` switching bounds spread over `(0, 1/2]`.
pub fn smoothing_curve(noise: f64, points: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(points * 2);
    for i in 1..=points {
        // Log spacing from 1e-8 up to 1/2.
        let p = 0.5 * (1e-8f64 / 0.5).powf(1.0 - i as f64 / points as f64);
        out.push(p);
        out.push(rs_targeted_radius(p, noise)?.value);
    }
    Ok(out)
}
