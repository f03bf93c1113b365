//! Training kernels and test kernel rows.
//!
//! The closed-form kernel is the NTK of a one-hidden-layer linear network
//! without bias, `2 <x, x'>`. Other kernels (convolutional NTKs and so on) enter
//! through precomputed-kernel ingestion. For ridge regression the test row is
//! replaced by the effective row `(Q + lambda I)^{-1} q`, which puts the
//! regression scores in the same linear-in-labels form as the small-C SVM.

use nalgebra::{DMatrix, DVector};

use crate::error::{CertError, Result};
use crate::types::{TestKernelRow, TrainKernel};

/// Scale of the linear NTK: gradient term plus output-layer term.
pub const LINEAR_NTK_SCALE: f64 = 2.0;

/// Which kernel backs a certification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelSpec {
    LinearNtk,
    /// Path to a precomputed-kernel manifest.
    Precomputed(std::path::PathBuf),
}

impl std::fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelSpec::LinearNtk => f.write_str("linear"),
            KernelSpec::Precomputed(p) => write!(f, "precomputed:{}", p.display()),
        }
    }
}

impl std::str::FromStr for KernelSpec {
    type Err = CertError;

    /// `linear` or `precomputed:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            _ if s == "linear" => Ok(KernelSpec::LinearNtk),
            Some(("precomputed", path)) if !path.is_empty() => Ok(KernelSpec::Precomputed(path.into())),
            _ => Err(CertError::InvalidConfig(format!(
                "kernel must be `linear` or `precomputed:PATH`, got {s:?}"
            ))),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_rows(features: &[f64], d: usize) -> Result<usize> {
    if d == 0 || !features.len().is_multiple_of(d) {
        return Err(CertError::SizeMismatch {
            what: "feature matrix",
            expected: d,
            found: features.len(),
        });
    }
    if features.iter().any(|x| !x.is_finite()) {
        return Err(CertError::NonFinite("features"));
    }
    Ok(features.len() / d)
}

/// `Q[i][j] = 2 <x_i, x_j>` over a row-major `m x d` feature block.
pub fn linear_ntk_train(features: &[f64], d: usize) -> Result<TrainKernel> {
    let m = check_rows(features, d)?;
    if m == 0 {
        return Err(CertError::InvalidConfig("empty partition".into()));
    }
    let mut values = vec![0.0; m * m];
    for i in 0..m {
        let xi = &features[i * d..(i + 1) * d];
        for j in i..m {
            let v = LINEAR_NTK_SCALE * dot(xi, &features[j * d..(j + 1) * d]);
            values[i * m + j] = v;
            values[j * m + i] = v;
        }
    }
    Ok(TrainKernel::from_trusted(m, values))
}

/// Entries `2 <x_i, t>` for one test vector `t`.
pub fn linear_ntk_row(features: &[f64], d: usize, test: &[f64]) -> Result<TestKernelRow> {
    let m = check_rows(features, d)?;
    if test.len() != d {
        return Err(CertError::SizeMismatch {
            what: "test feature vector",
            expected: d,
            found: test.len(),
        });
    }
    if test.iter().any(|x| !x.is_finite()) {
        return Err(CertError::NonFinite("test features"));
    }
    let values = (0..m)
        .map(|i| LINEAR_NTK_SCALE * dot(&features[i * d..(i + 1) * d], test))
        .collect();
    TestKernelRow::raw(values)
}

pub fn max_row_abs_sum(q: &TrainKernel) -> f64 {
    (0..q.size())
        .map(|i| q.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Whether every SVM dual variable is pinned at `C` for any labeling:
/// `max_i sum_j |Q_ij| <= 1/C`.
pub fn check_small_c(q: &TrainKernel, c: f64) -> bool {
    max_row_abs_sum(q) <= 1.0 / c
}

fn to_dmatrix(q: &TrainKernel) -> DMatrix<f64> {
    DMatrix::from_row_slice(q.size(), q.size(), q.values())
}

/// Cholesky test on `Q + eps I`, with `eps = 1e-12 * max(1, max diag)`.
pub(crate) fn is_psd(q: &TrainKernel) -> bool {
    let m = q.size();
    if m == 0 {
        return true;
    }
    let max_diag = (0..m).map(|i| q.get(i, i).abs()).fold(1.0, f64::max);
    let mut a = to_dmatrix(q);
    for i in 0..m {
        a[(i, i)] += 1e-12 * max_diag;
    }
    a.cholesky().is_some()
}

/// Factorization of `Q + lambda I`, computed once per partition and reused for
/// every test row.
#[derive(Clone, Debug)]
pub struct EffectiveKernel {
    system: DMatrix<f64>,
    factor: nalgebra::Cholesky<f64, nalgebra::Dyn>,
}

impl EffectiveKernel {
    pub fn new(q: &TrainKernel, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(CertError::InvalidConfig(format!(
                "lambda must be non-negative, got {lambda}"
            )));
        }
        let m = q.size();
        let mut system = to_dmatrix(q);
        for i in 0..m {
            system[(i, i)] += lambda;
        }
        let factor = system.clone().cholesky().ok_or(if lambda > 0.0 {
            CertError::NotPsd
        } else {
            CertError::Singular
        })?;
        let max_diag = (0..m).map(|i| system[(i, i)].abs()).fold(0.0, f64::max);
        let min_pivot = factor
            .l_dirty()
            .diagonal()
            .iter()
            .map(|l| l * l)
            .fold(f64::INFINITY, f64::min);
        if min_pivot <= f64::EPSILON * (m as f64) * max_diag {
            return Err(CertError::Singular);
        }
        Ok(EffectiveKernel { system, factor })
    }

    pub fn size(&self) -> usize {
        self.system.nrows()
    }

    /// Solves `(Q + lambda I) z = q_row` with one step of iterative refinement.
    pub fn solve(&self, q_row: &TestKernelRow) -> Result<TestKernelRow> {
        if q_row.len() != self.size() {
            return Err(CertError::SizeMismatch {
                what: "test kernel row",
                expected: self.size(),
                found: q_row.len(),
            });
        }
        let b = DVector::from_column_slice(q_row.values());
        let mut z = self.factor.solve(&b);
        let residual = &b - &self.system * &z;
        z += self.factor.solve(&residual);
        if z.iter().any(|v| !v.is_finite()) {
            return Err(CertError::Singular);
        }
        TestKernelRow::effective(z.iter().copied().collect())
    }
}

/// One-shot effective kernel row. Prefer [`EffectiveKernel`] when solving for
/// many test rows against the same partition.
pub fn effective_kernel(q: &TrainKernel, q_row: &TestKernelRow, lambda: f64) -> Result<TestKernelRow> {
    EffectiveKernel::new(q, lambda)?.solve(q_row)
}
