use std::cmp::Ordering;

use crate::error::{CertError, Result};
use crate::types::Dataset;

/// Label-independent assignment of training samples to partitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partitioning {
    assignment: Vec<usize>,
    num_partitions: usize,
}

impl Partitioning {
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn num_partitions(&self) -> usize {
        self.num_partitions
    }

    /// Sample indices of partition `p`, in original order.
    pub fn members(&self, p: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(_, &a)| a == p)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_partitions];
        for &a in &self.assignment {
            sizes[a] += 1;
        }
        sizes
    }
}

fn compare_rows(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .flat_map(|v| v.to_le_bytes())
        .cmp(b.iter().flat_map(|v| v.to_le_bytes()))
}

/// Sorts rows by their raw little-endian bytes (original index on ties) and
/// deals sorted rank `s` to partition `s mod np`. Labels are never read.
pub fn partition_data(dataset: &Dataset, np: usize) -> Result<Partitioning> {
    let n = dataset.len();
    if np == 0 || np > n {
        return Err(CertError::InvalidConfig(format!(
            "number of partitions must lie in [1, {n}], got {np}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| compare_rows(dataset.row(i), dataset.row(j)).then(i.cmp(&j)));
    let mut assignment = vec![0; n];
    for (rank, &i) in order.iter().enumerate() {
        assignment[i] = rank % np;
    }
    Ok(Partitioning {
        assignment,
        num_partitions: np,
    })
}
