//! Dataset and precomputed-kernel manifests.
//!
//! A dataset manifest is a JSON object `{n, d, K, features, labels, dtype, layout}`
//! where `features` points at `n*d` little-endian f64 values in row-major order
//! and `labels` at a text file of `n` decimal integers, one per line. Paths are
//! resolved relative to the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CertError, Result};
use crate::types::{Dataset, TrainKernel};

pub const DTYPE_F64LE: &str = "f64le";
pub const LAYOUT_ROW_MAJOR: &str = "row-major";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub n: usize,
    pub d: usize,
    #[serde(rename = "K")]
    pub num_classes: usize,
    pub features: PathBuf,
    pub labels: PathBuf,
    pub dtype: String,
    pub layout: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelManifest {
    pub m: usize,
    pub n_test: usize,
    pub train_kernel: PathBuf,
    pub test_rows: PathBuf,
}

/// A full training kernel plus test rows against every training sample.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecomputedKernel {
    pub train: TrainKernel,
    test_rows: Vec<f64>,
    n_test: usize,
}

impl PrecomputedKernel {
    pub fn new(train: TrainKernel, test_rows: Vec<f64>, n_test: usize) -> Result<Self> {
        let m = train.size();
        if test_rows.len() != n_test * m {
            return Err(CertError::SizeMismatch {
                what: "test kernel rows",
                expected: n_test * m,
                found: test_rows.len(),
            });
        }
        if test_rows.iter().any(|v| !v.is_finite()) {
            return Err(CertError::NonFinite("test kernel rows"));
        }
        Ok(PrecomputedKernel {
            train,
            test_rows,
            n_test,
        })
    }

    pub fn num_test(&self) -> usize {
        self.n_test
    }

    pub fn test_row(&self, t: usize) -> &[f64] {
        let m = self.train.size();
        &self.test_rows[t * m..(t + 1) * m]
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CertError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CertError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_slice(&read(path)?).map_err(|e| CertError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn resolve(manifest: &Path, file: &Path) -> PathBuf {
    if file.is_absolute() {
        file.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new(".")).join(file)
    }
}

pub fn decode_f64le(bytes: &[u8], what: &'static str) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(CertError::InvalidConfig(format!(
            "{what}: {} bytes is not a whole number of f64 values",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

pub fn encode_f64le(values: &[f64]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_le_bytes()).collect()
}

/// Builds a dataset from a manifest and the raw contents of its two files.
pub fn validate_dataset(manifest: &DatasetManifest, feature_bytes: &[u8], label_text: &str) -> Result<Dataset> {
    if manifest.dtype != DTYPE_F64LE {
        return Err(CertError::InvalidConfig(format!(
            "unsupported dtype {:?}, expected {DTYPE_F64LE:?}",
            manifest.dtype
        )));
    }
    if manifest.layout != LAYOUT_ROW_MAJOR {
        return Err(CertError::InvalidConfig(format!(
            "unsupported layout {:?}, expected {LAYOUT_ROW_MAJOR:?}",
            manifest.layout
        )));
    }
    if manifest.num_classes < 2 {
        return Err(CertError::TooFewClasses(manifest.num_classes));
    }
    let features = decode_f64le(feature_bytes, "features")?;
    if features.len() != manifest.n * manifest.d {
        return Err(CertError::SizeMismatch {
            what: "features",
            expected: manifest.n * manifest.d,
            found: features.len(),
        });
    }
    let labels = label_text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.parse::<i64>()
                .map_err(|_| CertError::InvalidConfig(format!("label {l:?} is not an integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(features, manifest.n, manifest.d, labels, manifest.num_classes)
}

pub fn load_dataset(manifest_path: &Path) -> Result<Dataset> {
    let manifest: DatasetManifest = parse_json(manifest_path)?;
    let features = read(&resolve(manifest_path, &manifest.features))?;
    let labels_path = resolve(manifest_path, &manifest.labels);
    let labels = String::from_utf8(read(&labels_path)?).map_err(|e| CertError::Parse {
        path: labels_path,
        message: e.to_string(),
    })?;
    validate_dataset(&manifest, &features, &labels)
}

/// Writes `<stem>.json`, `<stem>.features.bin` and `<stem>.labels.txt` into `dir`.
pub fn write_dataset(dir: &Path, stem: &str, data: &Dataset) -> Result<PathBuf> {
    let features = PathBuf::from(format!("{stem}.features.bin"));
    let labels = PathBuf::from(format!("{stem}.labels.txt"));
    write(&dir.join(&features), &encode_f64le(data.features()))?;
    let text: String = data.labels().iter().map(|l| format!("{l}\n")).collect();
    write(&dir.join(&labels), text.as_bytes())?;
    let manifest = DatasetManifest {
        n: data.len(),
        d: data.dim(),
        num_classes: data.num_classes(),
        features,
        labels,
        dtype: DTYPE_F64LE.into(),
        layout: LAYOUT_ROW_MAJOR.into(),
    };
    let path = dir.join(format!("{stem}.json"));
    write(
        &path,
        &serde_json::to_vec_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(path)
}

pub fn load_precomputed(manifest_path: &Path) -> Result<PrecomputedKernel> {
    let manifest: KernelManifest = parse_json(manifest_path)?;
    let train = decode_f64le(&read(&resolve(manifest_path, &manifest.train_kernel))?, "train kernel")?;
    let rows = decode_f64le(&read(&resolve(manifest_path, &manifest.test_rows))?, "test rows")?;
    let train = TrainKernel::new(manifest.m, train)?;
    PrecomputedKernel::new(train, rows, manifest.n_test)
}

pub fn write_precomputed(dir: &Path, stem: &str, kernel: &PrecomputedKernel) -> Result<PathBuf> {
    let train_kernel = PathBuf::from(format!("{stem}.train.bin"));
    let test_rows = PathBuf::from(format!("{stem}.test.bin"));
    write(&dir.join(&train_kernel), &encode_f64le(kernel.train.values()))?;
    write(&dir.join(&test_rows), &encode_f64le(&kernel.test_rows))?;
    let manifest = KernelManifest {
        m: kernel.train.size(),
        n_test: kernel.n_test,
        train_kernel,
        test_rows,
    };
    let path = dir.join(format!("{stem}.json"));
    write(
        &path,
        &serde_json::to_vec_pretty(&manifest).expect("manifest serializes"),
    )?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(n: usize, d: usize, k: usize) -> DatasetManifest {
        DatasetManifest {
            n,
            d,
            num_classes: k,
            features: "f.bin".into(),
            labels: "l.txt".into(),
            dtype: DTYPE_F64LE.into(),
            layout: LAYOUT_ROW_MAJOR.into(),
        }
    }

    #[test]
    fn well_formed_dataset() {
        let bytes = encode_f64le(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let data = validate_dataset(&manifest(3, 2, 2), &bytes, "0\n1\n0\n").unwrap();
        assert_eq!(data.len(), 3);
        assert_eq!(data.row(1), &[3.0, 4.0]);
    }

    #[test]
    fn label_out_of_range() {
        let bytes = encode_f64le(&[0.0; 6]);
        assert!(matches!(
            validate_dataset(&manifest(3, 2, 2), &bytes, "0\n5\n1\n"),
            Err(CertError::LabelOutOfRange { label: 5, .. })
        ));
    }

    #[test]
    fn short_feature_file() {
        let bytes = encode_f64le(&[0.0; 5]);
        assert!(matches!(
            validate_dataset(&manifest(3, 2, 2), &bytes, "0\n1\n1\n"),
            Err(CertError::SizeMismatch {
                expected: 6,
                found: 5,
                ..
            })
        ));
    }

    #[test]
    fn wrong_label_count_and_dtype() {
        let bytes = encode_f64le(&[0.0; 6]);
        assert!(matches!(
            validate_dataset(&manifest(3, 2, 2), &bytes, "0\n1\n"),
            Err(CertError::SizeMismatch { .. })
        ));
        let mut m = manifest(3, 2, 2);
        m.dtype = "f32le".into();
        assert!(validate_dataset(&m, &bytes, "0\n1\n0\n").is_err());
        assert!(matches!(
            validate_dataset(&manifest(3, 2, 1), &bytes, "0\n0\n0\n"),
            Err(CertError::TooFewClasses(1))
        ));
    }

    #[test]
    fn non_finite_features() {
        let bytes = encode_f64le(&[0.0, f64::NAN]);
        assert!(matches!(
            validate_dataset(&manifest(1, 2, 2), &bytes, "0\n"),
            Err(CertError::NonFinite(_))
        ));
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let data = Dataset::new(vec![0.5, -1.0, 2.0, 3.5], 2, 2, vec![1, 0], 3).unwrap();
        let path = write_dataset(dir.path(), "train", &data).unwrap();
        assert_eq!(load_dataset(&path).unwrap(), data);

        let train = TrainKernel::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let kernel = PrecomputedKernel::new(train, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 3).unwrap();
        let path = write_precomputed(dir.path(), "kernel", &kernel).unwrap();
        let back = load_precomputed(&path).unwrap();
        assert_eq!(back, kernel);
        assert_eq!(back.test_row(2), &[0.5, 0.6]);
    }

    #[test]
    fn precomputed_rejects_non_psd() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("k.bin"), encode_f64le(&[1.0, 2.0, 2.0, 1.0])).unwrap();
        fs::write(dir.path().join("t.bin"), encode_f64le(&[0.0, 0.0])).unwrap();
        let manifest = KernelManifest {
            m: 2,
            n_test: 1,
            train_kernel: "k.bin".into(),
            test_rows: "t.bin".into(),
        };
        let path = dir.path().join("kernel.json");
        fs::write(&path, serde_json::to_vec(&manifest).unwrap()).unwrap();
        assert!(matches!(load_precomputed(&path), Err(CertError::NotPsd)));
    }
}
