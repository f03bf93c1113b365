use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flipcert::io::{write_dataset, write_precomputed, PrecomputedKernel};
use flipcert::kernels::{linear_ntk_row, linear_ntk_train};
use flipcert::synthetic::two_gaussians;
use flipcert::Dataset;

fn flipcert(args: &[&str], paths: &[(&str, &Path)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_flipcert"));
    cmd.args(args);
    for (flag, path) in paths {
        cmd.arg(flag).arg(path);
    }
    cmd.output().expect("binary runs")
}

struct Fixture {
    dir: tempfile::TempDir,
    train: PathBuf,
    test: PathBuf,
    train_data: Dataset,
    test_data: Dataset,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let train_data = two_gaussians(60, 3, 3.0, 1).unwrap();
    let test_data = two_gaussians(20, 3, 3.0, 2).unwrap();
    let train = write_dataset(dir.path(), "train", &train_data).unwrap();
    let test = write_dataset(dir.path(), "test", &test_data).unwrap();
    Fixture {
        dir,
        train,
        test,
        train_data,
        test_data,
    }
}

impl Fixture {
    fn certify(&self, args: &[&str], out: &str) -> (Output, PathBuf) {
        let out = self.dir.path().join(out);
        let mut all = vec!["certify"];
        all.extend_from_slice(args);
        let output = flipcert(
            &all,
            &[("--train", &self.train), ("--test", &self.test), ("--out", &out)],
        );
        (output, out)
    }
}

#[test]
fn certify_then_metrics() {
    let fx = fixture();
    let (out, results) = fx.certify(
        &[
            "--loss",
            "regression",
            "--lambda",
            "1",
            "--partitions",
            "3",
            "--mode",
            "both",
        ],
        "r.json",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let curve = fx.dir.path().join("curve.csv");
    let summary = fx.dir.path().join("summary.json");
    let out = flipcert(
        &["metrics"],
        &[("--in", &results), ("--curve", &curve), ("--summary", &summary)],
    );
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&curve).unwrap();
    assert!(csv.starts_with("r,cert_acc_lb,cert_acc_ub,cert_acc_blackbox\n0,"));
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(summary["num_samples"], 20);
    assert_eq!(summary["blackbox_available"], true);
}

#[test]
fn limit_restricts_test_samples() {
    let fx = fixture();
    let (out, results) = fx.certify(&["--loss", "regression", "--lambda", "1", "--limit", "5"], "r.json");
    assert!(out.status.success());
    let items: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(results).unwrap()).unwrap();
    assert_eq!(items.len(), 6);
    assert_eq!(items[0]["Np"], 1);
}

#[test]
fn small_c_violation_exits_3() {
    let fx = fixture();
    let (out, _) = fx.certify(&["--loss", "svm", "--C", "10"], "r.json");
    assert_eq!(out.status.code(), Some(3));
    let (out, _) = fx.certify(&["--loss", "svm", "--C", "1e-6", "--partitions", "2"], "r.json");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validation_errors_exit_2() {
    let fx = fixture();
    let (out, _) = fx.certify(
        &[
            "--loss",
            "svm",
            "--C",
            "1e-6",
            "--partitions",
            "2",
            "--mode",
            "standalone",
        ],
        "r.json",
    );
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = fx.certify(&["--loss", "hinge"], "r.json");
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = fx.certify(&["--loss", "regression", "--lambda", "-1"], "r.json");
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(fx.dir.path().join("train.labels.txt"), "7\n".repeat(60)).unwrap();
    let (out, _) = fx.certify(&["--loss", "regression", "--lambda", "1"], "r.json");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("label 7"));
}

#[test]
fn singular_regression_system_exits_4() {
    // Three features, sixty samples: the linear kernel has rank 3 and no ridge.
    let fx = fixture();
    let (out, _) = fx.certify(&["--loss", "regression", "--lambda", "0"], "r.json");
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn precomputed_kernel_matches_linear() {
    let fx = fixture();
    let q = linear_ntk_train(fx.train_data.features(), 3).unwrap();
    let rows: Vec<f64> = (0..fx.test_data.len())
        .flat_map(|t| {
            linear_ntk_row(fx.train_data.features(), 3, fx.test_data.row(t))
                .unwrap()
                .values()
                .to_vec()
        })
        .collect();
    let kernel = PrecomputedKernel::new(q, rows, fx.test_data.len()).unwrap();
    let manifest = write_precomputed(fx.dir.path(), "kernel", &kernel).unwrap();
    let spec = format!("precomputed:{}", manifest.display());
    let args = ["--loss", "regression", "--lambda", "2", "--partitions", "4"];
    let (a, linear) = fx.certify(&args, "linear.json");
    let mut with_kernel = args.to_vec();
    with_kernel.extend(["--kernel", spec.as_str()]);
    let (b, pre) = fx.certify(&with_kernel, "pre.json");
    assert!(
        a.status.success() && b.status.success(),
        "{}",
        String::from_utf8_lossy(&b.stderr)
    );
    let strip = |p: &Path| {
        let mut v: Vec<serde_json::Value> = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        v.remove(0);
        v
    };
    assert_eq!(strip(&linear), strip(&pre));
}

#[test]
fn oracle_check_passes() {
    let out = flipcert(&["oracle-check", "--seed", "5", "--trials", "30"], &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout)
            .lines()
            .filter(|l| l.starts_with("PASS"))
            .count(),
        9
    );
}

#[test]
fn synth_writes_a_loadable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = flipcert(
        &["synth", "--n", "10", "--d", "2", "--stem", "toy"],
        &[("--out-dir", dir.path())],
    );
    assert!(out.status.success());
    let data = flipcert::io::load_dataset(&dir.path().join("toy.json")).unwrap();
    assert_eq!((data.len(), data.dim(), data.num_classes()), (10, 2, 2));
}
