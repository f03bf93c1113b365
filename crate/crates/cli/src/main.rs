use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flipcert::io::{load_dataset, load_precomputed, write_dataset};
use flipcert::pipeline::{
    evaluate, read_results, write_results, EvalOptions, KernelSource, Mode, ResultsHeader, RobustnessReport,
};
use flipcert::synthetic::two_gaussians;
use flipcert::{selfcheck, CertConfig, CertError, KernelSpec, LossKind};

/// Certified robustness radii against training-label flipping.
#[derive(Parser)]
#[command(name = "flipcert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify every test sample and write results.json.
    Certify(CertifyArgs),
    /// Certified-accuracy curve and summary from a results file.
    Metrics {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        summary: PathBuf,
    },
    /// Cross-check the certificates against brute-force oracles on random instances.
    OracleCheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Write a seeded two-Gaussian dataset (K = 2) as a dataset manifest.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Distance between the class means, in standard deviations.
        #[arg(long, default_value_t = 3.0)]
        separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value = "data")]
        stem: String,
    },
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value_t = 1)]
    partitions: usize,
    /// svm or regression
    #[arg(long)]
    loss: LossKind,
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// `linear` or `precomputed:PATH`
    #[arg(long, default_value = "linear")]
    kernel: KernelSpec,
    /// whitebox, blackbox, both or standalone
    #[arg(long, default_value = "whitebox")]
    mode: Mode,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    limit: Option<usize>,
}

fn certify(args: CertifyArgs) -> Result<(), CertError> {
    let train = load_dataset(&args.train)?;
    let test = load_dataset(&args.test)?;
    let source = match &args.kernel {
        KernelSpec::LinearNtk => KernelSource::LinearNtk,
        KernelSpec::Precomputed(path) => KernelSource::Precomputed(load_precomputed(path)?),
    };
    let options = EvalOptions {
        partitions: args.partitions,
        config: CertConfig::new(args.c, args.lambda, args.loss)?,
        mode: args.mode,
        threads: args.threads,
        limit: args.limit,
    };
    let report = evaluate(&train, &test, source, &options)?;
    let header = ResultsHeader {
        mode: args.mode,
        partitions: args.partitions,
        loss: args.loss,
        c: args.c,
        lambda: args.lambda,
        kernel: args.kernel.to_string(),
    };
    write_results(&args.out, &header, &report.outcomes)?;
    print_summary(&report);
    Ok(())
}

fn print_summary(report: &RobustnessReport) {
    let s = &report.summary;
    let show = |v: Option<flipcert::Flips>| v.map_or("null".to_string(), |f| f.to_string());
    eprintln!(
        "{} samples, clean accuracy {:.4}, MCR lower {} upper {}{}",
        s.num_samples,
        s.clean_accuracy,
        show(s.mcr_lb),
        show(s.mcr_ub),
        if s.blackbox_available {
            format!(", black-box {}", show(s.mcr_blackbox))
        } else {
            String::new()
        }
    );
}

fn write_file(path: &Path, text: &str) -> Result<(), CertError> {
    fs::write(path, text).map_err(|source| CertError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn metrics(input: &Path, curve: &Path, summary: &Path) -> Result<(), CertError> {
    let (_, outcomes) = read_results(input)?;
    let report = RobustnessReport::from_outcomes(outcomes);
    write_file(curve, &report.curve_csv())?;
    write_file(summary, &report.summary_json())?;
    print_summary(&report);
    Ok(())
}

fn oracle_check(seed: u64, trials: usize) -> ExitCode {
    let reports = selfcheck::run_all(seed, trials);
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Certify(args) => certify(args),
        Command::Metrics { input, curve, summary } => metrics(&input, &curve, &summary),
        Command::OracleCheck { seed, trials } => return oracle_check(seed, trials),
        Command::Synth {
            n,
            d,
            separation,
            seed,
            out_dir,
            stem,
        } => two_gaussians(n, d, separation, seed)
            .and_then(|data| write_dataset(&out_dir, &stem, &data))
            .map(|path| println!("{}", path.display())),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
