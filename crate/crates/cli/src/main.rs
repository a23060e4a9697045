//! Command-line front end: construct deterministic sensing matrices,
//! analyze their coherence, resize them, compare growth strategies, and run
//! seeded recovery experiments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use detsense_core::{
    coherence_estimate, compare_vs_kronecker, construct_example1, construct_example2,
    construct_example3, construct_example4, construct_example4_with_report, gaussian_matrix,
    kronecker, pattern_codebook, rip_estimate, run_experiment, welch_bound, CoherenceEstimate,
    Error, ExperimentAxis, ExperimentConfig, MatrixSource, OmpStop, Result, RipEstimate,
    RowSelection, SensingMatrix,
};

/// Seed used by sampling paths when neither a flag nor the DETSENSE_SEED
/// environment variable provides one.
const FALLBACK_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "detsense",
    version,
    about = "Deterministic compressive-sensing matrices from finite-field codes"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sensing matrix and write it to disk.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Measure the coherence and bounds of a stored matrix.
    Analyze {
        /// Matrix JSON file to inspect.
        #[arg(long)]
        matrix: PathBuf,
        /// Where to write the analysis report (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for sampled coherence on wide matrices
        /// (default: DETSENSE_SEED or 1).
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Grow a matrix by Kronecker product or column replacement.
    Resize {
        #[command(subcommand)]
        method: ResizeMethod,
    },
    /// Closed-form comparison of column replacement against the best
    /// Kronecker product of the same shape.
    Compare {
        /// Base prime (>= 3).
        #[arg(long)]
        p: u64,
        /// Where to write the comparison record (JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run seeded sparse-recovery experiments from a config file.
    Simulate {
        /// Experiment plan (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Directory for result CSVs and summary.json.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum ConstructKind {
    /// p^2 x p^3 matrix with coherence exactly 1/p.
    Example1 {
        /// Base prime.
        #[arg(long)]
        p: u64,
        /// Output path for the matrix.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Also write the extension-field codebook driving the construction.
        #[arg(long)]
        codebook_out: Option<PathBuf>,
    },
    /// p(p-1) x p^3 matrix with coherence exactly 1/(p-1).
    Example2 {
        /// Base prime (>= 3).
        #[arg(long)]
        p: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Also write the extension-field codebook driving the construction.
        #[arg(long)]
        codebook_out: Option<PathBuf>,
    },
    /// kq x q^2 binary-support matrix with coherence exactly 1/k.
    Example3 {
        /// Field order (any prime power).
        #[arg(long)]
        q: u64,
        /// Number of pattern rows to keep (2 <= k <= q).
        #[arg(long)]
        k: usize,
        /// Pick the k rows with this seed instead of taking the first k.
        #[arg(long)]
        row_seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Dense random baseline with normalized columns.
    Gaussian {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
}

#[derive(Subcommand)]
enum ResizeMethod {
    /// Kronecker product of two stored matrices.
    Kronecker {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// p^3 x p^6 matrix resized from the p^2 x p^3 base construction,
    /// with coherence at most (2p - 1)/p^2.
    Example4 {
        /// Base prime.
        #[arg(long)]
        p: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write a resize report with the bound and a measured
        /// coherence estimate.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Seed for sampled coherence in the report
        /// (default: DETSENSE_SEED or 1).
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

/// Coherence measurements and bounds for one matrix.
#[derive(Serialize)]
struct AnalysisReport {
    m: usize,
    n: usize,
    construction: String,
    p: Option<u64>,
    claimed_coherence: Option<f64>,
    coherence: CoherenceEstimate,
    welch: Option<f64>,
    ratio_to_welch: Option<f64>,
    rip: RipEstimate,
    /// Whether the measured coherence stays within the claimed value,
    /// when one is recorded.
    meets_claim: Option<bool>,
}

/// Plan for a batch of recovery experiments.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    matrices: Vec<MatrixSource>,
    trials: usize,
    seed: u64,
    #[serde(default = "default_success_threshold")]
    success_threshold: f64,
    #[serde(default)]
    omp_stop: OmpStop,
    scenarios: Vec<Scenario>,
}

fn default_success_threshold() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Scenario {
    RecoveryVsSparsity {
        k_min: usize,
        k_max: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input_snr_db: Option<f64>,
    },
    SnrSweep {
        k: usize,
        snr_start_db: f64,
        snr_stop_db: f64,
        snr_step_db: f64,
    },
}

impl Scenario {
    fn kind_token(&self) -> &'static str {
        match self {
            Scenario::RecoveryVsSparsity { .. } => "recovery_vs_sparsity",
            Scenario::SnrSweep { .. } => "snr_sweep",
        }
    }

    fn axis(&self) -> Result<ExperimentAxis> {
        match self {
            Scenario::RecoveryVsSparsity { k_min, k_max, input_snr_db } => {
                if *k_min < 1 || k_min > k_max {
                    return Err(Error::Domain(format!(
                        "sparsity range [{k_min}, {k_max}] is empty or starts at zero"
                    )));
                }
                Ok(ExperimentAxis::Sparsity {
                    ks: (*k_min..=*k_max).collect(),
                    input_snr_db: *input_snr_db,
                })
            }
            Scenario::SnrSweep { k, snr_start_db, snr_stop_db, snr_step_db } => {
                if !(*snr_step_db > 0.0) {
                    return Err(Error::Domain(format!(
                        "SNR step {snr_step_db} must be positive"
                    )));
                }
                if snr_start_db > snr_stop_db {
                    return Err(Error::Domain(format!(
                        "SNR range [{snr_start_db}, {snr_stop_db}] is empty"
                    )));
                }
                let mut snrs = Vec::new();
                let mut i = 0u32;
                loop {
                    let snr = snr_start_db + f64::from(i) * snr_step_db;
                    if snr > snr_stop_db + 1e-9 {
                        break;
                    }
                    snrs.push(snr);
                    i += 1;
                }
                Ok(ExperimentAxis::InputSnr { k: *k, snrs_db: snrs })
            }
        }
    }
}

/// One experiment's place in the simulate summary.
#[derive(Serialize)]
struct SummaryEntry {
    matrix: String,
    scenario: String,
    csv: String,
    m: usize,
    n: usize,
    points: Vec<detsense_core::PointRecord>,
}

#[derive(Serialize)]
struct SimulateSummary {
    config: SimulateConfig,
    results: Vec<SummaryEntry>,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: could not configure {threads} threads: {e}");
            std::process::exit(1);
        }
    }
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn seed_or_env(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("DETSENSE_SEED").ok().and_then(|s| s.parse().ok())
    })
    .unwrap_or(FALLBACK_SEED)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Construct { kind } => construct(kind),
        Command::Analyze { matrix, out, seed } => analyze(&matrix, out.as_deref(), seed),
        Command::Resize { method } => resize(method),
        Command::Compare { p, out } => compare(p, out.as_deref()),
        Command::Simulate { config, out_dir } => simulate(&config, &out_dir),
    }
}

/// One-line account of a matrix: shape, claimed and measured coherence,
/// Welch floor, and the usable sparsity it implies.
fn summary_line(matrix: &SensingMatrix, estimate: &CoherenceEstimate) -> String {
    let mut line = format!("{}x{}", matrix.m(), matrix.n());
    if let Some(claimed) = matrix.claimed_coherence() {
        line.push_str(&format!(" claimed={claimed:.6}"));
    }
    line.push_str(&format!(" mu={:.6}", estimate.value));
    if let Ok(welch) = welch_bound(matrix.m(), matrix.n()) {
        line.push_str(&format!(" welch={welch:.6} ratio={:.3}", estimate.value / welch));
    }
    if let Ok(rip) = rip_estimate(estimate.value.min(1.0)) {
        match rip.k_max {
            Some(k) => line.push_str(&format!(" rip_kmax={k}")),
            None => line.push_str(" rip_kmax=unbounded"),
        }
    }
    line
}

fn write_matrix(matrix: &SensingMatrix, out: &Path, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => matrix.write_json(out),
        OutputFormat::Csv => matrix.write_csv(out),
    }
}

fn report_matrix(matrix: &SensingMatrix, out: &Path) -> Result<()> {
    let estimate = coherence_estimate(matrix, FALLBACK_SEED)?;
    println!("{}", summary_line(matrix, &estimate));
    println!("wrote {}", out.display());
    Ok(())
}

fn construct(kind: ConstructKind) -> Result<()> {
    match kind {
        ConstructKind::Example1 { p, out, format, codebook_out } => {
            let matrix = construct_example1(p)?;
            write_matrix(&matrix, &out, format)?;
            if let Some(cb_path) = codebook_out {
                pattern_codebook(p, p)?.write_json(&cb_path)?;
                println!("wrote {}", cb_path.display());
            }
            report_matrix(&matrix, &out)
        }
        ConstructKind::Example2 { p, out, format, codebook_out } => {
            let matrix = construct_example2(p)?;
            write_matrix(&matrix, &out, format)?;
            if let Some(cb_path) = codebook_out {
                pattern_codebook(p, p - 1)?.write_json(&cb_path)?;
                println!("wrote {}", cb_path.display());
            }
            report_matrix(&matrix, &out)
        }
        ConstructKind::Example3 { q, k, row_seed, out, format } => {
            let selection = match row_seed {
                Some(seed) => RowSelection::Seeded(seed),
                None => RowSelection::Leading,
            };
            let matrix = construct_example3(q, k, selection)?;
            write_matrix(&matrix, &out, format)?;
            report_matrix(&matrix, &out)
        }
        ConstructKind::Gaussian { m, n, seed, out, format } => {
            let matrix = gaussian_matrix(m, n, seed)?;
            write_matrix(&matrix, &out, format)?;
            report_matrix(&matrix, &out)
        }
    }
}

fn analyze(matrix_path: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<()> {
    let matrix = SensingMatrix::read_json(matrix_path)?;
    let estimate = coherence_estimate(&matrix, seed_or_env(seed))?;
    let welch = welch_bound(matrix.m(), matrix.n()).ok();
    let report = AnalysisReport {
        m: matrix.m(),
        n: matrix.n(),
        construction: matrix.provenance().construction.clone(),
        p: matrix.provenance().p,
        claimed_coherence: matrix.claimed_coherence(),
        coherence: estimate,
        welch,
        ratio_to_welch: welch.map(|w| estimate.value / w),
        rip: rip_estimate(estimate.value.min(1.0))?,
        meets_claim: matrix
            .claimed_coherence()
            .map(|claimed| estimate.value <= claimed + 1e-9),
    };
    println!("{}", summary_line(&matrix, &estimate));
    if let Some(out_path) = out {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        std::fs::write(out_path, text)?;
        println!("wrote {}", out_path.display());
    }
    Ok(())
}

fn resize(method: ResizeMethod) -> Result<()> {
    match method {
        ResizeMethod::Kronecker { left, right, out } => {
            let a = SensingMatrix::read_json(&left)?;
            let b = SensingMatrix::read_json(&right)?;
            let grown = kronecker(&a, &b)?;
            grown.write_json(&out)?;
            report_matrix(&grown, &out)
        }
        ResizeMethod::Example4 { p, out, report, seed } => {
            if let Some(report_path) = report {
                let (matrix, resize_report) =
                    construct_example4_with_report(p, seed_or_env(seed))?;
                matrix.write_json(&out)?;
                let mut text = serde_json::to_string_pretty(&resize_report)?;
                text.push('\n');
                std::fs::write(&report_path, text)?;
                println!("wrote {}", report_path.display());
                println!("{}", summary_line(&matrix, &resize_report.output_coherence));
                println!("wrote {}", out.display());
                Ok(())
            } else {
                let matrix = construct_example4(p)?;
                matrix.write_json(&out)?;
                let estimate = coherence_estimate(&matrix, seed_or_env(seed))?;
                println!("{}", summary_line(&matrix, &estimate));
                println!("wrote {}", out.display());
                Ok(())
            }
        }
    }
}

fn compare(p: u64, out: Option<&Path>) -> Result<()> {
    let record = compare_vs_kronecker(p)?;
    println!(
        "p={} m={} n={} column_replacement={:.6} kronecker={:.6} winner={} margin={:.6}",
        record.p,
        record.m,
        record.n,
        record.column_replacement_coherence,
        record.kronecker_coherence,
        record.winner,
        record.margin
    );
    if let Some(out_path) = out {
        let mut text = serde_json::to_string_pretty(&record)?;
        text.push('\n');
        std::fs::write(out_path, text)?;
        println!("wrote {}", out_path.display());
    }
    Ok(())
}

fn simulate(config_path: &Path, out_dir: &Path) -> Result<()> {
    let text = std::fs::read_to_string(config_path)?;
    let config: SimulateConfig = serde_json::from_str(&text)?;
    if config.matrices.is_empty() {
        return Err(Error::Validation("the simulate config lists no matrices".into()));
    }
    if config.scenarios.is_empty() {
        return Err(Error::Validation("the simulate config lists no scenarios".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    // Scenario file tokens: the kind name, deduplicated by occurrence.
    let mut kind_counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    let scenario_tokens: Vec<String> = config
        .scenarios
        .iter()
        .map(|s| {
            let count = kind_counts.entry(s.kind_token()).or_insert(0);
            *count += 1;
            if *count == 1 {
                s.kind_token().to_string()
            } else {
                format!("{}_{}", s.kind_token(), count)
            }
        })
        .collect();

    let mut results = Vec::new();
    for source in &config.matrices {
        for (scenario, token) in config.scenarios.iter().zip(&scenario_tokens) {
            let experiment = ExperimentConfig {
                matrix: source.clone(),
                trials: config.trials,
                master_seed: config.seed,
                success_threshold: config.success_threshold,
                omp_stop: config.omp_stop,
                axis: scenario.axis()?,
            };
            let outcome = run_experiment(&experiment)?;
            let csv_name = format!("{}__{}.csv", source.label(), token);
            let csv_path = out_dir.join(&csv_name);
            std::fs::write(&csv_path, outcome.to_csv_string())?;
            println!("wrote {}", csv_path.display());
            results.push(SummaryEntry {
                matrix: source.label(),
                scenario: token.clone(),
                csv: csv_name,
                m: outcome.m,
                n: outcome.n,
                points: outcome.points,
            });
        }
    }

    let summary = SimulateSummary { config, results };
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    let summary_path = out_dir.join("summary.json");
    std::fs::write(&summary_path, text)?;
    println!("wrote {}", summary_path.display());
    Ok(())
}
