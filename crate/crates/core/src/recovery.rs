//! Sparse recovery experiments: seeded signal generation, noisy
//! measurement, orthogonal matching pursuit, and reproducible sweeps over
//! sparsity or input SNR. Every trial derives its own generator from the
//! master seed, the sweep point, and the trial index, so results do not
//! depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::resize::{construct_example3, construct_example4, RowSelection};
use crate::sensing::{construct_example1, construct_example2, Provenance, SensingMatrix};

/// Output SNRs are clipped here so exact recoveries stay finite.
pub const MAX_OUTPUT_SNR_DB: f64 = 300.0;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A vector that is zero outside a small support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    n: usize,
    support: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseSignal {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero positions, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Values at the support positions, in the same order.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut x = vec![Complex64::new(0.0, 0.0); self.n];
        for (&j, &v) in self.support.iter().zip(&self.values) {
            x[j] = v;
        }
        x
    }

    pub fn norm(&self) -> f64 {
        norm(&self.values)
    }
}

/// Draw a k-sparse signal: support uniform without replacement (kept
/// ascending), values standard complex Gaussian.
pub fn generate_sparse_signal(
    n: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<SparseSignal> {
    if n == 0 {
        return Err(Error::Dimension("signals need a positive dimension".into()));
    }
    if k > n {
        return Err(Error::Domain(format!("sparsity {k} exceeds the dimension {n}")));
    }
    let mut support = rand::seq::index::sample(rng, n, k).into_vec();
    support.sort_unstable();
    let values = support
        .iter()
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect();
    Ok(SparseSignal { n, support, values })
}

/// y = A x, plus (optionally) complex Gaussian noise scaled so the total
/// noise power sits input_snr_db below the clean measurement power.
pub fn measure(
    matrix: &SensingMatrix,
    signal: &SparseSignal,
    input_snr_db: Option<f64>,
    rng: &mut impl Rng,
) -> Result<Vec<Complex64>> {
    if signal.n() != matrix.n() {
        return Err(Error::Dimension(format!(
            "signal dimension {} does not match the matrix's {} columns",
            signal.n(),
            matrix.n()
        )));
    }
    let m = matrix.m();
    let entries = matrix.entries();
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for (&j, &v) in signal.support().iter().zip(signal.values()) {
        for i in 0..m {
            y[i] += entries[(i, j)] * v;
        }
    }
    if let Some(snr_db) = input_snr_db {
        let p_signal: f64 = y.iter().map(|z| z.norm_sqr()).sum();
        if p_signal == 0.0 {
            return Err(Error::Domain(
                "cannot target an SNR when the clean measurement is zero".into(),
            ));
        }
        let p_noise = p_signal / 10f64.powf(snr_db / 10.0);
        let sigma = (p_noise / (2.0 * m as f64)).sqrt();
        for yi in y.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *yi += Complex64::new(sigma * re, sigma * im);
        }
    }
    Ok(y)
}

/// When matching pursuit stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum OmpStop {
    /// Run exactly as many iterations as the target sparsity.
    ExactSparsity,
    /// Run until the residual norm drops to tol (or the iteration cap).
    ResidualTolerance { tol: f64 },
}

impl Default for OmpStop {
    fn default() -> Self {
        OmpStop::ExactSparsity
    }
}

/// What matching pursuit found.
#[derive(Debug, Clone, PartialEq)]
pub struct OmpResult {
    /// Selected columns, ascending.
    pub support: Vec<usize>,
    /// Least-squares coefficients, parallel to `support`.
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Orthogonal matching pursuit: greedily pick the column most correlated
/// with the residual (ties to the lowest index), refit all selected
/// coefficients by least squares, repeat.
pub fn omp(
    entries: &Array2<Complex64>,
    y: &[Complex64],
    sparsity: usize,
    stop: OmpStop,
) -> Result<OmpResult> {
    let (m, n) = entries.dim();
    if m == 0 || n == 0 {
        return Err(Error::Dimension("cannot run pursuit on an empty matrix".into()));
    }
    if y.len() != m {
        return Err(Error::Dimension(format!(
            "measurement length {} does not match the matrix's {m} rows",
            y.len()
        )));
    }
    let max_iters = match stop {
        OmpStop::ExactSparsity => {
            if sparsity > m.min(n) {
                return Err(Error::Domain(format!(
                    "sparsity {sparsity} exceeds what a {m}x{n} matrix can resolve"
                )));
            }
            sparsity
        }
        OmpStop::ResidualTolerance { tol } => {
            if !(tol >= 0.0) {
                return Err(Error::Domain(format!("residual tolerance {tol} must be >= 0")));
            }
            m.min(n)
        }
    };

    let mut selected: Vec<usize> = Vec::new();
    let mut in_support = vec![false; n];
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut residual: Vec<Complex64> = y.to_vec();
    let mut r_norm = norm(&residual);
    let mut iterations = 0;

    while iterations < max_iters {
        if let OmpStop::ResidualTolerance { tol } = stop {
            if r_norm <= tol {
                break;
            }
        }
        let mut best_j = usize::MAX;
        let mut best_c = -1.0;
        for j in 0..n {
            if in_support[j] {
                continue;
            }
            let c: Complex64 = (0..m).map(|i| entries[(i, j)].conj() * residual[i]).sum();
            let mag = c.norm();
            if mag > best_c {
                best_c = mag;
                best_j = j;
            }
        }
        if best_j == usize::MAX {
            break;
        }
        if matches!(stop, OmpStop::ResidualTolerance { .. })
            && best_c <= f64::EPSILON * r_norm.max(1.0)
        {
            // The residual is orthogonal to every remaining column; more
            // iterations cannot shrink it.
            break;
        }
        selected.push(best_j);
        in_support[best_j] = true;
        coeffs = least_squares(entries, &selected, y);
        residual.copy_from_slice(y);
        for (t, &j) in selected.iter().enumerate() {
            for i in 0..m {
                residual[i] -= entries[(i, j)] * coeffs[t];
            }
        }
        r_norm = norm(&residual);
        iterations += 1;
    }

    let mut order: Vec<usize> = (0..selected.len()).collect();
    order.sort_by_key(|&t| selected[t]);
    let support: Vec<usize> = order.iter().map(|&t| selected[t]).collect();
    let coefficients: Vec<Complex64> = order.iter().map(|&t| coeffs[t]).collect();
    Ok(OmpResult { support, coefficients, residual_norm: r_norm, iterations })
}

/// Solve min ||A_S c - y|| over the selected columns via the normal
/// equations; fall back to an eigendecomposition pseudoinverse when the
/// Gram matrix is numerically singular.
fn least_squares(entries: &Array2<Complex64>, selected: &[usize], y: &[Complex64]) -> Vec<Complex64> {
    let s = selected.len();
    let m = entries.nrows();
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); s]; s];
    for a in 0..s {
        for b in 0..s {
            gram[a][b] = (0..m)
                .map(|i| entries[(i, selected[a])].conj() * entries[(i, selected[b])])
                .sum();
        }
    }
    let rhs: Vec<Complex64> = (0..s)
        .map(|a| (0..m).map(|i| entries[(i, selected[a])].conj() * y[i]).sum())
        .collect();
    match cholesky_solve(&gram, &rhs) {
        Some(c) => c,
        None => {
            log::warn!(
                "normal equations for {s} selected columns are rank deficient; \
                 falling back to a pseudoinverse"
            );
            hermitian_pinv_solve(&gram, &rhs)
        }
    }
}

/// Cholesky factorization and solve for a Hermitian positive-definite
/// system. Returns None when a pivot is not safely positive.
fn cholesky_solve(g: &[Vec<Complex64>], rhs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = rhs.len();
    let gmax = (0..n).map(|i| g[i][i].re).fold(0.0f64, f64::max);
    let mut l = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k].conj();
            }
            if i == j {
                if s.re <= gmax * 1e-12 {
                    return None;
                }
                l[i][i] = Complex64::new(s.re.sqrt(), 0.0);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut z = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut s = rhs[i];
        for k in 0..i {
            s -= l[i][k] * z[k];
        }
        z[i] = s / l[i][i];
    }
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in (i + 1)..n {
            s -= l[k][i].conj() * c[k];
        }
        c[i] = s / l[i][i];
    }
    Some(c)
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix: each rotation
/// strips the phase off one off-diagonal entry and applies the real Jacobi
/// rotation for the resulting 2x2 symmetric block. Returns (eigenvalues,
/// unitary V) with A = V diag(eigenvalues) V^H.
fn hermitian_eigen(mut a: Vec<Vec<Complex64>>) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = a.len();
    let mut v = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        v[i][i] = Complex64::new(1.0, 0.0);
    }
    for _ in 0..60 {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum();
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                let r = apq.norm();
                if r < 1e-18 {
                    continue;
                }
                // Phase w turns the (p, q) block into a real symmetric one.
                let u = apq / r;
                let w = u.conj();
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                let c = theta.cos();
                let s = theta.sin();
                // Right-multiply by J with J[p][p]=c, J[p][q]=-s,
                // J[q][p]=w s, J[q][q]=w c.
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = akp * c + akq * (w * s);
                    a[k][q] = akp * (-s) + akq * (w * c);
                }
                // Left-multiply by J^H.
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = apk * c + aqk * (u * s);
                    a[q][k] = apk * (-s) + aqk * (u * c);
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = vkp * c + vkq * (w * s);
                    v[k][q] = vkp * (-s) + vkq * (w * c);
                }
                a[p][q] = Complex64::new(0.0, 0.0);
                a[q][p] = Complex64::new(0.0, 0.0);
                a[p][p] = Complex64::new(a[p][p].re, 0.0);
                a[q][q] = Complex64::new(a[q][q].re, 0.0);
            }
        }
    }
    let evals = (0..n).map(|i| a[i][i].re).collect();
    (evals, v)
}

/// Minimum-norm solution of G c = rhs for Hermitian positive-semidefinite
/// G: c = V diag(1/lambda or 0) V^H rhs.
fn hermitian_pinv_solve(g: &[Vec<Complex64>], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = rhs.len();
    let (evals, v) = hermitian_eigen(g.to_vec());
    let lmax = evals.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = lmax * 1e-12;
    let mut projected = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let vh_rhs: Complex64 = (0..n).map(|k| v[k][i].conj() * rhs[k]).sum();
        projected[i] = if evals[i] > cutoff {
            vh_rhs / evals[i]
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    (0..n)
        .map(|k| (0..n).map(|i| v[k][i] * projected[i]).sum())
        .collect()
}

/// Dense matrix with iid complex Gaussian entries, columns normalized.
pub fn gaussian_matrix(m: usize, n: usize, seed: u64) -> Result<SensingMatrix> {
    if m == 0 || n == 0 {
        return Err(Error::Dimension("matrices must be nonempty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Array2::from_elem((m, n), Complex64::new(0.0, 0.0));
    for i in 0..m {
        for j in 0..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            entries[(i, j)] = Complex64::new(re, im);
        }
    }
    for j in 0..n {
        let nrm = entries.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            return Err(Error::Validation(format!("drawn column {j} is numerically zero")));
        }
        for i in 0..m {
            entries[(i, j)] /= nrm;
        }
    }
    let provenance = Provenance::new("gaussian", None)
        .with_param("m", json!(m))
        .with_param("n", json!(n))
        .with_param("seed", json!(seed));
    SensingMatrix::new(entries, provenance, None)
}

/// Where an experiment's matrix comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "construction", rename_all = "snake_case")]
pub enum MatrixSource {
    Example1 { p: u64 },
    Example2 { p: u64 },
    Example3 {
        q: u64,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        row_seed: Option<u64>,
    },
    Example4 { p: u64 },
    Gaussian { m: usize, n: usize, seed: u64 },
    File { path: String },
}

impl MatrixSource {
    pub fn build(&self) -> Result<SensingMatrix> {
        match self {
            MatrixSource::Example1 { p } => construct_example1(*p),
            MatrixSource::Example2 { p } => construct_example2(*p),
            MatrixSource::Example3 { q, k, row_seed } => {
                let selection = match row_seed {
                    Some(seed) => RowSelection::Seeded(*seed),
                    None => RowSelection::Leading,
                };
                construct_example3(*q, *k, selection)
            }
            MatrixSource::Example4 { p } => construct_example4(*p),
            MatrixSource::Gaussian { m, n, seed } => gaussian_matrix(*m, *n, *seed),
            MatrixSource::File { path } => SensingMatrix::read_json(Path::new(path)),
        }
    }

    /// Short deterministic name, safe for file names.
    pub fn label(&self) -> String {
        match self {
            MatrixSource::Example1 { p } => format!("example1_p{p}"),
            MatrixSource::Example2 { p } => format!("example2_p{p}"),
            MatrixSource::Example3 { q, k, row_seed } => match row_seed {
                Some(seed) => format!("example3_q{q}_k{k}_s{seed}"),
                None => format!("example3_q{q}_k{k}"),
            },
            MatrixSource::Example4 { p } => format!("example4_p{p}"),
            MatrixSource::Gaussian { m, n, seed } => format!("gaussian_m{m}_n{n}_s{seed}"),
            MatrixSource::File { path } => {
                let stem = Path::new(path)
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_else(|| "matrix".to_string());
                let clean: String = stem
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
                    .collect();
                format!("file_{clean}")
            }
        }
    }
}

/// What varies across the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentAxis {
    /// Recovery rate as sparsity grows, at a fixed (optional) input SNR.
    Sparsity {
        ks: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input_snr_db: Option<f64>,
    },
    /// Recovery rate as input SNR grows, at a fixed sparsity.
    InputSnr { k: usize, snrs_db: Vec<f64> },
}

fn default_success_threshold() -> f64 {
    1e-3
}

/// Full description of a reproducible sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub matrix: MatrixSource,
    pub trials: usize,
    pub master_seed: u64,
    /// Relative l2 error below which a trial counts as recovered.
    #[serde(default = "default_success_threshold")]
    pub success_threshold: f64,
    #[serde(default)]
    pub omp_stop: OmpStop,
    pub axis: ExperimentAxis,
}

/// Aggregate outcome at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    /// The sweep coordinate: sparsity or input SNR in dB.
    pub x: f64,
    pub recovery_pct: f64,
    pub mean_output_snr_db: f64,
    pub trials: usize,
    pub seed: u64,
}

/// A finished sweep: the config echoed back plus one record per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub matrix_label: String,
    pub m: usize,
    pub n: usize,
    pub points: Vec<PointRecord>,
}

impl ExperimentResult {
    /// CSV with one line per sweep point.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("x_axis_value,recovery_pct,mean_output_snr_db,trials\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.x, p.recovery_pct, p.mean_output_snr_db, p.trials
            );
        }
        out
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn trial_rng(master_seed: u64, point_idx: u64, trial_idx: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&point_idx.to_le_bytes());
    seed[16..24].copy_from_slice(&trial_idx.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

fn run_point(
    matrix: &SensingMatrix,
    config: &ExperimentConfig,
    point_idx: usize,
    x: f64,
    k: usize,
    input_snr_db: Option<f64>,
) -> Result<PointRecord> {
    let n = matrix.n();
    let outcomes: Vec<Result<(bool, f64)>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(config.master_seed, point_idx as u64, trial as u64);
            let signal = generate_sparse_signal(n, k, &mut rng)?;
            let y = measure(matrix, &signal, input_snr_db, &mut rng)?;
            let pursuit = omp(matrix.entries(), &y, k, config.omp_stop)?;
            let x_true = signal.to_dense();
            let mut x_hat = vec![Complex64::new(0.0, 0.0); n];
            for (t, &j) in pursuit.support.iter().enumerate() {
                x_hat[j] = pursuit.coefficients[t];
            }
            let err2: f64 = x_true
                .iter()
                .zip(&x_hat)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            let sig2: f64 = x_true.iter().map(|z| z.norm_sqr()).sum();
            let success = if sig2 > 0.0 {
                (err2 / sig2).sqrt() <= config.success_threshold
            } else {
                err2.sqrt() <= config.success_threshold
            };
            let out_snr = if err2 == 0.0 {
                MAX_OUTPUT_SNR_DB
            } else if sig2 == 0.0 {
                -MAX_OUTPUT_SNR_DB
            } else {
                (10.0 * (sig2 / err2).log10()).clamp(-MAX_OUTPUT_SNR_DB, MAX_OUTPUT_SNR_DB)
            };
            Ok((success, out_snr))
        })
        .collect();

    // Aggregate sequentially, in trial order, so the totals cannot depend
    // on how the parallel trials were scheduled.
    let mut successes = 0usize;
    let mut snr_sum = 0.0;
    for outcome in outcomes {
        let (success, out_snr) = outcome?;
        if success {
            successes += 1;
        }
        snr_sum += out_snr;
    }
    Ok(PointRecord {
        x,
        recovery_pct: 100.0 * successes as f64 / config.trials as f64,
        mean_output_snr_db: snr_sum / config.trials as f64,
        trials: config.trials,
        seed: config.master_seed,
    })
}

/// Run the sweep the config describes.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if config.trials == 0 {
        return Err(Error::Domain("experiments need at least one trial".into()));
    }
    if !(config.success_threshold > 0.0) {
        return Err(Error::Domain(format!(
            "success threshold {} must be positive",
            config.success_threshold
        )));
    }
    let matrix = config.matrix.build()?;
    let points = match &config.axis {
        ExperimentAxis::Sparsity { ks, input_snr_db } => {
            if ks.is_empty() {
                return Err(Error::Domain("the sparsity sweep has no points".into()));
            }
            ks.iter()
                .enumerate()
                .map(|(pi, &k)| run_point(&matrix, config, pi, k as f64, k, *input_snr_db))
                .collect::<Result<Vec<_>>>()?
        }
        ExperimentAxis::InputSnr { k, snrs_db } => {
            if snrs_db.is_empty() {
                return Err(Error::Domain("the SNR sweep has no points".into()));
            }
            snrs_db
                .iter()
                .enumerate()
                .map(|(pi, &snr)| run_point(&matrix, config, pi, snr, *k, Some(snr)))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(ExperimentResult {
        config: config.clone(),
        matrix_label: config.matrix.label(),
        m: matrix.m(),
        n: matrix.n(),
        points,
    })
}

/// As `run_experiment`, insisting on a sparsity axis.
pub fn run_recovery_vs_sparsity(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if !matches!(config.axis, ExperimentAxis::Sparsity { .. }) {
        return Err(Error::Domain(
            "this runner expects a sparsity axis".into(),
        ));
    }
    run_experiment(config)
}

/// As `run_experiment`, insisting on an input-SNR axis.
pub fn run_snr_sweep(config: &ExperimentConfig) -> Result<ExperimentResult> {
    if !matches!(config.axis, ExperimentAxis::InputSnr { .. }) {
        return Err(Error::Domain(
            "this runner expects an input-SNR axis".into(),
        ));
    }
    run_experiment(config)
}

/// Params map for provenance-style reporting of a source.
pub fn source_params(source: &MatrixSource) -> BTreeMap<String, serde_json::Value> {
    let mut map = BTreeMap::new();
    if let Ok(v) = serde_json::to_value(source) {
        if let serde_json::Value::Object(obj) = v {
            for (k, val) in obj {
                map.insert(k, val);
            }
        }
    }
    map
}
