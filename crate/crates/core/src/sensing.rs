//! Sensing matrices built from finite-field codes: coset reduction,
//! exponentiation to unit-modulus complex entries, exact and sampled
//! coherence, and the classical bounds (Welch, RIP-from-coherence, and a
//! distance-based coherence bound).

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::TAU;
use std::io::Write as _;
use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::codes::{enumerate_codewords, rs2_generator};
use crate::colrep::compose_codebooks;
use crate::error::{Error, Result};
use crate::galois::FieldSpec;

/// Columns must be unit-norm within this tolerance.
pub const UNIT_NORM_TOL: f64 = 1e-10;
/// Above this many column pairs, coherence estimation samples instead of
/// enumerating.
pub const FULL_COHERENCE_PAIR_LIMIT: u64 = 1_000_000;
/// Pairs drawn by a sampled coherence estimate unless the caller overrides.
pub const DEFAULT_SAMPLE_PAIRS: usize = 1_000_000;
/// Seed used when the caller does not supply one.
pub const DEFAULT_SAMPLE_SEED: u64 = 1;

const MATRIX_FORMAT_VERSION: u32 = 1;

/// How a matrix was built: a construction label, the base prime when there
/// is one, and free-form parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub p: Option<u64>,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl Provenance {
    pub fn new(construction: impl Into<String>, p: Option<u64>) -> Self {
        Provenance { construction: construction.into(), p, params: BTreeMap::new() }
    }

    pub fn with_param(mut self, key: &str, value: serde_json::Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Integer parameter lookup, for params known to be counts.
    pub fn usize_param(&self, key: &str) -> Option<usize> {
        self.params.get(key).and_then(|v| v.as_u64()).map(|v| v as usize)
    }
}

/// Complex measurement matrix with unit-norm columns.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    entries: Array2<Complex64>,
    provenance: Provenance,
    claimed_coherence: Option<f64>,
}

impl SensingMatrix {
    pub fn new(
        entries: Array2<Complex64>,
        provenance: Provenance,
        claimed_coherence: Option<f64>,
    ) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::Dimension("sensing matrices must be nonempty".into()));
        }
        for j in 0..entries.ncols() {
            let norm = entries.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > UNIT_NORM_TOL {
                return Err(Error::Validation(format!(
                    "column {j} has norm {norm}, expected 1 within {UNIT_NORM_TOL:e}"
                )));
            }
        }
        Ok(SensingMatrix { entries, provenance, claimed_coherence })
    }

    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn claimed_coherence(&self) -> Option<f64> {
        self.claimed_coherence
    }

    /// Relabel a matrix built through a generic path with the provenance of
    /// the specific construction it realizes.
    pub(crate) fn with_provenance(
        mut self,
        provenance: Provenance,
        claimed_coherence: Option<f64>,
    ) -> Self {
        self.provenance = provenance;
        self.claimed_coherence = claimed_coherence;
        self
    }

    pub fn to_json_string(&self) -> Result<String> {
        let entries = self
            .entries
            .rows()
            .into_iter()
            .flat_map(|row| row.iter().map(|z| [clean_zero(z.re), clean_zero(z.im)]).collect::<Vec<_>>())
            .collect();
        let file = MatrixFile {
            format_version: MATRIX_FORMAT_VERSION,
            m: self.m(),
            n: self.n(),
            construction: self.provenance.construction.clone(),
            p: self.provenance.p,
            params: self.provenance.params.clone(),
            claimed_coherence: self.claimed_coherence,
            entries,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json_string()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: MatrixFile = serde_json::from_str(text)?;
        if file.format_version != MATRIX_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "unsupported matrix format version {}",
                file.format_version
            )));
        }
        if file.entries.len() != file.m * file.n {
            return Err(Error::Validation(format!(
                "matrix file declares {}x{} but carries {} entries",
                file.m,
                file.n,
                file.entries.len()
            )));
        }
        let data: Vec<Complex64> =
            file.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let entries = Array2::from_shape_vec((file.m, file.n), data)
            .map_err(|e| Error::Validation(format!("bad matrix shape: {e}")))?;
        let provenance = Provenance {
            construction: file.construction,
            p: file.p,
            params: file.params,
        };
        SensingMatrix::new(entries, provenance, file.claimed_coherence)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    /// One matrix row per line, entries comma-separated as `re+imj`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for row in self.entries.rows() {
            let mut first = true;
            for z in row.iter() {
                if !first {
                    out.push(',');
                }
                first = false;
                let re = clean_zero(z.re);
                let im = clean_zero(z.im);
                let sign = if im < 0.0 { '-' } else { '+' };
                out.push_str(&format!("{re}{sign}{}j", im.abs()));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// Map IEEE negative zero to positive zero so serialized output is stable.
fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    format_version: u32,
    m: usize,
    n: usize,
    construction: String,
    p: Option<u64>,
    #[serde(default)]
    params: BTreeMap<String, serde_json::Value>,
    claimed_coherence: Option<f64>,
    entries: Vec<[f64; 2]>,
}

/// Replace each column of a code matrix by its coset representative modulo
/// the all-one codeword: the coset member whose first coordinate is zero.
/// Deduplicates cosets in first-seen order; every representative must itself
/// be a column of the input.
pub fn coset_reduce(matrix: &Array2<u64>, p: u64) -> Result<Array2<u64>> {
    if p < 2 {
        return Err(Error::Domain(format!("modulus {p} is not a field size")));
    }
    if matrix.nrows() == 0 || matrix.ncols() == 0 {
        return Err(Error::Dimension("cannot reduce an empty matrix".into()));
    }
    if let Some(&bad) = matrix.iter().find(|&&e| e >= p) {
        return Err(Error::Domain(format!("entry {bad} out of range mod {p}")));
    }
    let n = matrix.ncols();
    let cols: Vec<Vec<u64>> = (0..n).map(|j| matrix.column(j).to_vec()).collect();
    let ones = vec![1u64; matrix.nrows()];
    if !cols.iter().any(|c| *c == ones) {
        return Err(Error::MissingAllOne(
            "coset reduction needs the all-one column".into(),
        ));
    }
    if n % p as usize != 0 {
        return Err(Error::Reduction(format!(
            "{n} columns cannot split into cosets of size {p}"
        )));
    }
    let members: HashSet<&[u64]> = cols.iter().map(|c| c.as_slice()).collect();
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut reps: Vec<Vec<u64>> = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let shift = col[0];
        let rep: Vec<u64> = col.iter().map(|&c| (c + p - shift) % p).collect();
        if !members.contains(rep.as_slice()) {
            return Err(Error::Reduction(format!(
                "representative of column {j} is not a column; the input is not closed under all-one shifts"
            )));
        }
        if seen.insert(rep.clone()) {
            reps.push(rep);
        }
    }
    let expected = n / p as usize;
    if reps.len() != expected {
        return Err(Error::Reduction(format!(
            "expected {expected} cosets from {n} columns mod {p}, found {}",
            reps.len()
        )));
    }
    let rows = matrix.nrows();
    let mut out = Array2::zeros((rows, expected));
    for (j, rep) in reps.iter().enumerate() {
        for (i, &v) in rep.iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

/// Map residues to unit-modulus complex exponentials, scaled so columns are
/// unit vectors: entry c becomes e^{i 2 pi c / p} / sqrt(rows).
pub fn exponentiate(matrix: &Array2<u64>, p: u64) -> Result<Array2<Complex64>> {
    if p < 2 {
        return Err(Error::Domain(format!("modulus {p} is not a field size")));
    }
    if matrix.nrows() == 0 {
        return Err(Error::Dimension("cannot exponentiate an empty matrix".into()));
    }
    if let Some(&bad) = matrix.iter().find(|&&e| e >= p) {
        return Err(Error::Domain(format!("entry {bad} out of range mod {p}")));
    }
    let scale = 1.0 / (matrix.nrows() as f64).sqrt();
    Ok(matrix.map(|&c| Complex64::from_polar(scale, TAU * c as f64 / p as f64)))
}

/// Lower bound on the coherence of any m x n matrix with unit-norm columns:
/// sqrt((n - m) / (m (n - 1))). Only defined for n > m.
pub fn welch_bound(m: usize, n: usize) -> Result<f64> {
    if m == 0 || n <= m {
        return Err(Error::Domain(format!(
            "the coherence floor needs more columns than rows, got {m}x{n}"
        )));
    }
    Ok((((n - m) as f64) / ((m * (n - 1)) as f64)).sqrt())
}

/// Upper bound on coherence for an exponentiated length-N prime-field code
/// of minimum distance d: (p (p - 1) N - p^2 d) / (2 N). Can exceed 1, in
/// which case it says nothing.
pub fn distance_coherence_bound(p: u64, n: usize, d: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::Domain(format!("modulus {p} is not a field size")));
    }
    if n == 0 || d > n {
        return Err(Error::Domain(format!(
            "distance {d} is impossible for length {n}"
        )));
    }
    let pf = p as f64;
    let nf = n as f64;
    let df = d as f64;
    Ok((pf * (pf - 1.0) * nf - pf * pf * df) / (2.0 * nf))
}

/// Sparsity guarantees implied by coherence: columns behave like an
/// isometry on k-sparse vectors up to delta_k <= mu (k - 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RipEstimate {
    /// Largest usable sparsity, floor(1/mu + 1); None when mu = 0 (no limit).
    pub k_max: Option<u64>,
    /// The isometry defect bound at k_max.
    pub delta_at_k_max: Option<f64>,
}

pub fn rip_estimate(mu: f64) -> Result<RipEstimate> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("coherence {mu} is outside [0, 1]")));
    }
    if mu == 0.0 {
        return Ok(RipEstimate { k_max: None, delta_at_k_max: None });
    }
    let k_max = (1.0 / mu + 1.0 + 1e-9).floor() as u64;
    let delta = mu * (k_max as f64 - 1.0);
    Ok(RipEstimate { k_max: Some(k_max), delta_at_k_max: Some(delta) })
}

/// Exact coherence of a matrix, with the bounds it can be compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    /// max_{i<j} |<a_i, a_j>| / (|a_i| |a_j|), enumerated over all pairs.
    pub exact: f64,
    /// Lexicographically first column pair attaining the maximum.
    pub argmax: (usize, usize),
    /// Welch floor, when n > m.
    pub welch: Option<f64>,
    /// exact / welch, when the floor is defined.
    pub ratio_to_welch: Option<f64>,
    /// Distance-based ceiling, when provenance records a code distance.
    pub distance_bound: Option<f64>,
}

/// How a coherence estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CoherenceMethod {
    Full,
    Sampled { pairs: usize, seed: u64 },
}

/// Coherence measured either over every pair or over a random sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceEstimate {
    pub value: f64,
    pub argmax: (usize, usize),
    #[serde(flatten)]
    pub method: CoherenceMethod,
}

fn column_norms(entries: &Array2<Complex64>) -> Vec<f64> {
    (0..entries.ncols())
        .map(|j| entries.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

fn normalized_inner(
    entries: &Array2<Complex64>,
    norms: &[f64],
    i: usize,
    j: usize,
) -> f64 {
    let inner: Complex64 = entries
        .column(i)
        .iter()
        .zip(entries.column(j).iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    inner.norm() / (norms[i] * norms[j])
}

/// Exact maximum normalized inner product over all column pairs, with the
/// lexicographically first attaining pair. Needs at least two columns.
pub fn max_normalized_inner(entries: &Array2<Complex64>) -> Result<(f64, (usize, usize))> {
    let n = entries.ncols();
    if n < 2 {
        return Err(Error::Domain("coherence needs at least two columns".into()));
    }
    let norms = column_norms(entries);
    let best = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let mut row_best = (f64::NEG_INFINITY, (0usize, 0usize));
            for j in (i + 1)..n {
                let v = normalized_inner(entries, &norms, i, j);
                if v > row_best.0 {
                    row_best = (v, (i, j));
                }
            }
            row_best
        })
        .reduce(
            || (f64::NEG_INFINITY, (usize::MAX, usize::MAX)),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(best)
}

/// Exact coherence with the Welch floor and, when the provenance records a
/// code distance, the distance-based ceiling.
pub fn coherence(matrix: &SensingMatrix) -> Result<CoherenceReport> {
    let (exact, argmax) = max_normalized_inner(matrix.entries())?;
    let welch = welch_bound(matrix.m(), matrix.n()).ok();
    let ratio_to_welch = welch.map(|w| exact / w);
    let distance_bound = match (matrix.provenance().p, matrix.provenance().usize_param("code_min_distance")) {
        (Some(p), Some(d)) => distance_coherence_bound(p, matrix.m(), d).ok(),
        _ => None,
    };
    Ok(CoherenceReport { exact, argmax, welch, ratio_to_welch, distance_bound })
}

/// Coherence lower estimate from a seeded random sample of column pairs.
pub fn sampled_coherence(
    matrix: &SensingMatrix,
    pairs: usize,
    seed: u64,
) -> Result<CoherenceEstimate> {
    let n = matrix.n();
    if n < 2 {
        return Err(Error::Domain("coherence needs at least two columns".into()));
    }
    if pairs == 0 {
        return Err(Error::Domain("a sampled estimate needs at least one pair".into()));
    }
    let entries = matrix.entries();
    let norms = column_norms(entries);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled: Vec<(usize, usize)> = (0..pairs)
        .map(|_| {
            let i = rng.gen_range(0..n);
            let mut j = rng.gen_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            (i.min(j), i.max(j))
        })
        .collect();
    let best = sampled
        .into_par_iter()
        .map(|(i, j)| (normalized_inner(entries, &norms, i, j), (i, j)))
        .reduce(
            || (f64::NEG_INFINITY, (usize::MAX, usize::MAX)),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    Ok(CoherenceEstimate {
        value: best.0,
        argmax: best.1,
        method: CoherenceMethod::Sampled { pairs, seed },
    })
}

/// Full enumeration when the pair count is tractable, sampled otherwise.
pub fn coherence_estimate(matrix: &SensingMatrix, seed: u64) -> Result<CoherenceEstimate> {
    let n = matrix.n() as u64;
    let total_pairs = n * (n - 1) / 2;
    if total_pairs <= FULL_COHERENCE_PAIR_LIMIT {
        let (value, argmax) = max_normalized_inner(matrix.entries())?;
        Ok(CoherenceEstimate { value, argmax, method: CoherenceMethod::Full })
    } else {
        sampled_coherence(matrix, DEFAULT_SAMPLE_PAIRS, seed)
    }
}

/// Two-row code over GF(p) evaluated at every field element, composed with
/// a two-row code over GF(p^2) evaluated at the prime-subfield points, then
/// coset-reduced and exponentiated: a p^2 x p^3 matrix with coherence 1/p.
pub fn construct_example1(p: u64) -> Result<SensingMatrix> {
    construct_reduced(p, p, "example1", 1.0 / p as f64)
}

/// Same shape as `construct_example1` but evaluating the extension code at
/// one point fewer: a p(p-1) x p^3 matrix with coherence 1/(p-1). Needs
/// p >= 3.
pub fn construct_example2(p: u64) -> Result<SensingMatrix> {
    if p < 3 {
        return Err(Error::DegenerateCode(format!(
            "a {p}(p-1)-row construction needs p >= 3"
        )));
    }
    construct_reduced(p, p - 1, "example2", 1.0 / (p as f64 - 1.0))
}

/// The base codebook both reduced constructions stack: the two-row code
/// over GF(p) evaluated at every field element.
pub fn base_codebook(p: u64) -> Result<crate::codes::Codebook> {
    let fp = FieldSpec::prime(p)?;
    let base_points = fp.elements();
    enumerate_codewords(&rs2_generator(&fp, &base_points)?)
}

/// The extension-field codebook whose codewords drive the column
/// replacement in the reduced constructions: the two-row code over GF(p^2)
/// evaluated at the first `pattern_points` elements.
pub fn pattern_codebook(p: u64, pattern_points: u64) -> Result<crate::codes::Codebook> {
    let f2 = FieldSpec::extension(p, 2)?;
    let ext_points: Vec<_> = (0..pattern_points)
        .map(|i| f2.element_from_index(i))
        .collect::<Result<_>>()?;
    enumerate_codewords(&rs2_generator(&f2, &ext_points)?)
}

fn construct_reduced(
    p: u64,
    pattern_points: u64,
    construction: &str,
    claimed: f64,
) -> Result<SensingMatrix> {
    let base_cb = base_codebook(p)?;
    let pattern_cb = pattern_codebook(p, pattern_points)?;

    let comp = compose_codebooks(&base_cb, &pattern_cb)?;
    let reduced = coset_reduce(&comp.matrix, p)?;
    let entries = exponentiate(&reduced, p)?;

    let provenance = Provenance::new(construction, Some(p))
        .with_param("code_min_distance", json!(comp.exact_min_distance))
        .with_param("predicted_min_distance", json!(comp.predicted_min_distance));
    SensingMatrix::new(entries, provenance, Some(claimed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ndarray::array;

    #[test]
    fn welch_bound_matches_frozen_values() {
        assert_abs_diff_eq!(welch_bound(25, 125).unwrap(), (1.0f64 / 31.0).sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(welch_bound(25, 125).unwrap(), 0.179605, epsilon = 1e-6);
        assert_abs_diff_eq!(welch_bound(4, 5).unwrap(), 0.25, epsilon = 1e-15);
        assert!(matches!(welch_bound(5, 5), Err(Error::Domain(_))));
        assert!(matches!(welch_bound(5, 4), Err(Error::Domain(_))));
        assert!(matches!(welch_bound(0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn rip_estimate_matches_frozen_values() {
        let r = rip_estimate(0.2).unwrap();
        assert_eq!(r.k_max, Some(6));
        assert_abs_diff_eq!(r.delta_at_k_max.unwrap(), 1.0, epsilon = 1e-12);
        let r = rip_estimate(0.25).unwrap();
        assert_eq!(r.k_max, Some(5));
        assert_abs_diff_eq!(r.delta_at_k_max.unwrap(), 1.0, epsilon = 1e-12);
        let r = rip_estimate(1.0).unwrap();
        assert_eq!(r.k_max, Some(2));
        let r = rip_estimate(0.0).unwrap();
        assert_eq!(r.k_max, None);
        assert!(matches!(rip_estimate(1.5), Err(Error::Domain(_))));
        assert!(matches!(rip_estimate(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn distance_bound_matches_frozen_values() {
        assert_abs_diff_eq!(distance_coherence_bound(2, 8, 4).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(distance_coherence_bound(5, 25, 16).unwrap(), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(distance_coherence_bound(2, 8, 3).unwrap(), 0.25, epsilon = 1e-15);
        assert!(matches!(distance_coherence_bound(2, 4, 5), Err(Error::Domain(_))));
        assert!(matches!(distance_coherence_bound(2, 0, 0), Err(Error::Domain(_))));
    }

    fn example1_composed(p: u64) -> Array2<u64> {
        let fp = FieldSpec::prime(p).unwrap();
        let base = enumerate_codewords(&rs2_generator(&fp, &fp.elements()).unwrap()).unwrap();
        let f2 = FieldSpec::extension(p, 2).unwrap();
        let pts: Vec<_> = (0..p).map(|i| f2.element_from_index(i).unwrap()).collect();
        let pat = enumerate_codewords(&rs2_generator(&f2, &pts).unwrap()).unwrap();
        compose_codebooks(&base, &pat).unwrap().matrix
    }

    #[test]
    fn coset_reduction_keeps_one_representative_per_coset() {
        let composed = example1_composed(3);
        assert_eq!(composed.dim(), (9, 81));
        let reduced = coset_reduce(&composed, 3).unwrap();
        assert_eq!(reduced.dim(), (9, 27));
        // Representatives start with 0, are distinct, and appear in the input.
        let members: HashSet<Vec<u64>> =
            (0..81).map(|j| composed.column(j).to_vec()).collect();
        let mut seen = HashSet::new();
        for j in 0..27 {
            let col = reduced.column(j).to_vec();
            assert_eq!(col[0], 0);
            assert!(members.contains(&col));
            assert!(seen.insert(col));
        }
        // Every input column lands in exactly one kept coset.
        for j in 0..81 {
            let col = composed.column(j);
            let shift = col[0];
            let rep: Vec<u64> = col.iter().map(|&c| (c + 3 - shift) % 3).collect();
            assert!((0..27).any(|r| reduced.column(r).iter().eq(rep.iter())));
        }
    }

    #[test]
    fn coset_reduction_rejects_unreducible_input() {
        // All-one column missing.
        let no_one: Array2<u64> = array![[0, 0], [0, 1]];
        assert!(matches!(coset_reduce(&no_one, 2), Err(Error::MissingAllOne(_))));
        // Representative of a column is absent: the coset of [1,0,0] has
        // representative [0,1,1], which is not a column.
        let missing_rep: Array2<u64> = array![[1, 1], [1, 0], [1, 0]];
        assert!(matches!(coset_reduce(&missing_rep, 2), Err(Error::Reduction(_))));
        // Column count not divisible by p.
        let ragged: Array2<u64> = array![[0, 1, 0], [0, 1, 1]];
        assert!(matches!(coset_reduce(&ragged, 2), Err(Error::Reduction(_))));
        // Entries out of range.
        let bad: Array2<u64> = array![[0, 2], [0, 2]];
        assert!(matches!(coset_reduce(&bad, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn exponentiation_is_unit_modulus_and_matches_hand_values() {
        let m: Array2<u64> = array![[0], [1]];
        let e = exponentiate(&m, 2).unwrap();
        let s = 1.0 / 2.0f64.sqrt();
        assert_abs_diff_eq!(e[(0, 0)].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(0, 0)].im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(1, 0)].re, -s, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(1, 0)].im, 0.0, epsilon = 1e-12);

        let m: Array2<u64> = array![[0, 1, 2]];
        let e = exponentiate(&m, 3).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(e[(0, j)].norm(), 1.0, epsilon = 1e-12);
            let expected = Complex64::from_polar(1.0, TAU * j as f64 / 3.0);
            assert_abs_diff_eq!(e[(0, j)].re, expected.re, epsilon = 1e-12);
            assert_abs_diff_eq!(e[(0, j)].im, expected.im, epsilon = 1e-12);
        }
        assert!(matches!(exponentiate(&array![[3u64]], 3), Err(Error::Domain(_))));
    }

    #[test]
    fn example1_has_coherence_one_over_p() {
        for p in [2u64, 3] {
            let mat = construct_example1(p).unwrap();
            assert_eq!(mat.m(), (p * p) as usize);
            assert_eq!(mat.n(), (p * p * p) as usize);
            assert_eq!(mat.claimed_coherence(), Some(1.0 / p as f64));
            let report = coherence(&mat).unwrap();
            assert_abs_diff_eq!(report.exact, 1.0 / p as f64, epsilon = 1e-12);
            // The attaining pair really has that inner product.
            let (i, j) = report.argmax;
            let inner: Complex64 = mat
                .entries()
                .column(i)
                .iter()
                .zip(mat.entries().column(j).iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            assert_abs_diff_eq!(inner.norm(), report.exact, epsilon = 1e-12);
            assert!(report.welch.unwrap() > 0.0);
            assert!(report.ratio_to_welch.unwrap() >= 1.0);
        }
    }

    #[test]
    fn example1_reports_the_distance_ceiling() {
        let mat = construct_example1(3).unwrap();
        assert_eq!(mat.provenance().usize_param("code_min_distance"), Some(4));
        assert_eq!(mat.provenance().usize_param("predicted_min_distance"), Some(4));
        let report = coherence(&mat).unwrap();
        // (3*2*9 - 9*4) / (2*9) = 1.
        assert_abs_diff_eq!(report.distance_bound.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn example2_has_coherence_one_over_p_minus_one() {
        let mat = construct_example2(3).unwrap();
        assert_eq!(mat.m(), 6);
        assert_eq!(mat.n(), 27);
        assert_eq!(mat.claimed_coherence(), Some(0.5));
        let report = coherence(&mat).unwrap();
        assert_abs_diff_eq!(report.exact, 0.5, epsilon = 1e-12);
        assert!(matches!(construct_example2(2), Err(Error::DegenerateCode(_))));
        assert!(matches!(construct_example1(4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn welch_ratio_for_the_25x125_matrix_matches_the_frozen_value() {
        let mat = construct_example1(5).unwrap();
        assert_eq!((mat.m(), mat.n()), (25, 125));
        let report = coherence(&mat).unwrap();
        assert_abs_diff_eq!(report.exact, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(report.welch.unwrap(), 0.179605, epsilon = 1e-6);
        assert_abs_diff_eq!(report.ratio_to_welch.unwrap(), 1.1135, epsilon = 1e-3);
    }

    #[test]
    fn sampled_estimates_never_exceed_and_often_reach_the_exact_value() {
        let mat = construct_example1(5).unwrap();
        let exact = coherence(&mat).unwrap().exact;
        let sampled = sampled_coherence(&mat, 2000, DEFAULT_SAMPLE_SEED).unwrap();
        assert!(sampled.value <= exact + 1e-12);
        // 2000 draws over 7750 pairs hit a coherence pair w.h.p. (they are
        // plentiful in this construction).
        assert_abs_diff_eq!(sampled.value, exact, epsilon = 1e-12);
        match sampled.method {
            CoherenceMethod::Sampled { pairs, seed } => {
                assert_eq!(pairs, 2000);
                assert_eq!(seed, DEFAULT_SAMPLE_SEED);
            }
            CoherenceMethod::Full => panic!("expected a sampled estimate"),
        }
        // Deterministic given the seed.
        let again = sampled_coherence(&mat, 2000, DEFAULT_SAMPLE_SEED).unwrap();
        assert_eq!(sampled.value, again.value);
        assert_eq!(sampled.argmax, again.argmax);
        // Auto mode enumerates this small matrix fully.
        let auto = coherence_estimate(&mat, DEFAULT_SAMPLE_SEED).unwrap();
        assert!(matches!(auto.method, CoherenceMethod::Full));
        assert_abs_diff_eq!(auto.value, exact, epsilon = 1e-15);
    }

    #[test]
    fn matrix_json_roundtrips_and_is_byte_stable() {
        let mat = construct_example1(3).unwrap();
        let text = mat.to_json_string().unwrap();
        let back = SensingMatrix::from_json_str(&text).unwrap();
        assert_eq!(back.m(), mat.m());
        assert_eq!(back.n(), mat.n());
        assert_eq!(back.provenance(), mat.provenance());
        assert_eq!(back.claimed_coherence(), mat.claimed_coherence());
        for (a, b) in mat.entries().iter().zip(back.entries().iter()) {
            assert_eq!(clean_zero(a.re), b.re);
            assert_eq!(clean_zero(a.im), b.im);
        }
        assert_eq!(text, back.to_json_string().unwrap());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("matrix.json");
        mat.write_json(&path).unwrap();
        let from_disk = SensingMatrix::read_json(&path).unwrap();
        assert_eq!(from_disk.to_json_string().unwrap(), text);

        let mut corrupted: serde_json::Value = serde_json::from_str(&text).unwrap();
        corrupted["format_version"] = json!(9);
        assert!(matches!(
            SensingMatrix::from_json_str(&corrupted.to_string()),
            Err(Error::Validation(_))
        ));
        corrupted["format_version"] = json!(1);
        corrupted["m"] = json!(999);
        assert!(matches!(
            SensingMatrix::from_json_str(&corrupted.to_string()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn csv_export_prints_re_plus_im_j_cells() {
        let s = 1.0 / 2.0f64.sqrt();
        let entries = array![
            [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(-s, -0.0)],
        ];
        let mat = SensingMatrix::new(entries, Provenance::new("test", None), None).unwrap();
        let csv = mat.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], format!("{s}+0j,{s}+0j"));
        // Negative zero imaginary parts are normalized to +0.
        assert_eq!(lines[1], format!("{s}+0j,{}+0j", -s));
    }

    #[test]
    fn non_unit_columns_are_rejected() {
        let entries = array![[Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]];
        assert!(matches!(
            SensingMatrix::new(entries, Provenance::new("test", None), None),
            Err(Error::Validation(_))
        ));
    }
}
