//! Column replacement: building a tall matrix by substituting, for every
//! entry of a pattern matrix, the primary-matrix column that entry indexes.
//! Composing two codebooks this way yields a longer code whose minimum
//! distance is bounded from the operands' distances.

use std::collections::HashSet;
use std::sync::OnceLock;

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::Codebook;
use crate::error::{Error, Result};

/// Column count up to which closure checks enumerate every pair; above it
/// they fall back to seeded random probes.
const CLOSURE_EXHAUSTIVE_LIMIT: usize = 729;
const CLOSURE_PROBES: usize = 1000;
const CLOSURE_PROBE_SEED: u64 = 0x636f6c72;

/// Matrix of column indices into some primary matrix. Entries lie in
/// [0, alphabet_size).
#[derive(Debug)]
pub struct PatternMatrix {
    entries: Array2<usize>,
    alphabet_size: usize,
    max_agreement: OnceLock<usize>,
}

impl Clone for PatternMatrix {
    fn clone(&self) -> Self {
        let cache = OnceLock::new();
        if let Some(&v) = self.max_agreement.get() {
            let _ = cache.set(v);
        }
        PatternMatrix { entries: self.entries.clone(), alphabet_size: self.alphabet_size, max_agreement: cache }
    }
}

impl PatternMatrix {
    pub fn new(entries: Array2<usize>, alphabet_size: usize) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::Dimension("pattern matrices must be nonempty".into()));
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= alphabet_size) {
            return Err(Error::Domain(format!(
                "pattern entry {bad} out of range for alphabet of size {alphabet_size}"
            )));
        }
        Ok(PatternMatrix { entries, alphabet_size, max_agreement: OnceLock::new() })
    }

    /// Pattern whose entry (i, j) is the element index of codeword j at
    /// coordinate i; the alphabet is the codebook's field.
    pub fn from_codebook(cb: &Codebook) -> Self {
        PatternMatrix {
            entries: cb.index_matrix(),
            alphabet_size: cb.code().field().order() as usize,
            max_agreement: OnceLock::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn entries(&self) -> &Array2<usize> {
        &self.entries
    }

    /// Keep only the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<PatternMatrix> {
        if rows.is_empty() {
            return Err(Error::Dimension("row selection must be nonempty".into()));
        }
        let mut distinct = HashSet::new();
        for &r in rows {
            if r >= self.nrows() {
                return Err(Error::Domain(format!(
                    "row {r} out of range for a pattern with {} rows",
                    self.nrows()
                )));
            }
            if !distinct.insert(r) {
                return Err(Error::Domain(format!("row {r} selected twice")));
            }
        }
        let mut out = Array2::zeros((rows.len(), self.ncols()));
        for (i, &r) in rows.iter().enumerate() {
            for j in 0..self.ncols() {
                out[(i, j)] = self.entries[(r, j)];
            }
        }
        PatternMatrix::new(out, self.alphabet_size)
    }

    /// Largest number of coordinates in which two distinct columns agree.
    /// Brute force over all pairs, cached after the first call.
    pub fn max_pairwise_agreement(&self) -> Result<usize> {
        if self.ncols() < 2 {
            return Err(Error::Domain(
                "pairwise agreement needs at least two pattern columns".into(),
            ));
        }
        Ok(*self.max_agreement.get_or_init(|| {
            let cols: Vec<Vec<usize>> = (0..self.ncols())
                .map(|j| self.entries.column(j).to_vec())
                .collect();
            (0..cols.len() - 1)
                .into_par_iter()
                .map(|i| {
                    let a = &cols[i];
                    cols[i + 1..]
                        .iter()
                        .map(|b| a.iter().zip(b).filter(|(x, y)| x == y).count())
                        .max()
                        .unwrap_or(0)
                })
                .max()
                .unwrap_or(0)
        }))
    }
}

/// Stack one primary column per pattern entry: output block row beta of
/// column gamma is primary column pattern[beta][gamma].
pub fn column_replace<T: Clone>(primary: &Array2<T>, pattern: &PatternMatrix) -> Result<Array2<T>> {
    let (r, m) = primary.dim();
    if r == 0 || m == 0 {
        return Err(Error::Dimension("primary matrices must be nonempty".into()));
    }
    if pattern.alphabet_size() != m {
        return Err(Error::Correspondence(format!(
            "pattern alphabet of size {} does not index the primary's {m} columns",
            pattern.alphabet_size()
        )));
    }
    let n_blocks = pattern.nrows();
    let l = pattern.ncols();
    let mut out = Vec::with_capacity(r * n_blocks * l);
    for beta in 0..n_blocks {
        for s in 0..r {
            for gamma in 0..l {
                out.push(primary[(s, pattern.entries()[(beta, gamma)])].clone());
            }
        }
    }
    Array2::from_shape_vec((r * n_blocks, l), out)
        .map_err(|e| Error::Dimension(format!("column replacement shape error: {e}")))
}

/// Output of composing two codebooks by column replacement.
#[derive(Debug, Clone)]
pub struct CodeComposition {
    /// (N * N') x (pattern codeword count) matrix of residues mod p.
    pub matrix: Array2<u64>,
    /// Distance guaranteed by the operands' parameters; a lower bound.
    pub predicted_min_distance: usize,
    /// Distance of the composed code itself (minimum nonzero weight).
    pub exact_min_distance: usize,
}

/// Compose a prime-field primary codebook with a pattern codebook over the
/// extension field of matching order: pattern entries, read as element
/// indices, pick primary codewords to stack.
pub fn compose_codebooks(primary: &Codebook, pattern: &Codebook) -> Result<CodeComposition> {
    let p_field = primary.code().field();
    if p_field.degree() != 1 {
        return Err(Error::Correspondence(
            "composition needs a primary code over a prime field".into(),
        ));
    }
    let p = p_field.p();
    if !primary.contains_all_one() {
        return Err(Error::MissingAllOne(
            "primary codebook lacks the all-one codeword".into(),
        ));
    }
    if !pattern.contains_all_one() {
        return Err(Error::MissingAllOne(
            "pattern codebook lacks the all-one codeword".into(),
        ));
    }
    let e_field = pattern.code().field();
    if e_field.p() != p {
        return Err(Error::Correspondence(format!(
            "pattern field has characteristic {} but the primary is over GF({p})",
            e_field.p()
        )));
    }
    if e_field.order() as usize != primary.num_codewords() {
        return Err(Error::Correspondence(format!(
            "pattern field of order {} cannot index {} primary codewords",
            e_field.order(),
            primary.num_codewords()
        )));
    }

    let residues = primary.residue_matrix()?;
    let pat = PatternMatrix::from_codebook(pattern);
    let matrix = column_replace(&residues, &pat)?;

    let n = primary.code().length();
    let n_prime = pattern.code().length();
    let d = primary.min_distance();
    let d_prime = pattern.min_distance();
    let predicted_min_distance = n * n_prime - ((n_prime - d_prime) * n + d_prime * (n - d));

    let ones = vec![1u64; matrix.nrows()];
    let has_all_one = (0..matrix.ncols()).any(|j| matrix.column(j).iter().eq(ones.iter()));
    if !has_all_one {
        return Err(Error::Validation(
            "composed code lost the all-one column; operands were inconsistent".into(),
        ));
    }

    verify_gfp_closure(&matrix, p)?;

    let exact_min_distance = (0..matrix.ncols())
        .map(|j| matrix.column(j).iter().filter(|&&e| e != 0).count())
        .filter(|&w| w > 0)
        .min()
        .ok_or_else(|| Error::Validation("composed code has no nonzero columns".into()))?;
    if exact_min_distance < predicted_min_distance {
        return Err(Error::Validation(format!(
            "composed distance {exact_min_distance} fell below the guaranteed {predicted_min_distance}"
        )));
    }

    Ok(CodeComposition { matrix, predicted_min_distance, exact_min_distance })
}

/// Check that the matrix columns are closed under entrywise GF(p) linear
/// combinations: exhaustively for small column counts, by seeded random
/// probes otherwise. Columns must also be pairwise distinct.
pub fn verify_gfp_closure(matrix: &Array2<u64>, p: u64) -> Result<()> {
    if p < 2 {
        return Err(Error::Domain(format!("modulus {p} is not a field size")));
    }
    if let Some(&bad) = matrix.iter().find(|&&e| e >= p) {
        return Err(Error::Domain(format!("entry {bad} out of range mod {p}")));
    }
    let n = matrix.ncols();
    let cols: Vec<Vec<u64>> = (0..n).map(|j| matrix.column(j).to_vec()).collect();
    let members: HashSet<&[u64]> = cols.iter().map(|c| c.as_slice()).collect();
    if members.len() != n {
        return Err(Error::Validation("columns are not pairwise distinct".into()));
    }

    let check_pair = |i: usize, j: usize, lam: u64, mu: u64, buf: &mut Vec<u64>| -> bool {
        buf.clear();
        buf.extend(
            cols[i]
                .iter()
                .zip(&cols[j])
                .map(|(&a, &b)| (lam * a + mu * b) % p),
        );
        members.contains(buf.as_slice())
    };

    if n <= CLOSURE_EXHAUSTIVE_LIMIT {
        let failed = (0..n).into_par_iter().find_map_any(|i| {
            let mut buf = Vec::with_capacity(matrix.nrows());
            for j in i..n {
                for lam in 0..p {
                    for mu in 0..p {
                        if !check_pair(i, j, lam, mu, &mut buf) {
                            return Some((i, j, lam, mu));
                        }
                    }
                }
            }
            None
        });
        if let Some((i, j, lam, mu)) = failed {
            return Err(Error::Validation(format!(
                "columns are not closed mod {p}: {lam}*col{i} + {mu}*col{j} is not a column"
            )));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(CLOSURE_PROBE_SEED);
        let mut buf = Vec::with_capacity(matrix.nrows());
        for _ in 0..CLOSURE_PROBES {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let lam = rng.gen_range(0..p);
            let mu = rng.gen_range(0..p);
            if !check_pair(i, j, lam, mu, &mut buf) {
                return Err(Error::Validation(format!(
                    "columns are not closed mod {p}: {lam}*col{i} + {mu}*col{j} is not a column"
                )));
            }
        }
    }
    Ok(())
}
