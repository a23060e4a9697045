//! Linear codes over GF(q): generator matrices, codeword enumeration in a
//! pinned message order, and the distance statistics the matrix
//! constructions consume.

use std::collections::HashSet;
use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::{FieldElement, FieldSpec};

/// Refuse to materialize codebooks past this many codewords.
const CODEBOOK_HARD_CAP: u64 = 4_000_000;
const CODEBOOK_SOFT_CAP: u64 = 100_000;

/// A [length, dimension] linear code given by its generator rows.
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Arc<FieldSpec>,
    length: usize,
    generator: Vec<Vec<FieldElement>>,
}

impl LinearCode {
    pub fn new(field: Arc<FieldSpec>, generator: Vec<Vec<FieldElement>>) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::DegenerateCode("a code needs at least one generator row".into()));
        }
        let length = generator[0].len();
        if length == 0 {
            return Err(Error::DegenerateCode("generator rows must be nonempty".into()));
        }
        for row in &generator {
            if row.len() != length {
                return Err(Error::Dimension(format!(
                    "generator rows have mixed lengths {} and {}",
                    length,
                    row.len()
                )));
            }
            for entry in row {
                if entry.spec().as_ref() != field.as_ref() {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        Ok(LinearCode { field, length, generator })
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.generator.len()
    }

    pub fn generator(&self) -> &[Vec<FieldElement>] {
        &self.generator
    }
}

/// Two-row generator [all-one; evaluation points]: codewords are the degree
/// <= 1 polynomials evaluated at the given points.
pub fn rs2_generator(field: &Arc<FieldSpec>, points: &[FieldElement]) -> Result<LinearCode> {
    if points.len() < 2 {
        return Err(Error::DegenerateCode(format!(
            "evaluation set needs at least 2 points, got {}",
            points.len()
        )));
    }
    let mut seen = HashSet::new();
    for pt in points {
        if pt.spec().as_ref() != field.as_ref() {
            return Err(Error::FieldMismatch);
        }
        if !seen.insert(pt.index()) {
            return Err(Error::DegenerateCode(format!(
                "duplicate evaluation point {pt} degenerates the code"
            )));
        }
    }
    let g0 = vec![field.one(); points.len()];
    let g1 = points.to_vec();
    LinearCode::new(Arc::clone(field), vec![g0, g1])
}

/// Every codeword of a [`LinearCode`], in message-index order: message m
/// contributes digit (m / q^i) % q as the coefficient of generator row i,
/// mirroring the element indexing in [`crate::galois`].
#[derive(Debug, Clone)]
pub struct Codebook {
    code: LinearCode,
    columns: Vec<Vec<FieldElement>>,
    min_distance: usize,
    has_all_one: bool,
}

pub fn enumerate_codewords(code: &LinearCode) -> Result<Codebook> {
    let field = code.field();
    let q = field.order();
    let dim = code.dimension() as u32;
    let total = q
        .checked_pow(dim)
        .filter(|&t| t <= CODEBOOK_HARD_CAP)
        .ok_or_else(|| {
            Error::Domain(format!(
                "codebook of q^k = {q}^{dim} codewords is past the hard size cap"
            ))
        })?;
    if total > CODEBOOK_SOFT_CAP {
        log::warn!("enumerating {total} codewords; this is past the comfortable size cap");
    }

    let scalars = field.elements();
    let mut columns = Vec::with_capacity(total as usize);
    let mut distinct: HashSet<Vec<u64>> = HashSet::with_capacity(total as usize);
    for message in 0..total {
        let mut word = vec![field.zero(); code.length()];
        let mut rest = message;
        for row in code.generator() {
            let digit = (rest % q) as usize;
            rest /= q;
            let scalar = &scalars[digit];
            if scalar.is_zero() {
                continue;
            }
            for (w, g) in word.iter_mut().zip(row) {
                *w = w.add(&scalar.mul(g)?)?;
            }
        }
        distinct.insert(word.iter().map(FieldElement::index).collect());
        columns.push(word);
    }
    if distinct.len() != total as usize {
        return Err(Error::RankDeficient(format!(
            "generator rows are dependent: {} distinct codewords out of {total}",
            distinct.len()
        )));
    }

    // The enumeration spans the full code, so the minimum pairwise distance
    // equals the minimum weight of a nonzero codeword.
    let min_distance = columns
        .iter()
        .skip(1)
        .map(|word| word.iter().filter(|e| !e.is_zero()).count())
        .min()
        .unwrap_or(0);
    let one = field.one();
    let has_all_one = columns.iter().any(|word| word.iter().all(|e| *e == one));

    Ok(Codebook { code: code.clone(), columns, min_distance, has_all_one })
}

impl Codebook {
    pub fn code(&self) -> &LinearCode {
        &self.code
    }

    pub fn num_codewords(&self) -> usize {
        self.columns.len()
    }

    /// Codewords as columns, message-index order.
    pub fn columns(&self) -> &[Vec<FieldElement>] {
        &self.columns
    }

    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    pub fn contains_all_one(&self) -> bool {
        self.has_all_one
    }

    /// length x num_codewords matrix of element indices.
    pub fn index_matrix(&self) -> Array2<usize> {
        let n = self.code.length();
        let count = self.columns.len();
        let mut out = Array2::zeros((n, count));
        for (j, word) in self.columns.iter().enumerate() {
            for (i, e) in word.iter().enumerate() {
                out[(i, j)] = e.index() as usize;
            }
        }
        out
    }

    /// length x num_codewords matrix of residues; prime fields only, where
    /// the element index is the residue itself.
    pub fn residue_matrix(&self) -> Result<Array2<u64>> {
        if self.code.field().degree() != 1 {
            return Err(Error::Domain(
                "residue matrices exist only for codes over prime fields".into(),
            ));
        }
        let n = self.code.length();
        let count = self.columns.len();
        let mut out = Array2::zeros((n, count));
        for (j, word) in self.columns.iter().enumerate() {
            for (i, e) in word.iter().enumerate() {
                out[(i, j)] = e.index();
            }
        }
        Ok(out)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let field = self.code.field();
        let irreducible = field.irreducible().map(|low| {
            let mut full = low.to_vec();
            full.push(1);
            full
        });
        let file = CodebookFile {
            p: field.p(),
            field_degree: (field.degree() > 1).then_some(field.degree()),
            irreducible,
            k: self.code.dimension(),
            n: self.code.length(),
            generator: self
                .code
                .generator()
                .iter()
                .map(|row| row.iter().map(FieldElement::index).collect())
                .collect(),
            columns: self
                .columns
                .iter()
                .map(|word| word.iter().map(FieldElement::index).collect())
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

#[derive(Serialize)]
struct CodebookFile {
    p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    field_degree: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    irreducible: Option<Vec<u64>>,
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    generator: Vec<Vec<u64>>,
    columns: Vec<Vec<u64>>,
}
