//! Arithmetic in GF(p) and GF(p^k), plus the additive characters that turn
//! codewords into unit-modulus matrix entries.
//!
//! Elements are coefficient vectors over Z_p in the monomial basis
//! {1, x, ..., x^(k-1)}; products are reduced by a fixed monic irreducible of
//! degree k. Every field handled here is tiny (order in the low thousands),
//! so inverses are located by exhaustive search and irreducibility is settled
//! by trial division rather than anything clever.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Orders past this are still accepted, but enumeration-heavy callers will
/// crawl; warn instead of refusing.
const ORDER_SOFT_CAP: u64 = 10_000;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A validated description of GF(p^k).
///
/// `irreducible` holds the non-leading coefficients (low degree first) of the
/// monic degree-k modulus, and is `None` exactly when k = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    k: usize,
    irreducible: Option<Vec<u64>>,
}

impl FieldSpec {
    /// GF(p) for prime p.
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Arc::new(FieldSpec { p, k: 1, irreducible: None }))
    }

    /// GF(p^k), with the modulus chosen by [`find_irreducible`].
    pub fn extension(p: u64, k: usize) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::Domain("field extension degree must be at least 1".into()));
        }
        if k == 1 {
            return Self::prime(p);
        }
        let order = checked_order(p, k)?;
        if order > ORDER_SOFT_CAP {
            log::warn!("field of order {order} is past the practical size cap; proceeding");
        }
        let full = find_irreducible(p, k)?;
        Ok(Arc::new(FieldSpec { p, k, irreducible: Some(full[..k].to_vec()) }))
    }

    /// GF(p^k) with a caller-supplied monic irreducible, given as all k+1
    /// coefficients, low degree first.
    pub fn with_irreducible(p: u64, k: usize, coeffs: &[u64]) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k < 2 {
            return Err(Error::Domain("an explicit modulus needs degree at least 2".into()));
        }
        if coeffs.len() != k + 1 {
            return Err(Error::Domain(format!(
                "modulus for degree {k} needs {} coefficients, got {}",
                k + 1,
                coeffs.len()
            )));
        }
        if coeffs[k] != 1 {
            return Err(Error::Domain("modulus must be monic".into()));
        }
        if coeffs.iter().any(|&c| c >= p) {
            return Err(Error::Domain(format!("modulus coefficients must lie in [0, {p})")));
        }
        if !poly_is_irreducible(coeffs, p) {
            return Err(Error::Validation(format!(
                "{} is reducible over GF({p})",
                poly_to_string(coeffs)
            )));
        }
        checked_order(p, k)?;
        Ok(Arc::new(FieldSpec { p, k, irreducible: Some(coeffs[..k].to_vec()) }))
    }

    /// GF(q) for a prime power q, factoring q itself.
    pub fn of_order(q: u64) -> Result<Arc<Self>> {
        if q < 2 {
            return Err(Error::Domain(format!("{q} is not a field order")));
        }
        let mut p = 2;
        while p * p <= q && q % p != 0 {
            p += 1;
        }
        if p * p > q {
            p = q; // q itself is prime
        }
        let mut k = 0;
        let mut rest = q;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(Error::NotPrimePower(q));
        }
        Self::extension(p, k)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree k; 1 for prime fields.
    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    /// Non-leading coefficients of the modulus, low degree first.
    pub fn irreducible(&self) -> Option<&[u64]> {
        self.irreducible.as_deref()
    }

    /// Element from explicit coefficients (low degree first, length <= k,
    /// short vectors are zero-padded).
    pub fn element(self: &Arc<Self>, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.k {
            return Err(Error::Domain(format!(
                "coefficient vector of length {} exceeds extension degree {}",
                coeffs.len(),
                self.k
            )));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Domain(format!("coefficients must lie in [0, {})", self.p)));
        }
        let mut full = coeffs.to_vec();
        full.resize(self.k, 0);
        Ok(FieldElement { spec: Arc::clone(self), coeffs: full })
    }

    /// Element with canonical index i, the base-p digit expansion
    /// i = sum coeffs[d] * p^d.
    pub fn element_from_index(self: &Arc<Self>, index: u64) -> Result<FieldElement> {
        if index >= self.order() {
            return Err(Error::Domain(format!(
                "element index {index} out of range for a field of order {}",
                self.order()
            )));
        }
        let mut coeffs = vec![0u64; self.k];
        let mut rest = index;
        for c in coeffs.iter_mut() {
            *c = rest % self.p;
            rest /= self.p;
        }
        Ok(FieldElement { spec: Arc::clone(self), coeffs })
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        FieldElement { spec: Arc::clone(self), coeffs: vec![0; self.k] }
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        let mut coeffs = vec![0; self.k];
        coeffs[0] = 1;
        FieldElement { spec: Arc::clone(self), coeffs }
    }

    /// All field elements in index order.
    pub fn elements(self: &Arc<Self>) -> Vec<FieldElement> {
        (0..self.order())
            .map(|i| self.element_from_index(i).expect("index below order"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: Arc<FieldSpec>,
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// Coefficients low degree first, always of length k.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Canonical index sum coeffs[d] * p^d.
    pub fn index(&self) -> u64 {
        let p = self.spec.p;
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_same_spec(&self, other: &FieldElement) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same_spec(other)?;
        let p = self.spec.p;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(FieldElement { spec: Arc::clone(&self.spec), coeffs })
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.spec.p;
        let coeffs = self.coeffs.iter().map(|&a| (p - a) % p).collect();
        FieldElement { spec: Arc::clone(&self.spec), coeffs }
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_same_spec(other)?;
        let p = self.spec.p;
        let k = self.spec.k;
        if k == 1 {
            let coeffs = vec![(self.coeffs[0] * other.coeffs[0]) % p];
            return Ok(FieldElement { spec: Arc::clone(&self.spec), coeffs });
        }
        let modulus = self.spec.irreducible.as_ref().expect("k > 1 stores a modulus");
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a * b) % p;
            }
        }
        // x^k = -(m_0 + m_1 x + ... + m_(k-1) x^(k-1)), applied top down.
        for d in (k..(2 * k - 1)).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in modulus.iter().enumerate() {
                prod[d - k + i] = (prod[d - k + i] + c * ((p - m) % p)) % p;
            }
        }
        prod.truncate(k);
        Ok(FieldElement { spec: Arc::clone(&self.spec), coeffs: prod })
    }

    /// Multiplicative inverse by exhaustive search; the fields are small
    /// enough that nothing faster is warranted.
    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let one = self.spec.one();
        for i in 0..self.spec.order() {
            let candidate = self.spec.element_from_index(i)?;
            if self.mul(&candidate)? == one {
                return Ok(candidate);
            }
        }
        unreachable!("every nonzero element of a finite field has an inverse")
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.spec.k == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let mut parts = Vec::new();
        for (d, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let var = match d {
                0 => String::new(),
                1 => "a".into(),
                _ => format!("a^{d}"),
            };
            let part = match (d, c) {
                (0, _) => format!("{c}"),
                (_, 1) => var,
                _ => format!("{c}{var}"),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

/// Smallest monic irreducible of degree k over GF(p), scanning candidates in
/// increasing canonical index of their non-leading coefficient vector.
/// Returns all k+1 coefficients, low degree first.
pub fn find_irreducible(p: u64, k: usize) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k < 2 {
        return Err(Error::Domain(
            "irreducible search applies to extension degrees of at least 2".into(),
        ));
    }
    let count = checked_order(p, k)?;
    for n in 0..count {
        let mut candidate = vec![0u64; k + 1];
        let mut rest = n;
        for c in candidate[..k].iter_mut() {
            *c = rest % p;
            rest /= p;
        }
        candidate[k] = 1;
        if poly_is_irreducible(&candidate, p) {
            return Ok(candidate);
        }
    }
    unreachable!("monic irreducibles exist in every degree over every prime field")
}

/// chi(gamma) = exp(i 2 pi gamma / p) on Z_p.
pub fn additive_character(p: u64, gamma: u64) -> Result<Complex64> {
    check_residue(p, gamma, "character argument")?;
    Ok(Complex64::from_polar(1.0, TAU * gamma as f64 / p as f64))
}

/// sum over gamma in Z_p of chi(tau * gamma + beta).
///
/// Summed term by term on purpose: the closed form (0 for tau != 0, otherwise
/// p * chi(beta)) stays an independent check instead of being baked in.
pub fn character_sum(p: u64, tau: u64, beta: u64) -> Result<Complex64> {
    check_residue(p, tau, "character coefficient")?;
    check_residue(p, beta, "character offset")?;
    let mut sum = Complex64::new(0.0, 0.0);
    for gamma in 0..p {
        sum += additive_character(p, (tau * gamma + beta) % p)?;
    }
    Ok(sum)
}

fn check_residue(p: u64, value: u64, what: &str) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if value >= p {
        return Err(Error::Domain(format!("{what} {value} out of range for Z_{p}")));
    }
    Ok(())
}

fn checked_order(p: u64, k: usize) -> Result<u64> {
    let k32: u32 = k
        .try_into()
        .map_err(|_| Error::Domain(format!("extension degree {k} is absurdly large")))?;
    p.checked_pow(k32)
        .filter(|&o| o <= 1 << 40)
        .ok_or_else(|| Error::Domain(format!("field order {p}^{k} overflows practical limits")))
}

/// Monic polynomial (all coefficients, low degree first) rendered like
/// "x^2+2x+1" for error messages.
pub fn poly_to_string(coeffs: &[u64]) -> String {
    let mut parts = Vec::new();
    for (d, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = match d {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{d}"),
        };
        let part = match (d, c) {
            (0, _) => format!("{c}"),
            (_, 1) => var,
            _ => format!("{c}{var}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
fn poly_is_irreducible(coeffs: &[u64], p: u64) -> bool {
    let deg = coeffs.len() - 1;
    for d in 1..=(deg / 2) {
        let count = p.pow(d as u32);
        for n in 0..count {
            let mut divisor = vec![0u64; d + 1];
            let mut rest = n;
            for c in divisor[..d].iter_mut() {
                *c = rest % p;
                rest /= p;
            }
            divisor[d] = 1;
            if poly_rem_is_zero(coeffs, &divisor, p) {
                return false;
            }
        }
    }
    true
}

/// Whether `dividend` mod `divisor` vanishes over Z_p; divisor is monic.
fn poly_rem_is_zero(dividend: &[u64], divisor: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = dividend.to_vec();
    let dd = divisor.len() - 1;
    while rem.len() > dd {
        let lead = *rem.last().expect("nonempty");
        if lead != 0 {
            let shift = rem.len() - 1 - dd;
            for (i, &m) in divisor.iter().enumerate() {
                let idx = shift + i;
                rem[idx] = (rem[idx] + lead * ((p - m % p) % p)) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}
