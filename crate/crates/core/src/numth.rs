//! Base-b digit arithmetic, primes and Pascal matrices modulo a prime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Base-b digit expansion. For a fractional value, `digits[r]` is the
/// coefficient of `base^-(r+1)`; for an integer it is the coefficient of
/// `base^r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitVector {
    pub base: u32,
    pub digits: Vec<u32>,
}

impl DigitVector {
    pub fn new(base: u32, digits: Vec<u32>) -> Result<Self> {
        if base < 2 {
            return Err(Error::Domain(format!("base {base} < 2")));
        }
        if digits.is_empty() {
            return Err(Error::InvalidInput("digit vector must be non-empty".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= base) {
            return Err(Error::InvalidInput(format!("digit {d} out of range for base {base}")));
        }
        Ok(Self { base, digits })
    }

    pub fn zeros(base: u32, k: usize) -> Self {
        Self { base, digits: vec![0; k] }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// Square matrix over Z_p, row-major. Row r of a product gives output digit r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModMatrix {
    pub base: u32,
    pub dim: usize,
    pub entries: Vec<u32>,
}

impl ModMatrix {
    pub fn from_rows(base: u32, rows: Vec<Vec<u32>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: row.len() });
            }
            entries.extend(row.into_iter().map(|v| v % base));
        }
        Ok(Self { base, dim, entries })
    }

    pub fn identity(base: u32, dim: usize) -> Self {
        Self::diagonal(base, dim, 1)
    }

    pub fn diagonal(base: u32, dim: usize, f: u32) -> Self {
        let mut entries = vec![0; dim * dim];
        for r in 0..dim {
            entries[r * dim + r] = f % base;
        }
        Self { base, dim, entries }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.entries[r * self.dim + c]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.entries.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    pub fn mul(&self, other: &ModMatrix) -> Result<ModMatrix> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let (n, b) = (self.dim, self.base as u64);
        let mut entries = vec![0u32; n * n];
        for r in 0..n {
            for c in 0..n {
                let mut acc = 0u64;
                for t in 0..n {
                    acc += self.get(r, t) as u64 * other.get(t, c) as u64;
                }
                entries[r * n + c] = (acc % b) as u32;
            }
        }
        Ok(ModMatrix { base: self.base, dim: n, entries })
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.dim).all(|r| (r + 1..self.dim).all(|c| self.get(r, c) == 0))
    }

    /// Non-singular lower-triangular check (nonzero diagonal).
    pub fn is_nonsingular_lower_triangular(&self) -> bool {
        self.is_lower_triangular() && (0..self.dim).all(|r| self.get(r, r) != 0)
    }
}

/// Smallest K with `base^K >= 2^53`, capped at 64.
pub fn digit_precision(base: u32) -> usize {
    let target = 1u128 << 53;
    let mut p = 1u128;
    let mut k = 0;
    while p < target && k < 64 {
        p *= base as u128;
        k += 1;
    }
    k
}

/// `base^k` if it fits in a u64.
pub fn checked_pow(base: u32, k: usize) -> Option<u64> {
    let mut p = 1u64;
    for _ in 0..k {
        p = p.checked_mul(base as u64)?;
    }
    Some(p)
}

pub fn integer_digits(m: u64, base: u32, k: usize) -> Result<DigitVector> {
    if base < 2 {
        return Err(Error::Domain(format!("base {base} < 2")));
    }
    if k == 0 {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    let mut digits = vec![0u32; k];
    let mut rest = m;
    for d in digits.iter_mut() {
        *d = (rest % base as u64) as u32;
        rest /= base as u64;
    }
    if rest != 0 {
        return Err(Error::Overflow { value: m, base, digits: k });
    }
    Ok(DigitVector { base, digits })
}

/// Σ d_r base^-(r+1), clamped below 1 against rounding.
pub fn radical_value(d: &DigitVector) -> f64 {
    let b = d.base as f64;
    let v = d.digits.iter().rev().fold(0.0, |acc, &x| (acc + x as f64) / b);
    v.min(1.0 - f64::EPSILON / 2.0)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn first_primes(s: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(s);
    let mut c = 2u32;
    while out.len() < s {
        if is_prime(c as u64) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Smallest prime p with p >= max(s, 2).
pub fn smallest_prime_at_least(s: u32) -> u32 {
    let mut p = s.max(2);
    while !is_prime(p as u64) {
        p += 1;
    }
    p
}

/// Upper-triangular Pascal power: entry (r, l) = C(l, r) c^(l-r) mod base.
pub fn pascal_power(base: u32, c: u32, k: usize) -> Result<ModMatrix> {
    if !is_prime(base as u64) {
        return Err(Error::Domain(format!("base {base} is not prime")));
    }
    if c >= base {
        return Err(Error::Domain(format!("c = {c} must be below base {base}")));
    }
    let b = base as u64;
    // binomials mod p by the additive recurrence
    let mut binom = vec![vec![0u64; k]; k];
    for l in 0..k {
        binom[l][0] = 1;
        for r in 1..=l {
            binom[l][r] = (binom[l - 1][r - 1] + if r < l { binom[l - 1][r] } else { 0 }) % b;
        }
    }
    let mut cpow = vec![1u64; k];
    for i in 1..k {
        cpow[i] = cpow[i - 1] * c as u64 % b;
    }
    let mut entries = vec![0u32; k * k];
    for r in 0..k {
        for l in r..k {
            entries[r * k + l] = (binom[l][r] * cpow[l - r] % b) as u32;
        }
    }
    Ok(ModMatrix { base, dim: k, entries })
}

pub fn mod_mat_vec(m: &ModMatrix, d: &DigitVector) -> Result<DigitVector> {
    if m.base != d.base {
        return Err(Error::BaseMismatch(m.base, d.base));
    }
    if m.dim != d.len() {
        return Err(Error::DimensionMismatch { expected: m.dim, got: d.len() });
    }
    let b = m.base as u64;
    let digits = (0..m.dim)
        .map(|r| {
            let acc: u64 = (0..m.dim).map(|l| m.get(r, l) as u64 * d.digits[l] as u64).sum();
            (acc % b) as u32
        })
        .collect();
    Ok(DigitVector { base: m.base, digits })
}

/// Packs fractional digits into `Σ d_r base^(K-1-r)`.
pub(crate) fn pack(base: u32, digits: &[u32]) -> u64 {
    digits.iter().fold(0u64, |acc, &d| acc * base as u64 + d as u64)
}

pub(crate) fn unpack(base: u32, mut y: u64, out: &mut [u32]) {
    for d in out.iter_mut().rev() {
        *d = (y % base as u64) as u32;
        y /= base as u64;
    }
}
