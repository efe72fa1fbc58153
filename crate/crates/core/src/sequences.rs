//! Van der Corput, Halton and Faure point sets, plain and generalized.
//!
//! Coordinates are stored exactly: each one is the integer
//! `Σ d_r b^(K-1-r)` built from its K fractional digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numth::{
    checked_pow, digit_precision, first_primes, is_prime, pack, pascal_power, radical_value,
    smallest_prime_at_least, unpack, DigitVector, ModMatrix,
};
use crate::permute::{FactorVector, Permutation, PermutationSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    n: usize,
    s: usize,
    bases: Vec<u32>,
    ndigits: Vec<usize>,
    scale: Vec<u64>,
    start_index: u64,
    data: Vec<u64>,
}

impl PointSet {
    pub(crate) fn with_data(bases: Vec<u32>, start_index: u64, data: Vec<u64>) -> Result<Self> {
        let s = bases.len();
        if s == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut ndigits = Vec::with_capacity(s);
        let mut scale = Vec::with_capacity(s);
        for &b in &bases {
            if b < 2 {
                return Err(Error::Domain(format!("base {b} < 2")));
            }
            let k = digit_precision(b);
            let p = checked_pow(b, k)
                .ok_or_else(|| Error::Domain(format!("base {b} is too large for exact digit storage")))?;
            ndigits.push(k);
            scale.push(p);
        }
        if !data.len().is_multiple_of(s) {
            return Err(Error::DimensionMismatch { expected: s, got: data.len() % s });
        }
        Ok(Self { n: data.len() / s, s, bases, ndigits, scale, start_index, data })
    }

    /// Builds a point set from explicit digit vectors, padding each with
    /// zero digits up to the working precision of its base.
    pub fn from_digits(bases: Vec<u32>, points: &[Vec<DigitVector>]) -> Result<Self> {
        let empty = Self::with_data(bases.clone(), 1, vec![])?;
        let mut data = Vec::with_capacity(points.len() * bases.len());
        for p in points {
            if p.len() != bases.len() {
                return Err(Error::DimensionMismatch { expected: bases.len(), got: p.len() });
            }
            for (j, d) in p.iter().enumerate() {
                if d.base != bases[j] {
                    return Err(Error::BaseMismatch(d.base, bases[j]));
                }
                let k = empty.ndigits[j];
                if d.len() > k {
                    return Err(Error::DimensionMismatch { expected: k, got: d.len() });
                }
                let mut full = d.digits.clone();
                full.resize(k, 0);
                data.push(pack(d.base, &full));
            }
        }
        Self::with_data(bases, 1, data)
    }

    /// Expands reals in [0,1) to digits by repeated multiplication
    /// (exact for base 2).
    pub fn from_reals(bases: Vec<u32>, reals: &[f64]) -> Result<Self> {
        let empty = Self::with_data(bases.clone(), 1, vec![])?;
        let s = bases.len();
        if !reals.len().is_multiple_of(s) {
            return Err(Error::DimensionMismatch { expected: s, got: reals.len() % s });
        }
        let mut data = Vec::with_capacity(reals.len());
        for (idx, &x) in reals.iter().enumerate() {
            if !(0.0..1.0).contains(&x) {
                return Err(Error::Domain(format!("coordinate {x} outside [0,1)")));
            }
            let j = idx % s;
            let b = bases[j] as f64;
            let mut digits = vec![0u32; empty.ndigits[j]];
            let mut rest = x;
            for d in digits.iter_mut() {
                let t = rest * b;
                let v = t.floor().min(b - 1.0);
                *d = v as u32;
                rest = t - v;
            }
            data.push(pack(bases[j], &digits));
        }
        Self::with_data(bases, 1, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    pub fn ndigits(&self) -> &[usize] {
        &self.ndigits
    }

    pub fn start_index(&self) -> u64 {
        self.start_index
    }

    /// `base_j^K_j`, the denominator of coordinate j.
    pub fn scale(&self) -> &[u64] {
        &self.scale
    }

    /// Packed digits of point i, coordinate j.
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.s + j]
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.s..(i + 1) * self.s]
    }

    pub fn digits(&self, i: usize, j: usize) -> DigitVector {
        let mut digits = vec![0; self.ndigits[j]];
        unpack(self.bases[j], self.raw(i, j), &mut digits);
        DigitVector { base: self.bases[j], digits }
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        packed_value(self.raw(i, j), self.scale[j])
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        (0..self.s).map(|j| self.value(i, j)).collect()
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> PointSet {
        let n = n.min(self.n);
        PointSet { n, data: self.data[..n * self.s].to_vec(), ..self.clone() }
    }

    pub(crate) fn map_coordinates<F>(&self, exec: Exec, f: F) -> PointSet
    where
        F: Fn(usize, u64) -> u64 + Sync + Send,
    {
        let mut data = self.data.clone();
        exec.for_each_chunk(&mut data, self.s, |_, row| {
            for (j, y) in row.iter_mut().enumerate() {
                *y = f(j, *y);
            }
        });
        PointSet { data, ..self.clone() }
    }
}

/// `y / scale` rounded once to the nearest double, kept below 1.
#[inline]
pub fn packed_value(y: u64, scale: u64) -> f64 {
    if y == 0 {
        return 0.0;
    }
    // scale y up so the quotient carries well over 53 significant bits,
    // then fold the remainder into a sticky bit
    let e = 63 + y.leading_zeros() as i32;
    let num = (y as u128) << e;
    let q = num / scale as u128;
    let sticky = !num.is_multiple_of(scale as u128) as u128;
    let v = (q | sticky) as f64 * 2f64.powi(-e);
    v.min(1.0 - f64::EPSILON / 2.0)
}

/// Row-major n × s reals.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoints {
    pub n: usize,
    pub s: usize,
    pub data: Vec<f64>,
}

impl RealPoints {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.s..(i + 1) * self.s]
    }
}

pub fn to_reals(p: &PointSet) -> RealPoints {
    let data = (0..p.n()).flat_map(|i| (0..p.s()).map(move |j| p.value(i, j))).collect();
    RealPoints { n: p.n(), s: p.s(), data }
}

/// Per-digit permutations for one van der Corput coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DigitPermutations {
    Uniform(Permutation),
    /// `sigma_r` for digit r; digits past the end reuse the last entry.
    PerDigit(Vec<Permutation>),
}

impl DigitPermutations {
    fn at(&self, r: usize) -> &Permutation {
        match self {
            DigitPermutations::Uniform(p) => p,
            DigitPermutations::PerDigit(v) => &v[r.min(v.len() - 1)],
        }
    }
}

pub fn vdc_point(n: u64, base: u32, sigma: &DigitPermutations) -> Result<DigitVector> {
    if n == 0 {
        return Err(Error::Domain("sequence index starts at 1".into()));
    }
    let k = digit_precision(base);
    let perms_ok = match sigma {
        DigitPermutations::Uniform(p) => p.base == base,
        DigitPermutations::PerDigit(v) => !v.is_empty() && v.iter().all(|p| p.base == base),
    };
    if !perms_ok {
        return Err(Error::InvalidInput(format!("permutations do not match base {base}")));
    }
    let a = crate::numth::integer_digits(n - 1, base, k)?;
    let digits = a.digits.iter().enumerate().map(|(r, &d)| sigma.at(r).apply(d)).collect();
    Ok(DigitVector { base, digits })
}

pub fn halton_set(n: usize, s: usize, perms: Option<&PermutationSet>, start_index: u64) -> Result<PointSet> {
    halton_set_with(n, s, perms, start_index, Exec::default())
}

pub fn halton_set_with(
    n: usize,
    s: usize,
    perms: Option<&PermutationSet>,
    start_index: u64,
    exec: Exec,
) -> Result<PointSet> {
    radical_set(first_primes(s), perms, n, start_index, IndexOrder::Natural, exec)
}

fn radical_set(
    bases: Vec<u32>,
    perms: Option<&PermutationSet>,
    n: usize,
    start_index: u64,
    order: IndexOrder,
    exec: Exec,
) -> Result<PointSet> {
    if start_index == 0 {
        return Err(Error::Domain("sequence index starts at 1".into()));
    }
    let s = bases.len();
    let sigmas: Vec<Permutation> = bases
        .iter()
        .map(|&b| match perms {
            None => Ok(Permutation::identity(b)),
            Some(set) => set.get(b).cloned().ok_or(Error::MissingPermutation(b)),
        })
        .collect::<Result<_>>()?;
    let mut ps = PointSet::with_data(bases, start_index, vec![0; n * s])?;
    check_index_range(&ps, start_index, n)?;
    let (bases, ks) = (ps.bases.clone(), ps.ndigits.clone());
    exec.for_each_chunk(&mut ps.data, s, |i, row| {
        let m = start_index - 1 + i as u64;
        let mut a = Vec::new();
        for j in 0..s {
            let b = bases[j] as u64;
            a.resize(ks[j], 0);
            index_digits(m, bases[j], order, &mut a);
            row[j] = a.iter().fold(0u64, |y, &d| y * b + sigmas[j].apply(d) as u64);
        }
    });
    Ok(ps)
}

fn check_index_range(ps: &PointSet, start_index: u64, n: usize) -> Result<()> {
    let last = start_index - 1 + n.saturating_sub(1) as u64;
    for (j, &sc) in ps.scale.iter().enumerate() {
        if n > 0 && last >= sc {
            return Err(Error::Overflow { value: last, base: ps.bases[j], digits: ps.ndigits[j] });
        }
    }
    Ok(())
}

/// How the index `n - 1` is turned into digits before the generating map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndexOrder {
    #[default]
    Natural,
    /// b-ary Gray code `g_r = (a_r - a_(r+1)) mod b`. Any prefix of length
    /// b^m is the same set as in natural order, only enumerated differently.
    Gray,
}

/// Low-order-first digits of `m`, filling `out` completely.
pub fn index_digits(m: u64, base: u32, order: IndexOrder, out: &mut [u32]) {
    unpack_integer(m, base, out);
    if order == IndexOrder::Gray {
        let b = base as u64;
        let mut above = (m / checked_pow(base, out.len()).unwrap_or(u64::MAX)) % b;
        for d in out.iter_mut().rev() {
            let cur = *d as u64;
            *d = ((cur + b - above) % b) as u32;
            above = cur;
        }
    }
}

/// Generalization applied to the Faure generating matrices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaureGeneralization {
    #[default]
    None,
    /// A_j = f_j · P^(j-1)
    Factors(FactorVector),
    /// A_j = L_j · P^(j-1) with L_j non-singular lower-triangular.
    Matrices(Vec<ModMatrix>),
}

pub fn faure_set(
    n: usize,
    s: usize,
    base: u32,
    generalization: &FaureGeneralization,
    start_index: u64,
) -> Result<PointSet> {
    faure_set_with(n, s, base, generalization, start_index, Exec::default())
}

pub fn faure_set_with(
    n: usize,
    s: usize,
    base: u32,
    generalization: &FaureGeneralization,
    start_index: u64,
    exec: Exec,
) -> Result<PointSet> {
    faure_set_ordered(n, s, base, generalization, start_index, IndexOrder::Natural, exec)
}

pub fn faure_set_ordered(
    n: usize,
    s: usize,
    base: u32,
    generalization: &FaureGeneralization,
    start_index: u64,
    order: IndexOrder,
    exec: Exec,
) -> Result<PointSet> {
    if !is_prime(base as u64) {
        return Err(Error::Domain(format!("Faure base {base} is not prime")));
    }
    if (base as usize) < s {
        return Err(Error::Domain(format!("Faure base {base} is smaller than s = {s}")));
    }
    if start_index == 0 {
        return Err(Error::Domain("sequence index starts at 1".into()));
    }
    let k = digit_precision(base);
    let mut mats = Vec::with_capacity(s);
    for j in 0..s {
        let p = pascal_power(base, j as u32, k)?;
        let a = match generalization {
            FaureGeneralization::None => p,
            FaureGeneralization::Factors(f) => {
                if f.base != base {
                    return Err(Error::BaseMismatch(f.base, base));
                }
                let fj = *f
                    .factors
                    .get(j)
                    .ok_or_else(|| Error::InvalidInput(format!("{} factors for s = {s}", f.factors.len())))?;
                if fj == 0 || fj >= base {
                    return Err(Error::InvalidInput(format!("factor {fj} is not a nonzero residue")));
                }
                ModMatrix::diagonal(base, k, fj).mul(&p)?
            }
            FaureGeneralization::Matrices(ls) => {
                let l = ls
                    .get(j)
                    .ok_or_else(|| Error::InvalidInput(format!("{} matrices for s = {s}", ls.len())))?;
                if l.base != base {
                    return Err(Error::BaseMismatch(l.base, base));
                }
                if l.dim != k {
                    return Err(Error::DimensionMismatch { expected: k, got: l.dim });
                }
                if !l.is_nonsingular_lower_triangular() {
                    return Err(Error::SingularMatrix(base));
                }
                l.mul(&p)?
            }
        };
        mats.push(a);
    }
    let mut ps = PointSet::with_data(vec![base; s], start_index, vec![0; n * s])?;
    check_index_range(&ps, start_index, n)?;
    let b = base as u64;
    exec.for_each_chunk(&mut ps.data, s, |i, row| {
        let mut a = vec![0u32; k];
        index_digits(start_index - 1 + i as u64, base, order, &mut a);
        let used = a.iter().rposition(|&d| d != 0).map_or(0, |p| p + 1);
        for (j, m) in mats.iter().enumerate() {
            let mut y = 0u64;
            for r in 0..k {
                let mut acc = 0u64;
                for (l, &al) in a[..used].iter().enumerate() {
                    acc += m.get(r, l) as u64 * al as u64;
                }
                y = y * b + acc % b;
            }
            row[j] = y;
        }
    });
    Ok(ps)
}

fn unpack_integer(mut m: u64, base: u32, out: &mut [u32]) {
    for d in out.iter_mut() {
        *d = (m % base as u64) as u32;
        m /= base as u64;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Vdc,
    Halton,
    Ghalton,
    Faure,
    Gfaure,
}

/// Payload for generalized constructions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generalization {
    #[default]
    None,
    Permutations(PermutationSet),
    Faure(FaureGeneralization),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub family: Family,
    pub s: usize,
    /// Construction base for vdc and Faure families.
    pub base: Option<u32>,
    pub generalization: Generalization,
    pub start_index: u64,
    #[serde(default)]
    pub order: IndexOrder,
}

impl SequenceSpec {
    pub fn new(family: Family, s: usize) -> Self {
        Self {
            family,
            s,
            base: None,
            generalization: Generalization::None,
            start_index: 1,
            order: IndexOrder::Natural,
        }
    }

    pub fn with_order(mut self, order: IndexOrder) -> Self {
        self.order = order;
        self
    }

    pub fn with_base(mut self, base: u32) -> Self {
        self.base = Some(base);
        self
    }

    pub fn with_generalization(mut self, g: Generalization) -> Self {
        self.generalization = g;
        self
    }

    /// Construction bases, one per coordinate.
    pub fn bases(&self) -> Vec<u32> {
        match self.family {
            Family::Vdc => vec![self.base.unwrap_or(2)],
            Family::Halton | Family::Ghalton => first_primes(self.s),
            Family::Faure | Family::Gfaure => vec![self.faure_base(); self.s],
        }
    }

    fn faure_base(&self) -> u32 {
        self.base.unwrap_or_else(|| smallest_prime_at_least(self.s as u32))
    }

    pub fn validate(&self) -> Result<()> {
        if self.s == 0 {
            return Err(Error::InvalidInput("s must be positive".into()));
        }
        let g = &self.generalization;
        match self.family {
            Family::Vdc if self.s != 1 => Err(Error::InvalidInput("vdc is one-dimensional".into())),
            Family::Vdc | Family::Halton | Family::Ghalton => match g {
                Generalization::Faure(_) => Err(Error::InvalidInput("factors apply only to Faure families".into())),
                Generalization::None if self.family == Family::Ghalton => {
                    Err(Error::InvalidInput("ghalton requires permutations".into()))
                }
                _ => Ok(()),
            },
            Family::Faure | Family::Gfaure => match g {
                Generalization::Permutations(_) => {
                    Err(Error::InvalidInput("permutations apply only to Halton families".into()))
                }
                Generalization::None if self.family == Family::Gfaure => {
                    Err(Error::InvalidInput("gfaure requires factors or matrices".into()))
                }
                _ => Ok(()),
            },
        }
    }

    pub fn generate(&self, n: usize) -> Result<PointSet> {
        self.generate_with(n, Exec::default())
    }

    pub fn generate_with(&self, n: usize, exec: Exec) -> Result<PointSet> {
        self.validate()?;
        let perms = match &self.generalization {
            Generalization::Permutations(p) => Some(p),
            _ => None,
        };
        match self.family {
            Family::Vdc | Family::Halton | Family::Ghalton => {
                radical_set(self.bases(), perms, n, self.start_index, self.order, exec)
            }
            Family::Faure | Family::Gfaure => {
                let none = FaureGeneralization::None;
                let g = match &self.generalization {
                    Generalization::Faure(g) => g,
                    _ => &none,
                };
                faure_set_ordered(n, self.s, self.faure_base(), g, self.start_index, self.order, exec)
            }
        }
    }
}

/// Real value of a digit vector (re-exported for convenience).
pub fn digit_value(d: &DigitVector) -> f64 {
    radical_value(d)
}
