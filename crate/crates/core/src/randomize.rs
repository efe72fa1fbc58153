//! Digital shift, nested (Owen) scrambling and random linear scrambling.
//!
//! Randomness comes from SplitMix64: the state advances by the golden-ratio
//! increment `0x9E3779B97F4A7C15` and each output is `mix64(state)`. Streams
//! are keyed by [`derive_stream`], so a replication's randomization depends
//! only on `(master_seed, v, coordinate)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numth::{is_prime, pack, unpack, DigitVector, ModMatrix};
use crate::sequences::PointSet;

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on `0..n` (Lemire's multiply-and-reject).
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let mut m = self.next_u64() as u128 * n as u128;
        if (m as u64) < n {
            let t = n.wrapping_neg() % n;
            while (m as u64) < t {
                m = self.next_u64() as u128 * n as u128;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform on [0,1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Stream seed for replication `v`, coordinate `coordinate`.
pub fn derive_stream(master_seed: u64, v: u64, coordinate: u64) -> u64 {
    let a = mix64(master_seed ^ 0x6A09_E667_F3BC_C909);
    let b = mix64(a ^ mix64(v.wrapping_add(GOLDEN)));
    mix64(b ^ mix64(coordinate.wrapping_add(GOLDEN.wrapping_mul(2))))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomizerKind {
    #[default]
    None,
    DigitalShift,
    OwenScramble,
    LinearScramble,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizerSpec {
    pub kind: RandomizerKind,
    pub master_seed: u64,
    pub replication: u64,
}

impl RandomizerSpec {
    pub fn new(kind: RandomizerKind, master_seed: u64, replication: u64) -> Self {
        Self { kind, master_seed, replication }
    }
}

#[derive(Clone, Debug)]
enum CoordMap {
    Identity,
    Shift(Vec<u32>),
    /// Lower-triangular rows (row r holds r+1 entries) and a shift.
    Linear { rows: Vec<Vec<u32>>, shift: Vec<u32> },
    Owen(u64),
}

/// A randomization drawn for one replication, ready to apply point by point.
#[derive(Clone, Debug)]
pub struct Randomization {
    bases: Vec<u32>,
    ndigits: Vec<usize>,
    maps: Vec<CoordMap>,
}

/// Reusable buffers for [`Randomization::apply_point`].
#[derive(Clone, Debug, Default)]
pub struct Scratch {
    digits: Vec<u32>,
    out: Vec<u32>,
    perm: Vec<u32>,
    touched: Vec<usize>,
}

impl Randomization {
    pub fn draw(spec: &RandomizerSpec, bases: &[u32], ndigits: &[usize]) -> Result<Self> {
        if spec.kind == RandomizerKind::LinearScramble {
            if let Some(&b) = bases.iter().find(|&&b| !is_prime(b as u64)) {
                return Err(Error::Domain(format!("linear scrambling needs prime bases, got {b}")));
            }
        }
        let maps = bases
            .iter()
            .zip(ndigits)
            .enumerate()
            .map(|(j, (&b, &k))| {
                let key = derive_stream(spec.master_seed, spec.replication, j as u64);
                let mut rng = SplitMix64::new(key);
                match spec.kind {
                    RandomizerKind::None => CoordMap::Identity,
                    RandomizerKind::DigitalShift => {
                        CoordMap::Shift((0..k).map(|_| rng.below(b as u64) as u32).collect())
                    }
                    RandomizerKind::LinearScramble => {
                        let shift = (0..k).map(|_| rng.below(b as u64) as u32).collect();
                        let rows = (0..k)
                            .map(|r| {
                                (0..=r)
                                    .map(|l| {
                                        if l == r {
                                            1 + rng.below(b as u64 - 1) as u32
                                        } else {
                                            rng.below(b as u64) as u32
                                        }
                                    })
                                    .collect()
                            })
                            .collect();
                        CoordMap::Linear { rows, shift }
                    }
                    RandomizerKind::OwenScramble => CoordMap::Owen(key),
                }
            })
            .collect();
        Ok(Self { bases: bases.to_vec(), ndigits: ndigits.to_vec(), maps })
    }

    pub fn for_points(spec: &RandomizerSpec, p: &PointSet) -> Result<Self> {
        Self::draw(spec, p.bases(), p.ndigits())
    }

    /// Explicit per-coordinate digit shifts.
    pub fn from_shifts(p: &PointSet, shifts: &[DigitVector]) -> Result<Self> {
        check_per_coord(p, shifts.len())?;
        let maps = shifts
            .iter()
            .enumerate()
            .map(|(j, d)| {
                check_digits(p, j, d)?;
                Ok(CoordMap::Shift(d.digits.clone()))
            })
            .collect::<Result<_>>()?;
        Ok(Self { bases: p.bases().to_vec(), ndigits: p.ndigits().to_vec(), maps })
    }

    /// Explicit lower-triangular matrices and shifts.
    pub fn from_linear(p: &PointSet, matrices: &[ModMatrix], shifts: &[DigitVector]) -> Result<Self> {
        check_per_coord(p, matrices.len())?;
        check_per_coord(p, shifts.len())?;
        let mut maps = Vec::with_capacity(p.s());
        for (j, (m, d)) in matrices.iter().zip(shifts).enumerate() {
            check_digits(p, j, d)?;
            if m.base != p.bases()[j] {
                return Err(Error::BaseMismatch(m.base, p.bases()[j]));
            }
            if m.dim != p.ndigits()[j] {
                return Err(Error::DimensionMismatch { expected: p.ndigits()[j], got: m.dim });
            }
            if !m.is_nonsingular_lower_triangular() {
                return Err(Error::SingularMatrix(m.base));
            }
            let rows = (0..m.dim).map(|r| (0..=r).map(|l| m.get(r, l)).collect()).collect();
            maps.push(CoordMap::Linear { rows, shift: d.digits.clone() });
        }
        Ok(Self { bases: p.bases().to_vec(), ndigits: p.ndigits().to_vec(), maps })
    }

    pub fn s(&self) -> usize {
        self.maps.len()
    }

    /// Randomizes one packed coordinate value.
    pub fn apply_coord(&self, j: usize, y: u64, sc: &mut Scratch) -> u64 {
        let b = self.bases[j];
        let k = self.ndigits[j];
        match &self.maps[j] {
            CoordMap::Identity => y,
            CoordMap::Shift(shift) => {
                sc.digits.resize(k, 0);
                unpack(b, y, &mut sc.digits);
                for (d, e) in sc.digits.iter_mut().zip(shift) {
                    *d = (*d + e) % b;
                }
                pack(b, &sc.digits)
            }
            CoordMap::Linear { rows, shift } => {
                sc.digits.resize(k, 0);
                sc.out.resize(k, 0);
                unpack(b, y, &mut sc.digits);
                for r in 0..k {
                    let mut acc = shift[r] as u64;
                    for (l, &c) in rows[r].iter().enumerate() {
                        acc += c as u64 * sc.digits[l] as u64;
                    }
                    sc.out[r] = (acc % b as u64) as u32;
                }
                pack(b, &sc.out)
            }
            CoordMap::Owen(key) => {
                sc.digits.resize(k, 0);
                unpack(b, y, &mut sc.digits);
                if sc.perm.len() < b as usize {
                    sc.perm = (0..b).collect();
                }
                let mut h = mix64(key ^ 0x243F_6A88_85A3_08D3);
                let mut out = 0u64;
                for r in 0..k {
                    let d = sc.digits[r];
                    let img = nested_image(h, b, d, &mut sc.perm, &mut sc.touched);
                    out = out * b as u64 + img as u64;
                    h = mix64(h.wrapping_add(GOLDEN.wrapping_mul(d as u64 + 1)));
                }
                out
            }
        }
    }

    pub fn apply_point(&self, row: &[u64], out: &mut [u64], sc: &mut Scratch) {
        for (j, (&y, o)) in row.iter().zip(out.iter_mut()).enumerate() {
            *o = self.apply_coord(j, y, sc);
        }
    }

    pub fn apply(&self, p: &PointSet, exec: Exec) -> Result<PointSet> {
        if p.bases() != self.bases.as_slice() {
            return Err(Error::InvalidInput("randomization drawn for different bases".into()));
        }
        Ok(p.map_coordinates(exec, |j, y| {
            let mut sc = Scratch::default();
            self.apply_coord(j, y, &mut sc)
        }))
    }
}

/// Image of `d` under the uniform permutation of Z_b keyed by `h`, found with
/// the first d+1 steps of a Fisher-Yates shuffle. `perm` must be the identity
/// on entry and is restored before returning.
fn nested_image(h: u64, b: u32, d: u32, perm: &mut [u32], touched: &mut Vec<usize>) -> u32 {
    let mut rng = SplitMix64::new(h);
    touched.clear();
    for i in 0..=d as usize {
        let t = i + rng.below((b as usize - i) as u64) as usize;
        perm.swap(i, t);
        touched.push(t);
    }
    let img = perm[d as usize];
    for i in (0..=d as usize).rev() {
        perm.swap(i, touched[i]);
    }
    img
}

fn check_per_coord(p: &PointSet, got: usize) -> Result<()> {
    if got != p.s() {
        return Err(Error::DimensionMismatch { expected: p.s(), got });
    }
    Ok(())
}

fn check_digits(p: &PointSet, j: usize, d: &DigitVector) -> Result<()> {
    if d.base != p.bases()[j] {
        return Err(Error::BaseMismatch(d.base, p.bases()[j]));
    }
    if d.len() != p.ndigits()[j] {
        return Err(Error::DimensionMismatch { expected: p.ndigits()[j], got: d.len() });
    }
    Ok(())
}

fn with_kind(spec: &RandomizerSpec, kind: RandomizerKind) -> RandomizerSpec {
    RandomizerSpec { kind, ..*spec }
}

pub fn randomize(p: &PointSet, spec: &RandomizerSpec) -> Result<PointSet> {
    Randomization::for_points(spec, p)?.apply(p, Exec::default())
}

pub fn digital_shift(p: &PointSet, spec: &RandomizerSpec) -> PointSet {
    randomize(p, &with_kind(spec, RandomizerKind::DigitalShift)).expect("shift accepts any base")
}

pub fn owen_scramble(p: &PointSet, spec: &RandomizerSpec) -> PointSet {
    randomize(p, &with_kind(spec, RandomizerKind::OwenScramble)).expect("scramble accepts any base")
}

pub fn linear_scramble(p: &PointSet, spec: &RandomizerSpec) -> Result<PointSet> {
    randomize(p, &with_kind(spec, RandomizerKind::LinearScramble))
}

pub fn digital_shift_with(p: &PointSet, shifts: &[DigitVector]) -> Result<PointSet> {
    Randomization::from_shifts(p, shifts)?.apply(p, Exec::default())
}

pub fn linear_scramble_with(p: &PointSet, matrices: &[ModMatrix], shifts: &[DigitVector]) -> Result<PointSet> {
    Randomization::from_linear(p, matrices, shifts)?.apply(p, Exec::default())
}
