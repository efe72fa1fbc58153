//! Faure (1992) digit permutations, the offset variant, factor extraction
//! and permutation-set files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numth::is_prime;

/// A bijection on `{0, .., base-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    pub base: u32,
    pub map: Vec<u32>,
}

impl Permutation {
    pub fn new(base: u32, map: Vec<u32>) -> Result<Self> {
        validate(base, &map)?;
        Ok(Self { base, map })
    }

    pub fn identity(base: u32) -> Self {
        Self { base, map: (0..base).collect() }
    }

    #[inline]
    pub fn apply(&self, d: u32) -> u32 {
        self.map[d as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }
}

fn validate(base: u32, map: &[u32]) -> Result<()> {
    if base < 2 {
        return Err(Error::Validation { base, msg: "base must be at least 2".into() });
    }
    if map.len() != base as usize {
        return Err(Error::Validation {
            base,
            msg: format!("expected {base} entries, found {}", map.len()),
        });
    }
    let mut seen = vec![false; base as usize];
    for &v in map {
        if v >= base || seen[v as usize] {
            return Err(Error::Validation { base, msg: format!("not a bijection (entry {v})") });
        }
        seen[v as usize] = true;
    }
    Ok(())
}

/// Nonzero multiplicative factors for generalized Faure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorVector {
    pub base: u32,
    pub factors: Vec<u32>,
}

impl FactorVector {
    pub fn new(base: u32, factors: Vec<u32>) -> Result<Self> {
        if !is_prime(base as u64) {
            return Err(Error::Domain(format!("factor base {base} is not prime")));
        }
        if let Some(&f) = factors.iter().find(|&&f| f == 0 || f >= base) {
            return Err(Error::InvalidInput(format!("factor {f} is not a nonzero residue mod {base}")));
        }
        Ok(Self { base, factors })
    }

    pub fn ones(base: u32, len: usize) -> Self {
        Self { base, factors: vec![1; len] }
    }
}

/// Permutations π_2 ..= π_{b_max}.
pub fn faure92_permutations(b_max: u32) -> Result<Vec<Permutation>> {
    if b_max < 2 {
        return Err(Error::Domain(format!("b_max = {b_max} < 2")));
    }
    let mut perms: Vec<Vec<u32>> = vec![vec![], vec![], vec![0, 1]];
    for j in 3..=b_max as usize {
        let next = if j % 2 == 0 {
            let half = &perms[j / 2];
            half.iter().map(|&v| 2 * v).chain(half.iter().map(|&v| 2 * v + 1)).collect()
        } else {
            let k = ((j - 1) / 2) as u32;
            let mut p: Vec<u32> = perms[j - 1].iter().map(|&v| if v >= k { v + 1 } else { v }).collect();
            p.insert(k as usize, k);
            p
        };
        perms.push(next);
    }
    Ok(perms
        .into_iter()
        .enumerate()
        .skip(2)
        .map(|(b, map)| Permutation { base: b as u32, map })
        .collect())
}

pub fn faure92_permutation(base: u32) -> Result<Permutation> {
    Ok(faure92_permutations(base)?.pop().expect("non-empty"))
}

/// Shifts `p` mod b so that 0 lands at index ⌊b/2⌋.
pub fn offset_permutation(p: &Permutation) -> Permutation {
    let b = p.base;
    let o = (b - p.map[(b / 2) as usize]) % b;
    Permutation { base: b, map: p.map.iter().map(|&v| (v + o) % b).collect() }
}

fn require_leading_zero(p: &Permutation) -> Result<()> {
    if p.map[0] != 0 {
        return Err(Error::InvalidInput(format!("permutation for base {} does not start with 0", p.base)));
    }
    Ok(())
}

/// Drops the leading zero.
pub fn factors_method1(p: &Permutation) -> Result<FactorVector> {
    require_leading_zero(p)?;
    Ok(FactorVector { base: p.base, factors: p.map[1..].to_vec() })
}

/// Applies the offset and deletes the zero entry.
pub fn factors_method2(p: &Permutation) -> Result<FactorVector> {
    require_leading_zero(p)?;
    let q = offset_permutation(p);
    Ok(FactorVector { base: p.base, factors: q.map.into_iter().filter(|&v| v != 0).collect() })
}

/// Permutations keyed by base.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSet(pub BTreeMap<u32, Permutation>);

impl PermutationSet {
    pub fn get(&self, base: u32) -> Option<&Permutation> {
        self.0.get(&base)
    }

    pub fn insert(&mut self, p: Permutation) {
        self.0.insert(p.base, p);
    }

    /// Faure (1992) permutation for each listed base.
    pub fn faure92(bases: &[u32]) -> Result<Self> {
        let max = bases.iter().copied().max().unwrap_or(2).max(2);
        let all = faure92_permutations(max)?;
        Ok(Self(bases.iter().map(|&b| (b, all[b as usize - 2].clone())).collect()))
    }

    pub fn offset(bases: &[u32]) -> Result<Self> {
        let f = Self::faure92(bases)?;
        Ok(Self(f.0.into_iter().map(|(b, p)| (b, offset_permutation(&p))).collect()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (b, p) in &self.0 {
            let vals: Vec<String> = p.map.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{b}: {}\n", vals.join(" ")));
        }
        out
    }
}

/// Parses `base: v0 v1 ...` lines; `#` starts a comment.
pub fn parse_permutation_set(text: &str) -> Result<PermutationSet> {
    let mut set = PermutationSet::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let (head, tail) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse { line: lineno, msg: "missing ':'".into() })?;
        let base: u32 = head
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: lineno, msg: format!("bad base {:?}", head.trim()) })?;
        let map = tail
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| Error::Parse { line: lineno, msg: format!("bad entry {t:?}") }))
            .collect::<Result<Vec<_>>>()?;
        if set.0.contains_key(&base) {
            return Err(Error::Validation { base, msg: "duplicate base".into() });
        }
        set.insert(Permutation::new(base, map)?);
    }
    Ok(set)
}

pub fn load_permutation_set(path: impl AsRef<Path>) -> Result<PermutationSet> {
    parse_permutation_set(&std::fs::read_to_string(path)?)
}
