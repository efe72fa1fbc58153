//! Named constructions and the criterion tables built from them.
//!
//! Table rows use the calibrated criterion settings: base 2, pairs only,
//! one value per projection. Faure rows enumerate the index in Gray-code
//! order and use a norm bound large enough that raising it changes nothing;
//! Halton rows use natural order and `L = ⌈log2 n⌉`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::negdep::{criterion_with, Aggregation, CriterionBase, CriterionConfig, CriterionReport};
use crate::numth::{first_primes, smallest_prime_at_least};
use crate::permute::{
    factors_method1, factors_method2, faure92_permutation, load_permutation_set, PermutationSet,
};
use crate::sequences::{Family, FaureGeneralization, Generalization, IndexOrder, SequenceSpec};

/// Variant registry shared by tables, figures and the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Regular,
    Faure92,
    Offset,
    /// Permutations read from a file (`dl`, `fl` or anything else).
    File { name: String, path: PathBuf },
}

impl Variant {
    pub fn label(&self, family: Family) -> String {
        match (self, family) {
            (Variant::Regular, _) => "Regular".into(),
            (Variant::Faure92, _) => "Faure 1992".into(),
            (Variant::Offset, Family::Faure | Family::Gfaure) => "F Offset".into(),
            (Variant::Offset, _) => "Offset".into(),
            (Variant::File { name, .. }, _) => name.to_uppercase(),
        }
    }
}

/// Halton (any s) or Faure (base = smallest prime >= s) with a variant applied.
pub fn variant_spec(family: Family, s: usize, variant: &Variant) -> Result<SequenceSpec> {
    match family {
        Family::Halton | Family::Ghalton => {
            let bases = first_primes(s);
            let perms = match variant {
                Variant::Regular => return Ok(SequenceSpec::new(Family::Halton, s)),
                Variant::Faure92 => PermutationSet::faure92(&bases)?,
                Variant::Offset => PermutationSet::offset(&bases)?,
                Variant::File { path, .. } => load_permutation_set(path)?,
            };
            Ok(SequenceSpec::new(Family::Ghalton, s).with_generalization(Generalization::Permutations(perms)))
        }
        Family::Faure | Family::Gfaure => {
            let b = smallest_prime_at_least(s as u32);
            let base = SequenceSpec::new(Family::Faure, s).with_base(b);
            let pi = faure92_permutation(b)?;
            let factors = match variant {
                Variant::Regular => return Ok(base),
                Variant::Faure92 => factors_method1(&pi)?,
                Variant::Offset => factors_method2(&pi)?,
                Variant::File { .. } => {
                    return Err(Error::InvalidInput("Faure variants take factors, not permutation files".into()))
                }
            };
            let mut f = factors;
            f.factors.truncate(s);
            Ok(SequenceSpec { family: Family::Gfaure, ..base }
                .with_generalization(Generalization::Faure(FaureGeneralization::Factors(f))))
        }
        Family::Vdc => Err(Error::InvalidInput("tables cover Halton and Faure only".into())),
    }
}

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n.max(2) - 1).leading_zeros()
}

/// Calibrated index order and norm bound for a table row.
pub fn calibrated(family: Family, n: usize) -> (IndexOrder, u32) {
    match family {
        Family::Faure | Family::Gfaure => (IndexOrder::Gray, 2 * ceil_log2(n)),
        _ => (IndexOrder::Natural, ceil_log2(n)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRowSpec {
    pub table: u8,
    pub family: Family,
    pub variant: Variant,
    pub s: usize,
    pub n: usize,
}

impl TableRowSpec {
    pub fn label(&self) -> String {
        self.variant.label(self.family)
    }

    /// Construction base for Faure rows, `None` for Halton.
    pub fn base(&self) -> Option<u32> {
        matches!(self.family, Family::Faure | Family::Gfaure).then(|| smallest_prime_at_least(self.s as u32))
    }
}

/// Rows of table `t` (1 and 3 are Faure, 2 and 4 Halton). File-based
/// Halton variants are included only when a path is supplied.
pub fn table_rows(t: u8, dl: Option<PathBuf>, fl: Option<PathBuf>) -> Result<Vec<TableRowSpec>> {
    let (family, sizes): (Family, [(usize, usize); 3]) = match t {
        1 => (Family::Faure, [(4, 3125), (12, 2197), (52, 2809)]),
        2 => (Family::Halton, [(4, 3125), (12, 2197), (52, 2809)]),
        3 => (Family::Faure, [(4, 5000), (12, 5000), (52, 5000)]),
        4 => (Family::Halton, [(4, 5000), (12, 5000), (52, 5000)]),
        _ => return Err(Error::InvalidInput(format!("no table {t}; choose 1 to 4"))),
    };
    let mut variants = vec![Variant::Regular, Variant::Faure92, Variant::Offset];
    if family == Family::Halton {
        for (name, p) in [("dl", dl), ("fl", fl)] {
            if let Some(path) = p {
                variants.push(Variant::File { name: name.into(), path });
            }
        }
    }
    Ok(sizes
        .iter()
        .flat_map(|&(s, n)| variants.iter().map(move |v| TableRowSpec { table: t, family, variant: v.clone(), s, n }))
        .collect())
}

/// Evaluates one row with the calibrated settings, optionally overriding L.
pub fn evaluate_row(row: &TableRowSpec, norm_bound: Option<u32>, exec: Exec) -> Result<CriterionReport> {
    let (order, l) = calibrated(row.family, row.n);
    let spec = variant_spec(row.family, row.s, &row.variant)?.with_order(order);
    let p = spec.generate_with(row.n, exec)?;
    let cfg = CriterionConfig::new(2, row.s, Some(norm_bound.unwrap_or(l))).aggregation(Aggregation::PerProjection);
    criterion_with(&p, &CriterionBase::Uniform(2), &cfg, exec)
}
