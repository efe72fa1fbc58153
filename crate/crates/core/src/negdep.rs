//! γ_b, pair counts M_b(k), the scaled counts C_b(k), the K_{d,w,s} family,
//! the c / c̄ criteria and complete quasi-equidistribution checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::numth::{checked_pow, digit_precision, DigitVector};
use crate::sequences::PointSet;

/// Slack used when testing `C <= 1`.
pub const CQE_EPS: f64 = 1e-9;

/// Number of leading digits two values share.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Gamma {
    Digits(usize),
    Infinite,
}

pub fn gamma(x: &DigitVector, y: &DigitVector) -> Result<Gamma> {
    if x.base != y.base {
        return Err(Error::BaseMismatch(x.base, y.base));
    }
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    Ok(match x.digits.iter().zip(&y.digits).position(|(a, b)| a != b) {
        Some(i) => Gamma::Digits(i),
        None => Gamma::Infinite,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct KVector(pub Vec<u32>);

impl KVector {
    pub fn zeros(s: usize) -> Self {
        KVector(vec![0; s])
    }

    pub fn s(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.0.iter().filter(|&&k| k > 0).count()
    }

    pub fn support(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &k)| k > 0).map(|(j, _)| j).collect()
    }

    /// Largest minus smallest nonzero index; `None` for the zero vector.
    pub fn range(&self) -> Option<usize> {
        let sup = self.support();
        Some(sup.last()? - sup.first()?)
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Base(s) in which point sets are measured.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriterionBase {
    Uniform(u32),
    PerCoordinate(Vec<u32>),
}

impl CriterionBase {
    pub fn resolve(&self, s: usize) -> Result<Vec<u32>> {
        match self {
            CriterionBase::Uniform(b) => Ok(vec![*b; s]),
            CriterionBase::PerCoordinate(v) if v.len() == s => Ok(v.clone()),
            CriterionBase::PerCoordinate(v) => Err(Error::DimensionMismatch { expected: s, got: v.len() }),
        }
    }
}

/// A point set re-expressed in the criterion bases, stored by coordinate.
///
/// Re-expansion is exact: coordinate `Y / b^K` becomes `⌊Y c^Kc / b^K⌋`.
#[derive(Clone, Debug)]
pub struct CriterionView {
    n: usize,
    bases: Vec<u32>,
    ndigits: Vec<usize>,
    pows: Vec<Vec<u64>>,
    cols: Vec<Vec<u64>>,
}

impl CriterionView {
    pub fn new(p: &PointSet, base: &CriterionBase) -> Result<Self> {
        let bases = base.resolve(p.s())?;
        let mut ndigits = Vec::with_capacity(bases.len());
        let mut pows = Vec::with_capacity(bases.len());
        let mut cols = Vec::with_capacity(bases.len());
        for (j, &c) in bases.iter().enumerate() {
            if c < 2 {
                return Err(Error::Domain(format!("criterion base {c} < 2")));
            }
            let kc = digit_precision(c);
            let pw: Vec<u64> = (0..=kc)
                .map(|e| checked_pow(c, e).ok_or_else(|| Error::Domain(format!("criterion base {c} too large"))))
                .collect::<Result<_>>()?;
            let top = pw[kc];
            let (b, scale) = (p.bases()[j], p.scale()[j]);
            let col = (0..p.n())
                .map(|i| {
                    let y = p.raw(i, j);
                    if b == c {
                        y
                    } else {
                        ((y as u128 * top as u128) / scale as u128) as u64
                    }
                })
                .collect();
            ndigits.push(kc);
            pows.push(pw);
            cols.push(col);
        }
        Ok(Self { n: p.n(), bases, ndigits, pows, cols })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[u32] {
        &self.bases
    }

    /// ⌊c_j^k x_{ij}⌋
    #[inline]
    fn prefix(&self, j: usize, i: usize, k: u32) -> u64 {
        self.cols[j][i] / self.pows[j][self.ndigits[j] - k as usize]
    }

    fn check_k(&self, k: &KVector) -> Result<()> {
        if k.s() != self.s() {
            return Err(Error::DimensionMismatch { expected: self.s(), got: k.s() });
        }
        for (j, &kj) in k.0.iter().enumerate() {
            if kj as usize > self.ndigits[j] {
                return Err(Error::DigitBudgetExceeded {
                    coord: j,
                    k: kj,
                    base: self.bases[j],
                    available: self.ndigits[j],
                });
            }
        }
        Ok(())
    }

    pub fn m_count(&self, k: &KVector) -> Result<u64> {
        self.check_k(k)?;
        let sup = k.support();
        let radix: Option<u128> = sup
            .iter()
            .try_fold(1u128, |acc, &j| acc.checked_mul(self.pows[j][k.0[j] as usize] as u128));
        Ok(match radix {
            Some(_) => {
                let mut keys: Vec<u128> = (0..self.n)
                    .map(|i| {
                        sup.iter().fold(0u128, |acc, &j| {
                            acc * self.pows[j][k.0[j] as usize] as u128 + self.prefix(j, i, k.0[j]) as u128
                        })
                    })
                    .collect();
                keys.sort_unstable();
                ordered_pairs_in_runs(&keys)
            }
            None => {
                let mut keys: Vec<Vec<u64>> = (0..self.n)
                    .map(|i| sup.iter().map(|&j| self.prefix(j, i, k.0[j])).collect())
                    .collect();
                keys.sort_unstable();
                ordered_pairs_in_runs(&keys)
            }
        })
    }

    pub fn c_value(&self, k: &KVector) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::Domain("C_b needs at least two points".into()));
        }
        let m = self.m_count(k)?;
        Ok(self.scale_count(k, m))
    }

    fn scale_count(&self, k: &KVector, m: u64) -> f64 {
        let vol: f64 = k.0.iter().zip(&self.bases).map(|(&kj, &b)| (b as f64).powi(kj as i32)).product();
        vol * m as f64 / (self.n as f64 * (self.n as f64 - 1.0))
    }

    /// Smallest L with `min_base^L >= n`, at least 2.
    pub fn default_norm_bound(&self) -> u32 {
        let b = *self.bases.iter().min().unwrap_or(&2) as u128;
        let mut l = 0u32;
        let mut p = 1u128;
        while p < self.n as u128 {
            p *= b;
            l += 1;
        }
        l.max(2)
    }
}

fn ordered_pairs_in_runs<T: PartialEq>(sorted: &[T]) -> u64 {
    let mut total = 0u64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let m = (j - i) as u64;
        total += m * (m - 1);
        i = j;
    }
    total
}

pub fn m_count(p: &PointSet, k: &KVector, base: &CriterionBase) -> Result<u64> {
    CriterionView::new(p, base)?.m_count(k)
}

pub fn c_value(p: &PointSet, k: &KVector, base: &CriterionBase) -> Result<f64> {
    CriterionView::new(p, base)?.c_value(k)
}

/// C_b(k) of a (0,m,s)-net in base b, which depends only on |k|.
pub fn net_closed_form(b: u32, m: u32, knorm: u32) -> Result<f64> {
    if b < 2 {
        return Err(Error::Domain(format!("base {b} < 2")));
    }
    if m == 0 {
        return Err(Error::Domain("b^m = 1 leaves C undefined".into()));
    }
    let bf = b as f64;
    let rest = if knorm >= m { 0.0 } else { bf.powi((m - knorm) as i32) - 1.0 };
    Ok(bf.powi(knorm as i32) * rest / (bf.powi(m as i32) - 1.0))
}

/// Index sets of size `lo..=hi` whose spread is at most `w`.
fn supports(s: usize, lo: usize, hi: usize, w: usize) -> Vec<Vec<usize>> {
    fn grow(s: usize, hi: usize, w: usize, cur: &mut Vec<usize>, lo: usize, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= lo {
            out.push(cur.clone());
        }
        if cur.len() == hi {
            return;
        }
        let next = cur.last().map_or(0, |&l| l + 1);
        let last = cur.first().map_or(s - 1, |&f| (f + w).min(s - 1));
        for j in next..=last {
            cur.push(j);
            grow(s, hi, w, cur, lo, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    if s > 0 {
        grow(s, hi, w, &mut vec![], lo.max(1), &mut out);
    }
    out
}

/// Compositions of each total in `lo..=hi` into `parts` positive parts.
fn compositions(parts: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    fn rec(parts: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 1..=left.saturating_sub(parts as u32 - 1) {
            cur.push(v);
            rec(parts - 1, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    for t in lo.max(parts as u32)..=hi {
        rec(parts, t, &mut vec![], &mut out);
    }
    out
}

/// Every k with 2 <= nnz(k) <= d, r(k) <= w, 2 <= |k| <= L, in
/// lexicographic order.
pub fn enumerate_k_family(s: usize, d: usize, w: usize, l: u32) -> Result<Vec<KVector>> {
    validate_family(s, d, w, l)?;
    Ok(expand(s, &supports(s, 2, d, w), 2, l))
}

fn validate_family(s: usize, d: usize, w: usize, l: u32) -> Result<()> {
    if d < 2 || d > s {
        return Err(Error::Domain(format!("need 2 <= d <= s, got d = {d}, s = {s}")));
    }
    if w < 1 {
        return Err(Error::Domain("window w must be at least 1".into()));
    }
    if l < 2 {
        return Err(Error::Domain(format!("norm bound L = {l} < 2")));
    }
    Ok(())
}

fn expand(s: usize, sups: &[Vec<usize>], lo: u32, hi: u32) -> Vec<KVector> {
    let mut out = vec![];
    for sup in sups {
        for comp in compositions(sup.len(), lo, hi) {
            let mut k = vec![0; s];
            for (&j, &v) in sup.iter().zip(&comp) {
                k[j] = v;
            }
            out.push(KVector(k));
        }
    }
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// One entry per k in K_{d,w,s}.
    #[default]
    PerK,
    /// One entry per coordinate projection u (2 <= |u| <= d, spread <= w):
    /// the largest C_b(k) over nonzero k supported in u with |k| <= L.
    PerProjection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionConfig {
    pub d: usize,
    pub w: usize,
    /// `None` selects [`CriterionView::default_norm_bound`].
    pub norm_bound: Option<u32>,
    pub aggregation: Aggregation,
}

impl CriterionConfig {
    pub fn new(d: usize, w: usize, norm_bound: Option<u32>) -> Self {
        Self { d, w, norm_bound, aggregation: Aggregation::PerK }
    }

    pub fn aggregation(mut self, a: Aggregation) -> Self {
        self.aggregation = a;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionEntry {
    pub projection: Vec<usize>,
    pub k: KVector,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub bases: Vec<u32>,
    pub n: usize,
    pub s: usize,
    pub d: usize,
    pub w: usize,
    pub norm_bound: u32,
    pub aggregation: Aggregation,
    pub entries: Vec<CriterionEntry>,
    pub max: f64,
    pub mean: f64,
    pub argmax: KVector,
}

impl CriterionReport {
    fn from_entries(
        view: &CriterionView,
        d: usize,
        w: usize,
        l: u32,
        aggregation: Aggregation,
        entries: Vec<CriterionEntry>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("the k family is empty".into()));
        }
        let mut best = 0;
        let mut sum = NeumaierSum::default();
        for (i, e) in entries.iter().enumerate() {
            if e.value > entries[best].value {
                best = i;
            }
            sum.add(e.value);
        }
        let mean = sum.total() / entries.len() as f64;
        Ok(Self {
            bases: view.bases.clone(),
            n: view.n,
            s: view.s(),
            d,
            w,
            norm_bound: l,
            aggregation,
            max: entries[best].value,
            mean,
            argmax: entries[best].k.clone(),
            entries,
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["k", "C"])?;
        for e in &self.entries {
            out.write_record([e.k.to_string(), format!("{:.12}", e.value)])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Compensated (Neumaier) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// M(a, c) for every coordinate pair within the window and every a + c <= L.
#[derive(Clone, Debug)]
pub struct PairCounts {
    l: u32,
    pairs: Vec<(usize, usize)>,
    counts: Vec<Vec<Option<u64>>>,
}

impl PairCounts {
    pub fn compute(view: &CriterionView, w: usize, l: u32, exec: Exec) -> Self {
        let s = view.s();
        let pairs: Vec<(usize, usize)> =
            (0..s).flat_map(|i| (i + 1..s).filter(move |&j| j - i <= w).map(move |j| (i, j))).collect();
        let side = l as usize + 1;
        let counts = exec.map_range(pairs.len(), |pi| {
            let (i, j) = pairs[pi];
            let mut table = vec![None; side * side];
            let mut keys: Vec<(u64, u64)> = Vec::with_capacity(view.n);
            for a in 0..=l.min(view.ndigits[i] as u32) {
                keys.clear();
                keys.extend((0..view.n).map(|t| (view.prefix(i, t, a), view.cols[j][t])));
                keys.sort_unstable();
                for c in 0..=(l - a).min(view.ndigits[j] as u32) {
                    let div = view.pows[j][view.ndigits[j] - c as usize];
                    let mut total = 0u64;
                    let mut start = 0;
                    while start < keys.len() {
                        let (g, z) = (keys[start].0, keys[start].1 / div);
                        let mut end = start + 1;
                        while end < keys.len() && keys[end].0 == g && keys[end].1 / div == z {
                            end += 1;
                        }
                        let m = (end - start) as u64;
                        total += m * (m - 1);
                        start = end;
                    }
                    table[a as usize * side + c as usize] = Some(total);
                }
            }
            table
        });
        Self { l, pairs, counts }
    }

    fn get(&self, pi: usize, a: u32, c: u32) -> Option<u64> {
        self.counts[pi][a as usize * (self.l as usize + 1) + c as usize]
    }

    /// Criterion for any bound `l` not exceeding the one computed.
    pub fn report(&self, view: &CriterionView, l: u32, aggregation: Aggregation) -> Result<CriterionReport> {
        if l > self.l {
            return Err(Error::InvalidInput(format!("pair counts cover L <= {}, asked {l}", self.l)));
        }
        let s = view.s();
        let kvec = |i: usize, j: usize, a: u32, c: u32| {
            let mut k = vec![0; s];
            k[i] = a;
            k[j] = c;
            KVector(k)
        };
        let w = self.pairs.iter().map(|&(i, j)| j - i).max().unwrap_or(0);
        let mut entries = vec![];
        for (pi, &(i, j)) in self.pairs.iter().enumerate() {
            match aggregation {
                Aggregation::PerK => {
                    for a in 1..l {
                        for c in 1..=(l - a) {
                            if let Some(m) = self.get(pi, a, c) {
                                let k = kvec(i, j, a, c);
                                let value = view.scale_count(&k, m);
                                entries.push(CriterionEntry { projection: vec![i, j], k, value });
                            }
                        }
                    }
                }
                Aggregation::PerProjection => {
                    let mut best: Option<CriterionEntry> = None;
                    for a in 0..=l {
                        for c in 0..=(l - a) {
                            if a + c == 0 {
                                continue;
                            }
                            if let Some(m) = self.get(pi, a, c) {
                                let k = kvec(i, j, a, c);
                                let value = view.scale_count(&k, m);
                                if best.as_ref().is_none_or(|b| value > b.value) {
                                    best = Some(CriterionEntry { projection: vec![i, j], k, value });
                                }
                            }
                        }
                    }
                    entries.extend(best);
                }
            }
        }
        if aggregation == Aggregation::PerK {
            entries.sort_by(|x, y| x.k.cmp(&y.k));
        }
        CriterionReport::from_entries(view, 2, w, l, aggregation, entries)
    }
}

/// c and c̄ over K_{d,w,s} with one entry per k.
pub fn criterion(p: &PointSet, base: &CriterionBase, d: usize, w: usize, l: u32) -> Result<CriterionReport> {
    criterion_with(p, base, &CriterionConfig::new(d, w, Some(l)), Exec::default())
}

pub fn criterion_with(
    p: &PointSet,
    base: &CriterionBase,
    cfg: &CriterionConfig,
    exec: Exec,
) -> Result<CriterionReport> {
    let view = CriterionView::new(p, base)?;
    criterion_on_view(&view, cfg, exec)
}

pub fn criterion_on_view(view: &CriterionView, cfg: &CriterionConfig, exec: Exec) -> Result<CriterionReport> {
    let s = view.s();
    let l = cfg.norm_bound.unwrap_or_else(|| view.default_norm_bound());
    validate_family(s, cfg.d, cfg.w, l)?;
    if cfg.d == 2 {
        let pc = PairCounts::compute(view, cfg.w, l, exec);
        let mut r = pc.report(view, l, cfg.aggregation)?;
        r.w = cfg.w;
        return Ok(r);
    }
    let entries = match cfg.aggregation {
        Aggregation::PerK => {
            let ks = enumerate_k_family(s, cfg.d, cfg.w, l)?;
            let values = exec.map_range(ks.len(), |i| view.c_value(&ks[i]));
            ks.into_iter()
                .zip(values)
                .map(|(k, v)| Ok(CriterionEntry { projection: k.support(), k, value: v? }))
                .collect::<Result<Vec<_>>>()?
        }
        Aggregation::PerProjection => {
            let sups = supports(s, 2, cfg.d, cfg.w);
            let best = exec.map_range(sups.len(), |u| -> Result<CriterionEntry> {
                let sup = &sups[u];
                let inner: Vec<Vec<usize>> = supports(sup.len(), 1, sup.len(), sup.len())
                    .into_iter()
                    .map(|t| t.into_iter().map(|x| sup[x]).collect())
                    .collect();
                let mut best: Option<CriterionEntry> = None;
                for k in expand(s, &inner, 1, l) {
                    let value = view.c_value(&k)?;
                    if best.as_ref().is_none_or(|b| value > b.value) {
                        best = Some(CriterionEntry { projection: sup.clone(), k, value });
                    }
                }
                Ok(best.expect("non-empty support"))
            });
            best.into_iter().collect::<Result<Vec<_>>>()?
        }
    };
    CriterionReport::from_entries(view, cfg.d, cfg.w, l, cfg.aggregation, entries)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CqeReport {
    pub holds: bool,
    pub checked: usize,
    /// Sorted by C descending.
    pub violations: Vec<(KVector, f64)>,
}

/// Checks C_b(k) <= 1 + 1e-9 for every k with 1 <= |k| <= L.
pub fn cqe_check(p: &PointSet, base: &CriterionBase, l: u32) -> Result<CqeReport> {
    cqe_check_with(p, base, l, Exec::default())
}

pub fn cqe_check_with(p: &PointSet, base: &CriterionBase, l: u32, exec: Exec) -> Result<CqeReport> {
    let view = CriterionView::new(p, base)?;
    let s = view.s();
    let ks: Vec<KVector> = expand(s, &supports(s, 1, s, s), 1, l)
        .into_iter()
        .filter(|k| k.0.iter().enumerate().all(|(j, &kj)| kj as usize <= view.ndigits[j]))
        .collect();
    let values = exec.map_range(ks.len(), |i| view.c_value(&ks[i]));
    let mut violations = vec![];
    for (k, v) in ks.iter().zip(values) {
        let v = v?;
        if v > 1.0 + CQE_EPS {
            violations.push((k.clone(), v));
        }
    }
    violations.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(CqeReport { holds: violations.is_empty(), checked: ks.len(), violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(base: u32, x: f64) -> DigitVector {
        PointSet::from_reals(vec![base], &[x]).unwrap().digits(0, 0)
    }

    #[test]
    fn gamma_examples() {
        let a = dv(2, 0.25);
        assert_eq!(gamma(&a, &a).unwrap(), Gamma::Infinite);
        assert_eq!(gamma(&a, &dv(2, 0.30)).unwrap(), Gamma::Digits(4));
        assert_eq!(gamma(&dv(2, 0.0), &dv(2, 0.5)).unwrap(), Gamma::Digits(0));
        assert!(gamma(&a, &dv(3, 0.25)).is_err());
    }

    fn quad() -> PointSet {
        PointSet::from_reals(vec![2, 2], &[0.0, 0.0, 0.5, 0.5, 0.25, 0.75, 0.75, 0.25]).unwrap()
    }

    #[test]
    fn m_count_examples() {
        let p = quad();
        let b2 = CriterionBase::Uniform(2);
        assert_eq!(m_count(&p, &KVector(vec![0, 0]), &b2).unwrap(), 12);
        assert_eq!(m_count(&p, &KVector(vec![1, 1]), &b2).unwrap(), 0);
        assert_eq!(c_value(&p, &KVector(vec![1, 1]), &b2).unwrap(), 0.0);
        assert_eq!(c_value(&p, &KVector(vec![0, 0]), &b2).unwrap(), 1.0);
        let same = PointSet::from_reals(vec![2, 2], &[0.3, 0.6, 0.3, 0.6, 0.3, 0.6]).unwrap();
        assert_eq!(m_count(&same, &KVector(vec![5, 9]), &b2).unwrap(), 6);
        assert_eq!(c_value(&same, &KVector(vec![2, 1]), &b2).unwrap(), 8.0);
        assert!(matches!(
            m_count(&p, &KVector(vec![54, 0]), &b2),
            Err(Error::DigitBudgetExceeded { coord: 0, .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(net_closed_form(5, 3, 0).unwrap(), 1.0);
        assert_eq!(net_closed_form(5, 3, 3).unwrap(), 0.0);
        assert_eq!(net_closed_form(5, 3, 7).unwrap(), 0.0);
        assert!((net_closed_form(5, 5, 2).unwrap() - 3100.0 / 3124.0).abs() < 1e-15);
        assert!(net_closed_form(5, 0, 0).is_err());
    }

    #[test]
    fn family_examples() {
        let ks = enumerate_k_family(4, 2, 2, 2).unwrap();
        let expect: Vec<KVector> = [[0, 0, 1, 1], [0, 1, 0, 1], [0, 1, 1, 0], [1, 0, 1, 0], [1, 1, 0, 0]]
            .iter()
            .map(|v| KVector(v.to_vec()))
            .collect();
        assert_eq!(ks, expect);
        let ks = enumerate_k_family(2, 2, 2, 3).unwrap();
        assert_eq!(ks, vec![KVector(vec![1, 1]), KVector(vec![1, 2]), KVector(vec![2, 1])]);
        assert!(enumerate_k_family(3, 1, 3, 3).is_err());
        assert!(enumerate_k_family(3, 2, 0, 3).is_err());
        assert!(enumerate_k_family(3, 2, 3, 1).is_err());
    }

    #[test]
    fn pair_engine_matches_generic() {
        let p = crate::sequences::halton_set(300, 5, None, 1).unwrap();
        let b2 = CriterionBase::Uniform(2);
        let view = CriterionView::new(&p, &b2).unwrap();
        let fast = criterion_on_view(&view, &CriterionConfig::new(2, 3, Some(7)), Exec::Sequential).unwrap();
        let ks = enumerate_k_family(5, 2, 3, 7).unwrap();
        assert_eq!(fast.entries.len(), ks.len());
        for (e, k) in fast.entries.iter().zip(&ks) {
            assert_eq!(&e.k, k);
            assert_eq!(e.value, view.c_value(k).unwrap());
        }
    }

    #[test]
    fn cqe_duplicates_fail() {
        let same = PointSet::from_reals(vec![2, 2], &[0.3, 0.6, 0.3, 0.6]).unwrap();
        let r = cqe_check(&same, &CriterionBase::Uniform(2), 3).unwrap();
        assert!(!r.holds);
        assert_eq!(r.violations.len(), r.checked);
        assert_eq!(r.violations[0].0, KVector(vec![0, 3]));
    }
}
