//! Replication engine: randomized estimates, MSE / variance, convergence
//! sweeps and histogram studies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::integrands::{Integrand, IntegrandSpec};
use crate::negdep::NeumaierSum;
use crate::randomize::{derive_stream, Randomization, RandomizerKind, RandomizerSpec, Scratch, SplitMix64};
use crate::sequences::{packed_value, PointSet, RealPoints, SequenceSpec};

pub const DEFAULT_REPLICATIONS: usize = 25;

/// Where the points come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    Sequence(SequenceSpec),
    /// Independent uniforms, fresh for every replication.
    MonteCarlo { s: usize },
}

impl Construction {
    pub fn s(&self) -> usize {
        match self {
            Construction::Sequence(spec) => spec.s,
            Construction::MonteCarlo { s } => *s,
        }
    }

    pub fn default_label(&self) -> String {
        match self {
            Construction::Sequence(spec) => serde_json::to_value(spec.family)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default(),
            Construction::MonteCarlo { .. } => "mc".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub label: String,
    pub construction: Construction,
    pub randomizer: RandomizerKind,
    pub integrand: IntegrandSpec,
    /// Checkpoints, strictly increasing.
    pub ns: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
}

impl ExperimentPlan {
    pub fn new(construction: Construction, randomizer: RandomizerKind, integrand: IntegrandSpec, ns: Vec<usize>) -> Self {
        Self {
            label: construction.default_label(),
            construction,
            randomizer,
            integrand,
            ns,
            replications: DEFAULT_REPLICATIONS,
            master_seed: 0,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_replications(mut self, v: usize) -> Self {
        self.replications = v;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::InvalidInput(format!("V = {} but at least 2 replications are needed", self.replications)));
        }
        if self.ns.is_empty() {
            return Err(Error::InvalidInput("no sample sizes given".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidInput(format!("sample size {n} < 2")));
        }
        if self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("sample sizes must be strictly increasing".into()));
        }
        let dim = self.integrand.dim();
        if dim != self.construction.s() {
            return Err(Error::DimensionMismatch { expected: dim, got: self.construction.s() });
        }
        match &self.construction {
            Construction::Sequence(spec) => spec.validate(),
            Construction::MonteCarlo { .. } if self.randomizer != RandomizerKind::None => {
                Err(Error::InvalidInput("Monte Carlo points take no randomizer".into()))
            }
            Construction::MonteCarlo { .. } => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Mse,
    Var,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Mse => "MSE",
            Metric::Var => "Var",
        })
    }
}

/// One checkpoint of a replication run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub n: usize,
    pub metric: Metric,
    pub value: f64,
    /// μ̂_1 ..= μ̂_V
    pub estimates: Vec<f64>,
}

/// A whole plan's output, with the plan echoed for provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub plan: ExperimentPlan,
    pub rows: Vec<ExperimentResult>,
}

impl ExperimentRun {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Mean of f over the points, with compensated summation.
pub fn estimate_once(points: &RealPoints, f: &dyn Integrand) -> Result<f64> {
    if points.s != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: points.s });
    }
    if points.n == 0 {
        return Err(Error::InvalidInput("empty point set".into()));
    }
    let mut acc = NeumaierSum::default();
    for i in 0..points.n {
        acc.add(f.eval(points.row(i)));
    }
    Ok(acc.total() / points.n as f64)
}

/// MSE against a known mean, else the unbiased sample variance.
pub fn summarize(estimates: &[f64], mu: Option<f64>) -> (Metric, f64) {
    let v = estimates.len() as f64;
    match mu {
        Some(mu) => {
            let mut acc = NeumaierSum::default();
            for &e in estimates {
                acc.add((e - mu) * (e - mu));
            }
            (Metric::Mse, acc.total() / v)
        }
        None => {
            let mut m = NeumaierSum::default();
            for &e in estimates {
                m.add(e);
            }
            let mean = m.total() / v;
            let mut acc = NeumaierSum::default();
            for &e in estimates {
                acc.add((e - mean) * (e - mean));
            }
            (Metric::Var, acc.total() / (v - 1.0))
        }
    }
}

/// Running means at each checkpoint for one replication.
fn replicate(
    plan: &ExperimentPlan,
    base: Option<&PointSet>,
    f: &dyn Integrand,
    v: usize,
) -> Result<Vec<f64>> {
    let s = plan.construction.s();
    let n_max = *plan.ns.last().expect("validated");
    let mut out = Vec::with_capacity(plan.ns.len());
    let mut acc = NeumaierSum::default();
    let mut x = vec![0.0; s];
    let mut next = 0;
    match base {
        Some(p) => {
            let spec = RandomizerSpec::new(plan.randomizer, plan.master_seed, v as u64);
            let rnd = Randomization::for_points(&spec, p)?;
            let mut sc = Scratch::default();
            let mut y = vec![0u64; s];
            let scale = p.scale();
            for i in 0..n_max {
                rnd.apply_point(p.row(i), &mut y, &mut sc);
                for j in 0..s {
                    x[j] = packed_value(y[j], scale[j]);
                }
                acc.add(f.eval(&x));
                if i + 1 == plan.ns[next] {
                    out.push(acc.total() / (i + 1) as f64);
                    next += 1;
                }
            }
        }
        None => {
            let mut rng = SplitMix64::new(derive_stream(plan.master_seed, v as u64, u64::MAX));
            for i in 0..n_max {
                for xj in x.iter_mut() {
                    *xj = rng.next_f64();
                }
                acc.add(f.eval(&x));
                if i + 1 == plan.ns[next] {
                    out.push(acc.total() / (i + 1) as f64);
                    next += 1;
                }
            }
        }
    }
    Ok(out)
}

pub fn run_replications(plan: &ExperimentPlan) -> Result<ExperimentRun> {
    run_replications_with(plan, Exec::default())
}

/// Replications run concurrently; results are reduced in replication order.
pub fn run_replications_with(plan: &ExperimentPlan, exec: Exec) -> Result<ExperimentRun> {
    plan.validate()?;
    let f = plan.integrand.build();
    let n_max = *plan.ns.last().expect("validated");
    let base = match &plan.construction {
        Construction::Sequence(spec) => Some(spec.generate_with(n_max, exec)?),
        Construction::MonteCarlo { .. } => None,
    };
    let per_v = exec.map_range(plan.replications, |v| replicate(plan, base.as_ref(), f.as_ref(), v));
    let per_v = per_v.into_iter().collect::<Result<Vec<_>>>()?;
    let mu = f.true_mean();
    let rows = plan
        .ns
        .iter()
        .enumerate()
        .map(|(t, &n)| {
            let estimates: Vec<f64> = per_v.iter().map(|e| e[t]).collect();
            let (metric, value) = summarize(&estimates, mu);
            ExperimentResult { n, metric, value, estimates }
        })
        .collect();
    Ok(ExperimentRun { plan: plan.clone(), rows })
}

/// Row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub metric: Metric,
    pub value: f64,
    pub construction: String,
    pub randomizer: String,
}

fn randomizer_label(k: RandomizerKind) -> String {
    serde_json::to_value(k).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub fn convergence_sweep(plan: &ExperimentPlan, exec: Exec) -> Result<Vec<SweepRow>> {
    let run = run_replications_with(plan, exec)?;
    Ok(run
        .rows
        .iter()
        .map(|r| SweepRow {
            n: r.n,
            metric: r.metric,
            value: r.value,
            construction: plan.label.clone(),
            randomizer: randomizer_label(plan.randomizer),
        })
        .collect())
}

/// Headered CSV; `csv` handles quoting.
pub fn write_rows_csv<W: std::io::Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    /// `scrambled`, `variant` or `mc`.
    pub kind: String,
    pub label: String,
    pub replicate: usize,
    pub metric: Metric,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramStudy {
    pub n: usize,
    /// Independent scramblings, each estimated from V replications.
    pub scramblings: usize,
    pub replications: usize,
    pub master_seed: u64,
    pub integrand: IntegrandSpec,
    /// Sequence scrambled R times.
    pub scrambled: SequenceSpec,
    pub scrambler: RandomizerKind,
    /// Deterministic variants, each randomized by a digital shift.
    pub variants: Vec<(String, SequenceSpec)>,
}

impl HistogramStudy {
    fn plan(&self, c: Construction, r: RandomizerKind, label: &str, seed: u64) -> ExperimentPlan {
        ExperimentPlan::new(c, r, self.integrand.clone(), vec![self.n])
            .with_label(label)
            .with_replications(self.replications)
            .with_seed(seed)
    }
}

/// R scrambled values, one per variant, then the MC baseline.
pub fn histogram_study(study: &HistogramStudy, exec: Exec) -> Result<Vec<HistogramRow>> {
    let mut rows = Vec::with_capacity(study.scramblings + study.variants.len() + 1);
    let scrambled = Construction::Sequence(study.scrambled.clone());
    let label = scrambled.default_label();
    for r in 0..study.scramblings {
        let seed = derive_stream(study.master_seed, r as u64, u64::MAX - 1);
        let run = run_replications_with(&study.plan(scrambled.clone(), study.scrambler, &label, seed), exec)?;
        let row = &run.rows[0];
        rows.push(HistogramRow { kind: "scrambled".into(), label: label.clone(), replicate: r, metric: row.metric, value: row.value });
    }
    for (name, spec) in &study.variants {
        let plan = study.plan(Construction::Sequence(spec.clone()), RandomizerKind::DigitalShift, name, study.master_seed);
        let row = &run_replications_with(&plan, exec)?.rows[0];
        rows.push(HistogramRow { kind: "variant".into(), label: name.clone(), replicate: 0, metric: row.metric, value: row.value });
    }
    let mc = Construction::MonteCarlo { s: study.scrambled.s };
    let row = &run_replications_with(&study.plan(mc, RandomizerKind::None, "mc", study.master_seed), exec)?.rows[0];
    rows.push(HistogramRow { kind: "mc".into(), label: "mc".into(), replicate: 0, metric: row.metric, value: row.value });
    Ok(rows)
}

/// `start, 2·start, ..., multiples·start`.
pub fn n_grid(start: usize, multiples: usize) -> Vec<usize> {
    (1..=multiples).map(|m| m * start).collect()
}

/// Accepts `start:multiples` or a comma-separated list.
pub fn parse_ns(text: &str) -> Result<Vec<usize>> {
    let bad = |t: &str| Error::InvalidInput(format!("bad sample-size list {t:?}"));
    if let Some((a, b)) = text.split_once(':') {
        let start = a.trim().parse().map_err(|_| bad(text))?;
        let mult = b.trim().parse().map_err(|_| bad(text))?;
        if start == 0 || mult == 0 {
            return Err(bad(text));
        }
        return Ok(n_grid(start, mult));
    }
    text.split(',').map(|t| t.trim().parse().map_err(|_| bad(text))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrands::H1;
    use crate::sequences::Family;

    struct Const(f64, usize);
    impl Integrand for Const {
        fn name(&self) -> String {
            "const".into()
        }
        fn dim(&self) -> usize {
            self.1
        }
        fn eval(&self, _: &[f64]) -> f64 {
            self.0
        }
        fn true_mean(&self) -> Option<f64> {
            Some(0.25)
        }
    }

    #[test]
    fn estimate_examples() {
        let p = RealPoints { n: 2, s: 2, data: vec![0.0, 0.0, 0.5, 0.5] };
        assert_eq!(estimate_once(&p, &H1 { s: 2 }).unwrap(), 0.5);
        assert_eq!(estimate_once(&p, &Const(1.0, 2)).unwrap(), 1.0);
        assert!(estimate_once(&p, &H1 { s: 3 }).is_err());
    }

    #[test]
    fn constant_metrics() {
        let (m, v) = summarize(&[2.0; 5], Some(0.5));
        assert_eq!((m, v), (Metric::Mse, 2.25));
        let (m, v) = summarize(&[2.0; 5], None);
        assert_eq!((m, v), (Metric::Var, 0.0));
    }

    #[test]
    fn unrandomized_sequence_repeats() {
        let spec = SequenceSpec::new(Family::Faure, 4).with_base(5);
        let plan = ExperimentPlan::new(Construction::Sequence(spec), RandomizerKind::None, IntegrandSpec::H1 { s: 4 }, vec![125, 625]);
        let run = run_replications(&plan).unwrap();
        assert_eq!(run.rows.len(), 2);
        for r in &run.rows {
            assert!(r.estimates.windows(2).all(|w| w[0] == w[1]));
            let e = r.estimates[0] - 4.0 / 3.0 - 3.0;
            assert!((r.value - e * e).abs() < 1e-15);
        }
    }

    #[test]
    fn plan_validation() {
        let spec = SequenceSpec::new(Family::Halton, 3);
        let ok = ExperimentPlan::new(Construction::Sequence(spec), RandomizerKind::DigitalShift, IntegrandSpec::H0 { s: 3 }, vec![10, 20]);
        assert!(ok.validate().is_ok());
        assert!(ok.clone().with_replications(1).validate().is_err());
        assert!(ExperimentPlan { ns: vec![20, 10], ..ok.clone() }.validate().is_err());
        assert!(ExperimentPlan { ns: vec![1], ..ok.clone() }.validate().is_err());
        assert!(ExperimentPlan { integrand: IntegrandSpec::H0 { s: 4 }, ..ok.clone() }.validate().is_err());
    }

    #[test]
    fn ns_parsing() {
        assert_eq!(parse_ns("3125:2").unwrap(), vec![3125, 6250]);
        assert_eq!(parse_ns("10, 20,30").unwrap(), vec![10, 20, 30]);
        assert!(parse_ns("0:3").is_err());
        assert!(parse_ns("a").is_err());
    }

    #[test]
    fn histogram_shape() {
        let study = HistogramStudy {
            n: 64,
            scramblings: 3,
            replications: 4,
            master_seed: 9,
            integrand: IntegrandSpec::H1 { s: 2 },
            scrambled: SequenceSpec::new(Family::Faure, 2).with_base(2),
            scrambler: RandomizerKind::OwenScramble,
            variants: vec![("regular".into(), SequenceSpec::new(Family::Faure, 2).with_base(2))],
        };
        let rows = histogram_study(&study, Exec::Sequential).unwrap();
        assert_eq!(rows.len(), 3 + 1 + 1);
        assert_eq!(rows, histogram_study(&study, Exec::Parallel).unwrap());
    }
}
