use std::fmt::Write as _;
use std::path::Path;

use negdep::experiments::{
    convergence_sweep, histogram_study, parse_ns, write_rows_csv, Construction, ExperimentPlan, HistogramStudy,
};
use negdep::integrands::{IntegrandSpec, SanNetwork};
use negdep::negdep::{cqe_check_with, criterion_with, Aggregation, CriterionBase, CriterionConfig};
use negdep::permute::{
    factors_method1, factors_method2, faure92_permutation, load_permutation_set, FactorVector, Permutation,
    PermutationSet,
};
use negdep::presets::{calibrated, evaluate_row, table_rows, variant_spec, Variant};
use negdep::randomize::RandomizerKind;
use negdep::sequences::{Family, FaureGeneralization, Generalization, IndexOrder, PointSet, SequenceSpec};
use negdep::Exec;

use crate::args::*;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or flag combinations: exit code 2.
    Usage(String),
    /// Failures while computing or writing: exit code 1.
    Runtime(String),
}

impl From<negdep::Error> for CliError {
    fn from(e: negdep::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

/// Unreadable files are runtime failures; malformed contents are usage errors.
fn input(e: negdep::Error) -> CliError {
    match e {
        negdep::Error::Io(_) => CliError::Runtime(e.to_string()),
        e => usage(e),
    }
}

type Res<T> = std::result::Result<T, CliError>;

pub fn header(cli: &Cli) -> Res<String> {
    let json = serde_json::to_string(&cli.cmd).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(format!("# negdep {}\n# config: {json}\n", env!("CARGO_PKG_VERSION")))
}

fn order(o: OrderArg) -> IndexOrder {
    match o {
        OrderArg::Natural => IndexOrder::Natural,
        OrderArg::Gray => IndexOrder::Gray,
    }
}

fn family(f: FamilyArg) -> Res<Family> {
    Ok(match f {
        FamilyArg::Vdc => Family::Vdc,
        FamilyArg::Halton => Family::Halton,
        FamilyArg::Ghalton => Family::Ghalton,
        FamilyArg::Faure => Family::Faure,
        FamilyArg::Gfaure => Family::Gfaure,
        FamilyArg::Mc => return Err(usage("mc is only valid for converge")),
    })
}

fn permutations(text: &str, bases: &[u32]) -> Res<PermutationSet> {
    match text {
        "identity" => Ok(PermutationSet(bases.iter().map(|&b| (b, Permutation::identity(b))).collect())),
        "faure92" => PermutationSet::faure92(bases).map_err(usage),
        "offset" => PermutationSet::offset(bases).map_err(usage),
        _ => match text.strip_prefix("file:") {
            Some(p) => load_permutation_set(p).map_err(input),
            None => Err(usage(format!("unknown --perms {text:?}"))),
        },
    }
}

fn factors(text: &str, base: u32, s: usize) -> Res<FactorVector> {
    let mut f = match text {
        "f92" | "faure92" => factors_method1(&faure92_permutation(base).map_err(usage)?).map_err(usage)?,
        "offset" => factors_method2(&faure92_permutation(base).map_err(usage)?).map_err(usage)?,
        _ => {
            let p = text.strip_prefix("file:").ok_or_else(|| usage(format!("unknown --factors {text:?}")))?;
            let body = std::fs::read_to_string(p).map_err(|e| CliError::Runtime(format!("{p}: {e}")))?;
            let v = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<u32>().map_err(|_| usage(format!("{p}: bad factor {t:?}"))))
                .collect::<Res<Vec<_>>>()?;
            FactorVector::new(base, v).map_err(usage)?
        }
    };
    if f.factors.len() < s {
        return Err(usage(format!("{} factors for s = {s}", f.factors.len())));
    }
    f.factors.truncate(s);
    Ok(f)
}

/// Shared construction flags to a validated spec.
pub fn build_spec(
    fam: FamilyArg,
    s: usize,
    base: Option<u32>,
    perms: Option<&str>,
    facs: Option<&str>,
    ord: OrderArg,
    start: u64,
) -> Res<SequenceSpec> {
    let mut fam = family(fam)?;
    let mut spec = SequenceSpec::new(fam, s);
    if let Some(b) = base {
        spec = spec.with_base(b);
    }
    match fam {
        Family::Vdc | Family::Halton | Family::Ghalton => {
            if facs.is_some() {
                return Err(usage("--factors applies to Faure families"));
            }
            if let Some(p) = perms {
                if fam == Family::Halton {
                    fam = Family::Ghalton;
                }
                let set = permutations(p, &spec.bases())?;
                spec = spec.with_generalization(Generalization::Permutations(set));
            }
        }
        Family::Faure | Family::Gfaure => {
            if perms.is_some() {
                return Err(usage("--perms applies to Halton families"));
            }
            if let Some(f) = facs {
                fam = Family::Gfaure;
                let b = spec.bases()[0];
                let fv = factors(f, b, s)?;
                spec = spec.with_generalization(Generalization::Faure(FaureGeneralization::Factors(fv)));
            }
        }
    }
    spec.family = fam;
    spec.start_index = start;
    spec = spec.with_order(order(ord));
    spec.validate().map_err(usage)?;
    Ok(spec)
}

fn seq_spec(a: &SeqArgs) -> Res<SequenceSpec> {
    build_spec(a.family, a.s, a.base, a.perms.as_deref(), a.factors.as_deref(), a.order, a.start)
}

fn digit_string(p: &PointSet, i: usize, j: usize) -> String {
    let d = p.digits(i, j);
    let used = d.digits.iter().rposition(|&x| x != 0).map_or(1, |r| r + 1);
    let sep = if d.base > 10 { "." } else { "" };
    d.digits[..used].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(sep)
}

pub fn gen(a: &GenArgs, exec: Exec, out: &mut String) -> Res<()> {
    let spec = seq_spec(&a.seq)?;
    let p = spec.generate_with(a.n, exec)?;
    eprintln!("n = {}, s = {}, bases = {:?}", p.n(), p.s(), p.bases());
    let s = p.s();
    let mut cols: Vec<String> = (1..=s).map(|j| format!("x{j}")).collect();
    if a.digits {
        cols.extend((1..=s).map(|j| format!("d{j}")));
    }
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(&cols).map_err(rt)?;
    for i in 0..p.n() {
        let mut rec: Vec<String> = (0..s).map(|j| p.value(i, j).to_string()).collect();
        if a.digits {
            rec.extend((0..s).map(|j| digit_string(&p, i, j)));
        }
        w.write_record(&rec).map_err(rt)?;
    }
    push_csv(out, w)
}

fn rt<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn push_csv(out: &mut String, w: csv::Writer<Vec<u8>>) -> Res<()> {
    let bytes = w.into_inner().map_err(rt)?;
    out.push_str(&String::from_utf8(bytes).map_err(rt)?);
    Ok(())
}

fn criterion_base(text: &str, spec_bases: &[u32]) -> Res<CriterionBase> {
    if text == "own" {
        return Ok(CriterionBase::PerCoordinate(spec_bases.to_vec()));
    }
    let b: u32 = text.parse().map_err(|_| usage(format!("bad --criterion-base {text:?}")))?;
    if b < 2 {
        return Err(usage("--criterion-base must be at least 2"));
    }
    Ok(CriterionBase::Uniform(b))
}

fn aggregation(a: Option<AggregationArg>, default: Aggregation) -> Aggregation {
    match a {
        None => default,
        Some(AggregationArg::PerK) => Aggregation::PerK,
        Some(AggregationArg::PerProjection) => Aggregation::PerProjection,
    }
}

const CRITERIA_COLUMNS: [&str; 8] = ["Permutations", "b", "s", "d", "n", "c", "cbar", "L"];

pub fn criteria(a: &CriteriaArgs, exec: Exec, out: &mut String) -> Res<()> {
    let mut w = csv::Writer::from_writer(vec![]);
    let mut reports = vec![];
    if let Some(t) = a.table {
        if a.d != 2 || a.w.is_some() || a.criterion_base != "2" {
            return Err(usage("--table fixes d = 2, w = s and criterion base 2"));
        }
        let agg = aggregation(a.aggregation, Aggregation::PerProjection);
        w.write_record(CRITERIA_COLUMNS).map_err(rt)?;
        for row in table_rows(t, a.dl.clone(), a.fl.clone())? {
            let r = if agg == Aggregation::PerProjection {
                evaluate_row(&row, a.norm_bound, exec)?
            } else {
                let (ord, l) = calibrated(row.family, row.n);
                let spec = variant_spec(row.family, row.s, &row.variant)?.with_order(ord);
                let p = spec.generate_with(row.n, exec)?;
                let cfg = CriterionConfig::new(2, row.s, Some(a.norm_bound.unwrap_or(l))).aggregation(agg);
                criterion_with(&p, &CriterionBase::Uniform(2), &cfg, exec)?
            };
            let b = row.base().map(|b| b.to_string()).unwrap_or_default();
            w.write_record([
                row.label(),
                b,
                row.s.to_string(),
                "2".into(),
                row.n.to_string(),
                r.max.to_string(),
                r.mean.to_string(),
                r.norm_bound.to_string(),
            ])
            .map_err(rt)?;
            reports.push(r);
        }
    } else {
        let (fam, s, n) = (a.family.expect("required"), a.s.expect("required"), a.n.expect("required"));
        let spec = build_spec(fam, s, a.base, a.perms.as_deref(), a.factors.as_deref(), a.order, 1)?;
        let base = criterion_base(&a.criterion_base, &spec.bases())?;
        let cfg = CriterionConfig::new(a.d, a.w.unwrap_or(s), a.norm_bound).aggregation(aggregation(a.aggregation, Aggregation::PerK));
        let p = spec.generate_with(n, exec)?;
        let r = criterion_with(&p, &base, &cfg, exec)?;
        let label = a.perms.clone().or_else(|| a.factors.clone()).unwrap_or_else(|| "regular".into());
        let b = match spec.family {
            Family::Faure | Family::Gfaure | Family::Vdc => spec.bases()[0].to_string(),
            _ => String::new(),
        };
        w.write_record(CRITERIA_COLUMNS).map_err(rt)?;
        w.write_record([
            label,
            b,
            s.to_string(),
            a.d.to_string(),
            n.to_string(),
            r.max.to_string(),
            r.mean.to_string(),
            r.norm_bound.to_string(),
        ])
        .map_err(rt)?;
        reports.push(r);
    }
    match a.format {
        FormatArg::Csv => push_csv(out, w),
        FormatArg::Json => {
            out.push_str(&serde_json::to_string_pretty(&reports).map_err(rt)?);
            out.push('\n');
            Ok(())
        }
    }
}

pub fn cqe(a: &CqeArgs, exec: Exec, out: &mut String) -> Res<()> {
    let spec = seq_spec(&a.seq)?;
    let base = criterion_base(&a.criterion_base, &spec.bases())?;
    let p = spec.generate_with(a.n, exec)?;
    let l = match a.norm_bound {
        Some(l) => l,
        None => negdep::negdep::CriterionView::new(&p, &base)?.default_norm_bound(),
    };
    let r = cqe_check_with(&p, &base, l, exec)?;
    writeln!(out, "# holds: {}, checked: {}, violations: {}, L: {l}", r.holds, r.checked, r.violations.len()).map_err(rt)?;
    let mut w = csv::Writer::from_writer(vec![]);
    w.write_record(["k", "C"]).map_err(rt)?;
    for (k, c) in &r.violations {
        w.write_record([k.to_string(), c.to_string()]).map_err(rt)?;
    }
    eprintln!("c.q.e. {} ({} vectors checked, {} violations)", if r.holds { "holds" } else { "fails" }, r.checked, r.violations.len());
    push_csv(out, w)
}

fn randomizer(r: RandArg) -> RandomizerKind {
    match r {
        RandArg::Shift => RandomizerKind::DigitalShift,
        RandArg::Owen => RandomizerKind::OwenScramble,
        RandArg::Linear => RandomizerKind::LinearScramble,
        RandArg::None => RandomizerKind::None,
    }
}

fn integrand(a: &IntegrandArgs, s: usize) -> Res<IntegrandSpec> {
    let spec = match a.f {
        IntegrandArg::H0 => IntegrandSpec::H0 { s },
        IntegrandArg::H1 => IntegrandSpec::H1 { s },
        IntegrandArg::G2 => IntegrandSpec::G2 { s, c: a.c },
        IntegrandArg::San => {
            let network = match &a.san_config {
                Some(p) => SanNetwork::load(p).map_err(input)?,
                None => SanNetwork::default_network(),
            };
            IntegrandSpec::San { network }
        }
    };
    if spec.dim() != s {
        return Err(usage(format!("integrand has dimension {} but --s is {s}", spec.dim())));
    }
    if a.replications < 2 {
        return Err(usage("--V must be at least 2"));
    }
    Ok(spec)
}

pub fn converge(a: &ConvergeArgs, exec: Exec, out: &mut String) -> Res<()> {
    let ns = parse_ns(&a.ns).map_err(usage)?;
    let f = integrand(&a.integrand, a.seq.s)?;
    let (construction, rand) = if a.seq.family == FamilyArg::Mc {
        (Construction::MonteCarlo { s: a.seq.s }, RandomizerKind::None)
    } else {
        (Construction::Sequence(seq_spec(&a.seq)?), randomizer(a.rand))
    };
    let mut plan = ExperimentPlan::new(construction, rand, f, ns)
        .with_replications(a.integrand.replications)
        .with_seed(a.integrand.seed);
    if let Some(l) = &a.label {
        plan = plan.with_label(l.clone());
    }
    plan.validate().map_err(usage)?;
    let rows = convergence_sweep(&plan, exec)?;
    let mut buf = vec![];
    write_rows_csv(&mut buf, &rows)?;
    out.push_str(&String::from_utf8(buf).map_err(rt)?);
    Ok(())
}

pub fn hist(a: &HistArgs, exec: Exec, out: &mut String) -> Res<()> {
    let fam = match a.family {
        FamilyArg::Halton | FamilyArg::Ghalton => Family::Halton,
        FamilyArg::Faure | FamilyArg::Gfaure => Family::Faure,
        _ => return Err(usage("hist supports the halton and faure families")),
    };
    let f = integrand(&a.integrand, a.s)?;
    let scrambler = a.rand.map(randomizer).unwrap_or(match fam {
        Family::Faure => RandomizerKind::OwenScramble,
        _ => RandomizerKind::LinearScramble,
    });
    let mut variants = vec![Variant::Regular, Variant::Faure92, Variant::Offset];
    for (name, p) in [("dl", &a.dl), ("fl", &a.fl)] {
        if let Some(path) = p {
            if fam == Family::Faure {
                return Err(usage("--dl and --fl apply to Halton studies"));
            }
            variants.push(Variant::File { name: name.into(), path: path.clone() });
        }
    }
    let variants = variants
        .iter()
        .map(|v| Ok((v.label(fam), variant_spec(fam, a.s, v).map_err(input)?)))
        .collect::<Res<Vec<_>>>()?;
    let study = HistogramStudy {
        n: a.n,
        scramblings: a.scramblings,
        replications: a.integrand.replications,
        master_seed: a.integrand.seed,
        integrand: f,
        scrambled: variant_spec(fam, a.s, &Variant::Regular).map_err(input)?,
        scrambler,
        variants,
    };
    let rows = histogram_study(&study, exec)?;
    let mut buf = vec![];
    write_rows_csv(&mut buf, &rows)?;
    out.push_str(&String::from_utf8(buf).map_err(rt)?);
    Ok(())
}

pub fn write_output(path: Option<&Path>, text: &str) -> Res<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Runtime(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(rt)
        }
    }
}
