use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use ggjet::asymptotics::{
    kernel_sum_exact, kernel_sum_f64, leading_coefficient_harness, polylog_gap, polylog_value, LogPolynomial, Mode,
    Value,
};
use ggjet::cohomology::{
    chi_schur_vector, h0_report, lambda_cohomology_x, line_bundle_cohomology_x, projective_cohomology, shapes_up_to,
    vanishing_threshold, CohomologyVector, HypersurfaceContext,
};
use ggjet::delta::{all_relations, JetPoint};
use ggjet::error::DEFAULT_MAX_CELLS;
use ggjet::jets::{gg_rank, gr_schur_decomposition, JetConfig};
use ggjet::rational::{fmt_frac, frac, to_f64};
use ggjet::verify::{run_all, run_suite, VerifyOptions, SUITES};
use ggjet::{BigInt, Error, Partition, Rational};

use crate::output::{Doc, Format};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Capacity(String),
    VerifyFailed(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) | CliError::Capacity(s) | CliError::VerifyFailed(s) => f.write_str(s),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => CliError::Capacity(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type Res<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CliMode {
    Exact,
    Float,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Self {
        match m {
            CliMode::Exact => Mode::Exact,
            CliMode::Float => Mode::Float,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "ggjet", version, about = "Invariants of Green-Griffiths jet bundles on projective hypersurfaces")]
pub struct RunSpec {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct Common {
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub mode: CliMode,
    /// Cap on boxes touched by a single enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_CELLS)]
    pub max_cells: usize,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

/// Inclusive range `A..B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range {
    pub lo: u64,
    pub hi: u64,
}

impl Range {
    fn values(self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let lo: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let hi: u64 = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{b:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(Range { lo, hi })
}

/// Comma list `a,b,c`, or an inclusive range `A..B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct List(pub Vec<u64>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parts(pub Vec<u32>);

fn parse_list(s: &str) -> std::result::Result<List, String> {
    if s.contains("..") {
        return Ok(List(parse_range(s)?.values().collect()));
    }
    let v: Vec<u64> = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(List(v))
}

fn parse_parts(s: &str) -> std::result::Result<Parts, String> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().map_err(|e| format!("{x:?}: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Parts)
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank of the jet bundle E_{κ,m}.
    Rank {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: u32,
        #[arg(long, required_unless_present = "m_range", conflicts_with = "m_range")]
        m: Option<u64>,
        #[arg(long, value_parser = parse_range)]
        m_range: Option<Range>,
    },
    /// Schur decomposition of the graded jet bundle.
    Decompose {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: u32,
        #[arg(long)]
        m: u64,
    },
    /// Euler characteristic of a Schur power (with --partition) or of the graded bundle (with --kappa).
    Chi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
        #[arg(long, value_parser = parse_parts, required_unless_present = "kappa")]
        partition: Option<Parts>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        twist: i64,
        #[arg(long, conflicts_with = "partition")]
        kappa: Option<u32>,
        #[arg(long, conflicts_with = "m_range")]
        m: Option<u64>,
        #[arg(long, value_parser = parse_range)]
        m_range: Option<Range>,
    },
    /// Full cohomology through the closed-form routes.
    Cohomology {
        #[arg(long, value_enum)]
        route: CohomologyRoute,
        /// Dimension of X; for the projective route the ambient space is P^{n+1}.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: Option<i64>,
        #[arg(long, value_parser = parse_parts)]
        partition: Option<Parts>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        twist: i64,
    },
    /// Vanishing thresholds for every shape with size in the range.
    Vanishing {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
        #[arg(long, value_parser = parse_range, default_value = "1..6")]
        size_range: Range,
    },
    /// χ of the graded bundle with the vanishing status of each summand.
    Report {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        kappa: u32,
        #[arg(long)]
        m: u64,
    },
    /// Asymptotic sweeps.
    #[command(subcommand)]
    Asymptotics(Sweep),
    /// Generate the quadratic relations among determinants and test them at random points.
    Plucker {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        kappa: u32,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the cross-route identity suites.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 12)]
        max_m: u64,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CohomologyRoute {
    Projective,
    Lambda,
    Line,
    Schur,
}

#[derive(Subcommand, Debug)]
pub enum Sweep {
    /// Σ_{1≤j_1≤…≤j_q≤κ} 1/(j_1⋯j_q) against (log κ)^q/q!.
    Polylog {
        #[arg(long, value_parser = parse_list)]
        kappa: List,
        #[arg(long, value_parser = parse_list, default_value = "1,2,3")]
        q: List,
    },
    /// Kernel sums over the maximal families.
    Kernel {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_list)]
        kappa: List,
        #[arg(long, value_parser = parse_parts)]
        alpha: Parts,
    },
    /// Finite-difference extraction of the leading coefficient of χ(Gr•_m).
    LeadingCoefficient {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
        #[arg(long)]
        kappa: u32,
        #[arg(long, value_parser = parse_range)]
        m_range: Range,
    },
}

pub fn run(spec: &RunSpec) -> Res<()> {
    let c = &spec.common;
    let mut failure = None;
    let doc = match &spec.command {
        Command::Rank { n, kappa, m, m_range } => rank(*n, *kappa, *m, *m_range, c)?,
        Command::Decompose { n, kappa, m } => decompose(*n, *kappa, *m, c)?,
        Command::Chi {
            n,
            d,
            partition,
            twist,
            kappa,
            m,
            m_range,
        } => chi(*n, *d, partition.as_ref().map(|p| p.0.as_slice()), *twist, *kappa, *m, *m_range, c)?,
        Command::Cohomology {
            route,
            n,
            d,
            partition,
            r,
            twist,
        } => cohomology(*route, *n, *d, partition.as_ref().map(|p| p.0.as_slice()), *r, *twist)?,
        Command::Vanishing { n, d, size_range } => vanishing(*n, *d, *size_range)?,
        Command::Report { n, d, kappa, m } => report(*n, *d, *kappa, *m, c)?,
        Command::Asymptotics(s) => match s {
            Sweep::Polylog { kappa, q } => polylog(&kappa.0, &q.0, c)?,
            Sweep::Kernel { n, kappa, alpha } => kernel(*n, &kappa.0, &alpha.0, c)?,
            Sweep::LeadingCoefficient { n, d, kappa, m_range } => leading(*n, *d, *kappa, *m_range, c)?,
        },
        Command::Plucker { n, kappa, points, seed } => {
            let (doc, ok) = plucker(*n, *kappa, *points, *seed)?;
            if !ok {
                failure = Some("a relation did not vanish".to_string());
            }
            doc
        }
        Command::Verify { suite, max_m, seed } => {
            let (doc, failed) = verify(suite.as_deref(), *max_m, *seed)?;
            if !failed.is_empty() {
                failure = Some(format!("failed suites: {}", failed.join(", ")));
            }
            doc
        }
    };
    doc.emit(c.format, c.out.as_deref())?;
    match failure {
        Some(f) => Err(CliError::VerifyFailed(f)),
        None => Ok(()),
    }
}

// ------------------------------------------------------------ helpers

fn s<T: ToString>(x: T) -> String {
    x.to_string()
}

fn fr(r: &Rational) -> Json {
    Json::String(fmt_frac(r))
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Float => "float",
    }
}

fn float_json(x: f64) -> Json {
    json!({ "value": x, "approx": true })
}

/// `(exact_or_float, numerator, denominator, float_value)`.
fn value_cols(v: &Value) -> [String; 4] {
    match v {
        Value::Exact(r) => [s("exact"), s(r.numer()), s(r.denom()), String::new()],
        Value::Float(x) => [s("float"), String::new(), String::new(), s(x)],
    }
}

fn partition(parts: &[u32], rank: usize) -> Res<Partition> {
    Ok(Partition::new(parts.to_vec(), rank)?)
}

fn chi_header() -> Vec<&'static str> {
    vec!["route", "twist", "q", "h_q", "chi"]
}

fn cohomology_rows(doc: &mut Doc, v: &CohomologyVector, twist: i64) {
    let route = serde_json::to_value(v.route).ok().and_then(|j| j.as_str().map(String::from)).unwrap_or_default();
    match &v.h {
        Some(h) => {
            for (q, x) in h.iter().enumerate() {
                doc.row(vec![route.clone(), s(twist), s(q), s(x), s(&v.chi)]);
            }
        }
        None => doc.row(vec![route, s(twist), String::new(), String::new(), s(&v.chi)]),
    }
}

// ------------------------------------------------------------ commands

fn rank(n: usize, kappa: u32, m: Option<u64>, range: Option<Range>, c: &Common) -> Res<Doc> {
    let one = |m: u64| -> Res<BigInt> { Ok(gg_rank(&JetConfig::new(n, kappa, m)?, c.max_cells as u64)?) };
    let header = vec!["n", "kappa", "m", "rank"];
    match (m, range) {
        (Some(m), _) => {
            let r = one(m)?;
            let mut doc = Doc::new(
                json!({ "n": n, "kappa": kappa, "m": m, "mode": "exact", "rank": s(&r) }),
                header,
            );
            doc.row(vec![s(n), s(kappa), s(m), s(r)]);
            Ok(doc)
        }
        (None, Some(range)) => {
            let mut rows = Vec::new();
            let mut doc = Doc::new(Json::Null, header);
            for m in range.values() {
                let r = one(m)?;
                rows.push(json!({ "m": m, "rank": s(&r) }));
                doc.row(vec![s(n), s(kappa), s(m), s(r)]);
            }
            doc.json = json!({ "n": n, "kappa": kappa, "mode": "exact", "rows": rows });
            Ok(doc)
        }
        (None, None) => Err(CliError::Usage("rank needs --m or --m-range".into())),
    }
}

fn decompose(n: usize, kappa: u32, m: u64, c: &Common) -> Res<Doc> {
    let dec = gr_schur_decomposition(&JetConfig::new(n, kappa, m)?, c.max_cells)?;
    let mut doc = Doc::new(
        serde_json::to_value(&dec).map_err(|e| CliError::Usage(e.to_string()))?,
        vec!["partition", "mult"],
    );
    for (p, mult) in dec.table.sorted() {
        let parts: Vec<String> = p.parts().iter().map(|x| x.to_string()).collect();
        doc.row(vec![parts.join(" "), s(mult)]);
    }
    Ok(doc)
}

#[allow(clippy::too_many_arguments)]
fn chi(
    n: usize,
    d: i64,
    parts: Option<&[u32]>,
    twist: i64,
    kappa: Option<u32>,
    m: Option<u64>,
    range: Option<Range>,
    c: &Common,
) -> Res<Doc> {
    let ctx = HypersurfaceContext::new(n, d)?;
    if let Some(parts) = parts {
        let shape = partition(parts, n)?;
        let v = chi_schur_vector(&ctx, &shape, twist)?;
        let mut doc = Doc::new(
            json!({ "n": n, "d": d, "partition": shape, "twist": twist, "mode": "exact", "chi": s(&v.chi),
                    "route": v.route }),
            chi_header(),
        );
        cohomology_rows(&mut doc, &v, twist);
        return Ok(doc);
    }
    let kappa = kappa.ok_or_else(|| CliError::Usage("chi needs --partition or --kappa".into()))?;
    let ms: Vec<u64> = match (m, range) {
        (Some(m), _) => vec![m],
        (None, Some(r)) => r.values().collect(),
        (None, None) => return Err(CliError::Usage("chi --kappa needs --m or --m-range".into())),
    };
    let mut cache = HashMap::new();
    let mut rows = Vec::new();
    let mut doc = Doc::new(Json::Null, vec!["n", "d", "kappa", "m", "chi_gr"]);
    for m in ms {
        let v = ggjet::asymptotics::chi_gr(&ctx, kappa, m, c.max_cells, &mut cache)?;
        rows.push(json!({ "m": m, "chi_gr": s(&v) }));
        doc.row(vec![s(n), s(d), s(kappa), s(m), s(v)]);
    }
    doc.json = json!({ "n": n, "d": d, "kappa": kappa, "mode": "exact", "rows": rows });
    Ok(doc)
}

fn cohomology(
    route: CohomologyRoute,
    n: usize,
    d: Option<i64>,
    parts: Option<&[u32]>,
    r: Option<usize>,
    twist: i64,
) -> Res<Doc> {
    let need_d = || d.ok_or_else(|| CliError::Usage("this route needs --d".into()));
    let need_parts = || parts.ok_or_else(|| CliError::Usage("this route needs --partition".into()));
    let (v, extra) = match route {
        CohomologyRoute::Projective => {
            let shape = partition(need_parts()?, n + 1)?;
            let v = projective_cohomology(n, &shape, twist)?;
            (v, json!({ "ambient_dim": n + 1, "partition": shape }))
        }
        CohomologyRoute::Lambda => {
            let d = need_d()?;
            let r = r.ok_or_else(|| CliError::Usage("the lambda route needs --r".into()))?;
            (lambda_cohomology_x(&HypersurfaceContext::new(n, d)?, r, twist)?, json!({ "d": d, "r": r }))
        }
        CohomologyRoute::Line => {
            let d = need_d()?;
            (line_bundle_cohomology_x(&HypersurfaceContext::new(n, d)?, twist), json!({ "d": d }))
        }
        CohomologyRoute::Schur => {
            let d = need_d()?;
            let shape = partition(need_parts()?, n)?;
            let v = chi_schur_vector(&HypersurfaceContext::new(n, d)?, &shape, twist)?;
            (v, json!({ "d": d, "partition": shape }))
        }
    };
    let mut j = json!({ "n": n, "twist": twist, "mode": "exact" });
    let obj = j.as_object_mut().expect("object");
    for (k, x) in extra.as_object().expect("object") {
        obj.insert(k.clone(), x.clone());
    }
    obj.insert("cohomology".into(), serde_json::to_value(&v).map_err(|e| CliError::Usage(e.to_string()))?);
    let mut doc = Doc::new(j, chi_header());
    cohomology_rows(&mut doc, &v, twist);
    Ok(doc)
}

fn vanishing(n: usize, d: i64, range: Range) -> Res<Doc> {
    let ctx = HypersurfaceContext::new(n, d)?;
    let mut rows = Vec::new();
    let mut doc = Doc::new(Json::Null, vec!["partition", "size", "threshold", "vanishes"]);
    for shape in shapes_up_to(n, range.hi).into_iter().filter(|p| p.size() >= range.lo) {
        let v = vanishing_threshold(&ctx, &shape)?;
        let parts: Vec<String> = shape.parts().iter().map(|x| x.to_string()).collect();
        doc.row(vec![parts.join(" "), s(shape.size()), fmt_frac(&v.threshold), s(v.vanishes)]);
        rows.push(json!({ "partition": shape, "size": shape.size(), "threshold": fr(&v.threshold),
                          "vanishes": v.vanishes }));
    }
    doc.json = json!({ "n": n, "d": d, "mode": "exact", "rows": rows });
    Ok(doc)
}

fn report(n: usize, d: i64, kappa: u32, m: u64, c: &Common) -> Res<Doc> {
    let r = h0_report(&HypersurfaceContext::new(n, d)?, kappa, m, c.max_cells)?;
    let mut doc = Doc::new(
        serde_json::to_value(&r).map_err(|e| CliError::Usage(e.to_string()))?,
        vec!["partition", "mult", "chi", "threshold", "vanishes"],
    );
    for e in &r.vanishing {
        let parts: Vec<String> = e.partition.parts().iter().map(|x| x.to_string()).collect();
        doc.row(vec![parts.join(" "), s(e.mult), s(&e.chi), fmt_frac(&e.threshold), s(e.vanishes)]);
    }
    Ok(doc)
}

const CONVERGENCE: [&str; 7] = [
    "parameter",
    "exact_or_float",
    "value_numerator",
    "value_denominator",
    "float_value",
    "predicted",
    "ratio",
];

fn convergence_header(extra: &[&'static str]) -> Vec<&'static str> {
    CONVERGENCE.iter().chain(extra).copied().collect()
}

fn polylog(kappas: &[u64], qs: &[u64], c: &Common) -> Res<Doc> {
    let mode: Mode = c.mode.into();
    let mut rows = Vec::new();
    let mut doc = Doc::new(Json::Null, convergence_header(&["q", "gap"]));
    for &kappa in kappas {
        for &q in qs {
            let q = u32::try_from(q).map_err(|_| CliError::Usage(format!("q = {q} too large")))?;
            let v = polylog_value(kappa, q, mode)?;
            let [eof, num, den, fl] = value_cols(&v);
            let mut row = json!({ "kappa": kappa, "q": q, "value": v });
            if mode == Mode::Float {
                let fact: f64 = (1..=q).map(f64::from).product();
                let predicted = (kappa as f64).ln().powi(q as i32) / fact;
                let gap = polylog_gap(kappa, q);
                let obj = row.as_object_mut().expect("object");
                obj.insert("predicted".into(), float_json(predicted));
                obj.insert("ratio".into(), float_json(v.to_f64() / predicted));
                obj.insert("gap".into(), float_json(gap));
                doc.row(vec![s(kappa), eof, num, den, fl, s(predicted), s(v.to_f64() / predicted), s(q), s(gap)]);
            } else {
                doc.row(vec![s(kappa), eof, num, den, fl, String::new(), String::new(), s(q), String::new()]);
            }
            rows.push(row);
        }
    }
    doc.json = json!({ "sweep": "polylog", "mode": mode_name(mode), "rows": rows });
    Ok(doc)
}

fn log_poly_text(p: &LogPolynomial) -> String {
    if p.terms.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = p
        .terms
        .iter()
        .map(|(logs, c)| {
            let mut t = fmt_frac(c);
            for (prime, e) in logs {
                t.push_str(&format!("*log({prime})"));
                if *e > 1 {
                    t.push_str(&format!("^{e}"));
                }
            }
            t
        })
        .collect();
    terms.join(" + ")
}

fn kernel(n: usize, kappas: &[u64], alpha: &[u32], c: &Common) -> Res<Doc> {
    let mode: Mode = c.mode.into();
    let mut rows = Vec::new();
    let mut doc = Doc::new(Json::Null, convergence_header(&["symbolic"]));
    for &k in kappas {
        let kappa = u32::try_from(k).map_err(|_| CliError::Usage(format!("kappa = {k} too large")))?;
        match mode {
            Mode::Exact => {
                let p = kernel_sum_exact(n, kappa, alpha)?;
                let text = log_poly_text(&p);
                let constant = p.terms.keys().all(|m| m.is_empty());
                let (num, den) = if constant {
                    let r = p.terms.values().next().cloned().unwrap_or_default();
                    (s(r.numer()), s(r.denom()))
                } else {
                    (String::new(), String::new())
                };
                doc.row(vec![s(k), s("exact"), num, den, String::new(), String::new(), String::new(), text.clone()]);
                rows.push(json!({ "kappa": k, "value": { "mode": "exact", "terms": p, "symbolic": text } }));
            }
            Mode::Float => {
                let x = kernel_sum_f64(n, kappa, alpha)?;
                let v = Value::Float(x);
                let [eof, num, den, fl] = value_cols(&v);
                doc.row(vec![s(k), eof, num, den, fl, String::new(), String::new(), String::new()]);
                rows.push(json!({ "kappa": k, "value": v }));
            }
        }
    }
    doc.json = json!({ "sweep": "kernel", "n": n, "alpha": alpha, "mode": mode_name(mode), "rows": rows });
    Ok(doc)
}

fn leading(n: usize, d: i64, kappa: u32, range: Range, c: &Common) -> Res<Doc> {
    let mode: Mode = c.mode.into();
    let h = leading_coefficient_harness(&HypersurfaceContext::new(n, d)?, kappa, range.lo, range.hi, c.max_cells)?;
    let mut doc = Doc::new(Json::Null, convergence_header(&["chi", "unit_difference", "chi_ratio"]));
    let opt_f = |r: &Option<Rational>| r.as_ref().map(|x| s(to_f64(x))).unwrap_or_default();
    let opt_q = |r: &Option<Rational>| r.as_ref().map(fmt_frac).unwrap_or_default();
    for row in &h.rows {
        let ratio = row.strided_difference.as_ref().filter(|_| !h.predicted.is_zero()).map(|x| x / &h.predicted);
        let mut cols = vec![s(row.m), s(mode_name(mode))];
        match (&row.strided_difference, mode) {
            (Some(x), Mode::Exact) => cols.extend([s(x.numer()), s(x.denom()), String::new()]),
            (Some(x), Mode::Float) => cols.extend([String::new(), String::new(), s(to_f64(x))]),
            (None, _) => cols.extend([String::new(), String::new(), String::new()]),
        }
        match mode {
            Mode::Exact => cols.extend([
                fmt_frac(&h.predicted),
                opt_q(&ratio),
                s(&row.chi),
                opt_q(&row.unit_difference),
                fmt_frac(&row.ratio),
            ]),
            Mode::Float => cols.extend([
                s(to_f64(&h.predicted)),
                opt_f(&ratio),
                s(&row.chi),
                opt_f(&row.unit_difference),
                s(to_f64(&row.ratio)),
            ]),
        }
        doc.row(cols);
    }
    doc.json = match mode {
        Mode::Exact => serde_json::to_value(&h).map_err(|e| CliError::Usage(e.to_string()))?,
        Mode::Float => {
            let fj = |r: &Option<Rational>| r.as_ref().map(|x| float_json(to_f64(x))).unwrap_or(Json::Null);
            let rows: Vec<Json> = h
                .rows
                .iter()
                .map(|r| {
                    json!({ "m": r.m, "chi": s(&r.chi), "unit_difference": fj(&r.unit_difference),
                            "strided_difference": fj(&r.strided_difference), "ratio": float_json(to_f64(&r.ratio)) })
                })
                .collect();
            json!({ "n": h.n, "d": h.d, "kappa": h.kappa, "degree": h.degree, "stride": h.stride,
                    "predicted": float_json(to_f64(&h.predicted)), "predicted_symbolic": h.predicted_symbolic,
                    "mode": "float", "rows": rows })
        }
    };
    Ok(doc)
}

fn plucker(n: usize, kappa: u32, points: usize, seed: u64) -> Res<(Doc, bool)> {
    if n == 0 || kappa == 0 {
        return Err(CliError::Usage("n and kappa must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<JetPoint> = (0..points)
        .map(|_| JetPoint::from_fn(n, kappa, |_, _| frac(rng.gen_range(-20..=20), rng.gen_range(1..=9))))
        .collect();
    let rels = all_relations(n, kappa);
    let mut all = true;
    let mut rows = Vec::new();
    let mut doc = Doc::new(Json::Null, vec!["first", "second", "terms", "leading", "vanishes"]);
    for rel in &rels {
        let mut ok = true;
        for p in &pts {
            ok &= rel.eval(p)?.is_zero();
        }
        all &= ok;
        let lead = rel.leading_monomial().map(|(a, b)| format!("{a}*{b}")).unwrap_or_default();
        doc.row(vec![s(&rel.pair.0), s(&rel.pair.1), s(rel.terms.len()), lead.clone(), s(ok)]);
        rows.push(json!({ "pair": [rel.pair.0, rel.pair.1], "terms": rel, "leading": lead, "vanishes": ok }));
    }
    doc.json = json!({ "n": n, "kappa": kappa, "points": points, "seed": seed, "mode": "exact",
                       "relations": rows, "all_vanish": all });
    Ok((doc, all))
}

fn verify(suite: Option<&str>, max_m: u64, seed: u64) -> Res<(Doc, Vec<String>)> {
    let opts = VerifyOptions { max_m, seed };
    let results = match suite {
        Some(name) => vec![run_suite(name, &opts).ok_or_else(|| {
            let names: Vec<&str> = SUITES.iter().map(|(_, n)| *n).collect();
            CliError::Usage(format!("unknown suite {name:?}; known: {}", names.join(", ")))
        })?],
        None => run_all(&opts),
    };
    let mut failed = Vec::new();
    let mut rows = Vec::new();
    let mut doc = Doc::new(Json::Null, vec!["id", "suite", "status", "checks", "detail"]);
    for r in &results {
        eprintln!("{:>2} {:<20} {} ({} ms)", r.id, r.name, if r.passed { "PASS" } else { "FAIL" }, r.millis);
        if !r.passed {
            failed.push(r.name.to_string());
        }
        let status = if r.passed { "PASS" } else { "FAIL" };
        doc.row(vec![s(r.id), s(r.name), s(status), s(r.checks), r.detail.clone()]);
        rows.push(json!({ "id": r.id, "suite": r.name, "status": status, "checks": r.checks, "detail": r.detail }));
    }
    doc.json = json!({ "max_m": max_m, "seed": seed, "passed": failed.is_empty(), "suites": rows });
    Ok((doc, failed))
}
