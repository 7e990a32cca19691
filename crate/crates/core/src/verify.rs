use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotics::{
    all_family_keys, classify_with_multiplicities, family_size, is_maximal_family, leading_coefficient_harness,
    max_distinct_columns, polylog_gap, polylog_sum, simplex_moment, simplex_moment_recursive, tight_path_count,
    tight_path_upper_bound, tight_paths,
};
use crate::chern::{integrate_chern_monomial, ChernMonomial};
use crate::cohomology::{
    chi_schur_exact, giambelli_chi_leading, h0_report, hq_majorant, lambda_cohomology_x, line_bundle_cohomology_x,
    projective_cohomology, vanishing_threshold, GiambelliForm, HypersurfaceContext,
};
use crate::delta::{all_relations, ssyt_monomial_matrix, ssyt_monomials, JetPoint};
use crate::error::Result;
use crate::jets::{
    component_rank, faa_di_bruno, faa_di_bruno_apply, gg_rank, gr_schur_decomposition, graded_components, JetConfig,
};
use crate::rational::{abs, binom, factorial, frac, int, to_f64, Rational};
use crate::young::{enumerate_ssyt, multiplicity_table, partitions_in_range, sym_tensor_schur_decompose, Multiset, Partition, Tableau};

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checks: u64,
    pub detail: String,
    pub millis: u128,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Largest weight m for the rank and Pieri suites.
    pub max_m: u64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { max_m: 12, seed: 20240521 }
    }
}

pub const SUITES: [(u8, &str); 13] = [
    (1, "rank-consistency"),
    (2, "pieri-ssyt"),
    (3, "chi-routes"),
    (4, "projective"),
    (5, "giambelli"),
    (6, "vanishing"),
    (7, "pluecker"),
    (8, "families"),
    (9, "polylog"),
    (10, "simplex"),
    (11, "faa-di-bruno"),
    (12, "threshold"),
    (13, "leading-coefficient"),
];

/// Accumulates check outcomes; keeps the first failure message.
struct Tally {
    checks: u64,
    failure: Option<String>,
    notes: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            failure: None,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(msg());
        }
    }

    fn note(&mut self, s: String) {
        self.notes.push(s);
    }
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Option<SuiteResult> {
    let &(id, name) = SUITES.iter().find(|(_, n)| *n == name)?;
    let start = Instant::now();
    let mut t = Tally::new();
    let outcome = match id {
        1 => rank_consistency(&mut t, opts),
        2 => pieri_ssyt(&mut t, opts),
        3 => chi_routes(&mut t),
        4 => projective(&mut t, opts),
        5 => giambelli(&mut t),
        6 => vanishing(&mut t),
        7 => pluecker(&mut t, opts),
        8 => families(&mut t),
        9 => polylog(&mut t),
        10 => simplex(&mut t),
        11 => faa(&mut t, opts),
        12 => threshold(&mut t),
        _ => leading(&mut t),
    };
    if let Err(e) = outcome {
        t.failure.get_or_insert_with(|| format!("error: {e}"));
    }
    let passed = t.failure.is_none() && t.checks > 0;
    let mut detail = t.failure.clone().unwrap_or_else(|| format!("{} checks", t.checks));
    if !t.notes.is_empty() {
        detail = format!("{detail}; {}", t.notes.join("; "));
    }
    Some(SuiteResult {
        id,
        name,
        passed,
        checks: t.checks,
        detail,
        millis: start.elapsed().as_millis(),
    })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteResult> {
    SUITES
        .iter()
        .map(|(_, n)| run_suite(n, opts).expect("known suite"))
        .collect()
}

fn rank_consistency(t: &mut Tally, o: &VerifyOptions) -> Result<()> {
    for n in 1..=3 {
        for kappa in 1..=4 {
            for m in 1..=o.max_m {
                let cfg = JetConfig::new(n, kappa, m)?;
                let direct = gg_rank(&cfg, u64::MAX)?;
                let graded: BigInt = graded_components(kappa, m).iter().map(|c| component_rank(c, n)).sum();
                let schur = gr_schur_decomposition(&cfg, usize::MAX)?;
                t.check(direct == graded && graded == schur.rank, || {
                    format!("n={n} kappa={kappa} m={m}: {direct} / {graded} / {}", schur.rank)
                });
                let lo = m.div_ceil(kappa as u64);
                t.check(
                    schur.table.entries.keys().all(|p| p.size() >= lo && p.size() <= m),
                    || format!("weight bound violated at n={n} kappa={kappa} m={m}"),
                );
            }
        }
    }
    Ok(())
}

fn pieri_ssyt(t: &mut Tally, o: &VerifyOptions) -> Result<()> {
    for n in 1..=3 {
        for kappa in 1..=4 {
            for m in 1..=o.max_m {
                let mut acc: Multiset = BTreeMap::new();
                for comp in graded_components(kappa, m) {
                    for (p, c) in sym_tensor_schur_decompose(&comp, n)? {
                        *acc.entry(p).or_default() += c;
                    }
                }
                let table = multiplicity_table(n, kappa, m, usize::MAX)?;
                t.check(acc == table.entries, || format!("multisets differ at n={n} kappa={kappa} m={m}"));
            }
        }
    }
    Ok(())
}

/// Shapes `c + (1^r)` with at most `max_cells` boxes.
fn lambda_shapes(n: usize, max_cells: u64) -> Vec<(u32, usize, Partition)> {
    let mut out = Vec::new();
    for c in 0..=max_cells as u32 {
        for r in 0..n {
            let parts: Vec<u32> = (0..n).map(|i| c + u32::from(i < r)).collect();
            let p = Partition::new(parts, n).expect("valid");
            if p.size() <= max_cells {
                out.push((c, r, p));
            }
        }
    }
    out
}

fn chi_routes(t: &mut Tally) -> Result<()> {
    for n in 1..=2 {
        for d in [5, 6] {
            let ctx = HypersurfaceContext::new(n, d)?;
            let k = ctx.canonical_degree();
            for (c, r, shape) in lambda_shapes(n, 6) {
                for tw in -5..=15 {
                    let exact = chi_schur_exact(&ctx, &shape, tw)?;
                    let other = if r == 0 {
                        line_bundle_cohomology_x(&ctx, tw + c as i64 * k).chi
                    } else {
                        lambda_cohomology_x(&ctx, r, tw + c as i64 * k)?.chi
                    };
                    t.check(exact == other, || format!("n={n} d={d} {shape} t={tw}: {exact} vs {other}"));
                }
            }
            // Serre symmetry of line bundles
            for tw in -5..=15 {
                let a = line_bundle_cohomology_x(&ctx, tw);
                let b = line_bundle_cohomology_x(&ctx, k - tw);
                t.check(a.get(0) == b.get(n), || format!("Serre symmetry fails at n={n} d={d} t={tw}"));
            }
        }
    }
    Ok(())
}

fn projective(t: &mut Tally, o: &VerifyOptions) -> Result<()> {
    for n in 1..=4usize {
        for tw in 0..=10i64 {
            let v = projective_cohomology(n, &Partition::empty(n + 1), tw)?;
            let expect = binom(tw + n as i64 + 1, n as i64 + 1);
            t.check(v.chi == expect && v.get(0) == Some(&expect), || {
                format!("P^{} O({tw}): {} vs {expect}", n + 1, v.chi)
            });
        }
    }
    let omega = projective_cohomology(1, &Partition::new(vec![1, 0], 2)?, 0)?;
    t.check(omega.get(1) == Some(&BigInt::one()), || format!("h1(P2, Omega1) = {:?}", omega.get(1)));
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    for _ in 0..50 {
        let n = rng.gen_range(1..=3usize);
        let mut parts: Vec<u32> = (0..=n).map(|_| rng.gen_range(0..=6)).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let shape = Partition::new(parts, n + 1)?;
        let tw = shape.parts()[0] as i64 + shape.size() as i64 + rng.gen_range(0..=5);
        let v = projective_cohomology(n, &shape, tw)?;
        let h = v.h.clone().unwrap_or_default();
        t.check(h.iter().skip(1).all(|x| x.is_zero()), || format!("{shape} t={tw}: {h:?}"));
    }
    Ok(())
}

fn giambelli(t: &mut Tally) -> Result<()> {
    let ctx = HypersurfaceContext::new(2, 5)?;
    let base = Partition::new(vec![2, 1], 2)?;
    let mut homogeneous = Vec::new();
    for big_n in [50u32, 100, 200] {
        let shape = Partition::new(vec![2 * big_n, big_n], 2)?;
        let chi = Rational::from_integer(chi_schur_exact(&ctx, &shape, 0)?);
        let scaled = chi / Rational::from_integer(BigInt::from(big_n).pow(3));
        for form in [GiambelliForm::Shifted, GiambelliForm::Homogeneous] {
            let lead = giambelli_chi_leading(&ctx, &shape, form)? / Rational::from_integer(BigInt::from(big_n).pow(3));
            let err = abs(&(&scaled / &lead - Rational::one()));
            if form == GiambelliForm::Shifted {
                t.check(err <= frac(5, big_n as i64), || {
                    format!("N={big_n}: relative error {:.5} > 5/N", to_f64(&err))
                });
            } else {
                homogeneous.push(format!("{:.2}", to_f64(&err) * big_n as f64));
            }
        }
    }
    let lead = giambelli_chi_leading(&ctx, &base, GiambelliForm::Homogeneous)?;
    t.check(lead == frac(-10, 3), || format!("homogeneous leading term {lead}"));
    t.note(format!("homogeneous form N*error = [{}]", homogeneous.join(", ")));
    Ok(())
}

fn vanishing(t: &mut Tally) -> Result<()> {
    let mut applied = 0;
    let mut majorants = 0;
    for d in [5, 6] {
        let ctx = HypersurfaceContext::new(2, d)?;
        let k = ctx.canonical_degree();
        for (c, r, shape) in lambda_shapes(2, 40) {
            let exact = if r == 0 {
                line_bundle_cohomology_x(&ctx, c as i64 * k)
            } else {
                lambda_cohomology_x(&ctx, r, c as i64 * k)?
            };
            let h = exact.h.clone().expect("full cohomology");
            if vanishing_threshold(&ctx, &shape)?.vanishes {
                applied += 1;
                t.check(h.iter().skip(1).all(|x| x.is_zero()), || format!("d={d} {shape}: {h:?}"));
            }
            for q in 1..=2 {
                if let Ok(bound) = hq_majorant(&ctx, &shape, q) {
                    majorants += 1;
                    t.check(bound >= h[q], || format!("d={d} {shape} q={q}: {bound} < {}", h[q]));
                }
            }
        }
    }
    t.check(applied > 0 && majorants > 0, || "no case exercised the vanishing criterion".into());
    t.note(format!("{applied} vanishing cases, {majorants} majorant cases"));
    Ok(())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    frac(rng.gen_range(-20..=20), rng.gen_range(1..=9))
}

fn random_point(n: usize, kappa: u32, rng: &mut ChaCha8Rng) -> JetPoint {
    JetPoint::from_fn(n, kappa, |_, _| random_rational(rng))
}

fn pluecker(t: &mut Tally, o: &VerifyOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    for n in 1..=3 {
        for kappa in 1..=4 {
            let rels = all_relations(n, kappa);
            let points: Vec<JetPoint> = (0..100).map(|_| random_point(n, kappa, &mut rng)).collect();
            for rel in &rels {
                for p in &points {
                    let v = rel.eval(p)?;
                    t.check(v.is_zero(), || format!("relation {} {} nonzero", rel.pair.0, rel.pair.1));
                }
            }
        }
    }
    for m in 1..=6 {
        let count = ssyt_monomials(2, 3, m).len();
        let points: Vec<JetPoint> = (0..count + 4).map(|_| random_point(2, 3, &mut rng)).collect();
        let mat = ssyt_monomial_matrix(2, 3, m, &points)?;
        t.check(mat.rank == count, || format!("m={m}: rank {} < {count}", mat.rank));
    }
    Ok(())
}

fn families(t: &mut Tally) -> Result<()> {
    for n in 1..=3 {
        for kappa in 1..=4 {
            let keys = all_family_keys(n, kappa);
            for m in 1..=10u64 {
                let mut by_key: HashMap<_, u128> = HashMap::new();
                let mut seen: HashMap<_, Tableau> = HashMap::new();
                let mut total = 0u128;
                for shape in partitions_in_range(n, m.div_ceil(kappa as u64), m) {
                    for tab in enumerate_ssyt(&shape, kappa, m) {
                        total += 1;
                        let (key, mults) = classify_with_multiplicities(&tab);
                        let dcols = key.distinct_columns().expect("classified keys carry tau");
                        let bound = max_distinct_columns(n, kappa);
                        t.check(dcols <= bound, || format!("D = {dcols} > {bound}"));
                        t.check(key.is_valid(kappa), || format!("invalid key for {tab:?}"));
                        t.check(
                            is_maximal_family(&key, n, kappa) == (dcols == bound && key.blocks.len() == n),
                            || format!("maximality mismatch for {tab:?}"),
                        );
                        *by_key.entry(key.coarse()).or_default() += 1;
                        let prev = seen.insert((key, mults), tab.clone());
                        t.check(prev.is_none(), || format!("two tableaux share a classification: {tab:?}"));
                    }
                }
                let mut sum = 0u128;
                for k in &keys {
                    let s = family_size(k, m);
                    sum += s;
                    let got = by_key.get(k).copied().unwrap_or(0);
                    t.check(s == got, || format!("family size {s} vs {got} for {k:?} at m={m}"));
                }
                t.check(sum == total, || format!("n={n} kappa={kappa} m={m}: families {sum} vs {total}"));
                t.check(by_key.keys().all(|k| keys.contains(k)), || "classified key not enumerated".into());
            }
        }
    }
    for depth in 1..=3usize {
        let cols = columns(depth, 6);
        for a in &cols {
            for b in &cols {
                if a.iter().zip(b).all(|(x, y)| x <= y) {
                    let dp = tight_path_count(a, b)?;
                    let listed = tight_paths(a, b)?.len() as u128;
                    let bound = tight_path_upper_bound(a, b)?;
                    t.check(dp == listed && BigInt::from(dp) <= bound, || {
                        format!("{a:?}->{b:?}: dp {dp}, listed {listed}, bound {bound}")
                    });
                }
            }
        }
    }
    Ok(())
}

fn columns(depth: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..depth {
        out = out
            .into_iter()
            .flat_map(|c: Vec<u32>| {
                let lo = c.last().map_or(1, |&x| x + 1);
                (lo..=max).map(move |v| {
                    let mut c = c.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    out
}

fn polylog(t: &mut Tally) -> Result<()> {
    for q in 1..=3 {
        let (small, large) = (polylog_gap(1_000, q), polylog_gap(1_000_000, q));
        t.check(large < small, || format!("q={q}: gap {large} not below {small}"));
        t.note(format!("q={q} gap {small:.4} -> {large:.4}"));
    }
    for kappa in 1..=6u64 {
        for q in 0..=4u32 {
            let direct = direct_polylog(kappa, q);
            let newton = polylog_sum(kappa, q);
            t.check(direct == newton, || format!("kappa={kappa} q={q}: {direct} vs {newton}"));
        }
    }
    Ok(())
}

/// Expansion over all `(q_1, ..., q_κ)` with sum q.
fn direct_polylog(kappa: u64, q: u32) -> Rational {
    fn rec(i: u64, kappa: u64, left: u32) -> Rational {
        if i == kappa {
            return Rational::new(BigInt::one(), BigInt::from(i).pow(left));
        }
        (0..=left)
            .map(|qi| Rational::new(BigInt::one(), BigInt::from(i).pow(qi)) * rec(i + 1, kappa, left - qi))
            .sum()
    }
    rec(1, kappa, q)
}

fn simplex(t: &mut Tally) -> Result<()> {
    for p in 2..=4usize {
        let total = 4usize.pow(p as u32);
        for code in 0..total {
            let js: Vec<u64> = (0..p).map(|i| ((code / 4usize.pow(i as u32)) % 4) as u64).collect();
            let a = simplex_moment(&js)?;
            let b = simplex_moment_recursive(&js)?;
            t.check(a == b, || format!("{js:?}: {a} vs {b}"));
        }
    }
    Ok(())
}

/// Truncated power series in one variable.
fn series_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); a.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn faa(t: &mut Tally, o: &VerifyOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed ^ 0xfaa);
    for n in 1..=2usize {
        for lambda in 1..=5u32 {
            let len = lambda as usize + 1;
            // f_i(ζ) = Σ_k f_i^{(k)} ζ^k / k!
            let derivs: Vec<Vec<Rational>> = (0..n)
                .map(|_| (0..len).map(|_| random_rational(&mut rng)).collect())
                .collect();
            let series: Vec<Vec<Rational>> = derivs
                .iter()
                .map(|d| {
                    d.iter()
                        .enumerate()
                        .map(|(k, v)| v / Rational::from_integer(factorial(k as u64)))
                        .collect()
                })
                .collect();
            // Ψ: random polynomial of total degree ≤ λ
            let mut psi: Vec<(Vec<u32>, Rational)> = Vec::new();
            for code in 0..len.pow(n as u32) {
                let e: Vec<u32> = (0..n).map(|i| ((code / len.pow(i as u32)) % len) as u32).collect();
                if e.iter().sum::<u32>() <= lambda {
                    psi.push((e, random_rational(&mut rng)));
                }
            }
            // route 1: expand Ψ(f(ζ)) and read off the λ-th derivative
            let mut g = vec![Rational::zero(); len];
            for (e, c) in &psi {
                let mut term = vec![Rational::zero(); len];
                term[0] = c.clone();
                for (i, &ei) in e.iter().enumerate() {
                    for _ in 0..ei {
                        term = series_mul(&term, &series[i]);
                    }
                }
                for (a, b) in g.iter_mut().zip(term) {
                    *a += b;
                }
            }
            let symbolic = &g[lambda as usize] * Rational::from_integer(factorial(lambda as u64));
            // route 2: the generated terms
            let x0: Vec<Rational> = derivs.iter().map(|d| d[0].clone()).collect();
            let partial = |a: &[u32]| -> Rational {
                psi.iter()
                    .filter(|(e, _)| e.iter().zip(a).all(|(x, y)| x >= y))
                    .map(|(e, c)| {
                        let mut v = c.clone();
                        for i in 0..n {
                            let falling = factorial(e[i] as u64) / factorial((e[i] - a[i]) as u64);
                            v *= Rational::from_integer(falling) * crate::rational::pow_i(&x0[i], e[i] - a[i]);
                        }
                        v
                    })
                    .sum()
            };
            let terms = faa_di_bruno(lambda)?;
            let generated = faa_di_bruno_apply(&terms, n, partial, |i, k| derivs[i][k as usize].clone());
            t.check(symbolic == generated, || format!("n={n} lambda={lambda}: {symbolic} vs {generated}"));
        }
    }
    Ok(())
}

fn threshold(t: &mut Tally) -> Result<()> {
    for n in 1..=6usize {
        for d in 1..=12i64 {
            let ctx = HypersurfaceContext::new(n, d)?;
            let rep = h0_report(&ctx, 1, 1, usize::MAX)?;
            let mut tau = vec![0u32; n];
            tau[0] = n as u32;
            let chern = integrate_chern_monomial(n, &ChernMonomial::new(tau), true)?.eval_int(d);
            t.check(rep.leading_coefficient == chern, || format!("n={n} d={d}: {} vs {chern}", rep.leading_coefficient));
            let expect = d >= n as i64 + 3;
            t.check(rep.leading_positive() == expect, || format!("n={n} d={d}: positive={}", rep.leading_positive()));
            t.check(!expect || chern.is_positive(), || format!("n={n} d={d}: non-positive {chern}"));
        }
    }
    Ok(())
}

fn leading(t: &mut Tally) -> Result<()> {
    for d in [4i64, 5, 6] {
        let ctx = HypersurfaceContext::new(1, d)?;
        let h = leading_coefficient_harness(&ctx, 1, 2, 30, usize::MAX)?;
        let expect = int(d * (d - 3));
        t.check(h.predicted == expect, || format!("d={d}: predicted {}", h.predicted));
        for r in &h.rows {
            t.check(r.unit_difference.as_ref() == Some(&expect), || {
                format!("d={d} m={}: {:?}", r.m, r.unit_difference)
            });
        }
    }
    Ok(())
}
