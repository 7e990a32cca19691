use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::chern::{total_chern, DegreePolynomial};
use crate::cohomology::{chi_schur_exact, HypersurfaceContext};
use crate::error::{guard, Error, Result};
use crate::rational::{factorial, fmt_frac, int, multinomial, to_f64, Rational};
use crate::young::{multiplicity_table, Partition, Tableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// A value tagged with the arithmetic that produced it.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Rational),
    Float(f64),
}

impl Value {
    pub fn mode(&self) -> Mode {
        match self {
            Value::Exact(_) => Mode::Exact,
            Value::Float(_) => Mode::Float,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => to_f64(r),
            Value::Float(x) => *x,
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        match self {
            Value::Exact(r) => {
                map.serialize_entry("mode", "exact")?;
                map.serialize_entry("value", &fmt_frac(r))?;
            }
            Value::Float(x) => {
                map.serialize_entry("mode", "float")?;
                map.serialize_entry("value", x)?;
                map.serialize_entry("approx", &true)?;
            }
        }
        map.end()
    }
}

// ---------------------------------------------------------------- polylog

/// `Σ_{q_1+...+q_κ=q} ∏ i^{-q_i}`, i.e. `h_q(1, 1/2, ..., 1/κ)`.
pub fn polylog_sum(kappa: u64, q: u32) -> Rational {
    let q = q as usize;
    let mut p = vec![Rational::zero(); q + 1];
    for i in 1..=kappa {
        let inv = Rational::new(BigInt::one(), BigInt::from(i));
        let mut pow = Rational::one();
        for pj in p.iter_mut().skip(1) {
            pow *= &inv;
            *pj += &pow;
        }
    }
    newton(&p, q)
}

pub fn polylog_sum_f64(kappa: u64, q: u32) -> f64 {
    let q = q as usize;
    let mut p = vec![0.0f64; q + 1];
    // summing small terms first keeps the harmonic tail accurate
    for i in (1..=kappa).rev() {
        let inv = 1.0 / i as f64;
        let mut pow = 1.0;
        for pj in p.iter_mut().skip(1) {
            pow *= inv;
            *pj += pow;
        }
    }
    let mut h = vec![1.0f64; q + 1];
    for k in 1..=q {
        h[k] = (1..=k).map(|j| p[j] * h[k - j]).sum::<f64>() / k as f64;
    }
    h[q]
}

/// Complete homogeneous `h_q` from power sums `p[1..=q]`.
fn newton(p: &[Rational], q: usize) -> Rational {
    let mut h = vec![Rational::one(); q + 1];
    for k in 1..=q {
        let mut acc = Rational::zero();
        for j in 1..=k {
            acc += &p[j] * &h[k - j];
        }
        h[k] = acc / int(k as i64);
    }
    h.swap_remove(q)
}

pub const EXACT_POLYLOG_LIMIT: u64 = 10_000;

pub fn polylog_value(kappa: u64, q: u32, mode: Mode) -> Result<Value> {
    if kappa == 0 {
        return Err(Error::OutOfRange("kappa must be >= 1".into()));
    }
    match mode {
        Mode::Exact => {
            guard("exact polylog terms", kappa as u128, EXACT_POLYLOG_LIMIT as u128)?;
            Ok(Value::Exact(polylog_sum(kappa, q)))
        }
        Mode::Float => Ok(Value::Float(polylog_sum_f64(kappa, q))),
    }
}

/// `|q! Σ_1^κ(q) / (log κ)^q - 1|`.
pub fn polylog_gap(kappa: u64, q: u32) -> f64 {
    let fact: f64 = (1..=q).map(|i| i as f64).product();
    let l = (kappa as f64).ln();
    (fact * polylog_sum_f64(kappa, q) / l.powi(q as i32) - 1.0).abs()
}

// ---------------------------------------------------------------- simplex

/// `∫ x_1^{j_1} ... x_p^{j_p}` over the standard (p-1)-simplex.
pub fn simplex_moment(js: &[u64]) -> Result<Rational> {
    if js.len() < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 exponents, got {}", js.len())));
    }
    let num: BigInt = js.iter().map(|&j| factorial(j)).product();
    let top = js.iter().sum::<u64>() + js.len() as u64 - 1;
    Ok(Rational::new(num, factorial(top)))
}

/// Same integral by peeling off the last variable.
pub fn simplex_moment_recursive(js: &[u64]) -> Result<Rational> {
    if js.len() < 2 {
        return Err(Error::OutOfRange(format!("need at least 2 exponents, got {}", js.len())));
    }
    fn rec(js: &[u64]) -> Rational {
        if js.len() == 1 {
            return Rational::one();
        }
        let (j1, jp) = (js[0], js[js.len() - 1]);
        let c = Rational::new(factorial(j1) * factorial(jp), factorial(j1 + jp + 1));
        let mut rest = vec![j1 + jp + 1];
        rest.extend_from_slice(&js[1..js.len() - 1]);
        c * rec(&rest)
    }
    Ok(rec(js))
}

// ---------------------------------------------------------------- basic sums

/// `∏ (ℓ_i - ℓ_{i+1})^{α_i} · ℓ_n^{α_n}` with `0^0 = 1`.
pub fn shape_monomial(shape: &Partition, alpha: &[u32]) -> BigInt {
    let l = shape.parts();
    let n = l.len();
    let mut acc = BigInt::one();
    for (i, &a) in alpha.iter().enumerate().take(n) {
        let diff = if i + 1 < n { l[i] - l[i + 1] } else { l[i] };
        acc *= BigInt::from(diff).pow(a);
    }
    acc
}

pub fn basic_numerical_sum(n: usize, kappa: u32, m: u64, alpha: &[u32], max_cells: usize) -> Result<BigInt> {
    if alpha.len() != n {
        return Err(Error::Malformed(format!("exponent vector has {} entries, need {n}", alpha.len())));
    }
    let table = multiplicity_table(n, kappa, m, max_cells)?;
    Ok(table
        .entries
        .iter()
        .map(|(p, &c)| shape_monomial(p, alpha) * BigInt::from(c))
        .sum())
}

// ---------------------------------------------------------------- families

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Block {
    pub depth: usize,
    pub mu: Vec<u32>,
    pub nu: Vec<u32>,
    pub tau: Option<u32>,
    pub path: Option<Vec<Vec<u32>>>,
}

impl Block {
    pub fn span(&self) -> u32 {
        self.mu.iter().zip(&self.nu).map(|(a, b)| b.saturating_sub(*a)).sum()
    }
}

/// Extreme columns of each extant block, deepest block first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FamilyKey {
    pub blocks: Vec<Block>,
}

fn strictly_increasing(c: &[u32]) -> bool {
    c.first().is_none_or(|&x| x >= 1) && c.windows(2).all(|w| w[0] < w[1])
}

fn leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn column_weight(c: &[u32]) -> u64 {
    c.iter().map(|&x| x as u64).sum()
}

impl FamilyKey {
    /// Drops paths and path lengths, leaving the `(μ, ν)` data.
    pub fn coarse(&self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block {
                    tau: None,
                    path: None,
                    ..b.clone()
                })
                .collect(),
        }
    }

    pub fn without_paths(&self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block { path: None, ..b.clone() })
                .collect(),
        }
    }

    pub fn depth(&self) -> usize {
        self.blocks.first().map_or(0, |b| b.depth)
    }

    /// Number of pairwise distinct columns; needs path lengths.
    pub fn distinct_columns(&self) -> Option<u64> {
        self.blocks.iter().map(|b| b.tau.map(|t| t as u64 + 1)).sum()
    }

    pub fn is_valid(&self, kappa: u32) -> bool {
        let mut prev: Option<&Block> = None;
        for b in &self.blocks {
            if b.depth == 0 || b.mu.len() != b.depth || b.nu.len() != b.depth {
                return false;
            }
            if !strictly_increasing(&b.mu) || !strictly_increasing(&b.nu) {
                return false;
            }
            if b.nu.last().is_some_and(|&x| x > kappa) || !leq(&b.mu, &b.nu) {
                return false;
            }
            if let Some(p) = prev {
                if p.depth <= b.depth || !leq(&p.nu[..b.depth], &b.mu) {
                    return false;
                }
            }
            if let Some(t) = b.tau {
                if t > b.span() || (t == 0) != (b.mu == b.nu) {
                    return false;
                }
            }
            if let Some(path) = &b.path {
                let ok = path.first() == Some(&b.mu)
                    && path.last() == Some(&b.nu)
                    && b.tau.is_none_or(|t| path.len() == t as usize + 1)
                    && path.iter().all(|c| c.len() == b.depth && strictly_increasing(c))
                    && path.windows(2).all(|w| w[0] != w[1] && leq(&w[0], &w[1]));
                if !ok {
                    return false;
                }
            }
            prev = Some(b);
        }
        true
    }
}

/// Block structure of a tableau: for each column depth, its chain of distinct columns.
pub fn classify_tableau(t: &Tableau) -> FamilyKey {
    classify_with_multiplicities(t).0
}

/// The key together with the multiplicity of every distinct column.
pub fn classify_with_multiplicities(t: &Tableau) -> (FamilyKey, Vec<Vec<u32>>) {
    let mut blocks = Vec::new();
    let mut mults: Vec<Vec<u32>> = Vec::new();
    let mut path: Vec<Vec<u32>> = Vec::new();
    let mut mult: Vec<u32> = Vec::new();
    let flush = |path: &mut Vec<Vec<u32>>, mult: &mut Vec<u32>, blocks: &mut Vec<Block>, mults: &mut Vec<Vec<u32>>| {
        if path.is_empty() {
            return;
        }
        let p = std::mem::take(path);
        blocks.push(Block {
            depth: p[0].len(),
            mu: p[0].clone(),
            nu: p[p.len() - 1].clone(),
            tau: Some(p.len() as u32 - 1),
            path: Some(p),
        });
        mults.push(std::mem::take(mult));
    };
    for c in t.columns() {
        if path.last().is_some_and(|last| last.len() != c.len()) {
            flush(&mut path, &mut mult, &mut blocks, &mut mults);
        }
        if path.last() == Some(&c) {
            *mult.last_mut().expect("nonempty") += 1;
        } else {
            path.push(c);
            mult.push(1);
        }
    }
    flush(&mut path, &mut mult, &mut blocks, &mut mults);
    (FamilyKey { blocks }, mults)
}

/// Strictly increasing columns of length `depth` lying componentwise in `[lo, hi]`.
fn columns_between(lo: &[u32], hi: &[u32]) -> Vec<Vec<u32>> {
    fn rec(l: usize, lo: &[u32], hi: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if l == lo.len() {
            out.push(cur.clone());
            return;
        }
        let start = cur.last().map_or(lo[l], |&p| lo[l].max(p + 1));
        for v in start..=hi[l] {
            cur.push(v);
            rec(l + 1, lo, hi, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, lo, hi, &mut Vec::new(), &mut out);
    out
}

fn series_mul(a: &[u128], b: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; a.len()];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `x^w + x^{2w} + ...` truncated at degree m.
fn geometric(w: u64, m: u64) -> Vec<u128> {
    let mut s = vec![0u128; m as usize + 1];
    if w > 0 {
        let mut k = w;
        while k <= m {
            s[k as usize] = 1;
            k += w;
        }
    }
    s
}

/// Generating series (truncated at m) of the tableau pieces a block can produce.
fn block_series(b: &Block, m: u64) -> Vec<u128> {
    if let Some(path) = &b.path {
        let mut one = vec![0u128; m as usize + 1];
        one[0] = 1;
        return path
            .iter()
            .fold(one, |acc, c| series_mul(&acc, &geometric(column_weight(c), m)));
    }
    // sorting by weight respects the componentwise order
    let mut cols = columns_between(&b.mu, &b.nu);
    cols.sort_by_key(|c| column_weight(c));
    let max_len = b.span() as usize + 1;
    let idx_mu = cols.iter().position(|c| *c == b.mu).expect("mu in range");
    let mut g: Vec<Vec<Option<Vec<u128>>>> = vec![vec![None; max_len + 1]; cols.len()];
    g[idx_mu][1] = Some(geometric(column_weight(&b.mu), m));
    for ci in 0..cols.len() {
        for len in 1..=max_len {
            let Some(cur) = g[ci][len].clone() else { continue };
            for cj in ci + 1..cols.len() {
                if cols[ci] != cols[cj] && leq(&cols[ci], &cols[cj]) && len < max_len {
                    let next = series_mul(&cur, &geometric(column_weight(&cols[cj]), m));
                    let slot = &mut g[cj][len + 1];
                    match slot {
                        Some(s) => s.iter_mut().zip(next).for_each(|(a, b)| *a += b),
                        None => *slot = Some(next),
                    }
                }
            }
        }
    }
    let idx_nu = cols.iter().position(|c| *c == b.nu).expect("nu in range");
    let mut out = vec![0u128; m as usize + 1];
    for len in 1..=max_len {
        if b.tau.is_some_and(|t| t as usize + 1 != len) {
            continue;
        }
        if let Some(s) = &g[idx_nu][len] {
            out.iter_mut().zip(s).for_each(|(a, b)| *a += b);
        }
    }
    out
}

/// Number of weight-m tableaux in the family (paths and path lengths honored when present).
pub fn family_size(key: &FamilyKey, m: u64) -> u128 {
    let mut acc = vec![0u128; m as usize + 1];
    acc[0] = 1;
    for b in &key.blocks {
        acc = series_mul(&acc, &block_series(b, m));
    }
    acc[m as usize]
}

/// All coarse keys with at most n rows and entries ≤ κ.
pub fn all_family_keys(n: usize, kappa: u32) -> Vec<FamilyKey> {
    fn rec(max_depth: usize, kappa: u32, prev_nu: Option<&[u32]>, cur: &mut Vec<Block>, out: &mut Vec<FamilyKey>) {
        if !cur.is_empty() {
            out.push(FamilyKey { blocks: cur.clone() });
        }
        let depths: Vec<usize> = if cur.is_empty() {
            (1..=max_depth).rev().collect()
        } else {
            (1..max_depth).rev().collect()
        };
        for depth in depths {
            let lo: Vec<u32> = match prev_nu {
                Some(p) => p[..depth].to_vec(),
                None => (1..=depth as u32).collect(),
            };
            let hi: Vec<u32> = (0..depth).map(|l| kappa - (depth - 1 - l) as u32).collect();
            if !leq(&lo, &hi) {
                continue;
            }
            for mu in columns_between(&lo, &hi) {
                for nu in columns_between(&mu, &hi) {
                    cur.push(Block {
                        depth,
                        mu: mu.clone(),
                        nu: nu.clone(),
                        tau: None,
                        path: None,
                    });
                    rec(depth, kappa, Some(&nu), cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    if kappa as usize >= 1 {
        rec(n.min(kappa as usize), kappa, None, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// Upper bound `nκ - n(n-1)/2` on the number of distinct columns, with n
/// capped at κ since no column is deeper than κ.
pub fn max_distinct_columns(n: usize, kappa: u32) -> u64 {
    let n = n.min(kappa as usize) as u64;
    n * kappa as u64 - n * n.saturating_sub(1) / 2
}

pub fn is_maximal_family(key: &FamilyKey, n: usize, kappa: u32) -> bool {
    if key.blocks.len() != n || !key.is_valid(kappa) {
        return false;
    }
    let wronskian: Vec<u32> = (1..=n as u32).collect();
    if key.blocks[0].mu != wronskian {
        return false;
    }
    for (k, b) in key.blocks.iter().enumerate() {
        if b.depth != n - k || b.nu[b.depth - 1] != kappa {
            return false;
        }
        if b.tau.is_some_and(|t| t != b.span()) {
            return false;
        }
        if let Some(next) = key.blocks.get(k + 1) {
            if b.nu[..next.depth] != next.mu[..] {
                return false;
            }
        }
    }
    true
}

/// A point of ∇_{n,κ}: rows `μ^1, ..., μ^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NablaPoint {
    pub n: usize,
    pub kappa: u32,
    pub rows: Vec<Vec<u32>>,
}

impl NablaPoint {
    /// First column of block i, with the Wronskian `(1..n)` for i = n.
    pub fn start(&self, i: usize) -> Vec<u32> {
        if i == self.n {
            (1..=self.n as u32).collect()
        } else {
            self.rows[i - 1].clone()
        }
    }

    /// Last column of block i: `(μ^{i-1}, κ)`.
    pub fn end(&self, i: usize) -> Vec<u32> {
        let mut c = if i >= 2 { self.start(i - 1) } else { Vec::new() };
        c.push(self.kappa);
        c
    }

    pub fn tau(&self, i: usize) -> u32 {
        let prev: u32 = if i >= 2 { self.start(i - 1).iter().sum() } else { 0 };
        self.kappa + prev - self.start(i).iter().sum::<u32>()
    }

    pub fn key(&self) -> FamilyKey {
        FamilyKey {
            blocks: (1..=self.n)
                .rev()
                .map(|i| Block {
                    depth: i,
                    mu: self.start(i),
                    nu: self.end(i),
                    tau: Some(self.tau(i)),
                    path: None,
                })
                .collect(),
        }
    }

    /// Product over blocks of the number of tight paths.
    pub fn path_product(&self) -> BigInt {
        (1..=self.n)
            .map(|i| BigInt::from(tight_path_count(&self.start(i), &self.end(i)).expect("valid point")))
            .product()
    }
}

pub fn nabla_of(key: &FamilyKey, n: usize, kappa: u32) -> Option<NablaPoint> {
    if !is_maximal_family(key, n, kappa) {
        return None;
    }
    let rows = (1..n).map(|i| key.blocks[n - i].mu.clone()).collect();
    Some(NablaPoint { n, kappa, rows })
}

pub fn nabla_points(n: usize, kappa: u32) -> Vec<NablaPoint> {
    let mut out = Vec::new();
    for_each_nabla(n, kappa, Vec::new(), &mut |p| out.push(p.clone()));
    out
}

/// Visits the ∇-points whose leading rows are `prefix`, without collecting them.
pub fn for_each_nabla(n: usize, kappa: u32, prefix: Vec<Vec<u32>>, f: &mut impl FnMut(&NablaPoint)) {
    fn rec(p: &mut NablaPoint, f: &mut impl FnMut(&NablaPoint)) {
        let i = p.rows.len() + 1;
        if i >= p.n {
            f(p);
            return;
        }
        let mut hi: Vec<u32> = (0..i).map(|l| p.kappa - (i - l) as u32).collect();
        if let Some(prev) = p.rows.last() {
            for l in 0..i - 1 {
                hi[l] = hi[l].min(prev[l]);
            }
        }
        let lo: Vec<u32> = (1..=i as u32).collect();
        if !leq(&lo, &hi) {
            return;
        }
        for row in columns_between(&lo, &hi) {
            p.rows.push(row);
            rec(p, f);
            p.rows.pop();
        }
    }
    if n >= 1 && kappa as usize >= n {
        rec(&mut NablaPoint { n, kappa, rows: prefix }, f);
    }
}

// ---------------------------------------------------------------- tight paths

fn check_columns(start: &[u32], end: &[u32]) -> Result<()> {
    if start.len() != end.len() || start.is_empty() {
        return Err(Error::Malformed("columns must have the same positive depth".into()));
    }
    if !strictly_increasing(start) || !strictly_increasing(end) {
        return Err(Error::Malformed("columns must be strictly increasing and positive".into()));
    }
    if !leq(start, end) {
        return Err(Error::Malformed("start must lie below end componentwise".into()));
    }
    Ok(())
}

/// Unit-step paths from `start` to `end` staying strictly increasing.
pub fn tight_path_count(start: &[u32], end: &[u32]) -> Result<u128> {
    check_columns(start, end)?;
    fn go(c: &mut Vec<u32>, end: &[u32], memo: &mut HashMap<Vec<u32>, u128>) -> u128 {
        if c == end {
            return 1;
        }
        if let Some(&v) = memo.get(c.as_slice()) {
            return v;
        }
        let mut total = 0;
        for l in 0..c.len() {
            let v = c[l] + 1;
            if v <= end[l] && (l + 1 == c.len() || v < c[l + 1]) {
                c[l] = v;
                total += go(c, end, memo);
                c[l] -= 1;
            }
        }
        memo.insert(c.clone(), total);
        total
    }
    Ok(go(&mut start.to_vec(), end, &mut HashMap::new()))
}

/// Every tight path from `start` to `end`, listed explicitly.
pub fn tight_paths(start: &[u32], end: &[u32]) -> Result<Vec<Vec<Vec<u32>>>> {
    check_columns(start, end)?;
    fn walk(path: &mut Vec<Vec<u32>>, end: &[u32], out: &mut Vec<Vec<Vec<u32>>>) {
        let c = path.last().expect("nonempty").clone();
        if c == end {
            out.push(path.clone());
            return;
        }
        for l in 0..c.len() {
            let mut next = c.clone();
            next[l] += 1;
            if next[l] <= end[l] && strictly_increasing(&next) {
                path.push(next);
                walk(path, end, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    walk(&mut vec![start.to_vec()], end, &mut out);
    Ok(out)
}

/// Paths counted without the strictness constraint: a multinomial.
pub fn tight_path_upper_bound(start: &[u32], end: &[u32]) -> Result<BigInt> {
    check_columns(start, end)?;
    let steps: Vec<u64> = start.iter().zip(end).map(|(a, b)| (b - a) as u64).collect();
    Ok(multinomial(&steps))
}

// ---------------------------------------------------------------- family sums

/// `Σ ∏_i (Σ_s a^i_s)^{α_i}` over multiplicities `a ≥ 1` with `Σ w^i_s a^i_s = m`.
/// `weights[k]` lists the column weights of the k-th block, `alpha[k]` its exponent.
pub fn multiplicity_sum(weights: &[Vec<u64>], alpha: &[u32], m: u64, max_cells: usize) -> Result<BigInt> {
    let mu = m as usize;
    guard("family sum table", ((mu + 1) * (mu + 1)) as u128, (max_cells as u128).pow(2))?;
    let mut acc = vec![BigInt::zero(); mu + 1];
    acc[0] = BigInt::one();
    for (ws, &a) in weights.iter().zip(alpha) {
        // t[w][k]: ways to reach weight w using k columns in total
        let mut t = vec![vec![BigInt::zero(); mu + 1]; mu + 1];
        t[0][0] = BigInt::one();
        for &w in ws {
            let w = w as usize;
            let mut next = vec![vec![BigInt::zero(); mu + 1]; mu + 1];
            for x in 0..=mu {
                for k in 0..=mu {
                    if t[x][k].is_zero() {
                        continue;
                    }
                    let mut r = 1;
                    while x + r * w <= mu && k + r <= mu && w > 0 {
                        next[x + r * w][k + r] += &t[x][k];
                        r += 1;
                    }
                }
            }
            t = next;
        }
        let v: Vec<BigInt> = t
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(k, c)| c * BigInt::from(k).pow(a))
                    .sum()
            })
            .collect();
        let mut out = vec![BigInt::zero(); mu + 1];
        for (i, x) in acc.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in v.iter().enumerate().take(mu + 1 - i) {
                out[i + j] += x * y;
            }
        }
        acc = out;
    }
    Ok(acc.swap_remove(mu))
}

/// `S^{α'}_{n,κ,m}(μ)` for the maximal family of a ∇-point.
pub fn nabla_family_sum(point: &NablaPoint, m: u64, alpha: &[u32], max_cells: usize) -> Result<BigInt> {
    let n = point.n;
    if alpha.len() != n {
        return Err(Error::Malformed(format!("exponent vector has {} entries, need {n}", alpha.len())));
    }
    let mut weights = Vec::new();
    let mut exps = Vec::new();
    for i in (1..=n).rev() {
        let base: u64 = point.start(i).iter().map(|&x| x as u64).sum();
        weights.push((0..=point.tau(i) as u64).map(|s| base + s).collect());
        exps.push(alpha[i - 1]);
    }
    multiplicity_sum(&weights, &exps, m, max_cells)
}

pub fn family_sum(key: &FamilyKey, n: usize, kappa: u32, m: u64, alpha: &[u32], max_cells: usize) -> Result<BigInt> {
    let point = nabla_of(key, n, kappa)
        .ok_or_else(|| Error::HypothesisNotMet("family is not maximal".into()))?;
    nabla_family_sum(&point, m, alpha, max_cells)
}

// ---------------------------------------------------------------- kernel sums

/// Polynomial in `log p` (p prime) with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LogPolynomial {
    pub terms: BTreeMap<Vec<(u64, u32)>, Rational>,
}

fn factorize(mut a: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= a {
        let mut e = 0;
        while a.is_multiple_of(p) {
            a /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if a > 1 {
        out.push((a, 1));
    }
    out
}

impl LogPolynomial {
    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Self { terms }
    }

    /// `log a - log b`.
    pub fn log_ratio(a: u64, b: u64) -> Self {
        let mut lin: BTreeMap<u64, i64> = BTreeMap::new();
        for (p, e) in factorize(a) {
            *lin.entry(p).or_default() += e as i64;
        }
        for (p, e) in factorize(b) {
            *lin.entry(p).or_default() -= e as i64;
        }
        let terms = lin
            .into_iter()
            .filter(|&(_, c)| c != 0)
            .map(|(p, c)| (vec![(p, 1)], int(c)))
            .collect();
        Self { terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<(u64, u32)>, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut merged: BTreeMap<u64, u32> = ma.iter().copied().collect();
                for &(p, e) in mb {
                    *merged.entry(p).or_default() += e;
                }
                let key: Vec<(u64, u32)> = merged.into_iter().collect();
                *terms.entry(key).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Rational) {
        for (m, v) in &other.terms {
            *self.terms.entry(m.clone()).or_insert_with(Rational::zero) += v * c;
        }
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn eval_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                to_f64(c)
                    * m.iter()
                        .map(|&(p, e)| (p as f64).ln().powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }
}

impl Serialize for LogPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            coeff: String,
            logs: &'a [(u64, u32)],
        }
        let v: Vec<Term> = self
            .terms
            .iter()
            .map(|(m, c)| Term {
                coeff: fmt_frac(c),
                logs: m,
            })
            .collect();
        v.serialize(s)
    }
}

fn kernel_alpha(n: usize, kappa: u32, alpha: &[u32]) -> Result<Vec<u32>> {
    if n < 2 {
        return Err(Error::OutOfRange("kernel sums need n >= 2".into()));
    }
    if (kappa as usize) < n {
        return Err(Error::HypothesisNotMet(format!("kappa = {kappa} < n = {n}")));
    }
    match alpha.len() {
        l if l + 1 == n => Ok(alpha.to_vec()),
        l if l == n && alpha[n - 1] == 0 => Ok(alpha[..n - 1].to_vec()),
        l if l == n => Err(Error::HypothesisNotMet("last exponent must vanish".into())),
        l => Err(Error::Malformed(format!("exponent vector has {l} entries for n = {n}"))),
    }
}

/// Factorial arguments of one kernel term: (numerator args, denominator args),
/// plus the pairs `(a, b)` of the log factors `log a - log b`.
fn kernel_term(p: &NablaPoint) -> (Vec<u64>, Vec<u64>, Vec<(u64, u64)>) {
    let n = p.n;
    let k = p.kappa as u64;
    let row = |i: usize| -> Vec<u64> {
        if i == 0 {
            Vec::new()
        } else {
            p.rows[i - 1].iter().map(|&x| x as u64).collect()
        }
    };
    let mut num = vec![k; n - 2];
    let mut den = Vec::new();
    num.push(row(1)[0] - 1);
    for i in 2..n {
        let (up, cur) = (row(i - 1), row(i));
        let drops: Vec<u64> = (0..i - 1).map(|l| up[l] - cur[l]).collect();
        num.push(drops.iter().sum::<u64>() + k - cur[i - 1]);
        den.extend(drops);
        den.push(k - cur[i - 1]);
        num.push(cur.iter().sum::<u64>() - 1);
        den.push(k + up.iter().sum::<u64>());
    }
    let last = row(n - 1);
    den.extend(last.iter().enumerate().map(|(l, &x)| x - (l as u64 + 1)));
    let logs = (1..n)
        .map(|i| (k + row(i - 1).iter().sum::<u64>(), row(i).iter().sum::<u64>()))
        .collect();
    (num, den, logs)
}

pub const EXACT_KERNEL_LIMIT: usize = 20_000;

/// `K^n_{α'}(κ)` with exact rational coefficients over products of `log p`.
pub fn kernel_sum_exact(n: usize, kappa: u32, alpha: &[u32]) -> Result<LogPolynomial> {
    let alpha = kernel_alpha(n, kappa, alpha)?;
    let points = nabla_points(n, kappa);
    guard("kernel terms", points.len() as u128, EXACT_KERNEL_LIMIT as u128)?;
    let scale = Rational::new(BigInt::one(), BigInt::from(kappa).pow((n * (n - 1) / 2) as u32));
    let mut total = LogPolynomial::default();
    for p in &points {
        let (num, den, logs) = kernel_term(p);
        let c = Rational::new(
            num.iter().map(|&x| factorial(x)).product(),
            den.iter().map(|&x| factorial(x)).product(),
        ) * &scale;
        let poly = logs
            .iter()
            .zip(&alpha)
            .fold(LogPolynomial::constant(Rational::one()), |acc, (&(a, b), &e)| {
                acc.mul(&LogPolynomial::log_ratio(a, b).pow(e))
            });
        total.add_scaled(&poly, &c);
    }
    Ok(total)
}

/// Same sum in floating point, factorials handled in the log domain.
pub fn kernel_sum_f64(n: usize, kappa: u32, alpha: &[u32]) -> Result<f64> {
    let alpha = kernel_alpha(n, kappa, alpha)?;
    let top = n * kappa as usize + 2;
    let mut lnfact = vec![0.0f64; top + 1];
    for i in 1..=top {
        lnfact[i] = lnfact[i - 1] + (i as f64).ln();
    }
    let scale = -((n * (n - 1) / 2) as f64) * (kappa as f64).ln();
    let term = |p: &NablaPoint| {
        let (num, den, logs) = kernel_term(p);
        let lc = scale + num.iter().map(|&x| lnfact[x as usize]).sum::<f64>()
            - den.iter().map(|&x| lnfact[x as usize]).sum::<f64>();
        let lp: f64 = logs
            .iter()
            .zip(&alpha)
            .map(|(&(a, b), &e)| ((a as f64).ln() - (b as f64).ln()).powi(e as i32))
            .product();
        lc.exp() * lp
    };
    // one task per value of μ_1^1, summed in order
    let terms: Vec<f64> = (1..kappa)
        .into_par_iter()
        .map(|first| {
            let mut acc = 0.0;
            for_each_nabla(n, kappa, vec![vec![first]], &mut |p| acc += term(p));
            acc
        })
        .collect();
    Ok(terms.iter().sum())
}

pub fn kernel_sum(n: usize, kappa: u32, alpha: &[u32], mode: Mode) -> Result<Value> {
    match mode {
        Mode::Exact => {
            let p = kernel_sum_exact(n, kappa, alpha)?;
            if p.terms.keys().all(|m| m.is_empty()) {
                Ok(Value::Exact(p.terms.values().next().cloned().unwrap_or_else(Rational::zero)))
            } else {
                Err(Error::HypothesisNotMet(
                    "value involves logarithms; use kernel_sum_exact or float mode".into(),
                ))
            }
        }
        Mode::Float => Ok(Value::Float(kernel_sum_f64(n, kappa, alpha)?)),
    }
}

// ---------------------------------------------------------------- harness

/// Degree in m of χ(Gr•): `(κ+1)n - 1`.
pub fn harness_degree(n: usize, kappa: u32) -> usize {
    (kappa as usize + 1) * n - 1
}

fn series_inverse(s: &[DegreePolynomial], len: usize) -> Vec<DegreePolynomial> {
    let mut inv = vec![DegreePolynomial::zero(); len];
    inv[0] = DegreePolynomial::constant(Rational::one());
    for k in 1..len {
        let mut acc = DegreePolynomial::zero();
        for j in 1..=k.min(s.len() - 1) {
            acc = &acc - &(&s[j] * &inv[k - j]);
        }
        inv[k] = acc;
    }
    inv
}

fn series_product(a: &[DegreePolynomial], b: &[DegreePolynomial]) -> Vec<DegreePolynomial> {
    let len = a.len();
    let mut out = vec![DegreePolynomial::zero(); len];
    for i in 0..len {
        for j in 0..len - i {
            out[i + j] = &out[i + j] + &(&a[i] * &b[j]);
        }
    }
    out
}

fn leading_normalizer(n: usize, kappa: u32) -> Rational {
    let d = harness_degree(n, kappa) as u64;
    Rational::new(BigInt::one(), factorial(kappa as u64).pow(n as u32) * factorial(d))
}

/// Predicted coefficient of `m^{(κ+1)n-1}` in χ(Gr•) as a polynomial in d,
/// from `∏_j c(T*_X, -1/j)^{-1}`.
pub fn predicted_leading_polynomial(n: usize, kappa: u32) -> DegreePolynomial {
    let cstar = total_chern(n, true);
    let mut acc = vec![DegreePolynomial::zero(); n + 1];
    acc[0] = DegreePolynomial::constant(Rational::one());
    for j in 1..=kappa as i64 {
        let s: Vec<DegreePolynomial> = cstar
            .iter()
            .enumerate()
            .map(|(k, c)| c.scale(&(-Rational::new(BigInt::one(), BigInt::from(j))).pow(k as i32)))
            .collect();
        acc = series_product(&acc, &series_inverse(&s, n + 1));
    }
    (&acc[n] * &DegreePolynomial::d()).scale(&leading_normalizer(n, kappa))
}

/// Same prediction through power sums of the Chern roots and `Σ_j j^{-r}`.
pub fn predicted_leading_polynomial_power_sums(n: usize, kappa: u32) -> DegreePolynomial {
    let e = total_chern(n, true);
    let mut p = vec![DegreePolynomial::zero(); n + 1];
    for r in 1..=n {
        // Newton: p_r = Σ_{i<r} (-1)^{i-1} e_i p_{r-i} + (-1)^{r-1} r e_r
        let mut acc = e[r].scale(&int(r as i64));
        if r % 2 == 0 {
            acc = -&acc;
        }
        for i in 1..r {
            let t = &e[i] * &p[r - i];
            acc = if i % 2 == 1 { &acc + &t } else { &acc - &t };
        }
        p[r] = acc;
    }
    let zeta: Vec<Rational> = (0..=n)
        .map(|r| {
            (1..=kappa as i64)
                .map(|j| Rational::new(BigInt::one(), BigInt::from(j).pow(r as u32)))
                .sum()
        })
        .collect();
    // log of the generating series is Σ_r p_r ζ_r x^r / r
    let l: Vec<DegreePolynomial> = (0..=n)
        .map(|r| if r == 0 { DegreePolynomial::zero() } else { p[r].scale(&(&zeta[r] / int(r as i64))) })
        .collect();
    let mut ex = vec![DegreePolynomial::constant(Rational::one()); n + 1];
    for q in 1..=n {
        let mut acc = DegreePolynomial::zero();
        for r in 1..=q {
            acc = &acc + &(&l[r] * &ex[q - r]).scale(&int(r as i64));
        }
        ex[q] = acc.scale(&Rational::new(BigInt::one(), BigInt::from(q)));
    }
    (&ex[n] * &DegreePolynomial::d()).scale(&leading_normalizer(n, kappa))
}

/// `χ(X, Gr•_m) = Σ_ℓ M_ℓ χ(X, S^ℓ T*_X)`, using a shape cache.
pub fn chi_gr(
    ctx: &HypersurfaceContext,
    kappa: u32,
    m: u64,
    max_cells: usize,
    cache: &mut HashMap<Partition, BigInt>,
) -> Result<BigInt> {
    if m == 0 {
        return chi_schur_exact(ctx, &Partition::empty(ctx.n), 0);
    }
    let table = multiplicity_table(ctx.n, kappa, m, max_cells)?;
    let mut total = BigInt::zero();
    for (p, &c) in &table.entries {
        let chi = match cache.get(p) {
            Some(v) => v.clone(),
            None => {
                let v = chi_schur_exact(ctx, p, 0)?;
                cache.insert(p.clone(), v.clone());
                v
            }
        };
        total += chi * BigInt::from(c);
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessRow {
    pub m: u64,
    #[serde(serialize_with = "ser_big")]
    pub chi: BigInt,
    /// Order-D unit-step difference over `m-D..=m`, divided by D!.
    #[serde(serialize_with = "ser_opt_frac")]
    pub unit_difference: Option<Rational>,
    /// Order-D difference with step L over `m-DL..=m`, divided by `L^D D!`.
    #[serde(serialize_with = "ser_opt_frac")]
    pub strided_difference: Option<Rational>,
    /// `χ(m) / m^D`.
    #[serde(serialize_with = "ser_frac")]
    pub ratio: Rational,
}

fn ser_big<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_frac<S: Serializer>(v: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_frac(v))
}

fn ser_opt_frac<S: Serializer>(v: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_str(&fmt_frac(r)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Harness {
    pub n: usize,
    pub d: i64,
    pub kappa: u32,
    pub degree: usize,
    pub stride: u64,
    #[serde(serialize_with = "ser_frac")]
    pub predicted: Rational,
    pub predicted_symbolic: String,
    pub mode: Mode,
    pub rows: Vec<HarnessRow>,
}

impl Harness {
    /// Relative gap of a row estimate against the prediction.
    pub fn relative_gap(&self, est: &Rational) -> Option<Rational> {
        if self.predicted.is_zero() {
            None
        } else {
            Some(crate::rational::abs(&(est / &self.predicted - Rational::one())))
        }
    }
}

fn lcm_upto(k: u32) -> u64 {
    (1..=k as u64).fold(1u64, |a, b| a / num_integer::gcd(a, b) * b)
}

fn difference(values: &[BigInt]) -> BigInt {
    // Σ (-1)^{D-i} C(D,i) f_i
    let dd = values.len() - 1;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let c = crate::rational::binom(dd as i64, i as i64) * v;
            if (dd - i) % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .sum()
}

pub fn leading_coefficient_harness(
    ctx: &HypersurfaceContext,
    kappa: u32,
    m_lo: u64,
    m_hi: u64,
    max_cells: usize,
) -> Result<Harness> {
    if m_lo > m_hi || m_lo == 0 {
        return Err(Error::OutOfRange(format!("empty or non-positive range {m_lo}..{m_hi}")));
    }
    guard("weight", m_hi as u128, max_cells as u128)?;
    let dd = harness_degree(ctx.n, kappa);
    let stride = lcm_upto(kappa);
    let ms: Vec<u64> = (0..=m_hi).collect();
    let chunks: Vec<Result<BigInt>> = ms
        .par_iter()
        .map_init(HashMap::new, |cache, &m| chi_gr(ctx, kappa, m, max_cells, cache))
        .collect();
    let chis: Vec<BigInt> = chunks.into_iter().collect::<Result<_>>()?;
    let fact = Rational::from_integer(factorial(dd as u64));
    let rows = (m_lo..=m_hi)
        .map(|m| {
            let mu = m as usize;
            let unit = (mu >= dd).then(|| {
                Rational::from_integer(difference(&chis[mu - dd..=mu])) / &fact
            });
            let span = dd * stride as usize;
            let strided = (mu >= span).then(|| {
                let vals: Vec<BigInt> = (0..=dd).map(|i| chis[mu - span + i * stride as usize].clone()).collect();
                Rational::from_integer(difference(&vals))
                    / (&fact * Rational::from_integer(BigInt::from(stride).pow(dd as u32)))
            });
            HarnessRow {
                m,
                chi: chis[mu].clone(),
                unit_difference: unit,
                strided_difference: strided,
                ratio: Rational::new(chis[mu].clone(), BigInt::from(m).pow(dd as u32)),
            }
        })
        .collect();
    let poly = predicted_leading_polynomial(ctx.n, kappa);
    Ok(Harness {
        n: ctx.n,
        d: ctx.d,
        kappa,
        degree: dd,
        stride,
        predicted: poly.eval_int(ctx.d),
        predicted_symbolic: poly.to_string(),
        mode: Mode::Exact,
        rows,
    })
}
