use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::young::{column_contents, enumerate_ssyt, partitions_in_range};

/// Jet determinant `Δ^{λ_1,...,λ_i}_{1,...,i}`, rows kept strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeltaDeterminant {
    orders: Vec<u32>,
}

impl DeltaDeterminant {
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        if orders.is_empty() || orders.windows(2).any(|w| w[0] >= w[1]) || orders[0] == 0 {
            return Err(Error::Malformed(format!("orders {orders:?} must be strictly increasing and >= 1")));
        }
        Ok(Self { orders })
    }

    /// Sorts arbitrary rows, returning the sign picked up, or `None` on a repeated row.
    pub fn canonical(mut rows: Vec<u32>) -> Option<(i64, Self)> {
        let mut sign = 1;
        for i in 1..rows.len() {
            let mut k = i;
            while k > 0 && rows[k - 1] > rows[k] {
                rows.swap(k - 1, k);
                sign = -sign;
                k -= 1;
            }
        }
        if rows.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((sign, Self { orders: rows }))
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn depth(&self) -> usize {
        self.orders.len()
    }

    pub fn weight(&self) -> u64 {
        self.orders.iter().map(|&o| o as u64).sum()
    }
}

impl fmt::Display for DeltaDeterminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.orders.iter().map(|o| o.to_string()).collect();
        write!(f, "D[{}]", s.join(","))
    }
}

impl Serialize for DeltaDeterminant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("depth", &self.depth())?;
        m.serialize_entry("orders", &self.orders)?;
        m.end()
    }
}

/// Values `f_i^{(λ)}`, stored as `values[λ-1][i-1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPoint {
    pub n: usize,
    pub kappa: u32,
    values: Vec<Vec<Rational>>,
}

impl JetPoint {
    pub fn from_fn(n: usize, kappa: u32, mut f: impl FnMut(usize, u32) -> Rational) -> Self {
        let values = (1..=kappa)
            .map(|lam| (1..=n).map(|i| f(i, lam)).collect())
            .collect();
        Self { n, kappa, values }
    }

    pub fn value(&self, i: usize, lam: u32) -> &Rational {
        &self.values[lam as usize - 1][i - 1]
    }
}

pub fn det(mut a: Vec<Vec<Rational>>) -> Rational {
    let k = a.len();
    let mut acc = Rational::one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            acc = -acc;
        }
        let piv = a[c][c].clone();
        acc *= &piv;
        for r in c + 1..k {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for cc in c..k {
                let v = &f * &a[c][cc];
                a[r][cc] -= v;
            }
        }
    }
    acc
}

pub fn delta_eval(d: &DeltaDeterminant, p: &JetPoint) -> Result<Rational> {
    let i = d.depth();
    if i > p.n {
        return Err(Error::OutOfRange(format!("depth {i} exceeds n = {}", p.n)));
    }
    if let Some(&o) = d.orders.iter().find(|&&o| o > p.kappa) {
        return Err(Error::OutOfRange(format!("order {o} exceeds kappa = {}", p.kappa)));
    }
    let rows = d
        .orders
        .iter()
        .map(|&lam| (1..=i).map(|c| p.value(c, lam).clone()).collect())
        .collect();
    Ok(det(rows))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneOrder {
    Less,
    Greater,
    Equal,
    Incomparable,
}

fn one_less(a: &DeltaDeterminant, b: &DeltaDeterminant) -> bool {
    a.depth() >= b.depth() && b.orders.iter().zip(&a.orders).all(|(m, l)| l <= m)
}

pub fn compare_one(a: &DeltaDeterminant, b: &DeltaDeterminant) -> OneOrder {
    if a == b {
        return OneOrder::Equal;
    }
    match (one_less(a, b), one_less(b, a)) {
        (true, _) => OneOrder::Less,
        (_, true) => OneOrder::Greater,
        _ => OneOrder::Incomparable,
    }
}

/// Total order extending the partial one: deeper first, then lexicographic.
pub fn compare_two(a: &DeltaDeterminant, b: &DeltaDeterminant) -> Ordering {
    b.depth().cmp(&a.depth()).then_with(|| a.orders.cmp(&b.orders))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlueckerRelation {
    /// The normalized incomparable pair `(deeper, shallower)` the relation is attached to.
    pub pair: (DeltaDeterminant, DeltaDeterminant),
    /// Canonical products (factor pair sorted) with their integer coefficients.
    pub terms: BTreeMap<(DeltaDeterminant, DeltaDeterminant), i64>,
}

fn product_key(a: DeltaDeterminant, b: DeltaDeterminant) -> (DeltaDeterminant, DeltaDeterminant) {
    if compare_two(&a, &b) == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

pub fn pluecker_relation(a: &DeltaDeterminant, b: &DeltaDeterminant) -> Result<PlueckerRelation> {
    if compare_one(a, b) != OneOrder::Incomparable {
        return Err(Error::Comparable);
    }
    let (big, small) = if a.depth() > b.depth() || (a.depth() == b.depth() && a.orders < b.orders) {
        (a, b)
    } else {
        (b, a)
    };
    let lam = &big.orders;
    let mu = &small.orders;
    let i = lam.len();
    let t = (0..mu.len())
        .find(|&r| lam[r] > mu[r])
        .expect("incomparable pair has a pivot");
    // moving entries: μ_1..μ_t then λ_t..λ_i (0-based t here)
    let moving: Vec<u32> = mu[..=t].iter().chain(&lam[t..]).copied().collect();
    let k = t + 1;
    let mut terms: BTreeMap<_, i64> = BTreeMap::new();
    for subset in subsets(i + 1, k) {
        let shuffle_sign = if (subset.iter().sum::<usize>() + k * (k - 1) / 2) % 2 == 0 {
            1
        } else {
            -1
        };
        let mut rest = Vec::with_capacity(i + 1 - k);
        let mut chosen = Vec::with_capacity(k);
        for (pos, &v) in moving.iter().enumerate() {
            if subset.contains(&pos) {
                chosen.push(v);
            } else {
                rest.push(v);
            }
        }
        let left: Vec<u32> = lam[..t].iter().copied().chain(rest).collect();
        let right: Vec<u32> = chosen.into_iter().chain(mu[k..].iter().copied()).collect();
        let (Some((s1, d1)), Some((s2, d2))) = (DeltaDeterminant::canonical(left), DeltaDeterminant::canonical(right))
        else {
            continue;
        };
        *terms.entry(product_key(d1, d2)).or_insert(0) += shuffle_sign * s1 * s2;
    }
    terms.retain(|_, c| *c != 0);
    Ok(PlueckerRelation {
        pair: (big.clone(), small.clone()),
        terms,
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl PlueckerRelation {
    pub fn eval(&self, p: &JetPoint) -> Result<Rational> {
        let mut acc = Rational::zero();
        for ((a, b), &c) in &self.terms {
            acc += delta_eval(a, p)? * delta_eval(b, p)? * Rational::from_integer(BigInt::from(c));
        }
        Ok(acc)
    }

    /// Largest product under the reverse-lexicographic term order induced by `compare_two`.
    pub fn leading_monomial(&self) -> Option<&(DeltaDeterminant, DeltaDeterminant)> {
        self.terms.keys().max_by(|x, y| revlex_cmp(x, y))
    }
}

/// Reverse lexicographic comparison of two quadratic monomials.
pub fn revlex_cmp(
    x: &(DeltaDeterminant, DeltaDeterminant),
    y: &(DeltaDeterminant, DeltaDeterminant),
) -> Ordering {
    let mut vars: Vec<&DeltaDeterminant> = vec![&x.0, &x.1, &y.0, &y.1];
    vars.sort_by(|a, b| compare_two(a, b));
    vars.dedup();
    let exp = |m: &(DeltaDeterminant, DeltaDeterminant), v: &DeltaDeterminant| {
        (m.0 == *v) as i32 + (m.1 == *v) as i32
    };
    for v in vars.iter().rev() {
        let (ex, ey) = (exp(x, v), exp(y, v));
        if ex != ey {
            // a larger exponent in the largest differing variable means smaller
            return ey.cmp(&ex);
        }
    }
    Ordering::Equal
}

impl Serialize for PlueckerRelation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            sign: i64,
            factors: [&'a DeltaDeterminant; 2],
        }
        let mut out = Vec::new();
        for ((a, b), &c) in &self.terms {
            for _ in 0..c.unsigned_abs() {
                out.push(Term {
                    sign: c.signum(),
                    factors: [a, b],
                });
            }
        }
        out.serialize(s)
    }
}

pub fn all_determinants(n: usize, kappa: u32) -> Vec<DeltaDeterminant> {
    (1..=n.min(kappa as usize))
        .flat_map(|i| column_contents(i, kappa))
        .map(|orders| DeltaDeterminant { orders })
        .collect()
}

/// One relation per unordered incomparable pair.
pub fn all_relations(n: usize, kappa: u32) -> Vec<PlueckerRelation> {
    let dets = all_determinants(n, kappa);
    let mut out = Vec::new();
    for (x, a) in dets.iter().enumerate() {
        for b in &dets[x + 1..] {
            if compare_one(a, b) == OneOrder::Incomparable {
                out.push(pluecker_relation(a, b).expect("pair is incomparable"));
            }
        }
    }
    out
}

/// Semi-standard Δ-monomials of weight m: one per tableau, one determinant per column.
pub fn ssyt_monomials(n: usize, kappa: u32, m: u64) -> Vec<Vec<DeltaDeterminant>> {
    let mut out = Vec::new();
    for shape in partitions_in_range(n, 1, m) {
        for t in enumerate_ssyt(&shape, kappa, m) {
            out.push(
                t.columns()
                    .into_iter()
                    .map(|orders| DeltaDeterminant { orders })
                    .collect(),
            );
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub monomials: Vec<Vec<DeltaDeterminant>>,
    /// `rows[s][c]` is monomial c evaluated at sample s.
    pub rows: Vec<Vec<Rational>>,
    pub rank: usize,
}

pub fn ssyt_monomial_matrix(n: usize, kappa: u32, m: u64, points: &[JetPoint]) -> Result<MonomialMatrix> {
    let monomials = ssyt_monomials(n, kappa, m);
    if points.len() < monomials.len() {
        return Err(Error::InsufficientSamples {
            need: monomials.len(),
            got: points.len(),
        });
    }
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        let mut cache: BTreeMap<&DeltaDeterminant, Rational> = BTreeMap::new();
        let mut row = Vec::with_capacity(monomials.len());
        for mono in &monomials {
            let mut v = Rational::one();
            for d in mono {
                if !cache.contains_key(d) {
                    cache.insert(d, delta_eval(d, p)?);
                }
                v *= &cache[d];
            }
            row.push(v);
        }
        rows.push(row);
    }
    let rank = rank(&rows);
    Ok(MonomialMatrix {
        monomials,
        rows,
        rank,
    })
}

/// Exact rank: rows are cleared of denominators, then Bareiss fraction-free elimination.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            r.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
        })
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}
