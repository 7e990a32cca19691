use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::chern::{total_chern, DegreePolynomial};
use crate::error::{guard, Error, Result};
use crate::rational::{binom, factorial, fmt_frac, int, Rational};
use crate::young::{multiplicity_table, partitions_in_range, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HypersurfaceContext {
    pub n: usize,
    pub d: i64,
}

impl HypersurfaceContext {
    pub fn new(n: usize, d: i64) -> Result<Self> {
        if n == 0 || d < 1 {
            return Err(Error::OutOfRange(format!("n={n}, d={d}")));
        }
        Ok(Self { n, d })
    }

    /// `K_X = O_X(d-n-2)`.
    pub fn canonical_degree(&self) -> i64 {
        self.d - self.n as i64 - 2
    }

    pub fn is_general_type(&self) -> bool {
        self.canonical_degree() >= 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    ProjectiveFormula,
    ExactSequence,
    LineBundle,
    LambdaFormula,
    GiambelliLeading,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyVector {
    /// `h^0, ..., h^top` when known individually.
    pub h: Option<Vec<BigInt>>,
    pub chi: BigInt,
    pub route: Route,
}

impl CohomologyVector {
    fn full(h: Vec<BigInt>, route: Route) -> Self {
        let chi = alternating(&h);
        Self {
            h: Some(h),
            chi,
            route,
        }
    }

    pub fn chi_only(chi: BigInt, route: Route) -> Self {
        Self { h: None, chi, route }
    }

    pub fn get(&self, q: usize) -> Option<&BigInt> {
        self.h.as_ref().and_then(|h| h.get(q))
    }
}

fn alternating(h: &[BigInt]) -> BigInt {
    h.iter()
        .enumerate()
        .fold(BigInt::zero(), |acc, (q, x)| if q % 2 == 0 { acc + x } else { acc - x })
}

impl Serialize for CohomologyVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        if let Some(h) = &self.h {
            let h: Vec<String> = h.iter().map(|x| x.to_string()).collect();
            m.serialize_entry("h", &h)?;
        }
        m.serialize_entry("chi", &self.chi.to_string())?;
        m.serialize_entry("route", &self.route)?;
        m.end()
    }
}

fn superfactorial(k: usize) -> BigInt {
    (1..=k as u64).map(factorial).product()
}

/// `t_i = w_i - i + |w|` for i = 1..=len.
fn shifted_weights(w: &[i64]) -> Vec<i64> {
    let total: i64 = w.iter().sum();
    w.iter()
        .enumerate()
        .map(|(i, &x)| x - (i as i64 + 1) + total)
        .collect()
}

/// χ(P^{n+1}, Ω^{(w)} ⊗ O(t)) for any integer weight w with n+1 parts.
/// Non-dominant weights are allowed; coinciding `t_i` give zero.
pub fn projective_chi(w: &[i64], t: i64) -> BigInt {
    let ts = shifted_weights(w);
    let mut num = BigInt::one();
    for i in 0..ts.len() {
        for j in i + 1..ts.len() {
            num *= ts[i] - ts[j];
        }
    }
    for &ti in &ts {
        num *= t - ti;
    }
    let (q, r) = num.div_rem(&superfactorial(ts.len()));
    debug_assert!(r.is_zero(), "projective chi not integral for {w:?}, t={t}");
    q
}

/// Cohomology of `Ω^{(ℓ)}_{P^{n+1}} ⊗ O(t)`, shape with n+1 parts.
pub fn projective_cohomology(n: usize, shape: &Partition, t: i64) -> Result<CohomologyVector> {
    if shape.rank() != n + 1 {
        return Err(Error::Malformed(format!("{shape} must have {} parts", n + 1)));
    }
    let w: Vec<i64> = shape.parts().iter().map(|&x| x as i64).collect();
    let ts = shifted_weights(&w);
    let chi = projective_chi(&w, t);
    let mut h = vec![BigInt::zero(); n + 2];
    for q in 0..=n + 1 {
        let upper_ok = q == 0 || t < ts[q - 1];
        let lower_ok = q == n + 1 || t > ts[q];
        if upper_ok && lower_ok {
            h[q] = if q % 2 == 0 { chi.clone() } else { -chi.clone() };
        }
    }
    Ok(CohomologyVector::full(h, Route::ProjectiveFormula))
}

fn h0_line(n: usize, d: i64, t: i64) -> BigInt {
    let n = n as i64;
    binom(t + n + 1, n + 1) - binom(t + n + 1 - d, n + 1)
}

pub fn line_bundle_cohomology_x(ctx: &HypersurfaceContext, t: i64) -> CohomologyVector {
    let n = ctx.n;
    let mut h = vec![BigInt::zero(); n + 1];
    h[0] = h0_line(n, ctx.d, t);
    let top = h0_line(n, ctx.d, ctx.canonical_degree() - t);
    if n == 0 {
        h[0] += top;
    } else {
        h[n] = top;
    }
    CohomologyVector::full(h, Route::LineBundle)
}

/// h^0(P^{n+1}, Ω^j(s)).
fn h0_omega_p(n: usize, j: usize, s: i64) -> BigInt {
    let (n, j) = (n as i64, j as i64);
    if j == 0 {
        binom(s + n + 1, n + 1)
    } else {
        binom(s - 1, j) * binom(s + n + 1 - j, n + 1 - j)
    }
}

/// h^0(X, Ω^r_X(t)) for 0 <= r < n.
fn h0_lambda(n: usize, d: i64, r: usize, t: i64) -> BigInt {
    let mut acc = BigInt::zero();
    for k in 0..=r {
        let kk = k as i64;
        let term = h0_omega_p(n, r - k, t - kk * d) - h0_omega_p(n, r - k, t - (kk + 1) * d);
        if k % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    if r > 0 && t == r as i64 * d {
        if r.is_multiple_of(2) {
            acc -= 1;
        } else {
            acc += 1;
        }
    }
    acc
}

/// Cohomology of `Ω^r_X ⊗ O_X(t)`.
pub fn lambda_cohomology_x(ctx: &HypersurfaceContext, r: usize, t: i64) -> Result<CohomologyVector> {
    let (n, d) = (ctx.n, ctx.d);
    if r > n {
        return Err(Error::OutOfRange(format!("r = {r} > n = {n}")));
    }
    if r == 0 {
        return Ok(line_bundle_cohomology_x(ctx, t));
    }
    if r == n {
        return Ok(line_bundle_cohomology_x(ctx, t + ctx.canonical_degree()));
    }
    let mut h = vec![BigInt::zero(); n + 1];
    h[0] = h0_lambda(n, d, r, t);
    h[n] = h0_lambda(n, d, n - r, -t);
    for (q, hq) in h.iter_mut().enumerate().take(n).skip(1) {
        if q + r != n {
            *hq = BigInt::from((q == r && t == 0) as i64);
        }
    }
    let q = n - r;
    let mut mid = BigInt::zero();
    let ni = n as i64;
    for mu in 0..=ni + 2 {
        let term = binom(ni + 2, mu) * binom(-t + r as i64 * d - (mu - 1) * (d - 1), ni + 1);
        if mu % 2 == 0 {
            mid += term;
        } else {
            mid -= term;
        }
    }
    if n == 2 * r && t == 0 {
        mid += 1;
    }
    h[q] = mid;
    Ok(CohomologyVector::full(h, Route::LambdaFormula))
}

/// χ(X, Ω^{(w)}_{P^{n+1}}|_X ⊗ O_X(s)) from the restriction sequence.
fn chi_restricted(w: &[i64], s: i64, d: i64) -> BigInt {
    projective_chi(w, s) - projective_chi(w, s - d)
}

/// χ(X, S^{(ℓ)}T*_X ⊗ O_X(t)) through the conormal resolution.
pub fn chi_schur_exact(ctx: &HypersurfaceContext, shape: &Partition, t: i64) -> Result<BigInt> {
    let n = ctx.n;
    let shape = shape.pad(n)?;
    let parts = shape.parts();
    let ln = parts[n - 1] as i64;
    let tp = t + ln * ctx.canonical_degree();
    let base: Vec<i64> = parts.iter().map(|&x| x as i64 - ln).collect();
    let depth = base.iter().take_while(|&&x| x > 0).count();
    guard("resolution subsets", 1u128 << depth.min(127), 1u128 << 24)?;
    let mut acc = BigInt::zero();
    for mask in 0u64..(1u64 << depth) {
        let k = mask.count_ones() as i64;
        let mut w = base.clone();
        for (i, wi) in w.iter_mut().enumerate().take(depth) {
            if mask >> i & 1 == 1 {
                *wi -= 1;
            }
        }
        w.push(0);
        let c = chi_restricted(&w, tp - k * ctx.d, ctx.d);
        if k % 2 == 0 {
            acc += c;
        } else {
            acc -= c;
        }
    }
    Ok(acc)
}

pub fn chi_schur_vector(ctx: &HypersurfaceContext, shape: &Partition, t: i64) -> Result<CohomologyVector> {
    Ok(CohomologyVector::chi_only(chi_schur_exact(ctx, shape, t)?, Route::ExactSequence))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GiambelliForm {
    /// Rows `ℓ_c` in the determinants: a homogeneous form of degree n(n+1)/2.
    Homogeneous,
    /// Rows `ℓ_c + n - c`, as in the determinantal formula before homogenizing.
    Shifted,
}

fn partitions_of(n: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=max.min(left)).rev() {
            cur.push(p);
            rec(left - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

fn conjugate(p: &[usize]) -> Vec<usize> {
    let w = p.first().copied().unwrap_or(0);
    (1..=w).map(|j| p.iter().filter(|&&x| x >= j).count()).collect()
}

fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i64)>) {
        let k = used.len();
        if cur.len() == k {
            let mut inv = 0;
            for i in 0..k {
                for j in i + 1..k {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), if inv % 2 == 0 { 1 } else { -1 }));
            return;
        }
        for v in 0..k {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// `∫_X s_{ν^c}(c(T_X))` via the Giambelli determinant in the Chern classes.
pub fn giambelli_chern_number(n: usize, nu_conj: &[usize]) -> DegreePolynomial {
    let c = total_chern(n, false);
    let entry = |r: usize, s: usize| -> DegreePolynomial {
        let k = nu_conj.get(r).copied().unwrap_or(0) as i64 - r as i64 + s as i64;
        if k < 0 || k as usize > n {
            DegreePolynomial::zero()
        } else {
            c[k as usize].clone()
        }
    };
    let mut acc = DegreePolynomial::zero();
    for (perm, sign) in permutations(n) {
        let mut term = DegreePolynomial::constant(int(sign));
        for (r, &s) in perm.iter().enumerate() {
            term = &term * &entry(r, s);
            if term.is_zero() {
                break;
            }
        }
        acc = &acc + &term;
    }
    &acc * &DegreePolynomial::d()
}

fn det_rational(m: Vec<Vec<Rational>>) -> Rational {
    crate::delta::det(m)
}

/// Leading part of χ(X, S^{(ℓ)}T*_X) from the Giambelli sum over ν ⊢ n.
pub fn giambelli_chi_leading(ctx: &HypersurfaceContext, shape: &Partition, form: GiambelliForm) -> Result<Rational> {
    let n = ctx.n;
    let shape = shape.pad(n)?;
    let rows: Vec<Rational> = shape
        .parts()
        .iter()
        .enumerate()
        .map(|(c, &l)| match form {
            GiambelliForm::Homogeneous => int(l as i64),
            GiambelliForm::Shifted => int(l as i64 + n as i64 - 1 - c as i64),
        })
        .collect();
    let d = int(ctx.d);
    let mut total = Rational::zero();
    for nu in partitions_of(n) {
        let mut nu_p = nu.clone();
        nu_p.resize(n, 0);
        let exps: Vec<u32> = (0..n).map(|r| (nu_p[r] + n - 1 - r) as u32).collect();
        let denom: BigInt = exps.iter().map(|&e| factorial(e as u64)).product();
        let chern = giambelli_chern_number(n, &conjugate(&nu)).eval(&d);
        if chern.is_zero() {
            continue;
        }
        let m: Vec<Vec<Rational>> = exps
            .iter()
            .map(|&e| rows.iter().map(|x| crate::rational::pow_i(x, e)).collect())
            .collect();
        total += chern * det_rational(m) / Rational::from_integer(denom);
    }
    Ok(if n % 2 == 1 { -total } else { total })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vanishing {
    pub vanishes: bool,
    pub threshold: Rational,
}

/// Sufficient condition on `ℓ_n` for all positive cohomology of `S^{(ℓ)}T*_X` to vanish.
pub fn vanishing_threshold(ctx: &HypersurfaceContext, shape: &Partition) -> Result<Vanishing> {
    if !ctx.is_general_type() {
        return Err(Error::NotGeneralType { n: ctx.n, d: ctx.d });
    }
    let n = ctx.n;
    let shape = shape.pad(n)?;
    let l: Vec<i64> = shape.parts().iter().map(|&x| x as i64).collect();
    let ln = l[n - 1];
    let spread: i64 = l[..n - 1].iter().map(|&x| x - ln).sum();
    let num = n as i64 * (ctx.d - 1) + (l[0] - ln) + spread;
    let threshold = Rational::new(BigInt::from(num), BigInt::from(ctx.canonical_degree()));
    let vanishes = ln >= 1 && int(ln) >= threshold;
    Ok(Vanishing { vanishes, threshold })
}

/// Alternating-χ upper bound for h^q(X, S^{(ℓ)}T*_X).
pub fn hq_majorant(ctx: &HypersurfaceContext, shape: &Partition, q: usize) -> Result<BigInt> {
    let n = ctx.n as i64;
    let size = shape.size() as i64;
    let need = 1 + 2 * n * n + (n + 1) * ctx.canonical_degree();
    if size < need {
        return Err(Error::HypothesisNotMet(format!("|l| = {size} < {need}")));
    }
    let mut acc = BigInt::zero();
    for j in 0..=q {
        let twist = 3 * (q + 1 - j) as i64 * size;
        let term = binom(q as i64, j as i64) * chi_schur_exact(ctx, shape, twist)?;
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingEntry {
    pub partition: Partition,
    pub mult: u128,
    pub chi: BigInt,
    pub vanishes: bool,
    pub threshold: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H0Report {
    pub ctx: HypersurfaceContext,
    pub kappa: u32,
    pub m: u64,
    pub chi_gr: BigInt,
    pub vanishing: Vec<VanishingEntry>,
    /// `∫ (c_1^*)^n = d(d-n-2)^n`.
    pub leading_coefficient: Rational,
    pub general_type: bool,
}

impl H0Report {
    /// The asymptotic h^0 minorant has a positive leading coefficient.
    pub fn leading_positive(&self) -> bool {
        self.general_type && self.leading_coefficient.is_positive()
    }
}

impl Serialize for H0Report {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Ctx {
            n: usize,
            d: i64,
        }
        #[derive(Serialize)]
        struct V<'a> {
            partition: &'a Partition,
            mult: u64,
            chi: String,
            vanishes: bool,
            threshold: String,
        }
        let v: Vec<V> = self
            .vanishing
            .iter()
            .map(|e| V {
                partition: &e.partition,
                mult: e.mult as u64,
                chi: e.chi.to_string(),
                vanishes: e.vanishes,
                threshold: fmt_frac(&e.threshold),
            })
            .collect();
        let mut m = s.serialize_map(None)?;
        m.serialize_entry(
            "context",
            &Ctx {
                n: self.ctx.n,
                d: self.ctx.d,
            },
        )?;
        m.serialize_entry("kappa", &self.kappa)?;
        m.serialize_entry("m", &self.m)?;
        m.serialize_entry("chi_gr", &self.chi_gr.to_string())?;
        m.serialize_entry("vanishing", &v)?;
        m.serialize_entry("leading_coefficient_symbolic", LEADING_SYMBOLIC)?;
        m.serialize_entry("leading_coefficient", &fmt_frac(&self.leading_coefficient))?;
        m.serialize_entry("leading_positive", &self.leading_positive())?;
        m.serialize_entry("general_type", &self.general_type)?;
        m.end()
    }
}

pub const LEADING_SYMBOLIC: &str = "d(d-n-2)^n (log k)^n / n!";

/// χ of the graded jet bundle plus the vanishing status of every Schur summand.
pub fn h0_report(ctx: &HypersurfaceContext, kappa: u32, m: u64, max_cells: usize) -> Result<H0Report> {
    let table = multiplicity_table(ctx.n, kappa, m, max_cells)?;
    let general_type = ctx.is_general_type();
    let mut chi_gr = BigInt::zero();
    let mut vanishing = Vec::new();
    for (p, mult) in table.sorted() {
        let chi = chi_schur_exact(ctx, p, 0)?;
        chi_gr += &chi * BigInt::from(mult);
        if general_type {
            let v = vanishing_threshold(ctx, p)?;
            vanishing.push(VanishingEntry {
                partition: p.clone(),
                mult,
                chi,
                vanishes: v.vanishes,
                threshold: v.threshold,
            });
        }
    }
    let leading = int(ctx.d) * crate::rational::pow_i(&int(ctx.canonical_degree()), ctx.n as u32);
    Ok(H0Report {
        ctx: *ctx,
        kappa,
        m,
        chi_gr,
        vanishing,
        leading_coefficient: leading,
        general_type,
    })
}

/// Every partition of depth ≤ n and size ≤ max_size (used by vanishing sweeps).
pub fn shapes_up_to(n: usize, max_size: u64) -> Vec<Partition> {
    partitions_in_range(n, 0, max_size)
}
