use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{guard, Error, Result};
use crate::rational::{binom, factorial, Rational};
use crate::young::{multiplicity_table, schur_rank, MultiplicityTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct JetConfig {
    pub n: usize,
    pub kappa: u32,
    pub m: u64,
}

impl JetConfig {
    pub fn new(n: usize, kappa: u32, m: u64) -> Result<Self> {
        if n == 0 || kappa == 0 || m == 0 {
            return Err(Error::OutOfRange(format!("n={n}, kappa={kappa}, m={m} must be positive")));
        }
        Ok(Self { n, kappa, m })
    }
}

/// Rank of the jet bundle: coefficient of x^m in ∏_{λ≤κ} (1-x^λ)^{-n}.
pub fn gg_rank(cfg: &JetConfig, max_weight: u64) -> Result<BigInt> {
    guard("weight", cfg.m as u128, max_weight as u128)?;
    let m = cfg.m as usize;
    let n = cfg.n as i64;
    let mut series = vec![BigInt::zero(); m + 1];
    series[0] = BigInt::one();
    for lam in 1..=cfg.kappa as usize {
        let factor: Vec<BigInt> = (0..=m / lam).map(|k| binom(k as i64 + n - 1, n - 1)).collect();
        let mut next = vec![BigInt::zero(); m + 1];
        for (i, a) in series.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, f) in factor.iter().enumerate() {
                let e = i + k * lam;
                if e > m {
                    break;
                }
                next[e] += a * f;
            }
        }
        series = next;
    }
    Ok(series.swap_remove(m))
}

/// Exponent vectors `(l_1, ..., l_κ)` with `l_1 + 2 l_2 + ... + κ l_κ = m`,
/// lexicographically descending.
pub fn graded_components(kappa: u32, m: u64) -> Vec<Vec<u32>> {
    fn rec(i: u32, kappa: u32, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i > kappa {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if i == kappa {
            if left.is_multiple_of(i as u64) {
                cur.push((left / i as u64) as u32);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for l in (0..=left / i as u64).rev() {
            cur.push(l as u32);
            rec(i + 1, kappa, left - l * i as u64, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, kappa, m, &mut Vec::new(), &mut out);
    out
}

/// Rank of one graded piece `Sym^{l_1} ⊗ ... ⊗ Sym^{l_κ}` of a rank-n bundle.
pub fn component_rank(component: &[u32], n: usize) -> BigInt {
    component
        .iter()
        .map(|&l| binom(l as i64 + n as i64 - 1, n as i64 - 1))
        .product()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrDecomposition {
    pub table: MultiplicityTable,
    pub rank: BigInt,
}

impl Serialize for GrDecomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = serde_json::to_value(&self.table).map_err(serde::ser::Error::custom)?;
        let obj = v.as_object().expect("table serializes to an object");
        let mut map = s.serialize_map(Some(obj.len() + 1))?;
        for (k, v) in obj {
            map.serialize_entry(k, v)?;
        }
        map.serialize_entry("rank", &self.rank.to_string())?;
        map.end()
    }
}

pub fn gr_schur_decomposition(cfg: &JetConfig, max_cells: usize) -> Result<GrDecomposition> {
    let table = multiplicity_table(cfg.n, cfg.kappa, cfg.m, max_cells)?;
    let mut rank = BigInt::zero();
    for (p, &c) in &table.entries {
        rank += schur_rank(p, cfg.n)? * BigInt::from(c);
    }
    Ok(GrDecomposition { table, rank })
}

/// One summand of the Faà di Bruno formula: derivative orders `τ_c` with multiplicities `μ_c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FaaDiBrunoTerm {
    pub coefficient: BigInt,
    pub blocks: Vec<(u32, u32)>,
}

impl Serialize for FaaDiBrunoTerm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("coefficient", &self.coefficient.to_string())?;
        map.serialize_entry("blocks", &self.blocks)?;
        map.end()
    }
}

impl FaaDiBrunoTerm {
    pub fn order(&self) -> u32 {
        self.blocks.iter().map(|&(_, mu)| mu).sum()
    }
}

pub fn faa_di_bruno(lambda: u32) -> Result<Vec<FaaDiBrunoTerm>> {
    if lambda < 1 {
        return Err(Error::OutOfRange("jet level must be >= 1".into()));
    }
    // partitions of λ, largest part first
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
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
    let mut parts = Vec::new();
    rec(lambda, lambda, &mut Vec::new(), &mut parts);
    let top = factorial(lambda as u64);
    Ok(parts
        .into_iter()
        .map(|p| {
            let mut blocks: Vec<(u32, u32)> = Vec::new();
            for &t in p.iter().rev() {
                match blocks.last_mut() {
                    Some((tau, mu)) if *tau == t => *mu += 1,
                    _ => blocks.push((t, 1)),
                }
            }
            let denom: BigInt = blocks
                .iter()
                .map(|&(tau, mu)| factorial(tau as u64).pow(mu) * factorial(mu as u64))
                .product();
            FaaDiBrunoTerm {
                coefficient: &top / denom,
                blocks,
            }
        })
        .collect())
}

/// Evaluates `(Ψ∘f)^{(λ)}` from the terms, summing over coordinate indices.
/// `partial(e)` is `∂^{|e|}Ψ/∂x^e` at `f(ζ₀)`, `deriv(i, k)` is `f_i^{(k)}(ζ₀)`.
pub fn faa_di_bruno_apply(
    terms: &[FaaDiBrunoTerm],
    n: usize,
    partial: impl Fn(&[u32]) -> Rational,
    deriv: impl Fn(usize, u32) -> Rational,
) -> Rational {
    let mut total = Rational::zero();
    for term in terms {
        let orders: Vec<u32> = term
            .blocks
            .iter()
            .flat_map(|&(tau, mu)| std::iter::repeat_n(tau, mu as usize))
            .collect();
        let slots = orders.len();
        let mut idx = vec![0usize; slots];
        let mut inner = Rational::zero();
        loop {
            let mut e = vec![0u32; n];
            let mut prod = Rational::one();
            for (s, &i) in idx.iter().enumerate() {
                e[i] += 1;
                prod *= deriv(i, orders[s]);
            }
            inner += partial(&e) * prod;
            // odometer over n^slots index choices
            let mut s = 0;
            while s < slots {
                idx[s] += 1;
                if idx[s] < n {
                    break;
                }
                idx[s] = 0;
                s += 1;
            }
            if s == slots {
                break;
            }
        }
        total += Rational::from_integer(term.coefficient.clone()) * inner;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: u32, m: u64) -> JetConfig {
        JetConfig::new(n, k, m).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(gg_rank(&cfg(1, 2, 3), 1000).unwrap(), BigInt::from(2));
        assert_eq!(gg_rank(&cfg(2, 1, 2), 1000).unwrap(), BigInt::from(3));
        assert_eq!(gg_rank(&cfg(1, 1, 7), 1000).unwrap(), BigInt::from(1));
        assert!(gg_rank(&cfg(1, 1, 7), 5).is_err());
    }

    #[test]
    fn components() {
        assert_eq!(graded_components(2, 2), vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(graded_components(1, 5), vec![vec![5]]);
        assert_eq!(
            graded_components(3, 3),
            vec![vec![3, 0, 0], vec![1, 1, 0], vec![0, 0, 1]]
        );
    }

    #[test]
    fn decomposition_rank() {
        let g = gr_schur_decomposition(&cfg(2, 2, 2), 100).unwrap();
        assert_eq!(g.rank, BigInt::from(5));
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v["rank"], "5");
        assert_eq!(v["n"], 2);
    }

    #[test]
    fn faa_terms() {
        let t = faa_di_bruno(1).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].blocks, vec![(1, 1)]);
        let t = faa_di_bruno(2).unwrap();
        assert_eq!(t[0].blocks, vec![(2, 1)]);
        assert_eq!(t[1].blocks, vec![(1, 2)]);
        assert!(t.iter().all(|x| x.coefficient == BigInt::one()));
        let t = faa_di_bruno(3).unwrap();
        let mixed = t.iter().find(|x| x.blocks == vec![(1, 1), (2, 1)]).unwrap();
        assert_eq!(mixed.coefficient, BigInt::from(3));
        assert!(faa_di_bruno(0).is_err());
    }

    #[test]
    fn faa_coefficients_count_set_partitions() {
        // summing the coefficients gives the Bell numbers
        let bell = [1, 2, 5, 15, 52, 203];
        for (l, &b) in (1..=6).zip(&bell) {
            let s: BigInt = faa_di_bruno(l).unwrap().iter().map(|t| t.coefficient.clone()).sum();
            assert_eq!(s, BigInt::from(b));
        }
    }
}
