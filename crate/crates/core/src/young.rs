use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{guard, Error, Result};
use crate::rational::{factorial, Rational};

/// Row lengths, padded with zeros to the ambient rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(mut parts: Vec<u32>, rank: usize) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Malformed(format!("{parts:?} is not weakly decreasing")));
        }
        while parts.len() > rank && parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.len() > rank {
            return Err(Error::OutOfRange(format!("{parts:?} has depth > {rank}")));
        }
        parts.resize(rank, 0);
        Ok(Self { parts })
    }

    pub fn empty(rank: usize) -> Self {
        Self {
            parts: vec![0; rank],
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn rank(&self) -> usize {
        self.parts.len()
    }

    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Number of nonzero rows.
    pub fn depth(&self) -> usize {
        self.parts.iter().take_while(|&&p| p > 0).count()
    }

    /// Column lengths `d_1 >= d_2 >= ...`.
    pub fn columns(&self) -> Vec<u32> {
        let width = self.parts.first().copied().unwrap_or(0);
        (1..=width)
            .map(|j| self.parts.iter().take_while(|&&p| p >= j).count() as u32)
            .collect()
    }

    pub fn pad(&self, rank: usize) -> Result<Self> {
        Self::new(self.parts.clone(), rank)
    }

    pub fn is_constant(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

/// A filling stored row by row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tableau {
    pub rows: Vec<Vec<u32>>,
}

impl Tableau {
    pub fn shape(&self, rank: usize) -> Result<Partition> {
        Partition::new(self.rows.iter().map(|r| r.len() as u32).collect(), rank)
    }

    pub fn weight(&self) -> u64 {
        self.rows.iter().flatten().map(|&e| e as u64).sum()
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        self.rows
            .iter()
            .take_while(|r| r.len() > j)
            .map(|r| r[j])
            .collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        let width = self.rows.first().map_or(0, |r| r.len());
        (0..width).map(|j| self.column(j)).collect()
    }

    pub fn from_columns(cols: &[Vec<u32>]) -> Self {
        let depth = cols.first().map_or(0, |c| c.len());
        let rows = (0..depth)
            .map(|i| cols.iter().filter(|c| c.len() > i).map(|c| c[i]).collect())
            .collect();
        Self { rows }
    }

    pub fn is_semistandard(&self, kappa: u32) -> bool {
        let rows_ok = self.rows.windows(2).all(|w| w[0].len() >= w[1].len())
            && self.rows.iter().all(|r| {
                r.windows(2).all(|w| w[0] <= w[1]) && r.iter().all(|&e| e >= 1 && e <= kappa)
            });
        rows_ok
            && self
                .columns()
                .iter()
                .all(|c| c.windows(2).all(|w| w[0] < w[1]))
    }
}

/// Strictly increasing columns of a given length with entries in 1..=κ.
pub(crate) fn column_contents(len: usize, kappa: u32) -> Vec<Vec<u32>> {
    fn rec(start: u32, kappa: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..=kappa {
            if (kappa - v + 1) as usize >= left {
                cur.push(v);
                rec(v + 1, kappa, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(1, kappa, len, &mut Vec::new(), &mut out);
    out
}

fn row_compatible(left: &[u32], right: &[u32]) -> bool {
    right.iter().zip(left).all(|(r, l)| r >= l)
}

/// Number of semi-standard fillings of `shape` with entries in 1..=κ summing to m.
pub fn count_ssyt(shape: &Partition, kappa: u32, m: u64) -> u128 {
    let cols = shape.columns();
    if cols.is_empty() {
        return u128::from(m == 0);
    }
    if kappa == 0 || cols[0] as u64 > kappa as u64 {
        return 0;
    }
    let m = m as usize;
    let weight = |c: &[u32]| c.iter().map(|&e| e as usize).sum::<usize>();
    let mut prev_cols = column_contents(cols[0] as usize, kappa);
    let mut dp: Vec<Vec<u128>> = prev_cols
        .iter()
        .map(|c| {
            let mut v = vec![0u128; m + 1];
            let w = weight(c);
            if w <= m {
                v[w] = 1;
            }
            v
        })
        .collect();
    for &len in &cols[1..] {
        let next_cols = column_contents(len as usize, kappa);
        let mut next = vec![vec![0u128; m + 1]; next_cols.len()];
        for (b, nc) in next_cols.iter().enumerate() {
            let w = weight(nc);
            if w > m {
                continue;
            }
            for (a, pc) in prev_cols.iter().enumerate() {
                if !row_compatible(pc, nc) {
                    continue;
                }
                for s in 0..=(m - w) {
                    let x = dp[a][s];
                    if x != 0 {
                        next[b][s + w] = next[b][s + w].checked_add(x).expect("tableau count overflow");
                    }
                }
            }
        }
        prev_cols = next_cols;
        dp = next;
    }
    dp.iter().map(|v| v[m]).sum()
}

/// Every semi-standard filling of `shape` with entries ≤ κ and weight m.
pub fn enumerate_ssyt(shape: &Partition, kappa: u32, m: u64) -> Vec<Tableau> {
    let cols = shape.columns();
    let mut out = Vec::new();
    if cols.is_empty() {
        if m == 0 {
            out.push(Tableau { rows: Vec::new() });
        }
        return out;
    }
    // max remaining weight per column count lets us prune
    let contents: Vec<Vec<Vec<u32>>> = cols
        .iter()
        .map(|&l| column_contents(l as usize, kappa))
        .collect();
    fn rec(
        j: usize,
        contents: &[Vec<Vec<u32>>],
        left: i64,
        cur: &mut Vec<Vec<u32>>,
        out: &mut Vec<Tableau>,
    ) {
        if j == contents.len() {
            if left == 0 {
                out.push(Tableau::from_columns(cur));
            }
            return;
        }
        for c in &contents[j] {
            if let Some(p) = cur.last() {
                if !row_compatible(p, c) {
                    continue;
                }
            }
            let w: i64 = c.iter().map(|&e| e as i64).sum();
            // columns further right weigh at least as much as their row-minimum
            let rest_min: i64 = contents[j + 1..]
                .iter()
                .map(|cs| c[..cs[0].len()].iter().map(|&e| e as i64).sum::<i64>())
                .sum();
            if w + rest_min > left {
                continue;
            }
            cur.push(c.clone());
            rec(j + 1, contents, left - w, cur, out);
            cur.pop();
        }
    }
    rec(0, &contents, m as i64, &mut Vec::new(), &mut out);
    out
}

/// All partitions of depth ≤ rank with size between lo and hi, lexicographically descending.
pub fn partitions_in_range(rank: usize, lo: u64, hi: u64) -> Vec<Partition> {
    fn rec(rank: usize, max: u32, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == rank {
            out.push(cur.clone());
            return;
        }
        let top = (max as u64).min(left) as u32;
        for p in (0..=top).rev() {
            cur.push(p);
            rec(rank, p, left - p as u64, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(rank, hi as u32, hi, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .filter(|p| {
            let s: u64 = p.iter().map(|&x| x as u64).sum();
            s >= lo && s <= hi
        })
        .map(|p| Partition { parts: p })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityTable {
    pub n: usize,
    pub kappa: u32,
    pub m: u64,
    pub entries: BTreeMap<Partition, u128>,
}

impl MultiplicityTable {
    /// Entries in lexicographically descending order of the partition.
    pub fn sorted(&self) -> Vec<(&Partition, u128)> {
        self.entries.iter().rev().map(|(p, &c)| (p, c)).collect()
    }

    pub fn total(&self) -> u128 {
        self.entries.values().sum()
    }

    pub fn get(&self, p: &[u32]) -> u128 {
        Partition::new(p.to_vec(), self.n)
            .ok()
            .and_then(|p| self.entries.get(&p).copied())
            .unwrap_or(0)
    }
}

struct Entry<'a>(&'a Partition, u128);

impl Serialize for Entry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(2))?;
        m.serialize_entry("partition", self.0)?;
        m.serialize_entry("mult", &(self.1 as u64))?;
        m.end()
    }
}

impl Serialize for MultiplicityTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Entry> = self.sorted().into_iter().map(|(p, c)| Entry(p, c)).collect();
        let mut st = s.serialize_struct("MultiplicityTable", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("kappa", &self.kappa)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

pub fn multiplicity_table(n: usize, kappa: u32, m: u64, max_cells: usize) -> Result<MultiplicityTable> {
    if n == 0 || kappa == 0 || m == 0 {
        return Err(Error::OutOfRange(format!("n={n}, kappa={kappa}, m={m} must be positive")));
    }
    guard("cells", m as u128, max_cells as u128)?;
    let lo = m.div_ceil(kappa as u64);
    let mut entries = BTreeMap::new();
    for p in partitions_in_range(n, lo, m) {
        if p.depth() as u32 > kappa {
            continue;
        }
        let c = count_ssyt(&p, kappa, m);
        if c > 0 {
            entries.insert(p, c);
        }
    }
    Ok(MultiplicityTable {
        n,
        kappa,
        m,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HookData {
    /// `hooks[i][j]` for the cell in row i, column j.
    pub hooks: Vec<Vec<u32>>,
    pub standard_count: BigInt,
}

pub fn hook_data(shape: &Partition) -> Result<HookData> {
    if shape.size() == 0 {
        return Err(Error::Malformed("empty shape".into()));
    }
    let cols = shape.columns();
    let mut prod = BigInt::one();
    let hooks: Vec<Vec<u32>> = shape.parts()[..shape.depth()]
        .iter()
        .enumerate()
        .map(|(i, &li)| {
            (0..li as usize)
                .map(|j| {
                    let h = li - j as u32 + cols[j] - i as u32 - 1;
                    prod *= h;
                    h
                })
                .collect()
        })
        .collect();
    let standard_count = factorial(shape.size()) / prod;
    Ok(HookData {
        hooks,
        standard_count,
    })
}

/// Rank of the Schur bundle of a rank-n bundle.
pub fn schur_rank(shape: &Partition, n: usize) -> Result<BigInt> {
    if shape.depth() > n {
        return Err(Error::OutOfRange(format!("{shape} has depth > {n}")));
    }
    let l = shape.pad(n)?;
    let l = l.parts();
    let mut acc = Rational::one();
    for i in 0..n {
        for j in i + 1..n {
            let gap = (j - i) as i64;
            acc *= Rational::new(BigInt::from(l[i] as i64 - l[j] as i64 + gap), BigInt::from(gap));
        }
    }
    debug_assert!(acc.is_integer());
    Ok(acc.to_integer())
}

/// Irreducible constituents of `S^shape ⊗ Sym^l` for a rank-n bundle.
pub fn pieri(shape: &Partition, l: u32, n: usize) -> Result<Vec<Partition>> {
    let t = shape.pad(n)?;
    let t = t.parts().to_vec();
    let target = t.iter().sum::<u32>() + l;
    let mut out = Vec::new();
    fn rec(i: usize, t: &[u32], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if i == t.len() {
            if left == 0 {
                out.push(Partition { parts: cur.clone() });
            }
            return;
        }
        let hi = if i == 0 { t[0] + left } else { t[i - 1] };
        // the remaining rows can absorb at most sum of (t[k-1] - t[k]) for k > i
        let room: u32 = (i + 1..t.len()).map(|k| t[k - 1] - t[k]).sum();
        for s in (t[i]..=hi.min(t[i] + left)).rev() {
            let used = s - t[i];
            if left - used > room {
                continue;
            }
            cur.push(s);
            rec(i + 1, t, left - used, cur, out);
            cur.pop();
        }
    }
    rec(0, &t, target - t.iter().sum::<u32>(), &mut Vec::new(), &mut out);
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

pub type Multiset = BTreeMap<Partition, u128>;

/// `Sym^{l_1} ⊗ ... ⊗ Sym^{l_κ}` decomposed by iterated Pieri.
pub fn sym_tensor_schur_decompose(composition: &[u32], n: usize) -> Result<Multiset> {
    let mut cur: Multiset = BTreeMap::new();
    cur.insert(Partition::empty(n), 1);
    for &l in composition {
        let mut next = BTreeMap::new();
        for (p, c) in &cur {
            for q in pieri(p, l, n)? {
                *next.entry(q).or_insert(0) += c;
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32], n: usize) -> Partition {
        Partition::new(v.to_vec(), n).unwrap()
    }

    #[test]
    fn spec_counts() {
        assert_eq!(count_ssyt(&p(&[2], 1), 2, 3), 1);
        assert_eq!(count_ssyt(&p(&[1], 1), 5, 4), 1);
        assert_eq!(count_ssyt(&p(&[1, 1], 2), 2, 2), 0);
        assert_eq!(count_ssyt(&p(&[1, 1], 2), 2, 3), 1);
        assert_eq!(count_ssyt(&Partition::empty(2), 3, 0), 1);
    }

    #[test]
    fn spec_tables() {
        let t = multiplicity_table(2, 2, 2, 100).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(t.get(&[2, 0]), 1);
        assert_eq!(t.get(&[1, 0]), 1);
        let t = multiplicity_table(1, 1, 5, 100).unwrap();
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.get(&[5]), 1);
        let t = multiplicity_table(2, 3, 3, 100).unwrap();
        assert_eq!(t.get(&[1, 1]), 1);
        assert!(multiplicity_table(2, 3, 300, 100).is_err());
    }

    #[test]
    fn table_json() {
        let t = multiplicity_table(2, 2, 2, 100).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["entries"][0]["partition"], serde_json::json!([2, 0]));
        assert_eq!(v["entries"][0]["mult"], 1);
        assert_eq!(v["kappa"], 2);
    }

    #[test]
    fn hooks() {
        let h = hook_data(&p(&[2, 1], 2)).unwrap();
        assert_eq!(h.hooks, vec![vec![3, 1], vec![1]]);
        assert_eq!(h.standard_count, BigInt::from(2));
        assert_eq!(hook_data(&p(&[1], 1)).unwrap().standard_count, BigInt::from(1));
        let h = hook_data(&p(&[2, 2], 2)).unwrap();
        assert_eq!(h.hooks, vec![vec![3, 2], vec![2, 1]]);
        assert_eq!(h.standard_count, BigInt::from(2));
        assert!(hook_data(&Partition::empty(2)).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(schur_rank(&p(&[1, 1, 1], 3), 3).unwrap(), BigInt::from(1));
        assert_eq!(schur_rank(&p(&[7], 2), 2).unwrap(), BigInt::from(8));
        assert_eq!(schur_rank(&p(&[3, 1], 2), 2).unwrap(), BigInt::from(3));
        assert_eq!(schur_rank(&p(&[2, 1], 3), 3).unwrap(), BigInt::from(8));
        assert!(schur_rank(&p(&[1, 1, 1], 3), 2).is_err());
    }

    #[test]
    fn pieri_examples() {
        assert_eq!(pieri(&p(&[1], 2), 1, 2).unwrap(), vec![p(&[2], 2), p(&[1, 1], 2)]);
        assert_eq!(pieri(&p(&[3], 3), 0, 3).unwrap(), vec![p(&[3], 3)]);
        assert_eq!(pieri(&p(&[2, 1], 2), 1, 2).unwrap(), vec![p(&[3, 1], 2), p(&[2, 2], 2)]);
    }

    #[test]
    fn tensor_examples() {
        let m = sym_tensor_schur_decompose(&[1, 1], 2).unwrap();
        assert_eq!(m.get(&p(&[2], 2)), Some(&1));
        assert_eq!(m.get(&p(&[1, 1], 2)), Some(&1));
        let m = sym_tensor_schur_decompose(&[1, 1, 1], 3).unwrap();
        assert_eq!(m.get(&p(&[3], 3)), Some(&1));
        assert_eq!(m.get(&p(&[2, 1], 3)), Some(&2));
        assert_eq!(m.get(&p(&[1, 1, 1], 3)), Some(&1));
        let m = sym_tensor_schur_decompose(&[2, 0], 2).unwrap();
        assert_eq!(m.len(), 1);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![1, 2], 2).is_err());
        assert!(Partition::new(vec![1, 1, 1], 2).is_err());
        assert_eq!(Partition::new(vec![2, 0, 0], 2).unwrap().parts(), &[2, 0]);
        assert_eq!(p(&[3, 1], 3).columns(), vec![2, 1, 1]);
    }

    #[test]
    fn enumeration_matches_count() {
        let s = p(&[3, 2], 2);
        for m in 0..25 {
            let all = enumerate_ssyt(&s, 4, m);
            assert_eq!(all.len() as u128, count_ssyt(&s, 4, m));
            assert!(all.iter().all(|t| t.is_semistandard(4) && t.weight() == m));
        }
    }
}
