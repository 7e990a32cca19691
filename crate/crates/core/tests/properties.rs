use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

use ggjet::asymptotics::{
    classify_tableau, is_maximal_family, kernel_sum_f64, nabla_family_sum, nabla_of, nabla_points, polylog_sum,
    shape_monomial, simplex_moment, simplex_moment_recursive, tight_path_count, tight_path_upper_bound,
};
use ggjet::chern::{chern_class, integrate_chern_monomial, ChernMonomial, DegreePolynomial};
use ggjet::cohomology::{line_bundle_cohomology_x, projective_cohomology, HypersurfaceContext};
use ggjet::delta::{all_relations, delta_eval, det, DeltaDeterminant, JetPoint};
use ggjet::jets::{component_rank, gg_rank, gr_schur_decomposition, graded_components, JetConfig};
use ggjet::rational::{binom, frac, Rational};
use ggjet::young::{count_ssyt, enumerate_ssyt, hook_data, multiplicity_table, partitions_in_range, Partition};

fn poly_strategy() -> impl Strategy<Value = DegreePolynomial> {
    prop::collection::vec((-9i64..=9, 1i64..=4), 0..5)
        .prop_map(|cs| DegreePolynomial::new(cs.into_iter().map(|(p, q)| frac(p, q)).collect()))
}

fn shape_strategy(max_rows: usize, max_cells: u32) -> impl Strategy<Value = Partition> {
    prop::collection::vec(0u32..=max_cells, 1..=max_rows).prop_filter_map("too many cells", move |mut v| {
        v.sort_unstable_by(|a, b| b.cmp(a));
        let rank = v.len();
        (v.iter().sum::<u32>() <= max_cells).then(|| Partition::new(v, rank).unwrap())
    })
}

fn increasing_column(depth: usize, max: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::sample::subsequence((1..=max).collect::<Vec<u32>>(), depth)
}

/// Plain recursive count of unit-step paths, independent of the library memo.
fn dfs_paths(cur: &mut Vec<u32>, end: &[u32]) -> u128 {
    if cur.as_slice() == end {
        return 1;
    }
    let mut total = 0;
    for l in 0..cur.len() {
        cur[l] += 1;
        if cur[l] <= end[l] && (l + 1 == cur.len() || cur[l] < cur[l + 1]) {
            total += dfs_paths(cur, end);
        }
        cur[l] -= 1;
    }
    total
}

/// Standard tableaux counted by removing the cell holding the largest entry.
fn standard_by_corners(parts: &mut Vec<u32>, memo: &mut BTreeMap<Vec<u32>, u128>) -> u128 {
    if parts.iter().all(|&x| x == 0) {
        return 1;
    }
    if let Some(&v) = memo.get(parts) {
        return v;
    }
    let mut total = 0;
    for i in 0..parts.len() {
        let is_corner = parts[i] > 0 && (i + 1 == parts.len() || parts[i + 1] < parts[i]);
        if is_corner {
            parts[i] -= 1;
            total += standard_by_corners(parts, memo);
            parts[i] += 1;
        }
    }
    memo.insert(parts.clone(), total);
    total
}

/// Principal specialization `s_λ(q, q², ..., q^κ)` from hook lengths and contents.
fn hook_content_series(shape: &Partition, kappa: u32) -> Vec<BigInt> {
    let parts = shape.parts();
    let size = shape.size() as usize;
    let conj = shape.columns();
    let nl: u64 = parts.iter().enumerate().map(|(i, &x)| i as u64 * x as u64).sum();
    let top = size * kappa as usize + 1;
    let mut num = vec![BigInt::zero(); top + 1];
    num[0] = BigInt::one();
    let mut den = num.clone();
    let mul = |p: &mut Vec<BigInt>, e: usize| {
        // p *= (1 - q^e), truncated
        for k in (e..p.len()).rev() {
            let v = p[k - e].clone();
            p[k] -= v;
        }
    };
    for (i, &row) in parts.iter().enumerate() {
        for j in 0..row as usize {
            let content = j as i64 - i as i64;
            let e = kappa as i64 + content;
            if e <= 0 {
                return vec![BigInt::zero(); top + 1];
            }
            mul(&mut num, e as usize);
            let hook = (row as usize - j) + (conj[j] as usize - i) - 1;
            mul(&mut den, hook);
        }
    }
    // num / den as a power series; den has constant term 1
    let mut out = vec![BigInt::zero(); top + 1];
    for k in 0..=top {
        let mut acc = num[k].clone();
        for j in 1..=k {
            acc -= &den[j] * &out[k - j];
        }
        out[k] = acc;
    }
    let shift = (size as u64 + nl) as usize;
    let mut shifted = vec![BigInt::zero(); top + shift + 1];
    for (k, v) in out.into_iter().enumerate() {
        shifted[k + shift] = v;
    }
    shifted
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_axioms(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &a), &DegreePolynomial::zero());
    }

    #[test]
    fn chern_integrals_vanish_at_zero_degree(n in 1usize..=5, seed in any::<u64>(), dual in any::<bool>()) {
        // random exponent vector of weighted degree n
        let mut left = n;
        let mut tau = vec![0u32; n];
        let mut s = seed;
        while left > 0 {
            let k = (s as usize % left) + 1;
            s = s.rotate_left(7) ^ 0x9e37;
            tau[k - 1] += 1;
            left -= k;
        }
        let p = integrate_chern_monomial(n, &ChernMonomial::new(tau), dual).unwrap();
        prop_assert!(p.coeff(0) == Rational::zero());
    }

    #[test]
    fn ssyt_count_matches_enumeration(shape in shape_strategy(4, 8), kappa in 1u32..=4, m in 0u64..=20) {
        let listed = enumerate_ssyt(&shape, kappa, m);
        prop_assert_eq!(listed.len() as u128, count_ssyt(&shape, kappa, m));
        prop_assert!(listed.iter().all(|t| t.is_semistandard(kappa) && t.weight() == m));
    }

    #[test]
    fn hook_formula_matches_corner_recursion(shape in shape_strategy(4, 8)) {
        prop_assume!(shape.size() > 0);
        let h = hook_data(&shape).unwrap();
        let expect = standard_by_corners(&mut shape.parts().to_vec(), &mut BTreeMap::new());
        prop_assert_eq!(h.standard_count, BigInt::from(expect));
    }

    #[test]
    fn multiplicities_match_hook_content(shape in shape_strategy(3, 7), kappa in 1u32..=4) {
        let series = hook_content_series(&shape, kappa);
        for (m, expect) in series.iter().enumerate() {
            prop_assert_eq!(BigInt::from(count_ssyt(&shape, kappa, m as u64)), expect.clone());
        }
    }

    #[test]
    fn rank_identity(n in 1usize..=3, kappa in 1u32..=4, m in 1u64..=12) {
        let cfg = JetConfig::new(n, kappa, m).unwrap();
        let direct = gg_rank(&cfg, 1000).unwrap();
        let graded: BigInt = graded_components(kappa, m).iter().map(|c| component_rank(c, n)).sum();
        let g = gr_schur_decomposition(&cfg, 1000).unwrap();
        prop_assert_eq!(&direct, &graded);
        prop_assert_eq!(&direct, &g.rank);
        let lo = m.div_ceil(kappa as u64);
        prop_assert!(g.table.entries.keys().all(|p| p.size() >= lo && p.size() <= m));
    }

    #[test]
    fn tight_paths_dp_matches_dfs(a in increasing_column(3, 6), b in increasing_column(3, 6)) {
        prop_assume!(a.iter().zip(&b).all(|(x, y)| x <= y));
        let dp = tight_path_count(&a, &b).unwrap();
        prop_assert_eq!(dp, dfs_paths(&mut a.clone(), &b));
        prop_assert!(BigInt::from(dp) <= tight_path_upper_bound(&a, &b).unwrap());
    }

    #[test]
    fn simplex_recursion(js in prop::collection::vec(0u64..=3, 2..=4)) {
        prop_assert_eq!(simplex_moment(&js).unwrap(), simplex_moment_recursive(&js).unwrap());
    }

    #[test]
    fn polylog_newton_matches_compositions(kappa in 1u64..=6, q in 0u32..=4) {
        fn rec(i: u64, kappa: u64, left: u32) -> Rational {
            if i > kappa {
                return if left == 0 { Rational::one() } else { Rational::zero() };
            }
            (0..=left)
                .map(|e| Rational::new(BigInt::one(), BigInt::from(i).pow(e)) * rec(i + 1, kappa, left - e))
                .sum()
        }
        prop_assert_eq!(polylog_sum(kappa, q), rec(1, kappa, q));
    }

    #[test]
    fn determinant_rows_alternate(rows in prop::collection::vec(1u32..=4, 1..=3), vals in prop::collection::vec((-9i64..=9, 1i64..=5), 12)) {
        let p = JetPoint::from_fn(3, 4, |i, lam| {
            let (a, b) = vals[(i - 1) * 4 + lam as usize - 1];
            frac(a, b)
        });
        let i = rows.len();
        let raw = det(rows.iter().map(|&lam| (1..=i).map(|c| p.value(c, lam).clone()).collect()).collect());
        match DeltaDeterminant::canonical(rows.clone()) {
            None => prop_assert!(raw.is_zero()),
            Some((sign, d)) => prop_assert_eq!(raw, delta_eval(&d, &p).unwrap() * Rational::from_integer(BigInt::from(sign))),
        }
    }

    #[test]
    fn diagonal_action(orders in prop::collection::btree_set(1u32..=4, 1..=3), scal in prop::collection::vec((1i64..=7, 1i64..=5), 3), vals in prop::collection::vec((-9i64..=9, 1i64..=5), 12)) {
        let d = DeltaDeterminant::new(orders.into_iter().collect()).unwrap();
        let base = |i: usize, lam: u32| {
            let (a, b) = vals[(i - 1) * 4 + lam as usize - 1];
            frac(a, b)
        };
        let e: Vec<Rational> = scal.iter().map(|&(a, b)| frac(a, b)).collect();
        let p = JetPoint::from_fn(3, 4, base);
        let q = JetPoint::from_fn(3, 4, |i, lam| base(i, lam) * &e[i - 1]);
        let factor: Rational = e[..d.depth()].iter().product();
        prop_assert_eq!(delta_eval(&d, &q).unwrap(), delta_eval(&d, &p).unwrap() * factor);
    }
}

#[test]
fn chern_table_binomials() {
    for n in 1..=6usize {
        for k in 1..=n {
            let c = chern_class(n, k).unwrap();
            for e in 0..=k {
                let j = (k - e) as i64;
                let mut expect = binom(n as i64 + 2, j);
                if j % 2 == 1 {
                    expect = -expect;
                }
                assert_eq!(c.poly.coeff(e), Rational::from_integer(expect));
            }
        }
    }
}

#[test]
fn leading_monomial_is_the_pair() {
    for kappa in 1..=4 {
        for rel in all_relations(2, kappa) {
            let (a, b) = &rel.pair;
            let lead = rel.leading_monomial().unwrap();
            let pair = if ggjet::delta::compare_two(a, b).is_gt() {
                (b.clone(), a.clone())
            } else {
                (a.clone(), b.clone())
            };
            assert_eq!(lead, &pair, "kappa={kappa}");
        }
    }
}

#[test]
fn projective_trivial_bundle_counts_monomials() {
    for n in 1..=4usize {
        for t in 0..=10 {
            let v = projective_cohomology(n, &Partition::empty(n + 1), t).unwrap();
            assert_eq!(v.chi, binom(t + n as i64 + 1, n as i64 + 1));
        }
    }
}

#[test]
fn line_bundle_serre_symmetry() {
    for n in 1..=3 {
        for d in 1..=7 {
            let ctx = HypersurfaceContext::new(n, d).unwrap();
            for t in -5..=15 {
                let a = line_bundle_cohomology_x(&ctx, t);
                let b = line_bundle_cohomology_x(&ctx, ctx.canonical_degree() - t);
                assert_eq!(a.get(0), b.get(n));
            }
        }
    }
}

/// Σ over all tableaux = Σ over non-maximal families + Σ_∇ (tight path count) · S.
#[test]
fn grouped_sum_identity() {
    let exps: [&[u32]; 3] = [&[0, 0], &[1, 2], &[2, 1]];
    for n in 1..=2usize {
        for kappa in n as u32..=3 {
            let points = nabla_points(n, kappa);
            for m in 1..=12u64 {
                for alpha in exps {
                    let alpha = &alpha[..n];
                    let mut all = BigInt::zero();
                    let mut rest = BigInt::zero();
                    for shape in partitions_in_range(n, 0, m) {
                        for t in enumerate_ssyt(&shape, kappa, m) {
                            let v = shape_monomial(&shape, alpha);
                            if !is_maximal_family(&classify_tableau(&t), n, kappa) {
                                rest += &v;
                            }
                            all += v;
                        }
                    }
                    let maximal: BigInt = points
                        .iter()
                        .map(|p| p.path_product() * nabla_family_sum(p, m, alpha, 1000).unwrap())
                        .sum();
                    assert_eq!(all, rest + maximal, "n={n} kappa={kappa} m={m} alpha={alpha:?}");
                }
            }
        }
    }
}

#[test]
fn family_sum_matches_classification() {
    // n = 2, κ = 2, m = 8: sum the monomial over each maximal family directly
    let (n, kappa, m) = (2usize, 2u32, 8u64);
    for alpha in [[0u32, 0], [1, 0], [0, 3], [2, 2]] {
        let mut direct: BTreeMap<_, BigInt> = BTreeMap::new();
        for shape in partitions_in_range(n, 0, m) {
            for t in enumerate_ssyt(&shape, kappa, m) {
                let key = classify_tableau(&t);
                if let Some(p) = nabla_of(&key, n, kappa) {
                    *direct.entry(p).or_insert_with(BigInt::zero) += shape_monomial(&shape, &alpha);
                }
            }
        }
        for p in nabla_points(n, kappa) {
            let expect = direct.get(&p).cloned().unwrap_or_default();
            assert_eq!(p.path_product() * nabla_family_sum(&p, m, &alpha, 1000).unwrap(), expect);
        }
    }
}

#[test]
fn basic_sum_counts_tableaux() {
    for n in 1..=3 {
        for kappa in 1..=3 {
            for m in 1..=8 {
                let table = multiplicity_table(n, kappa, m, 1000).unwrap();
                let sum = ggjet::asymptotics::basic_numerical_sum(n, kappa, m, &vec![0; n], 1000).unwrap();
                assert_eq!(sum, BigInt::from(table.total()));
            }
        }
    }
}

#[test]
fn kernel_envelope() {
    // the n = 2 kernel is a right Riemann sum of a decreasing integrand, so it
    // never exceeds α! ; the n = 3 kernel stays under it at these scales
    for kappa in [10u32, 20, 40, 80] {
        let k2 = kernel_sum_f64(2, kappa, &[6]).unwrap();
        let k3 = kernel_sum_f64(3, kappa, &[6, 0]).unwrap();
        assert!(k2 <= 720.0, "kappa={kappa}: {k2}");
        assert!(k3 > 0.0 && k3 <= k2, "kappa={kappa}: {k3} vs {k2}");
    }
    let zero: Vec<f64> = [10u32, 20, 40].iter().map(|&k| kernel_sum_f64(3, k, &[0, 0]).unwrap()).collect();
    assert!(zero.iter().all(|&v| v > 0.0 && v < 1.0 / 3.0 + 1e-9), "{zero:?}");
}
