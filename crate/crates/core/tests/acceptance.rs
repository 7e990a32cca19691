use std::collections::BTreeMap;

use ggjet::asymptotics::{classify_tableau, family_size, tight_path_count, tight_path_upper_bound};
use ggjet::verify::{run_suite, VerifyOptions, SUITES};
use ggjet::young::{count_ssyt, partitions_in_range, Tableau};

/// Plain depth-first count of tight paths, kept apart from the library DP.
fn dfs_paths(cur: &mut Vec<u32>, end: &[u32]) -> u128 {
    if cur.as_slice() == end {
        return 1;
    }
    let mut total = 0;
    for l in 0..cur.len() {
        cur[l] += 1;
        let ok = cur[l] <= end[l] && (l + 1 == cur.len() || cur[l] < cur[l + 1]);
        if ok {
            total += dfs_paths(cur, end);
        }
        cur[l] -= 1;
    }
    total
}

fn increasing_columns(depth: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..depth {
        let mut next = Vec::new();
        for c in out {
            let lo = c.last().map_or(1, |x| x + 1);
            for v in lo..=max {
                let mut c2 = c.clone();
                c2.push(v);
                next.push(c2);
            }
        }
        out = next;
    }
    out
}

/// Every filling of the shape with entries ≤ κ, filtered by the tableau rules.
fn brute_tableaux(shape: &[u32], kappa: u32, m: u64) -> Vec<Tableau> {
    let cells: usize = shape.iter().map(|&x| x as usize).sum();
    let mut out = Vec::new();
    let mut vals = vec![1u32; cells];
    loop {
        let mut rows = Vec::new();
        let mut k = 0;
        for &len in shape.iter().filter(|&&x| x > 0) {
            rows.push(vals[k..k + len as usize].to_vec());
            k += len as usize;
        }
        let t = Tableau { rows };
        if t.weight() == m && t.is_semistandard(kappa) {
            out.push(t);
        }
        let mut i = 0;
        while i < cells {
            vals[i] += 1;
            if vals[i] <= kappa {
                break;
            }
            vals[i] = 1;
            i += 1;
        }
        if i == cells {
            break;
        }
    }
    out
}

fn oracle_families() -> Result<u64, String> {
    let mut checks = 0;
    for depth in 1..=3 {
        let cols = increasing_columns(depth, 6);
        for a in &cols {
            for b in &cols {
                if a.iter().zip(b).all(|(x, y)| x <= y) {
                    let dfs = dfs_paths(&mut a.clone(), b);
                    let dp = tight_path_count(a, b).map_err(|e| e.to_string())?;
                    let bound = tight_path_upper_bound(a, b).map_err(|e| e.to_string())?;
                    if dfs != dp || num_bigint::BigInt::from(dp) > bound {
                        return Err(format!("{a:?}->{b:?}: dfs {dfs}, dp {dp}, bound {bound}"));
                    }
                    checks += 1;
                }
            }
        }
    }
    // brute-force fillings against the library count, then classify each one
    for n in 1..=3usize {
        for kappa in 1..=3u32 {
            for m in 1..=7u64 {
                let mut keys = BTreeMap::new();
                for shape in partitions_in_range(n, 0, m) {
                    let brute = brute_tableaux(shape.parts(), kappa, m);
                    if brute.len() as u128 != count_ssyt(&shape, kappa, m) {
                        return Err(format!("count mismatch for {shape} kappa={kappa} m={m}"));
                    }
                    for t in brute {
                        let k = classify_tableau(&t);
                        let d: u64 = k.distinct_columns().unwrap_or(0);
                        let depth = n.min(kappa as usize) as u64;
                        if d > depth * kappa as u64 - depth * (depth - 1) / 2 {
                            return Err(format!("column bound fails for {t:?}"));
                        }
                        *keys.entry(k).or_insert(0) += 1;
                        checks += 1;
                    }
                }
                for (k, &c) in &keys {
                    if family_size(k, m) != c {
                        return Err(format!("family {k:?} at m={m}: {} vs {c}", family_size(k, m)));
                    }
                }
            }
        }
    }
    Ok(checks)
}

fn main() {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    for (id, name) in SUITES {
        let r = run_suite(name, &opts).expect("suite exists");
        let mut passed = r.passed;
        let mut detail = r.detail.clone();
        if id == 8 {
            match oracle_families() {
                Ok(c) => detail = format!("{detail}; oracle {c} checks"),
                Err(e) => {
                    passed = false;
                    detail = format!("oracle: {e}");
                }
            }
        }
        println!(
            "criterion {id:>2} {name:<20} {} ({} ms) {detail}",
            if passed { "PASS" } else { "FAIL" },
            r.millis
        );
        if !passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", SUITES.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
