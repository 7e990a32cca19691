use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn big(v: &BigInt) -> Rational {
    Rational::from_integer(v.clone())
}

/// Always "p/q", also for integers, so consumers never special-case.
pub fn fmt_frac(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_frac(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    // ratio of huge integers: shift both down before converting
    let (n, d) = (r.numer(), r.denom());
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb.max(db) - 1000).max(0) as usize;
    let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
    nf / df
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Counting binomial: number of k-subsets of an x-set, zero for x < k or k < 0.
pub fn binom(x: i64, k: i64) -> BigInt {
    if k < 0 || x < k {
        return BigInt::zero();
    }
    let k = k.min(x - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= x - i;
        acc /= i + 1;
    }
    acc
}

/// Polynomial binomial x(x-1)...(x-k+1)/k!, defined for every integer x.
pub fn binom_poly(x: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    for i in 0..k {
        num *= x - i;
    }
    let (q, r) = num.div_rem(&factorial(k as u64));
    debug_assert!(r.is_zero());
    q
}

pub fn multinomial(parts: &[u64]) -> BigInt {
    let total: u64 = parts.iter().sum();
    parts
        .iter()
        .fold(factorial(total), |acc, &p| acc / factorial(p))
}

pub fn pow_i(base: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(-1, 2), BigInt::zero());
        assert_eq!(binom(2, 3), BigInt::zero());
        assert_eq!(binom_poly(-1, 2), BigInt::from(1));
        assert_eq!(binom_poly(-3, 3), BigInt::from(-10));
        assert_eq!(binom_poly(2, 3), BigInt::zero());
    }

    #[test]
    fn fraction_strings() {
        assert_eq!(fmt_frac(&frac(6, -4)), "-3/2");
        assert_eq!(fmt_frac(&int(5)), "5/1");
        assert_eq!(parse_frac("-3/2"), Some(frac(-3, 2)));
        assert_eq!(parse_frac("7"), Some(int(7)));
        assert_eq!(parse_frac("1/0"), None);
    }

    #[test]
    fn float_of_huge_ratio() {
        let r = Rational::new(factorial(400), factorial(399));
        assert!((to_f64(&r) - 400.0).abs() < 1e-9);
    }
}
