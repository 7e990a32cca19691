use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{binom, fmt_frac, int, Rational};

/// Dense polynomial in the hypersurface degree `d`; `coeffs[k]` multiplies `d^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DegreePolynomial {
    coeffs: Vec<Rational>,
}

impl DegreePolynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `d`.
    pub fn d() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, d: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * d + c)
    }

    pub fn eval_int(&self, d: i64) -> Rational {
        self.eval(&int(d))
    }

    /// `self(inner(d))`.
    pub fn compose(&self, inner: &DegreePolynomial) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * inner) + &Self::constant(c.clone()))
    }
}

impl Add for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn add(self, rhs: &DegreePolynomial) -> DegreePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        DegreePolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn sub(self, rhs: &DegreePolynomial) -> DegreePolynomial {
        self + &(-rhs)
    }
}

impl Neg for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn neg(self) -> DegreePolynomial {
        DegreePolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &DegreePolynomial {
    type Output = DegreePolynomial;
    fn mul(self, rhs: &DegreePolynomial) -> DegreePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return DegreePolynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DegreePolynomial::new(out)
    }
}

impl fmt::Display for DegreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let unit = a.is_one() && k > 0;
            if !unit {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "d")?,
                _ => write!(f, "d^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for DegreePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<String> = self.coeffs.iter().map(fmt_frac).collect();
        let mut st = s.serialize_struct("DegreePolynomial", 1)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

/// `c_k = sign * h^k * poly(d)` on a degree-d hypersurface of dimension n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernClass {
    pub sign: i8,
    pub poly: DegreePolynomial,
}

impl ChernClass {
    /// The full coefficient of `h^k`, sign folded in.
    pub fn signed(&self) -> DegreePolynomial {
        if self.sign < 0 {
            -&self.poly
        } else {
            self.poly.clone()
        }
    }
}

pub fn chern_class(n: usize, k: usize) -> Result<ChernClass> {
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("chern class index {k} for n = {n}")));
    }
    // (1+h)^{n+2}/(1+dh): h^k coefficient is sum_j C(n+2,j) (-d)^{k-j}
    let coeffs: Vec<Rational> = (0..=k)
        .map(|e| {
            let j = (k - e) as i64;
            let c = binom(n as i64 + 2, j);
            let c = if j % 2 == 1 { -c } else { c };
            Rational::from_integer(c)
        })
        .collect();
    Ok(ChernClass {
        sign: if k % 2 == 1 { -1 } else { 1 },
        poly: DegreePolynomial::new(coeffs),
    })
}

/// h-coefficients `[c_0, c_1, ..., c_n]` of the total Chern class of T_X (or of
/// the cotangent bundle when `dual`), each a polynomial in d.
pub fn total_chern(n: usize, dual: bool) -> Vec<DegreePolynomial> {
    let mut out = vec![DegreePolynomial::constant(Rational::one())];
    for k in 1..=n {
        let c = chern_class(n, k).expect("index in range").signed();
        out.push(if dual && k % 2 == 1 { -&c } else { c });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChernMonomial {
    pub exponents: Vec<u32>,
}

impl ChernMonomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self { exponents }
    }

    pub fn weighted_degree(&self) -> usize {
        self.exponents
            .iter()
            .enumerate()
            .map(|(i, &t)| (i + 1) * t as usize)
            .sum()
    }
}

/// `∫_X c_1^{τ_1} ... c_n^{τ_n}` as a polynomial in d.
pub fn integrate_chern_monomial(n: usize, tau: &ChernMonomial, dual: bool) -> Result<DegreePolynomial> {
    if tau.exponents.len() > n {
        return Err(Error::Malformed(format!(
            "{} exponents for dimension {n}",
            tau.exponents.len()
        )));
    }
    let w = tau.weighted_degree();
    if w != n {
        return Err(Error::OutOfRange(format!("weighted degree {w} != {n}")));
    }
    let total = total_chern(n, dual);
    let mut acc = DegreePolynomial::d();
    for (i, &t) in tau.exponents.iter().enumerate() {
        acc = &acc * &total[i + 1].pow(t);
    }
    Ok(acc)
}

/// Integrate a form given by its h^n coefficient: multiply by `∫_X h^n = d`.
pub fn integrate_top(top: &DegreePolynomial) -> DegreePolynomial {
    top * &DegreePolynomial::d()
}

pub fn eval_big(p: &DegreePolynomial, d: &BigInt) -> Rational {
    p.eval(&Rational::from_integer(d.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_low_dimensional_classes() {
        let c1 = chern_class(2, 1).unwrap();
        assert_eq!(c1.sign, -1);
        assert_eq!(c1.poly, DegreePolynomial::from_ints(&[-4, 1]));
        let c2 = chern_class(2, 2).unwrap();
        assert_eq!(c2.poly, DegreePolynomial::from_ints(&[6, -4, 1]));
        let c3 = chern_class(3, 3).unwrap();
        assert_eq!(c3.sign, -1);
        assert_eq!(c3.poly, DegreePolynomial::from_ints(&[-10, 10, -5, 1]));
        assert!(chern_class(2, 3).is_err());
        assert!(chern_class(2, 0).is_err());
    }

    #[test]
    fn quartic_surface_euler_number() {
        let p = integrate_chern_monomial(2, &ChernMonomial::new(vec![0, 1]), false).unwrap();
        assert_eq!(p, DegreePolynomial::from_ints(&[0, 6, -4, 1]));
        assert_eq!(p.eval_int(4), int(24));
    }

    #[test]
    fn dual_first_class_power() {
        for n in 1..=5usize {
            let mut tau = vec![0; n];
            tau[0] = n as u32;
            let p = integrate_chern_monomial(n, &ChernMonomial::new(tau), true).unwrap();
            let expect = &DegreePolynomial::d()
                * &DegreePolynomial::from_ints(&[-(n as i64) - 2, 1]).pow(n as u32);
            assert_eq!(p, expect);
        }
        let p = integrate_chern_monomial(3, &ChernMonomial::new(vec![3, 0, 0]), true).unwrap();
        assert_eq!(p.eval_int(6), int(6));
    }

    #[test]
    fn rejects_wrong_weight() {
        assert!(integrate_chern_monomial(2, &ChernMonomial::new(vec![1, 1]), false).is_err());
    }

    #[test]
    fn display_and_json() {
        let p = DegreePolynomial::from_ints(&[6, -4, 1]);
        assert_eq!(p.to_string(), "d^2 - 4d + 6");
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["coeffs"][1], "-4/1");
    }

    #[test]
    fn compose_shift() {
        let p = DegreePolynomial::from_ints(&[6, -4, 1]);
        let q = p.compose(&DegreePolynomial::from_ints(&[1, 1]));
        assert_eq!(q.eval_int(3), p.eval_int(4));
    }
}
