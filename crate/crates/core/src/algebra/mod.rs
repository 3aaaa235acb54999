//! Exact scalars and rational functions of the matrix size `N`.
//!
//! Everything downstream (Weingarten functions, tree weights, cumulant
//! coefficients) is an element of `Q(N)`. Polynomials are dense in the
//! degree, which stays small for every quantity this crate produces.

mod poly;
mod ratfun;

pub use poly::Poly;
pub use ratfun::RationalFunctionN;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational number, always stored in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::parse(0, format!("bad numerator in {t:?}")))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::parse(num.len() + 1, format!("bad denominator in {t:?}")))?;
    if d.is_zero() {
        return Err(Error::parse(num.len() + 1, "zero denominator"));
    }
    Ok(Rational::new(n, d))
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `a! / b!` for `a >= b`.
pub fn falling_ratio(a: u64, b: u64) -> BigInt {
    assert!(a >= b);
    ((b + 1)..=a).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    falling_ratio(n, n - k) / factorial(k)
}

pub fn catalan(n: u64) -> BigInt {
    binomial(2 * n, n) / BigInt::from(n + 1)
}

pub fn to_f64(r: &Rational) -> f64 {
    // Scale so that the integer quotient keeps ~60 significant bits even when
    // numerator and denominator are both astronomically large.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let (num, den) = if shift > 60 {
        (n.clone(), d << (shift - 60) as usize)
    } else if shift < 60 {
        (n << (60 - shift) as usize, d.clone())
    } else {
        (n.clone(), d.clone())
    };
    let q = num.div_floor(&den);
    let qf: f64 = q.to_string().parse().unwrap_or(f64::NAN);
    qf * (2f64).powi((shift - 60) as i32)
}

/// Bracket `[lo, hi]` around `sqrt(x)` with `hi - lo <= 10^-digits`.
pub fn sqrt_bracket(x: &Rational, digits: u32) -> Result<(Rational, Rational)> {
    if x.is_negative() {
        return Err(Error::Domain(format!(
            "square root of negative {}",
            format_rational(x)
        )));
    }
    let scale = BigInt::from(10u32).pow(digits);
    // floor(sqrt(x) * scale) = floor(sqrt(floor(x * scale^2)))
    let scaled = (x * Rational::from_integer(&scale * &scale)).floor().to_integer();
    let s = scaled.sqrt();
    let lo = Rational::new(s.clone(), scale.clone());
    let hi = Rational::new(s + 1, scale);
    Ok((lo, hi))
}

/// Serde adapter writing a [`Rational`] as `"p/q"`.
pub mod rational_text {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -4 ").unwrap(), int(-4));
        assert_eq!(format_rational(&rat(-2, 4)), "-1/2");
        assert_eq!(format_rational(&int(7)), "7");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn combinatorial_helpers() {
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 3), BigInt::from(20));
        let cats: Vec<_> = (0..6).map(catalan).collect();
        assert_eq!(cats, [1, 1, 2, 5, 14, 42].map(BigInt::from));
        assert_eq!(falling_ratio(7, 4), BigInt::from(210));
    }

    #[test]
    fn sqrt_bracket_contains_root() {
        let (lo, hi) = sqrt_bracket(&int(2), 20).unwrap();
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(sqrt_bracket(&int(-1), 5).is_err());
        let (lo, _) = sqrt_bracket(&rat(9, 4), 10).unwrap();
        assert_eq!(lo, rat(3, 2));
    }

    #[test]
    fn to_f64_handles_large_parts() {
        let big = Rational::new(
            BigInt::from(10).pow(400) + 1,
            BigInt::from(3) * BigInt::from(10).pow(400),
        );
        assert!((to_f64(&big) - 1.0 / 3.0).abs() < 1e-15);
        assert!((to_f64(&rat(-7, 2)) + 3.5).abs() < 1e-15);
    }
}
