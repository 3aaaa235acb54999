use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_rational, Poly, Rational};
use crate::error::{Error, Result};

/// Element of `Q(N)`, kept as a reduced fraction with a monic denominator.
///
/// Normalization happens in every constructor, so two values are equal iff
/// their fields are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunctionN {
    num: Poly,
    den: Poly,
}

impl RationalFunctionN {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        // Denominators in this crate are mostly pure powers of N; cancel
        // those without a Euclidean gcd.
        let den_low = den.low_order();
        let (num, den) = if den.degree() == Some(den_low) {
            let j = den_low.min(num.low_order());
            (num.shift_down(j), den.shift_down(j))
        } else {
            let g = Poly::gcd(&num, &den);
            if g.degree() == Some(0) {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lc = den.leading().expect("nonzero denominator").recip();
        RationalFunctionN {
            num: num.scale(&lc),
            den: den.scale(&lc),
        }
    }

    pub fn zero() -> Self {
        RationalFunctionN {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        RationalFunctionN {
            num: p,
            den: Poly::one(),
        }
    }

    /// The indeterminate `N`.
    pub fn n() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    /// `c * N^e` for any integer exponent.
    pub fn monomial(c: Rational, e: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if e >= 0 {
            Self::from_poly(Poly::monomial(c, e as usize))
        } else {
            RationalFunctionN {
                num: Poly::constant(c),
                den: Poly::monomial(Rational::one(), (-e) as usize),
            }
        }
    }

    /// Sum of `c_e N^e` over `(e, c_e)` pairs.
    pub fn laurent<'a>(terms: impl IntoIterator<Item = (i64, &'a Rational)>) -> Self {
        let terms: Vec<_> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let low = terms.iter().map(|(e, _)| *e).min().unwrap().min(0);
        let high = terms.iter().map(|(e, _)| *e).max().unwrap();
        let mut coeffs = vec![Rational::zero(); (high - low + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - low) as usize] += c;
        }
        Self::normalized(
            Poly::new(coeffs),
            Poly::monomial(Rational::one(), (-low) as usize),
        )
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunctionN {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    /// Exact value at `N = n0`.
    pub fn eval(&self, n0: &Rational) -> Result<Rational> {
        let d = self.den.eval(n0);
        if d.is_zero() {
            return Err(Error::Pole(format_rational(n0)));
        }
        Ok(self.num.eval(n0) / d)
    }

    /// `(deg num - deg den, lc num / lc den)`: the leading large-`N` term.
    pub fn large_n(&self) -> Result<(i64, Rational)> {
        let dn = self.num.degree().ok_or(Error::ZeroFunction)?;
        let dd = self.den.degree().expect("nonzero denominator");
        let lead = self.num.leading().unwrap() / self.den.leading().unwrap();
        Ok((dn as i64 - dd as i64, lead))
    }

    /// Laurent coefficients `(exponent, coefficient)` when the denominator
    /// is a power of `N`; `None` otherwise.
    pub fn laurent_terms(&self) -> Option<Vec<(i64, Rational)>> {
        let low = self.den.low_order();
        if self.den.degree() != Some(low) {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i as i64 - low as i64, c.clone()))
                .collect(),
        )
    }

    /// `"c0,c1,... ; d0,d1,..."`
    pub fn to_text(&self) -> String {
        format!("{} ; {}", self.num.to_coeff_list(), self.den.to_coeff_list())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (a, b) = text
            .split_once(';')
            .ok_or_else(|| Error::parse(0, "expected \"num ; den\""))?;
        Self::new(Poly::parse_coeff_list(a)?, Poly::parse_coeff_list(b)?)
    }
}

impl Default for RationalFunctionN {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &RationalFunctionN {
    type Output = RationalFunctionN;
    fn add(self, rhs: &RationalFunctionN) -> RationalFunctionN {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunctionN::normalized(&self.num + &rhs.num, self.den.clone());
        }
        RationalFunctionN::normalized(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunctionN {
    type Output = RationalFunctionN;
    fn sub(self, rhs: &RationalFunctionN) -> RationalFunctionN {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunctionN {
    type Output = RationalFunctionN;
    fn neg(self) -> RationalFunctionN {
        RationalFunctionN {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFunctionN {
    type Output = RationalFunctionN;
    fn mul(self, rhs: &RationalFunctionN) -> RationalFunctionN {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunctionN::zero();
        }
        RationalFunctionN::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Div for &RationalFunctionN {
    type Output = RationalFunctionN;
    /// Panics on division by zero; use [`RationalFunctionN::checked_div`].
    fn div(self, rhs: &RationalFunctionN) -> RationalFunctionN {
        self.checked_div(rhs).expect("division by zero function")
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RationalFunctionN {
            type Output = RationalFunctionN;
            fn $m(self, rhs: RationalFunctionN) -> RationalFunctionN {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl std::iter::Sum for RationalFunctionN {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for RationalFunctionN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl Serialize for RationalFunctionN {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for RationalFunctionN {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}
