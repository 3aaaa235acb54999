//! Leading order in `1/N` of the dipole covariance: Catalan numbers and
//! their resummation.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{catalan, format_rational, int, sqrt_bracket, to_f64, Rational};
use crate::error::{Error, Result};

/// `1 / (8D)`: radius of convergence of the melonic series, reached at
/// `λ = -1/(8D)`.
pub fn critical_constant(d: usize) -> Rational {
    Rational::new(1.into(), (8 * d).into())
}

/// Whether `|λ| < 1/(8D)`.
pub fn within_critical(d: usize, lambda: &Rational) -> bool {
    lambda.abs() < critical_constant(d)
}

/// `(-2D)^p · Catalan(p)`.
pub fn melonic_coefficient(d: usize, p: usize) -> Rational {
    let base = num_traits::pow(int(-2 * d as i64), p);
    base * Rational::from_integer(catalan(p as u64))
}

/// `Σ_{n=1}^{n_max} (-2Dλ)^{n-1} (2n-2)! / ((n-1)! n!)`, exactly.
pub fn melonic_series(d: usize, n_max: usize, lambda: &Rational) -> Rational {
    let mut total = Rational::zero();
    let mut power = Rational::one();
    for n in 1..=n_max {
        total += &power * melonic_coefficient(d, n - 1) / num_traits::pow(int(-2 * d as i64), n - 1);
        power *= lambda * int(-2 * d as i64);
    }
    total
}

/// Rigorous enclosure of a real number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub lo: Rational,
    pub hi: Rational,
}

impl Bracket {
    pub fn mid(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / int(2)))
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Distance from `x` to the bracket, 0 inside.
    pub fn distance(&self, x: &Rational) -> Rational {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            Rational::zero()
        }
    }
}

/// `(-1 + √(1+8Dλ)) / (4Dλ) = 2 / (1 + √(1+8Dλ))`, enclosed to
/// `10^-digits` in the square root.
pub fn melonic_closed_form(d: usize, lambda: &Rational, digits: u32) -> Result<Bracket> {
    let x = Rational::one() + int(8 * d as i64) * lambda;
    if x.is_negative() {
        return Err(Error::Domain(format!(
            "1 + 8Dλ < 0 for λ = {}: past the critical point -1/(8D)",
            format_rational(lambda)
        )));
    }
    let (lo, hi) = sqrt_bracket(&x, digits)?;
    let two = int(2);
    Ok(Bracket {
        lo: &two / (Rational::one() + hi),
        hi: &two / (Rational::one() + lo),
    })
}

/// `|a_{n+1} λ^n / (a_n λ^{n-1})|` for `n = 1..n_max`; tends to `8D|λ|`.
pub fn term_ratios(d: usize, lambda: &Rational, n_max: usize) -> Vec<f64> {
    let x = to_f64(&lambda.abs()) * 2.0 * d as f64;
    (1..=n_max)
        .map(|n| {
            // Catalan(n) / Catalan(n-1) = 2(2n-1)/(n+1)
            x * 2.0 * (2 * n - 1) as f64 / (n + 1) as f64
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MelonicReport {
    #[serde(rename = "D")]
    pub d: usize,
    pub lambda: String,
    pub n_max: usize,
    pub partial_sum: f64,
    pub closed_form: Option<f64>,
    pub difference: Option<f64>,
    pub critical_constant: String,
    pub beyond_critical: bool,
    pub last_term_ratio: f64,
}

/// Largest `n_max` accepted by [`melonic_report`].
pub const MELONIC_MAX_TERMS: usize = 1000;

pub fn melonic_report(d: usize, n_max: usize, lambda: &Rational) -> Result<MelonicReport> {
    if d == 0 {
        return Err(Error::Invalid("D must be positive".into()));
    }
    if n_max > MELONIC_MAX_TERMS {
        return Err(Error::budget("melonic partial sum", n_max as u128, MELONIC_MAX_TERMS as u128));
    }
    let partial = melonic_series(d, n_max, lambda);
    let closed = melonic_closed_form(d, lambda, 40).ok();
    let difference = closed.as_ref().map(|b| to_f64(&b.distance(&partial)));
    Ok(MelonicReport {
        d,
        lambda: format_rational(lambda),
        n_max,
        partial_sum: to_f64(&partial),
        closed_form: closed.as_ref().map(Bracket::mid),
        difference,
        critical_constant: format_rational(&critical_constant(d)),
        beyond_critical: !within_critical(d, lambda),
        last_term_ratio: term_ratios(d, lambda, n_max.max(1)).last().copied().unwrap_or(0.0),
    })
}
