//! Explicit bounds of the mixed expansion, evaluated at a numeric `N0`.
//!
//! `cos(φ/2)` is enclosed by a Taylor polynomial with its remainder; every
//! bound uses the side of the enclosure that makes it larger.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::series::tree_loop_sums;
use crate::algebra::{factorial, format_rational, int, to_f64, Rational};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graphs::ColoredGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub lambda_abs: Rational,
    /// Argument of λ in radians, in `(-π, π)`.
    pub phi: Rational,
    pub n0: Rational,
}

impl BoundParams {
    pub fn new(lambda_abs: Rational, phi: Rational, n0: Rational) -> Result<Self> {
        if lambda_abs.is_negative() {
            return Err(Error::Domain("|λ| must be non-negative".into()));
        }
        if !n0.is_positive() {
            return Err(Error::Domain("N0 must be positive".into()));
        }
        cos_half(&phi)?;
        Ok(BoundParams { lambda_abs, phi, n0 })
    }
}

/// Enclosure `[lo, hi]` of `cos(φ/2)`; refuses `|φ| ≥ π`.
pub fn cos_half(phi: &Rational) -> Result<(Rational, Rational)> {
    let x = phi / int(2);
    // |φ/2| < 1.6 keeps every Taylor term below the previous one.
    if x.abs() >= Rational::new(8.into(), 5.into()) {
        return Err(Error::Domain(format!(
            "φ = {} outside (-π, π)",
            format_rational(phi)
        )));
    }
    let x2 = &x * &x;
    let mut term = Rational::one();
    let mut sum = Rational::zero();
    let terms = 20;
    for j in 0..terms {
        sum += &term;
        term = -term * &x2 / int(((2 * j + 1) * (2 * j + 2)) as i64);
    }
    let err = term.abs();
    let lo = &sum - &err;
    if !lo.is_positive() {
        return Err(Error::Domain(format!(
            "φ = {} outside (-π, π)",
            format_rational(phi)
        )));
    }
    Ok((lo, sum + err))
}

fn fact(n: usize) -> Rational {
    Rational::from_integer(factorial(n as u64))
}

fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// `k! 2^{2Dk}`.
fn prefactor(d: usize, k: usize) -> Rational {
    fact(k) * pow(&int(2), 2 * d * k)
}

fn check_tree(d: usize, n: usize, k: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid("the bounds need D >= 2"));
    }
    if n == 0 || k > n || 2 * n + k < 3 {
        return Err(Error::invalid(format!("no trees with n = {n}, k = {k}")));
    }
    Ok(())
}

/// `|λ|^q / N0^{q(D-2)} · k! 2^{2Dk} D^q · (2n+2q+k-3)! / (q! (2n+k-3)!)`.
pub fn term_bound(p: &BoundParams, d: usize, n: usize, k: usize, q: usize) -> Result<Rational> {
    check_tree(d, n, k)?;
    let base = 2 * n + k - 3;
    Ok(pow(&p.lambda_abs, q) / pow(&p.n0, q * (d - 2))
        * prefactor(d, k)
        * pow(&int(d as i64), q)
        * fact(base + 2 * q)
        / (fact(q) * fact(base)))
}

/// Bound on the rest term `R^{(s)}` of one tree, valid for
/// `|λ| < cos²(φ/2) / (8D)`.
pub fn rest_term_bound(p: &BoundParams, d: usize, n: usize, k: usize, s: usize) -> Result<Rational> {
    check_tree(d, n, k)?;
    if s == 0 {
        return Err(Error::invalid("the rest term needs s >= 1"));
    }
    let (cos_lo, _) = cos_half(&p.phi)?;
    let limit = &cos_lo * &cos_lo / int(8 * d as i64);
    if p.lambda_abs >= limit {
        return Err(Error::Domain(format!(
            "|λ| = {} not below cos²(φ/2)/(8D) ≈ {:.6e}",
            format_rational(&p.lambda_abs),
            to_f64(&limit)
        )));
    }
    let base = 2 * n + k - 3;
    Ok(pow(&p.lambda_abs, s) / pow(&p.n0, s * (d - 2)) * prefactor(d, k) * pow(&int(d as i64), s)
        * fact(base + 2 * s)
        / (fact(s - 1) * fact(base) * pow(&cos_lo, 2 * n + 2 * s + k - 2)))
}

/// Bound on the rest `R^{(s)}_N` of the whole cumulant: the series over
/// `n ≥ k` of the per-tree rest bound times the number of trees, cilium
/// tuples and external edges. Requires `|λ| < cos²(φ/2) / (50 D)`.
pub fn cumulant_rest_bound(p: &BoundParams, d: usize, k: usize, s: usize) -> Result<f64> {
    if s == 0 || d < 2 {
        return Err(Error::invalid("the rest term needs s >= 1 and D >= 2"));
    }
    let (cos_lo, _) = cos_half(&p.phi)?;
    let limit = &cos_lo * &cos_lo / int(50 * d as i64);
    if p.lambda_abs >= limit {
        return Err(Error::Domain(format!(
            "|λ| = {} not below cos²(φ/2)/(50D) ≈ {:.6e}",
            format_rational(&p.lambda_abs),
            to_f64(&limit)
        )));
    }
    let lam = to_f64(&p.lambda_abs);
    let cos = to_f64(&cos_lo);
    let n0 = to_f64(&p.n0);
    let (df, kf, sf) = (d as f64, k as f64, s as f64);
    let taus = ln_fact(k) * df;
    let mut total = 0.0;
    let n_start = if k == 0 { 2 } else { k };
    for n in n_start.. {
        let base = 2 * n + k - 3;
        // ln of |λ|^{n-1}/(n-k)! · #trees · k!^D · R^{(s)} bound
        let trees = (n as f64 - 1.0) * (2.0 * df).ln() + ln_fact(2 * n + k - 3) - ln_fact(n + k - 1);
        let rest = sf * lam.ln() - sf * (df - 2.0) * n0.ln()
            + ln_fact(k)
            + 2.0 * df * kf * std::f64::consts::LN_2
            + sf * df.ln()
            + ln_fact(base + 2 * s)
            - ln_fact(s - 1)
            - ln_fact(base)
            - (2 * n + 2 * s + k - 2) as f64 * cos.ln();
        let ln_term = (n as f64 - 1.0) * lam.ln() - ln_fact(n - k) + trees + taus + rest;
        let term = ln_term.exp();
        total += term;
        if n > k + 10 && term < total * 1e-18 {
            break;
        }
        if n > 100_000 {
            return Err(Error::Domain("rest series did not settle".into()));
        }
    }
    Ok(total)
}

fn ln_fact(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct TermBoundRow {
    pub n: usize,
    pub q: usize,
    pub trees: usize,
    /// Largest `|T^{(q)}|` over the trees at `N0`.
    pub max_term: f64,
    pub bound: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    #[serde(rename = "D")]
    pub d: usize,
    pub k: usize,
    pub lambda_abs: String,
    pub phi: String,
    pub n0: String,
    pub rows: Vec<TermBoundRow>,
    pub rest_term_bound: Option<f64>,
    pub cumulant_rest_bound: Option<f64>,
    pub violations: usize,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Compares every computed `|T^{(q)}|` (`n ≤ n_max`, `q ≤ q_max`) with its
/// bound at `N0`, and evaluates the rest bounds for `s` loops where their
/// domains allow.
pub fn bound_suite(
    b: &ColoredGraph,
    p: &BoundParams,
    n_max: usize,
    q_max: usize,
    s: usize,
    exec: Exec,
) -> Result<BoundReport> {
    let (d, k) = (b.d, b.k);
    let mut rows = Vec::new();
    let mut violations = 0;
    for n in k.max(1)..=n_max {
        for q in 0..=q_max {
            let bound = term_bound(p, d, n, k, q)?;
            let sums = tree_loop_sums(b, n, q, exec)?;
            let scale = pow(&p.lambda_abs, q);
            let mut max_term = Rational::zero();
            let mut bad = 0;
            for t in &sums {
                let v = (t.value.eval(&p.n0)? * &scale).abs();
                if v > bound {
                    bad += 1;
                }
                if v > max_term {
                    max_term = v;
                }
            }
            violations += bad;
            rows.push(TermBoundRow {
                n,
                q,
                trees: sums.len(),
                max_term: to_f64(&max_term),
                bound: to_f64(&bound),
                violations: bad,
            });
        }
    }
    Ok(BoundReport {
        d,
        k,
        lambda_abs: format_rational(&p.lambda_abs),
        phi: format_rational(&p.phi),
        n0: format_rational(&p.n0),
        rows,
        rest_term_bound: rest_term_bound(p, d, k.max(1), k, s).ok().map(|r| to_f64(&r)),
        cumulant_rest_bound: cumulant_rest_bound(p, d, k, s).ok(),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn params(lambda: Rational, phi: Rational) -> BoundParams {
        BoundParams::new(lambda, phi, int(10)).unwrap()
    }

    #[test]
    fn cosine_enclosure() {
        let (lo, hi) = cos_half(&Rational::zero()).unwrap();
        assert_eq!((lo, hi), (int(1), int(1)));
        let (lo, hi) = cos_half(&rat(2, 1)).unwrap();
        let c = 1f64.cos();
        assert!(to_f64(&lo) <= c && c <= to_f64(&hi));
        assert!(&hi - &lo < rat(1, 1_000_000_000_000));
        assert!(cos_half(&rat(22, 7)).is_err());
    }

    #[test]
    fn zero_loop_bound() {
        let p = params(rat(1, 10), Rational::zero());
        assert_eq!(term_bound(&p, 3, 1, 1, 0).unwrap(), int(64));
        assert_eq!(term_bound(&p, 3, 3, 2, 0).unwrap(), int(2 * 4096));
    }

    #[test]
    fn rest_bounds_and_domains() {
        let p = params(rat(1, 200), Rational::zero());
        let r = rest_term_bound(&p, 3, 1, 1, 1).unwrap();
        assert!(r.is_positive());
        let total = cumulant_rest_bound(&p, 3, 1, 1).unwrap();
        assert!(total.is_finite() && total > 0.0);
        let far = params(rat(1, 10), Rational::zero());
        assert!(rest_term_bound(&far, 3, 1, 1, 1).is_err());
        assert!(cumulant_rest_bound(&far, 3, 1, 1).is_err());
        let tilted = params(rat(1, 200), rat(3, 1));
        assert!(cumulant_rest_bound(&tilted, 3, 1, 1).is_err());
    }

    #[test]
    fn small_suite_passes() {
        let p = params(rat(1, 10), Rational::zero());
        let report = bound_suite(&ColoredGraph::dipole(3), &p, 2, 1, 1, Exec::default()).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.rows.len(), 4);
    }
}
