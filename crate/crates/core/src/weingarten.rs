//! Unitary Weingarten functions as exact rational functions of `N`.
//!
//! `Wg(N, ·)` is the convolution inverse of `σ ↦ N^{C(σ)}` on `S_k`. Both are
//! class functions, so the inversion reduces to one linear system with a
//! row and a column per partition of `k`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::algebra::{catalan, format_rational, Poly, Rational, RationalFunctionN};
use crate::error::{Error, Result};
use crate::perm::{Permutation, SymmetricGroup};

/// Partitions of `k` as non-increasing part lists, in reverse lexicographic
/// order (`[k]` first, `[1, ..., 1]` last).
pub fn partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rest.min(max)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out
}

/// A permutation with the given cycle type, cycles on consecutive points.
pub fn permutation_of_type(parts: &[usize]) -> Permutation {
    let k: usize = parts.iter().sum();
    let mut cycles = Vec::new();
    let mut next = 0;
    for &p in parts {
        cycles.push((next..next + p).collect());
        next += p;
    }
    Permutation::from_cycles(k, &cycles).expect("disjoint cycles")
}

pub fn partition_key(parts: &[usize]) -> String {
    parts
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeingartenTable {
    pub k: usize,
    /// Keyed by the cycle type written `"3,1"`.
    pub entries: BTreeMap<String, RationalFunctionN>,
}

impl WeingartenTable {
    pub fn get(&self, parts: &[usize]) -> Option<&RationalFunctionN> {
        self.entries.get(&partition_key(parts))
    }

    pub fn wg(&self, sigma: &Permutation) -> &RationalFunctionN {
        assert_eq!(sigma.len(), self.k, "permutation size");
        self.get(&sigma.cycle_type()).expect("every cycle type is tabulated")
    }
}

pub const WG_MAX_K: usize = 6;

/// Solves the class-function Gram system for `Wg(N, ·)` on `S_k`.
pub fn weingarten_table(k: usize) -> Result<WeingartenTable> {
    if k > WG_MAX_K {
        return Err(Error::budget(
            "weingarten_table",
            (1..=k as u128).product::<u128>().pow(2),
            (1..=WG_MAX_K as u128).product::<u128>().pow(2),
        ));
    }
    let parts = partitions(k);
    let p = parts.len();
    let index: BTreeMap<Vec<usize>, usize> = parts.iter().cloned().zip(0..).collect();
    let elements = Permutation::all(k);
    // A[λ][μ] = Σ_{τ of type μ} N^{C(σ_λ τ^{-1})}
    let mut counts = vec![vec![vec![0i64; k + 1]; p]; p];
    for (row, lam) in parts.iter().enumerate() {
        let sigma = permutation_of_type(lam);
        for tau in &elements {
            let col = index[&tau.cycle_type()];
            let c = sigma.compose(&tau.inverse()).expect("same k").cycle_count();
            counts[row][col][c] += 1;
        }
    }
    let mut a: Vec<Vec<RationalFunctionN>> = counts
        .iter()
        .map(|row| {
            row.iter()
                .map(|coeffs| RationalFunctionN::from_poly(Poly::from_i64(coeffs)))
                .collect()
        })
        .collect();
    let id_row = index[&vec![1; k]];
    let mut b: Vec<RationalFunctionN> = (0..p)
        .map(|r| {
            if r == id_row {
                RationalFunctionN::one()
            } else {
                RationalFunctionN::zero()
            }
        })
        .collect();
    let x = solve(&mut a, &mut b)?;
    let entries = parts
        .iter()
        .zip(x)
        .map(|(lam, w)| (partition_key(lam), w))
        .collect();
    Ok(WeingartenTable { k, entries })
}

/// Gaussian elimination over `Q(N)`.
fn solve(a: &mut [Vec<RationalFunctionN>], b: &mut [RationalFunctionN]) -> Result<Vec<RationalFunctionN>> {
    let p = b.len();
    for col in 0..p {
        let pivot = (col..p)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::invalid("singular Gram system"))?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = RationalFunctionN::one().checked_div(&a[col][col])?;
        for j in col..p {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..p {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in col..p {
                let t = &f * &a[col][j];
                a[r][j] = &a[r][j] - &t;
            }
            let t = &f * &b[col];
            b[r] = &b[r] - &t;
        }
    }
    Ok(b.to_vec())
}

/// `lim N^{2k - C(σ)} Wg(N, σ) = Π_cycles (-1)^{|c|-1} Catalan(|c| - 1)`.
pub fn wg_asymptotic(sigma: &Permutation) -> Rational {
    sigma
        .cycle_type()
        .iter()
        .fold(Rational::one(), |acc, &len| {
            let sign = if len % 2 == 0 { -1 } else { 1 };
            acc * Rational::from_integer(catalan(len as u64 - 1) * BigInt::from(sign))
        })
}

/// Residual count of the symbolic Gram identity
/// `Σ_τ N^{C(στ^{-1})} Wg(τρ^{-1}) = δ_{σρ}` over all `σ, ρ ∈ S_k`.
/// Returns the number of `(σ, ρ)` pairs checked; errors on any mismatch.
pub fn verify_gram_identity(table: &WeingartenTable) -> Result<usize> {
    let k = table.k;
    let g = SymmetricGroup::new(k)?;
    let order = g.order();
    let parts = partitions(k);
    let class_of: Vec<usize> = g
        .elements
        .iter()
        .map(|p| parts.iter().position(|x| *x == p.cycle_type()).unwrap())
        .collect();
    let wg: Vec<&RationalFunctionN> = parts.iter().map(|x| table.get(x).unwrap()).collect();
    let mut checked = 0;
    for sigma in 0..order {
        for rho in 0..order {
            // group by (cycle count, class) before touching rational functions
            let mut bins: BTreeMap<(usize, usize), i64> = BTreeMap::new();
            let rho_inv = g.inv(rho);
            for tau in 0..order {
                let c = g.cycles(g.mul(sigma, g.inv(tau)));
                let cls = class_of[g.mul(tau, rho_inv)];
                *bins.entry((c, cls)).or_default() += 1;
            }
            let mut total = RationalFunctionN::zero();
            for ((c, cls), count) in bins {
                let term = RationalFunctionN::monomial(Rational::from_integer(count.into()), c as i64);
                total = &total + &(&term * wg[cls]);
            }
            let expected = if sigma == rho {
                RationalFunctionN::one()
            } else {
                RationalFunctionN::zero()
            };
            if total != expected {
                return Err(Error::invalid(format!(
                    "Gram identity fails at σ = {}, ρ = {}",
                    g.elements[sigma], g.elements[rho]
                )));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub cycle_type: String,
    pub value: String,
    pub abs_value: f64,
    pub bound: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundMarginReport {
    pub k: usize,
    pub n0: String,
    pub rows: Vec<BoundRow>,
    pub all_hold: bool,
}

/// Compares `|Wg(N0, σ)|` with `2^{2k} / N0^{2k - C(σ)}` for every cycle type.
pub fn wg_bound_margin(k: usize, n0: &Rational) -> Result<BoundMarginReport> {
    if n0 <= &Rational::from_integer(BigInt::from(k)) {
        return Err(Error::Domain(format!(
            "N0 = {} must exceed k = {k}",
            format_rational(n0)
        )));
    }
    let table = weingarten_table(k)?;
    let mut rows = Vec::new();
    for parts in partitions(k) {
        let w = table.get(&parts).unwrap().eval(n0)?;
        let c = parts.len();
        let bound = Rational::from_integer(BigInt::from(2).pow(2 * k as u32))
            / n0.pow((2 * k - c) as i32);
        let holds = w.abs() < bound;
        rows.push(BoundRow {
            cycle_type: partition_key(&parts),
            value: format_rational(&w),
            abs_value: crate::algebra::to_f64(&w.abs()),
            bound: format_rational(&bound),
            holds,
        });
    }
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(BoundMarginReport {
        k,
        n0: format_rational(n0),
        rows,
        all_hold,
    })
}

/// Checks `large_n(Wg(σ)) = (-(2k - C(σ)), wg_asymptotic(σ))` on every class.
pub fn asymptotics_match(table: &WeingartenTable) -> Result<bool> {
    for parts in partitions(table.k) {
        let sigma = permutation_of_type(&parts);
        let (deg, lead) = table.get(&parts).unwrap().large_n()?;
        let expected = -((2 * table.k - parts.len()) as i64);
        if deg != expected || lead != wg_asymptotic(&sigma) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    fn f(num: &[i64], den: &[i64]) -> RationalFunctionN {
        RationalFunctionN::new(Poly::from_i64(num), Poly::from_i64(den)).unwrap()
    }

    #[test]
    fn partition_lists() {
        assert_eq!(partitions(3), vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions(5).len(), 7);
        assert_eq!(partitions(6).len(), 11);
    }

    #[test]
    fn small_tables() {
        let t1 = weingarten_table(1).unwrap();
        assert_eq!(t1.get(&[1]).unwrap(), &f(&[1], &[0, 1]));
        let t2 = weingarten_table(2).unwrap();
        assert_eq!(t2.get(&[1, 1]).unwrap(), &f(&[1], &[-1, 0, 1]));
        assert_eq!(t2.get(&[2]).unwrap(), &f(&[-1], &[0, -1, 0, 1]));
    }

    #[test]
    fn k3_values() {
        // Wg(3-cycle) = 2 / (N (N^2 - 1)(N^2 - 4))
        let t = weingarten_table(3).unwrap();
        assert_eq!(t.get(&[3]).unwrap(), &f(&[2], &[0, 4, 0, -5, 0, 1]));
        assert!(asymptotics_match(&t).unwrap());
    }

    #[test]
    fn asymptotic_values() {
        assert_eq!(wg_asymptotic(&Permutation::identity(4)), int(1));
        assert_eq!(wg_asymptotic(&Permutation::parse("(1,2)", None).unwrap()), int(-1));
        assert_eq!(wg_asymptotic(&Permutation::parse("(1,2,3)", None).unwrap()), int(2));
    }

    #[test]
    fn gram_identity_small() {
        for k in 1..=3 {
            let t = weingarten_table(k).unwrap();
            assert_eq!(verify_gram_identity(&t).unwrap(), (1..=k).product::<usize>().pow(2));
        }
    }

    #[test]
    fn bound_margins() {
        assert!(wg_bound_margin(1, &int(2)).unwrap().all_hold);
        assert!(wg_bound_margin(2, &int(10)).unwrap().all_hold);
        let r = wg_bound_margin(3, &int(4)).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(wg_bound_margin(2, &int(2)).is_err());
        assert!(wg_bound_margin(2, &rat(5, 2)).is_ok());
    }
}
