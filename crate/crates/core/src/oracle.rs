//! Brute-force perturbation theory: Wick contraction of the Gaussian
//! measure against powers of the quartic interaction, with every index loop
//! tracked exactly.
//!
//! Slots: `T`-slots and `T̄`-slots `0..k` are external, `k + 2v` and
//! `k + 2v + 1` are the `n`/`m` (resp. `n̄`/`m̄`) legs of vertex `v`. A vertex
//! of color `i` glues `n` to `n̄` and `m` to `m̄` on colors `c ≠ i`, and `n`
//! to `m̄`, `m` to `n̄` on color `i`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{factorial, format_rational, int, to_f64, Rational, RationalFunctionN};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::expansion::melonic::{critical_constant, melonic_closed_form};
use crate::expansion::{assemble_series, CumulantSeries, Truncation};
use crate::graphs::{rescale_cumulant, ColoredGraph};
use crate::perm::{PermTuple, Permutation};

/// Largest number of (pairing, vertex-color tuple) pairs the oracle visits.
pub const ORACLE_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeynmanConfig {
    pub d: usize,
    pub graph: ColoredGraph,
    pub max_order: usize,
}

impl FeynmanConfig {
    pub fn new(graph: ColoredGraph, max_order: usize) -> Result<Self> {
        if graph.k > 2 {
            return Err(Error::invalid(format!(
                "the oracle separates delta patterns only for k <= 2, got k = {}",
                graph.k
            )));
        }
        if graph.d < 2 {
            return Err(Error::invalid("the oracle needs D >= 2"));
        }
        Ok(FeynmanConfig {
            d: graph.d,
            graph,
            max_order,
        })
    }
}

/// `Σ_{p ≤ m} D^p (k + 2p)!`, plus the vacuum diagrams.
pub fn pairing_estimate(d: usize, k: usize, m: usize) -> u128 {
    let mut total: u128 = 0;
    for p in 0..=m {
        let colors = (d as u128).saturating_pow(p as u32);
        for kk in [k, 0] {
            let pairings: u128 = (1..=(kk + 2 * p) as u128).product();
            total = total.saturating_add(colors.saturating_mul(pairings));
        }
    }
    total
}

/// Integer counts per (λ-power, delta pattern, N-exponent).
type Counts = BTreeMap<(usize, Vec<Vec<usize>>, i64), i128>;

struct Tally {
    all: Counts,
    connected: Counts,
}

/// Enumerates every Wick pairing at order `p` with `k` external pairs.
fn tally_order(d: usize, k: usize, p: usize, exec: Exec) -> Tally {
    let s = k + 2 * p;
    let n_colors = d.pow(p as u32);
    let tuples: Vec<usize> = (0..n_colors).collect();
    let empty = || Tally {
        all: Counts::new(),
        connected: Counts::new(),
    };
    exec.map_reduce(
        &tuples,
        empty,
        |&code| {
            let mut vertex_color = vec![0; p];
            let mut c = code;
            for v in vertex_color.iter_mut() {
                *v = c % d;
                c /= d;
            }
            let mut out = empty();
            let mut pi: Vec<usize> = (0..s).collect();
            let mut inv = vec![0; s];
            let mut g = vec![0; s];
            let mut seen = vec![false; s];
            loop {
                for (a, &b) in pi.iter().enumerate() {
                    inv[b] = a;
                }
                let mut pattern = Vec::with_capacity(d);
                let mut closed = 0i64;
                for c in 0..d {
                    for a in 0..s {
                        let bar = if a < k {
                            a
                        } else {
                            let v = (a - k) / 2;
                            if vertex_color[v] == c {
                                k + ((a - k) ^ 1)
                            } else {
                                a
                            }
                        };
                        g[a] = inv[bar];
                    }
                    seen.iter_mut().for_each(|x| *x = false);
                    let mut rho = vec![0; k];
                    for l in 0..k {
                        let mut x = g[l];
                        while x >= k {
                            seen[x] = true;
                            x = g[x];
                        }
                        rho[l] = x;
                    }
                    for a in k..s {
                        if seen[a] {
                            continue;
                        }
                        closed += 1;
                        let mut x = a;
                        while !seen[x] {
                            seen[x] = true;
                            x = g[x];
                        }
                    }
                    pattern.push(rho);
                }
                let e = (d as i64 - 1) * (p as i64 - s as i64) + closed;
                *out.all.entry((p, pattern.clone(), e)).or_insert(0) += 1;
                if connected(k, p, &pi) {
                    *out.connected.entry((p, pattern, e)).or_insert(0) += 1;
                }
                if !next_permutation(&mut pi) {
                    break;
                }
            }
            out
        },
        |mut a, b| {
            for (key, v) in b.all {
                *a.all.entry(key).or_insert(0) += v;
            }
            for (key, v) in b.connected {
                *a.connected.entry(key).or_insert(0) += v;
            }
            a
        },
    )
}

/// Whether the diagram is connected, externals counted as separate nodes.
fn connected(k: usize, p: usize, pi: &[usize]) -> bool {
    let nodes = 2 * k + p;
    if nodes == 0 {
        return true;
    }
    let owner_t = |a: usize| if a < k { a } else { 2 * k + (a - k) / 2 };
    let owner_b = |b: usize| if b < k { k + b } else { 2 * k + (b - k) / 2 };
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut comps = nodes;
    for (a, &b) in pi.iter().enumerate() {
        let (x, y) = (find(&mut parent, owner_t(a)), find(&mut parent, owner_b(b)));
        if x != y {
            parent[x] = y;
            comps -= 1;
        }
    }
    comps == 1
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

type Series = Vec<RationalFunctionN>;
type PatternSeries = BTreeMap<Vec<Vec<usize>>, Series>;

fn to_series(counts: &Counts, m: usize) -> PatternSeries {
    let mut out = PatternSeries::new();
    for ((p, pattern, e), &c) in counts {
        let sign = if p % 2 == 0 { 1 } else { -1 };
        let coef = Rational::new((c * sign).into(), factorial(*p as u64));
        let entry = out
            .entry(pattern.clone())
            .or_insert_with(|| vec![RationalFunctionN::zero(); m + 1]);
        entry[*p] = &entry[*p] + &RationalFunctionN::monomial(coef, *e);
    }
    out
}

fn mul_series(a: &Series, b: &Series) -> Series {
    let m = a.len().min(b.len());
    (0..m)
        .map(|p| (0..=p).map(|i| &a[i] * &b[p - i]).sum())
        .collect()
}

/// `a / b` as formal power series, `b[0] = 1`.
fn div_series(a: &Series, b: &Series) -> Series {
    let mut q: Series = Vec::with_capacity(a.len());
    for p in 0..a.len() {
        let mut x = a[p].clone();
        for i in 1..=p {
            x = &x - &(&b[i] * &q[p - i]);
        }
        q.push(x);
    }
    q
}

/// Raw cumulants and connected-diagram sums per delta pattern.
struct RawCumulants {
    cumulants: PatternSeries,
    connected: PatternSeries,
}

fn raw_cumulants(d: usize, k: usize, m: usize, exec: Exec) -> Result<RawCumulants> {
    let estimate = pairing_estimate(d, k, m);
    if estimate > ORACLE_BUDGET {
        return Err(Error::budget(
            format!("Wick pairings for D = {d}, k = {k} up to λ^{m}"),
            estimate,
            ORACLE_BUDGET,
        ));
    }
    let mut moments = Counts::new();
    let mut vacuum = Counts::new();
    let mut connected = Counts::new();
    for p in 0..=m {
        let t = tally_order(d, k, p, exec);
        moments.extend(t.all);
        connected.extend(t.connected);
        vacuum.extend(tally_order(d, 0, p, exec).all);
    }
    let z = to_series(&vacuum, m).remove(&vec![Vec::new(); d]).expect("the empty diagram");
    let mut cumulants: PatternSeries = to_series(&moments, m)
        .into_iter()
        .map(|(pat, s)| (pat, div_series(&s, &z)))
        .collect();
    if k == 2 {
        let two = raw_cumulants(d, 1, m, exec)?;
        let g = &two.cumulants[&vec![vec![0]; d]];
        let gg = mul_series(g, g);
        for pat in [vec![vec![0, 1]; d], vec![vec![1, 0]; d]] {
            let entry = cumulants
                .entry(pat)
                .or_insert_with(|| vec![RationalFunctionN::zero(); m + 1]);
            for (x, y) in entry.iter_mut().zip(&gg) {
                *x = &*x - y;
            }
        }
    }
    Ok(RawCumulants {
        cumulants,
        connected: to_series(&connected, m),
    })
}

/// The graph whose delta pattern links `T̄_l` to `T_{rho(l)}`.
fn pattern_graph(pattern: &[Vec<usize>]) -> Result<ColoredGraph> {
    let perms = pattern
        .iter()
        .map(|rho| Permutation::from_images(rho.clone()).map(|p| p.inverse()))
        .collect::<Result<Vec<_>>>()?;
    ColoredGraph::new(PermTuple::new(perms)?)
}

fn graph_pattern(b: &ColoredGraph) -> Vec<Vec<usize>> {
    b.beta.perms().iter().map(|p| p.inverse().images().to_vec()).collect()
}

fn finish(b: &ColoredGraph, raw: &Series, m: usize) -> CumulantSeries {
    let components = b.components();
    let coefficients = (b.k - 1..=m)
        .map(|p| (p, rescale_cumulant(&raw[p], b, components)))
        .collect();
    CumulantSeries {
        source: "oracle".into(),
        graph: b.clone(),
        d: b.d,
        coefficients,
        truncation: Truncation { m, s: None },
        budget_report: None,
    }
}

/// `K(B, N)` to order `λ^m` by Wick contraction, normalized by the vacuum
/// series and with the disconnected two-point products removed for `k = 2`.
pub fn perturbative_cumulant(cfg: &FeynmanConfig, exec: Exec) -> Result<CumulantSeries> {
    let b = &cfg.graph;
    let raw = raw_cumulants(cfg.d, b.k, cfg.max_order, exec)?;
    let zero = vec![RationalFunctionN::zero(); cfg.max_order + 1];
    let series = raw.cumulants.get(&graph_pattern(b)).unwrap_or(&zero);
    Ok(finish(b, series, cfg.max_order))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectednessReport {
    #[serde(rename = "D")]
    pub d: usize,
    pub k: usize,
    pub m: usize,
    /// Delta patterns carrying a nonzero cumulant.
    pub patterns: usize,
    /// Patterns where cumulant and connected-diagram sum differ, or where a
    /// power below `λ^{k-1}` survives.
    pub mismatches: Vec<String>,
}

impl ConnectednessReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares the moment–cumulant extraction with the direct sum over
/// connected diagrams, pattern by pattern.
pub fn connectedness_check(d: usize, k: usize, m: usize, exec: Exec) -> Result<ConnectednessReport> {
    if k == 0 || k > 2 || d < 2 {
        return Err(Error::invalid("the connectedness check covers D >= 2 and k in {1, 2}"));
    }
    let raw = raw_cumulants(d, k, m, exec)?;
    let zero = vec![RationalFunctionN::zero(); m + 1];
    let mut mismatches = Vec::new();
    let mut patterns = 0;
    let keys: std::collections::BTreeSet<_> = raw.cumulants.keys().chain(raw.connected.keys()).collect();
    for pat in keys {
        let a = raw.cumulants.get(pat).unwrap_or(&zero);
        let b = raw.connected.get(pat).unwrap_or(&zero);
        let g = pattern_graph(pat)?;
        if a.iter().any(|x| !x.is_zero()) {
            patterns += 1;
        }
        for p in 0..=m {
            if a[p] != b[p] {
                mismatches.push(format!("{}: λ^{p} cumulant {} vs connected {}", g.beta, a[p], b[p]));
            } else if p + 1 < k && !a[p].is_zero() {
                mismatches.push(format!("{}: λ^{p} should vanish, got {}", g.beta, a[p]));
            }
        }
    }
    Ok(ConnectednessReport {
        d,
        k,
        m,
        patterns,
        mismatches,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleComparison {
    #[serde(rename = "D")]
    pub d: usize,
    pub graph: String,
    pub m: usize,
    pub expansion: CumulantSeries,
    pub oracle: CumulantSeries,
    /// λ-powers whose coefficients differ.
    pub mismatched_powers: Vec<usize>,
}

impl OracleComparison {
    pub fn passed(&self) -> bool {
        self.mismatched_powers.is_empty()
    }
}

/// Runs both the tree expansion and the Wick oracle on `b` to `λ^m`.
pub fn compare_with_expansion(b: &ColoredGraph, m: usize, exec: Exec) -> Result<OracleComparison> {
    let oracle = perturbative_cumulant(&FeynmanConfig::new(b.clone(), m)?, exec)?;
    let expansion = assemble_series(b, m, exec)?;
    let powers: std::collections::BTreeSet<usize> =
        oracle.coefficients.keys().chain(expansion.coefficients.keys()).copied().collect();
    let zero = RationalFunctionN::zero();
    let mismatched_powers = powers
        .into_iter()
        .filter(|p| oracle.coefficient(*p).unwrap_or(&zero) != expansion.coefficient(*p).unwrap_or(&zero))
        .collect();
    Ok(OracleComparison {
        d: b.d,
        graph: b.beta.to_string(),
        m,
        expansion,
        oracle,
        mismatched_powers,
    })
}

/// Checks the loop-insertion normalization at `λ¹` against the oracle, for
/// the dipole and for the first `k = 2` graph with one crossed color. Cheap
/// enough to run before every higher-order assembly.
pub fn loop_convention_self_test(d: usize, exec: Exec) -> Result<bool> {
    let mut perms = vec![Permutation::identity(2); d];
    perms[0] = Permutation::from_images(vec![1, 0])?;
    let crossed = ColoredGraph::new(PermTuple::new(perms)?)?;
    for b in [ColoredGraph::dipole(d), crossed] {
        if !compare_with_expansion(&b, 1, exec)?.passed() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalityReport {
    #[serde(rename = "D")]
    pub d: usize,
    pub graph: String,
    pub lambda: String,
    pub m: usize,
    /// `(λ-power, N-degree, leading coefficient)` of every computed
    /// coefficient of `K(B, N)`.
    pub degrees: Vec<(usize, i64, String)>,
    /// Powers whose degree exceeds 0, the rescaled form of the scaling bound.
    pub degree_violations: Vec<usize>,
    /// `Σ_p lim_N [λ^p] K · λ^p` (dipole only).
    pub covariance_limit: Option<f64>,
    pub closed_form: Option<f64>,
    /// `(8D|λ|)^{m+1} / (1 - 8D|λ|)`, bounding the neglected orders.
    pub truncation_bound: Option<f64>,
    pub covariance_ok: Option<bool>,
}

impl UniversalityReport {
    pub fn passed(&self) -> bool {
        self.degree_violations.is_empty() && self.covariance_ok != Some(false)
    }
}

/// Assembles `K(B, N)` to `λ^m`, checks that no coefficient grows with `N`,
/// and for the dipole compares the large-`N` covariance with the melonic
/// closed form.
pub fn universality_check(b: &ColoredGraph, lambda: &Rational, m: usize, exec: Exec) -> Result<UniversalityReport> {
    let d = b.d;
    let crit = critical_constant(d);
    if lambda.abs() >= crit {
        return Err(Error::Domain(format!(
            "|λ| = {} not below 1/(8D) = {}",
            format_rational(lambda),
            format_rational(&crit)
        )));
    }
    let series = assemble_series(b, m, exec)?;
    let mut degrees = Vec::new();
    let mut degree_violations = Vec::new();
    let mut limit = Rational::zero();
    for (&p, c) in &series.coefficients {
        if c.is_zero() {
            continue;
        }
        let (deg, lead) = c.large_n()?;
        if deg > 0 {
            degree_violations.push(p);
        }
        if deg == 0 {
            limit += &lead * num_traits::pow(lambda.clone(), p);
        }
        degrees.push((p, deg, format_rational(&lead)));
    }
    let dipole = b.k == 1;
    let (covariance_limit, closed_form, truncation_bound, covariance_ok) = if dipole {
        let closed = melonic_closed_form(d, lambda, 30)?;
        let x = int(8 * d as i64) * lambda.abs();
        let tail = num_traits::pow(x.clone(), m + 1) / (int(1) - x);
        let ok = closed.distance(&limit) <= &tail + closed.width();
        (Some(to_f64(&limit)), Some(closed.mid()), Some(to_f64(&tail)), Some(ok))
    } else {
        (None, None, None, None)
    };
    Ok(UniversalityReport {
        d,
        graph: b.beta.to_string(),
        lambda: format_rational(lambda),
        m,
        degrees,
        degree_violations,
        covariance_limit,
        closed_form,
        truncation_bound,
        covariance_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn vacuum_normalization() {
        let raw = raw_cumulants(3, 1, 1, Exec::Sequential).unwrap();
        assert_eq!(raw.cumulants.len(), 1);
        let k = &raw.cumulants[&vec![vec![0]; 3]];
        assert_eq!(k[0], RationalFunctionN::monomial(int(1), -2));
    }

    #[test]
    fn dipole_first_orders() {
        for d in [3usize, 4] {
            let cfg = FeynmanConfig::new(ColoredGraph::dipole(d), 2).unwrap();
            let s = perturbative_cumulant(&cfg, Exec::Sequential).unwrap();
            assert_eq!(s.coefficient(0).unwrap(), &RationalFunctionN::one());
            let dd = d as i64;
            let one = s.coefficient(1).unwrap();
            assert_eq!(one.large_n().unwrap(), (0, int(-2 * dd)));
            let lead = one.laurent_terms().unwrap();
            assert!(lead.iter().all(|(_, c)| (c / int(dd)).is_integer()));
            assert_eq!(s.coefficient(2).unwrap().large_n().unwrap(), (0, int(8 * dd * dd)));
        }
    }

    #[test]
    fn disconnected_diagrams_cancel() {
        for k in [1, 2] {
            let r = connectedness_check(3, k, 2, Exec::Parallel).unwrap();
            assert!(r.passed(), "{:?}", r.mismatches);
            assert!(r.patterns > 0);
        }
    }

    #[test]
    fn matches_expansion_for_dipole() {
        let c = compare_with_expansion(&ColoredGraph::dipole(3), 2, Exec::Parallel).unwrap();
        assert!(c.passed(), "{:?}", c.mismatched_powers);
    }

    #[test]
    fn self_test_passes() {
        assert!(loop_convention_self_test(3, Exec::Sequential).unwrap());
        assert!(loop_convention_self_test(4, Exec::Parallel).unwrap());
    }

    #[test]
    fn budget_and_validation() {
        let b = ColoredGraph::parse(&["(1,2)", "(1)(2)", "(1)(2)"]).unwrap();
        assert!(perturbative_cumulant(&FeynmanConfig::new(b, 5).unwrap(), Exec::Sequential)
            .unwrap_err()
            .is_budget());
        let three = ColoredGraph::parse(&["(1,2,3)", "(1)(2)(3)", "(1)(2)(3)"]).unwrap();
        assert!(FeynmanConfig::new(three, 1).is_err());
    }

    #[test]
    fn universality_for_small_coupling() {
        let r = universality_check(&ColoredGraph::dipole(3), &rat(1, 100), 2, Exec::Parallel).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!((r.closed_form.unwrap() - 0.946_274).abs() < 1e-6);
        let zero = universality_check(&ColoredGraph::dipole(3), &Rational::zero(), 1, Exec::Parallel).unwrap();
        assert_eq!(zero.covariance_limit, Some(1.0));
        assert!(universality_check(&ColoredGraph::dipole(3), &rat(1, 24), 1, Exec::Parallel).is_err());
    }
}
