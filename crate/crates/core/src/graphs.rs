//! Bipartite `D`-colored graphs indexing trace invariants, and their
//! Gaussian expectations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, Rational, RationalFunctionN};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::perm::{PermTuple, Permutation};

/// `beta[c](v)` is the black endpoint of the color-`c` edge at white `v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoredGraph {
    pub k: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub beta: PermTuple,
}

impl ColoredGraph {
    pub fn new(beta: PermTuple) -> Result<Self> {
        if beta.d() == 0 {
            return Err(Error::invalid("a colored graph needs at least one color"));
        }
        if beta.k() == 0 {
            return Err(Error::invalid("a colored graph needs k >= 1"));
        }
        Ok(ColoredGraph {
            k: beta.k(),
            d: beta.d(),
            beta,
        })
    }

    /// The unique graph on two vertices: `D` parallel edges.
    pub fn dipole(d: usize) -> Self {
        ColoredGraph {
            k: 1,
            d,
            beta: PermTuple::identity(d, 1),
        }
    }

    /// Parses one cycle string per color, e.g. `["(1,2)", "(1)(2)", "(1)(2)"]`.
    pub fn parse(cycles: &[&str]) -> Result<Self> {
        let k = cycles
            .iter()
            .map(|c| Permutation::parse(c, None).map(|p| p.len()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        Self::new(PermTuple::parse(cycles, k)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: ColoredGraph =
            serde_json::from_str(text).map_err(|e| Error::parse(e.column(), e.to_string()))?;
        if g.beta.k() != g.k || g.beta.d() != g.d {
            return Err(Error::invalid("k or D disagrees with beta"));
        }
        Self::new(g.beta)
    }

    pub fn components(&self) -> usize {
        self.beta.graph_components()
    }

    /// Relabels white vertices by `w` and black vertices by `b`.
    pub fn relabel(&self, w: &Permutation, b: &Permutation) -> Result<Self> {
        let perms = self
            .beta
            .perms()
            .iter()
            .map(|p| b.compose(&p.compose(&w.inverse())?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(PermTuple::new(perms)?)
    }
}

/// Every graph on `k` white vertices with `d` colors, connected or not.
pub fn all_graphs(k: usize, d: usize) -> Vec<ColoredGraph> {
    let elements = Permutation::all(k);
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let perms = idx.iter().map(|&i| elements[i].clone()).collect();
        out.push(ColoredGraph::new(PermTuple::new(perms).unwrap()).unwrap());
        let mut c = d;
        loop {
            if c == 0 {
                return out;
            }
            c -= 1;
            idx[c] += 1;
            if idx[c] < elements.len() {
                break;
            }
            idx[c] = 0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussianMomentResult {
    /// `⟨Tr_B⟩` including the factor `σ^{2k}`.
    pub value: RationalFunctionN,
    /// `value ~ σ^{2k} r N^{1 - omega}`.
    pub omega: i64,
    #[serde(with = "crate::algebra::rational_text")]
    pub r: Rational,
}

pub const GAUSSIAN_MAX_K: usize = 7;

/// Expectation of the trace invariant `B` under the Gaussian measure of
/// covariance `σ² N^{-(D-1)}`: a sum over Wick pairings `γ ∈ S_k`.
pub fn gaussian_expectation(b: &ColoredGraph, sigma2: &Rational) -> Result<GaussianMomentResult> {
    gaussian_expectation_with(b, sigma2, Exec::default())
}

pub fn gaussian_expectation_with(
    b: &ColoredGraph,
    sigma2: &Rational,
    exec: Exec,
) -> Result<GaussianMomentResult> {
    if b.k > GAUSSIAN_MAX_K {
        return Err(Error::budget(
            "gaussian_expectation",
            (1..=b.k as u128).product(),
            (1..=GAUSSIAN_MAX_K as u128).product(),
        ));
    }
    if b.components() != 1 {
        return Err(Error::invalid("gaussian_expectation needs a connected graph"));
    }
    let pairings = Permutation::all(b.k);
    let base = -((b.k * (b.d - 1)) as i64);
    let hist: BTreeMap<i64, u64> = exec.map_reduce(
        &pairings,
        BTreeMap::new,
        |gamma| {
            let inv = gamma.inverse();
            let faces: usize = b
                .beta
                .perms()
                .iter()
                .map(|beta| inv.compose(beta).expect("same k").cycle_count())
                .sum();
            BTreeMap::from([(base + faces as i64, 1u64)])
        },
        |mut a, b| {
            for (e, c) in b {
                *a.entry(e).or_default() += c;
            }
            a
        },
    );
    let coeffs: Vec<(i64, Rational)> = hist
        .into_iter()
        .map(|(e, c)| (e, Rational::from_integer(c.into())))
        .collect();
    let plain = RationalFunctionN::laurent(coeffs.iter().map(|(e, c)| (*e, c)));
    let scale = sigma2.pow(b.k as i32);
    let value = plain.scale(&scale);
    let (deg, lead) = plain.large_n()?;
    Ok(GaussianMomentResult {
        value,
        omega: 1 - deg,
        r: lead,
    })
}

/// Rescales a raw cumulant: `raw / N^{-2(D-1)k + D - C(B)}`.
pub fn rescale_cumulant(raw: &RationalFunctionN, b: &ColoredGraph, components: usize) -> RationalFunctionN {
    let e = 2 * ((b.d - 1) * b.k) as i64 - b.d as i64 + components as i64;
    raw * &RationalFunctionN::monomial(crate::algebra::int(1), e)
}

impl std::fmt::Display for ColoredGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "k={} D={} beta={}", self.k, self.d, self.beta)
    }
}

impl GaussianMomentResult {
    pub fn summary(&self) -> String {
        format!(
            "value = {}, omega = {}, r = {}",
            self.value.to_text(),
            self.omega,
            format_rational(&self.r)
        )
    }
}
