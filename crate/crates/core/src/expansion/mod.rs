//! The mixed expansion: single terms, exact λ-series of rescaled cumulants,
//! explicit bounds and the melonic resummation.
//!
//! A term is attached to a plane tree with external edges `τ` and `q` loop
//! edges:
//!
//! `T = (-1)^q / q! · k! · Π_c Wg(τ_c σ_c(B)⁻¹) · ∫ Π_p w^{j_p j_p'} · N^E`,
//! `E = -D + 2k(D-1) + C(B) - (k+n-1)(D-1) - q(D-1) + |F|`,
//!
//! and contributes `(-1)^{n-1} / (n-k)! · T` to the coefficient of
//! `λ^{n-1+q}` in `K(B, N)`.

pub mod bounds;
mod fast;
pub mod melonic;
mod series;
mod w;

pub use series::{
    assemble_series, assemble_series_capped, tree_loop_sums, BudgetReport, CumulantSeries, TreeLoopSum,
    Truncation, SERIES_BUDGET,
};
pub use w::{w_integral, w_integral_by_orderings, W_MAX_EDGES};

use serde::Serialize;

use crate::algebra::{factorial, Rational, RationalFunctionN};
use crate::error::{Error, Result};
use crate::graphs::ColoredGraph;
use crate::trees::{CiliumOrigin, DecoratedTree};
use crate::weingarten::{weingarten_table, WeingartenTable};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExpansionTerm {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    pub lambda_power: usize,
    /// `T^{EL,(q)}` without the factor `λ^q`.
    pub coefficient: RationalFunctionN,
    /// `walk | annotation | tau | loops`.
    pub provenance: String,
}

impl ExpansionTerm {
    /// `(-1)^{n-1} / (n-k)!`, the weight of the term in the series.
    pub fn series_weight(&self) -> Rational {
        let sign: i64 = if (self.n - 1).is_multiple_of(2) { 1 } else { -1 };
        Rational::new(sign.into(), factorial((self.n - self.k) as u64))
    }

    pub fn series_contribution(&self) -> RationalFunctionN {
        self.coefficient.scale(&self.series_weight())
    }
}

/// `(j_p, j_p')` for every loop edge: the vertices carrying its two cilia.
pub fn loop_vertex_pairs(d: &DecoratedTree) -> Vec<(usize, usize)> {
    let mut pairs = vec![(0, 0); d.loops().len()];
    let cilia = d.walk().iter().filter(|s| s.cilium);
    for (s, o) in cilia.zip(d.origins()) {
        if let CiliumOrigin::Inserted(r) = *o {
            if r % 2 == 0 {
                pairs[r / 2].0 = s.vertex;
            } else {
                pairs[r / 2].1 = s.vertex;
            }
        }
    }
    pairs
}

/// `-D + 2k(D-1) + C(B) - (k+n-1)(D-1) - q(D-1) + |F|`.
pub(crate) fn n_exponent(d: usize, k: usize, n: usize, q: usize, components: usize, faces: usize) -> i64 {
    let (d, k, n, q) = (d as i64, k as i64, n as i64, q as i64);
    -d + 2 * k * (d - 1) + components as i64 - (k + n - 1) * (d - 1) - q * (d - 1) + faces as i64
}

pub fn term_value(d: &DecoratedTree, b: &ColoredGraph) -> Result<ExpansionTerm> {
    let table = weingarten_table(b.k)?;
    term_value_with(d, b, &table)
}

pub fn term_value_with(dt: &DecoratedTree, b: &ColoredGraph, table: &WeingartenTable) -> Result<ExpansionTerm> {
    let base = dt.base();
    let (n, k, q) = (base.n(), base.k(), dt.loops().len());
    if k != b.k || table.k != b.k {
        return Err(Error::SizeMismatch {
            expected: b.k,
            found: k,
        });
    }
    if base.d() != b.d {
        return Err(Error::SizeMismatch {
            expected: b.d,
            found: base.d(),
        });
    }
    let mut coef = RationalFunctionN::one();
    for c in 0..b.d {
        let arg = dt.tau().get(c).compose(&b.beta.get(c).inverse())?;
        coef = &coef * table.wg(&arg);
    }
    let w = w_integral(base, &loop_vertex_pairs(dt))?;
    let sign: i64 = if q % 2 == 0 { 1 } else { -1 };
    let scalar = w * Rational::new(factorial(k as u64) * sign, factorial(q as u64));
    let e = n_exponent(b.d, k, n, q, b.components(), dt.face_count());
    let coefficient = &coef * &RationalFunctionN::monomial(scalar, e);
    let (walk, annotation) = base.print_walk();
    let loops: Vec<String> = dt
        .loops()
        .iter()
        .map(|l| format!("{}-{}:{}", l.pos1, l.pos2, l.color + 1))
        .collect();
    Ok(ExpansionTerm {
        n,
        k,
        q,
        lambda_power: n - 1 + q,
        coefficient,
        provenance: format!("{walk} | {annotation} | {} | {}", dt.tau(), loops.join(" ")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::int;
    use num_traits::Signed;
    use crate::perm::PermTuple;
    use crate::trees::{enumerate_trees, LoopEdge, PlaneTree};

    fn vertex() -> PlaneTree {
        PlaneTree::new(3, vec![], vec![vec![crate::trees::Item::Cilium]], vec![0]).unwrap()
    }

    #[test]
    fn melonic_terms_are_one() {
        let g = ColoredGraph::dipole(3);
        let t = DecoratedTree::attach_external(vertex(), PermTuple::identity(3, 1)).unwrap();
        let term = term_value(&t, &g).unwrap();
        assert_eq!(term.coefficient, RationalFunctionN::one());
        for tree in enumerate_trees(3, 1, 3).unwrap().step_by(11) {
            let dt = DecoratedTree::attach_external(tree, PermTuple::identity(3, 1)).unwrap();
            assert_eq!(term_value(&dt, &g).unwrap().coefficient, RationalFunctionN::one());
        }
    }

    #[test]
    fn one_loop_on_a_vertex_is_suppressed() {
        let g = ColoredGraph::dipole(3);
        let t = DecoratedTree::attach_external(vertex(), PermTuple::identity(3, 1)).unwrap();
        for (p1, p2) in [(1, 1), (1, 2)] {
            let dt = t.insert_loops(&[LoopEdge::new(p1, p2, 0)]).unwrap();
            let term = term_value(&dt, &g).unwrap();
            let (deg, lead) = term.coefficient.large_n().unwrap();
            assert!(deg <= -1, "degree {deg}");
            assert_eq!(lead.abs(), int(1));
            assert_eq!(term.lambda_power, 1);
        }
    }

    #[test]
    fn mismatched_k_is_rejected() {
        let g = ColoredGraph::parse(&["(1,2)", "(1)(2)", "(1)(2)"]).unwrap();
        let t = DecoratedTree::attach_external(vertex(), PermTuple::identity(3, 1)).unwrap();
        assert!(term_value(&t, &g).is_err());
    }
}
