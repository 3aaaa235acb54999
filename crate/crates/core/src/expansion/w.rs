//! Integrals of products of the path-minimum weights `w^{ij}(T, u)` over the
//! edge parameters `u ∈ [0,1]^{n-1}`.

use num_traits::{One, Zero};

use crate::algebra::{int, Rational};
use crate::error::{Error, Result};
use crate::trees::PlaneTree;

/// Largest number of edge variables entering a product.
pub const W_MAX_EDGES: usize = 9;

/// Edge sets of the tree paths for every pair with distinct endpoints.
fn paths(t: &PlaneTree, pairs: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::with_capacity(pairs.len());
    for &(a, b) in pairs {
        if a >= t.n() || b >= t.n() {
            return Err(Error::invalid(format!(
                "vertex {} outside a tree on {} vertices",
                a.max(b) + 1,
                t.n()
            )));
        }
        if a != b {
            out.push(t.path_edges(a, b));
        }
    }
    Ok(out)
}

/// `∫ Π_e du_e Π_p min_{e ∈ P(j_p, j_p')} u_e` for 0-based vertex pairs.
/// Pairs with equal endpoints contribute 1.
///
/// Orderings `u_{e_1} < ... < u_{e_m}` of the relevant edges each give the
/// simplex integral `Π_i 1 / (i + #paths met by {e_1..e_i})`; orderings are
/// summed by dynamic programming over the set of edges placed so far.
pub fn w_integral(t: &PlaneTree, pairs: &[(usize, usize)]) -> Result<Rational> {
    let paths = paths(t, pairs)?;
    if paths.is_empty() {
        return Ok(Rational::one());
    }
    let (masks, m) = relevant_masks(t, &paths)?;
    let full = (1usize << m) - 1;
    let mut f = vec![Rational::zero(); full + 1];
    f[0] = Rational::one();
    for set in 0..full {
        if f[set].is_zero() {
            continue;
        }
        let placed = set.count_ones() as i64;
        for e in 0..m {
            if set & (1 << e) != 0 {
                continue;
            }
            let next = set | (1 << e);
            let hit = masks.iter().filter(|&&pm| pm & next != 0).count() as i64;
            let add = &f[set] / int(placed + 1 + hit);
            f[next] += add;
        }
    }
    Ok(f[full].clone())
}

/// The same integral summed ordering by ordering; exponential in the
/// number of relevant edges and kept as an independent check.
pub fn w_integral_by_orderings(t: &PlaneTree, pairs: &[(usize, usize)]) -> Result<Rational> {
    let paths = paths(t, pairs)?;
    if paths.is_empty() {
        return Ok(Rational::one());
    }
    let (masks, m) = relevant_masks(t, &paths)?;
    let mut total = Rational::zero();
    for order in crate::perm::Permutation::all(m) {
        // exponent of u at each rank
        let mut exps = vec![0i64; m];
        for &pm in &masks {
            let first = (0..m).find(|&r| pm & (1 << order.apply(r)) != 0).unwrap();
            exps[first] += 1;
        }
        let mut term = Rational::one();
        let mut acc = 0;
        for a in exps {
            acc += a + 1;
            term /= int(acc);
        }
        total += term;
    }
    Ok(total)
}

/// Paths as bit masks over the edges that occur in at least one path.
fn relevant_masks(t: &PlaneTree, paths: &[Vec<usize>]) -> Result<(Vec<usize>, usize)> {
    let mut index = vec![usize::MAX; t.edges().len()];
    let mut m = 0;
    for p in paths {
        for &e in p {
            if index[e] == usize::MAX {
                index[e] = m;
                m += 1;
            }
        }
    }
    if m > W_MAX_EDGES {
        let orderings: u128 = (1..=m as u128).product();
        let limit: u128 = (1..=W_MAX_EDGES as u128).product();
        return Err(Error::budget("w_integral orderings", orderings, limit));
    }
    let masks = paths
        .iter()
        .map(|p| p.iter().fold(0usize, |acc, &e| acc | (1 << index[e])))
        .collect();
    Ok((masks, m))
}
