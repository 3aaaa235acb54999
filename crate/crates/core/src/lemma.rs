//! Exhaustive check of the face inequality
//! `Σ_c C(τ_c σ_c⁻¹) − Σ_c C(ξ_c) + Σ_c C(τ_c ξ_c) ≤ (D+1)k − C(B_σ)`
//! with `ξ` ranging over the external-face permutations of actual trees.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::perm::{lex_rank, CheckReport, PermTuple, SymmetricGroup, MAX_REPORTED};
use crate::trees::faces::FaceCounter;
use crate::trees::for_each_colored_shape;

/// Largest `(#ξ tuples) · k!^(2D)` the check accepts.
pub const LEMMA_BUDGET: u128 = 2_000_000_000;

/// Distinct `ξ` tuples (as indices into `g`) realized by trees with
/// `k ≤ n ≤ n_max` vertices.
pub fn realized_xi(d: usize, k: usize, n_max: usize, exec: Exec) -> Result<Vec<Vec<usize>>> {
    let mut all = BTreeSet::new();
    for n in k.max(1)..=n_max {
        let found = for_each_colored_shape(
            n,
            k,
            d,
            exec,
            BTreeSet::new,
            |acc: &mut BTreeSet<Vec<usize>>, t| {
                let mut fc = FaceCounter::default();
                let mut images = Vec::new();
                fc.xi_all(t.n(), d, t.edges(), &t.contour_walk().steps, &mut images);
                let tuple = images.chunks(k).map(lex_rank).collect();
                acc.insert(tuple);
            },
            |mut a, b| {
                a.extend(b);
                a
            },
        )?;
        all.extend(found);
    }
    Ok(all.into_iter().collect())
}

pub fn check_lemma_faces(d: usize, k: usize, n_max: usize, exec: Exec) -> Result<CheckReport> {
    if d == 0 || k == 0 {
        return Err(Error::invalid("check_lemma_faces needs D >= 1 and k >= 1"));
    }
    if n_max < k {
        return Err(Error::invalid(format!("trees need at least k = {k} vertices, n_max = {n_max}")));
    }
    let g = SymmetricGroup::new(k)?;
    let per_xi = (g.order() as u128).checked_pow(2 * d as u32).unwrap_or(u128::MAX);
    if per_xi > LEMMA_BUDGET {
        return Err(Error::budget("check_lemma_faces", per_xi, LEMMA_BUDGET));
    }
    let xis = realized_xi(d, k, n_max, exec)?;
    let estimate = per_xi.saturating_mul(xis.len() as u128);
    if estimate > LEMMA_BUDGET {
        return Err(Error::budget("check_lemma_faces", estimate, LEMMA_BUDGET));
    }

    let o = g.order();
    // All σ tuples with their component counts, odometer order.
    let tuples = odometer(o, d);
    let sigma_components: Vec<usize> = tuples
        .iter()
        .map(|s| {
            let perms = s.iter().map(|&i| g.elements[i].clone()).collect();
            PermTuple::new(perms).expect("common k").graph_components()
        })
        .collect();

    Ok(exec.map_reduce(
        &xis,
        CheckReport::empty,
        |xi| {
            let mut rep = CheckReport::empty();
            let xi_cycles: usize = xi.iter().map(|&x| g.cycles(x)).sum();
            for (si, sigma) in tuples.iter().enumerate() {
                let rhs = ((d + 1) * k - sigma_components[si]) as i64;
                let sigma_inv: Vec<usize> = sigma.iter().map(|&s| g.inv(s)).collect();
                for tau in &tuples {
                    let mut lhs = -(xi_cycles as i64);
                    for c in 0..d {
                        lhs += g.cycles(g.mul(tau[c], sigma_inv[c])) as i64;
                        lhs += g.cycles(g.mul(tau[c], xi[c])) as i64;
                    }
                    rep.checked += 1;
                    if lhs == rhs {
                        rep.saturated += 1;
                    } else if lhs > rhs {
                        rep.counterexample_count += 1;
                        if rep.counterexamples.len() < MAX_REPORTED {
                            let show = |t: &[usize]| {
                                t.iter().map(|&i| g.elements[i].to_string()).collect::<Vec<_>>().join(" ")
                            };
                            rep.counterexamples.push(vec![show(xi), show(sigma), show(tau)]);
                        }
                    }
                }
            }
            rep
        },
        CheckReport::merge,
    ))
}

fn odometer(base: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < base {
                break;
            }
            cur[i] = 0;
        }
    }
}
