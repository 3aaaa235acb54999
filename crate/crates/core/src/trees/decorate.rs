use serde::{Deserialize, Serialize};

use super::{FaceSet, PlaneTree, Step};
use crate::error::{Error, Result};
use crate::perm::{PermTuple, Permutation};

/// One loop edge given by two insertion positions (1-based steps of the walk
/// as extended by all earlier insertions) and a 0-based color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LoopEdge {
    pub pos1: usize,
    pub pos2: usize,
    pub color: usize,
}

impl LoopEdge {
    pub fn new(pos1: usize, pos2: usize, color: usize) -> Self {
        LoopEdge { pos1, pos2, color }
    }
}

/// Where a cilium of the decorated walk comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CiliumOrigin {
    /// The `l`-th cilium of the base tree.
    Base(usize),
    /// The `r`-th inserted cilium; loop `r / 2`, primed when `r` is odd.
    Inserted(usize),
}

/// A plane tree with external edges `tau` and loop edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedTree {
    base: PlaneTree,
    tau: PermTuple,
    loops: Vec<LoopEdge>,
    walk: Vec<Step>,
    origins: Vec<CiliumOrigin>,
    m: Vec<usize>,
    t: Vec<(usize, usize)>,
    xi_prime: PermTuple,
    tau_tilde: PermTuple,
    tau_prime: PermTuple,
}

impl DecoratedTree {
    /// Attaches external edges; `tau[c](l) = l'` joins cilium `l` to `l'`
    /// in color `c`, cilia numbered in walk order.
    pub fn attach_external(base: PlaneTree, tau: PermTuple) -> Result<Self> {
        if tau.d() != base.d() {
            return Err(Error::SizeMismatch {
                expected: base.d(),
                found: tau.d(),
            });
        }
        if tau.k() != base.k() && base.d() > 0 {
            return Err(Error::SizeMismatch {
                expected: base.k(),
                found: tau.k(),
            });
        }
        let walk = base.contour_walk().steps;
        let k = base.k();
        Self::build(base, tau, Vec::new(), walk, (0..k).map(CiliumOrigin::Base).collect())
    }

    /// Inserts loop edges after the existing ones. Each position indexes the
    /// walk as already extended by every earlier insertion.
    pub fn insert_loops(&self, insertions: &[LoopEdge]) -> Result<Self> {
        if insertions.is_empty() {
            return Ok(self.clone());
        }
        let d = self.base.d();
        let mut walk = self.walk.clone();
        let mut origins_by_step: Vec<Option<CiliumOrigin>> = Vec::with_capacity(walk.len());
        {
            let mut it = self.origins.iter();
            for s in &walk {
                origins_by_step.push(if s.cilium { it.next().copied() } else { None });
            }
        }
        let mut r = 2 * self.loops.len();
        for ins in insertions {
            if ins.color >= d {
                return Err(Error::invalid(format!(
                    "loop color {} exceeds D = {d}",
                    ins.color + 1
                )));
            }
            for pos in [ins.pos1, ins.pos2] {
                if pos == 0 || pos > walk.len() {
                    return Err(Error::invalid(format!(
                        "insertion position {pos} outside the walk of length {}",
                        walk.len()
                    )));
                }
                let v = walk[pos - 1].vertex;
                walk.insert(
                    pos - 1,
                    Step {
                        vertex: v,
                        cilium: true,
                    },
                );
                origins_by_step.insert(pos - 1, Some(CiliumOrigin::Inserted(r)));
                r += 1;
            }
        }
        let origins = origins_by_step.into_iter().flatten().collect();
        let mut loops = self.loops.clone();
        loops.extend_from_slice(insertions);
        Self::build(self.base.clone(), self.tau.clone(), loops, walk, origins)
    }

    fn build(
        base: PlaneTree,
        tau: PermTuple,
        loops: Vec<LoopEdge>,
        walk: Vec<Step>,
        origins: Vec<CiliumOrigin>,
    ) -> Result<Self> {
        let k = base.k();
        let s = loops.len();
        let total = k + 2 * s;
        let mut m = vec![0; k];
        let mut t = vec![(0, 0); s];
        for (idx, o) in origins.iter().enumerate() {
            match *o {
                CiliumOrigin::Base(l) => m[l] = idx,
                CiliumOrigin::Inserted(r) if r % 2 == 0 => t[r / 2].0 = idx,
                CiliumOrigin::Inserted(r) => t[r / 2].1 = idx,
            }
        }
        let d = base.d();
        let mut tilde = Vec::with_capacity(d);
        let mut prime = Vec::with_capacity(d);
        for c in 0..d {
            let mut img: Vec<usize> = (0..total).collect();
            for l in 0..k {
                img[m[l]] = m[tau.get(c).apply(l)];
            }
            tilde.push(Permutation::from_images(img.clone())?);
            for (p, lp) in loops.iter().enumerate() {
                if lp.color == c {
                    let (a, b) = t[p];
                    img[a] = b;
                    img[b] = a;
                }
            }
            prime.push(Permutation::from_images(img)?);
        }
        let faces = FaceSet::from_walk(base.n(), d, base.edges(), &walk);
        Ok(DecoratedTree {
            xi_prime: faces.xi,
            tau_tilde: PermTuple::new(tilde)?,
            tau_prime: PermTuple::new(prime)?,
            base,
            tau,
            loops,
            walk,
            origins,
            m,
            t,
        })
    }

    pub fn base(&self) -> &PlaneTree {
        &self.base
    }

    pub fn tau(&self) -> &PermTuple {
        &self.tau
    }

    pub fn loops(&self) -> &[LoopEdge] {
        &self.loops
    }

    /// The walk with all inserted cilia.
    pub fn walk(&self) -> &[Step] {
        &self.walk
    }

    pub fn origins(&self) -> &[CiliumOrigin] {
        &self.origins
    }

    /// `m[l]`: index of base cilium `l` among all cilia of the walk.
    pub fn m(&self) -> &[usize] {
        &self.m
    }

    /// `t[p] = (t(p), t(p'))` for loop `p`.
    pub fn t(&self) -> &[(usize, usize)] {
        &self.t
    }

    pub fn xi_prime(&self) -> &PermTuple {
        &self.xi_prime
    }

    pub fn tau_tilde(&self) -> &PermTuple {
        &self.tau_tilde
    }

    pub fn tau_prime(&self) -> &PermTuple {
        &self.tau_prime
    }

    /// 1-based steps carrying cilia.
    pub fn cilium_steps(&self) -> Vec<usize> {
        (0..self.walk.len())
            .filter(|&q| self.walk[q].cilium)
            .map(|q| q + 1)
            .collect()
    }

    pub fn faces(&self) -> FaceSet {
        FaceSet::from_walk(self.base.n(), self.base.d(), self.base.edges(), &self.walk)
    }

    /// `Σ_c C(tau'_c xi'_c)`.
    pub fn external_face_count(&self) -> usize {
        self.tau_prime
            .perms()
            .iter()
            .zip(self.xi_prime.perms())
            .map(|(t, x)| t.compose(x).expect("same k").cycle_count())
            .sum()
    }

    /// `D + (n - 1)(D - 1) - Σ_c C(xi'_c) + Σ_c C(tau'_c xi'_c)`.
    pub fn face_count(&self) -> usize {
        let d = self.base.d();
        let n = self.base.n();
        let xi: usize = self.xi_prime.perms().iter().map(Permutation::cycle_count).sum();
        d + (n - 1) * d.saturating_sub(1) + self.external_face_count() - xi
    }

    /// Face count of the intermediate tree with trivial loop reconnections.
    pub fn face_count_tilde(&self) -> usize {
        let d = self.base.d();
        let n = self.base.n();
        let xi: usize = self.xi_prime.perms().iter().map(Permutation::cycle_count).sum();
        let ext: usize = self
            .tau_tilde
            .perms()
            .iter()
            .zip(self.xi_prime.perms())
            .map(|(t, x)| t.compose(x).expect("same k").cycle_count())
            .sum();
        d + (n - 1) * d.saturating_sub(1) + ext - xi
    }

    /// External faces of color `c` as lists of strands (vertex labels,
    /// 1-based), one entry per cycle of `tau'_c xi'_c`.
    pub fn external_faces(&self, c: usize) -> Vec<Vec<Vec<usize>>> {
        let faces = self.faces();
        let xi = self.xi_prime.get(c);
        let tau = self.tau_prime.get(c);
        let k = xi.len();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut l = start;
            while !seen[l] {
                seen[l] = true;
                let strand = faces.strand(c, l).expect("every cilium starts a strand");
                face.push(strand.steps.iter().map(|&q| self.walk[q].vertex + 1).collect());
                l = tau.apply(xi.apply(l));
            }
            out.push(face);
        }
        out
    }

    /// Walk text with every cilium marked by `;`.
    pub fn walk_text(&self) -> String {
        super::ContourWalk::from_steps(self.walk.clone()).to_string()
    }
}

/// `D^s (L)(L+1)...(L+2s-1)` for a walk of length `L`.
pub fn loop_insertion_count(walk_len: usize, s: usize, d: usize) -> u128 {
    let mut count: u128 = 1;
    for i in 0..2 * s {
        count = count.saturating_mul((walk_len + i) as u128);
    }
    for _ in 0..s {
        count = count.saturating_mul(d as u128);
    }
    count
}

pub const LOOP_BUDGET: u128 = 100_000_000;

/// Every ordered list of `s` loop edges on a walk of length `walk_len`.
pub fn enumerate_loop_insertions(walk_len: usize, s: usize, d: usize) -> Result<LoopInsertions> {
    let count = loop_insertion_count(walk_len, s, d);
    if count > LOOP_BUDGET {
        return Err(Error::budget("loop insertions", count, LOOP_BUDGET));
    }
    let empty = count == 0;
    Ok(LoopInsertions {
        walk_len,
        d,
        positions: vec![1; 2 * s],
        colors: vec![0; s],
        done: empty,
    })
}

/// Odometer over positions (fastest) and colors.
pub struct LoopInsertions {
    walk_len: usize,
    d: usize,
    positions: Vec<usize>,
    colors: Vec<usize>,
    done: bool,
}

impl Iterator for LoopInsertions {
    type Item = Vec<LoopEdge>;

    fn next(&mut self) -> Option<Vec<LoopEdge>> {
        if self.done {
            return None;
        }
        let item = self
            .colors
            .iter()
            .enumerate()
            .map(|(p, &c)| LoopEdge::new(self.positions[2 * p], self.positions[2 * p + 1], c))
            .collect();
        self.done = true;
        for i in (0..self.positions.len()).rev() {
            if self.positions[i] < self.walk_len + i {
                self.positions[i] += 1;
                self.done = false;
                break;
            }
            self.positions[i] = 1;
        }
        if self.done {
            for c in self.colors.iter_mut().rev() {
                if *c + 1 < self.d {
                    *c += 1;
                    self.done = false;
                    break;
                }
                *c = 0;
            }
        }
        Some(item)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::faces::tests::example_tree;

    fn strs(t: &PermTuple) -> Vec<String> {
        t.perms().iter().map(|p| p.to_string()).collect()
    }

    fn example_tau() -> PermTuple {
        PermTuple::parse(&["(2)(1,3,4)", "(2)(1,4,3)", "(1,2)(3,4)"], 4).unwrap()
    }

    #[test]
    fn example_external_face() {
        let d = DecoratedTree::attach_external(example_tree(), example_tau()).unwrap();
        let prod = d.tau().get(0).compose(d.xi_prime().get(0)).unwrap();
        assert_eq!(prod.to_string(), "(1,2,3,4)");
        let faces = d.external_faces(0);
        assert_eq!(faces.len(), 1);
        assert_eq!(
            faces[0],
            vec![
                vec![5, 6, 5, 7, 5, 3, 3],
                vec![3, 3, 3, 5],
                vec![9, 9, 9, 11, 9],
                vec![12, 12, 12, 12]
            ]
        );
    }

    #[test]
    fn worked_loop_example() {
        let d = DecoratedTree::attach_external(example_tree(), example_tau()).unwrap();
        let l = d
            .insert_loops(&[LoopEdge::new(2, 31, 2), LoopEdge::new(3, 7, 0)])
            .unwrap();
        assert_eq!(l.cilium_steps(), [2, 3, 7, 9, 17, 24, 31, 33]);
        let m: Vec<usize> = l.m().iter().map(|x| x + 1).collect();
        assert_eq!(m, [4, 5, 6, 7]);
        let t: Vec<(usize, usize)> = l.t().iter().map(|&(a, b)| (a + 1, b + 1)).collect();
        assert_eq!(t, [(1, 8), (2, 3)]);
        assert_eq!(
            strs(l.xi_prime()),
            ["(1,2,8)(3,4,5)(6)(7)", "(1,2,3,5,7,8)(4)(6)", "(1,2,6,8)(3,5)(4)(7)"]
        );
        assert_eq!(
            strs(l.tau_prime()),
            ["(1)(2,3)(4,6,7)(5)(8)", "(1)(2)(3)(4,7,6)(5)(8)", "(1,8)(2)(3)(4,5)(6,7)"]
        );
        assert_eq!(
            l.walk_text(),
            "1,2;2;2,3,4,3;3,5;5,6,5,7,5,3,8,3;3,2,9,10,9,11,9;9,2,12,13,12,14,12;12,2;2,15,2,16,2"
        );
        assert_eq!(l.face_count_tilde(), d.face_count());
        assert!(l.face_count() <= d.face_count() + 2);
    }

    #[test]
    fn zero_insertions_is_identity() {
        let d = DecoratedTree::attach_external(example_tree(), example_tau()).unwrap();
        assert_eq!(d.insert_loops(&[]).unwrap(), d);
        assert!(d.insert_loops(&[LoopEdge::new(35, 1, 0)]).is_err());
        assert!(d.insert_loops(&[LoopEdge::new(1, 1, 3)]).is_err());
    }

    #[test]
    fn insertion_counts() {
        assert_eq!(enumerate_loop_insertions(3, 0, 3).unwrap().count(), 1);
        assert_eq!(enumerate_loop_insertions(3, 1, 3).unwrap().count(), 36);
        assert_eq!(enumerate_loop_insertions(1, 1, 3).unwrap().count(), 6);
        assert_eq!(loop_insertion_count(3, 1, 3), 36);
        assert!(enumerate_loop_insertions(20, 6, 4).is_err());
    }
}
