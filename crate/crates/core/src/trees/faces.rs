use serde::{Deserialize, Serialize};

use super::{Edge, PlaneTree, Step};
use crate::perm::{cycle_count_slice, PermTuple, Permutation, UnionFind};

/// A connected component of the color-`c` edges with its induced sub-walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub color: usize,
    /// Vertices of the component, increasing.
    pub vertices: Vec<usize>,
    /// 0-based walk steps landing on the component, in walk order.
    pub steps: Vec<usize>,
}

/// The part of an external face running from cilium `from` to `xi(from)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strand {
    pub color: usize,
    pub from: usize,
    pub to: usize,
    /// Steps `q_from + 1 ..= q_to` (cyclically) on the component.
    pub steps: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceSet {
    pub d: usize,
    pub n: usize,
    pub internal: Vec<Face>,
    /// `(color, cycle of xi_color)` for every external face.
    pub external: Vec<(usize, Vec<usize>)>,
    pub xi: PermTuple,
    pub strands: Vec<Strand>,
}

/// Component id of every vertex in the forest of color-`color` edges.
pub(crate) fn color_components(n: usize, edges: &[Edge], color: usize) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for e in edges.iter().filter(|e| e.color == color) {
        uf.union(e.a, e.b);
    }
    (0..n).map(|v| uf.find(v)).collect()
}

/// `xi(l)` for every cilium `l` (numbered in walk order): the next cilium
/// met along the walk whose vertex shares the component of cilium `l`.
pub fn xi_images(steps: &[Step], comp: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut scratch = Vec::new();
    xi_images_into(steps, comp, &mut scratch, &mut out);
    out
}

pub(crate) fn xi_images_into(
    steps: &[Step],
    comp: &[usize],
    cilium_of_step: &mut Vec<usize>,
    out: &mut Vec<usize>,
) {
    let len = steps.len();
    cilium_of_step.clear();
    out.clear();
    let mut k = 0;
    for s in steps {
        cilium_of_step.push(k);
        if s.cilium {
            k += 1;
        }
    }
    for q in 0..len {
        if !steps[q].cilium {
            continue;
        }
        let c = comp[steps[q].vertex];
        let mut j = q;
        loop {
            j += 1;
            if j == len {
                j = 0;
            }
            if steps[j].cilium && comp[steps[j].vertex] == c {
                break;
            }
        }
        out.push(cilium_of_step[j]);
    }
}

impl FaceSet {
    /// Faces of a tree whose contour walk (possibly carrying several cilia
    /// per vertex) is `steps`.
    pub fn from_walk(n: usize, d: usize, edges: &[Edge], steps: &[Step]) -> FaceSet {
        let len = steps.len();
        let cilia: Vec<usize> = (0..len).filter(|&q| steps[q].cilium).collect();
        let k = cilia.len();
        let mut internal = Vec::new();
        let mut external = Vec::new();
        let mut strands = Vec::new();
        let mut xis = Vec::with_capacity(d);
        for c in 0..d {
            let comp = color_components(n, edges, c);
            let xi = Permutation::from_images(xi_images(steps, &comp)).expect("xi is a bijection");
            let mut roots: Vec<usize> = comp.clone();
            roots.sort_unstable();
            roots.dedup();
            for r in roots {
                let has_cilium = cilia.iter().any(|&q| comp[steps[q].vertex] == r);
                if !has_cilium {
                    internal.push(Face {
                        color: c,
                        vertices: (0..n).filter(|&v| comp[v] == r).collect(),
                        steps: (0..len).filter(|&q| comp[steps[q].vertex] == r).collect(),
                    });
                }
            }
            for cycle in xi.cycles() {
                external.push((c, cycle));
            }
            for l in 0..k {
                let to = xi.apply(l);
                let r = comp[steps[cilia[l]].vertex];
                let mut s = Vec::new();
                let mut q = cilia[l];
                loop {
                    q = (q + 1) % len;
                    if comp[steps[q].vertex] == r {
                        s.push(q);
                    }
                    if q == cilia[to] {
                        break;
                    }
                }
                strands.push(Strand {
                    color: c,
                    from: l,
                    to,
                    steps: s,
                });
            }
            xis.push(xi);
        }
        FaceSet {
            d,
            n,
            internal,
            external,
            xi: PermTuple::new(xis).expect("common k"),
            strands,
        }
    }

    pub fn k(&self) -> usize {
        self.xi.k()
    }

    /// `|internal| + Σ_c C(xi_c)`.
    pub fn total(&self) -> usize {
        self.internal.len() + self.xi.perms().iter().map(Permutation::cycle_count).sum::<usize>()
    }

    /// `D + (n - 1)(D - 1)`.
    pub fn expected_total(&self) -> usize {
        self.d + (self.n - 1) * (self.d.saturating_sub(1))
    }

    pub fn strand(&self, color: usize, from: usize) -> Option<&Strand> {
        self.strands
            .iter()
            .find(|s| s.color == color && s.from == from)
    }
}

impl PlaneTree {
    pub fn faces(&self) -> FaceSet {
        FaceSet::from_walk(self.n(), self.d(), self.edges(), &self.contour_walk().steps)
    }
}

/// Reusable buffers for counting faces inside enumeration loops.
#[derive(Default)]
pub(crate) struct FaceCounter {
    comp: Vec<usize>,
    parent: Vec<usize>,
    has_cilium: Vec<bool>,
    cilium_of_step: Vec<usize>,
    xi: Vec<usize>,
}

impl FaceCounter {
    /// Color-`c` components of `edges` into `self.comp`; returns their number.
    fn components(&mut self, n: usize, edges: &[Edge], c: usize) -> usize {
        self.parent.clear();
        self.parent.extend(0..n);
        let mut count = n;
        for e in edges.iter().filter(|e| e.color == c) {
            let (ra, rb) = (find(&mut self.parent, e.a), find(&mut self.parent, e.b));
            if ra != rb {
                self.parent[ra.max(rb)] = ra.min(rb);
                count -= 1;
            }
        }
        self.comp.clear();
        for v in 0..n {
            let r = find(&mut self.parent, v);
            self.comp.push(r);
        }
        count
    }

    /// `(number of internal faces, Σ_c C(xi_c))`.
    pub(crate) fn count(&mut self, n: usize, d: usize, edges: &[Edge], steps: &[Step]) -> (usize, usize) {
        let mut internal = 0;
        let mut cycles = 0;
        for c in 0..d {
            let total = self.components(n, edges, c);
            self.has_cilium.clear();
            self.has_cilium.resize(n, false);
            let mut external = 0;
            for s in steps.iter().filter(|s| s.cilium) {
                let r = self.comp[s.vertex];
                if !self.has_cilium[r] {
                    self.has_cilium[r] = true;
                    external += 1;
                }
            }
            internal += total - external;
            xi_images_into(steps, &self.comp, &mut self.cilium_of_step, &mut self.xi);
            cycles += cycle_count_slice(&self.xi);
        }
        (internal, cycles)
    }

    /// Fills `out` with the images of every `xi_c`, concatenated by color.
    pub(crate) fn xi_all(&mut self, n: usize, d: usize, edges: &[Edge], steps: &[Step], out: &mut Vec<usize>) {
        out.clear();
        for c in 0..d {
            self.components(n, edges, c);
            xi_images_into(steps, &self.comp, &mut self.cilium_of_step, &mut self.xi);
            out.extend_from_slice(&self.xi);
        }
    }
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}
