//! Allocation-light face counting for a base tree under many loop
//! decorations and external-edge choices.

use crate::trees::faces::{color_components, xi_images_into};
use crate::trees::{LoopEdge, PlaneTree, Step};

/// Per-tree data that does not depend on the decoration.
pub(crate) struct TreeContext<'a> {
    pub tree: &'a PlaneTree,
    d: usize,
    k: usize,
    comps: Vec<Vec<usize>>,
    base_walk: Vec<Step>,
    /// Base cilium index for cilium steps, `usize::MAX` otherwise.
    base_origin: Vec<usize>,
}

impl<'a> TreeContext<'a> {
    pub fn new(tree: &'a PlaneTree) -> Self {
        let d = tree.d();
        let comps = (0..d).map(|c| color_components(tree.n(), tree.edges(), c)).collect();
        let base_walk = tree.contour_walk().steps;
        let mut l = 0;
        let base_origin = base_walk
            .iter()
            .map(|s| {
                if s.cilium {
                    l += 1;
                    l - 1
                } else {
                    usize::MAX
                }
            })
            .collect();
        TreeContext {
            tree,
            d,
            k: tree.k(),
            comps,
            base_walk,
            base_origin,
        }
    }

    pub fn walk_len(&self) -> usize {
        self.base_walk.len()
    }

    /// `D + (n-1)(D-1)`.
    fn tree_faces(&self) -> usize {
        self.d + (self.tree.n() - 1) * self.d.saturating_sub(1)
    }
}

/// A decorated walk and its `xi'` permutations, reused across calls.
#[derive(Default)]
pub(crate) struct Decoration {
    walk: Vec<Step>,
    /// `l` for base cilium `l`, `k + r` for inserted cilium `r`.
    origin: Vec<usize>,
    xi: Vec<Vec<usize>>,
    xi_cycles: usize,
    m: Vec<usize>,
    t: Vec<(usize, usize)>,
    colors: Vec<usize>,
    /// `(j_p, j_p')` for every loop.
    pub pairs: Vec<(usize, usize)>,
    scratch: Vec<usize>,
    img: Vec<usize>,
    prod: Vec<usize>,
    seen: Vec<bool>,
}

impl Decoration {
    /// Inserts `ins` into the base walk of `ctx` (positions as in
    /// [`crate::trees::DecoratedTree::insert_loops`]).
    pub fn fill(&mut self, ctx: &TreeContext, ins: &[LoopEdge]) {
        let k = ctx.k;
        self.walk.clear();
        self.walk.extend_from_slice(&ctx.base_walk);
        self.origin.clear();
        self.origin.extend_from_slice(&ctx.base_origin);
        for (p, e) in ins.iter().enumerate() {
            for (j, pos) in [e.pos1, e.pos2].into_iter().enumerate() {
                let v = self.walk[pos - 1].vertex;
                self.walk.insert(pos - 1, Step { vertex: v, cilium: true });
                self.origin.insert(pos - 1, k + 2 * p + j);
            }
        }
        let q = ins.len();
        self.m.clear();
        self.m.resize(k, 0);
        self.t.clear();
        self.t.resize(q, (0, 0));
        self.pairs.clear();
        self.pairs.resize(q, (0, 0));
        self.colors.clear();
        self.colors.extend(ins.iter().map(|e| e.color));
        let mut idx = 0;
        for (s, &o) in self.walk.iter().zip(&self.origin) {
            if !s.cilium {
                continue;
            }
            if o < k {
                self.m[o] = idx;
            } else {
                let r = o - k;
                if r.is_multiple_of(2) {
                    self.t[r / 2].0 = idx;
                    self.pairs[r / 2].0 = s.vertex;
                } else {
                    self.t[r / 2].1 = idx;
                    self.pairs[r / 2].1 = s.vertex;
                }
            }
            idx += 1;
        }
        self.xi.resize_with(ctx.d, Vec::new);
        self.xi_cycles = 0;
        for c in 0..ctx.d {
            xi_images_into(&self.walk, &ctx.comps[c], &mut self.scratch, &mut self.xi[c]);
            self.xi_cycles += cycles(&self.xi[c], &mut self.seen);
        }
    }

    /// `|F|` of the decoration with external edges `tau[c]` (images on the
    /// base cilia).
    pub fn face_count(&mut self, ctx: &TreeContext, tau: &[Vec<usize>]) -> usize {
        let total = ctx.k + 2 * self.t.len();
        let mut ext = 0;
        for c in 0..ctx.d {
            self.img.clear();
            self.img.extend(0..total);
            for l in 0..ctx.k {
                self.img[self.m[l]] = self.m[tau[c][l]];
            }
            for (p, &(a, b)) in self.t.iter().enumerate() {
                if self.colors[p] == c {
                    self.img[a] = b;
                    self.img[b] = a;
                }
            }
            // tau' ∘ xi'
            let img = &self.img;
            self.prod.clear();
            self.prod.extend(self.xi[c].iter().map(|&x| img[x]));
            ext += cycles(&self.prod, &mut self.seen);
        }
        ctx.tree_faces() + ext - self.xi_cycles
    }
}

fn cycles(images: &[usize], seen: &mut Vec<bool>) -> usize {
    seen.clear();
    seen.resize(images.len(), false);
    let mut count = 0;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = images[x];
        }
    }
    count
}
