//! Ciliated plane trees with colored oriented edges, their contour walks,
//! faces, external edges and loop-edge decorations.
//!
//! Vertices, colors and cilia are 0-based in memory; every text form
//! (walks, cycle notation, annotations) is 1-based.

mod decorate;
mod enumerate;
pub(crate) mod faces;

pub use decorate::{
    enumerate_loop_insertions, loop_insertion_count, CiliumOrigin, DecoratedTree, LoopEdge, LoopInsertions,
    LOOP_BUDGET,
};
pub use enumerate::{
    all_shapes, count_check, distinct_colored_shapes, enumerate_trees, for_each_colored_shape, for_each_tree,
    structure_code, tree_count_formula, Shape, TreeCountReport, TREE_BUDGET,
};
pub use faces::{xi_images, Face, FaceSet, Strand};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One slot in the clockwise rotation at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Item {
    Edge(usize),
    Cilium,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub color: usize,
    /// `true` when oriented `a → b`.
    pub forward: bool,
}

impl Edge {
    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// A labeled plane tree. `rotation[v]` is the clockwise order of the slots
/// at `v`; the walk starts at vertex 0 just before `rotation[0][0]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaneTree {
    d: usize,
    edges: Vec<Edge>,
    rotation: Vec<Vec<Item>>,
    /// The cilia tuple ι: ciliated vertices in label order.
    iota: Vec<usize>,
}

/// One entry of a contour walk; `cilium` is set when a cilium follows it
/// (printed as `;` instead of `,`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub vertex: usize,
    pub cilium: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContourWalk {
    pub steps: Vec<Step>,
    /// 0-based step indices carrying a cilium, increasing.
    pub cilium_positions: Vec<usize>,
}

impl ContourWalk {
    pub fn from_steps(steps: Vec<Step>) -> Self {
        let cilium_positions = steps
            .iter()
            .enumerate()
            .filter(|(_, s)| s.cilium)
            .map(|(i, _)| i)
            .collect();
        ContourWalk {
            steps,
            cilium_positions,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn vertex(&self, q: usize) -> usize {
        self.steps[q].vertex
    }
}

impl fmt::Display for ContourWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            write!(f, "{}", s.vertex + 1)?;
            let last = i + 1 == self.steps.len();
            if s.cilium {
                write!(f, ";")?;
            } else if !last {
                write!(f, ",")?;
            }
        }
        Ok(())
    }
}

impl PlaneTree {
    /// Builds and validates a tree from its parts.
    pub fn new(d: usize, edges: Vec<Edge>, rotation: Vec<Vec<Item>>, iota: Vec<usize>) -> Result<Self> {
        let n = rotation.len();
        if n == 0 {
            return Err(Error::invalid("a tree needs at least one vertex"));
        }
        if edges.len() + 1 != n {
            return Err(Error::invalid(format!(
                "{} edges for {} vertices",
                edges.len(),
                n
            )));
        }
        let mut uf = crate::perm::UnionFind::new(n);
        for e in &edges {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(Error::invalid(format!("bad edge {}-{}", e.a + 1, e.b + 1)));
            }
            if e.color >= d {
                return Err(Error::invalid(format!("edge color {} exceeds D = {d}", e.color + 1)));
            }
            uf.union(e.a, e.b);
        }
        if uf.count() != 1 {
            return Err(Error::invalid("edges do not form a tree"));
        }
        let mut seen = vec![0u8; edges.len()];
        let mut ciliated = vec![false; n];
        for (v, rot) in rotation.iter().enumerate() {
            for item in rot {
                match *item {
                    Item::Edge(e) => {
                        let edge = edges
                            .get(e)
                            .ok_or_else(|| Error::invalid(format!("unknown edge index {e}")))?;
                        if edge.a != v && edge.b != v {
                            return Err(Error::invalid(format!(
                                "edge {}-{} listed at vertex {}",
                                edge.a + 1,
                                edge.b + 1,
                                v + 1
                            )));
                        }
                        seen[e] += 1;
                    }
                    Item::Cilium => {
                        if ciliated[v] {
                            return Err(Error::invalid(format!("two cilia at vertex {}", v + 1)));
                        }
                        ciliated[v] = true;
                    }
                }
            }
        }
        if seen.iter().any(|&c| c != 2) {
            return Err(Error::invalid("every edge must appear at both endpoints"));
        }
        let mut iota_set = vec![false; n];
        for &v in &iota {
            if v >= n || iota_set[v] {
                return Err(Error::invalid("cilia tuple must list distinct vertices"));
            }
            iota_set[v] = true;
        }
        if iota_set != ciliated {
            return Err(Error::invalid("cilia tuple disagrees with the rotations"));
        }
        Ok(PlaneTree {
            d,
            edges,
            rotation,
            iota,
        })
    }

    pub(crate) fn from_parts_unchecked(
        d: usize,
        edges: Vec<Edge>,
        rotation: Vec<Vec<Item>>,
        iota: Vec<usize>,
    ) -> Self {
        PlaneTree {
            d,
            edges,
            rotation,
            iota,
        }
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.iota.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rotation(&self, v: usize) -> &[Item] {
        &self.rotation[v]
    }

    pub fn iota(&self) -> &[usize] {
        &self.iota
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v]
            .iter()
            .filter(|i| matches!(i, Item::Edge(_)))
            .count()
    }

    pub fn set_edge_color(&mut self, e: usize, color: usize) {
        assert!(color < self.d);
        self.edges[e].color = color;
    }

    pub fn set_edge_forward(&mut self, e: usize, forward: bool) {
        self.edges[e].forward = forward;
    }

    /// Clockwise contour walk from the canonical start.
    pub fn contour_walk(&self) -> ContourWalk {
        ContourWalk::from_steps(walk_steps(&self.edges, &self.rotation, 0, 0))
    }

    /// Contour walk started just before slot `j` of vertex `v`.
    pub fn contour_walk_from(&self, v: usize, j: usize) -> ContourWalk {
        ContourWalk::from_steps(walk_steps(&self.edges, &self.rotation, v, j))
    }

    /// `(a, b)` of the tree path from `a` to `b`, as edge indices.
    pub fn path_edges(&self, a: usize, b: usize) -> Vec<usize> {
        let n = self.n();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.a].push((e.b, i));
            adj[e.b].push((e.a, i));
        }
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut stack = vec![a];
        let mut seen = vec![false; n];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            for &(u, e) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    prev[u] = Some((v, e));
                    stack.push(u);
                }
            }
        }
        let mut path = Vec::new();
        let mut v = b;
        while let Some((p, e)) = prev[v] {
            path.push(e);
            v = p;
        }
        path.reverse();
        path
    }

    /// Edge annotation `"i-j:c:>"` entries separated by spaces.
    pub fn annotation(&self) -> String {
        let mut items: Vec<(usize, usize, String)> = self
            .edges
            .iter()
            .map(|e| {
                let (lo, hi) = (e.a.min(e.b), e.a.max(e.b));
                let towards_hi = (e.a == lo) == e.forward;
                let arrow = if towards_hi { '>' } else { '<' };
                (lo, hi, format!("{}-{}:{}:{}", lo + 1, hi + 1, e.color + 1, arrow))
            })
            .collect();
        items.sort();
        items
            .into_iter()
            .map(|(_, _, s)| s)
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Walk text and annotation.
    pub fn print_walk(&self) -> (String, String) {
        (self.contour_walk().to_string(), self.annotation())
    }

    /// Parses a walk in comma/semicolon notation plus an edge annotation.
    /// The cilia tuple is the ciliated vertices in increasing label order.
    pub fn parse_walk(text: &str, d: usize, annotation: &str) -> Result<PlaneTree> {
        let steps = parse_steps(text)?;
        let colors = parse_annotation(annotation, d)?;
        tree_from_steps(&steps, d, &colors)
    }
}

fn walk_steps(edges: &[Edge], rotation: &[Vec<Item>], v0: usize, j0: usize) -> Vec<Step> {
    let len: usize = rotation.iter().map(Vec::len).sum();
    let mut steps = Vec::with_capacity(len);
    if len == 0 {
        return steps;
    }
    let (mut v, mut j) = (v0, j0);
    for _ in 0..len {
        let rot = &rotation[v];
        match rot[j] {
            Item::Cilium => {
                steps.push(Step {
                    vertex: v,
                    cilium: true,
                });
                j = (j + 1) % rot.len();
            }
            Item::Edge(e) => {
                steps.push(Step {
                    vertex: v,
                    cilium: false,
                });
                let u = edges[e].other(v);
                let back = rotation[u]
                    .iter()
                    .position(|&it| it == Item::Edge(e))
                    .expect("edge present at both endpoints");
                v = u;
                j = (back + 1) % rotation[u].len();
            }
        }
    }
    steps
}

/// Tokenizes `"1,2;2,3"` into steps; a trailing `;` marks a cilium after the
/// last entry.
pub fn parse_steps(text: &str) -> Result<Vec<Step>> {
    let mut steps: Vec<Step> = Vec::new();
    let bytes = text.as_bytes();
    let mut pos = 0;
    let mut expect_number = true;
    while pos < bytes.len() {
        let c = bytes[pos];
        if c.is_ascii_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() {
            if !expect_number {
                return Err(Error::parse(pos, "expected ',' or ';'"));
            }
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let v: usize = text[start..pos]
                .parse()
                .map_err(|_| Error::parse(start, "bad vertex label"))?;
            if v == 0 {
                return Err(Error::parse(start, "vertex labels are 1-based"));
            }
            steps.push(Step {
                vertex: v - 1,
                cilium: false,
            });
            expect_number = false;
        } else if c == b',' || c == b';' {
            if expect_number {
                return Err(Error::parse(pos, "expected a vertex label"));
            }
            if c == b';' {
                steps.last_mut().unwrap().cilium = true;
            }
            expect_number = true;
            pos += 1;
        } else {
            return Err(Error::parse(pos, format!("unexpected character {:?}", c as char)));
        }
    }
    if expect_number && steps.last().is_some_and(|s| !s.cilium) {
        return Err(Error::parse(pos, "walk ends with ','"));
    }
    if steps.is_empty() {
        return Err(Error::parse(0, "empty walk"));
    }
    Ok(steps)
}

type ColorMap = std::collections::HashMap<(usize, usize), (usize, bool)>;

/// Parses `"i-j:c:>"` items (space or comma separated). The key is the
/// unordered pair `(min, max)`; the flag is `true` for `min → max`.
fn parse_annotation(text: &str, d: usize) -> Result<ColorMap> {
    let mut map = ColorMap::new();
    let mut offset = 0;
    for item in text.split(|c: char| c.is_whitespace() || c == ',') {
        let here = offset;
        offset += item.len() + 1;
        if item.is_empty() {
            continue;
        }
        let bad = || Error::parse(here, format!("bad edge annotation {item:?}"));
        let mut parts = item.split(':');
        let ends = parts.next().ok_or_else(bad)?;
        let color = parts.next().ok_or_else(bad)?;
        let arrow = parts.next().unwrap_or(">");
        if parts.next().is_some() {
            return Err(bad());
        }
        let (i, j) = ends.split_once('-').ok_or_else(bad)?;
        let i: usize = i.trim().parse().map_err(|_| bad())?;
        let j: usize = j.trim().parse().map_err(|_| bad())?;
        let c: usize = color.trim().parse().map_err(|_| bad())?;
        if i == 0 || j == 0 || i == j || c == 0 || c > d {
            return Err(bad());
        }
        let i_to_j = match arrow.trim() {
            ">" => true,
            "<" => false,
            _ => return Err(bad()),
        };
        let (lo, hi) = (i.min(j) - 1, i.max(j) - 1);
        let forward = if i < j { i_to_j } else { !i_to_j };
        if map.insert((lo, hi), (c - 1, forward)).is_some() {
            return Err(Error::parse(here, format!("edge {}-{} annotated twice", lo + 1, hi + 1)));
        }
    }
    Ok(map)
}

fn tree_from_steps(steps: &[Step], d: usize, colors: &ColorMap) -> Result<PlaneTree> {
    let n = steps.iter().map(|s| s.vertex + 1).max().unwrap_or(0);
    let len = steps.len();
    let mut edge_index: std::collections::HashMap<(usize, usize), usize> = Default::default();
    let mut traversals: Vec<[bool; 2]> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut rotation: Vec<Vec<Item>> = vec![Vec::new(); n];
    for q in 0..len {
        let v = steps[q].vertex;
        let item = if steps[q].cilium {
            if steps[(q + 1) % len].vertex != v {
                return Err(Error::parse(q, "a cilium must separate two equal labels"));
            }
            Item::Cilium
        } else {
            let u = steps[(q + 1) % len].vertex;
            if u == v {
                return Err(Error::parse(q, format!("step {} repeats vertex {}", q + 1, v + 1)));
            }
            let key = (v.min(u), v.max(u));
            let e = *edge_index.entry(key).or_insert_with(|| {
                edges.push(Edge {
                    a: key.0,
                    b: key.1,
                    color: 0,
                    forward: true,
                });
                traversals.push([false; 2]);
                edges.len() - 1
            });
            let dir = usize::from(v > u);
            if traversals[e][dir] {
                return Err(Error::parse(
                    q,
                    format!("edge {}-{} traversed twice in the same direction", v + 1, u + 1),
                ));
            }
            traversals[e][dir] = true;
            Item::Edge(e)
        };
        rotation[v].push(item);
    }
    if rotation.iter().any(Vec::is_empty) && n > 1 {
        return Err(Error::parse(0, "vertex labels must be exactly 1..n"));
    }
    if edges.len() + 1 != n {
        return Err(Error::parse(0, format!("{} distinct edges for {} vertices", edges.len(), n)));
    }
    for e in edges.iter_mut() {
        let (c, forward) = colors.get(&(e.a, e.b)).copied().ok_or_else(|| {
            Error::parse(0, format!("edge {}-{} has no color annotation", e.a + 1, e.b + 1))
        })?;
        e.color = c;
        e.forward = forward;
    }
    if colors.len() != edges.len() {
        return Err(Error::parse(0, "annotation lists an edge not in the walk"));
    }
    let iota: Vec<usize> = (0..n)
        .filter(|&v| rotation[v].contains(&Item::Cilium))
        .collect();
    let start = steps[0].vertex;
    let tree = PlaneTree::new(d, edges, rotation, iota).map_err(|e| Error::parse(0, e.to_string()))?;
    // Every rotation starts at the first departure from its vertex, so the
    // walk restarted there must reproduce the input.
    let again = walk_steps(&tree.edges, &tree.rotation, start, 0);
    if again != steps {
        return Err(Error::parse(0, "the sequence is not the contour walk of a plane tree"));
    }
    Ok(tree.canonical())
}

impl PlaneTree {
    /// Rotates every cyclic order into the canonical linear form used by the
    /// enumerator: vertex 0 starts at its edge to the smallest neighbour,
    /// every other vertex ends with the edge towards vertex 0.
    pub fn canonical(mut self) -> Self {
        let n = self.n();
        if n > 1 {
            let parent = self.parent_edges();
            for v in 0..n {
                let rot = &mut self.rotation[v];
                let pivot = if v == 0 {
                    let (idx, _) = rot
                        .iter()
                        .enumerate()
                        .filter_map(|(i, it)| match it {
                            Item::Edge(e) => Some((i, self.edges[*e].other(0))),
                            Item::Cilium => None,
                        })
                        .min_by_key(|&(_, u)| u)
                        .unwrap();
                    idx
                } else {
                    let p = parent[v].unwrap();
                    (rot.iter().position(|&it| it == Item::Edge(p)).unwrap() + 1) % rot.len()
                };
                rot.rotate_left(pivot);
            }
        }
        self
    }

    /// `parent[v]` = edge from `v` towards vertex 0.
    pub(crate) fn parent_edges(&self) -> Vec<Option<usize>> {
        let n = self.n();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for it in &self.rotation[v] {
                if let Item::Edge(e) = *it {
                    let u = self.edges[e].other(v);
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Some(e);
                        stack.push(u);
                    }
                }
            }
        }
        parent
    }

    /// Canonical form with edges renumbered in walk order; two trees are the
    /// same plane tree iff their keys are equal.
    pub fn key(&self) -> (Vec<Vec<Item>>, Vec<Edge>, Vec<usize>) {
        let t = self.clone().canonical();
        let mut order: Vec<usize> = Vec::new();
        let mut renum = vec![usize::MAX; t.edges.len()];
        for rot in &t.rotation {
            for it in rot {
                if let Item::Edge(e) = *it {
                    if renum[e] == usize::MAX {
                        renum[e] = order.len();
                        order.push(e);
                    }
                }
            }
        }
        let rotation = t
            .rotation
            .iter()
            .map(|rot| {
                rot.iter()
                    .map(|it| match it {
                        Item::Edge(e) => Item::Edge(renum[*e]),
                        Item::Cilium => Item::Cilium,
                    })
                    .collect()
            })
            .collect();
        let edges = order
            .iter()
            .map(|&e| {
                let x = t.edges[e];
                let (lo, hi) = (x.a.min(x.b), x.a.max(x.b));
                Edge {
                    a: lo,
                    b: hi,
                    color: x.color,
                    forward: (x.a == lo) == x.forward,
                }
            })
            .collect();
        (rotation, edges, t.iota.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE_WALK: &str =
        "1,2,3,4,3,5;5,6,5,7,5,3,8,3;3,2,9,10,9,11,9;9,2,12,13,12,14,12;12,2,15,2,16,2";

    #[test]
    fn single_vertex_walks() {
        let t = PlaneTree::new(3, vec![], vec![vec![Item::Cilium]], vec![0]).unwrap();
        let w = t.contour_walk();
        assert_eq!(w.len(), 1);
        assert_eq!(w.cilium_positions, vec![0]);
        assert_eq!(w.to_string(), "1;");
        let bare = PlaneTree::new(3, vec![], vec![vec![]], vec![]).unwrap();
        assert!(bare.contour_walk().is_empty());
    }

    #[test]
    fn path_of_two() {
        let t = PlaneTree::parse_walk("1,2", 3, "1-2:1:>").unwrap();
        assert_eq!((t.n(), t.k()), (2, 0));
        assert_eq!(t.contour_walk().to_string(), "1,2");
        assert!(PlaneTree::parse_walk("1,2,1,2", 3, "1-2:1:>").is_err());
        assert!(PlaneTree::parse_walk("1,2,", 3, "1-2:1:>").is_err());
        assert!(PlaneTree::parse_walk("1,2", 3, "").is_err());
        assert!(PlaneTree::parse_walk("1,2", 3, "1-2:4:>").is_err());
        assert!(PlaneTree::parse_walk("1;2", 3, "1-2:1:>").is_err());
    }

    #[test]
    fn example_walk_roundtrip() {
        let ann = "1-2:1:> 2-15:1:> 3-5:1:> 5-6:1:> 5-7:1:> 9-11:1:> 2-3:2:> 2-12:2:> \
                   2-9:3:> 3-4:2:> 3-8:3:> 9-10:2:> 12-13:3:> 12-14:3:> 2-16:2:<";
        let t = PlaneTree::parse_walk(EXAMPLE_WALK, 3, ann).unwrap();
        assert_eq!((t.n(), t.k()), (16, 4));
        let w = t.contour_walk();
        assert_eq!(w.len(), 34);
        assert_eq!(w.to_string(), EXAMPLE_WALK);
        let q: Vec<usize> = w.cilium_positions.iter().map(|q| q + 1).collect();
        assert_eq!(q, vec![6, 14, 21, 28]);
        let (text, ann2) = t.print_walk();
        assert_eq!(PlaneTree::parse_walk(&text, 3, &ann2).unwrap(), t);
    }

    #[test]
    fn non_tree_backbones_are_rejected() {
        // a triangle
        assert!(PlaneTree::parse_walk("1,2,3", 3, "1-2:1:> 2-3:1:> 1-3:1:>").is_err());
        // crossing order: not a plane contour walk
        assert!(PlaneTree::parse_walk("1,2,1,3,1,2", 3, "1-2:1:> 1-3:1:>").is_err());
    }
}
