use std::collections::BTreeMap;

use serde::Serialize;

use super::faces::FaceCounter;
use super::{Edge, Item, PlaneTree};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::perm::Permutation;

/// Largest tree stream the enumerators accept.
pub const TREE_BUDGET: u128 = 500_000_000;

/// `(2D)^(n-1) (2n+k-3)! / (n+k-1)!`, the number of plane trees on `n`
/// labeled vertices with a fixed cilia tuple of length `k`. Saturates at
/// `u128::MAX`.
pub fn tree_count_formula(n: usize, k: usize, d: usize) -> u128 {
    if n == 1 {
        return 1;
    }
    let mut count: u128 = 1;
    for _ in 0..n - 1 {
        count = count.saturating_mul(2 * d as u128);
    }
    for i in (n + k)..=(2 * n + k - 3) {
        count = count.saturating_mul(i as u128);
    }
    count
}

/// An uncolored plane tree: rotation system with every edge stored as
/// `(a, b)`, `a < b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub edges: Vec<(usize, usize)>,
    pub rotation: Vec<Vec<Item>>,
}

impl Shape {
    fn tree(&self, d: usize, k: usize) -> PlaneTree {
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| Edge {
                a,
                b,
                color: 0,
                forward: true,
            })
            .collect();
        PlaneTree::from_parts_unchecked(d, edges, self.rotation.clone(), (0..k).collect())
    }
}

fn prufer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

fn labeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 1 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut out = Vec::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        out.push(prufer_decode(&seq, n));
        let mut i = seq.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
        }
    }
}

/// All rotation systems of the labeled tree `edges`, vertices `0..k` ciliated,
/// in canonical linear form (see [`PlaneTree::canonical`]).
fn shapes_of(edges: &[(usize, usize)], n: usize, k: usize) -> Vec<Shape> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (i, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, i));
        adj[b].push((a, i));
    }
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &(u, e) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                parent[u] = Some(e);
                stack.push(u);
            }
        }
    }
    // Arrangements per vertex.
    let mut options: Vec<Vec<Vec<Item>>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut free: Vec<Item> = adj[v]
            .iter()
            .filter(|&&(_, e)| Some(e) != parent[v])
            .map(|&(_, e)| Item::Edge(e))
            .collect();
        let mut fixed_first = None;
        if v == 0 && !adj[0].is_empty() {
            let &(_, e) = adj[0].iter().min_by_key(|&&(u, _)| u).unwrap();
            fixed_first = Some(Item::Edge(e));
            free.retain(|&it| it != Item::Edge(e));
        }
        if v < k {
            free.push(Item::Cilium);
        }
        let mut arrangements = Vec::new();
        for p in Permutation::all(free.len()) {
            let mut rot = Vec::with_capacity(free.len() + 2);
            rot.extend(fixed_first);
            rot.extend(p.images().iter().map(|&i| free[i]));
            if let Some(e) = parent[v] {
                rot.push(Item::Edge(e));
            }
            arrangements.push(rot);
        }
        options.push(arrangements);
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        out.push(Shape {
            edges: edges.to_vec(),
            rotation: (0..n).map(|v| options[v][choice[v]].clone()).collect(),
        });
        let mut v = n;
        loop {
            if v == 0 {
                return out;
            }
            v -= 1;
            choice[v] += 1;
            if choice[v] < options[v].len() {
                break;
            }
            choice[v] = 0;
        }
    }
}

/// Every uncolored plane tree on `n` labeled vertices with cilia on `0..k`.
pub fn all_shapes(n: usize, k: usize) -> Vec<Shape> {
    labeled_trees(n)
        .iter()
        .flat_map(|edges| shapes_of(edges, n, k))
        .collect()
}

fn check_args(n: usize, k: usize, d: usize) -> Result<u128> {
    if n == 0 || k > n {
        return Err(Error::invalid(format!("need 1 <= n and k <= n, got n = {n}, k = {k}")));
    }
    if d == 0 {
        return Err(Error::invalid("D must be positive"));
    }
    let count = tree_count_formula(n, k, d);
    if count > TREE_BUDGET {
        return Err(Error::budget("tree enumeration", count, TREE_BUDGET));
    }
    Ok(count)
}

fn next_coloring(tree: &mut PlaneTree, d: usize) -> bool {
    for e in 0..tree.edges().len() {
        let c = tree.edges()[e].color + 1;
        if c < d {
            tree.set_edge_color(e, c);
            return true;
        }
        tree.set_edge_color(e, 0);
    }
    false
}

fn next_orientation(tree: &mut PlaneTree) -> bool {
    for e in 0..tree.edges().len() {
        if tree.edges()[e].forward {
            tree.set_edge_forward(e, false);
            return true;
        }
        tree.set_edge_forward(e, true);
    }
    false
}

/// Visits every plane tree with colored edges, all oriented `a → b`; each
/// visit stands for `2^(n-1)` trees that differ only in orientations.
/// Shapes are distributed over workers; `visit` folds into a per-worker
/// accumulator and `reduce` merges them.
pub fn for_each_colored_shape<R, I, V, F>(
    n: usize,
    k: usize,
    d: usize,
    exec: Exec,
    identity: I,
    visit: V,
    reduce: F,
) -> Result<R>
where
    R: Send,
    I: Fn() -> R + Sync + Send,
    V: Fn(&mut R, &PlaneTree) + Sync + Send,
    F: Fn(R, R) -> R + Sync + Send,
{
    check_args(n, k, d)?;
    let shapes = all_shapes(n, k);
    Ok(exec.map_reduce(
        &shapes,
        &identity,
        |shape| {
            let mut acc = identity();
            let mut tree = shape.tree(d, k);
            loop {
                visit(&mut acc, &tree);
                if !next_coloring(&mut tree, d) {
                    break;
                }
            }
            acc
        },
        &reduce,
    ))
}

/// Like [`for_each_colored_shape`] but visits every orientation as well.
pub fn for_each_tree<R, I, V, F>(
    n: usize,
    k: usize,
    d: usize,
    exec: Exec,
    identity: I,
    visit: V,
    reduce: F,
) -> Result<R>
where
    R: Send,
    I: Fn() -> R + Sync + Send,
    V: Fn(&mut R, &PlaneTree) + Sync + Send,
    F: Fn(R, R) -> R + Sync + Send,
{
    for_each_colored_shape(
        n,
        k,
        d,
        exec,
        identity,
        |acc, colored| {
            let mut tree = colored.clone();
            loop {
                visit(acc, &tree);
                if !next_orientation(&mut tree) {
                    break;
                }
            }
        },
        reduce,
    )
}

/// Owned stream of every plane tree with colored oriented edges on `n`
/// labeled vertices, cilia tuple `(1, ..., k)`.
pub fn enumerate_trees(n: usize, k: usize, d: usize) -> Result<impl Iterator<Item = PlaneTree>> {
    check_args(n, k, d)?;
    let shapes = all_shapes(n, k);
    Ok(shapes.into_iter().flat_map(move |shape| {
        let first = shape.tree(d, k);
        let mut state = Some(first);
        std::iter::from_fn(move || {
            let cur = state.take()?;
            let mut next = cur.clone();
            if next_orientation(&mut next) || next_coloring(&mut next, d) {
                state = Some(next);
            }
            Some(cur)
        })
    }))
}

/// Structure code of a tree: its walk with vertices renamed by first visit,
/// cilium marks, and edge colors. Trees with equal codes have identical
/// faces, cilium order and tree paths, hence identical expansion terms.
pub fn structure_code(tree: &PlaneTree) -> Vec<u32> {
    let walk = tree.contour_walk().steps;
    let mut rename = vec![u32::MAX; tree.n()];
    let mut next = 0;
    let mut code = Vec::with_capacity(2 * walk.len() + 3 * tree.edges().len());
    for s in &walk {
        if rename[s.vertex] == u32::MAX {
            rename[s.vertex] = next;
            next += 1;
        }
        code.push(rename[s.vertex]);
        code.push(s.cilium as u32);
    }
    let mut edges: Vec<(u32, u32, u32)> = tree
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (rename[e.a], rename[e.b]);
            (a.min(b), a.max(b), e.color as u32)
        })
        .collect();
    edges.sort_unstable();
    for (a, b, c) in edges {
        code.extend([a, b, c]);
    }
    code
}

/// One representative per structure code among the colored shapes of
/// [`for_each_colored_shape`], with the number of colored shapes it stands
/// for. Ordered by code; the representative is the first member met in
/// enumeration order, whatever the executor.
pub fn distinct_colored_shapes(n: usize, k: usize, d: usize, exec: Exec) -> Result<Vec<(PlaneTree, u64)>> {
    type Classes = BTreeMap<Vec<u32>, (PlaneTree, u64)>;
    let classes: Classes = for_each_colored_shape(
        n,
        k,
        d,
        exec,
        BTreeMap::new,
        |acc: &mut Classes, t| {
            acc.entry(structure_code(t))
                .and_modify(|e| e.1 += 1)
                .or_insert_with(|| (t.clone(), 1));
        },
        |mut a, b| {
            for (code, (t, c)) in b {
                a.entry(code)
                    .and_modify(|e| e.1 += c)
                    .or_insert((t, c));
            }
            a
        },
    )?;
    Ok(classes
        .into_values()
        .collect())
}

/// Enumerated tree count against the closed formula, and the face identity
/// `|internal| + Σ_c C(ξ_c) = D + (n-1)(D-1)` on every colored shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeCountReport {
    pub n: usize,
    pub k: usize,
    #[serde(rename = "D")]
    pub d: usize,
    #[serde(with = "as_text")]
    pub enumerated: u128,
    #[serde(with = "as_text")]
    pub formula: u128,
    /// Colored shapes whose faces were counted; orientations share faces.
    pub face_checks: u64,
    pub face_failures: u64,
}

impl TreeCountReport {
    pub fn passed(&self) -> bool {
        self.enumerated == self.formula && self.face_failures == 0
    }
}

mod as_text {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }
}

pub fn count_check(n: usize, k: usize, d: usize, exec: Exec) -> Result<TreeCountReport> {
    let expected = d + n.saturating_sub(1) * d.saturating_sub(1);
    let (enumerated, face_checks, face_failures) = for_each_colored_shape(
        n,
        k,
        d,
        exec,
        || (0u128, 0u64, 0u64, FaceCounter::default()),
        |acc, t| {
            let mut o = t.clone();
            let mut orientations = 1;
            while next_orientation(&mut o) {
                orientations += 1;
            }
            acc.0 += orientations;
            acc.1 += 1;
            let (internal, cycles) = acc.3.count(n, d, t.edges(), &t.contour_walk().steps);
            if internal + cycles != expected {
                acc.2 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3),
    )
    .map(|(a, b, c, _)| (a, b, c))?;
    Ok(TreeCountReport {
        n,
        k,
        d,
        enumerated,
        formula: tree_count_formula(n, k, d),
        face_checks,
        face_failures,
    })
}
