//! Symmetric-group arithmetic and D-tuples of permutations.
//!
//! Permutations act on `{1..k}` in the text forms and on `{0..k-1}`
//! internally. Cycle notation lists every fixed point, e.g. `(1,2)(3)(4)`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation {
            images: (0..k).collect(),
        }
    }

    /// From 0-based images; fails unless `images` is a bijection.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &i in &images {
            if i >= k || seen[i] {
                return Err(Error::invalid(format!("{images:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// From a list of 0-based cycles over `k` points; unlisted points are fixed.
    pub fn from_cycles(k: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut seen = vec![false; k];
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                if a >= k || seen[a] {
                    return Err(Error::invalid(format!(
                        "point {} repeated or out of range",
                        a + 1
                    )));
                }
                seen[a] = true;
                images[a] = cycle[(i + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    /// Parses cycle notation such as `(2)(1,3,4)`. With `k = None` the size
    /// is the largest point mentioned.
    pub fn parse(text: &str, k: Option<usize>) -> Result<Self> {
        let bytes = text.as_bytes();
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut pos = 0;
        let skip_ws = |pos: &mut usize| {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
        };
        skip_ws(&mut pos);
        while pos < bytes.len() {
            if bytes[pos] != b'(' {
                return Err(Error::parse(pos, "expected '('"));
            }
            pos += 1;
            let mut cycle = Vec::new();
            loop {
                skip_ws(&mut pos);
                let start = pos;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                if start == pos {
                    if cycle.is_empty() && pos < bytes.len() && bytes[pos] == b')' {
                        // "()" is the empty cycle, accepted for k = 0
                        break;
                    }
                    return Err(Error::parse(pos, "expected a point label"));
                }
                let v: usize = text[start..pos]
                    .parse()
                    .map_err(|_| Error::parse(start, "bad number"))?;
                if v == 0 {
                    return Err(Error::parse(start, "points are 1-based"));
                }
                cycle.push(v - 1);
                skip_ws(&mut pos);
                match bytes.get(pos) {
                    Some(b',') => pos += 1,
                    Some(b')') => break,
                    _ => return Err(Error::parse(pos, "expected ',' or ')'")),
                }
            }
            pos += 1;
            if !cycle.is_empty() {
                cycles.push(cycle);
            }
            skip_ws(&mut pos);
        }
        let max = cycles.iter().flatten().map(|&a| a + 1).max().unwrap_or(0);
        let k = k.unwrap_or(max);
        if max > k {
            return Err(Error::invalid(format!("point {max} exceeds size {k}")));
        }
        Self::from_cycles(k, &cycles)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    /// Cycles (0-based), each starting at its smallest point, sorted by it.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.images[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }

    /// Number of cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        cycle_count_slice(&self.images)
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    /// All `k!` permutations of `{0..k-1}` in lexicographic order.
    pub fn all(k: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..k).collect();
        loop {
            out.push(Permutation {
                images: cur.clone(),
            });
            if !next_permutation(&mut cur) {
                break;
            }
        }
        out
    }
}

/// Cycle count of a permutation given by its image slice.
pub fn cycle_count_slice(images: &[usize]) -> usize {
    let k = images.len();
    let mut seen = [false; 64];
    let mut big;
    let seen: &mut [bool] = if k <= 64 {
        &mut seen[..k]
    } else {
        big = vec![false; k];
        &mut big
    };
    let mut count = 0;
    for start in 0..k {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = images[j];
        }
    }
    count
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

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "()");
        }
        for cycle in self.cycles() {
            write!(f, "(")?;
            for (i, a) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", a + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Permutation::parse(&s, None).map_err(serde::de::Error::custom)
    }
}

/// A `D`-tuple of permutations over a common `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PermTuple {
    perms: Vec<Permutation>,
}

impl PermTuple {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        if let Some(first) = perms.first() {
            for p in &perms {
                if p.len() != first.len() {
                    return Err(Error::SizeMismatch {
                        expected: first.len(),
                        found: p.len(),
                    });
                }
            }
        }
        Ok(PermTuple { perms })
    }

    pub fn identity(d: usize, k: usize) -> Self {
        PermTuple {
            perms: vec![Permutation::identity(k); d],
        }
    }

    /// Parses one cycle string per color.
    pub fn parse(texts: &[&str], k: usize) -> Result<Self> {
        Self::new(
            texts
                .iter()
                .map(|t| Permutation::parse(t, Some(k)))
                .collect::<Result<_>>()?,
        )
    }

    pub fn d(&self) -> usize {
        self.perms.len()
    }

    pub fn k(&self) -> usize {
        self.perms.first().map_or(0, Permutation::len)
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    pub fn get(&self, c: usize) -> &Permutation {
        &self.perms[c]
    }

    pub fn inverse(&self) -> PermTuple {
        PermTuple {
            perms: self.perms.iter().map(Permutation::inverse).collect(),
        }
    }

    /// Connected components of the bipartite graph on `k` white and `k`
    /// black vertices where, for each color `c`, black `l` is joined to
    /// white `perms[c](l)`.
    pub fn graph_components(&self) -> usize {
        let k = self.k();
        if k == 0 {
            return 0;
        }
        let mut uf = UnionFind::new(2 * k);
        for p in &self.perms {
            for l in 0..k {
                uf.union(k + l, p.apply(l));
            }
        }
        // A color-free tuple (D = 0) leaves every vertex isolated.
        uf.count()
    }
}

impl fmt::Display for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.perms.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Lookup tables for `S_k`: every element, the multiplication table, inverses
/// and cycle counts, all by index into [`Permutation::all`].
pub struct SymmetricGroup {
    pub k: usize,
    pub elements: Vec<Permutation>,
    /// `mul[a * order + b]` = index of `elements[a] ∘ elements[b]`.
    mul: Vec<u32>,
    inv: Vec<u32>,
    cycles: Vec<u8>,
}

impl SymmetricGroup {
    /// Refuses `k > 7` (the table would have more than 25M entries).
    pub fn new(k: usize) -> Result<Self> {
        if k > 7 {
            return Err(Error::budget("S_k multiplication table", factorial_u128(k).pow(2), 25_401_600));
        }
        let elements = Permutation::all(k);
        let order = elements.len();
        let index_of = |p: &[usize]| -> usize { lex_rank(p) };
        let mut mul = vec![0u32; order * order];
        let mut buf = vec![0usize; k];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                for i in 0..k {
                    buf[i] = pa.apply(pb.apply(i));
                }
                mul[a * order + b] = index_of(&buf) as u32;
            }
        }
        let inv = elements
            .iter()
            .map(|p| index_of(p.inverse().images()) as u32)
            .collect();
        let cycles = elements.iter().map(|p| p.cycle_count() as u8).collect();
        Ok(SymmetricGroup {
            k,
            elements,
            mul,
            inv,
            cycles,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.elements.len() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    #[inline]
    pub fn cycles(&self, a: usize) -> usize {
        self.cycles[a] as usize
    }

    pub fn index_of(&self, p: &Permutation) -> usize {
        lex_rank(p.images())
    }
}

/// Rank of a permutation in lexicographic order.
pub fn lex_rank(p: &[usize]) -> usize {
    let k = p.len();
    let mut rank = 0;
    for i in 0..k {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        rank = rank * (k - i) + smaller;
    }
    rank
}

fn factorial_u128(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Outcome of an exhaustive inequality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub checked: u64,
    /// Up to [`MAX_REPORTED`] counterexamples, as cycle strings.
    pub counterexamples: Vec<Vec<String>>,
    pub counterexample_count: u64,
    pub saturated: u64,
}

pub const MAX_REPORTED: usize = 20;

impl CheckReport {
    pub fn empty() -> Self {
        CheckReport {
            checked: 0,
            counterexamples: Vec::new(),
            counterexample_count: 0,
            saturated: 0,
        }
    }

    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        self.checked += other.checked;
        self.saturated += other.saturated;
        self.counterexample_count += other.counterexample_count;
        for c in other.counterexamples {
            if self.counterexamples.len() < MAX_REPORTED {
                self.counterexamples.push(c);
            }
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.counterexample_count == 0
    }
}

/// Exhaustively checks `C(τσ⁻¹) + C(τξ) ≤ C(ξ⁻¹σ⁻¹) + k` over `S_k³`.
pub fn check_prop1(k: usize, exec: Exec) -> Result<CheckReport> {
    if k > 6 {
        let n = factorial_u128(k);
        return Err(Error::budget("check_prop1", n * n * n, 373_248_000));
    }
    let g = SymmetricGroup::new(k)?;
    let order = g.order();
    let report = exec.map_reduce(
        &(0..order).collect::<Vec<_>>(),
        CheckReport::empty,
        |&xi| {
            let mut rep = CheckReport::empty();
            let xi_inv = g.inv(xi);
            for sigma in 0..order {
                let sigma_inv = g.inv(sigma);
                let rhs = g.cycles(g.mul(xi_inv, sigma_inv)) + k;
                for tau in 0..order {
                    let lhs = g.cycles(g.mul(tau, sigma_inv)) + g.cycles(g.mul(tau, xi));
                    rep.checked += 1;
                    if lhs == rhs {
                        rep.saturated += 1;
                    } else if lhs > rhs {
                        rep.counterexample_count += 1;
                        if rep.counterexamples.len() < MAX_REPORTED {
                            rep.counterexamples.push(vec![
                                g.elements[xi].to_string(),
                                g.elements[sigma].to_string(),
                                g.elements[tau].to_string(),
                            ]);
                        }
                    }
                }
            }
            rep
        },
        CheckReport::merge,
    );
    Ok(report)
}
