//! Exact assembly of the λ-series of `K(B, N)` from the mixed expansion.
//!
//! Cilia are numbered in walk order, so a single labeled graph `B` does not
//! see a symmetric sum; the coefficient of `δ^B` is the average of the tree
//! sums over all relabelings of the white and black vertices of `B`.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::fast::{Decoration, TreeContext};
use super::{n_exponent, w_integral};
use crate::algebra::{factorial, Rational, RationalFunctionN};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graphs::ColoredGraph;
use crate::perm::Permutation;
use crate::trees::{
    distinct_colored_shapes, enumerate_loop_insertions, loop_insertion_count, tree_count_formula, PlaneTree,
};
use crate::weingarten::{partition_key, weingarten_table};

/// Largest number of (tree, τ, insertion) triples an assembly accepts.
pub const SERIES_BUDGET: u128 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    /// Highest power of λ computed.
    pub m: usize,
    /// Loop edges kept per tree: a number `s` (terms with `q < s`), or
    /// `"exact-to-order"` when every `q` reaching `λ^m` is kept.
    #[serde(with = "loop_cap")]
    pub s: Option<usize>,
}

mod loop_cap {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Cap(usize),
        Mode(String),
    }

    pub fn serialize<S: Serializer>(s: &Option<usize>, ser: S) -> Result<S::Ok, S::Error> {
        match s {
            Some(c) => Repr::Cap(*c),
            None => Repr::Mode("exact-to-order".into()),
        }
        .serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<usize>, D::Error> {
        match Repr::deserialize(de)? {
            Repr::Cap(c) => Ok(Some(c)),
            Repr::Mode(m) if m == "exact-to-order" => Ok(None),
            Repr::Mode(m) => Err(serde::de::Error::custom(format!("unknown truncation {m:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    /// Decorated trees summed over, counting every labeled tree, cilium
    /// tuple and orientation.
    pub represented: String,
    /// Decorated trees actually evaluated after merging identical shapes.
    pub evaluated: u64,
    /// A priori estimate checked against `limit`.
    pub estimate: u64,
    pub limit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CumulantSeries {
    pub source: String,
    pub graph: ColoredGraph,
    #[serde(rename = "D")]
    pub d: usize,
    /// λ-power → coefficient of `K(B, N)`.
    pub coefficients: BTreeMap<usize, RationalFunctionN>,
    pub truncation: Truncation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_report: Option<BudgetReport>,
}

impl CumulantSeries {
    pub fn coefficient(&self, p: usize) -> Option<&RationalFunctionN> {
        self.coefficients.get(&p)
    }

    /// `Σ_p c_p(n0) λ^p`.
    pub fn eval(&self, n0: &Rational, lambda: &Rational) -> Result<Rational> {
        let mut total = Rational::zero();
        for (&p, c) in &self.coefficients {
            total += c.eval(n0)? * num_traits::pow(lambda.clone(), p);
        }
        Ok(total)
    }

    /// One `lambda_power,num ; den` row per coefficient.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda_power,coefficient\n");
        for (p, c) in &self.coefficients {
            out.push_str(&format!("{p},\"{}\"\n", c.to_text()));
        }
        out
    }
}

/// External-edge tuples `τ ∈ S_k^D` with their Weingarten classes.
///
/// The coefficient of a labeled pattern `δ^B` collects every relabeling of
/// the white and black vertices of `B`, so each tuple carries the average
/// of `Π_c Wg(τ_c α σ_c⁻¹ β⁻¹)` over `(α, β) ∈ S_k²`.
struct TauTable {
    /// Per tuple, per color, images on the cilia.
    images: Vec<Vec<Vec<usize>>>,
    /// Per tuple, index into `products`.
    class: Vec<usize>,
    /// Averaged Weingarten product per class.
    products: Vec<RationalFunctionN>,
}

impl TauTable {
    fn new(b: &ColoredGraph) -> Result<Self> {
        let table = weingarten_table(b.k)?;
        let elements = Permutation::all(b.k);
        let sigma_inv: Vec<Permutation> = b.beta.perms().iter().map(Permutation::inverse).collect();
        let relabelings: Vec<Vec<Permutation>> = elements
            .iter()
            .flat_map(|a| {
                elements.iter().map(|beta| {
                    sigma_inv
                        .iter()
                        .map(|s| a.compose(s).and_then(|x| x.compose(&beta.inverse())).expect("same k"))
                        .collect()
                })
            })
            .collect();
        let weight = Rational::new(1.into(), (relabelings.len() as u64).into());
        let mut images = Vec::new();
        let mut class = Vec::new();
        let mut keys: BTreeMap<Vec<Vec<String>>, usize> = BTreeMap::new();
        let mut single: BTreeMap<Vec<String>, RationalFunctionN> = BTreeMap::new();
        let mut products = Vec::new();
        let mut idx = vec![0usize; b.d];
        loop {
            let taus: Vec<&Permutation> = idx.iter().map(|&i| &elements[i]).collect();
            let mut key: Vec<Vec<String>> = relabelings
                .iter()
                .map(|rel| {
                    let mut inner: Vec<String> = taus
                        .iter()
                        .zip(rel)
                        .map(|(t, s)| partition_key(&t.compose(s).expect("same k").cycle_type()))
                        .collect();
                    inner.sort();
                    inner
                })
                .collect();
            key.sort();
            let next = keys.len();
            let id = *keys.entry(key.clone()).or_insert(next);
            if id == products.len() {
                let mut sum = RationalFunctionN::zero();
                for inner in &key {
                    let prod = single.entry(inner.clone()).or_insert_with(|| {
                        let mut prod = RationalFunctionN::one();
                        for t in inner {
                            let parts: Vec<usize> = t.split(',').map(|x| x.parse().unwrap()).collect();
                            prod = &prod * table.get(&parts).expect("tabulated");
                        }
                        prod
                    });
                    sum = &sum + &*prod;
                }
                products.push(sum.scale(&weight));
            }
            class.push(id);
            images.push(taus.iter().map(|t| t.images().to_vec()).collect());
            let mut c = b.d;
            loop {
                if c == 0 {
                    return Ok(TauTable {
                        images,
                        class,
                        products,
                    });
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
}

/// `(q, τ index, N-exponent) → Σ w` over the loop decorations of one tree.
type TreeSums = BTreeMap<(usize, usize, i64), Rational>;

fn tree_sums(tree: &PlaneTree, qs: &[usize], taus: &TauTable, components: usize) -> Result<(TreeSums, u64)> {
    let ctx = TreeContext::new(tree);
    let (n, k, d) = (tree.n(), tree.k(), tree.d());
    let mut dec = Decoration::default();
    let mut w_index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut w_values: Vec<Rational> = Vec::new();
    let mut counts: HashMap<(usize, usize, i64, usize), u64> = HashMap::new();
    let mut evaluated = 0u64;
    let mut key = Vec::new();
    for &q in qs {
        for ins in enumerate_loop_insertions(ctx.walk_len(), q, d)? {
            dec.fill(&ctx, &ins);
            key.clear();
            key.extend(dec.pairs.iter().filter(|(a, b)| a != b).map(|&(a, b)| (a.min(b), a.max(b))));
            key.sort_unstable();
            let wi = match w_index.get(&key) {
                Some(&i) => i,
                None => {
                    w_values.push(w_integral(tree, &key)?);
                    w_index.insert(key.clone(), w_values.len() - 1);
                    w_values.len() - 1
                }
            };
            for (ti, tau) in taus.images.iter().enumerate() {
                let faces = dec.face_count(&ctx, tau);
                let e = n_exponent(d, k, n, q, components, faces);
                *counts.entry((q, ti, e, wi)).or_default() += 1;
                evaluated += 1;
            }
        }
    }
    let mut out = TreeSums::new();
    for ((q, ti, e, wi), c) in counts {
        *out.entry((q, ti, e)).or_insert_with(Rational::zero) += &w_values[wi] * Rational::from_integer(c.into());
    }
    Ok((out, evaluated))
}

/// `(-1)^q / q! · k!`.
fn loop_prefactor(q: usize, k: usize) -> Rational {
    let sign: i64 = if q.is_multiple_of(2) { 1 } else { -1 };
    Rational::new(factorial(k as u64) * sign, factorial(q as u64))
}

/// `(-1)^{n-1} / (n-k)! · 2^{n-1}`: series weight times the orientation
/// count of a colored shape.
fn tree_prefactor(n: usize, k: usize) -> Rational {
    let sign: i64 = if (n - 1).is_multiple_of(2) { 1 } else { -1 };
    Rational::new(num_bigint::BigInt::from(sign) << (n - 1), factorial((n - k) as u64))
}

fn plan(b: &ColoredGraph, m: usize, s: Option<usize>) -> Result<(BTreeMap<usize, Vec<usize>>, u128)> {
    let k = b.k;
    let taus: u128 = (1..=k as u128).product::<u128>().saturating_pow(b.d as u32);
    let mut by_n: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut estimate: u128 = 0;
    for p in 0..=m {
        for n in k.max(1)..=p + 1 {
            let q = p + 1 - n;
            if s.is_some_and(|s| q >= s) {
                continue;
            }
            by_n.entry(n).or_default().push(q);
            let shapes = match tree_count_formula(n, k, b.d) {
                u128::MAX => u128::MAX,
                c => c >> (n - 1),
            };
            let walk = 2 * n - 2 + k;
            estimate = estimate.saturating_add(
                shapes
                    .saturating_mul(taus)
                    .saturating_mul(loop_insertion_count(walk, q, b.d)),
            );
        }
        if estimate > SERIES_BUDGET {
            break;
        }
    }
    if estimate > SERIES_BUDGET {
        return Err(Error::budget("series assembly", estimate, SERIES_BUDGET));
    }
    Ok((by_n, estimate))
}

/// Every coefficient of `λ^p`, `p ≤ m`, of `K(B, N)`, exactly.
pub fn assemble_series(b: &ColoredGraph, m: usize, exec: Exec) -> Result<CumulantSeries> {
    assemble(b, m, None, exec)
}

/// Like [`assemble_series`] but keeping only terms with fewer than `s` loop
/// edges; the rest term is then bounded, not computed.
pub fn assemble_series_capped(b: &ColoredGraph, m: usize, s: usize, exec: Exec) -> Result<CumulantSeries> {
    assemble(b, m, Some(s), exec)
}

fn assemble(b: &ColoredGraph, m: usize, s: Option<usize>, exec: Exec) -> Result<CumulantSeries> {
    let (by_n, estimate) = plan(b, m, s)?;
    let taus = TauTable::new(b)?;
    let components = b.components();
    let k = b.k;
    // (p, Weingarten class, exponent) → coefficient
    let mut acc: BTreeMap<(usize, usize, i64), Rational> = BTreeMap::new();
    let mut represented = num_bigint::BigInt::zero();
    let mut evaluated = 0u64;
    for (&n, qs) in &by_n {
        let classes = distinct_colored_shapes(n, k, b.d, exec)?;
        let part = exec.map_reduce(
            &classes,
            || Ok((TreeSums::new(), 0u64, num_bigint::BigInt::zero())),
            |(tree, mult)| {
                let (sums, count) = tree_sums(tree, qs, &taus, components)?;
                let scale = Rational::from_integer((*mult).into());
                let sums = sums.into_iter().map(|(key, v)| (key, v * &scale)).collect();
                Ok((sums, count, num_bigint::BigInt::from(count) * *mult))
            },
            |a: Result<(TreeSums, u64, num_bigint::BigInt)>, b| {
                let (mut x, cx, rx) = a?;
                let (y, cy, ry) = b?;
                for (key, v) in y {
                    *x.entry(key).or_insert_with(Rational::zero) += v;
                }
                Ok((x, cx + cy, rx + ry))
            },
        )?;
        let (sums, count, rep) = part;
        evaluated += count;
        represented += (rep << (n - 1)) * falling(n, k);
        let pre = tree_prefactor(n, k);
        for ((q, ti, e), v) in sums {
            let key = (n - 1 + q, taus.class[ti], e);
            *acc.entry(key).or_insert_with(Rational::zero) += v * &pre * loop_prefactor(q, k);
        }
    }
    let mut coefficients: BTreeMap<usize, RationalFunctionN> = BTreeMap::new();
    for p in k.saturating_sub(1)..=m {
        coefficients.insert(p, RationalFunctionN::zero());
    }
    let mut grouped: BTreeMap<(usize, usize), Vec<(i64, Rational)>> = BTreeMap::new();
    for ((p, class, e), v) in acc {
        grouped.entry((p, class)).or_default().push((e, v));
    }
    for ((p, class), terms) in grouped {
        let laurent = RationalFunctionN::laurent(terms.iter().map(|(e, v)| (*e, v)));
        let add = &laurent * &taus.products[class];
        let slot = coefficients.entry(p).or_insert_with(RationalFunctionN::zero);
        *slot = &*slot + &add;
    }
    Ok(CumulantSeries {
        source: "expansion".into(),
        graph: b.clone(),
        d: b.d,
        coefficients,
        truncation: Truncation { m, s },
        budget_report: Some(BudgetReport {
            represented: represented.to_string(),
            evaluated,
            estimate: estimate as u64,
            limit: SERIES_BUDGET as u64,
        }),
    })
}

/// `n! / (n-k)!`: ordered cilium tuples.
fn falling(n: usize, k: usize) -> num_bigint::BigInt {
    crate::algebra::falling_ratio(n as u64, (n - k) as u64)
}

/// `T^{(q)} / λ^q` of one tree with external edges: the sum over all loop
/// decorations with `q` loops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeLoopSum {
    pub walk: String,
    pub annotation: String,
    pub tau: String,
    /// Labeled colored shapes sharing this value.
    pub multiplicity: u64,
    pub value: RationalFunctionN,
}

/// `T^{(q)}` for every tree on `n` vertices and every `τ`, one entry per
/// distinct structure.
pub fn tree_loop_sums(b: &ColoredGraph, n: usize, q: usize, exec: Exec) -> Result<Vec<TreeLoopSum>> {
    let k = b.k;
    let taus = TauTable::new(b)?;
    let shapes = match tree_count_formula(n, k, b.d) {
        u128::MAX => u128::MAX,
        c => c >> (n.max(1) - 1),
    };
    let estimate = shapes
        .saturating_mul(taus.images.len() as u128)
        .saturating_mul(loop_insertion_count(2 * n - 2 + k, q, b.d));
    if estimate > SERIES_BUDGET {
        return Err(Error::budget("tree loop sums", estimate, SERIES_BUDGET));
    }
    let classes = distinct_colored_shapes(n, k, b.d, exec)?;
    let components = b.components();
    exec.map_reduce(
        &classes,
        || Ok(Vec::new()),
        |(tree, mult)| {
            let (sums, _) = tree_sums(tree, &[q], &taus, components)?;
            let mut per_tau: BTreeMap<usize, Vec<(i64, Rational)>> = BTreeMap::new();
            for ((_, ti, e), v) in sums {
                per_tau.entry(ti).or_default().push((e, v));
            }
            let (walk, annotation) = tree.print_walk();
            let pre = loop_prefactor(q, k);
            Ok(per_tau
                .into_iter()
                .map(|(ti, terms)| {
                    let laurent = RationalFunctionN::laurent(terms.iter().map(|(e, v)| (*e, v)));
                    let tau = tau_text(&taus.images[ti]);
                    TreeLoopSum {
                        walk: walk.clone(),
                        annotation: annotation.clone(),
                        tau,
                        multiplicity: *mult,
                        value: (&laurent * &taus.products[taus.class[ti]]).scale(&pre),
                    }
                })
                .collect::<Vec<_>>())
        },
        |a: Result<Vec<TreeLoopSum>>, b| {
            let mut a = a?;
            a.extend(b?);
            Ok(a)
        },
    )
}

fn tau_text(images: &[Vec<usize>]) -> String {
    images
        .iter()
        .map(|im| Permutation::from_images(im.clone()).expect("permutation").to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
