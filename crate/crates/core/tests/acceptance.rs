//! The acceptance suite: one PASS/FAIL line per criterion on stdout.
//!
//! Lines are written to the process stdout directly so they show up without
//! `--nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lve_core::algebra::{catalan, int, rat, to_f64};
use lve_core::expansion::bounds::{bound_suite, cumulant_rest_bound, BoundParams};
use lve_core::expansion::melonic::{melonic_closed_form, melonic_coefficient, melonic_series, term_ratios};
use lve_core::expansion::{assemble_series, w_integral};
use lve_core::graphs::{all_graphs, gaussian_expectation, ColoredGraph};
use lve_core::lemma::check_lemma_faces;
use lve_core::oracle::{perturbative_cumulant, FeynmanConfig};
use lve_core::perm::check_prop1;
use lve_core::trees::{
    count_check, enumerate_loop_insertions, enumerate_trees, loop_insertion_count, tree_count_formula,
    DecoratedTree, LoopEdge, PlaneTree, TreeCountReport,
};
use lve_core::weingarten::{asymptotics_match, verify_gram_identity, weingarten_table};
use lve_core::{Exec, PermTuple, Rational, RationalFunctionN};

const EXEC: Exec = Exec::Parallel;

/// Outcome of one criterion: pass flag and a one-line detail.
type Verdict = (bool, String);

struct Suite {
    failed: Vec<usize>,
}

impl Suite {
    fn run(&mut self, id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Verdict) {
        let start = Instant::now();
        let (ok, detail) = f();
        let took = start.elapsed();
        let in_time = took <= limit;
        let pass = ok && in_time;
        if !pass {
            self.failed.push(id);
        }
        let time_note = if in_time { String::new() } else { format!(" over the {limit:?} limit") };
        let line = format!(
            "{} criterion {id:>2} {name}: {detail} [{:.2}s{time_note}]\n",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64()
        );
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(line.as_bytes());
        let _ = out.flush();
    }
}

/// Every `count_check` report in the range of the first two criteria.
fn count_reports() -> Vec<TreeCountReport> {
    let mut out = Vec::new();
    for d in [3, 4] {
        for n in 1..=6 {
            for k in 0..=n.min(3) {
                out.push(count_check(n, k, d, EXEC).unwrap());
            }
        }
    }
    out
}

fn tree_counting(reports: &[TreeCountReport]) -> Verdict {
    let mut trees: u128 = 0;
    for r in reports {
        if r.enumerated != r.formula {
            return (false, format!("n={} k={} D={}: {} vs {}", r.n, r.k, r.d, r.enumerated, r.formula));
        }
        trees += r.enumerated;
    }
    (true, format!("{} cases, {trees} trees, all equal to the formula", reports.len()))
}

fn face_identity(reports: &[TreeCountReport]) -> Verdict {
    let mut checked = 0;
    for r in reports {
        if r.face_failures > 0 {
            return (false, format!("n={} k={} D={}: {} failures", r.n, r.k, r.d, r.face_failures));
        }
        checked += r.face_checks;
    }
    (true, format!("{checked} colored shapes, zero exceptions"))
}

fn loop_counting() -> Verdict {
    let mut cases = 0;
    for n in 1..=4usize {
        for k in 0..=2usize.min(n) {
            if n == 1 && k == 0 {
                continue;
            }
            for s in 0..=2 {
                let len = 2 * n + k - 2;
                let e = enumerate_loop_insertions(len, s, 3).unwrap().count() as u128;
                let f = loop_insertion_count(len, s, 3);
                if e != f {
                    return (false, format!("n={n} k={k} s={s}: {e} vs {f}"));
                }
                cases += 1;
            }
        }
    }
    (true, format!("{cases} cases exact"))
}

fn worked_example() -> Verdict {
    let strs = |t: &PermTuple| t.perms().iter().map(ToString::to_string).collect::<Vec<_>>();
    let tree = PlaneTree::parse_walk(
        "1,2,3,4,3,5;5,6,5,7,5,3,8,3;3,2,9,10,9,11,9;9,2,12,13,12,14,12;12,2,15,2,16,2",
        3,
        "1-2:1:> 2-15:1:> 3-5:1:> 5-6:1:> 5-7:1:> 9-11:1:> 2-3:2:> 2-12:2:> \
         2-9:3:> 3-4:2:> 3-8:3:> 9-10:2:> 12-13:3:> 12-14:3:> 2-16:2:>",
    )
    .unwrap();
    let walk = tree.contour_walk();
    let f = tree.faces();
    let mut wrong = Vec::new();
    if strs(&f.xi) != ["(1,2)(3)(4)", "(1)(2,4)(3)", "(1)(2)(3)(4)"] {
        wrong.push("xi");
    }
    let q: Vec<usize> = (0..walk.len()).filter(|&i| walk.steps[i].cilium).map(|i| i + 1).collect();
    if q != [6, 14, 21, 28] {
        wrong.push("cilium positions");
    }
    let strand: Vec<usize> = f
        .strand(0, 1)
        .unwrap()
        .steps
        .iter()
        .map(|&s| walk.vertex(s) + 1)
        .collect();
    if strand != [3, 3, 3, 5] {
        wrong.push("strand 3 -> 5");
    }
    let tau = PermTuple::parse(&["(2)(1,3,4)", "(2)(1,4,3)", "(1,2)(3,4)"], 4).unwrap();
    let dt = DecoratedTree::attach_external(tree, tau).unwrap();
    if dt.tau().get(0).compose(dt.xi_prime().get(0)).unwrap().to_string() != "(1,2,3,4)" {
        wrong.push("tau_1 xi_1");
    }
    let l = dt
        .insert_loops(&[LoopEdge::new(2, 31, 2), LoopEdge::new(3, 7, 0)])
        .unwrap();
    if strs(l.xi_prime()) != ["(1,2,8)(3,4,5)(6)(7)", "(1,2,3,5,7,8)(4)(6)", "(1,2,6,8)(3,5)(4)(7)"] {
        wrong.push("xi'");
    }
    if strs(l.tau_prime()) != ["(1)(2,3)(4,6,7)(5)(8)", "(1)(2)(3)(4,7,6)(5)(8)", "(1,8)(2)(3)(4,5)(6,7)"] {
        wrong.push("tau'");
    }
    let m: Vec<usize> = l.m().iter().map(|x| x + 1).collect();
    if m != [4, 5, 6, 7] {
        wrong.push("m");
    }
    let t: Vec<(usize, usize)> = l.t().iter().map(|&(a, b)| (a + 1, b + 1)).collect();
    if t != [(1, 8), (2, 3)] {
        wrong.push("t");
    }
    if wrong.is_empty() {
        (true, "xi, cilia, strand, tau_1 xi_1, xi', tau', m, t all reproduced".into())
    } else {
        (false, format!("differs: {}", wrong.join(", ")))
    }
}

fn lemma_suite() -> Verdict {
    let mut triples = 0;
    for k in 1..=5 {
        let r = check_prop1(k, EXEC).unwrap();
        if !r.passed() {
            return (false, format!("three-permutation inequality fails at k={k}"));
        }
        triples += r.checked;
    }
    let mut faces = 0;
    for k in 1..=3 {
        let r = check_lemma_faces(3, k, 4, EXEC).unwrap();
        if !r.passed() {
            return (false, format!("face lemma fails at k={k}: {:?}", r.counterexamples));
        }
        faces += r.checked;
    }
    (true, format!("{triples} permutation triples and {faces} face cases, zero counterexamples"))
}

fn weingarten() -> Verdict {
    let mut entries = 0;
    for k in 1..=4 {
        let t = weingarten_table(k).unwrap();
        if let Err(e) = verify_gram_identity(&t) {
            return (false, format!("Gram identity at k={k}: {e}"));
        }
        entries += t.entries.len();
    }
    let one = weingarten_table(1).unwrap();
    if one.get(&[1]) != Some(&RationalFunctionN::monomial(int(1), -1)) {
        return (false, "Wg((1)) is not 1/N".into());
    }
    for k in 1..=5 {
        if !asymptotics_match(&weingarten_table(k).unwrap()).unwrap() {
            return (false, format!("asymptotics differ at k={k}"));
        }
    }
    (true, format!("Gram identity on {entries} entries, Wg((1)) = 1/N, asymptotics for k <= 5"))
}

fn melonic() -> Verdict {
    // leading coefficients of the assembled dipole series
    for (d, m) in [(3, 3), (4, 2)] {
        let s = assemble_series(&ColoredGraph::dipole(d), m, EXEC).unwrap();
        for p in 0..=m {
            let (deg, lead) = s.coefficient(p).unwrap().large_n().unwrap();
            if deg != 0 || lead != melonic_coefficient(d, p) {
                return (false, format!("D={d} λ^{p}: N^{deg} · {lead}"));
            }
        }
    }
    for p in 0..10 {
        let want = Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(-6), p) * catalan(p as u64));
        if melonic_coefficient(3, p) != want {
            return (false, format!("coefficient {p}"));
        }
    }
    let lambda = rat(1, 100);
    let partial = melonic_series(3, 25, &lambda);
    let closed = melonic_closed_form(3, &lambda, 40).unwrap();
    let gap = to_f64(&closed.distance(&partial));
    if gap >= 1e-12 {
        return (false, format!("partial sum off by {gap:e}"));
    }
    // ratios approach 1 as λ → 1/(8D) from below
    let mut last = 0.0;
    for j in 1..=5 {
        let eps = rat(1, 10i64.pow(j));
        let l = (Rational::one() - eps) * rat(1, 24);
        let r = *term_ratios(3, &l, 1_000_000).last().unwrap();
        if r <= last || r >= 1.0 {
            return (false, format!("ratio {r} at 1 - 10^-{j}"));
        }
        last = r;
    }
    if last < 0.9999 {
        return (false, format!("ratio only reaches {last}"));
    }
    (
        true,
        format!("leads are (-2D)^p Catalan(p), |partial - closed| = {gap:.1e}, ratio -> {last:.6}"),
    )
}

fn oracle_equivalence() -> Verdict {
    let mut detail = Vec::new();
    for d in [3, 4] {
        let b = ColoredGraph::dipole(d);
        let e = assemble_series(&b, 2, EXEC).unwrap();
        let o = perturbative_cumulant(&FeynmanConfig::new(b.clone(), 2).unwrap(), EXEC).unwrap();
        for p in 0..=2 {
            if e.coefficient(p) != o.coefficient(p) {
                return (false, format!("D={d} λ^{p}: {:?} vs {:?}", e.coefficient(p), o.coefficient(p)));
            }
        }
        if e.coefficient(0) != Some(&RationalFunctionN::one()) {
            return (false, format!("D={d}: λ^0 is not 1"));
        }
        let two_d = 2 * d as i64;
        for (p, want) in [(1, -two_d), (2, two_d * two_d * 2)] {
            let (deg, lead) = e.coefficient(p).unwrap().large_n().unwrap();
            if deg != 0 || lead != int(want) {
                return (false, format!("D={d} λ^{p} limit N^{deg} · {lead}"));
            }
        }
        detail.push(format!("D={d} λ^1 = {}", e.coefficient(1).unwrap()));
    }
    // every labeled two-vertex-pair graph at D = 3 as well
    let graphs = all_graphs(2, 3);
    for g in &graphs {
        let e = assemble_series(g, 2, EXEC).unwrap();
        let o = perturbative_cumulant(&FeynmanConfig::new(g.clone(), 2).unwrap(), EXEC).unwrap();
        if (1..=2).any(|p| e.coefficient(p) != o.coefficient(p)) {
            return (false, format!("k=2 graph {:?} differs", g.beta));
        }
    }
    detail.push(format!("plus {} graphs with k = 2 at D=3", graphs.len()));
    (true, format!("identical rational functions through λ^2; {}", detail.join("; ")))
}

fn bound_domination() -> Verdict {
    let b = ColoredGraph::dipole(3);
    let p = BoundParams::new(rat(1, 10), Rational::zero(), int(10)).unwrap();
    let r = bound_suite(&b, &p, 4, 2, 1, EXEC).unwrap();
    if !r.passed() {
        return (false, format!("{} terms exceed their bound", r.violations));
    }
    let terms: usize = r.rows.iter().map(|x| x.trees).sum();
    let worst = r
        .rows
        .iter()
        .map(|x| x.max_term / x.bound)
        .fold(0.0, f64::max);
    let mut rest = Vec::new();
    for lambda in [rat(1, 151), rat(1, 300), rat(1, 1000)] {
        let q = BoundParams::new(lambda, Rational::zero(), int(10)).unwrap();
        let v = cumulant_rest_bound(&q, 3, 1, 1).unwrap();
        if !(v.is_finite() && v > 0.0) {
            return (false, format!("rest bound {v} at |λ| = {}", q.lambda_abs));
        }
        rest.push(format!("{v:.3e}"));
    }
    (
        true,
        format!(
            "{terms} tree sums, largest ratio to bound {worst:.3}; rest bounds {}",
            rest.join(", ")
        ),
    )
}

/// A uniformly random plane tree on `n` vertices, no cilia, one color.
fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> PlaneTree {
    let count = tree_count_formula(n, 0, 1) as usize;
    enumerate_trees(n, 0, 1).unwrap().nth(rng.gen_range(0..count)).unwrap()
}

fn w_integrals() -> Verdict {
    let two = enumerate_trees(2, 0, 1).unwrap().next().unwrap();
    let three = enumerate_trees(3, 0, 1).unwrap().next().unwrap();
    let (a, c) = (0..3)
        .flat_map(|a| (0..3).map(move |c| (a, c)))
        .find(|&(a, c)| three.path_edges(a, c).len() == 2)
        .unwrap();
    let exact = [
        w_integral(&three, &[]).unwrap(),
        w_integral(&two, &[(0, 1)]).unwrap(),
        w_integral(&three, &[(a, c)]).unwrap(),
    ];
    if exact != [int(1), rat(1, 2), rat(1, 3)] {
        return (false, format!("exact values {exact:?}"));
    }
    const SAMPLES: usize = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst: f64 = 0.0;
    for instance in 0..20 {
        let n = rng.gen_range(2..=6);
        let tree = random_tree(&mut rng, n);
        let pairs: Vec<(usize, usize)> = (0..rng.gen_range(1..=3))
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect();
        let exact = to_f64(&w_integral(&tree, &pairs).unwrap());
        let paths: Vec<Vec<usize>> = pairs
            .iter()
            .filter(|(x, y)| x != y)
            .map(|&(x, y)| tree.path_edges(x, y))
            .collect();
        let mut u = vec![0.0f64; n - 1];
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..SAMPLES {
            for x in u.iter_mut() {
                *x = rng.gen::<f64>();
            }
            let v: f64 = paths
                .iter()
                .map(|p| p.iter().map(|&e| u[e]).fold(1.0, f64::min))
                .product();
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / SAMPLES as f64;
        let var = (sum_sq / SAMPLES as f64 - mean * mean).max(0.0);
        let se = (var / SAMPLES as f64).sqrt();
        let z = if se == 0.0 {
            if (mean - exact).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (mean - exact).abs() / se
        };
        if z > 4.0 {
            return (false, format!("instance {instance}: n={n} pairs {pairs:?} exact {exact} mc {mean} ({z:.2}σ)"));
        }
        worst = worst.max(z);
    }
    (true, format!("1, 1/2, 1/3 exact; 20 Monte Carlo instances, worst {worst:.2}σ"))
}

fn gaussian() -> Verdict {
    let s2 = rat(7, 3);
    for d in 3..=5 {
        let r = gaussian_expectation(&ColoredGraph::dipole(d), &s2).unwrap();
        if r.value != RationalFunctionN::monomial(s2.clone(), 1) {
            return (false, format!("D={d}: {}", r.value));
        }
    }
    let mut checked = 0;
    let mut max_omega = 0;
    for k in 1..=3 {
        for g in all_graphs(k, 3) {
            if g.components() != 1 {
                continue;
            }
            let r = gaussian_expectation(&g, &s2).unwrap();
            if r.omega < 0 || !r.r.is_positive() {
                return (false, format!("{:?}: omega {} r {}", g.beta, r.omega, r.r));
            }
            max_omega = max_omega.max(r.omega);
            checked += 1;
        }
    }
    (
        true,
        format!("dipole moment σ²N for D = 3, 4, 5; omega >= 0 on {checked} connected graphs (max {max_omega})"),
    )
}

#[test]
fn acceptance() {
    let mut s = Suite { failed: Vec::new() };
    let min = |m: u64| Duration::from_secs(60 * m);
    let mut reports = Vec::new();
    s.run(1, "tree counting", min(2), || {
        reports = count_reports();
        tree_counting(&reports)
    });
    s.run(2, "face identity", Duration::from_secs(1), || face_identity(&reports));
    s.run(3, "loop-insertion counting", min(1), loop_counting);
    s.run(4, "worked example", min(1), worked_example);
    s.run(5, "lemma suite", min(10), lemma_suite);
    s.run(6, "Weingarten functions", min(1), weingarten);
    s.run(7, "melonic resummation", Duration::from_secs(1), melonic);
    s.run(8, "oracle equivalence", min(30), oracle_equivalence);
    s.run(9, "bound domination", min(1), bound_domination);
    s.run(10, "w-integral", min(2), w_integrals);
    s.run(11, "Gaussian moments", min(5), gaussian);
    assert!(s.failed.is_empty(), "failed criteria: {:?}", s.failed);
}
