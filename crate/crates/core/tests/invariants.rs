use proptest::prelude::*;

use lve_core::algebra::{int, rat, Poly};
use lve_core::expansion::{tree_loop_sums, w_integral, w_integral_by_orderings};
use lve_core::graphs::ColoredGraph;
use lve_core::trees::enumerate_trees;
use lve_core::{Exec, Permutation, Rational, RationalFunctionN};

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 1..4).prop_map(|c| Poly::from_i64(&c))
}

fn nonzero_poly() -> impl Strategy<Value = Poly> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfun() -> impl Strategy<Value = RationalFunctionN> {
    (poly(), nonzero_poly()).prop_map(|(a, b)| RationalFunctionN::new(a, b).unwrap())
}

fn perm(k: usize) -> impl Strategy<Value = Permutation> {
    Just((0..k).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn perm_pair() -> impl Strategy<Value = (Permutation, Permutation)> {
    (1usize..=8).prop_flat_map(|k| (perm(k), perm(k)))
}

fn perm_triple() -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1usize..=9).prop_flat_map(|k| (perm(k), perm(k), perm(k)))
}

/// `k - #cycles`: the distance to the identity in transpositions.
fn norm(p: &Permutation) -> usize {
    p.len() - p.cycle_count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms(a in ratfun(), b in ratfun(), c in ratfun()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &RationalFunctionN::one(), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(a.checked_div(&a).unwrap(), RationalFunctionN::one());
        }
    }

    #[test]
    fn normal_form_and_text(a in ratfun()) {
        let back = RationalFunctionN::parse(&a.to_text()).unwrap();
        prop_assert_eq!(&back, &a);
        if let Some(lead) = a.den().leading() {
            prop_assert_eq!(lead, &int(1));
        }
        let g = Poly::gcd(a.num(), a.den());
        prop_assert_eq!(g.degree(), Some(0));
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in ratfun(), b in ratfun(), x in 7i64..40) {
        let x = rat(x, 3);
        let (ea, eb) = (a.eval(&x), b.eval(&x));
        if let (Ok(ea), Ok(eb)) = (ea, eb) {
            prop_assert_eq!((&a * &b).eval(&x).unwrap(), &ea * &eb);
            prop_assert_eq!((&a + &b).eval(&x).unwrap(), &ea + &eb);
        }
    }

    #[test]
    fn large_n_is_multiplicative(a in ratfun(), b in ratfun()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let (da, la) = a.large_n().unwrap();
        let (db, lb) = b.large_n().unwrap();
        let (dp, lp) = (&a * &b).large_n().unwrap();
        prop_assert_eq!(dp, da + db);
        prop_assert_eq!(lp, la * lb);
    }

    #[test]
    fn permutation_group_laws((p, q) in perm_pair()) {
        let id = Permutation::identity(p.len());
        prop_assert_eq!(p.compose(&p.inverse()).unwrap(), id.clone());
        prop_assert_eq!(p.inverse().compose(&p).unwrap(), id);
        prop_assert_eq!(p.compose(&q).unwrap().inverse(), q.inverse().compose(&p.inverse()).unwrap());
        // conjugation keeps the cycle type
        let conj = q.compose(&p).unwrap().compose(&q.inverse()).unwrap();
        prop_assert_eq!(conj.cycle_type(), p.cycle_type());
        prop_assert_eq!(p.cycle_type().iter().sum::<usize>(), p.len());
        prop_assert_eq!(Permutation::parse(&p.to_string(), Some(p.len())).unwrap(), p.clone());
        prop_assert!(norm(&p.compose(&q).unwrap()) <= norm(&p) + norm(&q));
    }

    #[test]
    fn three_permutation_inequality_sampled((xi, sigma, tau) in perm_triple()) {
        let k = xi.len();
        let si = sigma.inverse();
        let lhs = tau.compose(&si).unwrap().cycle_count() + tau.compose(&xi).unwrap().cycle_count();
        let rhs = xi.inverse().compose(&si).unwrap().cycle_count() + k;
        prop_assert!(lhs <= rhs, "{} {} {}", xi, sigma, tau);
    }

    #[test]
    fn w_integral_agrees_and_is_a_probability(
        n in 2usize..=5,
        pick in any::<prop::sample::Index>(),
        raw in prop::collection::vec((0usize..5, 0usize..5), 0..=3),
    ) {
        let trees: Vec<_> = enumerate_trees(n, 0, 1).unwrap().collect();
        let t = &trees[pick.index(trees.len())];
        let pairs: Vec<(usize, usize)> = raw.iter().map(|&(a, b)| (a % n, b % n)).collect();
        let w = w_integral(t, &pairs).unwrap();
        prop_assert_eq!(&w, &w_integral_by_orderings(t, &pairs).unwrap());
        prop_assert!(w > Rational::from_integer(0.into()) && w <= int(1));
        if let Some((_, rest)) = pairs.split_last() {
            prop_assert!(w <= w_integral(t, rest).unwrap());
        }
    }
}

#[test]
fn loop_edges_are_suppressed() {
    let cases = [
        ColoredGraph::dipole(3),
        ColoredGraph::dipole(4),
        ColoredGraph::parse(&["(1,2)", "(1)(2)", "(1)(2)"]).unwrap(),
    ];
    for b in &cases {
        for n in b.k..=3 {
            for q in 0..=2 {
                for s in tree_loop_sums(b, n, q, Exec::Sequential).unwrap() {
                    if s.value.is_zero() {
                        continue;
                    }
                    let (deg, _) = s.value.large_n().unwrap();
                    let cap = -((q * (b.d - 2)) as i64);
                    assert!(deg <= cap, "D={} k={} n={n} q={q}: N^{deg} in {}", b.d, b.k, s.walk);
                }
            }
        }
    }
}
