use std::cmp::Ordering;

use proptest::prelude::*;
use zext::enumeration::{double_star, free_trees};
use zext::error::Error;
use zext::indices::{exp_vdb_index, IndexName};
use zext::search::hill_climb;
use zext::spectrum::edge_spectrum;
use zext::transforms::{balance_move, double_star_arms};
use zext::value::approx_log;
use zext::{compare, Tree, Vertex};

fn arb_tree(lo: usize, hi: usize) -> impl Strategy<Value = Tree> {
    (lo..=hi).prop_flat_map(|n| {
        proptest::collection::vec(0..n, n - 2).prop_map(|s| Tree::from_prufer(&s).unwrap())
    })
}

fn arb_relabeled(lo: usize, hi: usize) -> impl Strategy<Value = (Tree, Tree)> {
    arb_tree(lo, hi).prop_flat_map(|t| {
        let perm = Just((0..t.n()).collect::<Vec<Vertex>>()).prop_shuffle();
        (Just(t), perm).prop_map(|(t, p)| {
            let edges: Vec<_> = t.edges().iter().map(|&(u, v)| (p[u], p[v])).collect();
            let s = Tree::with_order(t.n(), &edges).unwrap();
            (t, s)
        })
    })
}

fn brute_isomorphic(a: &Tree, b: &Tree) -> bool {
    let n = a.n();
    if n != b.n() {
        return false;
    }
    let mut perm: Vec<Vertex> = (0..n).collect();
    loop {
        if a.edges().iter().all(|&(u, v)| b.has_edge(perm[u], perm[v])) {
            return true;
        }
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1))
            .rev()
            .find(|&i| perm[i] < perm[i + 1])
        else {
            return false;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectrum_ignores_labels((t, s) in arb_relabeled(2, 40)) {
        prop_assert_eq!(edge_spectrum(&t).unwrap(), edge_spectrum(&s).unwrap());
        prop_assert_eq!(t.canonical_key(), s.canonical_key());
    }

    #[test]
    fn exact_log_matches_float_sum(t in arb_tree(2, 50)) {
        let spec = edge_spectrum(&t).unwrap();
        let exact = exp_vdb_index(&t, IndexName::M2.def()).unwrap();
        let top = spec.iter().map(|((i, j), _)| (i * j) as f64).fold(f64::MIN, f64::max);
        let float = top
            + spec.iter().map(|((i, j), c)| c as f64 * ((i * j) as f64 - top).exp()).sum::<f64>().ln();
        let got = approx_log(&exact).unwrap();
        prop_assert!((got - float).abs() <= 1e-9 * float.abs(), "{} vs {}", got, float);
    }

    #[test]
    fn keys_agree_with_brute_force(a in arb_tree(2, 7), b in arb_tree(2, 7)) {
        prop_assert_eq!(a.canonical_key() == b.canonical_key(), brute_isomorphic(&a, &b));
    }

    #[test]
    fn balancing_takes_expected_steps(x in 1usize..20, extra in 0usize..30) {
        let y = x + extra;
        let mut t = double_star(x, y).unwrap();
        let mut steps = 0;
        loop {
            match balance_move(&t) {
                Ok(r) => {
                    prop_assert_eq!(r.strict_increase, Ordering::Greater);
                    t = r.after;
                    steps += 1;
                }
                Err(Error::AlreadyBalanced) => break,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        prop_assert_eq!(steps, (y - x).saturating_sub(1).div_ceil(2));
        let (a, b) = double_star_arms(&t).unwrap();
        prop_assert!(b - a <= 1);
    }

    #[test]
    fn hill_climb_ignores_labels((t, s) in arb_relabeled(5, 14)) {
        let a: Vec<String> = hill_climb(&t).unwrap().iter().map(|r| r.after.canonical_key().to_owned()).collect();
        let b: Vec<String> = hill_climb(&s).unwrap().iter().map(|r| r.after.canonical_key().to_owned()).collect();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn compare_is_a_total_order_on_seven_vertices() {
    let m2 = IndexName::M2.def();
    let values: Vec<_> = free_trees(7)
        .unwrap()
        .map(|t| exp_vdb_index(&t, m2).unwrap())
        .collect();
    assert_eq!(values.len(), 11);
    for a in &values {
        assert_eq!(compare(a, a).unwrap(), Ordering::Equal);
        for b in &values {
            let ab = compare(a, b).unwrap();
            assert_eq!(ab, compare(b, a).unwrap().reverse());
            let fl = approx_log(a)
                .unwrap()
                .partial_cmp(&approx_log(b).unwrap())
                .unwrap();
            if ab != Ordering::Equal {
                assert_eq!(ab, fl);
            }
            for c in &values {
                if ab != Ordering::Greater && compare(b, c).unwrap() != Ordering::Greater {
                    assert_ne!(compare(a, c).unwrap(), Ordering::Greater);
                }
            }
        }
    }
}
