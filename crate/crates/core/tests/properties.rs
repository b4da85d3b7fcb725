use proptest::prelude::*;

use hopf_toprec::ck::{phi, phi_inverse, Forest};
use hopf_toprec::hopf::{antipode, convolve, coproduct, counit, star, TreeComb};
use hopf_toprec::io::json::{from_json_str, to_json_string};
use hopf_toprec::io::parse::{parse_forest, parse_graph, parse_perm, parse_tree, parse_tree_comb};
use hopf_toprec::io::render::Render;
use hopf_toprec::lincomb::Tensor;
use hopf_toprec::loops::{enumerate_loop_graphs, LoopGraph};
use hopf_toprec::perm::{compose, cross, decompose};
use hopf_toprec::quantize::{q_op, q_parts};
use hopf_toprec::tree::{perm_to_tree, tree_to_perms};
use hopf_toprec::{Perm, Tree, Q};

fn tree(max: usize) -> impl Strategy<Value = Tree> {
    (0..=max).prop_flat_map(|n| {
        let all = hopf_toprec::tree::enumerate_trees(n);
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn perm(max: usize) -> impl Strategy<Value = Perm> {
    (0..=max).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::new(v).unwrap()))
}

fn graph(max: usize) -> impl Strategy<Value = LoopGraph> {
    (0..=max).prop_flat_map(|n| {
        let all: Vec<LoopGraph> = (0..=(n + 1) / 2)
            .flat_map(|g| enumerate_loop_graphs(n, g).unwrap().basis_elements().cloned().collect::<Vec<_>>())
            .collect();
        (0..all.len()).prop_map(move |i| all[i].clone())
    })
}

fn comb(max: usize) -> impl Strategy<Value = TreeComb<Q>> {
    prop::collection::vec((tree(max), -3i64..=3), 0..4)
        .prop_map(|v| v.into_iter().map(|(t, c)| (t, Q::from_integer(c.into()))).collect())
}

fn b(t: &Tree) -> TreeComb<Q> {
    TreeComb::basis(t.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tree_text_and_json_round_trip(t in tree(7)) {
        prop_assert_eq!(parse_tree(&t.text()).unwrap(), t.clone());
        prop_assert_eq!(from_json_str::<Tree>(&to_json_string(&t)).unwrap(), t);
    }

    #[test]
    fn perm_round_trip(p in perm(7)) {
        prop_assert_eq!(parse_perm(&p.text()).unwrap(), p.clone());
        prop_assert_eq!(from_json_str::<Perm>(&to_json_string(&p)).unwrap(), p);
    }

    #[test]
    fn graph_round_trip(x in graph(5)) {
        prop_assert_eq!(parse_graph(&x.text()).unwrap(), x.clone());
        prop_assert_eq!(from_json_str::<LoopGraph>(&to_json_string(&x)).unwrap(), x);
    }

    #[test]
    fn comb_round_trip(a in comb(4)) {
        prop_assert_eq!(parse_tree_comb::<Q>(&a.text()).unwrap(), a.clone());
        prop_assert_eq!(from_json_str::<TreeComb<Q>>(&to_json_string(&a)).unwrap(), a);
    }

    #[test]
    fn mirror_is_an_involution(t in tree(7), x in graph(5)) {
        prop_assert_eq!(t.mirror().mirror(), t.clone());
        prop_assert_eq!(t.mirror().order(), t.order());
        prop_assert_eq!(x.mirror().mirror(), x.clone());
        prop_assert_eq!(x.mirror().genus(), x.genus());
    }

    #[test]
    fn fiber_contains_its_perms(t in tree(6)) {
        for p in tree_to_perms(&t) {
            prop_assert_eq!(perm_to_tree(&p), t.clone());
        }
    }

    #[test]
    fn phi_round_trip(t in tree(7)) {
        if let Some(f) = phi_inverse(&t) {
            prop_assert_eq!(phi(&f), t.clone());
            let text = f.text();
            prop_assert_eq!(parse_forest(&text).unwrap(), f.clone());
            prop_assert_eq!(from_json_str::<Forest>(&to_json_string(&f)).unwrap(), f);
        }
    }

    #[test]
    fn decomposition_recomposes(p in perm(7), i in 0usize..8) {
        let n = p.order();
        let i = i.min(n);
        let d = decompose(&p, i).unwrap();
        prop_assert_eq!(d.left.order(), i);
        let imgs = d.shuffle.images();
        prop_assert!(imgs[..i].windows(2).all(|w| w[0] < w[1]));
        prop_assert!(imgs[i..].windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(compose(&d.shuffle, &cross(&d.left, &d.right)).unwrap(), p);
    }

    #[test]
    fn q_is_sum_of_parts(x in graph(5)) {
        let (l, m, r) = q_parts(&x);
        prop_assert_eq!(q_op(&x), l + m + r);
        for y in q_op(&x).basis_elements() {
            prop_assert_eq!(y.genus(), x.genus() + 1);
            prop_assert_eq!(y.base(), x.base());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn star_is_associative(x in tree(2), y in tree(2), z in tree(2)) {
        let (x, y, z) = (b(&x), b(&y), b(&z));
        prop_assert_eq!(star(&star(&x, &y), &z), star(&x, &star(&y, &z)));
    }

    #[test]
    fn coproduct_is_multiplicative(x in tree(2), y in tree(2)) {
        use hopf_toprec::hopf::star_tensor;
        let lhs = coproduct(&star(&b(&x), &b(&y)));
        let rhs = star_tensor(&coproduct(&b(&x)), &coproduct(&b(&y)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn counit_and_antipode(t in tree(4)) {
        let a = b(&t);
        let left = coproduct(&a).flat_map(|Tensor(v)| b(&v[1]).scale(&counit(&b(&v[0]))));
        prop_assert_eq!(left, a.clone());
        let expected = if t.is_leaf() { b(&Tree::Leaf) } else { TreeComb::zero() };
        prop_assert_eq!(convolve(&a, antipode, |x| x.clone()), expected.clone());
        prop_assert_eq!(convolve(&a, |x| x.clone(), antipode), expected);
    }
}
