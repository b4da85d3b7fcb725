//! Loop graphs: trees whose leaves are paired by loops.
//!
//! A loop graph of order `n` and genus `g` is a tree in `Y^n` together with
//! `g` disjoint pairs of its leaves. Pairs are recorded on the original leaf
//! numbering `0..=n`; the remaining free leaves are relabelled
//! left to right when a graph stands for a correlation function.
//!
//! Which pairs may be added is a [`ContractionRule`]. The default,
//! [`ContractionRule::AdjacentOnly`], pairs two free leaves only when they
//! are neighbours in the original tree.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::AlgebraError;
use crate::lincomb::LinComb;
use crate::tree::{enumerate_trees, graft, Tree};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LoopGraph {
    base: Tree,
    loops: Vec<(usize, usize)>,
}

pub type GraphComb<R> = LinComb<LoopGraph, R>;

/// Graphs with positive integer multiplicities.
pub type GraphMultiset = GraphComb<i64>;

/// When `_i↔_{i+1}` may pair two free leaves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ContractionRule {
    /// Only leaves `a, a+1` of the original tree. No loop nests inside
    /// another. Gives five graphs in `(Y^3)^2` and one in `(Y^1)^1`.
    #[default]
    AdjacentOnly,
    /// Nearest free neighbours: leaves between them must already be looped.
    NearestFree,
    /// [`NearestFree`](Self::NearestFree), rejecting a move that leaves a
    /// single free leaf walled in by looped leaves on both sides.
    Isolation,
}

impl LoopGraph {
    /// A tree with no loops.
    pub fn tree(base: Tree) -> Self {
        LoopGraph { base, loops: Vec::new() }
    }

    /// Validates that the pairs are in range, disjoint and properly nested.
    pub fn new(base: Tree, mut loops: Vec<(usize, usize)>) -> Result<Self, AlgebraError> {
        let leaves = base.leaves();
        let mut used = vec![false; leaves];
        for &(a, b) in &loops {
            if a >= b || b >= leaves {
                return Err(AlgebraError::InvalidGraph(format!("bad pair ({a},{b}) for {leaves} leaves")));
            }
            for x in [a, b] {
                if std::mem::replace(&mut used[x], true) {
                    return Err(AlgebraError::InvalidGraph(format!("leaf {x} used twice")));
                }
            }
        }
        loops.sort_unstable();
        for &(a, b) in &loops {
            for c in a + 1..b {
                let Some(&(x, y)) = loops.iter().find(|(x, y)| *x == c || *y == c) else {
                    return Err(AlgebraError::InvalidGraph(format!("free leaf {c} inside ({a},{b})")));
                };
                if x < a || y > b {
                    return Err(AlgebraError::InvalidGraph(format!("({a},{b}) crosses ({x},{y})")));
                }
            }
        }
        Ok(LoopGraph { base, loops })
    }

    pub fn base(&self) -> &Tree {
        &self.base
    }

    pub fn loops(&self) -> &[(usize, usize)] {
        &self.loops
    }

    pub fn order(&self) -> usize {
        self.base.order()
    }

    pub fn genus(&self) -> usize {
        self.loops.len()
    }

    fn is_looped(&self, leaf: usize) -> bool {
        self.loops.iter().any(|&(a, b)| a == leaf || b == leaf)
    }

    /// Original indices of the unlooped leaves, left to right.
    pub fn free_leaves(&self) -> Vec<usize> {
        (0..self.base.leaves()).filter(|&x| !self.is_looped(x)).collect()
    }

    /// Number of labels including the root: `n + 2 - 2g`.
    pub fn label_count(&self) -> usize {
        self.base.leaves() + 1 - 2 * self.genus()
    }

    /// The loop joining the last leaf of the left branch to the first leaf
    /// of the right branch.
    pub fn root_bridge(&self) -> Option<(usize, usize)> {
        let (l, _) = self.base.children()?;
        let pair = (l.order(), l.order() + 1);
        self.loops.contains(&pair).then_some(pair)
    }

    /// Loops with both ends in the same branch of the root.
    pub fn same_branch_loops(&self) -> impl Iterator<Item = &(usize, usize)> {
        let split = self.base.children().map_or(0, |(l, _)| l.order());
        self.loops.iter().filter(move |&&(a, b)| b <= split || a > split)
    }

    /// Reflection through the vertical axis of the root.
    pub fn mirror(&self) -> LoopGraph {
        let n = self.order();
        let mut loops: Vec<_> = self.loops.iter().map(|&(a, b)| (n - b, n - a)).collect();
        loops.sort_unstable();
        LoopGraph { base: self.base.mirror(), loops }
    }
}

impl fmt::Display for LoopGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};loops=[", self.base)?;
        for (i, (a, b)) in self.loops.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({a},{b})")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for LoopGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `_i↔_{i+1}` under the default rule.
pub fn contract(graph: &LoopGraph, i: usize) -> Result<Option<LoopGraph>, AlgebraError> {
    contract_with(graph, i, ContractionRule::default())
}

/// Pair the free leaves currently numbered `i` and `i+1`.
///
/// `Ok(None)` is the zero graph: no right neighbour, or a pair the rule
/// forbids.
pub fn contract_with(graph: &LoopGraph, i: usize, rule: ContractionRule) -> Result<Option<LoopGraph>, AlgebraError> {
    let free = graph.free_leaves();
    if free.len() < 2 || i >= free.len() {
        return Err(AlgebraError::IndexOutOfRange { index: i, len: free.len() });
    }
    let Some(&b) = free.get(i + 1) else { return Ok(None) };
    let a = free[i];
    if rule == ContractionRule::AdjacentOnly && b != a + 1 {
        return Ok(None);
    }
    let mut loops = graph.loops.clone();
    loops.push((a, b));
    loops.sort_unstable();
    let next = LoopGraph { base: graph.base.clone(), loops };
    if rule == ContractionRule::Isolation && walls_in_single_leaf(&next) {
        return Ok(None);
    }
    Ok(Some(next))
}

fn walls_in_single_leaf(graph: &LoopGraph) -> bool {
    let leaves = graph.base.leaves();
    graph
        .free_leaves()
        .into_iter()
        .any(|c| c > 0 && c + 1 < leaves && graph.is_looped(c - 1) && graph.is_looped(c + 1))
}

fn check_euler(n: usize, g: usize) -> Result<(), AlgebraError> {
    if n + 2 < 2 * g + 1 {
        return Err(AlgebraError::InconsistentEuler { order: n, genus: g });
    }
    Ok(())
}

/// `(Y^n)^g` under the default rule.
pub fn enumerate_loop_graphs(n: usize, g: usize) -> Result<GraphMultiset, AlgebraError> {
    enumerate_loop_graphs_with(n, g, ContractionRule::default())
}

/// All graphs reachable from `Y^n` by `g` contractions, each once.
pub fn enumerate_loop_graphs_with(n: usize, g: usize, rule: ContractionRule) -> Result<GraphMultiset, AlgebraError> {
    check_euler(n, g)?;
    let mut layer: BTreeSet<LoopGraph> = enumerate_trees(n).into_iter().map(LoopGraph::tree).collect();
    for _ in 0..g {
        let mut next = BTreeSet::new();
        for graph in &layer {
            for i in 0..graph.free_leaves().len() {
                if let Some(h) = contract_with(graph, i, rule)? {
                    next.insert(h);
                }
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().map(|x| (x, 1)).collect())
}

/// `(Y^n)^g`, or empty when the Euler characteristic is out of range.
fn graphs_or_empty(n: usize, g: usize) -> Vec<LoopGraph> {
    enumerate_loop_graphs(n, g)
        .map(|m| m.basis_elements().cloned().collect())
        .unwrap_or_default()
}

/// `x1 ∨ x2` with the loops of both sides carried along.
pub fn graft_graphs(x1: &LoopGraph, x2: &LoopGraph) -> LoopGraph {
    let shift = x1.base.leaves();
    let mut loops = x1.loops.clone();
    loops.extend(x2.loops.iter().map(|&(a, b)| (a + shift, b + shift)));
    LoopGraph { base: graft(&x1.base, &x2.base), loops }
}

/// `x1 ⋈ x2`: graft and join the last leaf of `x1` to the first of `x2`.
/// `None` when either end is already looped.
pub fn bridge(x1: &LoopGraph, x2: &LoopGraph) -> Option<LoopGraph> {
    let last = x1.base.order();
    if x1.is_looped(last) || x2.is_looped(0) {
        return None;
    }
    let mut out = graft_graphs(x1, x2);
    out.loops.push((last, last + 1));
    out.loops.sort_unstable();
    Some(out)
}

/// Undo [`graft_graphs`] or [`bridge`] at the root: `(x1, x2, bridged)`.
/// `None` for the bare edge or a loop crossing the root other than the
/// bridge.
pub fn split_root(graph: &LoopGraph) -> Option<(LoopGraph, LoopGraph, bool)> {
    let (t1, t2) = graph.base.children()?;
    let shift = t1.leaves();
    let (mut left, mut right, mut bridged) = (Vec::new(), Vec::new(), false);
    for &(a, b) in &graph.loops {
        if b < shift {
            left.push((a, b));
        } else if a >= shift {
            right.push((a - shift, b - shift));
        } else if (a, b) == (shift - 1, shift) {
            bridged = true;
        } else {
            return None;
        }
    }
    Some((
        LoopGraph { base: t1.clone(), loops: left },
        LoopGraph { base: t2.clone(), loops: right },
        bridged,
    ))
}

/// The right-hand side of the genus decomposition over `t = t1 ∨ t2`:
/// `Σ (t1)^k ∨ (t2)^{g-k} + Σ (t1)^{g-1-k} ⋈ (t2)^k`.
pub fn genus_split(n: usize, g: usize) -> Result<GraphMultiset, AlgebraError> {
    check_euler(n, g)?;
    let mut out = GraphMultiset::zero();
    if n == 0 {
        out.add_term(LoopGraph::tree(Tree::Leaf), 1);
        return Ok(out);
    }
    for p in 0..n {
        let q = n - 1 - p;
        for k in 0..=g {
            for x1 in graphs_or_empty(p, k) {
                for x2 in graphs_or_empty(q, g - k) {
                    out.add_term(graft_graphs(&x1, &x2), 1);
                }
            }
        }
        for k in 0..g {
            for x1 in graphs_or_empty(p, g - 1 - k) {
                for x2 in graphs_or_empty(q, k) {
                    if let Some(x) = bridge(&x1, &x2) {
                        out.add_term(x, 1);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// 2 for a root-bridged graph symmetric under reflection, else 1.
///
/// `(1)^1` is symmetric and bridged but is the only graph of its order and
/// has no double-counting partner, so it keeps weight 1.
pub fn graph_weight(graph: &LoopGraph) -> u32 {
    if graph.order() > 1 && graph.root_bridge().is_some() && graph.mirror() == *graph {
        2
    } else {
        1
    }
}

/// `(Y^n)^g` with each graph carrying its weight.
pub fn weighted_loop_graphs(n: usize, g: usize) -> Result<GraphMultiset, AlgebraError> {
    let set = enumerate_loop_graphs(n, g)?;
    Ok(set.basis_elements().map(|x| (x.clone(), graph_weight(x) as i64)).collect())
}

/// Applying same-branch contractions to every same-branch 1-loop graph of
/// order `n` reaches each same-branch 2-loop graph exactly twice.
pub fn derivation_overcount_check(n: usize) -> bool {
    let all_same = |x: &LoopGraph| x.same_branch_loops().count() == x.genus();
    let mut counts = GraphMultiset::zero();
    for x in graphs_or_empty(n, 1).into_iter().filter(all_same) {
        for i in 0..x.free_leaves().len() {
            if let Ok(Some(y)) = contract(&x, i) {
                if all_same(&y) {
                    counts.add_term(y, 1);
                }
            }
        }
    }
    let targets: Vec<LoopGraph> = graphs_or_empty(n, 2).into_iter().filter(all_same).collect();
    counts.len() == targets.len() && targets.iter().all(|y| counts.coeff(y) == 2)
}

/// Ungraft a root-bridged graph and straighten it into a graph of order
/// `n-1`: the left branch keeps its place, and the right branch hangs from
/// the bridge with its root edge becoming the rightmost leaf.
pub fn ungraft_bridge(graph: &LoopGraph) -> Result<LoopGraph, AlgebraError> {
    let (a, _) = graph
        .root_bridge()
        .ok_or_else(|| AlgebraError::InvalidGraph(format!("{graph} has no root bridge")))?;
    let (t1, t2) = graph.base.children().expect("bridged graphs have a root");
    let base = crate::ck::under(t1, &rehang_from_first_leaf(t2));
    let loops = graph
        .loops
        .iter()
        .filter(|&&l| l != (a, a + 1))
        .map(|&(x, y)| {
            let shift = |z: usize| if z > a { z - 2 } else { z };
            (shift(x), shift(y))
        })
        .collect();
    LoopGraph::new(base, loops)
}

/// `t` re-rooted at its leftmost leaf: the right subtrees met along the left
/// spine, innermost first, each grafted to the left of the path to the old
/// root.
fn rehang_from_first_leaf(t: &Tree) -> Tree {
    let mut spine = Vec::new();
    let mut cur = t;
    while let Some((l, r)) = cur.children() {
        spine.push(r.clone());
        cur = l;
    }
    spine.iter().fold(Tree::Leaf, |acc, side| graft(side, &acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::of_perm_str(s).unwrap()
    }

    fn lg(s: &str, loops: &[(usize, usize)]) -> LoopGraph {
        LoopGraph::new(t(s), loops.to_vec()).unwrap()
    }

    fn one_loop() -> LoopGraph {
        LoopGraph::new(Tree::generator(), vec![(0, 1)]).unwrap()
    }

    fn balanced() -> Tree {
        t("132")
    }

    /// Every set of disjoint pairs on `0..leaves` accepted by `LoopGraph::new`.
    fn all_matchings(base: &Tree, g: usize) -> Vec<LoopGraph> {
        let leaves = base.leaves();
        let pairs: Vec<(usize, usize)> = (0..leaves).flat_map(|a| (a + 1..leaves).map(move |b| (a, b))).collect();
        let mut out = Vec::new();
        fn rec(pairs: &[(usize, usize)], start: usize, g: usize, cur: &mut Vec<(usize, usize)>, base: &Tree, out: &mut Vec<LoopGraph>) {
            if cur.len() == g {
                if let Ok(x) = LoopGraph::new(base.clone(), cur.clone()) {
                    out.push(x);
                }
                return;
            }
            for j in start..pairs.len() {
                cur.push(pairs[j]);
                rec(pairs, j + 1, g, cur, base, out);
                cur.pop();
            }
        }
        rec(&pairs, 0, g, &mut Vec::new(), base, &mut out);
        out
    }

    #[test]
    fn validation() {
        assert!(LoopGraph::new(t("12"), vec![(0, 2)]).is_err());
        assert!(LoopGraph::new(t("123"), vec![(0, 2), (1, 3)]).is_err());
        assert!(LoopGraph::new(t("123"), vec![(0, 3), (1, 2)]).is_ok());
        assert!(LoopGraph::new(t("12"), vec![(0, 1), (1, 2)]).is_err());
        assert!(LoopGraph::new(t("12"), vec![(2, 3)]).is_err());
    }

    #[test]
    fn contract_examples() {
        let g = LoopGraph::tree(Tree::generator());
        assert_eq!(contract(&g, 0).unwrap(), Some(one_loop()));
        let bridged = LoopGraph::new(balanced(), vec![(1, 2)]).unwrap();
        assert_eq!(contract(&bridged, 0).unwrap(), None);
        assert!(contract(&LoopGraph::tree(Tree::Leaf), 0).is_err());
        assert!(contract(&g, 5).is_err());
        assert_eq!(contract(&g, 1).unwrap(), None);
    }

    #[test]
    fn rules_differ_on_nesting() {
        let bridged = LoopGraph::new(balanced(), vec![(1, 2)]).unwrap();
        let nested = LoopGraph::new(balanced(), vec![(0, 3), (1, 2)]).unwrap();
        assert_eq!(contract_with(&bridged, 0, ContractionRule::NearestFree).unwrap(), Some(nested.clone()));
        assert_eq!(contract_with(&bridged, 0, ContractionRule::Isolation).unwrap(), Some(nested));
        let lone = LoopGraph::new(t("1234"), vec![(0, 1)]).unwrap();
        // Pairing 3,4 would wall in leaf 2.
        assert_eq!(contract_with(&lone, 1, ContractionRule::Isolation).unwrap(), None);
        assert!(contract_with(&lone, 1, ContractionRule::NearestFree).unwrap().is_some());
    }

    #[test]
    fn single_graph_at_order_one() {
        let set = enumerate_loop_graphs(1, 1).unwrap();
        assert_eq!(set, GraphMultiset::basis(one_loop()));
        assert_eq!(one_loop().to_string(), "(|,|);loops=[(0,1)]");
    }

    #[test]
    fn genus_two_order_three() {
        let set = enumerate_loop_graphs(3, 2).unwrap();
        assert_eq!(set.len(), 5);
        for x in set.basis_elements() {
            assert_eq!(x.loops(), &[(0, 1), (2, 3)]);
        }
        // The balanced tree only carries same-branch loops.
        let on_balanced: Vec<_> = set.basis_elements().filter(|x| *x.base() == balanced()).collect();
        assert_eq!(on_balanced.len(), 1);
        assert!(on_balanced[0].root_bridge().is_none());
        assert_eq!(enumerate_loop_graphs_with(3, 2, ContractionRule::NearestFree).unwrap().len(), 10);
        assert_eq!(enumerate_loop_graphs_with(3, 2, ContractionRule::Isolation).unwrap().len(), 10);
    }

    #[test]
    fn euler_bound() {
        assert!(matches!(enumerate_loop_graphs(1, 2), Err(AlgebraError::InconsistentEuler { .. })));
        assert!(enumerate_loop_graphs(3, 2).is_ok());
        assert!(enumerate_loop_graphs(4, 3).is_err());
        for x in enumerate_loop_graphs(4, 2).unwrap().basis_elements() {
            assert_eq!(x.label_count() as i64, 4 + 2 - 4);
        }
    }

    #[test]
    fn genus_zero_is_trees() {
        for n in 0..=4 {
            let set = enumerate_loop_graphs(n, 0).unwrap();
            let trees: Vec<Tree> = set.basis_elements().map(|x| x.base().clone()).collect();
            assert_eq!(trees, enumerate_trees(n));
        }
    }

    #[test]
    fn adjacent_rule_matches_matching_oracle() {
        // Oracle: all valid matchings whose pairs are consecutive leaves.
        let binom = |n: usize, k: usize| (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1));
        for n in 0..=5 {
            for g in 0..=(n + 1) / 2 {
                let set = enumerate_loop_graphs(n, g).unwrap();
                let mut expect = BTreeSet::new();
                for tree in enumerate_trees(n) {
                    for x in all_matchings(&tree, g) {
                        if x.loops().iter().all(|&(a, b)| b == a + 1) {
                            expect.insert(x);
                        }
                    }
                }
                let got: BTreeSet<LoopGraph> = set.basis_elements().cloned().collect();
                assert_eq!(got, expect, "n={n} g={g}");
                assert_eq!(got.len(), enumerate_trees(n).len() * binom(n + 1 - g, g));
            }
        }
    }

    #[test]
    fn nearest_free_reaches_all_nested_matchings() {
        for n in 0..=4 {
            for g in 0..=(n + 1) / 2 {
                let set = enumerate_loop_graphs_with(n, g, ContractionRule::NearestFree).unwrap();
                let got: BTreeSet<LoopGraph> = set.basis_elements().cloned().collect();
                let expect: BTreeSet<LoopGraph> =
                    enumerate_trees(n).iter().flat_map(|tr| all_matchings(tr, g)).collect();
                assert_eq!(got, expect, "n={n} g={g}");
            }
        }
    }

    #[test]
    fn genus_split_matches_enumeration() {
        for n in 0..=5 {
            for g in 0..=2 {
                if check_euler(n, g).is_err() {
                    assert!(genus_split(n, g).is_err());
                    continue;
                }
                let split = genus_split(n, g).unwrap();
                assert!(split.iter().all(|(_, c)| *c == 1), "n={n} g={g}");
                assert_eq!(split, enumerate_loop_graphs(n, g).unwrap(), "n={n} g={g}");
            }
        }
        let only_bridge = genus_split(1, 1).unwrap();
        assert_eq!(only_bridge, GraphMultiset::basis(bridge(&LoopGraph::tree(Tree::Leaf), &LoopGraph::tree(Tree::Leaf)).unwrap()));
    }

    #[test]
    fn weights() {
        assert_eq!(graph_weight(&one_loop()), 1);
        assert_eq!(graph_weight(&LoopGraph::tree(balanced())), 1);
        assert_eq!(graph_weight(&lg("132", &[(1, 2)])), 2);
        assert_eq!(graph_weight(&lg("213", &[(1, 2)])), 1);
        let w = weighted_loop_graphs(3, 1).unwrap();
        assert_eq!(w.len(), 15);
        let heavy: Vec<_> = w.iter().filter(|(_, c)| **c == 2).collect();
        assert_eq!(heavy.len(), 1);
        assert_eq!(heavy[0].0, &lg("132", &[(1, 2)]));
    }

    #[test]
    fn weight_oracle_counts_mirror_partners() {
        // A root-bridged graph is met once from each side of the bridge;
        // the two coincide exactly when it is its own mirror.
        for n in 2..=5 {
            for g in 1..=(n + 1) / 2 {
                for x in enumerate_loop_graphs(n, g).unwrap().basis_elements() {
                    let expect = if x.root_bridge().is_some() && x.mirror() == *x { 2 } else { 1 };
                    assert_eq!(graph_weight(x), expect, "{x}");
                }
            }
        }
    }

    #[test]
    fn overcount() {
        for n in 1..=5 {
            assert!(derivation_overcount_check(n), "n={n}");
        }
    }

    #[test]
    fn ungrafting_a_bridge() {
        let x = lg("213", &[(2, 3)]);
        assert_eq!(ungraft_bridge(&x).unwrap(), LoopGraph::tree(t("21")));
        assert!(ungraft_bridge(&lg("213", &[(1, 2)])).is_err());
        assert_eq!(ungraft_bridge(&one_loop()).unwrap(), LoopGraph::tree(Tree::Leaf));
        // Right branch (1)∨| hangs from its first leaf as | ∨ (| ∨ |).
        let y = bridge(&LoopGraph::tree(Tree::Leaf), &LoopGraph::tree(t("12"))).unwrap();
        assert_eq!(ungraft_bridge(&y).unwrap(), LoopGraph::tree(t("21")));
        for n in 1..=5 {
            for x in enumerate_loop_graphs(n, 1).unwrap().basis_elements() {
                if x.root_bridge().is_some() {
                    assert_eq!(ungraft_bridge(x).unwrap().order(), n - 1);
                }
            }
        }
    }

    #[test]
    fn mirror_is_involution() {
        for x in enumerate_loop_graphs(4, 2).unwrap().basis_elements() {
            assert_eq!(x.mirror().mirror(), *x);
        }
    }
}
