//! The quantization operator on trees and loop graphs, the quantum product
//! and power series in `h` with loop-graph coefficients.

use std::fmt;

use crate::hopf::star;
use crate::lincomb::LinComb;
use crate::loops::{bridge, graft_graphs, split_root, weighted_loop_graphs, GraphComb, GraphMultiset, LoopGraph};
use crate::scalar::Scalar;
use crate::tree::Tree;

fn join(x1: &LoopGraph, x2: &LoopGraph, bridged: bool) -> Option<LoopGraph> {
    if bridged {
        bridge(x1, x2)
    } else {
        Some(graft_graphs(x1, x2))
    }
}

/// `(Q_L(x), Q_M(x), Q_R(x))`: quantize the left branch, bridge the root,
/// quantize the right branch. Terms that would reuse a looped leaf vanish.
pub fn q_parts(x: &LoopGraph) -> (GraphMultiset, GraphMultiset, GraphMultiset) {
    let Some((x1, x2, bridged)) = split_root(x) else {
        return (GraphMultiset::zero(), GraphMultiset::zero(), GraphMultiset::zero());
    };
    let left = q_op(&x1).flat_map(|y| join(y, &x2, bridged).map_or_else(LinComb::zero, LinComb::basis));
    let right = q_op(&x2).flat_map(|y| join(&x1, y, bridged).map_or_else(LinComb::zero, LinComb::basis));
    let middle = if bridged {
        GraphMultiset::zero()
    } else {
        bridge(&x1, &x2).map_or_else(LinComb::zero, LinComb::basis)
    };
    (left, middle, right)
}

/// `Q(t1 ∨ t2) = Q(t1) ∨ t2 + t1 ∨ Q(t2) + t1 ⋈ t2`, `Q(|) = 0`.
pub fn q_op(x: &LoopGraph) -> GraphMultiset {
    let (l, m, r) = q_parts(x);
    l + m + r
}

/// `Q` extended linearly.
pub fn q_op_comb<R: Scalar>(a: &GraphComb<R>) -> GraphComb<R> {
    a.flat_map(|x| q_op(x).convert(|c| R::from_int(*c)))
}

/// The product of two loop graphs.
///
/// Two trees multiply by `∗`. Otherwise the shuffle identity
/// `x∗y = x1⊙(x2∗y) + (x∗y1)⊙y2` runs on both root splits, where `⊙` is
/// `∨` or `⋈` as in the factor being split, so loops ride along and a root
/// bridge stays a bridge.
pub fn graph_star<R: Scalar>(x: &LoopGraph, y: &LoopGraph) -> GraphComb<R> {
    if x.genus() == 0 && y.genus() == 0 {
        return star::<R>(&LinComb::basis(x.base().clone()), &LinComb::basis(y.base().clone()))
            .map_basis(|t| LoopGraph::tree(t.clone()));
    }
    graph_shuffle(x, y)
}

fn graph_shuffle<R: Scalar>(x: &LoopGraph, y: &LoopGraph) -> GraphComb<R> {
    let (Some((x1, x2, bx)), Some((y1, y2, by))) = (split_root(x), split_root(y)) else {
        return GraphComb::basis(if x.base().is_leaf() { y.clone() } else { x.clone() });
    };
    let left = graph_shuffle::<R>(&x2, y).flat_map(|z| join(&x1, z, bx).map_or_else(LinComb::zero, LinComb::basis));
    let right = graph_shuffle::<R>(x, &y1).flat_map(|z| join(z, &y2, by).map_or_else(LinComb::zero, LinComb::basis));
    left + right
}

/// [`graph_star`] extended bilinearly.
pub fn graph_star_comb<R: Scalar>(a: &GraphComb<R>, b: &GraphComb<R>) -> GraphComb<R> {
    a.bilinear(b, graph_star)
}

/// A truncated power series in `h`; coefficient `g` holds genus-`g` graphs.
#[derive(Clone, PartialEq)]
pub struct HSeries<R: Scalar> {
    coeffs: Vec<GraphComb<R>>,
}

impl<R: Scalar> HSeries<R> {
    /// Trailing zero coefficients are dropped.
    pub fn new(coeffs: Vec<GraphComb<R>>) -> Self {
        let mut s = HSeries { coeffs };
        while s.coeffs.last().is_some_and(LinComb::is_zero) {
            s.coeffs.pop();
        }
        s
    }

    /// The bare edge `|`, standing for the cylinder `W^0_2`.
    pub fn unit() -> Self {
        HSeries::new(vec![GraphComb::basis(LoopGraph::tree(Tree::Leaf))])
    }

    pub fn coeffs(&self) -> &[GraphComb<R>] {
        &self.coeffs
    }

    /// Coefficient of `h^g`.
    pub fn coeff(&self, g: usize) -> GraphComb<R> {
        self.coeffs.get(g).cloned().unwrap_or_else(GraphComb::zero)
    }

    /// Highest power with a nonzero coefficient.
    pub fn max_power(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient `g` lies in genus `g`.
    pub fn is_graded(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(g, c)| c.basis_elements().all(|x| x.genus() == g))
    }

    /// `W{k}^{g}` per nonzero coefficient, e.g. `W3^0 + h*W1^1`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter_map(|(g, c)| {
                let x = c.basis_elements().next()?;
                let name = format!("W{}^{}", x.label_count(), g);
                Some(match g {
                    0 => name,
                    1 => format!("h*{name}"),
                    _ => format!("h^{g}*{name}"),
                })
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl<R: Scalar> fmt::Display for HSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| {
                let body = c.render_with(|x| x.to_string());
                match g {
                    0 => body,
                    1 => format!("h*({body})"),
                    _ => format!("h^{g}*({body})"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<R: Scalar> fmt::Debug for HSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The Cauchy product in `h` with [`graph_star`] on coefficients.
pub fn hseries_mul<R: Scalar>(a: &HSeries<R>, b: &HSeries<R>) -> HSeries<R> {
    let len = (a.coeffs.len() + b.coeffs.len()).saturating_sub(1);
    let mut out = vec![GraphComb::zero(); len];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] += &graph_star_comb(x, y);
        }
    }
    HSeries::new(out)
}

/// Every loop graph on `t`, one per genus layer: `Σ_g h^g Q^g(t)/g!`.
pub fn quantize_tree<R: Scalar>(t: &Tree) -> HSeries<R> {
    let mut layer = GraphMultiset::basis(LoopGraph::tree(t.clone()));
    let mut coeffs = Vec::new();
    while !layer.is_zero() {
        coeffs.push(layer.map_basis(Clone::clone).convert(|_| R::one()));
        layer = layer.basis_elements().fold(GraphMultiset::zero(), |acc, x| acc + q_op(x));
        layer = layer.map_basis(Clone::clone).convert(|_| 1);
    }
    HSeries::new(coeffs)
}

/// `1` or `2`: the parity offset in the top genus `(p+q-k_min)/2 + 1` of
/// `t1 ∗_h t2` for orders `p, q`.
pub fn k_min(p: usize, q: usize) -> usize {
    if (p + q) % 2 == 0 {
        2
    } else {
        1
    }
}

/// `t1 ∗_h t2 = Σ_k Σ_l h^k t1^l ∗_h t2^{k-l}` over all loop graphs on the
/// two trees.
pub fn quantum_star<R: Scalar>(t1: &Tree, t2: &Tree) -> HSeries<R> {
    let full = hseries_mul(&quantize_tree::<R>(t1), &quantize_tree::<R>(t2));
    let n = t1.order() + t2.order();
    let top = n.checked_sub(k_min(t1.order(), t2.order())).map_or(0, |x| x / 2 + 1);
    HSeries::new(full.coeffs.into_iter().take(top + 1).collect())
}

/// `W^(n) = W^0_{n+2} + h W^1_n + …` as weighted loop graphs, up to
/// `h^{n/2}` for even `n` and `h^{(n+1)/2}` for odd `n`.
pub fn build_w<R: Scalar>(n: usize) -> HSeries<R> {
    let top = if n % 2 == 0 { n / 2 } else { (n + 1) / 2 };
    HSeries::new(
        (0..=top)
            .map(|g| {
                weighted_loop_graphs(n, g)
                    .map(|m| m.convert(|c| R::from_int(*c)))
                    .unwrap_or_else(|_| GraphComb::zero())
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loops::{contract, enumerate_loop_graphs};
    use crate::tree::{enumerate_trees, graft};
    use crate::Q;

    fn t(s: &str) -> Tree {
        Tree::of_perm_str(s).unwrap()
    }

    fn g(s: &str, loops: &[(usize, usize)]) -> LoopGraph {
        LoopGraph::new(t(s), loops.to_vec()).unwrap()
    }

    fn set(xs: &[LoopGraph]) -> GraphMultiset {
        xs.iter().map(|x| (x.clone(), 1)).collect()
    }

    fn one_loop() -> LoopGraph {
        LoopGraph::new(Tree::generator(), vec![(0, 1)]).unwrap()
    }

    /// Every way to loop one more pair of neighbouring free leaves.
    fn q_oracle(x: &LoopGraph) -> GraphMultiset {
        let free = x.free_leaves();
        free.windows(2)
            .filter(|w| w[1] == w[0] + 1)
            .map(|w| {
                let mut loops = x.loops().to_vec();
                loops.push((w[0], w[1]));
                (LoopGraph::new(x.base().clone(), loops).unwrap(), 1)
            })
            .collect()
    }

    fn graphs_up_to(n: usize) -> Vec<LoopGraph> {
        (0..=n)
            .flat_map(|k| (0..=(k + 1) / 2).flat_map(move |gg| enumerate_loop_graphs(k, gg).unwrap().basis_elements().cloned().collect::<Vec<_>>()))
            .collect()
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_op(&LoopGraph::tree(Tree::generator())), set(&[one_loop()]));
        assert!(q_op(&LoopGraph::tree(Tree::Leaf)).is_zero());
        let q12 = q_op(&LoopGraph::tree(t("12")));
        assert_eq!(q12, set(&[g("12", &[(0, 1)]), g("12", &[(1, 2)])]));
        let q2 = q12.basis_elements().fold(GraphMultiset::zero(), |acc, x| acc + q_op(x));
        assert!(q2.is_zero());
    }

    #[test]
    fn parts_on_generator() {
        let (l, m, r) = q_parts(&LoopGraph::tree(Tree::generator()));
        assert!(l.is_zero() && r.is_zero());
        assert_eq!(m, set(&[one_loop()]));
        let (l, m, r) = q_parts(&LoopGraph::tree(Tree::Leaf));
        assert!(l.is_zero() && m.is_zero() && r.is_zero());
    }

    #[test]
    fn q_matches_oracle_and_parts_sum() {
        for x in graphs_up_to(4) {
            let (l, m, r) = q_parts(&x);
            assert_eq!(q_op(&x), l + m + r, "{x}");
            assert_eq!(q_op(&x), q_oracle(&x), "{x}");
        }
    }

    #[test]
    fn q_is_nilpotent() {
        for n in 0..=4 {
            for tree in enumerate_trees(n) {
                let mut cur = GraphMultiset::basis(LoopGraph::tree(tree));
                let mut steps = 0;
                while !cur.is_zero() {
                    cur = q_op_comb(&cur);
                    steps += 1;
                    assert!(steps <= n + 2);
                }
                assert!(steps <= (n + 1) / 2 + 1);
            }
        }
    }

    #[test]
    fn quantum_square_of_generator() {
        let s = quantum_star::<Q>(&Tree::generator(), &Tree::generator());
        let trees: GraphComb<Q> = [t("12"), t("21")].into_iter().map(|x| (LoopGraph::tree(x), Q::from_int(1))).collect();
        assert_eq!(s.coeff(0), trees);
        let four: GraphComb<Q> = [g("12", &[(0, 1)]), g("12", &[(1, 2)]), g("21", &[(0, 1)]), g("21", &[(1, 2)])]
            .into_iter()
            .map(|x| (x, Q::from_int(1)))
            .collect();
        assert_eq!(s.coeff(1), four);
        assert_eq!(s.max_power(), Some(1));
        let contracted: GraphComb<Q> = trees
            .basis_elements()
            .flat_map(|x| (0..2).filter_map(|i| contract(x, i).unwrap()).collect::<Vec<_>>())
            .map(|x| (x, Q::from_int(1)))
            .collect();
        assert_eq!(s.coeff(1), contracted);
        assert_eq!(q_op_comb(&trees), four);
    }

    #[test]
    fn tree_times_one_loop() {
        let gen = LoopGraph::tree(Tree::generator());
        let expect: GraphComb<Q> =
            [g("21", &[(1, 2)]), g("12", &[(1, 2)])].into_iter().map(|x| (x, Q::from_int(1))).collect();
        assert_eq!(graph_star::<Q>(&gen, &one_loop()), expect);
        let leaf = LoopGraph::tree(Tree::Leaf);
        let expect_parts = graft_graphs(&leaf, &one_loop());
        assert!(expect.coeff(&expect_parts) == Q::from_int(1));
        assert!(expect.coeff(&bridge(&gen, &leaf).unwrap()) == Q::from_int(1));
        let mirrored: GraphComb<Q> = expect.map_basis(LoopGraph::mirror);
        assert_eq!(graph_star::<Q>(&one_loop(), &gen), mirrored);
        assert!(graph_star::<Q>(&one_loop(), &one_loop()).is_zero());
    }

    #[test]
    fn star_at_genus_zero() {
        for a in enumerate_trees(2) {
            for b in enumerate_trees(2) {
                let s = quantum_star::<Q>(&a, &b);
                let direct = star::<Q>(&LinComb::basis(a.clone()), &LinComb::basis(b.clone()));
                assert_eq!(s.coeff(0), direct.map_basis(|x| LoopGraph::tree(x.clone())));
                assert!(s.is_graded());
                assert!(s.max_power().unwrap() <= 2);
            }
        }
        assert_eq!(k_min(1, 1), 2);
        assert_eq!(k_min(1, 2), 1);
    }

    #[test]
    fn w_series() {
        let w1 = build_w::<Q>(1);
        assert_eq!(w1.coeff(0), GraphComb::basis(LoopGraph::tree(Tree::generator())));
        assert_eq!(w1.coeff(1), GraphComb::basis(one_loop()));
        assert_eq!(w1.summary(), "W3^0 + h*W1^1");
        let w2 = build_w::<Q>(2);
        assert_eq!(w2.coeff(0).len(), 2);
        assert_eq!(w2.coeff(1).len(), 4);
        assert_eq!(w2.max_power(), Some(1));
        let w3 = build_w::<Q>(3);
        assert_eq!(w3.max_power(), Some(2));
        let top: GraphComb<Q> = enumerate_loop_graphs(3, 2).unwrap().convert(|c| Q::from_int(*c));
        assert_eq!(w3.coeff(2), top);
        assert_eq!(build_w::<Q>(4).max_power(), Some(2));
    }

    #[test]
    fn w1_squared_is_w2() {
        let w1 = build_w::<Q>(1);
        let sq = hseries_mul(&w1, &w1);
        assert_eq!(sq, build_w::<Q>(2));
        let gen = LoopGraph::tree(Tree::generator());
        let h1 = graph_star::<Q>(&one_loop(), &gen) + graph_star::<Q>(&gen, &one_loop());
        assert_eq!(sq.coeff(1), h1);
        assert_eq!(hseries_mul(&HSeries::unit(), &w1), w1);
        assert_eq!(hseries_mul(&w1, &HSeries::unit()), w1);
    }

    #[test]
    fn shuffle_carries_loops() {
        let x = graft_graphs(&one_loop(), &LoopGraph::tree(Tree::Leaf));
        assert_eq!(x, g("12", &[(0, 1)]));
        let prod = graph_star::<Q>(&x, &LoopGraph::tree(Tree::generator()));
        for y in prod.basis_elements() {
            assert_eq!(y.genus(), 1);
            assert_eq!(y.order(), 3);
        }
        assert_eq!(graft(&Tree::Leaf, &Tree::Leaf), Tree::generator());
    }
}
